//! Finite model theory toolkit for oligomorphic structures: Fraïssé limits,
//! partition classes, pair encodings, finite group splittings and clones.

pub mod structures;
pub mod fraisse;
pub mod partition;
pub mod encoding;
pub mod groups;
pub mod clones;
pub mod cli;
