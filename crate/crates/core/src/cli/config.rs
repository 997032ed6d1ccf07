use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;

/// Parameters shared by the suites. Every field has a default, so an empty
/// JSON object (or an empty file) is a valid configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Largest member size in the axiom checks.
    pub bound: usize,
    /// Grade bound `N` of the partition class.
    pub grade: usize,
    /// Saturation rounds for orbit counts and back-and-forth steps for
    /// realising class permutations.
    pub depth: usize,
    /// Grade of the partition class whose label permutations are realised.
    pub realize_grade: usize,
    /// Saturation rounds of the approximation the mixing battery searches.
    pub mixing_depth: usize,
    /// Largest structure size in the exhaustive kernel and encoding batteries.
    pub cap_size: usize,
    /// Largest encoded structure in the free-amalgam battery.
    pub cap_elems: usize,
    /// Largest group order in the splitting battery.
    pub split_order: usize,
    /// Largest group order in the coset-chain battery.
    pub chain_order: usize,
    /// Largest group order whose subgroup lattice may be enumerated.
    pub subgroup_cap: usize,
    /// Largest number of candidate tables a polymorphism search may face.
    pub poly_cap: u64,
    /// Largest arity in the clone-isomorphism battery.
    pub clone_arity: usize,
    /// Worker threads; 0 lets the pool decide. Not part of the snapshot.
    pub threads: usize,
    /// Certificate directory. Not part of the snapshot.
    pub out: PathBuf,
    /// Reserved: every check is deterministic.
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            bound: 4,
            grade: 2,
            depth: 3,
            realize_grade: 3,
            mixing_depth: 2,
            cap_size: 3,
            cap_elems: 4,
            split_order: 16,
            chain_order: 24,
            subgroup_cap: 64,
            poly_cap: 1 << 20,
            clone_arity: 3,
            threads: 0,
            out: PathBuf::from("certificates"),
            seed: 0,
        }
    }
}

/// The parameters a certificate records: everything except scheduling and
/// output location.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub bound: usize,
    pub grade: usize,
    pub depth: usize,
    pub realize_grade: usize,
    pub mixing_depth: usize,
    pub cap_size: usize,
    pub cap_elems: usize,
    pub split_order: usize,
    pub chain_order: usize,
    pub subgroup_cap: usize,
    pub poly_cap: u64,
    pub clone_arity: usize,
    pub seed: u64,
}

impl SuiteConfig {
    /// Reads a JSON configuration; blank files give the defaults.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: SuiteConfig = if text.trim().is_empty() {
            SuiteConfig::default()
        } else {
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("bound", self.bound),
            ("grade", self.grade),
            ("depth", self.depth),
            ("realize_grade", self.realize_grade),
            ("mixing_depth", self.mixing_depth),
            ("cap_size", self.cap_size),
            ("cap_elems", self.cap_elems),
            ("split_order", self.split_order),
            ("chain_order", self.chain_order),
            ("subgroup_cap", self.subgroup_cap),
            ("clone_arity", self.clone_arity),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(CliError::Config(format!("{name} must be positive")));
        }
        if self.poly_cap == 0 {
            return Err(CliError::Config("poly_cap must be positive".into()));
        }
        Ok(())
    }

    pub fn snapshot(&self) -> ConfigSnapshot {
        ConfigSnapshot {
            bound: self.bound,
            grade: self.grade,
            depth: self.depth,
            realize_grade: self.realize_grade,
            mixing_depth: self.mixing_depth,
            cap_size: self.cap_size,
            cap_elems: self.cap_elems,
            split_order: self.split_order,
            chain_order: self.chain_order,
            subgroup_cap: self.subgroup_cap,
            poly_cap: self.poly_cap,
            clone_arity: self.clone_arity,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blank_and_empty_object_give_defaults() {
        assert_eq!(SuiteConfig::parse("").unwrap(), SuiteConfig::default());
        assert_eq!(SuiteConfig::parse("{}").unwrap(), SuiteConfig::default());
    }

    #[test]
    fn partial_config_keeps_other_defaults() {
        let c = SuiteConfig::parse(r#"{"bound": 3, "threads": 2}"#).unwrap();
        assert_eq!(c.bound, 3);
        assert_eq!(c.threads, 2);
        assert_eq!(c.grade, 2);
    }

    #[test]
    fn zero_bounds_and_unknown_keys_are_rejected() {
        assert!(SuiteConfig::parse(r#"{"grade": 0}"#).is_err());
        assert!(SuiteConfig::parse(r#"{"grades": 2}"#).is_err());
    }
}
