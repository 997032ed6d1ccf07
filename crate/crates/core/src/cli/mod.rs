//! Command-line surface: tasks with typed parameters, certificates that
//! record everything needed to re-run a task, suites of checks, and replay.

pub mod battery;
mod args;
mod config;
mod suite;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::clones::CloneError;
use crate::encoding::{EncodingError, GradedInnerSignature};
use crate::fraisse::FraisseError;
use crate::groups::GroupError;
use crate::partition::PartitionError;
use crate::structures::{FinStructure, PartialMap, StructureError};

pub use args::{main_with_args, Cli};
pub use config::{ConfigSnapshot, SuiteConfig};
pub use suite::{replay, run_suite, suite_tasks, write_certificate, ReplayOutcome, Suite, SuiteSummary};

use battery::*;

pub const SCHEMA: &str = "oligo-certificate/1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {error}")]
    Io { path: PathBuf, error: std::io::Error },
    #[error("configuration: {0}")]
    Config(String),
    #[error("input: {0}")]
    Input(String),
    #[error("replay: {0}")]
    Replay(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Fraisse(#[from] FraisseError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Clone(#[from] CloneError),
}

impl CliError {
    pub fn io(path: &Path, error: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            error,
        }
    }
}

/// What a task produces: a witness and a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub witness: serde_json::Value,
    pub verdict: bool,
}

/// An input file, kept by digest and content so replay needs nothing else.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDoc {
    pub sha256: String,
    pub content: String,
}

impl InputDoc {
    pub fn new(content: String) -> Self {
        InputDoc {
            sha256: hex::encode(Sha256::digest(content.as_bytes())),
            content,
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        Ok(Self::new(std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?))
    }

    pub fn intact(&self) -> bool {
        hex::encode(Sha256::digest(self.content.as_bytes())) == self.sha256
    }
}

pub type Inputs = BTreeMap<String, InputDoc>;

/// Two encoded structures, a common substructure and its embeddings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamInstance {
    pub arities: Vec<usize>,
    pub a: FinStructure,
    pub b: FinStructure,
    pub f: PartialMap,
    pub c: FinStructure,
    pub g: PartialMap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodecParams {
    pub input: String,
    /// Raw arities of the inner signature; read from the input when encoding.
    pub arities: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyEpParams {
    pub input: String,
    pub arities: Vec<usize>,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputParams {
    pub input: String,
}

/// A command with its parameters. Structure-valued inputs are named here and
/// carried in the certificate's input table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
pub enum Task {
    AxiomCheck(AxiomParams),
    Saturate(SaturateParams),
    Orbits(OrbitParams),
    RealizeSigma(RealizeParams),
    KernelCheck(KernelParams),
    Mixing(MixingInstanceParams),
    MixingBattery(MixingParams),
    Encode(CodecParams),
    Decode(CodecParams),
    VerifyEp(VerifyEpParams),
    AmalgamCheck(InputParams),
    EncodingRoundTrip(RoundTripParams),
    PaddedRoundTrip(PaddedRoundTripParams),
    AmalgamBattery(AmalgamBatteryParams),
    Split(SplitParams),
    SplitBattery(SplitBatteryParams),
    ChainVerify(InputParams),
    ChainBattery(ChainBatteryParams),
    Poly(PolyParams),
    GadgetCheck(GadgetParams),
    IsoCheck(CloneIsoParams),
}

impl Task {
    pub fn command(&self) -> String {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(m)) => m.get("command").and_then(|c| c.as_str()).unwrap_or_default().to_string(),
            _ => String::new(),
        }
    }

    /// Runs the task against the given inputs.
    pub fn run(&self, inputs: &Inputs) -> Result<Outcome, CliError> {
        let text = |key: &str| -> Result<&str, CliError> {
            let doc = inputs.get(key).ok_or_else(|| CliError::Input(format!("missing input {key}")))?;
            if !doc.intact() {
                return Err(CliError::Input(format!("input {key} does not match its digest")));
            }
            Ok(doc.content.as_str())
        };
        let structure = |key: &str| -> Result<FinStructure, CliError> { Ok(FinStructure::from_json(text(key)?)?) };
        match self {
            Task::AxiomCheck(p) => axiom(p),
            Task::Saturate(p) => saturate_task(p),
            Task::Orbits(p) => orbits(p),
            Task::RealizeSigma(p) => realize(p),
            Task::KernelCheck(p) => kernel(p),
            Task::Mixing(p) => mixing_instance(p),
            Task::MixingBattery(p) => mixing_battery(p),
            Task::Encode(p) => {
                let s = structure(&p.input)?;
                let inner = crate::encoding::pad_signature(s.signature())?;
                let e = crate::encoding::encode(&inner.translate(&s)?, &inner)?;
                let back = inner.untranslate(&crate::encoding::decode(&e, &inner)?, s.signature_arc())?;
                let verdict = back == s;
                Ok(Outcome {
                    witness: serde_json::json!({ "inner": inner, "encoded": e }),
                    verdict,
                })
            }
            Task::Decode(p) => {
                let e = structure(&p.input)?;
                let inner = inner_signature(p.arities.as_deref())?;
                let d = crate::encoding::decode(&e, &inner)?;
                Ok(Outcome {
                    witness: serde_json::json!({ "inner": inner, "decoded": d }),
                    verdict: true,
                })
            }
            Task::VerifyEp(p) => {
                let e = structure(&p.input)?;
                let inner = inner_signature(Some(&p.arities))?;
                let ok = crate::encoding::ep_define_check(&e, &inner, p.n)?;
                Ok(Outcome {
                    witness: serde_json::json!({ "n": p.n, "definable": ok }),
                    verdict: ok,
                })
            }
            Task::AmalgamCheck(p) => {
                let inst: AmalgamInstance = serde_json::from_str(text(&p.input)?)?;
                let inner = GradedInnerSignature::from_arities(&inst.arities)?;
                let oracle = crate::fraisse::FreeClass::new(inner.signature());
                let report = crate::encoding::free_amalgam_membership(&inst.a, &inst.b, &inst.f, &inst.c, &inst.g, &inner, &oracle)?;
                let verdict = report.pass;
                Ok(Outcome {
                    witness: serde_json::to_value(report)?,
                    verdict,
                })
            }
            Task::EncodingRoundTrip(p) => round_trip(p),
            Task::PaddedRoundTrip(p) => padded_round_trip(p),
            Task::AmalgamBattery(p) => amalgam_battery(p),
            Task::Split(p) => split(p),
            Task::SplitBattery(p) => split_battery(p),
            Task::ChainVerify(p) => chain_verify(&serde_json::from_str(text(&p.input)?)?),
            Task::ChainBattery(p) => chain_battery(p),
            Task::Poly(p) => poly(&structure(&p.input)?, p),
            Task::GadgetCheck(p) => gadget(p),
            Task::IsoCheck(p) => clone_iso(p),
        }
    }
}

fn inner_signature(arities: Option<&[usize]>) -> Result<GradedInnerSignature, CliError> {
    let arities = arities.ok_or_else(|| CliError::Input("the inner arities are required".into()))?;
    Ok(GradedInnerSignature::from_arities(arities)?)
}

/// A replayable record of one task run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    /// Name of the check within its suite, or the command name.
    pub name: String,
    #[serde(flatten)]
    pub task: Task,
    pub config: ConfigSnapshot,
    pub inputs: Inputs,
    pub witness: serde_json::Value,
    pub verdict: bool,
}

impl Certificate {
    /// Runs `task` and records the result.
    pub fn issue(name: &str, task: Task, config: &SuiteConfig, inputs: Inputs) -> Result<Self, CliError> {
        let outcome = task.run(&inputs)?;
        Ok(Certificate {
            schema: SCHEMA.to_string(),
            name: name.to_string(),
            task,
            config: config.snapshot(),
            inputs,
            witness: outcome.witness,
            verdict: outcome.verdict,
        })
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}
