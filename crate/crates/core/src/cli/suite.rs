use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::battery::*;
use super::{Certificate, CliError, Inputs, SuiteConfig, Task, SCHEMA};
use crate::fraisse::Axiom;
use crate::partition::ClassAction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Fraisse,
    Partition,
    Encoding,
    Groups,
    Clones,
    All,
}

fn sigma_label(sigma: &ClassAction) -> String {
    (1..=sigma.grade())
        .map(|n| (1..=n).map(|i| sigma.get(n, i).map_or("_".to_string(), |j| j.to_string())).collect::<String>())
        .collect::<Vec<_>>()
        .join("-")
}

/// The named checks of a suite, sorted by name.
pub fn suite_tasks(suite: Suite, c: &SuiteConfig) -> Vec<(String, Task)> {
    let mut out: Vec<(String, Task)> = Vec::new();
    let include = |s: Suite| suite == Suite::All || suite == s;
    if include(Suite::Fraisse) {
        let classes = [
            ("partition", ClassSpec::Partition { grade: c.grade }, true),
            ("random-graph", ClassSpec::RandomGraph, true),
            ("linear-orders", ClassSpec::LinearOrders, true),
        ];
        for (label, class, expect) in classes {
            for axiom in [Axiom::Hp, Axiom::Jep, Axiom::Ap] {
                out.push((
                    format!("fraisse.axioms.{label}.{}", axiom_name(axiom)),
                    Task::AxiomCheck(AxiomParams {
                        class: class.clone(),
                        axiom,
                        bound: c.bound,
                        expect,
                    }),
                ));
            }
        }
        out.push((
            "fraisse.axioms.no-isolated-vertex.hp".into(),
            Task::AxiomCheck(AxiomParams {
                class: ClassSpec::NoIsolatedVertex,
                axiom: Axiom::Hp,
                bound: c.bound,
                expect: false,
            }),
        ));
        for (label, class, expect) in [
            ("random-graph", ClassSpec::RandomGraph, 3),
            ("partition", ClassSpec::Partition { grade: c.grade }, 5),
        ] {
            let expect = (label == "random-graph" || c.grade == 2).then_some(expect);
            out.push((
                format!("fraisse.orbits.{label}"),
                Task::Orbits(OrbitParams {
                    class,
                    k: 2,
                    rounds: c.depth,
                    expect,
                }),
            ));
        }
    }
    if include(Suite::Partition) {
        for sigma in ClassAction::all_total(c.realize_grade) {
            out.push((
                format!("partition.realize.{}", sigma_label(&sigma)),
                Task::RealizeSigma(RealizeParams {
                    grade: c.realize_grade,
                    sigma,
                    depth: c.depth,
                }),
            ));
        }
        out.push((
            "partition.kernel".into(),
            Task::KernelCheck(KernelParams {
                grade: c.grade,
                max_size: c.cap_size,
            }),
        ));
        out.push((
            "partition.mixing".into(),
            Task::MixingBattery(MixingParams {
                grade: c.grade,
                depth: c.mixing_depth,
                max_len: 2,
            }),
        ));
    }
    if include(Suite::Encoding) {
        out.push((
            "encoding.round-trip".into(),
            Task::EncodingRoundTrip(RoundTripParams {
                arities: vec![1, 2, 2],
                max_size: c.cap_size,
            }),
        ));
        out.push((
            "encoding.padded-round-trip".into(),
            Task::PaddedRoundTrip(PaddedRoundTripParams {
                grade: c.grade,
                max_size: c.cap_size,
            }),
        ));
        out.push((
            "encoding.free-amalgam".into(),
            Task::AmalgamBattery(AmalgamBatteryParams {
                arities: vec![1, 2, 2],
                max_elems: c.cap_elems,
            }),
        ));
    }
    if include(Suite::Groups) {
        out.push((
            "groups.split".into(),
            Task::SplitBattery(SplitBatteryParams {
                max_order: c.split_order,
                subgroup_cap: c.subgroup_cap,
            }),
        ));
        out.push((
            "groups.chain".into(),
            Task::ChainBattery(ChainBatteryParams {
                max_order: c.chain_order,
                subgroup_cap: c.subgroup_cap,
            }),
        ));
    }
    if include(Suite::Clones) {
        out.push((
            "clones.gadget".into(),
            Task::GadgetCheck(GadgetParams {
                cases: vec![(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)],
                cap: c.poly_cap,
            }),
        ));
        out.push((
            "clones.iso-check".into(),
            Task::IsoCheck(CloneIsoParams {
                max_arity: c.clone_arity,
            }),
        ));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn axiom_name(a: Axiom) -> &'static str {
    match a {
        Axiom::Hp => "hp",
        Axiom::Jep => "jep",
        Axiom::Ap => "ap",
    }
}

/// Runs the task; an error becomes a failing certificate whose witness is the
/// error message.
pub fn issue_recorded(name: &str, task: Task, config: &SuiteConfig, inputs: Inputs) -> Result<Certificate, CliError> {
    match Certificate::issue(name, task.clone(), config, inputs.clone()) {
        Ok(c) => Ok(c),
        Err(CliError::Io { path, error }) => Err(CliError::Io { path, error }),
        Err(e) => Ok(Certificate {
            schema: SCHEMA.to_string(),
            name: name.to_string(),
            task,
            config: config.snapshot(),
            inputs,
            witness: serde_json::json!({ "error": e.to_string() }),
            verdict: false,
        }),
    }
}

/// Writes through a temporary file in the same directory and renames it.
pub fn write_certificate(path: &Path, cert: &Certificate) -> Result<(), CliError> {
    write_atomic(path, &cert.to_json()?)
}

pub(crate) fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let file = path.file_name().ok_or_else(|| CliError::Input(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", file.to_string_lossy()));
    std::fs::write(&tmp, text).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteRow {
    pub name: String,
    pub verdict: bool,
    pub seconds: f64,
    pub path: PathBuf,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub rows: Vec<SuiteRow>,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.verdict)
    }

    pub fn table(&self) -> String {
        let width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&format!(
                "{:<width$}  {}  {:>8.2}s\n",
                r.name,
                if r.verdict { "PASS" } else { "FAIL" },
                r.seconds
            ));
        }
        let failed = self.rows.iter().filter(|r| !r.verdict).count();
        out.push_str(&format!("{} checks, {} failed\n", self.rows.len(), failed));
        out
    }
}

/// Runs every check of `suite` on a pool of `config.threads` workers and
/// writes one certificate per check into `config.out`.
pub fn run_suite(suite: Suite, config: &SuiteConfig) -> Result<SuiteSummary, CliError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let tasks = suite_tasks(suite, config);
    let rows: Vec<SuiteRow> = pool.install(|| {
        tasks
            .into_par_iter()
            .map(|(name, task)| {
                let start = Instant::now();
                let cert = issue_recorded(&name, task, config, Inputs::new())?;
                let seconds = start.elapsed().as_secs_f64();
                let path = config.out.join(format!("{name}.json"));
                write_certificate(&path, &cert)?;
                Ok(SuiteRow {
                    name,
                    verdict: cert.verdict,
                    seconds,
                    path,
                })
            })
            .collect::<Result<_, CliError>>()
    })?;
    Ok(SuiteSummary { suite, rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplayOutcome {
    pub name: String,
    pub verdict: bool,
    pub matches: bool,
    /// First differing line, when the replay does not match.
    pub difference: Option<String>,
}

/// Re-runs a certificate's task from its own record and compares the fresh
/// certificate with the file byte for byte.
pub fn replay(path: &Path) -> Result<ReplayOutcome, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    match value.get("schema").and_then(|s| s.as_str()) {
        Some(SCHEMA) => {}
        Some(other) => return Err(CliError::Replay(format!("unsupported schema {other}"))),
        None => return Err(CliError::Replay("no schema tag".into())),
    }
    let stored: Certificate = serde_json::from_value(value)?;
    for (key, doc) in &stored.inputs {
        if !doc.intact() {
            return Err(CliError::Replay(format!("input {key} does not match its digest")));
        }
    }
    let config = config_from_snapshot(&stored);
    let fresh = issue_recorded(&stored.name, stored.task.clone(), &config, stored.inputs.clone())?;
    let fresh_text = fresh.to_json()?;
    let difference = (fresh_text != text).then(|| {
        text.lines()
            .zip(fresh_text.lines())
            .enumerate()
            .find(|(_, (a, b))| a != b)
            .map(|(i, (a, b))| format!("line {}: stored {a:?}, replayed {b:?}", i + 1))
            .unwrap_or_else(|| "lengths differ".into())
    });
    Ok(ReplayOutcome {
        name: stored.name,
        verdict: fresh.verdict,
        matches: difference.is_none(),
        difference,
    })
}

fn config_from_snapshot(c: &Certificate) -> SuiteConfig {
    let s = &c.config;
    SuiteConfig {
        bound: s.bound,
        grade: s.grade,
        depth: s.depth,
        realize_grade: s.realize_grade,
        mixing_depth: s.mixing_depth,
        cap_size: s.cap_size,
        cap_elems: s.cap_elems,
        split_order: s.split_order,
        chain_order: s.chain_order,
        subgroup_cap: s.subgroup_cap,
        poly_cap: s.poly_cap,
        clone_arity: s.clone_arity,
        seed: s.seed,
        ..SuiteConfig::default()
    }
}
