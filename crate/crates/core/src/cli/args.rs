use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::battery::*;
use super::suite::{issue_recorded, write_atomic};
use super::{replay, run_suite, write_certificate, CliError, CodecParams, InputDoc, InputParams, Inputs, Suite, SuiteConfig, Task, VerifyEpParams};
use crate::fraisse::Axiom;
use crate::groups::GroupSpec;
use crate::partition::ClassAction;

/// Finite-scale checks for Fraisse limits, encodings, group splittings and clones.
#[derive(Debug, Parser)]
#[command(name = "oligo", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every command; each overrides the configuration file.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON configuration; an empty file gives the defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Largest member size in axiom checks.
    #[arg(long, global = true)]
    pub bound: Option<usize>,
    /// Grade bound N of the partition class.
    #[arg(long, global = true)]
    pub grade: Option<usize>,
    /// Saturation rounds, or back-and-forth steps.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Largest structure size in exhaustive batteries.
    #[arg(long, global = true)]
    pub cap_size: Option<usize>,
    /// Largest encoded structure in the free-amalgam battery.
    #[arg(long, global = true)]
    pub cap_elems: Option<usize>,
    /// Output path: a certificate, a structure for encode/decode, or a
    /// directory for suites.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 lets the pool decide.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

impl Common {
    pub fn resolve(&self) -> Result<SuiteConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => SuiteConfig::load(path)?,
            None => SuiteConfig::default(),
        };
        let set = |slot: &mut usize, v: Option<usize>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut c.bound, self.bound);
        set(&mut c.grade, self.grade);
        set(&mut c.depth, self.depth);
        set(&mut c.cap_size, self.cap_size);
        set(&mut c.cap_elems, self.cap_elems);
        set(&mut c.threads, self.threads);
        if let Some(out) = &self.out {
            c.out = out.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check HP, JEP or AP for a class with the blind-search cross-check.
    ApCheck(AxiomArgs),
    /// Build a saturated approximation of a class's limit.
    Saturate(SaturateArgs),
    /// Count orbits on k-tuples and compare with the types of the age.
    Orbits(OrbitArgs),
    /// Realise a label permutation by a back-and-forth automorphism.
    RealizeSigma(RealizeArgs),
    /// Compare kernel membership with label preservation exhaustively.
    KernelCheck,
    /// Find a mixing witness for one instance, or check every compatible triple.
    Mixing(MixingArgs),
    /// Encode a structure by n-pairs.
    Encode(EncodeArgs),
    /// Decode an encoded structure.
    Decode(DecodeArgs),
    /// Compare R_n with its existential-positive definition.
    VerifyEp(VerifyEpArgs),
    /// Free-amalgam membership for one instance, or the exhaustive battery.
    AmalgamCheck(InstanceArgs),
    /// Splitting of central subgroups, for one group or the catalogue.
    Split(SplitArgs),
    /// Coset-chain identities for one chain, or the battery.
    ChainVerify(ChainArgs),
    /// Polymorphisms of a structure.
    Poly(PolyArgs),
    /// Essential unarity of the gadget's polymorphisms.
    GadgetCheck(GadgetArgs),
    /// Extend the flip conjugation to a clone isomorphism and check it.
    IsoCheck(IsoArgs),
    /// Run a suite of checks, one certificate each.
    Suite(SuiteArgs),
    /// Re-run a certificate and compare byte for byte.
    Replay(ReplayArgs),
    /// Commands on Fraisse classes.
    #[command(subcommand)]
    Fraisse(FraisseCommand),
    /// Commands on the partition class.
    #[command(subcommand)]
    Partition(PartitionCommand),
    /// Commands on the n-pair encoding.
    #[command(subcommand)]
    Encoding(EncodingCommand),
    /// Commands on finite groups.
    #[command(subcommand)]
    Groups(GroupsCommand),
    /// Commands on function clones.
    #[command(subcommand)]
    Clones(ClonesCommand),
}

#[derive(Debug, Subcommand)]
pub enum FraisseCommand {
    ApCheck(AxiomArgs),
    Saturate(SaturateArgs),
    Orbits(OrbitArgs),
}

#[derive(Debug, Subcommand)]
pub enum PartitionCommand {
    Orbits(OrbitArgs),
    RealizeSigma(RealizeArgs),
    KernelCheck,
    Mixing(MixingArgs),
}

#[derive(Debug, Subcommand)]
pub enum EncodingCommand {
    Encode(EncodeArgs),
    Decode(DecodeArgs),
    VerifyEp(VerifyEpArgs),
    AmalgamCheck(InstanceArgs),
}

#[derive(Debug, Subcommand)]
pub enum GroupsCommand {
    Split(SplitArgs),
    ChainVerify(ChainArgs),
}

#[derive(Debug, Subcommand)]
pub enum ClonesCommand {
    Poly(PolyArgs),
    GadgetCheck(GadgetArgs),
    IsoCheck(IsoArgs),
}

#[derive(Debug, Clone, Args)]
pub struct AxiomArgs {
    /// partition, en-reduct, padded-partition, random-graph, linear-orders, no-isolated-vertex
    #[arg(long, default_value = "partition")]
    pub class: String,
    /// hp, jep or ap
    #[arg(long, default_value = "ap")]
    pub axiom: String,
}

#[derive(Debug, Clone, Args)]
pub struct SaturateArgs {
    #[arg(long, default_value = "partition")]
    pub class: String,
    /// Base size of the extension requests.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OrbitArgs {
    #[arg(long, default_value = "partition")]
    pub class: String,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Expected number of orbits.
    #[arg(long)]
    pub expect: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RealizeArgs {
    /// Label permutation as JSON, e.g. {"1":[1],"2":[2,1]}; the grade is its length.
    #[arg(long)]
    pub sigma: String,
}

#[derive(Debug, Clone, Args)]
pub struct MixingArgs {
    /// Instance {"y": [...], "a": [...], "b": [...]} as JSON or a file.
    #[arg(long)]
    pub instance: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct EncodeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Also write a certificate here.
    #[arg(long)]
    pub cert: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DecodeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Raw arities of the inner signature, in order.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 2])]
    pub arities: Vec<usize>,
    #[arg(long)]
    pub cert: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyEpArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 2])]
    pub arities: Vec<usize>,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    /// Instance file; the exhaustive battery when absent.
    #[arg(long)]
    pub instance: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    /// Catalogue name (Z4, Q8, S3xZ2, ...) or a group as JSON; the catalogue battery when absent.
    #[arg(long, alias = "order")]
    pub group: Option<String>,
    /// A central subgroup as a JSON element list, or "all".
    #[arg(long, default_value = "all")]
    pub center: String,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// Chain file {"group", "f", "hs", "g0"}; the battery when absent.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PolyArgs {
    #[arg(long)]
    pub structure: PathBuf,
    #[arg(long)]
    pub arity: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GadgetArgs {
    /// Domain size; every standard case when absent.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub arity: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct IsoArgs {
    #[arg(long)]
    pub max_arity: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SuiteArgs {
    #[arg(value_enum, default_value = "all")]
    pub name: Suite,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    pub certificate: PathBuf,
}

fn parse_axiom(name: &str) -> Result<Axiom, CliError> {
    match name {
        "hp" => Ok(Axiom::Hp),
        "jep" => Ok(Axiom::Jep),
        "ap" => Ok(Axiom::Ap),
        other => Err(CliError::Input(format!("unknown axiom {other}"))),
    }
}

/// Inline JSON, or the contents of a file when the argument names one.
fn json_or_file(arg: &str) -> Result<String, CliError> {
    let path = Path::new(arg);
    if !arg.trim_start().starts_with(['{', '[']) && path.exists() {
        std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
    } else {
        Ok(arg.to_string())
    }
}

fn input(path: &Path) -> Result<(String, Inputs), CliError> {
    let key = path.file_name().map_or_else(|| "input".to_string(), |n| n.to_string_lossy().into_owned());
    let doc = InputDoc::read(path)?;
    Ok((key.clone(), Inputs::from([(key, doc)])))
}

/// Where a single command's certificate goes.
enum Sink {
    Stdout,
    File(PathBuf),
}

struct Request {
    task: Task,
    inputs: Inputs,
    sink: Sink,
    /// For encode and decode: the witness field written to `--out`.
    artifact: Option<(&'static str, PathBuf)>,
}

fn flatten(command: Command) -> Command {
    match command {
        Command::Fraisse(c) => match c {
            FraisseCommand::ApCheck(a) => Command::ApCheck(a),
            FraisseCommand::Saturate(a) => Command::Saturate(a),
            FraisseCommand::Orbits(a) => Command::Orbits(a),
        },
        Command::Partition(c) => match c {
            PartitionCommand::Orbits(a) => Command::Orbits(a),
            PartitionCommand::RealizeSigma(a) => Command::RealizeSigma(a),
            PartitionCommand::KernelCheck => Command::KernelCheck,
            PartitionCommand::Mixing(a) => Command::Mixing(a),
        },
        Command::Encoding(c) => match c {
            EncodingCommand::Encode(a) => Command::Encode(a),
            EncodingCommand::Decode(a) => Command::Decode(a),
            EncodingCommand::VerifyEp(a) => Command::VerifyEp(a),
            EncodingCommand::AmalgamCheck(a) => Command::AmalgamCheck(a),
        },
        Command::Groups(c) => match c {
            GroupsCommand::Split(a) => Command::Split(a),
            GroupsCommand::ChainVerify(a) => Command::ChainVerify(a),
        },
        Command::Clones(c) => match c {
            ClonesCommand::Poly(a) => Command::Poly(a),
            ClonesCommand::GadgetCheck(a) => Command::GadgetCheck(a),
            ClonesCommand::IsoCheck(a) => Command::IsoCheck(a),
        },
        other => other,
    }
}

fn request(command: Command, c: &SuiteConfig, out: Option<PathBuf>) -> Result<Request, CliError> {
    let sink = out.clone().map_or(Sink::Stdout, Sink::File);
    let plain = |task: Task| Request {
        task,
        inputs: Inputs::new(),
        sink: out.clone().map_or(Sink::Stdout, Sink::File),
        artifact: None,
    };
    Ok(match command {
        Command::ApCheck(a) => plain(Task::AxiomCheck(AxiomParams {
            class: ClassSpec::parse(&a.class, c.grade)?,
            axiom: parse_axiom(&a.axiom)?,
            bound: c.bound,
            expect: a.class != "no-isolated-vertex",
        })),
        Command::Saturate(a) => plain(Task::Saturate(SaturateParams {
            class: ClassSpec::parse(&a.class, c.grade)?,
            k: a.k,
            rounds: c.depth,
        })),
        Command::Orbits(a) => plain(Task::Orbits(OrbitParams {
            class: ClassSpec::parse(&a.class, c.grade)?,
            k: a.k,
            rounds: c.depth,
            expect: a.expect,
        })),
        Command::RealizeSigma(a) => {
            let sigma: ClassAction = serde_json::from_str(&json_or_file(&a.sigma)?)?;
            plain(Task::RealizeSigma(RealizeParams {
                grade: sigma.grade(),
                sigma,
                depth: c.depth,
            }))
        }
        Command::KernelCheck => plain(Task::KernelCheck(KernelParams {
            grade: c.grade,
            max_size: c.cap_size,
        })),
        Command::Mixing(a) => match a.instance {
            Some(text) => {
                #[derive(serde::Deserialize)]
                struct Triple {
                    y: Vec<usize>,
                    a: Vec<usize>,
                    b: Vec<usize>,
                }
                let t: Triple = serde_json::from_str(&json_or_file(&text)?)?;
                plain(Task::Mixing(MixingInstanceParams {
                    grade: c.grade,
                    depth: c.mixing_depth,
                    y: t.y,
                    a: t.a,
                    b: t.b,
                }))
            }
            None => plain(Task::MixingBattery(MixingParams {
                grade: c.grade,
                depth: c.mixing_depth,
                max_len: 2,
            })),
        },
        Command::Encode(a) => {
            let (key, inputs) = input(&a.input)?;
            Request {
                task: Task::Encode(CodecParams { input: key, arities: None }),
                inputs,
                sink: a.cert.map_or(Sink::Stdout, Sink::File),
                artifact: out.map(|p| ("encoded", p)),
            }
        }
        Command::Decode(a) => {
            let (key, inputs) = input(&a.input)?;
            Request {
                task: Task::Decode(CodecParams {
                    input: key,
                    arities: Some(a.arities),
                }),
                inputs,
                sink: a.cert.map_or(Sink::Stdout, Sink::File),
                artifact: out.map(|p| ("decoded", p)),
            }
        }
        Command::VerifyEp(a) => {
            let (key, inputs) = input(&a.input)?;
            Request {
                task: Task::VerifyEp(VerifyEpParams {
                    input: key,
                    arities: a.arities,
                    n: a.n,
                }),
                inputs,
                sink,
                artifact: None,
            }
        }
        Command::AmalgamCheck(a) => match a.instance {
            Some(path) => {
                let (key, inputs) = input(&path)?;
                Request {
                    task: Task::AmalgamCheck(InputParams { input: key }),
                    inputs,
                    sink,
                    artifact: None,
                }
            }
            None => plain(Task::AmalgamBattery(AmalgamBatteryParams {
                arities: vec![1, 2, 2],
                max_elems: c.cap_elems,
            })),
        },
        Command::Split(a) => match a.group {
            Some(g) => {
                let text = json_or_file(&g)?;
                let group = serde_json::from_str(&text).unwrap_or(GroupSpec::Catalogue { catalogue: g });
                let center = match a.center.as_str() {
                    "all" => None,
                    spec => Some(serde_json::from_str(&json_or_file(spec)?)?),
                };
                plain(Task::Split(SplitParams {
                    group,
                    center,
                    subgroup_cap: c.subgroup_cap,
                }))
            }
            None => plain(Task::SplitBattery(SplitBatteryParams {
                max_order: c.split_order,
                subgroup_cap: c.subgroup_cap,
            })),
        },
        Command::ChainVerify(a) => match a.spec {
            Some(path) => {
                let (key, inputs) = input(&path)?;
                Request {
                    task: Task::ChainVerify(InputParams { input: key }),
                    inputs,
                    sink,
                    artifact: None,
                }
            }
            None => plain(Task::ChainBattery(ChainBatteryParams {
                max_order: c.chain_order,
                subgroup_cap: c.subgroup_cap,
            })),
        },
        Command::Poly(a) => {
            let (key, inputs) = input(&a.structure)?;
            Request {
                task: Task::Poly(PolyParams {
                    input: key,
                    arity: a.arity,
                    cap: c.poly_cap,
                }),
                inputs,
                sink,
                artifact: None,
            }
        }
        Command::GadgetCheck(a) => {
            let cases = match (a.d, a.arity) {
                (Some(d), Some(k)) => vec![(d, k)],
                (Some(d), None) => (1..=if d == 2 { 3 } else { 2 }).map(|k| (d, k)).collect(),
                (None, Some(k)) => vec![(2, k), (3, k)],
                (None, None) => vec![(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)],
            };
            plain(Task::GadgetCheck(GadgetParams { cases, cap: c.poly_cap }))
        }
        Command::IsoCheck(a) => plain(Task::IsoCheck(CloneIsoParams {
            max_arity: a.max_arity.unwrap_or(c.clone_arity),
        })),
        Command::Suite(_) | Command::Replay(_) => unreachable!("handled by the caller"),
        Command::Fraisse(_) | Command::Partition(_) | Command::Encoding(_) | Command::Groups(_) | Command::Clones(_) => {
            unreachable!("flattened")
        }
    })
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let config = cli.common.resolve()?;
    match flatten(cli.command) {
        Command::Suite(a) => {
            let summary = run_suite(a.name, &config)?;
            print!("{}", summary.table());
            Ok(summary.passed())
        }
        Command::Replay(a) => {
            let r = replay(&a.certificate)?;
            match &r.difference {
                None => println!("{}: replay matches ({})", r.name, if r.verdict { "PASS" } else { "FAIL" }),
                Some(d) => println!("{}: replay MISMATCH at {d}", r.name),
            }
            Ok(r.matches && r.verdict)
        }
        command => {
            let req = request(command, &config, cli.common.out.clone())?;
            let name = req.task.command();
            let cert = issue_recorded(&name, req.task, &config, req.inputs)?;
            if let Some((field, path)) = &req.artifact {
                if let Some(value) = cert.witness.get(*field) {
                    let mut text = serde_json::to_string_pretty(value)?;
                    text.push('\n');
                    write_atomic(path, &text)?;
                }
            }
            match req.sink {
                Sink::File(path) => {
                    write_certificate(&path, &cert)?;
                    println!("{name}: {}  ({})", if cert.verdict { "PASS" } else { "FAIL" }, path.display());
                }
                Sink::Stdout if req.artifact.is_some() => {
                    println!("{name}: {}", if cert.verdict { "PASS" } else { "FAIL" });
                }
                Sink::Stdout => print!("{}", cert.to_json()?),
            }
            Ok(cert.verdict)
        }
    }
}

/// Parses `args` and runs the command. Returns the process exit code: 0 when
/// every verdict passes, 1 when one fails, 2 on errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
