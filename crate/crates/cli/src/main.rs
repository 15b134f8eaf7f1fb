use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use detsynth_core::global::{build_egt_synchronizer, build_gg, build_system_synchronizer};
use detsynth_core::io::{
    gg_file, gl_file, modified_dot, parse, state_set, to_canonical_json, AnySync, ChainFile,
    ErmFile, EstimateFile, LocalErmFile, PlantFile, SiStateFile,
};
use detsynth_core::local::{build_elt_synchronizer, build_gl, build_go, build_ms_synchronizer};
use detsynth_core::oracle::{oracle_global, oracle_local, OracleCaps};
use detsynth_core::run::{self, Method};
use detsynth_core::si_state::DEFAULT_SITE_CAPACITY;
use detsynth_core::sim::{containment_batch, ErrorModel, GenConfig, Mode, Source};
use detsynth_core::{least_cost_filter, Error, EstimateSet, Plant, SiState, StateSet};

#[derive(Parser)]
#[command(name = "detsynth", version, about = "Error-tolerant decentralized state estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check files. Matrix, SI-state and estimate files need --plant.
    Validate {
        #[arg(long, env = "DETSYNTH_PLANT")]
        plant: Option<PathBuf>,
        files: Vec<PathBuf>,
    },
    /// Current-state estimate for one synchronization.
    Estimate {
        #[command(flatten)]
        input: Input,
        #[arg(long, env = "DETSYNTH_METHOD", value_enum, default_value = "builder")]
        method: MethodArg,
        #[arg(long)]
        least_cost: bool,
        #[arg(long, env = "DETSYNTH_OUT")]
        out: Option<PathBuf>,
    },
    /// Brute-force reference estimate.
    Oracle {
        #[command(flatten)]
        input: Input,
        /// e.g. `run=8,component=3,cost=2,words=100000`
        #[arg(long, env = "DETSYNTH_CAPS")]
        caps: Option<String>,
        #[arg(long)]
        least_cost: bool,
        #[arg(long, env = "DETSYNTH_OUT")]
        out: Option<PathBuf>,
    },
    /// Seeded tampering scenarios with containment checks.
    Simulate {
        #[arg(long, env = "DETSYNTH_MODE", value_enum, default_value = "global")]
        mode: ModeArg,
        #[arg(long, env = "DETSYNTH_COUNT", default_value_t = 100)]
        count: usize,
        #[arg(long, env = "DETSYNTH_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "DETSYNTH_GEN_CONFIG")]
        gen_config: Option<PathBuf>,
        /// Fixed plant instead of generated ones; needs --erm.
        #[arg(long, env = "DETSYNTH_PLANT")]
        plant: Option<PathBuf>,
        #[arg(long, env = "DETSYNTH_ERM")]
        erm: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        max_run_length: usize,
        #[arg(long, env = "DETSYNTH_OUT")]
        out: Option<PathBuf>,
    },
    /// Render a modified system or a synchronizer.
    Export {
        #[arg(long, value_enum)]
        what: What,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
        #[command(flatten)]
        input: ExportInput,
        #[arg(long, env = "DETSYNTH_METHOD", value_enum, default_value = "builder")]
        method: MethodArg,
        #[arg(long, env = "DETSYNTH_OUT")]
        out: Option<PathBuf>,
    },
    /// Sequential synchronizations described by a chain file.
    Chain {
        #[arg(long, env = "DETSYNTH_STEPS")]
        steps: PathBuf,
        #[arg(long)]
        least_cost: bool,
        #[arg(long, env = "DETSYNTH_OUT")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    #[arg(long, env = "DETSYNTH_MODE", value_enum, default_value = "global")]
    mode: ModeArg,
    #[arg(long, env = "DETSYNTH_PLANT")]
    plant: PathBuf,
    #[arg(long, env = "DETSYNTH_ERM")]
    erm: PathBuf,
    #[arg(long, env = "DETSYNTH_SI")]
    si: PathBuf,
    /// Comma-separated initial states; the plant's own set when omitted.
    #[arg(long, env = "DETSYNTH_INIT")]
    init: Option<String>,
}

#[derive(Args)]
struct ExportInput {
    #[arg(long, env = "DETSYNTH_MODE", value_enum, default_value = "global")]
    mode: ModeArg,
    #[arg(long, env = "DETSYNTH_PLANT")]
    plant: PathBuf,
    #[arg(long, env = "DETSYNTH_ERM")]
    erm: PathBuf,
    #[arg(long, env = "DETSYNTH_SI")]
    si: Option<PathBuf>,
    #[arg(long, env = "DETSYNTH_INIT")]
    init: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Global,
    Local,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Global => Mode::Global,
            ModeArg::Local => Mode::Local,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    System,
    Builder,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::System => Method::System,
            MethodArg::Builder => Method::Builder,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    Gg,
    Gl,
    Sync,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Dot,
    Json,
}

/// A core error tagged with the file it came from.
struct Failure {
    file: Option<PathBuf>,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { file: None, error }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(p) => write!(f, "{}: {}", p.display(), self.error),
            None => write!(f, "{}", self.error),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self.error {
            Error::Resource(_) => 3,
            Error::Invariant(_) => 4,
            _ => 2,
        }
    }
}

enum Outcome {
    Done,
    Empty,
    NotContained,
}

type CliResult<T> = Result<T, Failure>;

fn in_file<T>(path: &Path, r: Result<T, Error>) -> CliResult<T> {
    r.map_err(|error| Failure {
        file: Some(path.to_owned()),
        error,
    })
}

fn read(path: &Path) -> CliResult<String> {
    in_file(
        path,
        std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read file: {e}"))),
    )
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    in_file(path, parse(&read(path)?))
}

fn load_plant(path: &Path) -> CliResult<Plant> {
    in_file(path, load::<PlantFile>(path)?.to_plant())
}

fn load_errors(plant: &Plant, mode: Mode, path: &Path) -> CliResult<ErrorModel> {
    match mode {
        Mode::Global => Ok(ErrorModel::Global(in_file(path, load::<ErmFile>(path)?.to_erm(plant))?)),
        Mode::Local => Ok(ErrorModel::Local(in_file(
            path,
            load::<LocalErmFile>(path)?.to_erms(plant),
        )?)),
    }
}

fn load_si(plant: &Plant, path: &Path) -> CliResult<SiState> {
    in_file(path, load::<SiStateFile>(path)?.to_si_state(plant, DEFAULT_SITE_CAPACITY))
}

fn initial(plant: &Plant, init: Option<&str>) -> CliResult<StateSet> {
    match init {
        None => Ok(plant.initial().clone()),
        Some(list) => {
            let names: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            Ok(state_set(plant, &names)?)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => in_file(
            p,
            std::fs::write(p, text).map_err(|e| Error::Invalid(format!("cannot write file: {e}"))),
        ),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish_estimate(plant: &Plant, est: EstimateSet, least_cost: bool, out: Option<&Path>) -> CliResult<Outcome> {
    let est = if least_cost { least_cost_filter(&est) } else { est };
    emit(out, &to_canonical_json(&EstimateFile::from_estimate(plant, &est)))?;
    Ok(if est.is_empty() { Outcome::Empty } else { Outcome::Done })
}

fn parse_caps(text: &str) -> Result<OracleCaps, Error> {
    let mut caps = OracleCaps::default();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("cap `{part}` is not key=value")))?;
        let n: usize = value
            .parse()
            .map_err(|_| Error::Invalid(format!("cap `{key}` needs a number, got `{value}`")))?;
        match key {
            "run" => caps.max_run_length = n,
            "component" => caps.max_component_length = n,
            "cost" => caps.max_cost = n as u32,
            "words" => caps.max_words = n,
            other => return Err(Error::Invalid(format!("unknown cap `{other}`"))),
        }
    }
    Ok(caps)
}

/// Guesses a document's kind from its top-level keys.
fn sniff(value: &Value) -> Option<&'static str> {
    let has = |k: &str| value.get(k).is_some();
    if has("num_sites") {
        Some("plant")
    } else if has("steps") {
        Some("chain")
    } else if has("sites") {
        Some("local-erm")
    } else if has("entries") {
        Some("erm")
    } else if has("sequences") {
        Some("si-state")
    } else if has("estimates") {
        Some("estimate")
    } else if has("min_states") || has("max_states") || has("identity_errors") {
        Some("gen-config")
    } else {
        None
    }
}

fn validate_one(path: &Path, plant: Option<&Plant>) -> CliResult<&'static str> {
    let text = read(path)?;
    let value: Value = in_file(path, parse(&text))?;
    let kind = in_file(
        path,
        sniff(&value).ok_or_else(|| Error::Invalid("unrecognized document".to_owned())),
    )?;
    let need = || {
        plant.ok_or_else(|| Failure {
            file: Some(path.to_owned()),
            error: Error::Invalid(format!("a {kind} file needs --plant")),
        })
    };
    match kind {
        "plant" => {
            in_file(path, parse::<PlantFile>(&text)?.to_plant())?;
        }
        "erm" => {
            in_file(path, parse::<ErmFile>(&text)?.to_erm(need()?))?;
        }
        "local-erm" => {
            in_file(path, parse::<LocalErmFile>(&text)?.to_erms(need()?))?;
        }
        "si-state" => {
            in_file(path, parse::<SiStateFile>(&text)?.to_si_state(need()?, DEFAULT_SITE_CAPACITY))?;
        }
        "estimate" => {
            in_file(path, parse::<EstimateFile>(&text)?.to_estimate(need()?))?;
        }
        "chain" => {
            in_file(path, parse::<ChainFile>(&text)?.check())?;
        }
        _ => {
            in_file(path, parse::<GenConfig>(&text)?.validate())?;
        }
    }
    Ok(kind)
}

fn validate(plant: Option<&Path>, files: &[PathBuf]) -> CliResult<Outcome> {
    let plant = match plant {
        Some(p) => {
            let loaded = load_plant(p)?;
            println!("ok {} (plant)", p.display());
            Some(loaded)
        }
        None => None,
    };
    let mut first = None;
    for f in files {
        match validate_one(f, plant.as_ref()) {
            Ok(kind) => println!("ok {} ({kind})", f.display()),
            Err(e) => {
                eprintln!("error: {e}");
                first.get_or_insert(e);
            }
        }
    }
    match first {
        Some(e) => Err(Failure {
            file: e.file,
            error: Error::Invalid("validation failed".to_owned()),
        }),
        None => Ok(Outcome::Done),
    }
}

fn simulate(
    mode: Mode,
    count: usize,
    seed: u64,
    gen_config: Option<&Path>,
    fixed: (Option<&Path>, Option<&Path>),
    max_run_length: usize,
    out: Option<&Path>,
) -> CliResult<Outcome> {
    if count == 0 {
        return Err(Error::Invalid("--count must be at least 1".to_owned()).into());
    }
    let source = match fixed {
        (Some(p), Some(e)) => {
            let plant = load_plant(p)?;
            let errors = load_errors(&plant, mode, e)?;
            Source::Fixed {
                plant,
                errors,
                max_run_length,
            }
        }
        (None, None) => {
            let config = match gen_config {
                Some(path) => {
                    let c: GenConfig = load(path)?;
                    in_file(path, c.validate())?;
                    c
                }
                None => GenConfig::default(),
            };
            Source::Generated { mode, config }
        }
        _ => return Err(Error::Invalid("--plant and --erm go together".to_owned()).into()),
    };
    let report = containment_batch(&source, count, seed)?;
    emit(out, &to_canonical_json(&report))?;
    eprintln!("{}/{} scenarios contained", report.passed, report.count);
    Ok(if report.all_passed() { Outcome::Done } else { Outcome::NotContained })
}

fn export(what: What, format: Format, input: &ExportInput, method: Method, out: Option<&Path>) -> CliResult<Outcome> {
    let plant = load_plant(&input.plant)?;
    let mode = match what {
        What::Gg => Mode::Global,
        What::Gl => Mode::Local,
        What::Sync => input.mode.into(),
    };
    let errors = load_errors(&plant, mode, &input.erm)?;
    let text = match (what, errors) {
        (What::Gg, ErrorModel::Global(erm)) => {
            let doc = gg_file(&plant, &build_gg(&plant, &erm)?);
            if format == Format::Dot { modified_dot(&doc) } else { to_canonical_json(&doc) }
        }
        (What::Gl, ErrorModel::Local(erms)) => {
            let doc = gl_file(&plant, &build_gl(&build_go(&plant), &erms)?);
            if format == Format::Dot { modified_dot(&doc) } else { to_canonical_json(&doc) }
        }
        (_, errors) => {
            let si = input
                .si
                .as_deref()
                .ok_or_else(|| Failure::from(Error::Invalid("--what sync needs --si".to_owned())))?;
            let tau = load_si(&plant, si)?;
            let q0 = initial(&plant, input.init.as_deref())?;
            let sync = match (errors, method) {
                (ErrorModel::Global(erm), Method::System) => {
                    let gg = build_gg(&plant, &erm)?;
                    AnySync::GlobalSystem(build_system_synchronizer(&plant, &gg, &tau, &q0)?)
                }
                (ErrorModel::Global(erm), Method::Builder) => {
                    AnySync::GlobalBuilder(build_egt_synchronizer(&plant, &erm, &tau, &q0)?)
                }
                (ErrorModel::Local(erms), Method::System) => {
                    let gl = build_gl(&build_go(&plant), &erms)?;
                    AnySync::LocalSystem(build_ms_synchronizer(&plant, &gl, &tau, &q0)?)
                }
                (ErrorModel::Local(erms), Method::Builder) => {
                    AnySync::LocalBuilder(build_elt_synchronizer(&plant, &erms, &tau, &q0)?)
                }
            };
            if format == Format::Dot { sync.to_dot(&plant) } else { to_canonical_json(&sync.to_file(&plant)) }
        }
    };
    emit(out, &text)?;
    Ok(Outcome::Done)
}

fn chain(path: &Path, least_cost: bool, out: Option<&Path>) -> CliResult<Outcome> {
    let doc: ChainFile = load(path)?;
    in_file(path, doc.check())?;
    let mode: Mode = in_file(path, doc.mode.parse())?;
    let method: Method = in_file(path, doc.method.parse())?;
    let base = path.parent().unwrap_or(Path::new("."));
    let plant = load_plant(&base.join(&doc.plant))?;
    let errors = load_errors(&plant, mode, &base.join(&doc.erm))?;
    let q0 = in_file(path, state_set(&plant, &doc.initial))?;
    let steps = (0..doc.steps.len())
        .map(|i| in_file(path, doc.step(&plant, i, DEFAULT_SITE_CAPACITY)))
        .collect::<CliResult<Vec<_>>>()?;
    let results = run::chain(&plant, &errors, method, &q0, &steps)?;
    let empty = results.len() < steps.len() || results.last().is_some_and(|e| e.is_empty());
    let rendered: Vec<Value> = results
        .iter()
        .map(|e| {
            let e = if least_cost { least_cost_filter(e) } else { e.clone() };
            serde_json::to_value(EstimateFile::from_estimate(&plant, &e)).expect("serializable")
        })
        .collect();
    let doc = json!({"format_version": 1, "steps": rendered});
    emit(out, &to_canonical_json(&doc))?;
    Ok(if empty { Outcome::Empty } else { Outcome::Done })
}

fn dispatch(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Validate { plant, files } => validate(plant.as_deref(), &files),
        Command::Estimate {
            input,
            method,
            least_cost,
            out,
        } => {
            let plant = load_plant(&input.plant)?;
            let errors = load_errors(&plant, input.mode.into(), &input.erm)?;
            let tau = load_si(&plant, &input.si)?;
            let q0 = initial(&plant, input.init.as_deref())?;
            let est = run::estimate(&plant, &errors, method.into(), &tau, &q0)?;
            finish_estimate(&plant, est, least_cost, out.as_deref())
        }
        Command::Oracle {
            input,
            caps,
            least_cost,
            out,
        } => {
            let caps = match caps {
                Some(c) => parse_caps(&c)?,
                None => OracleCaps::default(),
            };
            let plant = load_plant(&input.plant)?;
            let errors = load_errors(&plant, input.mode.into(), &input.erm)?;
            let tau = load_si(&plant, &input.si)?;
            let q0 = initial(&plant, input.init.as_deref())?;
            let est = match errors {
                ErrorModel::Global(erm) => oracle_global(&plant, &erm, &tau, &q0, &caps)?,
                ErrorModel::Local(erms) => oracle_local(&plant, &erms, &tau, &q0, &caps)?,
            };
            finish_estimate(&plant, est, least_cost, out.as_deref())
        }
        Command::Simulate {
            mode,
            count,
            seed,
            gen_config,
            plant,
            erm,
            max_run_length,
            out,
        } => simulate(
            mode.into(),
            count,
            seed,
            gen_config.as_deref(),
            (plant.as_deref(), erm.as_deref()),
            max_run_length,
            out.as_deref(),
        ),
        Command::Export {
            what,
            format,
            input,
            method,
            out,
        } => export(what, format, &input, method.into(), out.as_deref()),
        Command::Chain { steps, least_cost, out } => chain(&steps, least_cost, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Empty) => {
            eprintln!("estimate is empty");
            ExitCode::from(1)
        }
        Ok(Outcome::NotContained) => {
            eprintln!("containment failed");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
