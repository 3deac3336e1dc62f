//! Command-line front end: `analyze`, `cone`, `kx`, `witness`, `corpus`.
//!
//! Every command prints one JSON report
//! `{"tool", "version", "config", "result", "timings_ms"}` (or CSV with
//! `--format csv`). Exit codes: 0 on success (any verdict), 2 on input
//! errors, 3 on sampling failures.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cone::{
    cone_germ, directions, germ_symbolic_cone, kx_estimate, ray_model, reducedness_report,
    KxParams,
};
use crate::corpus::{self, CorpusEntry, Host};
use crate::error::{Error, Result};
use crate::metric::{lne_profile, parse_schedule, ProfileConfig, CONN_CONST};
use crate::variety::{Germ, SetDef, Slice};
use crate::witness::{witness_exponent, witness_table, WitnessConfig, WitnessCurve};

pub const TOOL: &str = "lipcone";

#[derive(Debug, Parser)]
#[command(name = "lipcone", version, about = "Lipschitz normal embedding and tangent cone probes for semialgebraic germs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Seed of every sampler.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Sample count (per scale, window or witness row).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Scale schedule `t_max:t_min:logK`.
    #[arg(long, global = true)]
    pub scales: Option<String>,
    /// Graph connection constant.
    #[arg(long = "conn-const", global = true)]
    pub conn_const: Option<f64>,
    /// Expected local dimension of the set.
    #[arg(long = "local-dim", global = true)]
    pub local_dim: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Built-in corpus entry.
    #[arg(long, global = true, conflicts_with = "set")]
    pub corpus: Option<String>,
    /// Set definition file (JSON).
    #[arg(long, global = true)]
    pub set: Option<PathBuf>,
    /// Embed wall-clock stage timings (makes reports non-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// LNE profile across scales with exponent fit and verdict.
    Analyze,
    /// Tangent cone: direction cloud, initial forms, optional reducedness.
    Cone {
        /// Only the symbolic cone (initial forms and squarefree test).
        #[arg(long)]
        symbolic: bool,
        /// Run k_X at this many spread-out directions.
        #[arg(long)]
        reduced: Option<usize>,
    },
    /// Local component count k_X at a direction.
    Kx {
        /// Unit direction, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        direction: Vec<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Inner/outer table of a witness curve pair.
    Witness {
        /// Parameter grid `s_max:s_min:logK`.
        #[arg(long)]
        grid: Option<String>,
        /// Curve file of the first curve (with --set).
        #[arg(long)]
        alpha: Option<PathBuf>,
        /// Curve file of the second curve (with --set).
        #[arg(long)]
        beta: Option<PathBuf>,
        /// Sampling anchor (with --set), comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        anchor: Option<Vec<f64>>,
        /// Coordinate axes spanning the sampling plane (with --set).
        #[arg(long = "slice-axes", value_delimiter = ',')]
        slice_axes: Option<Vec<usize>>,
        /// Whether the curves lie on the set or on its tangent cone.
        #[arg(long, value_enum, default_value_t = HostArg::Set)]
        host: HostArg,
    },
    /// Built-in examples.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HostArg {
    Set,
    Cone,
}

#[derive(Debug, Subcommand)]
pub enum CorpusAction {
    /// Entry names.
    List,
    /// Print an entry's JSON file.
    Export { name: String },
}

/// Exit code for an error: 3 for sampling failures, 2 for everything else.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoConvergence { .. } | Error::EmptySample(_) | Error::InequalityViolated { .. } => 3,
        _ => 2,
    }
}

/// Parses `args`, runs the command and writes its output; returns the exit
/// code.
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
    match execute(&cli).and_then(|text| emit(&cli.global, &text)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(global: &GlobalArgs, text: &str) -> Result<()> {
    match &global.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

struct Timer {
    enabled: bool,
    stages: BTreeMap<String, f64>,
}

impl Timer {
    fn new(enabled: bool) -> Self {
        Timer {
            enabled,
            stages: BTreeMap::new(),
        }
    }

    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            self.stages
                .insert(stage.to_string(), start.elapsed().as_secs_f64() * 1e3);
        }
        out
    }
}

/// Input resolved from `--corpus` or `--set`.
struct Input {
    germ: Germ,
    entry: Option<CorpusEntry>,
    source: String,
}

fn load_input(global: &GlobalArgs) -> Result<Input> {
    match (&global.corpus, &global.set) {
        (Some(name), None) => {
            let entry = corpus::get(name)?;
            Ok(Input {
                germ: entry.germ()?,
                source: format!("corpus:{name}"),
                entry: Some(entry),
            })
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            Ok(Input {
                germ: SetDef::from_json(&text)?.build()?,
                entry: None,
                source: format!("set:{}", path.display()),
            })
        }
        _ => Err(Error::InvalidArgument("pass exactly one of --corpus or --set".into())),
    }
}

fn envelope(config: Value, result: Value, timer: &Timer) -> Result<String> {
    let report = json!({
        "tool": TOOL,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "result": result,
        "timings_ms": timer.stages,
    });
    Ok(serde_json::to_string_pretty(&report)? + "\n")
}

/// Runs a parsed command line and renders its report.
pub fn execute(cli: &Cli) -> Result<String> {
    let g = &cli.global;
    let mut timer = Timer::new(g.timings);
    match &cli.command {
        Command::Corpus { action } => corpus_command(action, g, &timer),
        Command::Analyze => {
            let input = load_input(g)?;
            let config = profile_config(g, &input)?;
            let report = timer.time("profile", || lne_profile(&input.germ, &config))?;
            if report.per_scale.is_empty() {
                return Err(Error::EmptySample("every scale was dropped".into()));
            }
            if g.format == Format::Csv {
                return Ok(report.to_csv());
            }
            let mut result = serde_json::to_value(&report)?;
            if let Some(e) = &input.entry {
                result["expected"] = serde_json::to_value(&e.expected)?;
            }
            let config = json!({
                "command": "analyze",
                "input": input.source,
                "global": g,
                "profile": config,
            });
            envelope(config, result, &timer)
        }
        Command::Cone { symbolic, reduced } => cone_command(g, *symbolic, *reduced, &mut timer),
        Command::Kx {
            direction,
            eps,
            delta,
        } => {
            let input = load_input(g)?;
            let mut params = kx_params(g, &input);
            if let Some(e) = eps {
                params.eps = *e;
            }
            if let Some(d) = delta {
                params.delta = *d;
            }
            let est = timer.time("kx", || kx_estimate(&input.germ, direction, &params, g.seed))?;
            if g.format == Format::Csv {
                let dir: Vec<String> = direction.iter().map(f64::to_string).collect();
                return Ok(format!("direction,k,stable\n\"{}\",{},{}\n", dir.join(","), est.k, est.stable));
            }
            let config = json!({
                "command": "kx",
                "input": input.source,
                "global": g,
                "kx": params,
            });
            envelope(config, serde_json::to_value(&est)?, &timer)
        }
        Command::Witness {
            grid,
            alpha,
            beta,
            anchor,
            slice_axes,
            host,
        } => {
            let input = load_input(g)?;
            let mut jobs = Vec::new();
            match &input.entry {
                Some(entry) => {
                    if entry.witnesses.is_empty() {
                        return Err(Error::InvalidArgument(format!(
                            "corpus entry `{}` has no witness curves",
                            entry.name
                        )));
                    }
                    for w in &entry.witnesses {
                        let (a, b) = w.curves()?;
                        let mut config = w.config(g.seed);
                        if let Some(n) = g.samples {
                            config.samples = n;
                        }
                        let grid = match grid {
                            Some(spec) => parse_schedule(spec)?,
                            None => w.grid()?,
                        };
                        jobs.push((w.name.clone(), w.host, a, b, grid, config));
                    }
                }
                None => {
                    let (Some(alpha), Some(beta), Some(grid)) = (alpha, beta, grid) else {
                        return Err(Error::InvalidArgument(
                            "witness with --set needs --alpha, --beta and --grid".into(),
                        ));
                    };
                    let a = WitnessCurve::from_json(&std::fs::read_to_string(alpha)?)?;
                    let b = WitnessCurve::from_json(&std::fs::read_to_string(beta)?)?;
                    let anchor = anchor.clone().unwrap_or_else(|| input.germ.basepoint().to_vec());
                    let mut config = WitnessConfig::new(anchor, g.samples.unwrap_or(20000), g.seed);
                    if let Some(axes) = slice_axes {
                        config.slice = Some(Slice::coordinates(input.germ.dim(), axes));
                    }
                    let host = match host {
                        HostArg::Set => Host::Set,
                        HostArg::Cone => Host::Cone,
                    };
                    jobs.push(("witness".to_string(), host, a, b, parse_schedule(grid)?, config));
                }
            }
            if let Some(c) = g.conn_const {
                for job in &mut jobs {
                    job.5.conn_const = c;
                }
            }
            let mut results = Vec::new();
            let mut csv = String::from("name,s,outer,inner_est,ratio\n");
            for (name, host, a, b, grid, config) in &jobs {
                let host_germ = match host {
                    Host::Set => input.germ.clone(),
                    Host::Cone => cone_germ(&input.germ)?,
                };
                let table = timer.time(&format!("witness:{name}"), || {
                    witness_table(&host_germ, a, b, grid, config)
                })?;
                let fit = witness_exponent(&table).ok();
                for r in &table.rows {
                    csv.push_str(&format!("{name},{},{},{},{}\n", r.s, r.outer, r.inner_est, r.ratio));
                }
                results.push(json!({
                    "name": name,
                    "host": host,
                    "alpha": a.def,
                    "beta": b.def,
                    "rows": table.rows,
                    "exponent_fit": fit,
                    "config": table.config,
                }));
            }
            if g.format == Format::Csv {
                return Ok(csv);
            }
            let config = json!({
                "command": "witness",
                "input": input.source,
                "global": g,
            });
            envelope(config, json!({ "witnesses": results }), &timer)
        }
    }
}

fn corpus_command(action: &CorpusAction, g: &GlobalArgs, timer: &Timer) -> Result<String> {
    match action {
        CorpusAction::List => {
            if g.format == Format::Csv {
                return Ok(corpus::list().iter().map(|n| format!("{n}\n")).collect());
            }
            let entries = corpus::all()?
                .into_iter()
                .map(|e| {
                    json!({
                        "name": e.name,
                        "description": e.description,
                        "expected": e.expected,
                        "tags": e.tags,
                    })
                })
                .collect::<Vec<_>>();
            let config = json!({ "command": "corpus list", "corpus_version": corpus::VERSION });
            envelope(config, json!({ "names": corpus::list(), "entries": entries }), timer)
        }
        CorpusAction::Export { name } => Ok(corpus::get(name)?.source().to_string()),
    }
}

fn profile_config(g: &GlobalArgs, input: &Input) -> Result<ProfileConfig> {
    let mut config = match &input.entry {
        Some(e) => e.profile_config(g.seed)?,
        None => ProfileConfig::new(parse_schedule("0.2:0.025:log4")?, 4000, g.seed),
    };
    if let Some(spec) = &g.scales {
        config.scales = parse_schedule(spec)?;
    }
    if let Some(n) = g.samples {
        config.samples = n;
    }
    if let Some(c) = g.conn_const {
        config.conn_const = c;
    }
    if let Some(d) = g.local_dim {
        config.local_dim = d;
    }
    Ok(config)
}

fn kx_params(g: &GlobalArgs, input: &Input) -> KxParams {
    let mut params = match &input.entry {
        Some(e) => e.kx_params(),
        None => KxParams {
            eps: 0.3,
            delta: 0.05,
            samples: 2000,
            local_dim: 2,
        },
    };
    if let Some(n) = g.samples {
        params.samples = n;
    }
    if let Some(d) = g.local_dim {
        params.local_dim = d;
    }
    params
}

fn cone_command(g: &GlobalArgs, symbolic_only: bool, reduced: Option<usize>, timer: &mut Timer) -> Result<String> {
    let input = load_input(g)?;
    let germ = &input.germ;
    let symbolic = match germ_symbolic_cone(germ) {
        Ok(c) => Some(c),
        Err(Error::AbsNode) => None,
        Err(e) => return Err(e),
    };
    let mut result = serde_json::Map::new();
    if let Some(c) = &symbolic {
        result.insert("symbolic_cone".into(), json!(c.display));
        result.insert("squarefree".into(), json!(c.squarefree));
        result.insert("symbolic_vars".into(), json!(c.vars));
        result.insert("note".into(), json!(c.note));
    } else {
        result.insert(
            "symbolic_note".into(),
            json!("generators contain abs(); no polynomial initial forms"),
        );
    }
    let (dir_scales, dir_n) = match &input.entry {
        Some(e) => (e.directions.scales.clone(), e.directions.n),
        None => (vec![0.01, 0.001], 256),
    };
    let dir_scales = match &g.scales {
        Some(spec) => parse_schedule(spec)?,
        None => dir_scales,
    };
    let dir_n = g.samples.unwrap_or(dir_n);
    let mut csv = String::new();
    if !symbolic_only {
        let cloud = timer.time("directions", || directions(germ, &dir_scales, dir_n, g.seed))?;
        let model = ray_model(&cloud)?;
        let est = timer.time("cone_lambda", || model.lne_estimate(g.conn_const.unwrap_or(CONN_CONST)))?;
        csv.push_str("direction\n");
        for d in &cloud.directions {
            let parts: Vec<String> = d.iter().map(f64::to_string).collect();
            csv.push_str(&format!("\"{}\"\n", parts.join(",")));
        }
        result.insert("directions".into(), json!(cloud.directions));
        result.insert("source_scales".into(), json!(cloud.source_scales));
        result.insert("pooled_scales".into(), json!(cloud.pooled_scales));
        result.insert("dispersion".into(), json!(cloud.dispersion));
        result.insert("ray_lambda".into(), json!(est.lambda));
        if let Some(count) = reduced {
            let params = kx_params(g, &input);
            let report = timer.time("reducedness", || reducedness_report(germ, &cloud, count, &params, g.seed));
            result.insert("kx".into(), json!(report
                .per_direction
                .iter()
                .map(|e| json!({ "direction": e.direction, "k": e.k, "stable": e.stable }))
                .collect::<Vec<_>>()));
            result.insert("reduced_estimate".into(), json!(report.reduced_estimate));
            result.insert("unstable".into(), json!(report.unstable));
            result.insert("failed".into(), json!(report.failed));
        }
    }
    if g.format == Format::Csv {
        if symbolic_only {
            let forms = symbolic.map(|c| c.display).unwrap_or_default();
            return Ok(std::iter::once("symbolic_cone".to_string())
                .chain(forms)
                .map(|l| l + "\n")
                .collect());
        }
        return Ok(csv);
    }
    let config = json!({
        "command": "cone",
        "input": input.source,
        "global": g,
        "symbolic_only": symbolic_only,
        "reduced": reduced,
        "direction_scales": dir_scales,
        "direction_samples": dir_n,
    });
    envelope(config, Value::Object(result), timer)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(std::iter::once("lipcone").chain(args.iter().copied()))
            .expect("valid command line");
        execute(&cli)
    }

    #[test]
    fn corpus_list_has_seven_names() {
        let v: Value = serde_json::from_str(&run(&["corpus", "list"]).unwrap()).unwrap();
        assert_eq!(v["result"]["names"].as_array().unwrap().len(), 7);
        assert_eq!(v["tool"], TOOL);
    }

    #[test]
    fn export_is_the_shipped_file() {
        let text = run(&["corpus", "export", "cusp"]).unwrap();
        assert_eq!(text, corpus::get("cusp").unwrap().source());
        assert_eq!(exit_code(&run(&["corpus", "export", "nope"]).unwrap_err()), 2);
    }

    #[test]
    fn symbolic_cone_command() {
        let v: Value =
            serde_json::from_str(&run(&["cone", "--corpus", "complex-3.14", "--symbolic"]).unwrap()).unwrap();
        assert_eq!(v["result"]["symbolic_cone"], json!(["y*(x^2+y^2)"]));
        let v: Value =
            serde_json::from_str(&run(&["cone", "--corpus", "pichon-neumann", "--symbolic"]).unwrap()).unwrap();
        assert_eq!(v["result"]["symbolic_cone"], json!(["y^4+z^4"]));
    }

    #[test]
    fn missing_set_file_is_an_input_error() {
        let err = run(&["analyze", "--set", "/nonexistent/missing.json"]).unwrap_err();
        assert_eq!(exit_code(&err), 2);
        let err = run(&["analyze"]).unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn timings_are_opt_in() {
        let v: Value = serde_json::from_str(&run(&["corpus", "list"]).unwrap()).unwrap();
        assert_eq!(v["timings_ms"], json!({}));
    }
}
