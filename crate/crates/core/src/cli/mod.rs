//! Command-line front end: `run`, `plot` and `gradcheck`.

pub mod bundle;
pub mod config;
pub mod gradcheck;
pub mod svg;
pub mod table;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{parse_config, Assignment, ConfigError};
use table::Table;

use crate::net::{Activation, OrderingMode};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NON_CONVERGENCE: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "rqnn", version, about = "Quaternion network experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment and write its result bundle.
    Run(RunArgs),
    /// Regenerate SVG plots from the CSV files in a result directory.
    Plot {
        dir: PathBuf,
    },
    /// Compare analytic gradients with central differences.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// key=value configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// speed, lines, cloud or cloud-nonlinear.
    #[arg(long)]
    pub experiment: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv, json or svg; repeatable.
    #[arg(long = "format")]
    pub formats: Vec<String>,
    /// mean or sum.
    #[arg(long)]
    pub loss_reduction: Option<String>,
    /// online or batch.
    #[arg(long)]
    pub update_mode: Option<String>,
    /// Extra key=value settings applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    /// rqnn, qnn, real or all.
    #[arg(long, default_value = "all")]
    pub mode: String,
    /// sigmoid, identity or all.
    #[arg(long, default_value = "all")]
    pub activation: String,
    #[arg(long, default_value_t = 50)]
    pub instances: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest acceptable relative error.
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
}

impl RunArgs {
    fn overrides(&self) -> Result<Vec<Assignment>, ConfigError> {
        let mut v = Vec::new();
        let mut flag = |k: &str, val: &Option<String>| {
            if let Some(x) = val {
                v.push(Assignment::flag(k, x.clone()));
            }
        };
        flag("experiment", &self.experiment);
        flag("seed", &self.seed);
        flag("trials", &self.trials);
        flag("loss_reduction", &self.loss_reduction);
        flag("update_mode", &self.update_mode);
        if let Some(out) = &self.out {
            v.push(Assignment::flag("out", out.to_string_lossy()));
        }
        for f in &self.formats {
            v.push(Assignment::flag("format", f.clone()));
        }
        for s in &self.set {
            let (key, value) = s.split_once('=').ok_or_else(|| ConfigError::Parse {
                location: "flag --set".into(),
                message: format!("expected KEY=VALUE, found '{s}'"),
            })?;
            v.push(Assignment {
                key: key.into(),
                value: value.into(),
                location: format!("flag --set {key}"),
            });
        }
        Ok(v)
    }
}

fn run(args: &RunArgs) -> u8 {
    let text = match &args.config {
        Some(p) => match fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", p.display());
                return EXIT_IO;
            }
        },
        None => String::new(),
    };
    let source = args.config.as_deref().map_or("<none>".into(), |p| p.display().to_string());
    let cfg = match args.overrides().and_then(|o| parse_config(&text, &source, &o)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    let start = Instant::now();
    let outcome = match bundle::execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    eprintln!("{} finished in {:.2?}", cfg.experiment, start.elapsed());
    let (written, warnings) = match bundle::write_bundle(&cfg, &outcome) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: writing results to {}: {e}", cfg.out.display());
            return EXIT_IO;
        }
    };
    for w in warnings {
        eprintln!("warning: {w}");
    }
    for t in bundle::tables(&outcome).iter().filter(|t| t.name == "summary.csv") {
        println!("{}", t.header.join("\t"));
        for r in &t.rows {
            println!("{}", r.join("\t"));
        }
    }
    for p in written {
        eprintln!("wrote {}", p.display());
    }
    let capped = outcome.capped();
    if capped > 0 {
        eprintln!(
            "non-convergence: {capped} of {} trained networks hit the iteration cap",
            outcome.all_trials().len()
        );
        return EXIT_NON_CONVERGENCE;
    }
    EXIT_OK
}

fn read_table(dir: &Path, name: &str) -> Result<Option<(Table, Vec<String>)>, String> {
    let path = dir.join(name);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let provenance = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.trim_start_matches('#').trim().to_string())
        .collect();
    Ok(Some((Table::from_csv(name, &text)?, provenance)))
}

fn plot(dir: &Path) -> u8 {
    let mut tables = Vec::new();
    let mut provenance = Vec::new();
    for name in ["curves.csv", "report.csv"] {
        match read_table(dir, name) {
            Ok(Some((t, p))) => {
                if provenance.is_empty() {
                    provenance = p;
                }
                tables.push(t);
            }
            Ok(None) => {}
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_IO;
            }
        }
    }
    let rotation = provenance.iter().any(|p| {
        p.strip_prefix("config experiment=")
            .is_some_and(|e| e != "speed")
    });
    let plots = bundle::plots(&tables, &provenance, rotation);
    for w in &plots.warnings {
        eprintln!("warning: {w}");
    }
    for (name, text) in &plots.files {
        match bundle::write_atomic(dir, name, text) {
            Ok(p) => eprintln!("wrote {}", p.display()),
            Err(e) => {
                eprintln!("error: {name}: {e}");
                return EXIT_IO;
            }
        }
    }
    EXIT_OK
}

fn gradcheck(args: &GradcheckArgs) -> u8 {
    let modes: Vec<OrderingMode> = match args.mode.as_str() {
        "all" => vec![OrderingMode::Rqnn, OrderingMode::Qnn, OrderingMode::Real],
        m => match m.parse() {
            Ok(m) => vec![m],
            Err(e) => {
                eprintln!("config error: --mode: {e}");
                return EXIT_CONFIG;
            }
        },
    };
    let acts: Vec<Activation> = match args.activation.as_str() {
        "all" => vec![Activation::SplitSigmoid, Activation::Identity],
        a => match a.parse() {
            Ok(a) => vec![a],
            Err(e) => {
                eprintln!("config error: --activation: {e}");
                return EXIT_CONFIG;
            }
        },
    };
    let mut ok = true;
    println!("mode\tactivation\tinstances\tmax_rel_error");
    for &mode in &modes {
        for &act in &acts {
            match gradcheck::max_relative_error(mode, act, args.instances, args.seed) {
                Ok(err) => {
                    ok &= err < args.tolerance;
                    println!("{mode}\t{act}\t{}\t{err:.3e}", args.instances);
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_CHECK_FAILED;
                }
            }
        }
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

/// Runs a parsed command and returns its exit code.
pub fn dispatch(cli: &Cli) -> u8 {
    match &cli.command {
        Command::Run(a) => run(a),
        Command::Plot { dir } => plot(dir),
        Command::Gradcheck(a) => gradcheck(a),
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(dispatch(&Cli::parse()))
}
