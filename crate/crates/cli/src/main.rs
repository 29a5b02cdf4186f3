//! `flipproc`: command-line front end for the `flipproc` library.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 input error, 3 resource cap.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use flipproc::dynamics::{integrate, velocity, IntegrateOptions};
use flipproc::equivalence::{
    check_k1, classify_unique, coeff_vector, compare, dilation_factor, lift, symmetrize,
};
use flipproc::graph::{enumerate_classes, ClassKey};
use flipproc::rational;
use flipproc::rule::{make_named, Family, NamedParams, Rule};
use flipproc::sim::{run, transference_check, Initial, SimConfig, DEFAULT_MAX_N};
use flipproc::{Kernel, DEFAULT_CAP};

#[derive(Parser)]
#[command(name = "flipproc", version, about = "Trajectory equivalence of flip-process rules")]
struct Cli {
    /// Largest order for which orbit-class tables are built.
    #[arg(long, global = true, env = "FLIPPROC_CAP", default_value_t = DEFAULT_CAP)]
    cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the isomorphism classes of pair-rooted graphs of order K.
    Classes {
        #[arg(long)]
        k: usize,
    },
    /// Print the coefficient certificate of a rule.
    Coeffs {
        rule: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether two rules have the same trajectories.
    Compare {
        r1: PathBuf,
        r2: PathBuf,
        /// Look for C > 0 with a(R1) = C·a(R2) instead.
        #[arg(long)]
        dilation: bool,
    },
    /// Lift a rule to a larger order.
    Lift {
        rule: PathBuf,
        #[arg(long)]
        to: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average a rule over the symmetric group.
    Symmetrize {
        rule: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide uniqueness; write a witness rule when not unique.
    Unique {
        rule: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Check the conjectured flip-distribution criterion (orbit sums).
    K1 { r1: PathBuf, r2: PathBuf },
    /// Evaluate the velocity operator on a step graphon.
    Velocity { rule: PathBuf, w: String },
    /// Integrate a trajectory with fixed-step RK4.
    Integrate {
        rule: PathBuf,
        w: String,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep every N-th step.
        #[arg(long, default_value_t = 1)]
        every: usize,
        /// Accept a start outside [0,1].
        #[arg(long)]
        allow_kernel: bool,
    },
    /// Run the flip process and record block densities.
    Simulate {
        rule: PathBuf,
        #[arg(long)]
        n: usize,
        /// Step-graphon file, or a number p for the constant graphon.
        #[arg(long)]
        w0: String,
        #[arg(long)]
        time: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare simulated densities with the integrated trajectory.
    Transference {
        rule: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        w0: String,
        #[arg(long)]
        time: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a rule from a named family.
    Named {
        family: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Edge-count threshold for `extremist`.
        #[arg(long)]
        threshold: Option<String>,
        /// Replacement distribution for `ignorant`, as `code=p,code=p`.
        #[arg(long)]
        dist: Option<String>,
    },
}

fn read_rule(path: &Path) -> Result<Rule> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Rule::from_json(&text).with_context(|| format!("loading rule {}", path.display()))
}

fn read_kernel(arg: &str) -> Result<Kernel> {
    if let Ok(p) = arg.parse::<f64>() {
        return Ok(Kernel::constant(p));
    }
    let text = fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
    Kernel::from_json(&text).with_context(|| format!("loading step graphon {arg}"))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            let nl = if text.ends_with('\n') { "" } else { "\n" };
            match write!(stdout, "{text}{nl}").and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e).context("writing stdout"),
                _ => Ok(()),
            }
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes")
}

fn dispatch(cli: Cli) -> Result<u8> {
    let cap = cli.cap;
    match cli.command {
        Command::Classes { k } => {
            let classes: Vec<Value> = enumerate_classes(k, cap)?
                .iter()
                .map(|c| json!({"class": ClassKey::from(&c.canon), "size": c.size}))
                .collect();
            emit(None, &pretty(&Value::Array(classes)))?;
        }
        Command::Coeffs { rule, out } => {
            emit(out.as_deref(), &coeff_vector(&read_rule(&rule)?, cap)?.to_json())?;
        }
        Command::Compare { r1, r2, dilation } => {
            let (a, b) = (read_rule(&r1)?, read_rule(&r2)?);
            if dilation {
                let c = dilation_factor(&a, &b, cap)?;
                emit(None, &pretty(&json!({"dilation": c.as_ref().map(rational::format)})))?;
                return Ok(if c.is_some() { 0 } else { 1 });
            }
            let v = compare(&a, &b, cap)?;
            let report = json!({
                "verdict": if v.equivalent { "equivalent" } else { "not equivalent" },
                "equivalent": v.equivalent,
                "order": v.order,
                "first_difference": v.first_difference.map(|c| json!({
                    "class": ClassKey::from(&c.canon),
                    "left": rational::format(v.left.get(&c).expect("class present")),
                    "right": rational::format(v.right.get(&c).expect("class present")),
                })),
                "left": v.left.certificate(),
                "right": v.right.certificate(),
            });
            emit(None, &pretty(&report))?;
            return Ok(if v.equivalent { 0 } else { 1 });
        }
        Command::Lift { rule, to, out } => {
            emit(out.as_deref(), &lift(&read_rule(&rule)?, to)?.to_json())?;
        }
        Command::Symmetrize { rule, out } => {
            emit(out.as_deref(), &symmetrize(&read_rule(&rule)?)?.to_json())?;
        }
        Command::Unique { rule, witness } => {
            let v = classify_unique(&read_rule(&rule)?)?;
            if let (Some(path), Some(w)) = (&witness, &v.witness) {
                emit(Some(path), &w.to_json())?;
            }
            let report = json!({
                "unique": v.unique,
                "reason": v.reason.to_string(),
                "case": v.case.map(|c| c.to_string()),
            });
            emit(None, &pretty(&report))?;
            return Ok(if v.unique { 0 } else { 1 });
        }
        Command::K1 { r1, r2 } => {
            eprintln!("CONJECTURE: equal orbit sums are conjectured, not proven, to give equal flip-process distributions");
            let holds = check_k1(&read_rule(&r1)?, &read_rule(&r2)?)?;
            emit(None, &pretty(&json!({"status": "conjecture", "k1": holds})))?;
            return Ok(if holds { 0 } else { 1 });
        }
        Command::Velocity { rule, w } => {
            emit(None, &velocity(&read_rule(&rule)?, &read_kernel(&w)?, cap)?.to_json())?;
        }
        Command::Integrate { rule, w, t_max, dt, out, every, allow_kernel } => {
            let opts = IntegrateOptions { step: dt, allow_kernel, emit_every: every, cap };
            let traj = integrate(&read_rule(&rule)?, &read_kernel(&w)?, t_max, &opts)?;
            emit(out.as_deref(), &traj.to_csv())?;
        }
        Command::Simulate { rule, n, w0, time, seed, runs, samples, max_n, out } => {
            let mut cfg = SimConfig::new(read_rule(&rule)?, n, Initial::Kernel(read_kernel(&w0)?), time, seed);
            cfg.runs = runs;
            cfg.samples = samples;
            cfg.max_n = max_n;
            emit(out.as_deref(), &run(&cfg)?.to_csv())?;
        }
        Command::Transference { rule, n, w0, time, eps, seed, runs, samples, max_n, out } => {
            let mut cfg = SimConfig::new(read_rule(&rule)?, n, Initial::Kernel(read_kernel(&w0)?), time, seed);
            cfg.runs = runs;
            cfg.samples = samples;
            cfg.max_n = max_n;
            let report = transference_check(&cfg, eps)?;
            emit(out.as_deref(), &serde_json::to_string_pretty(&report)?)?;
            return Ok(if report.pass { 0 } else { 1 });
        }
        Command::Named { family, k, out, threshold, dist } => {
            let params = NamedParams {
                threshold: threshold.as_deref().map(rational::parse).transpose()?,
                distribution: dist.as_deref().map(NamedParams::parse_distribution).transpose()?.unwrap_or_default(),
            };
            let rule = make_named(family.parse::<Family>()?, k, &params)?;
            emit(out.as_deref(), &rule.to_json())?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let resource = e.chain().any(|c| c.downcast_ref::<flipproc::Error>().is_some_and(flipproc::Error::is_resource));
            ExitCode::from(if resource { 3 } else { 2 })
        }
    }
}
