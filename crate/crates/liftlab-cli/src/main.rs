//! Experiment runner CLI.
//!
//! Every subcommand maps to one experiment, prints a single JSON document
//! to stdout, and exits 0 on success, 1 when an assertion-style experiment
//! check fails (an oracle mismatch or a violated bound), and 2 on config
//! errors. The document embeds the tool version, the fully resolved
//! config, the master seed, and the wall-clock duration; the `payload`
//! member is byte-for-byte reproducible for a given config and seed at any
//! worker count.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use liftlab::graph::{betti_number, parse_family, MultiGraph};
use liftlab::mc::exact::exact_transitive_probability;
use liftlab::mc::experiments::{
    experiment_barbell, experiment_barbell_exhaustive, experiment_delta_connectivity,
    experiment_expansion, experiment_homotopy, experiment_iterated, experiment_regular,
    experiment_wreath, slope_fit_transitive,
};
use liftlab::mc::formulas::Formula;
use liftlab::mc::{estimate, try_exact_transitive, EstimateResult, EventKind, ExactValue};

/// Fixed default master seed ("lift" in ASCII); reproducibility first,
/// entropy never.
const DEFAULT_SEED: u64 = 0x6c69_6674;

#[derive(Parser)]
#[command(
    name = "liftlab",
    version,
    about = "Random lifts of multigraphs: seeded experiments against exact laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed; identical seeds reproduce identical payloads.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Worker threads for trial parallelism; must not affect results.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Write plotting rows `x,p_hat,ci_low,ci_high,formula` to a CSV file.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,

    /// Also write the JSON document to a file.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
}

/// Base graph selection: a named family or an edge-list file.
#[derive(Args, Clone)]
struct BaseArg {
    /// Family spec, e.g. `theta`, `bouquet:2`, `barbell:7`, `cycle:4`.
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    family: Option<String>,

    /// Edge-list file: first line `V E`, then one `tail head` line per
    /// edge.
    #[arg(long, value_name = "FILE")]
    graph: Option<PathBuf>,
}

impl BaseArg {
    fn resolve(&self) -> liftlab::Result<(String, MultiGraph)> {
        match (&self.family, &self.graph) {
            (Some(spec), None) => Ok((spec.clone(), parse_family(spec)?)),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)?;
                Ok((
                    path.display().to_string(),
                    MultiGraph::from_edge_list(&text)?,
                ))
            }
            _ => Err(liftlab::Error::InvalidConfig(
                "pass exactly one of --family or --graph".into(),
            )),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the probability that a random n-lift of the base is
    /// connected; attaches the closed form and the exact value when small.
    Connectivity {
        #[command(flatten)]
        base: BaseArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Estimate the probability that l random permutations generate a
    /// transitive subgroup.
    Transitive {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Estimate the probability that l random permutations generate the
    /// symmetric or alternating group.
    SymOrAlt {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Exact-expansion experiment: frequency of expansion >= 1/(5|V|) and
    /// its containment of the sym-or-alt event.
    Expansion {
        #[command(flatten)]
        base: BaseArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1_000)]
        trials: u64,
    },
    /// Frequency with which lifts reach edge connectivity >= the base
    /// minimum degree.
    DeltaConn {
        #[command(flatten)]
        base: BaseArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: u64,
    },
    /// Barbell negative control: every sampled cut must be at most n.
    Barbell {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Scan every assignment instead of sampling (tiny cases only).
        #[arg(long)]
        exhaustive: bool,
    },
    /// Iterated lift connectivity over a degree signature.
    Iterated {
        #[command(flatten)]
        base: BaseArg,
        /// Comma-separated stage degrees, top first, e.g. `2,2`.
        #[arg(long)]
        signature: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Wreath transitivity frequency against the product law.
    Wreath {
        #[arg(long)]
        signature: String,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Random 2d-regular multigraph connectivity and the expansion >= 1
    /// check among symmetric-or-alternating walk-subgroups.
    Regular {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Compare lift connectivity across two bases; equal cycle rank must
    /// mean equal probabilities.
    Homotopy {
        /// First base family spec.
        #[arg(long)]
        family_a: String,
        /// Second base family spec.
        #[arg(long)]
        family_b: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Print the exact transitive-generation probability as a rational
    /// and a decimal.
    Exact {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
    },
    /// Fit the log-log slope of the transitivity failure rate against the
    /// degree.
    Slope {
        #[arg(long)]
        l: usize,
        /// Comma-separated degrees, e.g. `10,20,40,80`.
        #[arg(long, default_value = "10,20,40,80")]
        n_values: String,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
    },
}

struct Outcome {
    config: Value,
    payload: Value,
    csv_rows: Vec<CsvRow>,
    ok: bool,
}

struct CsvRow {
    x: u64,
    p_hat: f64,
    ci_low: f64,
    ci_high: f64,
    formula: Option<f64>,
}

fn estimate_row(n: u64, est: &EstimateResult) -> CsvRow {
    CsvRow {
        x: n,
        p_hat: est.p_hat,
        ci_low: est.ci_low,
        ci_high: est.ci_high,
        formula: est.formula.map(|f| f.value),
    }
}

fn oracle_ok(est: &EstimateResult) -> bool {
    est.exact
        .as_ref()
        .map(|e: &ExactValue| est.ci_contains(e.value))
        .unwrap_or(true)
}

fn parse_signature(text: &str) -> liftlab::Result<Vec<usize>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| liftlab::Error::Parse(format!("bad signature entry {s:?}")))
        })
        .collect()
}

fn run(cli: &Cli) -> liftlab::Result<Outcome> {
    let seed = cli.seed;
    match &cli.command {
        Command::Connectivity { base, n, trials } => {
            let (base_ref, g) = base.resolve()?;
            let l = betti_number(&g)?;
            let mut est = estimate(
                &EventKind::LiftConnected {
                    base: g.clone(),
                    n: *n,
                },
                *trials,
                seed,
            )?;
            if l >= 1 {
                est = est.with_formula(
                    Formula::LiftConnectivity {
                        n: *n as u64,
                        l: l as u32,
                    }
                    .evaluate()?,
                );
            }
            if let Some(exact) = try_exact_transitive(*n, l) {
                est = est.with_exact(exact);
            }
            let ok = oracle_ok(&est);
            Ok(Outcome {
                config: json!({
                    "experiment": "connectivity", "base": base_ref, "betti": l,
                    "n": n, "trials": trials, "seed": seed,
                }),
                csv_rows: vec![estimate_row(*n as u64, &est)],
                payload: serde_json::to_value(&est).expect("serializable"),
                ok,
            })
        }
        Command::Transitive { n, l, trials } => {
            let mut est = estimate(&EventKind::Transitive { n: *n, l: *l }, *trials, seed)?;
            if *l >= 1 {
                est = est.with_formula(
                    Formula::LiftConnectivity {
                        n: *n as u64,
                        l: *l as u32,
                    }
                    .evaluate()?,
                );
            }
            if let Some(exact) = try_exact_transitive(*n, *l) {
                est = est.with_exact(exact);
            }
            let ok = oracle_ok(&est);
            Ok(Outcome {
                config: json!({
                    "experiment": "transitive", "n": n, "l": l,
                    "trials": trials, "seed": seed,
                }),
                csv_rows: vec![estimate_row(*n as u64, &est)],
                payload: serde_json::to_value(&est).expect("serializable"),
                ok,
            })
        }
        Command::SymOrAlt { n, l, trials } => {
            let mut est = estimate(&EventKind::SymOrAlt { n: *n, l: *l }, *trials, seed)?;
            if *l >= 1 {
                est = est.with_formula(
                    Formula::SymOrAltGeneration {
                        n: *n as u64,
                        l: *l as u32,
                    }
                    .evaluate()?,
                );
            }
            Ok(Outcome {
                config: json!({
                    "experiment": "sym-or-alt", "n": n, "l": l,
                    "trials": trials, "seed": seed,
                }),
                csv_rows: vec![estimate_row(*n as u64, &est)],
                payload: serde_json::to_value(&est).expect("serializable"),
                ok: true,
            })
        }
        Command::Expansion { base, n, trials } => {
            let (base_ref, g) = base.resolve()?;
            let rep = experiment_expansion(&g, *n, *trials, seed)?;
            Ok(Outcome {
                config: json!({
                    "experiment": "expansion", "base": base_ref,
                    "n": n, "trials": trials, "seed": seed,
                }),
                csv_rows: vec![CsvRow {
                    x: *n as u64,
                    p_hat: rep.expansion_ge_xi as f64 / rep.trials as f64,
                    ci_low: 0.0,
                    ci_high: 1.0,
                    formula: None,
                }],
                ok: rep.consistent,
                payload: serde_json::to_value(&rep).expect("serializable"),
            })
        }
        Command::DeltaConn { base, n, trials } => {
            let (base_ref, g) = base.resolve()?;
            let rep = experiment_delta_connectivity(&g, *n, *trials, seed)?;
            Ok(Outcome {
                config: json!({
                    "experiment": "delta-conn", "base": base_ref,
                    "n": n, "trials": trials, "seed": seed,
                }),
                csv_rows: vec![CsvRow {
                    x: *n as u64,
                    p_hat: rep.success_frequency,
                    ci_low: 0.0,
                    ci_high: 1.0,
                    formula: None,
                }],
                ok: true,
                payload: serde_json::to_value(&rep).expect("serializable"),
            })
        }
        Command::Barbell {
            k,
            n,
            trials,
            exhaustive,
        } => {
            let rep = if *exhaustive {
                experiment_barbell_exhaustive(*k, *n, 1 << 22)?
            } else {
                experiment_barbell(*k, *n, *trials, seed)?
            };
            Ok(Outcome {
                config: json!({
                    "experiment": "barbell", "k": k, "n": n,
                    "trials": trials, "exhaustive": exhaustive, "seed": seed,
                }),
                csv_rows: vec![CsvRow {
                    x: *n as u64,
                    p_hat: if rep.within_bound { 1.0 } else { 0.0 },
                    ci_low: 0.0,
                    ci_high: 1.0,
                    formula: None,
                }],
                ok: rep.within_bound,
                payload: serde_json::to_value(&rep).expect("serializable"),
            })
        }
        Command::Iterated {
            base,
            signature,
            trials,
        } => {
            let (base_ref, g) = base.resolve()?;
            let sig = parse_signature(signature)?;
            let rep = experiment_iterated(&g, &sig, *trials, seed)?;
            Ok(Outcome {
                config: json!({
                    "experiment": "iterated", "base": base_ref,
                    "signature": sig, "trials": trials, "seed": seed,
                }),
                csv_rows: vec![estimate_row(
                    sig.iter().product::<usize>() as u64,
                    &rep.estimate,
                )],
                ok: rep.consistent,
                payload: serde_json::to_value(&rep).expect("serializable"),
            })
        }
        Command::Wreath {
            signature,
            l,
            trials,
        } => {
            let sig = parse_signature(signature)?;
            let rep = experiment_wreath(&sig, *l, *trials, seed)?;
            Ok(Outcome {
                config: json!({
                    "experiment": "wreath", "signature": sig, "l": l,
                    "trials": trials, "seed": seed,
                }),
                csv_rows: vec![estimate_row(
                    sig.iter().product::<usize>() as u64,
                    &rep.estimate,
                )],
                ok: rep.consistent,
                payload: serde_json::to_value(&rep).expect("serializable"),
            })
        }
        Command::Regular { d, n, trials } => {
            let rep = experiment_regular(*d, *n, *trials, seed)?;
            Ok(Outcome {
                config: json!({
                    "experiment": "regular", "d": d, "n": n,
                    "trials": trials, "seed": seed,
                }),
                csv_rows: vec![estimate_row(*n as u64, &rep.estimate)],
                ok: rep.consistent,
                payload: serde_json::to_value(&rep).expect("serializable"),
            })
        }
        Command::Homotopy {
            family_a,
            family_b,
            n,
            trials,
        } => {
            let a = parse_family(family_a)?;
            let b = parse_family(family_b)?;
            let rep = experiment_homotopy(&a, &b, *n, *trials, seed)?;
            Ok(Outcome {
                config: json!({
                    "experiment": "homotopy", "family_a": family_a,
                    "family_b": family_b, "n": n, "trials": trials, "seed": seed,
                }),
                csv_rows: vec![
                    estimate_row(*n as u64, &rep.estimate_a),
                    estimate_row(*n as u64, &rep.estimate_b),
                ],
                ok: rep.consistent,
                payload: serde_json::to_value(&rep).expect("serializable"),
            })
        }
        Command::Exact { n, l } => {
            let p = exact_transitive_probability(*n, *l)?;
            let exact = ExactValue::from_rational(&p);
            Ok(Outcome {
                config: json!({
                    "experiment": "exact", "n": n, "l": l, "seed": seed,
                }),
                csv_rows: vec![CsvRow {
                    x: *n as u64,
                    p_hat: exact.value,
                    ci_low: exact.value,
                    ci_high: exact.value,
                    formula: None,
                }],
                payload: json!({
                    "n": n, "l": l,
                    "numer": exact.numer, "denom": exact.denom,
                    "value": exact.value,
                }),
                ok: true,
            })
        }
        Command::Slope {
            l,
            n_values,
            trials,
        } => {
            let ns = parse_signature(n_values)?;
            let rep = slope_fit_transitive(*l, &ns, *trials, seed)?;
            let csv_rows = rep
                .points
                .iter()
                .map(|p| estimate_row(p.n as u64, &p.estimate))
                .collect();
            Ok(Outcome {
                config: json!({
                    "experiment": "slope", "l": l, "n_values": ns,
                    "trials_per_point": trials, "seed": seed,
                }),
                csv_rows,
                ok: true,
                payload: serde_json::to_value(&rep).expect("serializable"),
            })
        }
    }
}

fn write_csv(rows: &[CsvRow], path: &PathBuf) -> std::io::Result<()> {
    let mut text = String::from("x,p_hat,ci_low,ci_high,formula\n");
    for r in rows {
        let formula = r.formula.map(|f| f.to_string()).unwrap_or_default();
        let _ = writeln!(
            text,
            "{},{},{},{},{}",
            r.x, r.p_hat, r.ci_low, r.ci_high, formula
        );
    }
    std::fs::write(path, text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();

    let pool = cli.workers.map(|w| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .expect("thread pool")
    });
    let outcome = match &pool {
        Some(pool) => pool.install(|| run(&cli)),
        None => run(&cli),
    };

    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let mut config = outcome.config;
    if let Value::Object(map) = &mut config {
        map.insert("workers".into(), json!(cli.workers));
        map.insert(
            "csv".into(),
            json!(cli.csv.as_ref().map(|p| p.display().to_string())),
        );
    }
    let doc = json!({
        "tool": {"name": "liftlab", "version": env!("CARGO_PKG_VERSION")},
        "config": config,
        "duration_ms": started.elapsed().as_millis() as u64,
        "payload": outcome.payload,
    });
    let rendered = serde_json::to_string_pretty(&doc).expect("document serializes");
    println!("{rendered}");
    if let Some(path) = &cli.output {
        if let Err(e) = std::fs::write(path, &rendered) {
            eprintln!("error writing {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if let Some(path) = &cli.csv {
        if let Err(e) = write_csv(&outcome.csv_rows, path) {
            eprintln!("error writing {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("experiment check failed; see payload");
        ExitCode::from(1)
    }
}
