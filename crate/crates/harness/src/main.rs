use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use whacamole::experiment::{run_experiment, ExperimentConfig};
use whacamole::gen::{named_instance, random_instance, WeightDist, NAMED_INSTANCES};
use whacamole::verification::verify_all;
use whacamole_core::adversaries::{
    lb_adaptive_set_game, lb_decremental_queue_game, lb_memoryless_queue_game, lb_phi_queue_game,
    lb_two_item_set_game, yao_uniform_process, GameResult,
};
use whacamole_core::algorithms::{algorithm_by_name, ALGORITHM_NAMES};
use whacamole_core::analysis::{e_table, randomized_queue_bound, solve_lb_sequence};
use whacamole_core::error::Error;
use whacamole_core::model::Flavor;

#[derive(Parser)]
#[command(
    name = "whacamole",
    about = "Online weighted-item collection workbench: simulate, verify bounds, play adversary games"
)]
struct Cli {
    /// Default seed (WHACAMOLE_SEED), overridable per subcommand.
    #[arg(long, global = true, env = "WHACAMOLE_SEED")]
    seed: Option<u64>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a configured experiment and write CSV/JSON ratio reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for report.csv and report.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play one adversary game against an algorithm.
    Game {
        /// two-item-set | phi-queue | decremental-queue | memoryless-queue
        /// | adaptive-set | yao-uniform
        #[arg(long)]
        adversary: String,
        #[arg(long)]
        algorithm: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Round count for the memoryless game.
        #[arg(long = "T", default_value_t = 1000)]
        t: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit analysis tables and constants as JSON/CSV.
    Analyze {
        /// e-table | lb-sequence | rand-queue-bound
        #[arg(long)]
        what: String,
        #[arg(long, default_value_t = 30)]
        a_max: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance criteria and print one line per criterion.
    Verify {
        /// Comma-separated criterion ids, e.g. 1,4,11.
        #[arg(long)]
        only: Option<String>,
    },
    /// Generate an instance (random or named) as JSON.
    Gen {
        #[arg(long, default_value = "decremental_queue")]
        flavor: String,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        steps: usize,
        /// Monotone dynamic queue (weights nondecreasing along the queue).
        #[arg(long)]
        monotone: bool,
        /// uniform:lo,hi | grid:a,b,c | int:lo,hi
        #[arg(long, default_value = "uniform:0.05,1.0")]
        weights: String,
        /// One of the named tight instances instead of a random one.
        #[arg(long)]
        named: Option<String>,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_weights(spec: &str) -> Result<WeightDist, Error> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::BadConfig(format!("weights spec {spec:?}")))?;
    let nums: Vec<f64> = rest
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Error::BadConfig(format!("weights spec {spec:?}: {e}")))?;
    let dist = match (kind, nums.as_slice()) {
        ("uniform", [lo, hi]) => WeightDist::Uniform { lo: *lo, hi: *hi },
        ("grid", values) if !values.is_empty() => WeightDist::Grid(values.to_vec()),
        ("int", [lo, hi]) => WeightDist::Integers {
            lo: *lo as u32,
            hi: *hi as u32,
        },
        _ => return Err(Error::BadConfig(format!("weights spec {spec:?}"))),
    };
    dist.validate()?;
    Ok(dist)
}

fn game_json(r: &GameResult) -> serde_json::Value {
    let mut doc = serde_json::json!({
        "alg_gain": r.alg_gain,
        "adv_gain": r.adv_gain,
        "ratio": r.ratio,
        "notes": r.notes,
    });
    if let Some(k) = r.probed_index {
        doc["probed_index"] = k.into();
    }
    if let Some(cf) = r.closed_form_ratio {
        doc["closed_form_ratio"] = cf.into();
    }
    if let Some(t) = &r.transcript {
        doc["transcript"] = serde_json::json!({
            "instance": serde_json::from_str::<serde_json::Value>(&t.instance.to_json()).unwrap(),
            "alg_schedule": serde_json::from_str::<serde_json::Value>(
                &t.alg_schedule.to_json(&t.instance)).unwrap(),
            "adv_schedule": serde_json::from_str::<serde_json::Value>(
                &t.adv_schedule.to_json(&t.instance)).unwrap(),
        });
    }
    doc
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::BadConfig(format!("write {}: {e}", path.display()))),
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    let seed = cli.seed.unwrap_or(0);
    match cli.cmd {
        Cmd::Run { config, out } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::BadConfig(format!("read {}: {e}", config.display())))?;
            let mut config: ExperimentConfig = serde_json::from_str(&text)
                .map_err(|e| Error::BadConfig(format!("config: {e}")))?;
            if let Some(s) = cli.seed {
                config.seed = s;
            }
            let report = run_experiment(&config)?;
            for (alg, worst) in &report.worst {
                println!("worst ratio {alg}: {worst:.9}");
            }
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)
                    .map_err(|e| Error::BadConfig(format!("mkdir: {e}")))?;
                report.write_csv(&dir.join("report.csv"))?;
                std::fs::write(dir.join("report.json"), report.to_json())
                    .map_err(|e| Error::BadConfig(format!("write report: {e}")))?;
            }
            if let Some(ceiling) = config.ratio_ceiling {
                if report.max_ratio() > ceiling {
                    eprintln!("ratio ceiling {ceiling} exceeded: {}", report.max_ratio());
                    return Ok(1);
                }
            }
            Ok(0)
        }
        Cmd::Game {
            adversary,
            algorithm,
            n,
            t,
            trials,
            out,
        } => {
            let mut alg = algorithm_by_name(&algorithm)?;
            let result = match adversary.as_str() {
                "two-item-set" => lb_two_item_set_game(alg.as_mut())?,
                "phi-queue" => lb_phi_queue_game(alg.as_mut())?,
                "decremental-queue" => {
                    let seq = solve_lb_sequence(n.clamp(2, 12))?;
                    lb_decremental_queue_game(alg.as_mut(), &seq)?
                }
                "memoryless-queue" => lb_memoryless_queue_game(alg.as_mut(), n, t)?,
                "adaptive-set" => lb_adaptive_set_game(alg.as_mut(), n, trials, seed)?,
                "yao-uniform" => {
                    let est = yao_uniform_process(alg.as_mut(), n, trials, seed)?;
                    let doc = serde_json::json!({
                        "mean_alg_gain": est.mean,
                        "stderr": est.stderr,
                        "trials": est.trials,
                        "adv_gain": est.adv_gain,
                        "ratio": est.adv_gain / est.mean,
                    });
                    emit(&serde_json::to_string_pretty(&doc).unwrap(), out.as_ref())?;
                    return Ok(0);
                }
                other => {
                    return Err(Error::UnknownName(format!(
                        "adversary {other:?} (algorithms: {ALGORITHM_NAMES:?})"
                    )))
                }
            };
            println!(
                "alg {} vs {}: alg_gain {:.6} adv_gain {:.6} ratio {:.6}",
                algorithm, adversary, result.alg_gain, result.adv_gain, result.ratio
            );
            if out.is_some() {
                emit(
                    &serde_json::to_string_pretty(&game_json(&result)).unwrap(),
                    out.as_ref(),
                )?;
            }
            Ok(0)
        }
        Cmd::Analyze { what, a_max, n, out } => {
            match what.as_str() {
                "e-table" => {
                    let table = e_table(a_max.max(1));
                    let mut csv = String::from("a");
                    for p in 0..=a_max {
                        csv.push_str(&format!(",p{p}"));
                    }
                    csv.push('\n');
                    let mut entries = Vec::new();
                    for a in 1..=a_max {
                        csv.push_str(&a.to_string());
                        let mut row = Vec::new();
                        for p in 0..=a {
                            csv.push_str(&format!(",{:.12}", table.get_f64(a, p)));
                            row.push(serde_json::json!({
                                "p": p,
                                "exact": table.get(a, p).to_string(),
                                "value": table.get_f64(a, p),
                            }));
                        }
                        csv.push('\n');
                        entries.push(serde_json::json!({"a": a, "row": row}));
                    }
                    let doc = serde_json::json!({"a_max": a_max, "entries": entries});
                    emit(&serde_json::to_string_pretty(&doc).unwrap(), out.as_ref())?;
                    if out.is_some() {
                        println!("{csv}");
                    }
                }
                "lb-sequence" => {
                    let seq = solve_lb_sequence(n)?;
                    let doc = serde_json::json!({
                        "n": seq.n,
                        "r": seq.r,
                        "z": seq.z,
                    });
                    emit(&serde_json::to_string_pretty(&doc).unwrap(), out.as_ref())?;
                }
                "rand-queue-bound" => {
                    let b = randomized_queue_bound(n.max(1));
                    let doc = serde_json::json!({
                        "n": b.n, "a": b.a, "m": b.m, "r": b.r, "v": b.v,
                        "limit": whacamole_core::algorithms::e_over_e_minus_1(),
                    });
                    emit(&serde_json::to_string_pretty(&doc).unwrap(), out.as_ref())?;
                }
                other => return Err(Error::UnknownName(format!("analysis {other:?}"))),
            }
            Ok(0)
        }
        Cmd::Verify { only } => {
            let ids: Option<Vec<usize>> = match only {
                None => None,
                Some(spec) => Some(
                    spec.split(',')
                        .map(|s| {
                            s.trim()
                                .parse::<usize>()
                                .map_err(|e| Error::BadConfig(format!("--only: {e}")))
                        })
                        .collect::<Result<_, _>>()?,
                ),
            };
            let results = verify_all(ids.as_deref());
            let mut all_pass = true;
            for r in &results {
                println!("{}", r.line());
                all_pass &= r.pass;
            }
            println!(
                "{}/{} criteria passed",
                results.iter().filter(|r| r.pass).count(),
                results.len()
            );
            Ok(if all_pass { 0 } else { 1 })
        }
        Cmd::Gen {
            flavor,
            n,
            steps,
            monotone,
            weights,
            named,
            epsilon,
            out,
        } => {
            let instance = match named {
                Some(name) => named_instance(&name, epsilon).map_err(|e| {
                    Error::UnknownName(format!("{e}; named instances: {NAMED_INSTANCES:?}"))
                })?,
                None => {
                    let flavor = Flavor::parse(&flavor)?;
                    let dist = parse_weights(&weights)?;
                    random_instance(flavor, n, steps, &dist, seed, monotone)?
                }
            };
            emit(&instance.to_json(), out.as_ref())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
