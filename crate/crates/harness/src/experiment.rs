//! Seeded experiment runner: generates or loads instances, computes the
//! offline optimum, simulates each configured algorithm (averaging over
//! trials for randomized ones), and emits CSV/JSON ratio reports that
//! replay bit-exactly from the recorded seeds.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use whacamole_core::algorithms::{self, OnlineAlgorithm};
use whacamole_core::error::{Error, Result};
use whacamole_core::model::{Flavor, Instance};
use whacamole_core::opt::optimal_gain_value;
use whacamole_core::sim::{derive_seed, simulate};

use crate::families;
use crate::gen::{named_instance, random_instance, WeightDist};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgSpec {
    pub name: String,
    /// Parameter overrides for decque-efh (beta, xi) and fifoque-eh
    /// (alpha, beta).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
}

impl AlgSpec {
    pub fn named(name: &str) -> AlgSpec {
        AlgSpec {
            name: name.to_string(),
            alpha: None,
            beta: None,
            xi: None,
        }
    }

    pub fn build(&self) -> Result<Box<dyn OnlineAlgorithm>> {
        match self.name.as_str() {
            "decque-efh" => {
                let mut p = algorithms::DecQueEFHParams::default();
                if let Some(b) = self.beta {
                    p.beta = b;
                }
                if let Some(x) = self.xi {
                    p.xi = x;
                }
                Ok(Box::new(algorithms::DecQueEFH::new(p)))
            }
            "fifoque-eh" => {
                let mut p = algorithms::FIFOQueEHParams::default();
                if let Some(a) = self.alpha {
                    p.alpha = a;
                }
                if let Some(b) = self.beta {
                    p.beta = b;
                }
                Ok(Box::new(algorithms::FIFOQueEH::new(p)))
            }
            other => algorithms::algorithm_by_name(other),
        }
    }

    pub fn randomized(&self) -> bool {
        matches!(self.name.as_str(), "unirand" | "rmix")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorSpec {
    Random {
        n: usize,
        steps: usize,
        weights: WeightDist,
        count: usize,
        #[serde(default)]
        monotone: bool,
    },
    Exhaustive {
        max_items: usize,
        max_steps: usize,
        weights: Vec<f64>,
    },
    Named {
        names: Vec<String>,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
    Files {
        paths: Vec<String>,
    },
}

fn default_epsilon() -> f64 {
    1e-3
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub flavor: Flavor,
    pub algorithms: Vec<AlgSpec>,
    pub generator: GeneratorSpec,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub seed: u64,
    /// Exit nonzero when any ratio exceeds this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_ceiling: Option<f64>,
}

fn default_trials() -> usize {
    1
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub instance_id: String,
    pub flavor: String,
    pub algorithm: String,
    pub seed: u64,
    pub trials: usize,
    pub alg_gain: f64,
    pub alg_stderr: f64,
    pub opt_gain: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioReport {
    pub rows: Vec<RatioRow>,
    /// Worst (largest) ratio per algorithm over the family.
    pub worst: BTreeMap<String, f64>,
    pub config_seed: u64,
}

impl RatioReport {
    pub fn max_ratio(&self) -> f64 {
        self.worst.values().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)
            .map_err(|e| Error::BadConfig(format!("csv open: {e}")))?;
        w.write_record([
            "instance_id",
            "flavor",
            "algorithm",
            "seed",
            "trials",
            "alg_gain",
            "alg_stderr",
            "opt_gain",
            "ratio",
        ])
        .map_err(|e| Error::BadConfig(format!("csv: {e}")))?;
        for r in &self.rows {
            w.write_record([
                r.instance_id.clone(),
                r.flavor.clone(),
                r.algorithm.clone(),
                r.seed.to_string(),
                r.trials.to_string(),
                format!("{:.17e}", r.alg_gain),
                format!("{:.17e}", r.alg_stderr),
                format!("{:.17e}", r.opt_gain),
                format!("{:.17e}", r.ratio),
            ])
            .map_err(|e| Error::BadConfig(format!("csv: {e}")))?;
        }
        w.flush().map_err(|e| Error::BadConfig(format!("csv: {e}")))?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn generate_instances(config: &ExperimentConfig) -> Result<Vec<(String, Instance)>> {
    match &config.generator {
        GeneratorSpec::Random {
            n,
            steps,
            weights,
            count,
            monotone,
        } => {
            let mut out = Vec::with_capacity(*count);
            for i in 0..*count {
                let seed = derive_seed(config.seed, i as u64);
                let inst = random_instance(config.flavor, *n, *steps, weights, seed, *monotone)?;
                out.push((format!("random-{i:06}"), inst));
            }
            Ok(out)
        }
        GeneratorSpec::Exhaustive {
            max_items,
            max_steps,
            weights,
        } => {
            if *max_items > 8 || *max_steps > 8 {
                return Err(Error::BadConfig(
                    "exhaustive bounds capped at 8 items and 8 steps".into(),
                ));
            }
            let instances: Vec<Instance> = match config.flavor {
                Flavor::DynamicSet => {
                    families::dynamic_set_instances(*max_items, *max_steps, weights.clone())
                        .collect()
                }
                Flavor::DecrementalQueue => {
                    families::decremental_queue_instances(*max_items, *max_steps, weights.clone())
                        .collect()
                }
                Flavor::FifoQueue => {
                    families::fifo_queue_instances(*max_items, *max_steps, weights.clone())
                        .collect()
                }
                other => {
                    return Err(Error::BadConfig(format!(
                        "no exhaustive family for flavor {}",
                        other.name()
                    )))
                }
            };
            Ok(instances
                .into_iter()
                .enumerate()
                .map(|(i, inst)| (format!("exhaustive-{i:08}"), inst))
                .collect())
        }
        GeneratorSpec::Named { names, epsilon } => names
            .iter()
            .map(|name| Ok((name.clone(), named_instance(name, *epsilon)?)))
            .collect(),
        GeneratorSpec::Files { paths } => paths
            .iter()
            .map(|p| {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::BadConfig(format!("read {p}: {e}")))?;
                Ok((p.clone(), Instance::from_json(&text)?))
            })
            .collect(),
    }
}

fn run_row(
    id: &str,
    instance: &Instance,
    spec: &AlgSpec,
    row_seed: u64,
    trials: usize,
) -> Result<RatioRow> {
    let opt = optimal_gain_value(instance)?;
    let trials = if spec.randomized() { trials.max(1) } else { 1 };
    let mut sum = 0.0f64;
    let mut sumsq = 0.0f64;
    for trial in 0..trials {
        let mut alg = spec.build()?;
        let (_, g) = simulate(instance, alg.as_mut(), derive_seed(row_seed, trial as u64))?;
        sum += g;
        sumsq += g * g;
    }
    let mean = sum / trials as f64;
    let var = (sumsq / trials as f64 - mean * mean).max(0.0);
    let stderr = if trials > 1 {
        (var / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(RatioRow {
        instance_id: id.to_string(),
        flavor: instance.flavor.name().to_string(),
        algorithm: spec.name.clone(),
        seed: row_seed,
        trials,
        alg_gain: mean,
        alg_stderr: stderr,
        opt_gain: opt,
        ratio: whacamole_core::adversaries::ratio_of(opt, mean),
    })
}

/// Runs the configured experiment. Work items are independent; rows come
/// back sorted by (instance, algorithm) regardless of scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RatioReport> {
    for spec in &config.algorithms {
        spec.build()?; // surface unknown names before any work
    }
    let instances = generate_instances(config)?;
    let work: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..config.algorithms.len()).map(move |a| (i, a)))
        .collect();
    let rows: Result<Vec<RatioRow>> = work
        .par_iter()
        .map(|&(i, a)| {
            let (id, instance) = &instances[i];
            let spec = &config.algorithms[a];
            let row_seed = derive_seed(config.seed, (i as u64) << 8 | a as u64);
            run_row(id, instance, spec, row_seed, config.trials)
        })
        .collect();
    let mut rows = rows?;
    rows.sort_by(|x, y| {
        (x.instance_id.as_str(), x.algorithm.as_str())
            .cmp(&(y.instance_id.as_str(), y.algorithm.as_str()))
    });
    let mut worst = BTreeMap::new();
    for r in &rows {
        let w = worst.entry(r.algorithm.clone()).or_insert(f64::NEG_INFINITY);
        if r.ratio > *w {
            *w = r.ratio;
        }
    }
    Ok(RatioReport {
        rows,
        worst,
        config_seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            flavor: Flavor::DecrementalQueue,
            algorithms: vec![
                AlgSpec::named("greedy"),
                AlgSpec::named("decque-efh"),
                AlgSpec::named("unirand"),
            ],
            generator: GeneratorSpec::Random {
                n: 5,
                steps: 5,
                weights: WeightDist::Uniform { lo: 0.1, hi: 1.0 },
                count: 40,
                monotone: false,
            },
            trials: 16,
            seed: 7,
            ratio_ceiling: None,
        }
    }

    #[test]
    fn reports_are_replayable() {
        let config = small_config();
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.rows.len(), 40 * 3);
    }

    #[test]
    fn serial_and_parallel_runs_agree() {
        let config = small_config();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| run_experiment(&config)).unwrap();
        let parallel = run_experiment(&config).unwrap();
        assert_eq!(serial.to_json(), parallel.to_json());
    }

    #[test]
    fn ratios_never_fall_below_one() {
        let report = run_experiment(&small_config()).unwrap();
        for row in &report.rows {
            assert!(row.ratio >= 1.0 - 1e-12, "{row:?}");
            assert!(row.alg_gain <= row.opt_gain + 1e-12);
        }
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = small_config();
        let text = serde_json::to_string(&config).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.algorithms.len(), 3);
        assert_eq!(back.trials, 16);
    }

    #[test]
    fn named_generator_runs() {
        let config = ExperimentConfig {
            flavor: Flavor::FifoQueue,
            algorithms: vec![AlgSpec::named("fifoque-eh")],
            generator: GeneratorSpec::Named {
                names: vec!["fifo_tight_1".into(), "fifo_tight_2".into()],
                epsilon: 1e-3,
            },
            trials: 1,
            seed: 0,
            ratio_ceiling: Some(1.81),
        };
        let report = run_experiment(&config).unwrap();
        assert_eq!(report.rows.len(), 2);
        for row in &report.rows {
            assert!(row.ratio >= 1.8 - 5e-3, "{row:?}");
            assert!(row.ratio <= 1.8 + 1e-9, "{row:?}");
        }
    }

    #[test]
    fn unknown_algorithm_is_rejected_up_front() {
        let mut config = small_config();
        config.algorithms.push(AlgSpec::named("nope"));
        assert!(matches!(
            run_experiment(&config),
            Err(Error::UnknownName(_))
        ));
    }
}
