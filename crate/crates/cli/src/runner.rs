//! Disorder-ensemble experiments.
//!
//! All realizations of one disorder strength advance in lockstep, one step
//! at a time, on the rayon pool. Per-realization observables are gathered
//! into vectors indexed by realization and reduced sequentially in that
//! order, so every emitted number is independent of the worker count.

use std::collections::BTreeSet;

use rayon::prelude::*;

use qwalk_core::entanglement::{ensemble_density, negativity, state_entropy};
use qwalk_core::observables::{
    ensemble_occupation, flat_distribution, growth_exponent, mixing_ratio, msd, occupation,
    MsdSeries, ProbDist,
};
use qwalk_core::oracle::compare_with_engine;
use qwalk_core::{
    derive_seed, initial_state, sample_coin_field, CoinField, Geometry, GeometryKind, WalkState,
};

use crate::config::{ExperimentConfig, Observable};
use crate::error::{CliError, Result};
use crate::table::{ResultTable, Row};

/// Environment variable holding the worker count; unset or `0` means one
/// worker per available core.
pub const WORKERS_ENV: &str = "QWALK_WORKERS";

pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::config(format!("{WORKERS_ENV}: {e}"))),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(n) => Ok(Some(n)),
            Err(_) => Err(CliError::config(format!(
                "{WORKERS_ENV} must be a nonnegative integer, got {s:?}"
            ))),
        },
    }
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::config(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let geometry = config.lattice()?;
    let mut table = ResultTable::new();
    for (w_index, &w) in config.run.disorder.iter().enumerate() {
        table
            .rows
            .extend(run_disorder(config, &geometry, w_index, w)?);
    }
    table.check_finite()?;
    Ok(table)
}

pub fn run_experiment_with_workers(
    config: &ExperimentConfig,
    workers: Option<usize>,
) -> Result<ResultTable> {
    with_workers(workers, || run_experiment(config))?
}

/// Oracle comparison rows `oracle_max_abs_diff` at each configured time.
pub fn run_oracle(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let mut times = config.oracle.times.clone();
    times.sort_unstable();
    times.dedup();
    let rows = times
        .par_iter()
        .map(|&t| {
            let diff = compare_with_engine(t, config.quad_points(t)).map_err(|source| {
                CliError::Numeric {
                    disorder: 0.0,
                    time: t,
                    observable: "oracle",
                    source,
                }
            })?;
            Ok(Row {
                disorder: 0.0,
                t,
                observable: "oracle_max_abs_diff".into(),
                value: diff,
                std_error: None,
                realizations: 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResultTable { rows })
}

/// The states of one realization at the requested times.
pub fn simulate_single(
    config: &ExperimentConfig,
    w_index: usize,
    realization: usize,
) -> Result<Vec<WalkState>> {
    config.validate()?;
    let w = *config.run.disorder.get(w_index).ok_or_else(|| {
        CliError::config(format!(
            "W index {w_index} out of range for {} disorder strengths",
            config.run.disorder.len()
        ))
    })?;
    if realization >= config.run.realizations {
        return Err(CliError::config(format!(
            "realization {realization} out of range for {} realizations",
            config.run.realizations
        )));
    }
    let geometry = config.lattice()?;
    let sim = |source| CliError::Simulation {
        disorder: w,
        realization,
        source,
    };
    let seed = derive_seed(config.run.master_seed, w_index as u32, realization as u32);
    let field = sample_coin_field(&geometry, w, seed).map_err(sim)?;
    qwalk_core::evolve(
        initial_state(&geometry),
        &field,
        config.run.steps,
        &config.snapshot_times(),
    )
    .map_err(sim)
}

#[derive(Default, Clone, Copy)]
struct Sample {
    p0: f64,
    fidelity: f64,
    mixing: f64,
    msd: f64,
    ee: f64,
}

struct Stats {
    mean: f64,
    std_error: Option<f64>,
}

/// Mean and standard error of the mean, summed in slice order.
fn stats(values: impl Iterator<Item = f64> + Clone) -> Stats {
    let n = values.clone().count();
    let mean = values.clone().sum::<f64>() / n as f64;
    let std_error = (n >= 2).then(|| {
        let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    });
    Stats { mean, std_error }
}

struct Recorder<'a> {
    w: f64,
    n: usize,
    rows: &'a mut Vec<Row>,
}

impl Recorder<'_> {
    fn push(&mut self, t: usize, observable: impl Into<String>, s: Stats) {
        self.rows.push(Row {
            disorder: self.w,
            t,
            observable: observable.into(),
            value: s.mean,
            std_error: s.std_error,
            realizations: self.n,
        });
    }
}

fn run_disorder(
    config: &ExperimentConfig,
    geometry: &Geometry,
    w_index: usize,
    w: f64,
) -> Result<Vec<Row>> {
    let n = config.run.realizations;
    let steps = config.run.steps;
    let sim = |realization: usize| {
        move |source| CliError::Simulation {
            disorder: w,
            realization,
            source,
        }
    };
    let fields: Vec<CoinField> = (0..n)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(config.run.master_seed, w_index as u32, i as u32);
            sample_coin_field(geometry, w, seed).map_err(sim(i))
        })
        .collect::<Result<_>>()?;
    let mut states = vec![initial_state(geometry); n];

    let want = |o| config.wants(o);
    let scalars = [
        Observable::P0,
        Observable::Fidelity,
        Observable::Mixing,
        Observable::Msd,
        Observable::Sigma,
        Observable::Ee,
    ]
    .into_iter()
    .any(want);
    let hadamard = CoinField::hadamard(geometry);
    let mut reference = initial_state(geometry);
    let snapshots: BTreeSet<usize> = config.snapshot_times().into_iter().collect();
    let is_line = geometry.kind() == GeometryKind::Line;

    let mut rows = Vec::new();
    let mut msd_series = MsdSeries {
        times: Vec::new(),
        msd: Vec::new(),
        disorder: w,
    };
    for t in 0..=steps {
        let mut rec = Recorder {
            w,
            n,
            rows: &mut rows,
        };
        if scalars && config.is_scalar_time(t) {
            let flat = flat_distribution(geometry, t);
            let samples: Vec<Sample> = states
                .par_iter()
                .map(|s| -> qwalk_core::Result<Sample> {
                    let d = occupation(s);
                    let mut out = Sample {
                        p0: d.p[geometry.origin()],
                        msd: msd(&d),
                        ..Sample::default()
                    };
                    if want(Observable::Fidelity) {
                        out.fidelity = s.inner(&reference)?.norm_sqr();
                    }
                    if want(Observable::Mixing) {
                        out.mixing = mixing_ratio(&d, &flat)?;
                    }
                    if want(Observable::Ee) {
                        out.ee = state_entropy(s)?;
                    }
                    Ok(out)
                })
                .collect::<Vec<_>>()
                .into_iter()
                .collect::<qwalk_core::Result<_>>()
                .map_err(|source| CliError::Numeric {
                    disorder: w,
                    time: t,
                    observable: "scalar observables",
                    source,
                })?;
            let col = |f: fn(&Sample) -> f64| samples.iter().map(f);
            if want(Observable::P0) && (!is_line || t % 2 == 0) {
                rec.push(t, "p0", stats(col(|s| s.p0)));
            }
            if want(Observable::Fidelity) {
                rec.push(t, "fidelity", stats(col(|s| s.fidelity)));
            }
            if want(Observable::Mixing) {
                rec.push(t, "mixing", stats(col(|s| s.mixing)));
                let p = ensemble_occupation(&states).expect("states share geometry and time");
                let m = mixing_ratio(&p, &flat).expect("flat matches the ensemble");
                rec.push(
                    t,
                    "mixing_ensemble",
                    Stats {
                        mean: m,
                        std_error: None,
                    },
                );
            }
            let msd_stats = stats(col(|s| s.msd));
            if t > 0 {
                msd_series.times.push(t);
                msd_series.msd.push(msd_stats.mean);
            }
            if want(Observable::Msd) {
                rec.push(t, "msd", msd_stats);
            }
            if want(Observable::Ee) {
                rec.push(t, "ee", stats(col(|s| s.ee)));
            }
        }
        if snapshots.contains(&t) {
            if want(Observable::Negativity) {
                let numeric = |source| CliError::Numeric {
                    disorder: w,
                    time: t,
                    observable: "negativity",
                    source,
                };
                let rho = ensemble_density(&states).map_err(numeric)?;
                let value = negativity(&rho).map_err(numeric)?;
                rec.push(
                    t,
                    "negativity",
                    Stats {
                        mean: value,
                        std_error: None,
                    },
                );
            }
            if want(Observable::Occupation) {
                push_occupation(&mut rec, t, geometry, &states);
            }
        }
        if t == steps {
            break;
        }
        let outcomes: Vec<qwalk_core::Result<()>> = states
            .par_iter_mut()
            .zip(fields.par_iter())
            .map(|(s, f)| s.step(f))
            .collect();
        if let Some((i, Err(e))) = outcomes.into_iter().enumerate().find(|(_, r)| r.is_err()) {
            return Err(sim(i)(e));
        }
        if want(Observable::Fidelity) {
            reference.step(&hadamard).map_err(sim(0))?;
        }
    }

    if want(Observable::Sigma) {
        let smoothing = config.analysis.smoothing.to_smoothing();
        let sigma =
            growth_exponent(&msd_series, smoothing).map_err(|source| CliError::Numeric {
                disorder: w,
                time: steps,
                observable: "sigma",
                source,
            })?;
        rows.extend(
            sigma
                .into_iter()
                .filter(|&(t, _)| t >= config.analysis.sigma_min_time)
                .map(|(t, s)| Row {
                    disorder: w,
                    t,
                    observable: "sigma".into(),
                    value: s,
                    std_error: None,
                    realizations: n,
                }),
        );
        rows.sort_by_key(|r| r.t);
    }
    Ok(rows)
}

/// Ensemble occupation with per-site standard errors as `occupation[x]`.
fn push_occupation(rec: &mut Recorder<'_>, t: usize, geometry: &Geometry, states: &[WalkState]) {
    let per: Vec<ProbDist> = states.iter().map(occupation).collect();
    for i in 0..geometry.sites() {
        let x = geometry.position(i);
        rec.push(
            t,
            format!("occupation[{x}]"),
            stats(per.iter().map(|d| d.p[i])),
        );
    }
}
