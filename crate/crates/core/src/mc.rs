//! Monte Carlo simulation of the cutoff-restart protocol.
//!
//! Each time step both half-links attempt once. When exactly one succeeds,
//! its memory waits while the other keeps attempting; if the other half-link
//! has not succeeded within `m` further steps both memories are reset and
//! the next step starts from scratch. One time step is one channel use.
//!
//! Trials are split into fixed-size partitions. Partition `k` draws from
//! ChaCha8 stream `k` of the seed, and partition statistics are merged in
//! partition order, so estimates do not depend on the number of threads.

use std::fmt::{self, Write as _};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;

use crate::error::{invariant, Error, Result};
use crate::params::LinkContext;
use crate::rates::{Cutoff, LinkModel};

pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000_000;
pub const DEFAULT_PARTITION_SIZE: u64 = 10_000;
/// `|z|` below which an analytic value counts as reproduced.
pub const Z_THRESHOLD: f64 = 4.0;

/// The simulated link, in dimensionless form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSimulation {
    pub p: f64,
    pub cutoff: Cutoff,
    pub t0_ms: f64,
    pub tau_coh_ms: f64,
    pub extra_units: u32,
}

impl CellSimulation {
    pub fn from_context(ctx: &LinkContext, cutoff: Cutoff) -> Self {
        CellSimulation {
            p: ctx.p,
            cutoff,
            t0_ms: ctx.t0_ms,
            tau_coh_ms: ctx.tau_coh_ms,
            extra_units: ctx.extra_units,
        }
    }

    fn dephasing_ratio(&self) -> f64 {
        if self.tau_coh_ms.is_infinite() {
            0.0
        } else {
            self.t0_ms / self.tau_coh_ms
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stepping {
    /// Two Bernoulli draws per time step.
    PerStep,
    /// Skips runs of failed steps with geometric draws; same process.
    #[default]
    EventSkip,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub step_budget: u64,
    pub partition_size: u64,
    pub stepping: Stepping,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            step_budget: DEFAULT_STEP_BUDGET,
            partition_size: DEFAULT_PARTITION_SIZE,
            stepping: Stepping::default(),
        }
    }
}

/// Outcome of one trial: channel uses until success and the final wait.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub steps: u64,
    pub waited: u64,
}

/// Samples a trial; `None` if it would exceed `max_steps`.
pub fn run_trial<R: Rng>(cell: &CellSimulation, stepping: Stepping, max_steps: u64, rng: &mut R) -> Option<TrialOutcome> {
    match stepping {
        Stepping::PerStep => run_trial_per_step(cell, max_steps, rng),
        Stepping::EventSkip => run_trial_event_skip(cell, max_steps, rng),
    }
}

fn run_trial_per_step<R: Rng>(cell: &CellSimulation, max_steps: u64, rng: &mut R) -> Option<TrialOutcome> {
    let p = cell.p;
    let mut steps = 0u64;
    // (left side is the loaded one, steps waited so far)
    let mut loaded: Option<(bool, u64)> = None;
    loop {
        if steps >= max_steps {
            return None;
        }
        steps += 1;
        let left = rng.random_bool(p);
        let right = rng.random_bool(p);
        match loaded {
            None => match (left, right) {
                (true, true) => return Some(TrialOutcome { steps, waited: 0 }),
                // with m = 0 a lone success is discarded at once
                _ if cell.cutoff == Cutoff::Finite(0) => {}
                (true, false) => loaded = Some((true, 0)),
                (false, true) => loaded = Some((false, 0)),
                (false, false) => {}
            },
            Some((left_loaded, waited)) => {
                // the loaded side keeps attempting, but its outcome is ignored
                let waited = waited + 1;
                let pending_succeeded = if left_loaded { right } else { left };
                if pending_succeeded {
                    return Some(TrialOutcome { steps, waited });
                }
                loaded = match cell.cutoff {
                    Cutoff::Finite(m) if waited >= m => None,
                    _ => Some((left_loaded, waited)),
                };
            }
        }
    }
}

fn run_trial_event_skip<R: Rng>(cell: &CellSimulation, max_steps: u64, rng: &mut R) -> Option<TrialOutcome> {
    let p = cell.p;
    let q = 1.0 - p;
    let any = Geometric::new(1.0 - q * q).expect("1 - q^2 in (0, 1]");
    let other = Geometric::new(p).expect("p in (0, 1]");
    let both_given_any = p / (2.0 - p);
    let mut steps = 0u64;
    loop {
        // failed steps before the first step where at least one half-link succeeds
        steps = steps.saturating_add(any.sample(rng)).saturating_add(1);
        if steps > max_steps {
            return None;
        }
        if rng.random::<f64>() < both_given_any {
            return Some(TrialOutcome { steps, waited: 0 });
        }
        let wait = other.sample(rng).saturating_add(1);
        match cell.cutoff {
            Cutoff::Finite(m) if wait > m => steps = steps.saturating_add(m),
            _ => {
                steps = steps.saturating_add(wait);
                return (steps <= max_steps).then_some(TrialOutcome { steps, waited: wait });
            }
        }
    }
}

/// Running mean and sum of squared deviations; merges associatively.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&self, other: &Moments) -> Moments {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64 / n as f64),
        }
    }

    /// Sample variance; infinite for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            f64::INFINITY
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct TrialStats {
    steps: Moments,
    weight: Moments,
    fidelity_weight: Moments,
}

impl TrialStats {
    fn merge(&self, other: &TrialStats) -> TrialStats {
        TrialStats {
            steps: self.steps.merge(&other.steps),
            weight: self.weight.merge(&other.weight),
            fidelity_weight: self.fidelity_weight.merge(&other.fidelity_weight),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// `(reference - value) / stderr`; zero when both agree to rounding.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = reference - self.value;
        if diff.abs() <= 1e-12 * reference.abs().max(1.0) || self.stderr.is_infinite() {
            0.0
        } else if self.stderr > 0.0 {
            diff / self.stderr
        } else {
            diff.signum() * f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Trials per channel use, `1 / mean steps`.
    pub raw_rate: Estimate,
    pub expectation: Estimate,
    pub fidelity: Estimate,
    pub mean_attempts: Estimate,
    pub trials: u64,
    pub seed: u64,
}

/// Simulates `trials` independent successful distributions.
pub fn simulate_cell(cell: &CellSimulation, trials: u64, seed: u64, config: &McConfig) -> Result<McEstimate> {
    if !(cell.p > 0.0 && cell.p <= 1.0) {
        return Err(invariant("p", cell.p, "must lie in (0, 1]"));
    }
    if trials == 0 {
        return Err(invariant("trials", trials, "must be at least 1"));
    }
    if cell.t0_ms.is_nan() || cell.t0_ms <= 0.0 || cell.tau_coh_ms.is_nan() || cell.tau_coh_ms <= 0.0 {
        return Err(invariant("t0_ms", cell.t0_ms, "t0 and tau_coh must be positive"));
    }
    let partition_size = config.partition_size.max(1);
    let partitions = trials.div_ceil(partition_size);
    let ratio = cell.dephasing_ratio();

    let per_partition: Vec<Result<TrialStats>> = (0..partitions)
        .into_par_iter()
        .map(|k| {
            let n = partition_size.min(trials - k * partition_size);
            let budget = ((config.step_budget as u128 * n as u128) / trials as u128).max(1) as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let mut stats = TrialStats::default();
            let mut used = 0u64;
            for _ in 0..n {
                let outcome = run_trial(cell, config.stepping, budget - used, &mut rng)
                    .ok_or(Error::BudgetExceeded { budget: config.step_budget })?;
                used += outcome.steps;
                let waited = outcome.waited as f64;
                stats.steps.push(outcome.steps as f64);
                stats.weight.push((-waited * ratio).exp());
                stats
                    .fidelity_weight
                    .push((-(waited + cell.extra_units as f64) * ratio).exp());
            }
            Ok(stats)
        })
        .collect();

    let mut total = TrialStats::default();
    for stats in per_partition {
        total = total.merge(&stats?);
    }
    let mean_steps = total.steps.mean;
    Ok(McEstimate {
        raw_rate: Estimate {
            value: 1.0 / mean_steps,
            // delta method on 1 / mean
            stderr: total.steps.stderr() / (mean_steps * mean_steps),
        },
        expectation: Estimate {
            value: total.weight.mean,
            stderr: total.weight.stderr(),
        },
        fidelity: Estimate {
            value: 0.5 * (1.0 + total.fidelity_weight.mean),
            stderr: 0.5 * total.fidelity_weight.stderr(),
        },
        mean_attempts: Estimate {
            value: mean_steps,
            stderr: total.steps.stderr(),
        },
        trials,
        seed,
    })
}

/// One point of a validation grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub p: f64,
    pub cutoff: Cutoff,
    /// `T0 / tau_coh`.
    pub dephasing_ratio: f64,
}

/// The 4 x 5 x 2 grid used for acceptance and as the CLI default.
pub fn default_validation_grid() -> Vec<GridPoint> {
    let mut grid = Vec::new();
    for p in [0.05, 0.2, 0.5, 0.9] {
        for m in [0u64, 1, 2, 5, 20] {
            for ratio in [0.01, 0.3] {
                grid.push(GridPoint {
                    p,
                    cutoff: Cutoff::Finite(m),
                    dephasing_ratio: ratio,
                });
            }
        }
    }
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub point: GridPoint,
    pub analytic_raw_rate: f64,
    pub analytic_expectation: f64,
    pub analytic_fidelity: f64,
    pub estimate: McEstimate,
    pub z_raw_rate: f64,
    pub z_expectation: f64,
    pub z_fidelity: f64,
}

impl ComparisonRow {
    pub fn max_abs_z(&self) -> f64 {
        self.z_raw_rate.abs().max(self.z_expectation.abs()).max(self.z_fidelity.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub extra_units: u32,
    pub trials: u64,
    pub seed: u64,
    pub threshold: f64,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.max_abs_z() < self.threshold)
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        writeln!(
            out,
            "# trials={} seed={} extra_units={} threshold={}",
            self.trials, self.seed, self.extra_units, self.threshold
        )?;
        writeln!(
            out,
            "{:>8} {:>9} {:>8} {:>12} {:>12} {:>8} {:>12} {:>12} {:>8} {:>12} {:>12} {:>8}",
            "p", "m", "t0/tcoh", "R_analytic", "R_mc", "z_R", "E_analytic", "E_mc", "z_E", "F_analytic", "F_mc", "z_F"
        )?;
        for r in &self.rows {
            writeln!(
                out,
                "{:>8} {:>9} {:>8} {:>12.6e} {:>12.6e} {:>8.3} {:>12.9} {:>12.9} {:>8.3} {:>12.9} {:>12.9} {:>8.3}",
                r.point.p,
                r.point.cutoff.to_string(),
                r.point.dephasing_ratio,
                r.analytic_raw_rate,
                r.estimate.raw_rate.value,
                r.z_raw_rate,
                r.analytic_expectation,
                r.estimate.expectation.value,
                r.z_expectation,
                r.analytic_fidelity,
                r.estimate.fidelity.value,
                r.z_fidelity
            )?;
        }
        writeln!(out, "result: {}", if self.passed() { "PASS" } else { "FAIL" })?;
        f.write_str(&out)
    }
}

/// Seed of grid point `index`, so that points use unrelated streams.
fn point_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Simulates every grid point and scores the analytic values against it.
pub fn compare_with_analytic(
    grid: &[GridPoint],
    extra_units: u32,
    trials: u64,
    seed: u64,
    config: &McConfig,
) -> Result<ComparisonReport> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid("validation grid"));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for (index, point) in grid.iter().enumerate() {
        let ctx = LinkContext::from_ratio(point.p, point.dephasing_ratio, extra_units);
        let model = LinkModel::new(&ctx)?;
        let cell = CellSimulation::from_context(&ctx, point.cutoff);
        let estimate = simulate_cell(&cell, trials, point_seed(seed, index as u64), config)?;
        let analytic_raw_rate = model.raw_rate(point.cutoff);
        let analytic_expectation = model.expectation(point.cutoff);
        let analytic_fidelity = model.fidelity(point.cutoff);
        rows.push(ComparisonRow {
            point: *point,
            analytic_raw_rate,
            analytic_expectation,
            analytic_fidelity,
            z_raw_rate: estimate.raw_rate.z_score(analytic_raw_rate),
            z_expectation: estimate.expectation.z_score(analytic_expectation),
            z_fidelity: estimate.fidelity.z_score(analytic_fidelity),
            estimate,
        });
    }
    Ok(ComparisonReport {
        rows,
        extra_units,
        trials,
        seed,
        threshold: Z_THRESHOLD,
    })
}
