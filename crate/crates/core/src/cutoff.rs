//! Choice of the memory cutoff.
//!
//! Three policies: the largest cutoff that keeps the end-to-end fidelity
//! above a floor, the cutoff maximizing the secret-key rate at one distance,
//! and a single cutoff for a whole distance grid.
//!
//! Ties between finite cutoffs go to the smaller one. The unbounded cutoff
//! wins a tie with a positive optimum: in floating point `R(m)` equals
//! `R(inf)` exactly once `q^(m+1)` underflows, which would otherwise hide
//! the limit behind an arbitrary large `m`.

use std::cell::Cell;

use rayon::prelude::*;

use crate::error::{invariant, Error, Result};
use crate::params::LinkContext;
use crate::rates::{Cutoff, LinkModel};

/// Default cap on finite cutoffs considered by the SKR searches.
pub const DEFAULT_M_MAX_SEARCH: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeObjective {
    /// Maximize the minimum over the grid of `skr(L, m) / skr(L, m*_L)`.
    WorstCaseRatio,
    /// Maximize the mean of the same ratio.
    MeanRatio,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    FidelityFloor(f64),
    SkrOptimal,
    FixedOverRange(RangeObjective),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffChoice {
    /// `None` when no cutoff satisfies a fidelity floor.
    pub m: Option<Cutoff>,
    pub criterion: Criterion,
    /// Fidelity (floor), SKR (optimal) or objective value (fixed over range).
    /// For an unsatisfiable floor this is the fidelity at `m = 0`.
    pub achieved_value: f64,
}

/// Largest cutoff with fidelity at least `f_min`.
///
/// The fidelity is non-increasing in the cutoff, so an exponential search
/// followed by bisection finds the maximal cutoff exactly.
pub fn max_cutoff_for_fidelity(ctx: &LinkContext, f_min: f64) -> Result<CutoffChoice> {
    if !(f_min > 0.5 && f_min < 1.0) {
        return Err(invariant("f_min", f_min, "must lie in (1/2, 1)"));
    }
    let model = LinkModel::new(ctx)?;
    let fidelity = |m: u64| model.fidelity(Cutoff::Finite(m));
    let choice = |m: Option<Cutoff>, achieved_value| CutoffChoice {
        m,
        criterion: Criterion::FidelityFloor(f_min),
        achieved_value,
    };

    let f_inf = model.fidelity(Cutoff::Unbounded);
    if f_inf >= f_min {
        return Ok(choice(Some(Cutoff::Unbounded), f_inf));
    }
    let f0 = fidelity(0);
    if f0 < f_min {
        return Ok(choice(None, f0));
    }
    // fidelity(lo) >= f_min > fidelity(hi)
    let mut lo = 0u64;
    let mut hi = 1u64;
    while fidelity(hi) >= f_min {
        lo = hi;
        hi = hi.saturating_mul(2);
        if hi == u64::MAX {
            break;
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fidelity(mid) >= f_min {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(choice(Some(Cutoff::Finite(lo)), fidelity(lo)))
}

/// Cutoff in `0..=m_max_search` or unbounded maximizing the secret-key rate.
///
/// The search is exact: a block of cutoffs is skipped only when an upper
/// bound on its rates cannot beat the best value found so far.
pub fn optimal_cutoff_for_skr(ctx: &LinkContext, m_max_search: u64) -> Result<CutoffChoice> {
    if m_max_search < 1 {
        return Err(invariant("m_max_search", m_max_search, "must be at least 1"));
    }
    let model = LinkModel::new(ctx)?;
    let (m, achieved_value) = search_optimum(&model, m_max_search);
    Ok(CutoffChoice {
        m: Some(m),
        criterion: Criterion::SkrOptimal,
        achieved_value,
    })
}

fn search_optimum(model: &LinkModel, m_max_search: u64) -> (Cutoff, f64) {
    branch_and_bound(
        m_max_search,
        model.skr(Cutoff::Unbounded),
        |m, _| model.skr(Cutoff::Finite(m)),
        |a, b, _| model.skr_block_bound(a, b),
    )
}

/// Blocks at most this wide are scanned point by point.
const LEAF_WIDTH: u64 = 64;

/// Exact maximizer of an objective over `0..=m_max` and the unbounded cutoff.
///
/// `bound(a, b, best)` must bound the objective on `a..=b` from above;
/// `value(m, best)` and `bound` may return any number not above `best` once
/// they know the result cannot exceed it. Blocks are visited in increasing
/// order and a finite cutoff replaces the incumbent only when strictly
/// better, so ties go to the smaller cutoff and a positive unbounded value
/// wins ties against every finite one.
fn branch_and_bound<V, B>(m_max: u64, value_inf: f64, value: V, bound: B) -> (Cutoff, f64)
where
    V: Fn(u64, f64) -> f64,
    B: Fn(u64, u64, f64) -> f64,
{
    let mut best = if value_inf > 0.0 { value_inf } else { f64::NEG_INFINITY };
    let mut best_m: Option<u64> = None;
    let mut stack = vec![(0u64, m_max)];
    while let Some((lo, hi)) = stack.pop() {
        if bound(lo, hi, best) <= best {
            continue;
        }
        if hi - lo < LEAF_WIDTH {
            for m in lo..=hi {
                let v = value(m, best);
                if v > best {
                    best = v;
                    best_m = Some(m);
                }
            }
        } else {
            let mid = lo + (hi - lo) / 2;
            stack.push((mid + 1, hi));
            stack.push((lo, mid));
        }
    }
    match best_m {
        Some(m) => (Cutoff::Finite(m), best),
        None => (Cutoff::Unbounded, value_inf),
    }
}

/// Per-distance optima together with the single cutoff chosen for the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeOptimization {
    pub distances: Vec<f64>,
    pub per_distance: Vec<CutoffChoice>,
    pub fixed: CutoffChoice,
}

/// Single cutoff for a distance grid; see [`optimize_over_range`].
pub fn fixed_cutoff_over_range<F>(
    ctx_at: F,
    distances: &[f64],
    objective: RangeObjective,
    m_max_search: u64,
) -> Result<CutoffChoice>
where
    F: Fn(f64) -> Result<LinkContext> + Sync,
{
    optimize_over_range(ctx_at, distances, objective, m_max_search).map(|r| r.fixed)
}

/// Finds the per-distance SKR optima and the single cutoff maximizing the
/// range objective over `0..=m_max_search` and unbounded.
///
/// Distances where even the optimal rate is zero do not constrain the
/// choice. If every distance has a zero rate the choice is `m = 0`.
pub fn optimize_over_range<F>(
    ctx_at: F,
    distances: &[f64],
    objective: RangeObjective,
    m_max_search: u64,
) -> Result<RangeOptimization>
where
    F: Fn(f64) -> Result<LinkContext> + Sync,
{
    if distances.is_empty() {
        return Err(Error::EmptyGrid("distance grid"));
    }
    if m_max_search < 1 {
        return Err(invariant("m_max_search", m_max_search, "must be at least 1"));
    }
    let models = distances
        .par_iter()
        .map(|&l| LinkModel::new(&ctx_at(l)?))
        .collect::<Result<Vec<_>>>()?;
    let per_distance: Vec<CutoffChoice> = models
        .par_iter()
        .map(|model| {
            let (m, achieved_value) = search_optimum(model, m_max_search);
            CutoffChoice {
                m: Some(m),
                criterion: Criterion::SkrOptimal,
                achieved_value,
            }
        })
        .collect();

    let active: Vec<(LinkModel, f64)> = models
        .iter()
        .zip(&per_distance)
        .filter(|(_, c)| c.achieved_value > 0.0)
        .map(|(model, c)| (*model, c.achieved_value))
        .collect();

    let (m, achieved_value) = if active.is_empty() {
        (Cutoff::Finite(0), 1.0)
    } else {
        match objective {
            RangeObjective::WorstCaseRatio => search_worst_case(&active, m_max_search),
            RangeObjective::MeanRatio => search_mean(&active, m_max_search),
        }
    };
    Ok(RangeOptimization {
        distances: distances.to_vec(),
        per_distance,
        fixed: CutoffChoice {
            m: Some(m),
            criterion: Criterion::FixedOverRange(objective),
            achieved_value,
        },
    })
}

/// Minimum of `f` over the distances, stopping as soon as it drops to
/// `floor`. The distance that stopped it is tried first next time.
fn min_until(active: &[(LinkModel, f64)], killer: &Cell<usize>, floor: f64, f: impl Fn(&LinkModel, f64) -> f64) -> f64 {
    let first = killer.get();
    let mut worst = f(&active[first].0, active[first].1);
    if worst <= floor {
        return worst;
    }
    for (idx, (model, b)) in active.iter().enumerate() {
        if idx == first {
            continue;
        }
        worst = worst.min(f(model, *b));
        if worst <= floor {
            killer.set(idx);
            return worst;
        }
    }
    worst
}

fn search_worst_case(active: &[(LinkModel, f64)], m_max_search: u64) -> (Cutoff, f64) {
    let killer = Cell::new(0);
    let worst_inf = active
        .iter()
        .map(|(model, b)| model.skr(Cutoff::Unbounded) / b)
        .fold(f64::INFINITY, f64::min);
    branch_and_bound(
        m_max_search,
        worst_inf,
        |m, best| min_until(active, &killer, best, |model, b| model.skr(Cutoff::Finite(m)) / b),
        |lo, hi, best| min_until(active, &killer, best, |model, b| model.skr_block_bound(lo, hi) / b),
    )
}

fn search_mean(active: &[(LinkModel, f64)], m_max_search: u64) -> (Cutoff, f64) {
    let n = active.len() as f64;
    let mean = |f: &dyn Fn(&LinkModel) -> f64| active.iter().map(|(model, b)| f(model) / b).sum::<f64>() / n;
    branch_and_bound(
        m_max_search,
        mean(&|model| model.skr(Cutoff::Unbounded)),
        |m, _| mean(&|model| model.skr(Cutoff::Finite(m))),
        |lo, hi, _| mean(&|model| model.skr_block_bound(lo, hi)),
    )
}
