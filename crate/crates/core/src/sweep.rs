//! Distance sweeps: rate curves with their benchmark lines, and where a
//! curve enters the repeater regime.
//!
//! Every rate is per channel use and per mode. SKR rows hold
//! `raw_rate / 2 * fraction`; RR rows hold `raw_rate / 2` at the largest
//! cutoff meeting the fidelity floor, or nothing when no cutoff does.

use std::fmt;

use rayon::prelude::*;

use crate::channel::{to_decibel, BenchmarkPoint, Decibel};
use crate::cutoff::{max_cutoff_for_fidelity, optimize_over_range, CutoffChoice, RangeObjective};
use crate::error::{Error, Result};
use crate::params::{resolve_context, ChannelParams, Era, PlatformParams, ProtocolKind, ProtocolSpec};
use crate::rates::{Cutoff, LinkModel};

pub const DEFAULT_L_MIN_KM: f64 = 2.0;
pub const DEFAULT_L_MAX_KM: f64 = 400.0;
pub const DEFAULT_L_STEP_KM: f64 = 2.0;
pub const DEFAULT_F_MIN: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffPolicy {
    /// One cutoff for the whole grid.
    FixedOverRange(RangeObjective),
    PerDistanceOptimal,
    /// A cutoff given by the caller.
    Constant(Cutoff),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepMode {
    Skr(CutoffPolicy),
    Rr { f_min: f64 },
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepMode::Skr(CutoffPolicy::FixedOverRange(RangeObjective::WorstCaseRatio)) => {
                f.write_str("skr-fixed-cutoff(worst-case-ratio)")
            }
            SweepMode::Skr(CutoffPolicy::FixedOverRange(RangeObjective::MeanRatio)) => {
                f.write_str("skr-fixed-cutoff(mean-ratio)")
            }
            SweepMode::Skr(CutoffPolicy::PerDistanceOptimal) => f.write_str("skr-optimal-cutoff"),
            SweepMode::Skr(CutoffPolicy::Constant(m)) => write!(f, "skr-cutoff({m})"),
            SweepMode::Rr { f_min } => write!(f, "rr-fidelity-floor({f_min})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub distance_km: f64,
    /// `None` for an RR row whose fidelity floor cannot be met.
    pub cutoff: Option<Cutoff>,
    pub rate: Option<f64>,
    pub fidelity: Option<f64>,
    pub e_x: Option<f64>,
    pub benchmark: BenchmarkPoint,
}

impl SweepRow {
    pub fn rate_db(&self) -> Option<Decibel> {
        self.rate.map(to_decibel)
    }

    /// Rate strictly above the ideal repeaterless bound.
    pub fn exceeds_ideal(&self) -> bool {
        matches!((self.rate, self.benchmark.ideal_bound), (Some(r), Some(b)) if r > b)
    }

    pub fn exceeds_realistic(&self) -> bool {
        matches!(self.rate, Some(r) if r > self.benchmark.realistic_ppl)
    }
}

/// First distances where a curve exceeds the two benchmarks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub ideal_crossing_km: Option<f64>,
    pub realistic_crossing_km: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub platform: String,
    pub protocol: ProtocolKind,
    pub era: Era,
    pub mode: SweepMode,
    pub rows: Vec<SweepRow>,
    /// The grid-wide cutoff, for the fixed-over-range policy.
    pub fixed_cutoff: Option<CutoffChoice>,
    pub regime: RegimeReport,
}

/// `lmin, lmin + lstep, ...` up to `lmax` inclusive.
pub fn distance_grid(l_min: f64, l_max: f64, l_step: f64) -> Result<Vec<f64>> {
    if !(l_min >= 0.0 && l_max >= l_min && l_step > 0.0 && l_max.is_finite()) {
        return Err(Error::InvalidGrid);
    }
    let n = ((l_max - l_min) / l_step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| l_min + i as f64 * l_step).collect())
}

/// 2 km to 400 km in steps of 2 km.
pub fn default_grid() -> Vec<f64> {
    distance_grid(DEFAULT_L_MIN_KM, DEFAULT_L_MAX_KM, DEFAULT_L_STEP_KM).expect("valid default grid")
}

fn check_grid(distances: &[f64]) -> Result<()> {
    if distances.is_empty() {
        return Err(Error::EmptyGrid("distance grid"));
    }
    if distances.iter().any(|l| !(*l >= 0.0 && l.is_finite())) || distances.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid);
    }
    Ok(())
}

/// Secret-key rate curve of one platform and protocol.
pub fn sweep_skr(
    platform: &PlatformParams,
    protocol: &ProtocolSpec,
    channel: &ChannelParams,
    distances: &[f64],
    policy: CutoffPolicy,
    m_max_search: u64,
) -> Result<SweepResult> {
    check_grid(distances)?;
    let ctx_at = |l: f64| resolve_context(platform, protocol, channel, l);

    let (cutoffs, fixed_cutoff): (Vec<Cutoff>, Option<CutoffChoice>) = match policy {
        CutoffPolicy::Constant(m) => (vec![m; distances.len()], None),
        CutoffPolicy::FixedOverRange(objective) => {
            let opt = optimize_over_range(ctx_at, distances, objective, m_max_search)?;
            let m = opt.fixed.m.expect("range optimization always picks a cutoff");
            (vec![m; distances.len()], Some(opt.fixed))
        }
        CutoffPolicy::PerDistanceOptimal => {
            let opt = optimize_over_range(ctx_at, distances, RangeObjective::WorstCaseRatio, m_max_search)?;
            let per = opt
                .per_distance
                .iter()
                .map(|c| c.m.expect("SKR optimum always exists"))
                .collect();
            (per, None)
        }
    };

    let rows = distances
        .par_iter()
        .zip(cutoffs.par_iter())
        .map(|(&l, &m)| {
            let point = LinkModel::new(&ctx_at(l)?)?.point(m);
            Ok(SweepRow {
                distance_km: l,
                cutoff: Some(m),
                rate: Some(point.skr_per_use_per_mode),
                fidelity: Some(point.fidelity),
                e_x: Some(point.e_x),
                benchmark: BenchmarkPoint::new(l, channel.l_att_km, platform.p_link),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(finish(platform, protocol, SweepMode::Skr(policy), rows, fixed_cutoff))
}

/// High-fidelity raw-rate curve: at each distance the largest cutoff whose
/// fidelity is at least `f_min`.
pub fn sweep_rr(
    platform: &PlatformParams,
    protocol: &ProtocolSpec,
    channel: &ChannelParams,
    distances: &[f64],
    f_min: f64,
) -> Result<SweepResult> {
    check_grid(distances)?;
    let rows = distances
        .par_iter()
        .map(|&l| {
            let ctx = resolve_context(platform, protocol, channel, l)?;
            let choice = max_cutoff_for_fidelity(&ctx, f_min)?;
            let benchmark = BenchmarkPoint::new(l, channel.l_att_km, platform.p_link);
            let row = match choice.m {
                Some(m) => {
                    let point = LinkModel::new(&ctx)?.point(m);
                    SweepRow {
                        distance_km: l,
                        cutoff: Some(m),
                        rate: Some(point.raw_rate / ctx.n_modes as f64),
                        fidelity: Some(point.fidelity),
                        e_x: Some(point.e_x),
                        benchmark,
                    }
                }
                None => SweepRow {
                    distance_km: l,
                    cutoff: None,
                    rate: None,
                    fidelity: None,
                    e_x: None,
                    benchmark,
                },
            };
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(platform, protocol, SweepMode::Rr { f_min }, rows, None))
}

fn finish(
    platform: &PlatformParams,
    protocol: &ProtocolSpec,
    mode: SweepMode,
    rows: Vec<SweepRow>,
    fixed_cutoff: Option<CutoffChoice>,
) -> SweepResult {
    let mut result = SweepResult {
        platform: platform.name.clone(),
        protocol: protocol.kind(),
        era: platform.era,
        mode,
        rows,
        fixed_cutoff,
        regime: RegimeReport {
            ideal_crossing_km: None,
            realistic_crossing_km: None,
        },
    };
    result.regime = classify_regime(&result);
    result
}

/// First distance where the curve rises above each benchmark, interpolated
/// linearly in dB between the last grid point below and the first above.
pub fn classify_regime(sweep: &SweepResult) -> RegimeReport {
    let ideal = first_crossing(&sweep.rows, |row| row.benchmark.ideal_bound);
    let realistic = first_crossing(&sweep.rows, |row| Some(row.benchmark.realistic_ppl));
    RegimeReport {
        ideal_crossing_km: ideal,
        realistic_crossing_km: realistic,
    }
}

fn first_crossing(rows: &[SweepRow], bound: impl Fn(&SweepRow) -> Option<f64>) -> Option<f64> {
    // rate minus bound in dB, where both are finite
    let gap = |row: &SweepRow| -> Option<f64> {
        let rate = to_decibel(row.rate?);
        let bound = to_decibel(bound(row)?);
        match (rate, bound) {
            (Decibel::Finite(r), Decibel::Finite(b)) => Some(r - b),
            _ => None,
        }
    };
    let above = |row: &SweepRow| matches!((row.rate, bound(row)), (Some(r), Some(b)) if r > b);
    let idx = rows.iter().position(above)?;
    if idx == 0 {
        return Some(rows[0].distance_km);
    }
    let (prev, cur) = (&rows[idx - 1], &rows[idx]);
    match (gap(prev), gap(cur)) {
        (Some(g0), Some(g1)) if g1 > g0 => {
            let t = (-g0 / (g1 - g0)).clamp(0.0, 1.0);
            Some(prev.distance_km + t * (cur.distance_km - prev.distance_km))
        }
        _ => Some(cur.distance_km),
    }
}

/// Least-squares slope of the rate in dB per km over `[l_lo, l_hi]`,
/// using rows with a finite dB value. `None` with fewer than two rows.
pub fn fitted_db_slope(sweep: &SweepResult, l_lo: f64, l_hi: f64) -> Option<f64> {
    let points: Vec<(f64, f64)> = sweep
        .rows
        .iter()
        .filter(|r| r.distance_km >= l_lo && r.distance_km <= l_hi)
        .filter_map(|r| match r.rate_db()? {
            Decibel::Finite(db) => Some((r.distance_km, db)),
            _ => None,
        })
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    Some(sxy / sxx)
}

/// dB-per-km slope of `sqrt(eta)`.
pub fn sqrt_eta_slope_db_per_km(l_att_km: f64) -> f64 {
    -10.0 * std::f64::consts::LOG10_E / (2.0 * l_att_km)
}
