//! Waiting-time statistics, dephasing, raw rate and secret-key rate of a
//! single-node repeater link with a memory cutoff.
//!
//! Two half-links are attempted in parallel, each succeeding with
//! probability `p` per attempt. The memory loaded first waits `M` attempts
//! for the other one; if `M` would exceed the cutoff `m`, both memories are
//! reset and the procedure starts over. Dephasing during the wait leaves the
//! end-to-end state in a mixture of `|phi+>` and `|phi->` with weight
//! `1/2 (1 + exp(-M T0 / tau_coh))` on `|phi+>`.
//!
//! All closed forms are written in terms of `ln q = ln(1 - p)` and
//! `expm1`, so that large cutoffs with tiny `p` stay accurate.

use std::fmt;
use std::str::FromStr;

use crate::error::{invariant, Error, Result};
use crate::params::LinkContext;

/// Memory cutoff: the largest number of attempts a loaded memory may wait.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cutoff {
    Finite(u64),
    Unbounded,
}

impl Cutoff {
    pub fn finite(self) -> Option<u64> {
        match self {
            Cutoff::Finite(m) => Some(m),
            Cutoff::Unbounded => None,
        }
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::Finite(m) => write!(f, "{m}"),
            Cutoff::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl FromStr for Cutoff {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "unbounded" | "inf" => Ok(Cutoff::Unbounded),
            _ => s
                .parse::<u64>()
                .map(Cutoff::Finite)
                .map_err(|_| format!("invalid cutoff `{s}` (expected a non-negative integer or `unbounded`)")),
        }
    }
}

impl From<u64> for Cutoff {
    fn from(m: u64) -> Self {
        Cutoff::Finite(m)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p == 0.0 {
        return Err(Error::ZeroSuccessProbability);
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(invariant("p", p, "must lie in (0, 1]"));
    }
    Ok(())
}

/// `sum_{j=1}^{m} r^j` with `r = exp(ln_r)`, `r < 1`.
fn geometric_tail_sum(ln_r: f64, cutoff: Cutoff) -> f64 {
    if ln_r == f64::NEG_INFINITY {
        return 0.0;
    }
    let r = ln_r.exp();
    let one_minus_r = -ln_r.exp_m1();
    match cutoff {
        Cutoff::Finite(0) => 0.0,
        Cutoff::Finite(m) => r * (-(m as f64 * ln_r).exp_m1()) / one_minus_r,
        Cutoff::Unbounded => r / one_minus_r,
    }
}

/// Distribution of the waiting time `M = |X1 - X2|`, truncated at the
/// cutoff and renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct WaitingDistribution {
    p: f64,
    cutoff: Cutoff,
    ln_q: f64,
    /// Unnormalized mass of `0..=m`.
    norm: f64,
}

/// Truncated waiting-time distribution for half-link success probability `p`.
pub fn waiting_distribution(p: f64, cutoff: Cutoff) -> Result<WaitingDistribution> {
    check_p(p)?;
    let ln_q = (-p).ln_1p();
    let norm = p / (2.0 - p) * (1.0 + 2.0 * geometric_tail_sum(ln_q, cutoff));
    Ok(WaitingDistribution { p, cutoff, ln_q, norm })
}

impl WaitingDistribution {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    /// `P(M = j)` after truncation.
    pub fn mass(&self, j: u64) -> f64 {
        if let Cutoff::Finite(m) = self.cutoff {
            if j > m {
                return 0.0;
            }
        }
        let unnormalized = if j == 0 {
            self.p / (2.0 - self.p)
        } else if self.ln_q == f64::NEG_INFINITY {
            0.0
        } else {
            2.0 * self.p * (j as f64 * self.ln_q).exp() / (2.0 - self.p)
        };
        unnormalized / self.norm
    }

    /// Masses for `j = 0..=m`. For an unbounded cutoff the table stops once
    /// the remaining tail mass drops below `1e-16`.
    pub fn masses(&self) -> Vec<f64> {
        match self.cutoff {
            Cutoff::Finite(m) => (0..=m).map(|j| self.mass(j)).collect(),
            Cutoff::Unbounded => {
                let mut out = Vec::new();
                let mut total = 0.0;
                let mut j = 0;
                while 1.0 - total > 1e-16 && out.len() < 100_000_000 {
                    let w = self.mass(j);
                    if j > 0 && w == 0.0 {
                        break;
                    }
                    total += w;
                    out.push(w);
                    j += 1;
                }
                out
            }
        }
    }
}

/// Precomputed per-context quantities; every method is O(1) in the cutoff.
#[derive(Debug, Clone, Copy)]
pub struct LinkModel {
    ctx: LinkContext,
    ln_q: f64,
    /// `ln(q * exp(-T0 / tau_coh))`.
    ln_qa: f64,
    /// `1 - exp(-extra_units * T0 / tau_coh)`.
    constant_deficit: f64,
}

impl LinkModel {
    pub fn new(ctx: &LinkContext) -> Result<Self> {
        check_p(ctx.p)?;
        if !(ctx.t0_ms > 0.0 && ctx.t0_ms.is_finite()) {
            return Err(invariant("t0_ms", ctx.t0_ms, "must be positive and finite"));
        }
        if ctx.tau_coh_ms.is_nan() || ctx.tau_coh_ms <= 0.0 {
            return Err(invariant("tau_coh_ms", ctx.tau_coh_ms, "must be positive"));
        }
        if !(ctx.p_bm > 0.0 && ctx.p_bm <= 1.0) {
            return Err(invariant("p_bm", ctx.p_bm, "must lie in (0, 1]"));
        }
        if ctx.n_modes == 0 {
            return Err(invariant("n_modes", ctx.n_modes, "must be positive"));
        }
        let ratio = ctx.dephasing_ratio();
        let ln_q = (-ctx.p).ln_1p();
        Ok(LinkModel {
            ctx: *ctx,
            ln_q,
            ln_qa: ln_q - ratio,
            constant_deficit: -(-(ctx.extra_units as f64) * ratio).exp_m1(),
        })
    }

    pub fn context(&self) -> &LinkContext {
        &self.ctx
    }

    pub fn raw_rate(&self, cutoff: Cutoff) -> f64 {
        let p = self.ctx.p;
        // 1 - q^(m+1)
        let u = match cutoff {
            Cutoff::Finite(m) => -(((m + 1) as f64) * self.ln_q).exp_m1(),
            Cutoff::Unbounded => 1.0,
        };
        // p (2u - p) / (q + 2u - p), arranged so that every rounded step is
        // monotone in u; the cutoff searches rely on R never decreasing in m
        p / (1.0 + (1.0 - p) / (2.0 * u - p)) * self.ctx.p_bm
    }

    /// `E_m[exp(-M T0 / tau_coh)]`.
    pub fn expectation(&self, cutoff: Cutoff) -> f64 {
        1.0 - self.expectation_deficit(cutoff)
    }

    /// `1 - E_m`, computed without cancellation of the leading 1.
    fn expectation_deficit(&self, cutoff: Cutoff) -> f64 {
        let g_q = geometric_tail_sum(self.ln_q, cutoff);
        let g_qa = geometric_tail_sum(self.ln_qa, cutoff);
        (2.0 * (g_q - g_qa) / (1.0 + 2.0 * g_q)).max(0.0)
    }

    /// X-basis error rate `1/2 (1 - A E_m)`, clamped to `[0, 1/2]`.
    pub fn e_x(&self, cutoff: Cutoff) -> f64 {
        let deficit = self.expectation_deficit(cutoff);
        let e = 1.0 - deficit;
        (0.5 * (deficit + e * self.constant_deficit)).clamp(0.0, 0.5)
    }

    pub fn fidelity(&self, cutoff: Cutoff) -> f64 {
        1.0 - self.e_x(cutoff)
    }

    pub fn secret_fraction(&self, cutoff: Cutoff) -> f64 {
        secret_key_fraction(self.e_x(cutoff), 0.0)
    }

    /// Secret bits per channel use and per mode.
    pub fn skr(&self, cutoff: Cutoff) -> f64 {
        self.raw_rate(cutoff) / self.ctx.n_modes as f64 * self.secret_fraction(cutoff)
    }

    /// Upper bound on `skr(m)` for `lo <= m <= hi`: the raw rate grows with
    /// the cutoff and the secret fraction does not.
    pub fn skr_block_bound(&self, lo: u64, hi: u64) -> f64 {
        self.raw_rate(Cutoff::Finite(hi)) / self.ctx.n_modes as f64 * self.secret_fraction(Cutoff::Finite(lo))
    }

    pub fn point(&self, cutoff: Cutoff) -> RatePoint {
        let raw_rate = self.raw_rate(cutoff);
        let e_x = self.e_x(cutoff);
        let secret_fraction = secret_key_fraction(e_x, 0.0);
        RatePoint {
            distance_km: self.ctx.distance_km,
            cutoff,
            raw_rate,
            expectation_e: self.expectation(cutoff),
            fidelity: 1.0 - e_x,
            e_x,
            e_z: 0.0,
            secret_fraction,
            skr_per_use_per_mode: raw_rate / self.ctx.n_modes as f64 * secret_fraction,
        }
    }
}

/// Dephasing expectation over the truncated waiting-time distribution.
pub fn dephasing_expectation(p: f64, cutoff: Cutoff, t0_ms: f64, tau_coh_ms: f64) -> Result<f64> {
    let ctx = LinkContext {
        t0_ms,
        tau_coh_ms,
        ..LinkContext::from_ratio(p, 0.0, 0)
    };
    Ok(LinkModel::new(&ctx)?.expectation(cutoff))
}

/// Qubits distributed per channel use, including the final BM efficiency.
pub fn raw_rate(p: f64, cutoff: Cutoff, p_bm: f64) -> Result<f64> {
    let ctx = LinkContext {
        p_bm,
        ..LinkContext::from_ratio(p, 1.0, 0)
    };
    Ok(LinkModel::new(&ctx)?.raw_rate(cutoff))
}

/// `1/2 (1 + exp(-extra_units T0 / tau_coh) E_m)`.
pub fn effective_fidelity(p: f64, cutoff: Cutoff, t0_ms: f64, tau_coh_ms: f64, extra_units: u32) -> Result<f64> {
    let ctx = LinkContext {
        t0_ms,
        tau_coh_ms,
        ..LinkContext::from_ratio(p, 0.0, extra_units)
    };
    Ok(LinkModel::new(&ctx)?.fidelity(cutoff))
}

/// Binary entropy in bits; `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -(x * x.log2() + (1.0 - x) * (-x).ln_1p() / std::f64::consts::LN_2)
}

/// Asymptotic BB84 secret-key fraction `max(0, 1 - h(e_x) - h(e_z))`.
pub fn secret_key_fraction(e_x: f64, e_z: f64) -> f64 {
    let h = |e: f64| binary_entropy(e.clamp(0.0, 0.5));
    (1.0 - h(e_x) - h(e_z)).max(0.0)
}

/// One evaluation of the link at a given cutoff. Rates are per channel use;
/// `skr_per_use_per_mode` is additionally divided by the two modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub distance_km: f64,
    pub cutoff: Cutoff,
    pub raw_rate: f64,
    pub expectation_e: f64,
    pub fidelity: f64,
    pub e_x: f64,
    pub e_z: f64,
    pub secret_fraction: f64,
    pub skr_per_use_per_mode: f64,
}

pub fn evaluate(ctx: &LinkContext, cutoff: Cutoff) -> Result<RatePoint> {
    Ok(LinkModel::new(ctx)?.point(cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// `P(M = j)` by direct summation over the two geometric variables.
    fn brute_force_mass(p: f64, j: u64) -> f64 {
        let q = 1.0 - p;
        let mut total = 0.0;
        for k in 1..20_000u64 {
            let both = p * q.powi((k - 1) as i32) * p * q.powi((k - 1 + j) as i32);
            total += if j == 0 { both } else { 2.0 * both };
            if both < 1e-300 {
                break;
            }
        }
        total
    }

    /// Expected steps of the cutoff-restart process from its renewal equation.
    fn expected_steps(p: f64, m: Option<u64>) -> f64 {
        let q = 1.0 - p;
        match m {
            Some(m) => {
                let a: f64 = (1..=m).map(|i| i as f64 * p * q.powi(i as i32 - 1)).sum();
                let qm = q.powi(m as i32);
                (1.0 + 2.0 * p * q * (a + m as f64 * qm)) / (1.0 - q * q - 2.0 * p * q * qm)
            }
            None => (1.0 + 2.0 * q) / (1.0 - q * q),
        }
    }

    #[test]
    fn waiting_distribution_unbounded_by_hand() {
        let d = waiting_distribution(0.5, Cutoff::Unbounded).unwrap();
        assert_relative_eq!(d.mass(0), 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(d.mass(1), 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(d.mass(2), 1.0 / 6.0, max_relative = 1e-15);
        let total: f64 = d.masses().iter().sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn waiting_distribution_truncated_by_hand() {
        let d = waiting_distribution(0.5, Cutoff::Finite(1)).unwrap();
        assert_eq!(d.masses().len(), 2);
        assert_relative_eq!(d.mass(0), 0.5, max_relative = 1e-15);
        assert_relative_eq!(d.mass(1), 0.5, max_relative = 1e-15);
        assert_eq!(d.mass(2), 0.0);
    }

    #[test]
    fn waiting_distribution_certain_success() {
        for m in [Cutoff::Finite(0), Cutoff::Finite(7), Cutoff::Unbounded] {
            let d = waiting_distribution(1.0, m).unwrap();
            assert_eq!(d.mass(0), 1.0);
            assert_eq!(d.mass(1), 0.0);
        }
    }

    #[test]
    fn waiting_distribution_rejects_zero_p() {
        assert_eq!(waiting_distribution(0.0, Cutoff::Unbounded), Err(Error::ZeroSuccessProbability));
        assert!(waiting_distribution(1.5, Cutoff::Unbounded).is_err());
    }

    #[test]
    fn waiting_masses_match_brute_force() {
        for p in [0.01, 0.3, 0.9] {
            let d = waiting_distribution(p, Cutoff::Unbounded).unwrap();
            for j in [0, 1, 2, 5, 40] {
                assert_relative_eq!(d.mass(j), brute_force_mass(p, j), max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn expectation_examples() {
        assert_eq!(dephasing_expectation(0.3, Cutoff::Finite(12), 1.0, f64::INFINITY).unwrap(), 1.0);
        assert_eq!(dephasing_expectation(0.3, Cutoff::Finite(0), 1.0, 2.0).unwrap(), 1.0);
        let e = dephasing_expectation(0.5, Cutoff::Finite(1), 1.0, 1.0).unwrap();
        assert_relative_eq!(e, (1.0 + (-1.0f64).exp()) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(e, 0.683940, epsilon = 1e-6);
    }

    #[test]
    fn expectation_unbounded_closed_form() {
        for (p, ratio) in [(0.5, 1.0f64), (0.01, 0.001), (0.9, 3.0)] {
            let q: f64 = 1.0 - p;
            let a = (-ratio).exp();
            let expected = p / (2.0 - p) * (2.0 / (1.0 - q * a) - 1.0);
            let e = dephasing_expectation(p, Cutoff::Unbounded, ratio, 1.0).unwrap();
            assert_relative_eq!(e, expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn expectation_matches_distribution_masses() {
        for p in [0.01, 0.1, 0.5, 0.9] {
            for ratio in [0.001, 0.1, 1.0] {
                for m in [0u64, 1, 2, 10, 100, 1000] {
                    let d = waiting_distribution(p, Cutoff::Finite(m)).unwrap();
                    let direct: f64 = d
                        .masses()
                        .iter()
                        .enumerate()
                        .map(|(j, w)| w * (-(j as f64) * ratio).exp())
                        .sum();
                    let closed = dephasing_expectation(p, Cutoff::Finite(m), ratio, 1.0).unwrap();
                    assert!((direct - closed).abs() < 1e-10, "p={p} m={m} ratio={ratio}");
                }
            }
        }
    }

    #[test]
    fn raw_rate_examples() {
        for p in [0.01, 0.1, 0.5, 0.9] {
            assert_relative_eq!(raw_rate(p, Cutoff::Finite(0), 1.0).unwrap(), p * p, max_relative = 1e-12);
        }
        for m in [Cutoff::Finite(0), Cutoff::Finite(3), Cutoff::Unbounded] {
            assert_relative_eq!(raw_rate(1.0, m, 1.0).unwrap(), 1.0);
        }
        let r = raw_rate(0.5, Cutoff::Finite(2), 1.0).unwrap();
        assert_relative_eq!(r, 0.5 * 1.25 / 1.75, max_relative = 1e-14);
        assert_relative_eq!(raw_rate(0.5, Cutoff::Finite(2), 0.5).unwrap(), r / 2.0);
    }

    #[test]
    fn raw_rate_matches_renewal_oracle() {
        for p in [0.001, 0.05, 0.2, 0.5, 0.9] {
            for m in [0u64, 1, 2, 5, 20, 300] {
                let r = raw_rate(p, Cutoff::Finite(m), 1.0).unwrap();
                assert_relative_eq!(r, 1.0 / expected_steps(p, Some(m)), max_relative = 1e-9);
            }
            let r = raw_rate(p, Cutoff::Unbounded, 1.0).unwrap();
            assert_relative_eq!(r, 1.0 / expected_steps(p, None), max_relative = 1e-12);
        }
    }

    #[test]
    fn raw_rate_limits() {
        for p in [0.01, 0.1, 0.5, 0.9] {
            let limit = p * (2.0 - p) / (3.0 - 2.0 * p);
            assert!((raw_rate(p, Cutoff::Finite(10_000), 1.0).unwrap() - limit).abs() < 1e-8);
            assert_relative_eq!(raw_rate(p, Cutoff::Unbounded, 1.0).unwrap(), limit, max_relative = 1e-15);
        }
        let p = 1e-4;
        let ratio = raw_rate(p, Cutoff::Unbounded, 1.0).unwrap() / p;
        assert!((ratio - 2.0 / 3.0).abs() / (2.0 / 3.0) < 1e-3);
    }

    #[test]
    fn raw_rate_tiny_p_large_cutoff_is_stable() {
        let p = 1e-9;
        let r = raw_rate(p, Cutoff::Finite(1_000_000), 1.0).unwrap();
        // m p << 1: R ~ p^2 (1 + 2m)
        assert_relative_eq!(r, p * p * (1.0 + 2.0e6), max_relative = 1e-2);
        assert!(r > 0.0 && r.is_finite());
    }

    #[test]
    fn fidelity_examples() {
        assert_eq!(effective_fidelity(0.2, Cutoff::Unbounded, 1.0, f64::INFINITY, 2).unwrap(), 1.0);
        assert_eq!(effective_fidelity(0.2, Cutoff::Finite(0), 1.0, 3.0, 0).unwrap(), 1.0);
        let f = effective_fidelity(0.2, Cutoff::Finite(0), 0.5, 1.0, 2).unwrap();
        assert_relative_eq!(f, 0.5 * (1.0 + (-1.0f64).exp()), max_relative = 1e-14);
        assert_relative_eq!(f, 0.683940, epsilon = 1e-6);
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert_eq!(binary_entropy(0.5), 1.0);
        let x: f64 = 0.11;
        let direct = -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
        assert_relative_eq!(binary_entropy(x), direct, max_relative = 1e-14);
        assert_relative_eq!(binary_entropy(x), 0.49992, epsilon = 1e-5);
    }

    #[test]
    fn secret_fraction_values() {
        assert_eq!(secret_key_fraction(0.0, 0.0), 1.0);
        assert_eq!(secret_key_fraction(0.5, 0.0), 0.0);
        assert_relative_eq!(secret_key_fraction(0.11, 0.0), 0.50008, epsilon = 1e-5);
        assert_eq!(secret_key_fraction(0.3, 0.3), 0.0);
    }

    #[test]
    fn evaluate_perfect_half_links() {
        let ctx = LinkContext::from_ratio(1.0, 0.3, 0);
        let point = evaluate(&ctx, Cutoff::Unbounded).unwrap();
        assert_eq!(point.raw_rate, 1.0);
        assert_eq!(point.fidelity, 1.0);
        assert_eq!(point.skr_per_use_per_mode, 0.5);
    }

    #[test]
    fn evaluate_zero_cutoff_has_constant_dephasing_only() {
        let ctx = LinkContext::from_ratio(0.3, 0.05, 2);
        let point = evaluate(&ctx, Cutoff::Finite(0)).unwrap();
        let e_x = 0.5 * (1.0 - (-0.1f64).exp());
        assert_relative_eq!(point.e_x, e_x, max_relative = 1e-12);
        assert_relative_eq!(
            point.skr_per_use_per_mode,
            0.09 / 2.0 * secret_key_fraction(e_x, 0.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn evaluate_rejects_zero_p() {
        let ctx = LinkContext::from_ratio(0.0, 0.1, 0);
        assert_eq!(evaluate(&ctx, Cutoff::Finite(3)), Err(Error::ZeroSuccessProbability));
    }

    #[test]
    fn monotone_in_cutoff_on_grid() {
        for p in [0.01, 0.1, 0.5, 0.9] {
            let model = LinkModel::new(&LinkContext::from_ratio(p, 0.05, 0)).unwrap();
            for m in 0..50u64 {
                let (a, b) = (Cutoff::Finite(m), Cutoff::Finite(m + 1));
                assert!(model.raw_rate(b) >= model.raw_rate(a));
                assert!(model.expectation(b) <= model.expectation(a));
            }
        }
    }

    #[test]
    fn cutoff_parsing() {
        assert_eq!("unbounded".parse::<Cutoff>().unwrap(), Cutoff::Unbounded);
        assert_eq!("17".parse::<Cutoff>().unwrap(), Cutoff::Finite(17));
        assert!("-1".parse::<Cutoff>().is_err());
        assert_eq!(Cutoff::Unbounded.to_string(), "unbounded");
    }

    proptest! {
        #[test]
        fn rate_point_is_consistent(
            p in 1e-6f64..=1.0,
            ratio in 0.0f64..5.0,
            extra in prop_oneof![Just(0u32), Just(2u32)],
            m in prop_oneof![(0u64..100_000).prop_map(Cutoff::Finite), Just(Cutoff::Unbounded)],
        ) {
            let point = evaluate(&LinkContext::from_ratio(p, ratio.max(1e-12), extra), m).unwrap();
            prop_assert_eq!(point.e_x + point.fidelity, 1.0);
            prop_assert!(point.fidelity >= 0.5 && point.fidelity <= 1.0);
            prop_assert!(point.skr_per_use_per_mode <= point.raw_rate / 2.0);
            prop_assert!(point.secret_fraction >= 0.0 && point.secret_fraction <= 1.0);
            let a = (-(extra as f64) * ratio.max(1e-12)).exp();
            prop_assert!((point.fidelity - 0.5 * (1.0 + a * point.expectation_e)).abs() < 1e-12);
            prop_assert!(point.expectation_e > 0.0 && point.expectation_e <= 1.0);
        }

        #[test]
        fn raw_rate_non_decreasing(p in 1e-4f64..=1.0, m in 0u64..10_000) {
            let model = LinkModel::new(&LinkContext::from_ratio(p, 0.1, 0)).unwrap();
            prop_assert!(model.raw_rate(Cutoff::Finite(m + 1)) >= model.raw_rate(Cutoff::Finite(m)));
            prop_assert!(model.raw_rate(Cutoff::Unbounded) >= model.raw_rate(Cutoff::Finite(m)));
        }
    }
}
