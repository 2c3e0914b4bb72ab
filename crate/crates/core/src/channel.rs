//! Fiber transmission and the direct-transmission benchmarks.

use std::fmt;

use crate::error::{Error, Result};

/// Rates below this render as negative-infinity dB.
pub const DB_FLOOR: f64 = 1e-30;

/// `exp(-L / L_att)`.
pub fn end_to_end_transmission(distance_km: f64, l_att_km: f64) -> f64 {
    (-distance_km / l_att_km).exp()
}

/// Secret-key capacity of a pure-loss channel, `-log2(1 - eta)`.
///
/// Diverges at `eta = 1`, which is reported as [`Error::UnboundedCapacity`].
pub fn ideal_repeaterless_bound(eta: f64) -> Result<f64> {
    if eta >= 1.0 {
        return Err(Error::UnboundedCapacity);
    }
    // ln_1p keeps the small-eta slope 1/ln 2 exact
    Ok(-(-eta).ln_1p() / std::f64::consts::LN_2)
}

/// Key rate per channel use and mode of direct transmission with a
/// lossy but error-free link, `p_link * eta / 2`.
pub fn realistic_ppl_rate(p_link: f64, eta: f64) -> f64 {
    p_link * eta / 2.0
}

/// Reference line for the optimal single-node repeater scaling.
pub fn sqrt_eta_line(eta: f64) -> f64 {
    eta.sqrt()
}

/// A rate on a logarithmic scale. Vanishing rates and the divergent
/// capacity at zero distance are carried as explicit sentinels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decibel {
    Finite(f64),
    NegInfinity,
    PosInfinity,
}

impl Decibel {
    pub fn value(self) -> f64 {
        match self {
            Decibel::Finite(v) => v,
            Decibel::NegInfinity => f64::NEG_INFINITY,
            Decibel::PosInfinity => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Decibel::Finite(_))
    }
}

impl fmt::Display for Decibel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decibel::Finite(v) => write!(f, "{v}"),
            Decibel::NegInfinity => f.write_str("-inf"),
            Decibel::PosInfinity => f.write_str("inf"),
        }
    }
}

/// `10 log10(rate)`.
pub fn to_decibel(rate: f64) -> Decibel {
    if rate.is_nan() || rate < DB_FLOOR {
        Decibel::NegInfinity
    } else if rate.is_infinite() {
        Decibel::PosInfinity
    } else {
        Decibel::Finite(10.0 * rate.log10())
    }
}

/// Benchmark values at one distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkPoint {
    pub distance_km: f64,
    pub eta: f64,
    /// `None` where the capacity diverges (zero distance).
    pub ideal_bound: Option<f64>,
    pub realistic_ppl: f64,
    pub sqrt_eta_line: f64,
}

impl BenchmarkPoint {
    pub fn new(distance_km: f64, l_att_km: f64, p_link: f64) -> Self {
        let eta = end_to_end_transmission(distance_km, l_att_km);
        BenchmarkPoint {
            distance_km,
            eta,
            ideal_bound: ideal_repeaterless_bound(eta).ok(),
            realistic_ppl: realistic_ppl_rate(p_link, eta),
            sqrt_eta_line: sqrt_eta_line(eta),
        }
    }

    pub fn ideal_bound_db(&self) -> Decibel {
        match self.ideal_bound {
            Some(b) => to_decibel(b),
            None => Decibel::PosInfinity,
        }
    }

    pub fn realistic_ppl_db(&self) -> Decibel {
        to_decibel(self.realistic_ppl)
    }

    pub fn sqrt_eta_db(&self) -> Decibel {
        to_decibel(self.sqrt_eta_line)
    }
}
