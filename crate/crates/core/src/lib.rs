//! Rates, fidelities and secret-key rates of elementary memory-based
//! quantum-repeater links, with the direct-transmission benchmarks, cutoff
//! optimization and a Monte Carlo cross-check of the closed forms.

pub mod channel;
pub mod cli;
pub mod cutoff;
pub mod error;
pub mod mc;
pub mod params;
pub mod rates;
pub mod sweep;

pub use channel::{BenchmarkPoint, Decibel};
pub use cutoff::{CutoffChoice, RangeObjective};
pub use error::{Error, Result};
pub use params::{ChannelParams, Era, LinkContext, PlatformParams, ProtocolKind, ProtocolSpec};
pub use rates::{evaluate, Cutoff, LinkModel, RatePoint};
