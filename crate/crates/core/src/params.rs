//! Hardware platforms, protocol variants and the resolution of a
//! (platform, protocol, distance) triple into a [`LinkContext`].
//!
//! The built-in platform table carries the composite link coupling
//! efficiency `p_link`, the source clock rate and the memory coherence time
//! for five platforms, in a "current" and a "future" era.

use std::fmt;
use std::str::FromStr;

use crate::error::{invariant, Error, Result};

/// Number of optical modes per two-mode encoded photonic qubit.
pub const N_MODES: u32 = 2;

/// Default attenuation length of telecom fiber, km.
pub const DEFAULT_L_ATT_KM: f64 = 22.0;

/// Speed of light in fiber, km per ms (2 x 10^5 km/s).
pub const DEFAULT_SIGNAL_SPEED_KM_PER_MS: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Era {
    Current,
    Future,
}

impl Era {
    pub fn as_str(self) -> &'static str {
        match self {
            Era::Current => "current",
            Era::Future => "future",
        }
    }
}

impl fmt::Display for Era {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Era {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "current" => Ok(Era::Current),
            "future" => Ok(Era::Future),
            other => Err(format!("unknown era `{other}` (expected current or future)")),
        }
    }
}

/// One hardware platform: composite link coupling, clock rate and coherence time.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatformParams {
    pub name: String,
    /// Zero-length link coupling efficiency.
    pub p_link: f64,
    /// Source clock rate in MHz; one clock period is `1 / clock_mhz` microseconds.
    pub clock_mhz: f64,
    /// Memory coherence time in ms. May be infinite (perfect memory).
    pub tau_coh_ms: f64,
    pub era: Era,
}

impl PlatformParams {
    pub fn new(
        name: impl Into<String>,
        p_link: f64,
        clock_mhz: f64,
        tau_coh_ms: f64,
        era: Era,
    ) -> Result<Self> {
        let platform = PlatformParams {
            name: name.into(),
            p_link,
            clock_mhz,
            tau_coh_ms,
            era,
        };
        platform.validate()?;
        Ok(platform)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_link > 0.0 && self.p_link <= 1.0) {
            return Err(invariant("p_link", self.p_link, "must lie in (0, 1]"));
        }
        if !(self.clock_mhz > 0.0 && self.clock_mhz.is_finite()) {
            return Err(invariant("clock_mhz", self.clock_mhz, "must be positive and finite"));
        }
        // +inf is a perfect memory
        if self.tau_coh_ms.is_nan() || self.tau_coh_ms <= 0.0 {
            return Err(invariant("tcoh_ms", self.tau_coh_ms, "must be positive"));
        }
        if self.name.trim().is_empty() {
            return Err(invariant("name", &self.name, "must not be empty"));
        }
        Ok(())
    }

    /// Clock period in ms.
    pub fn clock_period_ms(&self) -> f64 {
        1e-3 / self.clock_mhz
    }

    /// Same platform with a different coherence time.
    pub fn with_tau_coh(&self, tau_coh_ms: f64) -> Result<Self> {
        let mut p = self.clone();
        p.tau_coh_ms = tau_coh_ms;
        p.validate()?;
        Ok(p)
    }
}

/// The four protocol variants of an elementary repeater link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    /// Node sends photons; one memory node with two half-segments.
    NspCell,
    /// Node sends photons; two full segments meeting at optical BMs.
    NspTwoSegment,
    /// Node receives photons, unit write-in efficiency.
    NrpCellIdeal,
    /// Node receives photons, write-in by a linear-optics BM.
    NrpCellBmWriteIn,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 4] = [
        ProtocolKind::NspCell,
        ProtocolKind::NspTwoSegment,
        ProtocolKind::NrpCellIdeal,
        ProtocolKind::NrpCellBmWriteIn,
    ];

    pub fn is_nsp(self) -> bool {
        matches!(self, ProtocolKind::NspCell | ProtocolKind::NspTwoSegment)
    }

    /// Flag name used on the command line and in output paths.
    pub fn flag_name(self) -> &'static str {
        match self {
            ProtocolKind::NspCell => "nsp-cell",
            ProtocolKind::NspTwoSegment => "nsp-two-segment",
            ProtocolKind::NrpCellIdeal => "nrp-cell",
            ProtocolKind::NrpCellBmWriteIn => "nrp-cell-bm",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.flag_name())
    }
}

impl FromStr for ProtocolKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        ProtocolKind::ALL
            .into_iter()
            .find(|k| k.flag_name() == s)
            .ok_or_else(|| {
                format!("unknown protocol `{s}` (expected nsp-cell, nsp-two-segment, nrp-cell or nrp-cell-bm)")
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolSpec {
    kind: ProtocolKind,
    p_bm: f64,
}

impl ProtocolSpec {
    /// Protocol with a deterministic final Bell measurement on the memories.
    pub fn new(kind: ProtocolKind) -> Self {
        ProtocolSpec { kind, p_bm: 1.0 }
    }

    pub fn with_p_bm(kind: ProtocolKind, p_bm: f64) -> Result<Self> {
        if !(p_bm > 0.0 && p_bm <= 1.0) {
            return Err(invariant("p_bm", p_bm, "must lie in (0, 1]"));
        }
        Ok(ProtocolSpec { kind, p_bm })
    }

    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    pub fn p_bm(&self) -> f64 {
        self.p_bm
    }

    /// Constant dephasing units added on top of the waiting time: the two
    /// memories of an NSP node each wait one round trip before they know
    /// whether their photon arrived.
    pub fn extra_dephasing_units(&self) -> u32 {
        if self.kind.is_nsp() {
            2
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub l_att_km: f64,
    pub signal_speed_km_per_ms: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            l_att_km: DEFAULT_L_ATT_KM,
            signal_speed_km_per_ms: DEFAULT_SIGNAL_SPEED_KM_PER_MS,
        }
    }
}

impl ChannelParams {
    pub fn new(l_att_km: f64, signal_speed_km_per_ms: f64) -> Result<Self> {
        if !(l_att_km > 0.0 && l_att_km.is_finite()) {
            return Err(invariant("l_att_km", l_att_km, "must be positive and finite"));
        }
        if !(signal_speed_km_per_ms > 0.0 && signal_speed_km_per_ms.is_finite()) {
            return Err(invariant(
                "signal_speed_km_per_ms",
                signal_speed_km_per_ms,
                "must be positive and finite",
            ));
        }
        Ok(ChannelParams {
            l_att_km,
            signal_speed_km_per_ms,
        })
    }
}

/// Everything the rate formulas need for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkContext {
    pub distance_km: f64,
    /// Success probability of one half-link attempt.
    pub p: f64,
    /// Duration of one attempt, ms.
    pub t0_ms: f64,
    pub tau_coh_ms: f64,
    pub p_bm: f64,
    pub extra_units: u32,
    pub n_modes: u32,
}

impl LinkContext {
    /// Context built directly from the dimensionless model inputs, with
    /// `t0 / tau_coh = ratio` (tau_coh = 1 ms).
    pub fn from_ratio(p: f64, t0_over_tau: f64, extra_units: u32) -> Self {
        LinkContext {
            distance_km: 0.0,
            p,
            t0_ms: t0_over_tau,
            tau_coh_ms: 1.0,
            p_bm: 1.0,
            extra_units,
            n_modes: N_MODES,
        }
    }

    /// `T0 / tau_coh`; zero for a perfect memory.
    pub fn dephasing_ratio(&self) -> f64 {
        if self.tau_coh_ms.is_infinite() {
            0.0
        } else {
            self.t0_ms / self.tau_coh_ms
        }
    }
}

/// The five platforms of the built-in table for one era.
pub fn builtin_platforms(era: Era) -> Vec<PlatformParams> {
    // (name, p_link, clock MHz, tau_coh ms)
    let rows: [(&str, f64, f64, f64); 5] = match era {
        Era::Current => [
            ("NV", 0.05, 50.0, 10.0),
            ("SiV", 0.05, 30.0, 1.0),
            ("QuantumDot", 0.10, 1000.0, 0.003),
            ("Calcium", 0.004, 0.06, 0.8),
            ("Rubidium", 0.70, 5.0, 100.0),
        ],
        Era::Future => [
            ("NV", 0.50, 250.0, 10000.0),
            ("SiV", 0.50, 500.0, 100.0),
            ("QuantumDot", 0.60, 1000.0, 0.3),
            ("Calcium", 0.10, 1.0, 1.0),
            ("Rubidium", 0.70, 100.0, 1000.0),
        ],
    };
    rows.iter()
        .map(|&(name, p_link, clock_mhz, tau_coh_ms)| PlatformParams {
            name: name.to_string(),
            p_link,
            clock_mhz,
            tau_coh_ms,
            era,
        })
        .collect()
}

/// Finds a platform by case-insensitive name.
pub fn find_platform<'a>(platforms: &'a [PlatformParams], name: &str) -> Result<&'a PlatformParams> {
    platforms
        .iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownPlatform(name.to_string()))
}

/// Resolves half-link success probability and attempt duration.
///
/// The tabulated `p_link` is used as the half-link coupling of the cell
/// protocols, and as the `P_source * eta_det` composite inside the
/// `1/2 (P_source eta_det)^2` coupling of the two-segment and BM write-in
/// variants. NSP attempt times never drop below one clock period.
pub fn resolve_context(
    platform: &PlatformParams,
    protocol: &ProtocolSpec,
    channel: &ChannelParams,
    distance_km: f64,
) -> Result<LinkContext> {
    if !(distance_km >= 0.0 && distance_km.is_finite()) {
        return Err(invariant("distance_km", distance_km, "must be non-negative and finite"));
    }
    let half_link_transmission = (-(distance_km / 2.0) / channel.l_att_km).exp();
    let squared_coupling = 0.5 * platform.p_link * platform.p_link;
    let clock_period = platform.clock_period_ms();
    let c = channel.signal_speed_km_per_ms;

    let (coupling, t0_ms) = match protocol.kind() {
        ProtocolKind::NspCell => (platform.p_link, (distance_km / c).max(clock_period)),
        ProtocolKind::NspTwoSegment => (squared_coupling, (distance_km / (2.0 * c)).max(clock_period)),
        ProtocolKind::NrpCellIdeal => (platform.p_link, clock_period),
        ProtocolKind::NrpCellBmWriteIn => (squared_coupling, clock_period),
    };

    Ok(LinkContext {
        distance_km,
        p: coupling * half_link_transmission,
        t0_ms,
        tau_coh_ms: platform.tau_coh_ms,
        p_bm: protocol.p_bm(),
        extra_units: protocol.extra_dephasing_units(),
        n_modes: N_MODES,
    })
}

/// Platforms and optional channel overrides read from a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlatformConfig {
    pub platforms: Vec<PlatformParams>,
    pub l_att_km: Option<f64>,
    pub signal_speed_km_per_ms: Option<f64>,
}

impl PlatformConfig {
    /// `base` with the overrides of this file applied.
    pub fn channel(&self, base: ChannelParams) -> Result<ChannelParams> {
        ChannelParams::new(
            self.l_att_km.unwrap_or(base.l_att_km),
            self.signal_speed_km_per_ms.unwrap_or(base.signal_speed_km_per_ms),
        )
    }
}

/// Parses the platform list of a config file; channel overrides are ignored.
pub fn load_platforms(config_text: &str) -> Result<Vec<PlatformParams>> {
    load_config(config_text).map(|c| c.platforms)
}

#[derive(Default)]
struct PendingPlatform {
    line: usize,
    name: Option<String>,
    p_link: Option<f64>,
    clock_mhz: Option<f64>,
    tau_coh_ms: Option<f64>,
    era: Option<Era>,
}

impl PendingPlatform {
    fn finish(self) -> Result<PlatformParams> {
        let missing = |key: &str| Error::Parse {
            line: self.line,
            message: format!("platform block is missing `{key}`"),
        };
        let platform = PlatformParams {
            name: self.name.clone().ok_or_else(|| missing("name"))?,
            p_link: self.p_link.ok_or_else(|| missing("p_link"))?,
            clock_mhz: self.clock_mhz.ok_or_else(|| missing("clock_mhz"))?,
            tau_coh_ms: self.tau_coh_ms.ok_or_else(|| missing("tcoh_ms"))?,
            era: self.era.unwrap_or(Era::Current),
        };
        platform.validate()?;
        Ok(platform)
    }
}

/// Parses a platform config file.
///
/// ```text
/// # comment
/// l_att_km = 22
/// [platform]
/// name = Rubidium  p_link = 0.7
/// clock_mhz = 5 tcoh_ms = 100
/// ```
///
/// Blocks start at `[platform]`; `key=value` pairs may be spread over any
/// number of lines and separated by arbitrary whitespace. Values containing
/// spaces can be double-quoted. `l_att_km` and `signal_speed_km_per_ms` may
/// appear anywhere outside a platform block.
pub fn load_config(config_text: &str) -> Result<PlatformConfig> {
    let mut config = PlatformConfig::default();
    let mut pending: Option<PendingPlatform> = None;

    for (idx, raw) in config_text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut rest = line;
        if let Some(after) = rest.strip_prefix("[platform]") {
            if let Some(done) = pending.take() {
                config.platforms.push(done.finish()?);
            }
            pending = Some(PendingPlatform {
                line: line_no,
                ..Default::default()
            });
            rest = after;
        } else if rest.starts_with('[') {
            return Err(Error::Parse {
                line: line_no,
                message: format!("unknown section `{rest}`"),
            });
        }

        for (key, value) in tokenize(rest, line_no)? {
            let number = || -> Result<f64> {
                value.parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("`{key}` expects a number, got `{value}`"),
                })
            };
            match (key.as_str(), pending.as_mut()) {
                ("l_att_km", _) => {
                    set_once(&mut config.l_att_km, number()?, &key, line_no)?;
                }
                ("signal_speed_km_per_ms", _) => {
                    set_once(&mut config.signal_speed_km_per_ms, number()?, &key, line_no)?;
                }
                ("name", Some(block)) => set_once(&mut block.name, value.clone(), &key, line_no)?,
                ("p_link", Some(block)) => set_once(&mut block.p_link, number()?, &key, line_no)?,
                ("clock_mhz", Some(block)) => set_once(&mut block.clock_mhz, number()?, &key, line_no)?,
                ("tcoh_ms", Some(block)) => set_once(&mut block.tau_coh_ms, number()?, &key, line_no)?,
                ("era", Some(block)) => {
                    let era = value.parse::<Era>().map_err(|message| Error::Parse { line: line_no, message })?;
                    set_once(&mut block.era, era, &key, line_no)?;
                }
                ("name" | "p_link" | "clock_mhz" | "tcoh_ms" | "era", None) => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("`{key}` outside of a [platform] block"),
                    });
                }
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("unknown key `{key}`"),
                    });
                }
            }
        }
    }
    if let Some(done) = pending.take() {
        config.platforms.push(done.finish()?);
    }
    if let Some(l_att) = config.l_att_km {
        ChannelParams::new(l_att, DEFAULT_SIGNAL_SPEED_KM_PER_MS)?;
    }
    if let Some(speed) = config.signal_speed_km_per_ms {
        ChannelParams::new(DEFAULT_L_ATT_KM, speed)?;
    }
    Ok(config)
}

/// Renders platforms in the format accepted by [`load_config`].
pub fn to_config_text(platforms: &[PlatformParams]) -> String {
    let mut out = String::new();
    for p in platforms {
        out.push_str(&format!(
            "[platform]\nname=\"{}\" era={}\np_link={} clock_mhz={} tcoh_ms={}\n\n",
            p.name, p.era, p.p_link, p.clock_mhz, p.tau_coh_ms
        ));
    }
    out
}

fn set_once<T>(slot: &mut Option<T>, value: T, key: &str, line: usize) -> Result<()> {
    if slot.is_some() {
        return Err(Error::Parse {
            line,
            message: format!("duplicate key `{key}`"),
        });
    }
    *slot = Some(value);
    Ok(())
}

/// Splits `a=1 b = 2 c="x y"` into key/value pairs.
fn tokenize(text: &str, line: usize) -> Result<Vec<(String, String)>> {
    let err = |message: String| Error::Parse { line, message };
    let mut pairs = Vec::new();
    let mut chars = text.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        if chars.peek().is_none() {
            break;
        }
        let mut key = String::new();
        while let Some(&c) = chars.peek() {
            if c == '=' || c.is_whitespace() {
                break;
            }
            key.push(c);
            chars.next();
        }
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        if chars.next() != Some('=') {
            return Err(err(format!("expected `=` after `{key}`")));
        }
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        let mut value = String::new();
        if chars.peek() == Some(&'"') {
            chars.next();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(c) => value.push(c),
                    None => return Err(err(format!("unterminated quote in value of `{key}`"))),
                }
            }
        } else {
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() {
                    break;
                }
                value.push(c);
                chars.next();
            }
        }
        if key.is_empty() || value.is_empty() {
            return Err(err("empty key or value".to_string()));
        }
        pairs.push((key, value));
    }
    Ok(pairs)
}
