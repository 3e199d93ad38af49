use std::fmt;
use std::str::FromStr;

use crate::ar::FitMethod;
use crate::error::{Error, Result};
use crate::order::Criterion;
use crate::spectral::check_bands;
use crate::types::{default_bands, FrequencyBand};

pub const DEFAULT_ORDER: usize = 10;
pub const DEFAULT_P_MAX: usize = 30;
pub const DEFAULT_K: f64 = 2.0;
pub const DEFAULT_RHO: f64 = 0.5;
pub const DEFAULT_GRID_SIZE: usize = 512;
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 128.0;

/// Fixed AR order, or per-channel selection by information criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderChoice {
    Fixed(usize),
    Auto,
}

impl fmt::Display for OrderChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderChoice::Fixed(p) => write!(f, "{p}"),
            OrderChoice::Auto => f.write_str("auto"),
        }
    }
}

impl FromStr for OrderChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(OrderChoice::Auto);
        }
        s.parse::<usize>()
            .ok()
            .filter(|p| *p >= 1)
            .map(OrderChoice::Fixed)
            .ok_or_else(|| Error::InvalidInput(format!("order must be a positive integer or 'auto', got {s}")))
    }
}

/// Every knob of the detection pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: FitMethod,
    pub order: OrderChoice,
    pub criterion: Criterion,
    pub p_max: usize,
    pub diff_order: usize,
    /// Threshold multiplier applied to the mean PSD level.
    pub k: f64,
    /// Minimum delta+theta share of surviving power for a channel to be flagged.
    pub rho: f64,
    pub grid_size: usize,
    /// Used only when the input file does not carry its own rate.
    pub sample_rate_hz: f64,
    pub bands: Vec<FrequencyBand>,
    pub undifference_correction: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            method: FitMethod::Burg,
            order: OrderChoice::Fixed(DEFAULT_ORDER),
            criterion: Criterion::Bic,
            p_max: DEFAULT_P_MAX,
            diff_order: 1,
            k: DEFAULT_K,
            rho: DEFAULT_RHO,
            grid_size: DEFAULT_GRID_SIZE,
            sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ,
            bands: default_bands(),
            undifference_correction: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if let OrderChoice::Fixed(0) = self.order {
            return bad("order must be >= 1".into());
        }
        if self.p_max == 0 {
            return bad("p_max must be >= 1".into());
        }
        if !self.k.is_finite() {
            return bad(format!("k must be finite, got {}", self.k));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return bad(format!("rho must lie in [0, 1], got {}", self.rho));
        }
        if self.grid_size < 2 {
            return bad(format!("grid size must be >= 2, got {}", self.grid_size));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return bad(format!("sample rate must be positive, got {}", self.sample_rate_hz));
        }
        if self.bands.is_empty() {
            return bad("at least one band is required".into());
        }
        check_bands(&self.bands)
    }

    /// `key=value` pairs describing the configuration, in a fixed order.
    pub fn echo(&self) -> Vec<(String, String)> {
        let bands = self
            .bands
            .iter()
            .map(|b| format!("{}:{}-{}", b.name, b.lo_hz, b.hi_hz))
            .collect::<Vec<_>>()
            .join(";");
        vec![
            ("method".into(), self.method.key().into()),
            ("order".into(), self.order.to_string()),
            ("criterion".into(), self.criterion.to_string()),
            ("p_max".into(), self.p_max.to_string()),
            ("diff_order".into(), self.diff_order.to_string()),
            ("k".into(), self.k.to_string()),
            ("rho".into(), self.rho.to_string()),
            ("grid_size".into(), self.grid_size.to_string()),
            ("sample_rate_hz".into(), self.sample_rate_hz.to_string()),
            ("bands".into(), bands),
            (
                "undifference_correction".into(),
                self.undifference_correction.to_string(),
            ),
            (
                "decision_rule".into(),
                "flag iff surviving power > 0 and (delta+theta)/surviving >= rho".into(),
            ),
        ]
    }
}

/// Parses `name:lo-hi;name:lo-hi;...`.
pub fn parse_bands(s: &str) -> Result<Vec<FrequencyBand>> {
    let bands = s
        .split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|part| {
            let err = || Error::InvalidInput(format!("bad band spec '{part}', expected name:lo-hi"));
            let (name, range) = part.split_once(':').ok_or_else(err)?;
            let (lo, hi) = range.split_once('-').ok_or_else(err)?;
            let lo = lo.trim().parse::<f64>().map_err(|_| err())?;
            let hi = hi.trim().parse::<f64>().map_err(|_| err())?;
            FrequencyBand::new(name.trim(), lo, hi)
        })
        .collect::<Result<Vec<_>>>()?;
    check_bands(&bands)?;
    Ok(bands)
}
