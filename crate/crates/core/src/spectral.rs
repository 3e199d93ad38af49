//! Mean-thresholded PSD masking and rhythm-band power attribution.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::types::{FrequencyBand, SpectrumEstimate};

/// Anything with values on an Hz grid.
pub trait PowerSpectrum {
    fn freqs_hz(&self) -> &[f64];
    fn power(&self) -> &[f64];
}

impl PowerSpectrum for SpectrumEstimate {
    fn freqs_hz(&self) -> &[f64] {
        SpectrumEstimate::freqs_hz(self)
    }

    fn power(&self) -> &[f64] {
        self.values()
    }
}

/// A spectrum with every value below `k * mean_power` set to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedSpectrum {
    pub base: SpectrumEstimate,
    pub k: f64,
    pub mean_power: f64,
    pub values: Vec<f64>,
    pub survivor_fraction: f64,
}

impl MaskedSpectrum {
    pub fn survivors(&self) -> impl Iterator<Item = usize> + '_ {
        self.base
            .values()
            .iter()
            .zip(&self.values)
            .enumerate()
            .filter(|(_, (b, m))| **m == **b && self.survives(**b))
            .map(|(i, _)| i)
    }

    fn survives(&self, v: f64) -> bool {
        v >= self.k * self.mean_power
    }
}

impl PowerSpectrum for MaskedSpectrum {
    fn freqs_hz(&self) -> &[f64] {
        self.base.freqs_hz()
    }

    fn power(&self) -> &[f64] {
        &self.values
    }
}

/// Keeps `P(f)` where `P(f) >= k * mean(P)`, zero elsewhere. The mean runs
/// over the whole grid.
pub fn threshold_psd(psd: &SpectrumEstimate, k: f64) -> MaskedSpectrum {
    let base = psd.values();
    let (lo, hi) = base.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    // rounding must not push the mean of a flat spectrum above its values
    let mean_power = (base.iter().sum::<f64>() / base.len() as f64).clamp(lo, hi);
    let cut = k * mean_power;
    let values: Vec<f64> = base.iter().map(|&v| if v >= cut { v } else { 0.0 }).collect();
    let kept = base.iter().filter(|&&v| v >= cut).count();
    MaskedSpectrum {
        base: psd.clone(),
        k,
        mean_power,
        values,
        survivor_fraction: kept as f64 / base.len() as f64,
    }
}

/// Divides out the `order`-fold differencer response `|1 - exp(-j 2 pi f)|^(2 order)`.
/// The zero-frequency bin, where the response vanishes, is set to zero.
pub fn undifference(psd: &SpectrumEstimate, order: usize) -> Result<SpectrumEstimate> {
    if order == 0 {
        return Ok(psd.clone());
    }
    let values = psd
        .freqs_normalized()
        .iter()
        .zip(psd.values())
        .map(|(&f, &v)| {
            let gain = (4.0 * (std::f64::consts::PI * f).sin().powi(2)).powi(order as i32);
            if f == 0.0 || gain == 0.0 {
                0.0
            } else {
                v / gain
            }
        })
        .collect();
    SpectrumEstimate::new(psd.freqs_normalized().to_vec(), values, psd.sample_rate_hz())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPower {
    pub power: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandPowerReport {
    pub per_band: BTreeMap<String, BandPower>,
    pub total_power: f64,
    /// `None` when no band holds any power.
    pub dominant_band: Option<String>,
}

impl BandPowerReport {
    pub fn power_of(&self, names: &[&str]) -> f64 {
        names
            .iter()
            .filter_map(|n| self.per_band.get(*n))
            .map(|b| b.power)
            .sum()
    }
}

pub fn check_bands(bands: &[FrequencyBand]) -> Result<()> {
    for (i, a) in bands.iter().enumerate() {
        for b in &bands[i + 1..] {
            if a.overlaps(b) || a.name == b.name {
                return Err(Error::OverlappingBands(a.name.clone(), b.name.clone()));
            }
        }
    }
    Ok(())
}

/// Composite trapezoid weights on the Hz grid: each point carries the width
/// of its half-cells, so band powers over disjoint point sets add up to the
/// full-grid integral.
fn trapezoid_weights(freqs: &[f64]) -> Vec<f64> {
    let n = freqs.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { freqs[i] - freqs[i - 1] } else { 0.0 };
            let right = if i + 1 < n { freqs[i + 1] - freqs[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// Integrates the spectrum inside each band and normalizes by the integral
/// over the full grid.
pub fn band_powers<S: PowerSpectrum + ?Sized>(spectrum: &S, bands: &[FrequencyBand]) -> Result<BandPowerReport> {
    check_bands(bands)?;
    let freqs = spectrum.freqs_hz();
    let values = spectrum.power();
    let weights = trapezoid_weights(freqs);
    let total_power: f64 = weights.iter().zip(values).map(|(w, v)| w * v).sum();

    let mut per_band = BTreeMap::new();
    let mut ordered: Vec<&FrequencyBand> = bands.iter().collect();
    ordered.sort_by(|a, b| a.lo_hz.total_cmp(&b.lo_hz));
    let mut dominant: Option<(&str, f64)> = None;
    for band in ordered {
        let power: f64 = freqs
            .iter()
            .zip(values)
            .zip(&weights)
            .filter(|((f, _), _)| band.contains(**f))
            .map(|((_, v), w)| v * w)
            .sum();
        let fraction = if total_power > 0.0 { power / total_power } else { 0.0 };
        if fraction > 0.0 && dominant.is_none_or(|(_, best)| fraction > best) {
            dominant = Some((band.name.as_str(), fraction));
        }
        per_band.insert(band.name.clone(), BandPower { power, fraction });
    }
    Ok(BandPowerReport {
        per_band,
        total_power,
        dominant_band: dominant.map(|(n, _)| n.to_string()),
    })
}
