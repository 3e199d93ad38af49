//! Seeded synthetic AR processes and EEG-like recordings with known truth.
//!
//! Innovations come from ChaCha8 (`rand_chacha` 0.9) seeded with
//! `seed_from_u64`, sampled through `rand_distr::StandardNormal`. Output is
//! reproducible for a fixed crate version; share recorded CSV fixtures when
//! bit-exact data must cross implementations.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::types::{ArModel, Recording, TimeSeries};

pub fn default_burn_in(order: usize) -> usize {
    10 * order + 100
}

/// Mixes a base seed with a stream index (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian_stream(seed: u64) -> impl Iterator<Item = f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::iter::repeat_with(move || StandardNormal.sample(&mut rng))
}

/// Runs `x(n) = -sum a(i) x(n-i) + e(n)` from a zero state with Gaussian
/// innovations of variance `sigma2`, discarding the first `burn_in` samples
/// (default `10 p + 100`).
pub fn simulate_ar(
    model: &ArModel,
    n: usize,
    seed: u64,
    burn_in: Option<usize>,
    sample_rate_hz: f64,
) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::InvalidInput("cannot simulate zero samples".into()));
    }
    if !model.is_stable() {
        return Err(Error::UnstableModel);
    }
    let a = model.coeffs();
    let p = a.len();
    let burn = burn_in.unwrap_or_else(|| default_burn_in(p));
    let scale = model.sigma2().sqrt();
    let mut out = Vec::with_capacity(burn + n);
    for e in gaussian_stream(seed).take(burn + n) {
        let t = out.len();
        let past: f64 = a
            .iter()
            .enumerate()
            .take_while(|(i, _)| *i < t)
            .map(|(i, ai)| ai * out[t - 1 - i])
            .sum();
        out.push(scale * e - past);
    }
    TimeSeries::new(out.split_off(burn), sample_rate_hz)
}

/// A narrow-band rhythm injected into one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct BurstSpec {
    pub channel: String,
    pub center_hz: f64,
    pub pole_radius: f64,
    /// Amplitude multiplier on top of the SNR scaling.
    pub gain: f64,
}

impl BurstSpec {
    fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        if !(self.center_hz > 0.0 && self.center_hz < sample_rate_hz / 2.0) {
            return Err(Error::InvalidInput(format!(
                "burst on {}: center {} Hz outside (0, {})",
                self.channel,
                self.center_hz,
                sample_rate_hz / 2.0
            )));
        }
        if !(self.pole_radius > 0.0 && self.pole_radius < 1.0) {
            return Err(Error::InvalidInput(format!(
                "burst on {}: pole radius {} outside (0, 1)",
                self.channel, self.pole_radius
            )));
        }
        if !(self.gain > 0.0 && self.gain.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "burst on {}: gain must be positive",
                self.channel
            )));
        }
        Ok(())
    }

    /// Second-order resonator with poles at `radius * exp(+-j 2 pi center / fs)`.
    pub fn resonator(&self, sample_rate_hz: f64) -> ArModel {
        let theta = 2.0 * std::f64::consts::PI * self.center_hz / sample_rate_hz;
        let r = self.pole_radius;
        ArModel::new(vec![-2.0 * r * theta.cos(), r * r], 1.0).expect("finite resonator")
    }
}

/// Channels of white noise (std `noise_sigma`); burst channels additionally
/// carry a resonator output scaled so its sample power is
/// `snr * noise_sigma^2` (times `gain^2`). Annotations are true exactly on
/// burst channels.
#[allow(clippy::too_many_arguments)]
pub fn simulate_recording(
    montage: &[String],
    n: usize,
    sample_rate_hz: f64,
    noise_sigma: f64,
    bursts: &[BurstSpec],
    snr: f64,
    seed: u64,
) -> Result<(Recording, BTreeMap<String, bool>)> {
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "noise sigma must be >= 0, got {noise_sigma}"
        )));
    }
    if !(snr >= 0.0 && snr.is_finite()) {
        return Err(Error::InvalidInput(format!("snr must be >= 0, got {snr}")));
    }
    for b in bursts {
        if !montage.contains(&b.channel) {
            return Err(Error::UnknownChannel(b.channel.clone()));
        }
        b.validate(sample_rate_hz)?;
    }

    let target_power = snr * noise_sigma * noise_sigma;
    let mut channels = Vec::with_capacity(montage.len());
    let mut annotations = BTreeMap::new();
    for (idx, name) in montage.iter().enumerate() {
        let base = derive_seed(seed, idx as u64);
        let mut samples: Vec<f64> = gaussian_stream(derive_seed(base, 0))
            .take(n)
            .map(|e| noise_sigma * e)
            .collect();
        let mine: Vec<&BurstSpec> = bursts.iter().filter(|b| &b.channel == name).collect();
        for (j, burst) in mine.iter().enumerate() {
            let rhythm = simulate_ar(
                &burst.resonator(sample_rate_hz),
                n,
                derive_seed(base, 1 + j as u64),
                None,
                sample_rate_hz,
            )?;
            let r = rhythm.samples();
            let mean = r.iter().sum::<f64>() / n as f64;
            let power = r.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
            let scale = if power > 0.0 {
                burst.gain * (target_power / power).sqrt()
            } else {
                0.0
            };
            for (s, v) in samples.iter_mut().zip(r) {
                *s += scale * (v - mean);
            }
        }
        annotations.insert(name.clone(), !mine.is_empty());
        channels.push((name.clone(), TimeSeries::new(samples, sample_rate_hz)?));
    }
    Ok((Recording::new(channels)?, annotations))
}
