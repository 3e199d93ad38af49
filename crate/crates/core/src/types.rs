//! Shared value types: signals, recordings, AR models, spectra and bands.

use crate::error::{Error, Result};

/// A uniformly sampled real-valued signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
    sample_rate_hz: f64,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("time series must have at least one sample".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("sample {i} is not finite")));
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; a `TimeSeries` holds at least one sample.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// New series with the same sample rate.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        Self::new(samples, self.sample_rate_hz)
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// An ordered set of equally long, equally sampled channels keyed by
/// derivation name.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    channels: Vec<(String, TimeSeries)>,
}

impl Recording {
    pub fn new(channels: Vec<(String, TimeSeries)>) -> Result<Self> {
        let Some((_, first)) = channels.first() else {
            return Err(Error::InvalidInput("recording has no channels".into()));
        };
        let (len, fs) = (first.len(), first.sample_rate_hz());
        for (i, (name, ts)) in channels.iter().enumerate() {
            if channels[..i].iter().any(|(other, _)| other == name) {
                return Err(Error::InvalidInput(format!("duplicate channel name {name}")));
            }
            if ts.len() != len {
                return Err(Error::InvalidInput(format!(
                    "channel {name} has {} samples, expected {len}",
                    ts.len()
                )));
            }
            if ts.sample_rate_hz() != fs {
                return Err(Error::InvalidInput(format!(
                    "channel {name} sampled at {} Hz, expected {fs} Hz",
                    ts.sample_rate_hz()
                )));
            }
        }
        Ok(Self { channels })
    }

    pub fn channels(&self) -> &[(String, TimeSeries)] {
        &self.channels
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.channels.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&TimeSeries> {
        self.channels.iter().find(|(n, _)| n == name).map(|(_, ts)| ts)
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn num_samples(&self) -> usize {
        self.channels[0].1.len()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.channels[0].1.sample_rate_hz()
    }
}

/// AR(p) model in prediction-error form:
/// `e(n) = x(n) + a(1) x(n-1) + ... + a(p) x(n-p)`, with innovation variance `sigma2`.
///
/// The stored coefficients are the coefficients of `A(z) = 1 + sum a(i) z^-i`,
/// so the generative recursion is `x(n) = -sum a(i) x(n-i) + e(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    coeffs: Vec<f64>,
    sigma2: f64,
}

impl ArModel {
    pub fn new(coeffs: Vec<f64>, sigma2: f64) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("AR coefficients must be finite".into()));
        }
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "innovation variance must be finite and >= 0, got {sigma2}"
            )));
        }
        Ok(Self { coeffs, sigma2 })
    }

    /// Builds the model whose lattice has the given reflection coefficients
    /// (step-up recursion).
    pub fn from_reflection(reflection: &[f64], sigma2: f64) -> Result<Self> {
        let mut a: Vec<f64> = Vec::with_capacity(reflection.len());
        for &k in reflection {
            let prev = a.clone();
            let m = prev.len();
            for i in 0..m {
                a[i] = prev[i] + k * prev[m - 1 - i];
            }
            a.push(k);
        }
        Self::new(a, sigma2)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Reflection coefficients k(1..p) recovered by the inverse Levinson
    /// (step-down) recursion. Fails with `UnstableModel` as soon as some
    /// `|k| >= 1`, since the recursion cannot continue past that point.
    pub fn reflection_coeffs(&self) -> Result<Vec<f64>> {
        let p = self.coeffs.len();
        let mut ks = vec![0.0; p];
        let mut a = self.coeffs.clone();
        for m in (1..=p).rev() {
            let k = a[m - 1];
            if !(k.abs() < 1.0) {
                return Err(Error::UnstableModel);
            }
            ks[m - 1] = k;
            let denom = 1.0 - k * k;
            let lower: Vec<f64> = (0..m - 1).map(|i| (a[i] - k * a[m - 2 - i]) / denom).collect();
            a = lower;
        }
        Ok(ks)
    }

    /// True when every implied reflection coefficient has magnitude below one.
    pub fn is_stable(&self) -> bool {
        self.reflection_coeffs().is_ok()
    }

    /// Process variance `r(0) = sigma2 / prod(1 - k_i^2)` of a stable model.
    pub fn process_variance(&self) -> Result<f64> {
        let ks = self.reflection_coeffs()?;
        Ok(self.sigma2 / ks.iter().map(|k| 1.0 - k * k).product::<f64>())
    }
}

/// Autocovariance values r(0..=L).
#[derive(Debug, Clone, PartialEq)]
pub struct AutocovarianceSeq {
    values: Vec<f64>,
}

impl AutocovarianceSeq {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("autocovariance needs r(0)".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("autocovariance values must be finite".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }
}

/// `n` equispaced normalized frequencies covering [0, 0.5] inclusive.
pub fn frequency_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| 0.5 * i as f64 / (n - 1) as f64).collect(),
    }
}

/// A power spectral density sampled on a normalized-frequency grid, with
/// the matching Hz axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    freqs_normalized: Vec<f64>,
    freqs_hz: Vec<f64>,
    values: Vec<f64>,
    sample_rate_hz: f64,
}

impl SpectrumEstimate {
    pub fn new(freqs_normalized: Vec<f64>, values: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        if freqs_normalized.is_empty() || freqs_normalized.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "spectrum grid ({}) and values ({}) must be nonempty and equally long",
                freqs_normalized.len(),
                values.len()
            )));
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if freqs_normalized.windows(2).any(|w| !(w[0] < w[1]))
            || freqs_normalized[0] < 0.0
            || freqs_normalized[freqs_normalized.len() - 1] > 0.5
        {
            return Err(Error::InvalidInput(
                "frequency grid must be strictly increasing within [0, 0.5]".into(),
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidInput("spectrum values must be finite and >= 0".into()));
        }
        let freqs_hz = freqs_normalized.iter().map(|f| f * sample_rate_hz).collect();
        Ok(Self {
            freqs_normalized,
            freqs_hz,
            values,
            sample_rate_hz,
        })
    }

    pub fn freqs_normalized(&self) -> &[f64] {
        &self.freqs_normalized
    }

    pub fn freqs_hz(&self) -> &[f64] {
        &self.freqs_hz
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A named frequency interval `[lo_hz, hi_hz)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyBand {
    pub name: String,
    pub lo_hz: f64,
    pub hi_hz: f64,
}

impl FrequencyBand {
    pub fn new(name: impl Into<String>, lo_hz: f64, hi_hz: f64) -> Result<Self> {
        let name = name.into();
        if !(lo_hz.is_finite() && hi_hz.is_finite() && 0.0 <= lo_hz && lo_hz < hi_hz) {
            return Err(Error::InvalidInput(format!(
                "band {name}: need 0 <= lo < hi, got [{lo_hz}, {hi_hz})"
            )));
        }
        Ok(Self { name, lo_hz, hi_hz })
    }

    pub fn contains(&self, hz: f64) -> bool {
        self.lo_hz <= hz && hz < self.hi_hz
    }

    pub fn overlaps(&self, other: &FrequencyBand) -> bool {
        self.lo_hz < other.hi_hz && other.lo_hz < self.hi_hz
    }
}

/// Clinical EEG rhythm bands: delta, theta, alpha, beta.
pub fn default_bands() -> Vec<FrequencyBand> {
    [
        ("delta", 0.5, 4.0),
        ("theta", 4.0, 8.0),
        ("alpha", 8.0, 14.0),
        ("beta", 14.0, 30.0),
    ]
    .into_iter()
    .map(|(name, lo_hz, hi_hz)| FrequencyBand {
        name: name.to_string(),
        lo_hz,
        hi_hz,
    })
    .collect()
}

/// Bipolar longitudinal montage (18 derivations), right hemisphere first.
pub const DEFAULT_MONTAGE: [&str; 18] = [
    "Fp2-F8", "F8-T4", "T4-T6", "T6-O2", "Fp2-F4", "F4-C4", "C4-P4", "P4-O2", "Fz-Cz", "Cz-Pz", "Fp1-F7", "F7-T3",
    "T3-T5", "T5-O1", "Fp1-F3", "F3-C3", "C3-P3", "P3-O1",
];

pub fn default_montage() -> Vec<String> {
    DEFAULT_MONTAGE.iter().map(|s| s.to_string()).collect()
}

/// Binary confusion-matrix cells.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn record(&mut self, truth: bool, predicted: bool) {
        match (truth, predicted) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (false, false) => self.tn += 1,
            (true, false) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn positives(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> usize {
        self.tn + self.fp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_bands_match_clinical_ranges() {
        let bands = default_bands();
        let got: Vec<_> = bands.iter().map(|b| (b.name.as_str(), b.lo_hz, b.hi_hz)).collect();
        assert_eq!(
            got,
            vec![
                ("delta", 0.5, 4.0),
                ("theta", 4.0, 8.0),
                ("alpha", 8.0, 14.0),
                ("beta", 14.0, 30.0)
            ]
        );
        for (i, a) in bands.iter().enumerate() {
            for b in &bands[i + 1..] {
                assert!(!a.overlaps(b), "{} overlaps {}", a.name, b.name);
            }
        }
        let at_10: Vec<_> = bands.iter().filter(|b| b.contains(10.0)).collect();
        assert_eq!(at_10.len(), 1);
        assert_eq!(at_10[0].name, "alpha");
        // half-open edges
        assert_eq!(bands.iter().find(|b| b.contains(4.0)).unwrap().name, "theta");
    }

    #[test]
    fn montage_has_eighteen_unique_derivations() {
        let m = default_montage();
        assert_eq!(m.len(), 18);
        assert_eq!(m[0], "Fp2-F8");
        assert_eq!(m[17], "P3-O1");
        let mut sorted = m.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 18);
    }

    #[test]
    fn time_series_rejects_bad_input() {
        assert!(TimeSeries::new(vec![], 128.0).is_err());
        assert!(TimeSeries::new(vec![1.0, f64::NAN], 128.0).is_err());
        assert!(TimeSeries::new(vec![1.0], 0.0).is_err());
        assert!(TimeSeries::new(vec![1.0], -1.0).is_err());
    }

    #[test]
    fn recording_rejects_ragged_and_duplicate_channels() {
        let a = TimeSeries::new(vec![0.0; 4], 128.0).unwrap();
        let b = TimeSeries::new(vec![0.0; 5], 128.0).unwrap();
        let c = TimeSeries::new(vec![0.0; 4], 256.0).unwrap();
        assert!(Recording::new(vec![]).is_err());
        assert!(Recording::new(vec![("x".into(), a.clone()), ("y".into(), b)]).is_err());
        assert!(Recording::new(vec![("x".into(), a.clone()), ("y".into(), c)]).is_err());
        assert!(Recording::new(vec![("x".into(), a.clone()), ("x".into(), a.clone())]).is_err());
        let rec = Recording::new(vec![("x".into(), a.clone()), ("y".into(), a)]).unwrap();
        assert_eq!(rec.names().collect::<Vec<_>>(), vec!["x", "y"]);
        assert_eq!(rec.num_samples(), 4);
    }

    #[test]
    fn step_up_and_step_down_are_inverse() {
        let ks = [0.5, -0.3, 0.8, 0.1];
        let m = ArModel::from_reflection(&ks, 1.0).unwrap();
        let back = m.reflection_coeffs().unwrap();
        for (a, b) in ks.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(!ArModel::new(vec![-2.0], 1.0).unwrap().is_stable());
        assert!(ArModel::new(vec![], 1.0).unwrap().is_stable());
    }

    #[test]
    fn process_variance_of_ar1() {
        // x(n) = 0.5 x(n-1) + e(n): r(0) = 1 / (1 - 0.25)
        let m = ArModel::new(vec![-0.5], 1.0).unwrap();
        assert!((m.process_variance().unwrap() - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn spectrum_hz_axis_scales_grid() {
        let s = SpectrumEstimate::new(frequency_grid(5), vec![1.0; 5], 128.0).unwrap();
        assert_eq!(s.freqs_hz(), &[0.0, 16.0, 32.0, 48.0, 64.0]);
        assert!(SpectrumEstimate::new(frequency_grid(3), vec![1.0, -1.0, 0.0], 128.0).is_err());
    }
}
