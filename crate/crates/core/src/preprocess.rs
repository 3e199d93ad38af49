//! Signal conditioning ahead of AR fitting: differencing, mean removal,
//! biased autocovariance, periodogram and a Jarque-Bera normality check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{frequency_grid, AutocovarianceSeq, TimeSeries};

/// Applies first differencing `y(n) = x(n) - x(n-1)` `order` times.
pub fn difference(x: &TimeSeries, order: usize) -> Result<TimeSeries> {
    if x.len() <= order {
        return Err(Error::InsufficientForDifferencing { len: x.len(), order });
    }
    let mut y = x.samples().to_vec();
    for _ in 0..order {
        y = y.windows(2).map(|w| w[1] - w[0]).collect();
    }
    x.with_samples(y)
}

pub fn demean(x: &TimeSeries) -> TimeSeries {
    let s = x.samples();
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    TimeSeries::new(s.iter().map(|v| v - mean).collect(), x.sample_rate_hz())
        .expect("demeaning preserves finiteness and length")
}

/// Biased autocovariance of the demeaned signal,
/// `r(l) = (1/N) sum_{n=0}^{N-1-l} x(n) x(n+l)` for `l = 0..=max_lag`.
pub fn biased_autocov(x: &TimeSeries, max_lag: usize) -> Result<AutocovarianceSeq> {
    let n = x.len();
    if max_lag >= n {
        return Err(Error::LagTooLarge { max_lag, len: n });
    }
    let centered = demean(x);
    AutocovarianceSeq::new(autocov_raw(centered.samples(), max_lag))
}

/// Biased lag products without mean removal.
pub(crate) fn autocov_raw(s: &[f64], max_lag: usize) -> Vec<f64> {
    let n = s.len() as f64;
    (0..=max_lag)
        .map(|l| s.iter().zip(&s[l..]).map(|(a, b)| a * b).sum::<f64>() / n)
        .collect()
}

/// Periodogram values on an equispaced normalized-frequency grid over [0, 0.5].
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    pub freqs_normalized: Vec<f64>,
    pub values: Vec<f64>,
}

impl Periodogram {
    /// Trapezoidal estimate of the integral of I(f) over [-1/2, 1/2],
    /// using even symmetry (twice the [0, 1/2] integral).
    pub fn integrated_power(&self) -> f64 {
        2.0 * trapezoid(&self.freqs_normalized, &self.values)
    }
}

/// `I(f) = (1/N) |sum_n x(n) exp(-j 2 pi f n)|^2` on `grid_size` points of [0, 0.5].
///
/// The signal is used as given (no mean removal).
pub fn periodogram(x: &TimeSeries, grid_size: usize) -> Result<Periodogram> {
    if grid_size == 0 {
        return Err(Error::InvalidInput("periodogram grid size must be positive".into()));
    }
    let freqs = frequency_grid(grid_size);
    let n = x.len() as f64;
    let values = freqs.iter().map(|&f| dtft(x.samples(), f).norm_sqr() / n).collect();
    Ok(Periodogram {
        freqs_normalized: freqs,
        values,
    })
}

/// `sum_n s(n) exp(-j 2 pi f n)`, accumulated with a rotating phasor that is
/// re-anchored periodically to bound rounding drift.
pub(crate) fn dtft(s: &[f64], f: f64) -> Complex64 {
    const REANCHOR: usize = 256;
    let omega = -2.0 * std::f64::consts::PI * f;
    let step = Complex64::from_polar(1.0, omega);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut phasor = Complex64::new(1.0, 0.0);
    for (i, &v) in s.iter().enumerate() {
        if i % REANCHOR == 0 {
            phasor = Complex64::from_polar(1.0, omega * i as f64);
        }
        acc += phasor * v;
        phasor *= step;
    }
    acc
}

/// Composite trapezoidal rule over a (possibly non-uniform) grid.
pub(crate) fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

/// Jarque-Bera normality test outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalityTest {
    pub statistic: f64,
    pub is_normal_at_5pct: bool,
}

/// 95% quantile of the chi-squared distribution with two degrees of freedom.
pub const JB_CRITICAL_5PCT: f64 = 5.99;

/// Jarque-Bera test: `JB = (N/6) (S^2 + (K - 3)^2 / 4)`.
pub fn normality_check(x: &TimeSeries) -> Result<NormalityTest> {
    let s = x.samples();
    if s.len() < 8 {
        return Err(Error::TooFewSamples {
            len: s.len(),
            needed: 8,
        });
    }
    let n = s.len() as f64;
    let mean = s.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in s {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let skew = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2);
    let statistic = n / 6.0 * (skew * skew + (kurt - 3.0).powi(2) / 4.0);
    Ok(NormalityTest {
        statistic,
        is_normal_at_5pct: statistic < JB_CRITICAL_5PCT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec(), 128.0).unwrap()
    }

    fn gaussian(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn difference_examples() {
        assert_eq!(difference(&ts(&[5.0; 4]), 1).unwrap().samples(), &[0.0; 3]);
        let x = ts(&[1.0, 2.0, 4.0, 7.0]);
        assert_eq!(difference(&x, 1).unwrap().samples(), &[1.0, 2.0, 3.0]);
        assert_eq!(difference(&x, 2).unwrap().samples(), &[1.0, 1.0]);
        assert_eq!(difference(&x, 0).unwrap(), x);
        assert!(matches!(
            difference(&x, 4),
            Err(Error::InsufficientForDifferencing { len: 4, order: 4 })
        ));
    }

    #[test]
    fn demean_examples() {
        assert_eq!(demean(&ts(&[1.0, 2.0, 3.0])).samples(), &[-1.0, 0.0, 1.0]);
        assert_eq!(demean(&ts(&[7.0])).samples(), &[0.0]);
        let z = ts(&[-1.5, 0.5, 1.0]);
        for (a, b) in demean(&z).samples().iter().zip(z.samples()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn autocov_examples() {
        let r = biased_autocov(&ts(&[1.0, -1.0, 1.0, -1.0]), 1).unwrap();
        assert_eq!(r.values(), &[1.0, -0.75]);
        let r = biased_autocov(&ts(&[0.0; 5]), 3).unwrap();
        assert!(r.values().iter().all(|v| *v == 0.0));
        assert!(matches!(
            biased_autocov(&ts(&[1.0, 2.0]), 2),
            Err(Error::LagTooLarge { .. })
        ));
    }

    #[test]
    fn autocov_of_white_noise_is_nearly_uncorrelated() {
        let x = ts(&gaussian(100_000, 11));
        let r = biased_autocov(&x, 1).unwrap();
        let rho = r.values()[1] / r.values()[0];
        assert!(rho.abs() < 0.02, "rho(1) = {rho}");
    }

    #[test]
    fn periodogram_of_constant_and_impulse() {
        let n = 64;
        let c = 3.0;
        // grid of n/2+1 points lands exactly on k/N
        let p = periodogram(&ts(&vec![c; n]), n / 2 + 1).unwrap();
        assert!((p.values[0] - n as f64 * c * c).abs() < 1e-9 * n as f64 * c * c);
        for v in &p.values[1..] {
            assert!(v.abs() < 1e-9 * n as f64 * c * c, "{v}");
        }
        let mut imp = vec![0.0; n];
        imp[0] = 1.0;
        let p = periodogram(&ts(&imp), 100).unwrap();
        assert!(p.values.iter().all(|v| (v - 1.0 / n as f64).abs() < 1e-15));
        assert!(periodogram(&ts(&imp), 0).is_err());
    }

    #[test]
    fn dtft_matches_direct_trig_sum() {
        let x = gaussian(3000, 5);
        for &f in &[0.0, 0.013, 0.25, 0.377, 0.5] {
            let (mut re, mut im) = (0.0, 0.0);
            for (n, v) in x.iter().enumerate() {
                let w = -2.0 * std::f64::consts::PI * f * n as f64;
                re += v * w.cos();
                im += v * w.sin();
            }
            let got = dtft(&x, f);
            assert!((got.re - re).abs() < 1e-9 && (got.im - im).abs() < 1e-9);
        }
    }

    #[test]
    fn jarque_bera_examples() {
        let g = ts(&gaussian(10_000, 3));
        assert!(normality_check(&g).unwrap().is_normal_at_5pct);

        let skewed: Vec<f64> = gaussian(10_000, 4).into_iter().map(f64::exp).collect();
        assert!(!normality_check(&ts(&skewed)).unwrap().is_normal_at_5pct);

        // +-1 alternating: S = 0, K = 1, JB = N/6
        let two_point: Vec<f64> = (0..10_000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let t = normality_check(&ts(&two_point)).unwrap();
        assert!((t.statistic - 10_000.0 / 6.0).abs() < 1e-6);
        assert!(!t.is_normal_at_5pct);

        assert!(matches!(
            normality_check(&ts(&[1.0; 7])),
            Err(Error::TooFewSamples { .. })
        ));
    }
}
