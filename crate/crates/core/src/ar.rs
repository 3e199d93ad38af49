//! AR parameter estimation: Levinson-Durbin, Yule-Walker, Burg and the
//! periodogram-based maximum-likelihood variant, plus the parametric PSD.
//!
//! All models use the prediction-error convention of [`ArModel`]:
//! `A(f) = 1 + sum_i a(i) exp(-j 2 pi f i)` and `P(f) = sigma2 / |A(f)|^2`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::preprocess::{biased_autocov, demean, periodogram, trapezoid};
use crate::types::{frequency_grid, ArModel, AutocovarianceSeq, SpectrumEstimate, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitMethod {
    YuleWalker,
    Burg,
    Mle,
}

impl FitMethod {
    pub const ALL: [FitMethod; 3] = [FitMethod::Mle, FitMethod::YuleWalker, FitMethod::Burg];

    /// Short identifier used on the command line and in file headers.
    pub fn key(&self) -> &'static str {
        match self {
            FitMethod::YuleWalker => "yw",
            FitMethod::Burg => "burg",
            FitMethod::Mle => "mle",
        }
    }
}

impl fmt::Display for FitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitMethod::YuleWalker => "Yule-Walker",
            FitMethod::Burg => "Burg",
            FitMethod::Mle => "MLE",
        })
    }
}

impl FromStr for FitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "yw" | "yule-walker" | "yulewalker" => Ok(FitMethod::YuleWalker),
            "burg" => Ok(FitMethod::Burg),
            "mle" => Ok(FitMethod::Mle),
            other => Err(Error::InvalidInput(format!("unknown fit method {other}"))),
        }
    }
}

/// A fitted model together with its order-recursive by-products.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: ArModel,
    pub method: FitMethod,
    /// k(1..=p)
    pub reflection_coeffs: Vec<f64>,
    /// Innovation variance estimate for every order 0..=p.
    pub prediction_error_by_order: Vec<f64>,
}

/// Solves the Yule-Walker system `sum_i a(i) r(l-i) = -r(l)`, `l = 1..=p`,
/// by the Levinson-Durbin recursion.
///
/// The returned model's variance is `r(0) + sum_i a(i) r(i)`.
pub fn levinson_durbin(r: &AutocovarianceSeq, p: usize) -> Result<FitResult> {
    let r = r.values();
    if r.len() < p + 1 {
        return Err(Error::InvalidInput(format!(
            "order {p} needs {} autocovariance lags, got {}",
            p + 1,
            r.len()
        )));
    }
    let r0 = r[0];
    if !(r0 > 0.0) {
        return Err(Error::DegenerateAutocovariance(r0));
    }

    let mut a: Vec<f64> = Vec::with_capacity(p);
    let mut ks = Vec::with_capacity(p);
    let mut err = r0;
    let mut errors = Vec::with_capacity(p + 1);
    errors.push(err);
    for m in 1..=p {
        let acc = r[m] + a.iter().enumerate().map(|(i, ai)| ai * r[m - 1 - i]).sum::<f64>();
        let k = -acc / err;
        if !(k.abs() < 1.0) {
            return Err(Error::NonPositiveDefinite {
                order: m,
                magnitude: k.abs(),
            });
        }
        let prev = a.clone();
        for i in 0..m - 1 {
            a[i] = prev[i] + k * prev[m - 2 - i];
        }
        a.push(k);
        ks.push(k);
        err *= 1.0 - k * k;
        errors.push(err);
    }

    let sigma2 = (r0 + a.iter().zip(&r[1..]).map(|(ai, ri)| ai * ri).sum::<f64>()).max(0.0);
    Ok(FitResult {
        model: ArModel::new(a, sigma2)?,
        method: FitMethod::YuleWalker,
        reflection_coeffs: ks,
        prediction_error_by_order: errors,
    })
}

/// Yule-Walker fit: biased autocovariance of the demeaned signal followed by
/// Levinson-Durbin.
pub fn yule_walker_fit(x: &TimeSeries, p: usize) -> Result<FitResult> {
    if x.len() <= p {
        return Err(Error::TooFewSamples {
            len: x.len(),
            needed: p + 1,
        });
    }
    let r = biased_autocov(x, p)?;
    if r.values()[0] <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    levinson_durbin(&r, p)
}

/// Burg lattice recursion on `samples` exactly as given (no mean removal).
///
/// Stage `m` picks
/// `k_m = -2 sum f(n) b(n-1) / sum [f(n)^2 + b(n-1)^2]` over `n = m..N-1`,
/// then updates `f(n) <- f(n) + k_m b(n-1)` and `b(n) <- b(n-1) + k_m f(n)`.
/// The error power follows `E_m = E_{m-1} (1 - k_m^2)` from `E_0 = mean(x^2)`.
pub fn burg_recursion(samples: &[f64], p: usize) -> Result<FitResult> {
    let n = samples.len();
    if n <= p {
        return Err(Error::TooFewSamples { len: n, needed: p + 1 });
    }
    let mut fwd = samples.to_vec();
    let mut bwd = samples.to_vec();
    let mut a: Vec<f64> = Vec::with_capacity(p);
    let mut ks = Vec::with_capacity(p);
    let mut err = samples.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let mut errors = vec![err];

    for m in 1..=p {
        let (mut num, mut den) = (0.0, 0.0);
        for t in m..n {
            num += fwd[t] * bwd[t - 1];
            den += fwd[t] * fwd[t] + bwd[t - 1] * bwd[t - 1];
        }
        if den <= 0.0 {
            return Err(Error::DegenerateSignal(m));
        }
        let k = -2.0 * num / den;

        // descending t keeps bwd[t - 1] at its stage m-1 value when it is read
        for t in (m..n).rev() {
            let f_prev = fwd[t];
            let b_prev = bwd[t - 1];
            fwd[t] = f_prev + k * b_prev;
            bwd[t] = b_prev + k * f_prev;
        }

        let prev = a.clone();
        for i in 0..m - 1 {
            a[i] = prev[i] + k * prev[m - 2 - i];
        }
        a.push(k);
        ks.push(k);
        err *= 1.0 - k * k;
        errors.push(err);
    }

    Ok(FitResult {
        model: ArModel::new(a, err.max(0.0))?,
        method: FitMethod::Burg,
        reflection_coeffs: ks,
        prediction_error_by_order: errors,
    })
}

/// Burg fit of the demeaned signal. Rejects perfectly predictable data
/// (`|k| = 1`), which would yield a marginally stable model.
pub fn burg_fit(x: &TimeSeries, p: usize) -> Result<FitResult> {
    if x.len() <= p + 1 {
        return Err(Error::TooFewSamples {
            len: x.len(),
            needed: p + 2,
        });
    }
    let centered = demean(x);
    let fit = burg_recursion(centered.samples(), p)?;
    if let Some(m) = fit.reflection_coeffs.iter().position(|k| !(k.abs() < 1.0)) {
        return Err(Error::DegenerateSignal(m + 1));
    }
    Ok(fit)
}

/// Maximum-likelihood fit: coefficients from the Yule-Walker system, and the
/// innovation variance from `integral |A(f)|^2 I(f) df` over [-1/2, 1/2],
/// discretized with the trapezoid rule on the periodogram grid.
pub fn mle_fit(x: &TimeSeries, p: usize, grid_size: usize) -> Result<FitResult> {
    if grid_size < 2 * p || grid_size < 2 {
        return Err(Error::GridTooCoarse { grid_size, order: p });
    }
    let yw = yule_walker_fit(x, p)?;
    let pgram = periodogram(&demean(x), grid_size)?;

    let errors = (0..=p)
        .map(|m| {
            let lower = ArModel::from_reflection(&yw.reflection_coeffs[..m], 0.0)?;
            Ok(innovation_variance(
                lower.coeffs(),
                &pgram.freqs_normalized,
                &pgram.values,
            ))
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok(FitResult {
        model: ArModel::new(yw.model.coeffs().to_vec(), errors[p])?,
        method: FitMethod::Mle,
        reflection_coeffs: yw.reflection_coeffs,
        prediction_error_by_order: errors,
    })
}

fn innovation_variance(coeffs: &[f64], freqs: &[f64], pgram: &[f64]) -> f64 {
    let integrand: Vec<f64> = freqs
        .iter()
        .zip(pgram)
        .map(|(&f, &i)| ar_response(coeffs, f).norm_sqr() * i)
        .collect();
    2.0 * trapezoid(freqs, &integrand)
}

/// Dispatches to the estimator for `method`; `grid_size` only affects MLE.
pub fn fit(x: &TimeSeries, method: FitMethod, p: usize, grid_size: usize) -> Result<FitResult> {
    match method {
        FitMethod::YuleWalker => yule_walker_fit(x, p),
        FitMethod::Burg => burg_fit(x, p),
        FitMethod::Mle => mle_fit(x, p, grid_size),
    }
}

/// `A(f) = 1 + sum_i a(i) exp(-j 2 pi f i)`.
pub fn ar_response(coeffs: &[f64], f: f64) -> Complex64 {
    let w = -2.0 * std::f64::consts::PI * f;
    coeffs.iter().enumerate().fold(Complex64::new(1.0, 0.0), |acc, (i, a)| {
        acc + Complex64::from_polar(*a, w * (i + 1) as f64)
    })
}

/// Parametric PSD `sigma2 / |A(f)|^2` on `grid_size` points of [0, 0.5].
pub fn ar_psd(model: &ArModel, grid_size: usize, sample_rate_hz: f64) -> Result<SpectrumEstimate> {
    if grid_size < 2 {
        return Err(Error::InvalidInput(format!(
            "PSD grid size must be >= 2, got {grid_size}"
        )));
    }
    if !model.is_stable() {
        return Err(Error::UnstableModel);
    }
    let freqs = frequency_grid(grid_size);
    let values = if model.sigma2() == 0.0 {
        vec![0.0; grid_size]
    } else {
        freqs
            .iter()
            .map(|&f| model.sigma2() / ar_response(model.coeffs(), f).norm_sqr())
            .collect()
    };
    SpectrumEstimate::new(freqs, values, sample_rate_hz)
}
