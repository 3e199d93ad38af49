//! Information-criterion order selection.

use std::fmt;
use std::str::FromStr;

use crate::ar::{fit, FitMethod};
use crate::error::{Error, Result};
use crate::types::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Aic,
    Aicc,
    Bic,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Aic => "aic",
            Criterion::Aicc => "aicc",
            Criterion::Bic => "bic",
        })
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(Criterion::Aic),
            "aicc" => Ok(Criterion::Aicc),
            "bic" => Ok(Criterion::Bic),
            other => Err(Error::InvalidInput(format!("unknown criterion {other}"))),
        }
    }
}

fn check_sigma2(sigma2: f64) -> Result<()> {
    if sigma2 > 0.0 && sigma2.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveVariance(sigma2))
    }
}

/// `log(sigma2) + (n + 2p) / n`
pub fn aic(sigma2: f64, n: f64, p: usize) -> Result<f64> {
    check_sigma2(sigma2)?;
    Ok(sigma2.ln() + (n + 2.0 * p as f64) / n)
}

/// `log(sigma2) + (n + p) / (n - p - 2)`, defined only for `n > p + 2`.
pub fn aicc(sigma2: f64, n: f64, p: usize) -> Result<f64> {
    check_sigma2(sigma2)?;
    let denom = n - p as f64 - 2.0;
    if !(denom > 0.0) {
        return Err(Error::AiccUndefined { n: n as usize, p });
    }
    Ok(sigma2.ln() + (n + p as f64) / denom)
}

/// `log(sigma2) + p log(n) / n`
pub fn bic(sigma2: f64, n: f64, p: usize) -> Result<f64> {
    check_sigma2(sigma2)?;
    Ok(sigma2.ln() + p as f64 * n.ln() / n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderRecord {
    pub p: usize,
    pub sigma2: f64,
    pub aic: f64,
    /// Absent when `n <= p + 2`.
    pub aicc: Option<f64>,
    pub bic: f64,
}

impl OrderRecord {
    pub fn value(&self, criterion: Criterion) -> Option<f64> {
        match criterion {
            Criterion::Aic => Some(self.aic),
            Criterion::Aicc => self.aicc,
            Criterion::Bic => Some(self.bic),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderScanResult {
    pub per_order: Vec<OrderRecord>,
    pub selected_p: usize,
    pub criterion_used: Criterion,
}

/// Picks the order minimizing `criterion`; ties go to the smaller order.
pub fn select_order(per_order: &[OrderRecord], criterion: Criterion) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for rec in per_order {
        if let Some(v) = rec.value(criterion) {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((rec.p, v));
            }
        }
    }
    best.map(|(p, _)| p)
}

/// Evaluates AIC, AICc and BIC for orders `1..=p_max` from a single fit at
/// `p_max`, whose per-order prediction errors supply every `sigma2`.
pub fn order_scan(
    x: &TimeSeries,
    p_max: usize,
    method: FitMethod,
    criterion: Criterion,
    grid_size: usize,
) -> Result<OrderScanResult> {
    if p_max == 0 {
        return Err(Error::InvalidInput("p_max must be at least 1".into()));
    }
    if x.len() <= p_max + 2 {
        return Err(Error::TooFewSamples {
            len: x.len(),
            needed: p_max + 3,
        });
    }
    let sweep = fit(x, method, p_max, grid_size)?;
    let n = x.len() as f64;
    let per_order = (1..=p_max)
        .map(|p| {
            let sigma2 = sweep.prediction_error_by_order[p];
            Ok(OrderRecord {
                p,
                sigma2,
                aic: aic(sigma2, n, p)?,
                aicc: aicc(sigma2, n, p).ok(),
                bic: bic(sigma2, n, p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let selected_p = select_order(&per_order, criterion)
        .ok_or_else(|| Error::InvalidInput(format!("no order in 1..={p_max} has a defined {criterion}")))?;
    Ok(OrderScanResult {
        per_order,
        selected_p,
        criterion_used: criterion,
    })
}
