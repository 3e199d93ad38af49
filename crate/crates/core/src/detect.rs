//! Per-channel seizure-rhythm decisions and their evaluation against
//! annotations.
//!
//! A channel is flagged when its thresholded PSD keeps some power and the
//! delta+theta share of that surviving power reaches `rho`. Healthy channels
//! typically lose all power to the mask, or keep only beta-range content.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::ar::{ar_psd, fit};
use crate::config::{OrderChoice, RunConfig};
use crate::error::{Error, Result};
use crate::order::order_scan;
use crate::preprocess::{demean, difference};
use crate::spectral::{band_powers, threshold_psd, undifference, MaskedSpectrum};
use crate::types::{ConfusionCounts, FrequencyBand, Recording, TimeSeries};

/// Bands whose surviving power counts as low-frequency rhythm.
pub const LOW_BANDS: [&str; 2] = ["delta", "theta"];

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDecision {
    pub derivation: String,
    pub flagged: bool,
    pub dominant_band: Option<String>,
    pub low_band_fraction: f64,
    pub survivor_fraction: f64,
    /// AR order used for this channel.
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelOutcome {
    Decided(ChannelDecision),
    Failed { derivation: String, reason: String },
}

impl ChannelOutcome {
    pub fn derivation(&self) -> &str {
        match self {
            ChannelOutcome::Decided(d) => &d.derivation,
            ChannelOutcome::Failed { derivation, .. } => derivation,
        }
    }

    pub fn decision(&self) -> Option<&ChannelDecision> {
        match self {
            ChannelOutcome::Decided(d) => Some(d),
            ChannelOutcome::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub per_channel: Vec<ChannelOutcome>,
    pub parameters: RunConfig,
}

impl DetectionReport {
    pub fn flagged(&self) -> Vec<&str> {
        self.per_channel
            .iter()
            .filter_map(ChannelOutcome::decision)
            .filter(|d| d.flagged)
            .map(|d| d.derivation.as_str())
            .collect()
    }
}

/// Decision for one masked spectrum. `order` is carried through for reporting.
pub fn classify_channel(
    derivation: &str,
    masked: &MaskedSpectrum,
    bands: &[FrequencyBand],
    rho: f64,
    order: usize,
) -> Result<ChannelDecision> {
    let report = band_powers(masked, bands)?;
    let low = report.power_of(&LOW_BANDS);
    let low_band_fraction = if report.total_power > 0.0 {
        low / report.total_power
    } else {
        0.0
    };
    let flagged = report.total_power > 0.0 && low > 0.0 && low_band_fraction >= rho;
    Ok(ChannelDecision {
        derivation: derivation.to_string(),
        flagged,
        dominant_band: report.dominant_band,
        low_band_fraction,
        survivor_fraction: masked.survivor_fraction,
        order,
    })
}

/// Differencing, AR fit, PSD and mask for one channel.
pub fn masked_channel_psd(x: &TimeSeries, config: &RunConfig) -> Result<(MaskedSpectrum, usize)> {
    let y = demean(&difference(x, config.diff_order)?);
    let p = match config.order {
        OrderChoice::Fixed(p) => p,
        OrderChoice::Auto => {
            order_scan(&y, config.p_max, config.method, config.criterion, config.grid_size)?.selected_p
        }
    };
    let fitted = fit(&y, config.method, p, config.grid_size)?;
    let mut psd = ar_psd(&fitted.model, config.grid_size, x.sample_rate_hz())?;
    if config.undifference_correction {
        psd = undifference(&psd, config.diff_order)?;
    }
    Ok((threshold_psd(&psd, config.k), p))
}

fn channel_outcome(name: &str, x: &TimeSeries, config: &RunConfig) -> ChannelOutcome {
    let decided = masked_channel_psd(x, config)
        .and_then(|(masked, p)| classify_channel(name, &masked, &config.bands, config.rho, p));
    match decided {
        Ok(d) => ChannelOutcome::Decided(d),
        Err(e) => ChannelOutcome::Failed {
            derivation: name.to_string(),
            reason: e.to_string(),
        },
    }
}

/// Runs the full pipeline on every channel. Channels are processed in
/// parallel; the report keeps recording order.
pub fn detect_recording(rec: &Recording, config: &RunConfig) -> Result<DetectionReport> {
    config.validate()?;
    let per_channel = rec
        .channels()
        .par_iter()
        .map(|(name, x)| channel_outcome(name, x, config))
        .collect();
    Ok(DetectionReport {
        per_channel,
        parameters: config.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub counts: ConfusionCounts,
    /// `None` when there are no positive cases.
    pub sensitivity: Option<f64>,
    /// `None` when there are no negative cases.
    pub specificity: Option<f64>,
    pub accuracy: f64,
}

impl MetricsReport {
    pub fn from_counts(counts: ConfusionCounts) -> Result<Self> {
        if counts.total() == 0 {
            return Err(Error::InvalidInput("no cases to evaluate".into()));
        }
        let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
        Ok(Self {
            counts,
            sensitivity: ratio(counts.tp, counts.positives()),
            specificity: ratio(counts.tn, counts.negatives()),
            accuracy: (counts.tp + counts.tn) as f64 / counts.total() as f64,
        })
    }
}

/// Scores flagged channels against annotations. Key sets must match exactly
/// and every channel must carry a decision.
pub fn evaluate(predicted: &DetectionReport, annotations: &BTreeMap<String, bool>) -> Result<MetricsReport> {
    let decisions: BTreeMap<&str, &ChannelOutcome> =
        predicted.per_channel.iter().map(|o| (o.derivation(), o)).collect();
    let predictions = predicted
        .per_channel
        .iter()
        .map(|o| match o {
            ChannelOutcome::Decided(d) => Ok((d.derivation.clone(), d.flagged)),
            ChannelOutcome::Failed { derivation, reason } => Err(Error::FailedChannel {
                derivation: derivation.clone(),
                reason: reason.clone(),
            }),
        })
        .collect::<Result<BTreeMap<String, bool>>>();
    let missing: Vec<&str> = decisions
        .keys()
        .filter(|k| !annotations.contains_key(**k))
        .copied()
        .collect();
    let extra: Vec<&str> = annotations
        .keys()
        .filter(|k| !decisions.contains_key(k.as_str()))
        .map(String::as_str)
        .collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(Error::AnnotationMismatch {
            missing: missing.join(", "),
            extra: extra.join(", "),
        });
    }
    evaluate_labels(&predictions?, annotations)
}

/// Confusion tally over two label maps with identical keys.
pub fn evaluate_labels(predicted: &BTreeMap<String, bool>, truth: &BTreeMap<String, bool>) -> Result<MetricsReport> {
    let missing: Vec<&str> = predicted
        .keys()
        .filter(|k| !truth.contains_key(*k))
        .map(String::as_str)
        .collect();
    let extra: Vec<&str> = truth
        .keys()
        .filter(|k| !predicted.contains_key(*k))
        .map(String::as_str)
        .collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(Error::AnnotationMismatch {
            missing: missing.join(", "),
            extra: extra.join(", "),
        });
    }
    let mut counts = ConfusionCounts::default();
    for (name, &flag) in predicted {
        counts.record(truth[name], flag);
    }
    MetricsReport::from_counts(counts)
}
