//! Autoregressive spectral estimation for multichannel EEG-like signals.
//!
//! The pipeline differences each channel toward stationarity, fits an AR
//! model (Yule-Walker, Burg or periodogram-based maximum likelihood), forms
//! the parametric PSD `sigma2 / |A(f)|^2`, keeps only spectral values at or
//! above `k` times the mean level, and flags channels whose surviving power
//! is dominated by delta/theta rhythms.

// `!(x < bound)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ar;
pub mod config;
pub mod detect;
pub mod error;
pub mod io;
pub mod order;
pub mod preprocess;
pub mod spectral;
pub mod synth;
pub mod types;

pub use ar::{ar_psd, burg_fit, burg_recursion, fit, levinson_durbin, mle_fit, yule_walker_fit, FitMethod, FitResult};
pub use config::{OrderChoice, RunConfig};
pub use detect::{
    classify_channel, detect_recording, evaluate, ChannelDecision, ChannelOutcome, DetectionReport, MetricsReport,
};
pub use error::{Error, Result};
pub use order::{aic, aicc, bic, order_scan, Criterion, OrderScanResult};
pub use spectral::{band_powers, threshold_psd, BandPowerReport, MaskedSpectrum};
pub use types::{
    default_bands, default_montage, ArModel, AutocovarianceSeq, ConfusionCounts, FrequencyBand, Recording,
    SpectrumEstimate, TimeSeries,
};
