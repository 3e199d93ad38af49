use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use arpsd::config::{
    parse_bands, DEFAULT_GRID_SIZE, DEFAULT_K, DEFAULT_ORDER, DEFAULT_P_MAX, DEFAULT_RHO, DEFAULT_SAMPLE_RATE_HZ,
};
use arpsd::detect::masked_channel_psd;
use arpsd::io::{
    read_annotations, read_burst_spec, read_recording_csv, read_report_csv, write_annotations, write_psd_csv,
    write_recording_csv, write_report_csv, VERSION,
};
use arpsd::preprocess::{demean, difference};
use arpsd::synth::simulate_recording;
use arpsd::types::default_montage;
use arpsd::{
    detect_recording, evaluate, fit, order_scan, ChannelOutcome, Criterion, FitMethod, FitResult, OrderChoice,
    Recording, RunConfig, TimeSeries,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "arpsd",
    version,
    about = "Autoregressive PSD estimation and low-frequency rhythm detection for multichannel recordings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit an AR model to one channel and print its coefficients
    Fit {
        csv: PathBuf,
        #[arg(long)]
        channel: String,
        /// yw, burg, mle, or all (one column per method)
        #[arg(long, default_value = "burg")]
        method: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Tabulate AIC, AICc and BIC over orders 1..p_max for one channel
    OrderScan {
        csv: PathBuf,
        #[arg(long)]
        channel: String,
        #[arg(long, default_value = "burg")]
        method: FitMethod,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Write per-channel freq_hz,psd,psd_masked files
    Psd {
        csv: PathBuf,
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        channel: Option<String>,
        #[arg(long)]
        all: bool,
        /// Output directory, created if missing
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "burg")]
        method: FitMethod,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Flag channels whose thresholded PSD is dominated by delta+theta power
    Detect {
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "burg")]
        method: FitMethod,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Score a detection report against annotations
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
    },
    /// Generate a synthetic recording with resonant bursts and its annotations
    Simulate {
        /// Burst definitions: channel,center_hz,pole_radius,gain
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, default_value_t = 2560)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_RATE_HZ)]
        fs: f64,
        #[arg(long, default_value_t = 1.0)]
        noise_sigma: f64,
        /// Burst-to-noise power ratio (linear)
        #[arg(long, default_value_t = 10.0)]
        snr: f64,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// Fixed AR order, or "auto" to select per channel
    #[arg(long, default_value_t = OrderChoice::Fixed(DEFAULT_ORDER))]
    order: OrderChoice,
    #[arg(long, default_value = "bic")]
    criterion: Criterion,
    #[arg(long, default_value_t = DEFAULT_P_MAX)]
    p_max: usize,
    #[arg(long, default_value_t = 1)]
    diff_order: usize,
    /// Threshold multiplier on the mean PSD level
    #[arg(short = 'k', long = "k", default_value_t = DEFAULT_K, allow_negative_numbers = true)]
    k: f64,
    /// Minimum delta+theta share of surviving power
    #[arg(long, default_value_t = DEFAULT_RHO)]
    rho: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    grid_size: usize,
    /// Sample rate used when the input file has no "# fs=" line
    #[arg(long, default_value_t = DEFAULT_SAMPLE_RATE_HZ)]
    fs: f64,
    /// Bands as name:lo-hi;name:lo-hi;...
    #[arg(long)]
    bands: Option<String>,
    /// Divide the PSD by the differencer's frequency response
    #[arg(long)]
    undifference: bool,
}

impl ConfigArgs {
    fn build(&self, method: FitMethod) -> Result<RunConfig> {
        let mut config = RunConfig {
            method,
            order: self.order,
            criterion: self.criterion,
            p_max: self.p_max,
            diff_order: self.diff_order,
            k: self.k,
            rho: self.rho,
            grid_size: self.grid_size,
            sample_rate_hz: self.fs,
            undifference_correction: self.undifference,
            ..RunConfig::default()
        };
        if let Some(spec) = &self.bands {
            config.bands = parse_bands(spec)?;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Reads the recording; the file's own rate, when present, replaces `--fs`.
fn load(csv: &Path, config: &mut RunConfig) -> Result<Recording> {
    let rec = read_recording_csv(csv, config.sample_rate_hz)?;
    config.sample_rate_hz = rec.sample_rate_hz();
    Ok(rec)
}

fn channel<'a>(rec: &'a Recording, name: &str) -> Result<&'a TimeSeries> {
    rec.get(name).with_context(|| {
        format!(
            "channel {name} not in recording (have: {})",
            rec.names().collect::<Vec<_>>().join(", ")
        )
    })
}

/// The series the pipeline actually models: differenced and demeaned.
fn prepared(x: &TimeSeries, config: &RunConfig) -> Result<TimeSeries> {
    Ok(demean(&difference(x, config.diff_order)?))
}

fn resolve_order(y: &TimeSeries, method: FitMethod, config: &RunConfig) -> Result<usize> {
    Ok(match config.order {
        OrderChoice::Fixed(p) => p,
        OrderChoice::Auto => order_scan(y, config.p_max, method, config.criterion, config.grid_size)?.selected_p,
    })
}

fn fmt3(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-3 {
        format!("{v:.3e}")
    } else {
        format!("{v:.3}")
    }
}

fn print_table(title: &str, columns: &[String], rows: &[(String, Vec<Option<f64>>)]) {
    println!("{title}");
    print!("{:<8}", "");
    for c in columns {
        print!("{c:>13}");
    }
    println!();
    for (label, cells) in rows {
        print!("{label:<8}");
        for cell in cells {
            print!("{:>13}", cell.map_or_else(|| "-".to_string(), fmt3));
        }
        println!();
    }
}

fn run_fit(csv: &Path, name: &str, method: &str, args: &ConfigArgs) -> Result<()> {
    let methods: Vec<FitMethod> = if method.eq_ignore_ascii_case("all") {
        FitMethod::ALL.to_vec()
    } else {
        vec![method.parse()?]
    };
    let mut config = args.build(methods[0])?;
    let rec = load(csv, &mut config)?;
    let y = prepared(channel(&rec, name)?, &config)?;
    // a shared order keeps the columns comparable; "auto" selects it with Burg
    let order_method = if methods.len() > 1 { FitMethod::Burg } else { methods[0] };
    let p = resolve_order(&y, order_method, &config)?;
    let fits: Vec<FitResult> = methods
        .iter()
        .map(|m| fit(&y, *m, p, config.grid_size))
        .collect::<arpsd::Result<_>>()?;

    let columns: Vec<String> = methods.iter().map(ToString::to_string).collect();
    let mut rows: Vec<(String, Vec<Option<f64>>)> = (0..p)
        .map(|i| {
            (
                format!("â({})", i + 1),
                fits.iter().map(|f| Some(f.model.coeffs()[i])).collect(),
            )
        })
        .collect();
    rows.push(("σ̂²ε".into(), fits.iter().map(|f| Some(f.model.sigma2())).collect()));
    print_table(
        &format!(
            "AR({p}) fit of {name}: N = {}, fs = {} Hz, diff_order = {}",
            y.len(),
            config.sample_rate_hz,
            config.diff_order
        ),
        &columns,
        &rows,
    );
    println!();
    let rows: Vec<(String, Vec<Option<f64>>)> = (0..p)
        .map(|i| {
            (
                format!("k({})", i + 1),
                fits.iter().map(|f| f.reflection_coeffs.get(i).copied()).collect(),
            )
        })
        .collect();
    print_table("Reflection coefficients", &columns, &rows);
    Ok(())
}

fn run_order_scan(csv: &Path, name: &str, method: FitMethod, args: &ConfigArgs) -> Result<()> {
    let mut config = args.build(method)?;
    let rec = load(csv, &mut config)?;
    let y = prepared(channel(&rec, name)?, &config)?;
    let scan = order_scan(&y, config.p_max, method, config.criterion, config.grid_size)?;
    println!("Order scan of {name} ({method}, N = {})", y.len());
    println!("{:>4}{:>14}{:>14}{:>14}{:>14}", "p", "sigma2", "AIC", "AICc", "BIC");
    for r in &scan.per_order {
        let aicc = r.aicc.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        let mark = if r.p == scan.selected_p { "  *" } else { "" };
        println!(
            "{:>4}{:>14.6}{:>14.4}{:>14}{:>14.4}{mark}",
            r.p, r.sigma2, r.aic, aicc, r.bic
        );
    }
    println!("selected p = {} ({})", scan.selected_p, scan.criterion_used);
    Ok(())
}

fn run_psd(csv: &Path, name: Option<&str>, out: &Path, method: FitMethod, args: &ConfigArgs) -> Result<()> {
    let mut config = args.build(method)?;
    let rec = load(csv, &mut config)?;
    let names: Vec<String> = match name {
        Some(n) => {
            channel(&rec, n)?;
            vec![n.to_string()]
        }
        None => rec.names().map(str::to_string).collect(),
    };
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for n in names {
        let (masked, p) = masked_channel_psd(channel(&rec, &n)?, &config).with_context(|| format!("channel {n}"))?;
        let mut echo = config.echo();
        echo.push(("channel".into(), n.clone()));
        echo.push(("fitted_order".into(), p.to_string()));
        let path = out.join(format!("{n}.csv"));
        write_psd_csv(&path, &masked, &echo)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn run_detect(csv: &Path, out: &Path, method: FitMethod, args: &ConfigArgs) -> Result<()> {
    let mut config = args.build(method)?;
    let rec = load(csv, &mut config)?;
    let report = detect_recording(&rec, &config)?;
    write_report_csv(out, &report, &[("input".into(), csv.display().to_string())])?;
    for outcome in &report.per_channel {
        match outcome {
            ChannelOutcome::Decided(d) => println!(
                "{:<8} {:<3} dominant={:<6} low_band_fraction={:.4}",
                d.derivation,
                if d.flagged { "YES" } else { "no" },
                d.dominant_band.as_deref().unwrap_or("none"),
                d.low_band_fraction
            ),
            ChannelOutcome::Failed { derivation, reason } => {
                eprintln!("warning: channel {derivation} failed: {reason}");
            }
        }
    }
    println!(
        "{} of {} channels flagged",
        report.flagged().len(),
        report.per_channel.len()
    );
    Ok(())
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{:.2}%", 100.0 * x))
}

fn run_eval(pred: &Path, truth: &Path) -> Result<()> {
    let report = read_report_csv(pred)?;
    let annotations = read_annotations(truth)?;
    let m = evaluate(&report, &annotations)?;
    let c = m.counts;
    println!("TP={} FP={} TN={} FN={}", c.tp, c.fp, c.tn, c.fn_);
    println!("sensitivity {}", pct(m.sensitivity));
    println!("specificity {}", pct(m.specificity));
    println!("accuracy    {}", pct(Some(m.accuracy)));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_simulate(
    spec: &Path,
    seed: u64,
    out: &Path,
    truth: &Path,
    n: usize,
    fs_hz: f64,
    noise_sigma: f64,
    snr: f64,
) -> Result<()> {
    let bursts = read_burst_spec(spec)?;
    let montage = default_montage();
    let (rec, annotations): (Recording, BTreeMap<String, bool>) =
        simulate_recording(&montage, n, fs_hz, noise_sigma, &bursts, snr, seed)?;
    let echo = vec![
        ("seed".to_string(), seed.to_string()),
        ("n".to_string(), n.to_string()),
        ("noise_sigma".to_string(), noise_sigma.to_string()),
        ("snr".to_string(), snr.to_string()),
        ("spec".to_string(), spec.display().to_string()),
        (
            "rng".to_string(),
            "ChaCha8 (rand_chacha 0.9), SplitMix64 stream seeds".to_string(),
        ),
    ];
    write_recording_csv(out, &rec, &echo)?;
    write_annotations(truth, montage.iter().map(|m| (m.as_str(), annotations[m])), &echo)?;
    println!(
        "wrote {} channels x {} samples to {}; {} burst channel(s)",
        rec.num_channels(),
        rec.num_samples(),
        out.display(),
        annotations.values().filter(|b| **b).count()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit {
            csv,
            channel,
            method,
            config,
        } => run_fit(&csv, &channel, &method, &config),
        Command::OrderScan {
            csv,
            channel,
            method,
            config,
        } => run_order_scan(&csv, &channel, method, &config),
        Command::Psd {
            csv,
            channel,
            all,
            out,
            method,
            config,
        } => {
            if all == channel.is_some() {
                bail!("give exactly one of --channel or --all");
            }
            run_psd(&csv, channel.as_deref(), &out, method, &config)
        }
        Command::Detect {
            csv,
            out,
            method,
            config,
        } => run_detect(&csv, &out, method, &config),
        Command::Eval { pred, truth } => run_eval(&pred, &truth),
        Command::Simulate {
            spec,
            seed,
            out,
            truth,
            n,
            fs,
            noise_sigma,
            snr,
        } => run_simulate(&spec, seed, &out, &truth, n, fs, noise_sigma, snr),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("arpsd {VERSION}: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
