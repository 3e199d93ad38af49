//! CSV file formats.
//!
//! Every writer starts the file with `# key=value` echo lines; every reader
//! skips lines starting with `#`. A recording file may carry `# fs=<hz>`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::config::{parse_bands, OrderChoice, RunConfig};
use crate::detect::{ChannelDecision, ChannelOutcome, DetectionReport};
use crate::error::{Error, Result};
use crate::spectral::MaskedSpectrum;
use crate::synth::BurstSpec;
use crate::types::{Recording, TimeSeries};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

struct Table {
    /// Values of `# key=value` comment lines, in file order.
    echo: Vec<(String, String)>,
    header: Vec<String>,
    /// (1-based line number, cells)
    rows: Vec<(u64, Vec<String>)>,
}

fn read_table(path: &Path) -> Result<Table> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_table(&text, &path.display().to_string())
}

fn parse_table(text: &str, source: &str) -> Result<Table> {
    let echo = text
        .lines()
        .filter_map(|l| l.trim_start().strip_prefix('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect();

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let parse_err = |line: u64, message: String| Error::Parse {
        path: source.to_string(),
        line,
        message,
    };
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != header.len() {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        rows.push((line, record.iter().map(str::to_string).collect()));
    }
    Ok(Table { echo, header, rows })
}

fn echo_block(pairs: &[(String, String)]) -> String {
    let mut s = format!("# arpsd_version={VERSION}\n");
    for (k, v) in pairs {
        s.push_str(&format!("# {k}={v}\n"));
    }
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_f64(cell: &str, line: u64, column: &str, source: &str) -> Result<f64> {
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            path: source.to_string(),
            line,
            message: format!("column {column}: '{cell}' is not a finite number"),
        })
}

/// Reads a recording: header row of derivation names, one row per sample.
/// The sample rate comes from a `# fs=<hz>` line, else `default_fs`.
pub fn read_recording_csv(path: &Path, default_fs: f64) -> Result<Recording> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_recording_csv(&text, &path.display().to_string(), default_fs)
}

pub fn parse_recording_csv(text: &str, source: &str, default_fs: f64) -> Result<Recording> {
    let table = parse_table(text, source)?;
    let fs_hz = match table.echo.iter().find(|(k, _)| k == "fs") {
        Some((_, v)) => parse_f64(v, 0, "fs", source)?,
        None => default_fs,
    };
    for (i, name) in table.header.iter().enumerate() {
        if name.is_empty() {
            return Err(Error::Parse {
                path: source.into(),
                line: 1,
                message: format!("empty header in column {}", i + 1),
            });
        }
        if table.header[..i].contains(name) {
            return Err(Error::Parse {
                path: source.into(),
                line: 1,
                message: format!("duplicate header {name}"),
            });
        }
    }
    let mut columns = vec![Vec::with_capacity(table.rows.len()); table.header.len()];
    for (line, cells) in &table.rows {
        for (c, cell) in cells.iter().enumerate() {
            columns[c].push(parse_f64(cell, *line, &table.header[c], source)?);
        }
    }
    let channels = table
        .header
        .into_iter()
        .zip(columns)
        .map(|(name, samples)| Ok((name, TimeSeries::new(samples, fs_hz)?)))
        .collect::<Result<Vec<_>>>()?;
    Recording::new(channels)
}

pub fn format_recording_csv(rec: &Recording, echo: &[(String, String)]) -> String {
    let mut out = echo_block(echo);
    out.push_str(&format!("# fs={}\n", rec.sample_rate_hz()));
    out.push_str(&rec.names().collect::<Vec<_>>().join(","));
    out.push('\n');
    for i in 0..rec.num_samples() {
        let row: Vec<String> = rec
            .channels()
            .iter()
            .map(|(_, ts)| ts.samples()[i].to_string())
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_recording_csv(path: &Path, rec: &Recording, echo: &[(String, String)]) -> Result<()> {
    write_file(path, &format_recording_csv(rec, echo))
}

/// Reads `derivation,label` rows with labels 0 or 1.
pub fn read_annotations(path: &Path) -> Result<BTreeMap<String, bool>> {
    let table = read_table(path)?;
    let source = path.display().to_string();
    if table.header != ["derivation", "label"] {
        return Err(Error::Parse {
            path: source,
            line: 1,
            message: format!("expected header 'derivation,label', found '{}'", table.header.join(",")),
        });
    }
    let mut out = BTreeMap::new();
    for (line, cells) in table.rows {
        let label = match cells[1].as_str() {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Parse {
                    path: source,
                    line,
                    message: format!("label must be 0 or 1, found '{other}'"),
                })
            }
        };
        if out.insert(cells[0].clone(), label).is_some() {
            return Err(Error::Parse {
                path: source,
                line,
                message: format!("duplicate derivation {}", cells[0]),
            });
        }
    }
    Ok(out)
}

/// Writes annotations in the given channel order.
pub fn write_annotations<'a>(
    path: &Path,
    labels: impl IntoIterator<Item = (&'a str, bool)>,
    echo: &[(String, String)],
) -> Result<()> {
    let mut out = echo_block(echo);
    out.push_str("derivation,label\n");
    for (name, label) in labels {
        out.push_str(&format!("{name},{}\n", u8::from(label)));
    }
    write_file(path, &out)
}

pub const REPORT_HEADER: &str = "derivation,flagged,dominant_band,low_band_fraction,survivor_fraction,order,error";

pub fn format_report_csv(report: &DetectionReport, extra_echo: &[(String, String)]) -> String {
    let mut echo = report.parameters.echo();
    echo.extend_from_slice(extra_echo);
    let mut out = echo_block(&echo);
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for outcome in &report.per_channel {
        match outcome {
            ChannelOutcome::Decided(d) => out.push_str(&format!(
                "{},{},{},{},{},{},\n",
                d.derivation,
                u8::from(d.flagged),
                d.dominant_band.as_deref().unwrap_or("none"),
                d.low_band_fraction,
                d.survivor_fraction,
                d.order
            )),
            ChannelOutcome::Failed { derivation, reason } => {
                out.push_str(&format!("{derivation},,,,,,\"{}\"\n", reason.replace('"', "'")))
            }
        }
    }
    out
}

pub fn write_report_csv(path: &Path, report: &DetectionReport, extra_echo: &[(String, String)]) -> Result<()> {
    write_file(path, &format_report_csv(report, extra_echo))
}

/// Rebuilds the configuration from a report's echo lines; unknown keys are
/// ignored and missing ones keep their defaults.
pub fn config_from_echo(echo: &[(String, String)]) -> Result<RunConfig> {
    let mut c = RunConfig::default();
    let num = |k: &str, v: &str| {
        v.parse::<f64>()
            .map_err(|_| Error::InvalidInput(format!("echo {k}={v} is not a number")))
    };
    let int = |k: &str, v: &str| {
        v.parse::<usize>()
            .map_err(|_| Error::InvalidInput(format!("echo {k}={v} is not an integer")))
    };
    for (k, v) in echo {
        match k.as_str() {
            "method" => c.method = v.parse()?,
            "order" => c.order = v.parse::<OrderChoice>()?,
            "criterion" => c.criterion = v.parse()?,
            "p_max" => c.p_max = int(k, v)?,
            "diff_order" => c.diff_order = int(k, v)?,
            "k" => c.k = num(k, v)?,
            "rho" => c.rho = num(k, v)?,
            "grid_size" => c.grid_size = int(k, v)?,
            "sample_rate_hz" => c.sample_rate_hz = num(k, v)?,
            "bands" => c.bands = parse_bands(v)?,
            "undifference_correction" => {
                c.undifference_correction = v
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("echo {k}={v} is not a boolean")))?
            }
            _ => {}
        }
    }
    Ok(c)
}

pub fn read_report_csv(path: &Path) -> Result<DetectionReport> {
    let table = read_table(path)?;
    let source = path.display().to_string();
    let expected: Vec<&str> = REPORT_HEADER.split(',').collect();
    if table.header != expected {
        return Err(Error::Parse {
            path: source,
            line: 1,
            message: format!("expected header '{REPORT_HEADER}'"),
        });
    }
    let mut per_channel = Vec::with_capacity(table.rows.len());
    for (line, cells) in table.rows {
        let derivation = cells[0].clone();
        if !cells[6].is_empty() {
            per_channel.push(ChannelOutcome::Failed {
                derivation,
                reason: cells[6].clone(),
            });
            continue;
        }
        let flagged = match cells[1].as_str() {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Parse {
                    path: source,
                    line,
                    message: format!("flagged must be 0 or 1, found '{other}'"),
                })
            }
        };
        let order = cells[5].parse::<usize>().map_err(|_| Error::Parse {
            path: source.clone(),
            line,
            message: format!("order '{}' is not an integer", cells[5]),
        })?;
        per_channel.push(ChannelOutcome::Decided(ChannelDecision {
            derivation,
            flagged,
            dominant_band: (cells[2] != "none").then(|| cells[2].clone()),
            low_band_fraction: parse_f64(&cells[3], line, "low_band_fraction", &source)?,
            survivor_fraction: parse_f64(&cells[4], line, "survivor_fraction", &source)?,
            order,
        }));
    }
    Ok(DetectionReport {
        per_channel,
        parameters: config_from_echo(&table.echo)?,
    })
}

/// `freq_hz,psd,psd_masked` rows for plotting.
pub fn format_psd_csv(masked: &MaskedSpectrum, echo: &[(String, String)]) -> String {
    let mut echo = echo.to_vec();
    echo.push(("mean_power".into(), masked.mean_power.to_string()));
    echo.push(("threshold".into(), (masked.k * masked.mean_power).to_string()));
    echo.push(("survivor_fraction".into(), masked.survivor_fraction.to_string()));
    let mut out = echo_block(&echo);
    out.push_str("freq_hz,psd,psd_masked\n");
    for ((f, p), m) in masked
        .base
        .freqs_hz()
        .iter()
        .zip(masked.base.values())
        .zip(&masked.values)
    {
        out.push_str(&format!("{f},{p},{m}\n"));
    }
    out
}

pub fn write_psd_csv(path: &Path, masked: &MaskedSpectrum, echo: &[(String, String)]) -> Result<()> {
    write_file(path, &format_psd_csv(masked, echo))
}

/// Reads burst definitions: header `channel,center_hz,pole_radius,gain`.
pub fn read_burst_spec(path: &Path) -> Result<Vec<BurstSpec>> {
    let table = read_table(path)?;
    let source = path.display().to_string();
    if table.header != ["channel", "center_hz", "pole_radius", "gain"] {
        return Err(Error::Parse {
            path: source,
            line: 1,
            message: "expected header 'channel,center_hz,pole_radius,gain'".into(),
        });
    }
    table
        .rows
        .into_iter()
        .map(|(line, cells)| {
            Ok(BurstSpec {
                channel: cells[0].clone(),
                center_hz: parse_f64(&cells[1], line, "center_hz", &source)?,
                pole_radius: parse_f64(&cells[2], line, "pole_radius", &source)?,
                gain: parse_f64(&cells[3], line, "gain", &source)?,
            })
        })
        .collect()
}
