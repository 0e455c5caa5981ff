//! Shared CLI plumbing: configuration precedence, run manifests, CSV
//! reading, and the optional SVG plots.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Flat `key=value` configuration file; precedence is flags > file >
/// defaults (and for the seed, the `INTERLACE_SEED` variable slots in
/// between file and default).
pub struct Resolver {
    file_values: BTreeMap<String, String>,
    /// Echo of every resolved value, recorded into the manifest.
    pub resolved: BTreeMap<String, String>,
}

impl Resolver {
    pub fn new(config_path: Option<&Path>) -> io::Result<Self> {
        let mut file_values = BTreeMap::new();
        if let Some(path) = config_path {
            let text = fs::read_to_string(path)?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                match line.split_once('=') {
                    Some((k, v)) => {
                        file_values.insert(k.trim().to_string(), v.trim().to_string());
                    }
                    None => {
                        return Err(io::Error::new(
                            io::ErrorKind::InvalidData,
                            format!("config line {} is not key=value: {line:?}", lineno + 1),
                        ))
                    }
                }
            }
        }
        Ok(Self { file_values, resolved: BTreeMap::new() })
    }

    fn echo<T: std::fmt::Debug>(&mut self, key: &str, value: &T) {
        self.resolved.insert(key.to_string(), format!("{value:?}"));
    }

    /// Flag value, else config-file value, else the default.
    pub fn get<T: FromStr + std::fmt::Debug>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T, String> {
        let value = match flag {
            Some(v) => v,
            None => match self.file_values.get(key) {
                Some(raw) => raw
                    .parse::<T>()
                    .map_err(|_| format!("config value for {key} is invalid: {raw:?}"))?,
                None => default,
            },
        };
        self.echo(key, &value);
        Ok(value)
    }

    /// Like [`Self::get`] but with no default: the flag or file must
    /// provide it.
    pub fn require<T: FromStr + std::fmt::Debug>(
        &mut self,
        key: &str,
        flag: Option<T>,
    ) -> Result<T, String> {
        let value = match flag {
            Some(v) => v,
            None => match self.file_values.get(key) {
                Some(raw) => raw
                    .parse::<T>()
                    .map_err(|_| format!("config value for {key} is invalid: {raw:?}"))?,
                None => return Err(format!("missing required parameter --{key}")),
            },
        };
        self.echo(key, &value);
        Ok(value)
    }

    /// Optional value with no default at all.
    pub fn optional<T: FromStr + std::fmt::Debug>(
        &mut self,
        key: &str,
        flag: Option<T>,
    ) -> Result<Option<T>, String> {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.file_values.get(key) {
                Some(raw) => Some(
                    raw.parse::<T>()
                        .map_err(|_| format!("config value for {key} is invalid: {raw:?}"))?,
                ),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.echo(key, v);
        }
        Ok(value)
    }

    /// Root seed: flag > config file > `INTERLACE_SEED` > 42.
    pub fn seed(&mut self, flag: Option<u64>) -> Result<u64, String> {
        let value = match flag {
            Some(v) => v,
            None => match self.file_values.get("seed") {
                Some(raw) => raw
                    .parse::<u64>()
                    .map_err(|_| format!("config value for seed is invalid: {raw:?}"))?,
                None => match std::env::var("INTERLACE_SEED") {
                    Ok(raw) => raw
                        .parse::<u64>()
                        .map_err(|_| format!("INTERLACE_SEED is invalid: {raw:?}"))?,
                    Err(_) => 42,
                },
            },
        };
        self.resolved.insert("seed".into(), value.to_string());
        Ok(value)
    }
}

/// Parses a comma-separated list.
pub fn parse_list<T: FromStr>(raw: &str, what: &str) -> Result<Vec<T>, String> {
    if raw.trim().is_empty() {
        return Ok(Vec::new());
    }
    raw.split(',')
        .map(|tok| tok.trim().parse::<T>().map_err(|_| format!("bad {what} entry {tok:?}")))
        .collect()
}

/// Parses a time grid given as `lo:hi:count` or as an explicit comma list.
pub fn parse_grid(raw: &str) -> Result<Vec<f64>, String> {
    if raw.contains(':') {
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid must be lo:hi:count, got {raw:?}"));
        }
        let lo: f64 = parts[0].parse().map_err(|_| format!("bad grid lo {:?}", parts[0]))?;
        let hi: f64 = parts[1].parse().map_err(|_| format!("bad grid hi {:?}", parts[1]))?;
        let count: usize =
            parts[2].parse().map_err(|_| format!("bad grid count {:?}", parts[2]))?;
        if !(hi > lo) || count < 2 {
            return Err("grid needs hi > lo and count ≥ 2".into());
        }
        Ok((0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect())
    } else {
        let grid = parse_list::<f64>(raw, "grid")?;
        if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err("grid must be strictly increasing with at least two points".into());
        }
        Ok(grid)
    }
}

// ---------------------------------------------------------------------------
// Run manifests
// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Reproducibility record written next to every data output: rerunning the
/// echoed command on the same build reproduces the digested files byte for
/// byte.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub root_seed: u64,
    pub tool_version: String,
    pub timestamp: String,
    pub config: BTreeMap<String, String>,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_file(path: &Path) -> io::Result<(String, u64)> {
    let bytes = fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    Ok((format!("{digest:x}"), bytes.len() as u64))
}

/// Writes `<out stem>.manifest.json` describing the run.
pub fn write_manifest(
    primary_out: &Path,
    root_seed: u64,
    config: &BTreeMap<String, String>,
    outputs: &[PathBuf],
) -> io::Result<PathBuf> {
    let digests = outputs
        .iter()
        .map(|p| {
            let (sha256, bytes) = sha256_file(p)?;
            Ok(OutputDigest { path: p.display().to_string(), sha256, bytes })
        })
        .collect::<io::Result<Vec<_>>>()?;
    let manifest = RunManifest {
        command: std::env::args().collect(),
        root_seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        config: config.clone(),
        outputs: digests,
    };
    let path = with_suffix(primary_out, ".manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json)?;
    Ok(path)
}

/// `foo.csv` → `foo<suffix>` (replacing the extension).
pub fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    path.with_file_name(format!("{stem}{suffix}"))
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// A fully numeric CSV table with named columns.
pub struct CsvTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn read(path: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines();
        let headers: Vec<String> = lines
            .next()
            .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "empty CSV"))?
            .split(',')
            .map(|h| h.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|tok| tok.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| {
                    io::Error::new(
                        io::ErrorKind::InvalidData,
                        format!("CSV line {}: {e}", lineno + 2),
                    )
                })?;
            if row.len() != headers.len() {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("CSV line {} has {} fields, expected {}", lineno + 2, row.len(), headers.len()),
                ));
            }
            rows.push(row);
        }
        Ok(Self { headers, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// The value column: `scaled_value` when present, else `value`.
    pub fn value_column(&self) -> Result<usize, String> {
        self.column("scaled_value")
            .or_else(|| self.column("value"))
            .ok_or_else(|| "CSV has neither a value nor a scaled_value column".into())
    }
}

/// Buffered CSV writer with a fixed header.
pub struct CsvWriter {
    inner: io::BufWriter<fs::File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &str) -> io::Result<Self> {
        let file = fs::File::create(path)?;
        let mut inner = io::BufWriter::new(file);
        writeln!(inner, "{header}")?;
        Ok(Self { inner })
    }

    pub fn row(&mut self, fields: std::fmt::Arguments<'_>) -> io::Result<()> {
        writeln!(self.inner, "{fields}")
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

// ---------------------------------------------------------------------------
// SVG plots
// ---------------------------------------------------------------------------

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 420.0;
const MARGIN: f64 = 45.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn svg_open() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
         viewBox=\"0 0 {SVG_W} {SVG_H}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn polyline(points: &[(f64, f64)], color: &str) -> String {
    let coords: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    format!(
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        coords.join(" ")
    )
}

fn axis_label(x: f64, y: f64, text: &str, color: &str) -> String {
    format!("<text x=\"{x:.1}\" y=\"{y:.1}\" font-size=\"12\" fill=\"{color}\">{text}</text>\n")
}

/// Overlaid empirical CDFs, one step curve per labelled sample set.
pub fn ecdf_svg(series: &[(String, Vec<f64>)]) -> String {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, xs) in series {
        for &x in xs {
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    if !(hi > lo) {
        hi = lo + 1.0;
    }
    let to_x = |v: f64| MARGIN + (v - lo) / (hi - lo) * (SVG_W - 2.0 * MARGIN);
    let to_y = |p: f64| SVG_H - MARGIN - p * (SVG_H - 2.0 * MARGIN);
    let mut svg = svg_open();
    svg.push_str(&polyline(&[(MARGIN, to_y(0.0)), (SVG_W - MARGIN, to_y(0.0))], "#999"));
    svg.push_str(&polyline(&[(MARGIN, to_y(0.0)), (MARGIN, to_y(1.0))], "#999"));
    for (i, (label, xs)) in series.iter().enumerate() {
        let mut sorted = xs.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sorted.len() as f64;
        let mut pts = Vec::with_capacity(sorted.len() + 1);
        pts.push((to_x(sorted[0]), to_y(0.0)));
        for (j, &x) in sorted.iter().enumerate() {
            pts.push((to_x(x), to_y((j + 1) as f64 / n)));
        }
        let color = COLORS[i % COLORS.len()];
        svg.push_str(&polyline(&pts, color));
        svg.push_str(&axis_label(MARGIN + 8.0, MARGIN + 16.0 * (i as f64 + 1.0), label, color));
    }
    svg.push_str(&axis_label(SVG_W - MARGIN - 40.0, SVG_H - MARGIN + 16.0, &format!("{hi:.3}"), "#333"));
    svg.push_str(&axis_label(MARGIN, SVG_H - MARGIN + 16.0, &format!("{lo:.3}"), "#333"));
    svg.push_str("</svg>\n");
    svg
}

/// Quantile fan across scales: the 5%, 25%, 75%, and 95% bands per label.
pub fn quantile_fan_svg(rows: &[(f64, Vec<f64>)]) -> String {
    let quantiles = [0.05, 0.25, 0.75, 0.95];
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut fan: Vec<(f64, Vec<f64>)> = Vec::new();
    for (label, xs) in rows {
        let mut sorted = xs.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let qs: Vec<f64> =
            quantiles.iter().map(|&q| interlace::stats::quantile(&sorted, q)).collect();
        for &v in &qs {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        fan.push((*label, qs));
    }
    if !(hi > lo) {
        hi = lo + 1.0;
    }
    let xmin = fan.first().map(|r| r.0).unwrap_or(0.0);
    let xmax = fan.last().map(|r| r.0).unwrap_or(1.0).max(xmin + 1.0);
    let to_x = |v: f64| MARGIN + (v - xmin) / (xmax - xmin) * (SVG_W - 2.0 * MARGIN);
    let to_y = |v: f64| SVG_H - MARGIN - (v - lo) / (hi - lo) * (SVG_H - 2.0 * MARGIN);
    let mut svg = svg_open();
    for (qi, &q) in quantiles.iter().enumerate() {
        let pts: Vec<(f64, f64)> =
            fan.iter().map(|(label, qs)| (to_x(*label), to_y(qs[qi]))).collect();
        let color = COLORS[qi % COLORS.len()];
        svg.push_str(&polyline(&pts, color));
        svg.push_str(&axis_label(
            SVG_W - MARGIN + 2.0,
            to_y(fan.last().unwrap().1[qi]),
            &format!("q{:02}", (q * 100.0) as u32),
            color,
        ));
    }
    for (label, _) in &fan {
        svg.push_str(&axis_label(to_x(*label) - 8.0, SVG_H - MARGIN + 16.0, &format!("{label}"), "#333"));
    }
    svg.push_str("</svg>\n");
    svg
}
