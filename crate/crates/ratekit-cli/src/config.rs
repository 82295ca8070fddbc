//! Flag parsing helpers and the resolved run configuration. Values come
//! from three layers: command-line flags win over config-file entries,
//! which win over the documented defaults. The config file is a flat
//! key=value text file whose keys mirror the long flag names.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use ratekit::coding::RelayScheme;
use ratekit::schemes::{ConstantVariant, Method};

use crate::output::OutputFormat;

/// Invalid configuration, reported on stderr with exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn parse_count(s: &str) -> Result<u64, String> {
    let v: f64 = s
        .parse()
        .map_err(|_| format!("'{s}' is not a number"))?;
    if !v.is_finite() || v < 0.5 || v > 9e15 {
        return Err(format!("node count '{s}' out of range"));
    }
    Ok(v.round() as u64)
}

pub fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .parse()
        .map_err(|_| format!("'{s}' is not a number"))?;
    if !v.is_finite() || v <= 0.0 {
        return Err(format!("'{s}' must be positive"));
    }
    Ok(v)
}

pub fn parse_method(s: &str) -> Result<Method, String> {
    if s == "single" {
        return Ok(Method::SingleStage);
    }
    Method::from_str(s)
}

pub fn parse_scheme(s: &str) -> Result<RelayScheme, String> {
    match s {
        "qmf" => Ok(RelayScheme::QmfOptimal),
        "qf" => Ok(RelayScheme::Qf),
        other => Err(format!("unknown relay scheme '{other}', expected qmf or qf")),
    }
}

pub fn parse_constants(s: &str) -> Result<ConstantVariant, String> {
    ConstantVariant::from_str(s)
}

/// A one-axis grid request, written LO:HI:POINTS. Numbers accept the same
/// scientific shorthand as --n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

pub fn parse_range(s: &str) -> Result<RangeSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("range '{s}' must be LO:HI:POINTS"));
    }
    let lo = parse_positive(parts[0])?;
    let hi = parse_positive(parts[1])?;
    let points: usize = parts[2]
        .parse()
        .map_err(|_| format!("'{}' is not a point count", parts[2]))?;
    if hi < lo {
        return Err(format!("range '{s}' is empty"));
    }
    if points < 1 || (points == 1 && hi != lo) {
        return Err(format!("range '{s}' needs at least 2 points"));
    }
    Ok(RangeSpec { lo, hi, points })
}

impl RangeSpec {
    /// Geometric grid, inclusive of both ends.
    pub fn log_grid(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.lo];
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (0..self.points)
            .map(|k| (a + (b - a) * k as f64 / (self.points - 1) as f64).exp())
            .collect()
    }

    /// Arithmetic grid, inclusive of both ends.
    pub fn lin_grid(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.lo];
        }
        (0..self.points)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / (self.points - 1) as f64)
            .collect()
    }
}

const FILE_KEYS: [&str; 15] = [
    "alpha", "n", "n-range", "range", "method", "q", "t", "tmax", "l", "snr", "seed", "out",
    "format", "constants", "scheme",
];

/// Parses a flat key=value file. '#' starts a comment, blank lines are
/// skipped, keys are matched case-insensitively against the flag names.
pub fn load_file(path: &PathBuf) -> Result<HashMap<String, String>, ConfigError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError(format!(
                "{}:{}: expected key=value, got '{line}'",
                path.display(),
                lineno + 1
            )));
        };
        let key = key.trim().to_ascii_lowercase();
        if !FILE_KEYS.contains(&key.as_str()) {
            return Err(ConfigError(format!(
                "{}:{}: unknown key '{key}'",
                path.display(),
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn file_value<T>(
    file: &HashMap<String, String>,
    key: &str,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<Option<T>, ConfigError> {
    match file.get(key) {
        None => Ok(None),
        Some(raw) => parse(raw)
            .map(Some)
            .map_err(|e| ConfigError(format!("config key '{key}': {e}"))),
    }
}

/// Fully resolved run parameters with defaults applied.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub alpha: f64,
    /// Node count when given; commands fall back to their own default.
    pub n: Option<u64>,
    pub n_range: Option<RangeSpec>,
    pub methods: Vec<Method>,
    /// Expansion factor when given explicitly; searches use {1, 2}.
    pub q: Option<u32>,
    /// Fixed stage count; None lets hierarchical schemes search.
    pub t: Option<usize>,
    pub tmax: usize,
    pub l: Option<u32>,
    pub snr: Option<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub constants: ConstantVariant,
    pub scheme: RelayScheme,
    pub range: Option<RangeSpec>,
}

impl RunConfig {
    pub fn format_or(&self, default: OutputFormat) -> OutputFormat {
        self.format.unwrap_or(default)
    }

    /// Header comment block shared by every CSV the tool writes.
    pub fn csv_header(&self, command: &str) -> Vec<(String, String)> {
        vec![
            ("tool".into(), format!("ratekit {}", env!("CARGO_PKG_VERSION"))),
            ("command".into(), command.to_string()),
            ("constants".into(), self.constants.label().into()),
            ("seed".into(), self.seed.to_string()),
        ]
    }
}

/// Merges flags, optional config file and defaults into a RunConfig.
pub fn resolve(args: &crate::CommonArgs) -> Result<RunConfig, ConfigError> {
    let file = match &args.config {
        Some(path) => load_file(path)?,
        None => HashMap::new(),
    };
    let alpha = args
        .alpha
        .or(file_value(&file, "alpha", |s| {
            s.parse::<f64>().map_err(|e| e.to_string())
        })?)
        .unwrap_or(7.0);
    if !alpha.is_finite() || alpha < 2.0 {
        return Err(ConfigError(format!("alpha must be >= 2, got {alpha}")));
    }
    let n = args.n.or(file_value(&file, "n", parse_count)?);
    let n_range = args
        .n_range
        .or(file_value(&file, "n-range", parse_range)?);
    let mut methods = args.method.clone();
    if methods.is_empty() {
        if let Some(m) = file_value(&file, "method", parse_method_list)? {
            methods = m;
        }
    }
    let q = args.q.or(file_value(&file, "q", |s| {
        s.parse::<u32>().map_err(|e| e.to_string())
    })?);
    if q == Some(0) {
        return Err(ConfigError("q must be >= 1".into()));
    }
    let t = args.t.or(file_value(&file, "t", |s| {
        s.parse::<usize>().map_err(|e| e.to_string())
    })?);
    let tmax = args
        .tmax
        .or(file_value(&file, "tmax", |s| {
            s.parse::<usize>().map_err(|e| e.to_string())
        })?)
        .unwrap_or(8);
    for (name, v) in [("t", t.unwrap_or(1)), ("tmax", tmax)] {
        if !(1..=8).contains(&v) {
            return Err(ConfigError(format!("{name} must lie in 1..=8, got {v}")));
        }
    }
    let l = args.l.or(file_value(&file, "l", |s| {
        s.parse::<u32>().map_err(|e| e.to_string())
    })?);
    if let Some(l) = l {
        if l < 2 {
            return Err(ConfigError(format!("L must be >= 2, got {l}")));
        }
    }
    let snr = args.snr.or(file_value(&file, "snr", parse_positive)?);
    let seed = args
        .seed
        .or(file_value(&file, "seed", |s| {
            s.parse::<u64>().map_err(|e| e.to_string())
        })?)
        .unwrap_or(42);
    let out = args
        .out
        .clone()
        .or(file.get("out").map(PathBuf::from));
    let format = match args.format {
        Some(f) => Some(f),
        None => file_value(&file, "format", |s| match s {
            "csv" => Ok(OutputFormat::Csv),
            "pretty-table" => Ok(OutputFormat::PrettyTable),
            other => Err(format!("unknown format '{other}'")),
        })?,
    };
    let constants = args
        .constants
        .or(file_value(&file, "constants", parse_constants)?)
        .unwrap_or_default();
    let scheme = args
        .scheme
        .or(file_value(&file, "scheme", parse_scheme)?)
        .unwrap_or(RelayScheme::QmfOptimal);
    let range = args.range.or(file_value(&file, "range", parse_range)?);
    Ok(RunConfig {
        alpha,
        n,
        n_range,
        methods,
        q,
        t,
        tmax,
        l,
        snr,
        seed,
        out,
        format,
        constants,
        scheme,
        range,
    })
}

fn parse_method_list(s: &str) -> Result<Vec<Method>, String> {
    s.split(',').map(|p| parse_method(p.trim())).collect()
}
