//! Input readers, CSV writers and run manifests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hhscaling::series::{ingest_prices, PriceSchema, TimeSeries, TradingCalendar};
use hhscaling::sim::RNG_DESCRIPTION;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::{InputArgs, SchemaArgs};
use crate::error::CliError;

pub const MANIFEST_SCHEMA: &str = "hhscaling-manifest/1";

pub struct Input {
    pub path: PathBuf,
    pub sha256: String,
    pub series: TimeSeries,
    pub calendar: Option<TradingCalendar>,
}

pub fn resolve_path(file: &Option<PathBuf>, flag: &Option<PathBuf>) -> Result<PathBuf, CliError> {
    match (file, flag) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give the input either as FILE or --input, not both".into(),
        )),
        (Some(p), None) | (None, Some(p)) => Ok(p.clone()),
        (None, None) => Err(CliError::Usage("missing input FILE".into())),
    }
}

fn read_bytes(path: &Path) -> Result<(Vec<u8>, String), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    let hex = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok((bytes, hex))
}

fn delimiter(c: char) -> Result<u8, CliError> {
    u8::try_from(c)
        .ok()
        .filter(u8::is_ascii)
        .ok_or_else(|| CliError::Usage(format!("delimiter must be a single ASCII character, got '{c}'")))
}

pub fn price_schema(args: &SchemaArgs) -> Result<PriceSchema, CliError> {
    Ok(PriceSchema {
        date_col: args.date_col.clone(),
        time_col: args.time_col.clone(),
        price_col: args.price_col.clone(),
        delimiter: delimiter(args.delimiter)?,
        sample_interval_secs: (args.sample_interval > 0).then_some(args.sample_interval),
        session_gap_secs: args.session_gap,
    })
}

/// Log-prices and calendar of a date/time/price file.
pub fn read_prices(path: &Path, args: &SchemaArgs) -> Result<Input, CliError> {
    let schema = price_schema(args)?;
    let (bytes, sha256) = read_bytes(path)?;
    let (series, calendar) =
        ingest_prices(bytes.as_slice(), &schema).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    for w in &calendar.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(Input {
        path: path.to_path_buf(),
        sha256,
        series,
        calendar: Some(calendar),
    })
}

fn read_series(path: &Path, bytes: &[u8], value_col: Option<&str>, delim: u8) -> Result<TimeSeries, CliError> {
    let origin = path.display();
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delim)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| CliError::Data(format!("{origin}: {e}")))?
        .clone();
    let idx = match value_col {
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Data(format!("{origin}: no column '{name}'")))?,
        None if headers.is_empty() => return Err(CliError::Data(format!("{origin}: empty header"))),
        None => headers.len() - 1,
    };
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| CliError::Data(format!("{origin}: row {row}: {e}")))?;
        let field = record.get(idx).unwrap_or("");
        let v: f64 = field
            .parse()
            .map_err(|_| CliError::Data(format!("{origin}: row {row}: cannot parse '{field}' as a number")))?;
        if !v.is_finite() {
            return Err(CliError::Data(format!(
                "{origin}: row {row}: non-finite value '{field}'"
            )));
        }
        values.push(v);
    }
    TimeSeries::from_values(values).map_err(|e| CliError::Data(format!("{origin}: {e}")))
}

/// Reads a single-column series, or log-prices with `--prices`.
pub fn read_input(args: &InputArgs) -> Result<Input, CliError> {
    let path = resolve_path(&args.file, &args.input)?;
    if args.prices {
        return read_prices(&path, &args.schema);
    }
    let (bytes, sha256) = read_bytes(&path)?;
    let series = read_series(
        &path,
        &bytes,
        args.value_col.as_deref(),
        delimiter(args.schema.delimiter)?,
    )?;
    Ok(Input {
        path,
        sha256,
        series,
        calendar: None,
    })
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

/// CSV text with a leading `#` schema line.
pub struct CsvOut {
    text: String,
    width: usize,
}

impl CsvOut {
    pub fn new(kind: &str, notes: &[(&str, String)], header: &[String]) -> Self {
        let mut text = format!("# schema=hhscaling.{kind}.v1\n");
        for (k, v) in notes {
            text.push_str(&format!("# {k}={v}\n"));
        }
        text.push_str(&header.join(","));
        text.push('\n');
        Self {
            text,
            width: header.len(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.width);
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }
}

/// Names `prefix_1..prefix_n`.
pub fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}_{k}")).collect()
}

/// Output files and manifests of one subcommand invocation.
pub struct Run {
    subcommand: &'static str,
    seed: u64,
    out_dir: PathBuf,
    params: Vec<(String, String)>,
    input: Option<(PathBuf, String)>,
    started: Instant,
}

fn flatten_params(params: &impl Serialize) -> Vec<(String, String)> {
    let value = serde_json::to_value(params).expect("argument structs serialize");
    let serde_json::Value::Object(map) = value else {
        return Vec::new();
    };
    map.into_iter()
        .filter_map(|(k, v)| {
            let s = match v {
                serde_json::Value::Null => return None,
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            };
            Some((k, s))
        })
        .collect()
}

impl Run {
    pub fn new(subcommand: &'static str, seed: u64, out_dir: &Path, params: &impl Serialize) -> Result<Self, CliError> {
        fs::create_dir_all(out_dir).map_err(|e| CliError::Data(format!("cannot create {}: {e}", out_dir.display())))?;
        Ok(Self {
            subcommand,
            seed,
            out_dir: out_dir.to_path_buf(),
            params: flatten_params(params),
            input: None,
            started: Instant::now(),
        })
    }

    pub fn set_input(&mut self, input: &Input) {
        self.input = Some((input.path.clone(), input.sha256.clone()));
    }

    fn manifest(&self, output: &str) -> String {
        let mut lines = vec![
            format!("schema={MANIFEST_SCHEMA}"),
            format!("subcommand={}", self.subcommand),
            format!("output={output}"),
            format!("version={}", env!("CARGO_PKG_VERSION")),
            format!("rng={RNG_DESCRIPTION}"),
            format!("seed={}", self.seed),
        ];
        lines.extend(self.params.iter().map(|(k, v)| format!("{k}={v}")));
        if let Some((path, sha)) = &self.input {
            lines.push(format!("input={}", path.display()));
            lines.push(format!("input-sha256={sha}"));
        }
        lines.push(format!("duration-secs={}", self.started.elapsed().as_secs_f64()));
        lines.join("\n") + "\n"
    }

    /// Writes `name` and its `name.manifest` sidecar.
    pub fn write(&self, name: &str, csv: CsvOut) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(name);
        let fail = |p: &Path, e: std::io::Error| CliError::Data(format!("cannot write {}: {e}", p.display()));
        fs::write(&path, csv.text).map_err(|e| fail(&path, e))?;
        let manifest = self.out_dir.join(format!("{name}.manifest"));
        fs::write(&manifest, self.manifest(name)).map_err(|e| fail(&manifest, e))?;
        Ok(path)
    }
}
