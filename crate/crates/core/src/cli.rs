//! The `padic-ts` command-line front end.
//!
//! Every command is deterministic: equal manifests produce byte-identical
//! output. Floats are printed with 17 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_complex::Complex;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::fbm::{self, CovarianceModel, OutputMode, SimulationConfig, Variant};
use crate::padic::{index_distance, Prime, UltrametricIndex};
use crate::vladimirov::{self, OperatorConfig, OperatorMode};
use crate::wavelets::{self, SampledSeries, WaveletCoefficients, WaveletIndex};

pub const MANIFEST_SCHEMA: &str = "v1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_BAD_PARAMS: i32 = 2;
pub const EXIT_BAD_INPUT: i32 = 3;
pub const EXIT_COMPUTE: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    fn params(message: impl Into<String>) -> Self {
        Self::new(EXIT_BAD_PARAMS, message)
    }

    fn input(message: impl Into<String>) -> Self {
        Self::new(EXIT_BAD_INPUT, message)
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        Self::new(EXIT_IO, format!("{}: {err}", path.display()))
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::new(EXIT_COMPUTE, err.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "padic-ts", version, about = "p-adic analysis of time series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ultrametric distances between index pairs.
    Distance(DistanceArgs),
    /// Fractional p-adic derivative of a CSV series.
    Derivative(DerivativeArgs),
    /// Simulate discretized fractional p-adic Brownian motion.
    Simulate(SimulateArgs),
    /// Monte Carlo check of the covariance model.
    Verify(VerifyArgs),
    /// Model covariance matrix and staircase variogram.
    Covariance(CovarianceArgs),
    /// p-adic wavelet transform of a CSV series (or its inverse).
    Transform(TransformArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Finite,
    Extended,
}

impl From<ModeArg> for OperatorMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Finite => OperatorMode::FiniteSection,
            ModeArg::Extended => OperatorMode::ZeroExtended,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PadPolicy {
    /// Keep the largest p-power prefix.
    Truncate,
    /// Extend to the next p-power by repeating the last sample.
    RepeatLast,
    /// Extend to the next p-power with the series mean.
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Paper,
    Alternative,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Paper => Variant::Paper,
            VariantArg::Alternative => Variant::Alternative,
        }
    }
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[arg(long = "p")]
    pub p: u32,
    /// Comma-separated `m:n` pairs.
    #[arg(long)]
    pub pairs: String,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DerivativeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long = "p")]
    pub p: u32,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "finite")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "truncate")]
    pub pad: PadPolicy,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long = "p")]
    pub p: u32,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long = "J")]
    pub top: u32,
    #[arg(long, default_value_t = 0)]
    pub level: u32,
    #[arg(long, visible_alias = "M")]
    pub realizations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Emit `Re F` instead of the complex process.
    #[arg(long)]
    pub real: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long = "p")]
    pub p: u32,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long = "J")]
    pub top: u32,
    #[arg(long, default_value_t = 0)]
    pub level: u32,
    #[arg(long, visible_alias = "M")]
    pub realizations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "paper")]
    pub variant: VariantArg,
    /// Stacked realizations (`realization,index,re,im`) from `simulate`;
    /// simulated in-process when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CovarianceArgs {
    #[arg(long = "p")]
    pub p: u32,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long = "J")]
    pub top: u32,
    #[arg(long, default_value_t = 0)]
    pub level: u32,
    #[arg(long, value_enum, default_value = "paper")]
    pub variant: VariantArg,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long = "p")]
    pub p: u32,
    #[arg(long, default_value_t = 0)]
    pub level: u32,
    #[arg(long, value_enum, default_value = "truncate")]
    pub pad: PadPolicy,
    /// Read `k,j,ball,re,im` coefficients and reconstruct the series.
    #[arg(long)]
    pub inverse: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command; returns
/// the process exit code.
pub fn run_from_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                EXIT_BAD_PARAMS
            } else {
                EXIT_OK
            };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {}", err.message);
            err.code
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Distance(a) => cmd_distance(a),
        Command::Derivative(a) => cmd_derivative(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Covariance(a) => cmd_covariance(a),
        Command::Transform(a) => cmd_transform(a),
    }
}

fn prime(p: u32) -> CliResult<Prime> {
    Prime::new(p).map_err(|_| CliError::params(format!("p must be prime (got {p})")))
}

fn check_alpha(alpha: f64) -> CliResult<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(CliError::params(format!(
            "alpha must be positive (got {alpha})"
        )))
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Provenance written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub schema: &'static str,
    pub command: &'static str,
    pub parameters: BTreeMap<&'static str, Value>,
    pub input_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub padding: Option<Padding>,
    pub version: &'static str,
}

impl RunManifest {
    fn new(command: &'static str) -> Self {
        RunManifest {
            schema: MANIFEST_SCHEMA,
            command,
            parameters: BTreeMap::new(),
            input_digest: None,
            padding: None,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    fn param(mut self, key: &'static str, value: impl Serialize) -> Self {
        self.parameters.insert(
            key,
            serde_json::to_value(value).expect("parameters serialize"),
        );
        self
    }

    fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Padding {
    pub policy: &'static str,
    pub original_len: usize,
    pub processed_len: usize,
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, content: &str) -> CliResult<()> {
    fs::write(path, content).map_err(|e| CliError::io(path, e))
}

pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes the main output to `--output` (plus the manifest sidecar), or to
/// stdout without a sidecar.
fn emit(output: Option<&Path>, content: &str, manifest: &RunManifest) -> CliResult<()> {
    match output {
        Some(path) => {
            write_file(path, content)?;
            write_file(&sidecar(path, ".manifest.json"), &manifest.to_json())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Reads `index,value` or `index,re,im` with indices `0, 1, 2, ...`.
pub fn parse_series_csv(bytes: &[u8]) -> CliResult<Vec<Complex<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::input(format!("line 1: {e}")))?
        .clone();
    let cols: Vec<&str> = headers.iter().collect();
    let complex = match cols.as_slice() {
        ["index", "value"] => false,
        ["index", "re", "im"] => true,
        _ => {
            return Err(CliError::input(format!(
                "line 1: expected header `index,value` or `index,re,im`, got `{}`",
                cols.join(",")
            )))
        }
    };
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::input(format!("line {line}: {e}"))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| -> CliResult<&str> {
            rec.get(i)
                .ok_or_else(|| CliError::input(format!("line {line}: missing column {}", i + 1)))
        };
        let num = |i: usize| -> CliResult<f64> {
            let s = field(i)?;
            f64::from_str(s)
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    CliError::input(format!("line {line}: `{s}` is not a finite number"))
                })
        };
        let index: usize = field(0)?
            .parse()
            .map_err(|_| CliError::input(format!("line {line}: bad index `{}`", &rec[0])))?;
        if index != out.len() {
            return Err(CliError::input(format!(
                "line {line}: expected index {}, got {index}",
                out.len()
            )));
        }
        let z = if complex {
            Complex::new(num(1)?, num(2)?)
        } else {
            Complex::new(num(1)?, 0.0)
        };
        out.push(z);
    }
    if out.is_empty() {
        return Err(CliError::input("input has no data rows"));
    }
    Ok(out)
}

/// Brings a series to a power-of-`p` length under the given policy.
pub fn pad_series(
    xs: &[Complex<f64>],
    p: Prime,
    policy: PadPolicy,
) -> CliResult<(Vec<Complex<f64>>, Padding)> {
    let n = xs.len();
    let mut below = 1usize;
    while below.checked_mul(p.get() as usize).is_some_and(|v| v <= n) {
        below *= p.get() as usize;
    }
    let above = if below == n {
        n
    } else {
        below
            .checked_mul(p.get() as usize)
            .ok_or_else(|| CliError::input("series too long"))?
    };
    let (out, name) = match policy {
        PadPolicy::Truncate => (xs[..below].to_vec(), "truncate"),
        PadPolicy::RepeatLast => {
            let mut v = xs.to_vec();
            v.resize(above, xs[n - 1]);
            (v, "repeat-last")
        }
        PadPolicy::Mean => {
            let mean = xs.iter().fold(Complex::new(0.0, 0.0), |a, b| a + b) / n as f64;
            let mut v = xs.to_vec();
            v.resize(above, mean);
            (v, "mean")
        }
    };
    let padding = Padding {
        policy: name,
        original_len: n,
        processed_len: out.len(),
    };
    Ok((out, padding))
}

fn series_csv(samples: &[Complex<f64>]) -> String {
    let mut s = String::from("index,re,im\n");
    for (i, z) in samples.iter().enumerate() {
        let _ = writeln!(s, "{i},{},{}", fmt_f64(z.re), fmt_f64(z.im));
    }
    s
}

pub fn cmd_distance(a: &DistanceArgs) -> CliResult<()> {
    let p = prime(a.p)?;
    let mut out = String::from("m,n,exponent\n");
    for pair in a.pairs.split(',').filter(|s| !s.trim().is_empty()) {
        let (m, n) = pair
            .split_once(':')
            .ok_or_else(|| CliError::params(format!("pair `{pair}` is not of the form m:n")))?;
        let parse = |s: &str| {
            BigUint::from_str(s.trim())
                .map_err(|_| CliError::params(format!("`{s}` is not a natural number")))
        };
        let (m, n) = (parse(m)?, parse(n)?);
        let d = index_distance(
            &UltrametricIndex::new(p, m.clone()),
            &UltrametricIndex::new(p, n.clone()),
        )?;
        let _ = writeln!(out, "{m},{n},{d}");
    }
    let manifest = RunManifest::new("distance")
        .param("p", a.p)
        .param("pairs", &a.pairs);
    emit(a.output.as_deref(), &out, &manifest)
}

pub fn cmd_derivative(a: &DerivativeArgs) -> CliResult<()> {
    let p = prime(a.p)?;
    check_alpha(a.alpha)?;
    let bytes = read_input(&a.input)?;
    let raw = parse_series_csv(&bytes)?;
    let (xs, padding) = pad_series(&raw, p, a.pad)?;
    let mode = OperatorMode::from(a.mode);
    let cfg = OperatorConfig::new(p, a.alpha, mode, xs.len())?;
    let series = SampledSeries::new(p, 0, xs)?;
    let out = vladimirov::apply_direct(&series, &cfg)?;
    let mut manifest = RunManifest::new("derivative")
        .param("p", a.p)
        .param("alpha", a.alpha)
        .param("mode", mode)
        .param("pad", padding.policy);
    manifest.input_digest = Some(digest(&bytes));
    manifest.padding = Some(padding);
    emit(a.output.as_deref(), &series_csv(out.samples()), &manifest)
}

fn sim_config(
    p: u32,
    alpha: f64,
    top: u32,
    level: u32,
    m: usize,
    seed: u64,
) -> CliResult<SimulationConfig<f64>> {
    let p = prime(p)?;
    check_alpha(alpha)?;
    SimulationConfig::new(p, alpha, top, level, m, seed)
        .map_err(|e| CliError::params(e.to_string()))
}

fn stacked_csv(batch: &fbm::Batch<f64>) -> String {
    let mut s = String::from("realization,index,re,im\n");
    for (m, r) in batch.realizations.iter().enumerate() {
        for (i, z) in r.samples().iter().enumerate() {
            let _ = writeln!(s, "{m},{i},{},{}", fmt_f64(z.re), fmt_f64(z.im));
        }
    }
    s
}

/// Reads `realization,index,re,im` back into a batch for `cfg`.
pub fn parse_stacked_csv(bytes: &[u8], cfg: SimulationConfig<f64>) -> CliResult<fbm::Batch<f64>> {
    let n = cfg.window_len();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::input(format!("line 1: {e}")))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["realization", "index", "re", "im"] {
        return Err(CliError::input(
            "line 1: expected header `realization,index,re,im`",
        ));
    }
    let mut rows: Vec<Vec<Complex<f64>>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            CliError::input(format!(
                "line {}: {e}",
                e.position().map_or(0, |p| p.line())
            ))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = || CliError::input(format!("line {line}: malformed row"));
        if rec.len() != 4 {
            return Err(bad());
        }
        let m: usize = rec[0].parse().map_err(|_| bad())?;
        let i: usize = rec[1].parse().map_err(|_| bad())?;
        let re: f64 = rec[2].parse().map_err(|_| bad())?;
        let im: f64 = rec[3].parse().map_err(|_| bad())?;
        if m == rows.len() && i == 0 {
            rows.push(Vec::with_capacity(n));
        }
        let count = rows.len();
        match rows.last_mut() {
            Some(r) if m + 1 == count && i == r.len() && i < n => r.push(Complex::new(re, im)),
            _ => return Err(CliError::input(format!("line {line}: rows out of order"))),
        }
    }
    if rows.len() != cfg.realizations || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::input(format!(
            "expected {} realizations of {n} samples",
            cfg.realizations
        )));
    }
    let realizations = rows
        .into_iter()
        .map(|r| SampledSeries::new(cfg.prime, cfg.level, r))
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(fbm::Batch {
        config: cfg,
        realizations,
    })
}

pub fn cmd_simulate(a: &SimulateArgs) -> CliResult<()> {
    let output = if a.real {
        OutputMode::RealPart
    } else {
        OutputMode::Complex
    };
    let cfg = sim_config(a.p, a.alpha, a.top, a.level, a.realizations, a.seed)?.with_output(output);
    let batch = fbm::simulate(&cfg)?;
    let manifest = RunManifest::new("simulate")
        .param("p", a.p)
        .param("alpha", a.alpha)
        .param("J", a.top)
        .param("level", a.level)
        .param("realizations", a.realizations)
        .param("seed", a.seed)
        .param("output_mode", output);
    emit(a.output.as_deref(), &stacked_csv(&batch), &manifest)
}

pub fn cmd_verify(a: &VerifyArgs) -> CliResult<()> {
    let cfg = sim_config(a.p, a.alpha, a.top, a.level, a.realizations, a.seed)?;
    if a.realizations < 2 {
        return Err(CliError::params("verify needs at least 2 realizations"));
    }
    let model = CovarianceModel::new(cfg.prime, a.alpha, a.level, a.variant.into())
        .map_err(|e| CliError::params(e.to_string()))?;
    let mut manifest = RunManifest::new("verify")
        .param("p", a.p)
        .param("alpha", a.alpha)
        .param("J", a.top)
        .param("level", a.level)
        .param("realizations", a.realizations)
        .param("seed", a.seed)
        .param("variant", model.variant());
    let batch = match &a.input {
        Some(path) => {
            let bytes = read_input(path)?;
            manifest.input_digest = Some(digest(&bytes));
            parse_stacked_csv(&bytes, cfg)?
        }
        None => fbm::simulate(&cfg)?,
    };
    let empirical = fbm::estimate(&batch)?;
    let report = fbm::verify(&model, &empirical)?;
    let mut doc = serde_json::to_value(&report).expect("report serializes");
    if a.level == 0 {
        let white = fbm::whiteness_check(&batch, a.alpha)?;
        doc["whiteness"] = serde_json::to_value(white).expect("report serializes");
    }
    doc["manifest"] = serde_json::to_value(&manifest).expect("manifest serializes");
    let mut text = serde_json::to_string_pretty(&doc).expect("json");
    text.push('\n');
    emit(a.output.as_deref(), &text, &manifest)
}

pub fn cmd_covariance(a: &CovarianceArgs) -> CliResult<()> {
    let p = prime(a.p)?;
    check_alpha(a.alpha)?;
    let model = CovarianceModel::new(p, a.alpha, a.level, a.variant.into())
        .map_err(|e| CliError::params(e.to_string()))?;
    let matrix = fbm::model_covariance_matrix(&model, a.top).map_err(|e| match e {
        Error::InvalidParameter(m) => CliError::params(m),
        other => other.into(),
    })?;
    let mut table = String::from("x,y,covariance\n");
    for x in 0..matrix.nrows() {
        for y in 0..matrix.ncols() {
            let _ = writeln!(table, "{x},{y},{}", fmt_f64(matrix[(x, y)]));
        }
    }
    let mut stairs = String::from("lag,norm_exponent,variogram\n");
    for pt in fbm::staircase_variogram(&model, a.top)? {
        let _ = writeln!(stairs, "{},{},{}", pt.lag, pt.norm, fmt_f64(pt.value));
    }
    let manifest = RunManifest::new("covariance")
        .param("p", a.p)
        .param("alpha", a.alpha)
        .param("J", a.top)
        .param("level", a.level)
        .param("variant", model.variant());
    match a.output.as_deref() {
        Some(path) => {
            write_file(&sidecar(path, ".variogram.csv"), &stairs)?;
            emit(Some(path), &table, &manifest)
        }
        None => {
            print!("{table}\n{stairs}");
            Ok(())
        }
    }
}

fn coefficients_csv(c: &WaveletCoefficients<f64>) -> String {
    let mut s = String::from("k,j,ball,re,im\n");
    let m = c.mean();
    let _ = writeln!(s, "0,0,0,{},{}", fmt_f64(m.re), fmt_f64(m.im));
    for (w, z) in c.iter() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            w.k,
            w.j,
            w.ball,
            fmt_f64(z.re),
            fmt_f64(z.im)
        );
    }
    s
}

/// Reads `k,j,ball,re,im` rows (mean row `0,0,0`) in any order.
pub fn parse_coefficients_csv(
    bytes: &[u8],
    p: Prime,
    level: u32,
) -> CliResult<WaveletCoefficients<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::input(format!("line 1: {e}")))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["k", "j", "ball", "re", "im"] {
        return Err(CliError::input("line 1: expected header `k,j,ball,re,im`"));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            CliError::input(format!(
                "line {}: {e}",
                e.position().map_or(0, |p| p.line())
            ))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = || CliError::input(format!("line {line}: malformed row"));
        if rec.len() != 5 {
            return Err(bad());
        }
        let k: u32 = rec[0].parse().map_err(|_| bad())?;
        let j: u32 = rec[1].parse().map_err(|_| bad())?;
        let ball: usize = rec[2].parse().map_err(|_| bad())?;
        let re: f64 = rec[3].parse().map_err(|_| bad())?;
        let im: f64 = rec[4].parse().map_err(|_| bad())?;
        rows.push((line, WaveletIndex::new(k, j, ball), Complex::new(re, im)));
    }
    let span = p.log_exact(rows.len()).ok_or_else(|| {
        CliError::input(format!("{} coefficients is not a power of {p}", rows.len()))
    })?;
    let mut coeffs = WaveletCoefficients::zeros(p, level + span, level)?;
    let mut seen = vec![false; rows.len()];
    for (line, w, z) in rows {
        let slot = if w.k == 0 && w.j == 0 && w.ball == 0 {
            coeffs.set_mean(z);
            0
        } else {
            let pos = coeffs.position(&w).ok_or_else(|| {
                CliError::input(format!("line {line}: no wavelet {w:?} in this window"))
            })?;
            coeffs.details_mut()[pos] = z;
            pos + 1
        };
        if std::mem::replace(&mut seen[slot], true) {
            return Err(CliError::input(format!(
                "line {line}: duplicate coefficient"
            )));
        }
    }
    Ok(coeffs)
}

pub fn cmd_transform(a: &TransformArgs) -> CliResult<()> {
    let p = prime(a.p)?;
    let bytes = read_input(&a.input)?;
    let mut manifest = RunManifest::new("transform")
        .param("p", a.p)
        .param("level", a.level)
        .param("inverse", a.inverse);
    manifest.input_digest = Some(digest(&bytes));
    let text = if a.inverse {
        let coeffs = parse_coefficients_csv(&bytes, p, a.level)?;
        series_csv(wavelets::inverse(&coeffs)?.samples())
    } else {
        let raw = parse_series_csv(&bytes)?;
        let (xs, padding) = pad_series(&raw, p, a.pad)?;
        manifest = manifest.param("pad", padding.policy);
        manifest.padding = Some(padding);
        let series = SampledSeries::new(p, a.level, xs)?;
        coefficients_csv(&wavelets::forward(&series)?)
    };
    emit(a.output.as_deref(), &text, &manifest)
}

/// Deterministic synthetic pressure-like series: a drifting baseline with
/// nested bursts of spikes. Used for examples and tests.
pub fn synthetic_series(len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| {
            let t = i as f64;
            let baseline = 100.0 + 0.02 * t + 1.5 * (t / 37.0).sin();
            let burst = if i % 64 < 8 {
                4.0 * (-((i % 64) as f64) / 3.0).exp()
            } else {
                0.0
            };
            let cascade = if i % 16 == 3 { 1.25 } else { 0.0 };
            baseline + burst + cascade
        })
        .collect()
}

/// CSV text of [`synthetic_series`] with an `index,value` header.
pub fn synthetic_csv(len: usize) -> String {
    let mut s = String::from("index,value\n");
    for (i, v) in synthetic_series(len).into_iter().enumerate() {
        let _ = writeln!(s, "{i},{}", fmt_f64(v));
    }
    s
}
