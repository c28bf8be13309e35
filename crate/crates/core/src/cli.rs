//! Problem files and the subcommands of the `spectra-forge` binary.
//!
//! Every document read or written carries `"schema": "spectra-forge/1"`.
//! Exit codes: 0 success, 1 bad input, 2 numerical failure (including a
//! singular `𝓑`), 3 refusal because the construction does not apply (even
//! rings with vanishing factor weights).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dn_ring::{
    build_b, characteristic_factorization, detect_even_degeneracy, realize_ring, BConvention,
    DelayLayout,
};
use crate::error::Error;
use crate::quasipoly::{CharProduct, ScalarFactor};
use crate::realization::{realize, FrequencyTarget, RealizationResult, SolverConfig, WeightTable};
use crate::spectrum::{count_roots, locate_roots, verify_realization, Region};
use crate::SCHEMA;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidInput(_) | Error::ZeroWeight { .. } | Error::BadIndex(_) | Error::BadParity(_) => {
            EXIT_INPUT
        }
        Error::EvenDegeneracy { .. } => EXIT_REFUSED,
        _ => EXIT_NUMERIC,
    }
}

/// What to solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Problem {
    /// One factor with unit weights.
    Scalar { omegas: Vec<f64> },
    /// Several factors sharing delays and coefficients.
    Multifactor { groups: Vec<Vec<f64>>, weights: WeightTable },
    /// A D_n ring; group `q` goes to factor `Δ_{indices[q]}`.
    Ring {
        n: usize,
        indices: Vec<usize>,
        groups: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        layout: Option<DelayLayout>,
    },
}

impl Problem {
    pub fn target(&self) -> Result<FrequencyTarget, Error> {
        match self {
            Problem::Scalar { omegas } => FrequencyTarget::scalar(omegas),
            Problem::Multifactor { groups, .. } | Problem::Ring { groups, .. } => {
                FrequencyTarget::new(groups.clone())
            }
        }
    }

    fn mode(&self) -> &'static str {
        match self {
            Problem::Scalar { .. } => "scalar",
            Problem::Multifactor { .. } => "multifactor",
            Problem::Ring { .. } => "ring",
        }
    }
}

/// A problem file: schema tag, mode with its payload, solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub schema: String,
    #[serde(flatten)]
    pub problem: Problem,
    #[serde(flatten)]
    pub config: SolverConfig,
}

impl ProblemFile {
    pub fn new(problem: Problem, config: SolverConfig) -> Self {
        Self { schema: SCHEMA.into(), problem, config }
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        let file: ProblemFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("problem file: {e}")))?;
        check_schema(&file.schema)?;
        file.config.validate()?;
        Ok(file)
    }
}

fn check_schema(schema: &str) -> Result<(), Error> {
    if schema != SCHEMA {
        return Err(Error::InvalidInput(format!("unsupported schema {schema:?}, expected {SCHEMA:?}")));
    }
    Ok(())
}

#[derive(Debug, Parser)]
#[command(name = "spectra-forge", version, about = "Delay equations with prescribed imaginary eigenvalues")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Where to write the JSON report; `-` for standard output.
    #[arg(long, default_value = "-")]
    pub output: String,
    /// Residual tolerance, overriding the problem file.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed recorded in the configuration, overriding the problem file.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Realize a scalar or multifactor problem.
    Realize {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Realize a D_n ring problem.
    Ring {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Certify a realization against its problem file.
    Verify {
        /// Output of `realize` or `ring`.
        #[arg(long)]
        result: PathBuf,
        /// The problem file the result claims to solve.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print the matrix 𝓑 for odd n and factor indices.
    Bmat {
        #[arg(long)]
        n: usize,
        /// Comma-separated, strictly increasing factor indices.
        #[arg(long, value_delimiter = ',')]
        indices: Vec<usize>,
        /// Column scale: 4 (printed form) or 2 (factor weights).
        #[arg(long, default_value_t = 4)]
        convention: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Count (and optionally locate) roots in a rectangle.
    Spectrum {
        /// A factor, a product of factors, or a `realize`/`ring` report.
        #[arg(long)]
        input: PathBuf,
        /// Real range `a,b`.
        #[arg(long, allow_hyphen_values = true)]
        re: String,
        /// Imaginary range `c,d`.
        #[arg(long, allow_hyphen_values = true)]
        im: String,
        /// Also locate the roots, failing above this many per factor.
        #[arg(long)]
        locate: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Realize { common, .. }
            | Command::Ring { common, .. }
            | Command::Verify { common, .. }
            | Command::Bmat { common, .. }
            | Command::Spectrum { common, .. } => common,
        }
    }
}

/// Exit code and JSON document of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

impl Outcome {
    fn ok(mut report: Value) -> Self {
        stamp(&mut report, "ok");
        Self { code: EXIT_OK, report }
    }

    fn failed(code: i32, mut report: Value) -> Self {
        stamp(&mut report, "failed");
        Self { code, report }
    }

    fn error(err: &Error) -> Self {
        let mut report = json!({ "kind": err.kind(), "message": err.to_string() });
        if let Error::EvenDegeneracy { n, pairs } = err {
            report["n"] = json!(n);
            report["pairs"] = json!(pairs);
        }
        stamp(&mut report, "error");
        Self { code: exit_code(err), report }
    }
}

fn stamp(report: &mut Value, status: &str) {
    let mut map = serde_json::Map::new();
    map.insert("schema".into(), json!(SCHEMA));
    map.insert("status".into(), json!(status));
    if let Value::Object(rest) = report.take() {
        map.extend(rest);
    }
    *report = Value::Object(map);
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn load_problem(path: &Path, common: &Common) -> Result<ProblemFile, Error> {
    let mut file = ProblemFile::parse(&read(path)?)?;
    if let Some(tol) = common.tol {
        file.config.tol = tol;
    }
    if let Some(seed) = common.seed {
        file.config.seed = seed;
    }
    file.config.validate()?;
    Ok(file)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// Realizes a scalar or multifactor problem.
pub fn cmd_realize(file: &ProblemFile) -> Outcome {
    let run = || -> Result<Value, Error> {
        let target = file.problem.target()?;
        let weights = match &file.problem {
            Problem::Scalar { omegas } => WeightTable::ones(omegas.len()),
            Problem::Multifactor { weights, .. } => weights.clone(),
            Problem::Ring { .. } => {
                return Err(Error::InvalidInput("ring problems are solved by the `ring` subcommand".into()))
            }
        };
        let result = realize(&target, &weights, &file.config)?;
        Ok(json!({
            "mode": file.problem.mode(),
            "config": to_value(&file.config),
            "weights": to_value(&weights),
            "result": to_value(&result),
        }))
    };
    match run() {
        Ok(v) => Outcome::ok(v),
        Err(e) => Outcome::error(&e),
    }
}

/// Realizes a ring problem; even `n` is refused with its degenerate weights.
pub fn cmd_ring(file: &ProblemFile) -> Outcome {
    let run = || -> Result<Value, Error> {
        let Problem::Ring { n, indices, groups, layout } = &file.problem else {
            return Err(Error::InvalidInput("the `ring` subcommand needs mode \"ring\"".into()));
        };
        if n % 2 == 0 {
            let pairs = detect_even_degeneracy(*n)?;
            return Err(Error::EvenDegeneracy { n: *n, pairs });
        }
        let target = FrequencyTarget::new(groups.clone())?;
        let realized = realize_ring(*n, indices, &target, layout.as_ref(), &file.config)?;
        let mut v = to_value(&realized);
        v["mode"] = json!("ring");
        v["config"] = to_value(&file.config);
        Ok(v)
    };
    match run() {
        Ok(v) => Outcome::ok(v),
        Err(e) => Outcome::error(&e),
    }
}

/// Checks a `realize`/`ring` report against the problem it claims to solve.
pub fn cmd_verify(report: &Value, file: &ProblemFile) -> Outcome {
    let run = || -> Result<Outcome, Error> {
        if let Some(s) = report.get("schema").and_then(Value::as_str) {
            check_schema(s)?;
        }
        let result: RealizationResult = serde_json::from_value(
            report.get("result").cloned().ok_or_else(|| Error::InvalidInput("report has no result".into()))?,
        )
        .map_err(|e| Error::InvalidInput(format!("result: {e}")))?;
        let target = file.problem.target()?;
        let weights = match &file.problem {
            Problem::Scalar { omegas } => WeightTable::ones(omegas.len()),
            Problem::Multifactor { weights, .. } => weights.clone(),
            Problem::Ring { .. } => serde_json::from_value(
                report.get("weights").cloned().ok_or_else(|| Error::InvalidInput("report has no weights".into()))?,
            )
            .map_err(|e| Error::InvalidInput(format!("weights: {e}")))?,
        };
        weights.check_against(&target)?;
        if result.taus.len() != target.len() || result.coeffs.len() != target.len() {
            return Err(Error::InvalidInput(format!(
                "result has {} delays but the problem has {} frequencies",
                result.taus.len(),
                target.len()
            )));
        }
        let spectrum = verify_realization(&result, &target, &weights, file.config.tol);
        let v = json!({ "report": to_value(&spectrum) });
        Ok(if spectrum.pass { Outcome::ok(v) } else { Outcome::failed(EXIT_NUMERIC, v) })
    };
    run().unwrap_or_else(|e| Outcome::error(&e))
}

/// `𝓑`, its determinant and whether it is singular.
pub fn cmd_bmat(n: usize, indices: &[usize], convention: u32) -> Outcome {
    let run = || -> Result<Value, Error> {
        let conv = BConvention::from_scale(convention)?;
        let b = build_b(n, indices, conv)?;
        let det = b.determinant();
        let bound: f64 = (0..b.nrows()).map(|i| b.row(i).norm()).product();
        let rows: Vec<Vec<f64>> = (0..b.nrows()).map(|i| b.row(i).iter().copied().collect()).collect();
        Ok(json!({
            "n": n,
            "indices": indices,
            "convention": convention,
            "matrix": rows,
            "det": det,
            "singular": !(det.abs() > 1e-12 * bound),
        }))
    };
    match run() {
        Ok(v) => Outcome::ok(v),
        Err(e) => Outcome::error(&e),
    }
}

/// Factors named by a spectrum input document.
pub fn factors_of(doc: &Value) -> Result<Vec<ScalarFactor>, Error> {
    let bad = |e: serde_json::Error| Error::InvalidInput(format!("spectrum input: {e}"));
    if doc.get("terms").is_some() {
        return Ok(vec![serde_json::from_value(doc.clone()).map_err(bad)?]);
    }
    if doc.get("factors").is_some() {
        let p: CharProduct = serde_json::from_value(doc.clone()).map_err(bad)?;
        return Ok(p.factors().to_vec());
    }
    if let Some(ring) = doc.get("ring") {
        let ring = serde_json::from_value(ring.clone()).map_err(bad)?;
        return Ok(characteristic_factorization(&ring).factors().to_vec());
    }
    if let (Some(result), Some(weights)) = (doc.get("result"), doc.get("weights")) {
        let result: RealizationResult = serde_json::from_value(result.clone()).map_err(bad)?;
        let weights: WeightTable = serde_json::from_value(weights.clone()).map_err(bad)?;
        return Ok((0..weights.factor_count()).map(|j| result.factor(&weights, j)).collect());
    }
    Err(Error::InvalidInput(
        "spectrum input must hold `terms`, `factors`, `ring`, or `result` with `weights`".into(),
    ))
}

fn parse_range(s: &str, name: &str) -> Result<(f64, f64), Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let parse = |p: &str| {
        p.parse::<f64>()
            .map_err(|_| Error::InvalidInput(format!("--{name} expects `a,b`, got {s:?}")))
    };
    match parts.as_slice() {
        [a, b] => Ok((parse(a)?, parse(b)?)),
        _ => Err(Error::InvalidInput(format!("--{name} expects `a,b`, got {s:?}"))),
    }
}

/// Root counts (and locations, if asked) of every factor in a rectangle.
pub fn cmd_spectrum(doc: &Value, re: &str, im: &str, locate: Option<usize>) -> Outcome {
    let run = || -> Result<Value, Error> {
        let (a, b) = parse_range(re, "re")?;
        let (c, d) = parse_range(im, "im")?;
        let region = Region::new(a, b, c, d)?;
        let factors = factors_of(doc)?;
        let mut out = Vec::new();
        for (j, f) in factors.iter().enumerate() {
            let count = count_roots(f, &region)?;
            let mut entry = json!({ "factor": j + 1, "multiplicity": f.multiplicity(), "count": count });
            if let Some(max) = locate {
                let roots = locate_roots(f, &region, max)?;
                entry["roots"] = to_value(&roots);
            }
            out.push(entry);
        }
        Ok(json!({ "region": to_value(&region), "factors": out }))
    };
    match run() {
        Ok(v) => Outcome::ok(v),
        Err(e) => Outcome::error(&e),
    }
}

/// Runs a parsed command.
pub fn execute(command: &Command) -> Outcome {
    let attempt = || -> Result<Outcome, Error> {
        Ok(match command {
            Command::Realize { input, common } => cmd_realize(&load_problem(input, common)?),
            Command::Ring { input, common } => cmd_ring(&load_problem(input, common)?),
            Command::Verify { result, input, common } => {
                let report: Value = serde_json::from_str(&read(result)?)
                    .map_err(|e| Error::InvalidInput(format!("result file: {e}")))?;
                cmd_verify(&report, &load_problem(input, common)?)
            }
            Command::Bmat { n, indices, convention, .. } => cmd_bmat(*n, indices, *convention),
            Command::Spectrum { input, re, im, locate, .. } => {
                let doc: Value = serde_json::from_str(&read(input)?)
                    .map_err(|e| Error::InvalidInput(format!("spectrum input: {e}")))?;
                cmd_spectrum(&doc, re, im, *locate)
            }
        })
    };
    attempt().unwrap_or_else(|e| Outcome::error(&e))
}

/// Pretty JSON with a trailing newline.
pub fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("serializable");
    s.push('\n');
    s
}

/// Parses arguments, runs the command, writes the report, returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let outcome = execute(&cli.command);
    let text = render(&outcome.report);
    let target = &cli.command.common().output;
    let written = if target == "-" {
        std::io::stdout().write_all(text.as_bytes())
    } else {
        fs::write(target, text.as_bytes())
    };
    if let Err(e) = written {
        eprintln!("cannot write {target}: {e}");
        return EXIT_INPUT;
    }
    outcome.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problem_file_round_trip() {
        let text = r#"{"schema":"spectra-forge/1","mode":"scalar","omegas":[1.0],"tol":1e-11}"#;
        let file = ProblemFile::parse(text).unwrap();
        assert_eq!(file.problem, Problem::Scalar { omegas: vec![1.0] });
        assert_eq!(file.config.tol, 1e-11);
        assert_eq!(file.config.max_iter, SolverConfig::default().max_iter);
        let back = ProblemFile::parse(&serde_json::to_string(&file).unwrap()).unwrap();
        assert_eq!(back, file);
    }

    #[test]
    fn rejects_wrong_schema_and_mode() {
        assert!(ProblemFile::parse(r#"{"schema":"other/2","mode":"scalar","omegas":[1.0]}"#).is_err());
        assert!(ProblemFile::parse(r#"{"schema":"spectra-forge/1","mode":"torus"}"#).is_err());
        assert!(ProblemFile::parse(r#"{"schema":"spectra-forge/1","mode":"scalar","omegas":[1.0],"tol":-1}"#).is_err());
    }

    #[test]
    fn bmat_reports() {
        let out = cmd_bmat(9, &[0, 3], 4);
        assert_eq!(out.code, EXIT_OK);
        assert_eq!(out.report["det"], json!(0.0));
        assert_eq!(out.report["singular"], json!(true));
        assert_eq!(cmd_bmat(6, &[0, 1], 4).code, EXIT_INPUT);
        assert_eq!(cmd_bmat(5, &[1, 2], 3).code, EXIT_INPUT);
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-1,2.5", "re").unwrap(), (-1.0, 2.5));
        assert!(parse_range("1", "re").is_err());
    }
}
