//! Monte Carlo experiment driver.
//!
//! A cell is one (code, ρ, Eb/N0, b) combination. Trials in a cell run in
//! parallel chunks, but results are folded in trial order and the cell stops
//! at the exact trial that reaches `min_errors` (or at `max_trials`). Trial
//! `i` always sees the same seed, so the output depends only on the
//! configuration and never on the number of worker threads.

mod output;
pub mod seed;
pub mod stats;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{modulate_bpsk, transmit, GaussMarkovChannel, Modulation, MAX_CONFIG_RHO};
use crate::codes::{CodeDescriptor, CodeKind, CrcPolynomial, InfoWord, LinearCode};
use crate::decoder::{Decoder, DEFAULT_TAU, MAX_BLOCK_CANDIDATES};
use crate::error::{Error, Result};

pub use output::{
    emit_results, entropy_rows, read_csv, sort_points, write_entropy_csv, write_results,
    EntropyRow, OutputFormat, CSV_HEADER,
};

pub const DEFAULT_MAX_TRIALS: u64 = 10_000_000;
pub const DEFAULT_MIN_ERRORS: u64 = 100;
/// Confidence level of the rate-search upper bound.
pub const RATE_SEARCH_CONFIDENCE: f64 = 0.95;

fn default_tau() -> u64 {
    DEFAULT_TAU
}
fn default_max_trials() -> u64 {
    DEFAULT_MAX_TRIALS
}
fn default_min_errors() -> u64 {
    DEFAULT_MIN_ERRORS
}

/// Flat experiment description, read from TOML. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub code: CodeKind,
    pub n: usize,
    pub k: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub polynomial: Option<String>,
    #[serde(default)]
    pub modulation: Modulation,
    pub rho: Vec<f64>,
    pub ebno_db: Vec<f64>,
    pub b: Vec<usize>,
    #[serde(default = "default_tau")]
    pub tau: u64,
    #[serde(default = "default_max_trials")]
    pub max_trials: u64,
    #[serde(default = "default_min_errors")]
    pub min_errors: u64,
    #[serde(default)]
    pub base_seed: u64,
    /// Dimensions scanned by rate search; defaults to `[k]`.
    #[serde(default)]
    pub k_grid: Vec<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

impl ExperimentConfig {
    /// Single-cell configuration with default stopping rule.
    pub fn new(code: CodeDescriptor, rho: f64, ebno_db: f64, b: usize) -> Self {
        ExperimentConfig {
            code: code.kind,
            n: code.n,
            k: code.k,
            seed: code.seed,
            polynomial: code.polynomial,
            modulation: Modulation::Bpsk,
            rho: vec![rho],
            ebno_db: vec![ebno_db],
            b: vec![b],
            tau: DEFAULT_TAU,
            max_trials: DEFAULT_MAX_TRIALS,
            min_errors: DEFAULT_MIN_ERRORS,
            base_seed: 0,
            k_grid: Vec::new(),
            output: None,
            format: None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn code_descriptor(&self) -> CodeDescriptor {
        self.descriptor_for_k(self.k)
    }

    fn descriptor_for_k(&self, k: usize) -> CodeDescriptor {
        let polynomial = match self.code {
            CodeKind::Crc if k == self.k => self.polynomial.clone(),
            CodeKind::Crc => CrcPolynomial::standard(self.n.saturating_sub(k)).map(|p| p.to_hex()),
            _ => None,
        };
        CodeDescriptor {
            kind: self.code,
            n: self.n,
            k,
            seed: match self.code {
                CodeKind::Rlc => Some(self.seed.unwrap_or(0)),
                _ => None,
            },
            polynomial,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.rho.is_empty() || self.ebno_db.is_empty() || self.b.is_empty() {
            return bad("`rho`, `ebno_db` and `b` must be nonempty".into());
        }
        for &r in &self.rho {
            if !(0.0..=MAX_CONFIG_RHO).contains(&r) {
                return bad(format!("rho {r} outside [0, {MAX_CONFIG_RHO}]"));
            }
        }
        for &e in &self.ebno_db {
            if !e.is_finite() {
                return bad(format!("Eb/N0 {e} dB is not finite"));
            }
        }
        if self.min_errors < 1 {
            return bad("min_errors must be at least 1".into());
        }
        if self.max_trials < self.min_errors {
            return bad(format!(
                "max_trials ({}) is below min_errors ({})",
                self.max_trials, self.min_errors
            ));
        }
        if self.tau < 1 {
            return bad("tau must be at least 1".into());
        }
        let m_s = self.modulation.bits_per_symbol();
        if !self.n.is_multiple_of(m_s) {
            return bad(format!("n = {} is not a whole number of symbols", self.n));
        }
        let n_s = self.n / m_s;
        for &b in &self.b {
            if b == 0 || !n_s.is_multiple_of(b) {
                return bad(format!("block size {b} does not divide {n_s} symbols"));
            }
            if m_s * b > 16 || (1usize << (m_s * b)) > MAX_BLOCK_CANDIDATES {
                return bad(format!(
                    "block size {b} exceeds {MAX_BLOCK_CANDIDATES} candidates per block"
                ));
            }
        }
        Ok(())
    }

    pub fn output_format(&self) -> OutputFormat {
        self.format.unwrap_or_else(|| {
            self.output
                .as_deref()
                .map(OutputFormat::from_path)
                .unwrap_or(OutputFormat::Csv)
        })
    }
}

/// Estimated block error rate of one cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlerPoint {
    pub rho: f64,
    pub ebno_db: f64,
    pub b: usize,
    pub n: usize,
    pub k: usize,
    pub rate: f64,
    pub trials: u64,
    pub errors: u64,
    pub bler: f64,
    pub mean_guesses: f64,
    pub abandon_rate: f64,
}

impl BlerPoint {
    pub fn standard_error(&self) -> f64 {
        stats::standard_error(self.errors, self.trials)
    }

    pub fn upper_bound(&self, confidence: f64) -> f64 {
        stats::clopper_pearson_upper(self.errors, self.trials, confidence)
    }
}

/// Everything that defines one cell besides the code.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellParams {
    pub rho: f64,
    pub ebno_db: f64,
    pub b: usize,
    pub modulation: Modulation,
    pub tau: u64,
    pub max_trials: u64,
    pub min_errors: u64,
    pub base_seed: u64,
}

#[derive(Clone, Copy, Debug, Default)]
struct Outcome {
    error: bool,
    abandoned: bool,
    guesses: u64,
}

fn code_tag(code: &LinearCode) -> [u64; 4] {
    let d = code.descriptor();
    let kind = match d.kind {
        CodeKind::Rlc => 1,
        CodeKind::Crc => 2,
        CodeKind::Uncoded => 3,
    };
    let param = match d.kind {
        CodeKind::Rlc => d.seed.unwrap_or(0),
        CodeKind::Crc => d
            .polynomial
            .as_deref()
            .and_then(|p| p.parse::<CrcPolynomial>().ok())
            .map_or(0, |p| p.0),
        CodeKind::Uncoded => 0,
    };
    [kind, d.n as u64, d.k as u64, param]
}

fn run_trial(
    decoder: &Decoder<'_>,
    channel: &GaussMarkovChannel,
    base_seed: u64,
    cell: u64,
    trial: u64,
) -> Result<Outcome> {
    let code = decoder.code();
    let mut rng = seed::trial_rng(base_seed, cell, trial);
    let info = InfoWord::random(code.k(), &mut rng);
    let sent = code.encode(&info)?;
    let y = transmit(&modulate_bpsk(&sent), channel, &mut rng);
    let result = decoder.decode(&y)?;
    Ok(Outcome {
        error: result.codeword.as_ref() != Some(&sent),
        abandoned: !result.is_found(),
        guesses: result.guesses,
    })
}

/// Simulate one cell under the stopping rule.
pub fn run_cell(code: &LinearCode, params: &CellParams) -> Result<BlerPoint> {
    let channel =
        GaussMarkovChannel::from_ebno(params.rho, params.ebno_db, code.rate(), params.modulation)?;
    let decoder = Decoder::new(code, &channel, params.b, params.tau)?;
    let tag = code_tag(code);
    let cell = seed::cell_id(&[
        tag[0],
        tag[1],
        tag[2],
        tag[3],
        params.rho.to_bits(),
        params.ebno_db.to_bits(),
        params.b as u64,
        params.tau,
    ]);

    let (mut trials, mut errors, mut abandoned, mut guesses) = (0u64, 0u64, 0u64, 0u128);
    let mut chunk = 256u64;
    'cell: while trials < params.max_trials && errors < params.min_errors {
        let end = (trials + chunk).min(params.max_trials);
        let outcomes = (trials..end)
            .into_par_iter()
            .map(|t| run_trial(&decoder, &channel, params.base_seed, cell, t))
            .collect::<Result<Vec<_>>>()?;
        for o in outcomes {
            trials += 1;
            errors += u64::from(o.error);
            abandoned += u64::from(o.abandoned);
            guesses += u128::from(o.guesses);
            if errors >= params.min_errors {
                break 'cell;
            }
        }
        chunk = (chunk * 2).min(1 << 16);
    }

    let denom = trials.max(1) as f64;
    Ok(BlerPoint {
        rho: params.rho,
        ebno_db: params.ebno_db,
        b: params.b,
        n: code.n(),
        k: code.k(),
        rate: code.rate(),
        trials,
        errors,
        bler: errors as f64 / denom,
        mean_guesses: guesses as f64 / denom,
        abandon_rate: abandoned as f64 / denom,
    })
}

impl ExperimentConfig {
    fn cell_params(&self, rho: f64, ebno_db: f64, b: usize) -> CellParams {
        CellParams {
            rho,
            ebno_db,
            b,
            modulation: self.modulation,
            tau: self.tau,
            max_trials: self.max_trials,
            min_errors: self.min_errors,
            base_seed: self.base_seed,
        }
    }
}

/// Run every (ρ, Eb/N0, b) cell of the configuration.
pub fn run_bler(config: &ExperimentConfig) -> Result<Vec<BlerPoint>> {
    config.validate()?;
    let code = config.code_descriptor().build()?;
    let mut points = Vec::new();
    for &rho in &config.rho {
        for &ebno in &config.ebno_db {
            for &b in &config.b {
                points.push(run_cell(&code, &config.cell_params(rho, ebno, b))?);
            }
        }
    }
    sort_points(&mut points);
    Ok(points)
}

/// `run_bler` followed by writing the configured output file, if any.
pub fn simulate(config: &ExperimentConfig) -> Result<Vec<BlerPoint>> {
    let points = run_bler(config)?;
    if let Some(path) = &config.output {
        emit_results(&points, config.output_format(), path)?;
    }
    Ok(points)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSearchResult {
    pub rho: f64,
    pub b: usize,
    pub target_bler: f64,
    pub target_ebno_db: f64,
    /// Dimension of the best code, if any grid point met the target.
    pub best_k: Option<usize>,
    pub best_rate: Option<f64>,
    /// Estimates for every rate evaluated, highest rate first.
    pub estimates: Vec<BlerPoint>,
}

/// Largest rate on the `k_grid` whose one-sided 95% Clopper-Pearson upper
/// bound on BLER is at most `target_bler`, for each (ρ, b) in the config.
///
/// Rates are tried from highest to lowest and the scan stops at the first
/// one that qualifies.
pub fn rate_search(
    config: &ExperimentConfig,
    target_bler: f64,
    target_ebno_db: f64,
) -> Result<Vec<RateSearchResult>> {
    if !(target_bler > 0.0 && target_bler <= 1.0) {
        return Err(Error::Config(format!(
            "target BLER must lie in (0, 1], got {target_bler}"
        )));
    }
    let mut probe = config.clone();
    probe.ebno_db = vec![target_ebno_db];
    probe.validate()?;

    let mut grid = if config.k_grid.is_empty() {
        vec![config.k]
    } else {
        config.k_grid.clone()
    };
    grid.sort_unstable_by(|a, b| b.cmp(a));
    grid.dedup();
    let codes = grid
        .iter()
        .map(|&k| config.descriptor_for_k(k).build())
        .collect::<Result<Vec<_>>>()?;

    let mut results = Vec::new();
    for &rho in &config.rho {
        for &b in &config.b {
            let params = probe.cell_params(rho, target_ebno_db, b);
            let mut result = RateSearchResult {
                rho,
                b,
                target_bler,
                target_ebno_db,
                best_k: None,
                best_rate: None,
                estimates: Vec::new(),
            };
            for code in &codes {
                let point = run_cell(code, &params)?;
                let meets = point.upper_bound(RATE_SEARCH_CONFIDENCE) <= target_bler;
                result.estimates.push(point);
                if meets {
                    result.best_k = Some(code.k());
                    result.best_rate = Some(code.rate());
                    break;
                }
            }
            results.push(result);
        }
    }
    Ok(results)
}
