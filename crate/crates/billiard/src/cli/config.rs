//! Run configuration: one TOML file describes a full sweep over deformation
//! parameters and spectral windows, with explicit seeds and stage toggles.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::classical::{ChaoticGridConfig, TransportConfig};
use crate::quantum::SolveOptions;

/// Configuration problems: unreadable file, malformed TOML, or a value
/// outside its documented range.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Unreadable {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Pipeline stages in execution order.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Geometry,
    Transport,
    ChaoticGrid,
    Solve,
    Husimi,
    Localize,
    SpectraFit,
    BetaFit,
    Report,
}

impl Stage {
    /// All stages in dependency order.
    pub const ALL: [Stage; 9] = [
        Stage::Geometry,
        Stage::Transport,
        Stage::ChaoticGrid,
        Stage::Solve,
        Stage::Husimi,
        Stage::Localize,
        Stage::SpectraFit,
        Stage::BetaFit,
        Stage::Report,
    ];

    /// Directory / CLI name of the stage.
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Geometry => "geometry",
            Stage::Transport => "transport",
            Stage::ChaoticGrid => "chaotic-grid",
            Stage::Solve => "solve",
            Stage::Husimi => "husimi",
            Stage::Localize => "localize",
            Stage::SpectraFit => "spectra-fit",
            Stage::BetaFit => "beta-fit",
            Stage::Report => "report",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which stages a full run executes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StageToggles {
    pub geometry: bool,
    pub transport: bool,
    pub chaotic_grid: bool,
    pub solve: bool,
    pub husimi: bool,
    pub localize: bool,
    pub spectra_fit: bool,
    pub beta_fit: bool,
    pub report: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        Self {
            geometry: true,
            transport: true,
            chaotic_grid: true,
            solve: true,
            husimi: true,
            localize: true,
            spectra_fit: true,
            beta_fit: true,
            report: true,
        }
    }
}

impl StageToggles {
    pub fn enabled(&self, stage: Stage) -> bool {
        match stage {
            Stage::Geometry => self.geometry,
            Stage::Transport => self.transport,
            Stage::ChaoticGrid => self.chaotic_grid,
            Stage::Solve => self.solve,
            Stage::Husimi => self.husimi,
            Stage::Localize => self.localize,
            Stage::SpectraFit => self.spectra_fit,
            Stage::BetaFit => self.beta_fit,
            Stage::Report => self.report,
        }
    }
}

/// Boundary sampling of the geometry stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    /// Boundary samples written to the geometry CSV.
    pub samples: usize,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self { samples: 1024 }
    }
}

/// How the regular/chaotic threshold on the overlap index is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    /// Use `m_t` as given.
    Fixed,
    /// Pick the quantile of the observed `M` values at the classical
    /// regular fraction `1 - χ_C`.
    ClassicalFraction,
}

/// Husimi projection and classification settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HusimiSection {
    /// Section grid cells along `q`.
    pub nq: usize,
    /// Section grid cells along `p`.
    pub np: usize,
    /// Overlap-index threshold (under `threshold = "fixed"`).
    pub m_t: f64,
    /// Threshold selection rule.
    pub threshold: ThresholdMode,
}

impl Default for HusimiSection {
    fn default() -> Self {
        Self {
            nq: crate::husimi::DEFAULT_HUSIMI_DIMS.0,
            np: crate::husimi::DEFAULT_HUSIMI_DIMS.1,
            m_t: crate::husimi::DEFAULT_OVERLAP_THRESHOLD,
            threshold: ThresholdMode::Fixed,
        }
    }
}

/// Fitting and report settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    /// Upper support of the beta-distribution model of `P(A)`.
    pub a0: f64,
    /// Histogram bins of the curve tables.
    pub histogram_bins: usize,
    /// Consecutive chaotic states averaged per scatter point.
    pub block_size: usize,
    /// Plateau fraction whose transport time defines `α = 2k/N_T`.
    pub alpha_fraction: f64,
}

impl Default for FitSection {
    fn default() -> Self {
        Self {
            a0: 0.7,
            histogram_bins: 24,
            block_size: 100,
            alpha_fraction: 0.8,
        }
    }
}

/// One run: a sweep over `lambdas × windows` through the enabled stages.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Deformation parameters, each in `[0, 0.5]`.
    pub lambdas: Vec<f64>,
    /// Spectral windows as `[k_lo, k_hi]` pairs.
    pub windows: Vec<[f64; 2]>,
    /// Master seed; stage RNGs derive from it deterministically.
    pub seed: u64,
    /// Artifact root; the run writes under `<out_dir>/run-<config hash>`.
    pub out_dir: PathBuf,
    #[serde(default)]
    pub stages: StageToggles,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub transport: TransportConfig,
    #[serde(default)]
    pub chaotic: ChaoticGridConfig,
    #[serde(default)]
    pub solve: SolveOptions,
    #[serde(default)]
    pub husimi: HusimiSection,
    #[serde(default)]
    pub fit: FitSection,
}

impl RunConfig {
    /// Parses and validates a TOML config file.
    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Unreadable {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config: RunConfig = toml::from_str(&text)?;
        // The transport stage draws from the master seed.
        config.transport.seed = config.seed;
        config.validate()?;
        Ok(config)
    }

    /// Checks every field against its documented range.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError::Invalid(msg));
        if self.lambdas.is_empty() {
            return fail("lambdas must not be empty".into());
        }
        for &l in &self.lambdas {
            if !(0.0..=0.5).contains(&l) || !l.is_finite() {
                return fail(format!("lambda {l} outside [0, 0.5]"));
            }
        }
        let mut tags: Vec<String> = self.lambdas.iter().map(|l| lambda_tag(*l)).collect();
        tags.sort();
        tags.dedup();
        if tags.len() != self.lambdas.len() {
            return fail("lambdas must be distinct at 4 decimal places".into());
        }
        if self.windows.is_empty() {
            return fail("windows must not be empty".into());
        }
        for w in &self.windows {
            if !(w[0] < w[1]) || w[0] < 20.0 {
                return fail(format!(
                    "window [{}, {}] invalid: need 20 <= k_lo < k_hi",
                    w[0], w[1]
                ));
            }
        }
        if self.geometry.samples < 16 {
            return fail("geometry.samples must be at least 16".into());
        }
        if self.transport.ensemble == 0 {
            return fail("transport.ensemble must be positive".into());
        }
        if self.transport.fractions.is_empty()
            || self
                .transport
                .fractions
                .iter()
                .any(|f| !(0.0 < *f && *f < 1.0))
        {
            return fail("transport.fractions must all lie in (0, 1)".into());
        }
        if self.chaotic.nq == 0 || self.chaotic.np == 0 {
            return fail("chaotic grid dims must be positive".into());
        }
        if self.husimi.nq == 0 || self.husimi.np == 0 {
            return fail("husimi grid dims must be positive".into());
        }
        if !(-1.0..=1.0).contains(&self.husimi.m_t) {
            return fail(format!("husimi.m_t {} outside [-1, 1]", self.husimi.m_t));
        }
        if !(self.fit.a0 > 0.0) {
            return fail("fit.a0 must be positive".into());
        }
        if self.fit.histogram_bins < 4 {
            return fail("fit.histogram_bins must be at least 4".into());
        }
        if self.fit.block_size == 0 {
            return fail("fit.block_size must be positive".into());
        }
        if !(0.0 < self.fit.alpha_fraction && self.fit.alpha_fraction < 1.0) {
            return fail("fit.alpha_fraction must lie in (0, 1)".into());
        }
        if !self
            .transport
            .fractions
            .iter()
            .any(|f| (f - self.fit.alpha_fraction).abs() < 1e-12)
        {
            return fail(format!(
                "fit.alpha_fraction {} must be one of transport.fractions",
                self.fit.alpha_fraction
            ));
        }
        Ok(())
    }

    /// Hash of every numerically relevant field (not the output location or
    /// stage toggles), naming the content-addressed run directory.
    pub fn content_hash(&self) -> String {
        let identity = serde_json::json!({
            "lambdas": self.lambdas,
            "windows": self.windows,
            "seed": self.seed,
            "geometry": self.geometry,
            "transport": self.transport,
            "chaotic": self.chaotic,
            "solve": self.solve,
            "husimi": self.husimi,
            "fit": self.fit,
        });
        let bytes = serde_json::to_vec(&identity).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        let mut out = String::with_capacity(12);
        for byte in digest.iter().take(6) {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}

/// Directory tag of a deformation value: `0.25 → "0.2500"`.
pub fn lambda_tag(lambda: f64) -> String {
    format!("{lambda:.4}")
}
