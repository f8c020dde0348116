//! Stage orchestration: runs the classical → quantum → statistics pipeline
//! over a `lambdas × windows` sweep and persists every intermediate result.
//!
//! Artifacts live under `<out_dir>/run-<config hash>` in one directory per
//! stage. Stages communicate only through these artifacts, so any stage can
//! be re-run in isolation once its inputs exist, and the `report` stage
//! assembles every figure and table analogue from disk without recomputing
//! physics. Identical configurations produce byte-identical numerical
//! artifacts regardless of thread count.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classical::{chaotic_grid, transport_time, ChaoticGrid};
use crate::geometry::{sample_boundary, BilliardShape};
use crate::husimi::{
    classify, entropy_localization, husimi_grid, nipr, overlap_index,
    threshold_from_classical_fraction, Classification, HusimiGrid, LocalizationRecord,
};
use crate::quantum::{solve_window, EigenstateRecord, Parity};
use crate::spectra::{
    fit_beta_dist, fit_brb, fit_brody, fit_rational, unfold, BetaDistModel, SmoothCount,
};

use super::config::{lambda_tag, ConfigError, RunConfig, Stage, ThresholdMode};
use super::io::{self, CsvField, CsvTable, IoError};

/// Pipeline failures, mapped to process exit codes by the binary.
#[derive(Debug, Error)]
pub enum PipelineError {
    /// Invalid configuration (exit code 2).
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// A stage input is absent; its producing stage has not run here yet
    /// (exit code 2).
    #[error("stage {stage}: missing input {path} (run its producing stage first)")]
    MissingArtifact { stage: &'static str, path: PathBuf },
    /// A stage computation failed (exit code 3).
    #[error("stage {stage}: {message}")]
    Stage { stage: &'static str, message: String },
    /// Reading or writing an artifact failed (exit code 3).
    #[error(transparent)]
    Io(#[from] IoError),
}

impl PipelineError {
    /// Exit code contract: 0 success, 2 config/usage, 3 numerical/runtime.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::MissingArtifact { .. } => 2,
            PipelineError::Stage { .. } | PipelineError::Io(_) => 3,
        }
    }
}

/// Timing and artifact listing of one executed stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    pub millis: u128,
    /// Paths relative to the run directory.
    pub artifacts: Vec<String>,
}

/// Written as `manifest.json` after each invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub version: String,
    pub stages: Vec<StageReport>,
}

// ---------------------------------------------------------------------------
// Artifact schemas (written by one stage, read back by later ones).

#[derive(Serialize, Deserialize)]
struct ShapeArtifact {
    lambda: f64,
    area: f64,
    perimeter: f64,
    symmetry_chord: f64,
    radius_max: f64,
    radius_min: f64,
}

#[derive(Serialize, Deserialize)]
struct TimeEntry {
    fraction: f64,
    collisions: u64,
}

#[derive(Serialize, Deserialize)]
struct TransportArtifact {
    lambda: f64,
    plateau: f64,
    launched: usize,
    used: usize,
    ensemble: usize,
    max_collisions: usize,
    seed: u64,
    times: Vec<TimeEntry>,
}

#[derive(Serialize, Deserialize)]
struct ChaoticHeader {
    lambda: f64,
    nq: usize,
    np: usize,
    perimeter: f64,
    seed: (f64, f64),
    lyapunov: f64,
    orbit_steps: usize,
    chi_c: f64,
}

#[derive(Serialize, Deserialize)]
struct WindowMeta {
    k_lo: f64,
    k_hi: f64,
    n_levels: usize,
    grid_size: usize,
    smooth: SmoothCount,
}

#[derive(Serialize, Deserialize)]
struct StateMeta {
    k: f64,
    n_b: usize,
    perimeter: f64,
    lambda: f64,
    normalization: String,
    parity: String,
}

#[derive(Serialize, Deserialize)]
struct HusimiMeta {
    k: f64,
    nq: usize,
    np: usize,
    lambda: f64,
}

#[derive(Serialize, Deserialize)]
struct ThresholdMeta {
    mode: String,
    m_t: f64,
    chi_c: f64,
    rho1: f64,
}

#[derive(Serialize, Deserialize)]
struct BrodyArtifact {
    beta: f64,
    log_likelihood: f64,
    ks: f64,
    n: usize,
}

#[derive(Serialize, Deserialize)]
struct BrbArtifact {
    rho1: f64,
    beta: f64,
    rho1_fixed: bool,
    log_likelihood: f64,
    ks: f64,
    n: usize,
}

#[derive(Serialize, Deserialize)]
struct BrbPair {
    fixed: BrbArtifact,
    free: BrbArtifact,
}

#[derive(Serialize, Deserialize)]
struct BetaArtifact {
    a: f64,
    b: f64,
    a0: f64,
    log_likelihood: f64,
    ks: f64,
    mean: f64,
    sigma: f64,
    n: usize,
}

// ---------------------------------------------------------------------------
// Path layout.

struct Layout {
    root: PathBuf,
}

impl Layout {
    fn lambda_dir(&self, stage: &str, lambda: f64) -> PathBuf {
        self.root
            .join(stage)
            .join(format!("lambda_{}", lambda_tag(lambda)))
    }

    fn window_dir(&self, stage: &str, lambda: f64, window: usize) -> PathBuf {
        self.lambda_dir(stage, lambda)
            .join(format!("window_{window:02}"))
    }

    fn report_dir(&self) -> PathBuf {
        self.root.join("report")
    }

    fn rel(&self, path: &Path) -> String {
        path.strip_prefix(&self.root)
            .unwrap_or(path)
            .to_string_lossy()
            .into_owned()
    }
}

fn state_stem(index: usize) -> String {
    format!("state_{index:04}")
}

fn require(stage: &'static str, path: &Path) -> Result<(), PipelineError> {
    if path.exists() {
        Ok(())
    } else {
        Err(PipelineError::MissingArtifact {
            stage,
            path: path.to_path_buf(),
        })
    }
}

fn stage_err<E: std::fmt::Display>(stage: &'static str) -> impl Fn(E) -> PipelineError {
    move |err| PipelineError::Stage {
        stage,
        message: err.to_string(),
    }
}

fn shape_for(stage: &'static str, lambda: f64) -> Result<BilliardShape, PipelineError> {
    BilliardShape::new(lambda).map_err(stage_err(stage))
}

// ---------------------------------------------------------------------------
// Entry point.

/// Runs the enabled stages (or exactly `only`, when given) and writes the
/// manifest. Returns the manifest that was written.
pub fn run(config: &RunConfig, only: Option<Stage>) -> Result<RunManifest, PipelineError> {
    config.validate()?;
    let hash = config.content_hash();
    let layout = Layout {
        root: config.out_dir.join(format!("run-{hash}")),
    };
    io::ensure_dir(&layout.root)?;
    // The recorded configuration drops the output location so that runs of
    // the same configuration are byte-identical wherever they land.
    let mut recorded = serde_json::to_value(config).expect("config serializes");
    recorded
        .as_object_mut()
        .expect("config is a JSON object")
        .remove("out_dir");
    io::write_json(&layout.root.join("config.json"), &recorded)?;

    let mut manifest = RunManifest {
        config_hash: hash,
        version: env!("CARGO_PKG_VERSION").to_string(),
        stages: Vec::new(),
    };
    for stage in Stage::ALL {
        let selected = match only {
            Some(chosen) => stage == chosen,
            None => config.stages.enabled(stage),
        };
        if !selected {
            continue;
        }
        let start = Instant::now();
        let artifacts = match stage {
            Stage::Geometry => stage_geometry(config, &layout)?,
            Stage::Transport => stage_transport(config, &layout)?,
            Stage::ChaoticGrid => stage_chaotic(config, &layout)?,
            Stage::Solve => stage_solve(config, &layout)?,
            Stage::Husimi => stage_husimi(config, &layout)?,
            Stage::Localize => stage_localize(config, &layout)?,
            Stage::SpectraFit => stage_spectra_fit(config, &layout)?,
            Stage::BetaFit => stage_beta_fit(config, &layout)?,
            Stage::Report => stage_report(config, &layout)?,
        };
        manifest.stages.push(StageReport {
            stage: stage.name().to_string(),
            millis: start.elapsed().as_millis(),
            artifacts,
        });
    }
    io::write_json(&layout.root.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// Stages.

fn stage_geometry(config: &RunConfig, layout: &Layout) -> Result<Vec<String>, PipelineError> {
    const STAGE: &str = "geometry";
    let mut artifacts = Vec::new();
    for &lambda in &config.lambdas {
        let shape = shape_for(STAGE, lambda)?;
        let dir = layout.lambda_dir(STAGE, lambda);
        io::ensure_dir(&dir)?;

        let shape_path = dir.join("shape.json");
        io::write_json(
            &shape_path,
            &ShapeArtifact {
                lambda,
                area: shape.area(),
                perimeter: shape.perimeter(),
                symmetry_chord: crate::quantum::symmetry_chord(&shape),
                radius_max: shape.radius_max(),
                radius_min: shape.radius_min(),
            },
        )?;
        artifacts.push(layout.rel(&shape_path));

        let mut table = CsvTable::new(&["theta", "s", "x", "y", "curvature", "speed"]);
        for point in sample_boundary(&shape, config.geometry.samples, 0.0) {
            table.row(&[
                CsvField::Float(point.theta),
                CsvField::Float(point.arclength),
                CsvField::Float(point.position.x),
                CsvField::Float(point.position.y),
                CsvField::Float(point.curvature),
                CsvField::Float(point.speed),
            ]);
        }
        let boundary_path = dir.join("boundary.csv");
        table.write(&boundary_path)?;
        artifacts.push(layout.rel(&boundary_path));
    }
    Ok(artifacts)
}

fn stage_transport(config: &RunConfig, layout: &Layout) -> Result<Vec<String>, PipelineError> {
    const STAGE: &str = "transport";
    let mut artifacts = Vec::new();
    for &lambda in &config.lambdas {
        let shape = shape_for(STAGE, lambda)?;
        let result = transport_time(&shape, &config.transport).map_err(stage_err(STAGE))?;
        let dir = layout.lambda_dir(STAGE, lambda);
        io::ensure_dir(&dir)?;

        let json_path = dir.join("transport.json");
        io::write_json(
            &json_path,
            &TransportArtifact {
                lambda,
                plateau: result.plateau,
                launched: result.launched,
                used: result.used,
                ensemble: config.transport.ensemble,
                max_collisions: config.transport.max_collisions,
                seed: config.transport.seed,
                times: result
                    .times
                    .iter()
                    .map(|t| TimeEntry {
                        fraction: t.fraction,
                        collisions: t.collisions as u64,
                    })
                    .collect(),
            },
        )?;
        artifacts.push(layout.rel(&json_path));

        let mut series = CsvTable::new(&["collision", "mean_p_squared"]);
        for (n, &p2) in result.mean_p_squared.iter().enumerate() {
            series.row(&[CsvField::Int(n as i64), CsvField::Float(p2)]);
        }
        let series_path = dir.join("p2_series.csv");
        series.write(&series_path)?;
        artifacts.push(layout.rel(&series_path));

        let mut times = CsvTable::new(&["lambda", "criterion", "n_t"]);
        for t in &result.times {
            times.row(&[
                CsvField::Float(lambda),
                CsvField::Float(t.fraction),
                CsvField::Int(t.collisions as i64),
            ]);
        }
        let times_path = dir.join("transport_times.csv");
        times.write(&times_path)?;
        artifacts.push(layout.rel(&times_path));
    }
    Ok(artifacts)
}

fn stage_chaotic(config: &RunConfig, layout: &Layout) -> Result<Vec<String>, PipelineError> {
    const STAGE: &str = "chaotic-grid";
    let mut artifacts = Vec::new();
    for &lambda in &config.lambdas {
        let shape = shape_for(STAGE, lambda)?;
        let grid = chaotic_grid(&shape, &config.chaotic).map_err(stage_err(STAGE))?;
        let dir = layout.lambda_dir(STAGE, lambda);
        io::ensure_dir(&dir)?;

        let header_path = dir.join("header.json");
        io::write_json(
            &header_path,
            &ChaoticHeader {
                lambda,
                nq: grid.nq,
                np: grid.np,
                perimeter: shape.perimeter(),
                seed: grid.seed,
                lyapunov: grid.lyapunov,
                orbit_steps: grid.orbit_steps,
                chi_c: grid.chi_c,
            },
        )?;
        artifacts.push(layout.rel(&header_path));

        let cells_path = dir.join("cells.bin");
        io::write_i8_bin(&cells_path, &grid.cells)?;
        artifacts.push(layout.rel(&cells_path));
    }
    Ok(artifacts)
}

fn stage_solve(config: &RunConfig, layout: &Layout) -> Result<Vec<String>, PipelineError> {
    const STAGE: &str = "solve";
    let mut artifacts = Vec::new();
    for &lambda in &config.lambdas {
        let shape = shape_for(STAGE, lambda)?;
        let lambda_dir = layout.lambda_dir(STAGE, lambda);
        io::ensure_dir(&lambda_dir)?;
        let mut spectrum = CsvTable::new(&["k", "window", "parity"]);

        for (w, window) in config.windows.iter().enumerate() {
            let solved = solve_window(&shape, window[0], window[1], &config.solve)
                .map_err(stage_err(STAGE))?;
            let dir = layout.window_dir(STAGE, lambda, w);
            io::ensure_dir(&dir)?;

            let meta_path = dir.join("window.json");
            io::write_json(
                &meta_path,
                &WindowMeta {
                    k_lo: solved.k_lo,
                    k_hi: solved.k_hi,
                    n_levels: solved.levels.len(),
                    grid_size: solved
                        .levels
                        .first()
                        .map_or(0, |level| level.boundary_grid_size),
                    smooth: solved.smooth,
                },
            )?;
            artifacts.push(layout.rel(&meta_path));

            for (i, level) in solved.levels.iter().enumerate() {
                spectrum.row(&[
                    CsvField::Float(level.k),
                    CsvField::Int(w as i64),
                    CsvField::Str("even"),
                ]);
                let stem = state_stem(i);
                let meta = dir.join(format!("{stem}.json"));
                io::write_json(
                    &meta,
                    &StateMeta {
                        k: level.k,
                        n_b: level.boundary_grid_size,
                        perimeter: shape.perimeter(),
                        lambda,
                        normalization: "flux 2k^2".to_string(),
                        parity: "even".to_string(),
                    },
                )?;
                let bin = dir.join(format!("{stem}.bin"));
                io::write_f64_bin(&bin, &level.u_samples)?;
                artifacts.push(layout.rel(&meta));
                artifacts.push(layout.rel(&bin));
            }
        }
        let spectrum_path = lambda_dir.join("spectrum.csv");
        spectrum.write(&spectrum_path)?;
        artifacts.push(layout.rel(&spectrum_path));
    }
    Ok(artifacts)
}

/// Loads the boundary functions of one solved window back from disk.
fn load_window_states(
    stage: &'static str,
    dir: &Path,
) -> Result<Vec<EigenstateRecord>, PipelineError> {
    let meta_path = dir.join("window.json");
    require(stage, &meta_path)?;
    let meta: WindowMeta = io::read_json(&meta_path)?;
    let mut records = Vec::with_capacity(meta.n_levels);
    for i in 0..meta.n_levels {
        let stem = state_stem(i);
        let state_meta_path = dir.join(format!("{stem}.json"));
        let state_bin_path = dir.join(format!("{stem}.bin"));
        require(stage, &state_meta_path)?;
        require(stage, &state_bin_path)?;
        let state_meta: StateMeta = io::read_json(&state_meta_path)?;
        let u = io::read_f64_bin(&state_bin_path)?;
        if u.len() != state_meta.n_b {
            return Err(PipelineError::Stage {
                stage,
                message: format!(
                    "{} holds {} samples, header says {}",
                    state_bin_path.display(),
                    u.len(),
                    state_meta.n_b
                ),
            });
        }
        records.push(EigenstateRecord {
            k: state_meta.k,
            u_samples: u,
            parity: Parity::Even,
            boundary_grid_size: state_meta.n_b,
        });
    }
    Ok(records)
}

fn stage_husimi(config: &RunConfig, layout: &Layout) -> Result<Vec<String>, PipelineError> {
    const STAGE: &str = "husimi";
    let mut artifacts = Vec::new();
    for &lambda in &config.lambdas {
        let shape = shape_for(STAGE, lambda)?;
        for w in 0..config.windows.len() {
            let solve_dir = layout.window_dir("solve", lambda, w);
            let records = load_window_states(STAGE, &solve_dir)?;
            let out_dir = layout.window_dir(STAGE, lambda, w);
            io::ensure_dir(&out_dir)?;
            for (i, record) in records.iter().enumerate() {
                let grid = husimi_grid(&shape, record, config.husimi.nq, config.husimi.np);
                let stem = state_stem(i);
                let meta = out_dir.join(format!("{stem}.json"));
                io::write_json(
                    &meta,
                    &HusimiMeta {
                        k: grid.k,
                        nq: grid.nq,
                        np: grid.np,
                        lambda,
                    },
                )?;
                let bin = out_dir.join(format!("{stem}.bin"));
                io::write_f64_bin(&bin, &grid.values)?;
                artifacts.push(layout.rel(&meta));
                artifacts.push(layout.rel(&bin));
            }
        }
    }
    Ok(artifacts)
}

/// Loads the chaotic-component grid of one deformation back from disk.
fn load_chaotic(
    stage: &'static str,
    layout: &Layout,
    lambda: f64,
) -> Result<ChaoticGrid, PipelineError> {
    let dir = layout.lambda_dir("chaotic-grid", lambda);
    let header_path = dir.join("header.json");
    let cells_path = dir.join("cells.bin");
    require(stage, &header_path)?;
    require(stage, &cells_path)?;
    let header: ChaoticHeader = io::read_json(&header_path)?;
    let cells = io::read_i8_bin(&cells_path)?;
    if cells.len() != header.nq * header.np {
        return Err(PipelineError::Stage {
            stage,
            message: format!(
                "{} holds {} cells, header says {}x{}",
                cells_path.display(),
                cells.len(),
                header.nq,
                header.np
            ),
        });
    }
    let chi_c = header.chi_c;
    Ok(ChaoticGrid {
        lambda: header.lambda,
        nq: header.nq,
        np: header.np,
        cells,
        chi_c,
        seed: header.seed,
        lyapunov: header.lyapunov,
        orbit_steps: header.orbit_steps,
    })
}

fn load_husimi_states(
    stage: &'static str,
    layout: &Layout,
    lambda: f64,
    window: usize,
) -> Result<Vec<HusimiGrid>, PipelineError> {
    let solve_meta_path = layout.window_dir("solve", lambda, window).join("window.json");
    require(stage, &solve_meta_path)?;
    let meta: WindowMeta = io::read_json(&solve_meta_path)?;
    let dir = layout.window_dir("husimi", lambda, window);
    let mut grids = Vec::with_capacity(meta.n_levels);
    for i in 0..meta.n_levels {
        let stem = state_stem(i);
        let meta_path = dir.join(format!("{stem}.json"));
        let bin_path = dir.join(format!("{stem}.bin"));
        require(stage, &meta_path)?;
        require(stage, &bin_path)?;
        let header: HusimiMeta = io::read_json(&meta_path)?;
        let values = io::read_f64_bin(&bin_path)?;
        if values.len() != header.nq * header.np {
            return Err(PipelineError::Stage {
                stage,
                message: format!(
                    "{} holds {} cells, header says {}x{}",
                    bin_path.display(),
                    values.len(),
                    header.nq,
                    header.np
                ),
            });
        }
        grids.push(HusimiGrid {
            k: header.k,
            lambda: header.lambda,
            nq: header.nq,
            np: header.np,
            values,
        });
    }
    Ok(grids)
}

fn stage_localize(config: &RunConfig, layout: &Layout) -> Result<Vec<String>, PipelineError> {
    const STAGE: &str = "localize";
    let mut artifacts = Vec::new();
    for &lambda in &config.lambdas {
        let chaotic = load_chaotic(STAGE, layout, lambda)?;
        let mut grids: Vec<HusimiGrid> = Vec::new();
        for w in 0..config.windows.len() {
            grids.extend(load_husimi_states(STAGE, layout, lambda, w)?);
        }
        grids.sort_by(|a, b| a.k.total_cmp(&b.k));

        let measures: Vec<(f64, f64, f64, f64)> = grids
            .iter()
            .map(|grid| {
                let m = overlap_index(grid, &chaotic).map_err(stage_err(STAGE))?;
                Ok((grid.k, entropy_localization(grid), nipr(grid), m))
            })
            .collect::<Result<_, PipelineError>>()?;

        let rho1 = 1.0 - chaotic.chi_c;
        let (mode, m_t) = match config.husimi.threshold {
            ThresholdMode::Fixed => ("fixed", config.husimi.m_t),
            ThresholdMode::ClassicalFraction => {
                let ms: Vec<f64> = measures.iter().map(|r| r.3).collect();
                (
                    "classical-fraction",
                    threshold_from_classical_fraction(&ms, rho1),
                )
            }
        };

        let records: Vec<LocalizationRecord> = measures
            .iter()
            .map(|&(k, a, r, m)| LocalizationRecord {
                k,
                a,
                a_normalized: a / chaotic.chi_c,
                nipr: r,
                m,
                classification: classify(m, m_t),
            })
            .collect();

        let dir = layout.lambda_dir(STAGE, lambda);
        io::ensure_dir(&dir)?;
        let jsonl_path = dir.join("localization.jsonl");
        io::write_jsonl(&jsonl_path, &records)?;
        artifacts.push(layout.rel(&jsonl_path));

        let threshold_path = dir.join("threshold.json");
        io::write_json(
            &threshold_path,
            &ThresholdMeta {
                mode: mode.to_string(),
                m_t,
                chi_c: chaotic.chi_c,
                rho1,
            },
        )?;
        artifacts.push(layout.rel(&threshold_path));
    }
    Ok(artifacts)
}

fn stage_spectra_fit(config: &RunConfig, layout: &Layout) -> Result<Vec<String>, PipelineError> {
    const STAGE: &str = "spectra-fit";
    let mut artifacts = Vec::new();
    for &lambda in &config.lambdas {
        let chaotic_header_path = layout
            .lambda_dir("chaotic-grid", lambda)
            .join("header.json");
        require(STAGE, &chaotic_header_path)?;
        let chaotic: ChaoticHeader = io::read_json(&chaotic_header_path)?;
        let rho1 = 1.0 - chaotic.chi_c;

        let mut spacings: Vec<f64> = Vec::new();
        for w in 0..config.windows.len() {
            let meta_path = layout.window_dir("solve", lambda, w).join("window.json");
            require(STAGE, &meta_path)?;
            let meta: WindowMeta = io::read_json(&meta_path)?;
            let mut ks = Vec::with_capacity(meta.n_levels);
            for i in 0..meta.n_levels {
                let state_path = layout
                    .window_dir("solve", lambda, w)
                    .join(format!("{}.json", state_stem(i)));
                require(STAGE, &state_path)?;
                let state: StateMeta = io::read_json(&state_path)?;
                ks.push(state.k);
            }
            if ks.len() < 2 {
                continue;
            }
            let unfolded = unfold(&ks, &meta.smooth).map_err(stage_err(STAGE))?;
            spacings.extend(unfolded.spacings);
        }

        let dir = layout.lambda_dir(STAGE, lambda);
        io::ensure_dir(&dir)?;
        let mut spacing_csv = CsvTable::new(&["spacing"]);
        for &s in &spacings {
            spacing_csv.row(&[CsvField::Float(s)]);
        }
        let spacings_path = dir.join("spacings.csv");
        spacing_csv.write(&spacings_path)?;
        artifacts.push(layout.rel(&spacings_path));

        let brody = fit_brody(&spacings).map_err(stage_err(STAGE))?;
        let brody_path = dir.join("brody_fit.json");
        io::write_json(
            &brody_path,
            &BrodyArtifact {
                beta: brody.model.beta(),
                log_likelihood: brody.log_likelihood,
                ks: brody.ks,
                n: brody.n,
            },
        )?;
        artifacts.push(layout.rel(&brody_path));

        let fixed = fit_brb(&spacings, Some(rho1)).map_err(stage_err(STAGE))?;
        let free = fit_brb(&spacings, None).map_err(stage_err(STAGE))?;
        let as_artifact = |fit: &crate::spectra::BrbFit| BrbArtifact {
            rho1: fit.model.rho1(),
            beta: fit.model.beta(),
            rho1_fixed: fit.rho1_fixed,
            log_likelihood: fit.log_likelihood,
            ks: fit.ks,
            n: fit.n,
        };
        let brb_path = dir.join("brb_fit.json");
        io::write_json(
            &brb_path,
            &BrbPair {
                fixed: as_artifact(&fixed),
                free: as_artifact(&free),
            },
        )?;
        artifacts.push(layout.rel(&brb_path));

        // Model curves against the empirical spacing histogram.
        let s_max = spacings.iter().cloned().fold(0.0, f64::max).max(1.0) * 1.05;
        let bins = config.fit.histogram_bins;
        let hist = density_histogram(&spacings, 0.0, s_max, bins);
        let mut curves = CsvTable::new(&["s", "p_brody", "p_brb_fixed", "p_brb_free", "p_hist"]);
        for (bin, &h) in hist.iter().enumerate() {
            let s = (bin as f64 + 0.5) * s_max / bins as f64;
            curves.row(&[
                CsvField::Float(s),
                CsvField::Float(brody.model.pdf(s)),
                CsvField::Float(fixed.model.pdf(s)),
                CsvField::Float(free.model.pdf(s)),
                CsvField::Float(h),
            ]);
        }
        let curves_path = dir.join("spacing_curves.csv");
        curves.write(&curves_path)?;
        artifacts.push(layout.rel(&curves_path));
    }
    Ok(artifacts)
}

fn stage_beta_fit(config: &RunConfig, layout: &Layout) -> Result<Vec<String>, PipelineError> {
    const STAGE: &str = "beta-fit";
    let mut artifacts = Vec::new();
    for &lambda in &config.lambdas {
        let jsonl_path = layout
            .lambda_dir("localize", lambda)
            .join("localization.jsonl");
        require(STAGE, &jsonl_path)?;
        let records: Vec<LocalizationRecord> = io::read_jsonl(&jsonl_path)?;
        let all: Vec<f64> = records
            .iter()
            .filter(|r| r.classification == Classification::Chaotic)
            .map(|r| r.a_normalized)
            .collect();

        let dir = layout.lambda_dir(STAGE, lambda);
        io::ensure_dir(&dir)?;
        let mut sample_csv = CsvTable::new(&["a_normalized"]);
        for &a in &all {
            sample_csv.row(&[CsvField::Float(a)]);
        }
        let samples_path = dir.join("a_samples.csv");
        sample_csv.write(&samples_path)?;
        artifacts.push(layout.rel(&samples_path));

        // The model's upper support edge is empirical; the occasional sample
        // at or beyond it has zero model likelihood and stays out of the fit
        // (every sample is still on record in the CSV above).
        let samples: Vec<f64> = all
            .iter()
            .copied()
            .filter(|&a| a > 0.0 && a < config.fit.a0)
            .collect();
        let fit = fit_beta_dist(&samples, config.fit.a0).map_err(stage_err(STAGE))?;
        let fit_path = dir.join("beta_fit.json");
        io::write_json(
            &fit_path,
            &BetaArtifact {
                a: fit.model.a(),
                b: fit.model.b(),
                a0: fit.model.a0(),
                log_likelihood: fit.log_likelihood,
                ks: fit.ks,
                mean: fit.mean,
                sigma: fit.sigma,
                n: fit.n,
            },
        )?;
        artifacts.push(layout.rel(&fit_path));

        let bins = config.fit.histogram_bins;
        let hist = density_histogram(&samples, 0.0, config.fit.a0, bins);
        let mut curves = CsvTable::new(&["a", "p_model", "p_hist"]);
        for (bin, &h) in hist.iter().enumerate() {
            let a = (bin as f64 + 0.5) * config.fit.a0 / bins as f64;
            curves.row(&[
                CsvField::Float(a),
                CsvField::Float(fit.model.pdf(a)),
                CsvField::Float(h),
            ]);
        }
        let curves_path = dir.join("a_curves.csv");
        curves.write(&curves_path)?;
        artifacts.push(layout.rel(&curves_path));
    }
    Ok(artifacts)
}

// ---------------------------------------------------------------------------
// Report.

/// Density-normalized histogram over `[lo, hi)`.
fn density_histogram(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut counts = vec![0usize; bins];
    let width = (hi - lo) / bins as f64;
    let mut kept = 0usize;
    for &x in samples {
        if x >= lo && x < hi {
            let bin = (((x - lo) / width) as usize).min(bins - 1);
            counts[bin] += 1;
            kept += 1;
        }
    }
    if kept == 0 {
        return vec![0.0; bins];
    }
    counts
        .into_iter()
        .map(|c| c as f64 / (kept as f64 * width))
        .collect()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

/// Least-squares line through `(x, y)` points: `(slope, intercept, pearson)`.
fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let pearson = sxy / (sxx * syy).sqrt();
    (slope, my - slope * mx, pearson)
}

fn stage_report(config: &RunConfig, layout: &Layout) -> Result<Vec<String>, PipelineError> {
    const STAGE: &str = "report";
    let dir = layout.report_dir();
    io::ensure_dir(&dir)?;
    let mut artifacts = Vec::new();
    let toggles = &config.stages;

    // Table I analogue: transport times.
    if toggles.transport {
        let mut table = CsvTable::new(&["lambda", "criterion", "n_t"]);
        for &lambda in &config.lambdas {
            let path = layout.lambda_dir("transport", lambda).join("transport.json");
            require(STAGE, &path)?;
            let transport: TransportArtifact = io::read_json(&path)?;
            for t in &transport.times {
                table.row(&[
                    CsvField::Float(lambda),
                    CsvField::Float(t.fraction),
                    CsvField::Int(t.collisions as i64),
                ]);
            }
        }
        let path = dir.join("transport_table.csv");
        table.write(&path)?;
        artifacts.push(layout.rel(&path));
    }

    // Per-lambda localization data, reused by several outputs below.
    let mut localization: Vec<(f64, Vec<LocalizationRecord>, f64)> = Vec::new();
    if toggles.localize {
        for &lambda in &config.lambdas {
            let jsonl = layout
                .lambda_dir("localize", lambda)
                .join("localization.jsonl");
            let threshold_path = layout.lambda_dir("localize", lambda).join("threshold.json");
            require(STAGE, &jsonl)?;
            require(STAGE, &threshold_path)?;
            let records: Vec<LocalizationRecord> = io::read_jsonl(&jsonl)?;
            let threshold: ThresholdMeta = io::read_json(&threshold_path)?;
            localization.push((lambda, records, threshold.chi_c));
        }
    }

    // Fig. 1 analogue: block-averaged nIPR against A with a linear fit.
    if toggles.localize {
        let mut scatter = CsvTable::new(&["lambda", "block", "a_mean", "nipr_mean", "n_states"]);
        let mut fits = CsvTable::new(&["lambda", "slope", "intercept", "pearson", "n_blocks"]);
        for (lambda, records, _) in &localization {
            let chaotic: Vec<&LocalizationRecord> = records
                .iter()
                .filter(|r| r.classification == Classification::Chaotic)
                .collect();
            let block = config.fit.block_size.min(chaotic.len().max(1));
            let mut points = Vec::new();
            for (b, chunk) in chaotic.chunks(block).enumerate() {
                if chunk.len() < block.min(2) {
                    continue;
                }
                let a: Vec<f64> = chunk.iter().map(|r| r.a).collect();
                let p: Vec<f64> = chunk.iter().map(|r| r.nipr).collect();
                let (am, pm) = (mean(&a), mean(&p));
                scatter.row(&[
                    CsvField::Float(*lambda),
                    CsvField::Int(b as i64),
                    CsvField::Float(am),
                    CsvField::Float(pm),
                    CsvField::Int(chunk.len() as i64),
                ]);
                points.push((am, pm));
            }
            if points.len() >= 3 {
                let (slope, intercept, pearson) = linear_fit(&points);
                fits.row(&[
                    CsvField::Float(*lambda),
                    CsvField::Float(slope),
                    CsvField::Float(intercept),
                    CsvField::Float(pearson),
                    CsvField::Int(points.len() as i64),
                ]);
            }
        }
        let scatter_path = dir.join("nipr_vs_a.csv");
        scatter.write(&scatter_path)?;
        artifacts.push(layout.rel(&scatter_path));
        let fit_path = dir.join("nipr_vs_a_fit.csv");
        fits.write(&fit_path)?;
        artifacts.push(layout.rel(&fit_path));
    }

    // Transport times per lambda, for the control parameter alpha.
    let mut alpha_by_lambda: Vec<(f64, f64)> = Vec::new(); // (lambda, N_T)
    if toggles.transport {
        for &lambda in &config.lambdas {
            let path = layout.lambda_dir("transport", lambda).join("transport.json");
            require(STAGE, &path)?;
            let transport: TransportArtifact = io::read_json(&path)?;
            let entry = transport
                .times
                .iter()
                .find(|t| (t.fraction - config.fit.alpha_fraction).abs() < 1e-12)
                .ok_or_else(|| PipelineError::Stage {
                    stage: STAGE,
                    message: format!(
                        "transport artifact for lambda {lambda} lacks the \
                         alpha fraction {}",
                        config.fit.alpha_fraction
                    ),
                })?;
            alpha_by_lambda.push((lambda, entry.collisions as f64));
        }
    }

    // Figs. 2–3 analogues: mean and spread of A against alpha = 2k/N_T.
    if toggles.localize && toggles.transport {
        let mut means = CsvTable::new(&[
            "lambda",
            "window",
            "k_center",
            "alpha",
            "a_mean",
            "a_normalized_mean",
        ]);
        let mut sigmas = CsvTable::new(&["lambda", "window", "alpha", "sigma_a_normalized"]);
        for (lambda, records, _) in &localization {
            let n_t = alpha_by_lambda
                .iter()
                .find(|(l, _)| l == lambda)
                .map(|(_, t)| *t)
                .expect("transport read above");
            for (w, window) in config.windows.iter().enumerate() {
                let in_window: Vec<&LocalizationRecord> = records
                    .iter()
                    .filter(|r| {
                        r.k >= window[0]
                            && r.k <= window[1]
                            && r.classification == Classification::Chaotic
                    })
                    .collect();
                if in_window.is_empty() {
                    continue;
                }
                let k_center = 0.5 * (window[0] + window[1]);
                let alpha = 2.0 * k_center / n_t;
                let a: Vec<f64> = in_window.iter().map(|r| r.a).collect();
                let an: Vec<f64> = in_window.iter().map(|r| r.a_normalized).collect();
                means.row(&[
                    CsvField::Float(*lambda),
                    CsvField::Int(w as i64),
                    CsvField::Float(k_center),
                    CsvField::Float(alpha),
                    CsvField::Float(mean(&a)),
                    CsvField::Float(mean(&an)),
                ]);
                sigmas.row(&[
                    CsvField::Float(*lambda),
                    CsvField::Int(w as i64),
                    CsvField::Float(alpha),
                    CsvField::Float(std_dev(&an)),
                ]);
            }
        }
        let means_path = dir.join("a_vs_alpha.csv");
        means.write(&means_path)?;
        artifacts.push(layout.rel(&means_path));
        let sigma_path = dir.join("sigma_vs_alpha.csv");
        sigmas.write(&sigma_path)?;
        artifacts.push(layout.rel(&sigma_path));
    }

    // Figs. 5–8 analogue: P(A) histograms with the fitted beta curves.
    if toggles.beta_fit && toggles.localize {
        let mut table = CsvTable::new(&["lambda", "a", "p_hist", "p_fit"]);
        for (lambda, records, _) in &localization {
            let fit_path = layout.lambda_dir("beta-fit", *lambda).join("beta_fit.json");
            require(STAGE, &fit_path)?;
            let fit: BetaArtifact = io::read_json(&fit_path)?;
            let model =
                BetaDistModel::new(fit.a, fit.b, fit.a0).map_err(stage_err(STAGE))?;
            let samples: Vec<f64> = records
                .iter()
                .filter(|r| r.classification == Classification::Chaotic)
                .map(|r| r.a_normalized)
                .collect();
            let bins = config.fit.histogram_bins;
            let hist = density_histogram(&samples, 0.0, fit.a0, bins);
            for (bin, &h) in hist.iter().enumerate() {
                let a = (bin as f64 + 0.5) * fit.a0 / bins as f64;
                table.row(&[
                    CsvField::Float(*lambda),
                    CsvField::Float(a),
                    CsvField::Float(h),
                    CsvField::Float(model.pdf(a)),
                ]);
            }
        }
        let path = dir.join("pa_hist.csv");
        table.write(&path)?;
        artifacts.push(layout.rel(&path));
    }

    // Fig. 9 analogue: level-repulsion exponent against mean localization.
    if toggles.spectra_fit && toggles.localize {
        let mut table = CsvTable::new(&["lambda", "beta", "a_normalized_mean"]);
        for (lambda, records, _) in &localization {
            let brody_path = layout
                .lambda_dir("spectra-fit", *lambda)
                .join("brody_fit.json");
            require(STAGE, &brody_path)?;
            let brody: BrodyArtifact = io::read_json(&brody_path)?;
            let an: Vec<f64> = records
                .iter()
                .filter(|r| r.classification == Classification::Chaotic)
                .map(|r| r.a_normalized)
                .collect();
            if an.is_empty() {
                continue;
            }
            table.row(&[
                CsvField::Float(*lambda),
                CsvField::Float(brody.beta),
                CsvField::Float(mean(&an)),
            ]);
        }
        let path = dir.join("beta_vs_a.csv");
        table.write(&path)?;
        artifacts.push(layout.rel(&path));
    }

    // Fig. 10 analogue: beta against alpha, with a rational saturation fit
    // once enough deformations are available.
    if toggles.spectra_fit && toggles.transport {
        let mut table = CsvTable::new(&["lambda", "window", "alpha", "beta"]);
        let mut points = Vec::new();
        for &lambda in &config.lambdas {
            let brody_path = layout
                .lambda_dir("spectra-fit", lambda)
                .join("brody_fit.json");
            require(STAGE, &brody_path)?;
            let brody: BrodyArtifact = io::read_json(&brody_path)?;
            let n_t = alpha_by_lambda
                .iter()
                .find(|(l, _)| *l == lambda)
                .map(|(_, t)| *t)
                .expect("transport read above");
            for (w, window) in config.windows.iter().enumerate() {
                let k_center = 0.5 * (window[0] + window[1]);
                let alpha = 2.0 * k_center / n_t;
                table.row(&[
                    CsvField::Float(lambda),
                    CsvField::Int(w as i64),
                    CsvField::Float(alpha),
                    CsvField::Float(brody.beta),
                ]);
                points.push((alpha, brody.beta));
            }
        }
        let path = dir.join("beta_vs_alpha.csv");
        table.write(&path)?;
        artifacts.push(layout.rel(&path));

        if points.len() >= 5 {
            if let Ok(fit) = fit_rational(&points) {
                let mut fit_table = CsvTable::new(&["asymptote", "s", "rmse"]);
                fit_table.row(&[
                    CsvField::Float(fit.asymptote),
                    CsvField::Float(fit.s),
                    CsvField::Float(fit.rmse),
                ]);
                let fit_path = dir.join("beta_vs_alpha_fit.csv");
                fit_table.write(&fit_path)?;
                artifacts.push(layout.rel(&fit_path));
            }
        }
    }

    // Eq. (26) analogue: rational fit of mean A against alpha.
    if toggles.localize && toggles.transport {
        let means_path = dir.join("a_vs_alpha.csv");
        if means_path.exists() {
            let alphas = io::read_csv_column(&means_path, "alpha")?;
            let a_means = io::read_csv_column(&means_path, "a_normalized_mean")?;
            let points: Vec<(f64, f64)> =
                alphas.into_iter().zip(a_means).collect();
            if points.len() >= 5 {
                if let Ok(fit) = fit_rational(&points) {
                    let mut fit_table = CsvTable::new(&["asymptote", "s", "rmse"]);
                    fit_table.row(&[
                        CsvField::Float(fit.asymptote),
                        CsvField::Float(fit.s),
                        CsvField::Float(fit.rmse),
                    ]);
                    let fit_path = dir.join("a_vs_alpha_fit.csv");
                    fit_table.write(&fit_path)?;
                    artifacts.push(layout.rel(&fit_path));
                }
            }
        }
    }

    Ok(artifacts)
}
