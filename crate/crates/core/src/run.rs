//! Running a configuration end to end and writing its artifacts.
//!
//! A run directory holds:
//!
//! | file | content |
//! |---|---|
//! | `manifest.json` | config, derived gas constants, field metadata, seed, code version |
//! | `summary.json` | [`RunSummary`] |
//! | `residence.csv` | residence-time histogram of exiting molecules |
//! | `wall_chart.csv` | dense wall-hit matrix, pixel geometry in the first line |
//! | `thermalization.csv` | per-collision temperatures, when requested |
//! | `trajectories.csv`, `terminals.csv` | trajectory dump, when enabled |
//!
//! A sweep writes one such directory per sweep entry.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{RunSummary, Summarizer, ThermalizationCurve};
use crate::collision::SamplingMethod;
use crate::config::RunConfig;
use crate::flowfield::FieldMetadata;
use crate::tracer::{Tracer, TrajectoryRecord};
use crate::{Error, Result};

pub const MANIFEST_FORMAT: &str = "cryotrace-run-manifest";

/// Everything needed to repeat a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub code_version: String,
    pub master_seed: u64,
    pub sampling: String,
    pub gas: GasConstants,
    pub field_metadata: FieldMetadata,
    pub config: RunConfig,
}

/// Gas constants in the SI units the tracer uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasConstants {
    pub cross_section_m2: f64,
    pub molecule_mass_kg: f64,
    pub buffer_mass_kg: f64,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub summary: RunSummary,
    pub files: Vec<PathBuf>,
}

/// Runs `config` (or each of its sweep entries) into `out_dir`.
///
/// `seed` overrides `tracer.master_seed` of the base config; sweep entries
/// carry their own seeds.
pub fn run(config: &RunConfig, out_dir: &Path, workers: usize, seed: Option<u64>) -> Result<Vec<RunArtifacts>> {
    let mut base = config.clone();
    if let Some(s) = seed {
        base.tracer.master_seed = s;
    }
    base.validate()?;
    if base.sweep.is_empty() {
        return Ok(vec![run_single(&base, out_dir, workers)?]);
    }
    let mut out = Vec::with_capacity(base.sweep.len());
    for (i, point) in base.sweep.iter().enumerate() {
        let mut cfg = base.clone();
        cfg.sweep.clear();
        cfg.sampling = point.sampling;
        cfg.tracer.master_seed = point.seed;
        out.push(run_single(&cfg, &out_dir.join(sweep_dir_name(i, &point.sampling, point.seed)), workers)?);
    }
    Ok(out)
}

/// Directory name of sweep entry `i`, e.g. `00-weighted10-seed7`.
pub fn sweep_dir_name(i: usize, sampling: &SamplingMethod, seed: u64) -> String {
    let label: String = sampling.label().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
    format!("{i:02}-{label}-seed{seed}")
}

/// Runs one configuration, ignoring its sweep list.
pub fn run_single(config: &RunConfig, dir: &Path, workers: usize) -> Result<RunArtifacts> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let grid = config.build_grid()?;
    let regions = config.regions()?;
    let params = config.gas_params()?;
    let tracer = Tracer::new(&grid, &regions, params, config.sampling, &config.tracer)?;

    let mut echo = config.echo();
    echo.sweep.clear();
    let manifest = Manifest {
        format: MANIFEST_FORMAT.into(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        master_seed: config.tracer.master_seed,
        sampling: config.sampling.label(),
        gas: GasConstants {
            cross_section_m2: params.cross_section,
            molecule_mass_kg: params.molecule_mass,
            buffer_mass_kg: params.buffer_mass,
        },
        field_metadata: grid.metadata().clone(),
        config: echo.clone(),
    };
    let mut files = Vec::new();
    files.push(write_json(&dir.join("manifest.json"), &manifest)?);

    let mut summarizer = Summarizer::new(config.analysis, params, &regions, &grid.bounds());
    let mut dump = if config.dump_trajectories() {
        Some(TrajectoryDump::create(dir)?)
    } else {
        None
    };
    let stats = tracer.run_ensemble_with(workers, |record| {
        summarizer.push(&record);
        if let Some(d) = &mut dump {
            d.write(&record)?;
        }
        Ok(())
    })?;
    if let Some(d) = dump {
        files.extend(d.finish()?);
    }

    let summary = summarizer.finish(stats, config.tracer.collision_threshold, serde_json::to_value(&echo)?);
    files.push(write_json(&dir.join("summary.json"), &summary)?);

    let mut residence = String::from("bin_start_s,bin_end_s,fraction\n");
    if let Some(h) = &summary.residence {
        for (i, f) in h.fractions.iter().enumerate() {
            residence.push_str(&format!("{},{},{}\n", h.edges[i], h.edges[i + 1], f));
        }
    }
    files.push(write_text(&dir.join("residence.csv"), &residence)?);
    files.push(write_text(&dir.join("wall_chart.csv"), &summary.wall_chart.to_csv())?);
    if let Some(curve) = &summary.thermalization {
        files.push(write_text(&dir.join("thermalization.csv"), &thermalization_csv(curve))?);
    }
    Ok(RunArtifacts {
        dir: dir.to_path_buf(),
        summary,
        files,
    })
}

pub fn thermalization_csv(curve: &ThermalizationCurve) -> String {
    let mut s = String::from(
        "collisions,molecules,t_x_k,t_y_k,t_z_k,se_x_k,se_y_k,se_z_k,low_statistics\n",
    );
    for p in &curve.points {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            p.collisions,
            p.molecules,
            p.temperature[0],
            p.temperature[1],
            p.temperature[2],
            p.std_error[0],
            p.std_error[1],
            p.std_error[2],
            p.low_statistics
        ));
    }
    s
}

fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

/// Columnar trajectory dump: one row per sample, one row per terminal.
struct TrajectoryDump {
    samples: (PathBuf, csv::Writer<BufWriter<File>>),
    terminals: (PathBuf, csv::Writer<BufWriter<File>>),
}

impl TrajectoryDump {
    fn create(dir: &Path) -> Result<Self> {
        let open = |name: &str, header: &[&str]| -> Result<(PathBuf, csv::Writer<BufWriter<File>>)> {
            let path = dir.join(name);
            let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
            let mut w = csv::Writer::from_writer(BufWriter::new(file));
            w.write_record(header).map_err(|e| csv_err(&path, e))?;
            Ok((path, w))
        };
        Ok(Self {
            samples: open(
                "trajectories.csv",
                &["index", "t_s", "x_m", "y_m", "z_m", "vx_m_s", "vy_m_s", "vz_m_s", "collisions"],
            )?,
            terminals: open(
                "terminals.csv",
                &[
                    "index",
                    "class",
                    "residence_time_s",
                    "collisions",
                    "x_m",
                    "y_m",
                    "z_m",
                    "last_inside_x_m",
                    "last_inside_y_m",
                    "last_inside_z_m",
                ],
            )?,
        })
    }

    fn write(&mut self, r: &TrajectoryRecord) -> Result<()> {
        let (path, w) = &mut self.samples;
        for s in r.all_samples() {
            let row = [
                r.index.to_string(),
                s.time.to_string(),
                s.position.x.to_string(),
                s.position.y.to_string(),
                s.position.z.to_string(),
                s.velocity.x.to_string(),
                s.velocity.y.to_string(),
                s.velocity.z.to_string(),
                s.collisions.to_string(),
            ];
            w.write_record(&row).map_err(|e| csv_err(path, e))?;
        }
        let (path, w) = &mut self.terminals;
        let t = &r.terminal;
        let row = [
            r.index.to_string(),
            r.terminal_class.as_str().to_string(),
            t.time.to_string(),
            t.collisions.to_string(),
            t.position.x.to_string(),
            t.position.y.to_string(),
            t.position.z.to_string(),
            r.last_inside.x.to_string(),
            r.last_inside.y.to_string(),
            r.last_inside.z.to_string(),
        ];
        w.write_record(&row).map_err(|e| csv_err(path, e))
    }

    fn finish(self) -> Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        for (path, mut w) in [self.samples, self.terminals] {
            w.flush().map_err(|e| Error::io(&path, e))?;
            out.push(path);
        }
        Ok(out)
    }
}

fn csv_err(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}
