//! Declarative run configuration.
//!
//! A run is described by one TOML file whose field names carry their SI
//! unit (`voxel_size_m`, `sigma_m2`, ...). Relative paths are resolved
//! against the directory of the file that names them.
//!
//! ```toml
//! schema_version = 1
//! voxel_size_m = 5e-4
//!
//! [bounds]
//! min_m = [-4e-3, -4e-3, -4e-3]
//! max_m = [4e-3, 4e-3, 4e-3]
//!
//! [field]
//! source = "analytic"
//! analytic = { type = "stagnant", number_density_m3 = 1e21, temperature_k = 4.5 }
//!
//! [regions.source]
//! center_m = [0.0, 0.0, 0.0]
//! normal = [1.0, 0.0, 0.0]
//! radius_m = 5e-4
//!
//! [regions.exit]
//! center_m = [0.0, 0.0, 4e-3]
//! normal = [0.0, 0.0, -1.0]
//! radius_m = 1e-3
//!
//! [tracer]
//! target_count = 100
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::AnalysisOptions;
use crate::collision::{GasParams, SamplingMethod};
use crate::flowfield::{self, Aabb, AnalyticField, CellShape, FieldMetadata, VoxelGrid};
use crate::geometry::{CellRegions, Disc};
use crate::tracer::TracerConfig;
use crate::{Error, Result, Vec3};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

/// Above this many trajectories the dump is off unless asked for.
pub const DUMP_AUTO_LIMIT: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub voxel_size_m: f64,
    pub bounds: Aabb,
    pub field: FieldSource,
    pub regions: RegionsConfig,
    #[serde(default)]
    pub gas: GasConfig,
    #[serde(default)]
    pub tracer: TracerConfig,
    #[serde(default)]
    pub sampling: SamplingMethod,
    #[serde(default)]
    pub analysis: AnalysisOptions,
    #[serde(default)]
    pub output: OutputConfig,
    /// One run per entry, each overriding the sampling method and seed.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSource {
    /// Scattered samples, voxelized and soft-edge filled.
    Csv {
        path: PathBuf,
        #[serde(default)]
        metadata: FieldMetadata,
    },
    /// A grid previously written with [`flowfield::io::write_grid`].
    Grid { path: PathBuf },
    Analytic {
        analytic: AnalyticField,
        #[serde(default)]
        shape: CellShape,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionsConfig {
    pub source: Disc,
    pub exit: Disc,
    /// Defaults to half the largest bounds extent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart_radius_m: Option<f64>,
    /// Defaults to the voxel size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plane_tolerance_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GasConfig {
    pub sigma_m2: f64,
    pub molecule_mass_amu: f64,
    pub buffer_mass_amu: f64,
}

impl Default for GasConfig {
    fn default() -> Self {
        Self {
            sigma_m2: 1.2e-17,
            molecule_mass_amu: 128.0,
            buffer_mass_amu: 4.0,
        }
    }
}

impl GasConfig {
    pub fn params(&self) -> Result<GasParams> {
        GasParams::from_amu(self.sigma_m2, self.molecule_mass_amu, self.buffer_mass_amu)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Write `trajectories.csv`/`terminals.csv`. Defaults to on up to
    /// [`DUMP_AUTO_LIMIT`] trajectories.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub sampling: SamplingMethod,
    pub seed: u64,
}

/// One configuration problem, located by dotted field path and, for parse
/// errors, by line and column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub field: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            line: None,
            column: None,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "{}:{}: {}: {}", l, c, self.field, self.message),
            _ => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

fn diagnostics_error(diags: &[Diagnostic]) -> Error {
    Error::Config(diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))
}

impl RunConfig {
    /// Parses TOML; relative paths are resolved against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> std::result::Result<Self, Vec<Diagnostic>> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| vec![toml_diagnostic(text, &e)])?;
        cfg.resolve_paths(base_dir);
        Ok(cfg)
    }

    /// Loads a TOML config, or the config embedded in a JSON run manifest.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if path.extension().is_some_and(|e| e == "json") {
            let manifest: crate::run::Manifest = serde_json::from_str(&text)?;
            let mut cfg = manifest.config;
            cfg.resolve_paths(base);
            return Ok(cfg);
        }
        Self::from_toml_str(&text, base).map_err(|d| {
            let mut e = diagnostics_error(&d);
            if let Error::Config(msg) = &mut e {
                *msg = format!("{}:{msg}", path.display());
            }
            e
        })
    }

    /// Parses and checks a config file without running it.
    pub fn validate_path(path: &Path) -> Result<Vec<Diagnostic>> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if path.extension().is_some_and(|e| e == "json") {
            return Ok(match Self::load(path) {
                Ok(cfg) => cfg.diagnostics(),
                Err(e) => vec![Diagnostic::new("manifest", e.to_string())],
            });
        }
        let base = path.parent().unwrap_or(Path::new("."));
        Ok(match Self::from_toml_str(&text, base) {
            Ok(cfg) => cfg.diagnostics(),
            Err(d) => d,
        })
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match &mut self.field {
            FieldSource::Csv { path, .. } | FieldSource::Grid { path } => fix(path),
            FieldSource::Analytic { .. } => {}
        }
        if let Some(dir) = &mut self.output.dir {
            fix(dir);
        }
    }

    /// Schema and physics checks. Empty means the run will not fail on
    /// configuration grounds.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut d = Vec::new();
        let mut check = |field: &str, r: Result<()>| {
            if let Err(e) = r {
                d.push(Diagnostic::new(field, strip_prefix(&e)));
            }
        };

        if self.schema_version != CONFIG_SCHEMA_VERSION {
            check(
                "schema_version",
                Err(Error::invalid(format!(
                    "unsupported schema version {}, expected {CONFIG_SCHEMA_VERSION}",
                    self.schema_version
                ))),
            );
        }
        if !(self.voxel_size_m.is_finite() && self.voxel_size_m > 0.0) {
            check(
                "voxel_size_m",
                Err(Error::invalid(format!("must be > 0, got {}", self.voxel_size_m))),
            );
        }
        let bounds = Aabb::new(self.bounds.min, self.bounds.max);
        check("bounds", bounds.as_ref().map(|_| ()).map_err(clone_err));

        let g = &self.gas;
        if !(g.sigma_m2.is_finite() && g.sigma_m2 > 0.0) {
            check("gas.sigma_m2", Err(Error::invalid(format!("must be > 0, got {}", g.sigma_m2))));
        }
        for (name, v) in [
            ("gas.molecule_mass_amu", g.molecule_mass_amu),
            ("gas.buffer_mass_amu", g.buffer_mass_amu),
        ] {
            if !(v.is_finite() && v > 0.0) {
                check(name, Err(Error::invalid(format!("must be > 0, got {v}"))));
            }
        }

        match &self.field {
            FieldSource::Csv { path, metadata } => {
                if !path.is_file() {
                    check("field.path", Err(Error::invalid(format!("no such file {}", path.display()))));
                }
                if !metadata.is_finite() {
                    check("field.metadata", Err(Error::invalid("metadata values must be finite")));
                }
            }
            FieldSource::Grid { path } => {
                if !path.is_file() {
                    check("field.path", Err(Error::invalid(format!("no such file {}", path.display()))));
                }
            }
            FieldSource::Analytic { analytic, shape } => {
                if let Ok(b) = &bounds {
                    check("field.analytic", analytic.validate(b));
                }
                check("field.shape", shape.validate());
            }
        }

        let tol = self.plane_tolerance();
        for (name, disc) in [("regions.source", &self.regions.source), ("regions.exit", &self.regions.exit)] {
            match Disc::new(disc.center, disc.normal, disc.radius) {
                Err(e) => check(name, Err(e)),
                Ok(disc) => {
                    if let Ok(b) = &bounds {
                        check(name, disc_inside(&disc, b, tol));
                    }
                }
            }
        }
        if let Some(r) = self.regions.chart_radius_m {
            if !(r.is_finite() && r > 0.0) {
                check("regions.chart_radius_m", Err(Error::invalid(format!("must be > 0, got {r}"))));
            }
        }
        if !(tol.is_finite() && tol > 0.0) {
            check("regions.plane_tolerance_m", Err(Error::invalid(format!("must be > 0, got {tol}"))));
        }
        if d.iter().all(|x| !x.field.starts_with("regions")) {
            if let Err(e) = self.regions() {
                d.push(Diagnostic::new("regions", strip_prefix(&e)));
            }
        }

        let mut check = |field: &str, r: Result<()>| {
            if let Err(e) = r {
                d.push(Diagnostic::new(field, strip_prefix(&e)));
            }
        };
        check("tracer", self.tracer.validate());
        check("sampling", self.sampling.validate());
        check("analysis", self.analysis.validate());
        if self.analysis.thermalization_max_collisions.is_some() && self.tracer.record_stride != 1 {
            check(
                "analysis.thermalization_max_collisions",
                Err(Error::invalid("per-collision temperatures need tracer.record_stride = 1")),
            );
        }
        for (i, p) in self.sweep.iter().enumerate() {
            check(&format!("sweep[{i}].sampling"), p.sampling.validate());
        }
        d
    }

    /// Errors with every diagnostic if the config is not runnable.
    pub fn validate(&self) -> Result<()> {
        let d = self.diagnostics();
        if d.is_empty() {
            Ok(())
        } else {
            Err(diagnostics_error(&d))
        }
    }

    pub fn plane_tolerance(&self) -> f64 {
        self.regions.plane_tolerance_m.unwrap_or(self.voxel_size_m)
    }

    pub fn regions(&self) -> Result<CellRegions> {
        let chart_radius = self
            .regions
            .chart_radius_m
            .unwrap_or_else(|| 0.5 * self.bounds.size().max());
        CellRegions::new(self.regions.source, self.regions.exit, chart_radius, self.plane_tolerance())
    }

    pub fn gas_params(&self) -> Result<GasParams> {
        self.gas.params()
    }

    /// Builds the voxel grid the tracer runs on.
    pub fn build_grid(&self) -> Result<VoxelGrid> {
        match &self.field {
            FieldSource::Csv { path, metadata } => {
                let samples = flowfield::io::read_samples_path(path)?;
                let mut grid = VoxelGrid::voxelize(&samples, self.voxel_size_m, &self.bounds)?;
                grid.fill_soft_edges()?;
                grid.set_metadata(metadata.clone());
                Ok(grid)
            }
            FieldSource::Grid { path } => flowfield::io::read_grid_path(path),
            FieldSource::Analytic { analytic, shape } => {
                flowfield::generate_analytic(analytic, shape, self.voxel_size_m, &self.bounds)
            }
        }
    }

    pub fn dump_trajectories(&self) -> bool {
        self.output
            .trajectories
            .unwrap_or(self.tracer.target_count <= DUMP_AUTO_LIMIT)
    }

    /// Copy with machine-local settings removed, as echoed into summaries.
    pub fn echo(&self) -> RunConfig {
        let mut c = self.clone();
        c.output.dir = None;
        c
    }
}

fn clone_err(e: &Error) -> Error {
    Error::invalid(strip_prefix(e))
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::InvalidInput(m) => m.clone(),
        other => other.to_string(),
    }
}

/// The disc rim must lie within the bounds, padded by `tol` so that discs
/// sitting on a bounding face are accepted.
fn disc_inside(disc: &Disc, b: &Aabb, tol: f64) -> Result<()> {
    let reach = Vec3::from_fn(|i, _| disc.radius * (1.0 - disc.normal[i].powi(2)).max(0.0).sqrt());
    let lo = disc.center - reach;
    let hi = disc.center + reach;
    let ok = (0..3).all(|i| lo[i] >= b.min[i] - tol && hi[i] <= b.max[i] + tol);
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "disc (centre {:?} m, normal {:?}, radius {} m) extends outside bounds (min {:?} m, max {:?} m)",
            disc.center.as_slice(),
            disc.normal.as_slice(),
            disc.radius,
            b.min.as_slice(),
            b.max.as_slice()
        )))
    }
}

fn toml_diagnostic(text: &str, e: &toml::de::Error) -> Diagnostic {
    let (line, column) = match e.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            (Some(line), Some(column))
        }
        None => (None, None),
    };
    let field = e
        .message()
        .split('`')
        .nth(1)
        .filter(|_| e.message().contains("field"))
        .unwrap_or("<document>")
        .to_string();
    Diagnostic {
        field,
        line,
        column,
        message: e.message().to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = r#"
schema_version = 1
voxel_size_m = 5e-4

[bounds]
min_m = [-4e-3, -4e-3, -4e-3]
max_m = [4e-3, 4e-3, 4e-3]

[field]
source = "analytic"
analytic = { type = "stagnant", number_density_m3 = 1e21, temperature_k = 4.5 }

[regions.source]
center_m = [0.0, 0.0, 0.0]
normal = [1.0, 0.0, 0.0]
radius_m = 5e-4

[regions.exit]
center_m = [0.0, 0.0, 4e-3]
normal = [0.0, 0.0, -1.0]
radius_m = 1e-3

[tracer]
target_count = 100
"#;

    fn parse(text: &str) -> RunConfig {
        RunConfig::from_toml_str(text, Path::new(".")).unwrap()
    }

    #[test]
    fn minimal_config_is_clean() {
        let c = parse(MINIMAL);
        assert_eq!(c.diagnostics(), vec![]);
        assert_eq!(c.tracer.target_count, 100);
        assert_eq!(c.tracer.collision_threshold, 10);
        assert_eq!(c.sampling, SamplingMethod::Direct);
        assert!(c.dump_trajectories());
    }

    #[test]
    fn negative_sigma_names_the_field() {
        let c = parse(&format!("{MINIMAL}\n[gas]\nsigma_m2 = -1e-17\n"));
        let d = c.diagnostics();
        assert_eq!(d.len(), 1, "{d:?}");
        assert_eq!(d[0].field, "gas.sigma_m2");
    }

    #[test]
    fn source_outside_bounds_prints_both_geometries() {
        let c = parse(&MINIMAL.replace("center_m = [0.0, 0.0, 0.0]", "center_m = [9e-3, 0.0, 0.0]"));
        let d = c.diagnostics();
        assert_eq!(d.len(), 1, "{d:?}");
        assert_eq!(d[0].field, "regions.source");
        assert!(d[0].message.contains("0.009") && d[0].message.contains("0.004"));
    }

    #[test]
    fn unknown_field_reports_line() {
        let text = MINIMAL.replace("[tracer]\n", "[tracer]\nbogus_s = 1\n");
        let d = RunConfig::from_toml_str(&text, Path::new(".")).unwrap_err();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].field, "bogus_s");
        assert_eq!(d[0].line, Some(text.lines().position(|l| l.starts_with("bogus")).unwrap() + 1));
    }

    #[test]
    fn round_trips_through_json() {
        let c = parse(&format!(
            "{MINIMAL}\n[[sweep]]\nseed = 3\nsampling = {{ method = \"weighted\", candidates = 10 }}\n"
        ));
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&json).unwrap(), c);
        assert_eq!(c.sweep[0].sampling, SamplingMethod::Weighted { candidates: 10 });
    }
}
