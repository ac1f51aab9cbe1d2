use serde::{Deserialize, Serialize};

use super::{
    residence_histogram, AnalysisOptions, ResidenceHistogram, TerminalCounts, ThermalizationAccumulator,
    ThermalizationCurve, WallChart,
};
use crate::collision::GasParams;
use crate::flowfield::Aabb;
use crate::geometry::{wall_chart, CellRegions};
use crate::tracer::{EnsembleStats, TerminalClass, TrajectoryRecord};

pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

/// Reduced observables of one ensemble run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub code_version: String,
    pub counts: TerminalCounts,
    /// η, absent when no molecule reached the exit or a wall.
    pub efficiency: Option<f64>,
    pub efficiency_std_error: Option<f64>,
    /// A_1/2, absent without wall hits.
    pub median_coated_area_m2: Option<f64>,
    pub collision_threshold: u64,
    pub ensemble: EnsembleStats,
    pub residence: Option<ResidenceHistogram>,
    pub wall_chart: WallChart,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thermalization: Option<ThermalizationCurve>,
    /// Configuration the run was made with.
    pub config: serde_json::Value,
}

/// Streaming reducer producing a [`RunSummary`]. Records must arrive in a
/// fixed order (the ensemble's attempt order) for reproducible output.
#[derive(Debug, Clone)]
pub struct Summarizer {
    options: AnalysisOptions,
    params: GasParams,
    chart_radius: f64,
    counts: TerminalCounts,
    exit_times: Vec<f64>,
    wall_hits: Vec<(f64, f64)>,
    chart: WallChart,
    thermal: Option<ThermalizationAccumulator>,
}

impl Summarizer {
    pub fn new(options: AnalysisOptions, params: GasParams, regions: &CellRegions, bounds: &Aabb) -> Self {
        Self {
            chart: WallChart::new(options.pixel, bounds.min.y, bounds.max.y),
            thermal: options.thermalization_max_collisions.map(ThermalizationAccumulator::new),
            options,
            params,
            chart_radius: regions.chart_radius,
            counts: TerminalCounts::default(),
            exit_times: Vec::new(),
            wall_hits: Vec::new(),
        }
    }

    pub fn push(&mut self, record: &TrajectoryRecord) {
        self.counts.push(record.terminal_class);
        match record.terminal_class {
            TerminalClass::Exit => self.exit_times.push(record.residence_time()),
            TerminalClass::Wall => {
                let (az, y) = wall_chart(&record.terminal.position);
                self.wall_hits.push((az, y));
                self.chart.push(az, y);
            }
            _ => {}
        }
        if let Some(acc) = &mut self.thermal {
            acc.push(record);
        }
    }

    pub fn wall_hits(&self) -> &[(f64, f64)] {
        &self.wall_hits
    }

    pub fn exit_times(&self) -> &[f64] {
        &self.exit_times
    }

    pub fn finish(self, ensemble: EnsembleStats, collision_threshold: u64, config: serde_json::Value) -> RunSummary {
        RunSummary {
            schema_version: SUMMARY_SCHEMA_VERSION,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            efficiency: self.counts.efficiency(),
            efficiency_std_error: self.counts.efficiency_std_error(),
            median_coated_area_m2: super::median_coated_area(&self.wall_hits, &self.options.pixel, self.chart_radius),
            counts: self.counts,
            collision_threshold,
            ensemble,
            residence: residence_histogram(&self.exit_times, &self.options.residence),
            wall_chart: self.chart,
            thermalization: self.thermal.map(|a| a.finish(&self.params)),
            config,
        }
    }
}
