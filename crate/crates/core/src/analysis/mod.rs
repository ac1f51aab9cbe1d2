//! Reductions of trajectory ensembles: thermalization curves, extraction
//! efficiency, wall contamination and residence times.

mod efficiency;
mod residence;
mod summary;
mod thermalization;
mod wall;

use serde::{Deserialize, Serialize};

pub use efficiency::{extraction_efficiency, TerminalCounts};
pub use residence::{detect_peaks, residence_histogram, Peak, ResidenceBins, ResidenceHistogram};
pub use summary::{RunSummary, Summarizer, SUMMARY_SCHEMA_VERSION};
pub use thermalization::{
    analytic_thermalization, thermalization_curve, ThermalPoint, ThermalizationAccumulator, ThermalizationCurve,
    MIN_MOLECULES,
};
pub use wall::{median_coated_area, PixelSize, WallChart};

use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisOptions {
    pub residence: ResidenceBins,
    pub pixel: PixelSize,
    /// Reduce per-collision temperatures for `K <= this`. Needs
    /// `record_stride = 1` to give every K.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thermalization_max_collisions: Option<u64>,
}

impl AnalysisOptions {
    pub fn validate(&self) -> Result<()> {
        self.residence.validate()?;
        self.pixel.validate()
    }
}
