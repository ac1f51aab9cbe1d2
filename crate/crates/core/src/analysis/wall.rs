use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Wall-chart pixel: azimuth width in degrees by height in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PixelSize {
    pub azimuth_deg: f64,
    #[serde(rename = "y_m")]
    pub y: f64,
}

impl Default for PixelSize {
    fn default() -> Self {
        Self {
            azimuth_deg: 2.0,
            y: 5e-4,
        }
    }
}

impl PixelSize {
    pub fn validate(&self) -> Result<()> {
        if !(self.azimuth_deg > 0.0 && self.azimuth_deg <= 360.0 && self.y.is_finite() && self.y > 0.0) {
            return Err(Error::invalid(format!(
                "pixel size must be positive (azimuth <= 360°), got {}° x {} m",
                self.azimuth_deg, self.y
            )));
        }
        Ok(())
    }

    /// Physical pixel area `R Δaz Δy` on a wall of radius `R`.
    pub fn area(&self, radius: f64) -> f64 {
        radius * self.azimuth_deg.to_radians() * self.y
    }

    /// Integer pixel coordinates of a chart point. Azimuth bins start at -180°.
    pub fn pixel(&self, azimuth_deg: f64, y: f64) -> (i64, i64) {
        (
            ((azimuth_deg + 180.0) / self.azimuth_deg).floor() as i64,
            (y / self.y).floor() as i64,
        )
    }
}

/// Equivalent median coated area `A_1/2`, m²: the area of the fewest
/// most-hit pixels that together hold at least half of the hits.
///
/// Equal-count pixels are ranked by (azimuth, y) pixel index. Returns `None`
/// for an empty hit list.
pub fn median_coated_area(hits: &[(f64, f64)], pixel: &PixelSize, radius: f64) -> Option<f64> {
    if hits.is_empty() {
        return None;
    }
    let mut counts: HashMap<(i64, i64), u64> = HashMap::new();
    for &(az, y) in hits {
        *counts.entry(pixel.pixel(az, y)).or_default() += 1;
    }
    let mut ranked: Vec<((i64, i64), u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let total = hits.len() as u64;
    let mut cum = 0;
    let mut used = 0;
    for (_, c) in ranked {
        cum += c;
        used += 1;
        // cum >= N/2 without rounding
        if 2 * cum >= total {
            break;
        }
    }
    Some(used as f64 * pixel.area(radius))
}

/// Dense 2D histogram of wall hits. Rows run over y, columns over azimuth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallChart {
    pub pixel: PixelSize,
    #[serde(rename = "y_min_m")]
    pub y_min: f64,
    pub rows: usize,
    pub cols: usize,
    pub counts: Vec<u64>,
    /// Hits falling outside the chart's y range.
    pub outside: u64,
}

impl WallChart {
    /// Chart covering all azimuths and `y_min..y_max`.
    pub fn new(pixel: PixelSize, y_min: f64, y_max: f64) -> Self {
        let cols = (360.0 / pixel.azimuth_deg - 1e-9).ceil().max(1.0) as usize;
        let rows = ((y_max - y_min) / pixel.y - 1e-9).ceil().max(1.0) as usize;
        Self {
            pixel,
            y_min,
            rows,
            cols,
            counts: vec![0; rows * cols],
            outside: 0,
        }
    }

    pub fn push(&mut self, azimuth_deg: f64, y: f64) {
        let col = (((azimuth_deg + 180.0) / self.pixel.azimuth_deg).floor() as i64).clamp(0, self.cols as i64 - 1);
        let row = ((y - self.y_min) / self.pixel.y).floor();
        if row >= 0.0 && (row as usize) < self.rows {
            self.counts[row as usize * self.cols + col as usize] += 1;
        } else {
            self.outside += 1;
        }
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.cols + col]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.outside
    }

    /// Dense CSV: one comment line with the pixel geometry, then one line
    /// per y row, lowest y first.
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# pixel_azimuth_deg={},pixel_y_m={},azimuth_min_deg=-180,y_min_m={},rows={},cols={},outside={}\n",
            self.pixel.azimuth_deg, self.pixel.y, self.y_min, self.rows, self.cols, self.outside
        );
        for row in self.counts.chunks(self.cols) {
            let line: Vec<String> = row.iter().map(u64::to_string).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }
}
