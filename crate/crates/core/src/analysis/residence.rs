use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Binning of the residence-time histogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResidenceBins {
    pub bins: usize,
    /// Upper edge; defaults to the largest residence time.
    #[serde(rename = "max_s", skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    /// Minimum peak prominence as a fraction of the highest smoothed bin.
    pub prominence_fraction: f64,
}

impl Default for ResidenceBins {
    fn default() -> Self {
        Self {
            bins: 100,
            max: None,
            prominence_fraction: 0.05,
        }
    }
}

impl ResidenceBins {
    pub fn validate(&self) -> Result<()> {
        if self.bins == 0 {
            return Err(Error::invalid("residence histogram needs at least one bin"));
        }
        if let Some(m) = self.max {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::invalid(format!("residence max_s must be > 0, got {m}")));
            }
        }
        if !(0.0..=1.0).contains(&self.prominence_fraction) {
            return Err(Error::invalid("prominence fraction must be in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub bin: usize,
    /// Bin centre, s.
    #[serde(rename = "time_s")]
    pub time: f64,
    /// Smoothed height.
    pub height: f64,
    pub prominence: f64,
}

/// Residence-time distribution of exiting molecules, normalized to unit sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidenceHistogram {
    #[serde(rename = "edges_s")]
    pub edges: Vec<f64>,
    pub fractions: Vec<f64>,
    pub count: u64,
    /// Residence times beyond the last edge, left out of the normalization.
    pub overflow: u64,
    pub peaks: Vec<Peak>,
}

/// Histogram of `times` on `[0, max]`. Returns `None` when `times` is empty.
pub fn residence_histogram(times: &[f64], bins: &ResidenceBins) -> Option<ResidenceHistogram> {
    if times.is_empty() {
        return None;
    }
    let n = bins.bins.max(1);
    let max = bins
        .max
        .unwrap_or_else(|| times.iter().copied().fold(0.0, f64::max))
        .max(f64::MIN_POSITIVE);
    let width = max / n as f64;
    let mut counts = vec![0u64; n];
    let mut overflow = 0;
    for &t in times {
        if t > max {
            overflow += 1;
        } else {
            counts[((t / width) as usize).min(n - 1)] += 1;
        }
    }
    let kept = (times.len() as u64 - overflow).max(1) as f64;
    let fractions: Vec<f64> = counts.iter().map(|&c| c as f64 / kept).collect();
    let edges = (0..=n).map(|i| i as f64 * width).collect();
    let peaks = detect_peaks(&fractions, bins.prominence_fraction)
        .into_iter()
        .map(|mut p| {
            p.time = (p.bin as f64 + 0.5) * width;
            p
        })
        .collect();
    Some(ResidenceHistogram {
        edges,
        fractions,
        count: times.len() as u64,
        overflow,
        peaks,
    })
}

/// Local maxima of the 3-bin moving average of `h` whose topographic
/// prominence is at least `prominence_fraction` of the highest smoothed
/// value. Plateaus report their leftmost bin. `time` is left at 0.
pub fn detect_peaks(h: &[f64], prominence_fraction: f64) -> Vec<Peak> {
    let n = h.len();
    if n == 0 {
        return Vec::new();
    }
    let s: Vec<f64> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(n - 1);
            h[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();
    let global = s.iter().copied().fold(0.0, f64::max);
    if global <= 0.0 {
        return Vec::new();
    }
    let mut peaks = Vec::new();
    let mut i = 0;
    while i < n {
        // extent of the plateau starting at i
        let mut j = i;
        while j + 1 < n && s[j + 1] == s[i] {
            j += 1;
        }
        let left_lower = i == 0 || s[i - 1] < s[i];
        let right_lower = j == n - 1 || s[j + 1] < s[i];
        if left_lower && right_lower && s[i] > 0.0 {
            let prominence = s[i] - base_level(&s, i, j);
            if prominence >= prominence_fraction * global {
                peaks.push(Peak {
                    bin: i,
                    time: 0.0,
                    height: s[i],
                    prominence,
                });
            }
        }
        i = j + 1;
    }
    peaks
}

/// Higher of the two minima reached walking out from a plateau `i..=j`
/// until terrain rises above it or the edge is reached. A side with no
/// bins at all (plateau touching the edge) is ignored.
fn base_level(s: &[f64], i: usize, j: usize) -> f64 {
    let top = s[i];
    let side_min = |it: &mut dyn Iterator<Item = &f64>| {
        it.take_while(|&&v| v <= top).fold(None, |m: Option<f64>, &v| Some(m.map_or(v, |m| m.min(v))))
    };
    let left = side_min(&mut s[..i].iter().rev());
    let right = side_min(&mut s[j + 1..].iter());
    match (left, right) {
        (Some(l), Some(r)) => l.max(r),
        (Some(b), None) | (None, Some(b)) => b,
        (None, None) => 0.0,
    }
}
