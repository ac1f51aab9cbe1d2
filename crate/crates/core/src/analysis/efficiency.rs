use serde::{Deserialize, Serialize};

use crate::tracer::{TerminalClass, TrajectoryRecord};

/// Terminal counts of an accepted ensemble.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerminalCounts {
    /// N_T
    pub total: u64,
    /// N_E
    pub exits: u64,
    /// N_L
    pub wall_losses: u64,
    pub source_disc: u64,
    pub collision_cap: u64,
}

impl TerminalCounts {
    pub fn push(&mut self, class: TerminalClass) {
        self.total += 1;
        match class {
            TerminalClass::Exit => self.exits += 1,
            TerminalClass::Wall => self.wall_losses += 1,
            TerminalClass::SourceDisc => self.source_disc += 1,
            TerminalClass::CollisionCapReached => self.collision_cap += 1,
        }
    }

    /// `η = N_E / (N_E + N_L)`; `None` when no molecule reached exit or wall.
    pub fn efficiency(&self) -> Option<f64> {
        let n = self.exits + self.wall_losses;
        (n > 0).then(|| self.exits as f64 / n as f64)
    }

    /// Binomial standard error of [`efficiency`](Self::efficiency).
    pub fn efficiency_std_error(&self) -> Option<f64> {
        let n = (self.exits + self.wall_losses) as f64;
        self.efficiency().map(|eta| (eta * (1.0 - eta) / n).sqrt())
    }
}

/// Counts and η over `records`. Source-disc returns and capped
/// trajectories are counted but excluded from η.
pub fn extraction_efficiency<'a>(
    records: impl IntoIterator<Item = &'a TrajectoryRecord>,
) -> (Option<f64>, TerminalCounts) {
    let mut counts = TerminalCounts::default();
    for r in records {
        counts.push(r.terminal_class);
    }
    (counts.efficiency(), counts)
}
