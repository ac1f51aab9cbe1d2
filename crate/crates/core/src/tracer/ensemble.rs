use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Tracer, TrajectoryOutcome, TrajectoryRecord};
use crate::geometry::Region;
use crate::{Error, Result};

/// Random stream used for one trajectory attempt.
pub type TraceRng = ChaCha8Rng;

/// Stream for attempt `index` under `master_seed`: the ChaCha key comes from
/// the seed, the 64-bit stream id is the attempt index.
pub fn trajectory_rng(master_seed: u64, index: u64) -> TraceRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Bookkeeping of an ensemble run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub attempts: u64,
    pub accepted: u64,
    pub discarded: u64,
    pub discarded_source_disc: u64,
    pub discarded_wall: u64,
    pub discarded_exit: u64,
    /// Trajectories stopped by a non-finite state.
    pub aborted: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_abort: Option<String>,
}

impl EnsembleStats {
    pub fn discard_fraction(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.discarded as f64 / self.attempts as f64
        }
    }

    fn count(&mut self, outcome: &Result<TrajectoryOutcome>) {
        self.attempts += 1;
        match outcome {
            Ok(TrajectoryOutcome::Accepted(_)) => self.accepted += 1,
            Ok(TrajectoryOutcome::Discarded { region, .. }) => {
                self.discarded += 1;
                match region {
                    Region::SourceDisc => self.discarded_source_disc += 1,
                    Region::Wall => self.discarded_wall += 1,
                    Region::Exit => self.discarded_exit += 1,
                }
            }
            Err(e) => {
                self.aborted += 1;
                if self.first_abort.is_none() {
                    self.first_abort = Some(e.to_string());
                }
            }
        }
    }
}

const MAX_BATCH: u64 = 4096;

impl Tracer<'_> {
    /// Runs attempts until `target_count` trajectories are accepted and
    /// returns them ordered by attempt index.
    pub fn run_ensemble(&self, workers: usize) -> Result<(Vec<TrajectoryRecord>, EnsembleStats)> {
        let mut records = Vec::with_capacity(self.config.target_count);
        let stats = self.run_ensemble_with(workers, |r| {
            records.push(r);
            Ok(())
        })?;
        Ok((records, stats))
    }

    /// Streaming form of [`run_ensemble`](Self::run_ensemble): `visit` sees
    /// every accepted record in attempt order.
    ///
    /// Attempt `i` always draws from [`trajectory_rng`]`(master_seed, i)` and
    /// records are accepted strictly in index order, so the output does not
    /// depend on `workers` or on how attempts are batched.
    pub fn run_ensemble_with(
        &self,
        workers: usize,
        mut visit: impl FnMut(TrajectoryRecord) -> Result<()>,
    ) -> Result<EnsembleStats> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
        let target = self.config.target_count as u64;
        let budget = self.config.attempt_budget();
        let seed = self.config.master_seed;
        let mut stats = EnsembleStats::default();
        let mut next = 0u64;

        while stats.accepted < target {
            if next >= budget {
                return Err(Error::AttemptBudgetExhausted {
                    accepted: stats.accepted as usize,
                    target: target as usize,
                    attempts: next,
                });
            }
            let remaining = target - stats.accepted;
            let batch = (remaining + remaining / 4 + 16).min(MAX_BATCH).min(budget - next);
            let outcomes: Vec<Result<TrajectoryOutcome>> = pool.install(|| {
                (next..next + batch)
                    .into_par_iter()
                    .map(|i| self.run_trajectory(i, &mut trajectory_rng(seed, i)))
                    .collect()
            });
            next += batch;
            for outcome in outcomes {
                if stats.accepted == target {
                    break;
                }
                stats.count(&outcome);
                if let Ok(TrajectoryOutcome::Accepted(record)) = outcome {
                    visit(record)?;
                }
            }
        }
        Ok(stats)
    }
}
