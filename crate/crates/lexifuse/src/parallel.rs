//! Minibatch evaluation on a rayon pool.

use lexifuse_core::model::{WordGradient, WordObservation};
use lexifuse_core::train::{word_gradient, BatchEvaluator};
use lexifuse_core::{ModelState, Result, TrainConfig};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};

pub const THREADS_ENV: &str = "LEXIFUSE_THREADS";

/// Thread cap from `LEXIFUSE_THREADS`; `None` lets rayon decide.
pub fn thread_cap() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Evaluates each word on the pool. Word noise streams are keyed by word
/// index and results are collected in batch order, so the reduction is the
/// same for any thread count.
pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    pub fn new(threads: Option<usize>) -> CliResult<Self> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            b = b.num_threads(n);
        }
        let pool = b
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
        Ok(Parallel { pool })
    }

    pub fn from_env() -> CliResult<Self> {
        Self::new(thread_cap()?)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl BatchEvaluator for Parallel {
    fn evaluate(
        &self,
        state: &ModelState,
        batch: &[(usize, &WordObservation)],
        epoch: u64,
        config: &TrainConfig,
    ) -> Vec<Result<WordGradient>> {
        self.pool.install(|| {
            batch
                .par_iter()
                .map(|&(i, obs)| word_gradient(state, obs, i, epoch, config))
                .collect()
        })
    }
}
