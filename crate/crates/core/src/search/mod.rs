//! Exhaustive search over exclusive allocations.

mod enumerate;
mod exists;
pub mod fixtures;
mod mnw;

use std::sync::Arc;

pub use enumerate::{binomial, enumerate_allocations, plan_count, EnumerationPlan};
pub use exists::{
    check_chores_characterization, exists_fair, scaled_threshold, CharacterizationReport,
    ExistenceCertificate, Notion,
};
pub use mnw::max_nash_welfare;

use crate::error::{Error, Result};

/// Default cap on the number of allocations a single enumeration may visit.
pub const DEFAULT_CAP: u64 = 50_000_000;

/// Environment variable overriding [`DEFAULT_CAP`].
pub const CAP_ENV: &str = "FAIRDUAL_ENUM_CAP";

#[derive(Clone)]
pub struct SearchOptions {
    pub cap: u64,
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            cap: DEFAULT_CAP,
            pool: None,
        }
    }
}

impl std::fmt::Debug for SearchOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SearchOptions")
            .field("cap", &self.cap)
            .field("jobs", &self.pool.as_ref().map(|p| p.current_num_threads()))
            .finish()
    }
}

impl SearchOptions {
    /// Default options with the cap taken from `FAIRDUAL_ENUM_CAP` when set.
    pub fn from_env() -> Result<Self> {
        let mut options = SearchOptions::default();
        if let Ok(text) = std::env::var(CAP_ENV) {
            options.cap = text.trim().replace('_', "").parse().map_err(|_| {
                Error::field(CAP_ENV, format!("`{text}` is not a non-negative integer"))
            })?;
        }
        Ok(options)
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    /// Runs parallel work on a dedicated pool of `jobs` threads.
    pub fn with_jobs(mut self, jobs: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))?;
        self.pool = Some(Arc::new(pool));
        Ok(self)
    }

    pub(crate) fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.pool {
            Some(pool) => pool.install(f),
            None => f(),
        }
    }
}
