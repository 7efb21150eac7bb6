// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Thread-pool executor for sweep cells. Results come back in index order,
//! so reports do not depend on the thread count.

use aplab_core::exec::CellExecutor;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{LabError, LabResult};

pub struct RayonExecutor {
    pool: Option<ThreadPool>,
}

impl RayonExecutor {
    /// `threads = 1` runs inline; `0` uses every core.
    pub fn new(threads: usize) -> LabResult<Self> {
        if threads == 1 {
            return Ok(Self { pool: None });
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
        Ok(Self { pool: Some(pool) })
    }

    pub fn threads(&self) -> usize {
        self.pool.as_ref().map_or(1, ThreadPool::current_num_threads)
    }
}

impl CellExecutor for RayonExecutor {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match &self.pool {
            None => (0..n).map(f).collect(),
            // `collect` on an indexed parallel iterator keeps index order.
            Some(pool) => pool.install(|| (0..n).into_par_iter().map(f).collect()),
        }
    }
}
