// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Execution of independent grid cells.
//!
//! Sweeps hand every cell to an executor and get results back in cell-index
//! order, whatever order the cells actually finished in. The core only ships
//! the sequential executor; threaded ones live with the std companion crate.

use alloc::vec::Vec;

pub trait CellExecutor: Sync {
    /// `(0..n).map(f)`, in index order.
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl CellExecutor for Sequential {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}
