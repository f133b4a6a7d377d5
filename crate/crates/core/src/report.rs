//! Pass/fail reports with witnesses, and the deterministic parallel sweep
//! every check is built on.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;

/// Sample sizes shared by every sweep: canonical points of complexity at
/// most `depth`, and lattice elements with generator exponents at most
/// `bound`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Sampling {
    pub depth: usize,
    pub bound: u32,
}

impl Sampling {
    pub fn new(depth: usize, bound: u32) -> Self {
        Sampling { depth, bound }
    }
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { depth: 4, bound: 3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub check: String,
    pub status: Status,
    pub witnesses: Vec<String>,
    pub samples: usize,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn pass(check: impl Into<String>, samples: usize) -> Self {
        Report {
            check: check.into(),
            status: Status::Pass,
            witnesses: vec![],
            samples,
            elapsed_ms: 0,
        }
    }

    pub fn fail(check: impl Into<String>, samples: usize, witness: impl Into<String>) -> Self {
        Report {
            check: check.into(),
            status: Status::Fail,
            witnesses: vec![witness.into()],
            samples,
            elapsed_ms: 0,
        }
    }

    pub fn from_witness(check: impl Into<String>, samples: usize, witness: Option<String>) -> Self {
        match witness {
            None => Report::pass(check, samples),
            Some(w) => Report::fail(check, samples, w),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.elapsed_ms = start.elapsed().as_millis() as u64;
        self
    }

    /// Merges sub-reports: fails if any fails, keeping every witness in order.
    pub fn combine(check: impl Into<String>, parts: &[Report]) -> Self {
        let witnesses: Vec<String> = parts
            .iter()
            .filter(|r| !r.passed())
            .flat_map(|r| r.witnesses.iter().map(move |w| format!("{}: {w}", r.check)))
            .collect();
        Report {
            check: check.into(),
            status: if parts.iter().all(Report::passed) { Status::Pass } else { Status::Fail },
            witnesses,
            samples: parts.iter().map(|r| r.samples).sum(),
            elapsed_ms: parts.iter().map(|r| r.elapsed_ms).sum(),
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        };
        write!(f, "{status} {} ({} samples)", self.check, self.samples)?;
        for w in &self.witnesses {
            write!(f, "\n    witness: {w}")?;
        }
        Ok(())
    }
}

/// Runs `f` over `items` in parallel and returns the witness of the earliest
/// failing item in input order, so results do not depend on scheduling.
pub fn first_witness<T, F>(items: &[T], f: F) -> Result<Option<String>>
where
    T: Sync,
    F: Fn(&T) -> Result<Option<String>> + Sync + Send,
{
    items.par_iter().find_map_first(|t| f(t).transpose()).transpose()
}

/// Sweep followed by a report over `items.len()` samples.
pub fn sweep<T, F>(check: &str, items: &[T], f: F) -> Result<Report>
where
    T: Sync,
    F: Fn(&T) -> Result<Option<String>> + Sync + Send,
{
    let start = Instant::now();
    let witness = first_witness(items, f)?;
    Ok(Report::from_witness(check, items.len(), witness).timed(start))
}
