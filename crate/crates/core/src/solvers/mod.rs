//! Exact search for `m2`, `sigma` and `n2`, plus cap verification.
//!
//! The maximum-cap searches are depth-first branch and bound over points in
//! row-major order. Every cap with at least three points has a triple of least
//! orbit class `i`; mapping that triple onto the class representative gives
//! an equivalent cap containing the representative and no triple of class
//! below `i`. Task `i` of the search enumerates exactly those caps, so the
//! tasks together cover every cap up to the symmetry group while each task
//! only ever adds points.

mod cap;
mod complete;
mod engine;
mod maxcap;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZcapError};
use crate::geometry::{gcd, Point};

pub use cap::{extendable_points, greedy_complete, is_cap, is_cap_in, is_complete, Cap, CapVariant};
pub use complete::min_complete_cap;
pub use maxcap::{max_cap, sigma_cap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    M2,
    N2,
    Sigma,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::M2 => "m2",
            Problem::N2 => "n2",
            Problem::Sigma => "sigma",
        })
    }
}

impl FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "m2" => Ok(Problem::M2),
            "n2" => Ok(Problem::N2),
            "sigma" => Ok(Problem::Sigma),
            other => Err(format!("unknown problem '{other}' (expected m2, n2 or sigma)")),
        }
    }
}

/// An exact value or the interval known to contain it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Exact(u32),
    Interval(u32, u32),
}

impl Value {
    fn new(lo: u32, hi: u32) -> Value {
        if lo == hi {
            Value::Exact(lo)
        } else {
            Value::Interval(lo, hi)
        }
    }

    pub fn lo(&self) -> u32 {
        match *self {
            Value::Exact(v) | Value::Interval(v, _) => v,
        }
    }

    pub fn hi(&self) -> u32 {
        match *self {
            Value::Exact(v) | Value::Interval(_, v) => v,
        }
    }

    pub fn exact(&self) -> Option<u32> {
        match *self {
            Value::Exact(v) => Some(v),
            Value::Interval(..) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(v) => write!(f, "{v}"),
            Value::Interval(lo, hi) => write!(f, "{lo}-{hi}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    /// Stopped by the node limit.
    Bounded,
    Timeout,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Bounded => "bounded",
            Status::Timeout => "timeout",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub problem: Problem,
    pub n: u32,
    pub value: Value,
    pub status: Status,
    /// A cap of size `value.lo()` for `m2` and `sigma`, or a complete cap of
    /// size `value.hi()` for `n2`.
    pub certificate: Option<Cap>,
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOptions {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    pub use_symmetry: bool,
    pub threads: usize,
    /// Points required in the cap. Any forced point switches off symmetry breaking.
    pub forced_in: Vec<Point>,
    /// Points excluded from the cap.
    pub forced_out: Vec<Point>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            time_limit: None,
            node_limit: None,
            use_symmetry: true,
            threads: 1,
            forced_in: Vec::new(),
            forced_out: Vec::new(),
        }
    }
}

impl SearchOptions {
    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn without_symmetry(mut self) -> Self {
        self.use_symmetry = false;
        self
    }

    fn validate(&self, n: u32) -> Result<()> {
        if self.threads == 0 {
            return Err(ZcapError::ResourceLimit("thread count must be at least 1".into()));
        }
        for p in self.forced_in.iter().chain(&self.forced_out) {
            p.check(n)?;
        }
        if let Some(p) = self.forced_in.iter().find(|p| self.forced_out.contains(p)) {
            return Err(ZcapError::ConflictingFix(p.to_string()));
        }
        Ok(())
    }

    fn breaks_symmetry(&self) -> bool {
        self.use_symmetry && self.forced_in.is_empty() && self.forced_out.is_empty()
    }
}

/// `min(n * m2(m), m2(n) * m)`, the product bound for coprime `n, m > 1`.
pub fn coprime_upper_bound_m2(n: u32, m: u32, m2n: u32, m2m: u32) -> Result<u32> {
    for k in [n, m] {
        if k < 2 {
            return Err(ZcapError::ModulusTooSmall { n: k, min: 2 });
        }
    }
    if gcd(n as u64, m as u64) != 1 {
        return Err(ZcapError::NotCoprime { a: n, b: m });
    }
    Ok((n * m2m).min(m2n * m))
}

/// Problem dispatch.
pub fn solve(problem: Problem, n: u32, opts: &SearchOptions) -> Result<SolveResult> {
    match problem {
        Problem::M2 => max_cap(n, opts),
        Problem::Sigma => sigma_cap(n, opts),
        Problem::N2 => min_complete_cap(n, opts),
    }
}
