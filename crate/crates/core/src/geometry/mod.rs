//! Arithmetic over `Z_n`, points and lines of `Z_n x Z_n`, and collinearity.
//!
//! Residues are represented by `0..n` throughout.

mod arith;
mod collinear;
mod lines;
mod table;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZcapError};

pub use arith::{factorize, gcd, psi, units, Factorization, PrimePower, MAX_MODULUS};
pub use collinear::{det_criterion, is_collinear, is_collinear_fix_zero, is_collinear_prime_power, neighbor_rel};
pub use lines::{enumerate_lines, lines_through, lines_through_pair, Line, Plane};
pub use table::{build_collinearity_table, CollinearityTable, DEFAULT_TABLE_LIMIT};

pub(crate) use arith::mod_inverse;

/// A point of `Z_n x Z_n`; the modulus is carried by context.
///
/// Points order lexicographically by `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub u: u32,
    pub v: u32,
}

impl Point {
    pub const ORIGIN: Point = Point { u: 0, v: 0 };

    pub const fn new(u: u32, v: u32) -> Self {
        Point { u, v }
    }

    /// Row-major index `u * n + v`.
    pub fn index(self, n: u32) -> usize {
        (self.u * n + self.v) as usize
    }

    pub fn from_index(index: usize, n: u32) -> Self {
        Point::new(index as u32 / n, index as u32 % n)
    }

    pub fn in_range(self, n: u32) -> bool {
        self.u < n && self.v < n
    }

    pub fn check(self, n: u32) -> Result<Self> {
        if self.in_range(n) {
            Ok(self)
        } else {
            Err(ZcapError::OutOfRange { point: self, n })
        }
    }

    pub fn add(self, other: Point, n: u32) -> Point {
        Point::new((self.u + other.u) % n, (self.v + other.v) % n)
    }

    pub fn sub(self, other: Point, n: u32) -> Point {
        Point::new((self.u + n - other.u) % n, (self.v + n - other.v) % n)
    }

    pub fn neg(self, n: u32) -> Point {
        Point::ORIGIN.sub(self, n)
    }

    pub fn scale(self, k: u32, n: u32) -> Point {
        let k = k as u64;
        let n64 = n as u64;
        Point::new((k * self.u as u64 % n64) as u32, (k * self.v as u64 % n64) as u32)
    }

    /// Reduction of the coordinates modulo a divisor `m` of the modulus.
    pub fn reduce(self, m: u32) -> Point {
        Point::new(self.u % m, self.v % m)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.v)
    }
}

/// All `n^2` points in row-major order.
pub fn all_points(n: u32) -> impl Iterator<Item = Point> {
    (0..n).flat_map(move |u| (0..n).map(move |v| Point::new(u, v)))
}
