//! Lookup table for collinearity with the origin.

use fixedbitset::FixedBitSet;

use super::{factorize, is_collinear_fix_zero, Point};
use crate::error::{Result, ZcapError};

/// Default bound on the modulus of a [`CollinearityTable`] (`n^4` bits).
pub const DEFAULT_TABLE_LIMIT: u32 = 64;

/// Records, for every pair `(p1, p2)`, whether `(0,0), p1, p2` are collinear.
#[derive(Debug, Clone)]
pub struct CollinearityTable {
    n: u32,
    bits: FixedBitSet,
}

impl CollinearityTable {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn get(&self, p1: Point, p2: Point) -> bool {
        self.get_index(p1.index(self.n), p2.index(self.n))
    }

    /// Lookup by row-major point indices.
    pub fn get_index(&self, i1: usize, i2: usize) -> bool {
        let np = (self.n * self.n) as usize;
        self.bits.contains(i1 * np + i2)
    }

    /// Collinearity of an arbitrary triple via translation to the origin.
    pub fn triple(&self, a: Point, b: Point, c: Point) -> bool {
        let n = self.n;
        self.get(b.sub(a, n), c.sub(a, n))
    }
}

/// Builds the table for `n <= limit` (use [`DEFAULT_TABLE_LIMIT`] normally).
pub fn build_collinearity_table(n: u32, limit: u32) -> Result<CollinearityTable> {
    if n > limit {
        return Err(ZcapError::TableTooLarge { n, limit });
    }
    let f = factorize(n as u64)?;
    let np = (n * n) as usize;
    let mut bits = FixedBitSet::with_capacity(np * np);
    for i in 0..np {
        let a = Point::from_index(i, n);
        for j in i..np {
            let b = Point::from_index(j, n);
            if is_collinear_fix_zero(a.u as u64, a.v as u64, b.u as u64, b.v as u64, &f) {
                bits.insert(i * np + j);
                bits.insert(j * np + i);
            }
        }
    }
    Ok(CollinearityTable { n, bits })
}
