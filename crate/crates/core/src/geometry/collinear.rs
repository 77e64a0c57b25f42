//! Collinearity tests over `Z_n`.
//!
//! The test works on the prime factorization of `n`: translate one point to the
//! origin, split by the Chinese remainder theorem into prime-power components,
//! and in each component strip common factors of `p` before comparing the
//! cross product. Each component costs at most `mu` reduction steps.

use super::arith::p_valuation;
use super::{Factorization, Point};
use crate::error::{Result, ZcapError};

/// Is `{(0,0), (u2,v2), (u3,v3)}` collinear in `Z_{p^r}^2`?
///
/// While `r >= 2` and `p` divides all four inputs, divide them by `p` and lower
/// `r`; then compare `u2*v3` and `u3*v2` modulo `p^r`.
pub fn is_collinear_prime_power(u2: u64, v2: u64, u3: u64, v3: u64, p: u64, r: u32) -> bool {
    let mut q = p.pow(r);
    let (mut u2, mut v2, mut u3, mut v3) = (u2 % q, v2 % q, u3 % q, v3 % q);
    let mut r = r;
    while r >= 2 && u2 % p == 0 && v2 % p == 0 && u3 % p == 0 && v3 % p == 0 {
        u2 /= p;
        v2 /= p;
        u3 /= p;
        v3 /= p;
        q /= p;
        r -= 1;
    }
    (u2 * v3) % q == (u3 * v2) % q
}

/// Is `{(0,0), (u2,v2), (u3,v3)}` collinear in `Z_n^2`, `n = f.n()`?
pub fn is_collinear_fix_zero(u2: u64, v2: u64, u3: u64, v3: u64, f: &Factorization) -> bool {
    f.factors().iter().all(|pp| {
        let k = pp.value() as u64;
        is_collinear_prime_power(u2 % k, v2 % k, u3 % k, v3 % k, pp.p as u64, pp.mu)
    })
}

/// Do all `points` lie on one common line of `Z_n^2`?
///
/// Repeated points are ignored, so lists with at most two distinct points are
/// collinear. For three points this is exactly the pairwise fix-zero test. For
/// more points the comparison point of each prime-power component is the
/// difference of largest additive order, so that every other difference must
/// lie in the cyclic group it generates.
pub fn is_collinear(points: &[Point], f: &Factorization) -> Result<bool> {
    let n = f.n();
    let first = *points.first().ok_or(ZcapError::EmptyPointList)?;
    for p in points {
        p.check(n)?;
    }
    let mut diffs: Vec<Point> = points.iter().map(|p| p.sub(first, n)).filter(|d| *d != Point::ORIGIN).collect();
    diffs.sort_unstable();
    diffs.dedup();
    if diffs.len() <= 1 {
        return Ok(true);
    }
    if diffs.len() == 2 {
        let (a, b) = (diffs[0], diffs[1]);
        return Ok(is_collinear_fix_zero(a.u as u64, a.v as u64, b.u as u64, b.v as u64, f));
    }
    for pp in f.factors() {
        let q = pp.value();
        let p = pp.p as u64;
        let local: Vec<Point> = diffs.iter().map(|d| d.reduce(q)).collect();
        let content = |d: &Point| p_valuation(d.u as u64, p, pp.mu).min(p_valuation(d.v as u64, p, pp.mu));
        let pivot = *local.iter().min_by_key(|d| content(d)).expect("non-empty");
        let ok = local
            .iter()
            .all(|d| is_collinear_prime_power(pivot.u as u64, pivot.v as u64, d.u as u64, d.v as u64, p, pp.mu));
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Vanishing of the 3x3 determinant with rows `(u_i, v_i, 1)` modulo `n`.
///
/// Necessary for collinearity; sufficient only for prime `n`.
pub fn det_criterion(p1: Point, p2: Point, p3: Point, n: u32) -> bool {
    let a = p2.sub(p1, n);
    let b = p3.sub(p1, n);
    let n64 = n as u64;
    (a.u as u64 * b.v as u64) % n64 == (b.u as u64 * a.v as u64) % n64
}

/// The first neighbour relation for `n = p^r`, `r >= 2`: `p` divides both
/// coordinate differences.
pub fn neighbor_rel(a: Point, b: Point, f: &Factorization) -> Result<bool> {
    let n = f.n();
    let pp = f.as_prime_power().ok_or(ZcapError::NotPrimePower(n))?;
    if pp.mu < 2 {
        return Err(ZcapError::ExponentTooSmall(n));
    }
    a.check(n)?;
    b.check(n)?;
    let d = a.sub(b, n);
    Ok(d.u.is_multiple_of(pp.p) && d.v.is_multiple_of(pp.p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::factorize;

    fn pts(list: &[(u32, u32)]) -> Vec<Point> {
        list.iter().map(|&(u, v)| Point::new(u, v)).collect()
    }

    #[test]
    fn worked_example_625() {
        let f = factorize(625).unwrap();
        assert!(is_collinear(&pts(&[(1, 2), (76, 57), (251, 102)]), &f).unwrap());
        assert!(is_collinear_fix_zero(75, 55, 250, 100, &f));
        assert!(is_collinear_prime_power(15, 11, 50, 20, 5, 3));
    }

    #[test]
    fn z8_counterexample() {
        let f = factorize(8).unwrap();
        let triple = pts(&[(0, 0), (2, 4), (4, 4)]);
        assert!(!is_collinear(&triple, &f).unwrap());
        assert!(det_criterion(triple[0], triple[1], triple[2], 8));
        assert!(!is_collinear_fix_zero(2, 4, 4, 4, &f));
        assert!(!is_collinear_prime_power(2, 4, 4, 4, 2, 3));
        // one reduction step leaves (1,2),(2,2) over Z_4
        assert!(!is_collinear_prime_power(1, 2, 2, 2, 2, 2));
    }

    #[test]
    fn small_cases() {
        let f12 = factorize(12).unwrap();
        assert!(is_collinear(&pts(&[(3, 7), (4, 0), (5, 5)]), &f12).unwrap());
        assert!(is_collinear_fix_zero(1, 5, 2, 10, &f12));
        let f7 = factorize(7).unwrap();
        assert!(is_collinear(&pts(&[(0, 0), (1, 1)]), &f7).unwrap());
        assert!(is_collinear_prime_power(1, 1, 2, 2, 3, 1));
        assert!(!det_criterion(Point::new(0, 0), Point::new(1, 1), Point::new(2, 3), 5));
        assert!(det_criterion(Point::new(0, 0), Point::new(1, 1), Point::new(2, 2), 9));
    }

    #[test]
    fn errors_and_duplicates() {
        let f = factorize(8).unwrap();
        assert!(matches!(is_collinear(&[], &f), Err(ZcapError::EmptyPointList)));
        assert!(matches!(is_collinear(&pts(&[(0, 0), (8, 1)]), &f), Err(ZcapError::OutOfRange { .. })));
        // duplicates collapse to two distinct points
        assert!(is_collinear(&pts(&[(2, 4), (0, 0), (2, 4), (0, 0)]), &f).unwrap());
    }

    #[test]
    fn four_points_need_a_common_line() {
        // every triple containing (0,0),(2,0) is collinear, but no line holds all four
        let f = factorize(4).unwrap();
        let quad = pts(&[(0, 0), (2, 0), (1, 0), (1, 2)]);
        assert!(is_collinear(&quad[..3], &f).unwrap());
        assert!(is_collinear(&[quad[0], quad[1], quad[3]], &f).unwrap());
        assert!(!is_collinear(&quad, &f).unwrap());
    }

    #[test]
    fn neighbours() {
        let f25 = factorize(25).unwrap();
        assert!(neighbor_rel(Point::new(0, 0), Point::new(5, 10), &f25).unwrap());
        assert!(!neighbor_rel(Point::new(0, 0), Point::new(1, 0), &f25).unwrap());
        let f9 = factorize(9).unwrap();
        assert!(neighbor_rel(Point::new(1, 2), Point::new(4, 8), &f9).unwrap());
        assert!(matches!(
            neighbor_rel(Point::ORIGIN, Point::ORIGIN, &factorize(12).unwrap()),
            Err(ZcapError::NotPrimePower(12))
        ));
        assert!(matches!(
            neighbor_rel(Point::ORIGIN, Point::ORIGIN, &factorize(5).unwrap()),
            Err(ZcapError::ExponentTooSmall(5))
        ));
    }
}
