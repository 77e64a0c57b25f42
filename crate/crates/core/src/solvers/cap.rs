//! Caps, completeness, and random greedy completion.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZcapError};
use crate::geometry::{all_points, factorize, is_collinear_fix_zero, Factorization, Plane, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapVariant {
    Plain,
    /// At most one point per row (equal `v`) and per column (equal `u`).
    Permutation,
}

/// A validated cap, points sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cap {
    n: u32,
    points: Vec<Point>,
    variant: CapVariant,
}

impl Cap {
    /// Rejects out-of-range or repeated points, collinear triples, and for
    /// the permutation variant shared rows or columns.
    pub fn new(n: u32, points: impl IntoIterator<Item = Point>, variant: CapVariant) -> Result<Cap> {
        let f = factorize(n as u64)?;
        let mut points: Vec<Point> = points.into_iter().map(|p| p.check(n)).collect::<Result<_>>()?;
        points.sort_unstable();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(ZcapError::NotACap);
        }
        if !triples_free(&points, &f) {
            return Err(ZcapError::NotACap);
        }
        if variant == CapVariant::Permutation && !rows_and_columns_distinct(&points) {
            return Err(ZcapError::NotPermutation);
        }
        Ok(Cap { n, points, variant })
    }

    pub fn empty(n: u32, variant: CapVariant) -> Result<Cap> {
        Cap::new(n, [], variant)
    }

    pub(crate) fn from_indices(n: u32, indices: &[usize], variant: CapVariant) -> Cap {
        let mut points: Vec<Point> = indices.iter().map(|&i| Point::from_index(i, n)).collect();
        points.sort_unstable();
        Cap { n, points, variant }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn variant(&self) -> CapVariant {
        self.variant
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.points.binary_search(&p).is_ok()
    }
}

fn collinear3(a: Point, b: Point, c: Point, n: u32, f: &Factorization) -> bool {
    let (d, e) = (b.sub(a, n), c.sub(a, n));
    is_collinear_fix_zero(d.u as u64, d.v as u64, e.u as u64, e.v as u64, f)
}

fn triples_free(points: &[Point], f: &Factorization) -> bool {
    let n = f.n();
    for (i, &a) in points.iter().enumerate() {
        for (j, &b) in points.iter().enumerate().skip(i + 1) {
            for &c in &points[j + 1..] {
                if collinear3(a, b, c, n, f) {
                    return false;
                }
            }
        }
    }
    true
}

fn rows_and_columns_distinct(points: &[Point]) -> bool {
    let mut us: Vec<u32> = points.iter().map(|p| p.u).collect();
    let mut vs: Vec<u32> = points.iter().map(|p| p.v).collect();
    us.sort_unstable();
    vs.sort_unstable();
    us.windows(2).all(|w| w[0] != w[1]) && vs.windows(2).all(|w| w[0] != w[1])
}

/// Does the point set avoid collinear triples? Repeated points are ignored.
pub fn is_cap(points: &[Point], n: u32) -> Result<bool> {
    let f = factorize(n as u64)?;
    let mut set: Vec<Point> = points.iter().map(|p| p.check(n)).collect::<Result<_>>()?;
    set.sort_unstable();
    set.dedup();
    Ok(triples_free(&set, &f))
}

/// [`is_cap`] by counting points per line: at most two on every line.
pub fn is_cap_in(plane: &Plane, points: &[Point]) -> Result<bool> {
    let set = plane.index_set(points)?;
    Ok((0..plane.lines().len()).all(|k| plane.line_set(k).intersection_count(&set) <= 2))
}

/// Points outside the cap whose addition leaves a cap of the same variant.
pub fn extendable_points(cap: &Cap) -> Vec<Point> {
    let n = cap.n;
    let f = factorize(n as u64).expect("validated modulus");
    all_points(n)
        .filter(|&p| !cap.contains(p))
        .filter(|&p| cap.variant == CapVariant::Plain || cap.points.iter().all(|q| q.u != p.u && q.v != p.v))
        .filter(|&p| {
            cap.points
                .iter()
                .enumerate()
                .all(|(i, &a)| cap.points[i + 1..].iter().all(|&b| !collinear3(a, b, p, n, &f)))
        })
        .collect()
}

/// No point can be added without breaking the cap (or permutation) property.
pub fn is_complete(cap: &Cap) -> bool {
    extendable_points(cap).is_empty()
}

/// Adds uniformly random extendable points until the cap is complete.
pub fn greedy_complete(cap: &Cap, seed: u64) -> Cap {
    let n = cap.n;
    let f = factorize(n as u64).expect("validated modulus");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = cap.points.clone();
    let mut candidates = extendable_points(cap);
    while let Some(&p) = candidates.choose(&mut rng) {
        candidates.retain(|&c| {
            c != p
                && (cap.variant == CapVariant::Plain || (c.u != p.u && c.v != p.v))
                && points.iter().all(|&a| !collinear3(a, p, c, n, &f))
        });
        points.push(p);
    }
    points.sort_unstable();
    Cap { n, points, variant: cap.variant }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(list: &[(u32, u32)]) -> Vec<Point> {
        list.iter().map(|&(u, v)| Point::new(u, v)).collect()
    }

    #[test]
    fn cap_examples() {
        assert!(is_cap(&pts(&[(0, 0), (0, 1), (1, 0), (1, 1)]), 2).unwrap());
        assert!(!is_cap(&pts(&[(0, 0), (1, 1), (2, 2)]), 3).unwrap());
        assert!(matches!(Cap::new(3, pts(&[(0, 0), (1, 1), (2, 2)]), CapVariant::Plain), Err(ZcapError::NotACap)));
        assert!(matches!(Cap::new(5, pts(&[(0, 0), (0, 1)]), CapVariant::Permutation), Err(ZcapError::NotPermutation)));
    }

    #[test]
    fn line_counting_agrees_with_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=12u32 {
            let plane = Plane::new(n).unwrap();
            let all: Vec<Point> = all_points(n).collect();
            for size in 3..=8 {
                for _ in 0..40 {
                    let set: Vec<Point> = all.choose_multiple(&mut rng, size.min(all.len())).copied().collect();
                    assert_eq!(is_cap(&set, n).unwrap(), is_cap_in(&plane, &set).unwrap(), "n={n} {set:?}");
                }
            }
        }
    }

    #[test]
    fn extendable_examples() {
        let full = Cap::new(2, all_points(2), CapVariant::Plain).unwrap();
        assert!(extendable_points(&full).is_empty());
        assert!(is_complete(&full));
        let single = Cap::new(5, [Point::ORIGIN], CapVariant::Plain).unwrap();
        assert_eq!(extendable_points(&single).len(), 24);
        assert!(!is_complete(&Cap::empty(7, CapVariant::Plain).unwrap()));

        let pair = Cap::new(8, pts(&[(0, 0), (2, 4)]), CapVariant::Plain).unwrap();
        let plane = Plane::new(8).unwrap();
        let ext = extendable_points(&pair);
        for p in all_points(8).filter(|p| !pair.contains(*p)) {
            let blocked = plane.lines().iter().any(|l| l.contains(p) && pair.points().iter().all(|&q| l.contains(q)));
            assert_eq!(ext.contains(&p), !blocked, "{p}");
        }
    }

    #[test]
    fn greedy_examples() {
        let full = greedy_complete(&Cap::empty(2, CapVariant::Plain).unwrap(), 1);
        assert_eq!(full.len(), 4);
        assert_eq!(greedy_complete(&full, 9), full);
        let empty5 = Cap::empty(5, CapVariant::Plain).unwrap();
        let smallest = (0..1000).map(|s| greedy_complete(&empty5, s).len()).min().unwrap();
        assert_eq!(smallest, 5);
        for s in 0..20 {
            let c = greedy_complete(&Cap::empty(6, CapVariant::Permutation).unwrap(), s);
            assert!(Cap::new(6, c.points().to_vec(), CapVariant::Permutation).is_ok());
            assert!(is_complete(&c));
        }
    }
}
