//! Lines of `Z_n^2`: translates of cyclic subgroups of order `n`.

use fixedbitset::FixedBitSet;

use super::{all_points, factorize, gcd, units, Factorization, Point};
use crate::error::{Result, ZcapError};

/// A line `{anchor + w * direction : w in Z_n}` with its sorted point set.
///
/// `direction` is the lexicographically least generator of the underlying
/// subgroup and `anchor` the least point of the line, so two `Line`s are equal
/// exactly when their point sets are.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Line {
    anchor: Point,
    direction: Point,
    points: Vec<Point>,
}

impl Line {
    pub fn anchor(&self) -> Point {
        self.anchor
    }

    pub fn direction(&self) -> Point {
        self.direction
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn contains(&self, p: Point) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    fn through(p: Point, direction: Point, n: u32) -> Line {
        let mut points: Vec<Point> = (0..n).map(|w| p.add(direction.scale(w, n), n)).collect();
        points.sort_unstable();
        Line { anchor: points[0], direction, points }
    }
}

/// The least generator of the cyclic subgroup generated by `t`.
fn canonical_generator(t: Point, n: u32, unit_list: &[u32]) -> Point {
    unit_list.iter().map(|&k| t.scale(k, n)).min().expect("units are non-empty")
}

/// Canonical directions, one per cyclic subgroup of order `n`, in increasing order.
pub(crate) fn directions(n: u32) -> Vec<Point> {
    let unit_list = units(n);
    all_points(n)
        .filter(|t| gcd(gcd(t.u as u64, t.v as u64), n as u64) == 1)
        .filter(|&t| canonical_generator(t, n, &unit_list) == t)
        .collect()
}

fn check_modulus(n: u32) -> Result<()> {
    factorize(n as u64).map(|_| ())
}

/// All `psi(n^2)` lines, grouped by direction and then ordered by anchor.
pub fn enumerate_lines(n: u32) -> Result<Vec<Line>> {
    check_modulus(n)?;
    let mut lines = Vec::new();
    for t in directions(n) {
        let mut seen = vec![false; (n * n) as usize];
        for p in all_points(n) {
            if seen[p.index(n)] {
                continue;
            }
            let line = Line::through(p, t, n);
            for q in &line.points {
                seen[q.index(n)] = true;
            }
            lines.push(line);
        }
    }
    Ok(lines)
}

/// The `psi(n)` lines through `p`, one per direction.
pub fn lines_through(p: Point, n: u32) -> Result<Vec<Line>> {
    check_modulus(n)?;
    p.check(n)?;
    Ok(directions(n).into_iter().map(|t| Line::through(p, t, n)).collect())
}

/// Lines containing both `p` and `q`; never empty for distinct points.
pub fn lines_through_pair(p: Point, q: Point, n: u32) -> Result<Vec<Line>> {
    if p == q {
        return Err(ZcapError::IdenticalPoints);
    }
    q.check(n)?;
    Ok(lines_through(p, n)?.into_iter().filter(|l| l.contains(q)).collect())
}

/// Incidence structure of `Z_n^2`, shared by the cap checks and the solvers.
///
/// Points are addressed by row-major index, lines by their position in
/// [`enumerate_lines`] order.
#[derive(Debug, Clone)]
pub struct Plane {
    n: u32,
    factorization: Factorization,
    lines: Vec<Line>,
    line_sets: Vec<FixedBitSet>,
    /// Lines grouped into parallel classes (same direction).
    parallel_classes: Vec<Vec<usize>>,
    through: Vec<Vec<u32>>,
}

impl Plane {
    pub fn new(n: u32) -> Result<Self> {
        let factorization = factorize(n as u64)?;
        let lines = enumerate_lines(n)?;
        let np = (n * n) as usize;
        let mut through = vec![Vec::new(); np];
        let mut line_sets = Vec::with_capacity(lines.len());
        let mut parallel_classes: Vec<Vec<usize>> = Vec::new();
        let mut last_direction = None;
        for (i, line) in lines.iter().enumerate() {
            let mut set = FixedBitSet::with_capacity(np);
            for p in &line.points {
                set.insert(p.index(n));
                through[p.index(n)].push(i as u32);
            }
            line_sets.push(set);
            if last_direction != Some(line.direction) {
                parallel_classes.push(Vec::new());
                last_direction = Some(line.direction);
            }
            parallel_classes.last_mut().expect("pushed above").push(i);
        }
        Ok(Plane { n, factorization, lines, line_sets, parallel_classes, through })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn num_points(&self) -> usize {
        (self.n * self.n) as usize
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn line_set(&self, line: usize) -> &FixedBitSet {
        &self.line_sets[line]
    }

    pub fn parallel_classes(&self) -> &[Vec<usize>] {
        &self.parallel_classes
    }

    /// Indices of the lines through the point with row-major index `point`.
    pub fn lines_through_index(&self, point: usize) -> &[u32] {
        &self.through[point]
    }

    /// Indices of the lines through two distinct point indices.
    pub fn lines_through_both(&self, a: usize, b: usize) -> impl Iterator<Item = usize> + '_ {
        let lb = &self.through[b];
        self.through[a].iter().filter(move |l| lb.binary_search(l).is_ok()).map(|&l| l as usize)
    }

    /// Points of `set` lying on a line with at least two points of `set`,
    /// together with `set` itself.
    pub fn closure(&self, set: &FixedBitSet) -> FixedBitSet {
        let mut out = set.clone();
        for line in &self.line_sets {
            if line.intersection_count(set) >= 2 {
                out.union_with(line);
            }
        }
        out
    }

    pub fn index_set(&self, points: &[Point]) -> Result<FixedBitSet> {
        let mut set = FixedBitSet::with_capacity(self.num_points());
        for p in points {
            set.insert(p.check(self.n)?.index(self.n));
        }
        Ok(set)
    }
}
