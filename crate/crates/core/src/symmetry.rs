//! The affine group of `Z_n^2` (translations and invertible 2x2 matrices), its
//! action on points and point sets, orbit canonical forms, and the
//! without-loss-of-generality cuts derived from it.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Result, ZcapError};
use crate::geometry::{all_points, gcd, units, CollinearityTable, Plane, Point};
use crate::ilp::CutDescriptor;

/// Row-major 2x2 matrix `[[a, b], [c, d]]` over `Z_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Matrix2 {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2 { a: 1, b: 0, c: 0, d: 1 };

    pub const fn new(a: u32, b: u32, c: u32, d: u32) -> Self {
        Matrix2 { a, b, c, d }
    }

    fn reduce(self, n: u32) -> Self {
        Matrix2::new(self.a % n, self.b % n, self.c % n, self.d % n)
    }

    pub fn det(&self, n: u32) -> u32 {
        let n64 = n as u64;
        let ad = self.a as u64 * self.d as u64 % n64;
        let bc = self.b as u64 * self.c as u64 % n64;
        ((ad + n64 - bc) % n64) as u32
    }

    pub fn is_invertible(&self, n: u32) -> bool {
        gcd(self.det(n) as u64, n as u64) == 1
    }

    pub fn apply(&self, p: Point, n: u32) -> Point {
        let n64 = n as u64;
        let (u, v) = (p.u as u64, p.v as u64);
        Point::new(
            ((self.a as u64 * u + self.b as u64 * v) % n64) as u32,
            ((self.c as u64 * u + self.d as u64 * v) % n64) as u32,
        )
    }

    /// `self * other`.
    pub fn mul(&self, other: &Matrix2, n: u32) -> Matrix2 {
        let n64 = n as u64;
        let m = |x: u32, y: u32, z: u32, w: u32| ((x as u64 * y as u64 + z as u64 * w as u64) % n64) as u32;
        Matrix2::new(
            m(self.a, other.a, self.b, other.c),
            m(self.a, other.b, self.b, other.d),
            m(self.c, other.a, self.d, other.c),
            m(self.c, other.b, self.d, other.d),
        )
    }

    pub fn inverse(&self, n: u32) -> Option<Matrix2> {
        let inv = crate::geometry::mod_inverse(self.det(n) as u64, n as u64)? as u32;
        let adj = Matrix2::new(self.d, (n - self.b) % n, (n - self.c) % n, self.a);
        Some(Matrix2::new(inv, 0, 0, inv).mul(&adj, n))
    }
}

/// `x -> matrix * x + shift` with an invertible matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AffineMap {
    n: u32,
    matrix: Matrix2,
    shift: Point,
}

impl AffineMap {
    pub fn new(matrix: Matrix2, shift: Point, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(ZcapError::ZeroModulus);
        }
        let matrix = matrix.reduce(n);
        if !matrix.is_invertible(n) {
            return Err(ZcapError::SingularMatrix { det: matrix.det(n), n });
        }
        Ok(AffineMap { n, matrix, shift: shift.check(n)? })
    }

    pub fn translation(shift: Point, n: u32) -> Result<Self> {
        AffineMap::new(Matrix2::IDENTITY, shift, n)
    }

    pub fn linear(matrix: Matrix2, n: u32) -> Result<Self> {
        AffineMap::new(matrix, Point::ORIGIN, n)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn matrix(&self) -> Matrix2 {
        self.matrix
    }

    pub fn shift(&self) -> Point {
        self.shift
    }

    pub fn apply(&self, p: Point) -> Point {
        self.matrix.apply(p, self.n).add(self.shift, self.n)
    }

    pub fn apply_all(&self, points: &[Point]) -> Vec<Point> {
        points.iter().map(|&p| self.apply(p)).collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        let n = self.n;
        AffineMap { n, matrix: self.matrix.mul(&other.matrix, n), shift: self.apply(other.shift) }
    }

    pub fn inverse(&self) -> AffineMap {
        let n = self.n;
        let inv = self.matrix.inverse(n).expect("invertible by construction");
        AffineMap { n, matrix: inv, shift: inv.apply(self.shift, n).neg(n) }
    }
}

/// Does `map` send every line of the plane onto a line?
pub fn is_automorphism(map: &AffineMap, plane: &Plane) -> bool {
    if map.n() != plane.n() {
        return false;
    }
    let lines: HashSet<&[Point]> = plane.lines().iter().map(|l| l.points()).collect();
    plane.lines().iter().all(|l| {
        let mut image = map.apply_all(l.points());
        image.sort_unstable();
        lines.contains(image.as_slice())
    })
}

/// Which group of matrices (always together with all translations) acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryGroup {
    /// All invertible matrices: preserves caps and completeness.
    Affine,
    /// Diagonal and anti-diagonal invertible matrices: additionally preserves
    /// the partition into rows and into columns.
    AxisPreserving,
}

impl SymmetryGroup {
    /// A generating set of the matrix part.
    pub fn generators(self, n: u32) -> Vec<Matrix2> {
        let unit_gens = unit_generators(n);
        match self {
            SymmetryGroup::Affine => {
                let mut g = vec![Matrix2::new(1, 1 % n, 0, 1), Matrix2::new(1, 0, 1 % n, 1)];
                g.extend(unit_gens.iter().map(|&u| Matrix2::new(u, 0, 0, 1)));
                g.into_iter().map(|m| m.reduce(n)).collect()
            }
            SymmetryGroup::AxisPreserving => {
                let mut g = vec![Matrix2::new(0, 1, 1, 0)];
                g.extend(unit_gens.iter().map(|&u| Matrix2::new(u, 0, 0, 1)));
                g.extend(unit_gens.iter().map(|&u| Matrix2::new(1, 0, 0, u)));
                g.into_iter().map(|m| m.reduce(n)).collect()
            }
        }
    }

    /// Every matrix of the group.
    pub fn matrices(self, n: u32) -> Vec<Matrix2> {
        match self {
            SymmetryGroup::Affine => general_linear(n),
            SymmetryGroup::AxisPreserving => {
                let us = units(n);
                let mut out = Vec::with_capacity(2 * us.len() * us.len());
                for &x in &us {
                    for &y in &us {
                        out.push(Matrix2::new(x, 0, 0, y).reduce(n));
                        out.push(Matrix2::new(0, x, y, 0).reduce(n));
                    }
                }
                out.sort_unstable_by_key(|m| (m.a, m.b, m.c, m.d));
                out.dedup();
                out
            }
        }
    }
}

/// All invertible 2x2 matrices over `Z_n`.
pub fn general_linear(n: u32) -> Vec<Matrix2> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let m = Matrix2::new(a, b, c, d);
                    if m.is_invertible(n) {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// A small generating set of the unit group of `Z_n`.
fn unit_generators(n: u32) -> Vec<u32> {
    let mut gens = Vec::new();
    let mut subgroup: BTreeSet<u32> = BTreeSet::from([1 % n]);
    for u in units(n) {
        if subgroup.contains(&u) {
            continue;
        }
        gens.push(u);
        let mut frontier: Vec<u32> = subgroup.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            for &g in &gens {
                let y = (x as u64 * g as u64 % n as u64) as u32;
                if subgroup.insert(y) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

/// The lexicographically least sorted image of a point set under the group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitKey {
    points: Vec<Point>,
}

impl OrbitKey {
    pub fn points(&self) -> &[Point] {
        &self.points
    }
}

/// Upper bound on point images examined by one canonical-form computation.
const ORBIT_WORK_LIMIT: u64 = 4_000_000_000;

/// Canonical form of `tuple` under the affine group.
pub fn orbit_canonical(tuple: &[Point], n: u32) -> Result<OrbitKey> {
    orbit_canonical_in(SymmetryGroup::Affine, tuple, n)
}

/// Canonical form of `tuple` under translations combined with `group`.
///
/// The least image contains `(0,0)`, so only images sending some point of the
/// set to the origin are candidates. Under the full affine group, when some
/// difference `d` of the set is unimodular the least image also contains
/// `(0,1)`, and the candidate matrices are exactly those with `M d = (0,1)`:
/// `phi(n) * n` of them instead of all of `GL(2, Z_n)`.
pub fn orbit_canonical_in(group: SymmetryGroup, tuple: &[Point], n: u32) -> Result<OrbitKey> {
    if tuple.is_empty() {
        return Err(ZcapError::EmptyPointList);
    }
    let mut set: Vec<Point> = tuple.iter().map(|p| p.check(n)).collect::<Result<_>>()?;
    set.sort_unstable();
    set.dedup();
    let k = set.len();
    let unimodular = |d: Point| gcd(gcd(d.u as u64, d.v as u64), n as u64) == 1;

    let mut best: Option<Vec<Point>> = None;
    let mut consider = |image: &mut Vec<Point>| {
        image.sort_unstable();
        if best.as_ref().is_none_or(|b| image.as_slice() < b.as_slice()) {
            best = Some(image.clone());
        }
    };

    let has_frame =
        group == SymmetryGroup::Affine && set.iter().any(|&x| set.iter().any(|&y| x != y && unimodular(y.sub(x, n))));
    let mut image = Vec::with_capacity(k);
    if has_frame {
        let unit_list = units(n);
        let n64 = n as u64;
        for &x0 in &set {
            let diffs: Vec<Point> = set.iter().map(|p| p.sub(x0, n)).collect();
            for &d in diffs.iter().filter(|&&d| unimodular(d)) {
                let f = unimodular_complement(d, n);
                // coordinates of each difference in the basis (d, f)
                let coords: Vec<(u64, u64)> = diffs
                    .iter()
                    .map(|x| {
                        let (xu, xv) = (x.u as u64, x.v as u64);
                        let alpha = (f.v as u64 * xu + (n64 - f.u as u64) * xv) % n64;
                        let beta = ((n64 - d.v as u64) * xu + d.u as u64 * xv) % n64;
                        (alpha, beta)
                    })
                    .collect();
                for &y1 in &unit_list {
                    for y2 in 0..n as u64 {
                        image.clear();
                        image.extend(coords.iter().map(|&(alpha, beta)| {
                            Point::new((beta * y1 as u64 % n64) as u32, ((alpha + beta * y2) % n64) as u32)
                        }));
                        consider(&mut image);
                    }
                }
            }
        }
    } else {
        let matrices = group.matrices(n);
        let work = matrices.len() as u64 * (k * k) as u64;
        if work > ORBIT_WORK_LIMIT {
            return Err(ZcapError::ResourceLimit(format!(
                "orbit of a {k}-point set over Z_{n} needs {work} point images"
            )));
        }
        for &x0 in &set {
            let diffs: Vec<Point> = set.iter().map(|p| p.sub(x0, n)).collect();
            for m in &matrices {
                image.clear();
                image.extend(diffs.iter().map(|&d| m.apply(d, n)));
                consider(&mut image);
            }
        }
    }
    Ok(OrbitKey { points: best.expect("set is non-empty") })
}

/// Some `f` with `det(d, f) = d.u f.v - d.v f.u = 1` for unimodular `d`.
fn unimodular_complement(d: Point, n: u32) -> Point {
    all_points(n)
        .find(|&f| {
            let n64 = n as u64;
            (d.u as u64 * f.v as u64 + (n64 - d.v as u64) * f.u as u64) % n64 == 1 % n64
        })
        .expect("unimodular vectors extend to a basis")
}

/// Orbit classes of non-collinear point triples, tabulated by their two
/// differences from a base point.
///
/// `class(p, q)` is the class of `{(0,0), p, q}`; class `0` marks collinear or
/// degenerate triples. Classes are numbered `1..=count` in increasing order
/// of their canonical representative.
#[derive(Debug, Clone)]
pub struct TripleClasses {
    n: u32,
    class: Vec<u32>,
    representatives: Vec<[Point; 3]>,
}

impl TripleClasses {
    /// Orbits under translations combined with `group`.
    pub fn new(group: SymmetryGroup, table: &CollinearityTable) -> Self {
        let n = table.n();
        let np = (n * n) as usize;
        let total = np * np;
        let mut parent: Vec<u32> = (0..total as u32).collect();
        let live = |i: usize, j: usize| i != 0 && j != 0 && i != j && !table.get_index(i, j);
        let gens = group.generators(n);
        let idx = |p: Point| p.index(n);
        for i in 0..np {
            for j in 0..np {
                if !live(i, j) {
                    continue;
                }
                let (p, q) = (Point::from_index(i, n), Point::from_index(j, n));
                let here = i * np + j;
                union(&mut parent, here, j * np + i);
                union(&mut parent, here, idx(p.neg(n)) * np + idx(q.sub(p, n)));
                for m in &gens {
                    union(&mut parent, here, idx(m.apply(p, n)) * np + idx(m.apply(q, n)));
                }
            }
        }
        Self::from_components(n, parent, live)
    }

    /// A single class holding every non-collinear triple: no symmetry breaking.
    pub fn uniform(table: &CollinearityTable) -> Self {
        let n = table.n();
        let np = (n * n) as usize;
        let mut class = vec![0u32; np * np];
        let mut rep = None;
        for i in 0..np {
            for j in 0..np {
                if i != 0 && j != 0 && i != j && !table.get_index(i, j) {
                    class[i * np + j] = 1;
                    if rep.is_none() {
                        rep = Some(sorted_triple(Point::from_index(i, n), Point::from_index(j, n)));
                    }
                }
            }
        }
        TripleClasses { n, class, representatives: rep.into_iter().collect() }
    }

    fn from_components(n: u32, mut parent: Vec<u32>, live: impl Fn(usize, usize) -> bool) -> Self {
        let np = (n * n) as usize;
        let total = np * np;
        let mut best: Vec<Option<[Point; 3]>> = vec![None; total];
        for i in 0..np {
            for j in 0..np {
                if !live(i, j) {
                    continue;
                }
                let root = find(&mut parent, i * np + j);
                let t = sorted_triple(Point::from_index(i, n), Point::from_index(j, n));
                if best[root].is_none_or(|b| t < b) {
                    best[root] = Some(t);
                }
            }
        }
        let mut roots: Vec<(usize, [Point; 3])> =
            best.iter().enumerate().filter_map(|(r, b)| b.map(|t| (r, t))).collect();
        roots.sort_unstable_by_key(|&(_, t)| t);
        let mut id_of_root = vec![0u32; total];
        for (k, &(r, _)) in roots.iter().enumerate() {
            id_of_root[r] = k as u32 + 1;
        }
        let mut class = vec![0u32; total];
        for i in 0..np {
            for j in 0..np {
                if live(i, j) {
                    class[i * np + j] = id_of_root[find(&mut parent, i * np + j)];
                }
            }
        }
        TripleClasses { n, class, representatives: roots.into_iter().map(|(_, t)| t).collect() }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    /// Class of `{(0,0), p, q}` by row-major indices of `p` and `q`.
    pub fn class_index(&self, p: usize, q: usize) -> u32 {
        let np = (self.n * self.n) as usize;
        self.class[p * np + q]
    }

    pub fn class_of(&self, a: Point, b: Point, c: Point) -> u32 {
        let n = self.n;
        self.class_index(b.sub(a, n).index(n), c.sub(a, n).index(n))
    }

    /// Canonical representative of class `id` (`1..=count`).
    pub fn representative(&self, id: u32) -> [Point; 3] {
        self.representatives[id as usize - 1]
    }

    pub(crate) fn raw(&self) -> &[u32] {
        &self.class
    }
}

fn sorted_triple(p: Point, q: Point) -> [Point; 3] {
    let mut t = [Point::ORIGIN, p, q];
    t.sort_unstable();
    t
}

fn find(parent: &mut [u32], mut x: usize) -> usize {
    while parent[x] as usize != x {
        let up = parent[parent[x] as usize];
        parent[x] = up;
        x = up as usize;
    }
    x
}

fn union(parent: &mut [u32], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo as u32;
    }
}

/// Cuts valid once the points `in_cap` are fixed inside the cap and every
/// case with one of `excluded` inside the cap (together with `in_cap`) has
/// been settled separately.
///
/// * `FixZero(z)` when some group element maps `in_cap ∪ {z}` onto
///   `in_cap ∪ {b}` for an excluded `b`.
/// * `PairExclusion(z1, z2)` when some group element maps
///   `in_cap ∪ {z1, z2}` onto `in_cap ∪ {b, z3}`.
///
/// Any cap violating a cut has an image containing `in_cap` and some `b`.
pub fn wlog_cuts(in_cap: &[Point], excluded: &[Point], n: u32) -> Result<Vec<CutDescriptor>> {
    wlog_cuts_in(SymmetryGroup::Affine, in_cap, excluded, n)
}

pub fn wlog_cuts_in(group: SymmetryGroup, in_cap: &[Point], excluded: &[Point], n: u32) -> Result<Vec<CutDescriptor>> {
    let a: BTreeSet<Point> = in_cap.iter().map(|p| p.check(n)).collect::<Result<_>>()?;
    let b: BTreeSet<Point> = excluded.iter().map(|p| p.check(n)).collect::<Result<_>>()?;
    if !a.is_disjoint(&b) {
        return Err(ZcapError::ConflictingFix(format!("{:?}", a.intersection(&b).next())));
    }
    if b.is_empty() {
        return Ok(Vec::new());
    }
    let matrices = group.matrices(n);
    let work = matrices.len() as u64 * (n as u64 * n as u64) * (a.len() as u64 + 1) * b.len() as u64;
    if work > ORBIT_WORK_LIMIT {
        return Err(ZcapError::ResourceLimit(format!("wlog cuts over Z_{n} need {work} point images")));
    }
    let a_list: Vec<Point> = a.iter().copied().collect();
    let mut fix_zero = BTreeSet::new();
    let mut pairs = BTreeSet::new();
    let mut outside = Vec::with_capacity(2);
    for &bh in &b {
        let mut source = a_list.clone();
        source.push(bh);
        for m in &matrices {
            let linear: Vec<Point> = source.iter().map(|&p| m.apply(p, n)).collect();
            for s in all_points(n) {
                outside.clear();
                for img in linear.iter().map(|&p| p.add(s, n)) {
                    if !a.contains(&img) {
                        outside.push(img);
                        if outside.len() > 2 {
                            break;
                        }
                    }
                }
                match outside.as_slice() {
                    [z] => {
                        fix_zero.insert(*z);
                    }
                    [z1, z2] => {
                        pairs.insert((*z1.min(z2), *z1.max(z2)));
                    }
                    _ => {}
                }
            }
        }
    }
    let mut cuts: Vec<CutDescriptor> = fix_zero.iter().map(|&z| CutDescriptor::FixZero(z)).collect();
    cuts.extend(
        pairs
            .into_iter()
            .filter(|(z1, z2)| !fix_zero.contains(z1) && !fix_zero.contains(z2))
            .map(|(z1, z2)| CutDescriptor::PairExclusion(z1, z2)),
    );
    Ok(cuts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_collinearity_table, DEFAULT_TABLE_LIMIT};

    #[test]
    fn apply_examples() {
        let id = AffineMap::translation(Point::ORIGIN, 12).unwrap();
        assert_eq!(id.apply(Point::new(3, 7)), Point::new(3, 7));
        let t = AffineMap::translation(Point::new(9, 5), 12).unwrap();
        assert_eq!(t.apply(Point::new(3, 7)), Point::ORIGIN);
        let m = AffineMap::linear(Matrix2::new(2, 0, 0, 1), 5).unwrap();
        assert_eq!(m.apply(Point::new(1, 3)), Point::new(2, 3));
    }

    #[test]
    fn singular_matrix_rejected() {
        assert!(matches!(
            AffineMap::linear(Matrix2::new(2, 0, 0, 1), 6),
            Err(ZcapError::SingularMatrix { det: 2, n: 6 })
        ));
    }

    #[test]
    fn automorphisms() {
        for n in 1..=12 {
            let plane = Plane::new(n).unwrap();
            for s in all_points(n).step_by(5) {
                assert!(is_automorphism(&AffineMap::translation(s, n).unwrap(), &plane));
            }
        }
        let plane = Plane::new(5).unwrap();
        let g = AffineMap::new(Matrix2::new(2, 1, 1, 1), Point::new(3, 4), 5).unwrap();
        assert!(is_automorphism(&g, &plane));
    }

    #[test]
    fn inverse_and_compose() {
        let n = 12;
        let g = AffineMap::new(Matrix2::new(5, 1, 0, 7), Point::new(3, 4), n).unwrap();
        let h = AffineMap::new(Matrix2::new(1, 2, 3, 7), Point::new(11, 0), n).unwrap();
        for p in all_points(n) {
            assert_eq!(g.inverse().apply(g.apply(p)), p);
            assert_eq!(g.compose(&h).apply(p), g.apply(h.apply(p)));
        }
    }

    #[test]
    fn gl_order_for_primes() {
        for p in [2u32, 3, 5, 7] {
            let gl = general_linear(p);
            assert_eq!(gl.len() as u32, (p * p - 1) * (p * p - p));
            let images: HashSet<(Point, Point)> =
                gl.iter().map(|m| (m.apply(Point::new(1, 0), p), m.apply(Point::new(0, 1), p))).collect();
            assert_eq!(images.len(), gl.len());
        }
    }

    #[test]
    fn generators_generate() {
        for n in [4u32, 6, 8, 9, 10] {
            for group in [SymmetryGroup::Affine, SymmetryGroup::AxisPreserving] {
                let gens = group.generators(n);
                let mut seen: HashSet<Matrix2> = HashSet::from([Matrix2::IDENTITY.reduce(n)]);
                let mut frontier = vec![Matrix2::IDENTITY.reduce(n)];
                while let Some(m) = frontier.pop() {
                    for g in &gens {
                        let next = g.mul(&m, n);
                        if seen.insert(next) {
                            frontier.push(next);
                        }
                    }
                }
                assert_eq!(seen.len(), group.matrices(n).len(), "n={n} {group:?}");
            }
        }
    }

    #[test]
    fn canonical_examples() {
        let key = orbit_canonical(&[Point::ORIGIN], 5).unwrap();
        assert_eq!(key.points(), &[Point::ORIGIN]);
        let key = orbit_canonical(&[Point::new(2, 3), Point::new(4, 1)], 5).unwrap();
        assert_eq!(key.points(), &[Point::ORIGIN, Point::new(0, 1)]);
        assert!(matches!(orbit_canonical(&[], 5), Err(ZcapError::EmptyPointList)));
    }

    /// Orbit closure by breadth-first search over generators and translations.
    fn brute_canonical(group: SymmetryGroup, set: &[Point], n: u32) -> Vec<Point> {
        let mut start = set.to_vec();
        start.sort_unstable();
        start.dedup();
        let gens = group.generators(n);
        let mut seen = HashSet::from([start.clone()]);
        let mut frontier = vec![start];
        while let Some(s) = frontier.pop() {
            let mut next_sets = Vec::new();
            for m in &gens {
                next_sets.push(s.iter().map(|&p| m.apply(p, n)).collect::<Vec<_>>());
            }
            next_sets.push(s.iter().map(|p| p.add(Point::new(1, 0), n)).collect());
            next_sets.push(s.iter().map(|p| p.add(Point::new(0, 1), n)).collect());
            for mut t in next_sets {
                t.sort_unstable();
                if seen.insert(t.clone()) {
                    frontier.push(t);
                }
            }
        }
        seen.into_iter().min().unwrap()
    }

    #[test]
    fn canonical_matches_orbit_closure() {
        for n in [4u32, 5, 6] {
            let sets = [
                vec![Point::new(0, 2), Point::new(2, 0)],
                vec![Point::new(1, 3), Point::new(2, 2), Point::new(3, 1)],
                vec![Point::new(0, 0), Point::new(2, 2), Point::new(0, 2), Point::new(1, 3)],
                vec![Point::new(1, 1), Point::new(3, 3), Point::new(1, 3)],
            ];
            for s in sets {
                let s: Vec<Point> = s.into_iter().map(|p| p.reduce(n)).collect();
                for group in [SymmetryGroup::Affine, SymmetryGroup::AxisPreserving] {
                    let key = orbit_canonical_in(group, &s, n).unwrap();
                    assert_eq!(key.points(), brute_canonical(group, &s, n).as_slice(), "n={n} {s:?}");
                }
            }
        }
    }

    #[test]
    fn triple_classes_agree_with_canonical_form() {
        for n in [5u32, 6, 8] {
            let table = build_collinearity_table(n, DEFAULT_TABLE_LIMIT).unwrap();
            for group in [SymmetryGroup::Affine, SymmetryGroup::AxisPreserving] {
                let classes = TripleClasses::new(group, &table);
                for id in 1..=classes.count() as u32 {
                    let rep = classes.representative(id);
                    assert_eq!(orbit_canonical_in(group, &rep, n).unwrap().points(), &rep);
                    assert_eq!(classes.class_of(rep[0], rep[1], rep[2]), id);
                }
                let pts: Vec<Point> = all_points(n).collect();
                for (i, &a) in pts.iter().enumerate().step_by(3) {
                    for &b in pts.iter().skip(i + 1).step_by(2) {
                        for &c in pts.iter().skip(i + 2).step_by(5) {
                            if b == c || table.triple(a, b, c) {
                                continue;
                            }
                            let key = orbit_canonical_in(group, &[a, b, c], n).unwrap();
                            let id = classes.class_of(a, b, c);
                            assert_eq!(key.points(), &classes.representative(id));
                            assert_eq!(classes.class_of(c, a, b), id);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn prime_planes_have_one_triangle_class() {
        for p in [3u32, 5, 7] {
            let table = build_collinearity_table(p, DEFAULT_TABLE_LIMIT).unwrap();
            let classes = TripleClasses::new(SymmetryGroup::Affine, &table);
            assert_eq!(classes.count(), 1);
            assert_eq!(classes.representative(1), [Point::new(0, 0), Point::new(0, 1), Point::new(1, 0)]);
        }
    }

    #[test]
    fn wlog_cut_examples() {
        assert!(wlog_cuts(&[], &[], 5).unwrap().is_empty());
        // with the origin settled, every point is equivalent to it
        let cuts = wlog_cuts(&[], &[Point::ORIGIN], 5).unwrap();
        assert_eq!(cuts.len(), 25);
        assert!(cuts.iter().all(|c| matches!(c, CutDescriptor::FixZero(_))));
        assert!(matches!(wlog_cuts(&[Point::ORIGIN], &[Point::ORIGIN], 5), Err(ZcapError::ConflictingFix(_))));
    }

    #[test]
    fn wlog_cuts_have_witnesses() {
        let n = 6;
        let a = [Point::ORIGIN];
        let b = Point::new(1, 0);
        let cuts = wlog_cuts(&a, &[b], n).unwrap();
        assert!(!cuts.is_empty());
        let gl = general_linear(n);
        let maps = || gl.iter().flat_map(|&m| all_points(n).map(move |s| AffineMap::new(m, s, n).unwrap()));
        let same = |x: &[Point], y: &[Point]| {
            let mut x = x.to_vec();
            let mut y = y.to_vec();
            x.sort_unstable();
            y.sort_unstable();
            x == y
        };
        for cut in &cuts {
            match *cut {
                CutDescriptor::FixZero(z) => {
                    assert!(maps().any(|g| same(&g.apply_all(&[z, a[0]]), &[b, a[0]])), "{z}");
                }
                CutDescriptor::PairExclusion(z1, z2) => {
                    assert!(maps().any(|g| {
                        let img = g.apply_all(&[z1, z2, a[0]]);
                        img.contains(&b) && img.contains(&a[0])
                    }));
                }
                _ => unreachable!(),
            }
        }
    }
}
