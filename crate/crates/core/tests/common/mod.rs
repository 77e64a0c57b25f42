//! Independent oracles shared by the integration tests. Nothing here calls the
//! library's geometry code.

#![allow(dead_code)]

use zcap::Point;

pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `m * prod (1 + 1/p)` over the primes dividing `m`, by trial division.
pub fn psi(m: u64) -> u64 {
    let (mut rest, mut out, mut p) = (m, m, 2);
    while p * p <= rest {
        if rest % p == 0 {
            out = out / p * (p + 1);
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += 1;
    }
    if rest > 1 {
        out = out / rest * (rest + 1);
    }
    out
}

pub fn smallest_prime(n: u32) -> u32 {
    (2..=n).find(|p| n.is_multiple_of(*p)).expect("n > 1")
}

/// Every line `a + w t` with `gcd(t1, t2, n) = 1`, as sorted index lists, deduplicated.
pub fn naive_lines(n: u32) -> Vec<Vec<usize>> {
    let mut lines = std::collections::BTreeSet::new();
    for t1 in 0..n {
        for t2 in 0..n {
            if gcd(gcd(t1, t2), n) != 1 {
                continue;
            }
            for a1 in 0..n {
                for a2 in 0..n {
                    let mut line: Vec<usize> =
                        (0..n).map(|w| (((a1 + w * t1) % n) * n + (a2 + w * t2) % n) as usize).collect();
                    line.sort_unstable();
                    line.dedup();
                    lines.insert(line);
                }
            }
        }
    }
    lines.into_iter().collect()
}

/// `collinear[(i * np + j) * np + k]` for all index triples, from line membership.
pub struct TripleOracle {
    pub n: u32,
    np: usize,
    bits: Vec<u64>,
}

impl TripleOracle {
    pub fn new(n: u32) -> Self {
        let np = (n * n) as usize;
        let mut bits = vec![0u64; (np * np * np).div_ceil(64)];
        for line in naive_lines(n) {
            for &i in &line {
                for &j in &line {
                    for &k in &line {
                        let b = (i * np + j) * np + k;
                        bits[b / 64] |= 1 << (b % 64);
                    }
                }
            }
        }
        TripleOracle { n, np, bits }
    }

    pub fn collinear(&self, a: Point, b: Point, c: Point) -> bool {
        let n = self.n;
        let b = (a.index(n) * self.np + b.index(n)) * self.np + c.index(n);
        self.bits[b / 64] >> (b % 64) & 1 == 1
    }

    pub fn is_cap(&self, points: &[Point]) -> bool {
        (0..points.len()).all(|i| {
            (i + 1..points.len())
                .all(|j| (j + 1..points.len()).all(|k| !self.collinear(points[i], points[j], points[k])))
        })
    }

    /// No point outside can be added; `permutation` also lets a shared row or column block a point.
    pub fn is_complete(&self, points: &[Point], permutation: bool) -> bool {
        let n = self.n;
        (0..n).flat_map(|u| (0..n).map(move |v| Point::new(u, v))).filter(|p| !points.contains(p)).all(|p| {
            (permutation && points.iter().any(|q| q.u == p.u || q.v == p.v))
                || (0..points.len()).any(|i| (i + 1..points.len()).any(|j| self.collinear(points[i], points[j], p)))
        })
    }
}

/// Largest cap by plain backtracking over points in index order.
pub fn brute_m2(oracle: &TripleOracle) -> usize {
    let n = oracle.n;
    let all: Vec<Point> = (0..n).flat_map(|u| (0..n).map(move |v| Point::new(u, v))).collect();
    fn go(o: &TripleOracle, cand: &[Point], cap: &mut Vec<Point>, best: &mut usize) {
        *best = (*best).max(cap.len());
        if cap.len() + cand.len() <= *best {
            return;
        }
        for (i, &p) in cand.iter().enumerate() {
            if cap.len() + cand.len() - i <= *best {
                return;
            }
            let rest: Vec<Point> =
                cand[i + 1..].iter().copied().filter(|&q| cap.iter().all(|&c| !o.collinear(c, p, q))).collect();
            cap.push(p);
            go(o, &rest, cap, best);
            cap.pop();
        }
    }
    let mut best = 0;
    go(oracle, &all, &mut Vec::new(), &mut best);
    best
}

/// Largest permutation cap, choosing a column (or none) row by row.
pub fn brute_sigma(oracle: &TripleOracle) -> usize {
    fn go(o: &TripleOracle, v: u32, used: u64, cap: &mut Vec<Point>, best: &mut usize) {
        let n = o.n;
        *best = (*best).max(cap.len());
        if v == n || cap.len() + (n - v) as usize <= *best {
            return;
        }
        for u in 0..n {
            let p = Point::new(u, v);
            if used >> u & 1 == 0 && (0..cap.len()).all(|i| (i + 1..cap.len()).all(|j| !o.collinear(cap[i], cap[j], p)))
            {
                cap.push(p);
                go(o, v + 1, used | 1 << u, cap, best);
                cap.pop();
            }
        }
        go(o, v + 1, used, cap, best);
    }
    let mut best = 0;
    go(oracle, 0, 0, &mut Vec::new(), &mut best);
    best
}

/// Smallest complete cap by trying all subsets in increasing size.
pub fn brute_n2(oracle: &TripleOracle) -> usize {
    let n = oracle.n;
    let all: Vec<Point> = (0..n).flat_map(|u| (0..n).map(move |v| Point::new(u, v))).collect();
    fn subsets(
        all: &[Point],
        k: usize,
        start: usize,
        cur: &mut Vec<Point>,
        f: &mut dyn FnMut(&[Point]) -> bool,
    ) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..all.len() {
            cur.push(all[i]);
            if subsets(all, k, i + 1, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    (1..=all.len())
        .find(|&k| subsets(&all, k, 0, &mut Vec::new(), &mut |s| oracle.is_cap(s) && oracle.is_complete(s, false)))
        .expect("a complete cap exists")
}
