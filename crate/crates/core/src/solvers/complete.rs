//! Smallest complete cap (`n2`) by iterative deepening on the size.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::engine::{
    and_not, count, dive, ones, run_tasks, set_bit, test_bit, Budget, Context, FirstFind, PairMasks, CHECK_INTERVAL,
};
use super::{Cap, CapVariant, Problem, SearchOptions, SolveResult, Status, Value};
use crate::error::{Result, ZcapError};
use crate::geometry::{build_collinearity_table, factorize, DEFAULT_TABLE_LIMIT};
use crate::symmetry::{SymmetryGroup, TripleClasses};

/// `max(4, ceil(sqrt(2p) + 1/2))` for the smallest prime divisor `p` of `n > 1`.
pub(crate) fn n2_lower_bound(n: u32) -> Result<u32> {
    let p = factorize(n as u64)?.smallest_prime().ok_or(ZcapError::ModulusTooSmall { n, min: 2 })?;
    // ceil(sqrt(2p) + 1/2) is the least k with (k - 1/2)^2 >= 2p, i.e. 4k^2 - 4k + 1 >= 8p
    let k = (1..).find(|&k: &u64| 4 * k * k - 4 * k + 1 >= 8 * p as u64).expect("unbounded search");
    Ok((k as u32).max(4))
}

/// Smallest complete cap in `Z_n^2`.
///
/// Sizes are tried upwards from the lower bound. For each size the search
/// enumerates, per triple class, the caps that contain the class
/// representative and no triple of a smaller class, adding points in
/// increasing index order.
pub fn min_complete_cap(n: u32, opts: &SearchOptions) -> Result<SolveResult> {
    if n < 2 {
        return Err(ZcapError::ModulusTooSmall { n, min: 2 });
    }
    opts.validate(n)?;
    Cap::new(n, opts.forced_in.iter().copied(), CapVariant::Plain)?;
    let budget = Budget::new(opts.time_limit, opts.node_limit);
    let table = build_collinearity_table(n, DEFAULT_TABLE_LIMIT)?;
    let symmetric = opts.breaks_symmetry();
    let classes =
        if symmetric { TripleClasses::new(SymmetryGroup::Affine, &table) } else { TripleClasses::uniform(&table) };
    let ctx = Context::new(n, classes, false);
    let np = ctx.np;
    let collinear = PairMasks::new(&ctx, 1);

    let mut root = ctx.full_mask();
    and_not(&mut root, &ctx.index_mask(&opts.forced_out));
    let forced: Vec<usize> = opts.forced_in.iter().map(|p| p.index(n)).collect();
    let tasks: Vec<(Vec<usize>, u32)> = if symmetric {
        (1..=ctx.classes.count() as u32)
            .map(|id| (ctx.classes.representative(id).iter().map(|p| p.index(n)).collect(), id))
            .collect()
    } else {
        vec![(forced.clone(), 1)]
    };

    // largest number of points newly covered by one pair of cap points
    let reach =
        (1..np).map(|d| (0..np).filter(|&e| ctx.classes.raw()[d * np + e] == 0).count() as u32 - 2).max().unwrap_or(0);

    let is_complete = |cap: &[usize]| {
        let mut covered = vec![0u64; ctx.words];
        for (i, &a) in cap.iter().enumerate() {
            set_bit(&mut covered, a);
            for &b in &cap[..i] {
                collinear.insert(&ctx, b, a, &mut covered);
            }
        }
        count(&covered) as usize == np
    };
    let mut witness: Option<Vec<usize>> = None;
    for seed in 0..(64 + np as u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Some(c) = dive(&ctx, &collinear, &forced, root.clone(), &mut rng) {
            if is_complete(&c) && witness.as_ref().is_none_or(|w| c.len() < w.len()) {
                witness = Some(c);
            }
        }
    }

    let lower = n2_lower_bound(n)?.max(forced.len() as u32);
    let finish = |value: Value, status: Status, cap: Option<&[usize]>| SolveResult {
        problem: Problem::N2,
        n,
        value,
        status,
        certificate: cap.map(|c| Cap::from_indices(n, c, CapVariant::Plain)),
        nodes: budget.nodes(),
        elapsed: budget.elapsed(),
    };
    let upper = witness.as_ref().map_or(np as u32, |w| w.len() as u32);
    for k in lower..upper {
        if symmetric && k < 3 {
            continue;
        }
        let first = FirstFind::new();
        let found = run_tasks(
            opts.threads,
            tasks.len(),
            || Search::new(&ctx, &collinear, &budget, reach),
            |s, t| {
                if first.superseded(t) {
                    return None;
                }
                let (start, threshold) = &tasks[t];
                s.run(start, *threshold, &root, k, t, &first)
            },
        );
        if let Some(cap) = found.into_iter().flatten().flatten().next() {
            return Ok(finish(Value::Exact(k), Status::Optimal, Some(&cap)));
        }
        if let Some(status) = budget.exhausted() {
            let hi = witness.as_ref().map_or(np as u32, |w| w.len() as u32);
            return Ok(finish(Value::new(k, hi), status, witness.as_deref()));
        }
    }
    match witness {
        Some(w) => Ok(finish(Value::Exact(w.len() as u32), Status::Optimal, Some(&w))),
        // only reachable when forced points leave no complete cap
        None => Err(ZcapError::NotACap),
    }
}

struct Search<'a> {
    ctx: &'a Context,
    collinear: &'a PairMasks,
    budget: &'a Budget,
    masks: PairMasks,
    reach: u32,
    /// Candidate and covered sets per depth.
    avail: Vec<u64>,
    covered: Vec<u64>,
    cap: Vec<usize>,
    pending: u64,
    found: Option<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(ctx: &'a Context, collinear: &'a PairMasks, budget: &'a Budget, reach: u32) -> Self {
        let w = ctx.words;
        Search {
            ctx,
            collinear,
            budget,
            masks: PairMasks::new(ctx, 1),
            reach,
            avail: vec![0; w * (ctx.np + 2)],
            covered: vec![0; w * (ctx.np + 2)],
            cap: Vec::new(),
            pending: 0,
            found: None,
        }
    }

    /// Adds `p` at depth `d`, filling in depth `d + 1`; `later` drops candidates up to `p`.
    fn place(&mut self, d: usize, p: usize, later: bool) {
        let w = self.ctx.words;
        self.avail.copy_within(d * w..(d + 1) * w, (d + 1) * w);
        self.covered.copy_within(d * w..(d + 1) * w, (d + 1) * w);
        let avail = &mut self.avail[(d + 1) * w..(d + 2) * w];
        let covered = &mut self.covered[(d + 1) * w..(d + 2) * w];
        if later {
            let (word, bit) = (p / 64, p % 64);
            avail[..word].fill(0);
            avail[word] &= if bit == 63 { 0 } else { !0u64 << (bit + 1) };
        } else {
            avail[p / 64] &= !(1 << (p % 64));
        }
        set_bit(covered, p);
        for &x in &self.cap {
            self.masks.remove(self.ctx, x, p, avail);
            self.collinear.insert(self.ctx, x, p, covered);
        }
        self.cap.push(p);
    }

    fn run(
        &mut self,
        start: &[usize],
        threshold: u32,
        root: &[u64],
        k: u32,
        task: usize,
        first: &FirstFind,
    ) -> Option<Vec<usize>> {
        let w = self.ctx.words;
        self.masks.raise(self.ctx, threshold);
        self.cap.clear();
        self.found = None;
        self.avail[..w].copy_from_slice(root);
        self.covered[..w].fill(0);
        for (d, &s) in start.iter().enumerate() {
            if !test_bit(&self.avail[d * w..(d + 1) * w], s) {
                return None;
            }
            self.place(d, s, false);
        }
        self.dfs(start.len(), k, task, first);
        self.budget.charge(self.pending);
        self.pending = 0;
        self.found.take()
    }

    /// Returns false to abandon the task.
    fn dfs(&mut self, d: usize, k: u32, task: usize, first: &FirstFind) -> bool {
        self.pending += 1;
        if self.pending >= CHECK_INTERVAL {
            let ok = self.budget.charge(self.pending);
            self.pending = 0;
            if !ok || first.superseded(task) {
                return false;
            }
        }
        let w = self.ctx.words;
        let np = self.ctx.np as u32;
        let s = self.cap.len() as u32;
        let uncovered = np - count(&self.covered[d * w..(d + 1) * w]);
        if s == k {
            if uncovered == 0 {
                self.found = Some(self.cap.clone());
                first.record(task);
                return false;
            }
            return true;
        }
        let left = k - s;
        let coverable: u32 = (0..left).map(|t| (s + t) * self.reach + 1).sum();
        if uncovered > coverable {
            return true;
        }
        let candidates: Vec<usize> = ones(&self.avail[d * w..(d + 1) * w]).collect();
        if (candidates.len() as u32) < left {
            return true;
        }
        for (i, &p) in candidates.iter().enumerate() {
            if ((candidates.len() - i) as u32) < left {
                break;
            }
            self.place(d, p, true);
            let go_on = self.dfs(d + 1, k, task, first);
            self.cap.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::is_complete;

    #[test]
    fn lower_bounds() {
        assert_eq!(n2_lower_bound(2).unwrap(), 4);
        assert_eq!(n2_lower_bound(7).unwrap(), 5);
        assert_eq!(n2_lower_bound(11).unwrap(), 6);
        assert_eq!(n2_lower_bound(13).unwrap(), 6);
        assert_eq!(n2_lower_bound(29).unwrap(), 9);
    }

    #[test]
    fn small_values() {
        for (n, expected) in [(2, 4), (3, 4), (4, 4), (5, 5), (7, 6)] {
            for opts in [SearchOptions::default(), SearchOptions::default().without_symmetry()] {
                let r = min_complete_cap(n, &opts).unwrap();
                assert_eq!(r.value, Value::Exact(expected), "n={n}");
                let cert = r.certificate.unwrap();
                assert_eq!(cert.len() as u32, expected);
                assert!(is_complete(&cert));
            }
        }
    }
}
