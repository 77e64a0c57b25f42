//! Shared machinery of the exact searches: packed point sets, blocked-point
//! masks per pair of cap points, partition bounds, budgets, and the parallel
//! task loop.

use std::sync::atomic::{AtomicU64, AtomicU8, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{gcd, Plane, Point};
use crate::symmetry::TripleClasses;

use super::Status;

pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

#[inline]
pub(crate) fn set_bit(bits: &mut [u64], i: usize) {
    bits[i >> 6] |= 1 << (i & 63);
}

#[inline]
pub(crate) fn clear_bit(bits: &mut [u64], i: usize) {
    bits[i >> 6] &= !(1 << (i & 63));
}

#[inline]
pub(crate) fn test_bit(bits: &[u64], i: usize) -> bool {
    bits[i >> 6] >> (i & 63) & 1 == 1
}

#[inline]
pub(crate) fn count(bits: &[u64]) -> u32 {
    bits.iter().map(|w| w.count_ones()).sum()
}

#[inline]
pub(crate) fn count_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

#[inline]
pub(crate) fn count_and3(a: &[u64], b: &[u64], c: &[u64]) -> u32 {
    a.iter().zip(b).zip(c).map(|((x, y), z)| (x & y & z).count_ones()).sum()
}

#[inline]
pub(crate) fn and_not(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x &= !y;
    }
}

#[inline]
pub(crate) fn first_bit(bits: &[u64]) -> Option<usize> {
    bits.iter().position(|&w| w != 0).map(|k| k * 64 + bits[k].trailing_zeros() as usize)
}

/// Indices of set bits, ascending.
pub(crate) fn ones(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let t = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(k * 64 + t)
        })
    })
}

/// The `k`-th set bit (0-based).
fn nth_bit(bits: &[u64], mut k: u32) -> usize {
    for (i, &w) in bits.iter().enumerate() {
        let c = w.count_ones();
        if k < c {
            let mut w = w;
            for _ in 0..k {
                w &= w - 1;
            }
            return i * 64 + w.trailing_zeros() as usize;
        }
        k -= c;
    }
    unreachable!("fewer set bits than requested")
}

/// Per-modulus tables shared by all workers.
pub(crate) struct Context {
    pub n: u32,
    pub np: usize,
    pub words: usize,
    pub classes: TripleClasses,
    /// `add[x * np + d]` is the index of `x + d`.
    add: Vec<u16>,
    /// `sub[a * np + b]` is the index of `a - b`.
    sub: Vec<u16>,
    /// Pair indices `d * np + e` grouped by class.
    class_start: Vec<usize>,
    class_pairs: Vec<u32>,
    /// Row and column of each point, for permutation caps.
    rowcol: Option<Vec<u64>>,
}

impl Context {
    pub fn new(n: u32, classes: TripleClasses, permutation: bool) -> Context {
        let np = (n * n) as usize;
        let words = words_for(np);
        let mut add = vec![0u16; np * np];
        let mut sub = vec![0u16; np * np];
        for a in 0..np {
            let pa = Point::from_index(a, n);
            for b in 0..np {
                let pb = Point::from_index(b, n);
                add[a * np + b] = pa.add(pb, n).index(n) as u16;
                sub[a * np + b] = pa.sub(pb, n).index(n) as u16;
            }
        }
        let raw = classes.raw();
        let num = classes.count() + 1;
        let mut class_start = vec![0usize; num + 1];
        for &c in raw {
            class_start[c as usize + 1] += 1;
        }
        for c in 0..num {
            class_start[c + 1] += class_start[c];
        }
        let mut fill = class_start.clone();
        let mut class_pairs = vec![0u32; raw.len()];
        for (pair, &c) in raw.iter().enumerate() {
            class_pairs[fill[c as usize]] = pair as u32;
            fill[c as usize] += 1;
        }
        let rowcol = permutation.then(|| {
            let mut masks = vec![0u64; np * words];
            for p in 0..np {
                let pp = Point::from_index(p, n);
                for q in 0..np {
                    let pq = Point::from_index(q, n);
                    if pq.u == pp.u || pq.v == pp.v {
                        set_bit(&mut masks[p * words..(p + 1) * words], q);
                    }
                }
            }
            masks
        });
        Context { n, np, words, classes, add, sub, class_start, class_pairs, rowcol }
    }

    #[inline]
    pub fn class_of(&self, x: usize, p: usize, w: usize) -> u32 {
        let np = self.np;
        self.classes.raw()[self.sub[p * np + x] as usize * np + self.sub[w * np + x] as usize]
    }

    pub fn rowcol(&self, p: usize) -> Option<&[u64]> {
        self.rowcol.as_ref().map(|m| &m[p * self.words..(p + 1) * self.words])
    }

    pub fn full_mask(&self) -> Vec<u64> {
        let mut bits = vec![0u64; self.words];
        for i in 0..self.np {
            set_bit(&mut bits, i);
        }
        bits
    }

    pub fn index_mask(&self, points: &[Point]) -> Vec<u64> {
        let mut bits = vec![0u64; self.words];
        for p in points {
            set_bit(&mut bits, p.index(self.n));
        }
        bits
    }
}

/// Dense tables are used while `np^2 * words` stays below this many words.
const DENSE_LIMIT: usize = 1 << 22;

/// For a threshold `t`, the points `w` with `class(x, p, w) < t`, i.e. the
/// points excluded once `x` and `p` are both in the cap.
pub(crate) struct PairMasks {
    threshold: u32,
    dense: Option<Vec<u64>>,
}

impl PairMasks {
    pub fn new(ctx: &Context, threshold: u32) -> PairMasks {
        let dense = (ctx.np * ctx.np * ctx.words <= DENSE_LIMIT).then(|| vec![0u64; ctx.np * ctx.np * ctx.words]);
        let mut masks = PairMasks { threshold: 0, dense };
        masks.raise(ctx, threshold);
        masks
    }

    /// Moves to a threshold; cheap when increasing.
    pub fn raise(&mut self, ctx: &Context, threshold: u32) {
        let Some(dense) = self.dense.as_mut() else {
            self.threshold = threshold;
            return;
        };
        if threshold < self.threshold {
            dense.fill(0);
            self.threshold = 0;
        }
        let (np, words) = (ctx.np, ctx.words);
        for class in self.threshold..threshold {
            let range = ctx.class_start[class as usize]..ctx.class_start[class as usize + 1];
            for &pair in &ctx.class_pairs[range] {
                let (d, e) = (pair as usize / np, pair as usize % np);
                for x in 0..np {
                    let p = ctx.add[x * np + d] as usize;
                    let w = ctx.add[x * np + e] as usize;
                    let base = (x * np + p) * words;
                    set_bit(&mut dense[base..base + words], w);
                }
            }
        }
        self.threshold = threshold;
    }

    /// Removes from `bits` the points excluded by the pair `x`, `p`.
    #[inline]
    pub fn remove(&self, ctx: &Context, x: usize, p: usize, bits: &mut [u64]) {
        match &self.dense {
            Some(dense) => {
                let base = (x * ctx.np + p) * ctx.words;
                and_not(bits, &dense[base..base + ctx.words]);
            }
            None => {
                for (k, word) in bits.iter_mut().enumerate() {
                    let mut w = *word;
                    while w != 0 {
                        let t = w.trailing_zeros() as usize;
                        w &= w - 1;
                        if ctx.class_of(x, p, k * 64 + t) < self.threshold {
                            *word &= !(1 << t);
                        }
                    }
                }
            }
        }
    }

    /// Adds to `bits` the points excluded by the pair `x`, `p`.
    #[inline]
    pub fn insert(&self, ctx: &Context, x: usize, p: usize, bits: &mut [u64]) {
        match &self.dense {
            Some(dense) => {
                let base = (x * ctx.np + p) * ctx.words;
                for (b, m) in bits.iter_mut().zip(&dense[base..base + ctx.words]) {
                    *b |= m;
                }
            }
            None => {
                for w in 0..ctx.np {
                    if ctx.class_of(x, p, w) < self.threshold {
                        set_bit(bits, w);
                    }
                }
            }
        }
    }
}

/// Partitions of the plane into blocks with capacities: the number of cap
/// points in a block never exceeds its capacity.
pub(crate) struct Blocks {
    words: usize,
    masks: Vec<u64>,
    capacity: Vec<u8>,
    partitions: Vec<(usize, usize)>,
    /// `membership[p * partitions + k]` is the block of point `p` in partition `k`.
    membership: Vec<u32>,
}

impl Blocks {
    pub fn new(np: usize) -> Blocks {
        Blocks {
            words: words_for(np),
            masks: Vec::new(),
            capacity: Vec::new(),
            partitions: Vec::new(),
            membership: Vec::new(),
        }
    }

    /// Adds a partition given by a block label per point.
    pub fn push_partition(&mut self, labels: &[usize], capacity: impl Fn(usize) -> u32) {
        let np = labels.len();
        let first = self.capacity.len();
        let num = labels.iter().max().map_or(0, |m| m + 1);
        self.masks.resize(self.masks.len() + num * self.words, 0);
        for b in 0..num {
            self.capacity.push(capacity(b).min(u8::MAX as u32) as u8);
        }
        for (p, &b) in labels.iter().enumerate() {
            let base = (first + b) * self.words;
            set_bit(&mut self.masks[base..base + self.words], p);
        }
        let parts = self.partitions.len();
        let mut membership = Vec::with_capacity(np * (parts + 1));
        for (p, &label) in labels.iter().enumerate() {
            if parts > 0 {
                membership.extend_from_slice(&self.membership[p * parts..(p + 1) * parts]);
            }
            membership.push((first + label) as u32);
        }
        self.membership = membership;
        self.partitions.push((first, first + num));
    }

    pub fn num_blocks(&self) -> usize {
        self.capacity.len()
    }

    pub fn mask(&self, block: usize) -> &[u64] {
        &self.masks[block * self.words..(block + 1) * self.words]
    }

    pub fn blocks_of(&self, p: usize) -> &[u32] {
        let k = self.partitions.len();
        &self.membership[p * k..(p + 1) * k]
    }

    /// Can every partition still hold `slack` more points?
    pub fn admits(&self, avail: &[u64], filled: &[u8], slack: u32) -> bool {
        self.partitions.iter().all(|&(lo, hi)| {
            let mut room = 0;
            for (b, &fill) in filled.iter().enumerate().take(hi).skip(lo) {
                let free = self.capacity[b].saturating_sub(fill) as u32;
                if free > 0 {
                    room += free.min(count_and(avail, self.mask(b)));
                    if room >= slack {
                        return true;
                    }
                }
            }
            false
        })
    }

    /// Upper bound on the number of points still addable.
    pub fn room(&self, avail: &[u64], filled: &[u8]) -> u32 {
        let mut best = count(avail);
        for &(lo, hi) in &self.partitions {
            let room = (lo..hi)
                .map(|b| (self.capacity[b].saturating_sub(filled[b]) as u32).min(count_and(avail, self.mask(b))))
                .sum();
            best = best.min(room);
        }
        best
    }
}

/// Lines through a cap point `x`: every point `y` with `y - x` unimodular
/// lies on exactly one of them, and at most one further cap point lies on
/// each. The remaining points agree with `x` modulo some prime divisor of
/// `n`, and hold at most `other_capacity` cap points.
pub(crate) struct Pencils {
    words: usize,
    /// `through[x]` lists the line blocks through point `x`.
    through: Vec<Vec<u32>>,
    unimodular: Vec<u64>,
    other: Vec<u64>,
    other_capacity: u32,
}

impl Pencils {
    pub fn new(plane: &Plane, other_capacity: u32) -> Pencils {
        let n = plane.n();
        let np = plane.num_points();
        let words = words_for(np);
        let mut unimodular = vec![0u64; np * words];
        let mut other = vec![0u64; np * words];
        for x in 0..np {
            let px = Point::from_index(x, n);
            for y in 0..np {
                let d = Point::from_index(y, n).sub(px, n);
                let target = if gcd(gcd(d.u as u64, d.v as u64), n as u64) == 1 {
                    &mut unimodular
                } else if y != x {
                    &mut other
                } else {
                    continue;
                };
                set_bit(&mut target[x * words..(x + 1) * words], y);
            }
        }
        let through = (0..np).map(|x| plane.lines_through_index(x).to_vec()).collect();
        Pencils { words, through, unimodular, other, other_capacity }
    }

    /// Can `slack` more points be added next to cap point `x`? Line blocks
    /// must be the first blocks of `blocks`, in line order.
    pub fn admits(&self, blocks: &Blocks, x: usize, avail: &[u64], cap: &[u64], filled: &[u8], slack: u32) -> bool {
        let w = self.words;
        let uni = &self.unimodular[x * w..(x + 1) * w];
        let other = &self.other[x * w..(x + 1) * w];
        let mut room = self.other_capacity.saturating_sub(count_and(cap, other)).min(count_and(avail, other));
        if room >= slack {
            return true;
        }
        for &l in &self.through[x] {
            let l = l as usize;
            if filled[l] < 2 && count_and3(avail, blocks.mask(l), uni) > 0 {
                room += 1;
                if room >= slack {
                    return true;
                }
            }
        }
        false
    }
}

/// Time and node budget shared by all workers.
pub(crate) struct Budget {
    start: Instant,
    limit: Option<Duration>,
    node_limit: Option<u64>,
    nodes: AtomicU64,
    /// 0 running, 1 out of time, 2 out of nodes.
    state: AtomicU8,
}

impl Budget {
    pub fn new(limit: Option<Duration>, node_limit: Option<u64>) -> Budget {
        Budget { start: Instant::now(), limit, node_limit, nodes: AtomicU64::new(0), state: AtomicU8::new(0) }
    }

    /// Records `nodes` more nodes; false once the budget is spent.
    pub fn charge(&self, nodes: u64) -> bool {
        let total = self.nodes.fetch_add(nodes, Ordering::Relaxed) + nodes;
        if self.node_limit.is_some_and(|l| total > l) {
            let _ = self.state.compare_exchange(0, 2, Ordering::Relaxed, Ordering::Relaxed);
        }
        if self.limit.is_some_and(|l| self.start.elapsed() > l) {
            let _ = self.state.compare_exchange(0, 1, Ordering::Relaxed, Ordering::Relaxed);
        }
        self.state.load(Ordering::Relaxed) == 0
    }

    pub fn exhausted(&self) -> Option<Status> {
        match self.state.load(Ordering::Relaxed) {
            0 => None,
            1 => Some(Status::Timeout),
            _ => Some(Status::Bounded),
        }
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    pub fn remaining(&self) -> Option<Duration> {
        self.limit.map(|l| l.saturating_sub(self.start.elapsed()))
    }
}

/// Nodes between budget checks.
pub(crate) const CHECK_INTERVAL: u64 = 1 << 10;

/// Runs `run(worker, task)` for every task on `threads` threads, handing out
/// tasks in increasing order. Each thread builds one worker.
pub(crate) fn run_tasks<W, R: Send>(
    threads: usize,
    num_tasks: usize,
    make_worker: impl Fn() -> W + Sync,
    run: impl Fn(&mut W, usize) -> R + Sync,
) -> Vec<Option<R>> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<R>>> = Mutex::new((0..num_tasks).map(|_| None).collect());
    let work = || {
        let mut worker = make_worker();
        loop {
            let t = next.fetch_add(1, Ordering::Relaxed);
            if t >= num_tasks {
                break;
            }
            let r = run(&mut worker, t);
            results.lock().expect("no panics while holding the lock")[t] = Some(r);
        }
    };
    let threads = threads.clamp(1, num_tasks.max(1));
    if threads == 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..threads {
                s.spawn(work);
            }
        });
    }
    results.into_inner().expect("workers finished")
}

/// Smallest task index that reported success, for first-find searches.
pub(crate) struct FirstFind {
    index: AtomicUsize,
}

impl FirstFind {
    pub fn new() -> FirstFind {
        FirstFind { index: AtomicUsize::new(usize::MAX) }
    }

    pub fn record(&self, task: usize) {
        self.index.fetch_min(task, Ordering::Relaxed);
    }

    /// Has a task before `task` already succeeded?
    pub fn superseded(&self, task: usize) -> bool {
        self.index.load(Ordering::Relaxed) < task
    }
}

/// Random maximal cap: adds uniformly random available points. `avail` is
/// consumed; `blocked` holds the threshold-1 masks.
pub(crate) fn dive(
    ctx: &Context,
    blocked: &PairMasks,
    start: &[usize],
    mut avail: Vec<u64>,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    let mut cap: Vec<usize> = Vec::new();
    let add = |cap: &mut Vec<usize>, avail: &mut Vec<u64>, p: usize| {
        clear_bit(avail, p);
        for &x in cap.iter() {
            blocked.remove(ctx, x, p, avail);
        }
        if let Some(rc) = ctx.rowcol(p) {
            and_not(avail, rc);
        }
        cap.push(p);
    };
    for &s in start {
        if !test_bit(&avail, s) {
            return None;
        }
        add(&mut cap, &mut avail, s);
    }
    loop {
        let c = count(&avail);
        if c == 0 {
            return Some(cap);
        }
        let p = nth_bit(&avail, rng.gen_range(0..c));
        add(&mut cap, &mut avail, p);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_helpers() {
        let mut b = vec![0u64; 3];
        for i in [0, 63, 64, 130] {
            set_bit(&mut b, i);
        }
        assert_eq!(ones(&b).collect::<Vec<_>>(), vec![0, 63, 64, 130]);
        assert_eq!(nth_bit(&b, 2), 64);
        assert_eq!(first_bit(&b), Some(0));
        clear_bit(&mut b, 0);
        assert_eq!(first_bit(&b), Some(63));
        assert_eq!(count(&b), 3);
    }
}
