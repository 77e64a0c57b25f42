//! Branch and bound for the largest cap (`m2`) and the largest permutation
//! cap (`sigma`).

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU32, Ordering};
use std::sync::{Mutex, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::engine::{
    and_not, clear_bit, count, dive, first_bit, run_tasks, set_bit, test_bit, Blocks, Budget, Context, FirstFind,
    PairMasks, Pencils, CHECK_INTERVAL,
};
use super::{Cap, CapVariant, Problem, SearchOptions, SolveResult, Status, Value};
use crate::error::{Result, ZcapError};
use crate::geometry::{build_collinearity_table, gcd, Plane, Point, DEFAULT_TABLE_LIMIT};
use crate::symmetry::{SymmetryGroup, TripleClasses};

/// Largest cap in `Z_n^2`.
pub fn max_cap(n: u32, opts: &SearchOptions) -> Result<SolveResult> {
    solve_max(Problem::M2, n, opts)
}

/// Largest cap in `Z_n^2` with at most one point per row and per column.
pub fn sigma_cap(n: u32, opts: &SearchOptions) -> Result<SolveResult> {
    solve_max(Problem::Sigma, n, opts)
}

/// Moduli up to this size are solved recursively to get block capacities.
const SUBSOLVE_MAX: u32 = 16;

static M2_CACHE: OnceLock<Mutex<HashMap<u32, u32>>> = OnceLock::new();

/// An upper bound on `m2(b)`, exact when the recursive solve finishes in time.
fn m2_upper(b: u32, opts: &SearchOptions, budget: &Budget) -> Result<u32> {
    match b {
        1 => return Ok(1),
        2 => return Ok(4),
        _ if b > SUBSOLVE_MAX => return Ok(2 * b),
        _ => {}
    }
    let cache = M2_CACHE.get_or_init(Default::default);
    if let Some(&v) = cache.lock().expect("cache lock").get(&b) {
        return Ok(v);
    }
    let sub = SearchOptions {
        time_limit: budget.remaining().map(|r| r / 4),
        threads: opts.threads,
        ..SearchOptions::default()
    };
    let r = max_cap(b, &sub)?;
    if r.status == Status::Optimal {
        cache.lock().expect("cache lock").insert(b, r.value.hi());
    }
    Ok(r.value.hi())
}

/// Partition bounds: lines per direction first (block id = line index), then
/// rows and columns for permutation caps, cosets of `p Z_n^2` for each prime
/// divisor `p`, and preimages of the lines of `Z_a^2` for each unitary
/// divisor `a` of `n`.
fn build_bounds(plane: &Plane, permutation: bool, opts: &SearchOptions, budget: &Budget) -> Result<(Blocks, Pencils)> {
    let n = plane.n();
    let np = plane.num_points();
    let mut blocks = Blocks::new(np);
    for class in plane.parallel_classes() {
        let first = class[0];
        let mut labels = vec![0usize; np];
        for &l in class {
            for p in plane.line_set(l).ones() {
                labels[p] = l - first;
            }
        }
        blocks.push_partition(&labels, |_| 2);
    }
    let points: Vec<Point> = (0..np).map(|i| Point::from_index(i, n)).collect();
    if permutation {
        blocks.push_partition(&points.iter().map(|p| p.v as usize).collect::<Vec<_>>(), |_| 1);
        blocks.push_partition(&points.iter().map(|p| p.u as usize).collect::<Vec<_>>(), |_| 1);
    }
    let mut other_capacity = 0;
    for pp in plane.factorization().factors() {
        let p = pp.p;
        if p == n {
            continue;
        }
        let capacity = m2_upper(n / p, opts, budget)?;
        other_capacity += capacity - 1;
        let labels: Vec<usize> = points.iter().map(|x| ((x.u % p) * p + x.v % p) as usize).collect();
        blocks.push_partition(&labels, |_| capacity);
    }
    for a in 2..n {
        if !n.is_multiple_of(a) || gcd(a as u64, (n / a) as u64) != 1 {
            continue;
        }
        let capacity = m2_upper(n / a, opts, budget)?;
        let small = Plane::new(a)?;
        for class in small.parallel_classes() {
            let first = class[0];
            let mut line_of = vec![0usize; (a * a) as usize];
            for &l in class {
                for q in small.line_set(l).ones() {
                    line_of[q] = l - first;
                }
            }
            let labels: Vec<usize> = points.iter().map(|x| line_of[x.reduce(a).index(a)]).collect();
            blocks.push_partition(&labels, |_| capacity);
        }
    }
    Ok((blocks, Pencils::new(plane, other_capacity)))
}

struct Task {
    start: Vec<usize>,
    threshold: u32,
}

enum Goal<'a> {
    /// Find caps larger than the shared incumbent; stop at `ceiling`.
    Improve { best: &'a AtomicU32, best_cap: &'a Mutex<Vec<usize>>, ceiling: u32, done: &'a AtomicBool },
    /// Find the first cap of exactly `target` points in search order.
    Reach { target: u32, task: usize, first: &'a FirstFind },
}

enum Flow {
    Continue,
    Stop,
}

struct Worker<'a> {
    ctx: &'a Context,
    blocks: &'a Blocks,
    pencils: &'a Pencils,
    budget: &'a Budget,
    masks: PairMasks,
    /// One availability set per depth.
    avail: Vec<u64>,
    cap: Vec<usize>,
    cap_mask: Vec<u64>,
    filled: Vec<u8>,
    pending: u64,
    found: Option<Vec<usize>>,
}

impl<'a> Worker<'a> {
    fn new(ctx: &'a Context, blocks: &'a Blocks, pencils: &'a Pencils, budget: &'a Budget) -> Self {
        Worker {
            ctx,
            blocks,
            pencils,
            budget,
            masks: PairMasks::new(ctx, 1),
            avail: vec![0; ctx.words * (ctx.np + 2)],
            cap: Vec::new(),
            cap_mask: vec![0; ctx.words],
            filled: vec![0; blocks.num_blocks()],
            pending: 0,
            found: None,
        }
    }

    fn level(&mut self, d: usize) -> &mut [u64] {
        let w = self.ctx.words;
        &mut self.avail[d * w..(d + 1) * w]
    }

    /// Adds `p` to the cap, updating the availability set of depth `d` in place.
    fn place(&mut self, d: usize, p: usize) {
        let w = self.ctx.words;
        let (ctx, masks) = (self.ctx, &self.masks);
        let avail = &mut self.avail[d * w..(d + 1) * w];
        clear_bit(avail, p);
        for &x in &self.cap {
            masks.remove(ctx, x, p, avail);
        }
        if let Some(rc) = ctx.rowcol(p) {
            and_not(avail, rc);
        }
        self.cap.push(p);
        set_bit(&mut self.cap_mask, p);
        for &b in self.blocks.blocks_of(p) {
            self.filled[b as usize] += 1;
        }
    }

    fn unplace(&mut self) {
        let p = self.cap.pop().expect("non-empty cap");
        clear_bit(&mut self.cap_mask, p);
        for &b in self.blocks.blocks_of(p) {
            self.filled[b as usize] -= 1;
        }
    }

    /// Resets to the task's start points; false if they do not fit together.
    fn start(&mut self, task: &Task, root: &[u64]) -> bool {
        self.masks.raise(self.ctx, task.threshold);
        while !self.cap.is_empty() {
            self.unplace();
        }
        self.level(0).copy_from_slice(root);
        for &s in &task.start {
            if !test_bit(self.level(0), s) {
                return false;
            }
            self.place(0, s);
        }
        true
    }

    fn bound(&mut self) -> u32 {
        let w = self.ctx.words;
        self.cap.len() as u32 + self.blocks.room(&self.avail[..w], &self.filled)
    }

    fn admits(&self, d: usize, slack: u32) -> bool {
        let w = self.ctx.words;
        let avail = &self.avail[d * w..(d + 1) * w];
        if count(avail) < slack {
            return false;
        }
        for &x in self.cap.iter().take(3) {
            if !self.pencils.admits(self.blocks, x, avail, &self.cap_mask, &self.filled, slack) {
                return false;
            }
        }
        self.blocks.admits(avail, &self.filled, slack)
    }

    fn tick(&mut self, goal: &Goal) -> bool {
        self.pending += 1;
        if self.pending < CHECK_INTERVAL {
            return true;
        }
        let ok = self.budget.charge(self.pending);
        self.pending = 0;
        ok && match goal {
            Goal::Improve { done, .. } => !done.load(Ordering::Relaxed),
            Goal::Reach { task, first, .. } => !first.superseded(*task),
        }
    }

    fn flush(&mut self) {
        self.budget.charge(self.pending);
        self.pending = 0;
    }

    fn dfs(&mut self, d: usize, goal: &Goal) -> Flow {
        if !self.tick(goal) {
            return Flow::Stop;
        }
        let size = self.cap.len() as u32;
        match *goal {
            Goal::Improve { best, best_cap, ceiling, done } => {
                if size > best.load(Ordering::Relaxed) {
                    let mut guard = best_cap.lock().expect("incumbent lock");
                    if size as usize > guard.len() {
                        *guard = self.cap.clone();
                        best.fetch_max(size, Ordering::Relaxed);
                    }
                    if size >= ceiling {
                        done.store(true, Ordering::Relaxed);
                        return Flow::Stop;
                    }
                }
            }
            Goal::Reach { target, task, first } => {
                if size == target {
                    self.found = Some(self.cap.clone());
                    first.record(task);
                    return Flow::Stop;
                }
            }
        }
        let w = self.ctx.words;
        loop {
            let need = match *goal {
                Goal::Improve { best, .. } => best.load(Ordering::Relaxed) + 1,
                Goal::Reach { target, .. } => target,
            };
            if !self.admits(d, need - size) {
                return Flow::Continue;
            }
            let p = first_bit(self.level(d)).expect("admits needs an available point");
            clear_bit(self.level(d), p);
            self.avail.copy_within(d * w..(d + 1) * w, (d + 1) * w);
            self.place(d + 1, p);
            let flow = self.dfs(d + 1, goal);
            self.unplace();
            if let Flow::Stop = flow {
                return Flow::Stop;
            }
        }
    }
}

fn solve_max(problem: Problem, n: u32, opts: &SearchOptions) -> Result<SolveResult> {
    let min_n = if problem == Problem::M2 { 2 } else { 1 };
    if n < min_n {
        return Err(ZcapError::ModulusTooSmall { n, min: min_n });
    }
    opts.validate(n)?;
    let budget = Budget::new(opts.time_limit, opts.node_limit);
    let permutation = problem == Problem::Sigma;
    let variant = if permutation { CapVariant::Permutation } else { CapVariant::Plain };
    Cap::new(n, opts.forced_in.iter().copied(), variant)?;

    let table = build_collinearity_table(n, DEFAULT_TABLE_LIMIT)?;
    let plane = Plane::new(n)?;
    let symmetric = opts.breaks_symmetry();
    let classes = if symmetric {
        let group = if permutation { SymmetryGroup::AxisPreserving } else { SymmetryGroup::Affine };
        TripleClasses::new(group, &table)
    } else {
        TripleClasses::uniform(&table)
    };
    let ctx = Context::new(n, classes, permutation);
    let (blocks, pencils) = build_bounds(&plane, permutation, opts, &budget)?;

    let mut root = ctx.full_mask();
    and_not(&mut root, &ctx.index_mask(&opts.forced_out));
    let forced: Vec<usize> = opts.forced_in.iter().map(|p| p.index(n)).collect();
    let tasks: Vec<Task> = if symmetric {
        (1..=ctx.classes.count() as u32)
            .map(|id| Task {
                start: ctx.classes.representative(id).iter().map(|p| p.index(n)).collect(),
                threshold: id,
            })
            .collect()
    } else {
        vec![Task { start: forced.clone(), threshold: 1 }]
    };

    let mut worker = Worker::new(&ctx, &blocks, &pencils, &budget);
    worker.start(&Task { start: forced.clone(), threshold: 1 }, &root);
    let ceiling = worker.bound();
    let task_bounds: Vec<u32> = tasks.iter().map(|t| if worker.start(t, &root) { worker.bound() } else { 0 }).collect();

    // random maximal caps seed the incumbent
    let mut incumbent: Vec<usize> = Vec::new();
    for seed in 0..(32 + ctx.np as u64 / 2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Some(c) = dive(&ctx, &worker.masks, &forced, root.clone(), &mut rng) {
            if c.len() > incumbent.len() {
                incumbent = c;
            }
        }
    }
    drop(worker);
    let finish = |value: Value, status: Status, cap: &[usize]| SolveResult {
        problem,
        n,
        value,
        status,
        certificate: Some(Cap::from_indices(n, cap, variant)),
        nodes: budget.nodes(),
        elapsed: budget.elapsed(),
    };
    if incumbent.len() as u32 >= ceiling {
        return Ok(finish(Value::Exact(incumbent.len() as u32), Status::Optimal, &incumbent));
    }

    // phase 1: the optimum value
    let best = AtomicU32::new(incumbent.len() as u32);
    let best_cap = Mutex::new(incumbent.clone());
    let done = AtomicBool::new(false);
    let goal = Goal::Improve { best: &best, best_cap: &best_cap, ceiling, done: &done };
    let finished = run_tasks(
        opts.threads,
        tasks.len(),
        || Worker::new(&ctx, &blocks, &pencils, &budget),
        |w, t| {
            if task_bounds[t] <= best.load(Ordering::Relaxed) || done.load(Ordering::Relaxed) {
                return true;
            }
            if !w.start(&tasks[t], &root) {
                return true;
            }
            let flow = w.dfs(0, &goal);
            w.flush();
            matches!(flow, Flow::Continue) || done.load(Ordering::Relaxed)
        },
    );
    let value = best.load(Ordering::Relaxed);
    let phase1_cap = best_cap.into_inner().expect("incumbent lock");
    if let Some(status) = budget.exhausted() {
        let open = finished.iter().zip(&task_bounds).filter(|(f, _)| **f != Some(true)).map(|(_, &b)| b);
        let hi = open.max().unwrap_or(value).max(value).min(ceiling);
        let status = if hi == value { Status::Optimal } else { status };
        return Ok(finish(Value::new(value, hi), status, &phase1_cap));
    }

    // phase 2: the first optimal cap in task order, independent of scheduling
    if symmetric && value < 3 {
        return Ok(finish(Value::Exact(value), Status::Optimal, &incumbent));
    }
    let first = FirstFind::new();
    let found = run_tasks(
        opts.threads,
        tasks.len(),
        || Worker::new(&ctx, &blocks, &pencils, &budget),
        |w, t| {
            if task_bounds[t] < value || first.superseded(t) || !w.start(&tasks[t], &root) {
                return None;
            }
            w.found = None;
            let goal = Goal::Reach { target: value, task: t, first: &first };
            w.dfs(0, &goal);
            w.flush();
            w.found.take()
        },
    );
    let cap = found.into_iter().flatten().flatten().next().unwrap_or(phase1_cap);
    Ok(finish(Value::Exact(value), Status::Optimal, &cap))
}
