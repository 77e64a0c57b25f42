//! 0-1 integer programs for `m2`, `sigma` and `n2`, symmetry cuts, and an
//! LP-format writer.
//!
//! Point variables are named `x_u_v` (0-based residues) and indexed row-major;
//! line variables of the `n2` model are named `y_L{k}` with `k` the position
//! of the line in [`enumerate_lines`](crate::geometry::enumerate_lines) order.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Result, ZcapError};
use crate::geometry::{Plane, Point};
use crate::solvers::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

/// `sum(coefficient * variable) relation rhs`, variables by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, i64)>,
    pub relation: Relation,
    pub rhs: i64,
}

/// Symmetry-breaking and case-splitting cuts on point variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CutDescriptor {
    FixZero(Point),
    FixOne(Point),
    PairExclusion(Point, Point),
    /// The cap has more than `l` points: `sum x >= l + 1`.
    CardinalityLowerBound(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpModel {
    n: u32,
    problem: Problem,
    sense: Sense,
    variables: Vec<String>,
    objective: Vec<(usize, i64)>,
    constraints: Vec<Constraint>,
}

impl IlpModel {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn problem(&self) -> Problem {
        self.problem
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn objective(&self) -> &[(usize, i64)] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn point_variable(&self, p: Point) -> Result<usize> {
        Ok(p.check(self.n)?.index(self.n))
    }

    /// The 0-1 vector of a point set: `x` from the set, and for `n2` models
    /// `y_L = 1` exactly on lines holding at least two of the points.
    pub fn assignment_for(&self, points: &[Point]) -> Result<Vec<bool>> {
        let mut values = vec![false; self.num_variables()];
        for &p in points {
            values[self.point_variable(p)?] = true;
        }
        if self.problem == Problem::N2 {
            let plane = Plane::new(self.n)?;
            let set = plane.index_set(points)?;
            let np = plane.num_points();
            for k in 0..plane.lines().len() {
                values[np + k] = plane.line_set(k).intersection_count(&set) >= 2;
            }
        }
        Ok(values)
    }

    /// Feasibility and objective of a 0-1 vector indexed like [`variables`](Self::variables).
    pub fn evaluate(&self, values: &[bool]) -> Result<Evaluation> {
        if values.len() != self.variables.len() {
            let missing = self.variables.get(values.len()).cloned().unwrap_or_default();
            return Err(ZcapError::MissingVariable(missing));
        }
        let value =
            |terms: &[(usize, i64)]| -> i64 { terms.iter().filter(|&&(v, _)| values[v]).map(|&(_, c)| c).sum() };
        let violated = self.constraints.iter().find(|c| !c.relation.holds(value(&c.terms), c.rhs));
        Ok(Evaluation {
            feasible: violated.is_none(),
            objective: value(&self.objective),
            violated: violated.map(|c| c.name.clone()),
        })
    }

    fn push(&mut self, name: String, terms: Vec<(usize, i64)>, relation: Relation, rhs: i64) {
        self.constraints.push(Constraint { name, terms, relation, rhs });
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub feasible: bool,
    pub objective: i64,
    /// Name of the first violated constraint, if any.
    pub violated: Option<String>,
}

/// Builds the model for `problem` over `Z_n^2`.
///
/// * `m2`: maximize `sum x` subject to `sum_{P in L} x_P <= 2` for every line.
/// * `sigma`: additionally at most one point per row and per column.
/// * `n2`: minimize `sum x` with line indicators `y_L`, the per-line `<= 2`
///   constraints, `sum_{P in L} x_P - 2 y_L >= 0`, and
///   `x_P + sum_{L through P} y_L >= 1` for every point.
pub fn build_model(problem: Problem, n: u32) -> Result<IlpModel> {
    let plane = Plane::new(n)?;
    Ok(build_model_in(problem, &plane))
}

pub fn build_model_in(problem: Problem, plane: &Plane) -> IlpModel {
    let n = plane.n();
    let np = plane.num_points();
    let mut variables: Vec<String> = (0..np)
        .map(|i| {
            let p = Point::from_index(i, n);
            format!("x_{}_{}", p.u, p.v)
        })
        .collect();
    let sense = if problem == Problem::N2 { Sense::Minimize } else { Sense::Maximize };
    let objective = (0..np).map(|i| (i, 1)).collect();
    let line_terms = |k: usize| -> Vec<(usize, i64)> { plane.line_set(k).ones().map(|i| (i, 1)).collect() };
    let num_lines = plane.lines().len();
    if problem == Problem::N2 {
        variables.extend((0..num_lines).map(|k| format!("y_L{k}")));
    }
    let mut model = IlpModel { n, problem, sense, variables, objective, constraints: Vec::new() };
    for k in 0..num_lines {
        model.push(format!("capL{k}"), line_terms(k), Relation::Le, 2);
    }
    match problem {
        Problem::M2 => {}
        Problem::Sigma => {
            for v in 0..n {
                let terms = (0..n).map(|u| (Point::new(u, v).index(n), 1)).collect();
                model.push(format!("row{v}"), terms, Relation::Le, 1);
            }
            for u in 0..n {
                let terms = (0..n).map(|v| (Point::new(u, v).index(n), 1)).collect();
                model.push(format!("col{u}"), terms, Relation::Le, 1);
            }
        }
        Problem::N2 => {
            for k in 0..num_lines {
                let mut terms = line_terms(k);
                terms.push((np + k, -2));
                model.push(format!("useL{k}"), terms, Relation::Ge, 0);
            }
            for i in 0..np {
                let p = Point::from_index(i, n);
                let mut terms = vec![(i, 1)];
                terms.extend(plane.lines_through_index(i).iter().map(|&k| (np + k as usize, 1)));
                model.push(format!("cover_{}_{}", p.u, p.v), terms, Relation::Ge, 1);
            }
        }
    }
    model
}

/// Appends the constraints of `cuts` to a copy of `model`.
pub fn apply_cuts(model: &IlpModel, cuts: &[CutDescriptor]) -> Result<IlpModel> {
    let n = model.n;
    let mut out = model.clone();
    let mut fixed: BTreeMap<usize, bool> = BTreeMap::new();
    for c in &model.constraints {
        if let ([(v, 1)], Relation::Eq) = (c.terms.as_slice(), c.relation) {
            fixed.insert(*v, c.rhs == 1);
        }
    }
    let mut fix = |out: &mut IlpModel, p: Point, value: bool| -> Result<()> {
        let v = out.point_variable(p)?;
        match fixed.insert(v, value) {
            Some(old) if old != value => return Err(ZcapError::ConflictingFix(p.to_string())),
            Some(_) => {}
            None => out.push(format!("fix{}_{}_{}", value as u8, p.u, p.v), vec![(v, 1)], Relation::Eq, value as i64),
        }
        Ok(())
    };
    for cut in cuts {
        match *cut {
            CutDescriptor::FixZero(p) => fix(&mut out, p, false)?,
            CutDescriptor::FixOne(p) => fix(&mut out, p, true)?,
            CutDescriptor::PairExclusion(a, b) => {
                let (va, vb) = (out.point_variable(a)?, out.point_variable(b)?);
                out.push(format!("pair_{}_{}_{}_{}", a.u, a.v, b.u, b.v), vec![(va, 1), (vb, 1)], Relation::Le, 1);
            }
            CutDescriptor::CardinalityLowerBound(l) => {
                let terms = (0..(n * n) as usize).map(|i| (i, 1)).collect();
                out.push(format!("card{}", l + 1), terms, Relation::Ge, l as i64 + 1);
            }
        }
    }
    Ok(out)
}

/// Evaluates an assignment given by variable name.
pub fn evaluate_assignment(model: &IlpModel, assignment: &HashMap<String, bool>) -> Result<Evaluation> {
    if let Some(extra) = assignment.keys().find(|k| !model.variables.contains(k)) {
        return Err(ZcapError::UnknownVariable(extra.clone()));
    }
    let values = model
        .variables
        .iter()
        .map(|name| assignment.get(name).copied().ok_or_else(|| ZcapError::MissingVariable(name.clone())))
        .collect::<Result<Vec<bool>>>()?;
    model.evaluate(&values)
}

const TERMS_PER_LINE: usize = 12;

fn write_expression(out: &mut String, model: &IlpModel, terms: &[(usize, i64)]) {
    for (k, &(v, c)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c < 0 { '-' } else { '+' };
        if k > 0 || c < 0 {
            out.push(' ');
            out.push(sign);
        }
        let name = &model.variables[v];
        match c.abs() {
            1 => write!(out, " {name}").unwrap(),
            a => write!(out, " {a} {name}").unwrap(),
        }
    }
}

/// Serializes `model` in LP format. The output depends only on the model.
pub fn to_lp_string(model: &IlpModel) -> String {
    let mut out = String::new();
    writeln!(out, "\\ {} over Z_{}^2", model.problem, model.n).unwrap();
    out.push_str(match model.sense {
        Sense::Maximize => "Maximize\n",
        Sense::Minimize => "Minimize\n",
    });
    out.push_str(" obj:");
    write_expression(&mut out, model, &model.objective);
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        write!(out, " {}:", c.name).unwrap();
        write_expression(&mut out, model, &c.terms);
        writeln!(out, " {} {}", c.relation.symbol(), c.rhs).unwrap();
    }
    out.push_str("Binaries\n");
    for chunk in model.variables.chunks(TERMS_PER_LINE) {
        writeln!(out, " {}", chunk.join(" ")).unwrap();
    }
    out.push_str("End\n");
    out
}

pub fn write_lp(model: &IlpModel, mut dest: impl Write) -> std::io::Result<()> {
    dest.write_all(to_lp_string(model).as_bytes())
}

pub fn write_lp_file(model: &IlpModel, path: &Path) -> Result<()> {
    let io = |source| ZcapError::Io { path: path.to_path_buf(), source };
    let file = std::fs::File::create(path).map_err(io)?;
    let mut w = std::io::BufWriter::new(file);
    write_lp(model, &mut w).map_err(io)?;
    w.flush().map_err(io)
}

/// Exhaustive 0-1 search with activity bounds, for models with a few dozen
/// variables. Returns an optimal assignment, or `None` when infeasible.
///
/// Gives up with [`ZcapError::ResourceLimit`] after `node_limit` nodes.
pub fn solve_exhaustive(model: &IlpModel, node_limit: u64) -> Result<Option<(i64, Vec<bool>)>> {
    let nv = model.num_variables();
    let mut by_var: Vec<Vec<(usize, i64)>> = vec![Vec::new(); nv];
    let mut lo = Vec::with_capacity(model.constraints.len());
    let mut hi = Vec::with_capacity(model.constraints.len());
    for (ci, c) in model.constraints.iter().enumerate() {
        for &(v, coef) in &c.terms {
            by_var[v].push((ci, coef));
        }
        lo.push(c.terms.iter().map(|t| t.1.min(0)).sum::<i64>());
        hi.push(c.terms.iter().map(|t| t.1.max(0)).sum::<i64>());
    }
    let mut obj = vec![0i64; nv];
    for &(v, c) in &model.objective {
        obj[v] += c;
    }
    let sign = if model.sense == Sense::Maximize { 1 } else { -1 };
    let mut search = Exhaustive {
        model,
        by_var,
        lo,
        hi,
        obj: obj.iter().map(|c| c * sign).collect(),
        values: vec![false; nv],
        best: None,
        nodes: 0,
        node_limit,
    };
    let optimistic: i64 = search.obj.iter().map(|&c| c.max(0)).sum();
    search.run(0, 0, optimistic)?;
    Ok(search.best.map(|(v, x)| (v * sign, x)))
}

struct Exhaustive<'a> {
    model: &'a IlpModel,
    by_var: Vec<Vec<(usize, i64)>>,
    /// Smallest and largest activity still reachable per constraint.
    lo: Vec<i64>,
    hi: Vec<i64>,
    obj: Vec<i64>,
    values: Vec<bool>,
    best: Option<(i64, Vec<bool>)>,
    nodes: u64,
    node_limit: u64,
}

impl Exhaustive<'_> {
    fn feasible(&self, ci: usize) -> bool {
        let c = &self.model.constraints[ci];
        match c.relation {
            Relation::Le => self.lo[ci] <= c.rhs,
            Relation::Ge => self.hi[ci] >= c.rhs,
            Relation::Eq => self.lo[ci] <= c.rhs && self.hi[ci] >= c.rhs,
        }
    }

    /// Fixes variable `v`; returns whether all its constraints stay satisfiable.
    fn set(&mut self, v: usize, value: bool) -> bool {
        let mut ok = true;
        for k in 0..self.by_var[v].len() {
            let (ci, coef) = self.by_var[v][k];
            if value {
                self.lo[ci] += coef.max(0);
                self.hi[ci] += coef.min(0);
            } else {
                self.lo[ci] -= coef.min(0);
                self.hi[ci] -= coef.max(0);
            }
            ok &= self.feasible(ci);
        }
        ok
    }

    fn unset(&mut self, v: usize, value: bool) {
        for k in 0..self.by_var[v].len() {
            let (ci, coef) = self.by_var[v][k];
            if value {
                self.lo[ci] -= coef.max(0);
                self.hi[ci] -= coef.min(0);
            } else {
                self.lo[ci] += coef.min(0);
                self.hi[ci] += coef.max(0);
            }
        }
    }

    fn run(&mut self, v: usize, current: i64, optimistic: i64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(ZcapError::ResourceLimit(format!("exhaustive 0-1 search exceeded {} nodes", self.node_limit)));
        }
        if self.best.as_ref().is_some_and(|(b, _)| optimistic <= *b) {
            return Ok(());
        }
        if v == self.values.len() {
            self.best = Some((current, self.values.clone()));
            return Ok(());
        }
        let gain = self.obj[v];
        let rest = optimistic - gain.max(0);
        for value in [true, false] {
            self.values[v] = value;
            if self.set(v, value) {
                let (cur, opt) = if value { (current + gain, rest + gain) } else { (current, rest) };
                self.run(v + 1, cur, opt.max(cur))?;
            }
            self.unset(v, value);
        }
        self.values[v] = false;
        Ok(())
    }
}
