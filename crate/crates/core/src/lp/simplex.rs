//! Exact simplex for linear programs whose constraint rows have at most two
//! non-zero coefficients.
//!
//! The program is `maximize c.x subject to a_r.x <= b_r` for every row `r`,
//! with `b_r >= 0` so the origin is feasible. Non-negativity is expressed as
//! explicit rows `-x_v <= 0`, which also form the starting basis.
//!
//! A basis is a set of `n` tight rows whose coefficient matrix `B` is
//! non-singular. Because every row touches at most two variables, `B` is the
//! incidence structure of a pseudo-forest: variables are nodes, two-term rows
//! are edges and one-term rows are roots. Every connected component of a
//! non-singular basis carries exactly one root or one cycle, so both
//! `B x = r` and `B^T y = c` are solved by leaf elimination plus one
//! parametrised walk around each cycle, in linear time.
//!
//! The pivoting loop is generic over the scalar. [`PairLp::solve_hybrid`]
//! pivots in `f64` to locate a candidate basis, then certifies it in exact
//! arithmetic and resumes exact pivoting from it if the certificate fails.

use std::collections::VecDeque;
use std::fmt::Debug;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub terms: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

impl Row {
    pub fn dot(&self, x: &[Rational]) -> Rational {
        self.terms
            .iter()
            .fold(Rational::zero(), |acc, (v, a)| acc + a * &x[*v])
    }
}

#[derive(Clone, Debug)]
pub struct PairLp {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub rows: Vec<Row>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest eligible index for both the entering and the leaving row.
    #[default]
    Bland,
    /// Most negative multiplier, falling back to Bland's rule after a run of
    /// degenerate pivots.
    Dantzig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SolveMethod {
    /// Rational pivoting throughout.
    Exact(PivotRule),
    /// Floating-point pivoting, exact certification, exact repair.
    #[default]
    Hybrid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    pub objective: Rational,
    /// Tight rows defining the optimal vertex, sorted.
    pub basis: Vec<usize>,
    /// Multiplier of each basis row, aligned with `basis`; all non-negative
    /// and `sum y_r a_r = c`, so `sum y_r b_r` equals `objective`.
    pub multipliers: Vec<Rational>,
    pub pivots: usize,
}

impl LpSolution {
    pub fn dual_value(&self, lp: &PairLp) -> Rational {
        self.basis
            .iter()
            .zip(&self.multipliers)
            .fold(Rational::zero(), |acc, (&r, y)| acc + y * &lp.rows[r].rhs)
    }
}

const DEGENERATE_STREAK: usize = 50;

/// Scalar operations needed by the pivoting loop.
pub(crate) trait Scalar: Clone + Debug + PartialOrd {
    fn nil() -> Self;
    fn unit() -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn over(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn near_zero(&self) -> bool;
    fn below_zero(&self) -> bool;
    fn above_zero(&self) -> bool;
    /// `self` and `o` are equal up to rounding.
    fn ties(&self, o: &Self) -> bool;
}

impl Scalar for Rational {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn near_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn below_zero(&self) -> bool {
        Signed::is_negative(self)
    }
    fn above_zero(&self) -> bool {
        Signed::is_positive(self)
    }
    fn ties(&self, o: &Self) -> bool {
        self == o
    }
}

const EPS: f64 = 1e-9;

impl Scalar for f64 {
    fn nil() -> Self {
        0.0
    }
    fn unit() -> Self {
        1.0
    }
    fn from_rational(q: &Rational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn near_zero(&self) -> bool {
        self.abs() < EPS
    }
    fn below_zero(&self) -> bool {
        *self < -EPS
    }
    fn above_zero(&self) -> bool {
        *self > EPS
    }
    fn ties(&self, o: &Self) -> bool {
        (self - o).abs() < EPS
    }
}

#[derive(Clone, Debug)]
struct NumRow<T> {
    terms: Vec<(usize, T)>,
    rhs: T,
}

impl<T: Scalar> NumRow<T> {
    fn dot(&self, x: &[T]) -> T {
        self.terms
            .iter()
            .fold(T::nil(), |acc, (v, a)| acc.plus(&a.times(&x[*v])))
    }
}

/// Outcome of the generic pivoting loop.
struct Run<T> {
    basis: Vec<usize>,
    y: Vec<T>,
    pivots: usize,
}

impl PairLp {
    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars {
            return Err(Error::pre("objective length differs from variable count"));
        }
        for (i, r) in self.rows.iter().enumerate() {
            let bad = |m: &str| Error::pre(format!("row {i}: {m}"));
            if r.terms.is_empty() || r.terms.len() > 2 {
                return Err(bad("needs one or two terms"));
            }
            if r.terms
                .iter()
                .any(|(v, a)| *v >= self.num_vars || a.is_zero())
            {
                return Err(bad("bad variable index or zero coefficient"));
            }
            if r.terms.len() == 2 && r.terms[0].0 == r.terms[1].0 {
                return Err(bad("repeated variable"));
            }
            if r.rhs.is_negative() {
                return Err(bad("negative right-hand side"));
            }
        }
        Ok(())
    }

    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(x)
            .fold(Rational::zero(), |acc, (c, v)| acc + c * v)
    }

    /// First violated row, if any.
    pub fn first_violation(&self, x: &[Rational]) -> Option<usize> {
        self.rows.iter().position(|r| r.dot(x) > r.rhs)
    }

    fn nonneg_rows(&self) -> Result<Vec<usize>> {
        let mut slot = vec![None; self.num_vars];
        for (i, r) in self.rows.iter().enumerate() {
            if let [(v, a)] = r.terms.as_slice() {
                if *a == -Rational::one() && r.rhs.is_zero() && slot[*v].is_none() {
                    slot[*v] = Some(i);
                }
            }
        }
        slot.into_iter()
            .enumerate()
            .map(|(v, s)| s.ok_or_else(|| Error::pre(format!("no row -x_{v} <= 0"))))
            .collect()
    }

    fn numeric<T: Scalar>(&self) -> (Vec<NumRow<T>>, Vec<T>) {
        let rows = self
            .rows
            .iter()
            .map(|r| NumRow {
                terms: r
                    .terms
                    .iter()
                    .map(|(v, a)| (*v, T::from_rational(a)))
                    .collect(),
                rhs: T::from_rational(&r.rhs),
            })
            .collect();
        let c = self.objective.iter().map(T::from_rational).collect();
        (rows, c)
    }

    /// Recomputes the vertex and multipliers of `basis` from scratch and
    /// checks primal feasibility, dual feasibility and equal objectives.
    pub fn certify_basis(&self, basis: &[usize]) -> Result<LpSolution> {
        self.validate()?;
        let mut basis = basis.to_vec();
        basis.sort_unstable();
        basis.dedup();
        if basis.len() != self.num_vars || basis.iter().any(|&r| r >= self.rows.len()) {
            return Err(Error::Verification("basis has the wrong shape".into()));
        }
        let (rows, c) = self.numeric::<Rational>();
        let sys = PairSystem::new(self.num_vars, &rows, &basis);
        let rhs: Vec<Rational> = basis.iter().map(|&r| self.rows[r].rhs.clone()).collect();
        let x = sys.solve_primal(&rhs)?;
        if let Some(r) = self.first_violation(&x) {
            return Err(Error::Verification(format!("basic point violates row {r}")));
        }
        let y = sys.solve_dual(&c)?;
        if y.iter().any(Signed::is_negative) {
            return Err(Error::Verification("negative multiplier".into()));
        }
        let sol = LpSolution {
            objective: self.objective_at(&x),
            x,
            basis,
            multipliers: y,
            pivots: 0,
        };
        if sol.dual_value(self) != sol.objective {
            return Err(Error::Verification("primal and dual values differ".into()));
        }
        Ok(sol)
    }

    pub fn solve_with(&self, method: SolveMethod) -> Result<LpSolution> {
        match method {
            SolveMethod::Exact(rule) => self.solve(rule),
            SolveMethod::Hybrid => self.solve_hybrid(),
        }
    }

    /// Exact simplex from the origin.
    pub fn solve(&self, rule: PivotRule) -> Result<LpSolution> {
        self.validate()?;
        let start = self.nonneg_rows()?;
        self.solve_exact_from(start, rule, 0)
    }

    /// Floating-point pivoting to a candidate basis, then exact
    /// certification. A failed certificate resumes exact pivoting from the
    /// candidate when it is exactly feasible, and from the origin otherwise.
    pub fn solve_hybrid(&self) -> Result<LpSolution> {
        self.validate()?;
        let start = self.nonneg_rows()?;
        let (rows, c) = self.numeric::<f64>();
        let limit = 20 * self.rows.len() + 1000;
        let run = match pivot_loop(
            self.num_vars,
            &rows,
            &c,
            start.clone(),
            PivotRule::Dantzig,
            limit,
        ) {
            Ok(r) => r,
            Err(Error::Unbounded) => return self.solve(PivotRule::Dantzig),
            Err(_) => return self.solve_exact_from(start, PivotRule::Dantzig, 0),
        };
        match self.certify_basis(&run.basis) {
            Ok(mut sol) => {
                sol.pivots = run.pivots;
                Ok(sol)
            }
            Err(_) => {
                let exact_start = self.feasible_basis(&run.basis).unwrap_or(start);
                self.solve_exact_from(exact_start, PivotRule::Dantzig, run.pivots)
            }
        }
    }

    fn feasible_basis(&self, basis: &[usize]) -> Option<Vec<usize>> {
        let (rows, _) = self.numeric::<Rational>();
        let sys = PairSystem::new(self.num_vars, &rows, basis);
        let rhs: Vec<Rational> = basis.iter().map(|&r| self.rows[r].rhs.clone()).collect();
        let x = sys.solve_primal(&rhs).ok()?;
        self.first_violation(&x).is_none().then(|| basis.to_vec())
    }

    fn solve_exact_from(
        &self,
        start: Vec<usize>,
        rule: PivotRule,
        prior: usize,
    ) -> Result<LpSolution> {
        let (rows, c) = self.numeric::<Rational>();
        let run = pivot_loop(self.num_vars, &rows, &c, start, rule, usize::MAX)?;
        let sys = PairSystem::new(self.num_vars, &rows, &run.basis);
        let rhs: Vec<Rational> = run
            .basis
            .iter()
            .map(|&r| self.rows[r].rhs.clone())
            .collect();
        let x = sys.solve_primal(&rhs)?;
        let mut order: Vec<usize> = (0..self.num_vars).collect();
        order.sort_by_key(|&s| run.basis[s]);
        Ok(LpSolution {
            objective: self.objective_at(&x),
            basis: order.iter().map(|&s| run.basis[s]).collect(),
            multipliers: order.iter().map(|&s| run.y[s].clone()).collect(),
            x,
            pivots: prior + run.pivots,
        })
    }
}

/// Primal simplex from a primal-feasible basis.
fn pivot_loop<T: Scalar>(
    n: usize,
    rows: &[NumRow<T>],
    c: &[T],
    mut basis: Vec<usize>,
    rule: PivotRule,
    limit: usize,
) -> Result<Run<T>> {
    let m = rows.len();
    let mut in_basis = vec![false; m];
    for &r in &basis {
        in_basis[r] = true;
    }
    let mut var_rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, r) in rows.iter().enumerate() {
        for (v, _) in &r.terms {
            var_rows[*v].push(i);
        }
    }
    let x = {
        let sys = PairSystem::new(n, rows, &basis);
        let rhs: Vec<T> = basis.iter().map(|&r| rows[r].rhs.clone()).collect();
        sys.solve_primal(&rhs)?
    };
    let mut slack: Vec<T> = rows.iter().map(|r| r.rhs.minus(&r.dot(&x))).collect();
    for &r in &basis {
        slack[r] = T::nil();
    }
    let mut stamp = vec![usize::MAX; m];
    let mut pivots = 0usize;
    let mut degenerate_run = 0usize;

    loop {
        if pivots >= limit {
            return Err(Error::Verification("pivot limit reached".into()));
        }
        let sys = PairSystem::new(n, rows, &basis);
        let y = sys.solve_dual(c)?;
        let use_bland = rule == PivotRule::Bland || degenerate_run >= DEGENERATE_STREAK;
        let eligible = (0..n).filter(|&s| y[s].below_zero());
        let enter = if use_bland {
            eligible.min_by_key(|&s| basis[s])
        } else {
            eligible.min_by(|&a, &b| {
                y[a].partial_cmp(&y[b])
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(basis[a].cmp(&basis[b]))
            })
        };
        let Some(slot) = enter else {
            return Ok(Run { basis, y, pivots });
        };

        let mut e = vec![T::nil(); n];
        e[slot] = T::unit().negated();
        let d = sys.solve_primal(&e)?;

        // Ratio test over rows touching the support of d.
        let mut touched: Vec<(usize, T)> = Vec::new();
        let mut best: Option<(T, usize)> = None;
        for v in (0..n).filter(|&v| !d[v].near_zero()) {
            for &r in &var_rows[v] {
                if stamp[r] == pivots {
                    continue;
                }
                stamp[r] = pivots;
                let ad = rows[r].dot(&d);
                if ad.near_zero() {
                    continue;
                }
                if ad.above_zero() && !in_basis[r] {
                    let s = if slack[r].below_zero() || slack[r].near_zero() {
                        T::nil()
                    } else {
                        slack[r].clone()
                    };
                    let t = s.over(&ad);
                    let better = match &best {
                        None => true,
                        Some((bt, br)) => {
                            if t.ties(bt) {
                                r < *br
                            } else {
                                t < *bt
                            }
                        }
                    };
                    if better {
                        best = Some((t, r));
                    }
                }
                touched.push((r, ad));
            }
        }
        let (t, leave_row) = best.ok_or(Error::Unbounded)?;
        if t.near_zero() {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
            for (r, ad) in &touched {
                slack[*r] = slack[*r].minus(&t.times(ad));
            }
        }
        slack[leave_row] = T::nil();
        in_basis[basis[slot]] = false;
        in_basis[leave_row] = true;
        basis[slot] = leave_row;
        pivots += 1;
    }
}

/// Affine value `p + q t` in one cycle parameter.
#[derive(Clone, Debug)]
struct Affine<T> {
    p: T,
    q: T,
}

impl<T: Scalar> Affine<T> {
    fn param() -> Self {
        Affine {
            p: T::nil(),
            q: T::unit(),
        }
    }

    fn eval(&self, t: &T) -> T {
        self.p.plus(&self.q.times(t))
    }
}

/// The basis rows viewed as a pseudo-forest.
struct PairSystem<'a, T> {
    n: usize,
    rows: Vec<&'a NumRow<T>>,
    /// For each variable, the basis slots containing it.
    incident: Vec<Vec<usize>>,
}

impl<'a, T: Scalar> PairSystem<'a, T> {
    fn new(n: usize, all: &'a [NumRow<T>], basis: &[usize]) -> Self {
        let rows: Vec<&NumRow<T>> = basis.iter().map(|&r| &all[r]).collect();
        let mut incident = vec![Vec::new(); n];
        for (s, r) in rows.iter().enumerate() {
            for (v, _) in &r.terms {
                incident[*v].push(s);
            }
        }
        PairSystem { n, rows, incident }
    }

    fn coef(&self, slot: usize, var: usize) -> &T {
        &self.rows[slot]
            .terms
            .iter()
            .find(|(v, _)| *v == var)
            .expect("variable occurs in slot")
            .1
    }

    fn other_var(&self, slot: usize, var: usize) -> Option<usize> {
        self.rows[slot]
            .terms
            .iter()
            .map(|(v, _)| *v)
            .find(|&v| v != var)
    }

    /// Solves `B z = rhs` (one unknown per variable, one equation per slot).
    fn solve_primal(&self, rhs: &[T]) -> Result<Vec<T>> {
        let n = self.n;
        if self.rows.len() != n {
            return Err(Error::SingularBasis);
        }
        let mut val: Vec<Option<T>> = vec![None; n];
        let mut resid: Vec<T> = rhs.to_vec();
        let mut unknown: Vec<usize> = self.rows.iter().map(|r| r.terms.len()).collect();
        let mut used = vec![false; n];

        // Rows with a single unknown fix that unknown.
        let mut queue: VecDeque<usize> = (0..n).filter(|&s| unknown[s] == 1).collect();
        while let Some(s) = queue.pop_front() {
            if used[s] {
                continue;
            }
            let (v, a) = self.rows[s]
                .terms
                .iter()
                .find(|(v, _)| val[*v].is_none())
                .ok_or(Error::SingularBasis)?;
            used[s] = true;
            let z = resid[s].over(a);
            for &s2 in &self.incident[*v] {
                if s2 == s {
                    continue;
                }
                resid[s2] = resid[s2].minus(&self.coef(s2, *v).times(&z));
                unknown[s2] -= 1;
                match unknown[s2] {
                    1 => queue.push_back(s2),
                    0 if !used[s2] => return Err(Error::SingularBasis),
                    _ => {}
                }
            }
            val[*v] = Some(z);
        }

        // Peel leaf variables; they are recovered in reverse order.
        let mut degree: Vec<usize> = (0..n)
            .map(|v| self.incident[v].iter().filter(|&&s| !used[s]).count())
            .collect();
        for v in 0..n {
            if val[v].is_none() && degree[v] == 0 {
                return Err(Error::SingularBasis);
            }
        }
        let mut peeled: Vec<(usize, usize)> = Vec::new();
        let mut leaves: Vec<usize> = (0..n)
            .filter(|&v| val[v].is_none() && degree[v] == 1)
            .collect();
        while let Some(v) = leaves.pop() {
            if degree[v] != 1 {
                continue;
            }
            let s = *self.incident[v]
                .iter()
                .find(|&&s| !used[s])
                .expect("degree one");
            used[s] = true;
            degree[v] = 0;
            peeled.push((v, s));
            let u = self.other_var(s, v).ok_or(Error::SingularBasis)?;
            degree[u] -= 1;
            if degree[u] == 1 {
                leaves.push(u);
            } else if degree[u] == 0 {
                return Err(Error::SingularBasis);
            }
        }

        // What remains is a disjoint union of cycles.
        for start in 0..n {
            if val[start].is_some() || degree[start] == 0 {
                continue;
            }
            if degree[start] != 2 {
                return Err(Error::SingularBasis);
            }
            let mut path: Vec<(usize, Affine<T>)> = vec![(start, Affine::param())];
            let mut cur = start;
            let mut cur_val = Affine::param();
            let mut slot = *self.incident[start]
                .iter()
                .find(|&&s| !used[s])
                .expect("degree two");
            let t = loop {
                used[slot] = true;
                let next = self.other_var(slot, cur).ok_or(Error::SingularBasis)?;
                let (a_cur, a_next) = (self.coef(slot, cur), self.coef(slot, next));
                if next == start {
                    // a_cur (p + q t) + a_next t = resid
                    let lin = a_cur.times(&cur_val.q).plus(a_next);
                    if lin.near_zero() {
                        return Err(Error::SingularBasis);
                    }
                    break resid[slot].minus(&a_cur.times(&cur_val.p)).over(&lin);
                }
                let next_val = Affine {
                    p: resid[slot].minus(&a_cur.times(&cur_val.p)).over(a_next),
                    q: a_cur.times(&cur_val.q).negated().over(a_next),
                };
                degree[next] = 0;
                path.push((next, next_val.clone()));
                slot = *self.incident[next]
                    .iter()
                    .find(|&&s| !used[s])
                    .ok_or(Error::SingularBasis)?;
                cur = next;
                cur_val = next_val;
            };
            degree[start] = 0;
            for (v, aff) in path {
                val[v] = Some(aff.eval(&t));
            }
        }

        for (v, s) in peeled.into_iter().rev() {
            let u = self.other_var(s, v).expect("two-term row");
            let uv = val[u].as_ref().ok_or(Error::SingularBasis)?;
            let z = resid[s]
                .minus(&self.coef(s, u).times(uv))
                .over(self.coef(s, v));
            val[v] = Some(z);
        }
        val.into_iter()
            .map(|z| z.ok_or(Error::SingularBasis))
            .collect()
    }

    /// Solves `B^T y = c` (one unknown per slot, one equation per variable).
    fn solve_dual(&self, c: &[T]) -> Result<Vec<T>> {
        let n = self.n;
        let mut y: Vec<Option<T>> = vec![None; n];
        let mut resid: Vec<T> = c.to_vec();
        let mut unknown: Vec<usize> = (0..n).map(|v| self.incident[v].len()).collect();
        let mut used = vec![false; n];

        if unknown.contains(&0) {
            return Err(Error::SingularBasis);
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| unknown[v] == 1).collect();
        while let Some(v) = queue.pop_front() {
            if used[v] {
                continue;
            }
            let s = *self.incident[v]
                .iter()
                .find(|&&s| y[s].is_none())
                .ok_or(Error::SingularBasis)?;
            used[v] = true;
            let ys = resid[v].over(self.coef(s, v));
            if let Some(u) = self.other_var(s, v) {
                resid[u] = resid[u].minus(&self.coef(s, u).times(&ys));
                unknown[u] -= 1;
                match unknown[u] {
                    1 => queue.push_back(u),
                    0 if !used[u] => return Err(Error::SingularBasis),
                    _ => {}
                }
            }
            y[s] = Some(ys);
        }

        // Remaining slots form cycles where each variable has two open slots.
        let mut pending = vec![false; n];
        for s0 in 0..n {
            if y[s0].is_some() {
                continue;
            }
            let terms = &self.rows[s0].terms;
            if terms.len() != 2 {
                return Err(Error::SingularBasis);
            }
            let (first, last) = (terms[0].0, terms[1].0);
            let mut vals: Vec<(usize, Affine<T>)> = vec![(s0, Affine::param())];
            pending[s0] = true;
            let mut cur_slot = s0;
            let mut cur_val = Affine::param();
            let mut v = first;
            let t = loop {
                if used[v] || unknown[v] != 2 {
                    return Err(Error::SingularBasis);
                }
                used[v] = true;
                let next_slot = *self.incident[v]
                    .iter()
                    .find(|&&s| s != cur_slot && y[s].is_none() && !pending[s])
                    .ok_or(Error::SingularBasis)?;
                let (a_cur, a_next) = (self.coef(cur_slot, v), self.coef(next_slot, v));
                let next_val = Affine {
                    p: resid[v].minus(&a_cur.times(&cur_val.p)).over(a_next),
                    q: a_cur.times(&cur_val.q).negated().over(a_next),
                };
                let w = self.other_var(next_slot, v).ok_or(Error::SingularBasis)?;
                pending[next_slot] = true;
                if w == last {
                    if used[w] || unknown[w] != 2 {
                        return Err(Error::SingularBasis);
                    }
                    used[w] = true;
                    // a_s0 t + a_next (p + q t) = resid[w]
                    let (a0, an) = (self.coef(s0, w), self.coef(next_slot, w));
                    let lin = a0.plus(&an.times(&next_val.q));
                    if lin.near_zero() {
                        return Err(Error::SingularBasis);
                    }
                    let t = resid[w].minus(&an.times(&next_val.p)).over(&lin);
                    vals.push((next_slot, next_val));
                    break t;
                }
                vals.push((next_slot, next_val.clone()));
                cur_slot = next_slot;
                cur_val = next_val;
                v = w;
            };
            for (s, aff) in vals {
                y[s] = Some(aff.eval(&t));
            }
        }
        y.into_iter()
            .map(|z| z.ok_or(Error::SingularBasis))
            .collect()
    }
}
