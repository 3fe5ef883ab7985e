//! Two-phase revised simplex with Bland's rule.
//!
//! Generic over the scalar: `f64` with fixed tolerances, or `BigRational`
//! for exact answers on small instances. The basis inverse is kept dense,
//! so the cost per pivot is quadratic in the number of rows and linear in
//! the number of columns. Columns are stored sparsely.

use std::fmt::Debug;

use num::{BigRational, Signed, Zero};

use crate::error::{Error, Result};

pub trait LpScalar: Clone + Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_zero_val(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
    fn less(&self, o: &Self) -> bool;
}

const EPS: f64 = 1e-10;

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_pos(&self) -> bool {
        *self > EPS
    }
    fn is_neg(&self) -> bool {
        *self < -EPS
    }
    fn less(&self, o: &Self) -> bool {
        *self < *o - EPS
    }
}

impl LpScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num::One::one()
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite coefficient")
    }
    fn to_f64(&self) -> f64 {
        num::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn less(&self, o: &Self) -> bool {
        self < o
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// `opt c^T x` subject to `A x (rel) b`, `x >= 0`.
#[derive(Clone, Debug)]
pub struct LpProblem<T> {
    pub sense: Sense,
    pub objective: Vec<T>,
    /// Sparse columns of `A`: `(row, value)` pairs.
    pub columns: Vec<Vec<(usize, T)>>,
    pub relations: Vec<Relation>,
    pub rhs: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    /// Shadow prices `d objective / d rhs_i`; `sum_i rhs_i * duals_i`
    /// equals the objective at the optimum.
    pub duals: Vec<T>,
    /// Basic column per row of the standard form; structural columns come
    /// first, then slack/surplus, then artificial.
    pub basis: Vec<usize>,
    pub iterations: usize,
}

impl<T: LpScalar> LpProblem<T> {
    pub fn new(sense: Sense, objective: Vec<T>, rows: usize) -> Self {
        LpProblem {
            sense,
            columns: vec![Vec::new(); objective.len()],
            objective,
            relations: vec![Relation::Le; rows],
            rhs: vec![T::zero(); rows],
        }
    }

    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn solve(&self) -> Result<LpSolution<T>> {
        Simplex::build(self)?.run(self)
    }

    /// `|c^T x - b^T y|`, plus the worst violation of dual feasibility.
    pub fn certificate(&self, sol: &LpSolution<T>) -> (f64, f64) {
        let primal = sol.objective.to_f64();
        let dual: f64 = self.rhs.iter().zip(&sol.duals).map(|(b, y)| b.to_f64() * y.to_f64()).sum();
        let sign = if self.sense == Sense::Minimize { 1.0 } else { -1.0 };
        let mut worst = 0.0f64;
        for (c, col) in self.objective.iter().zip(&self.columns) {
            let ay: f64 = col.iter().map(|(i, a)| a.to_f64() * sol.duals[*i].to_f64()).sum();
            // reduced cost must be >= 0 for a minimum, <= 0 for a maximum
            worst = worst.max(-(sign * (c.to_f64() - ay)));
        }
        for (i, rel) in self.relations.iter().enumerate() {
            let y = sign * sol.duals[i].to_f64();
            let bad = match rel {
                Relation::Ge => -y,
                Relation::Le => y,
                Relation::Eq => 0.0,
            };
            worst = worst.max(bad);
        }
        ((primal - dual).abs(), worst)
    }
}

struct Simplex<T> {
    m: usize,
    /// standard-form columns, all with equality rows and b >= 0
    cols: Vec<Vec<(usize, T)>>,
    n_struct: usize,
    first_art: usize,
    flipped: Vec<bool>,
    binv: Vec<Vec<T>>,
    basis: Vec<usize>,
    xb: Vec<T>,
    iterations: usize,
}

const MAX_PIVOTS: usize = 200_000;

impl<T: LpScalar> Simplex<T> {
    fn build(p: &LpProblem<T>) -> Result<Self> {
        let m = p.rows();
        if p.relations.len() != m || p.objective.len() != p.columns.len() {
            return Err(Error::Lp("malformed"));
        }
        let flipped: Vec<bool> = p.rhs.iter().map(|b| b.is_neg()).collect();
        let b: Vec<T> = p.rhs.iter().zip(&flipped).map(|(v, &f)| if f { v.neg() } else { v.clone() }).collect();
        let rel: Vec<Relation> = p
            .relations
            .iter()
            .zip(&flipped)
            .map(|(r, &f)| match (r, f) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => *r,
            })
            .collect();
        let mut cols: Vec<Vec<(usize, T)>> = p
            .columns
            .iter()
            .map(|c| {
                c.iter()
                    .map(|(i, v)| {
                        if *i >= m {
                            Err(Error::Lp("malformed"))
                        } else {
                            Ok((*i, if flipped[*i] { v.neg() } else { v.clone() }))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let n_struct = cols.len();
        let mut basis = vec![usize::MAX; m];
        for (i, r) in rel.iter().enumerate() {
            match r {
                Relation::Le => {
                    basis[i] = cols.len();
                    cols.push(vec![(i, T::one())]);
                }
                Relation::Ge => cols.push(vec![(i, T::one().neg())]),
                Relation::Eq => {}
            }
        }
        let first_art = cols.len();
        for i in 0..m {
            if basis[i] == usize::MAX {
                basis[i] = cols.len();
                cols.push(vec![(i, T::one())]);
            }
        }
        let binv = (0..m).map(|i| (0..m).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect();
        let xb = b;
        Ok(Simplex { m, cols, n_struct, first_art, flipped, binv, basis, xb, iterations: 0 })
    }

    fn column_image(&self, j: usize) -> Vec<T> {
        let mut u = vec![T::zero(); self.m];
        for (r, row) in self.binv.iter().enumerate() {
            let mut acc = T::zero();
            for (i, a) in &self.cols[j] {
                if !row[*i].is_zero_val() {
                    acc = acc.add(&row[*i].mul(a));
                }
            }
            u[r] = acc;
        }
        u
    }

    fn duals(&self, cost: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.m];
        for (r, &bv) in self.basis.iter().enumerate() {
            let c = &cost[bv];
            if c.is_zero_val() {
                continue;
            }
            for (i, yi) in y.iter_mut().enumerate() {
                if !self.binv[r][i].is_zero_val() {
                    *yi = yi.add(&c.mul(&self.binv[r][i]));
                }
            }
        }
        y
    }

    fn pivot(&mut self, r: usize, j: usize, u: &[T]) {
        let piv = u[r].clone();
        let row_r: Vec<T> = self.binv[r].iter().map(|v| v.div(&piv)).collect();
        let xr = self.xb[r].div(&piv);
        for i in 0..self.m {
            if i == r || u[i].is_zero_val() {
                continue;
            }
            let f = u[i].clone();
            for (k, v) in self.binv[i].iter_mut().enumerate() {
                if !row_r[k].is_zero_val() {
                    *v = v.sub(&f.mul(&row_r[k]));
                }
            }
            self.xb[i] = self.xb[i].sub(&f.mul(&xr));
        }
        self.binv[r] = row_r;
        self.xb[r] = xr;
        self.basis[r] = j;
        self.iterations += 1;
    }

    /// Minimise `cost` over columns `< allowed`. Returns false if unbounded.
    fn optimise(&mut self, cost: &[T], allowed: usize) -> Result<bool> {
        loop {
            if self.iterations > MAX_PIVOTS {
                return Err(Error::Lp("over the pivot limit"));
            }
            let y = self.duals(cost);
            let mut in_basis = vec![false; self.cols.len()];
            for &bv in &self.basis {
                in_basis[bv] = true;
            }
            let entering = (0..allowed).find(|&j| {
                if in_basis[j] {
                    return false;
                }
                let mut d = cost[j].clone();
                for (i, a) in &self.cols[j] {
                    d = d.sub(&y[*i].mul(a));
                }
                d.is_neg()
            });
            let Some(j) = entering else { return Ok(true) };
            let u = self.column_image(j);
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.m {
                if !u[i].is_pos() {
                    continue;
                }
                let ratio = self.xb[i].div(&u[i]);
                let better = match &leave {
                    None => true,
                    Some((r, best)) => ratio.less(best) || (!best.less(&ratio) && self.basis[i] < self.basis[*r]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else { return Ok(false) };
            self.pivot(r, j, &u);
        }
    }

    fn run(mut self, p: &LpProblem<T>) -> Result<LpSolution<T>> {
        let total = self.cols.len();
        if self.first_art < total {
            let cost: Vec<T> = (0..total).map(|j| if j >= self.first_art { T::one() } else { T::zero() }).collect();
            self.optimise(&cost, total)?;
            let infeas = self
                .basis
                .iter()
                .zip(&self.xb)
                .filter(|(&bv, _)| bv >= self.first_art)
                .fold(T::zero(), |acc, (_, v)| acc.add(v));
            if infeas.is_pos() {
                return Err(Error::Lp("infeasible"));
            }
            // push zero-level artificials out where a real column can replace them
            for r in 0..self.m {
                if self.basis[r] < self.first_art {
                    continue;
                }
                if let Some(j) = (0..self.first_art)
                    .filter(|j| !self.basis.contains(j))
                    .find(|&j| !self.column_image(j)[r].is_zero_val())
                {
                    let u = self.column_image(j);
                    self.pivot(r, j, &u);
                }
            }
        }
        let sign = if p.sense == Sense::Maximize { T::one().neg() } else { T::one() };
        let cost: Vec<T> = (0..total)
            .map(|j| if j < self.n_struct { sign.mul(&p.objective[j]) } else { T::zero() })
            .collect();
        if !self.optimise(&cost, self.first_art)? {
            return Err(Error::Lp("unbounded"));
        }
        let mut x = vec![T::zero(); self.n_struct];
        for (r, &bv) in self.basis.iter().enumerate() {
            if bv < self.n_struct {
                x[bv] = self.xb[r].clone();
            }
        }
        let objective = x.iter().zip(&p.objective).fold(T::zero(), |acc, (xi, ci)| acc.add(&xi.mul(ci)));
        let y = self.duals(&cost);
        let duals = y
            .into_iter()
            .zip(&self.flipped)
            .map(|(v, &f)| {
                let v = if f { v.neg() } else { v };
                sign.mul(&v)
            })
            .collect();
        Ok(LpSolution { x, objective, duals, basis: self.basis, iterations: self.iterations })
    }
}

/// Value of the zero-sum game `max_w min_j (w^T G)_j` over the simplex, with
/// `G` given row by row. Returns the value, the row strategy `w` and the
/// column strategy.
pub fn matrix_game(g: &[Vec<f64>]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let rows = g.len();
    let cols = g.first().map(Vec::len).ok_or(Error::Empty("game matrix"))?;
    // variables w_0..w_{rows-1}, t; maximise t with t <= (w^T G)_j, sum w = 1
    let mut lp = LpProblem::new(Sense::Maximize, vec![0.0; rows + 1], cols + 1);
    lp.objective[rows] = 1.0;
    for (l, row) in g.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v != 0.0 {
                lp.columns[l].push((j, -v));
            }
        }
        lp.columns[l].push((cols, 1.0));
    }
    lp.columns[rows] = (0..cols).map(|j| (j, 1.0)).collect();
    lp.relations[cols] = Relation::Eq;
    lp.rhs[cols] = 1.0;
    let sol = lp.solve()?;
    let w = sol.x[..rows].to_vec();
    let col = sol.duals[..cols].to_vec();
    Ok((sol.objective, w, col))
}
