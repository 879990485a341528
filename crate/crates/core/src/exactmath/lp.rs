//! Exact linear programming: two-phase tableau simplex with Bland's rule.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub relation: Relation,
    pub rhs: BigRational,
}

/// `maximize cᵀx` subject to the constraints. Variables are free unless
/// marked non-negative.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<BigRational>,
    pub constraints: Vec<Constraint>,
    pub nonnegative: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: BigRational, point: Vec<BigRational> },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(objective: Vec<BigRational>) -> Self {
        let n = objective.len();
        LinearProgram { objective, constraints: Vec::new(), nonnegative: vec![false; n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<BigRational>, relation: Relation, rhs: BigRational) {
        assert_eq!(coeffs.len(), self.num_vars(), "constraint width");
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn solve(&self) -> LpOutcome {
        Simplex::build(self).run(self)
    }
}

struct Simplex {
    /// rows of `[A | b]`
    rows: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    /// column index -> (original variable, sign)
    structural: Vec<(usize, bool)>,
    n_struct: usize,
    first_art: usize,
    width: usize,
}

impl Simplex {
    fn build(lp: &LinearProgram) -> Self {
        let mut structural = Vec::new();
        for v in 0..lp.num_vars() {
            structural.push((v, true));
            if !lp.nonnegative[v] {
                structural.push((v, false));
            }
        }
        let n_struct = structural.len();
        let n_slack = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        let m = lp.constraints.len();
        let first_art = n_struct + n_slack;
        let width = first_art + m;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack = n_struct;
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![BigRational::zero(); width + 1];
            for (j, &(v, pos)) in structural.iter().enumerate() {
                row[j] = if pos { c.coeffs[v].clone() } else { -c.coeffs[v].clone() };
            }
            match c.relation {
                Relation::Le => {
                    row[slack] = BigRational::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -BigRational::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            row[width] = c.rhs.clone();
            if row[width].is_negative() {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
            }
            row[first_art + i] = BigRational::one();
            basis.push(first_art + i);
            rows.push(row);
        }
        Simplex { rows, basis, structural, n_struct, first_art, width }
    }

    fn pivot(&mut self, z: &mut [BigRational], r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x /= &p;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&prow) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        if !z[c].is_zero() {
            let f = z[c].clone();
            for (x, y) in z.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Iterates to optimality on columns `< allowed`. Returns false if unbounded.
    fn optimize(&mut self, z: &mut [BigRational], allowed: usize) -> bool {
        loop {
            let Some(c) = (0..allowed).find(|&j| z[j].is_negative()) else { return true };
            let mut best: Option<(usize, BigRational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.width] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(z, r, c),
            }
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let w = self.width;
        // Phase 1: maximize -Σ artificials.
        let mut z = vec![BigRational::zero(); w + 1];
        for j in self.first_art..w {
            z[j] = BigRational::one();
        }
        for row in &self.rows {
            for (x, y) in z.iter_mut().zip(row) {
                *x -= y;
            }
        }
        self.optimize(&mut z, w);
        if z[w].is_negative() {
            return LpOutcome::Infeasible;
        }
        // Drive zero-valued artificials out of the basis where possible.
        for r in 0..self.rows.len() {
            if self.basis[r] >= self.first_art {
                if let Some(c) = (0..self.first_art).find(|&j| !self.rows[r][j].is_zero()) {
                    self.pivot(&mut z, r, c);
                }
            }
        }
        // Phase 2.
        let mut z = vec![BigRational::zero(); w + 1];
        let cost = |j: usize, this: &Simplex| -> BigRational {
            if j < this.n_struct {
                let (v, pos) = this.structural[j];
                if pos { lp.objective[v].clone() } else { -lp.objective[v].clone() }
            } else {
                BigRational::zero()
            }
        };
        for j in 0..self.n_struct {
            z[j] = -cost(j, &self);
        }
        for (r, row) in self.rows.iter().enumerate() {
            let cb = cost(self.basis[r], &self);
            if !cb.is_zero() {
                for (x, y) in z.iter_mut().zip(row) {
                    *x += &cb * y;
                }
            }
        }
        if !self.optimize(&mut z, self.first_art) {
            return LpOutcome::Unbounded;
        }
        let mut point = vec![BigRational::zero(); lp.num_vars()];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                let (v, pos) = self.structural[b];
                let val = self.rows[r][w].clone();
                if pos {
                    point[v] += val;
                } else {
                    point[v] -= val;
                }
            }
        }
        LpOutcome::Optimal { value: z[w].clone(), point }
    }
}
