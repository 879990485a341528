//! Facet adjacency of Dirichlet cells of a single orbit, decided by exact LPs.
//!
//! Every point of the cell of `c` lies within the covering radius ρ of the
//! translation lattice, and ρ² ≤ trace(G)/4 (nearest-plane bound). Facet
//! neighbors are therefore within distance 2ρ, which gives a certified window.

use num_traits::{One, Zero};

use crate::exactmath::lp::{LinearProgram, LpOutcome, Relation};
use crate::exactmath::scalar::{ceil_sqrt, int, rat};
use crate::exactmath::gram_norm_sq;
use crate::netmodel::cell_vector;
use crate::{FracMatrix, FracVector, Isometry, Rational};

use super::ScaffoldError;

/// An orbit point `τ_cell ∘ g_k (a)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitPoint {
    pub coset: usize,
    pub cell: Vec<i64>,
    pub position: FracVector,
}

/// The orbit of a point under a coset table, with the metric.
pub struct OrbitContext<'a> {
    pub gram: &'a FracMatrix,
    pub cosets: &'a [Isometry],
    pub point: FracVector,
    /// Upper bound on the number of window points considered.
    pub point_cap: usize,
    gram_inv_diag: Vec<Rational>,
}

/// Smallest `k/16` with `(k/16)² ≥ r`.
fn sqrt_upper(r: &Rational) -> Rational {
    rat(ceil_sqrt(&(r * int(256))), 16)
}

impl<'a> OrbitContext<'a> {
    pub fn new(gram: &'a FracMatrix, cosets: &'a [Isometry], point: FracVector, point_cap: usize) -> Self {
        let inv = gram.inverse().expect("Gram matrix is positive definite");
        let gram_inv_diag = (0..gram.rows()).map(|i| inv.get(i, i).clone()).collect();
        OrbitContext { gram, cosets, point, point_cap, gram_inv_diag }
    }

    fn dim(&self) -> usize {
        self.gram.rows()
    }

    fn norm(&self, v: &FracVector) -> Rational {
        gram_norm_sq(self.gram, v)
    }

    /// `ρ²` bound for the translation lattice.
    pub fn covering_bound(&self) -> Rational {
        (0..self.dim()).fold(Rational::zero(), |acc, i| acc + self.gram.get(i, i)) / int(4)
    }

    /// Half-widths of a coordinate box containing the Gram ball of radius² `r`.
    fn box_half_widths(&self, r: &Rational) -> Vec<Rational> {
        self.gram_inv_diag.iter().map(|d| sqrt_upper(&(d * r))).collect()
    }

    /// All orbit points `q ≠ center` with `|q − center|² ≤ r`, nearest first.
    pub fn points_within(&self, center: &FracVector, r: &Rational) -> Result<Vec<OrbitPoint>, ScaffoldError> {
        let n = self.dim();
        let half: Vec<i64> = self.box_half_widths(r).iter().map(|b| b.ceil().to_integer().try_into().unwrap()).collect();
        let mut out: Vec<(Rational, OrbitPoint)> = Vec::new();
        for (k, g) in self.cosets.iter().enumerate() {
            let b = g.apply(&self.point);
            let base: Vec<i64> = (0..n)
                .map(|i| (&center[i] - &b[i]).floor().to_integer().try_into().unwrap())
                .collect();
            let mut cell = vec![0i64; n];
            let lo: Vec<i64> = (0..n).map(|i| base[i] - half[i]).collect();
            let hi: Vec<i64> = (0..n).map(|i| base[i] + half[i] + 1).collect();
            cell.copy_from_slice(&lo);
            loop {
                let q = &b + &cell_vector(&cell);
                let d = self.norm(&(&q - center));
                if !d.is_zero() && d <= *r {
                    out.push((d, OrbitPoint { coset: k, cell: cell.clone(), position: q }));
                    if out.len() > self.point_cap {
                        return Err(ScaffoldError::WindowTooSmall { points: out.len(), cap: self.point_cap });
                    }
                }
                let mut i = 0;
                while i < n && cell[i] == hi[i] {
                    cell[i] = lo[i];
                    i += 1;
                }
                if i == n {
                    break;
                }
                cell[i] += 1;
            }
        }
        out.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
        Ok(out.into_iter().map(|(_, p)| p).collect())
    }

    /// Row `2(r − c)ᵀG` and bound `rᵀGr − cᵀGc` of "x no farther from c than r".
    fn halfspace(&self, c: &FracVector, r: &FracVector) -> (Vec<Rational>, Rational) {
        let w = self.gram.mul_vec(&(r - c)).scale(&int(2));
        (w.into_entries(), self.norm(r) - self.norm(c))
    }

    fn base_lp(&self, objective: Vec<Rational>, center: &FracVector, competitors: &[FracVector], half: &[Rational]) -> LinearProgram {
        let n = self.dim();
        let width = objective.len();
        let mut lp = LinearProgram::new(objective);
        for i in 0..n {
            let mut row = vec![Rational::zero(); width];
            row[i] = Rational::one();
            lp.add(row.clone(), Relation::Le, &center[i] + &half[i]);
            lp.add(row, Relation::Ge, &center[i] - &half[i]);
        }
        for r in competitors {
            let (mut w, b) = self.halfspace(center, r);
            w.resize(width, Rational::zero());
            lp.add(w, Relation::Le, b);
        }
        lp
    }

    fn maximize(lp: &LinearProgram) -> Rational {
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => value,
            other => unreachable!("box-bounded LP returned {other:?}"),
        }
    }

    /// Upper bound on `max |x − c|²` over the polytope cut out by `competitors`.
    fn radius_bound(&self, center: &FracVector, competitors: &[FracVector], half: &[Rational]) -> Rational {
        let n = self.dim();
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[i] = Rational::one();
            let lp = self.base_lp(e.clone(), center, competitors, half);
            hi.push(Self::maximize(&lp) - &center[i]);
            let neg: Vec<Rational> = e.iter().map(|x| -x).collect();
            let lp = self.base_lp(neg, center, competitors, half);
            lo.push(-Self::maximize(&lp) - &center[i]);
        }
        // A convex quadratic attains its maximum over a box at a corner.
        let mut best = Rational::zero();
        for mask in 0..(1usize << n) {
            let f = FracVector::new((0..n).map(|i| if mask >> i & 1 == 1 { hi[i].clone() } else { lo[i].clone() }).collect());
            let v = self.norm(&f);
            if v > best {
                best = v;
            }
        }
        best
    }

    /// Orbit points whose bisector halfspaces bound the cell of `center`
    /// (a superset of its facet neighbors).
    pub fn relevant_points(&self, center: &FracVector) -> Result<Vec<OrbitPoint>, ScaffoldError> {
        let rho = self.covering_bound();
        let half = self.box_half_widths(&rho);
        let window = rho.clone() * int(4);
        let candidates = self.points_within(center, &window)?;
        let mut kept: Vec<OrbitPoint> = Vec::new();
        let mut positions: Vec<FracVector> = Vec::new();
        let mut bound = rho;
        let mut bound_fresh = true;
        for q in candidates {
            let d = self.norm(&(&q.position - center));
            if d > &bound * int(4) {
                if !bound_fresh {
                    bound = self.radius_bound(center, &positions, &half);
                    bound_fresh = true;
                }
                if d > &bound * int(4) {
                    break;
                }
            }
            let (w, b) = self.halfspace(center, &q.position);
            let lp = self.base_lp(w, center, &positions, &half);
            if Self::maximize(&lp) > b {
                positions.push(q.position.clone());
                kept.push(q);
                bound_fresh = false;
            }
        }
        Ok(kept)
    }

    /// Does the cell of `center` share an (n−1)-dimensional facet with the
    /// cell of `other`, given the competitors that bound the cell of `center`?
    pub fn facet_test(&self, center: &FracVector, other: &FracVector, competitors: &[FracVector]) -> bool {
        let n = self.dim();
        let rho = self.covering_bound();
        let half = self.box_half_widths(&rho);
        let mut objective = vec![Rational::zero(); n + 1];
        objective[n] = Rational::one();
        let others: Vec<FracVector> = competitors.iter().filter(|r| *r != other).cloned().collect();
        let mut lp = self.base_lp(objective, center, &[], &half);
        for r in &others {
            let (mut w, b) = self.halfspace(center, r);
            w.push(Rational::one());
            lp.add(w, Relation::Le, b);
        }
        let (mut w, b) = self.halfspace(center, other);
        w.push(Rational::zero());
        lp.add(w, Relation::Eq, b);
        let mut cap = vec![Rational::zero(); n + 1];
        cap[n] = Rational::one();
        lp.add(cap, Relation::Le, Rational::one());
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => value > Rational::zero(),
            _ => false,
        }
    }

    /// Facet neighbors of the cell of `center`.
    pub fn facet_neighbors(&self, center: &FracVector) -> Result<Vec<OrbitPoint>, ScaffoldError> {
        let relevant = self.relevant_points(center)?;
        let positions: Vec<FracVector> = relevant.iter().map(|q| q.position.clone()).collect();
        Ok(relevant.into_iter().filter(|q| self.facet_test(center, &q.position, &positions)).collect())
    }
}

/// Facet adjacency of the cells of `g₁(a)` and `g₂(a)`.
pub fn dirichlet_adjacent(ctx: &OrbitContext<'_>, g1: &Isometry, g2: &Isometry) -> Result<bool, ScaffoldError> {
    let p = g1.apply(&ctx.point);
    let q = g2.apply(&ctx.point);
    if p == q {
        return Ok(false);
    }
    let relevant = ctx.relevant_points(&p)?;
    if !relevant.iter().any(|r| r.position == q) {
        return Ok(false);
    }
    let positions: Vec<FracVector> = relevant.iter().map(|r| r.position.clone()).collect();
    Ok(ctx.facet_test(&p, &q, &positions))
}
