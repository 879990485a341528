use std::collections::BTreeMap;

use super::{check_chain, Itinerary, Schedule, TouringError, TransversalChart};
use crate::exactmath::scalar::int;
use crate::{FracMatrix, FracVector, Rational};

/// Column layout of the unknowns: one n-vector per arc, the lattice vectors
/// `u₁…uₙ`, one `y_g` per coset representative, and the free point `x₀`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableTable {
    pub dim: usize,
    pub arcs: usize,
    pub cosets: usize,
}

impl VariableTable {
    pub fn new(dim: usize, arcs: usize, cosets: usize) -> Self {
        VariableTable { dim, arcs, cosets }
    }

    pub fn arc(&self, e: usize, i: usize) -> usize {
        e * self.dim + i
    }

    pub fn lattice(&self, k: usize, i: usize) -> usize {
        (self.arcs + k) * self.dim + i
    }

    pub fn coset(&self, g: usize, i: usize) -> usize {
        (self.arcs + self.dim + g) * self.dim + i
    }

    pub fn origin(&self, i: usize) -> usize {
        (self.arcs + self.dim + self.cosets) * self.dim + i
    }

    pub fn len(&self) -> usize {
        (self.arcs + self.dim + self.cosets + 1) * self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self, chart: &TransversalChart) -> Vec<String> {
        let mut out = Vec::with_capacity(self.len());
        for (e, arc) in chart.arcs.iter().enumerate() {
            debug_assert_eq!(out.len(), self.arc(e, 0));
            for i in 0..self.dim {
                out.push(format!("x[t{}->t{}].{}", arc.from, arc.to, i));
            }
        }
        for k in 0..self.dim {
            for i in 0..self.dim {
                out.push(format!("u{}.{}", k + 1, i));
            }
        }
        for g in 0..self.cosets {
            for i in 0..self.dim {
                out.push(format!("y[{g}].{i}"));
            }
        }
        for i in 0..self.dim {
            out.push(format!("x0.{i}"));
        }
        out
    }

    /// The original net's values: train translations, the standard basis,
    /// coset translations and the free point.
    pub fn seed(&self, sch: &Schedule, cosets: &[crate::Isometry], a: &FracVector) -> Vec<Rational> {
        let mut v = vec![int(0); self.len()];
        for (e, s) in sch.sigma_tilde.iter().enumerate() {
            for i in 0..self.dim {
                v[self.arc(e, i)] = s.translation[i].clone();
            }
        }
        for k in 0..self.dim {
            v[self.lattice(k, k)] = int(1);
        }
        for (g, c) in cosets.iter().enumerate() {
            for i in 0..self.dim {
                v[self.coset(g, i)] = c.translation[i].clone();
            }
        }
        for i in 0..self.dim {
            v[self.origin(i)] = a[i].clone();
        }
        v
    }
}

/// A linear expression per coordinate over the variable table.
pub type LinearRow = BTreeMap<usize, i64>;

/// `⟨X, M⟩`: symbolic vector part with integer coefficients, concrete matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    pub vector: Vec<LinearRow>,
    pub matrix: Vec<Vec<i64>>,
}

pub(crate) fn add_scaled(target: &mut LinearRow, source: &LinearRow, k: i64) {
    if k == 0 {
        return;
    }
    for (&var, &c) in source {
        let e = target.entry(var).or_insert(0);
        *e += k * c;
        if *e == 0 {
            target.remove(&var);
        }
    }
}

pub(crate) fn identity_int(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub(crate) fn mat_mul_int(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

impl LinearForm {
    pub fn identity(n: usize) -> Self {
        LinearForm { vector: vec![LinearRow::new(); n], matrix: identity_int(n) }
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    /// `⟨X, M⟩ · ⟨x_e, μ_e⟩ = ⟨X + M x_e, M μ_e⟩`.
    pub fn then_arc(&self, table: &VariableTable, e: usize, mu: &[Vec<i64>]) -> Self {
        let n = self.dim();
        let mut vector = self.vector.clone();
        for (i, row) in vector.iter_mut().enumerate() {
            for j in 0..n {
                let c = self.matrix[i][j];
                if c != 0 {
                    add_scaled(row, &LinearRow::from([(table.arc(e, j), 1)]), c);
                }
            }
        }
        LinearForm { vector, matrix: mat_mul_int(&self.matrix, mu) }
    }

    /// The position form `X + M x₀`.
    pub fn position(&self, table: &VariableTable) -> Vec<LinearRow> {
        let n = self.dim();
        let mut out = self.vector.clone();
        for (i, row) in out.iter_mut().enumerate() {
            for j in 0..n {
                add_scaled(row, &LinearRow::from([(table.origin(j), 1)]), self.matrix[i][j]);
            }
        }
        out
    }

    pub fn matrix_rational(&self) -> FracMatrix {
        FracMatrix::from_rows(self.matrix.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .expect("square")
    }
}

pub fn evaluate(rows: &[LinearRow], values: &[Rational]) -> FracVector {
    FracVector::new(
        rows.iter()
            .map(|row| row.iter().fold(int(0), |acc, (&var, &c)| acc + int(c) * &values[var]))
            .collect(),
    )
}

/// The linear form of an itinerary starting at `t₀`.
pub fn form_of(
    chart: &TransversalChart,
    sch: &Schedule,
    it: &Itinerary,
    table: &VariableTable,
) -> Result<LinearForm, TouringError> {
    check_chain(chart, it, chart.origin())?;
    let n = table.dim;
    Ok(it.0.iter().fold(LinearForm::identity(n), |f, &e| f.then_arc(table, e, &sch.mu_int[e])))
}
