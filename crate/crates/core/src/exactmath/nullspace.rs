//! Exact integer nullspace by fraction-free sparse elimination.
//!
//! Rows are kept primitive (content divided out) and fully reduced, so each
//! pivot column appears in exactly one row. The basis is read off the free
//! columns with denominators cleared, so every basis vector is integral and
//! primitive.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::linalg::{Matrix, Vector};
use super::scalar::lcm_of_denominators;

/// Sparse integer row: `(column, coefficient)` sorted by column, no zeros.
pub type SparseRow = Vec<(usize, BigInt)>;

/// Reduced echelon form built row by row.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    ncols: usize,
    /// pivot column -> row (pivot coefficient positive)
    pivots: BTreeMap<usize, SparseRow>,
    seen: HashSet<SparseRow>,
}

fn coeff(row: &SparseRow, col: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| &row[i].1)
}

/// `a·x - b·y` on sparse rows.
fn combine(a: &BigInt, x: &SparseRow, b: &BigInt, y: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        let (col, v) = if take_x {
            i += 1;
            (x[i - 1].0, a * &x[i - 1].1)
        } else if take_y {
            j += 1;
            (y[j - 1].0, -(b * &y[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (x[i - 1].0, a * &x[i - 1].1 - b * &y[j - 1].1)
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    out
}

fn make_primitive(row: &mut SparseRow) {
    let g = row.iter().fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v = &*v / &g;
        }
    }
    if row.first().is_some_and(|(_, v)| v.is_negative()) {
        for (_, v) in row.iter_mut() {
            *v = -&*v;
        }
    }
}

/// Eliminates `col` from `target` using `pivot` (whose entry at `col` is nonzero).
fn eliminate(target: &SparseRow, pivot: &SparseRow, col: usize) -> SparseRow {
    let Some(t) = coeff(target, col) else { return target.clone() };
    let p = coeff(pivot, col).expect("pivot entry");
    let g = p.gcd(t);
    let mut out = combine(&(p / &g), target, &(t / &g), pivot);
    make_primitive(&mut out);
    out
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, ..Default::default() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Adds a row; returns `true` if it increased the rank.
    pub fn push(&mut self, row: SparseRow) -> bool {
        debug_assert!(row.iter().all(|(c, _)| *c < self.ncols));
        let mut r: SparseRow = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        r.sort_by_key(|(c, _)| *c);
        make_primitive(&mut r);
        if r.is_empty() || !self.seen.insert(r.clone()) {
            return false;
        }
        let hits: Vec<usize> = r.iter().map(|(c, _)| *c).filter(|c| self.pivots.contains_key(c)).collect();
        for c in hits {
            r = eliminate(&r, &self.pivots[&c], c);
        }
        let Some(&(pc, _)) = r.first() else { return false };
        // Choose the entry of smallest magnitude as pivot to limit growth.
        let pc = r
            .iter()
            .min_by(|a, b| a.1.abs().cmp(&b.1.abs()).then(a.0.cmp(&b.0)))
            .map_or(pc, |(c, _)| *c);
        if coeff(&r, pc).is_some_and(|v| v.is_negative()) {
            for (_, v) in r.iter_mut() {
                *v = -&*v;
            }
        }
        let cols: Vec<usize> = self.pivots.keys().copied().collect();
        for c in cols {
            let row = &self.pivots[&c];
            if coeff(row, pc).is_some() {
                let mut reduced = eliminate(row, &r, pc);
                if coeff(&reduced, c).is_some_and(|v| v.is_negative()) {
                    for (_, v) in reduced.iter_mut() {
                        *v = -&*v;
                    }
                }
                self.pivots.insert(c, reduced);
            }
        }
        self.pivots.insert(pc, r);
        true
    }

    /// Integral primitive basis of the nullspace, one vector per free column
    /// (in increasing column order).
    pub fn nullspace(&self) -> Vec<Vec<BigInt>> {
        let free: Vec<usize> = (0..self.ncols).filter(|c| !self.pivots.contains_key(c)).collect();
        let mut by_free: BTreeMap<usize, Vec<(usize, &SparseRow)>> = BTreeMap::new();
        for (&pc, row) in &self.pivots {
            for (c, _) in row {
                if *c != pc {
                    by_free.entry(*c).or_default().push((pc, row));
                }
            }
        }
        free.iter()
            .map(|&f| {
                let rows = by_free.get(&f).map(Vec::as_slice).unwrap_or(&[]);
                let l = rows
                    .iter()
                    .fold(BigInt::one(), |acc, (pc, row)| acc.lcm(coeff(row, *pc).unwrap()));
                let mut v = vec![BigInt::zero(); self.ncols];
                v[f] = l.clone();
                for (pc, row) in rows {
                    let p = coeff(row, *pc).unwrap();
                    let a = coeff(row, f).unwrap();
                    v[*pc] = -(a * (&l / p));
                }
                let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
                if !g.is_one() {
                    for x in v.iter_mut() {
                        *x = &*x / &g;
                    }
                }
                v
            })
            .collect()
    }
}

/// Converts a rational row to a primitive sparse integer row.
pub fn integer_row(row: &[(usize, BigRational)]) -> SparseRow {
    let l = lcm_of_denominators(row.iter().map(|(_, v)| v));
    row.iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| (*c, (v * BigRational::from_integer(l.clone())).to_integer()))
        .collect()
}

/// Nullspace of a dense rational matrix; each basis vector is integral.
pub fn nullspace(m: &Matrix<BigRational>) -> Vec<Vector<BigRational>> {
    let mut e = Echelon::new(m.cols());
    for i in 0..m.rows() {
        let row: Vec<(usize, BigRational)> =
            (0..m.cols()).map(|j| (j, m.get(i, j).clone())).filter(|(_, v)| !v.is_zero()).collect();
        e.push(integer_row(&row));
    }
    e.nullspace()
        .into_iter()
        .map(|v| Vector::new(v.into_iter().map(BigRational::from_integer).collect()))
        .collect()
}

/// Rank of a dense rational matrix.
pub fn rank(m: &Matrix<BigRational>) -> usize {
    let mut e = Echelon::new(m.cols());
    for i in 0..m.rows() {
        let row: Vec<(usize, BigRational)> =
            (0..m.cols()).map(|j| (j, m.get(i, j).clone())).collect();
        e.push(integer_row(&row));
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::scalar::int;
    use proptest::prelude::*;

    fn dense(rows: &[Vec<i64>]) -> Matrix<BigRational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .unwrap()
    }

    /// Oracle: rational Gauss-Jordan rank.
    fn rank_oracle(m: &Matrix<BigRational>) -> usize {
        let mut a = m.to_rows();
        let mut r = 0;
        for c in 0..m.cols() {
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            for i in 0..a.len() {
                if i != r && !a[i][c].is_zero() {
                    let f = &a[i][c] / &a[r][c];
                    for j in 0..m.cols() {
                        let v = &a[r][j] * &f;
                        a[i][j] -= v;
                    }
                }
            }
            r += 1;
        }
        r
    }

    #[test]
    fn simple_kernel() {
        let m = dense(&[vec![1, 1, 0], vec![0, 1, 1]]);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).is_zero());
        assert_eq!(ns[0].entries().iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![int(1); 3]);
    }

    #[test]
    fn duplicate_rows_are_dropped() {
        let mut e = Echelon::new(2);
        assert!(e.push(vec![(0, BigInt::from(2)), (1, BigInt::from(4))]));
        assert!(!e.push(vec![(0, BigInt::from(1)), (1, BigInt::from(2))]));
        assert_eq!(e.rank(), 1);
    }

    proptest! {
        #[test]
        fn kernel_is_annihilated_and_complete(
            rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 6), 0..6)
        ) {
            let rows = if rows.is_empty() { vec![vec![0; 6]] } else { rows };
            let m = dense(&rows);
            let ns = nullspace(&m);
            for v in &ns {
                prop_assert!(m.mul_vec(v).is_zero());
                prop_assert!(v.entries().iter().all(|x| x.is_integer()));
            }
            prop_assert_eq!(ns.len() + rank_oracle(&m), 6);
            // Basis vectors are independent.
            if !ns.is_empty() {
                prop_assert_eq!(rank_oracle(&Matrix::from_columns(&ns).transpose()), ns.len());
            }
        }
    }
}
