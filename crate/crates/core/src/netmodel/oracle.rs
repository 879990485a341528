//! Brute-force space-group search, used as an independent test oracle.
//!
//! Linear parts are searched among matrices with entries in {-1, 0, 1} that
//! preserve the Gram form; translations are drawn from differences between
//! vertex 0's image and every vertex position. This finds every coset whose
//! linear part has small entries, which covers the reduced bases used by the
//! shipped fixtures but not arbitrary skewed bases.

use super::{reduce_mod_one, PeriodicGraphSpec};
use crate::exactmath::scalar::int;
use crate::{FracMatrix, Isometry};

/// Integer matrices with entries in {-1,0,1} satisfying `MᵀGM = G`.
pub fn gram_automorphisms(gram: &FracMatrix) -> Vec<FracMatrix> {
    let n = gram.rows();
    let cells = n * n;
    let mut out = Vec::new();
    let mut digits = vec![-1i64; cells];
    loop {
        let rows: Vec<Vec<_>> = (0..n).map(|i| (0..n).map(|j| int(digits[i * n + j])).collect()).collect();
        let m = FracMatrix::from_rows(rows).expect("square");
        if &(&m.transpose() * gram) * &m == *gram {
            out.push(m);
        }
        let mut k = 0;
        while k < cells && digits[k] == 1 {
            digits[k] = -1;
            k += 1;
        }
        if k == cells {
            break;
        }
        digits[k] += 1;
    }
    out
}

/// Every coset representative (translation reduced to `[0,1)ⁿ`) of the
/// net's symmetry group found by exhaustive search.
pub fn brute_force_cosets(spec: &PeriodicGraphSpec) -> Vec<Isometry> {
    let mut found = Vec::new();
    let Some(p0) = spec.vertices.first().map(|v| v.position.clone()) else { return found };
    let index = spec.index();
    for m in gram_automorphisms(&spec.gram) {
        for v in &spec.vertices {
            let t = &v.position - &m.mul_vec(&p0);
            let (t, _) = reduce_mod_one(&t);
            let f = Isometry { translation: t, linear: m.clone() };
            if super::symmetry_defect(spec, &f, &index).is_none() && !found.contains(&f) {
                found.push(f);
            }
        }
    }
    found.sort_by(|a, b| (&a.linear, &a.translation).cmp(&(&b.linear, &b.translation)));
    found
}
