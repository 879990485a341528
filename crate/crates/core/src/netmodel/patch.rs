use std::collections::HashMap;

use super::PeriodicGraphSpec;
use crate::FracVector;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchVertex {
    pub cell: Vec<i64>,
    pub vertex: usize,
    pub position: FracVector,
}

/// All vertex translates within `‖cell‖∞ ≤ radius` and the edges among them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patch {
    pub vertices: Vec<PatchVertex>,
    /// Index pairs into `vertices`, each unordered edge listed once.
    pub edges: Vec<(usize, usize)>,
    pub radius: i64,
}

impl Patch {
    pub fn lookup(&self) -> HashMap<(usize, Vec<i64>), usize> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(k, v)| ((v.vertex, v.cell.clone()), k))
            .collect()
    }
}

/// Integer cells of the box `[-r, r]ⁿ` in lexicographic order.
pub fn cells_in_box(dim: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-r..=r).map(move |c| {
                    let mut p = prefix.clone();
                    p.push(c);
                    p
                })
            })
            .collect();
    }
    out
}

pub fn expand_patch(spec: &PeriodicGraphSpec, radius: i64) -> Patch {
    let mut vertices = Vec::new();
    for cell in cells_in_box(spec.dim, radius) {
        for i in 0..spec.vertices.len() {
            vertices.push(PatchVertex { position: spec.position(i, &cell), cell: cell.clone(), vertex: i });
        }
    }
    let mut patch = Patch { vertices, edges: Vec::new(), radius };
    let lookup = patch.lookup();
    for cell in cells_in_box(spec.dim, radius) {
        for e in &spec.edges {
            let target: Vec<i64> = cell.iter().zip(&e.offset).map(|(a, b)| a + b).collect();
            if let Some(&b) = lookup.get(&(e.v, target)) {
                let a = lookup[&(e.u, cell.clone())];
                patch.edges.push((a, b));
            }
        }
    }
    patch
}
