//! Free point, Dirichlet adjacency of its orbit, and the scaffolded graph.

pub mod dirichlet;

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exactmath::scalar::rat;
use crate::netmodel::{
    cells_in_box, reduce_mod_one, symmetry_defect, Edge, NetError, PeriodicGraphSpec, SymmetryGroupData, Vertex,
};
use crate::{FracVector, Rational};

pub use dirichlet::{dirichlet_adjacent, OrbitContext, OrbitPoint};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScaffoldError {
    #[error("no free point found after {attempts} candidates")]
    SearchExhausted { attempts: usize },
    #[error("orbit window holds more than {cap} points (reached {points})")]
    WindowTooSmall { points: usize, cap: usize },
    #[error("generator {generator} is not a symmetry of the scaffolded graph: {reason}")]
    BrokenSymmetry { generator: usize, reason: String },
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaffoldConfig {
    pub seed: u64,
    pub max_attempts: usize,
    pub window_point_cap: usize,
}

impl Default for ScaffoldConfig {
    fn default() -> Self {
        ScaffoldConfig { seed: 0, max_attempts: 10_000, window_point_cap: 200_000 }
    }
}

/// A point with trivial stabilizer and a vertex in the closure of its cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreePoint {
    /// In `[0,1)ⁿ`.
    pub position: FracVector,
    pub anchor: usize,
    pub anchor_cell: Vec<i64>,
}

/// True iff no non-identity coset composed with a lattice translation fixes `a`.
pub fn has_trivial_stabilizer(group: &SymmetryGroupData, a: &FracVector) -> bool {
    group.cosets.iter().skip(1).all(|g| !(&g.apply(a) - a).iter().all(|x| x.is_integer()))
}

/// Gram-nearest vertex instance to `a`, ties broken by vertex id then cell.
fn nearest_vertex(spec: &PeriodicGraphSpec, a: &FracVector) -> (usize, Vec<i64>, Rational) {
    let mut best: Option<(Rational, &str, Vec<i64>, usize)> = None;
    for cell in cells_in_box(spec.dim, 2) {
        for (i, v) in spec.vertices.iter().enumerate() {
            let d = spec.dist_sq(a, &spec.position(i, &cell));
            let key = (d, v.id.as_str(), cell.clone(), i);
            if best.as_ref().is_none_or(|b| (&key.0, key.1, &key.2) < (&b.0, b.1, &b.2)) {
                best = Some(key);
            }
        }
    }
    let (d, _, cell, i) = best.expect("spec has vertices");
    (i, cell, d)
}

fn is_vertex_position(spec: &PeriodicGraphSpec, a: &FracVector) -> bool {
    let (r, _) = reduce_mod_one(a);
    spec.vertices.iter().any(|v| v.position == r)
}

/// `v` lies in the closed Dirichlet cell of `a`: no orbit point is strictly
/// closer to `v` than `a`.
fn anchor_in_cell(spec: &PeriodicGraphSpec, group: &SymmetryGroupData, a: &FracVector, v: &FracVector, d: &Rational) -> bool {
    let ctx = OrbitContext::new(&spec.gram, &group.cosets, a.clone(), usize::MAX);
    match ctx.points_within(v, d) {
        Ok(points) => points.iter().all(|q| spec.dist_sq(v, &q.position) >= *d),
        Err(_) => false,
    }
}

/// Deterministic low-denominator search for a free point near the vertices.
pub fn choose_free_point(
    spec: &PeriodicGraphSpec,
    group: &SymmetryGroupData,
    config: &ScaffoldConfig,
) -> Result<FreePoint, ScaffoldError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut attempts = 0;
    let mut denominator = 8i64;
    while attempts < config.max_attempts {
        let mut candidates: Vec<(Rational, FracVector)> = Vec::new();
        for v in &spec.vertices {
            // Offsets up to n/D so that generic points (all coordinates
            // distinct in absolute value) exist in the first round.
            for k in cells_in_box(spec.dim, spec.dim as i64) {
                if k.iter().all(|&x| x == 0) {
                    continue;
                }
                let step = FracVector::new(k.iter().map(|&x| rat(x, denominator)).collect());
                let (a, _) = reduce_mod_one(&(&v.position + &step));
                candidates.push((spec.dist_sq(&step, &FracVector::zeros(spec.dim)), a));
            }
        }
        candidates.shuffle(&mut rng);
        candidates.sort_by(|x, y| x.0.cmp(&y.0));
        for (_, a) in candidates {
            if attempts >= config.max_attempts {
                break;
            }
            attempts += 1;
            if is_vertex_position(spec, &a) || !has_trivial_stabilizer(group, &a) {
                continue;
            }
            let (anchor, anchor_cell, d) = nearest_vertex(spec, &a);
            let v = spec.position(anchor, &anchor_cell);
            if anchor_in_cell(spec, group, &a, &v, &d) {
                return Ok(FreePoint { position: a, anchor, anchor_cell });
            }
        }
        match denominator.checked_mul(2) {
            Some(d) => denominator = d,
            None => break,
        }
    }
    Err(ScaffoldError::SearchExhausted { attempts })
}

/// The net enlarged by the orbit of the free point, the anchor edges and the
/// Dirichlet adjacency edges.
#[derive(Debug, Clone)]
pub struct ScaffoldedGraph {
    pub base: PeriodicGraphSpec,
    pub spec: PeriodicGraphSpec,
    pub free_point: FreePoint,
    /// Index of the first scaffold vertex; scaffold vertex `first_scaffold + k`
    /// is `g_k(a)` reduced mod 1.
    pub first_scaffold: usize,
    /// Cell of `g_k(a)`, so that `g_k(a) = position + cell`.
    pub scaffold_cells: Vec<Vec<i64>>,
    /// Facet neighbors of the cell of `a`.
    pub neighbors: Vec<OrbitPoint>,
    pub anchor_edges: Vec<Edge>,
    pub dirichlet_edges: Vec<Edge>,
}

impl ScaffoldedGraph {
    pub fn scaffold_vertex(&self, coset: usize) -> usize {
        self.first_scaffold + coset
    }

    pub fn scaffold_count(&self) -> usize {
        self.scaffold_cells.len()
    }
}

fn fresh_id(taken: &BTreeSet<String>, k: usize) -> String {
    let mut id = format!("@{k}");
    while taken.contains(&id) {
        id.push('\'');
    }
    id
}

pub fn build_scaffolded_graph(
    spec: &PeriodicGraphSpec,
    group: &SymmetryGroupData,
    fp: &FreePoint,
    config: &ScaffoldConfig,
) -> Result<ScaffoldedGraph, ScaffoldError> {
    let n = spec.dim;
    let a = &fp.position;
    let first_scaffold = spec.vertices.len();
    let mut out = spec.clone();
    let taken: BTreeSet<String> = spec.vertices.iter().map(|v| v.id.clone()).collect();
    let mut scaffold_cells = Vec::new();
    for (k, g) in group.cosets.iter().enumerate() {
        let (p, cell) = reduce_mod_one(&g.apply(a));
        out.vertices.push(Vertex { id: fresh_id(&taken, k), position: p, scaffold: true });
        scaffold_cells.push(cell);
    }
    // Orbit instance of `f(a)` for a group element `f`.
    let instance = |f: &crate::Isometry| -> (usize, Vec<i64>) {
        let (j, d) = group.coset_of(f).expect("element of the group");
        let cell = (0..n).map(|i| scaffold_cells[j][i] + d[i]).collect();
        (first_scaffold + j, cell)
    };
    let mut seen: BTreeSet<(usize, usize, Vec<i64>)> = spec.edges.iter().map(Edge::canonical).collect();
    let mut push = |edges: &mut Vec<Edge>, u: (usize, Vec<i64>), v: (usize, Vec<i64>)| {
        let e = Edge::new(u.0, v.0, (0..n).map(|i| v.1[i] - u.1[i]).collect());
        if seen.insert(e.canonical()) {
            edges.push(e);
        }
    };

    let index = spec.index();
    let v_abs = spec.position(fp.anchor, &fp.anchor_cell);
    let mut anchor_edges = Vec::new();
    for h in &group.cosets {
        let from = instance(h);
        let to = index.vertex_at(&h.apply(&v_abs)).expect("symmetry maps vertices to vertices");
        push(&mut anchor_edges, from, to);
    }

    let ctx = OrbitContext::new(&spec.gram, &group.cosets, a.clone(), config.window_point_cap);
    let neighbors = ctx.facet_neighbors(a)?;
    let mut dirichlet_edges = Vec::new();
    for h in &group.cosets {
        for q in &neighbors {
            let f = h.compose(&group.element(q.coset, &q.cell));
            push(&mut dirichlet_edges, instance(h), instance(&f));
        }
    }
    out.edges.extend(anchor_edges.iter().cloned());
    out.edges.extend(dirichlet_edges.iter().cloned());

    let idx = out.index();
    for (k, g) in spec.generators.iter().enumerate() {
        if let Some(reason) = symmetry_defect(&out, g, &idx) {
            return Err(ScaffoldError::BrokenSymmetry { generator: k, reason });
        }
    }
    Ok(ScaffoldedGraph {
        base: spec.clone(),
        spec: out,
        free_point: fp.clone(),
        first_scaffold,
        scaffold_cells,
        neighbors,
        anchor_edges,
        dirichlet_edges,
    })
}
