//! Periodic graphs in fractional coordinates: the data model, validation,
//! finite patches and the symmetry group generated by the supplied generators.

mod frame;
mod group;
pub mod oracle;
mod patch;

use std::collections::{HashMap, HashSet};

use num_traits::{One, Zero};

pub use frame::{EmbeddedNet, StandardForm};
pub use group::{close_group, close_group_with_bound, orbit_partition, orbits, SymmetryGroupData};
pub use patch::{cells_in_box, expand_patch, Patch, PatchVertex};

use crate::exactmath::gram_norm_sq;
use crate::exactmath::scalar::{floor_i64, int};
use crate::{FracMatrix, FracVector, Isometry};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetError {
    #[error("dimension mismatch in {0}")]
    Dimension(String),
    #[error("Gram matrix is not symmetric positive definite")]
    InvalidGram,
    #[error("vertex {0} has a coordinate outside [0,1)")]
    PositionOutOfCell(String),
    #[error("duplicate vertex id {0}")]
    DuplicateVertexId(String),
    #[error("edge {0} refers to an unknown vertex")]
    UnknownVertex(usize),
    #[error("vertices {0} and {1} occupy the same position")]
    VertexCollision(String, String),
    #[error("edge {0} duplicates an earlier edge")]
    DuplicateEdge(usize),
    #[error("edge {0} joins a vertex to itself")]
    DegenerateEdge(usize),
    #[error("net is not uniformly discrete")]
    NotUniformlyDiscrete,
    #[error("net is disconnected: {0}")]
    Disconnected(String),
    #[error("generator {index} is not a symmetry: {reason}")]
    NonSymmetryGenerator { index: usize, reason: String },
    #[error("group closure exceeded {0} cosets")]
    ClosureExplosion(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub id: String,
    /// Fractional position in `[0,1)ⁿ`.
    pub position: FracVector,
    pub scaffold: bool,
}

/// Edge from vertex `u` in cell 0 to vertex `v` in cell `offset`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub offset: Vec<i64>,
}

impl Edge {
    pub fn new(u: usize, v: usize, offset: Vec<i64>) -> Self {
        Edge { u, v, offset }
    }

    /// Orientation-independent key: `(u,v,o)` and `(v,u,-o)` coincide.
    pub fn canonical(&self) -> (usize, usize, Vec<i64>) {
        let rev = (self.v, self.u, self.offset.iter().map(|x| -x).collect::<Vec<_>>());
        let fwd = (self.u, self.v, self.offset.clone());
        fwd.min(rev)
    }
}

/// Finite description of an n-periodic graph over the standard lattice `ℤⁿ`
/// with metric given by `gram`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicGraphSpec {
    pub dim: usize,
    pub gram: FracMatrix,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub generators: Vec<Isometry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    /// Minimum squared distance between distinct vertices of the radius-1 patch.
    pub epsilon_sq: crate::Rational,
    pub vertex_count: usize,
    pub edge_count: usize,
}

/// Splits `p` into its residue in `[0,1)ⁿ` and the integer cell.
pub fn reduce_mod_one(p: &FracVector) -> (FracVector, Vec<i64>) {
    let cell: Vec<i64> = p.iter().map(floor_i64).collect();
    (p - &cell_vector(&cell), cell)
}

pub fn cell_vector(cell: &[i64]) -> FracVector {
    FracVector::new(cell.iter().map(|&c| int(c)).collect())
}

/// Entry-wise integer view of a matrix whose entries are known to be integral.
pub fn integer_entries(m: &FracMatrix) -> Option<Vec<Vec<i64>>> {
    m.to_rows()
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| if x.is_integer() { i64::try_from(x.to_integer()).ok() } else { None })
                .collect()
        })
        .collect()
}

pub fn apply_int(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Lookup tables for repeated vertex/edge queries.
pub struct SpecIndex {
    by_position: HashMap<FracVector, usize>,
    edges: HashSet<(usize, usize, Vec<i64>)>,
}

impl SpecIndex {
    pub fn new(spec: &PeriodicGraphSpec) -> Self {
        SpecIndex {
            by_position: spec
                .vertices
                .iter()
                .enumerate()
                .map(|(i, v)| (v.position.clone(), i))
                .collect(),
            edges: spec.edges.iter().map(Edge::canonical).collect(),
        }
    }

    /// The vertex instance at absolute position `p`, if any.
    pub fn vertex_at(&self, p: &FracVector) -> Option<(usize, Vec<i64>)> {
        let (r, cell) = reduce_mod_one(p);
        self.by_position.get(&r).map(|&i| (i, cell))
    }

    pub fn has_edge(&self, u: usize, v: usize, offset: Vec<i64>) -> bool {
        self.edges.contains(&Edge::new(u, v, offset).canonical())
    }
}

impl PeriodicGraphSpec {
    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    /// Absolute position of vertex `i` translated to `cell`.
    pub fn position(&self, i: usize, cell: &[i64]) -> FracVector {
        &self.vertices[i].position + &cell_vector(cell)
    }

    pub fn dist_sq(&self, p: &FracVector, q: &FracVector) -> crate::Rational {
        gram_norm_sq(&self.gram, &(p - q))
    }

    pub fn index(&self) -> SpecIndex {
        SpecIndex::new(self)
    }

    /// Neighbors of vertex `i` in cell 0, as `(vertex, cell)` instances.
    pub fn adjacency(&self) -> Vec<Vec<(usize, Vec<i64>)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.u].push((e.v, e.offset.clone()));
            adj[e.v].push((e.u, e.offset.iter().map(|x| -x).collect()));
        }
        for a in adj.iter_mut() {
            a.sort();
            a.dedup();
        }
        adj
    }

    fn check_shape(&self) -> Result<(), NetError> {
        let n = self.dim;
        if self.gram.rows() != n || self.gram.cols() != n {
            return Err(NetError::Dimension("gram".into()));
        }
        if !self.gram.is_positive_definite() {
            return Err(NetError::InvalidGram);
        }
        let mut ids = HashSet::new();
        for v in &self.vertices {
            if v.position.dim() != n {
                return Err(NetError::Dimension(format!("vertex {}", v.id)));
            }
            if v.position.iter().any(|x| x < &crate::Rational::zero() || x >= &crate::Rational::one()) {
                return Err(NetError::PositionOutOfCell(v.id.clone()));
            }
            if !ids.insert(v.id.as_str()) {
                return Err(NetError::DuplicateVertexId(v.id.clone()));
            }
        }
        for (k, e) in self.edges.iter().enumerate() {
            if e.u >= self.vertices.len() || e.v >= self.vertices.len() {
                return Err(NetError::UnknownVertex(k));
            }
            if e.offset.len() != n {
                return Err(NetError::Dimension(format!("edge {k}")));
            }
        }
        validate_generators_shape(self)
    }
}

pub(crate) fn validate_generators_shape(spec: &PeriodicGraphSpec) -> Result<(), NetError> {
    for (k, g) in spec.generators.iter().enumerate() {
        if g.dim() != spec.dim || g.linear.rows() != spec.dim || !g.linear.is_square() {
            return Err(NetError::Dimension(format!("generator {k}")));
        }
    }
    Ok(())
}

/// Why `f` fails to be a symmetry of `spec`, or `None` if it is one.
pub fn symmetry_defect(spec: &PeriodicGraphSpec, f: &Isometry, index: &SpecIndex) -> Option<String> {
    if f.dim() != spec.dim {
        return Some("dimension mismatch".into());
    }
    let Some(m) = integer_entries(&f.linear) else {
        return Some("linear part is not an integer matrix".into());
    };
    let mt = f.linear.transpose();
    if &(&mt * &spec.gram) * &f.linear != spec.gram {
        return Some("linear part does not preserve the Gram form".into());
    }
    let mut images = Vec::with_capacity(spec.vertices.len());
    let mut hit = vec![false; spec.vertices.len()];
    for v in &spec.vertices {
        let p = f.apply(&v.position);
        match index.vertex_at(&p) {
            Some((j, cell)) if !hit[j] && spec.vertices[j].scaffold == v.scaffold => {
                hit[j] = true;
                images.push((j, cell));
            }
            Some((j, _)) if hit[j] => return Some(format!("two vertices map onto {}", spec.vertices[j].id)),
            Some(_) => return Some(format!("vertex {} changes kind", v.id)),
            None => return Some(format!("vertex {} maps off the vertex set", v.id)),
        }
    }
    for e in &spec.edges {
        let (j, cu) = &images[e.u];
        let (k, cv) = &images[e.v];
        let moff = apply_int(&m, &e.offset);
        let off: Vec<i64> = (0..spec.dim).map(|i| cv[i] + moff[i] - cu[i]).collect();
        if !index.has_edge(*j, *k, off) {
            return Some(format!(
                "edge {}-{} {:?} maps off the edge set",
                spec.vertices[e.u].id, spec.vertices[e.v].id, e.offset
            ));
        }
    }
    None
}

/// True iff `f` preserves the Gram form and induces an automorphism of the net.
pub fn is_symmetry(spec: &PeriodicGraphSpec, f: &Isometry) -> bool {
    symmetry_defect(spec, f, &spec.index()).is_none()
}

/// Checks every invariant of the data model.
pub fn validate(spec: &PeriodicGraphSpec) -> Result<ValidationReport, NetError> {
    spec.check_shape()?;
    let mut seen: HashMap<&FracVector, usize> = HashMap::new();
    for (i, v) in spec.vertices.iter().enumerate() {
        if let Some(&j) = seen.get(&v.position) {
            return Err(NetError::VertexCollision(spec.vertices[j].id.clone(), v.id.clone()));
        }
        seen.insert(&v.position, i);
    }
    let mut keys = HashSet::new();
    for (k, e) in spec.edges.iter().enumerate() {
        if e.u == e.v && e.offset.iter().all(|&x| x == 0) {
            return Err(NetError::DegenerateEdge(k));
        }
        if !keys.insert(e.canonical()) {
            return Err(NetError::DuplicateEdge(k));
        }
    }
    let epsilon_sq = min_separation_sq(spec);
    if epsilon_sq.is_zero() {
        return Err(NetError::NotUniformlyDiscrete);
    }
    check_connected(spec)?;
    let index = spec.index();
    for (k, g) in spec.generators.iter().enumerate() {
        if let Some(reason) = symmetry_defect(spec, g, &index) {
            return Err(NetError::NonSymmetryGenerator { index: k, reason });
        }
    }
    Ok(ValidationReport { epsilon_sq, vertex_count: spec.vertices.len(), edge_count: spec.edges.len() })
}

/// Minimum squared Gram distance from a central-cell vertex to any other
/// vertex of the radius-1 patch. By periodicity this is the global minimum
/// among pairs at most one cell apart.
pub fn min_separation_sq(spec: &PeriodicGraphSpec) -> crate::Rational {
    let mut best: Option<crate::Rational> = None;
    for cell in cells_in_box(spec.dim, 1) {
        for (i, a) in spec.vertices.iter().enumerate() {
            for j in 0..spec.vertices.len() {
                if i == j && cell.iter().all(|&c| c == 0) {
                    continue;
                }
                let d = spec.dist_sq(&a.position, &spec.position(j, &cell));
                if best.as_ref().is_none_or(|m| d < *m) {
                    best = Some(d);
                }
            }
        }
    }
    best.unwrap_or_else(crate::Rational::zero)
}

/// Connectivity of the infinite net: the quotient graph must be connected and
/// its cycle voltages must generate all of `ℤⁿ`.
fn check_connected(spec: &PeriodicGraphSpec) -> Result<(), NetError> {
    let nv = spec.vertices.len();
    if nv == 0 {
        return Err(NetError::Disconnected("no vertices".into()));
    }
    let adj = spec.adjacency();
    let mut potential: Vec<Option<Vec<i64>>> = vec![None; nv];
    potential[0] = Some(vec![0; spec.dim]);
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        let px = potential[x].clone().unwrap();
        for (y, off) in &adj[x] {
            if potential[*y].is_none() {
                potential[*y] = Some(px.iter().zip(off).map(|(a, b)| a + b).collect());
                queue.push_back(*y);
            }
        }
    }
    if let Some(i) = potential.iter().position(Option::is_none) {
        return Err(NetError::Disconnected(format!(
            "vertex {} is not reachable from {}",
            spec.vertices[i].id, spec.vertices[0].id
        )));
    }
    let pot: Vec<Vec<i64>> = potential.into_iter().map(Option::unwrap).collect();
    let voltages: Vec<Vec<i64>> = spec
        .edges
        .iter()
        .map(|e| (0..spec.dim).map(|i| e.offset[i] + pot[e.u][i] - pot[e.v][i]).collect())
        .collect();
    if !spans_integer_lattice(&voltages, spec.dim) {
        return Err(NetError::Disconnected(
            "cycle translations generate a proper sublattice".into(),
        ));
    }
    Ok(())
}

/// True iff the integer vectors generate `ℤⁿ` (Hermite reduction with unit pivots).
pub fn spans_integer_lattice(vectors: &[Vec<i64>], n: usize) -> bool {
    let mut rows: Vec<Vec<i128>> =
        vectors.iter().map(|v| v.iter().map(|&x| x as i128).collect()).collect();
    for col in 0..n {
        // Euclid on column `col` among rows not yet used as pivots.
        let start = col;
        loop {
            let live: Vec<usize> = (start..rows.len()).filter(|&r| rows[r][col] != 0).collect();
            if live.len() <= 1 {
                break;
            }
            let p = *live.iter().min_by_key(|&&r| rows[r][col].abs()).unwrap();
            for &r in &live {
                if r != p {
                    let q = rows[r][col] / rows[p][col];
                    for j in 0..n {
                        rows[r][j] -= q * rows[p][j];
                    }
                }
            }
        }
        let Some(p) = (start..rows.len()).find(|&r| rows[r][col] != 0) else { return false };
        if rows[p][col].abs() != 1 {
            return false;
        }
        rows.swap(start, p);
    }
    true
}

#[cfg(test)]
pub(crate) mod tests;
