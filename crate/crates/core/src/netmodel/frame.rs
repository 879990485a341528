//! Nets given over an explicit lattice basis, and their conversion to the
//! standard frame (lattice = identity, positions in `[0,1)ⁿ`).

use super::{reduce_mod_one, Edge, NetError, PeriodicGraphSpec, Vertex};
use crate::{FracMatrix, Isometry};

/// A net in ambient coordinates: `gram` is the ambient metric, the columns of
/// `lattice` are the lattice basis, and edge offsets count lattice steps.
/// Vertex positions need not lie in the unit cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedNet {
    pub dim: usize,
    pub gram: FracMatrix,
    pub lattice: FracMatrix,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub symmetries: Vec<Isometry>,
}

/// A standard-frame spec together with the cell shift of each vertex:
/// instance `(i, c)` of the embedded net is instance `(i, c + shifts[i])`.
#[derive(Debug, Clone)]
pub struct StandardForm {
    pub spec: PeriodicGraphSpec,
    pub shifts: Vec<Vec<i64>>,
}

impl EmbeddedNet {
    /// Wraps a standard spec (identity lattice).
    pub fn from_standard(spec: &PeriodicGraphSpec) -> Self {
        EmbeddedNet {
            dim: spec.dim,
            gram: spec.gram.clone(),
            lattice: FracMatrix::identity(spec.dim),
            vertices: spec.vertices.clone(),
            edges: spec.edges.clone(),
            symmetries: spec.generators.clone(),
        }
    }

    /// Converts an ambient isometry to lattice coordinates.
    pub fn isometry_to_frame(&self, f: &Isometry) -> Result<Isometry, NetError> {
        let inv = self.lattice.inverse().map_err(|_| NetError::Dimension("singular lattice".into()))?;
        Ok(Isometry {
            translation: inv.mul_vec(&f.translation),
            linear: &(&inv * &f.linear) * &self.lattice,
        })
    }

    /// Converts an isometry in lattice coordinates back to ambient ones.
    pub fn isometry_from_frame(&self, f: &Isometry) -> Result<Isometry, NetError> {
        let inv = self.lattice.inverse().map_err(|_| NetError::Dimension("singular lattice".into()))?;
        Ok(Isometry {
            translation: self.lattice.mul_vec(&f.translation),
            linear: &(&self.lattice * &f.linear) * &inv,
        })
    }

    pub fn to_standard(&self) -> Result<StandardForm, NetError> {
        let n = self.dim;
        if self.lattice.rows() != n || self.lattice.cols() != n {
            return Err(NetError::Dimension("lattice".into()));
        }
        if self.gram.rows() != n || self.gram.cols() != n {
            return Err(NetError::Dimension("gram".into()));
        }
        let inv = self.lattice.inverse().map_err(|_| NetError::Dimension("singular lattice".into()))?;
        let mut vertices = Vec::with_capacity(self.vertices.len());
        let mut shifts = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            if v.position.dim() != n {
                return Err(NetError::Dimension(format!("vertex {}", v.id)));
            }
            let (r, k) = reduce_mod_one(&inv.mul_vec(&v.position));
            vertices.push(Vertex { id: v.id.clone(), position: r, scaffold: v.scaffold });
            shifts.push(k);
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for (k, e) in self.edges.iter().enumerate() {
            if e.u >= shifts.len() || e.v >= shifts.len() {
                return Err(NetError::UnknownVertex(k));
            }
            if e.offset.len() != n {
                return Err(NetError::Dimension(format!("edge {k}")));
            }
            edges.push(Edge::new(e.u, e.v, (0..n).map(|i| e.offset[i] + shifts[e.v][i] - shifts[e.u][i]).collect()));
        }
        let generators = self
            .symmetries
            .iter()
            .map(|f| self.isometry_to_frame(f))
            .collect::<Result<Vec<_>, _>>()?;
        let gram = &(&self.lattice.transpose() * &self.gram) * &self.lattice;
        Ok(StandardForm { spec: PeriodicGraphSpec { dim: n, gram, vertices, edges, generators }, shifts })
    }
}
