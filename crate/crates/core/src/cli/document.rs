//! JSON interchange: nets, vertex/symmetry maps. Rationals travel as strings.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::exactmath::scalar::{format_rational, parse_rational};
use crate::netmodel::{EmbeddedNet, Edge, NetError, Vertex};
use crate::verify::VertexMap;
use crate::{FracMatrix, FracVector, Isometry, Rational};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {value:?} is not a rational (expected \"p\" or \"p/q\")")]
    Rational { field: String, value: String },
    #[error("{0}: wrong length")]
    Shape(String),
    #[error("edge {edge} names unknown vertex {id:?}")]
    UnknownVertex { edge: usize, id: String },
    #[error("map names unknown vertex {0:?}")]
    UnknownMapVertex(String),
    #[error("map lists vertex {0:?} more than once or not at all")]
    MapCoverage(String),
    #[error("{0}")]
    Net(#[from] NetError),
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: String,
    pub frac: Vec<String>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub scaffold: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub u: String,
    pub v: String,
    pub offset: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryDoc {
    pub linear: Vec<Vec<i64>>,
    pub translation: Vec<String>,
}

/// A net. Without `lattice`, `frac` holds fractional coordinates in
/// `[0,1)ⁿ` and `gram` is the metric of the lattice basis. With `lattice`
/// (a list of basis vectors), `frac`, `gram` and the basis vectors share one
/// ambient coordinate system. Edge offsets count lattice steps and
/// symmetries are written in lattice coordinates either way, so their
/// matrices stay integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetDocument {
    pub format_version: String,
    pub dimension: usize,
    pub gram: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<Vec<Vec<String>>>,
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default)]
    pub symmetries: Vec<SymmetryDoc>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub metadata: serde_json::Value,
}

fn parse_all(field: &str, values: &[String], n: usize) -> Result<FracVector, DocumentError> {
    if values.len() != n {
        return Err(DocumentError::Shape(field.into()));
    }
    values
        .iter()
        .map(|s| parse_rational(s).map_err(|_| DocumentError::Rational { field: field.into(), value: s.clone() }))
        .collect::<Result<Vec<Rational>, _>>()
        .map(FracVector::new)
}

fn strings(v: &FracVector) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn int_matrix(field: &str, rows: &[Vec<i64>], n: usize) -> Result<FracMatrix, DocumentError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(DocumentError::Shape(field.into()));
    }
    FracMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect())
        .map_err(|_| DocumentError::Shape(field.into()))
}

impl SymmetryDoc {
    pub fn from_isometry(g: &Isometry) -> Self {
        let n = g.translation.dim();
        SymmetryDoc {
            linear: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let x = &g.linear.get(i, j);
                            assert!(x.is_integer(), "symmetry matrices are integral in every frame we write");
                            i64::try_from(x.to_integer()).expect("small matrix entries")
                        })
                        .collect()
                })
                .collect(),
            translation: strings(&g.translation),
        }
    }

    pub fn to_isometry(&self, field: &str, n: usize) -> Result<Isometry, DocumentError> {
        Ok(Isometry { translation: parse_all(field, &self.translation, n)?, linear: int_matrix(field, &self.linear, n)? })
    }
}

impl NetDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    pub fn to_net(&self) -> Result<EmbeddedNet, DocumentError> {
        let n = self.dimension;
        if self.gram.len() != n {
            return Err(DocumentError::Shape("gram".into()));
        }
        let gram_rows = self
            .gram
            .iter()
            .enumerate()
            .map(|(i, r)| parse_all(&format!("gram row {i}"), r, n).map(|v| v.iter().cloned().collect()))
            .collect::<Result<Vec<Vec<Rational>>, _>>()?;
        let gram = FracMatrix::from_rows(gram_rows).map_err(|_| DocumentError::Shape("gram".into()))?;
        let lattice = match &self.lattice {
            None => FracMatrix::identity(n),
            Some(basis) => {
                if basis.len() != n {
                    return Err(DocumentError::Shape("lattice".into()));
                }
                let cols = basis
                    .iter()
                    .enumerate()
                    .map(|(i, b)| parse_all(&format!("lattice vector {i}"), b, n))
                    .collect::<Result<Vec<_>, _>>()?;
                FracMatrix::from_columns(&cols)
            }
        };
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                Ok(Vertex { id: v.id.clone(), position: parse_all(&format!("vertex {}", v.id), &v.frac, n)?, scaffold: v.scaffold })
            })
            .collect::<Result<Vec<_>, DocumentError>>()?;
        let index: HashMap<&str, usize> = self.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        let lookup = |edge: usize, id: &str| {
            index.get(id).copied().ok_or_else(|| DocumentError::UnknownVertex { edge, id: id.to_string() })
        };
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(k, e)| {
                if e.offset.len() != n {
                    return Err(DocumentError::Shape(format!("edge {k} offset")));
                }
                Ok(Edge::new(lookup(k, &e.u)?, lookup(k, &e.v)?, e.offset.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let symmetries = self
            .symmetries
            .iter()
            .enumerate()
            .map(|(k, g)| g.to_isometry(&format!("symmetry {k}"), n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut net = EmbeddedNet { dim: n, gram, lattice, vertices, edges, symmetries: Vec::new() };
        net.symmetries = symmetries.iter().map(|g| net.isometry_from_frame(g)).collect::<Result<_, _>>()?;
        Ok(net)
    }

    /// Writes `lattice` only when it is not the identity.
    pub fn from_net(net: &EmbeddedNet, metadata: serde_json::Value) -> Self {
        let n = net.dim;
        let lattice = (net.lattice != FracMatrix::identity(n))
            .then(|| (0..n).map(|j| strings(&net.lattice.column(j))).collect());
        NetDocument {
            format_version: FORMAT_VERSION.into(),
            dimension: n,
            gram: (0..n).map(|i| strings(&net.gram.row(i))).collect(),
            lattice,
            vertices: net
                .vertices
                .iter()
                .map(|v| VertexDoc { id: v.id.clone(), frac: strings(&v.position), scaffold: v.scaffold })
                .collect(),
            edges: net
                .edges
                .iter()
                .map(|e| EdgeDoc { u: net.vertices[e.u].id.clone(), v: net.vertices[e.v].id.clone(), offset: e.offset.clone() })
                .collect(),
            symmetries: net
                .symmetries
                .iter()
                .map(|g| SymmetryDoc::from_isometry(&net.isometry_to_frame(g).expect("independent lattice")))
                .collect(),
            metadata,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapVertexDoc {
    pub id: String,
    pub image: String,
    pub shift: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSymmetryDoc {
    pub source: SymmetryDoc,
    pub image: SymmetryDoc,
}

/// Instance `(id, c)` of the original goes to `(image, c + shift)` of the
/// new net; each symmetry coset `source` goes to `image`, each written in the
/// lattice coordinates of its own document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDocument {
    pub format_version: String,
    pub vertices: Vec<MapVertexDoc>,
    pub symmetries: Vec<MapSymmetryDoc>,
}

impl MapDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    /// `nu` pairs are in ambient coordinates.
    pub fn new(orig: &EmbeddedNet, new: &EmbeddedNet, map: &VertexMap, nu: &[(Isometry, Isometry)]) -> Self {
        let frame = |net: &EmbeddedNet, g: &Isometry| SymmetryDoc::from_isometry(&net.isometry_to_frame(g).expect("independent lattice"));
        MapDocument {
            format_version: FORMAT_VERSION.into(),
            vertices: map
                .images
                .iter()
                .enumerate()
                .map(|(i, (j, s))| MapVertexDoc { id: orig.vertices[i].id.clone(), image: new.vertices[*j].id.clone(), shift: s.clone() })
                .collect(),
            symmetries: nu
                .iter()
                .map(|(g, h)| MapSymmetryDoc { source: frame(orig, g), image: frame(new, h) })
                .collect(),
        }
    }

    /// Resolves ids against the two nets; `nu` comes back in ambient coordinates.
    pub fn resolve(&self, orig: &EmbeddedNet, new: &EmbeddedNet) -> Result<(VertexMap, Vec<(Isometry, Isometry)>), DocumentError> {
        let n = orig.dim;
        let new_index: HashMap<&str, usize> = new.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        let mut images: Vec<Option<(usize, Vec<i64>)>> = vec![None; orig.vertices.len()];
        for entry in &self.vertices {
            let i = orig
                .vertices
                .iter()
                .position(|v| v.id == entry.id)
                .ok_or_else(|| DocumentError::UnknownMapVertex(entry.id.clone()))?;
            let j = *new_index.get(entry.image.as_str()).ok_or_else(|| DocumentError::UnknownMapVertex(entry.image.clone()))?;
            if entry.shift.len() != n {
                return Err(DocumentError::Shape(format!("map shift of {}", entry.id)));
            }
            if images[i].replace((j, entry.shift.clone())).is_some() {
                return Err(DocumentError::MapCoverage(entry.id.clone()));
            }
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, x)| x.ok_or_else(|| DocumentError::MapCoverage(orig.vertices[i].id.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let nu = self
            .symmetries
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let g = s.source.to_isometry(&format!("map source {k}"), n)?;
                let h = s.image.to_isometry(&format!("map image {k}"), new.dim)?;
                Ok((orig.isometry_from_frame(&g)?, new.isometry_from_frame(&h)?))
            })
            .collect::<Result<Vec<_>, DocumentError>>()?;
        Ok((VertexMap { images }, nu))
    }
}
