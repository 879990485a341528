//! Itinerary classes: one interior class per translation orbit of the
//! scaffolded graph, plus boundary classes for lattice translates of them.

use std::collections::{BTreeMap, VecDeque};

use crate::netmodel::PeriodicGraphSpec;
use crate::touring::{check_chain, endpoint, form_of, matrix_component, Itinerary, LinearForm, Schedule, TransversalChart, VariableTable};
use crate::{FracMatrix, FracVector};

use super::SynthesisError;

#[derive(Debug, Clone)]
pub struct QuotientClass {
    pub representative: Itinerary,
    /// Every explored itinerary ending at `endpoint`, the representative first.
    pub members: Vec<Itinerary>,
    /// Exact point `σ*(𝐭)(a)`.
    pub endpoint: FracVector,
    /// `T` symbol of the endpoint's orbit.
    pub end_type: usize,
    pub matrix: FracMatrix,
    /// Translation orbit (vertex index of the scaffolded spec).
    pub vertex: usize,
    /// `endpoint = position(vertex) + cell`.
    pub cell: Vec<i64>,
    pub interior: bool,
}

#[derive(Debug, Clone)]
pub struct QuotientGraph {
    pub classes: Vec<QuotientClass>,
    /// Interior class of each vertex index.
    pub interior_of_vertex: Vec<usize>,
    /// `E_Q` as `(interior class, class)` pairs, one per non-lattice arc
    /// leaving an interior representative.
    pub edges: Vec<(usize, usize)>,
}

impl QuotientGraph {
    pub fn interior(&self) -> impl Iterator<Item = (usize, &QuotientClass)> {
        self.classes.iter().enumerate().filter(|(_, c)| c.interior)
    }

    pub fn boundary(&self) -> impl Iterator<Item = (usize, &QuotientClass)> {
        self.classes.iter().enumerate().filter(|(_, c)| !c.interior)
    }

    pub fn interior_count(&self) -> usize {
        self.classes.iter().filter(|c| c.interior).count()
    }

    /// Lattice step from the interior class of `c`'s orbit to `c`.
    pub fn displacement(&self, c: usize) -> Vec<i64> {
        let class = &self.classes[c];
        let rep = &self.classes[self.interior_of_vertex[class.vertex]];
        class.cell.iter().zip(&rep.cell).map(|(a, b)| a - b).collect()
    }

    pub fn form(&self, chart: &TransversalChart, sch: &Schedule, table: &VariableTable, it: &Itinerary) -> LinearForm {
        form_of(chart, sch, it, table).expect("retained itineraries are chained from t₀")
    }
}

/// Breadth-first growth from `□`. An extension whose endpoint is already a
/// class joins it; otherwise it founds an interior class if its translation
/// orbit has none yet, and a boundary class if it does.
pub fn build_quotient_graph(
    chart: &TransversalChart,
    sch: &Schedule,
    spec: &PeriodicGraphSpec,
) -> Result<QuotientGraph, SynthesisError> {
    let index = spec.index();
    let nv = spec.vertices.len();
    let max_arcs = chart.arcs_from.iter().map(Vec::len).max().unwrap_or(0);
    let cap = nv * (max_arcs + 1) + 1;

    let mut classes: Vec<QuotientClass> = Vec::new();
    let mut by_endpoint: BTreeMap<FracVector, usize> = BTreeMap::new();
    let mut interior_of_vertex: Vec<Option<usize>> = vec![None; nv];
    let mut edges = Vec::new();
    let mut queue = VecDeque::new();

    let mut admit = |it: Itinerary,
                     classes: &mut Vec<QuotientClass>,
                     queue: &mut VecDeque<usize>|
     -> Result<usize, SynthesisError> {
        let p = endpoint(chart, sch, &it).map_err(SynthesisError::Touring)?;
        if let Some(&c) = by_endpoint.get(&p) {
            classes[c].members.push(it);
            return Ok(c);
        }
        let (vertex, cell) = index.vertex_at(&p).ok_or_else(|| SynthesisError::OffNet(format!("{:?}", it.0)))?;
        let interior = interior_of_vertex[vertex].is_none();
        let c = classes.len();
        if interior {
            interior_of_vertex[vertex] = Some(c);
            queue.push_back(c);
        }
        classes.push(QuotientClass {
            end_type: check_chain(chart, &it, chart.origin()).map_err(SynthesisError::Touring)?,
            matrix: matrix_component(chart, sch, &it).map_err(SynthesisError::Touring)?,
            representative: it.clone(),
            members: vec![it],
            endpoint: p.clone(),
            vertex,
            cell,
            interior,
        });
        by_endpoint.insert(p, c);
        if classes.len() > cap {
            return Err(SynthesisError::NonHalting(cap));
        }
        Ok(c)
    };

    admit(Itinerary::empty(), &mut classes, &mut queue)?;
    while let Some(q) = queue.pop_front() {
        let rep = classes[q].representative.clone();
        let ty = classes[q].end_type;
        for &e in &chart.arcs_from[ty] {
            let c = admit(rep.extended(e), &mut classes, &mut queue)?;
            if chart.arcs[e].lattice.is_none() {
                edges.push((q, c));
            }
        }
    }
    let interior_of_vertex = interior_of_vertex
        .into_iter()
        .enumerate()
        .map(|(v, c)| c.ok_or_else(|| SynthesisError::OffNet(format!("vertex {} never reached", spec.vertices[v].id))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QuotientGraph { classes, interior_of_vertex, edges })
}
