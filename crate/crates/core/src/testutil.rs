//! Small nets shared by unit tests.

use crate::exactmath::scalar::{int, rat};
use crate::netmodel::{oracle, Edge, PeriodicGraphSpec, Vertex};
use crate::{FracMatrix, FracVector, Isometry, Rational};

pub fn mat(rows: &[&[i64]]) -> FracMatrix {
    FracMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
}

pub fn qvec(entries: &[(i64, i64)]) -> FracVector {
    FracVector::new(entries.iter().map(|&(p, q)| rat(p, q)).collect())
}

pub fn ivec(entries: &[i64]) -> FracVector {
    FracVector::new(entries.iter().map(|&x| int(x)).collect())
}

pub fn lin(rows: &[&[i64]]) -> Isometry {
    Isometry::linear_only(mat(rows))
}

fn vertex(id: &str, pos: FracVector) -> Vertex {
    Vertex { id: id.into(), position: pos, scaffold: false }
}

pub fn hex_gram() -> FracMatrix {
    FracMatrix::from_rows(vec![vec![int(1), rat(-1, 2)], vec![rat(-1, 2), int(1)]]).unwrap()
}

fn gram_from(rows: Vec<Vec<Rational>>) -> FracMatrix {
    FracMatrix::from_rows(rows).unwrap()
}

pub fn sql() -> PeriodicGraphSpec {
    PeriodicGraphSpec {
        dim: 2,
        gram: FracMatrix::identity(2),
        vertices: vec![vertex("v", ivec(&[0, 0]))],
        edges: vec![Edge::new(0, 0, vec![1, 0]), Edge::new(0, 0, vec![0, 1])],
        generators: vec![lin(&[&[0, -1], &[1, 0]]), lin(&[&[1, 0], &[0, -1]])],
    }
}

pub fn sql_translations() -> PeriodicGraphSpec {
    PeriodicGraphSpec { generators: vec![], ..sql() }
}

pub fn hcb() -> PeriodicGraphSpec {
    PeriodicGraphSpec {
        dim: 2,
        gram: hex_gram(),
        vertices: vec![vertex("a", qvec(&[(1, 3), (2, 3)])), vertex("b", qvec(&[(2, 3), (1, 3)]))],
        edges: vec![
            Edge::new(0, 1, vec![0, 0]),
            Edge::new(0, 1, vec![-1, 0]),
            Edge::new(0, 1, vec![0, 1]),
        ],
        generators: vec![lin(&[&[1, -1], &[1, 0]]), lin(&[&[0, 1], &[1, 0]])],
    }
}

pub fn hcb_translations() -> PeriodicGraphSpec {
    PeriodicGraphSpec { generators: vec![], ..hcb() }
}

pub fn hex() -> PeriodicGraphSpec {
    PeriodicGraphSpec {
        dim: 2,
        gram: hex_gram(),
        vertices: vec![vertex("v", ivec(&[0, 0]))],
        edges: vec![
            Edge::new(0, 0, vec![1, 0]),
            Edge::new(0, 0, vec![0, 1]),
            Edge::new(0, 0, vec![1, 1]),
        ],
        generators: vec![lin(&[&[1, -1], &[1, 0]]), lin(&[&[0, 1], &[1, 0]])],
    }
}

pub fn pcu() -> PeriodicGraphSpec {
    PeriodicGraphSpec {
        dim: 3,
        gram: FracMatrix::identity(3),
        vertices: vec![vertex("v", ivec(&[0, 0, 0]))],
        edges: vec![
            Edge::new(0, 0, vec![1, 0, 0]),
            Edge::new(0, 0, vec![0, 1, 0]),
            Edge::new(0, 0, vec![0, 0, 1]),
        ],
        generators: vec![
            lin(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 1]]),
            lin(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]),
            lin(&[&[-1, 0, 0], &[0, -1, 0], &[0, 0, -1]]),
        ],
    }
}

/// Diamond over the primitive face-centred basis; generators found by the oracle.
pub fn dia() -> PeriodicGraphSpec {
    let gram = gram_from(vec![
        vec![int(2), int(1), int(1)],
        vec![int(1), int(2), int(1)],
        vec![int(1), int(1), int(2)],
    ]);
    let mut spec = PeriodicGraphSpec {
        dim: 3,
        gram,
        vertices: vec![vertex("A", ivec(&[0, 0, 0])), vertex("B", qvec(&[(1, 4), (1, 4), (1, 4)]))],
        edges: vec![
            Edge::new(0, 1, vec![0, 0, 0]),
            Edge::new(0, 1, vec![-1, 0, 0]),
            Edge::new(0, 1, vec![0, -1, 0]),
            Edge::new(0, 1, vec![0, 0, -1]),
        ],
        generators: vec![],
    };
    spec.generators = oracle::brute_force_cosets(&spec).into_iter().filter(|g| !g.is_identity()).collect();
    spec
}

pub struct Tour {
    pub group: crate::netmodel::SymmetryGroupData,
    pub sg: crate::scaffold::ScaffoldedGraph,
    pub ft: crate::touring::FundamentalTransversal,
    pub chart: crate::touring::TransversalChart,
    pub sch: crate::touring::Schedule,
}

pub fn tour(spec: &PeriodicGraphSpec) -> Tour {
    use crate::scaffold::*;
    use crate::touring::*;
    let group = crate::netmodel::close_group(spec).unwrap();
    let cfg = ScaffoldConfig::default();
    let fp = choose_free_point(spec, &group, &cfg).unwrap();
    let sg = build_scaffolded_graph(spec, &group, &fp, &cfg).unwrap();
    let start = (sg.scaffold_vertex(0), sg.scaffold_cells[0].clone());
    let ft = fundamental_transversal(&sg.spec, &group, start);
    let (chart, sch) = build_chart_and_schedule(&sg.spec, &group, &ft);
    Tour { group, sg, ft, chart, sch }
}

/// A uniformly random chained walk of `len` arcs starting at `from`.
pub fn random_walk(
    chart: &crate::touring::TransversalChart,
    rng: &mut impl rand::Rng,
    from: usize,
    len: usize,
) -> crate::touring::Itinerary {
    let mut at = from;
    let mut arcs = Vec::with_capacity(len);
    for _ in 0..len {
        let out = &chart.arcs_from[at];
        let e = out[rng.gen_range(0..out.len())];
        arcs.push(e);
        at = chart.kappa_star[chart.arcs[e].to];
    }
    crate::touring::Itinerary(arcs)
}
