//! Turning a solution vector into a net, and the degeneracy test.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactmath::scalar::{int, lcm_of_denominators};
use crate::netmodel::{cells_in_box, reduce_mod_one, Edge, EmbeddedNet, PeriodicGraphSpec, Vertex};
use crate::touring::{evaluate, LinearRow, Schedule, TransversalChart, VariableTable};
use crate::{FracMatrix, FracVector, Isometry, Rational};

use super::equations::{EquationSystem, SolutionSpace};
use super::quotient::QuotientGraph;
use super::SynthesisError;

/// Everything needed to place a solution vector.
pub struct Realizer<'a> {
    pub quotient: &'a QuotientGraph,
    pub system: &'a EquationSystem,
    pub scaffolded: &'a PeriodicGraphSpec,
    pub cosets: &'a [Isometry],
    /// Position forms of the interior class of each vertex.
    forms: Vec<Vec<LinearRow>>,
    edges: Vec<(usize, usize, Vec<i64>)>,
}

/// A realized solution. Positions, lattice and symmetries are in the
/// ambient coordinates of the input (where the input lattice is `ℤⁿ`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionNet {
    pub assignment: Vec<Rational>,
    pub gram: FracMatrix,
    /// Columns are `u′₁ … u′ₙ`.
    pub lattice: FracMatrix,
    /// Ambient positions, each inside the half-open cell spanned by `lattice`.
    pub vertices: Vec<Vertex>,
    /// Offsets count steps of `lattice`.
    pub edges: Vec<Edge>,
    /// `ν(g_k) = ⟨y′_k, M_k⟩` for each coset of the input group.
    pub nu: Vec<Isometry>,
    /// Instance `(i, c)` of the input corresponds to `(i, c + correspondence[i])`.
    pub correspondence: Vec<Vec<i64>>,
    /// Number of leading non-scaffold vertices.
    pub base_count: usize,
}

impl<'a> Realizer<'a> {
    pub fn new(
        quotient: &'a QuotientGraph,
        system: &'a EquationSystem,
        chart: &TransversalChart,
        sch: &Schedule,
        scaffolded: &'a PeriodicGraphSpec,
        cosets: &'a [Isometry],
    ) -> Self {
        let table: &VariableTable = &system.table;
        let forms = quotient
            .interior_of_vertex
            .iter()
            .map(|&q| quotient.form(chart, sch, table, &quotient.classes[q].representative).position(table))
            .collect();
        let mut edges: Vec<(usize, usize, Vec<i64>)> = quotient
            .edges
            .iter()
            .map(|&(q, c)| (quotient.classes[q].vertex, quotient.classes[c].vertex, quotient.displacement(c)))
            .collect();
        edges.sort();
        edges.dedup();
        Realizer { quotient, system, scaffolded, cosets, forms, edges }
    }

    pub fn base_count(&self) -> usize {
        self.scaffolded.vertices.iter().take_while(|v| !v.scaffold).count()
    }

    /// Places every vertex of the scaffolded net; fails only if the lattice
    /// vectors are dependent.
    pub fn realize(&self, x: &[Rational]) -> Result<SolutionNet, SynthesisError> {
        let table = &self.system.table;
        let n = table.dim;
        let lattice = FracMatrix::from_columns(
            &(0..n)
                .map(|k| FracVector::new((0..n).map(|i| x[table.lattice(k, i)].clone()).collect()))
                .collect::<Vec<_>>(),
        );
        let inv = lattice.inverse().map_err(|_| SynthesisError::CollapsedLattice)?;
        let mut vertices = Vec::with_capacity(self.forms.len());
        let mut shift = Vec::with_capacity(self.forms.len());
        for (i, form) in self.forms.iter().enumerate() {
            let p = evaluate(form, x);
            let (_, k) = reduce_mod_one(&inv.mul_vec(&p));
            let rep = &p - &lattice.mul_vec(&crate::netmodel::cell_vector(&k));
            let v = &self.scaffolded.vertices[i];
            vertices.push(Vertex { id: v.id.clone(), position: rep, scaffold: v.scaffold });
            shift.push(k);
        }
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|(u, v, delta)| Edge::new(*u, *v, (0..n).map(|i| delta[i] + shift[*v][i] - shift[*u][i]).collect()))
            .collect();
        edges.sort_by_key(Edge::canonical);
        edges.dedup_by_key(|e| e.canonical());
        let nu = (0..self.cosets.len())
            .map(|k| Isometry {
                translation: FracVector::new((0..n).map(|i| x[table.coset(k, i)].clone()).collect()),
                linear: self.cosets[k].linear.clone(),
            })
            .collect();
        let correspondence = self
            .quotient
            .interior_of_vertex
            .iter()
            .enumerate()
            .map(|(i, &q)| (0..n).map(|j| shift[i][j] - self.quotient.classes[q].cell[j]).collect())
            .collect();
        Ok(SolutionNet {
            assignment: x.to_vec(),
            gram: self.scaffolded.gram.clone(),
            lattice,
            vertices,
            edges,
            nu,
            correspondence,
            base_count: self.base_count(),
        })
    }
}

impl SolutionNet {
    pub fn dim(&self) -> usize {
        self.lattice.rows()
    }

    fn embedded(&self, keep: impl Fn(usize) -> bool) -> EmbeddedNet {
        let kept: Vec<usize> = (0..self.vertices.len()).filter(|&i| keep(i)).collect();
        let mut new_index = vec![usize::MAX; self.vertices.len()];
        for (k, &i) in kept.iter().enumerate() {
            new_index[i] = k;
        }
        EmbeddedNet {
            dim: self.dim(),
            gram: self.gram.clone(),
            lattice: self.lattice.clone(),
            vertices: kept.iter().map(|&i| self.vertices[i].clone()).collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| keep(e.u) && keep(e.v))
                .map(|e| Edge::new(new_index[e.u], new_index[e.v], e.offset.clone()))
                .collect(),
            symmetries: self.nu.clone(),
        }
    }

    /// The re-embedded net with scaffold vertices and edges dropped.
    pub fn output(&self) -> EmbeddedNet {
        self.embedded(|i| i < self.base_count)
    }

    /// The scaffolded re-embedding, scaffold included.
    pub fn scaffolded(&self) -> EmbeddedNet {
        self.embedded(|_| true)
    }

    /// Standard-frame spec of the scaffolded re-embedding. Positions are
    /// inside the lattice cell, so no vertex shifts occur.
    pub fn standard_spec(&self) -> PeriodicGraphSpec {
        self.scaffolded().to_standard().expect("lattice is independent").spec
    }

    /// Denominators of the output positions, lattice and `ν` translations.
    pub fn denominator_lcm(&self) -> BigInt {
        let out = self.output();
        let values = out
            .vertices
            .iter()
            .flat_map(|v| v.position.iter())
            .chain(out.lattice.entries().iter())
            .chain(self.nu.iter().flat_map(|g| g.translation.iter()));
        lcm_of_denominators(values)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Degeneracy {
    /// Two distinct vertices occupy one point.
    Collision { first: String, second: String, point: FracVector },
    /// Two non-scaffold edges on four distinct vertices meet.
    Crossing { first: (String, Vec<i64>, String, Vec<i64>), second: (String, Vec<i64>, String, Vec<i64>), point: FracVector },
}

impl std::fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use crate::exactmath::scalar::format_rational;
        let pt = |p: &FracVector| p.iter().map(format_rational).collect::<Vec<_>>().join(", ");
        match self {
            Degeneracy::Collision { first, second, point } => write!(f, "vertices {first} and {second} meet at ({})", pt(point)),
            Degeneracy::Crossing { first, second, point } => write!(
                f,
                "edges {}{:?}-{}{:?} and {}{:?}-{}{:?} meet at ({})",
                first.0, first.1, first.2, first.3, second.0, second.1, second.2, second.3,
                pt(point)
            ),
        }
    }
}

/// Intersection point of closed segments `[p, q]` and `[r, w]`, if any.
pub fn segment_intersection(p: &FracVector, q: &FracVector, r: &FracVector, w: &FracVector) -> Option<FracVector> {
    let n = p.dim();
    let d1 = q - p;
    let d2 = w - r;
    let e = r - p;
    let minor = |a: &FracVector, b: &FracVector, i: usize, j: usize| &a[i] * &b[j] - &a[j] * &b[i];
    for i in 0..n {
        for j in i + 1..n {
            // s·d1 − t·d2 = e restricted to coordinates i, j.
            let det = -minor(&d1, &d2, i, j);
            if det.is_zero() {
                continue;
            }
            let s = -minor(&e, &d2, i, j) / &det;
            let t = minor(&d1, &e, i, j) / &det;
            let zero = Rational::zero();
            let one = Rational::one();
            if s < zero || s > one || t < zero || t > one {
                return None;
            }
            let x = p + &d1.scale(&s);
            return (x == r + &d2.scale(&t)).then_some(x);
        }
    }
    // Parallel: they meet only if collinear and overlapping.
    let a = (0..n).find(|&i| !d1[i].is_zero())?;
    if (0..n).any(|i| (0..n).any(|j| !minor(&d1, &e, i, j).is_zero())) {
        return None;
    }
    let sr = &e[a] / &d1[a];
    let sw = (&w[a] - &p[a]) / &d1[a];
    let (lo, hi) = if sr <= sw { (sr, sw) } else { (sw, sr) };
    let lo = lo.max(Rational::zero());
    let hi = hi.min(Rational::one());
    (lo <= hi).then(|| p + &d1.scale(&lo))
}

/// Vertex collisions, then crossings of non-scaffold edges. Pairs of edge
/// translates are enumerated exactly: a translate is tested only if the
/// coordinate boxes of the two segments overlap.
pub fn is_degenerate(spec: &PeriodicGraphSpec) -> Option<Degeneracy> {
    let n = spec.dim;
    for (i, a) in spec.vertices.iter().enumerate() {
        for b in &spec.vertices[i + 1..] {
            if a.position == b.position {
                return Some(Degeneracy::Collision { first: a.id.clone(), second: b.id.clone(), point: a.position.clone() });
            }
        }
    }
    let edges: Vec<&Edge> = spec.edges.iter().filter(|e| !spec.vertices[e.u].scaffold && !spec.vertices[e.v].scaffold).collect();
    let ends: Vec<(FracVector, FracVector)> =
        edges.iter().map(|e| (spec.vertices[e.u].position.clone(), spec.position(e.v, &e.offset))).collect();
    let bounds: Vec<(Vec<Rational>, Vec<Rational>)> = ends
        .iter()
        .map(|(p, q)| {
            let lo = (0..n).map(|i| p[i].clone().min(q[i].clone())).collect();
            let hi = (0..n).map(|i| p[i].clone().max(q[i].clone())).collect();
            (lo, hi)
        })
        .collect();
    let id = |v: usize| spec.vertices[v].id.clone();
    for a in 0..edges.len() {
        for b in a..edges.len() {
            // Translate edge a by c; boxes overlap iff lo_b − hi_a ≤ c ≤ hi_b − lo_a.
            let lo: Vec<i64> = (0..n).map(|i| (&bounds[b].0[i] - &bounds[a].1[i]).ceil().to_integer().try_into().unwrap()).collect();
            let hi: Vec<i64> = (0..n).map(|i| (&bounds[b].1[i] - &bounds[a].0[i]).floor().to_integer().try_into().unwrap()).collect();
            let span = lo.iter().chain(&hi).map(|x| x.abs()).max().unwrap_or(0);
            for c in cells_in_box(n, span) {
                if (0..n).any(|i| c[i] < lo[i] || c[i] > hi[i]) || (a == b && c.iter().all(|&x| x == 0)) {
                    continue;
                }
                let (ea, eb) = (edges[a], edges[b]);
                let off_a: Vec<i64> = (0..n).map(|i| ea.offset[i] + c[i]).collect();
                let inst = [(ea.u, c.clone()), (ea.v, off_a.clone()), (eb.u, vec![0; n]), (eb.v, eb.offset.clone())];
                if (0..4).any(|i| (i + 1..4).any(|j| inst[i] == inst[j])) {
                    continue;
                }
                let cv = crate::netmodel::cell_vector(&c);
                let p = &ends[a].0 + &cv;
                let q = &ends[a].1 + &cv;
                if let Some(x) = segment_intersection(&p, &q, &ends[b].0, &ends[b].1) {
                    return Some(Degeneracy::Crossing {
                        first: (id(ea.u), c, id(ea.v), off_a),
                        second: (id(eb.u), vec![0; n], id(eb.v), eb.offset.clone()),
                        point: x,
                    });
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub max_attempts: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { seed: 0, max_attempts: 200 }
    }
}

/// Outcome of one candidate: why it was rejected, if it was.
fn judge(realizer: &Realizer<'_>, x: &[Rational]) -> Result<SolutionNet, String> {
    let net = realizer.realize(x).map_err(|e| e.to_string())?;
    match is_degenerate(&net.standard_spec()) {
        Some(d) => Err(d.to_string()),
        None => Ok(net),
    }
}

/// Tries `start`, then `start + Σ kᵢ/2ʲ bᵢ` for seeded `kᵢ ∈ [−4, 4]` with
/// `j` growing every few attempts. Returns the net and the attempt index.
pub fn find_nondegenerate_rational(
    realizer: &Realizer<'_>,
    space: &SolutionSpace,
    start: &[Rational],
    config: &SamplerConfig,
) -> Result<(SolutionNet, usize), SynthesisError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for attempt in 0..config.max_attempts {
        let x = if attempt == 0 {
            start.to_vec()
        } else {
            let j = 1 + (attempt - 1) / 4;
            let denom = int(2).pow(j.min(62) as i32);
            let coords: Vec<Rational> = (0..space.dim()).map(|_| int(rng.gen_range(-4..=4)) / &denom).collect();
            let delta = space.combine(&coords);
            start.iter().zip(&delta).map(|(a, b)| a + b).collect()
        };
        if let Ok(net) = judge(realizer, &x) {
            return Ok((net, attempt));
        }
    }
    Err(SynthesisError::SearchExhausted { attempts: config.max_attempts })
}

/// Multiplies the solution by the LCM of the output denominators. Returns the
/// scaled net and the factor.
pub fn scale_to_integers(realizer: &Realizer<'_>, net: &SolutionNet) -> Result<(SolutionNet, BigInt), SynthesisError> {
    let m = net.denominator_lcm();
    if m.is_one() {
        return Ok((net.clone(), m));
    }
    debug_assert!(m.is_positive());
    let factor = Rational::from_integer(m.clone());
    let x: Vec<Rational> = net.assignment.iter().map(|v| v * &factor).collect();
    Ok((realizer.realize(&x)?, m))
}
