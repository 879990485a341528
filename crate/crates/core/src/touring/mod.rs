//! Walking the scaffolded graph: fundamental transversal, transversal chart,
//! train isometries, itineraries and their linear forms.

mod forms;

use std::collections::{BTreeMap, BTreeSet};

pub use forms::{evaluate, form_of, LinearForm, LinearRow, VariableTable};

use crate::netmodel::{integer_entries, orbit_partition, PeriodicGraphSpec, SymmetryGroupData};
use crate::{FracMatrix, FracVector, Isometry};

/// A vertex translate: vertex index and cell.
pub type Instance = (usize, Vec<i64>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TouringError {
    #[error("itinerary breaks its chain at arc {0}")]
    ChainBroken(usize),
    #[error("itinerary does not start at the free point")]
    NotAnchored,
}

fn instance_key<'a>(spec: &'a PeriodicGraphSpec, x: &'a Instance) -> (&'a str, &'a [i64]) {
    (spec.vertices[x.0].id.as_str(), x.1.as_slice())
}

fn neighbors(adj: &[Vec<(usize, Vec<i64>)>], x: &Instance) -> Vec<Instance> {
    adj[x.0]
        .iter()
        .map(|(j, off)| (*j, x.1.iter().zip(off).map(|(a, b)| a + b).collect()))
        .collect()
}

/// A connected set of vertex instances meeting every orbit once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalTransversal {
    /// `S`, in the order the greedy growth adjoined them.
    pub members: Vec<Instance>,
    /// `∂S`, sorted by (vertex id, cell).
    pub boundary: Vec<Instance>,
    /// `κ`: index into `members` of each boundary instance's orbit representative.
    pub kappa: Vec<usize>,
}

/// Greedy orbit growth from `start`: repeatedly adjoin the least boundary
/// instance (by vertex id, then cell) whose orbit is not yet represented.
pub fn fundamental_transversal(
    spec: &PeriodicGraphSpec,
    group: &SymmetryGroupData,
    start: Instance,
) -> FundamentalTransversal {
    let mut orbit_of = vec![0; spec.vertices.len()];
    let classes = orbit_partition(spec, group);
    for (k, c) in classes.iter().enumerate() {
        for &i in c {
            orbit_of[i] = k;
        }
    }
    let adj = spec.adjacency();
    let mut members = vec![start.clone()];
    let mut represented = BTreeSet::from([orbit_of[start.0]]);
    while represented.len() < classes.len() {
        let in_s: BTreeSet<&Instance> = members.iter().collect();
        let next = members
            .iter()
            .flat_map(|x| neighbors(&adj, x))
            .filter(|y| !in_s.contains(y) && !represented.contains(&orbit_of[y.0]))
            .min_by(|p, q| instance_key(spec, p).cmp(&instance_key(spec, q)))
            .expect("connected net reaches every orbit");
        represented.insert(orbit_of[next.0]);
        members.push(next);
    }
    let in_s: BTreeSet<&Instance> = members.iter().collect();
    let mut boundary: Vec<Instance> = members
        .iter()
        .flat_map(|x| neighbors(&adj, x))
        .filter(|y| !in_s.contains(y))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    boundary.sort_by(|p, q| instance_key(spec, p).cmp(&instance_key(spec, q)));
    let kappa = boundary
        .iter()
        .map(|y| members.iter().position(|x| orbit_of[x.0] == orbit_of[y.0]).unwrap())
        .collect();
    FundamentalTransversal { members, boundary, kappa }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartArc {
    pub from: usize,
    pub to: usize,
    /// `Some(i)` for the arc from `t₀` to `a + eᵢ` that installs the lattice
    /// and is not an edge of the net.
    pub lattice: Option<usize>,
}

/// Symbols `T ∪ ∂T`, arcs `Σ`, `κ*` and the scheduling function `π`.
#[derive(Debug, Clone)]
pub struct TransversalChart {
    /// Symbols `0..t_count` form `T`; `t₀ = 0` is the free point.
    pub t_count: usize,
    /// `π`: symbol to vertex instance.
    pub instances: Vec<Instance>,
    pub positions: Vec<FracVector>,
    pub kappa_star: Vec<usize>,
    pub arcs: Vec<ChartArc>,
    /// Arcs leaving each `T` symbol.
    pub arcs_from: Vec<Vec<usize>>,
}

impl TransversalChart {
    pub fn is_boundary(&self, sym: usize) -> bool {
        sym >= self.t_count
    }

    pub fn arc_index(&self, from: usize, to: usize) -> Option<usize> {
        self.arcs.iter().position(|a| a.from == from && a.to == to)
    }

    /// Symbol `t₀`, the free point.
    pub fn origin(&self) -> usize {
        0
    }
}

/// Train isometries and their linear parts.
#[derive(Debug, Clone)]
pub struct Schedule {
    /// Per symbol: `⟨m, M⟩` mapping `κ(y)` onto `y` (identity on `T`).
    pub boundary: Vec<Isometry>,
    /// `σ(x, y) = ⟨m + M(κ(y) − x), M⟩`.
    pub sigma: Vec<Isometry>,
    /// `σ` conjugated into the frame of the free point:
    /// `⟨a − x, I⟩ σ(x, y) ⟨x − a, I⟩`.
    pub sigma_tilde: Vec<Isometry>,
    pub mu: Vec<FracMatrix>,
    pub mu_int: Vec<Vec<Vec<i64>>>,
}

fn least_mapping(group: &SymmetryGroupData, from: &FracVector, to: &FracVector) -> Isometry {
    group
        .elements_mapping(from, to)
        .into_iter()
        .min_by(|f, g| (&f.linear, &f.translation).cmp(&(&g.linear, &g.translation)))
        .expect("boundary instance lies in the orbit of its representative")
}

/// Builds the chart and schedule; `a` is the free point, `S[0]`.
pub fn build_chart_and_schedule(
    spec: &PeriodicGraphSpec,
    group: &SymmetryGroupData,
    ft: &FundamentalTransversal,
) -> (TransversalChart, Schedule) {
    let n = spec.dim;
    let mut instances: Vec<Instance> = ft.members.clone();
    instances.extend(ft.boundary.iter().cloned());
    let t_count = ft.members.len();
    let mut kappa_star: Vec<usize> = (0..t_count).collect();
    kappa_star.extend(ft.kappa.iter().copied());
    let sym_of: BTreeMap<Instance, usize> = instances.iter().cloned().enumerate().map(|(k, x)| (x, k)).collect();
    let adj = spec.adjacency();
    let mut arcs = Vec::new();
    for (x, inst) in ft.members.iter().enumerate() {
        let mut targets: Vec<usize> = neighbors(&adj, inst).iter().map(|y| sym_of[y]).collect();
        targets.sort();
        targets.dedup();
        arcs.extend(targets.into_iter().map(|y| ChartArc { from: x, to: y, lattice: None }));
    }
    // Install the lattice: arcs from t₀ to a + eᵢ.
    let t0 = &ft.members[0];
    for i in 0..n {
        let mut cell = t0.1.clone();
        cell[i] += 1;
        let target = (t0.0, cell);
        let sym = match sym_of.get(&target) {
            Some(&s) => s,
            None => {
                instances.push(target);
                kappa_star.push(0);
                instances.len() - 1
            }
        };
        if !arcs.iter().any(|a| a.from == 0 && a.to == sym) {
            arcs.push(ChartArc { from: 0, to: sym, lattice: Some(i) });
        }
    }
    arcs.sort_by_key(|a| (a.from, a.to));
    let positions: Vec<FracVector> = instances.iter().map(|(i, c)| spec.position(*i, c)).collect();
    let boundary: Vec<Isometry> = (0..instances.len())
        .map(|s| {
            if s < t_count {
                Isometry::identity(n)
            } else {
                least_mapping(group, &positions[kappa_star[s]], &positions[s])
            }
        })
        .collect();
    let a = &positions[0];
    let mut sigma = Vec::new();
    let mut sigma_tilde = Vec::new();
    let mut mu = Vec::new();
    for arc in &arcs {
        let x = &positions[arc.from];
        let y = &positions[arc.to];
        let s = if arc.to < t_count {
            Isometry::translation_by(y - x)
        } else {
            let b = &boundary[arc.to];
            let k = &positions[kappa_star[arc.to]];
            Isometry { translation: &b.translation + &b.linear.mul_vec(&(k - x)), linear: b.linear.clone() }
        };
        let t = Isometry::translation_by(a - x)
            .compose(&s)
            .compose(&Isometry::translation_by(x - a));
        mu.push(s.linear.clone());
        sigma.push(s);
        sigma_tilde.push(t);
    }
    let mut arcs_from = vec![Vec::new(); t_count];
    for (k, arc) in arcs.iter().enumerate() {
        arcs_from[arc.from].push(k);
    }
    let mu_int = mu.iter().map(|m| integer_entries(m).expect("integer point group")).collect();
    (
        TransversalChart { t_count, instances, positions, kappa_star, arcs, arcs_from },
        Schedule { boundary, sigma, sigma_tilde, mu, mu_int },
    )
}

/// A string of arcs with `κ*(tᵢ′) = tᵢ₊₁`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Itinerary(pub Vec<usize>);

impl Itinerary {
    pub fn empty() -> Self {
        Itinerary(Vec::new())
    }

    pub fn extended(&self, arc: usize) -> Self {
        let mut v = self.0.clone();
        v.push(arc);
        Itinerary(v)
    }

    pub fn concat(&self, other: &Itinerary) -> Self {
        Itinerary([self.0.clone(), other.0.clone()].concat())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Checks chaining; returns the `T` symbol the walk ends on (its type).
pub fn check_chain(chart: &TransversalChart, it: &Itinerary, start: usize) -> Result<usize, TouringError> {
    let mut at = start;
    for (k, &e) in it.0.iter().enumerate() {
        let arc = chart.arcs.get(e).ok_or(TouringError::ChainBroken(k))?;
        if arc.from != at {
            return Err(TouringError::ChainBroken(k));
        }
        at = chart.kappa_star[arc.to];
    }
    Ok(at)
}

/// `σ*`: product of the (free-point frame) train isometries along the walk.
pub fn sigma_star(chart: &TransversalChart, sch: &Schedule, it: &Itinerary) -> Result<Isometry, TouringError> {
    let start = it.0.first().map_or(0, |&e| chart.arcs.get(e).map_or(usize::MAX, |a| a.from));
    check_chain(chart, it, start)?;
    let n = chart.positions[0].dim();
    Ok(it.0.iter().fold(Isometry::identity(n), |acc, &e| acc.compose(&sch.sigma_tilde[e])))
}

/// Product of the matrix assignment along the walk.
pub fn matrix_component(chart: &TransversalChart, sch: &Schedule, it: &Itinerary) -> Result<FracMatrix, TouringError> {
    let start = it.0.first().map_or(0, |&e| chart.arcs.get(e).map_or(usize::MAX, |a| a.from));
    check_chain(chart, it, start)?;
    let n = chart.positions[0].dim();
    Ok(it.0.iter().fold(FracMatrix::identity(n), |acc, &e| &acc * &sch.mu[e]))
}

/// The symmetry `σ*(it) ∘ ⟨a − κ(end), I⟩` carrying the walk's frame; it maps
/// the type of the endpoint onto the endpoint.
pub fn walk_symmetry_certificate(chart: &TransversalChart, sch: &Schedule, it: &Itinerary) -> Result<Isometry, TouringError> {
    let end = check_chain(chart, it, chart.origin()).map_err(|e| match (e, it.0.first()) {
        (TouringError::ChainBroken(0), Some(&f)) if chart.arcs.get(f).is_some_and(|a| a.from != 0) => {
            TouringError::NotAnchored
        }
        (e, _) => e,
    })?;
    let s = sigma_star(chart, sch, it)?;
    let a = &chart.positions[0];
    Ok(s.compose(&Isometry::translation_by(a - &chart.positions[end])))
}

/// The point the walk reaches: `σ*(it)(a)`.
pub fn endpoint(chart: &TransversalChart, sch: &Schedule, it: &Itinerary) -> Result<FracVector, TouringError> {
    Ok(sigma_star(chart, sch, it)?.apply(&chart.positions[0]))
}
