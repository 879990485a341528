//! The homogeneous integer system whose solutions are candidate re-embeddings.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::exactmath::nullspace::Echelon;
use crate::exactmath::scalar::{int, rat};
use crate::netmodel::{integer_entries, SymmetryGroupData};
use crate::touring::{evaluate, LinearRow, Schedule, TransversalChart, VariableTable};
use crate::{FracVector, Rational};

use super::quotient::QuotientGraph;
use super::SynthesisError;

/// Construction rule that produced an equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Two itineraries reaching the same point.
    Equivalence,
    /// A boundary class is a lattice translate of an interior class.
    Displacement,
    /// Displacement back to the free point's class.
    ScaffoldReturn,
    /// A coset maps a unit-cell corner onto a corner.
    Corner,
    /// Point-group matrices act on the new lattice basis as on the old one.
    CornerFrame,
    /// Where each coset sends each interior class.
    Orbit,
    /// The coset multiplication table.
    Table,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::Equivalence => "a",
            Family::Displacement => "b",
            Family::ScaffoldReturn => "c",
            Family::Corner => "d",
            Family::CornerFrame => "d-frame",
            Family::Orbit => "e",
            Family::Table => "f",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub family: Family,
    pub label: String,
    pub terms: LinearRow,
}

#[derive(Debug, Clone)]
pub struct EquationSystem {
    pub table: VariableTable,
    pub names: Vec<String>,
    pub equations: Vec<Equation>,
    pub seed: Vec<Rational>,
}

impl EquationSystem {
    pub fn residual(&self, eq: &Equation, values: &[Rational]) -> Rational {
        evaluate(std::slice::from_ref(&eq.terms), values)[0].clone()
    }

    pub fn is_solution(&self, values: &[Rational]) -> bool {
        self.equations.iter().all(|eq| self.residual(eq, values).is_zero())
    }

    pub fn count(&self, family: Family) -> usize {
        self.equations.iter().filter(|e| e.family == family).count()
    }
}

fn add(row: &mut LinearRow, var: usize, c: i64) {
    if c == 0 {
        return;
    }
    let e = row.entry(var).or_insert(0);
    *e += c;
    if *e == 0 {
        row.remove(&var);
    }
}

fn add_row(row: &mut LinearRow, other: &LinearRow, k: i64) {
    for (&v, &c) in other {
        add(row, v, k * c);
    }
}

/// `Σ δ_k u_k` coordinate `j`.
fn lattice_terms(row: &mut LinearRow, table: &VariableTable, delta: &[i64], j: usize, sign: i64) {
    for (k, &d) in delta.iter().enumerate() {
        add(row, table.lattice(k, j), sign * d);
    }
}

struct Emitter {
    equations: Vec<Equation>,
}

impl Emitter {
    fn push(&mut self, family: Family, label: String, terms: LinearRow) {
        if !terms.is_empty() {
            self.equations.push(Equation { family, label, terms });
        }
    }
}

/// Emits all families and checks that the original net solves them.
pub fn emit_equations(
    qg: &QuotientGraph,
    chart: &TransversalChart,
    sch: &Schedule,
    group: &SymmetryGroupData,
    free_point: &FracVector,
    spec: &crate::netmodel::PeriodicGraphSpec,
) -> Result<EquationSystem, SynthesisError> {
    let n = chart.positions[0].dim();
    let table = VariableTable::new(n, chart.arcs.len(), group.order());
    let seed = table.seed(sch, &group.cosets, free_point);
    let names = table.names(chart);
    let mut out = Emitter { equations: Vec::new() };

    let positions: Vec<Vec<LinearRow>> = qg
        .classes
        .iter()
        .map(|c| qg.form(chart, sch, &table, &c.representative).position(&table))
        .collect();

    // (a) members of a class share its position.
    for (ci, class) in qg.classes.iter().enumerate() {
        for (mi, m) in class.members.iter().enumerate().skip(1) {
            let p = qg.form(chart, sch, &table, m).position(&table);
            for j in 0..n {
                let mut row = p[j].clone();
                add_row(&mut row, &positions[ci][j], -1);
                out.push(Family::Equivalence, format!("class {ci} member {mi} coord {j}"), row);
            }
        }
    }

    // (b), (c) boundary classes are lattice translates of interior ones.
    for (bi, _) in qg.boundary() {
        let delta = qg.displacement(bi);
        let r = qg.interior_of_vertex[qg.classes[bi].vertex];
        let family = if r == 0 { Family::ScaffoldReturn } else { Family::Displacement };
        for j in 0..n {
            let mut row = positions[bi][j].clone();
            add_row(&mut row, &positions[r][j], -1);
            lattice_terms(&mut row, &table, &delta, j, -1);
            out.push(family, format!("class {bi} over class {r} coord {j}"), row);
        }
    }

    let mats: Vec<Vec<Vec<i64>>> = group
        .cosets
        .iter()
        .map(|g| integer_entries(&g.linear).expect("integer point group"))
        .collect();

    // (d) corners Σ (−1)^ιᵢ eᵢ / 2 that a coset permutes exactly.
    let corners: Vec<Vec<i64>> = (0..1usize << n).map(|m| (0..n).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect()).collect();
    for (k, g) in group.cosets.iter().enumerate() {
        for (ci, c) in corners.iter().enumerate() {
            let p = FracVector::new(c.iter().map(|&s| rat(s, 2)).collect());
            let image = g.apply(&p);
            let Some(cj) = corners
                .iter()
                .position(|d| d.iter().zip(image.iter()).all(|(&s, x)| *x == rat(s, 2)))
            else {
                continue;
            };
            for j in 0..n {
                let mut row = LinearRow::new();
                add(&mut row, table.coset(k, j), 2);
                for (i, &s) in c.iter().enumerate() {
                    for l in 0..n {
                        add(&mut row, table.lattice(i, l), s * mats[k][j][l]);
                    }
                }
                for (i, &s) in corners[cj].iter().enumerate() {
                    add(&mut row, table.lattice(i, j), -s);
                }
                out.push(Family::Corner, format!("coset {k} corner {ci} -> {cj} coord {j}"), row);
            }
        }
    }
    let mut distinct: Vec<&Vec<Vec<i64>>> = mats.iter().collect();
    distinct.sort();
    distinct.dedup();
    for m in distinct {
        if m.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &x)| x == i64::from(i == j))) {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let mut row = LinearRow::new();
                for l in 0..n {
                    add(&mut row, table.lattice(i, l), m[j][l]);
                }
                for mm in 0..n {
                    add(&mut row, table.lattice(mm, j), -m[mm][i]);
                }
                out.push(Family::CornerFrame, format!("matrix {m:?} on u{} coord {j}", i + 1), row);
            }
        }
    }

    // (e) each coset maps each interior class onto a translate of an interior class.
    let index = spec.index();
    for (k, g) in group.cosets.iter().enumerate() {
        for (qi, q) in qg.interior() {
            let image = g.apply(&q.endpoint);
            let (v, cell) = index.vertex_at(&image).ok_or_else(|| SynthesisError::OffNet(format!("coset {k} on class {qi}")))?;
            let target = qg.interior_of_vertex[v];
            let delta: Vec<i64> = cell.iter().zip(&qg.classes[target].cell).map(|(a, b)| a - b).collect();
            for j in 0..n {
                let mut row = LinearRow::new();
                add(&mut row, table.coset(k, j), 1);
                for l in 0..n {
                    add_row(&mut row, &positions[qi][l], mats[k][j][l]);
                }
                add_row(&mut row, &positions[target][j], -1);
                lattice_terms(&mut row, &table, &delta, j, -1);
                out.push(Family::Orbit, format!("coset {k} on class {qi} -> class {target} coord {j}"), row);
            }
        }
    }

    // (f) gᵢ gⱼ = τ_d g_k.
    for i in 0..group.order() {
        for j in 0..group.order() {
            let (k, d) = group.product(i, j);
            for r in 0..n {
                let mut row = LinearRow::new();
                add(&mut row, table.coset(i, r), 1);
                for l in 0..n {
                    add(&mut row, table.coset(j, l), mats[i][r][l]);
                }
                add(&mut row, table.coset(k, r), -1);
                lattice_terms(&mut row, &table, d, r, -1);
                out.push(Family::Table, format!("{i}*{j} = {k} coord {r}"), row);
            }
        }
    }

    let system = EquationSystem { table, names, equations: out.equations, seed };
    if let Some(eq) = system.equations.iter().find(|eq| !system.residual(eq, &system.seed).is_zero()) {
        return Err(SynthesisError::SeedRejected { family: eq.family.tag(), label: eq.label.clone() });
    }
    Ok(system)
}

/// Rational nullspace basis with the seed's exact coordinates in it.
#[derive(Debug, Clone)]
pub struct SolutionSpace {
    pub basis: Vec<Vec<Rational>>,
    pub seed_coordinates: Vec<Rational>,
    pub rank: usize,
}

impl SolutionSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn combine(&self, coords: &[Rational]) -> Vec<Rational> {
        let len = self.basis.first().map_or(0, Vec::len);
        let mut out = vec![int(0); len];
        for (c, b) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(b) {
                if !x.is_zero() {
                    *o += c * x;
                }
            }
        }
        out
    }
}

pub fn solve(es: &EquationSystem) -> Result<SolutionSpace, SynthesisError> {
    let mut ech = Echelon::new(es.table.len());
    for eq in &es.equations {
        ech.push(eq.terms.iter().map(|(&v, &c)| (v, BigInt::from(c))).collect());
    }
    let basis: Vec<Vec<Rational>> = ech
        .nullspace()
        .into_iter()
        .map(|b| b.into_iter().map(Rational::from_integer).collect())
        .collect();
    let space = SolutionSpace { seed_coordinates: seed_coordinates(&basis, &es.seed), basis, rank: ech.rank() };
    if space.combine(&space.seed_coordinates) != es.seed {
        return Err(SynthesisError::SeedOutsideNullspace);
    }
    Ok(space)
}

/// Each basis vector owns a column where every other one vanishes, which
/// pins its coordinate for any vector of the span.
fn seed_coordinates(basis: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
    let len = x.len();
    let mut owner: Vec<Option<usize>> = vec![None; len];
    let mut count = vec![0usize; len];
    for (k, b) in basis.iter().enumerate() {
        for (j, v) in b.iter().enumerate() {
            if !v.is_zero() {
                count[j] += 1;
                owner[j] = Some(k);
            }
        }
    }
    let mut coords = vec![int(0); basis.len()];
    let mut done = vec![false; basis.len()];
    for j in 0..len {
        if let (1, Some(k)) = (count[j], owner[j]) {
            if !done[k] {
                coords[k] = &x[j] / &basis[k][j];
                done[k] = true;
            }
        }
    }
    coords
}
