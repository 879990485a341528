//! Certificates for a re-embedded net: integrality, isomorphism with the
//! input, embedding of the input's symmetry group, discreteness and
//! nondegeneracy. Each check uses its own traversal and geometry.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::exactmath::gram_norm_sq;
use crate::exactmath::scalar::format_rational;
use crate::netmodel::{cell_vector, close_group, is_symmetry, reduce_mod_one, EmbeddedNet, NetError, PeriodicGraphSpec};
use crate::{FracVector, Isometry, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CertificateKind {
    Integer,
    Isomorphism,
    SymmetryEmbedding,
    Nondegenerate,
}

impl CertificateKind {
    pub fn name(self) -> &'static str {
        match self {
            CertificateKind::Integer => "integer",
            CertificateKind::Isomorphism => "isomorphism",
            CertificateKind::SymmetryEmbedding => "symmetry-embedding",
            CertificateKind::Nondegenerate => "discreteness-nondegeneracy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub passed: bool,
    pub radius: Option<i64>,
    pub summary: String,
    pub witness: Option<String>,
}

impl Certificate {
    fn pass(kind: CertificateKind, radius: Option<i64>, summary: String) -> Self {
        Certificate { kind, passed: true, radius, summary, witness: None }
    }

    fn fail(kind: CertificateKind, radius: Option<i64>, summary: &str, witness: String) -> Self {
        Certificate { kind, passed: false, radius, summary: summary.to_string(), witness: Some(witness) }
    }
}

impl std::fmt::Display for Certificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}", if self.passed { "PASS" } else { "FAIL" }, self.kind.name())?;
        if let Some(r) = self.radius {
            write!(f, " (radius {r})")?;
        }
        write!(f, ": {}", self.summary)?;
        if let Some(w) = &self.witness {
            write!(f, "; witness: {w}")?;
        }
        Ok(())
    }
}

/// Input vertex `i` goes to output vertex `images[i].0`, and instance
/// `(i, c)` to `(images[i].0, c + images[i].1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMap {
    pub images: Vec<(usize, Vec<i64>)>,
}

fn fmt_vec(v: &FracVector) -> String {
    format!("({})", v.iter().map(format_rational).collect::<Vec<_>>().join(", "))
}

pub fn check_integer(net: &EmbeddedNet) -> Certificate {
    let kind = CertificateKind::Integer;
    for v in &net.vertices {
        if let Some(x) = v.position.iter().find(|x| !x.is_integer()) {
            return Certificate::fail(kind, None, "non-integer vertex", format!("vertex {} coordinate {}", v.id, format_rational(x)));
        }
    }
    if let Some(x) = net.lattice.entries().iter().find(|x| !x.is_integer()) {
        return Certificate::fail(kind, None, "non-integer lattice", format!("lattice entry {}", format_rational(x)));
    }
    for (k, g) in net.symmetries.iter().enumerate() {
        if let Some(x) = g.translation.iter().find(|x| !x.is_integer()) {
            return Certificate::fail(kind, None, "non-integer symmetry", format!("symmetry {k} translation {}", format_rational(x)));
        }
    }
    Certificate::pass(
        kind,
        None,
        format!("{} vertices, lattice and {} symmetry translations integral", net.vertices.len(), net.symmetries.len()),
    )
}

type Inst = (usize, Vec<i64>);

fn neighbor_sets(spec: &PeriodicGraphSpec) -> Vec<BTreeSet<Inst>> {
    let mut out = vec![BTreeSet::new(); spec.vertices.len()];
    for e in &spec.edges {
        out[e.u].insert((e.v, e.offset.clone()));
        out[e.v].insert((e.u, e.offset.iter().map(|x| -x).collect()));
    }
    out
}

fn shifted(x: &Inst, by: &[i64]) -> Vec<i64> {
    x.1.iter().zip(by).map(|(a, b)| a + b).collect()
}

fn neighbors_of(sets: &[BTreeSet<Inst>], x: &Inst) -> Vec<Inst> {
    sets[x.0].iter().map(|(j, off)| (*j, off.iter().zip(&x.1).map(|(a, b)| a + b).collect())).collect()
}

/// Degree and BFS shell sizes up to `depth`, per vertex, sorted.
fn fingerprint(spec: &PeriodicGraphSpec, depth: usize) -> Vec<Vec<usize>> {
    let sets = neighbor_sets(spec);
    let mut out: Vec<Vec<usize>> = (0..spec.vertices.len())
        .map(|i| {
            let start: Inst = (i, vec![0; spec.dim]);
            let mut seen = BTreeSet::from([start.clone()]);
            let mut frontier = vec![start];
            let mut shells = Vec::with_capacity(depth);
            for _ in 0..depth {
                let mut next = Vec::new();
                for x in &frontier {
                    for y in neighbors_of(&sets, x) {
                        if seen.insert(y.clone()) {
                            next.push(y);
                        }
                    }
                }
                shells.push(next.len());
                frontier = next;
            }
            shells
        })
        .collect();
    out.sort();
    out
}

/// The map is a bijection on vertex classes and, on every instance of the
/// radius-`r` patch, carries the neighbor set exactly onto the image's
/// neighbor set. Shell counts are compared separately without the map.
pub fn check_isomorphism(orig: &PeriodicGraphSpec, new: &PeriodicGraphSpec, map: &VertexMap, radius: i64) -> Certificate {
    let kind = CertificateKind::Isomorphism;
    let r = Some(radius);
    let nv = orig.vertices.len();
    if map.images.len() != nv || new.vertices.len() != nv {
        return Certificate::fail(kind, r, "vertex counts differ", format!("{} input, {} output, {} mapped", nv, new.vertices.len(), map.images.len()));
    }
    let targets: BTreeSet<usize> = map.images.iter().map(|(j, _)| *j).collect();
    if targets.len() != nv || targets.iter().any(|&j| j >= nv) {
        return Certificate::fail(kind, r, "map is not a bijection", format!("{:?}", map.images));
    }
    let mut positions = BTreeMap::new();
    for v in &new.vertices {
        let (p, _) = reduce_mod_one(&v.position);
        if let Some(other) = positions.insert(p, v.id.clone()) {
            return Certificate::fail(kind, r, "output vertices coincide", format!("{} and {}", other, v.id));
        }
    }
    let image = |x: &Inst| -> Inst {
        let (j, s) = &map.images[x.0];
        (*j, shifted(x, s))
    };
    let fmt = |spec: &PeriodicGraphSpec, x: &Inst| format!("{}{:?}", spec.vertices[x.0].id, x.1);
    let so = neighbor_sets(orig);
    let sn = neighbor_sets(new);
    let mut inverse = vec![0; nv];
    for (i, (j, _)) in map.images.iter().enumerate() {
        inverse[*j] = i;
    }
    let mut checked = 0usize;
    for cell in crate::netmodel::cells_in_box(orig.dim, radius) {
        for i in 0..nv {
            let x: Inst = (i, cell.clone());
            let fx = image(&x);
            let mapped: BTreeSet<Inst> = neighbors_of(&so, &x).iter().map(image).collect();
            let actual: BTreeSet<Inst> = neighbors_of(&sn, &fx).into_iter().collect();
            if let Some(y) = mapped.difference(&actual).next() {
                let pre = neighbors_of(&so, &x).into_iter().find(|z| image(z) == *y).unwrap();
                return Certificate::fail(
                    kind,
                    r,
                    "an input edge has no image",
                    format!("{}-{} maps to non-edge {}-{}", fmt(orig, &x), fmt(orig, &pre), fmt(new, &fx), fmt(new, y)),
                );
            }
            if let Some(y) = actual.difference(&mapped).next() {
                return Certificate::fail(
                    kind,
                    r,
                    "an output edge has no preimage",
                    format!("{}-{} over input vertex {} ({})", fmt(new, &fx), fmt(new, y), fmt(orig, &x), orig.vertices[inverse[y.0]].id),
                );
            }
            checked += mapped.len();
        }
    }
    let depth = radius.max(1) as usize;
    if fingerprint(orig, depth) != fingerprint(new, depth) {
        return Certificate::fail(kind, r, "coordination sequences differ", format!("depth {depth}"));
    }
    Certificate::pass(kind, r, format!("{} vertex classes, {} incidences preserved both ways", nv, checked))
}

/// Decomposes `f = τ_d ∘ g` for a listed `g`; returns its index and `d`.
fn decompose(list: &[Isometry], f: &Isometry) -> Option<(usize, Vec<i64>)> {
    list.iter().enumerate().find_map(|(k, g)| {
        if g.linear != f.linear {
            return None;
        }
        let d = &f.translation - &g.translation;
        d.iter()
            .all(|x| x.is_integer())
            .then(|| (k, d.iter().map(|x| i64::try_from(x.to_integer()).unwrap()).collect()))
    })
}

/// `nu` pairs each input coset (input standard frame) with its image (output
/// standard frame). Checks that the sources cover the input's coset table,
/// every image is a symmetry, products are preserved together with their
/// lattice parts, and distinct cosets stay distinct.
pub fn check_symmetry_embedding(orig: &PeriodicGraphSpec, new: &PeriodicGraphSpec, nu: &[(Isometry, Isometry)]) -> Certificate {
    let kind = CertificateKind::SymmetryEmbedding;
    let group = match close_group(orig) {
        Ok(g) => g,
        Err(e) => return Certificate::fail(kind, None, "input group does not close", e.to_string()),
    };
    let sources: Vec<Isometry> = nu.iter().map(|(g, _)| g.clone()).collect();
    let mut covered = BTreeSet::new();
    for (k, g) in sources.iter().enumerate() {
        match group.coset_of(g) {
            Some((c, _)) => {
                if !covered.insert(c) {
                    return Certificate::fail(kind, None, "coset listed twice", format!("source {k}"));
                }
            }
            None => return Certificate::fail(kind, None, "source is not in the input group", format!("source {k}")),
        }
    }
    if covered.len() != group.order() {
        return Certificate::fail(kind, None, "coset table incomplete", format!("{} of {} cosets", covered.len(), group.order()));
    }
    for (k, (_, h)) in nu.iter().enumerate() {
        if !is_symmetry(new, h) {
            return Certificate::fail(kind, None, "image is not a symmetry of the output", format!("coset {k} -> {}", fmt_vec(&h.translation)));
        }
    }
    for (i, (gi, hi)) in nu.iter().enumerate() {
        for (j, (gj, hj)) in nu.iter().enumerate() {
            let Some((k, d)) = decompose(&sources, &gi.compose(gj)) else {
                return Certificate::fail(kind, None, "sources are not closed", format!("{i}*{j}"));
            };
            let expect = Isometry::translation_by(cell_vector(&d)).compose(&nu[k].1);
            if hi.compose(hj) != expect {
                return Certificate::fail(
                    kind,
                    None,
                    "multiplication table not preserved",
                    format!("nu({i})nu({j}) != t{d:?} nu({k})"),
                );
            }
        }
    }
    for i in 0..nu.len() {
        for j in i + 1..nu.len() {
            let q = nu[i].1.compose(&nu[j].1.inverse().expect("invertible"));
            if q.linear.is_identity() && q.translation.iter().all(|x| x.is_integer()) {
                return Certificate::fail(kind, None, "images coincide modulo the lattice", format!("cosets {i} and {j}"));
            }
        }
    }
    Certificate::pass(kind, None, format!("{} cosets embedded, table of {} products preserved", nu.len(), nu.len() * nu.len()))
}

/// `[p, q]` and `[r, w]` meet? Solved through the normal equations.
fn segments_meet(p: &FracVector, q: &FracVector, r: &FracVector, w: &FracVector) -> Option<FracVector> {
    let d1 = q - p;
    let d2 = w - r;
    let e = r - p;
    let (a, b, c) = (d1.dot(&d1), d1.dot(&d2), d2.dot(&d2));
    let (f, g) = (e.dot(&d1), e.dot(&d2));
    let det = &b * &b - &a * &c;
    let unit = |x: &Rational| *x >= Rational::zero() && *x <= Rational::one();
    if !det.is_zero() {
        // a s − b t = f, b s − c t = g
        let s = (&b * &g - &c * &f) / &det;
        let t = (&a * &g - &b * &f) / &det;
        let x = p + &d1.scale(&s);
        return (unit(&s) && unit(&t) && x == r + &d2.scale(&t)).then_some(x);
    }
    if a.is_zero() {
        return None;
    }
    // Parallel: the offset must lie on the line.
    if &e - &d1.scale(&(&f / &a)) != FracVector::zeros(p.dim()) {
        return None;
    }
    let s0 = &f / &a;
    let s1 = (&f + &b) / &a;
    let (lo, hi) = if s0 <= s1 { (s0, s1) } else { (s1, s0) };
    let lo = lo.max(Rational::zero());
    (lo <= hi.min(Rational::one())).then(|| p + &d1.scale(&lo))
}

/// Minimum separation over the radius patch and crossings of non-scaffold
/// edges on four distinct vertices.
pub fn check_discreteness_and_nondegeneracy(net: &PeriodicGraphSpec, radius: i64) -> Certificate {
    let kind = CertificateKind::Nondegenerate;
    let r = Some(radius);
    let n = net.dim;
    let zero_cell = vec![0i64; n];
    let mut eps: Option<Rational> = None;
    for (i, v) in net.vertices.iter().enumerate() {
        for cell in crate::netmodel::cells_in_box(n, radius.max(1)) {
            for (j, w) in net.vertices.iter().enumerate() {
                if i == j && cell == zero_cell {
                    continue;
                }
                let d = gram_norm_sq(&net.gram, &(&(&w.position + &cell_vector(&cell)) - &v.position));
                if d.is_zero() {
                    return Certificate::fail(kind, r, "vertex collision", format!("{} and {}{:?}", v.id, w.id, cell));
                }
                if eps.as_ref().is_none_or(|e| d < *e) {
                    eps = Some(d);
                }
            }
        }
    }
    let edges: Vec<_> = net.edges.iter().filter(|e| !net.vertices[e.u].scaffold && !net.vertices[e.v].scaffold).collect();
    let reach = edges.iter().flat_map(|e| e.offset.iter().map(|x| x.abs())).max().unwrap_or(0);
    // Any crossing has a translate where the second edge starts in cell 0;
    // the first edge then starts within 2·reach + 1 cells.
    let span = 2 * reach + 1;
    let cells = crate::netmodel::cells_in_box(n, span);
    let mut pairs = 0usize;
    for (a, ea) in edges.iter().enumerate() {
        for cell in &cells {
            let pa = &net.vertices[ea.u].position + &cell_vector(cell);
            let qa_cell: Vec<i64> = cell.iter().zip(&ea.offset).map(|(x, y)| x + y).collect();
            let qa = &net.vertices[ea.v].position + &cell_vector(&qa_cell);
            for eb in &edges[a..] {
                let ends = [(ea.u, cell.clone()), (ea.v, qa_cell.clone()), (eb.u, zero_cell.clone()), (eb.v, eb.offset.clone())];
                if (0..4).any(|i| (i + 1..4).any(|j| ends[i] == ends[j])) {
                    continue;
                }
                pairs += 1;
                let pb = net.vertices[eb.u].position.clone();
                let qb = &net.vertices[eb.v].position + &cell_vector(&eb.offset);
                if let Some(x) = segments_meet(&pa, &qa, &pb, &qb) {
                    let id = |k: usize| net.vertices[k].id.as_str();
                    return Certificate::fail(
                        kind,
                        r,
                        "edges cross",
                        format!(
                            "{}{:?}-{}{:?} and {}[0..]-{}{:?} at {}",
                            id(ea.u), cell, id(ea.v), qa_cell, id(eb.u), id(eb.v), eb.offset, fmt_vec(&x)
                        ),
                    );
                }
            }
        }
    }
    let eps = eps.unwrap_or_else(Rational::zero);
    if eps.is_zero() {
        return Certificate::fail(kind, r, "no separation", "empty net".into());
    }
    Certificate::pass(kind, r, format!("epsilon^2 = {}, {} edge pairs examined", format_rational(&eps), pairs))
}

/// Runs every certificate. `map` and `nu` refer to the documents' own frames
/// (ambient coordinates for `nu` images).
pub fn certify(
    orig: &EmbeddedNet,
    new: &EmbeddedNet,
    map: &VertexMap,
    nu: &[(Isometry, Isometry)],
    radius: i64,
) -> Result<Vec<Certificate>, NetError> {
    let so = orig.to_standard()?;
    let sn = new.to_standard()?;
    let images = map
        .images
        .iter()
        .enumerate()
        .map(|(i, (j, s))| {
            let shift = (0..orig.dim)
                .map(|k| s[k] - so.shifts.get(i).map_or(0, |x| x[k]) + sn.shifts.get(*j).map_or(0, |x| x[k]))
                .collect();
            (*j, shift)
        })
        .collect();
    let pairs = nu
        .iter()
        .map(|(g, h)| Ok((orig.isometry_to_frame(g)?, new.isometry_to_frame(h)?)))
        .collect::<Result<Vec<_>, NetError>>()?;
    Ok(vec![
        check_integer(new),
        check_isomorphism(&so.spec, &sn.spec, &VertexMap { images }, radius),
        check_symmetry_embedding(&so.spec, &sn.spec, &pairs),
        check_discreteness_and_nondegeneracy(&sn.spec, radius),
    ])
}
