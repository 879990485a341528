use std::collections::{HashMap, VecDeque};

use super::{reduce_mod_one, validate_generators_shape, NetError, PeriodicGraphSpec, SpecIndex};
use crate::{FracMatrix, FracVector, Isometry};

/// Largest crystallographic point-group order in dimension `n`.
pub fn max_point_group_order(n: usize) -> usize {
    match n {
        1 => 2,
        2 => 12,
        3 => 48,
        // Hyperoctahedral order bounds nothing in general, but dimensions
        // above three are outside the supported range anyway.
        _ => (1..=n).product::<usize>() << n,
    }
}

/// The finite group `𝕌` of unit-cell coset representatives generated by the
/// spec's generators, with its multiplication table.
#[derive(Debug, Clone)]
pub struct SymmetryGroupData {
    pub generators: Vec<Isometry>,
    /// Identity first, then sorted by `(linear, translation)`; translations in `[0,1)ⁿ`.
    pub cosets: Vec<Isometry>,
    pub point_group: Vec<FracMatrix>,
    index: HashMap<Isometry, usize>,
    /// `table[i][j] = (k, d)` with `gᵢ ∘ gⱼ = τ_d ∘ g_k`.
    table: Vec<Vec<(usize, Vec<i64>)>>,
}

impl SymmetryGroupData {
    pub fn order(&self) -> usize {
        self.cosets.len()
    }

    /// Decomposes `f = τ_cell ∘ g_k`; `None` if `f` is not in the group.
    pub fn coset_of(&self, f: &Isometry) -> Option<(usize, Vec<i64>)> {
        let (t, cell) = reduce_mod_one(&f.translation);
        let key = Isometry { translation: t, linear: f.linear.clone() };
        self.index.get(&key).map(|&k| (k, cell))
    }

    /// The group element `τ_cell ∘ g_k`.
    pub fn element(&self, k: usize, cell: &[i64]) -> Isometry {
        let g = &self.cosets[k];
        Isometry {
            translation: &g.translation + &super::cell_vector(cell),
            linear: g.linear.clone(),
        }
    }

    pub fn product(&self, i: usize, j: usize) -> (usize, &[i64]) {
        let (k, d) = &self.table[i][j];
        (*k, d)
    }

    /// Cosets mapping `from` onto `to` modulo translations, with the cell shift
    /// `d` such that `τ_d ∘ g_k` maps `from` exactly onto `to`.
    pub fn elements_mapping(&self, from: &FracVector, to: &FracVector) -> Vec<Isometry> {
        self.cosets
            .iter()
            .filter_map(|g| {
                let diff = to - &g.apply(from);
                diff.iter().all(|x| x.is_integer()).then(|| Isometry {
                    translation: &g.translation + &diff,
                    linear: g.linear.clone(),
                })
            })
            .collect()
    }
}

fn sort_key(g: &Isometry) -> (FracMatrix, FracVector) {
    (g.linear.clone(), g.translation.clone())
}

/// Closes the generators, bounding the coset count by the maximal point-group
/// order times the number of vertex representatives.
pub fn close_group(spec: &PeriodicGraphSpec) -> Result<SymmetryGroupData, NetError> {
    close_group_with_bound(spec, spec.vertices.len().max(1))
}

pub fn close_group_with_bound(spec: &PeriodicGraphSpec, site_bound: usize) -> Result<SymmetryGroupData, NetError> {
    validate_generators_shape(spec)?;
    let n = spec.dim;
    let limit = max_point_group_order(n) * site_bound;
    let reduce = |f: Isometry| {
        let (t, _) = reduce_mod_one(&f.translation);
        Isometry { translation: t, linear: f.linear }
    };
    let id = Isometry::identity(n);
    let mut found = vec![id.clone()];
    let mut seen: HashMap<Isometry, ()> = HashMap::from([(id.clone(), ())]);
    let mut queue = VecDeque::from([id.clone()]);
    while let Some(h) = queue.pop_front() {
        for g in &spec.generators {
            let p = reduce(g.compose(&h));
            if seen.insert(p.clone(), ()).is_none() {
                found.push(p.clone());
                if found.len() > limit {
                    return Err(NetError::ClosureExplosion(limit));
                }
                queue.push_back(p);
            }
        }
    }
    let mut rest: Vec<Isometry> = found.into_iter().filter(|g| !g.is_identity()).collect();
    rest.sort_by_key(sort_key);
    let mut cosets = vec![id];
    cosets.extend(rest);
    let index: HashMap<Isometry, usize> = cosets.iter().cloned().enumerate().map(|(k, g)| (g, k)).collect();
    let mut point_group: Vec<FracMatrix> = cosets.iter().map(|g| g.linear.clone()).collect();
    point_group.sort();
    point_group.dedup();
    let mut data = SymmetryGroupData {
        generators: spec.generators.clone(),
        cosets,
        point_group,
        index,
        table: Vec::new(),
    };
    let mut table = Vec::with_capacity(data.order());
    for gi in &data.cosets {
        let row: Vec<(usize, Vec<i64>)> = data
            .cosets
            .iter()
            .map(|gj| data.coset_of(&gi.compose(gj)).ok_or(NetError::ClosureExplosion(limit)))
            .collect::<Result<_, _>>()?;
        table.push(row);
    }
    data.table = table;
    Ok(data)
}

/// Orbits of vertex representatives (by index) under the coset action.
pub fn orbit_partition(spec: &PeriodicGraphSpec, group: &SymmetryGroupData) -> Vec<Vec<usize>> {
    let index = SpecIndex::new(spec);
    let mut parent: Vec<usize> = (0..spec.vertices.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for g in &group.cosets {
        for (i, v) in spec.vertices.iter().enumerate() {
            if let Some((j, _)) = index.vertex_at(&g.apply(&v.position)) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..spec.vertices.len() {
        let r = find(&mut parent, i);
        let s = *slot.entry(r).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[s].push(i);
    }
    classes
}

/// Orbits as sets of vertex ids.
pub fn orbits(spec: &PeriodicGraphSpec, group: &SymmetryGroupData) -> Vec<Vec<String>> {
    orbit_partition(spec, group)
        .into_iter()
        .map(|c| c.into_iter().map(|i| spec.vertices[i].id.clone()).collect())
        .collect()
}
