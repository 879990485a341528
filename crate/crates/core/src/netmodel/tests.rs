use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;

use super::*;
use crate::exactmath::scalar::int;
use crate::testutil::*;

/// Applies `f` to every vertex of a radius-`r` patch and checks the image
/// against a larger patch by position search alone.
fn patch_action_oracle(spec: &PeriodicGraphSpec, f: &Isometry, r: i64) -> bool {
    let small = expand_patch(spec, r);
    let big = expand_patch(spec, 2 * r + 2);
    let find = |p: &FracVector| big.vertices.iter().position(|v| v.position == *p);
    let mut images = Vec::new();
    for v in &small.vertices {
        match find(&f.apply(&v.position)) {
            Some(k) => images.push(k),
            None => return false,
        }
    }
    let edges: HashSet<(usize, usize)> =
        big.edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    small.edges.iter().all(|&(a, b)| edges.contains(&(images[a], images[b])))
        && images.iter().collect::<HashSet<_>>().len() == images.len()
}

fn signed_permutations(n: usize) -> BTreeSet<FracMatrix> {
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..n).filter(|i| !p.contains(i)).map(|i| [p.clone(), vec![i]].concat()).collect::<Vec<_>>()
            })
            .collect();
    }
    let mut out = BTreeSet::new();
    for p in perms {
        for signs in 0..(1 << n) {
            let mut m = FracMatrix::zeros(n, n);
            for (i, &j) in p.iter().enumerate() {
                m.set(i, j, if signs >> i & 1 == 1 { int(-1) } else { int(1) });
            }
            out.insert(m);
        }
    }
    out
}

#[test]
fn sql_is_valid_with_unit_separation() {
    let report = validate(&sql()).unwrap();
    assert_eq!(report.epsilon_sq, int(1));
}

#[test]
fn fixtures_validate() {
    for spec in [sql(), hcb(), hex(), pcu(), dia(), hcb_translations()] {
        validate(&spec).unwrap();
    }
}

#[test]
fn collision_is_reported() {
    let mut s = sql();
    s.vertices.push(Vertex { id: "w".into(), position: ivec(&[0, 0]), scaffold: false });
    assert_eq!(validate(&s), Err(NetError::VertexCollision("v".into(), "w".into())));
}

#[test]
fn disconnected_nets_are_rejected() {
    let mut s = sql_translations();
    s.edges = vec![Edge::new(0, 0, vec![2, 0]), Edge::new(0, 0, vec![0, 1])];
    assert!(matches!(validate(&s), Err(NetError::Disconnected(_))));
    let mut h = hcb_translations();
    h.edges.clear();
    assert!(matches!(validate(&h), Err(NetError::Disconnected(_))));
}

#[test]
fn duplicate_and_loop_edges() {
    let mut s = sql();
    s.edges.push(Edge::new(0, 0, vec![-1, 0]));
    assert_eq!(validate(&s), Err(NetError::DuplicateEdge(2)));
    let mut s = sql();
    s.edges.push(Edge::new(0, 0, vec![0, 0]));
    assert_eq!(validate(&s), Err(NetError::DegenerateEdge(2)));
}

#[test]
fn bad_generator_is_named() {
    let mut s = sql();
    s.generators.push(Isometry::translation_by(qvec(&[(1, 2), (0, 1)])));
    assert!(matches!(validate(&s), Err(NetError::NonSymmetryGenerator { index: 2, .. })));
}

#[test]
fn hcb_swap_agrees_with_patch_oracle() {
    let spec = hcb();
    let swap = lin(&[&[0, 1], &[1, 0]]);
    assert!(is_symmetry(&spec, &swap));
    assert!(patch_action_oracle(&spec, &swap, 2));
}

#[test]
fn hcb_sixfold_about_hexagon_centre() {
    let spec = hcb();
    // The origin is a hexagon centre; conjugate by a lattice translation too.
    let r6 = lin(&[&[1, -1], &[1, 0]]);
    let shifted = r6.conjugate_by(&Isometry::translation_by(ivec(&[1, 0]))).unwrap();
    for f in [r6, shifted] {
        assert!(is_symmetry(&spec, &f));
        assert!(patch_action_oracle(&spec, &f, 2));
    }
    // A rotation about a vertex is not a symmetry of hcb.
    let about_a = lin(&[&[1, -1], &[1, 0]])
        .conjugate_by(&Isometry::translation_by(qvec(&[(1, 3), (2, 3)])))
        .unwrap();
    assert!(!is_symmetry(&spec, &about_a));
    assert!(!patch_action_oracle(&spec, &about_a, 2));
}

#[test]
fn rectangular_lattice_rejects_quarter_turn() {
    let mut s = sql_translations();
    s.gram = mat(&[&[1, 0], &[0, 4]]);
    assert!(!is_symmetry(&s, &lin(&[&[0, -1], &[1, 0]])));
}

#[test]
fn patch_counts() {
    let p = expand_patch(&sql(), 1);
    assert_eq!(p.vertices.len(), 9);
    // Unit-distance pairs in a 3×3 grid: 3 rows × 2 + 3 columns × 2.
    let grid: Vec<(i64, i64)> = (-1..=1).flat_map(|x| (-1..=1).map(move |y| (x, y))).collect();
    let unit_pairs = grid
        .iter()
        .flat_map(|a| grid.iter().map(move |b| (a, b)))
        .filter(|(a, b)| (a.0 - b.0).abs() + (a.1 - b.1).abs() == 1)
        .count()
        / 2;
    assert_eq!(p.edges.len(), unit_pairs);
    assert_eq!(expand_patch(&hcb(), 1).vertices.len(), 18);
    let p0 = expand_patch(&hcb(), 0);
    assert_eq!(p0.vertices.len(), 2);
    assert_eq!(p0.edges, vec![(0, 1)]);
}

#[test]
fn closure_orders_match_signed_permutation_groups() {
    let g = close_group(&sql()).unwrap();
    assert_eq!(g.order(), 8);
    assert_eq!(g.point_group.iter().cloned().collect::<BTreeSet<_>>(), signed_permutations(2));
    let g = close_group(&pcu()).unwrap();
    assert_eq!(g.order(), 48);
    assert_eq!(g.point_group.iter().cloned().collect::<BTreeSet<_>>(), signed_permutations(3));
    assert_eq!(close_group(&sql_translations()).unwrap().order(), 1);
}

#[test]
fn closure_matches_brute_force_search() {
    for spec in [sql(), hcb(), hex(), pcu(), dia()] {
        let g = close_group(&spec).unwrap();
        let brute: BTreeSet<Isometry> = oracle::brute_force_cosets(&spec).into_iter().collect();
        assert_eq!(g.cosets.iter().cloned().collect::<BTreeSet<_>>(), brute);
        assert!(g.cosets[0].is_identity());
    }
    assert_eq!(close_group(&hcb()).unwrap().order(), 12);
    assert_eq!(close_group(&dia()).unwrap().order(), 48);
}

#[test]
fn closure_explosion_is_detected() {
    let mut s = sql_translations();
    s.generators = vec![Isometry::translation_by(qvec(&[(1, 97), (0, 1)]))];
    assert_eq!(close_group(&s).unwrap_err(), NetError::ClosureExplosion(12));
}

#[test]
fn multiplication_table_is_consistent() {
    let spec = hcb();
    let g = close_group(&spec).unwrap();
    for i in 0..g.order() {
        for j in 0..g.order() {
            let (k, d) = g.product(i, j);
            assert_eq!(g.element(k, d), g.cosets[i].compose(&g.cosets[j]));
        }
    }
}

#[test]
fn orbit_counts() {
    let count = |s: &PeriodicGraphSpec| orbits(s, &close_group(s).unwrap()).len();
    assert_eq!(count(&sql()), 1);
    assert_eq!(count(&hcb_translations()), 2);
    assert_eq!(count(&hcb()), 1);
    assert_eq!(count(&dia()), 1);
}

#[test]
fn dia_brute_force_finds_full_group() {
    let spec = dia();
    assert_eq!(oracle::brute_force_cosets(&spec).len(), 48);
    assert_eq!(oracle::gram_automorphisms(&spec.gram).len(), 48);
}

fn translate_spec(spec: &PeriodicGraphSpec, t: &FracVector) -> PeriodicGraphSpec {
    let mut cells = Vec::new();
    let mut out = spec.clone();
    for v in out.vertices.iter_mut() {
        let (p, c) = reduce_mod_one(&(&v.position + t));
        v.position = p;
        cells.push(c);
    }
    for e in out.edges.iter_mut() {
        e.offset = (0..spec.dim).map(|i| e.offset[i] + cells[e.v][i] - cells[e.u][i]).collect();
    }
    let tau = Isometry::translation_by(t.clone());
    out.generators = spec.generators.iter().map(|g| g.conjugate_by(&tau).unwrap()).collect();
    out
}

proptest! {
    #[test]
    fn patch_vertex_count(r in 0i64..3) {
        for spec in [sql(), hcb()] {
            let p = expand_patch(&spec, r);
            prop_assert_eq!(p.vertices.len(), spec.vertices.len() * ((2 * r + 1) as usize).pow(2));
        }
    }

    #[test]
    fn validation_is_translation_invariant(a in -7i64..7, b in -7i64..7, d in 1i64..6) {
        for spec in [hcb(), sql()] {
            let t = qvec(&[(a, d), (b, d)]);
            let moved = translate_spec(&spec, &t);
            let r0 = validate(&spec).unwrap();
            let r1 = validate(&moved).unwrap();
            prop_assert_eq!(r0.epsilon_sq, r1.epsilon_sq);
            prop_assert_eq!(close_group(&moved).unwrap().order(), close_group(&spec).unwrap().order());
        }
    }

    #[test]
    fn orbits_ignore_relabelling(perm in Just(vec![1usize, 0]).prop_shuffle()) {
        let spec = hcb_translations();
        let mut relabelled = spec.clone();
        relabelled.vertices = perm.iter().map(|&i| spec.vertices[i].clone()).collect();
        let inv: Vec<usize> = (0..2).map(|i| perm.iter().position(|&p| p == i).unwrap()).collect();
        for e in relabelled.edges.iter_mut() {
            e.u = inv[e.u];
            e.v = inv[e.v];
        }
        let as_sets = |s: &PeriodicGraphSpec| -> BTreeSet<BTreeSet<String>> {
            orbits(s, &close_group(s).unwrap()).into_iter().map(|c| c.into_iter().collect()).collect()
        };
        prop_assert_eq!(as_sets(&spec), as_sets(&relabelled));
    }

    #[test]
    fn accepted_symmetries_compose(i in 0usize..12, j in 0usize..12, c in -2i64..3) {
        let spec = hcb();
        let g = close_group(&spec).unwrap();
        let f = g.element(i, &[c, 0]);
        let h = g.element(j, &[0, -c]);
        prop_assert!(is_symmetry(&spec, &f) && is_symmetry(&spec, &h));
        prop_assert!(is_symmetry(&spec, &f.compose(&h)));
    }
}

#[test]
fn gram_preserving_matrices_keep_lengths() {
    let g = hex_gram();
    for m in oracle::gram_automorphisms(&g) {
        let v = qvec(&[(2, 3), (-5, 7)]);
        assert_eq!(
            crate::exactmath::gram_norm_sq(&g, &m.mul_vec(&v)),
            crate::exactmath::gram_norm_sq(&g, &v)
        );
    }
}
