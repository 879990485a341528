//! Acceptance criteria, one line of output each. Exits non-zero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use lattice_reembed::cli::{MapDocument, NetDocument, EXIT_CERTIFICATE, EXIT_OK};
use lattice_reembed::exactmath::nullspace::Echelon;
use lattice_reembed::netmodel::oracle::brute_force_cosets;
use lattice_reembed::netmodel::{close_group, expand_patch, is_symmetry, reduce_mod_one, EmbeddedNet, PeriodicGraphSpec};
use lattice_reembed::synthesis::{
    find_nondegenerate_rational, is_degenerate, reembed, Degeneracy, Pipeline, ReembedConfig, SamplerConfig,
};
use lattice_reembed::touring::{
    check_chain, evaluate, form_of, sigma_star, walk_symmetry_certificate, Itinerary, TransversalChart,
};
use lattice_reembed::verify::{certify, check_isomorphism, VertexMap};
use lattice_reembed::{BigInt, FracVector, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::{call, fixture, load, path_str};

const FIXTURES: [&str; 5] = ["sql", "hcb", "hex", "pcu", "dia"];

fn prepared(spec: &PeriodicGraphSpec) -> Pipeline {
    Pipeline::prepare(spec, &ReembedConfig::default()).unwrap()
}

fn random_walk(chart: &TransversalChart, rng: &mut ChaCha8Rng, from: usize, len: usize) -> Itinerary {
    let mut at = from;
    let mut arcs = Vec::with_capacity(len);
    for _ in 0..len {
        let out = &chart.arcs_from[at];
        let e = out[rng.gen_range(0..out.len())];
        arcs.push(e);
        at = chart.kappa_star[chart.arcs[e].to];
    }
    Itinerary(arcs)
}

fn criterion_1() -> String {
    let expected: BTreeMap<&str, usize> = [("sql", 8), ("hcb", 12), ("hex", 12), ("pcu", 48), ("dia", 48)].into();
    let mut notes = Vec::new();
    for name in FIXTURES {
        let spec = load(name);
        let order = close_group(&spec).unwrap().order();
        assert_eq!(brute_force_cosets(&spec).len(), order, "{name}: closure and brute force disagree");
        assert_eq!(order, expected[name], "{name}: coset count");
        let start = Instant::now();
        let r = reembed(&spec, &ReembedConfig::default()).unwrap();
        let elapsed = start.elapsed();
        assert!(elapsed < Duration::from_secs(30), "{name} took {elapsed:?}");
        for c in &r.certificates {
            assert!(c.passed, "{name}: {c}");
        }
        if spec.dim == 2 {
            let certs = certify(&EmbeddedNet::from_standard(&spec), &r.output(), &r.vertex_map(), &r.nu_pairs(), 3).unwrap();
            for c in &certs {
                assert!(c.passed, "{name} at radius 3: {c}");
            }
        }
        notes.push(format!("{name} |U|={order} scale={} {:.2}s", r.scale, elapsed.as_secs_f64()));
    }
    notes.join(", ")
}

fn criterion_2() -> String {
    let mut total = 0;
    for name in ["sql", "hcb"] {
        let p = prepared(&load(name));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in 0..600 {
            let it = random_walk(&p.chart, &mut rng, 0, k % 21);
            let g = walk_symmetry_certificate(&p.chart, &p.schedule, &it).unwrap();
            assert!(is_symmetry(&p.scaffolded.spec, &g), "{name}: walk {:?}", it.0);
            total += 1;
        }
    }
    format!("{total} walks of length <= 20 on scaffolded sql and hcb, all certificates are symmetries")
}

fn criterion_3() -> String {
    let mut pairs = 0;
    let mut forms = 0;
    for name in ["sql", "hcb"] {
        let p = prepared(&load(name));
        let table = &p.system.table;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..600 {
            let s = random_walk(&p.chart, &mut rng, 0, k % 13);
            let mid = check_chain(&p.chart, &s, 0).unwrap();
            let t = random_walk(&p.chart, &mut rng, mid, (k * 7) % 11);
            let lhs = sigma_star(&p.chart, &p.schedule, &s.concat(&t)).unwrap();
            let rhs = sigma_star(&p.chart, &p.schedule, &s).unwrap().compose(&sigma_star(&p.chart, &p.schedule, &t).unwrap());
            assert_eq!(lhs, rhs, "{name}: product of walks");
            pairs += 1;
            let st = s.concat(&t);
            let f = form_of(&p.chart, &p.schedule, &st, table).unwrap();
            assert_eq!(evaluate(&f.vector, &p.system.seed), lhs.translation, "{name}: form at the seed");
            assert_eq!(f.matrix_rational(), lhs.linear);
            forms += 1;
        }
    }
    format!("{pairs} chained pairs multiply exactly, {forms} forms reproduce the schedule at the seed")
}

fn criterion_4() -> String {
    let mut notes = Vec::new();
    for name in FIXTURES.iter().chain(&["hcb-translations"]) {
        let p = prepared(&load(name));
        let spec = &p.scaffolded.spec;
        // Brute force: patch vertices are equivalent when they differ by a lattice vector.
        let patch = expand_patch(spec, 2);
        let mut orbit_reps: Vec<&FracVector> = Vec::new();
        for v in &patch.vertices {
            if !orbit_reps.iter().any(|r| (&v.position - *r).iter().all(|x| x.is_integer())) {
                orbit_reps.push(&v.position);
            }
        }
        assert_eq!(p.quotient.interior_count(), orbit_reps.len(), "{name}: |Q|");
        let mut hit = BTreeSet::new();
        for (_, class) in p.quotient.interior() {
            let k = orbit_reps
                .iter()
                .position(|r| (&class.endpoint - *r).iter().all(|x| x.is_integer()))
                .expect("class endpoint lies in some orbit");
            assert!(hit.insert(k), "{name}: two classes on one orbit");
            assert_eq!(reduce_mod_one(&class.endpoint).0, spec.vertices[class.vertex].position);
        }
        notes.push(format!("{name} {}", orbit_reps.len()));
    }
    format!("class-to-orbit bijection; |Q| = {}", notes.join(", "))
}

fn criterion_5() -> String {
    let mut notes = Vec::new();
    for name in FIXTURES.iter().chain(&["hcb-translations"]) {
        let p = prepared(&load(name));
        assert!(p.system.is_solution(&p.system.seed), "{name}: seed violates an equation");
        assert_eq!(p.space.combine(&p.space.seed_coordinates), p.system.seed, "{name}: seed outside the nullspace");
        notes.push(format!("{name} {} eqs dim {}", p.system.equations.len(), p.space.dim()));
    }
    notes.join(", ")
}

/// A point of the solution space where vertices 0 and 1 coincide. Prefers
/// one whose lattice stays independent; otherwise the sum of the basis.
fn collided_start(p: &Pipeline) -> Vec<Rational> {
    let table = &p.system.table;
    let mut ech = Echelon::new(table.len());
    for e in &p.system.equations {
        ech.push(e.terms.iter().map(|(&v, &c)| (v, BigInt::from(c))).collect());
    }
    let pos = |vertex: usize| {
        let class = &p.quotient.classes[p.quotient.interior_of_vertex[vertex]];
        p.quotient.form(&p.chart, &p.schedule, table, &class.representative).position(table)
    };
    let (pa, pb) = (pos(0), pos(1));
    for j in 0..table.dim {
        let mut row: BTreeMap<usize, i64> = pa[j].clone().into_iter().collect();
        for (&v, &c) in &pb[j] {
            *row.entry(v).or_insert(0) -= c;
        }
        ech.push(row.into_iter().filter(|(_, c)| *c != 0).map(|(v, c)| (v, BigInt::from(c))).collect());
    }
    let basis = ech.nullspace();
    let combine = |coef: &dyn Fn(usize) -> i64| -> Vec<Rational> {
        let mut x = vec![Rational::from_integer(0.into()); table.len()];
        for (i, b) in basis.iter().enumerate() {
            for (xk, bk) in x.iter_mut().zip(b) {
                *xk += Rational::from_integer(bk * coef(i));
            }
        }
        x
    };
    let realizer = p.realizer();
    (0..40i64)
        .map(|t| combine(&|i| (i as i64 * 7 + t * 3) % 5 - 2))
        .find(|x| realizer.realize(x).is_ok())
        .unwrap_or_else(|| combine(&|_| 1))
}

fn criterion_6() -> String {
    // A collision inside the solution space of hcb under translations.
    let p = prepared(&load("hcb-translations"));
    let start = collided_start(&p);
    assert!(p.system.is_solution(&start));
    let net = p.realizer().realize(&start).expect("an independent lattice exists");
    match is_degenerate(&net.standard_spec()) {
        Some(Degeneracy::Collision { first, second, .. }) => {
            let ids: BTreeSet<String> = [first, second].into();
            assert_eq!(ids, BTreeSet::from(["a".to_string(), "b".to_string()]), "collision witness");
        }
        other => panic!("collision not detected: {other:?}"),
    }
    let crossing = load("fault-crossing");
    match is_degenerate(&crossing) {
        Some(Degeneracy::Crossing { point, .. }) => {
            assert_eq!(reduce_mod_one(&point).0, FracVector::new(vec![Rational::new(1.into(), 2.into()); 2]));
        }
        other => panic!("crossing not detected: {other:?}"),
    }
    assert!(is_degenerate(&load("hcb")).is_none());
    let config = SamplerConfig::default();
    let mut notes = Vec::new();
    for name in ["hcb", "hcb-translations"] {
        let p = prepared(&load(name));
        let start = collided_start(&p);
        assert!(p.system.is_solution(&start));
        let (found, attempts) = find_nondegenerate_rational(&p.realizer(), &p.space, &start, &config).unwrap();
        assert!(attempts > 0);
        assert!(p.system.is_solution(&found.assignment));
        assert!(is_degenerate(&found.standard_spec()).is_none());
        notes.push(format!("{name} after {attempts}"));
    }
    format!(
        "collision a=b and crossing at (1/2, 1/2) rejected; sampler escaped collided starts ({}) of {} candidates",
        notes.join(", "),
        config.max_attempts
    )
}

/// Recorded thresholds: the least k in 4..=12 from which every sampled
/// perturbation of size 2^-k stays nondegenerate.
const STABILITY: [(&str, u32); 5] = [("sql", 5), ("hcb", 7), ("hex", 5), ("pcu", 5), ("dia", 5)];

fn criterion_7() -> String {
    let mut notes = Vec::new();
    for (name, recorded) in STABILITY {
        let r = reembed(&load(name), &ReembedConfig::default()).unwrap();
        let space = &r.pipeline.space;
        let realizer = r.pipeline.realizer();
        let x = &r.rational.assignment;
        let mut threshold = 4;
        for dir in 0..3usize {
            let coords: Vec<Rational> =
                (0..space.dim()).map(|i| Rational::from_integer(BigInt::from(((i + dir) % 3) as i64 - 1))).collect();
            let d = space.combine(&coords);
            let mut stable_from = None;
            for k in (4..=12u32).rev() {
                let step = Rational::new(1.into(), BigInt::from(2).pow(k));
                let y: Vec<Rational> = x.iter().zip(&d).map(|(a, b)| a + b * &step).collect();
                let ok = realizer.realize(&y).is_ok_and(|net| is_degenerate(&net.standard_spec()).is_none());
                if !ok {
                    break;
                }
                stable_from = Some(k);
            }
            let k = stable_from.unwrap_or_else(|| panic!("{name}: direction {dir} degenerate at the floor 2^-12"));
            threshold = threshold.max(k);
        }
        notes.push((name, threshold, recorded));
    }
    let moved: Vec<String> =
        notes.iter().filter(|(_, k, r)| k != r).map(|(name, k, r)| format!("{name} measured {k}, recorded {r}")).collect();
    assert!(moved.is_empty(), "thresholds moved: {}", moved.join(", "));
    format!("thresholds {}", notes.iter().map(|(name, k, _)| format!("{name} k={k}")).collect::<Vec<_>>().join(", "))
}

fn criterion_8() -> String {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for name in ["hcb", "sql"] {
        for k in 0..2 {
            let p = |s: &str| dir.path().join(format!("{name}-{k}-{s}"));
            let (out, eq, it) = (p("out.json"), p("eq.json"), p("it.json"));
            let (code, report, _) = call(&[
                "reembed",
                path_str(&fixture(&format!("{name}.json"))),
                "-o",
                path_str(&out),
                "--seed",
                "42",
                "--json",
                "--dump-equations",
                path_str(&eq),
                "--dump-itineraries",
                path_str(&it),
            ]);
            assert_eq!(code, EXIT_OK);
            let files: Vec<String> =
                [&out, &p("out.map.json"), &eq, &it].iter().map(|f| std::fs::read_to_string(f).unwrap()).collect();
            runs.push((files, report.replace(&format!("{name}-{k}-"), "")));
        }
        let (a, b) = (&runs[runs.len() - 2], &runs[runs.len() - 1]);
        assert_eq!(a, b, "{name}: runs differ");
        for f in &a.0 {
            serde_json::from_str::<Value>(f).unwrap();
        }
    }
    "two runs per fixture: output, map, equation and itinerary dumps and reports byte-identical".into()
}

fn criterion_9() -> String {
    let dir = tempfile::tempdir().unwrap();
    let mut notes = Vec::new();
    for name in ["sql", "hcb", "hex"] {
        let first = dir.path().join(format!("{name}-1.json"));
        let second = dir.path().join(format!("{name}-2.json"));
        let (code, _, _) = call(&["reembed", path_str(&fixture(&format!("{name}.json"))), "-o", path_str(&first), "--seed", "0"]);
        assert_eq!(code, EXIT_OK);
        let (code, report, _) = call(&["reembed", path_str(&first), "-o", path_str(&second), "--seed", "0"]);
        assert_eq!(code, EXIT_OK, "{name}: {report}");
        let text = |p: &std::path::Path| std::fs::read_to_string(p).unwrap();
        let a = NetDocument::from_json(&text(&first)).unwrap().to_net().unwrap();
        let b = NetDocument::from_json(&text(&second)).unwrap().to_net().unwrap();
        assert!(b.vertices.iter().all(|v| v.position.iter().all(|x| x.is_integer())), "{name}: second output not integral");
        let map = MapDocument::from_json(&text(&dir.path().join(format!("{name}-2.map.json")))).unwrap();
        let (map, _) = map.resolve(&a, &b).unwrap();
        let (sa, sb) = (a.to_standard().unwrap(), b.to_standard().unwrap());
        let images = map
            .images
            .iter()
            .enumerate()
            .map(|(i, (j, s))| (*j, (0..s.len()).map(|k| s[k] - sa.shifts[i][k] + sb.shifts[*j][k]).collect()))
            .collect();
        let iso = check_isomorphism(&sa.spec, &sb.spec, &VertexMap { images }, 2);
        assert!(iso.passed, "{name}: {iso}");
        notes.push(name);
    }
    format!("re-embedding the integer outputs of {} gives isomorphic integer nets", notes.join(", "))
}

fn verify(orig: &str, new: &str, map: &str) -> (i32, Value) {
    let (code, out, _) = call(&["verify", path_str(&fixture(orig)), path_str(&fixture(new)), path_str(&fixture(map)), "--json"]);
    (code, serde_json::from_str(&out).unwrap())
}

fn criterion_10() -> String {
    let cases = [
        ("integer", "hcb.json", "hcb.json", "hcb-identity.map.json"),
        ("isomorphism", "hcb.json", "hcb.json", "hcb-swapped.map.json"),
        ("symmetry-embedding", "sql.json", "sql.json", "sql-perturbed.map.json"),
        ("discreteness-nondegeneracy", "two-site.json", "fault-collision.json", "two-site-identity.map.json"),
        ("discreteness-nondegeneracy", "fault-crossing.json", "fault-crossing.json", "crossing-identity.map.json"),
    ];
    let mut notes = Vec::new();
    for (kind, orig, new, map) in cases {
        let (code, report) = verify(orig, new, map);
        assert_eq!(code, EXIT_CERTIFICATE, "{kind} on {new}");
        let cert = report["certificates"].as_array().unwrap().iter().find(|c| c["kind"] == kind).unwrap();
        assert_eq!(cert["passed"], false, "{kind} on {new}");
        assert!(cert["witness"].is_string(), "{kind} on {new} without witness");
        notes.push(format!("{kind} on {new}: {}", cert["summary"].as_str().unwrap()));
    }
    let (code, _) = verify("sql.json", "sql.json", "sql-identity.map.json");
    assert_eq!(code, EXIT_OK, "control case");
    notes.join("; ")
}

type Criterion = (&'static str, fn() -> String);

fn main() {
    let criteria: [Criterion; 10] = [
        ("end-to-end re-embedding of the fixtures", criterion_1),
        ("walk certificates are symmetries", criterion_2),
        ("schedule homomorphism and form substitution", criterion_3),
        ("quotient graph against translation orbits", criterion_4),
        ("seed feasibility", criterion_5),
        ("degeneracy discrimination and sampler escape", criterion_6),
        ("stability of nondegeneracy under small perturbation", criterion_7),
        ("determinism", criterion_8),
        ("re-embedding an integer output", criterion_9),
        ("every checker fails on its fault fixture", criterion_10),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS ({secs:.1}s) {title}: {detail}", i + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {:>2} FAIL ({secs:.1}s) {title}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
