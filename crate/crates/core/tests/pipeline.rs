mod common;

use std::process::Command;

use lattice_reembed::cli::{MapDocument, NetDocument};
use lattice_reembed::netmodel::{Edge, PeriodicGraphSpec};
use lattice_reembed::synthesis::{reembed, ReembedConfig};
use lattice_reembed::verify::certify;

use common::{fixture, load, path_str};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lattice-reembed"))
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hcb-int.json");
    let status = binary()
        .args(["reembed", path_str(&fixture("hcb.json")), "-o", path_str(&out), "--seed", "42", "--quiet"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(dir.path().join("hcb-int.map.json").exists());

    let status = binary()
        .args(["verify", path_str(&fixture("hcb.json")), path_str(&out), path_str(&dir.path().join("hcb-int.map.json")), "--quiet"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "not json").unwrap();
    let run = binary().args(["reembed", path_str(&bad), "--seed", "0"]).output().unwrap();
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("parse error"));

    let run = binary().args(["reembed", path_str(&fixture("sql.json")), "--seed", "0", "--max-attempts", "0"]).output().unwrap();
    assert_eq!(run.status.code(), Some(2));

    let run = binary()
        .args(["verify", path_str(&fixture("hcb.json")), path_str(&fixture("hcb.json")), path_str(&fixture("hcb-swapped.map.json"))])
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(3));
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.contains("FAIL isomorphism"), "{text}");
    assert!(text.contains("witness:"), "{text}");
}

/// Output documents re-read from disk certify against the input again.
#[test]
fn written_documents_certify() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["sql", "hcb", "hex", "hcb-translations", "two-site"] {
        let out = dir.path().join(format!("{name}.json"));
        let (code, report, _) = common::call(&["reembed", path_str(&fixture(&format!("{name}.json"))), "-o", path_str(&out), "--seed", "1"]);
        assert_eq!(code, 0, "{report}");
        let orig = NetDocument::from_json(&std::fs::read_to_string(fixture(&format!("{name}.json"))).unwrap()).unwrap().to_net().unwrap();
        let new = NetDocument::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap().to_net().unwrap();
        let map = MapDocument::from_json(&std::fs::read_to_string(dir.path().join(format!("{name}.map.json"))).unwrap()).unwrap();
        let (map, nu) = map.resolve(&orig, &new).unwrap();
        for c in certify(&orig, &new, &map, &nu, 2).unwrap() {
            assert!(c.passed, "{name}: {c}");
        }
    }
}

fn relabeled(spec: &PeriodicGraphSpec, perm: &[usize]) -> PeriodicGraphSpec {
    let mut out = spec.clone();
    out.vertices = perm.iter().map(|&i| spec.vertices[i].clone()).collect();
    let mut inverse = vec![0; perm.len()];
    for (k, &i) in perm.iter().enumerate() {
        inverse[i] = k;
    }
    out.edges = spec.edges.iter().map(|e| Edge::new(inverse[e.u], inverse[e.v], e.offset.clone())).collect();
    out
}

#[test]
fn relabeling_vertices_does_not_matter() {
    for name in ["hcb", "two-site"] {
        let spec = load(name);
        let r = reembed(&relabeled(&spec, &[1, 0]), &ReembedConfig::default()).unwrap();
        assert!(r.all_passed(), "{name}");
        let s = reembed(&spec, &ReembedConfig::default()).unwrap();
        assert_eq!(r.scale, s.scale, "{name}");
        assert_eq!(r.pipeline.quotient.interior_count(), s.pipeline.quotient.interior_count());
    }
}

#[test]
fn seeds_change_nothing_that_is_certified() {
    let spec = load("hex");
    for seed in [0, 1, 99] {
        let r = reembed(&spec, &ReembedConfig { seed, ..Default::default() }).unwrap();
        assert!(r.all_passed(), "seed {seed}");
    }
}
