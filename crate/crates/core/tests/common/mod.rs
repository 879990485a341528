//! Fixture loading shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use lattice_reembed::cli::NetDocument;
use lattice_reembed::netmodel::PeriodicGraphSpec;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// A fixture net in the standard frame.
pub fn load(name: &str) -> PeriodicGraphSpec {
    let text = std::fs::read_to_string(fixture(&format!("{name}.json"))).unwrap();
    NetDocument::from_json(&text).unwrap().to_net().unwrap().to_standard().unwrap().spec
}

/// Runs the command line in-process; returns exit code, stdout and stderr.
pub fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = lattice_reembed::cli::run(std::iter::once("lattice-reembed").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

pub fn path_str(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}
