//! Command-line driver: `reembed`, `verify` and `info`.
//!
//! Exit codes: 0 success, 1 invalid input, 2 pipeline failure, 3 a
//! certificate failed.

pub mod document;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::exactmath::scalar::format_rational;
use crate::netmodel::{close_group, orbits, validate, EmbeddedNet, PeriodicGraphSpec, StandardForm};
use crate::synthesis::{complete, Pipeline, ReembedConfig, ReembedError, Reembedding};
use crate::verify::{certify, Certificate, VertexMap};
use crate::Isometry;

pub use document::{DocumentError, MapDocument, NetDocument, FORMAT_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PIPELINE: i32 = 2;
pub const EXIT_CERTIFICATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lattice-reembed", version, about = "Re-embed periodic nets on integer points, keeping their symmetry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Re-embed a net and certify the result.
    Reembed(ReembedArgs),
    /// Check a net against an original through a vertex/symmetry map.
    Verify(VerifyArgs),
    /// Summarize a net and its symmetry group.
    Info(InfoArgs),
}

#[derive(Debug, Args)]
struct Output {
    /// Suppress the human-readable report.
    #[arg(long)]
    quiet: bool,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ReembedArgs {
    input: PathBuf,
    /// Output net document; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Map document; defaults to `<output stem>.map.json` next to the output.
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long, env = "LATTICE_REEMBED_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    patch_radius: i64,
    /// Candidate budget of the nondegenerate-solution search.
    #[arg(long)]
    max_attempts: Option<usize>,
    #[arg(long)]
    dump_equations: Option<PathBuf>,
    #[arg(long)]
    dump_itineraries: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    original: PathBuf,
    new: PathBuf,
    map: PathBuf,
    #[arg(long, default_value_t = 2)]
    patch_radius: i64,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct InfoArgs {
    input: PathBuf,
    /// Also build the quotient graph and equation system.
    #[arg(long)]
    quotient: bool,
    #[arg(long, env = "LATTICE_REEMBED_SEED", default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

/// A command's outcome: exit code, ordered facts and certificates.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub exit_code: i32,
    pub error: Option<String>,
    pub facts: Vec<(&'static str, Value)>,
    pub certificates: Vec<Certificate>,
}

impl Report {
    fn new(command: &'static str) -> Self {
        Report { command, exit_code: EXIT_OK, error: None, facts: Vec::new(), certificates: Vec::new() }
    }

    fn fact(&mut self, key: &'static str, value: impl Into<Value>) {
        self.facts.push((key, value.into()));
    }

    fn fail(mut self, code: i32, message: impl std::fmt::Display) -> Self {
        self.exit_code = code;
        self.error = Some(message.to_string());
        self
    }

    fn with_certificates(mut self, certificates: Vec<Certificate>) -> Self {
        if certificates.iter().any(|c| !c.passed) {
            self.exit_code = EXIT_CERTIFICATE;
            let failed: Vec<&str> = certificates.iter().filter(|c| !c.passed).map(|c| c.kind.name()).collect();
            self.error = Some(format!("certificate failed: {}", failed.join(", ")));
        }
        self.certificates = certificates;
        self
    }

    pub fn to_json(&self) -> Value {
        let facts: serde_json::Map<String, Value> = self.facts.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        json!({
            "command": self.command,
            "exit_code": self.exit_code,
            "error": self.error,
            "facts": facts,
            "certificates": self.certificates.iter().map(|c| json!({
                "kind": c.kind.name(),
                "passed": c.passed,
                "radius": c.radius,
                "summary": c.summary,
                "witness": c.witness,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.facts {
            let v = match v {
                Value::String(x) => x.clone(),
                other => other.to_string(),
            };
            s.push_str(&format!("{k}: {v}\n"));
        }
        for c in &self.certificates {
            s.push_str(&format!("{c}\n"));
        }
        match &self.error {
            None => s.push_str(&format!("{}: ok\n", self.command)),
            Some(e) => s.push_str(&format!("{}: error (exit {}): {e}\n", self.command, self.exit_code)),
        }
        s
    }
}

fn read_net(path: &Path) -> Result<(NetDocument, EmbeddedNet), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let doc = NetDocument::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let net = doc.to_net().map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((doc, net))
}

fn standardize(path: &Path, net: &EmbeddedNet) -> Result<StandardForm, String> {
    net.to_standard().map_err(|e| format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_json(path: &Path, value: &Value) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    write_file(path, &text)
}

fn invalid_or_pipeline(e: &ReembedError) -> i32 {
    match e {
        ReembedError::Invalid(_) => EXIT_INVALID,
        _ => EXIT_PIPELINE,
    }
}

/// The equation system with variable names and family tags.
pub fn equations_json(p: &Pipeline) -> Value {
    let sys = &p.system;
    let mut families = serde_json::Map::new();
    for e in &sys.equations {
        let n = families.entry(e.family.tag()).or_insert(json!(0));
        *n = json!(n.as_u64().unwrap() + 1);
    }
    json!({
        "variables": sys.names,
        "families": families,
        "equations": sys.equations.iter().map(|e| json!({
            "family": e.family.tag(),
            "label": e.label,
            "terms": e.terms.iter().map(|(&v, &c)| json!([sys.names[v], c])).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "seed": sys.seed.iter().map(format_rational).collect::<Vec<_>>(),
        "rank": p.space.rank,
        "solution_dimension": p.space.dim(),
    })
}

/// Chart symbols, arcs and quotient classes; itineraries are lists of
/// `[from, to]` symbol pairs.
pub fn itineraries_json(p: &Pipeline) -> Value {
    let spec = &p.scaffolded.spec;
    let chart = &p.chart;
    let pairs = |it: &crate::touring::Itinerary| -> Vec<[usize; 2]> {
        it.0.iter().map(|&a| [chart.arcs[a].from, chart.arcs[a].to]).collect()
    };
    json!({
        "symbols": chart.instances.iter().enumerate().map(|(t, (v, cell))| json!({
            "symbol": t,
            "vertex": spec.vertices[*v].id,
            "cell": cell,
            "interior": t < chart.t_count,
        })).collect::<Vec<_>>(),
        "arcs": chart.arcs.iter().map(|a| json!([a.from, a.to])).collect::<Vec<_>>(),
        "classes": p.quotient.classes.iter().enumerate().map(|(i, c)| json!({
            "class": i,
            "interior": c.interior,
            "vertex": spec.vertices[c.vertex].id,
            "cell": c.cell,
            "representative": pairs(&c.representative),
            "members": c.members.iter().map(&pairs).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "edges": p.quotient.edges,
    })
}

/// Output document, map document and report of a finished re-embedding,
/// with the input given over the lattice recorded in `input`.
pub fn reembedding_documents(
    input: &EmbeddedNet,
    standard: &StandardForm,
    r: &Reembedding,
    seed: u64,
    patch_radius: i64,
) -> (NetDocument, MapDocument) {
    let out = r.output();
    let metadata = json!({
        "generator": concat!("lattice-reembed ", env!("CARGO_PKG_VERSION")),
        "seed": seed,
        "patch_radius": patch_radius,
        "scale": r.scale.to_string(),
        "sampler_attempts": r.attempts,
    });
    let doc = NetDocument::from_net(&out, metadata);
    let map = VertexMap {
        images: r
            .vertex_map()
            .images
            .into_iter()
            .enumerate()
            .map(|(i, (j, s))| (j, s.iter().zip(&standard.shifts[i]).map(|(a, b)| a + b).collect()))
            .collect(),
    };
    let nu: Vec<(Isometry, Isometry)> = r
        .nu_pairs()
        .into_iter()
        .map(|(g, h)| (input.isometry_from_frame(&g).expect("independent lattice"), h))
        .collect();
    (doc, MapDocument::new(input, &out, &map, &nu))
}

fn default_map_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "output".into());
    output.with_file_name(format!("{stem}.map.json"))
}

fn cmd_reembed(args: &ReembedArgs, stdout: &mut dyn Write) -> Report {
    let mut report = Report::new("reembed");
    let (_, input) = match read_net(&args.input) {
        Ok(x) => x,
        Err(e) => return report.fail(EXIT_INVALID, e),
    };
    let standard = match standardize(&args.input, &input) {
        Ok(s) => s,
        Err(e) => return report.fail(EXIT_INVALID, e),
    };
    let mut config = ReembedConfig { seed: args.seed, patch_radius: args.patch_radius, ..Default::default() };
    if let Some(m) = args.max_attempts {
        config.sampler_attempts = m;
    }
    let pipeline = match Pipeline::prepare(&standard.spec, &config) {
        Ok(p) => p,
        Err(e) => return report.fail(invalid_or_pipeline(&e), e),
    };
    report.fact("input", args.input.display().to_string());
    report.fact("dimension", standard.spec.dim);
    report.fact("group order", pipeline.group.order());
    report.fact("quotient classes", pipeline.quotient.classes.len());
    report.fact("equations", pipeline.system.equations.len());
    report.fact("solution dimension", pipeline.space.dim());
    if let Some(path) = &args.dump_equations {
        if let Err(e) = write_json(path, &equations_json(&pipeline)) {
            return report.fail(EXIT_PIPELINE, e);
        }
    }
    if let Some(path) = &args.dump_itineraries {
        if let Err(e) = write_json(path, &itineraries_json(&pipeline)) {
            return report.fail(EXIT_PIPELINE, e);
        }
    }
    let r = match complete(pipeline, &config) {
        Ok(r) => r,
        Err(e) => return report.fail(invalid_or_pipeline(&e), e),
    };
    report.fact("sampler attempts", r.attempts);
    report.fact("scale", r.scale.to_string());
    let (doc, map) = reembedding_documents(&input, &standard, &r, args.seed, args.patch_radius);
    let written = match &args.output {
        Some(path) => write_file(path, &doc.to_json()).and_then(|_| {
            report.fact("output", path.display().to_string());
            let map_path = args.map.clone().unwrap_or_else(|| default_map_path(path));
            report.fact("map", map_path.display().to_string());
            write_file(&map_path, &map.to_json())
        }),
        None => stdout
            .write_all(doc.to_json().as_bytes())
            .map_err(|e| e.to_string())
            .and_then(|_| args.map.as_ref().map_or(Ok(()), |p| write_file(p, &map.to_json()))),
    };
    if let Err(e) = written {
        return report.fail(EXIT_PIPELINE, e);
    }
    report.with_certificates(r.certificates)
}

fn cmd_verify(args: &VerifyArgs) -> Report {
    let report = Report::new("verify");
    let loaded = (|| {
        let (_, orig) = read_net(&args.original)?;
        let (_, new) = read_net(&args.new)?;
        let text = std::fs::read_to_string(&args.map).map_err(|e| format!("{}: {e}", args.map.display()))?;
        let map = MapDocument::from_json(&text)
            .and_then(|m| m.resolve(&orig, &new))
            .map_err(|e| format!("{}: {e}", args.map.display()))?;
        Ok::<_, String>((orig, new, map))
    })();
    let (orig, new, (map, nu)) = match loaded {
        Ok(x) => x,
        Err(e) => return report.fail(EXIT_INVALID, e),
    };
    match certify(&orig, &new, &map, &nu, args.patch_radius) {
        Ok(certs) => report.with_certificates(certs),
        Err(e) => report.fail(EXIT_INVALID, e),
    }
}

fn cmd_info(args: &InfoArgs) -> Report {
    let mut report = Report::new("info");
    let spec: PeriodicGraphSpec = match read_net(&args.input).and_then(|(_, n)| standardize(&args.input, &n)) {
        Ok(s) => s.spec,
        Err(e) => return report.fail(EXIT_INVALID, e),
    };
    let checked = validate(&spec).and_then(|v| close_group(&spec).map(|g| (v, g)));
    let (v, group) = match checked {
        Ok(x) => x,
        Err(e) => return report.fail(EXIT_INVALID, e),
    };
    report.fact("dimension", spec.dim);
    report.fact("vertices", v.vertex_count);
    report.fact("edges", v.edge_count);
    report.fact("group order", group.order());
    report.fact("point group order", group.point_group.len());
    report.fact("orbits", orbits(&spec, &group).len());
    report.fact("epsilon^2", format_rational(&v.epsilon_sq));
    if args.quotient {
        let config = ReembedConfig { seed: args.seed, ..Default::default() };
        match Pipeline::prepare(&spec, &config) {
            Ok(p) => {
                report.fact("quotient classes", p.quotient.classes.len());
                report.fact("interior classes", p.quotient.interior_count());
                report.fact("quotient edges", p.quotient.edges.len());
                report.fact("equations", p.system.equations.len());
                report.fact("solution dimension", p.space.dim());
            }
            Err(e) => return report.fail(invalid_or_pipeline(&e), e),
        }
    }
    report
}

/// Quiet runs still name the error, on `errors` or else on `to`.
fn emit(report: &Report, out: &Output, to: &mut dyn Write, errors: Option<&mut dyn Write>) {
    if out.json {
        let mut text = serde_json::to_string_pretty(&report.to_json()).expect("json values serialize");
        text.push('\n');
        let _ = to.write_all(text.as_bytes());
    } else if !out.quiet {
        let _ = to.write_all(report.to_text().as_bytes());
    } else if let Some(e) = &report.error {
        let line = format!("{}: {e}\n", report.command);
        let _ = match errors {
            Some(w) => w.write_all(line.as_bytes()),
            None => to.write_all(line.as_bytes()),
        };
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match &cli.command {
        Command::Reembed(a) => {
            // The output document may occupy stdout; the report then goes to stderr.
            let mut buffer = Vec::new();
            let report = cmd_reembed(a, &mut buffer);
            let _ = stdout.write_all(&buffer);
            if a.output.is_none() {
                emit(&report, &a.out, stderr, None);
            } else {
                emit(&report, &a.out, stdout, Some(stderr));
            }
            report.exit_code
        }
        Command::Verify(a) => {
            let report = cmd_verify(a);
            emit(&report, &a.out, stdout, Some(stderr));
            report.exit_code
        }
        Command::Info(a) => {
            let report = cmd_info(a);
            emit(&report, &a.out, stdout, Some(stderr));
            report.exit_code
        }
    }
}
