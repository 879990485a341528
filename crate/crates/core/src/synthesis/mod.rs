//! Quotient graph, equation system, exact solution space, nondegenerate
//! rational solutions and integer scaling; `reembed` runs the whole pipeline.

pub mod equations;
pub mod quotient;
pub mod realize;

use num_bigint::BigInt;

use crate::netmodel::{close_group, validate, EmbeddedNet, NetError, PeriodicGraphSpec, SymmetryGroupData};
use crate::scaffold::{build_scaffolded_graph, choose_free_point, ScaffoldConfig, ScaffoldError, ScaffoldedGraph};
use crate::touring::{build_chart_and_schedule, fundamental_transversal, FundamentalTransversal, Schedule, TouringError, TransversalChart};
use crate::verify::{certify, Certificate, VertexMap};
use crate::Isometry;

pub use equations::{emit_equations, solve, Equation, EquationSystem, Family, SolutionSpace};
pub use quotient::{build_quotient_graph, QuotientClass, QuotientGraph};
pub use realize::{
    find_nondegenerate_rational, is_degenerate, scale_to_integers, segment_intersection, Degeneracy, Realizer, SamplerConfig,
    SolutionNet,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Touring(TouringError),
    #[error("itinerary {0} leaves the vertex set")]
    OffNet(String),
    #[error("quotient growth exceeded {0} classes")]
    NonHalting(usize),
    #[error("the input net violates its own equation ({family}) {label}")]
    SeedRejected { family: &'static str, label: String },
    #[error("the input net is not in the computed solution space")]
    SeedOutsideNullspace,
    #[error("lattice vectors are dependent")]
    CollapsedLattice,
    #[error("no nondegenerate solution after {attempts} candidates")]
    SearchExhausted { attempts: usize },
}

#[derive(Debug, thiserror::Error)]
pub enum ReembedError {
    #[error("invalid input: {0}")]
    Invalid(#[from] NetError),
    #[error(transparent)]
    Scaffold(#[from] ScaffoldError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReembedConfig {
    pub seed: u64,
    pub free_point_attempts: usize,
    pub window_point_cap: usize,
    pub sampler_attempts: usize,
    pub patch_radius: i64,
}

impl Default for ReembedConfig {
    fn default() -> Self {
        let s = ScaffoldConfig::default();
        ReembedConfig {
            seed: s.seed,
            free_point_attempts: s.max_attempts,
            window_point_cap: s.window_point_cap,
            sampler_attempts: SamplerConfig::default().max_attempts,
            patch_radius: 2,
        }
    }
}

impl ReembedConfig {
    pub fn scaffold(&self) -> ScaffoldConfig {
        ScaffoldConfig { seed: self.seed, max_attempts: self.free_point_attempts, window_point_cap: self.window_point_cap }
    }

    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig { seed: self.seed, max_attempts: self.sampler_attempts }
    }
}

/// Every intermediate of the construction up to the solution space.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub base: PeriodicGraphSpec,
    pub group: SymmetryGroupData,
    pub scaffolded: ScaffoldedGraph,
    pub transversal: FundamentalTransversal,
    pub chart: TransversalChart,
    pub schedule: Schedule,
    pub quotient: QuotientGraph,
    pub system: EquationSystem,
    pub space: SolutionSpace,
}

impl Pipeline {
    pub fn prepare(spec: &PeriodicGraphSpec, config: &ReembedConfig) -> Result<Self, ReembedError> {
        validate(spec)?;
        let group = close_group(spec)?;
        let sc = config.scaffold();
        let fp = choose_free_point(spec, &group, &sc)?;
        let scaffolded = build_scaffolded_graph(spec, &group, &fp, &sc)?;
        let start = (scaffolded.scaffold_vertex(0), scaffolded.scaffold_cells[0].clone());
        let transversal = fundamental_transversal(&scaffolded.spec, &group, start);
        let (chart, schedule) = build_chart_and_schedule(&scaffolded.spec, &group, &transversal);
        let quotient = build_quotient_graph(&chart, &schedule, &scaffolded.spec)?;
        let system = emit_equations(&quotient, &chart, &schedule, &group, &fp.position, &scaffolded.spec)?;
        let space = solve(&system)?;
        Ok(Pipeline { base: spec.clone(), group, scaffolded, transversal, chart, schedule, quotient, system, space })
    }

    pub fn realizer(&self) -> Realizer<'_> {
        Realizer::new(&self.quotient, &self.system, &self.chart, &self.schedule, &self.scaffolded.spec, &self.group.cosets)
    }
}

#[derive(Debug, Clone)]
pub struct Reembedding {
    pub pipeline: Pipeline,
    /// The nondegenerate rational solution before scaling.
    pub rational: SolutionNet,
    pub attempts: usize,
    pub scale: BigInt,
    pub net: SolutionNet,
    pub certificates: Vec<Certificate>,
}

impl Reembedding {
    pub fn all_passed(&self) -> bool {
        self.certificates.iter().all(|c| c.passed)
    }

    /// The output net: integer points over the new lattice, scaffold dropped.
    pub fn output(&self) -> EmbeddedNet {
        self.net.output()
    }

    /// Input vertex `i` is output vertex `i`; instances shift by the correspondence.
    pub fn vertex_map(&self) -> VertexMap {
        VertexMap { images: (0..self.net.base_count).map(|i| (i, self.net.correspondence[i].clone())).collect() }
    }

    /// `(g, ν(g))` for every coset of the input group.
    pub fn nu_pairs(&self) -> Vec<(Isometry, Isometry)> {
        self.pipeline.group.cosets.iter().cloned().zip(self.net.nu.iter().cloned()).collect()
    }
}

pub fn reembed(spec: &PeriodicGraphSpec, config: &ReembedConfig) -> Result<Reembedding, ReembedError> {
    complete(Pipeline::prepare(spec, config)?, config)
}

/// Samples, scales and certifies a prepared pipeline against its input.
pub fn complete(pipeline: Pipeline, config: &ReembedConfig) -> Result<Reembedding, ReembedError> {
    let realizer = pipeline.realizer();
    let (rational, attempts) =
        find_nondegenerate_rational(&realizer, &pipeline.space, &pipeline.system.seed, &config.sampler())?;
    let (net, scale) = scale_to_integers(&realizer, &rational)?;
    drop(realizer);
    let mut out = Reembedding { pipeline, rational, attempts, scale, net, certificates: Vec::new() };
    out.certificates = certify(
        &EmbeddedNet::from_standard(&out.pipeline.base),
        &out.output(),
        &out.vertex_map(),
        &out.nu_pairs(),
        config.patch_radius,
    )?;
    Ok(out)
}
