//! Command-line dispatch: one entry point routing to every module, with
//! machine-readable TOML output and fixed exit codes (0 ok, 2 on chain
//! cycles, 1 otherwise).
//!
//! The CLI performs no arithmetic of its own; every number it prints comes
//! from a library call, and output for fixed inputs and seeds is
//! byte-stable.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use serde::Deserialize;

use crate::beltsum::{self, BeltSumError, TangleLinkData};
use crate::chain::{self, ChainError, ChainGraph};
use crate::constants;
use crate::document::{Document, Value};
use crate::families::{self, CoverTwistSeed, FamilyError, FamilyPoint, FamilySpec};
use crate::horoball::{self, GeodesicPlane, Horoball, OctVertex, OctahedronConfig};
use crate::linkmodel::{self, LinkGeometry, Registry, RegistryError};

/// Outcome status of a dispatched command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    ValidationError,
    DomainError,
    CycleError,
    RangeError,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::ValidationError => "validation_error",
            Status::DomainError => "domain_error",
            Status::CycleError => "cycle_error",
            Status::RangeError => "range_error",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::CycleError => 2,
            _ => 1,
        }
    }
}

/// What a command produced: a status, a payload document on success, an
/// error message otherwise, and the provenance of registry-derived numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Option<Document>,
    pub provenance: Vec<String>,
    pub message: Option<String>,
    digits: usize,
}

impl CommandResult {
    fn ok(payload: Document, provenance: Vec<String>, digits: usize) -> Self {
        CommandResult { status: Status::Ok, payload: Some(payload), provenance, message: None, digits }
    }

    fn fail(status: Status, message: String, digits: usize) -> Self {
        CommandResult { status, payload: None, provenance: Vec::new(), message: Some(message), digits }
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    /// Render the whole result as one TOML document.
    pub fn render(&self) -> String {
        let mut doc = Document::new();
        doc.push("status", self.status.as_str());
        if let Some(message) = &self.message {
            doc.push("message", message.as_str());
        }
        if !self.provenance.is_empty() {
            doc.push(
                "provenance",
                Value::List(self.provenance.iter().map(|p| Value::Str(p.clone())).collect()),
            );
        }
        if let Some(payload) = &self.payload {
            doc.push_section("payload", payload.clone());
        }
        doc.render(self.digits)
    }
}

/// A parse failure: usage or help text and the exit code to use.
#[derive(Debug)]
pub struct UsageError {
    pub text: String,
    pub exit_code: i32,
}

#[derive(Parser, Debug)]
#[command(
    name = "cuspcalc",
    version,
    about = "Cusp volume, cusp density and cusp crossing density calculus for hyperbolic links"
)]
struct Cli {
    /// Registry file overriding the bundled link data.
    #[arg(long, global = true, value_name = "FILE")]
    registry: Option<PathBuf>,
    /// Significant digits in printed numbers.
    #[arg(long, global = true, default_value_t = 12, value_name = "N")]
    digits: usize,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print the derived bound set (tetrahedral and octahedral volumes,
    /// packing and density bounds).
    Constants,
    /// Density invariants of a registry entry or link file.
    Density(DensityArgs),
    /// Chain checking and Dehn-filling plans.
    Chain {
        #[command(subcommand)]
        cmd: ChainCmd,
    },
    /// Belted-sum combination, density intervals and samplers.
    Beltsum {
        #[command(subcommand)]
        cmd: BeltsumCmd,
    },
    /// Parametric link families.
    Family {
        #[command(subcommand)]
        cmd: FamilyCmd,
    },
    /// Horoball predicates and octahedron packings.
    Horoball {
        #[command(subcommand)]
        cmd: HoroballCmd,
    },
}

#[derive(Args, Debug)]
struct DensityArgs {
    /// Registry entry name or path to a link file.
    target: String,
    /// Cusp indices for the restricted density, e.g. `0,2`.
    #[arg(long, value_name = "I,J,...")]
    subset: Option<String>,
    /// Which density to compute (defaults to cd, or cdr when --subset given).
    #[arg(long, value_enum)]
    kind: Option<DensityKind>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum DensityKind {
    /// Cusp density cv/vol.
    Cd,
    /// Restricted cusp density over a subset of cusps.
    Cdr,
    /// Cusp crossing density cv/c.
    Dcc,
    /// Volume density vol/c.
    Dvol,
}

#[derive(Subcommand, Debug)]
enum ChainCmd {
    /// Decide whether the chain graph is a forest.
    Check {
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
    },
    /// Produce the leaf-elimination filling plan. Exits 2 on a cycle.
    Fill {
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum BeltsumCmd {
    /// Belted sum of two links (iterated when --k/--p are given).
    Combine {
        #[arg(long, value_name = "NAME|FILE")]
        a: String,
        #[arg(long, value_name = "NAME|FILE")]
        b: String,
        /// Copies of the first link.
        #[arg(long)]
        k: Option<u64>,
        /// Copies of the second link.
        #[arg(long)]
        p: Option<u64>,
    },
    /// Density interval reachable by iterated sums of the pair.
    Interval {
        #[arg(long, value_name = "NAME|FILE")]
        a: String,
        #[arg(long, value_name = "NAME|FILE")]
        b: String,
    },
    /// Odd-parity multiplicities hitting a target density.
    Sample {
        #[arg(long, value_name = "NAME|FILE")]
        a: String,
        #[arg(long, value_name = "NAME|FILE")]
        b: String,
        #[arg(long)]
        target: f64,
        #[arg(long)]
        eps: f64,
    },
}

#[derive(Subcommand, Debug)]
enum FamilyCmd {
    /// Evaluate one family member.
    Eval {
        /// twist | octahedral | octahedral_prime | cover_twist
        #[arg(long)]
        family: String,
        /// Comma-separated parameters, e.g. `q=3` or `n=7,k=8`.
        #[arg(long, value_name = "K=V,...")]
        params: String,
        /// Seed link for cover_twist (registry name or seed file).
        #[arg(long, value_name = "NAME|FILE")]
        seed: Option<String>,
    },
    /// Find cover_twist parameters hitting a target density.
    Sample {
        #[arg(long)]
        family: String,
        #[arg(long, value_name = "NAME|FILE")]
        seed: String,
        #[arg(long)]
        target: f64,
        #[arg(long)]
        eps: f64,
    },
    /// The four density intervals with provenance.
    Intervals,
}

#[derive(Subcommand, Debug)]
enum HoroballCmd {
    /// Per-vertex and total cusp volume of an octahedron configuration.
    Pack {
        /// standard | opposite | edge, or a config file.
        #[arg(long, value_name = "NAME|FILE")]
        config: String,
    },
    /// Seeded search for the feasible maximum total.
    Search {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        iters: u64,
    },
    /// Poking predicate for a horoball against a geodesic plane.
    Pokes {
        /// `inf,HEIGHT` or `X,Y,DIAMETER`.
        #[arg(long)]
        ball: String,
        /// `hemisphere,CX,CY,R` or `vertical,PX,PY,DX,DY`.
        #[arg(long)]
        plane: String,
    },
}

/// Parse and run a command line (without the program name). Returns the
/// command's result, or usage/help text when the line does not parse.
pub fn dispatch<I, S>(args: I) -> Result<CommandResult, UsageError>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let argv = std::iter::once(OsString::from("cuspcalc"))
        .chain(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv).map_err(|err| {
        let exit_code = match err.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
            _ => 1,
        };
        UsageError { text: err.to_string(), exit_code }
    })?;
    Ok(execute(cli))
}

/// Convenience for binaries and tests: rendered output plus exit code.
pub fn run<I, S>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    match dispatch(args) {
        Ok(result) => (result.render(), result.exit_code()),
        Err(usage) => (usage.text, usage.exit_code),
    }
}

struct Ctx {
    registry_path: Option<PathBuf>,
    digits: usize,
}

impl Ctx {
    fn registry(&self) -> Result<Registry<f64>, CmdError> {
        match &self.registry_path {
            Some(path) => Ok(Registry::from_path(path)?),
            None => Ok(Registry::builtin()?),
        }
    }
}

fn execute(cli: Cli) -> CommandResult {
    let ctx = Ctx { registry_path: cli.registry, digits: cli.digits };
    let outcome = match cli.command {
        Cmd::Constants => cmd_constants(),
        Cmd::Density(args) => cmd_density(&ctx, args),
        Cmd::Chain { cmd } => cmd_chain(cmd),
        Cmd::Beltsum { cmd } => cmd_beltsum(&ctx, cmd),
        Cmd::Family { cmd } => cmd_family(&ctx, cmd),
        Cmd::Horoball { cmd } => cmd_horoball(cmd),
    };
    match outcome {
        Ok((payload, provenance)) => CommandResult::ok(payload, provenance, ctx.digits),
        Err(err) => CommandResult::fail(err.status(), err.message, ctx.digits),
    }
}

/// Internal error carrying the status classification.
struct CmdError {
    status: Status,
    message: String,
}

impl CmdError {
    fn status(&self) -> Status {
        self.status
    }

    fn domain(message: impl Into<String>) -> Self {
        CmdError { status: Status::DomainError, message: message.into() }
    }
}

impl From<RegistryError> for CmdError {
    fn from(err: RegistryError) -> Self {
        let status = match &err {
            RegistryError::Entry { .. } => Status::ValidationError,
            _ => Status::DomainError,
        };
        CmdError { status, message: err.to_string() }
    }
}

impl From<linkmodel::DensityError> for CmdError {
    fn from(err: linkmodel::DensityError) -> Self {
        let status = match &err {
            linkmodel::DensityError::Invalid(_) => Status::ValidationError,
            _ => Status::DomainError,
        };
        CmdError { status, message: err.to_string() }
    }
}

impl From<ChainError> for CmdError {
    fn from(err: ChainError) -> Self {
        let status = match &err {
            ChainError::Cycle { .. } => Status::CycleError,
            _ => Status::DomainError,
        };
        CmdError { status, message: err.to_string() }
    }
}

impl From<BeltSumError> for CmdError {
    fn from(err: BeltSumError) -> Self {
        let status = match &err {
            BeltSumError::TargetOutOfRange { .. } => Status::RangeError,
            _ => Status::DomainError,
        };
        CmdError { status, message: err.to_string() }
    }
}

impl From<FamilyError> for CmdError {
    fn from(err: FamilyError) -> Self {
        let status = match &err {
            FamilyError::TargetOutOfRange { .. } => Status::RangeError,
            FamilyError::Registry(RegistryError::Entry { .. }) => Status::ValidationError,
            _ => Status::DomainError,
        };
        CmdError { status, message: err.to_string() }
    }
}

impl From<horoball::HoroballError> for CmdError {
    fn from(err: horoball::HoroballError) -> Self {
        CmdError::domain(err.to_string())
    }
}

impl From<constants::ConstantsError> for CmdError {
    fn from(err: constants::ConstantsError) -> Self {
        CmdError::domain(err.to_string())
    }
}

type CmdOutcome = Result<(Document, Vec<String>), CmdError>;

fn cmd_constants() -> CmdOutcome {
    let b = constants::bounds::<f64>();
    let mut doc = Document::new();
    doc.push("v_tet", b.v_tet);
    doc.push("v_oct", b.v_oct);
    doc.push("boroczky", b.boroczky);
    doc.push("dcc_upper", b.dcc_upper);
    doc.push("volume_density_upper", b.volume_density_upper);
    Ok((doc, Vec::new()))
}

/// Resolve `<name|file>` to a link geometry plus provenance.
fn resolve_link(ctx: &Ctx, target: &str) -> Result<(LinkGeometry<f64>, Vec<String>), CmdError> {
    let registry = ctx.registry()?;
    match registry.get(target) {
        Ok(entry) => {
            let geometry = registry.geometry(target)?;
            Ok((geometry.clone(), vec![format!("{target}: {}", entry.provenance)]))
        }
        Err(RegistryError::Missing { .. }) if Path::new(target).exists() => {
            let link = linkmodel::link_from_path::<f64>(Path::new(target))?;
            Ok((link, vec![format!("{target}: user-provided link file")]))
        }
        Err(err) => Err(CmdError::domain(format!(
            "{err}; known entries: {}",
            registry.names().collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn parse_subset(text: &str) -> Result<Vec<usize>, CmdError> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| CmdError::domain(format!("bad cusp index `{part}` in subset")))
        })
        .collect()
}

fn cmd_density(ctx: &Ctx, args: DensityArgs) -> CmdOutcome {
    let (link, provenance) = resolve_link(ctx, &args.target)?;
    let subset = args.subset.as_deref().map(parse_subset).transpose()?;
    let kind = match (args.kind, &subset) {
        (Some(kind), _) => kind,
        (None, Some(_)) => DensityKind::Cdr,
        (None, None) => DensityKind::Cd,
    };
    let mut doc = Document::new();
    doc.push("name", link.name.as_str());
    let value = match kind {
        DensityKind::Cd => {
            doc.push("kind", "cd");
            link.cusp_density()?
        }
        DensityKind::Cdr => {
            let subset = subset
                .ok_or_else(|| CmdError::domain("--kind cdr requires --subset"))?;
            doc.push("kind", "cdr");
            doc.push(
                "subset",
                Value::List(subset.iter().map(|&i| Value::Int(i as i64)).collect()),
            );
            link.restricted_cusp_density(&subset)?
        }
        DensityKind::Dcc => {
            doc.push("kind", "dcc");
            link.cusp_crossing_density()?
        }
        DensityKind::Dvol => {
            doc.push("kind", "dvol");
            link.volume_density()?
        }
    };
    doc.push("value", value);
    doc.push("volume", link.volume);
    doc.push("cusp_volume", link.total_cusp_volume());
    if let Some(c) = link.crossing_number {
        doc.push("crossing_number", c);
    }
    Ok((doc, provenance))
}

fn chain_graph(path: &Path) -> Result<ChainGraph, CmdError> {
    Ok(ChainGraph::from_path(path)?)
}

fn cmd_chain(cmd: ChainCmd) -> CmdOutcome {
    match cmd {
        ChainCmd::Check { graph } => {
            let g = chain_graph(&graph)?;
            let check = chain::check_chain(&g);
            let mut doc = Document::new();
            doc.push("acyclic", check.acyclic);
            doc.push("vertices", g.vertex_count() as u64);
            doc.push("edges", g.edge_count() as u64);
            doc.push(
                "trees",
                Value::List(
                    check
                        .trees
                        .iter()
                        .map(|tree| {
                            Value::List(tree.iter().map(|n| Value::Str(n.clone())).collect())
                        })
                        .collect(),
                ),
            );
            Ok((doc, Vec::new()))
        }
        ChainCmd::Fill { graph } => {
            let g = chain_graph(&graph)?;
            let plan = chain::fill_chain(&g)?;
            let mut doc = Document::new();
            doc.push("steps_total", plan.steps.len() as u64);
            doc.push(
                "steps",
                Value::List(
                    plan.steps
                        .iter()
                        .map(|step| {
                            let mut fields = vec![
                                ("component".to_owned(), Value::Str(step.component.clone())),
                                ("twists".to_owned(), Value::Int(step.twist_count)),
                            ];
                            if let Some(strands) = step.strand_count {
                                fields.push(("strands".to_owned(), Value::Int(strands as i64)));
                            }
                            Value::Inline(fields)
                        })
                        .collect(),
                ),
            );
            let mut residual = Document::new();
            for (name, coefficient) in &plan.residual_coefficients {
                residual.push(name, *coefficient);
            }
            doc.push_section("residual_coefficients", residual);
            Ok((doc, Vec::new()))
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTangleFile {
    volume: f64,
    tangle_cusp_volume: f64,
    meridian: f64,
    belt_cusp_volume: Option<f64>,
    #[serde(default)]
    no_poking: bool,
}

/// Resolve `<name|file>` to tangle data: registry entries via their tagged
/// cusps, files via the tangle-record schema.
fn resolve_tangle(ctx: &Ctx, target: &str) -> Result<(TangleLinkData<f64>, Vec<String>), CmdError> {
    let registry = ctx.registry()?;
    match registry.get(target) {
        Ok(entry) => {
            let geometry = registry.geometry(target)?;
            let data = TangleLinkData::from_geometry(geometry)?;
            Ok((data, vec![format!("{target}: {}", entry.provenance)]))
        }
        Err(RegistryError::Missing { .. }) if Path::new(target).exists() => {
            let text = std::fs::read_to_string(target)
                .map_err(|e| CmdError::domain(format!("cannot read `{target}`: {e}")))?;
            let raw: RawTangleFile = toml::from_str(&text)
                .map_err(|e| CmdError::domain(format!("bad tangle file `{target}`: {e}")))?;
            let mut data = TangleLinkData::new(
                raw.volume,
                raw.tangle_cusp_volume,
                raw.meridian,
                raw.no_poking,
            )?;
            data.belt_cusp_volume = raw.belt_cusp_volume;
            Ok((data, vec![format!("{target}: user-provided tangle file")]))
        }
        Err(err) => Err(CmdError::domain(format!(
            "{err}; known entries: {}",
            registry.names().collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn cmd_beltsum(ctx: &Ctx, cmd: BeltsumCmd) -> CmdOutcome {
    match cmd {
        BeltsumCmd::Combine { a, b, k, p } => {
            let (da, mut prov_a) = resolve_tangle(ctx, &a)?;
            let (db, prov_b) = resolve_tangle(ctx, &b)?;
            prov_a.extend(prov_b);
            let result = match (k, p) {
                (None, None) => beltsum::belted_sum(&da, &db)?,
                (k, p) => beltsum::iterated_belt_sum(&da, &db, k.unwrap_or(1), p.unwrap_or(1))?,
            };
            let mut doc = Document::new();
            doc.push("k", result.k);
            doc.push("p", result.p);
            doc.push("volume", result.volume);
            doc.push("tangle_cusp_volume", result.tangle_cusp_volume);
            doc.push("meridian", result.meridian);
            doc.push("density", result.density());
            Ok((doc, prov_a))
        }
        BeltsumCmd::Interval { a, b } => {
            let (da, mut prov_a) = resolve_tangle(ctx, &a)?;
            let (db, prov_b) = resolve_tangle(ctx, &b)?;
            prov_a.extend(prov_b);
            let interval = beltsum::knot_density_interval(&da, &db)?;
            let mut doc = Document::new();
            doc.push("lo", interval.lo);
            doc.push("hi", interval.hi);
            doc.push("lo_source", interval.lo_source.describe());
            doc.push("hi_source", interval.hi_source.describe());
            Ok((doc, prov_a))
        }
        BeltsumCmd::Sample { a, b, target, eps } => {
            let (da, mut prov_a) = resolve_tangle(ctx, &a)?;
            let (db, prov_b) = resolve_tangle(ctx, &b)?;
            prov_a.extend(prov_b);
            let (k, p) = beltsum::sample_parameters(&da, &db, target, eps)?;
            let achieved = beltsum::iterated_belt_sum(&da, &db, k, p)?.density();
            let mut doc = Document::new();
            doc.push("k", k);
            doc.push("p", p);
            doc.push("target", target);
            doc.push("eps", eps);
            doc.push("achieved_density", achieved);
            Ok((doc, prov_a))
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeedFile {
    tangle_cusp_volume: f64,
    belt_cusp_volume: f64,
    crossing_number: u64,
}

fn resolve_seed(ctx: &Ctx, target: &str) -> Result<(CoverTwistSeed<f64>, Vec<String>), CmdError> {
    let registry = ctx.registry()?;
    match registry.get(target) {
        Ok(entry) => {
            let geometry = registry.geometry(target)?;
            let seed = CoverTwistSeed::from_geometry(geometry)?;
            Ok((seed, vec![format!("{target}: {}", entry.provenance)]))
        }
        Err(RegistryError::Missing { .. }) if Path::new(target).exists() => {
            let text = std::fs::read_to_string(target)
                .map_err(|e| CmdError::domain(format!("cannot read `{target}`: {e}")))?;
            let raw: RawSeedFile = toml::from_str(&text)
                .map_err(|e| CmdError::domain(format!("bad seed file `{target}`: {e}")))?;
            let seed = CoverTwistSeed::new(
                raw.tangle_cusp_volume,
                raw.belt_cusp_volume,
                raw.crossing_number,
            )?;
            Ok((seed, vec![format!("{target}: user-provided seed file")]))
        }
        Err(err) => Err(CmdError::domain(format!(
            "{err}; known entries: {}",
            registry.names().collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn parse_params(text: &str) -> Result<std::collections::BTreeMap<String, u64>, CmdError> {
    let mut out = std::collections::BTreeMap::new();
    for part in text.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| CmdError::domain(format!("bad parameter `{part}`, expected K=V")))?;
        let value = value
            .trim()
            .parse::<u64>()
            .map_err(|_| CmdError::domain(format!("bad integer in parameter `{part}`")))?;
        out.insert(key.trim().to_owned(), value);
    }
    Ok(out)
}

fn param(
    params: &std::collections::BTreeMap<String, u64>,
    key: &str,
) -> Result<u64, CmdError> {
    params
        .get(key)
        .copied()
        .ok_or_else(|| CmdError::domain(format!("missing parameter `{key}`")))
}

fn push_family_point(doc: &mut Document, point: &FamilyPoint<f64>) {
    doc.push("crossing_number", point.crossing_number);
    if let Some(volume) = point.volume {
        doc.push("volume", volume);
    }
    if let Some(cusp_volume) = point.cusp_volume {
        doc.push("cusp_volume", cusp_volume);
    }
    doc.push("d_cc", point.d_cc);
}

fn cmd_family(ctx: &Ctx, cmd: FamilyCmd) -> CmdOutcome {
    match cmd {
        FamilyCmd::Eval { family, params, seed } => {
            let registry = ctx.registry()?;
            let params = parse_params(&params)?;
            let mut provenance = Vec::new();
            let spec = match family.as_str() {
                "twist" => {
                    provenance.push(format!(
                        "whitehead_link: {}",
                        registry.get("whitehead_link")?.provenance
                    ));
                    FamilySpec::Twist { q: param(&params, "q")? }
                }
                "octahedral" => FamilySpec::Octahedral {
                    n: param(&params, "n")?,
                    k: param(&params, "k")?,
                    prime: false,
                },
                "octahedral_prime" => FamilySpec::Octahedral {
                    n: param(&params, "n")?,
                    k: param(&params, "k")?,
                    prime: true,
                },
                "cover_twist" => {
                    let seed_name = seed.ok_or_else(|| {
                        CmdError::domain("--family cover_twist requires --seed")
                    })?;
                    let (seed, prov) = resolve_seed(ctx, &seed_name)?;
                    provenance.extend(prov);
                    FamilySpec::CoverTwist {
                        seed,
                        n: param(&params, "n")?,
                        m: param(&params, "m")?,
                    }
                }
                other => {
                    return Err(CmdError::domain(format!(
                        "unknown family `{other}`; expected twist, octahedral, octahedral_prime or cover_twist"
                    )))
                }
            };
            let point = families::eval(&registry, &spec)?;
            let mut doc = Document::new();
            doc.push("family", family.as_str());
            for (key, value) in &params {
                doc.push(key, *value);
            }
            push_family_point(&mut doc, &point);
            Ok((doc, provenance))
        }
        FamilyCmd::Sample { family, seed, target, eps } => {
            if family != "cover_twist" {
                return Err(CmdError::domain(format!(
                    "sampling is defined for --family cover_twist, got `{family}`"
                )));
            }
            let (seed, provenance) = resolve_seed(ctx, &seed)?;
            let (n, m) = families::cover_twist_sample(&seed, target, eps)?;
            let point = families::cover_twist(&seed, n, m)?;
            let mut doc = Document::new();
            doc.push("n", n);
            doc.push("m", m);
            doc.push("target", target);
            doc.push("eps", eps);
            doc.push("achieved_d_cc", point.d_cc);
            doc.push("density_ceiling", seed.density_ceiling());
            Ok((doc, provenance))
        }
        FamilyCmd::Intervals => {
            let registry = ctx.registry()?;
            let intervals = families::interval_endpoints(&registry)?;
            let mut doc = Document::new();
            let mut provenance = Vec::new();
            for interval in &intervals {
                let mut section = Document::new();
                section.push("lo", interval.lo);
                section.push("hi", interval.hi);
                section.push("provenance", interval.provenance.as_str());
                doc.push_section(interval.name, section);
                provenance.push(format!("{}: {}", interval.name, interval.provenance));
            }
            Ok((doc, provenance))
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOctFile {
    infinity: f64,
    origin: f64,
    equator: [f64; 4],
}

fn resolve_config(target: &str) -> Result<OctahedronConfig<f64>, CmdError> {
    match target {
        "standard" => Ok(OctahedronConfig::standard()),
        "opposite" => Ok(OctahedronConfig::opposite_expansion()),
        "edge" => Ok(OctahedronConfig::edge_tangent()),
        path if Path::new(path).exists() => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CmdError::domain(format!("cannot read `{path}`: {e}")))?;
            let raw: RawOctFile = toml::from_str(&text)
                .map_err(|e| CmdError::domain(format!("bad config file `{path}`: {e}")))?;
            Ok(OctahedronConfig::new(raw.infinity, raw.origin, raw.equator)?)
        }
        other => Err(CmdError::domain(format!(
            "unknown config `{other}`; expected standard, opposite, edge or a file"
        ))),
    }
}

fn parse_floats(text: &str) -> Result<Vec<f64>, CmdError> {
    text.split(',')
        .map(|part| {
            let part = part.trim();
            part.parse::<f64>()
                .map_err(|_| CmdError::domain(format!("bad number `{part}`")))
        })
        .collect()
}

fn parse_ball(text: &str) -> Result<Horoball<f64>, CmdError> {
    if let Some(rest) = text.strip_prefix("inf,") {
        let values = parse_floats(rest)?;
        if values.len() != 1 {
            return Err(CmdError::domain("ball at infinity takes one height: inf,HEIGHT"));
        }
        return Ok(Horoball::at_infinity(values[0])?);
    }
    let values = parse_floats(text)?;
    if values.len() != 3 {
        return Err(CmdError::domain("finite ball takes X,Y,DIAMETER"));
    }
    Ok(Horoball::finite(Complex::new(values[0], values[1]), values[2])?)
}

fn parse_plane(text: &str) -> Result<GeodesicPlane<f64>, CmdError> {
    if let Some(rest) = text.strip_prefix("hemisphere,") {
        let values = parse_floats(rest)?;
        if values.len() != 3 {
            return Err(CmdError::domain("hemisphere takes CX,CY,R"));
        }
        return Ok(GeodesicPlane::hemisphere(Complex::new(values[0], values[1]), values[2])?);
    }
    if let Some(rest) = text.strip_prefix("vertical,") {
        let values = parse_floats(rest)?;
        if values.len() != 4 {
            return Err(CmdError::domain("vertical plane takes PX,PY,DX,DY"));
        }
        return Ok(GeodesicPlane::vertical(
            Complex::new(values[0], values[1]),
            Complex::new(values[2], values[3]),
        )?);
    }
    Err(CmdError::domain("plane must start with hemisphere, or vertical,"))
}

fn push_config(doc: &mut Document, cfg: &OctahedronConfig<f64>) {
    doc.push("infinity", cfg.infinity);
    doc.push("origin", cfg.origin);
    doc.push(
        "equator",
        Value::List(cfg.equator.iter().map(|&d| Value::Float(d)).collect()),
    );
}

fn cmd_horoball(cmd: HoroballCmd) -> CmdOutcome {
    match cmd {
        HoroballCmd::Pack { config } => {
            let cfg = resolve_config(&config)?;
            let mut doc = Document::new();
            doc.push("config", config.as_str());
            push_config(&mut doc, &cfg);
            doc.push("feasible", cfg.feasible());
            let mut volumes = Document::new();
            volumes.push("infinity", cfg.vertex_volume(OctVertex::Infinity));
            volumes.push("origin", cfg.vertex_volume(OctVertex::Origin));
            volumes.push(
                "equator",
                Value::List(
                    (0..4)
                        .map(|i| Value::Float(cfg.vertex_volume(OctVertex::Equator(i))))
                        .collect(),
                ),
            );
            volumes.push("total", cfg.total_volume());
            doc.push_section("volumes", volumes);
            Ok((doc, Vec::new()))
        }
        HoroballCmd::Search { seed, iters } => {
            let outcome = horoball::search_packing_max::<f64>(seed, iters)?;
            let mut doc = Document::new();
            doc.push("seed", seed);
            doc.push("iterations", outcome.evaluations);
            doc.push("best_total", outcome.best_total);
            let mut best = Document::new();
            push_config(&mut best, &outcome.best_config);
            doc.push_section("best_config", best);
            Ok((doc, Vec::new()))
        }
        HoroballCmd::Pokes { ball, plane } => {
            let b = parse_ball(&ball)?;
            let p = parse_plane(&plane)?;
            let mut doc = Document::new();
            doc.push("ball", ball.as_str());
            doc.push("plane", plane.as_str());
            doc.push("pokes", horoball::pokes(&b, &p));
            Ok((doc, Vec::new()))
        }
    }
}
