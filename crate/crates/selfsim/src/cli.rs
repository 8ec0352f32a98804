//! Command dispatch.
//!
//! Exit codes: 0 on success or PASS, 1 when a certificate is refused or
//! inconclusive, 2 on input errors and unknown commands.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use selfsim_core::address::{classify_all, classify_discrete, count_chains, enumerate_chains};
use selfsim_core::algebra::{verify_fixed_point, FixedPointFailure};
use selfsim_core::cantor::{
    cylinder_interval, parse_word, rho, rho_stream, sigma, sigma_stream, ternary_embed, ternary_embed_stream,
    LassoChain, SplitChoice, Word,
};
use selfsim_core::category::{FinSetFunctor, ObjId};
use selfsim_core::cover::{build_cover_system, build_j_and_verify, validate_separating, Tail};
use selfsim_core::ifs::{compile_system, overlap_report, rasterize, OverlapVerdict};
use selfsim_core::rational::{format_rational, parse_rational};
use selfsim_core::recognition::{check_crude, check_precise_diam, Certificate, FixedPointEvidence, Rule};
use selfsim_core::simplex::{bary_module, edge_module, format_point, subdivide_mesh, Scheme};
use selfsim_core::transforms::{binarize, prune_empty, product_system, reachable_subsystem};
use selfsim_core::{tensor, AddressChain, ElemId, Error, Rational, SystemDef};

use crate::dsl::{parse_metric, parse_sysdef, print_sysdef, print_with_metric, MetricSpec, Parsed};
use crate::export::{to_dot, to_off, to_pgm};
use crate::json::{
    describe_blocking, describe_witness, CertificateJson, ClassificationJson, CoalgebraJson, CoverJson, FunctorJson,
    IfsJson, MorphismLogJson, SystemJson, TensorJson,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Refused(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Refused(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Structural(_) | Error::Unsupported(_) => CliError::Refused(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type Outcome = Result<i32, CliError>;

#[derive(Parser, Debug)]
#[command(name = "selfsim", version, about = "Define, solve and certify self-similarity systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and check a system file
    Validate(ValidateArgs),
    /// Compute M ⊗ X (X defaults to the one-point functor)
    Tensor(TensorArgs),
    /// Check that a coalgebra X → M ⊗ X is invertible and natural
    Fixpoint(FixpointArgs),
    /// Count or list address chains of a given depth
    Addresses(AddressesArgs),
    /// Classify the solution spaces of a discrete system
    Classify(ClassifyArgs),
    /// Certify universality from metric annotations
    Recognize(RecognizeArgs),
    /// Build new systems from old ones
    #[command(subcommand)]
    Transform(TransformCmd),
    /// Encode chains as bit words and embed them in [0, 1]
    #[command(subcommand)]
    Cantor(CantorCmd),
    /// Barycentric and edgewise subdivision of a simplex
    Subdivide(SubdivideArgs),
    /// Iterated function systems
    #[command(subcommand)]
    Ifs(IfsCmd),
    /// Systems generated by sequences of finite covers
    #[command(subcommand)]
    Cover(CoverCmd),
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub metric: Option<PathBuf>,
    /// Also check that every M(b, −) preserves pullbacks and equalizers
    #[arg(long)]
    pub nondegenerate: bool,
    /// Print the system as JSON
    #[arg(long)]
    pub json: bool,
    /// Write a Graphviz drawing of the system
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TensorArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub functor: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct FixpointArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub functor: PathBuf,
    #[arg(long)]
    pub coalgebra: PathBuf,
}

#[derive(Args, Debug)]
pub struct AddressesArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub depth: usize,
    #[arg(long)]
    pub object: Option<String>,
    /// List the chains instead of counting them (needs --object)
    #[arg(long, requires = "object")]
    pub list: bool,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub object: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("rule").required(true).args(["crude", "precise"]))]
pub struct RecognizeArgs {
    pub file: PathBuf,
    /// Annotations; defaults to the `metric` section of the system file
    #[arg(long)]
    pub metric: Option<PathBuf>,
    #[arg(long)]
    pub crude: bool,
    #[arg(long)]
    pub precise: bool,
    /// Object for the precise rule; all objects when omitted
    #[arg(long)]
    pub object: Option<String>,
    #[arg(long, default_value = "1/1000000")]
    pub eps: String,
    /// Finite carriers for a checked fixed point (with --coalgebra)
    #[arg(long, requires = "coalgebra")]
    pub functor: Option<PathBuf>,
    #[arg(long, requires = "functor")]
    pub coalgebra: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum TransformCmd {
    /// Componentwise product of systems
    Product {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rewrite a discrete system so that every object has at most two summands
    Binarize {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the correspondence as JSON
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Drop objects without infinite chains
    Prune {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Restrict to the objects that feed into one object
    Reachable {
        file: PathBuf,
        #[arg(long)]
        object: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CantorCmd {
    /// Chain to bit word
    Encode {
        file: PathBuf,
        #[arg(long)]
        object: Option<String>,
        /// Element names, optionally ending in `(m1 m2)^ω`
        #[arg(long, allow_hyphen_values = true)]
        chain: String,
    },
    /// Bit word to chain
    Decode {
        file: PathBuf,
        #[arg(long)]
        object: Option<String>,
        #[arg(long)]
        word: String,
    },
    /// Bit word to a point of the middle-thirds Cantor set
    Embed {
        #[arg(long)]
        word: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SchemeArg {
    Bary,
    Edge,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Bary => Scheme::Barycentric,
            SchemeArg::Edge => Scheme::Edgewise,
        }
    }
}

#[derive(Args, Debug)]
pub struct SubdivideArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeArg,
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 1)]
    pub levels: usize,
    /// OFF mesh output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the subdivision system truncated at --dim instead of a mesh
    #[arg(long)]
    pub system: bool,
}

#[derive(Subcommand, Debug)]
pub enum IfsCmd {
    /// Compile to a two-object system with annotations
    Compile {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rasterize the attractor (2-dimensional systems)
    Render {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report how the first-level pieces meet
    Overlap {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: u32,
    },
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
pub enum TailArg {
    #[default]
    Truncate,
    Loops,
}

impl From<TailArg> for Tail {
    fn from(t: TailArg) -> Tail {
        match t {
            TailArg::Truncate => Tail::Truncate,
            TailArg::Loops => Tail::PointLoops,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum CoverCmd {
    /// Emit the cover-generated system
    Compile {
        file: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value_t = TailArg::Truncate)]
        tail: TailArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check separation and that M ⊗ J → J is an isomorphism
    Verify {
        file: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value_t = TailArg::Truncate)]
        tail: TailArg,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let mut text = String::new();
    let code = match &cli.command {
        Command::Validate(a) => validate(a, &mut text)?,
        Command::Tensor(a) => tensor_cmd(a, &mut text)?,
        Command::Fixpoint(a) => fixpoint(a, &mut text)?,
        Command::Addresses(a) => addresses(a, &mut text)?,
        Command::Classify(a) => classify(a, &mut text)?,
        Command::Recognize(a) => recognize(a, &mut text)?,
        Command::Transform(t) => transform(t, &mut text)?,
        Command::Cantor(c) => cantor(c, &mut text)?,
        Command::Subdivide(a) => subdivide(a, &mut text)?,
        Command::Ifs(c) => ifs(c, &mut text)?,
        Command::Cover(c) => cover(c, &mut text)?,
    };
    out.write_all(text.as_bytes())?;
    Ok(code)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Parsed, CliError> {
    parse_sysdef(&read(path)?).map_err(|d| CliError::Input(format!("{}:{d}", path.display())))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_metric(parsed: &Parsed, path: Option<&Path>) -> Result<Option<MetricSpec>, CliError> {
    match path {
        Some(p) => parse_metric(&read(p)?, &parsed.system)
            .map(Some)
            .map_err(|d| CliError::Input(format!("{}:{d}", p.display()))),
        None => Ok(parsed.metric.clone()),
    }
}

fn write_out(path: Option<&Path>, contents: &str, text: &mut String) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, contents).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            text.push_str(contents);
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn object_arg(sys: &SystemDef, name: Option<&str>) -> Result<ObjId, CliError> {
    match name {
        Some(n) => Ok(sys.find_object(n)?),
        None if sys.object_count() == 1 => Ok(ObjId(0)),
        None => Err(CliError::Input("this system has several objects; pass --object".into())),
    }
}

fn point_functor(sys: &SystemDef) -> FinSetFunctor {
    let cat = sys.category();
    FinSetFunctor::new(
        vec![vec!["*".to_string()]; cat.object_count()],
        vec![vec![0]; cat.arrow_count()],
    )
}

fn validate(a: &ValidateArgs, text: &mut String) -> Outcome {
    let parsed = load(&a.file)?;
    let metric = load_metric(&parsed, a.metric.as_deref())?;
    let sys = &parsed.system;
    if let Some(p) = &a.dot {
        write_out(Some(p), &to_dot(sys), text)?;
    }
    if a.json {
        text.push_str(&to_json(&SystemJson::from_system(sys)));
        return Ok(0);
    }
    let cat = sys.category();
    let live = selfsim_core::address::liveness(sys);
    let _ = writeln!(
        text,
        "objects: {}, arrows: {} (+{} identities), elements: {}",
        cat.object_count(),
        cat.arrow_count() - cat.object_count(),
        cat.object_count(),
        sys.module().len()
    );
    for o in cat.objects() {
        let _ = writeln!(
            text,
            "  {}: {} summands, {}",
            cat.object_name(o),
            sys.module().elements_into(o).len(),
            if live[o.0] { "live" } else { "dead" }
        );
    }
    if metric.is_some() {
        text.push_str("metric: ok\n");
    }
    if a.nondegenerate {
        let report = sys.nondegeneracy();
        let failure = report
            .per_object
            .iter()
            .find_map(|(b, r)| r.witnesses.first().map(|w| (*b, w.describe(cat))));
        match failure {
            None => text.push_str("nondegenerate: yes\n"),
            Some((b, w)) => {
                let _ = writeln!(text, "nondegenerate: no, M({}, -) fails at the {w}", cat.object_name(b));
                return Ok(1);
            }
        }
    }
    text.push_str("valid\n");
    Ok(0)
}

fn tensor_cmd(a: &TensorArgs, text: &mut String) -> Outcome {
    let parsed = load(&a.file)?;
    let sys = &parsed.system;
    let x = match &a.functor {
        Some(p) => load_json::<FunctorJson>(p)?.to_functor(sys)?,
        None => point_functor(sys),
    };
    let t = tensor(sys, &x)?;
    let dto = TensorJson::new(sys, &x, &t);
    if a.json {
        text.push_str(&to_json(&dto));
        return Ok(0);
    }
    for (obj, classes) in &dto.objects {
        let _ = writeln!(text, "(M⊗X)({obj}): {}", classes.len());
        for c in classes {
            let members: Vec<String> = c.members.iter().map(|(m, y)| format!("{m}⊗{y}")).collect();
            let _ = writeln!(text, "  {} = {{{}}}", c.label, members.join(", "));
        }
    }
    Ok(0)
}

fn describe_failure(sys: &SystemDef, x: &FinSetFunctor, f: &FixedPointFailure) -> String {
    let cat = sys.category();
    match f {
        FixedPointFailure::NotInjective { object, elements } => format!(
            "γ at `{}` identifies `{}` and `{}`",
            cat.object_name(*object),
            x.label(*object, elements.0),
            x.label(*object, elements.1)
        ),
        FixedPointFailure::NotSurjective { object, class } => {
            format!("class {class} of (M⊗X)(`{}`) has no preimage", cat.object_name(*object))
        }
        FixedPointFailure::NotNatural { arrow, element } => {
            format!("γ is not natural along `{}` at element {element}", cat.arrow(*arrow).name)
        }
    }
}

fn fixpoint(a: &FixpointArgs, text: &mut String) -> Outcome {
    let parsed = load(&a.file)?;
    let sys = &parsed.system;
    let x = load_json::<FunctorJson>(&a.functor)?.to_functor(sys)?;
    let t = tensor(sys, &x)?;
    let gamma = load_json::<CoalgebraJson>(&a.coalgebra)?.to_coalgebra(sys, &x, &t)?;
    let report = verify_fixed_point(sys, &x, &gamma)?;
    match report.failure {
        None => {
            text.push_str("fixed point: γ is a natural bijection X ≅ M⊗X\n");
            Ok(0)
        }
        Some(f) => {
            let _ = writeln!(text, "not a fixed point: {}", describe_failure(sys, &x, &f));
            Ok(1)
        }
    }
}

fn addresses(a: &AddressesArgs, text: &mut String) -> Outcome {
    let parsed = load(&a.file)?;
    let sys = &parsed.system;
    let cat = sys.category();
    if a.list {
        let o = object_arg(sys, a.object.as_deref())?;
        for c in enumerate_chains(sys, o, a.depth) {
            let names: Vec<&str> = c.elements.iter().map(|&m| sys.module().name(m)).collect();
            let _ = writeln!(text, "{}", names.join(" "));
        }
        return Ok(0);
    }
    let objects: Vec<ObjId> = match &a.object {
        Some(n) => vec![sys.find_object(n)?],
        None => cat.objects().collect(),
    };
    for o in objects {
        let _ = writeln!(text, "{}: {}", cat.object_name(o), count_chains(sys, o, a.depth));
    }
    Ok(0)
}

fn classify(a: &ClassifyArgs, text: &mut String) -> Outcome {
    let parsed = load(&a.file)?;
    let sys = &parsed.system;
    let results = match &a.object {
        Some(n) => vec![classify_discrete(sys, sys.find_object(n)?)?],
        None => classify_all(sys)?,
    };
    if a.json {
        let dto: Vec<ClassificationJson> = results.iter().map(|c| ClassificationJson::new(sys, c)).collect();
        text.push_str(&to_json(&dto));
        return Ok(0);
    }
    for c in &results {
        let _ = writeln!(text, "{}: {}", sys.category().object_name(c.object), c.class);
        let _ = writeln!(text, "  witness: {}", describe_witness(sys, &c.witness));
    }
    Ok(0)
}

fn sketch(sys: &SystemDef, cert: &Certificate, eps: &Rational, text: &mut String) {
    let rule = match cert.rule {
        Rule::Crude => "crude",
        Rule::Precise => "precise",
    };
    match cert.object {
        Some(o) => {
            let _ = writeln!(text, "{} ({rule}, at {})", cert.verdict, sys.category().object_name(o));
        }
        None => {
            let _ = writeln!(text, "{} ({rule})", cert.verdict);
        }
    }
    for s in &cert.sccs {
        let objs: Vec<&str> = s.objects.iter().map(|&o| sys.category().object_name(o)).collect();
        let cyc: Vec<&str> = s.cycle.iter().map(|&m| sys.module().name(m)).collect();
        let _ = writeln!(
            text,
            "  component {{{}}}: max cycle product {} via [{}]{}",
            objs.join(", "),
            format_rational(&s.max_cycle_product),
            cyc.join(" "),
            if s.diameter_free { ", diameter free" } else { "" }
        );
    }
    if let Some(b) = &cert.bound {
        let (c, r) = (format_rational(&b.constant), format_rational(&b.ratio));
        let _ = if b.period == 1 {
            writeln!(text, "  chain images of length n have diameter <= {c} * ({r})^n")
        } else {
            writeln!(
                text,
                "  chain images of length n have diameter <= {c} * ({r})^ceil((n - {}) / {})",
                b.period - 1,
                b.period
            )
        };
        match cert.decay_depth(eps) {
            Some(n) => {
                let _ = writeln!(text, "  n(eps) = {n} for eps = {}", format_rational(eps));
            }
            None => {
                let _ = writeln!(text, "  no decay below eps = {}", format_rational(eps));
            }
        }
    }
    if let Some(b) = &cert.blocking {
        let _ = writeln!(text, "  blocked: {}", describe_blocking(sys, b));
    }
}

fn recognize(a: &RecognizeArgs, text: &mut String) -> Outcome {
    let parsed = load(&a.file)?;
    let sys = &parsed.system;
    let spec = load_metric(&parsed, a.metric.as_deref())?
        .ok_or_else(|| CliError::Input("no metric annotations; pass --metric".into()))?;
    let eps = parse_rational(&a.eps)?;
    let finite = match (&a.functor, &a.coalgebra) {
        (Some(f), Some(g)) => {
            let x = load_json::<FunctorJson>(f)?.to_functor(sys)?;
            let t = tensor(sys, &x)?;
            let gamma = load_json::<CoalgebraJson>(g)?.to_coalgebra(sys, &x, &t)?;
            Some((x, gamma))
        }
        _ => None,
    };
    let ev = match &finite {
        Some((x, gamma)) => FixedPointEvidence::Verified { x, gamma },
        None => FixedPointEvidence::Asserted {
            nonempty: spec.nonempty(),
        },
    };
    let certs = if a.crude {
        vec![check_crude(sys, &ev, &spec.annotation)?]
    } else {
        let objects: Vec<ObjId> = match &a.object {
            Some(n) => vec![sys.find_object(n)?],
            None => sys.category().objects().collect(),
        };
        objects
            .into_iter()
            .map(|o| check_precise_diam(sys, &ev, &spec.annotation, o))
            .collect::<Result<Vec<_>, _>>()?
    };
    if a.json {
        let dto: Vec<CertificateJson> = certs.iter().map(|c| CertificateJson::new(sys, c, &eps)).collect();
        text.push_str(&to_json(&dto));
    } else {
        for c in &certs {
            sketch(sys, c, &eps, text);
        }
    }
    Ok(if certs.iter().all(Certificate::passed) { 0 } else { 1 })
}

fn transform(t: &TransformCmd, text: &mut String) -> Outcome {
    match t {
        TransformCmd::Product { files, out } => {
            let systems = files
                .iter()
                .map(|f| load(f).map(|p| p.system))
                .collect::<Result<Vec<_>, _>>()?;
            let p = product_system(&systems)?;
            write_out(out.as_deref(), &print_sysdef(&p), text)?;
        }
        TransformCmd::Binarize { file, out, log } => {
            let sys = load(file)?.system;
            let (bin, l) = binarize(&sys)?;
            write_out(out.as_deref(), &print_sysdef(&bin), text)?;
            if let Some(p) = log {
                write_out(Some(p), &to_json(&MorphismLogJson::new(&sys, &bin, &l)), text)?;
            }
        }
        TransformCmd::Prune { file, out } => {
            let (p, _) = prune_empty(&load(file)?.system);
            write_out(out.as_deref(), &print_sysdef(&p), text)?;
        }
        TransformCmd::Reachable { file, object, out } => {
            let sys = load(file)?.system;
            let (p, _) = reachable_subsystem(&sys, sys.find_object(object)?);
            write_out(out.as_deref(), &print_sysdef(&p), text)?;
        }
    }
    Ok(0)
}

/// `m1 m2 (m3 m4)^ω` as element names; `^w` and `^omega` also accepted.
/// Whitespace-separated element names, optionally ending in a period
/// `(m1 … mk)^ω`. Names may themselves contain parentheses and commas, so
/// every token opening with `(` is tried as the start of the period.
fn parse_chain(sys: &SystemDef, s: &str) -> Result<(Vec<ElemId>, Vec<ElemId>), CliError> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    let names = |ts: &[&str]| -> Option<Vec<ElemId>> { ts.iter().map(|n| sys.find_element(n).ok()).collect() };
    let last = toks.last().copied().unwrap_or("");
    let Some(body) = ["^ω", "^w", "^omega"]
        .iter()
        .find_map(|suffix| last.strip_suffix(suffix))
        .and_then(|t| t.strip_suffix(')'))
    else {
        let prefix = toks
            .iter()
            .map(|n| sys.find_element(n).map_err(CliError::from))
            .collect::<Result<_, _>>()?;
        return Ok((prefix, Vec::new()));
    };
    let n = toks.len();
    for i in (0..n).filter(|&i| toks[i].starts_with('(')) {
        let mut cycle: Vec<&str> = toks[i..].to_vec();
        cycle[0] = &cycle[0][1..];
        let k = cycle.len() - 1;
        cycle[k] = if i == n - 1 { &body[1..] } else { body };
        let cycle: Vec<&str> = cycle.into_iter().filter(|t| !t.is_empty()).collect();
        if cycle.is_empty() {
            continue;
        }
        if let (Some(p), Some(c)) = (names(&toks[..i]), names(&cycle)) {
            return Ok((p, c));
        }
    }
    Err(CliError::Input(format!("`{s}` is not a chain of declared elements")))
}

fn cantor(c: &CantorCmd, text: &mut String) -> Outcome {
    match c {
        CantorCmd::Encode { file, object, chain } => {
            let sys = load(file)?.system;
            let base = object_arg(&sys, object.as_deref())?;
            let choice = SplitChoice::default_for(&sys)?;
            let (prefix, cycle) = parse_chain(&sys, chain)?;
            if cycle.is_empty() {
                let ch = AddressChain { base, elements: prefix };
                let _ = writeln!(text, "{}", sigma(&sys, &choice, &ch)?);
            } else {
                let lasso = LassoChain { base, prefix, cycle };
                if !lasso.is_valid(&sys) {
                    return Err(CliError::Input("not an infinite chain of this system".into()));
                }
                let _ = writeln!(text, "{}", sigma_stream(&sys, &choice, &lasso)?);
            }
        }
        CantorCmd::Decode { file, object, word } => {
            let sys = load(file)?.system;
            let base = object_arg(&sys, object.as_deref())?;
            let choice = SplitChoice::default_for(&sys)?;
            let name = |m: &ElemId| sys.module().name(*m).to_string();
            match parse_word(word)? {
                Word::Finite(w) => {
                    let ch = rho(&sys, &choice, base, &w)?;
                    let _ = writeln!(text, "{}", ch.elements.iter().map(name).collect::<Vec<_>>().join(" "));
                }
                Word::Periodic(s) => {
                    let l = rho_stream(&sys, &choice, base, &s)?;
                    let pre: Vec<String> = l.prefix.iter().map(name).collect();
                    let cyc: Vec<String> = l.cycle.iter().map(name).collect();
                    let sep = if pre.is_empty() { "" } else { " " };
                    let _ = writeln!(text, "{}{sep}({})^ω", pre.join(" "), cyc.join(" "));
                }
            }
        }
        CantorCmd::Embed { word } => match parse_word(word)? {
            Word::Finite(w) => {
                let (lo, hi) = cylinder_interval(&w);
                let _ = writeln!(
                    text,
                    "{}  cylinder [{}, {}]",
                    format_rational(&ternary_embed(&w)),
                    format_rational(&lo),
                    format_rational(&hi)
                );
            }
            Word::Periodic(s) => {
                let _ = writeln!(text, "{}", format_rational(&ternary_embed_stream(&s)));
            }
        },
    }
    Ok(0)
}

fn subdivide(a: &SubdivideArgs, text: &mut String) -> Outcome {
    let scheme: Scheme = a.scheme.into();
    if a.system {
        let s = match scheme {
            Scheme::Barycentric => bary_module(a.dim),
            Scheme::Edgewise => edge_module(a.dim),
        };
        write_out(a.out.as_deref(), &print_sysdef(&s.system), text)?;
        return Ok(0);
    }
    let mesh = subdivide_mesh(scheme, a.dim, a.levels)?;
    let max = (0..mesh.cells.len())
        .map(|c| mesh.squared_diameter(c))
        .max()
        .unwrap_or_default();
    let _ = writeln!(text, "cells: {}", mesh.cells.len());
    let _ = writeln!(text, "vertices: {}", mesh.vertices.len());
    let _ = writeln!(text, "max squared cell diameter: {}", format_rational(&max));
    if let Some(p) = &a.out {
        write_out(Some(p), &to_off(&mesh), text)?;
    }
    Ok(0)
}

fn ifs(c: &IfsCmd, text: &mut String) -> Outcome {
    match c {
        IfsCmd::Compile { file, depth, out } => {
            let ifs = load_json::<IfsJson>(file)?.to_ifs()?;
            let report = overlap_report(&ifs, *depth)?;
            let compiled = compile_system(&ifs, &report)?;
            let spec = MetricSpec {
                annotation: compiled.annotation.clone(),
                empty: vec![false; compiled.system.object_count()],
            };
            let dsl = print_with_metric(&compiled.system, &spec);
            match out {
                Some(p) => {
                    write_out(Some(p), &dsl, text)?;
                    let _ = writeln!(
                        text,
                        "compiled: {} elements, {} contact classes",
                        compiled.system.module().len(),
                        compiled.classes.len()
                    );
                }
                None => text.push_str(&dsl),
            }
        }
        IfsCmd::Render { file, depth, out } => {
            let ifs = load_json::<IfsJson>(file)?.to_ifs()?;
            let r = rasterize(&ifs, *depth)?;
            fs::write(out, to_pgm(&r)).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
            let _ = writeln!(text, "{}x{} raster, {} pixels set", r.width, r.height, r.count());
        }
        IfsCmd::Overlap { file, depth } => {
            let ifs = load_json::<IfsJson>(file)?.to_ifs()?;
            let report = overlap_report(&ifs, *depth)?;
            for p in &report.pairs {
                let v = match &p.verdict {
                    OverlapVerdict::Disjoint => "disjoint".to_string(),
                    OverlapVerdict::PointOnly(pts) => {
                        let pts: Vec<String> = pts.iter().map(|q| format_point(q)).collect();
                        format!("point only at {}", pts.join(", "))
                    }
                    OverlapVerdict::Unresolved {
                        components,
                        contact_cells,
                    } => format!("unresolved ({components} contact components, {contact_cells} cells)"),
                };
                let _ = writeln!(text, "maps {} and {}: {v}", p.i, p.j);
            }
            return Ok(if report.point_only() { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn cover(c: &CoverCmd, text: &mut String) -> Outcome {
    let (file, depth, tail) = match c {
        CoverCmd::Compile { file, depth, tail, .. } | CoverCmd::Verify { file, depth, tail } => (file, depth, tail),
    };
    let input = load_json::<CoverJson>(file)?;
    let space = input.space()?;
    let (cov, default_depth) = input.covers(&space)?;
    let cs = build_cover_system(&space, &cov, depth.unwrap_or(default_depth), (*tail).into())?;
    match c {
        CoverCmd::Compile { out, .. } => {
            write_out(out.as_deref(), &print_sysdef(&cs.system), text)?;
            Ok(0)
        }
        CoverCmd::Verify { .. } => {
            let sep = validate_separating(&space, &cov)?;
            match sep.max_depth() {
                Some(d) if sep.separated() => {
                    let _ = writeln!(text, "separating: every pair of points splits by level {d}");
                }
                _ => {
                    let _ = writeln!(text, "separating: no, {} pairs never split", sep.unseparated().len());
                }
            }
            let (_, v) = build_j_and_verify(&cs)?;
            match &v.failure {
                None => {
                    let _ = writeln!(
                        text,
                        "M⊗J → J is an isomorphism on {} levels ({} objects)",
                        v.levels_checked, v.objects_checked
                    );
                }
                Some(f) => {
                    let _ = writeln!(text, "M⊗J → J fails: {f}");
                }
            }
            Ok(if v.is_iso() && sep.separated() { 0 } else { 1 })
        }
    }
}
