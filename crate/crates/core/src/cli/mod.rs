//! Command-line front end. Every command prints one JSON document with sorted
//! keys; the process exit code encodes the outcome.

mod pipeline;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::equivariant::{
    build_orbit_quiver, choose_homogeneous_xi, choose_with_any_dimer, equivariant_dimer, refine_tiling,
    transport_potential, verify_transport_identity, AutomorphismFile, ChoiceCertificate, ChoiceFile, EquivError,
    OrbitChoice, QuiverAutomorphism, SemidirectQuiver, TilingAutomorphism,
};
use crate::pathalg::io::{element_to_file, parse_element, parse_qpot, qpot_to_file};
use crate::pathalg::{check_d_squared, cyclic_derivative, ginzburg_dga, PathError, Potential, Quiver};
use crate::presentation::{
    check_derivation_script, verify_psi_relations, Backend, DerivationScript, PresentationConfig, PresentationError,
    PsiContext,
};
use crate::repcount::{
    conjecture_probe_d1, enumerate_reps, is_prime, localized_generator_quiver, stratify_by_omega, CountOptions, Mode,
    RepError,
};
use crate::surfacemap::{dual_quiver, is_dimer, meets_each_term_once, validate_tiling, BraneTiling, MapError};

pub use pipeline::{run_pipeline, PipelineConfig, PipelineInputs, RunReport, StageReport};

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 2;
pub const EXIT_NO_CHOICE: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("no admissible choice: {0}")]
    NoChoice(String),
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NoChoice(_) => EXIT_NO_CHOICE,
            _ => EXIT_INPUT,
        }
    }
}

impl From<EquivError> for CliError {
    fn from(e: EquivError) -> Self {
        match e {
            EquivError::NoChoiceFound(m) => CliError::NoChoice(m),
            EquivError::Unbalanceable(_) => CliError::NoChoice(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

macro_rules! input_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Input(e.to_string())
            }
        }
    )*};
}
input_error!(PathError, MapError, RepError, PresentationError, serde_json::Error);

/// A JSON result and whether every verification in it passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub value: Value,
    pub pass: bool,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome { value, pass: true }
    }
}

#[derive(Parser, Debug)]
#[command(name = "tessella", version, about = "Brane tilings, orbit quivers, transported potentials and point counts")]
pub struct Cli {
    /// Write the JSON result here instead of standard output.
    #[arg(long, short = 'o', global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Where the quiver with potential and its symmetry come from.
#[derive(Args, Debug, Clone)]
pub struct ContextArgs {
    /// Tiling file; the quiver is its dual.
    #[arg(long, conflicts_with = "qpot")]
    pub tiling: Option<PathBuf>,
    /// Quiver-with-potential file.
    #[arg(long)]
    pub qpot: Option<PathBuf>,
    /// Automorphism file (`half_edge_perm` for tilings, `arrow_perm` for quivers).
    #[arg(long)]
    pub automorphism: PathBuf,
    /// Orbit choice file; searched for when omitted with a tiling, canonical with a quiver.
    #[arg(long)]
    pub choice: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsiMode {
    Certificate,
    Dehn,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a tiling file and report its invariants.
    Validate { tiling: PathBuf },
    /// Dual quiver with potential of a tiling.
    Dual { tiling: PathBuf },
    /// Subdivide faces with short orbits so every orbit is full.
    Refine {
        tiling: PathBuf,
        #[arg(long)]
        automorphism: PathBuf,
    },
    /// A symmetric perfect matching, adding edges and vertices if needed.
    Dimer {
        tiling: PathBuf,
        #[arg(long)]
        automorphism: Option<PathBuf>,
    },
    /// Search for an orbit choice grading a dimer.
    ChooseXi {
        tiling: PathBuf,
        #[arg(long)]
        automorphism: PathBuf,
        /// Comma-separated arrow names; by default the symmetric dimer, then every dimer.
        #[arg(long)]
        dimer: Option<String>,
        /// Maximum number of dimers tried in the fallback.
        #[arg(long, default_value_t = 10_000)]
        limit: usize,
    },
    /// The orbit quiver of a symmetric quiver.
    OrbitQuiver(ContextArgs),
    /// Transported potential and its degrees.
    Transport(ContextArgs),
    /// Check `a·∂W′/∂a` against the images of the original terms through `a`.
    VerifyTransport {
        #[command(flatten)]
        ctx: ContextArgs,
        /// Arrow name; every generator when omitted.
        #[arg(long)]
        arrow: Option<String>,
        /// Check every generator (the default).
        #[arg(long)]
        all: bool,
    },
    /// Cyclic derivative along one arrow.
    Derive {
        qpot: PathBuf,
        #[arg(long)]
        arrow: String,
    },
    /// Check `d² = 0` on the Ginzburg dga.
    GdgaCheck { qpot: PathBuf },
    /// Check that the matrix-unit map kills every derivative relation.
    PsiVerify {
        #[command(flatten)]
        ctx: ContextArgs,
        /// Presentation config: genus, order, phi_star, arrow_words, tree, basepoint.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = PsiMode::Certificate)]
        mode: PsiMode,
    },
    /// Check a derivation script against a transported potential.
    CheckScript {
        script: PathBuf,
        /// Quiver with the transported potential (as written by `transport`).
        #[arg(long)]
        qpot: PathBuf,
    },
    /// Count representations over a prime field.
    Count {
        #[arg(long)]
        qpot: PathBuf,
        #[arg(short = 'd', default_value_t = 1)]
        d: usize,
        #[arg(short = 'q')]
        q: u64,
        /// Element file; the counts are split by how it acts.
        #[arg(long)]
        omega: Option<PathBuf>,
        /// Sample this many points instead of enumerating.
        #[arg(long, requires = "seed")]
        sample: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Run the three criticality checks on every point.
        #[arg(long)]
        verify: bool,
    },
    /// Both sides of the degree-one coefficient identity (report only).
    Probe {
        #[arg(long)]
        qpot: PathBuf,
        #[arg(long)]
        omega: PathBuf,
        #[arg(short = 'q', default_value_t = 3)]
        q: u64,
    },
    /// Run every stage from a config file, or the bundled example.
    Pipeline {
        /// Pipeline config; paths inside are relative to its directory.
        config: Option<PathBuf>,
        /// Run the bundled genus-2 example.
        #[arg(long, conflicts_with = "config")]
        example: bool,
        /// Override the output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, value_enum)]
        psi_mode: Option<PsiMode>,
    },
}

pub(crate) fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_canonical_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    std::fs::write(path, to_canonical_json(v))
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub(crate) fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn load_tiling(path: &Path) -> Result<BraneTiling, CliError> {
    let t = BraneTiling::parse(&read(path)?)?;
    let report = validate_tiling(&t);
    if !report.valid {
        return Err(CliError::Input(format!("invalid tiling: {}", report.violations.join("; "))));
    }
    Ok(t)
}

fn load_qpot(path: &Path) -> Result<(Quiver, Potential), CliError> {
    Ok(parse_qpot(&read(path)?)?)
}

fn load_automorphism_file(path: &Path) -> Result<AutomorphismFile, CliError> {
    Ok(serde_json::from_str(&read(path)?)?)
}

pub(crate) fn qpot_value(q: &Quiver, w: &Potential) -> Value {
    value(&qpot_to_file(q, w))
}

pub(crate) fn choice_value(c: &ChoiceCertificate) -> Value {
    json!({
        "choice": value(&c.choice.to_file(&c.quiver)),
        "degrees": value(&c.degrees),
        "dimer": value(&c.dimer),
        "tried": c.tried,
        "homogeneous_degree": c.transported.homogeneous_degree,
    })
}

fn parse_dimer(t: &BraneTiling, names: &str) -> Result<BTreeSet<usize>, CliError> {
    let all = t.arrow_names();
    names
        .split(',')
        .map(|n| all.iter().position(|x| x == n.trim()).ok_or_else(|| CliError::Input(format!("no edge named {n:?}"))))
        .collect()
}

/// Refine, take the symmetric dimer, and search for a choice grading it;
/// falls back to every dimer of the refined tiling.
pub(crate) fn search_choice(
    t: &BraneTiling,
    phi: &TilingAutomorphism,
    dimer: Option<&BTreeSet<usize>>,
    limit: usize,
) -> Result<(BraneTiling, TilingAutomorphism, ChoiceCertificate), CliError> {
    let (t, phi) = refine_tiling(t, phi)?;
    if let Some(d) = dimer {
        if !is_dimer(&t, d) {
            return Err(CliError::Input("the given edges are not a perfect matching".into()));
        }
        let c = choose_homogeneous_xi(&t, &phi, d)?;
        return Ok((t, phi, c));
    }
    let out = equivariant_dimer(&t, &phi)?;
    match choose_homogeneous_xi(&out.tiling, &out.phi, &out.dimer) {
        Ok(c) => Ok((out.tiling, out.phi, c)),
        Err(EquivError::NoChoiceFound(_)) => {
            let c = choose_with_any_dimer(&out.tiling, &out.phi, limit)?;
            Ok((out.tiling, out.phi, c))
        }
        Err(e) => Err(e.into()),
    }
}

/// Original quiver, potential and orbit quiver for a command.
pub(crate) fn load_context(a: &ContextArgs) -> Result<(Potential, SemidirectQuiver), CliError> {
    let f = load_automorphism_file(&a.automorphism)?;
    let choice_file: Option<ChoiceFile> =
        a.choice.as_deref().map(|p| Ok::<_, CliError>(serde_json::from_str(&read(p)?)?)).transpose()?;
    match (&a.tiling, &a.qpot) {
        (Some(tp), _) => {
            let t = load_tiling(tp)?;
            let phi = TilingAutomorphism::from_file(&t, &f)?;
            match choice_file {
                Some(cf) => {
                    let (q, w) = dual_quiver(&t)?;
                    let qphi = phi.on_dual(&t, &q)?;
                    let ctx = build_orbit_quiver(&q, &qphi, &OrbitChoice::from_file(&q, &cf)?)?;
                    Ok((w, ctx))
                }
                None => {
                    let (_, _, c) = search_choice(&t, &phi, None, 10_000)?;
                    Ok((c.potential, c.context))
                }
            }
        }
        (None, Some(qp)) => {
            let (q, w) = load_qpot(qp)?;
            let phi = QuiverAutomorphism::from_file(&q, &f)?;
            let choice = match choice_file {
                Some(cf) => OrbitChoice::from_file(&q, &cf)?,
                None => OrbitChoice::canonical(&q, &phi),
            };
            Ok((w, build_orbit_quiver(&q, &phi, &choice)?))
        }
        (None, None) => Err(CliError::Input("give --tiling or --qpot".into())),
    }
}

fn count_options(sample: Option<u64>, seed: Option<u64>, verify: bool) -> Result<CountOptions, CliError> {
    let mode = match (sample, seed) {
        (Some(samples), Some(seed)) => Mode::Sample { samples, seed },
        (Some(_), None) => return Err(CliError::Input("sampling needs --seed".into())),
        _ => Mode::Exhaustive,
    };
    Ok(CountOptions { mode, verify, ..CountOptions::default() })
}

pub(crate) fn check_prime(q: u64) -> Result<(), CliError> {
    if is_prime(q) {
        Ok(())
    } else {
        Err(CliError::Input(format!("field size {q} is not prime")))
    }
}

pub(crate) fn transport_checks(
    ctx: &SemidirectQuiver,
    w: &Potential,
    w_prime: &Potential,
    only: Option<&str>,
) -> Result<Outcome, CliError> {
    let mut checks = Vec::new();
    for a in ctx.original.arrow_ids() {
        if ctx.original_of(ctx.generator_of(a)) != Some(a) {
            continue;
        }
        if only.is_some_and(|n| n != ctx.original.arrow(a).name) {
            continue;
        }
        checks.push(verify_transport_identity(ctx, w, w_prime, a)?);
    }
    if let Some(n) = only {
        if checks.is_empty() {
            return Err(CliError::Input(format!("{n} is not a generating arrow")));
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(Outcome { value: json!({ "checks": value(&checks), "pass": pass }), pass })
}

pub(crate) fn psi_backend(
    mode: PsiMode,
    cfg: Option<&PresentationConfig>,
    q: &Quiver,
    faces: &Potential,
) -> Result<Backend, CliError> {
    Ok(match mode {
        PsiMode::Certificate => Backend::Certificate,
        PsiMode::Dehn => Backend::Dehn(match cfg {
            Some(c) => c.dehn_backend(q, faces)?,
            None => None,
        }),
    })
}

pub(crate) fn psi_context(
    ctx: &SemidirectQuiver,
    w: &Potential,
    cfg: Option<&PresentationConfig>,
) -> Result<PsiContext, CliError> {
    let (bp, tree) = match cfg {
        Some(c) => (c.basepoint_id(&ctx.original)?, c.tree_ids(&ctx.original)?),
        None => (None, None),
    };
    Ok(PsiContext::new(ctx, w, bp, tree.as_deref())?)
}

/// Runs one command.
pub fn execute(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Validate { tiling } => {
            let t = BraneTiling::parse(&read(tiling)?)?;
            let r = validate_tiling(&t);
            Ok(Outcome { pass: r.valid, value: value(&r) })
        }
        Command::Dual { tiling } => {
            let (q, w) = dual_quiver(&load_tiling(tiling)?)?;
            Ok(Outcome::ok(qpot_value(&q, &w)))
        }
        Command::Refine { tiling, automorphism } => {
            let t = load_tiling(tiling)?;
            let phi = TilingAutomorphism::from_file(&t, &load_automorphism_file(automorphism)?)?;
            let (rt, rphi) = refine_tiling(&t, &phi)?;
            Ok(Outcome::ok(json!({
                "changed": rt != t,
                "tiling": value(&rt.to_file()),
                "automorphism": value(&rphi.to_file(&rt)),
            })))
        }
        Command::Dimer { tiling, automorphism } => {
            let t = load_tiling(tiling)?;
            let phi = match automorphism {
                Some(p) => TilingAutomorphism::from_file(&t, &load_automorphism_file(p)?)?,
                None => TilingAutomorphism::identity(&t),
            };
            let out = equivariant_dimer(&t, &phi)?;
            let names = out.tiling.arrow_names();
            let (_, w) = dual_quiver(&out.tiling)?;
            let arrows = out.dimer.iter().map(|&e| crate::pathalg::ArrowId(e as u32)).collect();
            Ok(Outcome::ok(json!({
                "dimer": out.dimer.iter().map(|&e| names[e].clone()).collect::<Vec<_>>(),
                "meets_each_term_once": meets_each_term_once(&w, &arrows),
                "added_vertices": out.added_vertices,
                "added_edges": out.added_edges,
                "tiling": value(&out.tiling.to_file()),
                "automorphism": value(&out.phi.to_file(&out.tiling)),
            })))
        }
        Command::ChooseXi { tiling, automorphism, dimer, limit } => {
            let t = load_tiling(tiling)?;
            let phi = TilingAutomorphism::from_file(&t, &load_automorphism_file(automorphism)?)?;
            let d = dimer.as_deref().map(|s| parse_dimer(&t, s)).transpose()?;
            let (_, _, c) = search_choice(&t, &phi, d.as_ref(), *limit)?;
            let mut v = choice_value(&c);
            v["orbit_quiver"] = qpot_value(&c.context.quiver, &c.transported.potential);
            Ok(Outcome::ok(v))
        }
        Command::OrbitQuiver(a) => {
            let (_, ctx) = load_context(a)?;
            Ok(Outcome::ok(json!({
                "quiver": qpot_value(&ctx.quiver, &Potential::zero()),
                "choice": value(&ctx.choice.to_file(&ctx.original)),
                "order": ctx.order(),
            })))
        }
        Command::Transport(a) => {
            let (w, ctx) = load_context(a)?;
            let rep = transport_potential(&ctx, &w)?;
            let n = ctx.order();
            Ok(Outcome {
                pass: rep.is_homogeneous_of_order(n) || n == 1,
                value: json!({
                    "qpot": qpot_value(&ctx.quiver, &rep.potential),
                    "counting_qpot": qpot_value(&localized_generator_quiver(&ctx), &rep.potential),
                    "degrees": value(&rep.degrees),
                    "homogeneous_degree": rep.homogeneous_degree,
                    "order": n,
                }),
            })
        }
        Command::VerifyTransport { ctx: a, arrow, all: _ } => {
            let (w, ctx) = load_context(a)?;
            let rep = transport_potential(&ctx, &w)?;
            transport_checks(&ctx, &w, &rep.potential, arrow.as_deref())
        }
        Command::Derive { qpot, arrow } => {
            let (q, w) = load_qpot(qpot)?;
            let d = cyclic_derivative(&q, &w, q.arrow_id(arrow)?)?;
            Ok(Outcome::ok(
                json!({ "arrow": arrow, "derivative": value(&element_to_file(&q, &d)), "text": q.fmt_element(&d) }),
            ))
        }
        Command::GdgaCheck { qpot } => {
            let (q, w) = load_qpot(qpot)?;
            let dga = ginzburg_dga(&q, &w)?;
            let r = check_d_squared(&dga);
            Ok(Outcome {
                pass: r.holds,
                value: json!({
                    "holds": r.holds,
                    "degree_violations": r.degree_violations,
                    "witness": r.witness.map(|(g, x)| json!({ "generator": g, "d_squared": dga.quiver.fmt_element(&x) })),
                }),
            })
        }
        Command::PsiVerify { ctx: a, config, mode } => {
            let (w, ctx) = load_context(a)?;
            let cfg: Option<PresentationConfig> =
                config.as_deref().map(|p| Ok::<_, CliError>(serde_json::from_str(&read(p)?)?)).transpose()?;
            let backend = psi_backend(*mode, cfg.as_ref(), &ctx.original, &w)?;
            let pc = psi_context(&ctx, &w, cfg.as_ref())?;
            let wp = transport_potential(&ctx, &w)?.potential;
            let rep = verify_psi_relations(&pc, &wp, &backend)?;
            Ok(Outcome { pass: rep.pass, value: value(&rep) })
        }
        Command::CheckScript { script, qpot } => {
            let s: DerivationScript = serde_json::from_str(&read(script)?)?;
            let (q, w) = load_qpot(qpot)?;
            let rep = check_derivation_script(&q, &w, &s)?;
            Ok(Outcome { pass: rep.complete(), value: value(&rep) })
        }
        Command::Count { qpot, d, q, omega, sample, seed, verify } => {
            check_prime(*q)?;
            if *d == 0 {
                return Err(CliError::Input("dimension must be at least 1".into()));
            }
            let (quiver, w) = load_qpot(qpot)?;
            let opts = count_options(*sample, *seed, *verify)?;
            match omega {
                None => {
                    let r = enumerate_reps(&quiver, &w, *d, *q, &opts)?;
                    let pass = r.disagreements.unwrap_or(0) == 0 && r.gradient_mismatches.unwrap_or(0) == 0;
                    Ok(Outcome { pass, value: value(&r) })
                }
                Some(p) => {
                    let om = parse_element(&quiver, &read(p)?)?;
                    Ok(Outcome::ok(value(&stratify_by_omega(&quiver, &w, &om, *d, *q, &opts)?)))
                }
            }
        }
        Command::Probe { qpot, omega, q } => {
            check_prime(*q)?;
            let (quiver, w) = load_qpot(qpot)?;
            let om = parse_element(&quiver, &read(omega)?)?;
            Ok(Outcome::ok(value(&conjecture_probe_d1(&quiver, &w, &om, *q)?)))
        }
        Command::Pipeline { config, example, out_dir, psi_mode } => {
            let (mut cfg, inputs) = match (config, example) {
                (Some(p), _) => PipelineConfig::load(p)?,
                (None, true) => PipelineConfig::example(),
                (None, false) => return Err(CliError::Input("give a config file or --example".into())),
            };
            if let Some(d) = out_dir {
                cfg.output_dir = Some(d.clone());
            }
            if let Some(m) = psi_mode {
                cfg.psi_mode = *m;
            }
            let report = run_pipeline(&cfg, &inputs)?;
            Ok(Outcome { pass: report.exit_code == EXIT_OK, value: value(&report) })
        }
    }
}

/// Parses arguments, runs the command, prints or writes the result; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(&cli.command).and_then(|o| {
        match &cli.out {
            Some(p) => write_json(p, &o.value)?,
            None => print!("{}", to_canonical_json(&o.value)),
        }
        Ok(o)
    });
    match result {
        Ok(o) if o.pass => EXIT_OK,
        Ok(o) => {
            if let Some(code) = o.value.get("exit_code").and_then(Value::as_i64) {
                return code as i32;
            }
            EXIT_VERIFICATION_FAILED
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests;
