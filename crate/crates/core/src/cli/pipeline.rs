//! The end-to-end run: tiling → dual → refine → dimer → choice → transport →
//! checks → counts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::{
    check_prime, choice_value, psi_backend, psi_context, qpot_value, read, search_choice, transport_checks, value,
    write_json, CliError, PsiMode, EXIT_OK, EXIT_VERIFICATION_FAILED,
};
use crate::equivariant::{
    build_orbit_quiver, equivariant_dimer, orbit_sizes, refine_tiling, transport_potential, word_degree, xi_embed,
    AutomorphismFile, ChoiceFile, OrbitChoice, SemidirectQuiver, TilingAutomorphism,
};
use crate::fixtures;
use crate::pathalg::io::{parse_element, ElementFile};
use crate::pathalg::{check_d_squared, ginzburg_dga, Letter, Potential};
use crate::presentation::{check_derivation_script, verify_psi_relations, DerivationScript, PresentationConfig};
use crate::repcount::{conjecture_probe_d1, enumerate_reps, localized_generator_quiver, CountOptions, Mode};
use crate::surfacemap::{dual_quiver, meets_each_term_once, validate_tiling, BraneTiling};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSettings {
    pub samples: u64,
    pub seed: u64,
}

/// Pipeline config on disk; file paths are relative to the config's directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub tiling: PathBuf,
    pub automorphism: PathBuf,
    #[serde(default)]
    pub choice: Option<PathBuf>,
    /// Presentation config for the Dehn backend.
    #[serde(default)]
    pub presentation: Option<PathBuf>,
    #[serde(default)]
    pub script: Option<PathBuf>,
    #[serde(default = "default_mode")]
    pub psi_mode: PsiMode,
    #[serde(default)]
    pub fields: Vec<u64>,
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default)]
    pub sample: Option<SampleSettings>,
    /// Element of the orbit quiver used to split counts.
    #[serde(default)]
    pub omega: Option<ElementFile>,
    #[serde(default)]
    pub probe_fields: Vec<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Record wall-clock time per stage; off by default so reports are reproducible.
    #[serde(default)]
    pub timing: bool,
}

fn default_mode() -> PsiMode {
    PsiMode::Certificate
}

fn default_dims() -> Vec<usize> {
    vec![1]
}

/// Input file contents, keyed by role.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PipelineInputs {
    pub tiling: String,
    pub automorphism: String,
    pub choice: Option<String>,
    pub presentation: Option<String>,
    pub script: Option<String>,
}

impl PipelineInputs {
    fn named(&self) -> Vec<(&'static str, &str)> {
        let mut v = vec![("tiling", self.tiling.as_str()), ("automorphism", self.automorphism.as_str())];
        for (k, x) in [("choice", &self.choice), ("presentation", &self.presentation), ("script", &self.script)] {
            if let Some(s) = x {
                v.push((k, s.as_str()));
            }
        }
        v
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<(Self, PipelineInputs), CliError> {
        let cfg: PipelineConfig = serde_json::from_str(&read(path)?)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let opt = |p: &Option<PathBuf>| p.as_ref().map(|p| read(&dir.join(p))).transpose();
        let inputs = PipelineInputs {
            tiling: read(&dir.join(&cfg.tiling))?,
            automorphism: read(&dir.join(&cfg.automorphism))?,
            choice: opt(&cfg.choice)?,
            presentation: opt(&cfg.presentation)?,
            script: opt(&cfg.script)?,
        };
        let mut cfg = cfg;
        cfg.output_dir = cfg.output_dir.map(|o| dir.join(o));
        Ok((cfg, inputs))
    }

    /// The bundled genus-2 example.
    pub fn example() -> (Self, PipelineInputs) {
        let cfg: PipelineConfig = serde_json::from_str(fixtures::GENUS2_PIPELINE_JSON).expect("bundled config");
        let inputs = PipelineInputs {
            tiling: fixtures::GENUS2_TILING_JSON.into(),
            automorphism: fixtures::GENUS2_AUTOMORPHISM_JSON.into(),
            choice: Some(fixtures::GENUS2_CHOICE_JSON.into()),
            presentation: Some(fixtures::GENUS2_PRESENTATION_JSON.into()),
            script: Some(fixtures::GENUS2_SCRIPT_JSON.into()),
        };
        (cfg, inputs)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for &q in self.fields.iter().chain(&self.probe_fields) {
            check_prime(q)?;
        }
        if self.dims.contains(&0) {
            return Err(CliError::Input("dimensions must be at least 1".into()));
        }
        if self.probe_fields.contains(&2) {
            return Err(CliError::Input("the probe is undefined in characteristic 2".into()));
        }
        if !self.probe_fields.is_empty() && self.omega.is_none() {
            return Err(CliError::Input("probe_fields need omega".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageReport {
    pub name: String,
    /// `ok`, `fail` (a verification did not pass), `error` or `skipped`.
    pub status: String,
    pub detail: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    /// SHA-256 of each input file.
    pub inputs: BTreeMap<String, String>,
    pub stages: Vec<StageReport>,
    /// Files written, relative to the output directory.
    pub artifacts: Vec<String>,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<BTreeMap<String, u64>>,
}

fn sha256_hex(s: &str) -> String {
    Sha256::digest(s.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

struct Run<'a> {
    cfg: &'a PipelineConfig,
    report: RunReport,
    clock: Instant,
    first_error: Option<i32>,
    any_fail: bool,
}

impl Run<'_> {
    fn stage(&mut self, name: &str, result: Result<(Value, bool), CliError>) -> bool {
        let (status, detail, error, code) = match result {
            Ok((d, true)) => ("ok", d, None, EXIT_OK),
            Ok((d, false)) => ("fail", d, None, EXIT_VERIFICATION_FAILED),
            Err(e) => ("error", Value::Null, Some(e.to_string()), e.exit_code()),
        };
        match code {
            EXIT_OK => {}
            EXIT_VERIFICATION_FAILED => self.any_fail = true,
            c => {
                self.first_error.get_or_insert(c);
            }
        }
        if let Some(t) = self.report.timing_ms.as_mut() {
            t.insert(name.into(), self.clock.elapsed().as_millis() as u64);
            self.clock = Instant::now();
        }
        self.report.stages.push(StageReport { name: name.into(), status: status.into(), detail, error });
        status != "error"
    }

    fn skip(&mut self, names: &[&str]) {
        for n in names {
            self.report.stages.push(StageReport {
                name: (*n).into(),
                status: "skipped".into(),
                detail: Value::Null,
                error: None,
            });
        }
    }

    fn artifact(&mut self, file: &str, v: &Value) -> Result<(), CliError> {
        if let Some(dir) = &self.cfg.output_dir {
            write_json(&dir.join(file), v)?;
            self.report.artifacts.push(file.into());
        }
        Ok(())
    }
}

const LATER: [&str; 12] = [
    "dual",
    "automorphism",
    "refine",
    "dimer",
    "choice",
    "transport",
    "verify_transport",
    "gdga",
    "psi",
    "script",
    "counts",
    "probe",
];

fn skip_after(run: &mut Run, name: &str) {
    let k = LATER.iter().position(|n| *n == name).map_or(0, |k| k + 1);
    run.skip(&LATER[k..]);
}

/// Runs every stage in order. Input problems found before the first stage are
/// returned as errors; later problems are recorded in the report.
pub fn run_pipeline(cfg: &PipelineConfig, inputs: &PipelineInputs) -> Result<RunReport, CliError> {
    cfg.validate()?;
    if let Some(dir) = &cfg.output_dir {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
    }
    let mut run = Run {
        cfg,
        report: RunReport {
            tool: "tessella".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            inputs: inputs.named().into_iter().map(|(k, s)| (k.to_string(), sha256_hex(s))).collect(),
            stages: Vec::new(),
            artifacts: Vec::new(),
            exit_code: EXIT_OK,
            timing_ms: cfg.timing.then(BTreeMap::new),
        },
        clock: Instant::now(),
        first_error: None,
        any_fail: false,
    };

    // tiling
    let tiling = BraneTiling::parse(&inputs.tiling).map_err(CliError::from).and_then(|t| {
        let r = validate_tiling(&t);
        if r.valid {
            Ok((t, r))
        } else {
            Err(CliError::Input(format!("invalid tiling: {}", r.violations.join("; "))))
        }
    });
    let t = match tiling {
        Ok((t, r)) => {
            run.stage("tiling", Ok((value(&r), true)));
            t
        }
        Err(e) => {
            run.stage("tiling", Err(e));
            run.skip(&LATER);
            return finish(run);
        }
    };

    // dual
    let (q, w) = match dual_quiver(&t) {
        Ok(x) => x,
        Err(e) => {
            run.stage("dual", Err(e.into()));
            skip_after(&mut run, "dual");
            return finish(run);
        }
    };
    let dual_v = qpot_value(&q, &w);
    run.artifact("dual.qpot.json", &dual_v)?;
    run.stage(
        "dual",
        Ok((json!({ "vertices": q.vertex_count(), "arrows": q.arrow_count(), "potential": w.fmt(&q) }), true)),
    );

    // automorphism
    let phi = serde_json::from_str::<AutomorphismFile>(&inputs.automorphism)
        .map_err(CliError::from)
        .and_then(|f| Ok(TilingAutomorphism::from_file(&t, &f)?));
    let phi = match phi.and_then(|p| Ok((p.on_dual(&t, &q)?, p))) {
        Ok((qphi, p)) => {
            run.stage("automorphism", Ok((value(&orbit_sizes(&q, &qphi)), true)));
            p
        }
        Err(e) => {
            run.stage("automorphism", Err(e));
            skip_after(&mut run, "automorphism");
            return finish(run);
        }
    };

    // refine
    let (rt, rphi) = match refine_tiling(&t, &phi) {
        Ok(x) => x,
        Err(e) => {
            run.stage("refine", Err(e.into()));
            skip_after(&mut run, "refine");
            return finish(run);
        }
    };
    let changed = rt != t;
    if changed {
        run.artifact("refined.tiling.json", &value(&rt.to_file()))?;
        run.artifact("refined.automorphism.json", &value(&rphi.to_file(&rt)))?;
    }
    run.stage(
        "refine",
        Ok((json!({ "changed": changed, "edges": rt.map.edge_count(), "vertices": rt.vertex_count() }), true)),
    );

    // dimer
    let out = match equivariant_dimer(&rt, &rphi) {
        Ok(o) => o,
        Err(e) => {
            run.stage("dimer", Err(e.into()));
            skip_after(&mut run, "dimer");
            return finish(run);
        }
    };
    let names = out.tiling.arrow_names();
    let dimer_names: Vec<String> = out.dimer.iter().map(|&e| names[e].clone()).collect();
    let (_, dw) = dual_quiver(&out.tiling)?;
    let arrows = out.dimer.iter().map(|&e| crate::pathalg::ArrowId(e as u32)).collect();
    let dimer_v = json!({
        "dimer": dimer_names,
        "meets_each_term_once": meets_each_term_once(&dw, &arrows),
        "added_vertices": out.added_vertices,
        "added_edges": out.added_edges,
    });
    run.artifact("dimer.json", &dimer_v)?;
    run.stage("dimer", Ok((dimer_v, true)));

    // choice
    let chosen: Result<(Potential, SemidirectQuiver, Value), CliError> = match &inputs.choice {
        Some(text) => (|| {
            let (fq, fw) = dual_quiver(&out.tiling)?;
            let qphi = out.phi.on_dual(&out.tiling, &fq)?;
            let cf: ChoiceFile = serde_json::from_str(text)?;
            let ctx = build_orbit_quiver(&fq, &qphi, &OrbitChoice::from_file(&fq, &cf)?)?;
            let mut degrees = BTreeMap::new();
            for a in fq.arrow_ids() {
                let img = xi_embed(&ctx, &fq.word(&[Letter::fwd(a)])?)?;
                degrees.insert(fq.arrow(a).name.clone(), word_degree(&ctx, &img));
            }
            let v = json!({ "choice": value(&cf), "degrees": value(&degrees), "source": "config" });
            Ok((fw, ctx, v))
        })(),
        None => search_choice(&out.tiling, &out.phi, None, 10_000).map(|(_, _, c)| {
            let mut v = choice_value(&c);
            v["source"] = json!("search");
            (c.potential, c.context, v)
        }),
    };
    let (w0, ctx) = match chosen {
        Ok((w0, ctx, v)) => {
            run.artifact("choice.json", &v)?;
            run.stage("choice", Ok((v, true)));
            (w0, ctx)
        }
        Err(e) => {
            run.stage("choice", Err(e));
            skip_after(&mut run, "choice");
            return finish(run);
        }
    };

    // transport
    let n = ctx.order();
    let wp = match transport_potential(&ctx, &w0) {
        Ok(rep) => {
            let homogeneous = n == 1 || rep.is_homogeneous_of_order(n);
            let v = json!({
                "potential": rep.potential.fmt(&ctx.quiver),
                "degrees": value(&rep.degrees),
                "homogeneous_degree": rep.homogeneous_degree,
                "order": n,
            });
            run.artifact("orbit_quiver.qpot.json", &qpot_value(&ctx.quiver, &rep.potential))?;
            run.stage("transport", Ok((v, homogeneous)));
            rep.potential
        }
        Err(e) => {
            run.stage("transport", Err(e.into()));
            skip_after(&mut run, "transport");
            return finish(run);
        }
    };

    // verify_transport
    let checks = transport_checks(&ctx, &w0, &wp, None).map(|o| (o.value, o.pass));
    if let Ok((v, _)) = &checks {
        run.artifact("transport_checks.json", v)?;
    }
    run.stage("verify_transport", checks);

    // gdga
    let gd = (|| {
        let dga = ginzburg_dga(&ctx.original, &w0)?;
        let r = check_d_squared(&dga);
        Ok((json!({ "holds": r.holds, "degree_violations": r.degree_violations }), r.holds))
    })();
    run.stage("gdga", gd);

    // psi
    let psi = (|| {
        let pres: Option<PresentationConfig> = inputs.presentation.as_deref().map(serde_json::from_str).transpose()?;
        let backend = psi_backend(cfg.psi_mode, pres.as_ref(), &ctx.original, &w0)?;
        let pc = psi_context(&ctx, &w0, pres.as_ref())?;
        let rep = verify_psi_relations(&pc, &wp, &backend)?;
        Ok((value(&rep), rep.pass))
    })();
    if let Ok((v, _)) = &psi {
        run.artifact("psi.json", v)?;
    }
    run.stage("psi", psi);

    // script
    match &inputs.script {
        None => run.skip(&["script"]),
        Some(text) => {
            let res = (|| {
                let s: DerivationScript = serde_json::from_str(text)?;
                let rep = check_derivation_script(&ctx.quiver, &wp, &s)?;
                Ok((value(&rep), rep.complete()))
            })();
            if let Ok((v, _)) = &res {
                run.artifact("script.json", v)?;
            }
            run.stage("script", res);
        }
    }

    // counts
    let b = localized_generator_quiver(&ctx);
    let mode = match &cfg.sample {
        Some(s) => Mode::Sample { samples: s.samples, seed: s.seed },
        None => Mode::Exhaustive,
    };
    let counts = (|| {
        let mut all = Vec::new();
        for &d in &cfg.dims {
            for &p in &cfg.fields {
                let opts = CountOptions { mode: mode.clone(), ..CountOptions::default() };
                all.push(value(&enumerate_reps(&b, &wp, d, p, &opts)?));
            }
        }
        Ok((Value::Array(all), true))
    })();
    if let Ok((v, _)) = &counts {
        run.artifact("counts.json", v)?;
    }
    run.stage("counts", counts);

    // probe
    match &cfg.omega {
        Some(om) if !cfg.probe_fields.is_empty() => {
            let res = (|| {
                let omega = parse_element(&b, &serde_json::to_string(om)?)?;
                let mut all = Vec::new();
                for &p in &cfg.probe_fields {
                    all.push(value(&conjecture_probe_d1(&b, &wp, &omega, p)?));
                }
                Ok((Value::Array(all), true))
            })();
            if let Ok((v, _)) = &res {
                run.artifact("probe.json", v)?;
            }
            run.stage("probe", res);
        }
        _ => run.skip(&["probe"]),
    }
    finish(run)
}

fn finish(mut run: Run) -> Result<RunReport, CliError> {
    let fail = if run.any_fail { EXIT_VERIFICATION_FAILED } else { EXIT_OK };
    run.report.exit_code = run.first_error.unwrap_or(fail);
    if let Some(dir) = &run.cfg.output_dir {
        run.report.artifacts.push("report.json".into());
        write_json(&dir.join("report.json"), &value(&run.report))?;
    }
    Ok(run.report)
}
