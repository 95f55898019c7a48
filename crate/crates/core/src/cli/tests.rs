use std::path::PathBuf;

use super::*;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn stage<'a>(r: &'a RunReport, name: &str) -> &'a StageReport {
    r.stages.iter().find(|s| s.name == name).unwrap()
}

#[test]
fn bundled_pipeline_passes() {
    let (cfg, inputs) = PipelineConfig::example();
    let r = run_pipeline(&cfg, &inputs).unwrap();
    assert_eq!(r.exit_code, EXIT_OK, "{:#?}", r.stages);
    assert!(r.stages.iter().all(|s| s.status == "ok"), "{:#?}", r.stages);
    assert_eq!(stage(&r, "transport").detail["potential"], "abreabre - 2ardbrc + 2crdr - erer");
    let counts = &stage(&r, "counts").detail;
    assert_eq!(
        (counts[0]["q"].as_u64(), counts[0]["total"].as_u64(), counts[0]["zero"].as_u64(), counts[0]["one"].as_u64()),
        (Some(2), Some(2), Some(2), Some(0))
    );
    assert_eq!(counts[1]["total"], 96);
    assert!(r.timing_ms.is_none());
    assert_eq!(r.inputs.len(), 5);
}

#[test]
fn stage_order_follows_dependencies() {
    let (cfg, inputs) = PipelineConfig::example();
    let names: Vec<String> = run_pipeline(&cfg, &inputs).unwrap().stages.into_iter().map(|s| s.name).collect();
    let pos = |n: &str| names.iter().position(|x| x == n).unwrap();
    assert!(pos("dual") < pos("refine") && pos("refine") < pos("dimer") && pos("dimer") < pos("choice"));
    assert!(pos("choice") < pos("transport") && pos("transport") < pos("verify_transport"));
    assert!(pos("transport") < pos("psi") && pos("psi") < pos("counts"));
}

#[test]
fn composite_field_is_rejected() {
    let (mut cfg, inputs) = PipelineConfig::example();
    cfg.fields = vec![4];
    let e = run_pipeline(&cfg, &inputs).unwrap_err();
    assert_eq!(e.exit_code(), EXIT_INPUT);
    assert!(e.to_string().contains("not prime"));
}

#[test]
fn dehn_mode_without_phi_star_is_surfaced() {
    let (mut cfg, mut inputs) = PipelineConfig::example();
    cfg.psi_mode = PsiMode::Dehn;
    inputs.presentation = None;
    let r = run_pipeline(&cfg, &inputs).unwrap();
    let psi = stage(&r, "psi");
    assert_eq!(psi.status, "error");
    assert!(psi.error.as_ref().unwrap().contains("phi_star"));
    assert_eq!(r.exit_code, EXIT_INPUT);
    assert_eq!(stage(&r, "counts").status, "ok");
}

#[test]
fn dehn_mode_with_presentation_passes() {
    let (mut cfg, inputs) = PipelineConfig::example();
    cfg.psi_mode = PsiMode::Dehn;
    let r = run_pipeline(&cfg, &inputs).unwrap();
    assert_eq!(stage(&r, "psi").detail["mode"], "dehn");
    assert_eq!(r.exit_code, EXIT_OK);
}

#[test]
fn searched_choice_is_used_without_a_choice_file() {
    let (mut cfg, mut inputs) = PipelineConfig::example();
    inputs.choice = None;
    inputs.script = None;
    inputs.presentation = None;
    cfg.fields.clear();
    cfg.probe_fields.clear();
    let r = run_pipeline(&cfg, &inputs).unwrap();
    assert_eq!(stage(&r, "choice").detail["source"], "search");
    assert_eq!(stage(&r, "transport").detail["homogeneous_degree"], 2);
    assert_eq!(stage(&r, "script").status, "skipped");
    assert_eq!(r.exit_code, EXIT_OK, "{:#?}", r.stages);
}

#[test]
fn broken_tiling_skips_everything_else() {
    let (cfg, mut inputs) = PipelineConfig::example();
    inputs.tiling = "{}".into();
    let r = run_pipeline(&cfg, &inputs).unwrap();
    assert_eq!(r.stages[0].status, "error");
    assert!(r.stages[1..].iter().all(|s| s.status == "skipped"));
    assert_eq!(r.stages.len(), 13);
    assert_eq!(r.exit_code, EXIT_INPUT);
}

#[test]
fn failed_script_gives_verification_exit() {
    let (cfg, mut inputs) = PipelineConfig::example();
    let mut s: DerivationScript = serde_json::from_str(inputs.script.as_ref().unwrap()).unwrap();
    s.steps[0].claim = "brabr = rdrc".into();
    inputs.script = Some(serde_json::to_string(&s).unwrap());
    let r = run_pipeline(&cfg, &inputs).unwrap();
    assert_eq!(stage(&r, "script").status, "fail");
    assert_eq!(r.exit_code, EXIT_VERIFICATION_FAILED);
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (mut cfg, inputs) = PipelineConfig::example();
    for d in [&a, &b] {
        cfg.output_dir = Some(d.path().to_path_buf());
        run_pipeline(&cfg, &inputs).unwrap();
    }
    let files: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert!(files.len() >= 9);
    for f in files {
        assert_eq!(std::fs::read(a.path().join(&f)).unwrap(), std::fs::read(b.path().join(&f)).unwrap(), "{f:?}");
    }
}

#[test]
fn config_file_paths_are_relative_to_it() {
    let (cfg, inputs) = PipelineConfig::load(&data("genus2.pipeline.json")).unwrap();
    let (ex_cfg, ex_inputs) = PipelineConfig::example();
    assert_eq!(inputs, ex_inputs);
    assert_eq!(cfg.fields, ex_cfg.fields);
}

#[test]
fn emitted_json_is_stable_and_sorted() {
    let (q, w) = dual_quiver(&load_tiling(&data("genus2.tiling.json")).unwrap()).unwrap();
    let one = to_canonical_json(&qpot_value(&q, &w));
    let two = to_canonical_json(&qpot_value(&q, &w));
    assert_eq!(one, two);
    assert!(one.find("\"arrows\"").unwrap() < one.find("\"potential\"").unwrap());
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.json");
    write_json(&p, &json!({"b": 1, "a": 2})).unwrap();
    assert_eq!(std::fs::read_to_string(&p).unwrap(), "{\n  \"a\": 2,\n  \"b\": 1\n}\n");
    let bad = dir.path().join("missing").join("x.json");
    assert!(matches!(write_json(&bad, &json!(1)), Err(CliError::Io { .. })));
}

#[test]
fn choice_search_failure_maps_to_exit_three() {
    let cmd = Command::ChooseXi {
        tiling: data("genus2.tiling.json"),
        automorphism: data("genus2.automorphism.json"),
        dimer: Some("f,c,d".into()),
        limit: 10,
    };
    let e = execute(&cmd).unwrap_err();
    assert_eq!(e.exit_code(), EXIT_NO_CHOICE);
}

#[test]
fn sampling_requires_a_seed() {
    assert!(count_options(Some(10), None, false).is_err());
    assert_eq!(count_options(Some(10), Some(1), false).unwrap().mode, Mode::Sample { samples: 10, seed: 1 });
    assert_eq!(count_options(None, None, true).unwrap().mode, Mode::Exhaustive);
}
