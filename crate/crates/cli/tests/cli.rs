use std::path::Path;
use std::process::Command;

use pgeneo_cli::{cmd_certify, cmd_combine, cmd_cover, cmd_validate, load, CombineRequest, CoverTarget, Overrides};
use pgeneo_core::builders::{squares_instance, SquaresConfig};
use pgeneo_core::instance::{Instance, TripleSpec};
use pgeneo_core::pgeneo::AuditConfig;

fn pgeneo(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pgeneo")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn squares_file(dir: &Path, naive: bool) -> String {
    let path = dir.join("squares.json");
    let p = path.to_str().unwrap().to_string();
    let mut args = vec!["demo-squares", "--output", &p];
    if naive {
        args.push("--naive");
    }
    assert_eq!(pgeneo(&args).0, 0);
    p
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = squares_file(dir.path(), true);
    assert_eq!(pgeneo(&["validate", "--instance", &p, "--triple", "source"]).0, 0);
    assert_eq!(pgeneo(&["certify", "--instance", &p, "--operator", "cut"]).0, 0);
    assert_eq!(pgeneo(&["certify", "--instance", &p, "--operator", "cut_naive"]).0, 1);
    let (code, _, err) = pgeneo(&["certify", "--instance", &p, "--operator", "nope"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown operator `nope`"), "{err}");
    assert_eq!(pgeneo(&["validate", "--instance", "/does/not/exist.json", "--triple", "x"]).0, 2);
    let bad = dir.path().join("bad.json");
    let (code, _, err) = pgeneo(&["demo-squares", "--output", bad.to_str().unwrap(), "--margin", "8"]);
    assert_eq!(code, 2, "{err}");
    assert!(!bad.exists());
}

#[test]
fn json_report_is_appended() {
    let dir = tempfile::tempdir().unwrap();
    let p = squares_file(dir.path(), false);
    let (code, out, _) = pgeneo(&["certify", "--instance", &p, "--operator", "cut", "--json"]);
    assert_eq!(code, 0);
    let start = out.find('{').unwrap();
    let v: serde_json::Value = serde_json::from_str(&out[start..]).unwrap();
    assert_eq!(v["certificate"]["certified"], true);
    assert_eq!(v["certificate"]["equivariance_residual"], 0.0);
}

#[test]
fn canonical_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p = squares_file(dir.path(), true);
    let first = std::fs::read_to_string(&p).unwrap();
    let inst = Instance::load(&p).unwrap();
    let again = dir.path().join("again.json");
    inst.save(&again).unwrap();
    assert_eq!(std::fs::read_to_string(&again).unwrap(), first);

    // A hand-written, non-canonical file canonicalizes to a fixed point.
    let messy = r#"{"tolerances": {"delta_num": 1e-12, "delta_mem": 1e-9}, "version": 1,
        "triples": {"t": {"ops": ["id"], "phi_prime": "A", "phi": "A"}},
        "ops": {"id": [0, 1]}, "spaces": {"A": [[0.1, 3]]}, "domain": ["p", "q"]}"#;
    let canonical = Instance::parse(messy).unwrap().to_json();
    assert_eq!(Instance::parse(&canonical).unwrap().to_json(), canonical);
    assert!(canonical.contains("0.1"));
}

#[test]
fn corrupted_operation_reports_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let mut file = squares_instance(&SquaresConfig::default()).unwrap();
    let perm = file.ops.get_mut("translate").unwrap();
    perm.swap(0, 17 * 5);
    Instance::from_file(file).unwrap().save(&path).unwrap();
    let inst = load(&path, Overrides::default()).unwrap();
    let out = cmd_validate(&inst, "source", false).unwrap();
    assert_eq!(out.code, 1);
    assert!(out.text.contains("op `translate`"), "{}", out.text);
    assert!(out.text.contains("nearest member"), "{}", out.text);
}

#[test]
fn empty_operation_list_is_vacuous() {
    let mut file = squares_instance(&SquaresConfig::default()).unwrap();
    file.triples.insert(
        "bare".into(),
        TripleSpec {
            phi: "Phi".into(),
            phi_prime: "Psi".into(),
            ops: vec![],
        },
    );
    let inst = Instance::from_file(file).unwrap();
    let out = cmd_validate(&inst, "bare", false).unwrap();
    assert_eq!(out.code, 0);
    assert!(out.text.contains("vacuous"));
    assert!(cmd_validate(&inst, "missing", false).is_err());
}

#[test]
fn tolerance_override_applies() {
    let dir = tempfile::tempdir().unwrap();
    let p = squares_file(dir.path(), false);
    let strict = load(Path::new(&p), Overrides { delta_mem: Some(0.0), delta_num: None }).unwrap();
    assert_eq!(strict.tolerances().delta_mem, 0.0);
    assert_eq!(cmd_certify(&strict, "cut", false).unwrap().code, 0);
    let (code, ..) = pgeneo(&["certify", "--instance", &p, "--operator", "cut", "--delta-mem", "-1"]);
    assert_eq!(code, 2);
}

#[test]
fn combine_writes_only_on_success() {
    let dir = tempfile::tempdir().unwrap();
    let p = squares_file(dir.path(), true);
    let path = Path::new(&p);
    let before = std::fs::read_to_string(path).unwrap();
    let ops = ["cut".to_string(), "cut".to_string()];
    let req = |aggregator, output| CombineRequest {
        aggregator,
        operators: &ops,
        output,
        audit: AuditConfig::default(),
    };

    let out = cmd_combine(path, Overrides::default(), &req("bogus", "x"), false);
    assert_eq!(out.code, 2);
    let out = cmd_combine(path, Overrides::default(), &req("max", "cut"), false);
    assert_eq!(out.code, 2, "{}", out.text);
    let naive = ["cut".to_string(), "cut_naive".to_string()];
    let out = cmd_combine(
        path,
        Overrides::default(),
        &CombineRequest { operators: &naive, ..req("min", "y") },
        false,
    );
    assert_eq!(out.code, 2, "{}", out.text);
    assert_eq!(std::fs::read_to_string(path).unwrap(), before);

    let out = cmd_combine(path, Overrides::default(), &req("power-mean:2:0.5,0.5", "pm"), true);
    assert_eq!(out.code, 0, "{}", out.text);
    let inst = Instance::load(path).unwrap();
    assert!(inst.file().operators["pm"].certificate.is_some());
    assert_eq!(cmd_certify(&inst, "pm", false).unwrap().code, 0);
}

#[test]
fn cover_targets() {
    let dir = tempfile::tempdir().unwrap();
    let p = squares_file(dir.path(), false);
    let inst = load(Path::new(&p), Overrides::default()).unwrap();
    let domain = cmd_cover(&inst, &CoverTarget::Domain { space: "Phi".into() }, 0.25, true).unwrap();
    assert_eq!(domain.code, 0, "{}", domain.text);
    assert!(domain.text.contains("radius achieved"));
    let ops = cmd_cover(&inst, &CoverTarget::Ops { triple: "source".into() }, 0.1, false).unwrap();
    assert!(ops.text.contains("centers           1"));
    let all = cmd_cover(&inst, &CoverTarget::Operators { names: vec![] }, 0.1, false).unwrap();
    assert_eq!(all.code, 0);
    assert!(cmd_cover(&inst, &CoverTarget::Domain { space: "Phi".into() }, 0.0, false).is_err());
    let (code, ..) = pgeneo(&["cover", "--instance", &p, "--target", "ops", "--epsilon", "0.5"]);
    assert_eq!(code, 0);
}
