use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn liegeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liegeo")).args(args).env_remove("LIEGEO_BUDGET").output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut a = args.to_vec();
    a.extend(["--format", "machine"]);
    serde_json::from_str(&stdout(&liegeo(&a))).unwrap()
}

#[test]
fn solve_point_and_empty() {
    let r = json(&["solve", "--system", &data("point.eqs")]);
    assert_eq!(r["spec"], 1);
    assert_eq!(r["command"], "solve");
    assert_eq!(r["count"], 1);
    assert_eq!(r["points"][0], "(a1)");
    assert_eq!(json(&["solve", "--system", &data("empty.eqs")])["count"], 0);
}

#[test]
fn solve_on_a_polytope_lists_coordinates() {
    let text = stdout(&liegeo(&["solve", "--system", &data("line.eqs")]));
    assert!(text.contains("count: 3"), "{text}");
}

#[test]
fn radical_and_decompose() {
    let r = json(&["radical", "--system", &data("centraliser.eqs")]);
    assert_eq!(r["command"], "radical");
    let d = json(&["decompose", "--system", &data("two_points.eqs")]);
    assert_eq!(d["components"].as_array().unwrap().len(), 2);
}

#[test]
fn reduce_then_lift_round_trips_through_a_file() {
    let dir = std::env::temp_dir().join(format!("liegeo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let polys = dir.join("line_point.poly").display().to_string();
    let r = json(&["reduce", "--system", &data("line_point.eqs"), "--polys", &polys]);
    assert_eq!(r["verification"]["agree"], true);
    let written = std::fs::read_to_string(&polys).unwrap();
    assert!(written.starts_with("field GF(3)\nblock 1: y1..y1\n"), "{written}");
    let l = json(&["lift", "--system", &data("line_point.eqs"), "--polys", &polys]);
    assert_eq!(l["verification"]["agree"], true);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn lift_document_polynomials() {
    let l = json(&["lift", "--system", &data("plane_axes.eqs")]);
    assert_eq!(l["verification"]["agree"], true);
}

#[test]
fn classify_one_variable() {
    let c = |f: &str| json(&["classify1", "--system", &data(f)])["verdict"].as_str().unwrap().to_string();
    assert_eq!(c("zero.eqs"), "WholeAlgebra");
    assert!(c("point.eqs").starts_with("BoundedWithin"));
    assert!(c("centraliser.eqs").contains("a1"));
    assert!(c("empty.eqs").starts_with("EmptyWithin"));
}

#[test]
fn axioms_on_nonqw_carrier() {
    let text = stdout(&liegeo(&["axioms", "--carrier", "nonqw:1"]));
    assert!(text.contains("Phi2"), "{text}");
    assert!(text.contains("(a1, b1)"), "{text}");
}

#[test]
fn dims_of_module_extension() {
    assert_eq!(json(&["dims", "--system", &data("module.eqs")])["dimension"], "1");
}

#[test]
fn exit_codes() {
    let missing = liegeo(&["solve", "--system", "/nonexistent/file.eqs"]);
    assert_eq!(missing.status.code(), Some(1));
    let dir = std::env::temp_dir().join(format!("liegeo-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.eqs");
    std::fs::write(&bad, "algebra free rank=2 field=GF(2)\nvars x\neq [x, q] = 0\n").unwrap();
    let o = liegeo(&["solve", "--system", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.eqs:3:8:"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
    let o = liegeo(&["solve", "--system", &data("point.eqs"), "--trunc", "6", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_liegeo"))
        .args(["solve", "--system", &data("point.eqs"), "--trunc", "6"])
        .env("LIEGEO_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_report() {
    let path = std::env::temp_dir().join(format!("liegeo-out-{}.txt", std::process::id()));
    let o = liegeo(&["solve", "--system", &data("point.eqs"), "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let direct = stdout(&liegeo(&["solve", "--system", &data("point.eqs")]));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn repeated_runs_are_byte_identical() {
    for format in ["text", "machine"] {
        for cmd in ["solve", "radical", "classify1", "decompose"] {
            let args = [cmd, "--system", &data("two_points.eqs"), "--format", format];
            assert_eq!(liegeo(&args).stdout, liegeo(&args).stdout, "{cmd} {format}");
        }
    }
}
