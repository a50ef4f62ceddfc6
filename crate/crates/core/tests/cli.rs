use costab::engine::AlgebraPresentation;
use costab::snapshot::{BuildConfig, Snapshot};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn costab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_costab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_snapshot_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("a2.toml");
    Snapshot::build(AlgebraPresentation::a2(), &BuildConfig::default()).unwrap().save(&file).unwrap();
    let o = costab(&["validate", path(&file)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn validate_good_files() {
    let files = ["a2_cotstructure.toml", "a2_half.coslicing.toml", "a2_split.condition.toml", "a2_half.condition.toml"];
    let args: Vec<String> = files.iter().map(|f| data(f).display().to_string()).collect();
    let mut all = vec!["validate"];
    all.extend(args.iter().map(String::as_str));
    let o = costab(&all);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("co-heart: add(x, y)"));
}

#[test]
fn validate_reports_hom_ordering_witness() {
    let o = costab(&["validate", path(&data("a2_forced.coslicing.toml"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("Hom(x, y) has dimension 1"), "{}", stdout(&o));
}

#[test]
fn malformed_phase_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.toml");
    std::fs::write(&file, "schema = \"costab-coslicing/1\"\n[[slice]]\nphase = \"1.5.2\"\nids = [\"x\"]\n").unwrap();
    let o = costab(&["validate", path(&file)]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("parse error") && err.contains("1.5.2"), "{err}");
}

#[test]
fn metric_of_identical_files_is_zero() {
    let f = data("a2_split.coslicing.toml");
    let o = costab(&["metric", path(&f), path(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("d = 0"), "{}", stdout(&o));
}

#[test]
fn hn_of_cone_over_arrow_structure() {
    let o = costab(&["hn", path(&data("a2_cotstructure.toml")), "z"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("factors: y (level 0), x[1] (level 1)"), "{}", stdout(&o));
}

#[test]
fn deform_file_round() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.toml");
    let c = data("a2_split.condition.toml");
    let w = data("a2_nudge.charge.toml");
    let o = costab(&["deform", path(&c), path(&w), "--eps", "0.1", "--snap-denominator", "20", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let written = std::fs::read_to_string(out.with_extension("condition.toml")).unwrap();
    assert!(written.contains("phase = \"4/5\""), "{written}");
    // the written condition validates
    let o = costab(&["validate", path(&out.with_extension("condition.toml"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn deform_refusals() {
    let c = data("a2_split.condition.toml");
    let w = data("a2_nudge.charge.toml");
    let o = costab(&["deform", path(&c), path(&w), "--eps", "0.3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("eps0"));
    let o = costab(&["deform", path(&data("a2_half.condition.toml")), path(&w)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("condition (S)"));
}

#[test]
fn demos_pass_and_are_deterministic() {
    let a = costab(&["demo-counterexample"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert!(stdout(&a).contains("forces phase 0.99"));
    let b = costab(&["demo-counterexample"]);
    assert_eq!(stdout(&a), stdout(&b));
    let t1 = costab(&["demo-theorem-b", "--samples", "12", "--seed", "5"]);
    let t2 = costab(&["demo-theorem-b", "--samples", "12", "--seed", "5"]);
    assert_eq!(t1.status.code(), Some(0), "{}", stdout(&t1));
    assert_eq!(stdout(&t1), stdout(&t2));
    assert!(stdout(&t1).contains("j,re_z0,im_z0,phi0"));
}

#[test]
fn enumerate_dual_numbers() {
    let o = costab(&["enumerate-cohearts", "--algebra", "dual", "--width", "3", "--window", "-1,1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for c in ["add(c[-1])", "add(c)", "add(c[1])"] {
        assert!(s.contains(&format!("co-heart {c}")), "{s}");
    }
    assert_eq!(s.matches("co-heart add").count(), 3, "{s}");
}
