use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn dsemi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsemi")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn line<'a>(out: &'a str, label: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(label).map(str::trim))
        .unwrap_or_else(|| panic!("no `{label}` line in:\n{out}"))
}

#[test]
fn d_elim_phq_on_the_square_fixture() {
    let o = dsemi(&["d-elim", "--case", "phq", "(eq v 0)", "--p", "(* x x)", "--q", "x", "--h", "x"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(
        line(&out, "formula"),
        "(or (and (lt 0 (* x x)) (eq x 0)) (and (eq (* x x) 0) (eq 0 0)))"
    );
    assert_eq!(line(&out, "verdict"), "pass");
}

#[test]
fn d_elim_qhp_prints_both_pieces() {
    let o = dsemi(&["d-elim", "--case", "qhp", "(le v c)", "--p", "1", "--q", "h", "--h", "h", "--samples", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("guard ")).count(), 2);
}

#[test]
fn osgood_membership_passes() {
    let o = dsemi(&["osgood", "--facts", "membership", "--count", "30"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(line(&out, "members-not-refuted"), "30");
    assert_eq!(line(&out, "non-members-rejected"), "30");
}

#[test]
fn osgood_zariski_evidence() {
    let o = dsemi(&["osgood", "--facts", "zariski", "--count", "60", "--n", "24"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(line(&stdout(&o), "independent"), "true");
}

#[test]
fn malformed_formula_file_reports_position() {
    let dir = std::env::temp_dir().join(format!("dsemi-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.formula");
    std::fs::write(&path, "(and (le x 1)\n  (lt y").unwrap();
    let o = dsemi(&["positivize", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.formula") && err.contains("line 2"), "{err}");
}

#[test]
fn malformed_literal_exits_3() {
    let o = dsemi(&["eval", "(le x (+ y", "--point", "(1, 2)"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("column"));
}

#[test]
fn counterexample_exits_1() {
    let o = dsemi(&["check-equiv", "(le x 1)", "(lt x 1)"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(line(&stdout(&o), "verdict"), "counterexample");
}

#[test]
fn precision_exhaustion_exits_2() {
    // 1/(1+w) and 1 - w differ at w^2, but two copies of 1/(1+w) never separate
    let o = dsemi(&[
        "eval",
        "(eq (D 1 (+ 1 w)) (+ 1 (neg w)))",
        "--point",
        "()",
        "--max-precision",
        "32",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = dsemi(&["eval", "(eq (D x (+ 1 w)) (D x (+ 1 w)))", "--point", "(1)", "--max-precision", "32"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert_eq!(line(&stdout(&o), "verdict"), "needs-precision");
}

#[test]
fn budget_exhaustion_exits_4() {
    let o = dsemi(&["basic-union", "(or (and (le x 1) (le y 1)) (and (le x w) (le y w)))", "--size-cap", "1"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn pipeline_fixture_matches_the_cone() {
    let o = dsemi(&["qe-pipeline", &fixture("product.datum"), "--compare", "(le y x)", "--samples", "300"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn flat_image_of_the_parabola() {
    let o = dsemi(&["flat-image", &fixture("parabola.map"), "--compare", "(lt x 1)"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(line(&stdout(&o), "formula"), "(lt x 1)");
}

#[test]
fn chevalley_of_the_hyperbola() {
    let o = dsemi(&["chevalley", &fixture("hyperbola.map")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("piece I = (0)  g = x"), "{}", stdout(&o));
}

#[test]
fn blowup_charts_and_image() {
    let b = fixture("origin.blowup");
    let o = dsemi(&["blowup-charts", &b]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("relation (eq y (* x u2))"));
    let o = dsemi(&["image-off-center", "--blowup", &b, "(lt u2 1)", "(lt 0 0)"]);
    assert_eq!(o.status.code(), Some(0));
    let f = line(&stdout(&o), "formula").to_string();
    let o = dsemi(&["check-equiv", &f, "(and (lt y x) (lt 0 x))"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = dsemi(&["pullback", "(le y x)", "--blowup", &b, "--chart", "1"]);
    assert_eq!(line(&stdout(&o), "formula"), "(le (* x u2) x)");
}

#[test]
fn gb_elimination_and_saturation() {
    let o = dsemi(&["gb", "(+ (* x y) -1)", "(+ (* y y) (neg x))", "--vars", "y", "x", "--eliminate", "1"]);
    assert_eq!(line(&stdout(&o), "basis"), "(+ (* x x x) -1)");
    let o = dsemi(&["gb", "y", "--vars", "x", "y", "--saturate", "y"]);
    assert_eq!(line(&stdout(&o), "basis"), "1");
    let o = dsemi(&["gb", "(* w x)", "--vars", "x"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn graph_encode_and_reduce() {
    let o = dsemi(&["graph-encode", "(and (le x y) (lt y 1))"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(line(&stdout(&o), "constraint"), "(lt z2 1)");
    let o = dsemi(&["reduce", "(+ (* w x) y 1)"]);
    assert_eq!(line(&stdout(&o), "residue"), "(+ y 1)");
}

#[test]
fn eval_with_an_exists_hint() {
    let args = ["eval", "(exists (t) (and (eq y (* x t)) (le t 1)))", "--point", "(w, w^2)", "--vars", "x", "y"];
    let o = dsemi(&[&args[..], &["--hint", "(D y x)"]].concat());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(line(&stdout(&o), "witness"), "(w)");
}

#[test]
fn reports_are_deterministic_and_can_go_to_a_file() {
    let args = ["positivize", "(not (or (le x y) (eq x w)))", "--seed", "7", "--samples", "100"];
    assert_eq!(dsemi(&args).stdout, dsemi(&args).stdout);
    let path = std::env::temp_dir().join(format!("dsemi-out-{}.txt", std::process::id()));
    let o = dsemi(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), dsemi(&args).stdout);
}
