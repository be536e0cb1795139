use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fedosov::weyl::serial::{from_canonical_text, to_canonical_text};
use fedosov::weyl::{Scalar, TruncationOrder};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scenario(name: &str) -> String {
    root().join("scenarios").join(name).to_string_lossy().into_owned()
}

fn fedosov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fedosov")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn temp(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("fedosov-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

/// Compares with `tests/golden/<name>`; `FEDOSOV_BLESS=1` rewrites the file.
fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("FEDOSOV_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

#[test]
fn bundled_scenarios_match_golden_output() {
    for name in ["flat", "line-bundle", "curved-rank2"] {
        let out = fedosov(&["--verify", "run", &scenario(&format!("{name}.scn"))]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        golden(&format!("{name}.txt"), &stdout(&out));
    }
    let out = fedosov(&["--format", "json", "star", &scenario("flat.scn")]);
    golden("flat-star.json", &stdout(&out));
}

#[test]
fn flat_star_of_coordinates_is_moyal() {
    let out = fedosov(&["--order", "3", "star", &scenario("flat.scn"), "x1", "x2"]);
    assert!(stdout(&out).ends_with("## f * g\nlambda^0: x1*x2\nlambda^1: 1/2*i\nlambda^2: 0\nlambda^3: 0\n"));
}

#[test]
fn output_is_deterministic() {
    let args = ["--seed", "11", "--verify", "run", &scenario("curved-rank2.scn")];
    let a = fedosov(&args);
    assert_eq!(a.stdout, fedosov(&args).stdout);
    let json = ["--format", "json", "char-class", &scenario("line-bundle.scn")];
    assert_eq!(fedosov(&json).stdout, fedosov(&json).stdout);
}

#[test]
fn taylor_output_round_trips() {
    let out = stdout(&fedosov(&["taylor", &scenario("line-bundle.scn"), "x1*x2 + lam*x1"]));
    let body: String = out.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let parsed = from_canonical_text::<Scalar>(&body, 1, 1, TruncationOrder(4)).unwrap();
    assert_eq!(to_canonical_text(&parsed), body);
}

#[test]
fn json_output_parses() {
    let out = fedosov(&["--format", "json", "--verify", "run", &scenario("line-bundle.scn")]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["results"].as_array().unwrap().len(), 5);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| fedosov(args).status.code();

    let gamma = temp("gamma.scn", "[geometry]\nn = 1\ngamma[1][1][2] = \"x1\"\ngamma[1][2][1] = \"x2\"\n");
    assert_eq!(code(&["check-geometry", &gamma]), Some(1));

    let syntax = temp("syntax.scn", "[geometry]\nn = 1\ngamma[1][1][1] = \"x1 $ x2\"\n");
    let out = fedosov(&["check-geometry", &syntax]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    assert_eq!(code(&["char-class", &scenario("curved-rank2.scn")]), Some(2));
    assert_eq!(code(&["star", &scenario("flat.scn"), "lam^3", "1"]), Some(2));
    assert_eq!(code(&["check-geometry", "no/such/file.scn"]), Some(2));
    assert_eq!(code(&["no-such-command"]), Some(2));
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["check-geometry", &scenario("line-bundle.scn")]), Some(0));
}
