use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use landau_core::fixtures;
use landau_core::landau::{Chart, LandauSystem};
use landau_core::quadform::ProjectiveIntegral;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Scratch directory holding every fixture and the test data files under short names.
fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for name in fixtures::NAMES {
        let out = landau(dir.path(), &["examples", name, "-o", &format!("{name}.json")]);
        assert!(out.status.success());
    }
    for entry in fs::read_dir(data_dir()).unwrap() {
        let p = entry.unwrap().path();
        fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
    }
    dir
}

fn landau(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_landau")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const WITNESS: &str = "p=(3i,0,0,0);m=(1,2)";

const GOLDEN: &[(&str, &[&str])] = &[
    ("route_sunrise", &["route", "sunrise.json"]),
    ("route_nested", &["route", "nested-bubble.json"]),
    ("symanzik_sunrise", &["symanzik", "sunrise.json"]),
    ("symanzik_nested", &["symanzik", "nested-bubble.json"]),
    ("power_count_bubble", &["power-count", "bubble.json"]),
    ("power_count_nested", &["power-count", "nested-bubble.json"]),
    ("gen_bubble_finite", &["landau", "gen", "bubble.json", "--chart", "finite"]),
    ("gen_twoquadrics", &["landau", "gen", "twoquadrics.json"]),
    ("member_bubble", &["landau", "member", "bubble.json", "--chart", "finite", "--at", WITNESS]),
    ("member_twoquadrics", &["landau", "member", "twoquadrics.json", "--at", "t=2", "--exhaustive"]),
    ("scan_simple", &["landau", "scan", "simple.json", "--chart", "finite", "--grid", "t.re=-1:1:5;t.im=-1:1:3"]),
    ("regularize_sunrise", &["regularize", "sunrise.json", "--at", "p=(3,0,0,0);m=(1,1,1)"]),
    ("regularize_twoquadrics", &["regularize", "twoquadrics.json"]),
    ("hopf_coproduct_nested", &["hopf", "coproduct", "nested-bubble.json"]),
    ("hopf_antipode_nested", &["hopf", "antipode", "nested-bubble.json"]),
    ("renorm_bubble_mom", &["renorm", "bubble.json", "--character", "bubble-character.json", "--scheme", "mom.json"]),
    ("renorm_nested_min", &["renorm", "nested-bubble.json", "--character", "nested-character.json", "--scheme", "min.json"]),
    ("renorm_nested_mom", &["renorm", "nested-bubble.json", "--character", "nested-character.json", "--scheme", "mom.json"]),
    ("examples_bubble", &["examples", "bubble"]),
];

/// Set `LANDAU_BLESS=1` to rewrite the golden files from the current output.
#[test]
fn golden_reports_are_byte_stable() {
    let dir = workspace();
    let bless = std::env::var_os("LANDAU_BLESS").is_some();
    let mut mismatched = Vec::new();
    for (name, args) in GOLDEN {
        let first = landau(dir.path(), args);
        assert!(first.status.success(), "{name}: {}", String::from_utf8_lossy(&first.stderr));
        let second = landau(dir.path(), args);
        assert_eq!(first.stdout, second.stdout, "{name} differs between runs");
        let path = golden_dir().join(format!("{name}.txt"));
        if bless {
            fs::create_dir_all(golden_dir()).unwrap();
            fs::write(&path, &first.stdout).unwrap();
        } else if fs::read(&path).ok().as_deref() != Some(&first.stdout[..]) {
            mismatched.push(*name);
        }
    }
    assert!(mismatched.is_empty(), "output differs from the golden files: {mismatched:?}");
}

#[test]
fn bubble_threshold_is_a_member() {
    let dir = workspace();
    let out = landau(dir.path(), &["landau", "member", "bubble.json", "--at", WITNESS, "--expect", "member"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("result: member\n"));
}

#[test]
fn bubble_power_counting() {
    let dir = workspace();
    let text = stdout(&landau(dir.path(), &["power-count", "bubble.json"]));
    assert!(text.contains("e1,e2  1      0\n"), "{text}");
    assert!(text.ends_with("verdict: not convergent (superficial)\n"));
}

#[test]
fn sunrise_symanzik_polynomial() {
    let dir = workspace();
    let text = stdout(&landau(dir.path(), &["symanzik", "sunrise.json"]));
    assert!(text.contains("U = alpha1*alpha2 + alpha1*alpha3 + alpha2*alpha3\n"));
    assert!(text.contains("determinant check: PASS\n"));
}

#[test]
fn generated_systems_read_back_unchanged() {
    let dir = workspace();
    for (input, integral) in [
        ("bubble.json", ProjectiveIntegral::from_graph(&fixtures::bubble()).unwrap()),
        ("sunrise.json", ProjectiveIntegral::from_graph(&fixtures::sunrise()).unwrap()),
        ("twoquadrics.json", fixtures::two_quadrics().into_integral().unwrap()),
    ] {
        for chart in [Chart::Projective, Chart::Finite, Chart::Infinity] {
            let out = landau(dir.path(), &["landau", "gen", input, "--chart", &chart.to_string()]);
            assert!(out.status.success());
            let mut doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
            doc.as_object_mut().unwrap().shift_remove("manifest").expect("manifest embedded");
            let back = LandauSystem::from_text(&doc.to_string()).unwrap();
            assert_eq!(back, LandauSystem::generate(&integral, chart).unwrap(), "{input} on the {chart} chart");
        }
    }
}

#[test]
fn witnesses_verify_after_a_round_trip() {
    let dir = workspace();
    let gen = landau(dir.path(), &["landau", "gen", "bubble.json", "--chart", "finite"]);
    fs::write(dir.path().join("bubble.system.json"), &gen.stdout).unwrap();
    let member = ["landau", "member", "bubble.system.json", "--at", WITNESS, "--witness-out", "w.json"];
    assert!(landau(dir.path(), &member).status.success());
    let text = stdout(&landau(dir.path(), &["landau", "verify", "bubble.system.json", "w.json"]));
    assert!(text.contains("verdict: verified\n"), "{text}");
    assert!(text.contains("physical: yes\n"));
}

#[test]
fn reports_replay_byte_for_byte() {
    let dir = workspace();
    let report = landau(dir.path(), &["landau", "scan", "simple.json", "--chart", "finite", "--grid", "t=-1:1:3"]);
    fs::write(dir.path().join("scan.txt"), &report.stdout).unwrap();
    let again = landau(dir.path(), &["replay", "scan.txt"]);
    assert!(again.status.success(), "{}", String::from_utf8_lossy(&again.stderr));
    let gen = landau(dir.path(), &["landau", "gen", "sunrise.json"]);
    fs::write(dir.path().join("sunrise.system.json"), &gen.stdout).unwrap();
    assert!(landau(dir.path(), &["replay", "sunrise.system.json"]).status.success());
    fs::write(dir.path().join("simple.json"), fixtures::two_quadrics().to_json()).unwrap();
    assert_eq!(landau(dir.path(), &["replay", "scan.txt"]).status.code(), Some(3));
}

#[test]
fn exit_codes() {
    let dir = workspace();
    fs::write(dir.path().join("broken.json"), "{\"vertices\": [1, 2],\n \"edges\": [}").unwrap();
    let out = landau(dir.path(), &["route", "broken.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2 column 12"));
    let out = landau(dir.path(), &["landau", "member", "bubble.json", "--at", "p=(1,0,0,0);mass=(1,2)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("'mass1'"));
    assert_eq!(landau(dir.path(), &["landau", "gen", "bubble.json", "--chart", "sideways"]).status.code(), Some(2));
    fs::write(dir.path().join("tree.json"), r#"{"vertices": [1, 2], "edges": [{"id": "e", "ends": [1, 2]}], "dimension": 4}"#)
        .unwrap();
    assert_eq!(landau(dir.path(), &["hopf", "coproduct", "tree.json"]).status.code(), Some(3));
    let far = ["landau", "member", "simple.json", "--chart", "finite", "--at", "t=3", "--expect", "member"];
    let out = landau(dir.path(), &far);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("result: no-witness-found\n"));
    assert!(landau(dir.path(), &far[..7]).status.success());
}
