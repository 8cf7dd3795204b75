use std::fs;
use std::process::Command;

use cohrank::commands::{run_campaign, TheoremCampaign};
use cohrank::{ExitStatus, RunConfig};
use cohrank_core::spec_files::{write_state, write_unitary};
use cohrank_core::states::RandomBounds;
use cohrank_core::{CoherentPoint, Complex64, SplitterUnitary, SuperpositionState, Term};
use nalgebra::DMatrix;

fn cohrank(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_cohrank"))
        .args(args)
        .output()
        .expect("run cohrank");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap(),
    )
}

fn summary(stdout: &str) -> &str {
    stdout
        .lines()
        .rev()
        .find(|l| l.starts_with("NCL_RANK=") || l.starts_with("TRIALS=") || l.starts_with("# RANKS="))
        .expect("summary line")
}

#[test]
fn analyze_examples() {
    for (state, expect) in [
        ("cat:odd:1.0", "NCL_RANK=2 GRAM_RANK=2 CERTIFICATE=pass"),
        ("coherent:0:0", "NCL_RANK=1 GRAM_RANK=1 CERTIFICATE=pass"),
    ] {
        let (out, _, code) = cohrank(&["analyze", state]);
        assert_eq!(code, 0);
        assert_eq!(summary(&out), expect);
    }
    let (out, _, code) = cohrank(&["analyze", "fockdq:3:0.05"]);
    assert_eq!(code, 0);
    assert!(summary(&out).starts_with("NCL_RANK=4 "));
    assert!(out.contains("vandermonde: "));
}

#[test]
fn split_examples() {
    let (out, _, code) = cohrank(&["split", "cat:odd:1.2", "--splitter", "bs"]);
    assert_eq!((code, summary(&out)), (0, "NCL_RANK=2 SCHMIDT_RANK=2 CERTIFICATE=pass"));

    let (out, _, code) = cohrank(&["split", "coherent:1:0", "--splitter", "bs"]);
    assert_eq!((code, summary(&out)), (0, "NCL_RANK=1 SCHMIDT_RANK=1 CERTIFICATE=pass"));

    let (out, _, code) = cohrank(&["split", "cat:odd:1.0", "--splitter", "dft:3"]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("schmidt_rank=2").count(), 3);
    assert!(out.contains("GHZ=pass"));
    assert_eq!(summary(&out), "NCL_RANK=2 SCHMIDT_RANK=2 CERTIFICATE=pass");
}

#[test]
fn reports_state_truncation_and_tail() {
    let (out, _, _) = cohrank(&["split", "cat:odd:1.2"]);
    assert!(out.contains("truncation: "));
    assert!(out.contains("tail_bound: "));
    let (out, _, code) = cohrank(&["split", "cat:odd:1.2", "--truncation", "30"]);
    assert_eq!(code, 0);
    assert!(out.contains("truncation: 30,30"));
}

#[test]
fn numbers_have_seventeen_significant_digits() {
    let (out, _, _) = cohrank(&["analyze", "cat:odd:1.0"]);
    let line = out.lines().find(|l| l.starts_with("gram_eigenvalues:")).unwrap();
    for field in line.split_whitespace().skip(1) {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.replace('.', "").len(), 17, "{field}");
        let value: f64 = field.parse().unwrap();
        assert_eq!(format!("{value:.16e}"), field);
    }
}

#[test]
fn verify_theorem_examples() {
    let (out, _, code) = cohrank(&["verify-theorem", "--trials", "100"]);
    assert_eq!(code, 0);
    assert_eq!(summary(&out), "TRIALS=100 PASSED=100 FAILED=0 CONDITIONING=0");

    let (out, _, code) = cohrank(&["verify-theorem", "--trials", "1", "--max-rank", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("r 1: ncl=1 gram=1 schmidt=1..1 pass"));

    let (_, err, code) = cohrank(&["verify-theorem", "--trials", "0"]);
    assert_eq!(code, 2);
    assert!(err.contains("--trials"));
}

#[test]
fn adversarial_separation_counts_conditioning_separately() {
    // tiny radius forces near-coincident points
    let campaign = TheoremCampaign {
        trials: 24,
        seed: 3,
        max_rank: 6,
        bounds: RandomBounds { radius: 0.01, min_sep: 1e-6 },
        splitter: "bs".into(),
    };
    let results = run_campaign(&campaign, &RunConfig::default()).unwrap();
    let conditioning = results.iter().filter(|t| t.ill_conditioned).count();
    assert!(conditioning > 0);
    assert!(results.iter().all(|t| !t.is_failure()));

    let args = ["verify-theorem", "--trials", "24", "--seed", "3", "--radius", "0.01", "--min-sep", "1e-6"];
    let (out, _, code) = cohrank(&args);
    assert_eq!(code, 0);
    assert!(summary(&out).contains("FAILED=0"));
    assert!(!summary(&out).contains("CONDITIONING=0"));
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(cohrank(&strict).2, 3);
}

#[test]
fn sweep_examples() {
    let (out, _, code) = cohrank(&["sweep", "sv:1.1276259652063807", "--truncations", "10..60"]);
    assert_eq!(code, 0);
    assert!(out.contains("# NON_DECREASING=yes"));

    let (out, _, code) = cohrank(&["sweep", "cat:odd", "--alphas", "0.2..2.0"]);
    assert_eq!(code, 0);
    assert_eq!(summary(&out), "# RANKS=2,2,2,2,2,2,2,2,2,2");

    let (out, _, code) = cohrank(&["sweep", "coherent:1:0", "--truncations", "10..40"]);
    assert_eq!(code, 0);
    assert_eq!(summary(&out), format!("# RANKS={}", vec!["1"; 31].join(",")));
}

#[test]
fn sweep_needs_a_matching_axis() {
    assert_eq!(cohrank(&["sweep", "cat:odd", "--truncations", "10..12"]).2, 2);
    assert_eq!(cohrank(&["sweep", "coherent:1:0", "--alphas", "0.1..1"]).2, 2);
    assert_eq!(cohrank(&["sweep", "coherent:1:0"]).2, 2);
}

#[test]
fn input_errors_exit_with_two() {
    for args in [
        &["analyze", "missing-file.json"][..],
        &["analyze", "cat:odd:abc"],
        &["analyze", "cat:odd:0"],
        &["analyze", "fockdq:5:0.05"],
        &["split", "cat:odd:1", "--splitter", "dft:1"],
        &["split", "cat:odd:1", "--splitter", "bogus"],
        &["analyze", "cat:odd:1", "--tol-rank", "-1"],
        &["frobnicate"],
    ] {
        let (_, err, code) = cohrank(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty());
    }
    assert_eq!(cohrank(&["--help"]).2, 0);
}

#[test]
fn non_entangling_splitter_is_a_theorem_violation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("identity.json");
    let identity = SplitterUnitary::from_matrix(DMatrix::identity(2, 2)).unwrap();
    fs::write(&path, write_unitary(&identity)).unwrap();
    let spec = format!("file:{}", path.display());
    let (out, _, code) = cohrank(&["split", "cat:odd:1.0", "--splitter", &spec]);
    assert_eq!(code, ExitStatus::TheoremViolation.code());
    assert_eq!(summary(&out), "NCL_RANK=2 SCHMIDT_RANK=1 CERTIFICATE=fail");
}

#[test]
fn state_files_and_strict_conditioning() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("close.json");
    let s = SuperpositionState::new(
        1,
        vec![
            Term::new(Complex64::new(1.0, 0.0), CoherentPoint::single(Complex64::new(0.5, 0.0))),
            Term::new(Complex64::new(0.5, 0.0), CoherentPoint::single(Complex64::new(0.5 + 1e-6, 0.0))),
        ],
    )
    .unwrap();
    fs::write(&path, write_state(&s)).unwrap();
    let p = path.to_str().unwrap();
    let (out, _, code) = cohrank(&["analyze", p]);
    assert_eq!(code, 0);
    assert!(out.contains("warning: ill-conditioned"));
    assert_eq!(cohrank(&["analyze", p, "--strict"]).2, 3);
    assert_eq!(cohrank(&["split", p, "--strict"]).2, 3);
    // a merge tolerance above the separation collapses the pair
    let (out, _, code) = cohrank(&["analyze", p, "--tol-merge", "1e-5"]);
    assert_eq!(code, 0);
    assert!(summary(&out).starts_with("NCL_RANK=1 "));

    fs::write(&path, r#"{"modes": 1, "terms": [], "extra": 1}"#).unwrap();
    assert_eq!(cohrank(&["analyze", p]).2, 2);
}

#[test]
fn csv_and_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("spectra.csv");
    let report = dir.path().join("report.txt");
    let (out, _, code) = cohrank(&[
        "split",
        "cat:odd:1.0",
        "--splitter",
        "dft:3",
        "--csv",
        csv.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(fs::read_to_string(&report).unwrap(), out);
    let csv = fs::read_to_string(&csv).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("bipartition,sigma_index,sigma_value"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.iter().any(|r| r.starts_with("0|1,2") || r.starts_with("\"0|1,2\",")));
    assert!(rows.iter().all(|r| r.rsplit(',').next().unwrap().parse::<f64>().is_ok()));

    let sweep_csv = dir.path().join("sweep.csv");
    cohrank(&["sweep", "cat:even", "--alphas", "0.5..1.5", "--steps", "3", "--csv", sweep_csv.to_str().unwrap()]);
    let sweep_csv = fs::read_to_string(&sweep_csv).unwrap();
    assert_eq!(sweep_csv.lines().next(), Some("parameter,rank,tail_bound,sigma_0,sigma_1,sigma_2,sigma_3"));
    assert_eq!(sweep_csv.lines().count(), 4);
}

#[test]
fn squeezed_vacuum_uses_the_fock_path() {
    let (out, _, code) = cohrank(&["split", "sv:1.1276259652063807", "--truncation", "40"]);
    assert_eq!(code, 0);
    assert!(out.contains("nonclassicality_rank: unbounded"));
    assert_eq!(summary(&out), "NCL_RANK=unbounded SCHMIDT_RANK=14 CERTIFICATE=n/a");
    let (out, _, code) = cohrank(&["split", "sv:1.1276259652063807", "--truncation", "10"]);
    assert_eq!(code, 0);
    assert!(out.contains("warning: tail bound"));
    assert_eq!(cohrank(&["split", "sv:1.1276259652063807", "--truncation", "10", "--strict"]).2, 3);
    assert_eq!(cohrank(&["analyze", "sv:0.5"]).2, 2);
}
