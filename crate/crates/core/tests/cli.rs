mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::*;
use pframe::cli::word_file_name;
use pframe::io::{
    frame_matrix_to_json, grid_to_csv, parse_coefficients, parse_dilation, parse_frame_matrix, parse_grid_csv,
    psi_frame_to_json, CheckLine,
};
use pframe::{build_dilation, enumerate_words, frame_element, validate, FrameMatrix, GridFunction1D};
use tempfile::TempDir;

fn pframe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pframe")).args(args).env_remove("PFRAME_TOLERANCE").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write_matrix(dir: &Path, name: &str, m: &FrameMatrix) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, frame_matrix_to_json(m)).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let walsh = write_matrix(dir.path(), "walsh.json", &FrameMatrix::walsh());
    assert_eq!(code(&pframe(&["validate", s(&walsh)])), 0);

    let bad = write_matrix(dir.path(), "bad.json", &FrameMatrix::from_real(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap());
    let out = pframe(&["validate", s(&bad)]);
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["violations"][0]["condition"], "isometry");
    assert!(report["violations"][0]["deviation"].as_f64().unwrap() > 0.5);

    let truncated = dir.path().join("truncated.json");
    fs::write(&truncated, r#"{"N": 2, "M": 2, "alpha": [[1, 1], [1"#).unwrap();
    assert_eq!(code(&pframe(&["validate", s(&truncated)])), 2);

    let wrong_shape = dir.path().join("shape.json");
    fs::write(&wrong_shape, r#"{"N": 3, "M": 2, "alpha": [[1, 1], [1, -1]]}"#).unwrap();
    let out = pframe(&["validate", s(&wrong_shape)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));

    assert_eq!(code(&pframe(&["validate", "/nonexistent/matrix.json"])), 2);
}

#[test]
fn tolerance_comes_from_environment() {
    let dir = TempDir::new().unwrap();
    let m3 = write_matrix(dir.path(), "m3.json", &FrameMatrix::three_by_two());
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_pframe"))
            .args(["validate", s(&m3)])
            .env("PFRAME_TOLERANCE", tol)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("1e-10")), 0);
    // The seed carries rounding error of a few ulps, so zero tolerance fails.
    assert_eq!(code(&run("0")), 1);
    // An explicit flag overrides the environment.
    let out = Command::new(env!("CARGO_BIN_EXE_pframe"))
        .args(["validate", s(&m3), "--tolerance", "1e-10"])
        .env("PFRAME_TOLERANCE", "0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn build_from_psi_file() {
    let dir = TempDir::new().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = ndarray::Array2::from_elem((2, 1), num_complex::Complex64::new(h, 0.0));
    let input = dir.path().join("psi.json");
    fs::write(&input, psi_frame_to_json(&psi, 2)).unwrap();
    let out_path = dir.path().join("m3.json");
    assert_eq!(code(&pframe(&["build", s(&input), "--out", s(&out_path)])), 0);
    let m = parse_frame_matrix(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!((m.m(), m.n()), (3, 2));
    assert!(validate(&m).is_valid());

    let not_parseval = dir.path().join("bad_psi.json");
    fs::write(&not_parseval, r#"{"N": 2, "psi": [[1], [1]]}"#).unwrap();
    assert_eq!(code(&pframe(&["build", s(&not_parseval)])), 1);
}

fn frame_dir(matrix: &FrameMatrix, level: usize) -> (TempDir, PathBuf) {
    let dir = TempDir::new().unwrap();
    let path = write_matrix(dir.path(), "m.json", matrix);
    let out = dir.path().join("frame");
    let res = pframe(&["frame", s(&path), "-k", &level.to_string(), "--out", s(&out)]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    (dir, out)
}

fn csv_count(dir: &Path) -> usize {
    fs::read_dir(dir).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv")).count()
}

#[test]
fn frame_writes_one_file_per_word() {
    let walsh = FrameMatrix::walsh();
    let (_keep, out) = frame_dir(&walsh, 2);
    assert_eq!(csv_count(&out), 4);
    let index: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("index.json")).unwrap()).unwrap();
    let words: Vec<Vec<usize>> =
        index["words"].as_array().unwrap().iter().map(|w| serde_json::from_value(w["word"].clone()).unwrap()).collect();
    assert_eq!(words, vec![vec![], vec![1], vec![0, 1], vec![1, 1]]);
    for w in enumerate_words(2, 2) {
        let f = parse_grid_csv(&fs::read_to_string(out.join(word_file_name(&w))).unwrap()).unwrap();
        let expected = frame_element(&walsh, w.digits()).unwrap();
        assert_eq!(f, expected);
        // Cross-check against point evaluation of the filters.
        let sampled = sample(2, w.len(), |x| eval_word(&walsh, w.digits(), x));
        assert!(max_abs_diff(f.coeffs(), &sampled) < 1e-15);
    }

    let (_keep, out) = frame_dir(&FrameMatrix::three_by_two(), 1);
    assert_eq!(csv_count(&out), 3);

    let (_keep, out) = frame_dir(&FrameMatrix::three_by_two(), 0);
    assert_eq!(csv_count(&out), 1);
    let f = parse_grid_csv(&fs::read_to_string(out.join("word_e.csv")).unwrap()).unwrap();
    assert_eq!(f, GridFunction1D::one(2));
}

#[test]
fn frame_steps_and_level_cap() {
    let dir = TempDir::new().unwrap();
    let path = write_matrix(dir.path(), "m.json", &FrameMatrix::walsh());
    let out = dir.path().join("frame");
    assert_eq!(code(&pframe(&["frame", s(&path), "-k", "1", "--out", s(&out), "--steps"])), 0);
    assert_eq!(csv_count(&out), 2);
    let steps = fs::read_to_string(out.join("steps").join("word_1.csv")).unwrap();
    assert!(steps.starts_with("x,re,im\n0.0,1.0,0.0\n0.5,1.0,0.0\n0.5,-1.0,0.0\n"));

    assert_eq!(code(&pframe(&["frame", s(&path), "-k", "7", "--out", s(&out)])), 2);
    assert_eq!(code(&pframe(&["frame", s(&path), "-k", "7", "--max-level", "7", "--out", s(&out)])), 0);

    let bad = write_matrix(dir.path(), "bad.json", &FrameMatrix::from_real(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap());
    assert_eq!(code(&pframe(&["frame", s(&bad), "-k", "1", "--out", s(&out)])), 1);
}

fn round_trip(matrix: &FrameMatrix, level: usize, seed: u64) -> (f64, f64, f64) {
    let dir = TempDir::new().unwrap();
    let mpath = write_matrix(dir.path(), "m.json", matrix);
    let signal = random_signal(&mut rng(seed), matrix.n(), level);
    let spath = dir.path().join("signal.csv");
    fs::write(&spath, grid_to_csv(&signal)).unwrap();
    let cpath = dir.path().join("coeffs.json");
    assert_eq!(code(&pframe(&["analyze", s(&mpath), s(&spath), "--out", s(&cpath)])), 0);
    let coeffs = parse_coefficients(&fs::read_to_string(&cpath).unwrap()).unwrap();
    assert_eq!(coeffs.coeffs.len(), matrix.m().pow(level as u32));
    let parseval = coeffs.parseval_residual.unwrap();

    let rpath = dir.path().join("recon.csv");
    let out = pframe(&["synthesize", s(&mpath), s(&cpath), "--out", s(&rpath), "--reference", s(&spath)]);
    assert_eq!(code(&out), 0);
    let meta: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let recon = parse_grid_csv(&fs::read_to_string(&rpath).unwrap()).unwrap();
    let err = recon.distance(&signal).unwrap();
    assert!((meta["reference_error"].as_f64().unwrap() - err).abs() < 1e-15);
    (parseval, meta["roundtrip_residual"].as_f64().unwrap(), err)
}

#[test]
fn analyze_synthesize_round_trips() {
    let (p, r, e) = round_trip(&FrameMatrix::walsh(), 3, 11);
    assert!(p < 1e-12 && r < 1e-12 && e < 1e-12, "{p} {r} {e}");
    let (p, r, e) = round_trip(&FrameMatrix::three_by_two(), 2, 12);
    assert!(p < 1e-10 && r < 1e-10 && e < 1e-10, "{p} {r} {e}");
}

#[test]
fn constant_signal_has_one_nonzero_coefficient() {
    let dir = TempDir::new().unwrap();
    let mpath = write_matrix(dir.path(), "m.json", &FrameMatrix::three_by_two());
    let spath = dir.path().join("c.csv");
    fs::write(&spath, "# base=2 level=2\n0,3,0\n1,3,0\n2,3,0\n3,3,0\n").unwrap();
    let out = pframe(&["analyze", s(&mpath), s(&spath)]);
    assert_eq!(code(&out), 0);
    let coeffs = parse_coefficients(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let nonzero: Vec<_> = coeffs.coeffs.iter().filter(|c| c.re.hypot(c.im) > 1e-12).collect();
    assert_eq!(nonzero.len(), 1);
    assert!(nonzero[0].word.is_empty());
    assert!((nonzero[0].re - 3.0).abs() < 1e-14);

    let out = pframe(&["analyze", s(&mpath), s(&spath), "--format", "csv"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("# source_level=2\nword,re,im\n,3.0,0.0\n"));
}

#[test]
fn base_mismatch_is_a_condition_failure() {
    let dir = TempDir::new().unwrap();
    let mpath = write_matrix(dir.path(), "m.json", &FrameMatrix::walsh());
    let spath = dir.path().join("s.csv");
    fs::write(&spath, "# base=3 level=1\n0,1,0\n1,1,0\n2,1,0\n").unwrap();
    assert_eq!(code(&pframe(&["analyze", s(&mpath), s(&spath)])), 1);
}

#[test]
fn dilate_exports_the_a_matrix() {
    let dir = TempDir::new().unwrap();
    let m3 = FrameMatrix::three_by_two();
    let mpath = write_matrix(dir.path(), "m.json", &m3);
    let out = pframe(&["dilate", s(&mpath)]);
    assert_eq!(code(&out), 0);
    let file = parse_dilation(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(file.nprime, 2);
    assert_eq!(file.iota, vec![[0, 0], [1, 0], [0, 1]]);
    let a = file.a_matrix().unwrap();
    let sys = build_dilation(&m3).unwrap();
    for (x, y) in a.iter().zip(sys.a_matrix().iter()) {
        assert!((x - y).norm() <= 1e-14);
    }
    let out = pframe(&["dilate", s(&mpath), "--nprime", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(parse_dilation(&String::from_utf8(out.stdout).unwrap()).unwrap().a.len(), 6);
    assert_eq!(code(&pframe(&["dilate", s(&mpath), "--nprime", "1"])), 2);
}

fn check_lines(out: &Output) -> Vec<CheckLine> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn check_battery_passes_for_seeds() {
    let dir = TempDir::new().unwrap();
    for (name, m) in seeds() {
        let path = write_matrix(dir.path(), &format!("{name}.json"), &m);
        let out = pframe(&["check", s(&path), "-k", "2"]);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let lines = check_lines(&out);
        let names: Vec<&str> = lines.iter().map(|l| l.condition.as_str()).collect();
        for required in [
            "isometry",
            "first_row",
            "resolution_of_identity",
            "level_parseval",
            "cuntz",
            "compatibility",
            "orthonormal_basis",
            "nu_normalization",
        ] {
            assert!(names.contains(&required), "{name}: missing {required}");
        }
        assert!(lines.iter().all(|l| l.deviation < 1e-10));
    }
}

#[test]
fn check_failures() {
    let dir = TempDir::new().unwrap();
    let m3 = write_matrix(dir.path(), "m3.json", &FrameMatrix::three_by_two());
    assert_eq!(code(&pframe(&["check", s(&m3), "--nprime", "1"])), 2);
    assert_eq!(code(&pframe(&["check", s(&m3), "-k", "0"])), 2);

    let bad = write_matrix(dir.path(), "bad.json", &FrameMatrix::from_real(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap());
    let out = pframe(&["check", s(&bad)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("isometry"));
}

#[test]
fn unknown_subcommand_is_an_input_error() {
    assert_eq!(code(&pframe(&["transmogrify"])), 2);
    assert_eq!(code(&pframe(&["--help"])), 0);
}

#[test]
fn library_entry_point_matches_binary() {
    let dir = TempDir::new().unwrap();
    let path = write_matrix(dir.path(), "w.json", &FrameMatrix::walsh());
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let rc = pframe::cli::run(["pframe", "check", s(&path), "-k", "1"], &mut stdout, &mut stderr);
    assert_eq!(rc, 0);
    assert_eq!(stdout, pframe(&["check", s(&path), "-k", "1"]).stdout);
}
