//! End-to-end tests of the psdpack binary: subcommand contracts, file
//! formats, exit codes, and byte-identical reruns (criterion 9 at the
//! process level).

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn psdpack(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psdpack"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn assert_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn gen_fw_yields_binomial_count() {
    let tmp = tempfile::tempdir().unwrap();
    let out = psdpack(
        &["gen", "--family", "fw", "--n", "20", "--k", "2", "--out", "fw.json"],
        tmp.path(),
    );
    assert_code(&out, 0);
    let set = psdpack::frames::FrameSet::from_json_str(
        &fs::read_to_string(tmp.path().join("fw.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(set.len(), 190);
}

#[test]
fn gen_chordal_from_edge_list() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("path.txt"), "3 2\n1 2\n2 3\n").unwrap();
    let out = psdpack(
        &["gen", "--family", "chordal", "--graph", "path.txt", "--out", "cliques.json"],
        tmp.path(),
    );
    assert_code(&out, 0);
    let set = psdpack::frames::FrameSet::from_json_str(
        &fs::read_to_string(tmp.path().join("cliques.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(set.len(), 2);
}

#[test]
fn gen_rejects_non_chordal_with_numerical_code() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c4.txt"), "4 4\n1 2\n2 3\n3 4\n4 1\n").unwrap();
    let out = psdpack(
        &["gen", "--family", "chordal", "--graph", "c4.txt", "--out", "x.json"],
        tmp.path(),
    );
    assert_code(&out, 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("chordless cycle"));
}

#[test]
fn gen_unknown_family_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = psdpack(&["gen", "--family", "nope", "--out", "x.json"], tmp.path());
    assert_code(&out, 2);
}

#[test]
fn pack_reaches_equiangular_lines() {
    let tmp = tempfile::tempdir().unwrap();
    let out = psdpack(
        &["pack", "--n", "2", "--s", "1", "--N", "3", "--seed", "1", "--out", "p.json"],
        tmp.path(),
    );
    assert_code(&out, 0);
    let set = psdpack::frames::FrameSet::from_json_str(
        &fs::read_to_string(tmp.path().join("p.json")).unwrap(),
    )
    .unwrap();
    assert!(set.min_chordal().unwrap() >= 0.856);
}

#[test]
fn pack_rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["pack", "--n", "3", "--s", "1", "--N", "3", "--seed", "9", "--restarts", "3", "--max-iter", "800", "--out", "p.json"];
    assert_code(&psdpack(&args, tmp.path()), 0);
    let first = fs::read(tmp.path().join("p.json")).unwrap();
    assert_code(&psdpack(&args, tmp.path()), 0);
    let second = fs::read(tmp.path().join("p.json")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn project_full_cone_reports_zero_error_for_psd_target() {
    let tmp = tempfile::tempdir().unwrap();
    // identity frame: the cone sum is all of S^3_+
    assert_code(
        &psdpack(&["gen", "--family", "fw", "--n", "3", "--k", "3", "--out", "full.json"], tmp.path()),
        0,
    );
    fs::write(
        tmp.path().join("a.json"),
        r#"{"dim":3,"rows":[[2.0,0.3,0.1],[0.3,1.5,0.0],[0.1,0.0,1.0]]}"#,
    )
    .unwrap();
    let out = psdpack(
        &["project", "--target", "a.json", "--frames", "full.json", "--tol", "1e-9", "--emit-witness", "--out", "r.json"],
        tmp.path(),
    );
    assert_code(&out, 0);
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("r.json")).unwrap()).unwrap();
    assert!(doc["error"].as_f64().unwrap() <= 1e-8);
    assert!(doc["converged"].as_bool().unwrap());
    assert_eq!(doc["witnesses"].as_array().unwrap().len(), 1);
}

#[test]
fn project_nonconvergence_exits_4_but_writes_result() {
    let tmp = tempfile::tempdir().unwrap();
    assert_code(
        &psdpack(&["gen", "--family", "dd", "--n", "4", "--out", "dd.json"], tmp.path()),
        0,
    );
    fs::write(
        tmp.path().join("a.json"),
        r#"{"dim":4,"rows":[[1.0,0.4,0.2,0.1],[0.4,1.0,0.3,0.2],[0.2,0.3,1.0,0.4],[0.1,0.2,0.4,1.0]]}"#,
    )
    .unwrap();
    let out = psdpack(
        &["project", "--target", "a.json", "--frames", "dd.json", "--tol", "1e-12", "--max-iter", "1", "--out", "r.json"],
        tmp.path(),
    );
    assert_code(&out, 4);
    assert!(tmp.path().join("r.json").exists());
}

#[test]
fn export_sdp_roundtrips() {
    let tmp = tempfile::tempdir().unwrap();
    assert_code(
        &psdpack(&["gen", "--family", "fw", "--n", "2", "--k", "1", "--out", "f.json"], tmp.path()),
        0,
    );
    fs::write(tmp.path().join("c.json"), r#"{"dim":2,"rows":[[1.0,0.0],[0.0,1.0]]}"#).unwrap();
    fs::write(tmp.path().join("a1.json"), r#"{"dim":2,"rows":[[1.0,0.0],[0.0,0.0]]}"#).unwrap();
    let out = psdpack(
        &[
            "export-sdp", "--objective", "c.json", "--constraint", "a1.json", "--rhs", "0.5",
            "--frames", "f.json", "--out", "sdp.json",
        ],
        tmp.path(),
    );
    assert_code(&out, 0);
    let doc = psdpack::coneapprox::RestrictedSdp::from_json_str(
        &fs::read_to_string(tmp.path().join("sdp.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(doc.n, 2);
    assert_eq!(doc.blocks.len(), 2);
    assert_eq!(doc.rhs, vec![0.5]);
    // e1^T I e1 = 1
    assert_eq!(doc.blocks[0].objective, vec![vec![1.0]]);
}

#[test]
fn export_sdp_mismatched_rhs_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    assert_code(
        &psdpack(&["gen", "--family", "fw", "--n", "2", "--k", "1", "--out", "f.json"], tmp.path()),
        0,
    );
    fs::write(tmp.path().join("c.json"), r#"{"dim":2,"rows":[[1.0,0.0],[0.0,1.0]]}"#).unwrap();
    let out = psdpack(
        &["export-sdp", "--objective", "c.json", "--constraint", "c.json", "--frames", "f.json", "--out", "x.json"],
        tmp.path(),
    );
    assert_code(&out, 2);
}

#[test]
fn fig1_no_compute_on_cold_catalog_is_catalog_miss() {
    let tmp = tempfile::tempdir().unwrap();
    let out = psdpack(
        &[
            "fig1", "--n", "4", "--methods", "packed:3", "--s-range", "2..2", "--trials", "2",
            "--no-compute", "--out", "f.csv",
        ],
        tmp.path(),
    );
    assert_code(&out, 5);
}

#[test]
fn fig1_rerun_is_byte_identical_and_schema_stable() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "fig1", "--n", "4", "--methods", "dd,sdd,packed:3", "--s-range", "2..3", "--trials", "3",
        "--seed", "31", "--pack-max-iter", "400", "--pack-restarts", "2", "--out", "f.csv",
    ];
    assert_code(&psdpack(&args, tmp.path()), 0);
    let first = fs::read_to_string(tmp.path().join("f.csv")).unwrap();
    assert_code(&psdpack(&args, tmp.path()), 0);
    let second = fs::read_to_string(tmp.path().join("f.csv")).unwrap();
    assert_eq!(first, second, "rerun with identical seeds must be byte-identical");

    let body: Vec<&str> = first.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "method,n,s,N,trial,error,converged,seconds");
    // dd contributes one natural-s cell, sdd one, packed:3 two (s = 2, 3)
    assert_eq!(body.len(), 1 + 3 * (1 + 1 + 2));
    assert!(body[1].starts_with("dd,4,1,16,0,"));
    // seconds column stays zero without --timestamps
    assert!(body.iter().skip(1).all(|l| l.ends_with(",0.000000")));
}

#[test]
fn fig1_timestamps_flag_adds_wall_clock_data() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "fig1", "--n", "3", "--methods", "dd", "--trials", "2", "--seed", "5",
        "--timestamps", "--out", "t.csv",
    ];
    assert_code(&psdpack(&args, tmp.path()), 0);
    let text = fs::read_to_string(tmp.path().join("t.csv")).unwrap();
    assert!(text.contains("# timestamp: "));
}

#[test]
fn fig2_rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "fig2", "--n-range", "2..3", "--s-range", "2..2", "--trials", "3", "--threshold", "0.01",
        "--tol", "1e-5", "--pack-max-iter", "300", "--pack-restarts", "2", "--cap", "32",
        "--seed", "77", "--out", "g.csv",
    ];
    assert_code(&psdpack(&args, tmp.path()), 0);
    let first = fs::read_to_string(tmp.path().join("g.csv")).unwrap();
    assert_code(&psdpack(&args, tmp.path()), 0);
    let second = fs::read_to_string(tmp.path().join("g.csv")).unwrap();
    assert_eq!(first, second);
    let body: Vec<&str> = first.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "n,s,N_required,capped");
    assert!(body[1].starts_with("2,2,1,"));
}

#[test]
fn fig_config_file_matches_flags() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("cfg.json"),
        r#"{"experiment":"fig1","n":4,"methods":["dd"],"s_range":[1],"trials":2,"seed":31,"out":"from_config.csv"}"#,
    )
    .unwrap();
    assert_code(&psdpack(&["fig1", "--config", "cfg.json"], tmp.path()), 0);
    assert_code(
        &psdpack(
            &["fig1", "--n", "4", "--methods", "dd", "--s-range", "1..1", "--trials", "2", "--seed", "31", "--out", "from_flags.csv"],
            tmp.path(),
        ),
        0,
    );
    let strip = |name: &str| -> String {
        fs::read_to_string(tmp.path().join(name))
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip("from_config.csv"), strip("from_flags.csv"));
}
