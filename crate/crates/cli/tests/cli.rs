use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn cellular(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellular"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap().trim_end().to_string()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

/// Write `gen` output for the given shape to `name`.
fn gen(dir: &Path, ring: &str, shape: &[&str], name: &str) -> PathBuf {
    let mut args = vec!["--ring", ring, "gen"];
    args.extend_from_slice(shape);
    let out = cellular(&args, dir);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let path = dir.join(name);
    std::fs::write(&path, &out.stdout).unwrap();
    path
}

fn fixtures() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    gen(d, "zpsq:2", &["interval", "0", "2"], "E02.json");
    gen(d, "zpsq:2", &["interval", "0", "1"], "E01.json");
    gen(d, "zpsq:2", &["interval", "0", "0"], "E00.json");
    gen(d, "zpsq:2", &["disk", "1"], "D1.json");
    gen(d, "zpsq:2", &["sphere", "1"], "S1.json");
    gen(d, "dual:2", &["sphere", "0"], "S0dual.json");
    std::fs::write(
        d.join("bad.json"),
        r#"{"ring":"zpsq:2","ranks":[1,1,1],"differentials":[[[[1,0]]],[[[1,0]]]]}"#,
    )
    .unwrap();
    dir
}

#[test]
fn cell_holds_with_trace() {
    let dir = fixtures();
    let out = cellular(&["cell", "E02.json", "E01.json"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        r#"{"holds":true,"rule":"lex","minPairA":[0,1],"minPairX":[0,2]}"#
    );
    let out = cellular(&["--output", "explain", "cell", "E02.json", "E01.json"], dir.path());
    assert!(stdout(&out).contains("(0, 1) ≤ min pair of X (0, 2)"));
}

#[test]
fn relation_failure_exits_one() {
    let dir = fixtures();
    assert_eq!(code(&cellular(&["cell", "E00.json", "E01.json"], dir.path())), 1);
    let out = cellular(&["acyclic", "E00.json", "E01.json"], dir.path());
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains(r#""betaA":0,"betaX":0"#));
}

#[test]
fn decompose_disk() {
    let dir = fixtures();
    let out = cellular(&["decompose", "D1.json"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), r#"{"intervals":[],"disks":[[1,1]]}"#);
}

#[test]
fn invalid_input_exits_three() {
    let dir = fixtures();
    let out = cellular(&["validate", "bad.json"], dir.path());
    assert_eq!(code(&out), 3);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("degree 1"));
    // --force loads it, validation still reports the degree
    let out = cellular(&["--force", "validate", "bad.json"], dir.path());
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("degree 1"));
    std::fs::write(
        dir.path().join("range.json"),
        r#"{"ring":"zpsq:2","ranks":[1],"differentials":[],"x":1}"#,
    )
    .unwrap();
    assert_eq!(code(&cellular(&["homology", "range.json"], dir.path())), 3);
}

#[test]
fn usage_errors_exit_two() {
    let dir = fixtures();
    assert_eq!(code(&cellular(&["frobnicate"], dir.path())), 2);
    assert_eq!(
        code(&cellular(&["--ring", "dual:2", "decompose", "D1.json"], dir.path())),
        2
    );
    assert_eq!(code(&cellular(&["sum", "D1.json", "S0dual.json"], dir.path())), 2);
    assert_eq!(code(&cellular(&["gen", "sphere", "0"], dir.path())), 2);
    assert_eq!(
        code(&cellular(&["--ring", "zpsq:2", "gen", "disk", "0"], dir.path())),
        2
    );
    assert_eq!(code(&cellular(&["homology", "missing.json"], dir.path())), 2);
}

#[test]
fn guard_refusal_exits_four() {
    let dir = fixtures();
    let out = cellular(&["--guard", "2", "crosscheck", "E02.json", "E01.json"], dir.path());
    assert_eq!(code(&out), 4);
    assert!(out.stdout.is_empty());
    let out = cellular(&["--seed", "9", "crosscheck", "E02.json", "E01.json"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        r#"[{"pair":["E02.json","E01.json"],"latticeVerdict":true,"oracleVerdict":true,"agree":true,"seed":9}]"#
    );
}

#[test]
fn constructions() {
    let dir = fixtures();
    let d = dir.path();
    let out = cellular(&["--ring", "zpsq:2", "shift", "E01.json", "1"], d);
    assert_eq!(
        stdout(&out),
        r#"{"ring":"zpsq:2","ranks":[0,1,1],"differentials":[[],[[[0,1]]]]}"#
    );
    let out = cellular(&["sum", "E01.json", "D1.json"], d);
    assert_eq!(
        stdout(&out),
        r#"{"ring":"zpsq:2","ranks":[2,2],"differentials":[[[[0,1],[0,0]],[[0,0],[1,0]]]]}"#
    );
    let out = cellular(&["homology", "E01.json"], d);
    assert_eq!(stdout(&out), r#"[{"free":0,"residue":1},{"free":0,"residue":1}]"#);
    let out = cellular(&["tensor", "S1.json", "E01.json"], d);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        stdout(&cellular(&["--ring", "zpsq:2", "shift", "E01.json", "1"], d))
    );
    let out = cellular(&["hom", "E01.json", "E01.json"], d);
    assert!(stdout(&out).starts_with(r#"{"degree0":{"free":1,"residue":1}"#));
    let out = cellular(&["--seed", "4", "extension", "E01.json", "D1.json"], d);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).ends_with(r#""seed":4}"#));
}

#[test]
fn cone_of_chain_map_file() {
    let dir = fixtures();
    // S^0 -> E_{0,1} hitting the generator; its cone is E_{0,2} up to basis.
    let map = r#"{"source":{"ring":"zpsq:2","ranks":[1,1],"differentials":[[[[0,1]]]]},"target":{"ring":"zpsq:2","ranks":[1],"differentials":[]},"mats":[[[[0,1]]],[]]}"#;
    std::fs::write(dir.path().join("f.json"), map).unwrap();
    let out = cellular(&["cone", "f.json"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::write(dir.path().join("cone.json"), &out.stdout).unwrap();
    let out = cellular(&["decompose", "cone.json"], dir.path());
    assert_eq!(code(&out), 0);
    // a non-commuting map is invalid input
    let bad = map.replace(r#""mats":[[[[0,1]]],[]]"#, r#""mats":[[[[1,0]]],[]]"#);
    std::fs::write(dir.path().join("g.json"), bad).unwrap();
    assert_eq!(code(&cellular(&["cone", "g.json"], dir.path())), 3);
}

#[test]
fn generated_complexes_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut emitted = Vec::new();
    for ring in ["zpsq:2", "zpsq:3", "dual:2", "dual:5"] {
        for shape in [vec!["interval", "1", "2"], vec!["sphere", "2"], vec!["disk", "3"]] {
            let mut args = vec!["--ring", ring, "gen"];
            args.extend(shape);
            emitted.push(stdout(&cellular(&args, d)));
        }
        for seed in 0..5 {
            let seed = seed.to_string();
            for extra in [None, Some("--allow-units")] {
                let mut args = vec![
                    "--ring",
                    ring,
                    "--seed",
                    &seed,
                    "rand",
                    "--max-degree",
                    "3",
                    "--max-rank",
                    "3",
                ];
                args.extend(extra);
                let out = cellular(&args, d);
                assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
                emitted.push(stdout(&out));
            }
        }
    }
    for (k, text) in emitted.iter().enumerate() {
        let path = d.join(format!("c{k}.json"));
        std::fs::write(&path, text).unwrap();
        let out = cellular(&["shift", path.to_str().unwrap(), "0"], d);
        assert_eq!(code(&out), 0);
        assert_eq!(&stdout(&out), text, "re-serialization differs");
    }
}

#[test]
fn rand_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--ring",
        "dual:3",
        "--seed",
        "17",
        "rand",
        "--max-degree",
        "4",
        "--max-rank",
        "3",
    ];
    let a = stdout(&cellular(&args, dir.path()));
    let b = stdout(&cellular(&args, dir.path()));
    assert_eq!(a, b);
}
