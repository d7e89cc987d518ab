use std::path::Path;
use std::process::{Command, Output};

fn raagham(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raagham")).current_dir(dir).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const P3: &str = "vertices 3\na b c\nedge a b\nedge b c\n";
const K5: &str = "vertices 5\na b c d e\nedge a b\nedge a c\nedge a d\nedge a e\nedge b c\nedge b d\nedge b e\nedge c d\nedge c e\nedge d e\n";

#[test]
fn normal_form_and_word_equality() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "g.txt", P3);
    write(dir.path(), "w.txt", "a b a^-1 c a b^-1\n");
    let out = raagham(dir.path(), &["normal-form", "--graph", "g.txt", "--word", "w.txt"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "a b c b^-1\n");

    write(dir.path(), "x.txt", "c a\n");
    write(dir.path(), "y.txt", "a c\n");
    let out = raagham(dir.path(), &["word-eq", "--graph", "g.txt", "--word", "x.txt", "--word", "y.txt"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["equal"], true);
}

#[test]
fn double_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "g.txt", P3);
    let out = raagham(dir.path(), &["double", "--graph", "g.txt", "--out", "d"]);
    assert!(out.status.success());
    for f in ["double.txt", "double_projection.txt", "diagonal.txt"] {
        assert!(dir.path().join("d").join(f).exists(), "{f}");
    }
    let text = std::fs::read_to_string(dir.path().join("d/double.txt")).unwrap();
    assert!(text.starts_with("vertices 6"));
}

#[test]
fn k5_emulator_files_revalidate() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "k5.txt", K5);
    let out = raagham(dir.path(), &["emulator", "--graph", "k5.txt", "--max-sheets", "2", "--out", "em"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = raagham(
        dir.path(),
        &["check-cover", "--graph", "k5.txt", "--cover", "em/cover.txt", "--map", "em/projection.txt"],
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["orbicover"], true);
    assert_eq!(v["cover_planar"], true);
}

#[test]
fn certificate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let mut torus = String::from("vertices 9\nv0 v1 v2 v3 v4 v5 v6 v7 v8\n");
    for i in 0..3 {
        for j in 0..3 {
            let v = 3 * i + j;
            for (di, dj) in [(0, 1), (1, 0), (1, 1)] {
                let w = 3 * ((i + di) % 3) + (j + dj) % 3;
                torus.push_str(&format!("edge v{v} v{w}\n"));
            }
        }
    }
    write(dir.path(), "t.txt", &torus);
    write(dir.path(), "k5.txt", K5);
    assert_eq!(raagham(dir.path(), &["certificate", "--graph", "t.txt"]).status.code(), Some(0));
    assert_eq!(raagham(dir.path(), &["certificate", "--graph", "k5.txt"]).status.code(), Some(1));
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "g.txt", P3);
    assert_eq!(raagham(dir.path(), &["verify", "--graph", "g.txt", "--N", "1"]).status.code(), Some(2));
    assert_eq!(raagham(dir.path(), &["verify", "--graph", "missing.txt"]).status.code(), Some(2));
    write(dir.path(), "bad.txt", "vertices two\n");
    assert_eq!(raagham(dir.path(), &["build-config", "--graph", "bad.txt"]).status.code(), Some(2));
    write(dir.path(), "cfg.json", "{\"tol\": -1.0}");
    assert_eq!(raagham(dir.path(), &["smooth-study", "--config", "cfg.json"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "g.txt", P3);
    for out in ["a", "b"] {
        let o = raagham(dir.path(), &["verify", "--graph", "g.txt", "--N", "2", "--seed", "7", "--out", out]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(dir.path().join("a/verification.json")).unwrap();
    let b = std::fs::read(dir.path().join("b/verification.json")).unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["non_edges"].as_array().unwrap().len(), 1);
    assert_eq!(v["edges"].as_array().unwrap().len(), 2);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "cfg.json", "{\"eps\": [0.1, 0.01], \"depth\": 2}");
    let out = raagham(dir.path(), &["smooth-study", "--config", "cfg.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    // Flags win over the file.
    let out = raagham(dir.path(), &["smooth-study", "--config", "cfg.json", "--eps", "0.1,0.01,0.001"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);
}

#[test]
fn probe_and_simulate_write_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "g.txt", P3);
    write(dir.path(), "w.txt", "a b\n");
    let out = raagham(dir.path(), &["probe-faithful", "--graph", "g.txt", "--depth", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["verdict"] == "NONTRIVIAL"));
    let out = raagham(dir.path(), &["simulate", "--graph", "g.txt", "--word", "w.txt", "--steps", "3", "--out", "s"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("s/orbits.csv")).unwrap();
    assert!(csv.starts_with("point,iteration,x,y\n"));
    assert!(dir.path().join("s/orbits.svg").exists());
}

#[test]
fn threads_variable_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_raagham"))
        .current_dir(dir.path())
        .env("RAAGHAM_THREADS", "many")
        .args(["smooth-study"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
