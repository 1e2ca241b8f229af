use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_gridnav");

fn gridnav(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("GRIDNAV_OUTPUT_ROOT")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = gridnav(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_small_map(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("small.map");
    fs::write(
        &path,
        "6 6\n......\n.S....\n......\n..##..\n....E.\n......\n",
    )
    .unwrap();
    path
}

#[test]
fn train_is_deterministic_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let map = write_small_map(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        ok(&[
            "train",
            "--map",
            s(&map),
            "--out",
            s(out),
            "--steps",
            "1200",
            "--seed",
            "7",
            "--warmup",
            "100",
        ]);
    }
    for f in ["checkpoint.bin", "episodes.csv"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let csv = fs::read_to_string(a.join("episodes.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "episode,steps,total_reward,avg_reward_per_step,termination,epsilon"
    );
    let manifest = fs::read_to_string(a.join("manifest.toml")).unwrap();
    assert!(manifest.contains("seed = 7"));
    assert!(manifest.contains("map_sha256 = "));
    assert!(manifest.contains("total_train_steps = 1200"));
}

#[test]
fn manifest_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let map = write_small_map(dir.path());
    let a = dir.path().join("a");
    ok(&[
        "train",
        "--map",
        s(&map),
        "--out",
        s(&a),
        "--steps",
        "900",
        "--seed",
        "3",
        "--warmup",
        "64",
        "--lr",
        "0.005",
    ]);
    let b = dir.path().join("b");
    let manifest = a.join("manifest.toml");
    ok(&[
        "train",
        "--map",
        s(&map),
        "--out",
        s(&b),
        "--config",
        s(&manifest),
    ]);
    assert_eq!(
        fs::read(a.join("checkpoint.bin")).unwrap(),
        fs::read(b.join("checkpoint.bin")).unwrap()
    );
}

#[test]
fn baseline_flag_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let map = write_small_map(dir.path());
    let out = dir.path().join("base");
    ok(&[
        "train",
        "--map",
        s(&map),
        "--out",
        s(&out),
        "--steps",
        "300",
        "--baseline",
    ]);
    let manifest = fs::read_to_string(out.join("manifest.toml")).unwrap();
    assert!(manifest.contains("use_random_init = false"));
    assert!(manifest.contains("use_shaped_reward = false"));
}

#[test]
fn output_root_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let map = write_small_map(dir.path());
    let out = Command::new(BIN)
        .args(["train", "--map", s(&map), "--steps", "200", "--seed", "4"])
        .env("GRIDNAV_OUTPUT_ROOT", dir.path().join("root"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("root/train-seed4/checkpoint.bin").exists());
}

#[test]
fn missing_map_and_bad_config_exit_codes() {
    let out = gridnav(&["train", "--map", "/nonexistent/x.map", "--steps", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
    let out = gridnav(&["train", "--steps", "10", "--gamma", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = gridnav(&["eval", "--checkpoint", "/nonexistent/c.bin"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn eval_modes_produce_summary_rows() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    ok(&[
        "train",
        "--out",
        s(&run),
        "--steps",
        "600",
        "--warmup",
        "100",
    ]);
    let ckpt = run.join("checkpoint.bin");

    let all = ok(&["eval", "--checkpoint", s(&ckpt), "--mode", "all-starts"]);
    let lines: Vec<&str> = all.lines().collect();
    assert_eq!(
        lines[0],
        "split,attempted,succeeded,success_rate,mean_path_ratio"
    );
    let reachable = gridnav::gridworld::canonical_map()
        .reachable_positions()
        .len();
    assert!(lines[1].starts_with(&format!("all-starts,{reachable},")));

    let fixed = dir.path().join("fixed.csv");
    let path = dir.path().join("path.txt");
    ok(&[
        "eval",
        "--checkpoint",
        s(&ckpt),
        "--out",
        s(&fixed),
        "--path-out",
        s(&path),
    ]);
    assert!(fs::read_to_string(&fixed)
        .unwrap()
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("fixed,1,"));
    assert!(fs::read_to_string(&path).unwrap().contains("termination="));

    let corpus = dir.path().join("corpus");
    ok(&[
        "gen-corpus",
        "--out",
        s(&corpus),
        "--count",
        "5",
        "--train-count",
        "2",
        "--seed",
        "1",
    ]);
    let rows = ok(&[
        "eval",
        "--checkpoint",
        s(&ckpt),
        "--mode",
        "corpus",
        "--corpus",
        s(&corpus),
    ]);
    let rows: Vec<&str> = rows.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("train,2,"));
    assert!(rows[2].starts_with("test,3,"));

    let out = gridnav(&["eval", "--checkpoint", s(&ckpt), "--mode", "corpus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plan_outputs_and_no_path_code() {
    let a = ok(&["plan", "--algo", "astar"]);
    let d = ok(&["plan", "--algo", "dijkstra"]);
    let len = |t: &str| {
        let last = t.lines().last().unwrap();
        last.split_whitespace()
            .next()
            .unwrap()
            .trim_start_matches("length=")
            .parse::<f64>()
            .unwrap()
    };
    assert!((len(&a) - len(&d)).abs() < 1e-9);
    assert_eq!(
        ok(&["plan", "--algo", "rrt", "--seed", "3"]),
        ok(&["plan", "--algo", "rrt", "--seed", "3"])
    );

    let dir = tempfile::tempdir().unwrap();
    let sealed = dir.path().join("sealed.map");
    fs::write(&sealed, "4 3\nS.#E\n..##\n....\n").unwrap();
    let out = gridnav(&["plan", "--map", s(&sealed)]);
    assert_eq!(out.status.code(), Some(4));
    let out = gridnav(&[
        "plan",
        "--map",
        s(&sealed),
        "--algo",
        "rrt",
        "--max-samples",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn render_map_path_and_curves() {
    let svg = ok(&["render"]);
    assert_eq!(svg.matches("<rect").count(), 400);

    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.txt");
    ok(&["plan", "--out", s(&plan)]);
    let cells = fs::read_to_string(&plan).unwrap().lines().count() - 1;
    let svg = ok(&["render", "--path", s(&plan)]);
    let poly = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
    assert_eq!(poly.split('"').nth(1).unwrap().split(' ').count(), cells);

    let run = dir.path().join("run");
    ok(&[
        "train",
        "--out",
        s(&run),
        "--steps",
        "400",
        "--warmup",
        "100",
    ]);
    let curve = run.join("episodes.csv");
    let svg = ok(&[
        "render",
        "--curve",
        s(&curve),
        "--metric",
        "total_reward",
        "--metric",
        "steps",
    ]);
    assert_eq!(svg.matches("<polyline").count(), 2);
    let out = gridnav(&["render", "--curve", s(&curve), "--metric", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_corpus_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        ok(&[
            "gen-corpus",
            "--out",
            s(out),
            "--count",
            "12",
            "--train-count",
            "4",
            "--seed",
            "11",
            "--min",
            "1",
            "--max",
            "5",
        ]);
    }
    let list = |d: &Path, split: &str| {
        let mut v: Vec<_> = fs::read_dir(d.join(split))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        v.sort();
        v
    };
    assert_eq!(list(&a, "train").len(), 4);
    assert_eq!(list(&a, "test").len(), 8);
    for split in ["train", "test"] {
        for (x, y) in list(&a, split).iter().zip(list(&b, split)) {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
        }
    }
    assert_eq!(
        fs::read(a.join("manifest.toml")).unwrap(),
        fs::read(b.join("manifest.toml")).unwrap()
    );
}
