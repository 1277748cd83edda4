use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use spg_core::rational::rat;
use spg_core::{
    example_pe, induced_mc, mc_parity_value, parse_game, parse_strategy, random_game, random_game_with_sinks,
    serialize_game, GenSpec, Player,
};
use tempfile::TempDir;

fn spg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spg")).args(args).output().unwrap()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = path(dir, name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn solve_pe_prints_exact_and_decimal() {
    let o = spg(&["solve", &fixture("pe.mpg")]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("v0 = 19/20 (0.9500000000)\n"), "{out}");
    assert!(out.contains("v0.55 = 11/20 (0.5500000000)\n"));
    assert!(out.contains("vl = 0 (0.0000000000)\n"));
}

#[test]
fn solve_writes_strategies_and_values() {
    let dir = TempDir::new().unwrap();
    let (s0, s1, vals) = (path(&dir, "f0.txt"), path(&dir, "f1.txt"), path(&dir, "v.json"));
    let o = spg(&[
        "solve",
        &fixture("pe.mpg"),
        "--strategy-out",
        &s0,
        "--strategy1-out",
        &s1,
        "--values-out",
        &vals,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&s0).unwrap(), "0 1\n");
    assert_eq!(std::fs::read_to_string(&s1).unwrap(), "1 3\n");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&vals).unwrap()).unwrap();
    assert_eq!(json["values"][0]["exact"], "19/20");
    assert_eq!(json["values"][0]["decimal"], "0.9500000000");
    assert_eq!(json["values"][0]["name"], "v0");
}

#[test]
fn engines_agree_on_px() {
    let outputs: Vec<String> = ["main", "oracle", "brute"]
        .iter()
        .map(|e| {
            let o = spg(&["solve", &fixture("px.mpg"), "--engine", e]);
            assert!(o.status.success(), "{e}: {}", stderr(&o));
            stdout(&o)
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    assert!(outputs[0].contains("v2 = 1/2 (0.5000000000)"));
}

#[test]
fn trace_shows_the_walkthrough() {
    let o = spg(&["solve", &fixture("px.mpg"), "--trace"]);
    let out = stdout(&o);
    assert!(out.contains("# init[0] winning {vw}"), "{out}");
    assert!(out.contains("# init[1] winning {v2, v3}"));
    assert!(out.contains("# iter 1 neutral winning"));
    assert!(out.contains("update [v0->v1]"));
    assert!(out.contains("# iter 2 terminate"));
}

#[test]
fn verify_pe_succeeds() {
    let o = spg(&["verify", &fixture("pe.mpg")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("ok: main agrees with brute, oracle"));
}

#[test]
fn bad_distribution_exits_3() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "broken.mpg",
        "mpg parity\nvertex 0 r 0\nvertex 1 r 1\nedge 0 0 1/2\nedge 0 1 51/100\nedge 1 1 1/1\n",
    );
    let o = spg(&["solve", &f]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("sums to 101/100"), "{err}");
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn weight_on_controlled_edge_names_line() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "w.mpg",
        "mpg parity\nvertex 0 0 0\nvertex 1 r 0\nedge 0 1 1/2\nedge 1 1 1/1\n",
    );
    let o = spg(&["solve", &f]);
    assert_eq!(o.status.code(), Some(3));
    assert!(
        stderr(&o).contains("line 4: controlled vertex 0 carries an edge weight"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn parse_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.mpg", "mpg parity\nvertex 0 q 0\n");
    let o = spg(&["solve", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(spg(&[]).status.code(), Some(1));
    assert_eq!(spg(&["solve"]).status.code(), Some(1));
    assert_eq!(spg(&["solve", "/nonexistent/game.mpg"]).status.code(), Some(1));
    assert_eq!(spg(&["--help"]).status.code(), Some(0));
}

#[test]
fn zero_timeout_exits_4() {
    let o = spg(&["solve", &fixture("pe.mpg"), "--timeout", "0s"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn evaluate_against_matches_markov_chain_value() {
    let dir = TempDir::new().unwrap();
    let f0 = write(&dir, "f0.txt", "0 2\n");
    let f1 = write(&dir, "f1.txt", "1 0\n");
    let o = spg(&["evaluate", &fixture("pe.mpg"), "--strategy", &f0, "--against", &f1]);
    assert!(o.status.success(), "{}", stderr(&o));
    let g = example_pe();
    let s0 = parse_strategy("0 2\n", &g, Player::P0).unwrap();
    let s1 = parse_strategy("1 0\n", &g, Player::P1).unwrap();
    let x = mc_parity_value(&induced_mc(&g, &s0, &s1).unwrap()).unwrap();
    assert_eq!(x[0], rat(11, 20));
    assert!(stdout(&o).contains("v0 = 11/20 (0.5500000000)"));

    // Against a best response, and with the Player 1 strategy on its own.
    let o = spg(&[
        "evaluate",
        &fixture("pe.mpg"),
        "--strategy",
        &write(&dir, "g.txt", "0 1\n"),
    ]);
    assert!(stdout(&o).contains("v0 = 19/20"));
    // If Player 1 always returns to v0, Player 0 cycles at priority 0 and wins.
    let o = spg(&["evaluate", &fixture("pe.mpg"), "--strategy", &f1]);
    assert!(stdout(&o).contains("v1 = 1 (1.0000000000)"), "{}", stdout(&o));
}

#[test]
fn evaluate_rejects_non_edges() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.txt", "0 4\n");
    let o = spg(&["evaluate", &fixture("pe.mpg"), "--strategy", &f, "--player", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not an edge"));
}

#[test]
fn reduce_writes_a_reach_game() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "gadget.mpg");
    let o = spg(&["reduce", &fixture("pe.mpg"), "--delta", "1/10", "-o", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let g = parse_game(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(g.num_vertices(), 14);
    assert_eq!(g.target().unwrap().to_vec(), vec![12]);
    let o = spg(&["solve", &out]);
    assert!(o.status.success());
    assert_eq!(
        spg(&["reduce", &fixture("pe.mpg"), "--delta", "2", "-o", &out])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn generate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "spec.json",
        r#"{"seed":1,"n_vertices":5,"owner_mix":["1/3","1/3","1/3"],"max_out_degree":3,"n_priorities":4,"weight_denominator_bound":4}"#,
    );
    let (a, b) = (path(&dir, "a.mpg"), path(&dir, "b.mpg"));
    assert!(spg(&["generate", "--spec", &spec, "-o", &a]).status.success());
    assert!(spg(&["generate", "--spec", &spec, "-o", &b]).status.success());
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert_eq!(
        String::from_utf8(ta).unwrap(),
        serialize_game(&random_game(&GenSpec::small(1, 5)).unwrap())
    );
}

#[test]
fn generate_battlefield_and_examples() {
    let o = spg(&["generate", "--battlefield", "7,0,1/2,reach_zone1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let g = parse_game(&stdout(&o)).unwrap();
    assert_eq!(g.name(0), Some("start"));
    let o = spg(&["generate", "--example", "px"]);
    assert!(stdout(&o).starts_with("mpg parity\n"));
    assert_eq!(
        spg(&["generate", "--battlefield", "5,0,1/2,reach_zone1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        spg(&["generate", "--example", "pe", "--battlefield", "7,0,1/2,reach_zone1"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn bench_writes_csv_and_jsonl() {
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    std::fs::copy(fixture("pe.mpg"), corpus.join("pe.mpg")).unwrap();
    std::fs::copy(fixture("px.mpg"), corpus.join("px.mpg")).unwrap();
    let (csv, jsonl) = (path(&dir, "r.csv"), path(&dir, "r.jsonl"));
    let o = spg(&[
        "bench",
        "--dir",
        &corpus.to_string_lossy(),
        "--solvers",
        "main,oracle,brute",
        "--timeout",
        "60s",
        "-o",
        &csv,
        "--jsonl",
        &jsonl,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "game,solver,vertices,colours,p_max_exact,p_max_decimal,t_sol_ms,iterations,status"
    );
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("pe,main,6,2,19/20,0.9500000000,"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",ok")));
    assert_eq!(std::fs::read_to_string(&jsonl).unwrap().lines().count(), 6);
}

fn verify_corpus(dir: &Path) -> Vec<String> {
    (0..500u64)
        .map(|seed| {
            let g = if seed % 2 == 0 {
                random_game(&GenSpec::small(seed, 1 + (seed / 2 % 7) as usize)).unwrap()
            } else {
                random_game_with_sinks(&GenSpec::small(seed, 3 + (seed % 5) as usize)).unwrap()
            };
            let p = dir.join(format!("g{seed}.mpg"));
            std::fs::write(&p, serialize_game(&g)).unwrap();
            p.to_string_lossy().into_owned()
        })
        .collect()
}

#[test]
fn verify_accepts_500_random_games() {
    let dir = TempDir::new().unwrap();
    let failures: Vec<String> = verify_corpus(dir.path())
        .iter()
        .filter_map(|f| {
            let o = spg(&["verify", f]);
            (o.status.code() != Some(0)).then(|| format!("{f}: {}", stderr(&o)))
        })
        .collect();
    assert!(failures.is_empty(), "{failures:?}");
}
