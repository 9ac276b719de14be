mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::{rng, zoo_text, ZooShape};
use tempfile::TempDir;

fn greenroute(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_greenroute"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

struct Files {
    dir: TempDir,
    graph: PathBuf,
    demands: Vec<PathBuf>,
}

fn write_instance(vertices: usize, matrices: usize) -> Files {
    let dir = tempfile::tempdir().unwrap();
    let text = zoo_text(
        &mut rng(11),
        &ZooShape {
            vertices,
            chords: 1,
            matrices,
            pairs: Some(3),
        },
    );
    let graph = dir.path().join("net.graph");
    fs::write(&graph, &text.graph).unwrap();
    let demands = text
        .demands
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let p = dir.path().join(format!("net.{k}.demands"));
            fs::write(&p, d).unwrap();
            p
        })
        .collect();
    Files {
        dir,
        graph,
        demands,
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn instance_args(f: &Files) -> Vec<&str> {
    let mut args = vec!["--graph", s(&f.graph), "--demands"];
    args.extend(f.demands.iter().map(|p| s(p)));
    args
}

#[test]
fn solve_then_evaluate_round_trips_the_activation() {
    let f = write_instance(5, 2);
    let act = f.dir.path().join("act.csv");
    let mut args = vec![
        "solve",
        "--algorithm",
        "mspnd",
        "--mu",
        "2",
        "--out",
        s(&act),
    ];
    args.extend(instance_args(&f));
    let out = greenroute(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = stdout(&out);
    let mut lines = report.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("instance,matrix,algorithm"));
    let row = lines.next().unwrap();
    assert!(
        row.contains(",mspnd,") && row.contains(",optimal,"),
        "{row}"
    );
    assert!(fs::read_to_string(&act)
        .unwrap()
        .starts_with("arc_id,chi\n"));

    let mut args = vec!["evaluate", "--mu", "2", "--activation", s(&act)];
    args.extend(instance_args(&f));
    let out = greenroute(&args);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "matrix,mlu");
    assert_eq!(lines.len(), 3);
    let first: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!(first <= 1.0);
}

#[test]
fn solve_emits_json_on_request() {
    let f = write_instance(4, 1);
    let mut args = vec![
        "solve",
        "--algorithm",
        "mcf++",
        "--rho",
        "0.3",
        "--format",
        "json",
    ];
    args.extend(instance_args(&f));
    let out = greenroute(&args);
    assert!(out.status.success());
    let rows = workbench::report::parse_json_report(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].matrix, "all");
    assert_eq!(rows[0].rho, "0.300000");
}

#[test]
fn oracle_agrees_with_the_exact_solver() {
    let f = write_instance(4, 1);
    let act = f.dir.path().join("oracle.csv");
    let mut args = vec!["oracle", "--out", s(&act)];
    args.extend(instance_args(&f));
    let out = greenroute(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let oracle_total: u32 = fs::read_to_string(&act)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<u32>().unwrap())
        .sum();

    let mut args = vec!["solve", "--algorithm", "mspnd"];
    args.extend(instance_args(&f));
    let text = stdout(&greenroute(&args));
    let row = text.lines().nth(1).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let col = header
        .iter()
        .position(|h| *h == "active_connections")
        .unwrap();
    let solved: u32 = row.split(',').nth(col).unwrap().parse().unwrap();
    assert_eq!(solved, oracle_total);
}

#[test]
fn bench_runs_a_config_file() {
    let f = write_instance(5, 2);
    let config = f.dir.path().join("bench.toml");
    fs::write(
        &config,
        r#"algorithms = ["mspnd", "f-mspnd", "mcps", "mcf", "mcf++"]
rho = [0.5]
mu = [1, 2]
modes = ["simplex", "duplex"]
time_limit = 60
lengths = "invcap"

[[instances]]
id = "ring"
graph = "net.graph"
demands = ["net.0.demands", "net.1.demands"]
"#,
    )
    .unwrap();
    let report = f.dir.path().join("report.csv");
    let out = greenroute(&["bench", s(&config), "--out", s(&report)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&report).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 2 * (2 * 2 + 3));
    assert!(!text.contains(",error,"));
}

#[test]
fn a_bad_config_exits_with_status_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(
        &config,
        "algorithms = [\"mspnd\"]\nrho = [1.5]\nmu = [1]\nmodes = [\"simplex\"]\ntime_limit = 1\n",
    )
    .unwrap();
    let out = greenroute(&["bench", s(&config)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn a_missing_graph_file_exits_with_status_one() {
    let out = greenroute(&[
        "solve",
        "--algorithm",
        "mcf",
        "--graph",
        "/nonexistent/g",
        "--demands",
        "/nonexistent/d",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
