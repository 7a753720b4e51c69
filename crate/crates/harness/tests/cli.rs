use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn varbonus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varbonus")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(body: &str, key: &str) -> Option<String> {
    body.lines().find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
}

#[test]
fn chain_run_prints_summary_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results/chain");
    let o = varbonus(&["chain", "--agent", "oracle", "--runs", "4", "--horizon", "50", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    assert_eq!(field(&text, "count").as_deref(), Some("4"));
    assert_eq!(field(&text, "agent").as_deref(), Some("oracle"));
    let csv = fs::read_to_string(out.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("run,return,length,terminated,planning_events"));
    assert!(Path::new(&out.with_extension("summary")).exists());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# tiny wumpus run\nbenchmark = wumpus\nagent = inverse_sqrt\nbeta = 0.5\nruns = 3\nseed = 11\n").unwrap();
    let o = varbonus(&["wumpus", "--config", cfg.to_str().unwrap(), "--runs", "2", "--jobs", "1"]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    assert_eq!(field(&text, "count").as_deref(), Some("2"));
    assert_eq!(field(&text, "agent").as_deref(), Some("inverse-sqrt"));
    assert_eq!(field(&text, "beta").as_deref(), Some("0.5"));
    assert_eq!(field(&text, "seed").as_deref(), Some("11"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = dir.path().join("bad.cfg");
    fs::write(&bad_key, "agnet = mean\n").unwrap();
    let wrong_bench = dir.path().join("wumpus.cfg");
    fs::write(&wrong_bench, "benchmark = wumpus\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["chain", "--gamma", "1.5"],
        vec!["chain", "--agent", "greedy"],
        vec!["chain", "--prior", "default"],
        vec!["wumpus", "--prior", "tied"],
        vec!["chain", "--config", bad_key.to_str().unwrap()],
        vec!["chain", "--config", wrong_bench.to_str().unwrap()],
        vec!["chain", "--config", "/nonexistent/run.cfg"],
        vec!["chain", "--runs", "0"],
        vec!["chain", "--set", "alpha"],
        vec!["sweep", "--agent", "variance"],
        vec!["sweep", "--benchmark", "chain", "--grid", "1,x"],
        vec!["chain", "--unknown-flag"],
    ];
    for args in cases {
        let o = varbonus(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn sweep_writes_table_and_gnuplot_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let o = varbonus(&[
        "sweep", "--benchmark", "wumpus", "--agent", "variance", "--grid", "0,0.24", "--runs", "6", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    let csv = fs::read_to_string(out.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert_eq!(csv.lines().filter(|l| l.ends_with(",true")).count(), 1);
    let dat = fs::read_to_string(out.with_extension("dat")).unwrap();
    assert_eq!(dat.lines().filter(|l| !l.starts_with('#')).count(), 2);
    let summary = fs::read_to_string(out.with_extension("summary")).unwrap();
    assert!(field(&summary, "selected_coefficient").is_some());
}

#[test]
fn trace_then_replay() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("trace.log");
    let o = varbonus(&["wumpus", "--agent", "variance", "--beta-p", "0.24", "--runs", "3", "--trace", log.to_str().unwrap(), "--trace-run", "2"]);
    assert!(o.status.success(), "{o:?}");
    let body = fs::read_to_string(&log).unwrap();
    assert!(body.starts_with("# varbonus trajectory benchmark=wumpus"));
    let r = varbonus(&["replay", log.to_str().unwrap()]);
    assert!(r.status.success());
    let text = stdout(&r);
    assert!(text.contains("cave") && text.contains("return="));
    fs::write(&log, body.replace("forward", "jump")).unwrap();
    assert_eq!(varbonus(&["replay", log.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bounds_report_lists_every_pair() {
    let o = varbonus(&["bounds", "--prior", "full", "--trials", "3", "--cap", "50"]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("node=")).count(), 10);
    assert!(text.contains("up to constants"));
    let w = varbonus(&["bounds", "--benchmark", "wumpus", "--trials", "3"]);
    assert!(w.status.success());
    assert_eq!(stdout(&w).lines().filter(|l| l.starts_with("(0,0,")).count(), 16);
}
