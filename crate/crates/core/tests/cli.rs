use std::path::Path;

use hyposel::cli::run;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn hyposel(args: &[&str]) -> Out {
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let argv = std::iter::once("hyposel").chain(args.iter().copied());
    let code = run(argv, &mut stdout, &mut stderr);
    Out {
        code,
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn value(out: &str, key: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("no row {key} in {out}"))
        .to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn bounds_rows() {
    let out = hyposel(&[
        "bounds", "--n", "18", "--delta", "0.01", "--gamma", "0.1", "--gamma0", "0.1", "--c", "2",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(value(&out.stdout, "t_bs"), "6551");
    let out = hyposel(&["bounds", "--gamma", "0.1", "--gamma0", "0.1", "--c", "4"]);
    assert_eq!(value(&out.stdout, "t_bs"), "3276");
    assert_eq!(value(&out.stdout, "as_warmup"), "215");
    for key in [
        "b_cs_full",
        "b_cs_simple",
        "threshold_b",
        "t_cs_avg",
        "t_as_worst",
        "t_as_empirical",
    ] {
        value(&out.stdout, key);
    }
}

#[test]
fn bounds_missing_flag() {
    let out = hyposel(&["bounds", "--gamma", "0.1"]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("--gamma0"));
}

#[test]
fn bounds_invalid_value_names_flag() {
    let out = hyposel(&[
        "bounds", "--gamma", "0.1", "--gamma0", "0.1", "--delta", "1.5",
    ]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--delta"), "{}", out.stderr);
    assert!(out.stdout.is_empty());
}

#[test]
fn simulate_batch_consumes_formula_size() {
    let out = hyposel(&[
        "simulate", "--algo", "bs", "--gamma", "0.05", "--gamma0", "0.2", "--c", "4", "--runs", "5",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let mut lines = out.stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "trial,seed,chosen,steps,mistake,final_eps,ratio"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 7);
    for r in &rows[..5] {
        assert_eq!(r[3], "13102");
    }
    assert_eq!(rows[5][0], "mean");
    assert_eq!(rows[6][0], "stddev");
    assert!(rows.iter().all(|r| r.len() == 7));
}

#[test]
fn simulate_validation_and_io_errors() {
    assert_eq!(
        hyposel(&["simulate", "--algo", "as", "--gamma0", "0.2", "--runs", "0"]).code,
        2
    );
    assert_eq!(hyposel(&["simulate", "--algo", "as"]).code, 2);
    assert_eq!(
        hyposel(&["simulate", "--algo", "xx", "--gamma0", "0.2"]).code,
        2
    );
    let out = hyposel(&[
        "simulate",
        "--algo",
        "as",
        "--gamma0",
        "0.2",
        "--runs",
        "1",
        "--csv",
        "/nonexistent-dir/out.csv",
    ]);
    assert_eq!(out.code, 3);
}

#[test]
fn simulate_to_file_and_config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "exp.toml",
        "algo = \"cs\"\ngamma0 = 0.2\nruns = 3\nseed = 11\ndec = \"fixed\"\n",
    );
    let csv = dir.path().join("out.csv");
    let out = hyposel(&[
        "simulate",
        "--config",
        &cfg,
        "--runs",
        "2",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    // Two trials from the flag override plus header and footer.
    assert_eq!(text.lines().count(), 5);
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(
        first[1],
        hyposel::experiments::trial_seed(11, 0).to_string()
    );
    assert!(!first[6].is_empty());

    let bad = write(dir.path(), "bad.toml", "algo = \"cs\"\nbogus = 1\n");
    assert_eq!(hyposel(&["simulate", "--config", &bad]).code, 2);
    let missing = dir.path().join("none.toml");
    assert_eq!(
        hyposel(&["simulate", "--config", missing.to_str().unwrap()]).code,
        3
    );
}

#[test]
fn sweep_rows_and_columns() {
    let out = hyposel(&[
        "sweep", "--param", "gamma", "--gamma0", "0.2", "--from", "0.1", "--to", "0.2", "--step",
        "0.05", "--runs", "3", "--algos", "as,bs,cs",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let mut lines = out.stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "param,algo,mean_steps,stddev,error_rate,mean_final_eps,mean_ratio"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    let params: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(params.windows(2).all(|w| w[0] <= w[1]));
    let as_steps: Vec<&str> = rows.iter().filter(|r| r[1] == "as").map(|r| r[2]).collect();
    assert!(as_steps.iter().all(|s| *s == as_steps[0]));
    for r in &rows {
        assert_eq!(r.len(), 7);
        assert!(!r[2].is_empty() && !r[3].is_empty() && !r[4].is_empty());
        assert_eq!(r[5].is_empty(), r[1] != "as");
        assert_eq!(r[6].is_empty(), r[1] != "cs");
    }
}

#[test]
fn sweep_single_point_matches_simulate() {
    let sweep = hyposel(&[
        "sweep", "--from", "0.15", "--to", "0.15", "--algos", "cs", "--runs", "4", "--seed", "3",
    ]);
    let sim = hyposel(&[
        "simulate", "--algo", "cs", "--gamma0", "0.15", "--runs", "4", "--seed", "3",
    ]);
    let row: Vec<&str> = sweep.stdout.lines().nth(1).unwrap().split(',').collect();
    let mean: Vec<&str> = sim
        .stdout
        .lines()
        .find(|l| l.starts_with("mean,"))
        .unwrap()
        .split(',')
        .collect();
    let sd: Vec<&str> = sim
        .stdout
        .lines()
        .find(|l| l.starts_with("stddev,"))
        .unwrap()
        .split(',')
        .collect();
    assert_eq!(row[2], mean[3]);
    assert_eq!(row[3], sd[3]);
    assert_eq!(row[4], mean[4]);
    assert_eq!(row[6], mean[6]);
}

#[test]
fn sweep_rejects_gamma_above_gamma0() {
    let out = hyposel(&[
        "sweep", "--param", "gamma", "--gamma0", "0.1", "--from", "0.05", "--to", "0.2", "--runs",
        "2",
    ]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn calibrate_trace() {
    let out = hyposel(&[
        "calibrate",
        "--algo",
        "as",
        "--gamma0",
        "0.25",
        "--runs",
        "10",
        "--c-max",
        "6",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let mut lines = out.stdout.lines();
    let safe: f64 = lines
        .next()
        .unwrap()
        .strip_prefix("safe_c=")
        .unwrap()
        .parse()
        .unwrap();
    assert!(safe >= 4.0);
    assert_eq!(lines.next().unwrap(), "c,mistakes");
    let trace: Vec<(f64, u32)> = lines
        .map(|l| {
            let (c, m) = l.split_once(',').unwrap();
            (c.parse().unwrap(), m.parse().unwrap())
        })
        .collect();
    assert_eq!(trace[0].0, 2.0);
    // Mistakes never decrease as the constant grows.
    assert!(trace
        .windows(2)
        .all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));
}

#[test]
fn calibrate_failure_exit_code() {
    // A tiny margin with a huge constant stops far too early.
    let out = hyposel(&[
        "calibrate",
        "--algo",
        "bs",
        "--gamma0",
        "0.02",
        "--runs",
        "10",
        "--c-min",
        "400",
        "--c-max",
        "400",
    ]);
    assert_eq!(out.code, 4, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.starts_with("safe_c=none\nc,mistakes\n400,"));
}

#[test]
fn select_on_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let small = write(dir.path(), "small.csv", "h0,h1,h2\n0,1,0\n1,1,0\n0,1,1\n");
    let out = hyposel(&["select", "--matrix", &small, "--algo", "as"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout, "chosen,steps,stop_reason\n1,3,exhausted\n");

    let mut text = String::from("h0,h1,h2,h3\n");
    for _ in 0..200 {
        text.push_str("0,0,1,0\n");
    }
    let column = write(dir.path(), "col.csv", &text);
    let out = hyposel(&[
        "select", "--matrix", &column, "--algo", "cs", "--gamma", "0.5", "--delta", "0.1", "--dec",
        "fixed",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let b =
        hyposel::bounds::threshold_b(4, 0.1, 0.5, 4.0, hyposel::bounds::BVariant::Simple).unwrap();
    let expected_steps = (2.0 * b).ceil() as u64;
    assert_eq!(
        out.stdout,
        format!("chosen,steps,stop_reason\n2,{expected_steps},threshold\n")
    );

    let out = hyposel(&["select", "--matrix", &column, "--algo", "bs", "--m", "7"]);
    assert_eq!(out.stdout, "chosen,steps,stop_reason\n2,7,threshold\n");
    assert_eq!(
        hyposel(&["select", "--matrix", &column, "--algo", "bs"]).code,
        2
    );
}

#[test]
fn select_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let ragged = write(dir.path(), "ragged.csv", "h0,h1,h2\n1,0,1\n1,0\n");
    let out = hyposel(&["select", "--matrix", &ragged, "--algo", "as"]);
    assert_eq!(out.code, 5);
    assert!(out.stderr.contains("line"), "{}", out.stderr);
    let bad = write(dir.path(), "bad.csv", "h0,h1\n1,x\n");
    assert_eq!(
        hyposel(&["select", "--matrix", &bad, "--algo", "as"]).code,
        5
    );
    let missing = dir.path().join("missing.csv");
    assert_eq!(
        hyposel(&[
            "select",
            "--matrix",
            missing.to_str().unwrap(),
            "--algo",
            "as"
        ])
        .code,
        3
    );
}

#[test]
fn help_exits_zero() {
    let out = hyposel(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("simulate"));
}
