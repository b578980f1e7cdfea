use std::process::{Command, Output};

use spbvp::cli::{CliError, EXIT_SOLVER, EXIT_USAGE};
use spbvp::newton::SolveError;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spbvp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_column(text: &str, col: usize) -> Vec<String> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().to_string())
        .collect()
}

#[test]
fn solve_writes_nodal_values_with_exact_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sol.csv");
    let o = run(&[
        "solve", "--problem", "linear", "--scheme", "f", "--n", "32", "--eps", "2^-5", "--output",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y_numeric,y_exact"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 33);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[32][0], 1.0);
    for r in &rows {
        assert!((r[1] - r[2]).abs() < 1e-3);
    }
    let summary = stdout(&o);
    assert!(summary.contains("iterations=1"), "{summary}");
    assert!(summary.contains("E_N="), "{summary}");
}

#[test]
fn solve_without_exact_solution() {
    let o = run(&["solve", "--problem", "cubic", "--scheme", "g", "--n", "64", "--eps", "2^-9"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("x,y_numeric\n"));
    assert_eq!(out.lines().count(), 66);
    let summary = stderr(&o);
    assert!(summary.contains("iterations=") && !summary.contains("E_N"), "{summary}");
}

#[test]
fn rejects_n_not_divisible_by_four() {
    let o = run(&["solve", "--n", "30", "--eps", "2^-5"]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    let err = stderr(&o);
    assert!(err.contains("--n") && err.contains("N must be divisible by 4"), "{err}");
}

#[test]
fn parse_errors_name_the_flag() {
    let o = run(&["solve", "--n", "32", "--eps", "tiny"]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    assert!(stderr(&o).contains("--eps"), "{}", stderr(&o));

    let o = run(&["table", "--k", "6-9", "--eps", "2^-3"]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    assert!(stderr(&o).contains("--k"), "{}", stderr(&o));

    let o = run(&["table", "--k", "2..4", "--eps", "2^-3"]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    assert!(stderr(&o).contains("--k"), "{}", stderr(&o));
}

#[test]
fn solver_failures_map_to_their_own_exit_code() {
    let e: CliError = SolveError::NotConverged {
        iterations: 50,
        residual: 1.0,
    }
    .into();
    assert_eq!(e.exit_code(), EXIT_SOLVER);
}

#[test]
fn single_row_table_has_no_rate() {
    let o = run(&["table", "--k", "6..6", "--eps", "2^-3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "problem,scheme,epsilon,N,E_N,Ord");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("linear,f,2^-3,64,"));
    assert!(lines[1].ends_with(",-"));
}

#[test]
fn cubic_table_reproduces_published_block() {
    let o = run(&["table", "--problem", "cubic", "--scheme", "f", "--k", "6..8", "--eps", "2^-10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let got: Vec<f64> = csv_column(&stdout(&o), 4).iter().map(|v| v.parse().unwrap()).collect();
    for (g, w) in got.iter().zip([1.5182e-02, 4.9236e-03, 1.6403e-03]) {
        assert!(((g - w) / w).abs() <= 0.10, "{g} vs {w}");
    }
}

#[test]
fn table_layout_follows_eps_order() {
    let args = ["table", "--k", "6..7", "--eps", "2^-10,2^-3,2^-5"];
    let o = run(&args);
    assert!(o.status.success());
    let eps = csv_column(&stdout(&o), 2);
    assert_eq!(eps, ["2^-10", "2^-10", "2^-3", "2^-3", "2^-5", "2^-5"]);

    let md = run(&["table", "--k", "6..11", "--eps", "2^-3,2^-5,2^-10", "--format", "md"]);
    assert!(md.status.success());
    let text = stdout(&md);
    let body: Vec<&str> = text.lines().filter(|l| l.starts_with("| 2^")).collect();
    assert_eq!(body.len(), 6, "{text}");
    assert!(text.contains("2^-3") && text.contains("2^-10"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["table", "--problem", "cubic", "--scheme", "g", "--k", "6..8", "--eps", "2^-3,2^-20"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let args = ["solve", "--problem", "cubic", "--n", "128", "--eps", "2^-30"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

fn residuals(n: usize) -> Vec<f64> {
    let o = run(&["residuals", "--problem", "linear", "--scheme", "f", "--n", &n.to_string(), "--eps", "2^-10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    csv_column(&stdout(&o), 2).iter().map(|v| v.parse().unwrap()).collect()
}

#[test]
fn residual_spike_at_the_transition_node() {
    let r = residuals(256);
    assert_eq!(r.len(), 257);
    let mut coarse: Vec<f64> = r[65..192].to_vec();
    coarse.sort_by(f64::total_cmp);
    let median = coarse[coarse.len() / 2];
    assert!(r[64] > median, "{} vs median {median}", r[64]);

    let r2 = residuals(512);
    let ratio = r[64] / r2[128];
    assert!((1.5..=3.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn residuals_need_an_exact_solution() {
    let o = run(&["residuals", "--problem", "cubic", "--n", "64", "--eps", "2^-5"]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
}

#[test]
fn mesh_dump_of_a_saturated_mesh_is_uniform() {
    let o = run(&["mesh-dump", "--n", "8", "--eps", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "index,x,h");
    assert_eq!(lines.len(), 10);
    assert!(lines[1].ends_with(','));
    for l in &lines[2..] {
        let h: f64 = l.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(h, 0.125);
    }
}

#[test]
fn unwritable_output_is_an_io_error() {
    let o = run(&["mesh-dump", "--n", "8", "--eps", "1", "--output", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(spbvp::cli::EXIT_IO));
}
