use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cr-enrich"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn info_prints_matrices_and_constants() {
    let o = run(&["info", "--element", "gn:2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for key in ["N =", "N^-1 =", "det N =", "sigma =", "Delta ="] {
        assert!(s.contains(key), "missing {key} in\n{s}");
    }
    let o = run(&["info", "--element", "pn:2"]);
    assert!(stdout(&o).contains("Omega ="));
}

#[test]
fn unknown_element_is_a_validation_error() {
    assert_eq!(run(&["info", "--element", "xx:1"]).status.code(), Some(1));
    let o = run(&["converge", "--elements", "cr,zz", "--mesh", "structured:2,4"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_flags_are_validation_errors() {
    assert_eq!(run(&["converge", "--quad-degree", "abc"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["converge", "--quad-degree", "7", "--mesh", "structured:2,4"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn inadmissible_element_is_a_runtime_error() {
    assert_eq!(run(&["info", "--element", "gn:0"]).status.code(), Some(2));
}

#[test]
fn converge_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("report.csv");
    let plot = dir.path().join("plot.gp");
    let o = run(&[
        "converge",
        "--functions",
        "f1",
        "--elements",
        "cr,gn:2,gn:0",
        "--mesh",
        "structured:2,4,8",
        "--out",
        csv.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "function,element,n_triangles,h_max,l1_error,order");
    assert_eq!(lines.len(), 10);
    assert!(text.contains("error:InadmissibleFunctionals"));
    assert!(fs::read_to_string(&plot).unwrap().contains("plot"));

    let again = dir.path().join("again.csv");
    run(&["converge", "--functions", "f1", "--elements", "cr,gn:2,gn:0", "--mesh", "structured:2,4,8", "--out", again.to_str().unwrap()]);
    assert_eq!(text, fs::read_to_string(&again).unwrap());
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# study\nfunctions = bump\nelements = pn:2\nmesh = structured:2,4\nexpr.bump = exp(-x*x - y*y)\n",
    )
    .unwrap();
    let o = run(&["converge", "--config", cfg.to_str().unwrap(), "--elements", "cr"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("bump,cr,8,"));
    assert!(!s.contains("pn:2"));

    fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(run(&["converge", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn expr_flag_defines_a_function() {
    let o = run(&["converge", "--functions", "q", "--expr", "q=x*x+y", "--elements", "gn:2", "--mesh", "structured:2,4"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let l1: f64 = s.lines().nth(1).unwrap().split(',').nth(4).unwrap().parse().unwrap();
    assert!(l1 < 1e-12, "quadratic should be reproduced, got {l1}");
}

#[test]
fn missing_mesh_file_is_a_runtime_error() {
    let o = run(&["converge", "--mesh", "files:/nonexistent/mesh"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_passes() {
    let o = run(&["check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
}
