use std::process::{Command, Output};

fn ort(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ort")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Value of `col` in the single data row of a compute table.
fn field(csv: &str, col: &str) -> String {
    let lines: Vec<&str> = csv.lines().collect();
    let header = lines.iter().rev().find(|l| l.starts_with('#')).unwrap();
    let names: Vec<&str> = header.trim_start_matches("# ").split(',').collect();
    let row: Vec<&str> = lines.last().unwrap().split(',').collect();
    row[names.iter().position(|n| *n == col).unwrap()].to_string()
}

fn num(csv: &str, col: &str) -> f64 {
    field(csv, col).parse().unwrap()
}

#[test]
fn compute_examples() {
    let o = ort(&["compute", "--state", "mix2fock:n=0,p=0.5,f=0"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!((num(&out, "N") - 0.25).abs() < 1e-12);
    assert_eq!(num(&out, "M"), 0.0);
    assert_eq!(field(&out, "route"), "analytic");

    let out = stdout(&ort(&["compute", "--state", "catqubit:alpha=1,chi=1.5707963"]));
    assert!((num(&out, "N") - 2.0).abs() < 1e-6);

    let out = stdout(&ort(&["compute", "--state", "coherent:alpha=0.9"]));
    assert!(num(&out, "N").abs() < 1e-10 && num(&out, "M").abs() < 1e-10);
}

#[test]
fn kernel_and_measure_flags() {
    let out = stdout(&ort(&[
        "compute", "--state", "mix2fock:n=1,p=0.5,f=1", "--kernel", "lorentzian:gt=0.5", "--measure", "n",
    ]));
    assert_eq!(field(&out, "M"), "nan");
    // f' = e^{-0.5} < 1/sqrt(2): on the plateau
    assert!((num(&out, "N") - (1.0 + 0.5 - 0.25 * 2.0)).abs() < 1e-12);
    assert!(out.starts_with("# state=mix2fock:n=1,p=0.5,f=1 kernel=lorentzian:gt=0.5,w0t=0\n"));
}

#[test]
fn numeric_route_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("roof.csv");
    let o = ort(&[
        "compute",
        "--state",
        "fock3:p2=0.4,p1=0.4,p0=0.2,f21=0,f10=0.5,f20=0",
        "--opts",
        "gx=21,gtheta=24,refine=3",
        "--dump",
        dump.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(field(&out, "route"), "numeric");
    assert!((num(&out, "N") - 0.523).abs() < 5e-3);
    let text = std::fs::read_to_string(dump).unwrap();
    assert!(text.lines().count() > 1);
}

#[test]
fn sweep_is_ordered_and_deterministic() {
    let args = ["sweep", "--state", "catmix:alpha=0.5,p=0,f=0", "--sweep", "p=0:1:11"];
    let a = stdout(&ort(&args));
    let b = stdout(&ort(&args));
    assert_eq!(a, b);
    let rows: Vec<&str> = a.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 11);
    assert!(rows[3].starts_with("0.3,"));
}

#[test]
fn figure_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3a.csv");
    let o = ort(&["figure", "fig3a", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# alpha=0.5\n# p,N,M,branch\n"));
    assert_eq!(text.lines().count(), 203);
    assert!(stdout(&ort(&["figure", "list"])).contains("fig11"));
}

#[test]
fn exit_codes() {
    assert_eq!(ort(&["compute", "--state", "nonsense:x=1"]).status.code(), Some(2));
    assert_eq!(ort(&["compute", "--state", "mix2fock:n=0,p=1.5,f=0"]).status.code(), Some(2));
    assert_eq!(ort(&["sweep", "--state", "catmix:alpha=0.5,p=0,f=0", "--sweep", "p=0:1:1"]).status.code(), Some(2));
    assert_eq!(ort(&["figure", "fig2"]).status.code(), Some(2));
    assert_eq!(ort(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ort(&["verify", "--only", "nothing"]).status.code(), Some(2));
    // cutoff exhausted inside the solver: numeric failure
    assert_eq!(ort(&["compute", "--state", "fock3:p2=0.4,p1=0.4,p0=0.2,f21=0,f10=0.5,f20=0", "--opts", "gx=41,gtheta=64,cap=1000"]).status.code(), Some(3));
}

#[test]
fn verify_subset() {
    let o = ort(&["verify", "--only", "c2,c5,c10"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 3);
}
