use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symplecto"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("symplecto-cli-test-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

#[test]
fn torus_bi_spot_value() {
    let o = run(&["curvature", "torus-bi", "--pair", "1,0,0,1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row = out.lines().nth(1).expect("data row");
    let k: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
    assert!((k - 0.00633257397764611).abs() < 1e-12, "K = {k}");
}

#[test]
fn resonant_pair_exits_3() {
    let o = run(&["curvature", "torus-right", "--pair", "1,0,1,0"]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr).into_owned();
    assert!(err.contains("[1]") && err.contains("[0]"), "pair not named: {err}");
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(run(&["curvature", "torus-bi", "--pair", "1,0,0"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--init", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(run(&["sphere", "curvature", "--pair", "1,2,1,0"]).status.code(), Some(2));
}

#[test]
fn wigner3j_prints_value() {
    let o = run(&["sphere", "wigner3j", "1", "1", "0", "0", "0", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "-0.5773502692");
}

#[test]
fn constants_table_is_antisymmetric_without_diagonal() {
    let o = run(&["sphere", "constants", "--lmax", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert!(!rows.is_empty());
    for r in &rows {
        // no self-bracket entries
        assert!(!(r[0] == r[2] && r[1] == r[3]), "diagonal row: {r:?}");
    }
    // each (n,m,k,l) entry has the negated (k,l,n,m) partner
    for r in &rows {
        let want_re = -r[6].parse::<f64>().unwrap();
        let want_im = -r[7].parse::<f64>().unwrap();
        let partner = rows.iter().find(|s| {
            s[0] == r[2] && s[1] == r[3] && s[2] == r[0] && s[3] == r[1] && s[4] == r[4] && s[5] == r[5]
        });
        let p = partner.expect("antisymmetric partner");
        assert!((p[6].parse::<f64>().unwrap() - want_re).abs() < 1e-12);
        assert!((p[7].parse::<f64>().unwrap() - want_im).abs() < 1e-12);
    }
}

#[test]
fn general_curvature_reports_terms() {
    let dir = scratch("general");
    let f = dir.join("f.json");
    let h = dir.join("h.json");
    fs::write(&f, r#"{"q":1,"terms":[{"n":[1],"m":[0],"phase":"cos","coeff":1.0}]}"#).unwrap();
    fs::write(&h, r#"{"q":1,"terms":[{"n":[0],"m":[1],"phase":"cos","coeff":1.0}]}"#).unwrap();
    let o = run(&["curvature", "general", "--hamiltonians", f.to_str().unwrap(), h.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("RIGHT_19,1,"), "{row}");
    assert_eq!(row.matches(':').count(), 4, "four term breakdowns: {row}");
    let k: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
    // -1 / (2 (2 pi)^2)
    assert!((k + 0.012665147955292222).abs() < 1e-12, "K = {k}");
}

#[test]
fn stationary_simulation_and_manifest_round_trip() {
    let dir = scratch("manifest");
    let init = dir.join("init.json");
    fs::write(&init, r#"{"q":1,"terms":[{"n":[1],"m":[0],"phase":"cos","coeff":1.0}]}"#).unwrap();
    let out = dir.join("traj.csv");
    let o = run(&[
        "simulate", "--init", init.to_str().unwrap(), "--grid", "32", "--dt", "0.01",
        "--steps", "40", "--stride", "10", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let csv = fs::read_to_string(&out).unwrap();
    let energies: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(energies.len(), 5);
    for &e in &energies {
        assert!((e - energies[0]).abs() < 1e-12);
    }

    let manifest = dir.join("traj.csv.manifest.json");
    assert!(manifest.exists());
    let check = run(&["verify", "--manifest", manifest.to_str().unwrap()]);
    assert!(check.status.success());

    // tampering must be caught
    fs::write(&out, "tampered").unwrap();
    let check = run(&["verify", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(4));
}

#[test]
fn sweep_output_is_deterministic() {
    let a = run(&["curvature", "sweep", "--max-wavenumber", "2"]);
    let b = run(&["curvature", "sweep", "--max-wavenumber", "2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().count() > 100);
}

#[test]
fn sphere_curvature_convergence_rows() {
    let o = run(&["sphere", "curvature", "--pair", "1,0,1,1", "--lmax", "4"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 5, "{out}");
    let last = out.lines().last().unwrap();
    let k: f64 = last.split(',').nth(5).unwrap().parse().unwrap();
    assert!((k - 0.029841551829730362).abs() < 1e-9, "K = {k}");
}
