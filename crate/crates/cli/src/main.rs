mod manifest;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use symplecto::serialize;
use symplecto::solver::{simulate_with_observer, SolverConfig};
use symplecto::spectral::{Dealias, GridSpec};
use symplecto::trig::TrigPolynomial;
use symplecto::verify;
use symplecto::wigner::{wigner3j, Wigner3jArg};
use symplecto::{
    k_right_general, k_sphere, k_torus_bi, k_torus_right, structure_constants, Error, ModePair,
    SphericalIndex,
};

/// Exit codes: 0 success, 2 bad arguments or unreadable input, 3 degenerate
/// or singular geometry, 4 numerical failure (divergence, failed checks).
#[derive(Parser)]
#[command(name = "symplecto", version, about = "Curvature, vorticity flow, and harmonic \
    structure constants of area-preserving diffeomorphism groups")]
struct Cli {
    /// Seed for the randomized suites; recorded in manifests.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Base directory for relative --out paths.
    #[arg(long, global = true, env = "SYMPLECTO_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sectional curvature of torus mode planes.
    Curvature {
        #[command(subcommand)]
        cmd: CurvatureCmd,
    },
    /// Integrate the vorticity equation from a serialized Hamiltonian.
    Simulate(SimulateArgs),
    /// Spherical-harmonic tables and curvature on the sphere.
    Sphere {
        #[command(subcommand)]
        cmd: SphereCmd,
    },
    /// Run the cross-validation suite or re-check a run manifest.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum CurvatureCmd {
    /// Bi-invariant closed form for a single mode pair.
    TorusBi {
        /// Wavevector pair n,m,k,l.
        #[arg(long)]
        pair: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Right-invariant closed form for a single mode pair.
    TorusRight {
        /// Wavevector pair n,m,k,l.
        #[arg(long)]
        pair: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Right-invariant four-integral formula for two serialized Hamiltonians.
    General {
        /// Two Hamiltonian JSON files.
        #[arg(long, num_args = 2, value_names = ["F", "H"])]
        hamiltonians: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Both closed forms over every valid mode pair with entries up to a bound.
    Sweep {
        #[arg(long)]
        max_wavenumber: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SimulateArgs {
    /// Initial Hamiltonian, serialized as JSON.
    #[arg(long)]
    init: PathBuf,
    /// Grid resolution per axis.
    #[arg(long, default_value_t = 128)]
    grid: usize,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Record conserved quantities every this many steps.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Monitored vorticity-moment orders.
    #[arg(long, default_value = "2,3,4")]
    casimirs: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dump coefficient snapshots every this many steps (multiple of
    /// --stride; requires --out).
    #[arg(long)]
    snapshot_stride: Option<usize>,
}

#[derive(Subcommand)]
enum SphereCmd {
    /// Structure-constant table of the harmonic basis.
    Constants {
        #[arg(long)]
        lmax: u32,
        /// Skip the quadrature cross-check of every table entry.
        #[arg(long)]
        no_validate: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One 3j symbol.
    Wigner3j {
        j1: u32,
        j2: u32,
        j3: u32,
        m1: i32,
        m2: i32,
        m3: i32,
    },
    /// Sectional curvature of a harmonic pair plane.
    Curvature {
        /// Harmonic pair l1,m1,l2,m2.
        #[arg(long)]
        pair: String,
        /// Basis cutoff for the bracket expansion.
        #[arg(long, default_value_t = 4)]
        lmax: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only the fast criteria.
    #[arg(long, conflicts_with = "full")]
    quick: bool,
    /// Run every criterion (the default).
    #[arg(long)]
    full: bool,
    /// Re-check the output checksums of a previous run instead.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Geometry(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Geometry(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Geometry(m) | CliError::Numerical(m) => m,
        }
    }
}

fn lib_err(e: Error) -> CliError {
    match e {
        Error::Parse(_) => CliError::Usage(e.to_string()),
        Error::Diverged { .. } => CliError::Numerical(e.to_string()),
        _ => CliError::Geometry(e.to_string()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let out_dir = cli.out_dir.clone();
    match cli.cmd {
        Cmd::Curvature { cmd } => run_curvature(cmd, &out_dir),
        Cmd::Simulate(args) => run_simulate(args, &out_dir),
        Cmd::Sphere { cmd } => run_sphere(cmd, &out_dir, cli.seed),
        Cmd::Verify(args) => run_verify(args, cli.seed),
    }
}

fn resolve(out: Option<PathBuf>, out_dir: &Option<PathBuf>) -> Option<PathBuf> {
    out.map(|p| match out_dir {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p,
    })
}

/// Print to stdout, or write the file plus its manifest.
fn emit(
    text: String,
    out: Option<PathBuf>,
    config: serde_json::Value,
    seed: Option<u64>,
) -> Result<(), CliError> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let m = manifest::write_outputs(&[(path.clone(), text)], config, seed)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            eprintln!("wrote {} (manifest {})", path.display(), m.display());
            Ok(())
        }
    }
}

fn parse_i32_list(s: &str, expected: usize, what: &str) -> Result<Vec<i32>, CliError> {
    let parts: Result<Vec<i32>, _> = s.split(',').map(|p| p.trim().parse()).collect();
    match parts {
        Ok(v) if v.len() == expected => Ok(v),
        _ => Err(CliError::Usage(format!(
            "{what} must be {expected} comma-separated integers, got {s:?}"
        ))),
    }
}

const CURVATURE_HEADER: &str = "formula,q,n,m,k,l,K,term1,term2,term3,term4\n";

fn curvature_row(
    formula: &str,
    q: usize,
    pair: Option<&[i32; 4]>,
    k: f64,
    terms: &[(&str, f64)],
) -> String {
    let idx = |i: usize| {
        pair.map(|p| p[i].to_string()).unwrap_or_default()
    };
    let mut row = format!(
        "{formula},{q},{},{},{},{},{k:.16e}",
        idx(0),
        idx(1),
        idx(2),
        idx(3)
    );
    for i in 0..4 {
        match terms.get(i) {
            Some((name, v)) => {
                let _ = write!(row, ",{name}:{v:.16e}");
            }
            None => row.push(','),
        }
    }
    row.push('\n');
    row
}

fn run_curvature(cmd: CurvatureCmd, out_dir: &Option<PathBuf>) -> Result<(), CliError> {
    match cmd {
        CurvatureCmd::TorusBi { pair, out } => {
            let p = parse_i32_list(&pair, 4, "--pair")?;
            let mp = mode_pair(&p)?;
            let k = k_torus_bi(&mp).map_err(lib_err)?;
            let text = format!(
                "{CURVATURE_HEADER}{}",
                curvature_row("TORUS_BI_23", 1, Some(&[p[0], p[1], p[2], p[3]]), k, &[])
            );
            emit(text, resolve(out, out_dir), json!({"pair": p}), None)
        }
        CurvatureCmd::TorusRight { pair, out } => {
            let p = parse_i32_list(&pair, 4, "--pair")?;
            let mp = mode_pair(&p)?;
            let k = k_torus_right(&mp).map_err(lib_err)?;
            let text = format!(
                "{CURVATURE_HEADER}{}",
                curvature_row("TORUS_RIGHT_24", 1, Some(&[p[0], p[1], p[2], p[3]]), k, &[])
            );
            emit(text, resolve(out, out_dir), json!({"pair": p}), None)
        }
        CurvatureCmd::General { hamiltonians, out } => {
            let f = load_hamiltonian(&hamiltonians[0])?;
            let h = load_hamiltonian(&hamiltonians[1])?;
            let report = k_right_general(&f, &h).map_err(lib_err)?;
            let text = format!(
                "{CURVATURE_HEADER}{}",
                curvature_row(report.formula.label(), f.q(), None, report.k, &report.terms)
            );
            emit(
                text,
                resolve(out, out_dir),
                json!({"hamiltonians": [hamiltonians[0].to_string_lossy(), hamiltonians[1].to_string_lossy()]}),
                None,
            )
        }
        CurvatureCmd::Sweep { max_wavenumber, out } => {
            let w = max_wavenumber as i32;
            let mut text = String::from(CURVATURE_HEADER);
            for n in -w..=w {
                for m in -w..=w {
                    for k in -w..=w {
                        for l in -w..=w {
                            let Ok(mp) = ModePair::new(vec![n], vec![m], vec![k], vec![l]) else {
                                continue;
                            };
                            if mp.is_degenerate() {
                                continue;
                            }
                            let pair = [n, m, k, l];
                            let kb = k_torus_bi(&mp).map_err(lib_err)?;
                            text.push_str(&curvature_row("TORUS_BI_23", 1, Some(&pair), kb, &[]));
                            if !mp.is_resonant() {
                                let kr = k_torus_right(&mp).map_err(lib_err)?;
                                text.push_str(&curvature_row(
                                    "TORUS_RIGHT_24",
                                    1,
                                    Some(&pair),
                                    kr,
                                    &[],
                                ));
                            }
                        }
                    }
                }
            }
            emit(
                text,
                resolve(out, out_dir),
                json!({"max_wavenumber": max_wavenumber}),
                None,
            )
        }
    }
}

fn mode_pair(p: &[i32]) -> Result<ModePair, CliError> {
    ModePair::new(vec![p[0]], vec![p[1]], vec![p[2]], vec![p[3]])
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn load_hamiltonian(path: &Path) -> Result<TrigPolynomial, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serialize::from_json(&text).map_err(lib_err)
}

fn run_simulate(args: SimulateArgs, out_dir: &Option<PathBuf>) -> Result<(), CliError> {
    let f0 = load_hamiltonian(&args.init)?;
    let orders: Result<Vec<u32>, _> = args.casimirs.split(',').map(|p| p.trim().parse()).collect();
    let orders = match orders {
        Ok(v) if !v.is_empty() && v.iter().all(|&k| k >= 2) => v,
        _ => {
            return Err(CliError::Usage(format!(
                "--casimirs must be comma-separated integers >= 2, got {:?}",
                args.casimirs
            )))
        }
    };
    let grid = GridSpec::new(args.grid, Dealias::TwoThirds).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut cfg = SolverConfig::new(args.dt, args.steps, grid)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    cfg.invariant_stride = args.stride.max(1);
    cfg.casimir_orders = orders.clone();

    let out = resolve(args.out, out_dir);
    if args.snapshot_stride.is_some() && out.is_none() {
        return Err(CliError::Usage("--snapshot-stride requires --out".into()));
    }

    let mut snapshots: Vec<(PathBuf, String)> = Vec::new();
    let snap_stride = args.snapshot_stride.unwrap_or(0);
    let result = simulate_with_observer(&f0, &cfg, |step, _t, w| {
        if snap_stride > 0 && step % snap_stride == 0 {
            let stem = out.as_ref().expect("checked above");
            let path = stem.with_file_name(format!(
                "{}_step{step:06}.csv",
                stem.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default()
            ));
            let mut csv = String::from("n,m,re,im\n");
            for (n, m, re, im) in w.dump_coeffs(1e-14) {
                let _ = writeln!(csv, "{n},{m},{re:.16e},{im:.16e}");
            }
            snapshots.push((path, csv));
        }
    });

    let (records, failure) = match &result {
        Ok(r) => (r.as_slice(), None),
        Err(f) => (f.partial.as_slice(), Some(f.error.to_string())),
    };

    let mut csv = String::from("t,L");
    for k in &orders {
        let _ = write!(csv, ",I{k}");
    }
    csv.push_str(",max_vorticity\n");
    for r in records {
        let _ = write!(csv, "{:.6e},{:.16e}", r.t, r.energy);
        for &(_, v) in &r.casimirs {
            let _ = write!(csv, ",{v:.16e}");
        }
        let _ = writeln!(csv, ",{:.16e}", r.max_vorticity);
    }

    let config = json!({
        "init": args.init.to_string_lossy(),
        "grid": args.grid,
        "dt": args.dt,
        "steps": args.steps,
        "stride": cfg.invariant_stride,
        "casimirs": orders,
        "snapshot_stride": args.snapshot_stride,
    });
    match out {
        None => print!("{csv}"),
        Some(path) => {
            let mut files = vec![(path.clone(), csv)];
            files.append(&mut snapshots);
            let m = manifest::write_outputs(&files, config, None)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            eprintln!("wrote {} (manifest {})", path.display(), m.display());
        }
    }
    match failure {
        None => Ok(()),
        Some(msg) => Err(CliError::Numerical(format!("{msg}; partial trajectory retained"))),
    }
}

fn run_sphere(cmd: SphereCmd, out_dir: &Option<PathBuf>, _seed: u64) -> Result<(), CliError> {
    match cmd {
        SphereCmd::Constants { lmax, no_validate, out } => {
            let table = structure_constants(lmax, !no_validate).map_err(lib_err)?;
            let unsign_zero = |x: f64| if x == 0.0 { 0.0 } else { x };
            let mut csv = String::from("n,m,k,l,i,j,re(C),im(C)\n");
            for (n, m, k, l, i, j, re, im) in table.csv_rows() {
                let _ = writeln!(
                    csv,
                    "{n},{m},{k},{l},{i},{j},{:.16e},{:.16e}",
                    unsign_zero(re),
                    unsign_zero(im)
                );
            }
            emit(
                csv,
                resolve(out, out_dir),
                json!({"lmax": lmax, "validated": !no_validate}),
                None,
            )
        }
        SphereCmd::Wigner3j { j1, j2, j3, m1, m2, m3 } => {
            println!("{:.10}", wigner3j(Wigner3jArg::new(j1, j2, j3, m1, m2, m3)));
            Ok(())
        }
        SphereCmd::Curvature { pair, lmax, out } => {
            let p = parse_i32_list(&pair, 4, "--pair")?;
            let f = harmonic_index(p[0], p[1])?;
            let h = harmonic_index(p[2], p[3])?;
            let result = k_sphere(f, h, lmax).map_err(lib_err)?;
            let mut csv = String::from("l1,m1,l2,m2,cutoff,K,coverage_residual\n");
            let last = result.convergence.len().saturating_sub(1);
            for (idx, &(cutoff, k)) in result.convergence.iter().enumerate() {
                let residual = if idx == last {
                    format!("{:.16e}", result.coverage_residual)
                } else {
                    String::new()
                };
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{cutoff},{k:.16e},{residual}",
                    p[0], p[1], p[2], p[3]
                );
            }
            emit(csv, resolve(out, out_dir), json!({"pair": p, "lmax": lmax}), None)
        }
    }
}

fn harmonic_index(l: i32, m: i32) -> Result<SphericalIndex, CliError> {
    if l < 0 {
        return Err(CliError::Usage(format!("harmonic degree must be >= 0, got {l}")));
    }
    SphericalIndex::new(l as u32, m).map_err(|e| CliError::Usage(e.to_string()))
}

fn run_verify(args: VerifyArgs, seed: u64) -> Result<(), CliError> {
    if let Some(path) = args.manifest {
        let problems = manifest::check(&path)
            .map_err(|e| CliError::Usage(format!("cannot check {}: {e}", path.display())))?;
        return if problems.is_empty() {
            println!("manifest {}: all checksums match", path.display());
            Ok(())
        } else {
            for p in &problems {
                eprintln!("{p}");
            }
            Err(CliError::Numerical(format!(
                "{} checksum problem(s) in {}",
                problems.len(),
                path.display()
            )))
        };
    }

    let ids = if args.quick { verify::quick_ids() } else { verify::all_ids() };
    let mut failures = 0;
    for id in ids {
        let r = verify::run_criterion(id, seed);
        println!("{}", r.summary_line());
        if !r.passed {
            failures += 1;
        }
    }
    if failures == 0 {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("{failures} criterion(s) failed")))
    }
}
