//! Time integration of the vorticity form of the Euler equation
//! `d/dt (Delta F) = {Delta F, F}` on `T^2`, with conserved-quantity
//! monitoring (kinetic energy and vorticity-moment Casimirs).
//!
//! The evolved state is the vorticity `w = Delta F`; the stream Hamiltonian
//! is recovered as `F = Delta^{-1} w`, which damps rather than amplifies
//! coefficient noise.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{GridSpec, SpectralField};
use crate::trig::TrigPolynomial;

/// Fixed-step RK4 integration parameters.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub dt: f64,
    pub steps: usize,
    pub grid: GridSpec,
    /// Emit a trajectory record every this many steps.
    pub invariant_stride: usize,
    /// Orders `k >= 2` of the monitored Casimirs `I_k = int (Delta F)^k dmu`.
    pub casimir_orders: Vec<u32>,
}

impl SolverConfig {
    pub fn new(dt: f64, steps: usize, grid: GridSpec) -> Result<Self> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("invalid time step {dt}")));
        }
        Ok(SolverConfig {
            dt,
            steps,
            grid,
            invariant_stride: 1,
            casimir_orders: vec![2, 3, 4],
        })
    }
}

/// One row of the conserved-quantity time series.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub t: f64,
    /// Kinetic energy `L = 1/2 int F Delta F dmu`.
    pub energy: f64,
    /// Casimirs keyed in the order of `casimir_orders`.
    pub casimirs: Vec<(u32, f64)>,
    pub max_vorticity: f64,
}

/// Right side of the vorticity equation: `{w, Delta^{-1} w}`.
pub fn rhs(w: &SpectralField) -> Result<SpectralField> {
    w.bracket_ps(&w.inverse_laplacian())
}

/// One classical RK4 step of size `dt`.
pub fn step(w: &SpectralField, dt: f64) -> Result<SpectralField> {
    let k1 = rhs(w)?;
    let mut s = w.clone();
    s.add_scaled(0.5 * dt, &k1);
    let k2 = rhs(&s)?;
    let mut s = w.clone();
    s.add_scaled(0.5 * dt, &k2);
    let k3 = rhs(&s)?;
    let mut s = w.clone();
    s.add_scaled(dt, &k3);
    let k4 = rhs(&s)?;

    let mut out = w.clone();
    out.add_scaled(dt / 6.0, &k1);
    out.add_scaled(dt / 3.0, &k2);
    out.add_scaled(dt / 3.0, &k3);
    out.add_scaled(dt / 6.0, &k4);
    Ok(out)
}

/// Diagnostics of the current vorticity state.
pub fn record(t: f64, w: &SpectralField, casimir_orders: &[u32]) -> TrajectoryRecord {
    let f = w.inverse_laplacian();
    let energy = 0.5 * f.integrate(w).expect("same grid");
    let wgrid = w.to_grid();
    let n = wgrid.nrows();
    let cell = (2.0 * PI / n as f64).powi(2);
    let casimirs = casimir_orders
        .iter()
        .map(|&k| {
            let v = if k == 2 {
                // Parseval is exact for the quadratic moment
                w.integrate(w).expect("same grid")
            } else {
                wgrid.iter().map(|&v| v.powi(k as i32) * cell).sum()
            };
            (k, v)
        })
        .collect();
    let max_vorticity = wgrid.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    TrajectoryRecord {
        t,
        energy,
        casimirs,
        max_vorticity,
    }
}

/// Estimated advection CFL number `dt * max|u| * N / (2*pi)`.
pub fn cfl_number(w: &SpectralField, dt: f64) -> f64 {
    let f = w.inverse_laplacian();
    let umax = f
        .derivative_x()
        .max_abs_grid()
        .max(f.derivative_y().max_abs_grid());
    dt * umax * w.grid().resolution() as f64 / (2.0 * PI)
}

/// Integrate from the symbolic initial Hamiltonian `F0`; the initial
/// vorticity is `Delta` of its rasterization. Emits one record at `t = 0`
/// and one every `invariant_stride` steps.
///
/// On divergence the partial trajectory collected so far is returned with
/// the error.
pub fn simulate(f0: &TrigPolynomial, cfg: &SolverConfig) -> SimResult {
    simulate_with_observer(f0, cfg, |_, _, _| {})
}

pub type SimResult = std::result::Result<Vec<TrajectoryRecord>, SimFailure>;

/// Divergence report carrying the trajectory collected before the failure.
#[derive(Debug)]
pub struct SimFailure {
    pub error: Error,
    pub partial: Vec<TrajectoryRecord>,
}

impl std::fmt::Display for SimFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.error)
    }
}

impl std::error::Error for SimFailure {}

/// Like [`simulate`] but invokes `observer(step_index, t, state)` at every
/// recorded stride, e.g. to dump state snapshots.
pub fn simulate_with_observer(
    f0: &TrigPolynomial,
    cfg: &SolverConfig,
    mut observer: impl FnMut(usize, f64, &SpectralField),
) -> SimResult {
    let wrap = |error: Error, partial: &[TrajectoryRecord]| SimFailure {
        error,
        partial: partial.to_vec(),
    };
    let band = cfg.grid.band_limit();
    if i64::from(f0.max_wavenumber()) > band {
        return Err(wrap(
            Error::Domain(format!(
                "initial condition has wavenumbers beyond the dealiased band {band}"
            )),
            &[],
        ));
    }
    let field = SpectralField::from_trig(f0, cfg.grid).map_err(|e| wrap(e, &[]))?;
    let mut w = field.laplacian();

    let cfl = cfl_number(&w, cfg.dt);
    if cfl >= 0.5 {
        log::warn!("CFL estimate {cfl:.3} >= 0.5; the step size is likely too large");
    }

    let stride = cfg.invariant_stride.max(1);
    let mut records = Vec::with_capacity(cfg.steps / stride + 2);
    records.push(record(0.0, &w, &cfg.casimir_orders));
    observer(0, 0.0, &w);

    for i in 1..=cfg.steps {
        w = match step(&w, cfg.dt) {
            Ok(next) => next,
            Err(e) => return Err(wrap(e, &records)),
        };
        if !w.is_finite() {
            return Err(wrap(Error::Diverged { step: i }, &records));
        }
        let t = cfg.dt * i as f64;
        if i % stride == 0 || i == cfg.steps {
            records.push(record(t, &w, &cfg.casimir_orders));
            observer(i, t, &w);
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Dealias;
    use std::f64::consts::PI;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n, Dealias::TwoThirds).unwrap()
    }

    #[test]
    fn eigenmode_is_stationary() {
        let g = grid(64);
        let f = TrigPolynomial::cos1(1, 0);
        let w = SpectralField::from_trig(&f, g).unwrap().laplacian();
        assert!(rhs(&w).unwrap().max_abs_coeff() < 1e-14);
        let w1 = step(&w, 1e-2).unwrap();
        assert!(w1.max_coeff_diff(&w) < 1e-12);
    }

    #[test]
    fn taylor_green_like_field_is_stationary() {
        // F = cos x + cos y has equal eigenvalues, so {Delta F, F} = 0
        let g = grid(64);
        let f = TrigPolynomial::cos1(1, 0)
            .add(&TrigPolynomial::cos1(0, 1))
            .unwrap();
        let w = SpectralField::from_trig(&f, g).unwrap().laplacian();
        assert!(rhs(&w).unwrap().max_abs_coeff() < 1e-13);
    }

    #[test]
    fn rhs_matches_symbolic_bracket() {
        let g = grid(64);
        let f = TrigPolynomial::cos1(1, 0)
            .add(&TrigPolynomial::cos1(0, 2))
            .unwrap();
        let w = SpectralField::from_trig(&f, g).unwrap().laplacian();
        let r = rhs(&w).unwrap();
        let sym = f
            .laplacian()
            .poisson_bracket(&f)
            .unwrap();
        let sym_field = SpectralField::from_trig(&sym, g).unwrap();
        assert!(r.max_coeff_diff(&sym_field) < 1e-10);
        assert!(r.max_abs_coeff() > 1e-3);
    }

    #[test]
    fn zero_dt_is_identity() {
        let g = grid(32);
        let f = TrigPolynomial::cos1(1, 0)
            .add(&TrigPolynomial::sin1(2, 3))
            .unwrap();
        let w = SpectralField::from_trig(&f, g).unwrap().laplacian();
        let w1 = step(&w, 0.0).unwrap();
        assert!(w1.max_coeff_diff(&w) < 1e-15);
    }

    #[test]
    fn rk4_order_by_richardson() {
        let g = grid(64);
        let f = TrigPolynomial::cos1(1, 0)
            .add(&TrigPolynomial::cos1(0, 2))
            .unwrap()
            .add(&TrigPolynomial::sin1(2, 1))
            .unwrap();
        let w = SpectralField::from_trig(&f, g).unwrap().laplacian();
        let dt = 0.05;
        // reference by two half steps of the half-step solution (Richardson)
        let coarse = step(&w, dt).unwrap();
        let fine = step(&step(&w, dt / 2.0).unwrap(), dt / 2.0).unwrap();
        let finer = {
            let mut s = w.clone();
            for _ in 0..4 {
                s = step(&s, dt / 4.0).unwrap();
            }
            s
        };
        let e_coarse = coarse.max_coeff_diff(&finer);
        let e_fine = fine.max_coeff_diff(&finer);
        let ratio = e_coarse / e_fine;
        assert!(
            (12.0..=20.0).contains(&ratio),
            "order-4 step-halving ratio out of range: {ratio}"
        );
    }

    #[test]
    fn stationary_simulation_records_identical() {
        let g = grid(32);
        let f = TrigPolynomial::cos1(1, 0);
        let mut cfg = SolverConfig::new(1e-2, 100, g).unwrap();
        cfg.invariant_stride = 10;
        let recs = simulate(&f, &cfg).unwrap();
        let l0 = recs[0].energy;
        assert!((l0 - (2.0 * PI).powi(2) / 4.0).abs() < 1e-10);
        for r in &recs {
            assert!((r.energy - l0).abs() < 1e-12);
            assert!((r.max_vorticity - recs[0].max_vorticity).abs() < 1e-11);
        }
    }

    #[test]
    fn zero_steps_single_record() {
        let g = grid(32);
        let f = TrigPolynomial::cos1(1, 2);
        let cfg = SolverConfig::new(1e-2, 0, g).unwrap();
        let recs = simulate(&f, &cfg).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].t, 0.0);
    }


    #[test]
    fn out_of_band_initial_condition_rejected() {
        let g = grid(32); // band limit 10
        let f = TrigPolynomial::cos1(11, 0);
        let cfg = SolverConfig::new(1e-2, 1, g).unwrap();
        assert!(simulate(&f, &cfg).is_err());
    }

    #[test]
    fn energy_and_enstrophy_conserved_short_run() {
        let g = grid(64);
        let f = TrigPolynomial::cos1(1, 0)
            .add(&TrigPolynomial::cos1(0, 2))
            .unwrap()
            .add(&TrigPolynomial::sin1(2, 1).scale(0.5))
            .unwrap();
        let mut cfg = SolverConfig::new(1e-3, 200, g).unwrap();
        cfg.invariant_stride = 50;
        let recs = simulate(&f, &cfg).unwrap();
        let l0 = recs[0].energy;
        let i20 = recs[0].casimirs[0].1;
        for r in &recs {
            assert!((r.energy - l0).abs() / l0.abs() < 1e-8);
            assert!((r.casimirs[0].1 - i20).abs() / i20.abs() < 1e-6);
        }
    }
}
