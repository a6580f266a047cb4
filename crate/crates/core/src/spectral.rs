//! Truncated Fourier representation of real zero-mean functions on `T^2`
//! with grid transforms, pseudo-spectral products and 2/3-rule dealiasing.
//!
//! Coefficient convention: `f(x,y) = sum_{n,m} c(n,m) e^{i(n x + m y)}` on
//! the `2*pi`-periodic square, stored in FFT index order. Real-valuedness is
//! the Hermitian symmetry `c(-n,-m) = conj(c(n,m))`; the mean `c(0,0)` is
//! pinned to zero.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::trig::{Phase, TrigPolynomial};

/// Dealiasing rule applied after pseudo-spectral products.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dealias {
    None,
    /// Zero all coefficients with `max(|n|, |m|) > N/3`.
    TwoThirds,
}

/// Uniform `N x N` collocation grid on `[0, 2*pi)^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    n: usize,
    pub dealias: Dealias,
}

impl GridSpec {
    pub fn new(n: usize, dealias: Dealias) -> Result<Self> {
        if n < 16 || n % 2 != 0 {
            return Err(Error::Domain(format!(
                "grid resolution must be an even integer >= 16, got {n}"
            )));
        }
        Ok(GridSpec { n, dealias })
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    /// Signed wavenumber of FFT index `i`.
    fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Largest wavenumber kept by the dealias rule.
    pub fn band_limit(&self) -> i64 {
        match self.dealias {
            Dealias::None => self.n as i64 / 2 - 1,
            Dealias::TwoThirds => self.n as i64 / 3,
        }
    }
}

thread_local! {
    static FFT_CACHE: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    FFT_CACHE.with(|cache| {
        cache
            .borrow_mut()
            .entry((n, forward))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                let dir = if forward {
                    FftDirection::Forward
                } else {
                    FftDirection::Inverse
                };
                planner.plan_fft(n, dir)
            })
            .clone()
    })
}

/// In-place 2D FFT over rows then columns.
fn fft2(data: &mut Array2<Complex64>, forward: bool) {
    let n = data.nrows();
    let fft = plan(n, forward);
    for mut row in data.rows_mut() {
        let slice = row.as_slice_mut().expect("row-major layout");
        fft.process(slice);
    }
    let mut col = vec![Complex64::default(); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[[i, j]];
        }
        fft.process(&mut col);
        for i in 0..n {
            data[[i, j]] = col[i];
        }
    }
}

/// Fourier coefficients of a real zero-mean function on `T^2`.
#[derive(Clone, Debug)]
pub struct SpectralField {
    coeffs: Array2<Complex64>,
    grid: GridSpec,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpectralField {
            coeffs: Array2::default((grid.n, grid.n)),
            grid,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid.n != other.grid.n {
            return Err(Error::GridMismatch {
                left: self.grid.n,
                right: other.grid.n,
            });
        }
        Ok(())
    }

    /// Coefficient at signed wavenumbers `(n, m)`, `|n|, |m| <= N/2`.
    pub fn coeff(&self, n: i64, m: i64) -> Complex64 {
        let nn = self.grid.n as i64;
        let i = n.rem_euclid(nn) as usize;
        let j = m.rem_euclid(nn) as usize;
        self.coeffs[[i, j]]
    }

    fn set_coeff(&mut self, n: i64, m: i64, v: Complex64) {
        let nn = self.grid.n as i64;
        let i = n.rem_euclid(nn) as usize;
        let j = m.rem_euclid(nn) as usize;
        self.coeffs[[i, j]] = v;
    }

    /// Sample on the collocation grid; entry `[i, j]` is `f(x_i, y_j)` with
    /// `x_i = 2*pi*i/N`.
    pub fn to_grid(&self) -> Array2<f64> {
        let mut work = self.coeffs.clone();
        fft2(&mut work, false);
        work.mapv(|z| z.re)
    }

    /// Build from grid samples; subtracts the mean and enforces Hermitian
    /// symmetry.
    pub fn from_grid(values: &Array2<f64>, grid: GridSpec) -> Result<Self> {
        if values.nrows() != grid.n || values.ncols() != grid.n {
            return Err(Error::GridMismatch {
                left: values.nrows(),
                right: grid.n,
            });
        }
        let mut work = values.mapv(|v| Complex64::new(v, 0.0));
        fft2(&mut work, true);
        let scale = 1.0 / (grid.n * grid.n) as f64;
        work.mapv_inplace(|z| z * scale);
        let mut field = SpectralField {
            coeffs: work,
            grid,
        };
        field.enforce_invariants();
        Ok(field)
    }

    /// Rasterize a symbolic `q = 1` Hamiltonian by direct coefficient
    /// placement. The polynomial must fit strictly inside `N/2`.
    pub fn from_trig(poly: &TrigPolynomial, grid: GridSpec) -> Result<Self> {
        if poly.q() != 1 {
            return Err(Error::Domain(format!(
                "spectral fields are q = 1 only, got q = {}",
                poly.q()
            )));
        }
        let mut field = SpectralField::zeros(grid);
        let half = grid.n as i64 / 2;
        for (mode, c) in poly.terms() {
            let n = mode.n[0] as i64;
            let m = mode.m[0] as i64;
            if n.abs() >= half || m.abs() >= half {
                return Err(Error::Domain(format!(
                    "mode ({n},{m}) outside the N = {} grid band",
                    grid.n
                )));
            }
            let v = match mode.phase {
                // cos t = (e^{it} + e^{-it})/2
                Phase::Cos => Complex64::new(0.5 * c, 0.0),
                // sin t = (e^{it} - e^{-it})/(2i)
                Phase::Sin => Complex64::new(0.0, -0.5 * c),
            };
            let prev = field.coeff(n, m);
            field.set_coeff(n, m, prev + v);
            let prev = field.coeff(-n, -m);
            field.set_coeff(-n, -m, prev + v.conj());
        }
        Ok(field)
    }

    /// Pin the mean to zero and Hermitian-symmetrize.
    fn enforce_invariants(&mut self) {
        let n = self.grid.n;
        self.coeffs[[0, 0]] = Complex64::default();
        for i in 0..n {
            for j in 0..n {
                let ii = (n - i) % n;
                let jj = (n - j) % n;
                if (i, j) < (ii, jj) {
                    let avg = 0.5 * (self.coeffs[[i, j]] + self.coeffs[[ii, jj]].conj());
                    self.coeffs[[i, j]] = avg;
                    self.coeffs[[ii, jj]] = avg.conj();
                } else if (i, j) == (ii, jj) {
                    self.coeffs[[i, j]] = Complex64::new(self.coeffs[[i, j]].re, 0.0);
                }
            }
        }
    }

    /// Largest violation of `c(-n,-m) = conj(c(n,m))`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n;
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let ii = (n - i) % n;
                let jj = (n - j) % n;
                d = d.max((self.coeffs[[i, j]] - self.coeffs[[ii, jj]].conj()).norm());
            }
        }
        d
    }

    pub fn mean_coeff(&self) -> Complex64 {
        self.coeffs[[0, 0]]
    }

    fn map_wavenumbers(&self, f: impl Fn(i64, i64, Complex64) -> Complex64) -> Self {
        let n = self.grid.n;
        let mut out = SpectralField::zeros(self.grid);
        for i in 0..n {
            let kn = self.grid.wavenumber(i);
            for j in 0..n {
                let km = self.grid.wavenumber(j);
                out.coeffs[[i, j]] = f(kn, km, self.coeffs[[i, j]]);
            }
        }
        out
    }

    pub fn derivative_x(&self) -> Self {
        self.map_wavenumbers(|n, _, c| Complex64::new(0.0, n as f64) * c)
    }

    pub fn derivative_y(&self) -> Self {
        self.map_wavenumbers(|_, m, c| Complex64::new(0.0, m as f64) * c)
    }

    /// `Delta = -div grad`: multiply by `n^2 + m^2`.
    pub fn laplacian(&self) -> Self {
        self.map_wavenumbers(|n, m, c| c * (n * n + m * m) as f64)
    }

    /// Divide by `n^2 + m^2`; the mean mode stays zero.
    pub fn inverse_laplacian(&self) -> Self {
        self.map_wavenumbers(|n, m, c| {
            let k2 = (n * n + m * m) as f64;
            if k2 == 0.0 {
                Complex64::default()
            } else {
                c / k2
            }
        })
    }

    /// Apply the grid's dealias rule in place.
    pub fn dealias(&mut self) {
        if self.grid.dealias == Dealias::None {
            return;
        }
        let cut = self.grid.n as i64 / 3;
        let n = self.grid.n;
        for i in 0..n {
            let kn = self.grid.wavenumber(i);
            for j in 0..n {
                let km = self.grid.wavenumber(j);
                if kn.abs().max(km.abs()) > cut {
                    self.coeffs[[i, j]] = Complex64::default();
                }
            }
        }
    }

    /// Pseudo-spectral Poisson bracket `{f,h} = f_y h_x - f_x h_y`:
    /// grid-space product of spectral derivatives, transformed back and
    /// dealiased. Agrees with the exact symbolic bracket only when all
    /// product modes fit inside the dealiased band.
    pub fn bracket_ps(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let fx = self.derivative_x().to_grid();
        let fy = self.derivative_y().to_grid();
        let hx = other.derivative_x().to_grid();
        let hy = other.derivative_y().to_grid();
        let mut prod = Array2::zeros((self.grid.n, self.grid.n));
        ndarray::Zip::from(&mut prod)
            .and(&fx)
            .and(&fy)
            .and(&hx)
            .and(&hy)
            .for_each(|p, &a, &b, &c, &d| *p = b * c - a * d);
        let mut out = SpectralField::from_grid(&prod, self.grid)?;
        out.dealias();
        Ok(out)
    }

    /// `int f g dmu` over `[0, 2*pi]^2` by Parseval:
    /// `(2*pi)^2 sum c_f(n,m) conj(c_g(n,m))`.
    pub fn integrate(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        let mut acc = Complex64::default();
        for (a, b) in self.coeffs.iter().zip(other.coeffs.iter()) {
            acc += a * b.conj();
        }
        Ok((2.0 * PI).powi(2) * acc.re)
    }

    pub fn norm_sq(&self) -> f64 {
        self.integrate(self).expect("same grid")
    }

    /// Largest pointwise value on the collocation grid.
    pub fn max_abs_grid(&self) -> f64 {
        self.to_grid().iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()))
    }

    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scale(&self, s: f64) -> Self {
        SpectralField {
            coeffs: self.coeffs.mapv(|c| c * s),
            grid: self.grid,
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: f64, other: &Self) {
        ndarray::Zip::from(&mut self.coeffs)
            .and(&other.coeffs)
            .for_each(|a, &b| *a += b * s);
    }

    /// Coefficient dump as `(n, m, re, im)` rows for nonzero entries, sorted.
    pub fn dump_coeffs(&self, threshold: f64) -> Vec<(i64, i64, f64, f64)> {
        let n = self.grid.n;
        let mut rows = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let c = self.coeffs[[i, j]];
                if c.norm() > threshold {
                    rows.push((self.grid.wavenumber(i), self.grid.wavenumber(j), c.re, c.im));
                }
            }
        }
        rows.sort_by_key(|&(a, b, _, _)| (a, b));
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n, Dealias::TwoThirds).unwrap()
    }

    fn random_band_limited(rng: &mut impl Rng, g: GridSpec, max_k: i32) -> SpectralField {
        let mut p = TrigPolynomial::zero(1);
        for _ in 0..6 {
            let n = rng.gen_range(-max_k..=max_k);
            let m = rng.gen_range(-max_k..=max_k);
            let phase = if rng.gen_bool(0.5) { Phase::Cos } else { Phase::Sin };
            if let Ok(t) = TrigPolynomial::term(vec![n], vec![m], phase, rng.gen_range(-1.0..1.0)) {
                p = p.add(&t).unwrap();
            }
        }
        SpectralField::from_trig(&p, g).unwrap()
    }

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(15, Dealias::None).is_err());
        assert!(GridSpec::new(8, Dealias::None).is_err());
        assert!(GridSpec::new(64, Dealias::TwoThirds).is_ok());
    }

    #[test]
    fn cosine_transforms_to_half_coefficients() {
        let g = grid(64);
        let f = TrigPolynomial::cos1(1, 0);
        // direct-summation DFT oracle at mode (1,0)
        let gridvals = SpectralField::from_trig(&f, g).unwrap().to_grid();
        let n = 64usize;
        let mut acc = Complex64::default();
        for i in 0..n {
            for j in 0..n {
                let x = 2.0 * PI * i as f64 / n as f64;
                acc += gridvals[[i, j]] * Complex64::new(0.0, -x).exp();
            }
        }
        acc /= (n * n) as f64;
        assert!((acc - Complex64::new(0.5, 0.0)).norm() < 1e-12);

        let sf = SpectralField::from_grid(&gridvals, g).unwrap();
        assert!((sf.coeff(1, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        assert!((sf.coeff(-1, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn round_trip_identity() {
        let g = grid(32);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let f = random_band_limited(&mut rng, g, 9);
            let back = SpectralField::from_grid(&f.to_grid(), g).unwrap();
            assert!(f.max_coeff_diff(&back) < 1e-12);
            assert!(back.hermitian_defect() < 1e-12);
            assert_eq!(back.mean_coeff(), Complex64::default());
        }
    }

    #[test]
    fn bracket_matches_symbolic_on_band_limited_inputs() {
        let g = grid(64);
        let f = TrigPolynomial::cos1(1, 0);
        let h = TrigPolynomial::cos1(0, 1);
        let fb = SpectralField::from_trig(&f, g).unwrap();
        let hb = SpectralField::from_trig(&h, g).unwrap();
        let ps = fb.bracket_ps(&hb).unwrap();
        let sym = SpectralField::from_trig(&f.poisson_bracket(&h).unwrap(), g).unwrap();
        assert!(ps.max_coeff_diff(&sym) < 1e-12);
    }

    #[test]
    fn bracket_with_self_vanishes() {
        let g = grid(64);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_band_limited(&mut rng, g, 8);
        let b = f.bracket_ps(&f).unwrap();
        assert!(b.max_abs_coeff() < 1e-12);
    }

    #[test]
    fn bracket_random_band_limited_vs_symbolic() {
        let g = grid(96);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let mut fp = TrigPolynomial::zero(1);
            let mut hp = TrigPolynomial::zero(1);
            for _ in 0..4 {
                let t = |rng: &mut ChaCha8Rng| {
                    TrigPolynomial::term(
                        vec![rng.gen_range(-8..=8)],
                        vec![rng.gen_range(-8..=8)],
                        if rng.gen_bool(0.5) { Phase::Cos } else { Phase::Sin },
                        rng.gen_range(-1.0..1.0),
                    )
                };
                if let Ok(x) = t(&mut rng) {
                    fp = fp.add(&x).unwrap();
                }
                if let Ok(x) = t(&mut rng) {
                    hp = hp.add(&x).unwrap();
                }
            }
            let fb = SpectralField::from_trig(&fp, g).unwrap();
            let hb = SpectralField::from_trig(&hp, g).unwrap();
            let ps = fb.bracket_ps(&hb).unwrap();
            let sym = SpectralField::from_trig(&fp.poisson_bracket(&hp).unwrap(), g).unwrap();
            assert!(ps.max_coeff_diff(&sym) < 1e-10);
        }
    }

    #[test]
    fn laplacian_inverse_round_trip() {
        let g = grid(32);
        let mut f = SpectralField::zeros(g);
        f.set_coeff(1, 2, Complex64::new(0.5, 0.0));
        f.set_coeff(-1, -2, Complex64::new(0.5, 0.0));
        let lf = f.laplacian();
        assert!((lf.coeff(1, 2) - Complex64::new(2.5, 0.0)).norm() < 1e-14);
        assert!(lf.inverse_laplacian().max_coeff_diff(&f) < 1e-13);
        let z = SpectralField::zeros(g);
        assert_eq!(z.laplacian().max_abs_coeff(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let r = random_band_limited(&mut rng, g, 9);
        assert!(r.laplacian().inverse_laplacian().max_coeff_diff(&r) < 1e-13);
    }

    #[test]
    fn integrate_examples_and_riemann_oracle() {
        let g = grid(64);
        let c = SpectralField::from_trig(&TrigPolynomial::cos1(1, 0), g).unwrap();
        assert!((c.integrate(&c).unwrap() - 0.5 * (2.0 * PI).powi(2)).abs() < 1e-10);
        let d = SpectralField::from_trig(&TrigPolynomial::cos1(0, 1), g).unwrap();
        assert!(c.integrate(&d).unwrap().abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let a = random_band_limited(&mut rng, g, 10);
            let b = random_band_limited(&mut rng, g, 10);
            let parseval = a.integrate(&b).unwrap();
            let (ga, gb) = (a.to_grid(), b.to_grid());
            let h = 2.0 * PI / 64.0;
            let riemann: f64 = ga.iter().zip(gb.iter()).map(|(x, y)| x * y * h * h).sum();
            assert!((parseval - riemann).abs() < 1e-8);
        }
    }

    #[test]
    fn bracket_orthogonal_to_arguments() {
        let g = grid(96);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let f = random_band_limited(&mut rng, g, 8);
            let h = random_band_limited(&mut rng, g, 8);
            let b = f.bracket_ps(&h).unwrap();
            assert!(f.integrate(&b).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn operations_preserve_invariants() {
        let g = grid(64);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let f = random_band_limited(&mut rng, g, 8);
        let h = random_band_limited(&mut rng, g, 8);
        for field in [
            f.laplacian(),
            f.inverse_laplacian(),
            f.bracket_ps(&h).unwrap(),
            f.derivative_x(),
        ] {
            assert!(field.hermitian_defect() < 1e-12);
            assert!(field.mean_coeff().norm() < 1e-14);
        }
    }

    #[test]
    fn grid_mismatch_rejected() {
        let a = SpectralField::zeros(grid(32));
        let b = SpectralField::zeros(grid(64));
        assert!(matches!(a.bracket_ps(&b), Err(Error::GridMismatch { .. })));
        assert!(matches!(a.integrate(&b), Err(Error::GridMismatch { .. })));
    }
}
