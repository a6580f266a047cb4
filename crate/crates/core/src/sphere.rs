//! The `S^2` side: spherical harmonics in canonical `(z, phi)` coordinates,
//! structure constants of the Hamiltonian Lie algebra in the harmonic basis,
//! and a Gauss-Legendre quadrature engine that independently validates the
//! constants and feeds the structure-constant curvature formula.
//!
//! Coordinates: `z` and `phi` are canonical for `omega = dz ^ dphi`, total
//! area `4*pi` (unit radius); the Poisson bracket is
//! `{F,H} = dH/dz dF/dphi - dH/dphi dF/dz`. The harmonics carry the
//! `e^{i m phi}` convention with `Delta Y = l(l+1) Y`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::curvature::{k_from_modal_data, CurvatureFormula, CurvatureReport};
use crate::error::{Error, Result};
use crate::wigner::{wigner3j, Wigner3jArg};

/// Index `(l, m)` of a spherical harmonic, `|m| <= l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SphericalIndex {
    pub l: u32,
    pub m: i32,
}

impl SphericalIndex {
    pub fn new(l: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > l {
            return Err(Error::Domain(format!("|m| = {} exceeds l = {l}", m.abs())));
        }
        Ok(SphericalIndex { l, m })
    }

    /// Laplace-Beltrami eigenvalue `l(l+1)` on the unit sphere.
    pub fn eigenvalue(&self) -> f64 {
        (self.l as f64) * (self.l as f64 + 1.0)
    }
}

fn factorial_f64(n: u32) -> f64 {
    (2..=n as u64).map(|i| i as f64).product()
}

/// One spherical harmonic prepared for pointwise evaluation:
/// `Y(z, phi) = norm * e^{i m phi} * (1 - z^2)^{m/2} * D(z)` with
/// `D = d^{l+m}/dz^{l+m} (1 - z^2)^l`.
#[derive(Clone, Debug)]
pub struct Harmonic {
    pub idx: SphericalIndex,
    norm: f64,
    /// Coefficients of `D`, index = power of `z`.
    dcoeffs: Vec<f64>,
}

impl Harmonic {
    pub fn new(idx: SphericalIndex) -> Self {
        let l = idx.l as i64;
        let m = idx.m as i64;
        let d = (l + m) as usize; // derivative order
        // (1 - z^2)^l = sum_r binom(l, r) (-1)^r z^{2r}
        let deg = (2 * l) as usize;
        let mut dcoeffs = vec![0.0; deg.saturating_sub(d) + 1];
        for r in 0..=l {
            let p = 2 * r; // power before differentiation
            if p < d as i64 {
                continue;
            }
            let mut c = binom_f64(l as u32, r as u32) * if r % 2 == 0 { 1.0 } else { -1.0 };
            // falling factorial p (p-1) ... (p-d+1)
            for s in 0..d as i64 {
                c *= (p - s) as f64;
            }
            dcoeffs[(p - d as i64) as usize] = c;
        }
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        let norm = sign / (2f64.powi(l as i32) * factorial_f64(l as u32))
            * ((2.0 * l as f64 + 1.0) * factorial_f64((l - m) as u32)
                / (4.0 * PI * factorial_f64((l + m) as u32)))
            .sqrt();
        Harmonic { idx, norm, dcoeffs }
    }

    fn poly(&self, z: f64) -> f64 {
        self.dcoeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    fn poly_deriv(&self, z: f64) -> f64 {
        let mut acc = 0.0;
        for (p, &c) in self.dcoeffs.iter().enumerate().skip(1).rev() {
            acc = acc * z + c * p as f64;
        }
        acc
    }

    /// `Y(z, phi)`; the poles `|z| = 1` are excluded (quadrature never
    /// samples them).
    pub fn value(&self, z: f64, phi: f64) -> Result<Complex64> {
        if z.abs() >= 1.0 {
            return Err(Error::Domain(format!("|z| = {} is outside (-1, 1)", z.abs())));
        }
        Ok(self.value_unchecked(z, phi))
    }

    fn value_unchecked(&self, z: f64, phi: f64) -> Complex64 {
        let m = self.idx.m as f64;
        let radial = self.norm * (1.0 - z * z).powf(0.5 * m) * self.poly(z);
        Complex64::from_polar(1.0, m * phi) * radial
    }

    /// Full `dY/dz`, including the chain term from the `(1 - z^2)^{m/2}`
    /// weight.
    fn dz_unchecked(&self, z: f64, phi: f64) -> Complex64 {
        let m = self.idx.m as f64;
        let w = (1.0 - z * z).powf(0.5 * m);
        let radial = self.norm * w * (self.poly_deriv(z) - m * z / (1.0 - z * z) * self.poly(z));
        Complex64::from_polar(1.0, m * phi) * radial
    }

    /// `dY/dphi = i m Y`.
    fn dphi_unchecked(&self, z: f64, phi: f64) -> Complex64 {
        Complex64::new(0.0, self.idx.m as f64) * self.value_unchecked(z, phi)
    }
}

fn binom_f64(n: u32, k: u32) -> f64 {
    factorial_f64(n) / (factorial_f64(k) * factorial_f64(n - k))
}

/// Evaluate `Y_m^l(z, phi)`.
pub fn ylm(idx: SphericalIndex, z: f64, phi: f64) -> Result<Complex64> {
    Harmonic::new(idx).value(z, phi)
}

/// Gauss-Legendre nodes and weights on `(-1, 1)` by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Product quadrature on the sphere: Gauss-Legendre in `z` times uniform
/// trapezoid in `phi`, exact for the trigonometric/polynomial degrees in
/// play up to rounding.
#[derive(Clone, Debug)]
pub struct SphereQuadrature {
    pub z_nodes: Vec<f64>,
    pub z_weights: Vec<f64>,
    pub phi_nodes: Vec<f64>,
    pub phi_weight: f64,
}

impl SphereQuadrature {
    /// Quadrature sized to integrate products of three harmonics of degree
    /// up to `lmax` exactly.
    pub fn for_degree(lmax: u32) -> Self {
        let nz = (2 * lmax as usize + 2).max(12);
        let nphi = (4 * lmax as usize + 2).max(16);
        let (z_nodes, z_weights) = gauss_legendre(nz);
        let phi_nodes = (0..nphi).map(|j| 2.0 * PI * j as f64 / nphi as f64).collect();
        SphereQuadrature {
            z_nodes,
            z_weights,
            phi_nodes,
            phi_weight: 2.0 * PI / nphi as f64,
        }
    }

    /// `int f dmu` over the sphere with `dmu = dz dphi`.
    pub fn integrate(&self, mut f: impl FnMut(f64, f64) -> Complex64) -> Complex64 {
        let mut acc = Complex64::default();
        for (&z, &wz) in self.z_nodes.iter().zip(&self.z_weights) {
            let mut row = Complex64::default();
            for &phi in &self.phi_nodes {
                row += f(z, phi);
            }
            acc += row * wz;
        }
        acc * self.phi_weight
    }

    /// Hermitian inner product `<f, Y_ij>` by quadrature.
    pub fn project(
        &self,
        f: impl FnMut(f64, f64) -> Complex64 + Copy,
        target: &Harmonic,
    ) -> Complex64 {
        let mut f = f;
        self.integrate(|z, phi| f(z, phi) * target.value_unchecked(z, phi).conj())
    }
}

/// Pointwise canonical bracket `{F,H} = H_z F_phi - H_phi F_z` of two
/// harmonics, with full analytic derivatives per term.
pub fn bracket_sphere<'a>(
    f: &'a Harmonic,
    h: &'a Harmonic,
) -> impl Fn(f64, f64) -> Complex64 + Copy + 'a {
    move |z, phi| {
        h.dz_unchecked(z, phi) * f.dphi_unchecked(z, phi)
            - h.dphi_unchecked(z, phi) * f.dz_unchecked(z, phi)
    }
}

/// Sparse table of the structure constants
/// `{Y_{nm}, Y_{kl}} = C^{ij}_{nm,kl} Y_{ij}` for `n, k <= lmax`.
#[derive(Clone, Debug)]
pub struct StructureConstantTable {
    pub lmax: u32,
    /// `(n, m, k, l) -> (i, j) -> C`; absent entries are zero.
    pub entries: BTreeMap<(u32, i32, u32, i32), BTreeMap<(u32, i32), Complex64>>,
}

const SC_PRUNE: f64 = 1e-14;
/// Quadrature-vs-formula disagreement beyond this aborts table construction.
pub const SC_VALIDATE_TOL: f64 = 1e-6;

/// Ratio factor `prod_{s=0}^{2p} (n - |m| - s) / (n + |m| - s)` of the
/// derivative expansion.
fn ratio_factor(n: u32, m: i32, p: u32) -> f64 {
    let ma = m.unsigned_abs();
    let mut r = 1.0;
    for s in 0..=(2 * p) {
        r *= (n - ma - s) as f64 / (n + ma - s) as f64;
    }
    r
}

/// Two-sum 3j expansion of a single bracket component. Derived from the
/// term-by-term derivative expansion of the harmonics, whose chain-rule
/// remainders only cancel when `m` and `l` share a sign; valid there, used
/// solely to calibrate the reduced coupling below. The `(2i+1)` under the
/// prefactor root (not `(2l+1)`) is what the projection integral requires;
/// the quadrature cross-check in [`structure_constants`] adjudicates.
fn two_sum_component(n: u32, m: i32, k: u32, l: i32, i: u32, j: i32) -> Complex64 {
    let three_j = |a: u32, b: u32, c: u32, ma: i32, mb: i32, mc: i32| {
        wigner3j(Wigner3jArg::new(a, b, c, ma, mb, mc))
    };
    // l-sum: derivative expansion of Y_{nm} over degrees n - 2p - 1
    let mut sum_p = 0.0;
    let mut p = 0;
    while n as i64 - 2 * p as i64 - 1 >= m.unsigned_abs() as i64 {
        let np = n - 2 * p - 1;
        sum_p += (2 * np + 1) as f64
            * ratio_factor(n, m, p).sqrt()
            * three_j(np, k, i, m, l, -j)
            * three_j(np, k, i, 0, 0, 0);
        p += 1;
    }
    // m-sum: derivative expansion of Y_{kl} over degrees k - 2q - 1
    let mut sum_q = 0.0;
    let mut q = 0;
    while k as i64 - 2 * q as i64 - 1 >= l.unsigned_abs() as i64 {
        let kq = k - 2 * q - 1;
        sum_q += (2 * kq + 1) as f64
            * ratio_factor(k, l, q).sqrt()
            * three_j(n, kq, i, m, l, -j)
            * three_j(n, kq, i, 0, 0, 0);
        q += 1;
    }
    let pref = ((2 * n + 1) as f64 * (2 * k + 1) as f64 * (2 * i + 1) as f64 / (4.0 * PI)).sqrt();
    let parity = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Complex64::new(0.0, -1.0) * parity * pref * (l as f64 * sum_p - m as f64 * sum_q)
}

/// Reduced coupling `g(n, k, i)` of the equivariant bilinear map
/// `(Y_{n.}, Y_{k.}) -> projection of the bracket onto degree i`.
///
/// Rotations preserve the area form and hence the bracket, so the component
/// dependence of `C^{ij}_{nm,kl}` is a single 3j factor:
/// `C = g(n,k,i) (-1)^j 3j(n,k,i; m,l,-j)`. `g` is calibrated by least
/// squares over the components with `m, l >= 0`, where the two-sum
/// expansion is exact.
pub fn reduced_coupling(n: u32, k: u32, i: u32) -> Complex64 {
    if i == 0 || i > n + k || i + n < k || i + k < n {
        return Complex64::default();
    }
    // bracket parity: only n + k + i odd couples
    if (n + k + i) % 2 == 0 {
        return Complex64::default();
    }
    let mut num = Complex64::default();
    let mut den = 0.0;
    for m0 in 0..=n as i32 {
        for l0 in 0..=k as i32 {
            let j0 = m0 + l0;
            if j0.unsigned_abs() > i {
                continue;
            }
            let w = wigner3j(Wigner3jArg::new(n, k, i, m0, l0, -j0));
            if w == 0.0 {
                continue;
            }
            let parity = if j0 % 2 == 0 { 1.0 } else { -1.0 };
            num += two_sum_component(n, m0, k, l0, i, j0) * parity * w;
            den += w * w;
        }
    }
    if den == 0.0 {
        Complex64::default()
    } else {
        num / den
    }
}

/// Single structure constant `C^{ij}_{nm,kl}` of the harmonic basis:
/// the reduced coupling times the component 3j factor.
pub fn structure_constant(n: u32, m: i32, k: u32, l: i32, i: u32, j: i32) -> Complex64 {
    if j != m + l || i == 0 {
        return Complex64::default();
    }
    let parity = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    reduced_coupling(n, k, i) * parity * wigner3j(Wigner3jArg::new(n, k, i, m, l, -j))
}

impl StructureConstantTable {
    pub fn coeff(&self, n: u32, m: i32, k: u32, l: i32, i: u32, j: i32) -> Complex64 {
        self.entries
            .get(&(n, m, k, l))
            .and_then(|inner| inner.get(&(i, j)))
            .copied()
            .unwrap_or_default()
    }

    /// Expansion coefficients of `{Y_{nm}, Y_{kl}}`.
    pub fn bracket_coeffs(&self, n: u32, m: i32, k: u32, l: i32) -> Vec<(SphericalIndex, Complex64)> {
        self.entries
            .get(&(n, m, k, l))
            .map(|inner| {
                inner
                    .iter()
                    .map(|(&(i, j), &c)| (SphericalIndex { l: i, m: j }, c))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Largest entrywise violation of `C_{nm,kl} = -C_{kl,nm}`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (&(n, m, k, l), inner) in &self.entries {
            for (&(i, j), &c) in inner {
                d = d.max((c + self.coeff(k, l, n, m, i, j)).norm());
            }
        }
        d
    }

    /// CSV rows `n,m,k,l,i,j,re,im` in sorted order.
    pub fn csv_rows(&self) -> Vec<(u32, i32, u32, i32, u32, i32, f64, f64)> {
        let mut rows = Vec::new();
        for (&(n, m, k, l), inner) in &self.entries {
            for (&(i, j), &c) in inner {
                rows.push((n, m, k, l, i, j, c.re, c.im));
            }
        }
        rows
    }
}

/// Build the structure-constant table for all `1 <= n, k <= lmax`.
///
/// With `validate`, every bracket expansion is checked against the
/// quadrature projection `<{Y_{nm}, Y_{kl}}, Y_{ij}>`; any disagreement
/// beyond [`SC_VALIDATE_TOL`] fails loudly.
pub fn structure_constants(lmax: u32, validate: bool) -> Result<StructureConstantTable> {
    if lmax < 1 {
        return Err(Error::Domain("lmax must be >= 1".into()));
    }
    let mut entries: BTreeMap<(u32, i32, u32, i32), BTreeMap<(u32, i32), Complex64>> =
        BTreeMap::new();
    for n in 1..=lmax {
        for k in 1..=lmax {
            for i in 1..=(n + k - 1) {
                let g = reduced_coupling(n, k, i);
                if g.norm() <= SC_PRUNE {
                    continue;
                }
                for m in -(n as i32)..=n as i32 {
                    for l in -(k as i32)..=k as i32 {
                        let j = m + l;
                        if j.unsigned_abs() > i {
                            continue;
                        }
                        let parity = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                        let c = g * parity * wigner3j(Wigner3jArg::new(n, k, i, m, l, -j));
                        if c.norm() > SC_PRUNE {
                            entries.entry((n, m, k, l)).or_default().insert((i, j), c);
                        }
                    }
                }
            }
        }
    }
    let table = StructureConstantTable { lmax, entries };
    if validate {
        validate_against_quadrature(&table, SC_VALIDATE_TOL)?;
    }
    Ok(table)
}

/// Compare every possible entry of the table against the quadrature
/// projection oracle.
pub fn validate_against_quadrature(table: &StructureConstantTable, tol: f64) -> Result<()> {
    let lmax = table.lmax;
    let quad = SphereQuadrature::for_degree(2 * lmax);
    let mut harmonics: BTreeMap<(u32, i32), Harmonic> = BTreeMap::new();
    for l in 0..=(2 * lmax) {
        for m in -(l as i32)..=l as i32 {
            harmonics.insert((l, m), Harmonic::new(SphericalIndex { l, m }));
        }
    }
    for n in 1..=lmax {
        for m in -(n as i32)..=n as i32 {
            for k in 1..=lmax {
                for l in -(k as i32)..=k as i32 {
                    let f = &harmonics[&(n, m)];
                    let h = &harmonics[&(k, l)];
                    let br = bracket_sphere(f, h);
                    let j = m + l;
                    for i in 1..=(n + k - 1) {
                        if j.unsigned_abs() > i {
                            continue;
                        }
                        let projected = quad.project(br, &harmonics[&(i, j)]);
                        let formula = table.coeff(n, m, k, l, i, j);
                        let diff = (projected - formula).norm();
                        if diff > tol {
                            return Err(Error::FormulaMismatch {
                                n: n as i32,
                                m,
                                k: k as i32,
                                l,
                                i: i as i32,
                                j,
                                diff,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Convergence trace of the structure-constant curvature in the basis
/// cutoff.
#[derive(Clone, Debug)]
pub struct SphereCurvature {
    pub report: CurvatureReport,
    /// `(cutoff, K)` for increasing cutoffs up to the requested one.
    pub convergence: Vec<(u32, f64)>,
    /// Relative L2 mass of the bracket missed by the cutoff basis.
    pub coverage_residual: f64,
}

const COVERAGE_TOL: f64 = 1e-10;

/// Sectional curvature of the plane spanned by `X_{Y_{l1 m1}}` and
/// `X_{Y_{l2 m2}}` in the right-invariant metric, via structure constants
/// and the modal eigenbasis formula.
pub fn k_sphere(f: SphericalIndex, h: SphericalIndex, lmax: u32) -> Result<SphereCurvature> {
    if f.l == 0 || h.l == 0 {
        return Err(Error::Domain("constant harmonic spans no plane".into()));
    }
    let needed = f.l + h.l - 1;
    let table_lmax = f.l.max(h.l);
    let table = structure_constants(table_lmax, false)?;
    let coeffs = table.bracket_coeffs(f.l, f.m, h.l, h.m);
    sphere_curvature_from_coeffs(
        f,
        h,
        &coeffs,
        lmax,
        needed,
        CurvatureFormula::StructureConstants,
    )
}

/// Independent oracle: same curvature with the bracket expansion obtained
/// by quadrature projection instead of the closed formula.
pub fn k_sphere_quadrature(
    f: SphericalIndex,
    h: SphericalIndex,
    lmax: u32,
) -> Result<SphereCurvature> {
    if f.l == 0 || h.l == 0 {
        return Err(Error::Domain("constant harmonic spans no plane".into()));
    }
    let needed = f.l + h.l - 1;
    let quad = SphereQuadrature::for_degree(f.l + h.l + lmax);
    let fh = Harmonic::new(f);
    let hh = Harmonic::new(h);
    let br = bracket_sphere(&fh, &hh);
    let j = f.m + h.m;
    let mut coeffs = Vec::new();
    for i in 1..=lmax {
        if j.unsigned_abs() > i {
            continue;
        }
        let target = Harmonic::new(SphericalIndex { l: i, m: j });
        let c = quad.project(br, &target);
        if c.norm() > 1e-13 {
            coeffs.push((SphericalIndex { l: i, m: j }, c));
        }
    }
    sphere_curvature_from_coeffs(f, h, &coeffs, lmax, needed, CurvatureFormula::RightEigen)
}

fn sphere_curvature_from_coeffs(
    f: SphericalIndex,
    h: SphericalIndex,
    coeffs: &[(SphericalIndex, Complex64)],
    lmax: u32,
    needed: u32,
    formula: CurvatureFormula,
) -> Result<SphereCurvature> {
    let alpha = f.eigenvalue();
    let beta = h.eigenvalue();

    // coverage: total bracket mass vs the mass inside the cutoff
    let total: f64 = coeffs.iter().map(|(_, c)| c.norm_sqr()).sum();
    let inside: f64 = coeffs
        .iter()
        .filter(|(idx, _)| idx.l <= lmax)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    let coverage_residual = if total > 0.0 {
        (total - inside) / total
    } else {
        0.0
    };
    if lmax < needed || coverage_residual > COVERAGE_TOL {
        return Err(Error::IncompleteBasis {
            residual: coverage_residual.max(1.0),
            tolerance: COVERAGE_TOL,
        });
    }

    let mut convergence = Vec::new();
    for cutoff in 1..=lmax {
        let modes: Vec<(f64, f64)> = coeffs
            .iter()
            .filter(|(idx, _)| idx.l <= cutoff)
            .map(|(idx, c)| (idx.eigenvalue(), c.norm_sqr()))
            .collect();
        let (k, _) = k_from_modal_data(alpha, beta, &modes);
        convergence.push((cutoff, k));
    }

    let modes: Vec<(f64, f64)> = coeffs
        .iter()
        .filter(|(idx, _)| idx.l <= lmax)
        .map(|(idx, c)| (idx.eigenvalue(), c.norm_sqr()))
        .collect();
    let (k, terms) = k_from_modal_data(alpha, beta, &modes);
    Ok(SphereCurvature {
        report: CurvatureReport {
            k,
            formula,
            terms,
            norms: (alpha, beta),
        },
        convergence,
        coverage_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(l: u32, m: i32) -> SphericalIndex {
        SphericalIndex::new(l, m).unwrap()
    }

    #[test]
    fn index_validation() {
        assert!(SphericalIndex::new(1, 2).is_err());
        assert!(SphericalIndex::new(3, -3).is_ok());
    }

    #[test]
    fn y00_is_constant() {
        for (z, phi) in [(0.3, 1.0), (-0.7, 2.5), (0.0, 0.0)] {
            let v = ylm(idx(0, 0), z, phi).unwrap();
            assert!((v - Complex64::new(1.0 / (4.0 * PI).sqrt(), 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn poles_are_domain_errors() {
        assert!(ylm(idx(1, 0), 1.0, 0.0).is_err());
        assert!(ylm(idx(1, 0), -1.5, 0.0).is_err());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        // int z^k over [-1, 1]
        for k in 0..=15u32 {
            let quad: f64 = x.iter().zip(&w).map(|(&z, &wi)| z.powi(k as i32) * wi).sum();
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((quad - exact).abs() < 1e-13, "degree {k}: {quad} vs {exact}");
        }
    }

    #[test]
    fn harmonics_orthonormal_under_quadrature() {
        let lmax = 4u32;
        let quad = SphereQuadrature::for_degree(lmax);
        let mut all = Vec::new();
        for l in 0..=lmax {
            for m in -(l as i32)..=l as i32 {
                all.push(Harmonic::new(idx(l, m)));
            }
        }
        for a in &all {
            for b in &all {
                let g = quad.integrate(|z, phi| {
                    a.value_unchecked(z, phi) * b.value_unchecked(z, phi).conj()
                });
                let expect = if a.idx == b.idx { 1.0 } else { 0.0 };
                assert!(
                    (g - Complex64::new(expect, 0.0)).norm() < 1e-10,
                    "Gram entry ({:?}, {:?}) = {g}",
                    a.idx,
                    b.idx
                );
            }
        }
    }

    #[test]
    fn laplace_beltrami_eigenvalue_numerically() {
        // Delta = -d/dz ((1-z^2) d/dz) - 1/(1-z^2) d^2/dphi^2 applied by
        // central differences
        let hvals = [idx(1, 0), idx(2, 1), idx(3, -2)];
        let dz = 1e-4;
        for i in hvals {
            let harm = Harmonic::new(i);
            let (z0, phi0) = (0.37, 1.1);
            let at = |z: f64, phi: f64| harm.value_unchecked(z, phi);
            let d2phi = (at(z0, phi0 + dz) - at(z0, phi0) * 2.0 + at(z0, phi0 - dz)) / (dz * dz);
            let flux = |z: f64| {
                (1.0 - z * z) * (at(z + 0.5 * dz, phi0) - at(z - 0.5 * dz, phi0)) / dz
            };
            let dflux = (flux(z0 + 0.5 * dz) - flux(z0 - 0.5 * dz)) / dz;
            let lap = -dflux - d2phi / (1.0 - z0 * z0);
            let expect = at(z0, phi0) * i.eigenvalue();
            assert!(
                (lap - expect).norm() < 1e-4 * (1.0 + expect.norm()),
                "{i:?}: {lap} vs {expect}"
            );
        }
    }

    #[test]
    fn bracket_basics() {
        let quad = SphereQuadrature::for_degree(6);
        let y00 = Harmonic::new(idx(0, 0));
        let y21 = Harmonic::new(idx(2, 1));
        let br = bracket_sphere(&y00, &y21);
        for (&z, &phi) in quad.z_nodes.iter().zip(quad.phi_nodes.iter().cycle()) {
            assert!(br(z, phi).norm() < 1e-14);
        }
        let brself = bracket_sphere(&y21, &y21);
        for (&z, &phi) in quad.z_nodes.iter().zip(quad.phi_nodes.iter().cycle()) {
            assert!(brself(z, phi).norm() < 1e-12);
        }
    }

    #[test]
    fn structure_constants_validate_against_quadrature() {
        // lmax = 3 covers the acceptance range n, k <= 3
        let table = structure_constants(3, true).expect("formula must match quadrature");
        assert!(table.antisymmetry_defect() < 1e-12);
        // diagonal entries vanish
        for (&(n, m, k, l), inner) in &table.entries {
            if (n, m) == (k, l) {
                panic!("diagonal entry present: {:?}", inner);
            }
        }
    }

    #[test]
    fn table_expansion_reproduces_bracket_pointwise() {
        let table = structure_constants(3, false).unwrap();
        let quad = SphereQuadrature::for_degree(6);
        for (n, m, k, l) in [(1, 0, 1, 1), (2, 1, 3, -2), (2, -1, 2, 2), (3, 3, 1, 0)] {
            let f = Harmonic::new(idx(n, m));
            let h = Harmonic::new(idx(k, l));
            let br = bracket_sphere(&f, &h);
            let coeffs = table.bracket_coeffs(n, m, k, l);
            let harmonics: Vec<(Harmonic, Complex64)> = coeffs
                .iter()
                .map(|&(i, c)| (Harmonic::new(i), c))
                .collect();
            for &z in &quad.z_nodes {
                for &phi in &quad.phi_nodes {
                    let expanded: Complex64 = harmonics
                        .iter()
                        .map(|(harm, c)| c * harm.value_unchecked(z, phi))
                        .sum();
                    assert!(
                        (br(z, phi) - expanded).norm() < 1e-8,
                        "pointwise mismatch at ({n},{m};{k},{l})"
                    );
                }
            }
        }
    }

    #[test]
    fn zonal_pair_is_flat() {
        // both phi-independent: bracket vanishes, K = 0
        let r = k_sphere(idx(1, 0), idx(2, 0), 4).unwrap();
        assert_eq!(r.report.k, 0.0);
    }

    #[test]
    fn sphere_curvature_matches_quadrature_oracle() {
        let a = k_sphere(idx(1, 0), idx(1, 1), 4).unwrap();
        let b = k_sphere_quadrature(idx(1, 0), idx(1, 1), 4).unwrap();
        assert!(
            (a.report.k - b.report.k).abs() < 1e-6 * (1.0 + a.report.k.abs()),
            "{} vs {}",
            a.report.k,
            b.report.k
        );
        assert!(a.coverage_residual < 1e-10);
    }

    #[test]
    fn insufficient_cutoff_is_an_error() {
        assert!(matches!(
            k_sphere(idx(2, 1), idx(3, 1), 2),
            Err(Error::IncompleteBasis { .. })
        ));
    }
}
