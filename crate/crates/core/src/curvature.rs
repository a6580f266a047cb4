//! Sectional curvature of the Hamiltonian diffeomorphism group in both
//! metrics: the bi-invariant quarter-bracket formula, the general
//! right-invariant four-integral formula, its Laplace-eigenfunction and
//! structure-constant specializations, and the torus closed forms.
//!
//! The stated formulas assume an orthonormal pair; all entry points here
//! Gram-normalize internally and report the raw norms, so callers may pass
//! unnormalized Hamiltonians.

use crate::error::{Error, Result};
use crate::trig::{canonicalize, torus_volume, Phase, TrigPolynomial};

/// Which formula produced a curvature value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurvatureFormula {
    /// Bi-invariant metric, `K = 1/4 int {F,H}^2 dmu` (normalized).
    BiInvariant,
    /// Right-invariant metric, four-integral form.
    RightGeneral,
    /// Right-invariant metric, Laplace-eigenfunction three-term form.
    RightEigen,
    /// Right-invariant metric via structure constants in an eigenbasis.
    StructureConstants,
    /// Torus closed form of the bi-invariant curvature.
    TorusBiClosed,
    /// Torus closed form of the right-invariant curvature.
    TorusRightClosed,
}

impl CurvatureFormula {
    pub fn label(&self) -> &'static str {
        match self {
            CurvatureFormula::BiInvariant => "BI_13",
            CurvatureFormula::RightGeneral => "RIGHT_19",
            CurvatureFormula::RightEigen => "RIGHT_EIGEN_20",
            CurvatureFormula::StructureConstants => "RIGHT_SC_21",
            CurvatureFormula::TorusBiClosed => "TORUS_BI_23",
            CurvatureFormula::TorusRightClosed => "TORUS_RIGHT_24",
        }
    }
}

/// Sectional curvature together with the per-term breakdown of the formula
/// that produced it.
#[derive(Clone, Debug)]
pub struct CurvatureReport {
    pub k: f64,
    pub formula: CurvatureFormula,
    pub terms: Vec<(&'static str, f64)>,
    /// `(|X_F|^2, |X_H|^2)` of the raw inputs in the formula's metric.
    pub norms: (f64, f64),
}

/// A pair of single-mode Hamiltonians `F = phase1(n.x + m.y)`,
/// `H = phase2(k.x + l.y)` on `T^{2q}`.
#[derive(Clone, Debug)]
pub struct ModePair {
    pub n: Vec<i32>,
    pub m: Vec<i32>,
    pub k: Vec<i32>,
    pub l: Vec<i32>,
    pub phases: (Phase, Phase),
}

impl ModePair {
    pub fn new(n: Vec<i32>, m: Vec<i32>, k: Vec<i32>, l: Vec<i32>) -> Result<Self> {
        Self::with_phases(n, m, k, l, (Phase::Cos, Phase::Cos))
    }

    pub fn with_phases(
        n: Vec<i32>,
        m: Vec<i32>,
        k: Vec<i32>,
        l: Vec<i32>,
        phases: (Phase, Phase),
    ) -> Result<Self> {
        let q = n.len();
        if m.len() != q || k.len() != q || l.len() != q || q == 0 {
            return Err(Error::Domain("mode pair wavevector lengths differ".into()));
        }
        let zero = |v: &[i32], w: &[i32]| v.iter().chain(w.iter()).all(|&a| a == 0);
        if zero(&n, &m) || zero(&k, &l) {
            return Err(Error::Domain(
                "mode pair requires n^2+m^2 != 0 and k^2+l^2 != 0".into(),
            ));
        }
        Ok(ModePair { n, m, k, l, phases })
    }

    pub fn q(&self) -> usize {
        self.n.len()
    }

    pub fn hamiltonians(&self) -> (TrigPolynomial, TrigPolynomial) {
        let f = TrigPolynomial::term(self.n.clone(), self.m.clone(), self.phases.0, 1.0)
            .expect("nonzero wavevector");
        let h = TrigPolynomial::term(self.k.clone(), self.l.clone(), self.phases.1, 1.0)
            .expect("nonzero wavevector");
        (f, h)
    }

    /// Symplectic pairing `m.k - n.l` of the two wavevectors.
    fn symplectic_product(&self) -> i64 {
        let dot = |a: &[i32], b: &[i32]| -> i64 {
            a.iter().zip(b).map(|(&x, &y)| x as i64 * y as i64).sum()
        };
        dot(&self.m, &self.k) - dot(&self.n, &self.l)
    }

    fn alpha(&self) -> i64 {
        self.n
            .iter()
            .chain(self.m.iter())
            .map(|&a| a as i64 * a as i64)
            .sum()
    }

    fn beta(&self) -> i64 {
        self.k
            .iter()
            .chain(self.l.iter())
            .map(|&a| a as i64 * a as i64)
            .sum()
    }

    /// `|n-k|^2 + |m-l|^2` and `|n+k|^2 + |m+l|^2`.
    fn difference_sum_eigenvalues(&self) -> (i64, i64) {
        let sq = |x: i64| x * x;
        let mut a = 0;
        let mut b = 0;
        for i in 0..self.q() {
            a += sq((self.n[i] - self.k[i]) as i64) + sq((self.m[i] - self.l[i]) as i64);
            b += sq((self.n[i] + self.k[i]) as i64) + sq((self.m[i] + self.l[i]) as i64);
        }
        (a, b)
    }

    /// True when the two modes span the same line of Hamiltonians
    /// (identical canonical wavevector and phase).
    pub fn is_degenerate(&self) -> bool {
        let a = canonicalize(self.n.clone(), self.m.clone(), self.phases.0, 1.0);
        let b = canonicalize(self.k.clone(), self.l.clone(), self.phases.1, 1.0);
        match (a, b) {
            (Some((ma, _)), Some((mb, _))) => ma == mb,
            _ => true,
        }
    }

    /// True when `(n,m) = +-(k,l)`, where the right-invariant closed form
    /// has a vanishing denominator.
    pub fn is_resonant(&self) -> bool {
        let (a, b) = self.difference_sum_eigenvalues();
        a == 0 || b == 0
    }
}

const GRAM_REL_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-12;

/// Bi-invariant sectional curvature (Gram-normalized):
/// `K = (1/4) int {F,H}^2 dmu / (|F|^2 |H|^2 - <F,H>^2)`.
///
/// Nonnegative always; zero exactly when the Hamiltonians commute.
pub fn k_bi(f: &TrigPolynomial, h: &TrigPolynomial) -> Result<CurvatureReport> {
    let g11 = f.l2_inner(f)?;
    let g22 = h.l2_inner(h)?;
    let g12 = f.l2_inner(h)?;
    let gram = g11 * g22 - g12 * g12;
    if !(gram > GRAM_REL_TOL * g11 * g22) {
        return Err(Error::DegeneratePlane { gram });
    }
    let br = f.poisson_bracket(h)?;
    let quarter = 0.25 * br.l2_inner(&br)?;
    Ok(CurvatureReport {
        k: quarter / gram,
        formula: CurvatureFormula::BiInvariant,
        terms: vec![("quarter_bracket_norm_sq", quarter), ("gram", gram)],
        norms: (g11, g22),
    })
}

/// Hamiltonian `S` of the projected covariant derivative `P_e(nabla_{X_F} X_H)`:
/// `S = 1/2 Delta^{-1} (Delta{F,H} + {F, Delta H} + {H, Delta F})`.
pub fn nabla_hamiltonian(f: &TrigPolynomial, h: &TrigPolynomial) -> Result<TrigPolynomial> {
    let br = f.poisson_bracket(h)?;
    let rhs = br
        .laplacian()
        .add(&f.poisson_bracket(&h.laplacian())?)?
        .add(&h.poisson_bracket(&f.laplacian())?)?;
    Ok(rhs.inverse_laplacian().scale(0.5))
}

/// Hamiltonian `T` of `P_e(nabla_X Y + nabla_Y X)`:
/// `T = Delta^{-1}({F, Delta H} + {H, Delta F})`.
pub fn sym_nabla_hamiltonian(f: &TrigPolynomial, h: &TrigPolynomial) -> Result<TrigPolynomial> {
    let rhs = f
        .poisson_bracket(&h.laplacian())?
        .add(&h.poisson_bracket(&f.laplacian())?)?;
    Ok(rhs.inverse_laplacian())
}

/// Gram-Schmidt in the right-invariant metric; returns the orthonormalized
/// pair and the raw norms.
fn right_orthonormal_pair(
    f: &TrigPolynomial,
    h: &TrigPolynomial,
) -> Result<(TrigPolynomial, TrigPolynomial, (f64, f64))> {
    let g11 = f.right_inner(f)?;
    let g22 = h.right_inner(h)?;
    let g12 = f.right_inner(h)?;
    let gram = g11 * g22 - g12 * g12;
    if !(gram > GRAM_REL_TOL * g11 * g22) {
        return Err(Error::DegeneratePlane { gram });
    }
    let e1 = f.scale(1.0 / g11.sqrt());
    let h_perp = h.sub(&e1.scale(h.right_inner(&e1)?))?;
    let n2 = h_perp.right_inner(&h_perp)?;
    let e2 = h_perp.scale(1.0 / n2.sqrt());
    Ok((e1, e2, (g11, g22)))
}

/// Right-invariant sectional curvature by the general four-integral formula,
/// evaluated symbolically after Gram normalization.
pub fn k_right_general(f: &TrigPolynomial, h: &TrigPolynomial) -> Result<CurvatureReport> {
    let (e1, e2, norms) = right_orthonormal_pair(f, h)?;
    let br = e1.poisson_bracket(&e2)?;
    let f_dh = e1.poisson_bracket(&e2.laplacian())?;
    let df_h = e1.laplacian().poisson_bracket(&e2)?;
    let h_df = e2.poisson_bracket(&e1.laplacian())?;
    let f_df = e1.poisson_bracket(&e1.laplacian())?;
    let h_dh = e2.poisson_bracket(&e2.laplacian())?;

    let t1 = -0.75 * br.laplacian().l2_inner(&br)?;
    let t2 = 0.5 * br.l2_inner(&f_dh.add(&df_h)?)?;
    let t3 = -f_df.l2_inner(&h_dh.inverse_laplacian())?;
    let sym = f_dh.add(&h_df)?;
    let t4 = 0.25 * sym.l2_inner(&sym.inverse_laplacian())?;

    Ok(CurvatureReport {
        k: t1 + t2 + t3 + t4,
        formula: CurvatureFormula::RightGeneral,
        terms: vec![
            ("laplacian_bracket", t1),
            ("mixed_bracket", t2),
            ("diagonal_nabla", t3),
            ("symmetric_nabla", t4),
        ],
        norms,
    })
}

/// Rayleigh quotient eigenvalue, verifying `Delta f = lambda f` to
/// coefficient tolerance.
fn checked_eigenvalue(f: &TrigPolynomial) -> Result<f64> {
    let norm = f.l2_norm_sq();
    if norm == 0.0 {
        return Err(Error::Domain("zero Hamiltonian".into()));
    }
    let lambda = f.right_inner(f)? / norm;
    let residual = f.laplacian().max_coeff_diff(&f.scale(lambda));
    let scale = (1.0 + lambda.abs()) * (1.0 + f.max_abs_coeff());
    if residual > EIGEN_TOL * scale {
        return Err(Error::NotEigenfunction { residual });
    }
    Ok(lambda)
}

/// Right-invariant curvature by the Laplace-eigenfunction three-term form:
/// `K = -3/4 int Delta{F,H}{F,H} + (a+b)/2 int {F,H}^2 + (a-b)^2/4 int {F,H} Delta^{-1}{F,H}`
/// for orthonormalized eigenfunctions with `Delta F = a F`, `Delta H = b H`.
pub fn k_right_eigen(f: &TrigPolynomial, h: &TrigPolynomial) -> Result<CurvatureReport> {
    let alpha = checked_eigenvalue(f)?;
    let beta = checked_eigenvalue(h)?;
    let (e1, e2, norms) = right_orthonormal_pair(f, h)?;
    // Gram-Schmidt mixes the pair only inside one eigenspace, so e1 and e2
    // are still eigenfunctions with the same eigenvalues.
    let br = e1.poisson_bracket(&e2)?;
    let t1 = -0.75 * br.laplacian().l2_inner(&br)?;
    let t2 = 0.5 * (alpha + beta) * br.l2_inner(&br)?;
    let t3 = 0.25 * (alpha - beta).powi(2) * br.l2_inner(&br.inverse_laplacian())?;
    Ok(CurvatureReport {
        k: t1 + t2 + t3,
        formula: CurvatureFormula::RightEigen,
        terms: vec![
            ("laplacian_bracket", t1),
            ("bracket_norm", t2),
            ("inverse_laplacian_bracket", t3),
        ],
        norms,
    })
}

/// Structure-constant curvature core: `K` from the squared expansion
/// coefficients `|C_i|^2` of `{F,H}` over an orthonormal Laplace eigenbasis
/// with eigenvalues `lambda_i`, for unit-norm eigen-Hamiltonians with
/// eigenvalues `alpha`, `beta`.
pub fn k_from_modal_data(
    alpha: f64,
    beta: f64,
    modes: &[(f64, f64)],
) -> (f64, Vec<(&'static str, f64)>) {
    let mut s_lam = 0.0;
    let mut s = 0.0;
    let mut s_inv = 0.0;
    for &(lambda, c2) in modes {
        s_lam += lambda * c2;
        s += c2;
        s_inv += c2 / lambda;
    }
    let t1 = -0.75 * s_lam;
    let t2 = 0.5 * (alpha + beta) * s;
    let t3 = 0.25 * (alpha - beta).powi(2) * s_inv;
    let k = (t1 + t2 + t3) / (alpha * beta);
    (
        k,
        vec![
            ("laplacian_bracket", t1 / (alpha * beta)),
            ("bracket_norm", t2 / (alpha * beta)),
            ("inverse_laplacian_bracket", t3 / (alpha * beta)),
        ],
    )
}

/// Right-invariant curvature from torus structure constants: the bracket of
/// the unit-norm eigen-Hamiltonians is expanded over the orthonormal mode
/// basis and fed through the modal formula.
pub fn k_from_structure_constants(
    f: &TrigPolynomial,
    h: &TrigPolynomial,
) -> Result<CurvatureReport> {
    let alpha = checked_eigenvalue(f)?;
    let beta = checked_eigenvalue(h)?;
    let (e1, e2, norms) = right_orthonormal_pair(f, h)?;
    // unit L2 norms for the modal formula
    let u1 = e1.scale(alpha.sqrt());
    let u2 = e2.scale(beta.sqrt());
    let br = u1.poisson_bracket(&u2)?;
    // canonical modes are an orthogonal eigenbasis with norm^2 = vol/2
    let half_vol = 0.5 * torus_volume(f.q());
    let modes: Vec<(f64, f64)> = br
        .terms()
        .map(|(mode, c)| (mode.eigenvalue(), c * c * half_vol))
        .collect();
    let (k, terms) = k_from_modal_data(alpha, beta, &modes);
    Ok(CurvatureReport {
        k,
        formula: CurvatureFormula::StructureConstants,
        terms,
        norms,
    })
}

/// Torus closed form of the bi-invariant curvature:
/// `K = (m.k - n.l)^2 / (4 (2 pi)^{2q})`.
pub fn k_torus_bi(pair: &ModePair) -> Result<f64> {
    if pair.is_degenerate() {
        return Err(Error::DegeneratePlane { gram: 0.0 });
    }
    let s = pair.symplectic_product() as f64;
    Ok(s * s / (4.0 * torus_volume(pair.q())))
}

/// Torus closed form of the right-invariant curvature:
/// `K = -(m.k-n.l)^4 (a+b) / ((2 pi)^{2q} a b |n-k,m-l|^2 |n+k,m+l|^2)`
/// with `a = |n|^2+|m|^2`, `b = |k|^2+|l|^2`. Errors on resonant pairs
/// `(n,m) = +-(k,l)` where the denominator vanishes.
pub fn k_torus_right(pair: &ModePair) -> Result<f64> {
    if pair.is_resonant() {
        return Err(Error::ResonantPair {
            n: pair.n.clone(),
            m: pair.m.clone(),
            k: pair.k.clone(),
            l: pair.l.clone(),
        });
    }
    if pair.is_degenerate() {
        return Err(Error::DegeneratePlane { gram: 0.0 });
    }
    let s = pair.symplectic_product() as f64;
    let alpha = pair.alpha() as f64;
    let beta = pair.beta() as f64;
    let (a, b) = pair.difference_sum_eigenvalues();
    Ok(-s.powi(4) * (alpha + beta)
        / (torus_volume(pair.q()) * alpha * beta * a as f64 * b as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trig::torus_volume;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn vol() -> f64 {
        torus_volume(1)
    }

    #[test]
    fn k_bi_basic_pair() {
        let f = TrigPolynomial::cos1(1, 0);
        let h = TrigPolynomial::cos1(0, 1);
        let r = k_bi(&f, &h).unwrap();
        assert!((r.k - 1.0 / (4.0 * vol())).abs() < 1e-14);
    }

    #[test]
    fn k_bi_commuting_pair_is_flat() {
        let f = TrigPolynomial::cos1(1, 0);
        let h = TrigPolynomial::cos1(2, 0);
        assert_eq!(k_bi(&f, &h).unwrap().k, 0.0);
    }

    #[test]
    fn k_bi_degenerate_plane_rejected() {
        let f = TrigPolynomial::cos1(1, 0);
        assert!(matches!(
            k_bi(&f, &f.scale(2.0)),
            Err(Error::DegeneratePlane { .. })
        ));
    }

    #[test]
    fn nabla_diagonal_identity() {
        // eigenfunction: S = 0
        let f = TrigPolynomial::cos1(1, 2);
        assert!(nabla_hamiltonian(&f, &f).unwrap().is_zero());

        // Delta S = {F, Delta F} coefficient-wise for a non-eigenfunction
        let g = TrigPolynomial::cos1(1, 0)
            .add(&TrigPolynomial::cos1(0, 2))
            .unwrap();
        let s = nabla_hamiltonian(&g, &g).unwrap();
        let lhs = s.laplacian();
        let rhs = g.poisson_bracket(&g.laplacian()).unwrap();
        assert!(lhs.max_coeff_diff(&rhs) < 1e-12);
    }

    #[test]
    fn nabla_identities_on_mixed_pair() {
        let f = TrigPolynomial::cos1(1, 0)
            .add(&TrigPolynomial::cos1(0, 2))
            .unwrap();
        let h = TrigPolynomial::sin1(1, 1);

        // Eq: Delta S = 1/2 (Delta{F,H} + {F,DH} + {H,DF}), recomputed independently
        let s = nabla_hamiltonian(&f, &h).unwrap();
        let rhs = f
            .poisson_bracket(&h)
            .unwrap()
            .laplacian()
            .add(&f.poisson_bracket(&h.laplacian()).unwrap())
            .unwrap()
            .add(&h.poisson_bracket(&f.laplacian()).unwrap())
            .unwrap()
            .scale(0.5);
        assert!(s.laplacian().max_coeff_diff(&rhs) < 1e-12);

        // symmetric part: Delta T = {F,DH} + {H,DF}
        let t = sym_nabla_hamiltonian(&f, &h).unwrap();
        let rhs_t = f
            .poisson_bracket(&h.laplacian())
            .unwrap()
            .add(&h.poisson_bracket(&f.laplacian()).unwrap())
            .unwrap();
        assert!(t.laplacian().max_coeff_diff(&rhs_t) < 1e-12);

        // T of (f,f) is twice S of (f,f)
        let t_ff = sym_nabla_hamiltonian(&f, &f).unwrap();
        assert!(t_ff.max_coeff_diff(&nabla_hamiltonian(&f, &f).unwrap().scale(2.0)) < 1e-12);
    }

    #[test]
    fn k_right_general_basic_pair() {
        let f = TrigPolynomial::cos1(1, 0);
        let h = TrigPolynomial::cos1(0, 1);
        let r = k_right_general(&f, &h).unwrap();
        assert!((r.k + 1.0 / (2.0 * vol())).abs() < 1e-14, "K = {}", r.k);
    }

    #[test]
    fn k_right_eigen_matches_general() {
        let pairs = [
            ((1, 0), (0, 1)),
            ((1, 2), (2, 1)),
            ((3, 1), (1, 0)),
            ((2, 0), (0, 1)),
        ];
        for ((n, m), (k, l)) in pairs {
            let f = TrigPolynomial::cos1(n, m);
            let h = TrigPolynomial::cos1(k, l);
            let a = k_right_general(&f, &h).unwrap().k;
            let b = k_right_eigen(&f, &h).unwrap().k;
            assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn k_right_eigen_rejects_non_eigenfunction() {
        let f = TrigPolynomial::cos1(1, 0)
            .add(&TrigPolynomial::cos1(0, 2))
            .unwrap();
        let h = TrigPolynomial::cos1(0, 1);
        assert!(matches!(
            k_right_eigen(&f, &h),
            Err(Error::NotEigenfunction { .. })
        ));
    }

    #[test]
    fn commuting_equal_eigenvalue_pair_is_flat() {
        // cos(x) and sin(x) commute and share the eigenvalue 1
        let f = TrigPolynomial::cos1(1, 0);
        let h = TrigPolynomial::sin1(1, 0);
        let r = k_right_general(&f, &h).unwrap();
        assert!(r.k.abs() < 1e-14);
        assert!(k_right_eigen(&f, &h).unwrap().k.abs() < 1e-14);
    }

    #[test]
    fn structure_constants_match_eigen_formula() {
        let norm = (2.0 / vol()).sqrt();
        let f = TrigPolynomial::cos1(1, 0).scale(norm);
        let h = TrigPolynomial::cos1(0, 1).scale(norm);
        let r = k_from_structure_constants(&f, &h).unwrap();
        assert!((r.k + 1.0 / (2.0 * vol())).abs() < 1e-14);

        // commuting pair
        let h2 = TrigPolynomial::cos1(2, 0).scale((2.0 / vol()).sqrt());
        assert_eq!(k_from_structure_constants(&f, &h2).unwrap().k, 0.0);
    }

    #[test]
    fn torus_closed_forms_basic() {
        let p = ModePair::new(vec![1], vec![0], vec![0], vec![1]).unwrap();
        assert!((k_torus_bi(&p).unwrap() - 1.0 / (4.0 * vol())).abs() < 1e-14);
        assert!((k_torus_right(&p).unwrap() + 1.0 / (2.0 * vol())).abs() < 1e-14);

        let parallel = ModePair::new(vec![1], vec![0], vec![2], vec![0]).unwrap();
        assert_eq!(k_torus_bi(&parallel).unwrap(), 0.0);
        assert_eq!(k_torus_right(&parallel).unwrap(), 0.0);

        let resonant = ModePair::new(vec![1], vec![0], vec![1], vec![0]).unwrap();
        assert!(matches!(
            k_torus_right(&resonant),
            Err(Error::ResonantPair { .. })
        ));
    }

    #[test]
    fn torus_closed_forms_vs_general() {
        let p = ModePair::new(vec![1], vec![2], vec![2], vec![1]).unwrap();
        let (f, h) = p.hamiltonians();
        let bi = k_torus_bi(&p).unwrap();
        assert!((bi - 9.0 / (4.0 * vol())).abs() < 1e-14);
        assert!((bi - k_bi(&f, &h).unwrap().k).abs() < 1e-13);
        let right = k_torus_right(&p).unwrap();
        let general = k_right_general(&f, &h).unwrap().k;
        assert!(
            (right - general).abs() < 1e-10 * right.abs(),
            "{right} vs {general}"
        );
    }

    #[test]
    fn sign_laws_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut tested = 0;
        while tested < 200 {
            let draw = |rng: &mut ChaCha8Rng| rng.gen_range(-5..=5);
            let p = match ModePair::new(
                vec![draw(&mut rng)],
                vec![draw(&mut rng)],
                vec![draw(&mut rng)],
                vec![draw(&mut rng)],
            ) {
                Ok(p) => p,
                Err(_) => continue,
            };
            if p.is_degenerate() {
                continue;
            }
            assert!(k_torus_bi(&p).unwrap() >= 0.0);
            if !p.is_resonant() {
                assert!(k_torus_right(&p).unwrap() <= 0.0);
            }
            tested += 1;
        }
    }
}
