//! Exact symbolic algebra of trigonometric Hamiltonians on the torus
//! `T^{2q} = R^{2q} / 2*pi*Z^{2q}`.
//!
//! A Hamiltonian is a finite real combination of the modes `cos(n.x + m.y)`
//! and `sin(n.x + m.y)` with integer wavevectors `n, m` in `Z^q`. Zero-mean
//! is built into the representation: the constant mode is not storable.
//!
//! Sign convention: the Poisson bracket follows
//! `{F,H} = dF/dy . dH/dx - dF/dx . dH/dy`, so that
//! `{cos(nx+my), cos(kx+ly)} = (m.k - n.l)/2 * (cos((n-k)x+(m-l)y) - cos((n+k)x+(m+l)y))`.
//! This is the negative of the more common analytical-mechanics convention;
//! every curvature formula downstream is quadratic in brackets, so curvature
//! values do not depend on the choice.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Coefficients with absolute value below this are dropped after arithmetic.
pub const PRUNE_TOL: f64 = 1e-15;

/// Phase of a torus mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    Cos,
    Sin,
}

/// A single canonical torus mode `phase(n.x + m.y)`.
///
/// Canonical form: the first nonzero entry of the concatenated wavevector
/// `(n, m)` is positive. Negating the wavevector leaves `cos` invariant and
/// flips the sign of `sin`; [`canonicalize`] folds that sign into the
/// coefficient.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TrigMode {
    pub n: Vec<i32>,
    pub m: Vec<i32>,
    pub phase: Phase,
}

impl TrigMode {
    pub fn q(&self) -> usize {
        self.n.len()
    }

    /// Laplace eigenvalue `|n|^2 + |m|^2`.
    pub fn eigenvalue(&self) -> f64 {
        let s: i64 = self
            .n
            .iter()
            .chain(self.m.iter())
            .map(|&a| a as i64 * a as i64)
            .sum();
        s as f64
    }

    pub fn is_constant(&self) -> bool {
        self.n.iter().chain(self.m.iter()).all(|&a| a == 0)
    }
}

impl fmt::Display for TrigMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.phase {
            Phase::Cos => "cos",
            Phase::Sin => "sin",
        };
        write!(f, "{p}({:?}.x + {:?}.y)", self.n, self.m)
    }
}

/// Canonicalize a mode, returning the canonical mode and the sign-adjusted
/// coefficient. Returns `None` for modes that are identically handled
/// elsewhere: `sin(0) = 0` and the constant `cos(0)` mode.
pub fn canonicalize(n: Vec<i32>, m: Vec<i32>, phase: Phase, coeff: f64) -> Option<(TrigMode, f64)> {
    let first = n.iter().chain(m.iter()).find(|&&a| a != 0);
    match first {
        None => None, // sin(0) vanishes; cos(0) is the excluded constant
        Some(&a) if a > 0 => Some((TrigMode { n, m, phase }, coeff)),
        Some(_) => {
            let n: Vec<i32> = n.iter().map(|&a| -a).collect();
            let m: Vec<i32> = m.iter().map(|&a| -a).collect();
            let c = match phase {
                Phase::Cos => coeff,
                Phase::Sin => -coeff,
            };
            Some((TrigMode { n, m, phase }, c))
        }
    }
}

/// Exact finite linear combination of torus modes; a zero-mean real function
/// on `T^{2q}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolynomial {
    q: usize,
    terms: BTreeMap<TrigMode, f64>,
}

/// Total volume of `T^{2q}` under `mu = dx ^ dy`.
pub fn torus_volume(q: usize) -> f64 {
    (2.0 * PI).powi(2 * q as i32)
}

impl TrigPolynomial {
    pub fn zero(q: usize) -> Self {
        TrigPolynomial {
            q,
            terms: BTreeMap::new(),
        }
    }

    /// Single-term polynomial. Errors on a constant (zero-wavevector cos)
    /// mode with a nonzero coefficient: Hamiltonians are zero-mean.
    pub fn term(n: Vec<i32>, m: Vec<i32>, phase: Phase, coeff: f64) -> Result<Self> {
        if n.len() != m.len() {
            return Err(Error::DimensionMismatch {
                left: n.len(),
                right: m.len(),
            });
        }
        if n.is_empty() {
            return Err(Error::Domain("empty wavevector (q = 0)".into()));
        }
        let q = n.len();
        let mut p = TrigPolynomial::zero(q);
        match canonicalize(n, m, phase, coeff) {
            Some((mode, c)) => p.push(mode, c),
            None => {
                if phase == Phase::Cos && coeff.abs() > PRUNE_TOL {
                    return Err(Error::Domain(
                        "constant mode: Hamiltonians are zero-mean".into(),
                    ));
                }
            }
        }
        Ok(p)
    }

    /// `cos(n x + m y)` on `T^2` (q = 1).
    pub fn cos1(n: i32, m: i32) -> Self {
        Self::term(vec![n], vec![m], Phase::Cos, 1.0).expect("nonconstant q=1 mode")
    }

    /// `sin(n x + m y)` on `T^2` (q = 1).
    pub fn sin1(n: i32, m: i32) -> Self {
        Self::term(vec![n], vec![m], Phase::Sin, 1.0).expect("nonconstant q=1 mode")
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TrigMode, f64)> {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn coeff(&self, mode: &TrigMode) -> f64 {
        self.terms.get(mode).copied().unwrap_or(0.0)
    }

    fn push(&mut self, mode: TrigMode, coeff: f64) {
        debug_assert_eq!(mode.q(), self.q);
        debug_assert!(!mode.is_constant());
        let v = self.terms.get(&mode).copied().unwrap_or(0.0) + coeff;
        if v.abs() < PRUNE_TOL {
            self.terms.remove(&mode);
        } else {
            self.terms.insert(mode, v);
        }
    }

    fn check_q(&self, other: &Self) -> Result<()> {
        if self.q != other.q {
            return Err(Error::DimensionMismatch {
                left: self.q,
                right: other.q,
            });
        }
        Ok(())
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = TrigPolynomial::zero(self.q);
        for (mode, c) in self.terms.iter() {
            let v = c * s;
            if v.abs() >= PRUNE_TOL {
                out.terms.insert(mode.clone(), v);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_q(other)?;
        let mut out = self.clone();
        for (mode, &c) in other.terms.iter() {
            out.push(mode.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Poisson bracket `{f, h}` under the mode rule
    /// `{cos(nx+my), cos(kx+ly)} = (m.k - n.l)/2 (cos((n-k)x+(m-l)y) - cos((n+k)x+(m+l)y))`
    /// extended bilinearly over all phase combinations.
    pub fn poisson_bracket(&self, other: &Self) -> Result<Self> {
        self.check_q(other)?;
        let mut out = TrigPolynomial::zero(self.q);
        for (a, &ca) in self.terms.iter() {
            for (b, &cb) in other.terms.iter() {
                let s: i64 = a
                    .m
                    .iter()
                    .zip(b.n.iter())
                    .map(|(&mi, &ki)| mi as i64 * ki as i64)
                    .sum::<i64>()
                    - a.n
                        .iter()
                        .zip(b.m.iter())
                        .map(|(&ni, &li)| ni as i64 * li as i64)
                        .sum::<i64>();
                if s == 0 {
                    continue;
                }
                let c = 0.5 * ca * cb * s as f64;
                let diff_n: Vec<i32> = a.n.iter().zip(b.n.iter()).map(|(x, y)| x - y).collect();
                let diff_m: Vec<i32> = a.m.iter().zip(b.m.iter()).map(|(x, y)| x - y).collect();
                let sum_n: Vec<i32> = a.n.iter().zip(b.n.iter()).map(|(x, y)| x + y).collect();
                let sum_m: Vec<i32> = a.m.iter().zip(b.m.iter()).map(|(x, y)| x + y).collect();
                // product-to-sum of the differentiated pair:
                //   cos' = -sin, sin' = cos, and {A,B} = s * A'(theta_a) B'(theta_b)
                let (phase, c_diff, c_sum) = match (a.phase, b.phase) {
                    // sin sin = (cos(d) - cos(s))/2
                    (Phase::Cos, Phase::Cos) => (Phase::Cos, c, -c),
                    // cos cos = (cos(d) + cos(s))/2
                    (Phase::Sin, Phase::Sin) => (Phase::Cos, c, c),
                    // -sin cos = -(sin(s) + sin(d))/2
                    (Phase::Cos, Phase::Sin) => (Phase::Sin, -c, -c),
                    // -cos sin = -(sin(s) - sin(d))/2
                    (Phase::Sin, Phase::Cos) => (Phase::Sin, c, -c),
                };
                if let Some((mode, v)) = canonicalize(diff_n, diff_m, phase, c_diff) {
                    out.push(mode, v);
                }
                if let Some((mode, v)) = canonicalize(sum_n, sum_m, phase, c_sum) {
                    out.push(mode, v);
                }
            }
        }
        Ok(out)
    }

    /// `Delta = -div grad`: each mode scaled by its eigenvalue `|n|^2 + |m|^2`.
    pub fn laplacian(&self) -> Self {
        let mut out = TrigPolynomial::zero(self.q);
        for (mode, &c) in self.terms.iter() {
            out.terms.insert(mode.clone(), c * mode.eigenvalue());
        }
        out
    }

    /// Per-mode division by `|n|^2 + |m|^2`; inverse of [`laplacian`] on the
    /// zero-mean functions the type represents.
    ///
    /// [`laplacian`]: TrigPolynomial::laplacian
    pub fn inverse_laplacian(&self) -> Self {
        let mut out = TrigPolynomial::zero(self.q);
        for (mode, &c) in self.terms.iter() {
            out.terms.insert(mode.clone(), c / mode.eigenvalue());
        }
        out
    }

    /// Bi-invariant pairing `<X_F, X_H> = int F H dmu`, evaluated exactly by
    /// mode orthogonality: each shared canonical mode contributes
    /// `c_f c_h (2*pi)^{2q} / 2`.
    pub fn l2_inner(&self, other: &Self) -> Result<f64> {
        self.check_q(other)?;
        let half_vol = 0.5 * torus_volume(self.q);
        let mut acc = 0.0;
        // iterate over the smaller map
        let (small, big) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        for (mode, &c) in small.terms.iter() {
            acc += c * big.coeff(mode) * half_vol;
        }
        Ok(acc)
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.l2_inner(self).expect("same q")
    }

    /// Right-invariant (kinetic-energy) pairing `(X_F, X_H) = <X_{Delta F}, X_H>`.
    pub fn right_inner(&self, other: &Self) -> Result<f64> {
        self.laplacian().l2_inner(other)
    }

    /// Left side of the ad-invariance identity
    /// `<[X_G,X_F],X_H> + <X_F,[X_G,X_H]> = 0`; returns the defect for testing.
    pub fn ad_invariance_defect(f: &Self, h: &Self, g: &Self) -> Result<f64> {
        let a = g.poisson_bracket(f)?.l2_inner(h)?;
        let b = f.l2_inner(&g.poisson_bracket(h)?)?;
        Ok(a + b)
    }

    /// If every mode shares one Laplace eigenvalue, returns it.
    pub fn eigenvalue(&self) -> Option<f64> {
        let mut it = self.terms.keys();
        let first = it.next()?.eigenvalue();
        if it.all(|m| m.eigenvalue() == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Largest `max(|n_i|, |m_i|)` over all stored modes; 0 when empty.
    pub fn max_wavenumber(&self) -> i32 {
        self.terms
            .keys()
            .flat_map(|mode| mode.n.iter().chain(mode.m.iter()))
            .map(|&a| a.abs())
            .max()
            .unwrap_or(0)
    }

    /// Largest absolute coefficient difference against `other`.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for (mode, &c) in self.terms.iter() {
            d = d.max((c - other.coeff(mode)).abs());
        }
        for (mode, &c) in other.terms.iter() {
            d = d.max((c - self.coeff(mode)).abs());
        }
        d
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc.max(c.abs()))
    }
}
