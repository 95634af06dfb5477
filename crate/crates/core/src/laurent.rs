//! Laurent polynomials in the deformation parameter alpha, with complex
//! coefficients, and square matrices of them.
//!
//! Coefficients are f64-complex on purpose: every final quantity in the
//! pipelines is an integer (or a fixed surd), and all checks end in residual
//! tests, so exact coefficient arithmetic would buy nothing. Degrees are
//! tracked exactly; coefficients below `EPS_PRUNE` are dropped after each
//! operation so that numerically-zero terms cannot widen the degree range.

use num_complex::Complex64;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::CMat;

/// Pruning threshold for numerically-zero Laurent coefficients.
pub const EPS_PRUNE: f64 = 1e-12;

/// Sanity cap on |degree|; the pipelines never exceed products of a few
/// degree-one matrices.
const DEGREE_CAP: i32 = 24;

/// A Laurent polynomial sum_d c_d alpha^d with complex c_d.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LaurentScalar {
    coeffs: BTreeMap<i32, Complex64>,
}

impl LaurentScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::term(c, 0)
    }

    pub fn from_real(x: f64) -> Self {
        Self::constant(Complex64::new(x, 0.0))
    }

    /// The monomial c * alpha^degree.
    pub fn term(c: Complex64, degree: i32) -> Self {
        assert!(degree.abs() <= DEGREE_CAP, "degree {degree} out of range");
        let mut s = Self::zero();
        if c.norm() >= EPS_PRUNE {
            s.coeffs.insert(degree, c);
        }
        s
    }

    /// Build from (degree, coefficient) pairs.
    pub fn from_terms(terms: &[(i32, Complex64)]) -> Self {
        let mut s = Self::zero();
        for &(d, c) in terms {
            s.add_term(d, c);
        }
        s.prune();
        s
    }

    pub fn coeff(&self, degree: i32) -> Complex64 {
        self.coeffs
            .get(&degree)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        self.coeffs.iter().map(|(&d, &c)| (d, c))
    }

    fn add_term(&mut self, degree: i32, c: Complex64) {
        assert!(degree.abs() <= DEGREE_CAP, "degree {degree} out of range");
        *self
            .coeffs
            .entry(degree)
            .or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.norm() >= EPS_PRUNE);
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (d, c) in other.terms() {
            out.add_term(d, c);
        }
        out.prune();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&d, &c)| (d, -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (d1, c1) in self.terms() {
            for (d2, c2) in other.terms() {
                out.add_term(d1 + d2, c1 * c2);
            }
        }
        out.prune();
        out
    }

    pub fn scalar_mul(&self, c: Complex64) -> Self {
        let mut out = Self {
            coeffs: self.coeffs.iter().map(|(&d, &k)| (d, k * c)).collect(),
        };
        out.prune();
        out
    }

    /// Substitute a numeric alpha.
    pub fn eval(&self, alpha: Complex64) -> Complex64 {
        self.terms().map(|(d, c)| c * alpha.powi(d)).sum()
    }

    /// Magnitude of the largest coefficient at degree != 0.
    pub fn nonconstant_magnitude(&self) -> f64 {
        self.terms()
            .filter(|(d, _)| *d != 0)
            .fold(0.0, |m, (_, c)| m.max(c.norm()))
    }

    /// Largest coefficient magnitude at negative degree, with its degree.
    fn worst_negative(&self) -> Option<(i32, f64)> {
        self.terms()
            .filter(|(d, _)| *d < 0)
            .map(|(d, c)| (d, c.norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// A square matrix of Laurent polynomials in alpha.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMatrix {
    n: usize,
    entries: Vec<LaurentScalar>,
}

impl AlphaMatrix {
    pub fn zeros(n: usize) -> Self {
        AlphaMatrix {
            n,
            entries: vec![LaurentScalar::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            *m.entry_mut(i, i) = LaurentScalar::from_real(1.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> LaurentScalar) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                *m.entry_mut(i, j) = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &LaurentScalar {
        &self.entries[i * self.n + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut LaurentScalar {
        &mut self.entries[i * self.n + j]
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::ShapeMismatch(format!(
                "add {}x{0} with {1}x{1}",
                self.n, other.n
            )));
        }
        Ok(Self::from_fn(self.n, |i, j| {
            self.entry(i, j).add(other.entry(i, j))
        }))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::ShapeMismatch(format!(
                "mul {}x{0} with {1}x{1}",
                self.n, other.n
            )));
        }
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..self.n {
                    let b = other.entry(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.mul(b);
                    *out.entry_mut(i, j) = out.entry(i, j).add(&prod);
                }
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, s: &LaurentScalar) -> Self {
        Self::from_fn(self.n, |i, j| self.entry(i, j).mul(s))
    }

    /// Substitute a numeric real alpha != 0.
    pub fn eval(&self, alpha: f64) -> Result<CMat> {
        if alpha == 0.0 {
            return Err(Error::InvalidParameter(
                "eval at alpha = 0 (use limit0 for limits)".into(),
            ));
        }
        Ok(self.eval_complex(Complex64::new(alpha, 0.0)))
    }

    /// Substitute a numeric complex alpha (used by the x-independence checks,
    /// which approach alpha -> 0 along complex rays).
    pub fn eval_complex(&self, alpha: Complex64) -> CMat {
        CMat::from_fn(self.n, self.n, |i, j| self.entry(i, j).eval(alpha))
    }

    /// The alpha -> 0 limit: the degree-0 coefficient matrix, provided every
    /// negative-degree coefficient cancelled below `tol`.
    pub fn limit0(&self, tol: f64) -> Result<CMat> {
        for i in 0..self.n {
            for j in 0..self.n {
                if let Some((degree, magnitude)) = self.entry(i, j).worst_negative() {
                    if magnitude >= tol {
                        return Err(Error::DivergentLimit {
                            row: i,
                            col: j,
                            degree,
                            magnitude,
                        });
                    }
                }
            }
        }
        Ok(CMat::from_fn(self.n, self.n, |i, j| {
            self.entry(i, j).coeff(0)
        }))
    }

    /// Largest coefficient magnitude over all entries and degrees != 0.
    pub fn max_nonconstant_magnitude(&self) -> f64 {
        self.entries
            .iter()
            .fold(0.0, |m, e| m.max(e.nonconstant_magnitude()))
    }

    /// Max deviation from the identity, treating the matrix as Laurent:
    /// nonzero degrees must cancel and degree 0 must be the identity.
    pub fn identity_residual(&self) -> f64 {
        let mut res = self.max_nonconstant_magnitude();
        for i in 0..self.n {
            for j in 0..self.n {
                let expect = if i == j { 1.0 } else { 0.0 };
                res = res.max((self.entry(i, j).coeff(0) - expect).norm());
            }
        }
        res
    }
}

/// Polynomial extrapolation of samples (x_i, y_i) to x = 0 (Neville scheme).
/// Used to take numeric alpha -> 0 limits over a decreasing schedule.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let mut t = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in (level..n).rev() {
            let xi = xs[i];
            let xij = xs[i - level];
            // Neville update evaluated at x = 0.
            t[i] = (t[i] * xij - t[i - 1] * xi) / (xij - xi);
        }
    }
    t[n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverse_power_cancels() {
        // (1/alpha) * alpha = 1
        let a = LaurentScalar::term(c(1.0, 0.0), -1);
        let b = LaurentScalar::term(c(1.0, 0.0), 1);
        let prod = a.mul(&b);
        assert_eq!(prod, LaurentScalar::from_real(1.0));
    }

    #[test]
    fn additive_cancellation() {
        // (a + b/alpha) + (-b/alpha) = a
        let s = LaurentScalar::from_terms(&[(0, c(2.5, 0.0)), (-1, c(3.0, -1.0))]);
        let t = LaurentScalar::term(c(-3.0, 1.0), -1);
        assert_eq!(s.add(&t), LaurentScalar::from_real(2.5));
    }

    #[test]
    fn eval_diag_inverse_alpha() {
        let m = AlphaMatrix::from_fn(2, |i, j| {
            if i == j {
                LaurentScalar::term(c(1.0, 0.0), -1)
            } else {
                LaurentScalar::zero()
            }
        });
        let e = m.eval(0.5).unwrap();
        assert!((e[(0, 0)] - c(2.0, 0.0)).norm() < 1e-14);
        assert!((e[(1, 1)] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn eval_rejects_zero() {
        let m = AlphaMatrix::identity(2);
        assert!(m.eval(0.0).is_err());
    }

    #[test]
    fn limit0_constant_matrix() {
        let m = AlphaMatrix::from_fn(2, |i, j| LaurentScalar::from_real((i + 2 * j) as f64));
        let l = m.limit0(1e-12).unwrap();
        assert!((l[(1, 0)] - c(1.0, 0.0)).norm() == 0.0);
    }

    #[test]
    fn limit0_exact_cancellation() {
        // 1/alpha - 1/alpha + 5 -> 5
        let e = LaurentScalar::term(c(1.0, 0.0), -1)
            .add(&LaurentScalar::term(c(-1.0, 0.0), -1))
            .add(&LaurentScalar::from_real(5.0));
        let mut m = AlphaMatrix::zeros(1);
        *m.entry_mut(0, 0) = e;
        let l = m.limit0(1e-12).unwrap();
        assert!((l[(0, 0)] - c(5.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn limit0_reports_divergence() {
        let mut m = AlphaMatrix::zeros(2);
        *m.entry_mut(1, 0) = LaurentScalar::term(c(0.5, 0.0), -2);
        match m.limit0(1e-10) {
            Err(crate::error::Error::DivergentLimit {
                row, col, degree, ..
            }) => {
                assert_eq!((row, col, degree), (1, 0, -2));
            }
            other => panic!("expected DivergentLimit, got {other:?}"),
        }
    }

    #[test]
    fn extrapolation_kills_linear_term() {
        // y(x) = 3 - 2x + 7x^2
        let xs = [1e-2, 1e-3, 1e-4];
        let ys: Vec<Complex64> = xs
            .iter()
            .map(|&x| c(3.0 - 2.0 * x + 7.0 * x * x, 0.0))
            .collect();
        let y0 = extrapolate_to_zero(&xs, &ys);
        assert!((y0 - c(3.0, 0.0)).norm() < 1e-12);
    }

    // Coefficient components are either exactly zero or of magnitude >= 0.05,
    // so "limit0 succeeds" coincides with "no negative-degree terms at all"
    // and the extrapolation comparison below is not polluted by coefficients
    // sitting just under the divergence tolerance.
    fn arb_coeff() -> impl Strategy<Value = f64> {
        (-2.0f64..2.0).prop_map(|x| if x.abs() < 0.05 { 0.0 } else { x })
    }

    fn arb_laurent(max_deg: i32) -> impl Strategy<Value = LaurentScalar> {
        prop::collection::vec(((-max_deg..=max_deg), arb_coeff(), arb_coeff()), 0..5).prop_map(
            |terms| {
                LaurentScalar::from_terms(
                    &terms
                        .into_iter()
                        .map(|(d, re, im)| (d, Complex64::new(re, im)))
                        .collect::<Vec<_>>(),
                )
            },
        )
    }

    fn arb_alpha_matrix(n: usize) -> impl Strategy<Value = AlphaMatrix> {
        prop::collection::vec(arb_laurent(2), n * n).prop_map(move |entries| {
            let mut m = AlphaMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    *m.entry_mut(i, j) = entries[i * n + j].clone();
                }
            }
            m
        })
    }

    proptest! {
        // eval is a ring homomorphism: eval(A*B) = eval(A)*eval(B).
        #[test]
        fn eval_commutes_with_mul(a in arb_alpha_matrix(3), b in arb_alpha_matrix(3)) {
            for &alpha in &[0.1f64, 0.01] {
                let lhs = a.mul(&b).unwrap().eval(alpha).unwrap();
                let rhs = a.eval(alpha).unwrap().mul(&b.eval(alpha).unwrap()).unwrap();
                let scale = lhs.max_abs().max(rhs.max_abs()).max(1.0);
                prop_assert!(lhs.max_abs_diff(&rhs) / scale < 1e-10);
            }
        }

        // Whenever limit0 succeeds, it agrees with Neville extrapolation of
        // pointwise evaluations over the default schedule.
        #[test]
        fn limit0_matches_extrapolation(a in arb_alpha_matrix(2)) {
            let tol = 1e-9;
            if let Ok(lim) = a.limit0(tol) {
                let xs = [1e-2, 1e-3, 1e-4];
                let evals: Vec<CMat> = xs.iter().map(|&x| a.eval(x).unwrap()).collect();
                for i in 0..2 {
                    for j in 0..2 {
                        let ys: Vec<Complex64> = evals.iter().map(|m| m[(i, j)]).collect();
                        let ex = extrapolate_to_zero(&xs, &ys);
                        prop_assert!((ex - lim[(i, j)]).norm() < 10.0 * tol);
                    }
                }
            }
        }
    }
}
