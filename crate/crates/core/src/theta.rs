//! q-series evaluation of the theta functions, the Dedekind eta function and
//! the basis of vacuum torus amplitudes, with numerical verification of the
//! S- and T-transformation equations and the character identity.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::alpha_modular::{s_alpha, t_alpha, theta_transform, DEFAULT_X};
use crate::error::{require_p, Error, Result};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Summation range, evaluation point and tolerance for q-series work.
#[derive(Debug, Clone, Copy)]
pub struct QSeriesContext {
    /// Terms are summed over |n| <= truncation (and the eta product over the
    /// first `truncation` factors).
    pub truncation: usize,
    pub tau: Complex64,
    pub tolerance: f64,
}

impl QSeriesContext {
    pub fn new(truncation: usize, tau: Complex64, tolerance: f64) -> Result<Self> {
        if tau.im <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tau must lie in the upper half-plane, got {tau}"
            )));
        }
        if truncation < 1 {
            return Err(Error::InvalidParameter("truncation must be >= 1".into()));
        }
        Ok(QSeriesContext {
            truncation,
            tau,
            tolerance,
        })
    }

    /// Default: N = 200, tolerance 1e-9.
    pub fn with_tau(tau: Complex64) -> Result<Self> {
        Self::new(200, tau, 1e-9)
    }

    fn at_tau(&self, tau: Complex64) -> Result<Self> {
        Self::new(self.truncation, tau, self.tolerance)
    }

    /// q = exp(2 pi i tau).
    pub fn q(&self) -> Complex64 {
        (2.0 * PI * I * self.tau).exp()
    }

    /// q^e evaluated as exp(2 pi i tau e). Fractional powers of the complex
    /// number q are branch-ambiguous (tau and tau+1 give the same q), so all
    /// non-integer exponents go through tau directly.
    pub fn q_pow(&self, exponent: f64) -> Complex64 {
        (2.0 * PI * I * self.tau * exponent).exp()
    }

    /// Magnitude of the first dropped theta term, minimised over the index
    /// range 0 <= lambda <= p; a cheap conservative tail bound.
    fn tail_estimate(&self, p: u32) -> f64 {
        let a_min = 2.0 * p as f64 * (self.truncation as f64 + 1.0) - p as f64;
        let exponent = a_min * a_min / (4.0 * p as f64);
        (-2.0 * PI * self.tau.im * exponent).exp()
    }

    fn check_precision(&self, p: u32) -> Result<()> {
        let tail = self.tail_estimate(p);
        if tail > self.tolerance {
            return Err(Error::Precision(format!(
                "truncation tail ~{tail:.3e} exceeds tolerance {:.1e}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// Theta_{lambda,p}(tau) = sum_n q^((2pn+lambda)^2 / 4p).
pub fn theta(lambda: u32, p: u32, ctx: &QSeriesContext) -> Result<Complex64> {
    require_p(p)?;
    if lambda > p {
        return Err(Error::InvalidParameter(format!(
            "theta index must satisfy 0 <= lambda <= p, got {lambda}"
        )));
    }
    ctx.check_precision(p)?;
    let mut sum = Complex64::new(0.0, 0.0);
    let n = ctx.truncation as i64;
    for k in -n..=n {
        let a = 2.0 * p as f64 * k as f64 + lambda as f64;
        sum += ctx.q_pow(a * a / (4.0 * p as f64));
    }
    Ok(sum)
}

/// (dTheta)_{lambda,p}(tau) = sum_n (2pn+lambda) q^((2pn+lambda)^2 / 4p),
/// for 0 < lambda < p.
pub fn dtheta(lambda: u32, p: u32, ctx: &QSeriesContext) -> Result<Complex64> {
    require_p(p)?;
    if lambda == 0 || lambda >= p {
        return Err(Error::InvalidParameter(format!(
            "affine theta index must satisfy 0 < lambda < p, got {lambda}"
        )));
    }
    ctx.check_precision(p)?;
    let mut sum = Complex64::new(0.0, 0.0);
    let n = ctx.truncation as i64;
    for k in -n..=n {
        let a = 2.0 * p as f64 * k as f64 + lambda as f64;
        sum += re(a) * ctx.q_pow(a * a / (4.0 * p as f64));
    }
    Ok(sum)
}

/// (nabla Theta)_{lambda,p} = i tau (dTheta)_{lambda,p}.
pub fn nabla_theta(lambda: u32, p: u32, ctx: &QSeriesContext) -> Result<Complex64> {
    Ok(I * ctx.tau * dtheta(lambda, p, ctx)?)
}

/// eta(tau) = q^(1/24) prod_{n>=1} (1 - q^n), truncated.
pub fn eta(ctx: &QSeriesContext) -> Result<Complex64> {
    if ctx.tau.im <= 0.0 {
        return Err(Error::InvalidParameter(
            "tau not in upper half-plane".into(),
        ));
    }
    let q = ctx.q();
    // relative truncation error of the product is ~ |q|^(N+1)
    let tail = q.norm().powi(ctx.truncation as i32 + 1);
    if tail > ctx.tolerance {
        return Err(Error::Precision(format!(
            "eta product tail ~{tail:.3e} exceeds tolerance {:.1e}",
            ctx.tolerance
        )));
    }
    let mut prod = ctx.q_pow(1.0 / 24.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for _ in 1..=ctx.truncation {
        qn *= q;
        prod *= re(1.0) - qn;
    }
    Ok(prod)
}

/// The 3p-1 components of the theta vector:
/// (Theta_0, ..., Theta_p, dTheta_1, ..., dTheta_{p-1},
///  tau dTheta_1, ..., tau dTheta_{p-1}) / eta.
/// The last block realises the -(nabla Theta) slots with a factor -i
/// absorbed, matching [`theta_transform`] and [`crate::alpha_modular::b_matrix`].
pub fn theta_vector(p: u32, ctx: &QSeriesContext) -> Result<Vec<Complex64>> {
    require_p(p)?;
    let e = eta(ctx)?;
    let einv = e.finv();
    let pu = p as usize;
    let mut v = Vec::with_capacity(3 * pu - 1);
    for lambda in 0..=p {
        v.push(theta(lambda, p, ctx)? * einv);
    }
    for lambda in 1..p {
        v.push(dtheta(lambda, p, ctx)? * einv);
    }
    for lambda in 1..p {
        v.push(ctx.tau * dtheta(lambda, p, ctx)? * einv);
    }
    Ok(v)
}

/// The basis of vacuum torus amplitudes in canonical order:
/// chi^+_{0,p}, chi^-_{p,p}, then per triple s = 1..p-1 (theta index
/// lambda = p-s) the characters
///   chi^+ = (s Theta_lambda + dTheta_lambda) / (p eta),
///   chi^- = ((p-s) Theta_lambda - dTheta_lambda) / (p eta),
/// and the deformed form
///   chi~(alpha, x) = (2 Theta_lambda + 2 x i alpha nabla_lambda) / eta.
pub fn character_vector(
    p: u32,
    alpha: Complex64,
    x: Complex64,
    ctx: &QSeriesContext,
) -> Result<Vec<Complex64>> {
    require_p(p)?;
    if alpha.norm() == 0.0 {
        return Err(Error::InvalidParameter("alpha must be nonzero".into()));
    }
    let e = eta(ctx)?;
    let einv = e.finv();
    let pf = p as f64;
    let pu = p as usize;
    let mut v = Vec::with_capacity(3 * pu - 1);
    v.push(theta(0, p, ctx)? * einv);
    v.push(theta(p, p, ctx)? * einv);
    for s in 1..p {
        let lambda = p - s;
        let th = theta(lambda, p, ctx)?;
        let dth = dtheta(lambda, p, ctx)?;
        let nth = I * ctx.tau * dth;
        v.push((re(s as f64) * th + dth) * einv / re(pf));
        v.push((re((p - s) as f64) * th - dth) * einv / re(pf));
        v.push((re(2.0) * th + re(2.0) * x * I * alpha * nth) * einv);
    }
    Ok(v)
}

fn max_abs_residual(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).norm()))
}

/// Residual of the theta-vector S-transformation
/// Theta(-1/tau) = Frak(S) Theta(tau).
pub fn verify_theta_transform(p: u32, ctx: &QSeriesContext) -> Result<f64> {
    let frak = theta_transform(p)?;
    let at_tau = theta_vector(p, ctx)?;
    let s_ctx = ctx.at_tau(-ctx.tau.finv())?;
    let at_s = theta_vector(p, &s_ctx)?;
    let rhs = frak.mul_vec(&at_tau)?;
    Ok(max_abs_residual(&at_s, &rhs))
}

/// Residual of chi(-1/tau) = S_{p,alpha_eff} chi(tau) with chi built at
/// (alpha, x) and alpha_eff = 2 i x alpha (the product the forms depend on).
pub fn verify_s_transform(p: u32, alpha: f64, x: Complex64, ctx: &QSeriesContext) -> Result<f64> {
    if alpha == 0.0 {
        return Err(Error::InvalidParameter("alpha must be nonzero".into()));
    }
    let alpha_eff = re(2.0) * I * x * re(alpha);
    let s = s_alpha(p)?.eval_complex(alpha_eff);
    let at_tau = character_vector(p, re(alpha), x, ctx)?;
    let s_ctx = ctx.at_tau(-ctx.tau.finv())?;
    let at_s = character_vector(p, re(alpha), x, &s_ctx)?;
    let rhs = s.mul_vec(&at_tau)?;
    Ok(max_abs_residual(&at_s, &rhs))
}

/// Residual of chi(tau+1) = T_{p,alpha_eff} chi(tau).
pub fn verify_t_transform(p: u32, alpha: f64, x: Complex64, ctx: &QSeriesContext) -> Result<f64> {
    if alpha == 0.0 {
        return Err(Error::InvalidParameter("alpha must be nonzero".into()));
    }
    let alpha_eff = re(2.0) * I * x * re(alpha);
    let t = t_alpha(p)?.eval_complex(alpha_eff);
    let at_tau = character_vector(p, re(alpha), x, ctx)?;
    let t_ctx = ctx.at_tau(ctx.tau + re(1.0))?;
    let at_t = character_vector(p, re(alpha), x, &t_ctx)?;
    let rhs = t.mul_vec(&at_tau)?;
    Ok(max_abs_residual(&at_t, &rhs))
}

/// Residual of the character identity
/// i (s-p) tau chi^+_{p-s} + i s tau chi^-_{p-s}
///   + (1/alpha) chi~_{p-s}(alpha) - (2/alpha)(chi^+ + chi^-)_{p-s} = 0.
pub fn verify_char_identity(p: u32, s: u32, alpha: f64, ctx: &QSeriesContext) -> Result<f64> {
    require_p(p)?;
    if s == 0 || s >= p {
        return Err(Error::InvalidParameter(format!(
            "s must satisfy 0 < s < p, got {s}"
        )));
    }
    if alpha == 0.0 {
        return Err(Error::InvalidParameter("alpha must be nonzero".into()));
    }
    let chi = character_vector(p, re(alpha), DEFAULT_X, ctx)?;
    let o = 2 + 3 * (s as usize - 1);
    let (plus, minus, tilde) = (chi[o], chi[o + 1], chi[o + 2]);
    let a = re(alpha);
    let lhs = I * re(s as f64 - p as f64) * ctx.tau * plus + I * re(s as f64) * ctx.tau * minus;
    let rhs = -tilde / a + re(2.0) * (plus + minus) / a;
    Ok((lhs - rhs).norm())
}
