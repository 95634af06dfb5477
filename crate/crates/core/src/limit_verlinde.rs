//! The limit-Verlinde formula: the usual Verlinde sum applied to the
//! evaluated alpha-dependent S-matrix, the numeric alpha -> 0 limit over a
//! decreasing schedule, and the matrices E_{p,alpha}, F_{p,alpha} realising
//! the factorization that proves equivalence with the block-diagonalisation
//! method.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::alpha_modular::s_alpha;
use crate::block_diag::{k_matrices, m_matrix_from_p, p_matrices, s_matrix};
use crate::error::{require_p, Error, Result};
use crate::laurent::extrapolate_to_zero;
use crate::matrix::{CMat, IMat, RMat};
use crate::tables::{Method, PreFusionTable, Stage};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn block_offset(b: usize) -> usize {
    if b == 0 {
        0
    } else {
        2 + 3 * (b - 1)
    }
}

/// Default alpha schedule. Below ~1e-6 the O(1/alpha) cancellations in the
/// Verlinde sum start eating double precision (absolute error ~ 1e-16/alpha).
pub const DEFAULT_ALPHAS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Guard against vanishing vacuum-row denominators.
const DENOM_FLOOR: f64 = 1e-14;

/// One Verlinde evaluation at fixed alpha (complex alphas serve the
/// x-independence checks, which approach zero along complex rays).
pub fn verlinde_at_alpha_complex(p: u32, alpha: Complex64) -> Result<Vec<CMat>> {
    require_p(p)?;
    if alpha.norm() == 0.0 {
        return Err(Error::InvalidParameter("alpha must be nonzero".into()));
    }
    let n = 3 * p as usize - 1;
    let s = s_alpha(p)?.eval_complex(alpha);
    // vacuum ROW (the third line of S, not the column)
    let mut inv_vac = Vec::with_capacity(n);
    for r in 0..n {
        let d = s[(2, r)];
        if d.norm() < DENOM_FLOOR {
            return Err(Error::DegenerateDenominator {
                r: r + 1,
                magnitude: d.norm(),
            });
        }
        inv_vac.push(d.finv());
    }
    let mut family = Vec::with_capacity(n);
    for i in 0..n {
        // N_I(alpha) = S diag(S_{I r} / S_{3 r}) S
        let mut m = CMat::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..n {
                    acc += s[(j, r)] * s[(i, r)] * inv_vac[r] * s[(r, k)];
                }
                m[(j, k)] = acc;
            }
        }
        family.push(m);
    }
    Ok(family)
}

/// Verlinde sum at a real alpha.
pub fn verlinde_at_alpha(p: u32, alpha: f64) -> Result<Vec<CMat>> {
    verlinde_at_alpha_complex(p, re(alpha))
}

/// Convergence and integrality diagnostics of one limit run.
#[derive(Debug, Clone)]
pub struct LimitReport {
    pub p: u32,
    pub alphas: Vec<f64>,
    /// max |N(alpha_last) - round| before extrapolation
    pub raw_residual_max: f64,
    /// max |extrapolated - round| (what the table is rounded from)
    pub extrapolated_residual_max: f64,
    /// per-I max extrapolated residual over (J, K)
    pub per_i_residual: Vec<f64>,
    /// max imaginary part seen in the extrapolated values
    pub max_imag: f64,
    /// worst ratio of successive differences (should shrink ~ alpha ratio)
    pub worst_contraction: f64,
}

/// Take the alpha -> 0 limit of the Verlinde family over a decreasing
/// schedule: evaluate, check Cauchy-style contraction of successive
/// differences, Richardson-extrapolate entrywise to zero, and round.
pub fn limit_prefusion(p: u32, alphas: &[f64], tol: f64) -> Result<(LimitReport, PreFusionTable)> {
    require_p(p)?;
    if alphas.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two alphas in the schedule".into(),
        ));
    }
    if alphas.windows(2).any(|w| w[1] >= w[0]) || alphas.iter().any(|&a| a <= 0.0) {
        return Err(Error::InvalidParameter(
            "alphas must be strictly decreasing and positive".into(),
        ));
    }
    let n = 3 * p as usize - 1;
    let evals: Vec<Vec<CMat>> = alphas
        .iter()
        .map(|&a| verlinde_at_alpha(p, a))
        .collect::<Result<Vec<_>>>()?;

    // Cauchy-style convergence: successive differences must shrink at least
    // like the alpha ratio, up to a factor 10 of slack.
    let mut worst_contraction: f64 = 0.0;
    for w in 0..alphas.len().saturating_sub(2) {
        let ratio = alphas[w + 2] / alphas[w + 1];
        for (i, ((e0, e1), e2)) in evals[w]
            .iter()
            .zip(&evals[w + 1])
            .zip(&evals[w + 2])
            .enumerate()
        {
            let d1 = e0.max_abs_diff(e1);
            let d2 = e1.max_abs_diff(e2);
            if d1 < 1e-9 {
                continue; // already at the noise floor
            }
            let contraction = d2 / d1;
            worst_contraction = worst_contraction.max(contraction);
            if contraction > 10.0 * ratio {
                let (mut jj, mut kk, mut worst) = (0, 0, 0.0f64);
                for j in 0..n {
                    for k in 0..n {
                        let d = (evals[w + 1][i][(j, k)] - evals[w + 2][i][(j, k)]).norm();
                        if d > worst {
                            worst = d;
                            jj = j;
                            kk = k;
                        }
                    }
                }
                return Err(Error::LimitFailure {
                    i: i + 1,
                    j: jj + 1,
                    k: kk + 1,
                    detail: format!(
                        "no convergence: successive differences contract by {contraction:.3e} > 10 x {ratio:.1e}"
                    ),
                });
            }
        }
    }

    let mut mats = Vec::with_capacity(n);
    let mut raw_residual_max: f64 = 0.0;
    let mut extrapolated_residual_max: f64 = 0.0;
    let mut per_i_residual = vec![0.0f64; n];
    let mut max_imag: f64 = 0.0;
    let last = alphas.len() - 1;
    for i in 0..n {
        let mut m = IMat::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                let ys: Vec<Complex64> = evals.iter().map(|fam| fam[i][(j, k)]).collect();
                let raw = ys[last];
                raw_residual_max = raw_residual_max.max((raw.re - raw.re.round()).abs());
                let ex = extrapolate_to_zero(alphas, &ys);
                max_imag = max_imag.max(ex.im.abs());
                let nearest = ex.re.round();
                let residual = (ex.re - nearest).abs().max(ex.im.abs());
                if residual >= tol {
                    return Err(Error::LimitFailure {
                        i: i + 1,
                        j: j + 1,
                        k: k + 1,
                        detail: format!(
                            "extrapolated value {ex} is {residual:.3e} from the nearest integer (tol {tol:.1e})"
                        ),
                    });
                }
                extrapolated_residual_max = extrapolated_residual_max.max(residual);
                per_i_residual[i] = per_i_residual[i].max(residual);
                m[(j, k)] = nearest as i64;
            }
        }
        mats.push(m);
    }
    let report = LimitReport {
        p,
        alphas: alphas.to_vec(),
        raw_residual_max,
        extrapolated_residual_max,
        per_i_residual,
        max_imag,
        worst_contraction,
    };
    let table = PreFusionTable::new(
        p,
        Method::Limit,
        Stage::Pre,
        mats,
        extrapolated_residual_max,
    );
    Ok((report, table))
}

/// Pre-fusion table along a complex ray alpha = 2 i x t, t over `ts`. The
/// deformed forms built with parameter x at deformation t coincide with the
/// default-x forms at that alpha, so the limit must be x-independent.
pub fn limit_prefusion_along_ray(
    p: u32,
    x: Complex64,
    ts: &[f64],
    tol: f64,
) -> Result<PreFusionTable> {
    require_p(p)?;
    let n = 3 * p as usize - 1;
    let i2 = Complex64::new(0.0, 2.0);
    let evals: Vec<Vec<CMat>> = ts
        .iter()
        .map(|&t| verlinde_at_alpha_complex(p, i2 * x * re(t)))
        .collect::<Result<Vec<_>>>()?;
    let mut mats = Vec::with_capacity(n);
    for i in 0..n {
        let mut m = IMat::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                let ys: Vec<Complex64> = evals.iter().map(|fam| fam[i][(j, k)]).collect();
                let ex = extrapolate_to_zero(ts, &ys);
                let nearest = ex.re.round();
                let residual = (ex.re - nearest).abs().max(ex.im.abs());
                if residual >= tol {
                    return Err(Error::LimitFailure {
                        i: i + 1,
                        j: j + 1,
                        k: k + 1,
                        detail: format!("ray limit off-integer by {residual:.3e} at x = {x}"),
                    });
                }
                m[(j, k)] = nearest as i64;
            }
        }
        mats.push(m);
    }
    Ok(PreFusionTable::new(p, Method::Limit, Stage::Pre, mats, tol))
}

/// M_{diag,p,alpha,I} = diag(S_{I r} / S_{3 r}).
pub fn m_diag(p: u32, alpha: f64, i: usize) -> Result<CMat> {
    require_p(p)?;
    let n = 3 * p as usize - 1;
    if i < 1 || i > n {
        return Err(Error::InvalidParameter(format!(
            "I must lie in 1..={n}, got {i}"
        )));
    }
    let s = s_alpha(p)?.eval(alpha)?;
    let mut m = CMat::zeros(n, n);
    for r in 0..n {
        let d = s[(2, r)];
        if d.norm() < DENOM_FLOOR {
            return Err(Error::DegenerateDenominator {
                r: r + 1,
                magnitude: d.norm(),
            });
        }
        m[(r, r)] = s[(i - 1, r)] * d.finv();
    }
    Ok(m)
}

/// K_{diag,p,alpha} = diag(1 / S_{3 r}).
pub fn k_diag(p: u32, alpha: f64) -> Result<CMat> {
    require_p(p)?;
    let n = 3 * p as usize - 1;
    let s = s_alpha(p)?.eval(alpha)?;
    let mut m = CMat::zeros(n, n);
    for r in 0..n {
        let d = s[(2, r)];
        if d.norm() < DENOM_FLOOR {
            return Err(Error::DegenerateDenominator {
                r: r + 1,
                magnitude: d.norm(),
            });
        }
        m[(r, r)] = d.finv();
    }
    Ok(m)
}

/// E_{p,alpha} = S_{p,alpha} S_p, computed as the product. Block diagonal
/// with unit 2x2 head; see [`e_blockform`] for the closed per-block form.
pub fn build_e(p: u32, alpha: f64) -> Result<CMat> {
    require_p(p)?;
    let s_al = s_alpha(p)?.eval(alpha)?;
    let s = s_matrix(p)?.to_complex();
    s_al.mul(&s)
}

/// Closed block form of E_{p,alpha}:
/// [[s/p - 2/(p a), s/p - 2/(p a), 1/(p a)],
///  [(p-s)/p + 2/(p a), (p-s)/p + 2/(p a), -1/(p a)],
///  [2 - (p-s) a, 2 + s a, 0]].
pub fn e_blockform(p: u32, alpha: f64) -> Result<CMat> {
    require_p(p)?;
    if alpha == 0.0 {
        return Err(Error::InvalidParameter("alpha must be nonzero".into()));
    }
    let pf = p as f64;
    let n = 3 * p as usize - 1;
    let mut m = CMat::identity(n);
    for s in 1..p as usize {
        let o = block_offset(s);
        let sf = s as f64;
        m[(o, o)] = re(sf / pf - 2.0 / (pf * alpha));
        m[(o, o + 1)] = m[(o, o)];
        m[(o, o + 2)] = re(1.0 / (pf * alpha));
        m[(o + 1, o)] = re((pf - sf) / pf + 2.0 / (pf * alpha));
        m[(o + 1, o + 1)] = m[(o + 1, o)];
        m[(o + 1, o + 2)] = re(-1.0 / (pf * alpha));
        m[(o + 2, o)] = re(2.0 - (pf - sf) * alpha);
        m[(o + 2, o + 1)] = re(2.0 + sf * alpha);
        m[(o + 2, o + 2)] = re(0.0);
    }
    Ok(m)
}

/// F_{p,alpha} = K_diag^{-1} E K_p, computed as the product.
pub fn build_f(p: u32, alpha: f64) -> Result<CMat> {
    let e = build_e(p, alpha)?;
    let kd = k_diag(p, alpha)?;
    let (k, _) = k_matrices(p)?;
    kd.inverse()?.mul(&e)?.mul(&k.to_complex())
}

/// Closed block form of F_{p,alpha}: unit 2x2 head and blocks
/// [[0, 2(j a - 2) s1 (c1 a + 2 s1)/(p^3 a^2), (-1)^(j+p+1) sqrt(2p)(c1 a + 2 s1)/(p^3 a^2)],
///  [0, 2((p-j) a + 2) s1 (c1 a + 2 s1)/(p^3 a^2), (-1)^(j+p) sqrt(2p)(c1 a + 2 s1)/(p^3 a^2)],
///  [1, -2 s1 (c1 a + 2 s1)/(p^2 a), 0]]
/// with c1 = cos(pi j/p), s1 = sin(pi j/p).
pub fn f_blockform(p: u32, alpha: f64) -> Result<CMat> {
    require_p(p)?;
    if alpha == 0.0 {
        return Err(Error::InvalidParameter("alpha must be nonzero".into()));
    }
    let pf = p as f64;
    let n = 3 * p as usize - 1;
    let mut m = CMat::identity(n);
    for j in 1..p as usize {
        let o = block_offset(j);
        let jf = j as f64;
        let c1 = (PI * jf / pf).cos();
        let s1 = (PI * jf / pf).sin();
        let common = c1 * alpha + 2.0 * s1;
        let p3a2 = pf * pf * pf * alpha * alpha;
        let sgn = if (j + p as usize + 1) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        m[(o, o)] = re(0.0);
        m[(o, o + 1)] = re(2.0 * (jf * alpha - 2.0) * s1 * common / p3a2);
        m[(o, o + 2)] = re(sgn * (2.0 * pf).sqrt() * common / p3a2);
        m[(o + 1, o)] = re(0.0);
        m[(o + 1, o + 1)] = re(2.0 * ((pf - jf) * alpha + 2.0) * s1 * common / p3a2);
        m[(o + 1, o + 2)] = re(-sgn * (2.0 * pf).sqrt() * common / p3a2);
        m[(o + 2, o)] = re(1.0);
        m[(o + 2, o + 1)] = re(-2.0 * s1 * common / (pf * pf * alpha));
        m[(o + 2, o + 2)] = re(0.0);
    }
    Ok(m)
}

/// Residuals of the three factorization legs.
#[derive(Debug, Clone)]
pub struct FactorizationReport {
    pub p: u32,
    /// leg (a): || S_{p,alpha} E - S_p || at each alpha
    pub leg_a: Vec<(f64, f64)>,
    /// leg (b): || E^{-1} K_diag F - K_p || at each alpha
    pub leg_b: Vec<(f64, f64)>,
    /// leg (c): per-I residual of lim F^{-1} M_diag,I F = M_{p,I}
    pub leg_c: Vec<f64>,
    pub tol_ab: f64,
    pub tol_c: f64,
}

impl FactorizationReport {
    /// tol_ab applies at the largest alpha (the first entry); leg (c) must
    /// hold for every I.
    pub fn passed(&self) -> bool {
        self.leg_a.first().is_some_and(|&(_, r)| r < self.tol_ab)
            && self.leg_b.first().is_some_and(|&(_, r)| r < self.tol_ab)
            && self.leg_c.iter().all(|&r| r < self.tol_c)
    }

    pub fn max_residual(&self) -> f64 {
        let ab = self
            .leg_a
            .iter()
            .chain(self.leg_b.iter())
            .fold(0.0f64, |m, &(_, r)| m.max(r));
        self.leg_c.iter().fold(ab, |m, &r| m.max(r))
    }
}

/// Check the three legs of the equivalence factorization:
/// (a) S_{p,alpha} E_{p,alpha} = S_p,
/// (b) E^{-1} K_diag F = K_p,
/// (c) lim_{alpha->0} F^{-1} M_diag,I F = M_{p,I} for every I.
pub fn verify_equivalence_factorization(
    p: u32,
    alphas: &[f64],
    tol_ab: f64,
    tol_c: f64,
) -> Result<FactorizationReport> {
    require_p(p)?;
    let n = 3 * p as usize - 1;
    let s_al = s_alpha(p)?;
    let s = s_matrix(p)?.to_complex();
    let (k, _) = k_matrices(p)?;
    let kc = k.to_complex();
    let (pm, _) = p_matrices(p)?;

    // Legs (a) and (b) are exact matrix identities at fixed alpha; tol_ab is
    // enforced at the largest alpha of the schedule, where the O(1/alpha)
    // cancellations in E^{-1} do not yet amplify roundoff. Smaller alphas
    // are still recorded in the report.
    let mut leg_a = Vec::new();
    let mut leg_b = Vec::new();
    for (idx, &alpha) in alphas.iter().enumerate() {
        let enforce = idx == 0;
        let e = build_e(p, alpha)?;
        let sa = s_al.eval(alpha)?;
        let res_a = sa.mul(&e)?.max_abs_diff(&s);
        if enforce && res_a >= tol_ab {
            return Err(Error::FactorizationFailure {
                leg: 'a',
                detail: format!("p={p} alpha={alpha}: |S_alpha E - S_p| = {res_a:.3e}"),
            });
        }
        leg_a.push((alpha, res_a));
        let kd = k_diag(p, alpha)?;
        let f = build_f(p, alpha)?;
        let res_b = e.inverse()?.mul(&kd)?.mul(&f)?.max_abs_diff(&kc);
        if enforce && res_b >= tol_ab {
            return Err(Error::FactorizationFailure {
                leg: 'b',
                detail: format!("p={p} alpha={alpha}: |E^-1 K_diag F - K_p| = {res_b:.3e}"),
            });
        }
        leg_b.push((alpha, res_b));
    }

    // leg (c): extrapolate F^{-1} M_diag,I F over the schedule
    let mut leg_c = Vec::with_capacity(n);
    let mut conjugated: Vec<Vec<CMat>> = Vec::new();
    for &alpha in alphas {
        let f = build_f(p, alpha)?;
        let f_inv = f.inverse()?;
        let per_i = (1..=n)
            .map(|i| {
                let md = m_diag(p, alpha, i)?;
                f_inv.mul(&md)?.mul(&f)
            })
            .collect::<Result<Vec<_>>>()?;
        conjugated.push(per_i);
    }
    for i in 1..=n {
        let target = m_matrix_from_p(&pm, p, i)?.to_complex();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k_ in 0..n {
                let ys: Vec<Complex64> = conjugated.iter().map(|fam| fam[i - 1][(j, k_)]).collect();
                let ex = extrapolate_to_zero(alphas, &ys);
                worst = worst.max((ex - target[(j, k_)]).norm());
            }
        }
        if worst >= tol_c {
            return Err(Error::FactorizationFailure {
                leg: 'c',
                detail: format!("p={p} I={i}: |lim F^-1 M_diag F - M_I| = {worst:.3e}"),
            });
        }
        leg_c.push(worst);
    }
    Ok(FactorizationReport {
        p,
        leg_a,
        leg_b,
        leg_c,
        tol_ab,
        tol_c,
    })
}

/// Largest entrywise distance between the extrapolated limit values and the
/// integer block-diagonalisation table; the quantitative content of the
/// equivalence theorem.
pub fn equivalence_discrepancy(p: u32, alphas: &[f64], reference: &RMat, i: usize) -> Result<f64> {
    let n = 3 * p as usize - 1;
    let evals: Vec<Vec<CMat>> = alphas
        .iter()
        .map(|&a| verlinde_at_alpha(p, a))
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let ys: Vec<Complex64> = evals.iter().map(|fam| fam[i - 1][(j, k)]).collect();
            let ex = extrapolate_to_zero(alphas, &ys);
            worst = worst.max((ex - re(reference[(j, k)])).norm());
        }
    }
    Ok(worst)
}
