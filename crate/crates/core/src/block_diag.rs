//! The extended block-diagonalisation method: the alpha-free matrices S_p,
//! K_p, P_p = S_p K_p, the per-label upper-triangular blocks M_{p,I}, and the
//! pre-fusion coefficient matrices N_{p,I} = P_p M_{p,I} P_p^{-1}.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{require_p, Error, Result};
use crate::laurent::{AlphaMatrix, LaurentScalar};
use crate::matrix::{IMat, RMat};
use crate::reps::permutation_newseq;
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

fn pow_m1(k: u32) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Integer-rounding threshold for the pre-fusion matrices. Anything farther
/// from an integer is a hard error, never silently rounded.
pub const ROUND_TOL: f64 = 1e-7;

/// The change-of-basis matrix C_p(alpha) and its closed-form inverse,
/// verified mutually inverse as Laurent matrices.
pub fn c_matrices(p: u32) -> Result<(AlphaMatrix, AlphaMatrix)> {
    require_p(p)?;
    let pf = p as f64;
    let n = 3 * p as usize - 1;
    let mut c = AlphaMatrix::identity(n);
    let mut c_inv = AlphaMatrix::identity(n);
    let with_inv_alpha =
        |c0: f64, cm1: f64| LaurentScalar::from_terms(&[(0, re(c0)), (-1, re(cm1))]);
    let affine = |c0: f64, c1: f64| LaurentScalar::from_terms(&[(0, re(c0)), (1, re(c1))]);
    for s in 1..p as usize {
        let o = block_offset(s);
        let sf = s as f64;
        // C_{p,s}(alpha)
        *c.entry_mut(o, o) = with_inv_alpha((pf + sf) / (2.0 * pf), 1.0 / pf);
        *c.entry_mut(o, o + 1) = with_inv_alpha(sf / (2.0 * pf), 1.0 / pf);
        *c.entry_mut(o, o + 2) = with_inv_alpha(0.0, -1.0 / (2.0 * pf));
        *c.entry_mut(o + 1, o) = with_inv_alpha((pf - sf) / (2.0 * pf), -1.0 / pf);
        *c.entry_mut(o + 1, o + 1) = with_inv_alpha((2.0 * pf - sf) / (2.0 * pf), -1.0 / pf);
        *c.entry_mut(o + 1, o + 2) = with_inv_alpha(0.0, 1.0 / (2.0 * pf));
        *c.entry_mut(o + 2, o) = with_inv_alpha((pf + sf) / pf, 2.0 / pf);
        *c.entry_mut(o + 2, o + 1) = with_inv_alpha((2.0 * pf + sf) / pf, 2.0 / pf);
        *c.entry_mut(o + 2, o + 2) = with_inv_alpha(0.0, -1.0 / pf);
        // C_{p,s}^{-1}(alpha)
        *c_inv.entry_mut(o, o) = LaurentScalar::from_real(2.0);
        *c_inv.entry_mut(o, o + 1) = LaurentScalar::from_real(1.0);
        *c_inv.entry_mut(o, o + 2) = LaurentScalar::from_real(-0.5);
        *c_inv.entry_mut(o + 1, o) = LaurentScalar::from_real(-1.0);
        *c_inv.entry_mut(o + 1, o + 1) = LaurentScalar::from_real(0.0);
        *c_inv.entry_mut(o + 1, o + 2) = LaurentScalar::from_real(0.5);
        *c_inv.entry_mut(o + 2, o) = affine(2.0, sf);
        *c_inv.entry_mut(o + 2, o + 1) = affine(2.0, pf + sf);
        *c_inv.entry_mut(o + 2, o + 2) = affine(0.0, -pf / 2.0);
    }
    let residual = c.mul(&c_inv)?.identity_residual();
    if residual > 1e-10 {
        return Err(Error::Numerical(format!(
            "C_p(alpha) C_p^(-1)(alpha) != 1, residual {residual:.3e}"
        )));
    }
    Ok((c, c_inv))
}

/// C'_p(alpha): the 2-row blocks obtained from the 2x2 blocks of
/// C_{irr,p}(tau) by trading the tau-linear parts i(s-p)tau chi+ + i s tau
/// chi- for (2/alpha)(chi+ + chi-) - (1/alpha) chi~. Embedded in a full
/// square matrix whose tilde rows are zero; an independent route to the
/// irreducible rows of C_p(alpha).
pub fn c_prime(p: u32) -> Result<AlphaMatrix> {
    require_p(p)?;
    let pf = p as f64;
    let n = 3 * p as usize - 1;
    let mut c = AlphaMatrix::zeros(n);
    *c.entry_mut(0, 0) = LaurentScalar::from_real(1.0);
    *c.entry_mut(1, 1) = LaurentScalar::from_real(1.0);
    for s in 1..p as usize {
        let o = block_offset(s);
        let sf = s as f64;
        // C_{irr,p}(tau) block:
        //   [ (s+p)/2p - i tau (p-s)/2p ,   s/2p + i tau s/2p   ]
        //   [ (p-s)/2p + i tau (p-s)/2p , (2p-s)/2p - i tau s/2p ]
        // Each row's tau-part is w * [i(s-p)tau chi+ + i s tau chi-] with
        // w = 1/(2p) for row 1 and w = -1/(2p) for row 2, replaced by
        // w * [(2/alpha)(chi+ + chi-) - (1/alpha) chi~].
        *c.entry_mut(o, o) =
            LaurentScalar::from_terms(&[(0, re((sf + pf) / (2.0 * pf))), (-1, re(1.0 / pf))]);
        *c.entry_mut(o, o + 1) =
            LaurentScalar::from_terms(&[(0, re(sf / (2.0 * pf))), (-1, re(1.0 / pf))]);
        *c.entry_mut(o, o + 2) = LaurentScalar::term(re(-1.0 / (2.0 * pf)), -1);
        *c.entry_mut(o + 1, o) =
            LaurentScalar::from_terms(&[(0, re((pf - sf) / (2.0 * pf))), (-1, re(-1.0 / pf))]);
        *c.entry_mut(o + 1, o + 1) = LaurentScalar::from_terms(&[
            (0, re((2.0 * pf - sf) / (2.0 * pf))),
            (-1, re(-1.0 / pf)),
        ]);
        *c.entry_mut(o + 1, o + 2) = LaurentScalar::term(re(1.0 / (2.0 * pf)), -1);
    }
    Ok(c)
}

/// The alpha-free S-matrix S_p of the extended block-diagonalisation method.
pub fn s_matrix(p: u32) -> Result<RMat> {
    require_p(p)?;
    let pf = p as f64;
    let n = 3 * p as usize - 1;
    let norm = 1.0 / (2.0 * pf).sqrt();
    let mut m = RMat::zeros(n, n);
    m[(0, 0)] = norm;
    m[(0, 1)] = norm;
    m[(1, 0)] = norm;
    m[(1, 1)] = norm * pow_m1(p);
    for l in 1..p as usize {
        let co = block_offset(l);
        let sgn = pow_m1(p + l as u32); // (-1)^(p-l)
        m[(0, co)] = 2.0 * norm;
        m[(0, co + 1)] = 2.0 * norm;
        m[(1, co)] = 2.0 * norm * sgn;
        m[(1, co + 1)] = 2.0 * norm * sgn;
    }
    for s in 1..p as usize {
        let ro = block_offset(s);
        let sf = s as f64;
        let sgn = pow_m1(p + s as u32);
        m[(ro, 0)] = norm * sf / pf;
        m[(ro, 1)] = norm * sgn * sf / pf;
        m[(ro + 1, 0)] = norm * (pf - sf) / pf;
        m[(ro + 1, 1)] = norm * sgn * (pf - sf) / pf;
        m[(ro + 2, 0)] = 2.0 * norm;
        m[(ro + 2, 1)] = 2.0 * norm * sgn;
        for l in 1..p as usize {
            let co = block_offset(l);
            let lf = l as f64;
            let c = (PI * sf * lf / pf).cos();
            let sn = (PI * sf * lf / pf).sin();
            let f = 2.0 * norm * pow_m1(p + s as u32 + l as u32);
            m[(ro, co)] = f * (sf / pf * c + (pf - lf) / pf * sn);
            m[(ro, co + 1)] = f * (sf / pf * c - lf / pf * sn);
            m[(ro + 1, co)] = f * ((pf - sf) / pf * c - (pf - lf) / pf * sn);
            m[(ro + 1, co + 1)] = f * ((pf - sf) / pf * c + lf / pf * sn);
            m[(ro + 2, co)] = f * (2.0 * c + 2.0 * sn);
            m[(ro + 2, co + 1)] = f * (2.0 * c + 2.0 * sn);
            m[(ro + 2, co + 2)] = -f * sn;
        }
    }
    Ok(m)
}

/// K_p and its blockwise inverse.
///
/// Head block diag(sqrt(2p^3), (-1)^(p+1) sqrt(2p^3)); each 3x3 block has
/// third row (0,0,1), determinant one, and first column proportional to
/// 1/sin(pi l/p) so that S_p K_p reproduces the vacuum row (1,1,1,0,0,...).
pub fn k_matrices(p: u32) -> Result<(RMat, RMat)> {
    require_p(p)?;
    let pf = p as f64;
    let n = 3 * p as usize - 1;
    let mut k = RMat::zeros(n, n);
    let mut k_inv = RMat::zeros(n, n);
    let head = (2.0 * pf * pf * pf).sqrt();
    k[(0, 0)] = head;
    k[(1, 1)] = pow_m1(p + 1) * head;
    k_inv[(0, 0)] = 1.0 / head;
    k_inv[(1, 1)] = pow_m1(p + 1) / head;
    for l in 1..p as usize {
        let o = block_offset(l);
        let lf = l as f64;
        let c1 = (PI * lf / pf).cos();
        let s1 = (PI * lf / pf).sin();
        if s1.abs() < 1e-14 {
            return Err(Error::Numerical(format!("sin(pi {l}/{p}) vanishes")));
        }
        let sgn = pow_m1(p + l as u32 + 1);
        let a = sgn * (pf / 2.0).sqrt() / s1;
        let b = -sgn * (2.0 / (pf * pf * pf)).sqrt() * (c1 - lf * s1);
        let cc = -a;
        let d = sgn * (2.0 / (pf * pf * pf)).sqrt() * (c1 + (pf - lf) * s1);
        k[(o, o)] = a;
        k[(o, o + 1)] = b;
        k[(o + 1, o)] = cc;
        k[(o + 1, o + 1)] = d;
        k[(o + 2, o + 2)] = 1.0;
        // det of the 2x2 part is one, so the adjugate inverts it
        let det = a * d - b * cc;
        k_inv[(o, o)] = d / det;
        k_inv[(o, o + 1)] = -b / det;
        k_inv[(o + 1, o)] = -cc / det;
        k_inv[(o + 1, o + 1)] = a / det;
        k_inv[(o + 2, o + 2)] = 1.0;
    }
    Ok((k, k_inv))
}

/// P_p = S_p K_p and P_p^{-1} = K_p^{-1} S_p.
pub fn p_matrices(p: u32) -> Result<(RMat, RMat)> {
    let s = s_matrix(p)?;
    let (k, k_inv) = k_matrices(p)?;
    let pm = s.mul(&k)?;
    let pm_inv = k_inv.mul(&s)?;
    let residual = pm.mul(&pm_inv)?.identity_residual();
    if residual > 1e-10 {
        return Err(Error::Numerical(format!(
            "P P^(-1) != 1, residual {residual:.3e}"
        )));
    }
    Ok((pm, pm_inv))
}

/// Closed block forms of P_p, the cross-check for the S_p K_p product. The
/// overall block normalisations are the ones forced by the vacuum row; the
/// 3x3 blocks carry no extra factor.
pub fn p_blockform(p: u32) -> Result<RMat> {
    require_p(p)?;
    let pf = p as f64;
    let n = 3 * p as usize - 1;
    let mut m = RMat::zeros(n, n);
    m[(0, 0)] = pf;
    m[(0, 1)] = pow_m1(p + 1) * pf;
    m[(1, 0)] = pf;
    m[(1, 1)] = -pf;
    for l in 1..p as usize {
        let o = block_offset(l);
        let s1 = (PI * l as f64 / pf).sin();
        m[(0, o + 1)] = pow_m1(p + l as u32 + 1) * 2.0 / pf * s1;
        m[(1, o + 1)] = -2.0 / pf * s1;
    }
    for s in 1..p as usize {
        let ro = block_offset(s);
        let sf = s as f64;
        let sgn = pow_m1(s as u32 + 1);
        m[(ro, 0)] = sf;
        m[(ro, 1)] = sgn * sf;
        m[(ro + 1, 0)] = pf - sf;
        m[(ro + 1, 1)] = sgn * (pf - sf);
        m[(ro + 2, 0)] = 2.0 * pf;
        m[(ro + 2, 1)] = 2.0 * sgn * pf;
        for l in 1..p as usize {
            let co = block_offset(l);
            let lf = l as f64;
            let csl = (PI * sf * lf / pf).cos();
            let ssl = (PI * sf * lf / pf).sin();
            let c1l = (PI * lf / pf).cos();
            let s1l = (PI * lf / pf).sin();
            m[(ro, co)] = sgn * ssl / s1l;
            m[(ro, co + 1)] = sgn * 2.0 / (pf * pf) * (sf * csl * s1l - ssl * c1l);
            m[(ro + 1, co)] = -sgn * ssl / s1l;
            m[(ro + 1, co + 1)] = sgn * 2.0 / (pf * pf) * ((pf - sf) * csl * s1l + ssl * c1l);
            m[(ro + 2, co + 1)] = sgn * 4.0 / pf * (csl + ssl) * s1l;
            m[(ro + 2, co + 2)] = pow_m1(p + s as u32 + l as u32 + 1) * (2.0 / pf).sqrt() * ssl;
        }
    }
    Ok(m)
}

/// The upper-triangular block-diagonal matrix M_{p,I} read off from row I
/// (1-based) of P_p.
pub fn m_matrix(p: u32, i: usize) -> Result<RMat> {
    let (pm, _) = p_matrices(p)?;
    m_matrix_from_p(&pm, p, i)
}

pub(crate) fn m_matrix_from_p(pm: &RMat, p: u32, i: usize) -> Result<RMat> {
    let n = 3 * p as usize - 1;
    if i < 1 || i > n {
        return Err(Error::InvalidParameter(format!(
            "I must lie in 1..={n}, got {i}"
        )));
    }
    let row = i - 1;
    let mut m = RMat::zeros(n, n);
    m[(0, 0)] = pm[(row, 0)];
    m[(1, 1)] = pm[(row, 1)];
    for b in 1..p as usize {
        let o = block_offset(b);
        m[(o, o)] = pm[(row, o)];
        m[(o, o + 1)] = pm[(row, o + 1)];
        m[(o, o + 2)] = pm[(row, o + 2)];
        m[(o + 1, o + 1)] = pm[(row, o)];
        m[(o + 2, o + 2)] = pm[(row, o)];
    }
    Ok(m)
}

/// Everything the extended method produces for one p.
#[derive(Debug, Clone)]
pub struct BlockDiagPipeline {
    pub p: u32,
    pub c: AlphaMatrix,
    pub c_inv: AlphaMatrix,
    pub s: RMat,
    pub k: RMat,
    pub k_inv: RMat,
    pub p_mat: RMat,
    pub p_inv: RMat,
    pub m: Vec<RMat>,
}

impl BlockDiagPipeline {
    pub fn build(p: u32) -> Result<Self> {
        let (c, c_inv) = c_matrices(p)?;
        let s = s_matrix(p)?;
        let (k, k_inv) = k_matrices(p)?;
        let (p_mat, p_inv) = p_matrices(p)?;
        let n = 3 * p as usize - 1;
        let m = (1..=n)
            .map(|i| m_matrix_from_p(&p_mat, p, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockDiagPipeline {
            p,
            c,
            c_inv,
            s,
            k,
            k_inv,
            p_mat,
            p_inv,
            m,
        })
    }
}

/// Pre-fusion matrices N_{p,I} = P M_{p,I} P^{-1}, rounded to integers.
pub fn prefusion_matrices(p: u32) -> Result<PreFusionTable> {
    let pipeline = BlockDiagPipeline::build(p)?;
    prefusion_from_pipeline(&pipeline)
}

pub fn prefusion_from_pipeline(pipeline: &BlockDiagPipeline) -> Result<PreFusionTable> {
    let p = pipeline.p;
    let n = 3 * p as usize - 1;
    let mut mats = Vec::with_capacity(n);
    let mut max_residual: f64 = 0.0;
    for i in 1..=n {
        let prod = pipeline
            .p_mat
            .mul(&pipeline.m[i - 1])?
            .mul(&pipeline.p_inv)?;
        let (rounded, residual) = prod.round_to_integers();
        if residual >= ROUND_TOL {
            let mut worst = (0usize, 0usize, 0.0f64, 0.0f64);
            for r in 0..n {
                for c in 0..n {
                    let v = prod[(r, c)];
                    let res = (v - v.round()).abs();
                    if res > worst.3 {
                        worst = (r, c, v, res);
                    }
                }
            }
            return Err(Error::IntegralityFailure {
                i,
                j: worst.0 + 1,
                k: worst.1 + 1,
                value: worst.2,
                residual: worst.3,
            });
        }
        max_residual = max_residual.max(residual);
        mats.push(rounded);
    }
    Ok(PreFusionTable::new(
        p,
        Method::BlockDiag,
        Stage::Pre,
        mats,
        max_residual,
    ))
}

/// Apply the reordering permutation, check that the upper-right 2p x (p-1)
/// block of every irreducible-label matrix is exactly zero, and return the
/// leading 2p x 2p blocks (the "small"-method matrices).
pub fn project_small(p: u32, table: &PreFusionTable) -> Result<Vec<IMat>> {
    require_p(p)?;
    let n = 3 * p as usize - 1;
    let n_irr = 2 * p as usize;
    if table.p != p || table.matrices.len() != n {
        return Err(Error::ShapeMismatch(
            "table does not match the requested p".into(),
        ));
    }
    let perm = permutation_newseq(p)?;
    let perm0 = perm.zero_based();
    let permuted_family = perm.apply_to_family(&table.matrices);
    let mut small = Vec::with_capacity(n_irr);
    for (new_i, mat) in permuted_family.iter().enumerate().take(n_irr) {
        let permuted = mat.permute_symmetric(&perm0);
        for r in 0..n_irr {
            for c in n_irr..n {
                let v = permuted[(r, c)];
                if v != 0 {
                    return Err(Error::ProjectionViolation {
                        i: new_i + 1,
                        row: r + 1,
                        col: c + 1,
                        value: v,
                    });
                }
            }
        }
        small.push(permuted.block(0, 0, n_irr, n_irr));
    }
    Ok(small)
}
