//! The alpha-dependent modular matrices S_{p,alpha} and T_{p,alpha} on the
//! basis of vacuum torus amplitudes, the S-transformation of the underlying
//! theta vector, and the change-of-basis matrix B connecting the two.
//!
//! Conventions. The theta vector is
//!   (1/eta) (Theta_0, ..., Theta_p, dTheta_1, ..., dTheta_{p-1},
//!            tau dTheta_1, ..., tau dTheta_{p-1});
//! the last p-1 components realise the "-(nabla Theta)" slots with a factor
//! -i absorbed (tau dTheta = -i nabla Theta). With that convention the
//! S-transformation of the vector is exactly the matrix built by
//! [`theta_transform`] (cosine block plus two +-i sine blocks), and the
//! coefficient of the deformed forms in [`b_matrix`] is +i*alpha.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{require_p, Error, Result};
use crate::laurent::{AlphaMatrix, LaurentScalar};
use crate::matrix::CMat;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Block layout of the (3p-1)-dimensional basis: one 2-block then p-1
/// 3-blocks. Returns the 0-based offset of block `b` (b = 0 is the 2-block).
fn block_offset(b: usize) -> usize {
    if b == 0 {
        0
    } else {
        2 + 3 * (b - 1)
    }
}

/// The alpha-dependent S-matrix assembled from its closed-form blocks.
pub fn s_alpha(p: u32) -> Result<AlphaMatrix> {
    require_p(p)?;
    let pf = p as f64;
    let n = 3 * p as usize - 1;
    let norm = 1.0 / (2.0 * pf).sqrt();
    let mut m = AlphaMatrix::zeros(n);

    let set = |m: &mut AlphaMatrix, i: usize, j: usize, terms: &[(i32, f64)]| {
        *m.entry_mut(i, j) =
            LaurentScalar::from_terms(&terms.iter().map(|&(d, c)| (d, re(c))).collect::<Vec<_>>());
    };

    // S(p)_{0,0}
    set(&mut m, 0, 0, &[(0, norm)]);
    set(&mut m, 0, 1, &[(0, norm)]);
    set(&mut m, 1, 0, &[(0, norm)]);
    set(&mut m, 1, 1, &[(0, norm * pow_m1(p))]);

    for l in 1..p as usize {
        let co = block_offset(l);
        // S(p)_{0,l}: 2 x 3
        let sgn = pow_m1(p + l as u32); // (-1)^(p-l)
        set(&mut m, 0, co, &[(0, 2.0 * norm)]);
        set(&mut m, 0, co + 1, &[(0, 2.0 * norm)]);
        set(&mut m, 1, co, &[(0, 2.0 * norm * sgn)]);
        set(&mut m, 1, co + 1, &[(0, 2.0 * norm * sgn)]);
    }

    for s in 1..p as usize {
        let ro = block_offset(s);
        let sf = s as f64;
        // S(p)_{s,0}: 3 x 2
        let sgn = pow_m1(p + s as u32); // (-1)^(p+s)
        set(&mut m, ro, 0, &[(0, norm * sf / pf)]);
        set(&mut m, ro, 1, &[(0, norm * sgn * sf / pf)]);
        set(&mut m, ro + 1, 0, &[(0, norm * (pf - sf) / pf)]);
        set(&mut m, ro + 1, 1, &[(0, norm * sgn * (pf - sf) / pf)]);
        set(&mut m, ro + 2, 0, &[(0, norm * 2.0)]);
        set(&mut m, ro + 2, 1, &[(0, norm * 2.0 * sgn)]);

        for l in 1..p as usize {
            let co = block_offset(l);
            let lf = l as f64;
            let c = (PI * sf * lf / pf).cos();
            let sn = (PI * sf * lf / pf).sin();
            let f = 2.0 * norm * pow_m1(p + s as u32 + l as u32);
            // rows 1..2 carry 1/alpha, row 3 carries alpha
            set(
                &mut m,
                ro,
                co,
                &[(0, f * sf / pf * c), (-1, f * 2.0 / pf * sn)],
            );
            set(
                &mut m,
                ro,
                co + 1,
                &[(0, f * sf / pf * c), (-1, f * 2.0 / pf * sn)],
            );
            set(&mut m, ro, co + 2, &[(-1, -f / pf * sn)]);
            set(
                &mut m,
                ro + 1,
                co,
                &[(0, f * (pf - sf) / pf * c), (-1, -f * 2.0 / pf * sn)],
            );
            set(
                &mut m,
                ro + 1,
                co + 1,
                &[(0, f * (pf - sf) / pf * c), (-1, -f * 2.0 / pf * sn)],
            );
            set(&mut m, ro + 1, co + 2, &[(-1, f / pf * sn)]);
            set(
                &mut m,
                ro + 2,
                co,
                &[(0, f * 2.0 * c), (1, -f * (pf - lf) * sn)],
            );
            set(
                &mut m,
                ro + 2,
                co + 1,
                &[(0, f * 2.0 * c), (1, f * lf * sn)],
            );
            // (3,3) entry of the alpha block is zero
        }
    }
    Ok(m)
}

fn pow_m1(k: u32) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Diagonal phase of the s-th 3-block of T: exp(i pi ((p-s)^2/(2p) - 1/12)).
///
/// The sign of the exponent is pinned by the tau -> tau+1 transformation of
/// the q-series basis (and the vacuum phase exp(2 pi i (h - c/24))); see the
/// T-transform tests in [`crate::theta`].
fn t_phase(p: u32, s: u32) -> Complex64 {
    let pf = p as f64;
    let sf = s as f64;
    Complex64::from_polar(1.0, PI * ((pf - sf) * (pf - sf) / (2.0 * pf) - 1.0 / 12.0))
}

/// The alpha-dependent T-matrix: direct sum of the 2x2 head and one lower
/// triangular 3x3 block per theta index.
pub fn t_alpha(p: u32) -> Result<AlphaMatrix> {
    require_p(p)?;
    let n = 3 * p as usize - 1;
    let mut m = AlphaMatrix::zeros(n);
    // head block: phases for Theta_0/eta and Theta_p/eta
    *m.entry_mut(0, 0) = LaurentScalar::constant(Complex64::from_polar(1.0, -PI / 12.0));
    *m.entry_mut(1, 1) = LaurentScalar::constant(Complex64::from_polar(
        1.0,
        PI * (p as f64 / 2.0 - 1.0 / 12.0),
    ));
    let i = Complex64::new(0.0, 1.0);
    for s in 1..p {
        let o = block_offset(s as usize);
        let t = t_phase(p, s);
        *m.entry_mut(o, o) = LaurentScalar::constant(t);
        *m.entry_mut(o + 1, o + 1) = LaurentScalar::constant(t);
        *m.entry_mut(o + 2, o + 2) = LaurentScalar::constant(t);
        *m.entry_mut(o + 2, o) = LaurentScalar::term(i * re((p - s) as f64) * t, 1);
        *m.entry_mut(o + 2, o + 1) = LaurentScalar::term(-i * re(s as f64) * t, 1);
    }
    Ok(m)
}

/// S-transformation matrix of the theta vector: one cosine block over the
/// Theta components (with halved first and last columns) and two +-i sine
/// blocks coupling the dTheta and tau*dTheta sectors.
pub fn theta_transform(p: u32) -> Result<CMat> {
    require_p(p)?;
    let pf = p as f64;
    let n = 3 * p as usize - 1;
    let pu = p as usize;
    let f = (2.0 / pf).sqrt();
    let i = Complex64::new(0.0, 1.0);
    let mut m = CMat::zeros(n, n);
    for r in 0..=pu {
        for c in 0..=pu {
            let w = if c == 0 || c == pu { 0.5 } else { 1.0 };
            m[(r, c)] = re(w * f * (PI * (r as f64) * (c as f64) / pf).cos());
        }
    }
    for k in 1..pu {
        for l in 1..pu {
            let s = f * (PI * (k as f64) * (l as f64) / pf).sin();
            // (tau dTheta)-row 2p+k, dTheta-column p+l+1 (1-based)
            m[(2 * pu + k - 1, pu + l)] = i * re(s);
            // dTheta-row p+k+1, (tau dTheta)-column 2p+l (1-based)
            m[(pu + k, 2 * pu + l - 1)] = -i * re(s);
        }
    }
    Ok(m)
}

/// The coefficient matrix B with chi_p(alpha) = B Theta_p.
///
/// Columns: Theta_lambda at 1-based column lambda+1 (lambda = 0..p), dTheta_m
/// at column p+1+m, tau*dTheta_m at column 2p+m (m = 1..p-1). Rows follow the
/// canonical basis ordering; the tilde rows carry 2 on their Theta column and
/// -2 x alpha on their tau*dTheta column (x = -i/2 gives +i alpha).
pub fn b_matrix(p: u32, alpha: Complex64, x: Complex64) -> Result<CMat> {
    require_p(p)?;
    if alpha.norm() == 0.0 {
        return Err(Error::InvalidParameter("alpha must be nonzero".into()));
    }
    let pf = p as f64;
    let pu = p as usize;
    let n = 3 * pu - 1;
    let mut b = CMat::zeros(n, n);
    b[(0, 0)] = re(1.0); // chi^+_{0,p} = Theta_0 / eta
    b[(1, pu)] = re(1.0); // chi^-_{p,p} = Theta_p / eta
    for s in 1..pu {
        let lambda = pu - s; // theta index of triple s
        let row = block_offset(s);
        let col_theta = lambda; // 0-based: Theta_lambda
        let col_dtheta = pu + lambda; // 0-based: dTheta_lambda
        let col_nabla = 2 * pu - 1 + lambda; // 0-based: tau dTheta_lambda
        let sf = s as f64;
        // chi^+_{p-s,p} = (1/(p eta)) [ s Theta_{p-s} + dTheta_{p-s} ]
        b[(row, col_theta)] = re(sf / pf);
        b[(row, col_dtheta)] = re(1.0 / pf);
        // chi^-_{p-s,p} = (1/(p eta)) [ (p-s) Theta_{p-s} - dTheta_{p-s} ]
        b[(row + 1, col_theta)] = re((pf - sf) / pf);
        b[(row + 1, col_dtheta)] = re(-1.0 / pf);
        // chi~_{p-s,p}(alpha,x) = (1/eta) [ 2 Theta + 2 x i alpha nabla ]
        //                       = (1/eta) [ 2 Theta - 2 x alpha (tau dTheta) ]
        b[(row + 2, col_theta)] = re(2.0);
        b[(row + 2, col_nabla)] = re(-2.0) * x * alpha;
    }
    Ok(b)
}

/// Default deformation: x = -i/2, so the tilde coefficient is +i alpha.
pub const DEFAULT_X: Complex64 = Complex64 { re: 0.0, im: -0.5 };

/// Two-path construction of the evaluated S-matrix: B Frak(S) B^{-1}.
pub fn s_via_b(p: u32, alpha: f64) -> Result<CMat> {
    if alpha == 0.0 {
        return Err(Error::InvalidParameter("alpha must be nonzero".into()));
    }
    let b = b_matrix(p, re(alpha), DEFAULT_X)?;
    let frak = theta_transform(p)?;
    let b_inv = b.inverse()?;
    b.mul(&frak)?.mul(&b_inv)
}

/// Residual report for the SL(2,Z) generator relations.
#[derive(Debug, Clone)]
pub struct GroupRelationsReport {
    pub p: u32,
    /// Symbolic residual of S^2 = 1 (Laurent cancellation).
    pub s_squared_residual: f64,
    /// (alpha, residual) for (S T)^3 = 1 at each evaluated alpha.
    pub st_cubed_residuals: Vec<(f64, f64)>,
    pub tol: f64,
}

impl GroupRelationsReport {
    pub fn passed(&self) -> bool {
        self.s_squared_residual < self.tol
            && self.st_cubed_residuals.iter().all(|&(_, r)| r < self.tol)
    }

    pub fn max_residual(&self) -> f64 {
        self.st_cubed_residuals
            .iter()
            .fold(self.s_squared_residual, |m, &(_, r)| m.max(r))
    }
}

/// Check S^2 = 1 symbolically and (S T)^3 = 1 at each alpha.
pub fn verify_group_relations(p: u32, alphas: &[f64], tol: f64) -> Result<GroupRelationsReport> {
    let s = s_alpha(p)?;
    let t = t_alpha(p)?;
    let s_squared_residual = s.mul(&s)?.identity_residual();
    let mut st_cubed_residuals = Vec::new();
    for &alpha in alphas {
        if alpha == 0.0 {
            return Err(Error::InvalidParameter("alpha must be nonzero".into()));
        }
        let se = s.eval(alpha)?;
        let te = t.eval(alpha)?;
        let st = se.mul(&te)?;
        let st3 = st.mul(&st)?.mul(&st)?;
        st_cubed_residuals.push((alpha, st3.identity_residual()));
    }
    Ok(GroupRelationsReport {
        p,
        s_squared_residual,
        st_cubed_residuals,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_p() {
        assert!(s_alpha(1).is_err());
        assert!(t_alpha(0).is_err());
        assert!(theta_transform(1).is_err());
    }

    /// Rows 1-2 of S_{2,alpha}, worked out by hand from the blocks.
    #[test]
    fn s_alpha_p2_head_rows() {
        let s = s_alpha(2).unwrap();
        let m = s.eval(0.37).unwrap();
        let expect_r1 = [0.5, 0.5, 1.0, 1.0, 0.0];
        let expect_r2 = [0.5, 0.5, -1.0, -1.0, 0.0];
        for j in 0..5 {
            assert!((m[(0, j)] - re(expect_r1[j])).norm() < 1e-14);
            assert!((m[(1, j)] - re(expect_r2[j])).norm() < 1e-14);
        }
    }

    /// The reference 8x8 matrix for p=3 at alpha=1, with r = sqrt(6)/3,
    /// s = sqrt(2)/3, t = sqrt(2). Coefficient triples (a,b,c) mean
    /// a*r + b*s + c*t.
    #[test]
    fn s_alpha_p3_reference_matrix() {
        let r = 6.0f64.sqrt() / 3.0;
        let s = 2.0f64.sqrt() / 3.0;
        let t = 2.0f64.sqrt();
        #[rustfmt::skip]
        let coeffs: [[(f64, f64, f64); 8]; 8] = [
            [(0.5,0.,0.), (0.5,0.,0.), (1.,0.,0.), (1.,0.,0.), (0.,0.,0.), (1.,0.,0.), (1.,0.,0.), (0.,0.,0.)],
            [(0.5,0.,0.), (-0.5,0.,0.), (1.,0.,0.), (1.,0.,0.), (0.,0.,0.), (-1.,0.,0.), (-1.,0.,0.), (0.,0.,0.)],
            [(1./6.,0.,0.), (1./6.,0.,0.), (-1./6.,-1.,0.), (-1./6.,-1.,0.), (0.,0.5,0.), (-1./6.,1.,0.), (-1./6.,1.,0.), (0.,-0.5,0.)],
            [(1./3.,0.,0.), (1./3.,0.,0.), (-1./3.,1.,0.), (-1./3.,1.,0.), (0.,-0.5,0.), (-1./3.,-1.,0.), (-1./3.,-1.,0.), (0.,0.5,0.)],
            [(1.,0.,0.), (1.,0.,0.), (-1.,0.,1.), (-1.,0.,-0.5), (0.,0.,0.), (-1.,0.,-0.5), (-1.,0.,1.), (0.,0.,0.)],
            [(1./3.,0.,0.), (-1./3.,0.,0.), (-1./3.,1.,0.), (-1./3.,1.,0.), (0.,-0.5,0.), (1./3.,1.,0.), (1./3.,1.,0.), (0.,-0.5,0.)],
            [(1./6.,0.,0.), (-1./6.,0.,0.), (-1./6.,-1.,0.), (-1./6.,-1.,0.), (0.,0.5,0.), (1./6.,-1.,0.), (1./6.,-1.,0.), (0.,0.5,0.)],
            [(1.,0.,0.), (-1.,0.,0.), (-1.,0.,-1.), (-1.,0.,0.5), (0.,0.,0.), (1.,0.,-0.5), (1.,0.,1.), (0.,0.,0.)],
        ];
        let m = s_alpha(3).unwrap().eval(1.0).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let (a, b, c) = coeffs[i][j];
                let want = a * r + b * s + c * t;
                assert!(
                    (m[(i, j)] - re(want)).norm() < 1e-13,
                    "entry ({i},{j}): got {:?}, want {want}",
                    m[(i, j)]
                );
            }
        }
    }

    #[test]
    fn s_squared_is_identity_symbolically() {
        for p in 2..=12 {
            let s = s_alpha(p).unwrap();
            let res = s.mul(&s).unwrap().identity_residual();
            assert!(res < 1e-10, "p = {p}: residual {res}");
        }
    }

    /// Guards against accidental symmetrisation: the closed form is not
    /// symmetric, and the Verlinde denominator must use its third row.
    #[test]
    fn s_alpha_not_symmetric() {
        for p in 2..=12 {
            let m = s_alpha(p).unwrap().eval(1.0).unwrap();
            let diff = m.max_abs_diff(&m.transpose());
            assert!(diff > 0.1, "p = {p}: S looks symmetric, diff {diff}");
        }
    }

    #[test]
    fn st_cubed_is_identity() {
        for p in 2..=12 {
            let rep = verify_group_relations(p, &[1.0, 0.1, 0.01], 1e-9).unwrap();
            assert!(
                rep.passed(),
                "p = {p}: S^2 residual {}, (ST)^3 residuals {:?}",
                rep.s_squared_residual,
                rep.st_cubed_residuals
            );
        }
    }

    #[test]
    fn t_head_phase_and_diagonal_limit() {
        let t = t_alpha(2).unwrap();
        let m = t.eval(0.3).unwrap();
        assert!((m[(0, 0)] - Complex64::from_polar(1.0, -PI / 12.0)).norm() < 1e-14);
        // 3-block diagonal phase for s=1
        let want = Complex64::from_polar(1.0, PI * (0.25 - 1.0 / 12.0));
        assert!((m[(2, 2)] - want).norm() < 1e-14);
        assert!((m[(3, 3)] - want).norm() < 1e-14);
        assert!((m[(4, 4)] - want).norm() < 1e-14);
        // off-diagonal entries carry alpha, so the alpha -> 0 limit is diagonal
        let lim = t.limit0(1e-12).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert!(lim[(i, j)].norm() == 0.0);
                }
            }
        }
    }

    #[test]
    fn theta_transform_entries() {
        // p=2: top-left entry is (1/2) sqrt(2/p) cos 0 = 1/2
        let m = theta_transform(2).unwrap();
        assert!((m[(0, 0)] - re(0.5)).norm() < 1e-15);
        // p=3: row 2p+1, column p+2 (1-based) = i sqrt(2/3) sin(pi/3)
        let m3 = theta_transform(3).unwrap();
        let want = Complex64::new(0.0, (2.0f64 / 3.0).sqrt() * (PI / 3.0).sin());
        assert!((m3[(6, 4)] - want).norm() < 1e-15);
    }

    #[test]
    fn theta_transform_squares_to_identity() {
        for p in 2..=8 {
            let m = theta_transform(p).unwrap();
            let res = m.mul(&m).unwrap().identity_residual();
            assert!(res < 1e-10, "p = {p}: residual {res}");
        }
    }

    /// Two-path identity: B Frak(S) B^{-1} equals the closed-form S_{p,alpha}.
    #[test]
    fn s_via_b_matches_closed_form() {
        for &(p, alpha, tol) in &[(2u32, 0.1, 1e-9), (3, 1.0, 1e-9), (5, 0.01, 1e-7)] {
            let two_path = s_via_b(p, alpha).unwrap();
            let closed = s_alpha(p).unwrap().eval(alpha).unwrap();
            let diff = two_path.max_abs_diff(&closed);
            assert!(diff < tol, "p = {p}, alpha = {alpha}: diff {diff}");
        }
    }

    #[test]
    fn group_relations_alpha_zero_rejected() {
        assert!(verify_group_relations(2, &[0.0], 1e-9).is_err());
    }
}
