//! Closed-form decompositions of all fusion products as stepped sums, both
//! before and after replacement, plus the sine-sum identity underlying the
//! proof.

use std::f64::consts::PI;

use crate::error::{require_p, Error, Result};
use crate::matrix::IMat;
use crate::replacement::Decomposition;
use crate::reps::{basis_ordering, BasisOrdering, RepKind, RepLabel};
use crate::tables::{Method, PreFusionTable, Stage};

/// Inclusive range stepped by two; empty when lower > upper.
fn stepped(lower: i64, upper: i64) -> impl Iterator<Item = i64> {
    (lower..=upper).step_by(2)
}

/// The parity bracket [x mod 2]: 0 or 1.
fn par(x: i64) -> i64 {
    x.rem_euclid(2)
}

/// How a label enters the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LabelClass {
    /// [h_{1,k}], 0 < k <= p
    Left(i64),
    /// [h_{1,3p-l}], 0 < l <= p (l = p is [h_{1,2p}])
    Right(i64),
    /// [h~_{1,2p-r}], 0 < r < p
    Ind(i64),
}

fn classify(p: u32, label: &RepLabel) -> Result<LabelClass> {
    let pi = p as i64;
    let s = label.sigma as i64;
    if crate::reps::weight(p, label.sigma)? != label.weight {
        return Err(Error::InvalidParameter(format!(
            "label {label:?} carries a weight foreign to p = {p}"
        )));
    }
    match label.kind {
        RepKind::Irreducible if s >= 1 && s <= pi => Ok(LabelClass::Left(s)),
        RepKind::Irreducible if s >= 2 * pi && s < 3 * pi => Ok(LabelClass::Right(3 * pi - s)),
        RepKind::Indecomposable if s > pi && s < 2 * pi => Ok(LabelClass::Ind(2 * pi - s)),
        _ => Err(Error::InvalidParameter(format!(
            "label {label:?} does not belong to p = {p}"
        ))),
    }
}

struct Builder<'a> {
    p: i64,
    basis: &'a BasisOrdering,
    out: Decomposition,
}

impl<'a> Builder<'a> {
    fn new(p: u32, basis: &'a BasisOrdering) -> Result<Self> {
        Ok(Builder {
            p: p as i64,
            basis,
            out: Decomposition::zeros(p)?,
        })
    }

    fn irr(&mut self, sigma: i64, c: i64) {
        debug_assert!(sigma >= 1 && sigma < 3 * self.p);
        let label = RepLabel::new(self.p as u32, RepKind::Irreducible, sigma as u32).unwrap();
        self.out.add_label(self.basis, &label, c);
    }

    fn ind(&mut self, sigma: i64, c: i64) {
        debug_assert!(sigma > self.p && sigma < 2 * self.p);
        let label = RepLabel::new(self.p as u32, RepKind::Indecomposable, sigma as u32).unwrap();
        self.out.add_label(self.basis, &label, c);
    }

    /// lambda_m: [h_{1,m}] for m <= p, else [h_{1,2p-m}] + 2 [h_{1,4p-m}].
    fn lambda(&mut self, m: i64, c: i64) {
        if m <= self.p {
            self.irr(m, c);
        } else {
            self.irr(2 * self.p - m, c);
            self.irr(4 * self.p - m, 2 * c);
        }
    }

    /// pi_m: [h_{1,3p-m}] for m <= p, else [h_{1,m+p}] + 2 [h_{1,m-p}].
    fn pi(&mut self, m: i64, c: i64) {
        if m <= self.p {
            self.irr(3 * self.p - m, c);
        } else {
            self.irr(m + self.p, c);
            self.irr(m - self.p, 2 * c);
        }
    }

    /// rho_t: 2[h_{1,p}] at t=p, 2[h_{1,2p}] at t=0,
    /// else 4([h_{1,t}] + [h_{1,2p+t}]).
    fn rho(&mut self, t: i64, c: i64) {
        if t == self.p {
            self.irr(self.p, 2 * c);
        } else if t == 0 {
            self.irr(2 * self.p, 2 * c);
        } else {
            self.irr(t, 4 * c);
            self.irr(2 * self.p + t, 4 * c);
        }
    }

    /// Replaced rho: 2[h_{1,p}] at t=p, 2[h_{1,2p}] at t=0,
    /// else 2[h~_{1,2p-t}].
    fn rho_replaced(&mut self, t: i64, c: i64) {
        if t == self.p {
            self.irr(self.p, 2 * c);
        } else if t == 0 {
            self.irr(2 * self.p, 2 * c);
        } else {
            self.ind(2 * self.p - t, 2 * c);
        }
    }

    /// rho~_t of the replaced ind (x) right-irreducible products: single
    /// multiplicity inside the window r-s < t < r+s, double outside.
    fn rho_tilde(&mut self, t: i64, r: i64, s: i64) {
        if t == self.p {
            self.irr(self.p, 2);
        } else if t == 0 {
            self.irr(2 * self.p, 2);
        } else if r - s < t && t < r + s {
            self.ind(2 * self.p - t, 1);
        } else {
            self.ind(2 * self.p - t, 2);
        }
    }

    /// rho^_t of the replaced ind (x) left-irreducible products: note the
    /// swapped role of [h_{1,p}] and [h_{1,2p}] and the p+t tilde index.
    fn rho_hat(&mut self, t: i64, r: i64, s: i64) {
        if t == self.p {
            self.irr(2 * self.p, 2);
        } else if t == 0 {
            self.irr(self.p, 2);
        } else if r - s < t && t < r + s {
            self.ind(self.p + t, 1);
        } else {
            self.ind(self.p + t, 2);
        }
    }

    fn finish(self) -> Decomposition {
        self.out
    }
}

/// Range of the rho-sum shared by the ind (x) irr cases:
/// t = max(1 - [(r+s) mod 2], s-r+1), step 2,
/// up to min(p - 1 + [(p+r+s) mod 2], 2p - r - s - 1).
fn ind_irr_rho_range(p: i64, r: i64, s: i64) -> (i64, i64) {
    let lower = (1 - par(r + s)).max(s - r + 1);
    let upper = (p - 1 + par(p + r + s)).min(2 * p - r - s - 1);
    (lower, upper)
}

/// Pre-fusion decomposition of a (x) b from the closed forms.
pub fn prefusion_closed(p: u32, a: &RepLabel, b: &RepLabel) -> Result<Decomposition> {
    require_p(p)?;
    let basis = basis_ordering(p)?;
    let pi_ = p as i64;
    let (ca, cb) = (classify(p, a)?, classify(p, b)?);
    let mut bld = Builder::new(p, &basis)?;
    match (ca, cb) {
        // [h_{1,k}] (x) [h_{1,l}] and [h_{1,3p-k}] (x) [h_{1,3p-l}]
        (LabelClass::Left(k), LabelClass::Left(l))
        | (LabelClass::Right(k), LabelClass::Right(l)) => {
            for m in stepped((k - l).abs() + 1, k + l - 1) {
                bld.lambda(m, 1);
            }
        }
        // [h_{1,k}] (x) [h_{1,3p-l}]
        (LabelClass::Left(k), LabelClass::Right(l))
        | (LabelClass::Right(l), LabelClass::Left(k)) => {
            for m in stepped((k - l).abs() + 1, k + l - 1) {
                bld.pi(m, 1);
            }
        }
        // products with one indecomposable factor: commute to put it first
        (LabelClass::Ind(r), LabelClass::Right(l)) | (LabelClass::Right(l), LabelClass::Ind(r)) => {
            if l == pi_ {
                // (x) [h_{1,2p}]
                for t in stepped(1 - par(r), pi_ - 1 + par(pi_ + r)) {
                    bld.rho(t, 1);
                }
            } else {
                // (x) [h_{1,2p+s}] with s = p - l
                let s = pi_ - l;
                for t in stepped((r - s).abs() + 1, (r + s - 1).min(2 * pi_ - r - s - 1)) {
                    bld.ind(2 * pi_ - t, -1);
                }
                let (lo, hi) = ind_irr_rho_range(pi_, r, s);
                for t in stepped(lo, hi) {
                    bld.rho(t, 1);
                }
            }
        }
        (LabelClass::Ind(r), LabelClass::Left(k)) | (LabelClass::Left(k), LabelClass::Ind(r)) => {
            if k == pi_ {
                // (x) [h_{1,p}]
                for t in stepped(1 - par(r), pi_ - 1 + par(pi_ + r)) {
                    bld.rho(pi_ - t, 1);
                }
            } else {
                // (x) [h_{1,p-s}] with s = p - k
                let s = pi_ - k;
                for t in stepped((r - s).abs() + 1, (r + s - 1).min(2 * pi_ - r - s - 1)) {
                    bld.ind(pi_ + t, 1);
                }
                if r > s {
                    for t in stepped(1 - par(r + s), r - s - 1) {
                        bld.rho(pi_ - t, 1);
                    }
                }
                if r + s < pi_ {
                    for t in stepped(r + s + 1, pi_ - 1 + par(pi_ + r + s)) {
                        bld.rho(pi_ - t, 1);
                    }
                }
            }
        }
        // [h~] (x) [h~]
        (LabelClass::Ind(r), LabelClass::Ind(s)) => {
            for t in stepped(1 - par(r + s), pi_ - 1 + par(pi_ + r + s)) {
                bld.rho(t, 2);
            }
        }
    }
    Ok(bld.finish())
}

/// Post-replacement decomposition of a (x) b directly from the closed forms.
pub fn fusion_closed(p: u32, a: &RepLabel, b: &RepLabel) -> Result<Decomposition> {
    require_p(p)?;
    let basis = basis_ordering(p)?;
    let pi_ = p as i64;
    let (ca, cb) = (classify(p, a)?, classify(p, b)?);
    let mut bld = Builder::new(p, &basis)?;
    match (ca, cb) {
        (LabelClass::Left(k), LabelClass::Left(l))
        | (LabelClass::Right(k), LabelClass::Right(l)) => {
            if k + l <= pi_ + 1 {
                for m in stepped((k - l).abs() + 1, k + l - 1) {
                    bld.irr(m, 1);
                }
            } else {
                // underlined [h_{1,p}] appears only for odd k+l+p
                if par(k + l + pi_) == 1 {
                    bld.irr(pi_, 1);
                }
                for m in stepped((k - l).abs() + 1, 2 * pi_ - k - l - 1) {
                    bld.irr(m, 1);
                }
                for m in stepped(pi_ + 1 + par(pi_ + k + l), k + l - 1) {
                    bld.ind(m, 1);
                }
            }
        }
        (LabelClass::Left(k), LabelClass::Right(l))
        | (LabelClass::Right(l), LabelClass::Left(k)) => {
            if k + l <= pi_ + 1 {
                for m in stepped((k - l).abs() + 1, k + l - 1) {
                    bld.irr(3 * pi_ - m, 1);
                }
            } else {
                if par(k + l + pi_) == 1 {
                    bld.irr(2 * pi_, 1);
                }
                for m in stepped((k - l).abs() + 1, 2 * pi_ - k - l - 1) {
                    bld.irr(3 * pi_ - m, 1);
                }
                for m in stepped(pi_ + 1 + par(pi_ + k + l), k + l - 1) {
                    bld.ind(3 * pi_ - m, 1);
                }
            }
        }
        (LabelClass::Ind(r), LabelClass::Right(l)) | (LabelClass::Right(l), LabelClass::Ind(r)) => {
            if l == pi_ {
                for t in stepped(1 - par(r), pi_ - 1 + par(pi_ + r)) {
                    bld.rho_replaced(t, 1);
                }
            } else {
                let s = pi_ - l;
                let (lo, hi) = ind_irr_rho_range(pi_, r, s);
                for t in stepped(lo, hi) {
                    bld.rho_tilde(t, r, s);
                }
            }
        }
        (LabelClass::Ind(r), LabelClass::Left(k)) | (LabelClass::Left(k), LabelClass::Ind(r)) => {
            if k == pi_ {
                for t in stepped(1 - par(r), pi_ - 1 + par(pi_ + r)) {
                    bld.rho_replaced(pi_ - t, 1);
                }
            } else {
                let s = pi_ - k;
                let (lo, hi) = ind_irr_rho_range(pi_, r, s);
                for t in stepped(lo, hi) {
                    bld.rho_hat(t, r, s);
                }
            }
        }
        (LabelClass::Ind(r), LabelClass::Ind(s)) => {
            for t in stepped(1 - par(r + s), pi_ - 1 + par(pi_ + r + s)) {
                bld.rho_replaced(t, 2);
            }
        }
    }
    Ok(bld.finish())
}

/// Both sides of the sine-sum identity
/// sum_{I=|r-s|+1 step 2}^{r+s-1} sin(pi I l / p)
///   = sin(pi r l / p) sin(pi s l / p) / sin(pi l / p).
pub fn sine_sum_identity(r: u32, s: u32, l: u32, p: u32) -> (f64, f64) {
    let pf = p as f64;
    let lf = l as f64;
    let lhs: f64 = stepped((r as i64 - s as i64).abs() + 1, (r + s) as i64 - 1)
        .map(|i| (PI * i as f64 * lf / pf).sin())
        .sum();
    let rhs =
        (PI * r as f64 * lf / pf).sin() * (PI * s as f64 * lf / pf).sin() / (PI * lf / pf).sin();
    (lhs, rhs)
}

/// Assemble a whole table from the closed forms.
pub fn closed_table(p: u32, stage: Stage) -> Result<PreFusionTable> {
    require_p(p)?;
    let basis = basis_ordering(p)?;
    let n = 3 * p as usize - 1;
    let mut mats = Vec::with_capacity(n);
    for i in 1..=n {
        let a = *basis.label(i);
        let mut m = IMat::zeros(n, n);
        for j in 1..=n {
            let b = *basis.label(j);
            let dec = match stage {
                Stage::Pre => prefusion_closed(p, &a, &b)?,
                Stage::Post => fusion_closed(p, &a, &b)?,
            };
            for (k0, &c) in dec.coeffs().iter().enumerate() {
                m[(j - 1, k0)] = c;
            }
        }
        mats.push(m);
    }
    Ok(PreFusionTable::new(p, Method::Closed, stage, mats, 0.0))
}
