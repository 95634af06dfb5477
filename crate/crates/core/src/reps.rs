//! Representation labels of the triplet algebra at c_{p,1}, their conformal
//! weights, the canonical basis ordering of the 3p-1 torus amplitudes, and
//! the reordering that puts the indecomposables last.
//!
//! Matrix and basis indices exposed by this module are 1-based, matching the
//! matrix-element conventions used throughout the construction.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{require_p, Error, Result};

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RepKind {
    /// Simple module [h_{1,sigma}].
    Irreducible,
    /// Reducible but indecomposable module [h~_{1,sigma}].
    Indecomposable,
}

/// A representation label: kind, Kac column sigma and conformal weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RepLabel {
    pub kind: RepKind,
    pub sigma: u32,
    pub weight: Rational,
}

impl RepLabel {
    pub fn new(p: u32, kind: RepKind, sigma: u32) -> Result<Self> {
        let ok = match kind {
            RepKind::Irreducible => (0 < sigma && sigma <= p) || (2 * p <= sigma && sigma < 3 * p),
            RepKind::Indecomposable => p < sigma && sigma < 2 * p,
        };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "sigma = {sigma} invalid for {kind:?} at p = {p}"
            )));
        }
        Ok(RepLabel {
            kind,
            sigma,
            weight: weight(p, sigma)?,
        })
    }

    pub fn is_indecomposable(&self) -> bool {
        self.kind == RepKind::Indecomposable
    }

    /// Compact text form, e.g. `[-1/8]` or `[~0]` for the indecomposable of
    /// weight zero.
    pub fn display(&self) -> String {
        let w = if self.weight.is_integer() {
            format!("{}", self.weight.numer())
        } else {
            format!("{}/{}", self.weight.numer(), self.weight.denom())
        };
        match self.kind {
            RepKind::Irreducible => format!("[{w}]"),
            RepKind::Indecomposable => format!("[~{w}]"),
        }
    }
}

/// Central charge c_{p,1} = 1 - 6 (p-1)^2 / p.
pub fn central_charge(p: u32) -> Result<Rational> {
    require_p(p)?;
    let p = p as i64;
    Ok(Ratio::new(p - 6 * (p - 1) * (p - 1), p))
}

/// Kac weight h_{1,sigma} = ((p - sigma)^2 - (p - 1)^2) / (4p).
pub fn weight(p: u32, sigma: u32) -> Result<Rational> {
    require_p(p)?;
    if sigma == 0 || sigma >= 3 * p {
        return Err(Error::InvalidParameter(format!(
            "sigma must satisfy 0 < sigma < 3p, got sigma = {sigma}, p = {p}"
        )));
    }
    let (p, s) = (p as i64, sigma as i64);
    Ok(Ratio::new((p - s) * (p - s) - (p - 1) * (p - 1), 4 * p))
}

/// The canonical ordering of the 3p-1 basis labels: the two theta-index
/// extremes first, then one triple (irreducible pair + indecomposable) per
/// theta index lambda = p-1 down to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisOrdering {
    pub p: u32,
    labels: Vec<RepLabel>,
}

impl BasisOrdering {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// 1-based position of the vacuum [h_{1,1}]; always 3.
    pub fn vacuum_index(&self) -> usize {
        3
    }

    /// 1-based access.
    pub fn label(&self, index: usize) -> &RepLabel {
        &self.labels[index - 1]
    }

    pub fn labels(&self) -> &[RepLabel] {
        &self.labels
    }

    /// 1-based position of a label.
    pub fn position(&self, label: &RepLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label).map(|i| i + 1)
    }

    /// 1-based position by (kind, sigma).
    pub fn position_of(&self, kind: RepKind, sigma: u32) -> Option<usize> {
        self.labels
            .iter()
            .position(|l| l.kind == kind && l.sigma == sigma)
            .map(|i| i + 1)
    }
}

/// Build the canonical basis ordering for a given p.
pub fn basis_ordering(p: u32) -> Result<BasisOrdering> {
    require_p(p)?;
    let mut labels = Vec::with_capacity(3 * p as usize - 1);
    labels.push(RepLabel::new(p, RepKind::Irreducible, p)?);
    labels.push(RepLabel::new(p, RepKind::Irreducible, 2 * p)?);
    // Triple n carries theta index lambda = p - n.
    for n in 1..p {
        labels.push(RepLabel::new(p, RepKind::Irreducible, n)?);
        labels.push(RepLabel::new(p, RepKind::Irreducible, 2 * p + n)?);
        labels.push(RepLabel::new(p, RepKind::Indecomposable, 2 * p - n)?);
    }
    Ok(BasisOrdering { p, labels })
}

/// A permutation of {1..n} stored as `map[old-1] = new` (both 1-based values).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// New 1-based position of the 1-based old index.
    pub fn apply(&self, old: usize) -> usize {
        self.map[old - 1]
    }

    /// Old 1-based index ending up at the 1-based new position.
    pub fn preimage(&self, new: usize) -> usize {
        self.map.iter().position(|&m| m == new).unwrap() + 1
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0usize; self.map.len()];
        for (old0, &new) in self.map.iter().enumerate() {
            inv[new - 1] = old0 + 1;
        }
        Permutation { map: inv }
    }

    pub fn compose(&self, then: &Permutation) -> Self {
        Permutation {
            map: self.map.iter().map(|&mid| then.apply(mid)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &m)| m == i + 1)
    }

    /// 0-based map for matrix permutation routines.
    pub fn zero_based(&self) -> Vec<usize> {
        self.map.iter().map(|&m| m - 1).collect()
    }

    /// Reorder a 1-indexed family so that `out[new] = family[old]`.
    pub fn apply_to_family<T: Clone>(&self, family: &[T]) -> Vec<T> {
        let mut out = family.to_vec();
        for (old0, &new) in self.map.iter().enumerate() {
            out[new - 1] = family[old0].clone();
        }
        out
    }
}

/// The permutation taking the canonical ordering to the reordered sequence
/// with all irreducibles first (pairwise, theta index descending) and the
/// indecomposables last in ascending sigma.
pub fn permutation_newseq(p: u32) -> Result<Permutation> {
    require_p(p)?;
    let n = 3 * p as usize - 1;
    let p = p as usize;
    let mut map = vec![0usize; n];
    map[0] = 1;
    map[1] = 2;
    for t in 1..p {
        // old triple positions 3t, 3t+1, 3t+2 (1-based)
        map[3 * t - 1] = 2 * t + 1;
        map[3 * t] = 2 * t + 2;
        // indecomposable sigma = 2p - t goes to slot for ascending sigma:
        // new position 2p + (p - t).
        map[3 * t + 1] = 3 * p - t;
    }
    Ok(Permutation { map })
}
