//! Replacement rules turning pre-fusion tables into the conjectured fusion
//! tables: whenever the two irreducibles of an output triple carry equal
//! coefficients 2c, they are traded for c copies of the triple's
//! indecomposable, and coefficients for the same indecomposable are merged.

use crate::error::{require_p, Error, Result};
use crate::matrix::IMat;
use crate::reps::{basis_ordering, BasisOrdering, RepLabel};
use crate::tables::{PreFusionTable, Stage};

/// A signed-integer decomposition over the canonical basis ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub p: u32,
    coeffs: Vec<i64>,
}

impl Decomposition {
    pub fn zeros(p: u32) -> Result<Self> {
        require_p(p)?;
        Ok(Decomposition {
            p,
            coeffs: vec![0; 3 * p as usize - 1],
        })
    }

    pub fn from_coeffs(p: u32, coeffs: Vec<i64>) -> Result<Self> {
        require_p(p)?;
        if coeffs.len() != 3 * p as usize - 1 {
            return Err(Error::ShapeMismatch(format!(
                "decomposition for p={p} needs {} coefficients, got {}",
                3 * p - 1,
                coeffs.len()
            )));
        }
        Ok(Decomposition { p, coeffs })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Coefficient at 1-based basis position.
    pub fn coeff(&self, k: usize) -> i64 {
        self.coeffs[k - 1]
    }

    /// Coefficient of a label (zero if the label does not belong to p).
    pub fn coeff_of(&self, basis: &BasisOrdering, label: &RepLabel) -> i64 {
        basis
            .position(label)
            .map(|k| self.coeff(k))
            .unwrap_or_default()
    }

    pub fn add_label(&mut self, basis: &BasisOrdering, label: &RepLabel, c: i64) {
        let k = basis
            .position(label)
            .unwrap_or_else(|| panic!("label {label:?} not in basis for p={}", self.p));
        self.coeffs[k - 1] += c;
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0)
    }

    /// Collapse to a vector over the 2p irreducibles only, substituting each
    /// indecomposable by twice both irreducibles of its triple (the character
    /// relation). Order: basis order restricted to irreducibles.
    pub fn to_character_vector(&self) -> Vec<i64> {
        let p = self.p as usize;
        let mut out = Vec::with_capacity(2 * p);
        out.push(self.coeffs[0]);
        out.push(self.coeffs[1]);
        for t in 1..p {
            let o = 2 + 3 * (t - 1);
            let ind = self.coeffs[o + 2];
            out.push(self.coeffs[o] + 2 * ind);
            out.push(self.coeffs[o + 1] + 2 * ind);
        }
        out
    }
}

/// Outcome of replacing one row, with the flag for rows where nothing
/// forces the rewrite independently of the result (an indecomposable factor,
/// a genuine trigger, and no negative coefficient to mend).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacedRow {
    pub decomposition: Decomposition,
    pub triggered: bool,
    pub had_negative: bool,
}

fn replace_coeffs(p: u32, pre: &[i64], i: usize, j: usize) -> Result<(Vec<i64>, bool, bool)> {
    let had_negative = pre.iter().any(|&c| c < 0);
    let mut out = pre.to_vec();
    let mut triggered = false;
    for t in 1..p as usize {
        let o = 2 + 3 * (t - 1); // 0-based head of the output triple
        let (a, b) = (out[o], out[o + 1]);
        if a == b {
            if a != 0 {
                triggered = true;
            }
            if a % 2 != 0 {
                return Err(Error::MalformedTable {
                    i,
                    j,
                    triple: t,
                    value: a,
                });
            }
            out[o] = 0;
            out[o + 1] = 0;
            out[o + 2] += a / 2;
        }
    }
    for (k, &c) in out.iter().enumerate() {
        if c < 0 {
            return Err(Error::ReplacementInsufficiency {
                i,
                j,
                k: k + 1,
                value: c,
            });
        }
    }
    Ok((out, triggered, had_negative))
}

/// Replace one pre-fusion output row (components 1,2 untouched; each output
/// triple processed by the equal-pair rule).
pub fn replace_decomposition(p: u32, pre: &Decomposition) -> Result<Decomposition> {
    require_p(p)?;
    if pre.p != p {
        return Err(Error::ShapeMismatch("decomposition p mismatch".into()));
    }
    let (coeffs, _, _) = replace_coeffs(p, pre.coeffs(), 0, 0)?;
    Decomposition::from_coeffs(p, coeffs)
}

/// A replaced table plus the rows flagged as replaced "without independent
/// argument" (indecomposable factor, trigger fired, no negative coefficient).
#[derive(Debug, Clone)]
pub struct ReplacementOutcome {
    pub table: PreFusionTable,
    /// Unordered (i, j) pairs, 1-based, with i <= j.
    pub flagged_rows: Vec<(usize, usize)>,
}

/// Apply the replacement to every output row of a pre-fusion table.
pub fn replace_table(p: u32, table: &PreFusionTable) -> Result<ReplacementOutcome> {
    require_p(p)?;
    if table.p != p || table.stage != Stage::Pre {
        return Err(Error::ShapeMismatch(
            "replacement expects a pre-stage table for the same p".into(),
        ));
    }
    let basis = basis_ordering(p)?;
    let n = table.dim();
    let mut mats = Vec::with_capacity(n);
    let mut flagged = Vec::new();
    for i in 1..=n {
        let mut out = IMat::zeros(n, n);
        for j in 1..=n {
            let pre_row: Vec<i64> = (1..=n).map(|k| table.coeff(i, j, k)).collect();
            let (post, triggered, had_negative) = replace_coeffs(p, &pre_row, i, j)?;
            let ind_factor =
                basis.label(i).is_indecomposable() || basis.label(j).is_indecomposable();
            if ind_factor && triggered && !had_negative && i <= j {
                flagged.push((i, j));
            }
            for (k0, &c) in post.iter().enumerate() {
                out[(j - 1, k0)] = c;
            }
        }
        mats.push(out);
    }
    Ok(ReplacementOutcome {
        table: PreFusionTable::new(p, table.method, Stage::Post, mats, table.max_residual),
        flagged_rows: flagged,
    })
}

/// Exact character-level conservation: pre- and post-replacement rows are
/// equal as linear combinations of irreducible characters.
pub fn conserves_characters(p: u32, pre: &PreFusionTable, post: &PreFusionTable) -> Result<bool> {
    let n = pre.dim();
    if post.dim() != n {
        return Err(Error::ShapeMismatch("table dimension mismatch".into()));
    }
    for i in 1..=n {
        for j in 1..=n {
            let a = Decomposition::from_coeffs(p, (1..=n).map(|k| pre.coeff(i, j, k)).collect())?;
            let b = Decomposition::from_coeffs(p, (1..=n).map(|k| post.coeff(i, j, k)).collect())?;
            if a.to_character_vector() != b.to_character_vector() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Post-replacement well-formedness: no output triple keeps an equal pair of
/// nonzero irreducible coefficients (the trigger pattern must be gone).
pub fn trigger_pattern_absent(table: &PreFusionTable) -> bool {
    let p = table.p as usize;
    let n = table.dim();
    for i in 1..=n {
        for j in 1..=n {
            for t in 1..p {
                let o = 2 + 3 * (t - 1);
                let a = table.coeff(i, j, o + 1);
                let b = table.coeff(i, j, o + 2);
                if a == b && a != 0 {
                    return false;
                }
            }
        }
    }
    true
}
