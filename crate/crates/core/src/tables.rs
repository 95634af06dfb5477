//! Integer fusion tables, their algebra checks, and the machine-readable
//! table document (JSON / plain text / LaTeX).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IMat;
use crate::reps::{basis_ordering, BasisOrdering, RepKind, RepLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Limit,
    BlockDiag,
    Closed,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Limit => "limit",
            Method::BlockDiag => "blockdiag",
            Method::Closed => "closed",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "limit" => Ok(Method::Limit),
            "blockdiag" => Ok(Method::BlockDiag),
            "closed" => Ok(Method::Closed),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Pre,
    Post,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Pre => "pre",
            Stage::Post => "post",
        }
    }
}

impl std::str::FromStr for Stage {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pre" => Ok(Stage::Pre),
            "post" => Ok(Stage::Post),
            other => Err(Error::InvalidParameter(format!("unknown stage {other:?}"))),
        }
    }
}

/// A family of 3p-1 integer matrices N_I with (N_I)_{jk} the coefficient of
/// basis element k in the product I (x) j. Pre-stage tables may carry
/// negative entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PreFusionTable {
    pub p: u32,
    pub method: Method,
    pub stage: Stage,
    pub matrices: Vec<IMat>,
    /// Largest pre-rounding residual the producing pipeline saw.
    pub max_residual: f64,
}

impl PreFusionTable {
    pub fn new(
        p: u32,
        method: Method,
        stage: Stage,
        matrices: Vec<IMat>,
        max_residual: f64,
    ) -> Self {
        PreFusionTable {
            p,
            method,
            stage,
            matrices,
            max_residual,
        }
    }

    pub fn dim(&self) -> usize {
        3 * self.p as usize - 1
    }

    /// Coefficient of basis element k in i (x) j (all 1-based).
    pub fn coeff(&self, i: usize, j: usize, k: usize) -> i64 {
        self.matrices[i - 1][(j - 1, k - 1)]
    }

    /// N_{ij}^k = N_{ji}^k for all entries.
    pub fn is_commutative(&self) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    if self.matrices[i][(j, k)] != self.matrices[j][(i, k)] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// N_I N_J = sum_K N_{IJ}^K N_K as exact integer matrices.
    pub fn is_associative(&self) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let prod = self.matrices[i].mul(&self.matrices[j]).unwrap();
                let mut sum = IMat::zeros(n, n);
                for k in 0..n {
                    let c = self.matrices[i][(j, k)];
                    if c != 0 {
                        sum = sum.add(&self.matrices[k].scale(c)).unwrap();
                    }
                }
                if prod != sum {
                    return false;
                }
            }
        }
        true
    }

    /// The vacuum matrix is the identity.
    pub fn vacuum_is_identity(&self) -> bool {
        self.matrices[2] == IMat::identity(self.dim())
    }

    pub fn all_nonnegative(&self) -> bool {
        let n = self.dim();
        self.matrices
            .iter()
            .all(|m| (0..n).all(|j| (0..n).all(|k| m[(j, k)] >= 0)))
    }

    /// Entrywise equality of the matrices, ignoring provenance.
    pub fn same_entries(&self, other: &PreFusionTable) -> bool {
        self.p == other.p && self.matrices == other.matrices
    }
}

/// Weight as an exact integer fraction for the document basis.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BasisEntry {
    pub kind: String,
    pub sigma: u32,
    pub weight_num: i64,
    pub weight_den: i64,
}

impl BasisEntry {
    fn from_label(l: &RepLabel) -> Self {
        BasisEntry {
            kind: match l.kind {
                RepKind::Irreducible => "irreducible".into(),
                RepKind::Indecomposable => "indecomposable".into(),
            },
            sigma: l.sigma,
            weight_num: *l.weight.numer(),
            weight_den: *l.weight.denom(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DocumentMeta {
    pub tolerance: f64,
    pub alphas: Vec<f64>,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_unix: Option<u64>,
}

/// Canonical machine-readable table document.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TableDocument {
    pub p: u32,
    pub method: Method,
    pub stage: Stage,
    pub basis: Vec<BasisEntry>,
    pub matrices: Vec<Vec<Vec<i64>>>,
    pub meta: DocumentMeta,
}

impl TableDocument {
    pub fn from_table(
        table: &PreFusionTable,
        tolerance: f64,
        alphas: &[f64],
        canonical: bool,
    ) -> Result<Self> {
        let basis = basis_ordering(table.p)?;
        let n = table.dim();
        let matrices = table
            .matrices
            .iter()
            .map(|m| {
                (0..n)
                    .map(|j| (0..n).map(|k| m[(j, k)]).collect())
                    .collect()
            })
            .collect();
        let generated_unix = if canonical {
            None
        } else {
            Some(
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            )
        };
        Ok(TableDocument {
            p: table.p,
            method: table.method,
            stage: table.stage,
            basis: basis.labels().iter().map(BasisEntry::from_label).collect(),
            matrices,
            meta: DocumentMeta {
                tolerance,
                alphas: alphas.to_vec(),
                max_residual: table.max_residual,
                generated_unix,
            },
        })
    }

    pub fn to_json(&self) -> String {
        // struct field order is fixed, so identical inputs serialise to
        // identical bytes
        serde_json::to_string_pretty(self).expect("document serialisation cannot fail") + "\n"
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidParameter(format!("bad document: {e}")))
    }

    pub fn to_table(&self) -> Result<PreFusionTable> {
        let n = 3 * self.p as usize - 1;
        if self.matrices.len() != n || self.basis.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "document for p={} must contain {n} matrices and basis entries",
                self.p
            )));
        }
        let matrices = self
            .matrices
            .iter()
            .map(|m| {
                if m.len() != n || m.iter().any(|row| row.len() != n) {
                    return Err(Error::ShapeMismatch("matrix dimension mismatch".into()));
                }
                Ok(IMat::from_fn(n, n, |j, k| m[j][k]))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PreFusionTable {
            p: self.p,
            method: self.method,
            stage: self.stage,
            matrices,
            max_residual: self.meta.max_residual,
        })
    }
}

/// Pretty-print one decomposition row as "2[0]+2[1]-[~0]" style text.
pub fn decomposition_string(basis: &BasisOrdering, coeffs: &[i64]) -> String {
    let mut out = String::new();
    for (k0, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let label = basis.label(k0 + 1).display();
        if c > 0 && !out.is_empty() {
            out.push('+');
        }
        if c == -1 {
            out.push('-');
        } else if c != 1 {
            out.push_str(&c.to_string());
        }
        out.push_str(&label);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Plain-text multiplication grid.
pub fn render_text(table: &PreFusionTable) -> Result<String> {
    let basis = basis_ordering(table.p)?;
    let n = table.dim();
    let mut cells: Vec<Vec<String>> = Vec::with_capacity(n + 1);
    let mut header = vec!["(x)".to_string()];
    header.extend((1..=n).map(|k| basis.label(k).display()));
    cells.push(header);
    for i in 1..=n {
        let mut row = vec![basis.label(i).display()];
        for j in 1..=n {
            let coeffs: Vec<i64> = (1..=n).map(|k| table.coeff(i, j, k)).collect();
            row.push(decomposition_string(&basis, &coeffs));
        }
        cells.push(row);
    }
    let widths: Vec<usize> = (0..=n)
        .map(|c| cells.iter().map(|r| r[c].len()).max().unwrap())
        .collect();
    let mut out = String::new();
    for (ri, row) in cells.iter().enumerate() {
        for (ci, cell) in row.iter().enumerate() {
            if ci > 0 {
                out.push_str("  ");
            }
            out.push_str(&format!("{cell:<w$}", w = widths[ci]));
        }
        out.push('\n');
        if ri == 0 {
            let total: usize = widths.iter().sum::<usize>() + 2 * n;
            out.push_str(&"-".repeat(total));
            out.push('\n');
        }
    }
    Ok(out)
}

fn latex_label(l: &RepLabel) -> String {
    let w = if l.weight.is_integer() {
        format!("{}", l.weight.numer())
    } else if *l.weight.numer() < 0 {
        format!("-\\frac{{{}}}{{{}}}", -l.weight.numer(), l.weight.denom())
    } else {
        format!("\\frac{{{}}}{{{}}}", l.weight.numer(), l.weight.denom())
    };
    match l.kind {
        RepKind::Irreducible => format!("\\left[{w}\\right]"),
        RepKind::Indecomposable => format!("\\left[\\widetilde{{{w}}}\\right]"),
    }
}

/// LaTeX tabular in journal style.
pub fn render_latex(table: &PreFusionTable) -> Result<String> {
    let basis = basis_ordering(table.p)?;
    let n = table.dim();
    let mut out = String::new();
    out.push_str("\\begin{tabular}{l|");
    out.push_str(&"c".repeat(n));
    out.push_str("}\n$\\otimes_f$");
    for k in 1..=n {
        out.push_str(&format!(" & ${}$", latex_label(basis.label(k))));
    }
    out.push_str(" \\\\ \\hline\n");
    for i in 1..=n {
        out.push_str(&format!("${}$", latex_label(basis.label(i))));
        for j in 1..=n {
            let mut cell = String::new();
            for k in 1..=n {
                let c = table.coeff(i, j, k);
                if c == 0 {
                    continue;
                }
                if c > 0 && !cell.is_empty() {
                    cell.push('+');
                }
                if c == -1 {
                    cell.push('-');
                } else if c != 1 {
                    cell.push_str(&c.to_string());
                }
                cell.push_str(&latex_label(basis.label(k)));
            }
            if cell.is_empty() {
                cell.push('0');
            }
            out.push_str(&format!(" & ${cell}$"));
        }
        out.push_str(" \\\\\n");
    }
    out.push_str("\\end{tabular}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_table() -> PreFusionTable {
        // p=2 vacuum-only toy family: N_I = identity
        let mats = (0..5).map(|_| IMat::identity(5)).collect();
        PreFusionTable::new(2, Method::BlockDiag, Stage::Pre, mats, 0.0)
    }

    #[test]
    fn document_roundtrip() {
        let table = toy_table();
        let doc = TableDocument::from_table(&table, 1e-7, &[1e-2], true).unwrap();
        let json = doc.to_json();
        let parsed = TableDocument::from_json(&json).unwrap();
        assert_eq!(doc, parsed);
        assert!(parsed.to_table().unwrap().same_entries(&table));
    }

    #[test]
    fn canonical_document_is_deterministic() {
        let table = toy_table();
        let a = TableDocument::from_table(&table, 1e-7, &[1e-2], true)
            .unwrap()
            .to_json();
        let b = TableDocument::from_table(&table, 1e-7, &[1e-2], true)
            .unwrap()
            .to_json();
        assert_eq!(a, b);
        assert!(!a.contains("generated_unix"));
    }

    #[test]
    fn decomposition_rendering() {
        let basis = basis_ordering(2).unwrap();
        assert_eq!(
            decomposition_string(&basis, &[0, 0, 4, 4, -1]),
            "4[0]+4[1]-[~0]"
        );
        assert_eq!(decomposition_string(&basis, &[0, 0, 0, 0, 0]), "0");
        assert_eq!(decomposition_string(&basis, &[1, 0, 0, 0, 0]), "[-1/8]");
    }
}
