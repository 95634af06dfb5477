//! Checked-in golden fixtures: the four fusion tables for p = 2, 3, the
//! reference N_{2,1}, S_2, K_2, the C-inverses, and the p=3 alpha-dependent
//! S-matrix at alpha = 1. Exact comparisons against these pin the whole
//! engine to the reference values.

use std::collections::HashMap;

use serde::Deserialize;

use crate::alpha_modular::s_alpha;
use crate::block_diag::{c_matrices, k_matrices, s_matrix};
use crate::error::{Error, Result};
use crate::matrix::{IMat, RMat};
use crate::reps::{basis_ordering, BasisOrdering};
use crate::tables::{PreFusionTable, Stage};

const PREFUS_P2: &str = include_str!("golden/prefus_p2.json");
const FUS_P2: &str = include_str!("golden/fus_p2.json");
const PREFUS_P3: &str = include_str!("golden/prefus_p3.json");
const FUS_P3: &str = include_str!("golden/fus_p3.json");
const MATRICES: &str = include_str!("golden/matrices.json");
const S3_ALPHA: &str = include_str!("golden/s3_alpha.json");

#[derive(Debug, Deserialize)]
struct TableFixture {
    p: u32,
    stage: String,
    cells: Vec<CellFixture>,
}

#[derive(Debug, Deserialize)]
struct CellFixture {
    i: String,
    j: String,
    out: HashMap<String, i64>,
}

fn parse_fixture(raw: &str) -> TableFixture {
    serde_json::from_str(raw).expect("embedded fixture must parse")
}

fn label_index(basis: &BasisOrdering, text: &str) -> Result<usize> {
    basis
        .labels()
        .iter()
        .position(|l| l.display() == text)
        .map(|i| i + 1)
        .ok_or_else(|| Error::FixtureMismatch(format!("unknown label {text:?}")))
}

/// The cells of one golden table, resolved to (i, j, coefficients).
pub struct GoldenTable {
    pub p: u32,
    pub stage: Stage,
    pub cells: Vec<(usize, usize, Vec<i64>)>,
}

fn load_table(raw: &str) -> Result<GoldenTable> {
    let fixture = parse_fixture(raw);
    let basis = basis_ordering(fixture.p)?;
    let n = basis.len();
    let stage = fixture.stage.parse()?;
    let mut cells = Vec::with_capacity(fixture.cells.len());
    for cell in &fixture.cells {
        let i = label_index(&basis, &cell.i)?;
        let j = label_index(&basis, &cell.j)?;
        let mut coeffs = vec![0i64; n];
        for (label, &c) in &cell.out {
            coeffs[label_index(&basis, label)? - 1] = c;
        }
        cells.push((i, j, coeffs));
    }
    Ok(GoldenTable {
        p: fixture.p,
        stage,
        cells,
    })
}

/// The golden table for (p, stage); only p = 2 and p = 3 exist.
pub fn golden_table(p: u32, stage: Stage) -> Result<GoldenTable> {
    match (p, stage) {
        (2, Stage::Pre) => load_table(PREFUS_P2),
        (2, Stage::Post) => load_table(FUS_P2),
        (3, Stage::Pre) => load_table(PREFUS_P3),
        (3, Stage::Post) => load_table(FUS_P3),
        _ => Err(Error::InvalidParameter(format!(
            "no golden table for p = {p}"
        ))),
    }
}

/// Exact comparison of a computed table against the golden cells. The
/// p = 3 fixtures list only the lower triangle, so the mirrored cell is
/// checked too (the tables are commutative).
pub fn compare_with_golden(table: &PreFusionTable) -> Result<()> {
    let golden = golden_table(table.p, table.stage)?;
    let n = table.dim();
    for (i, j, coeffs) in &golden.cells {
        for (pair, name) in [((*i, *j), "direct"), ((*j, *i), "mirrored")] {
            let got: Vec<i64> = (1..=n).map(|k| table.coeff(pair.0, pair.1, k)).collect();
            if got != *coeffs {
                return Err(Error::FixtureMismatch(format!(
                    "p={} {:?} cell ({},{}) [{name}]: got {:?}, want {:?}",
                    table.p, table.stage, pair.0, pair.1, got, coeffs
                )));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
struct MatrixFixtures {
    n21: Vec<Vec<i64>>,
    s2: Vec<Vec<[i64; 2]>>,
    k2: Vec<Vec<[i64; 2]>>,
    c2_inv: Vec<Vec<[i64; 4]>>,
    c3_inv_blocks: Vec<Vec<Vec<[i64; 4]>>>,
    s2_eigenvalues: Vec<i64>,
}

fn matrix_fixtures() -> MatrixFixtures {
    serde_json::from_str(MATRICES).expect("embedded fixture must parse")
}

fn rational_matrix(rows: &[Vec<[i64; 2]>]) -> RMat {
    RMat::from_fn(rows.len(), rows[0].len(), |i, j| {
        rows[i][j][0] as f64 / rows[i][j][1] as f64
    })
}

/// The reference N_{2,1}.
pub fn golden_n21() -> IMat {
    let fx = matrix_fixtures();
    IMat::from_fn(5, 5, |i, j| fx.n21[i][j])
}

/// The reference S_2 (with the undetermined entry resolved to s_4 = 2).
pub fn golden_s2() -> RMat {
    rational_matrix(&matrix_fixtures().s2)
}

/// The reference K_2.
pub fn golden_k2() -> RMat {
    rational_matrix(&matrix_fixtures().k2)
}

/// Reference eigenvalue multiset of S_2: {1, 1, 1, -1, -1}.
pub fn golden_s2_eigenvalues() -> Vec<i64> {
    matrix_fixtures().s2_eigenvalues
}

/// Affine entries (c0 + c1 alpha) of the reference C_2^{-1}(alpha), evaluated.
pub fn golden_c2_inv_at(alpha: f64) -> RMat {
    let fx = matrix_fixtures();
    RMat::from_fn(5, 5, |i, j| {
        let [n0, d0, n1, d1] = fx.c2_inv[i][j];
        n0 as f64 / d0 as f64 + alpha * n1 as f64 / d1 as f64
    })
}

/// The reference C_3^{-1}(alpha): unit head plus the two 3x3 blocks.
pub fn golden_c3_inv_at(alpha: f64) -> RMat {
    let fx = matrix_fixtures();
    let mut m = RMat::identity(8);
    for (b, block) in fx.c3_inv_blocks.iter().enumerate() {
        let o = 2 + 3 * b;
        for r in 0..3 {
            for c in 0..3 {
                let [n0, d0, n1, d1] = block[r][c];
                m[(o + r, o + c)] = n0 as f64 / d0 as f64 + alpha * n1 as f64 / d1 as f64;
            }
        }
    }
    m
}

#[derive(Debug, Deserialize)]
struct S3Fixture {
    entries: Vec<Vec<[[i64; 2]; 3]>>,
}

/// The reference S_{3,alpha} evaluated at a numeric alpha via its coefficient
/// triples of r = sqrt(6)/3, s = sqrt(2)/(3 alpha), t = alpha sqrt(2).
pub fn golden_s3_alpha_at(alpha: f64) -> RMat {
    let fx: S3Fixture = serde_json::from_str(S3_ALPHA).expect("embedded fixture must parse");
    let r = 6.0f64.sqrt() / 3.0;
    let s = 2.0f64.sqrt() / (3.0 * alpha);
    let t = alpha * 2.0f64.sqrt();
    RMat::from_fn(8, 8, |i, j| {
        let [a, b, c] = fx.entries[i][j];
        a[0] as f64 / a[1] as f64 * r
            + b[0] as f64 / b[1] as f64 * s
            + c[0] as f64 / c[1] as f64 * t
    })
}

/// Run every fixture comparison that does not need a computed table:
/// S_2, K_2, the C-inverses and S_{3,alpha}, each against the closed-form
/// constructors. Returns the worst deviation.
pub fn verify_matrix_fixtures() -> Result<f64> {
    let mut worst: f64 = 0.0;
    let s2 = s_matrix(2)?;
    worst = worst.max(s2.max_abs_diff(&golden_s2()));
    let (k2, _) = k_matrices(2)?;
    worst = worst.max(k2.max_abs_diff(&golden_k2()));
    for &alpha in &[1.0, 0.3] {
        let (_, c2_inv) = c_matrices(2)?;
        let got = c2_inv.eval(alpha)?;
        let want = golden_c2_inv_at(alpha).to_complex();
        worst = worst.max(got.max_abs_diff(&want));
        let (_, c3_inv) = c_matrices(3)?;
        let got3 = c3_inv.eval(alpha)?;
        let want3 = golden_c3_inv_at(alpha).to_complex();
        worst = worst.max(got3.max_abs_diff(&want3));
        let s3 = s_alpha(3)?.eval(alpha)?;
        let want_s3 = golden_s3_alpha_at(alpha).to_complex();
        worst = worst.max(s3.max_abs_diff(&want_s3));
    }
    // eigenvalues of S_2 via the characteristic polynomial
    let coeffs = s_matrix(2)?.char_poly();
    let eig = golden_s2_eigenvalues();
    let expect = char_poly_from_roots(&eig);
    for (got, want) in coeffs.iter().zip(expect.iter()) {
        worst = worst.max((got - want).abs());
    }
    if worst > 1e-10 {
        return Err(Error::FixtureMismatch(format!(
            "matrix fixture deviation {worst:.3e}"
        )));
    }
    Ok(worst)
}

fn char_poly_from_roots(roots: &[i64]) -> Vec<f64> {
    let mut coeffs = vec![1.0f64];
    for &r in roots {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k] += c;
            next[k + 1] -= c * r as f64;
        }
        coeffs = next;
    }
    coeffs[1..].to_vec()
}

/// The reference S_{3,alpha} must itself be an involution at numeric alpha.
pub fn golden_s3_is_involution(alpha: f64) -> Result<f64> {
    let m = golden_s3_alpha_at(alpha).to_complex();
    Ok(m.mul(&m)?.identity_residual())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block_diag::{prefusion_matrices, project_small};
    use crate::closed_form::closed_table;
    use crate::limit_verlinde::{limit_prefusion, DEFAULT_ALPHAS};
    use crate::replacement::replace_table;

    #[test]
    fn fixtures_parse() {
        for p in [2, 3] {
            for stage in [Stage::Pre, Stage::Post] {
                let g = golden_table(p, stage).unwrap();
                assert_eq!(g.p, p);
                let expect_cells = if p == 2 { 25 } else { 36 };
                assert_eq!(g.cells.len(), expect_cells, "p={p} {stage:?}");
            }
        }
    }

    #[test]
    fn block_diag_tables_match_golden() {
        for p in [2, 3] {
            let pre = prefusion_matrices(p).unwrap();
            compare_with_golden(&pre).unwrap();
            let post = replace_table(p, &pre).unwrap().table;
            compare_with_golden(&post).unwrap();
        }
    }

    #[test]
    fn limit_tables_match_golden() {
        for p in [2, 3] {
            let (_, pre) = limit_prefusion(p, &DEFAULT_ALPHAS, 1e-5).unwrap();
            compare_with_golden(&pre).unwrap();
            let post = replace_table(p, &pre).unwrap().table;
            compare_with_golden(&post).unwrap();
        }
    }

    #[test]
    fn closed_tables_match_golden() {
        for p in [2, 3] {
            compare_with_golden(&closed_table(p, Stage::Pre).unwrap()).unwrap();
            compare_with_golden(&closed_table(p, Stage::Post).unwrap()).unwrap();
        }
    }

    #[test]
    fn reference_n21_matches() {
        let table = prefusion_matrices(2).unwrap();
        assert_eq!(table.matrices[0], golden_n21());
    }

    #[test]
    fn matrix_fixtures_verify() {
        let worst = verify_matrix_fixtures().unwrap();
        assert!(worst < 1e-12, "worst {worst}");
    }

    #[test]
    fn golden_s3_involution() {
        for alpha in [1.0, 0.25] {
            assert!(golden_s3_is_involution(alpha).unwrap() < 1e-12);
        }
    }

    /// The golden tables are internally consistent with the projection: the
    /// fixture pre-fusion tables carry zero upper-right blocks after
    /// reordering.
    #[test]
    fn golden_projection_consistency() {
        for p in [2, 3] {
            let pre = prefusion_matrices(p).unwrap();
            compare_with_golden(&pre).unwrap();
            project_small(p, &pre).unwrap();
        }
    }
}
