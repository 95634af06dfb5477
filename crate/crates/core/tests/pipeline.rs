//! End-to-end library flow: build tables the way a consumer would, move them
//! through replacement, documents and renderers, and cross-check methods at
//! a p with no golden fixture.

use lcft_fusion::block_diag::{prefusion_matrices, project_small, BlockDiagPipeline};
use lcft_fusion::closed_form::{closed_table, fusion_closed, prefusion_closed};
use lcft_fusion::limit_verlinde::{limit_prefusion, DEFAULT_ALPHAS};
use lcft_fusion::replacement::{replace_table, Decomposition};
use lcft_fusion::reps::basis_ordering;
use lcft_fusion::tables::{decomposition_string, render_latex, render_text, Stage, TableDocument};

#[test]
fn three_methods_and_document_roundtrip_at_p4() {
    let p = 4;
    let bd = prefusion_matrices(p).unwrap();
    let (_, lim) = limit_prefusion(p, &DEFAULT_ALPHAS, 1e-5).unwrap();
    let closed = closed_table(p, Stage::Pre).unwrap();
    assert!(bd.same_entries(&lim));
    assert!(bd.same_entries(&closed));

    let post = replace_table(p, &bd).unwrap().table;
    assert!(post.all_nonnegative());

    let doc = TableDocument::from_table(&post, 1e-9, &DEFAULT_ALPHAS, true).unwrap();
    let parsed = TableDocument::from_json(&doc.to_json()).unwrap();
    assert_eq!(doc, parsed);
    assert!(parsed.to_table().unwrap().same_entries(&post));

    // renderers accept the real tables
    let text = render_text(&post).unwrap();
    assert!(text.lines().count() > 3 * p as usize);
    let latex = render_latex(&post).unwrap();
    assert!(latex.contains("\\begin{tabular}"));
}

#[test]
fn pipeline_struct_is_self_consistent() {
    let p = 5;
    let pipeline = BlockDiagPipeline::build(p).unwrap();
    // P = S K and P^{-1} = K^{-1} S multiply to the identity
    let prod = pipeline.p_mat.mul(&pipeline.p_inv).unwrap();
    assert!(prod.identity_residual() < 1e-10);
    // the family has one M per basis label and M_vacuum = 1
    assert_eq!(pipeline.m.len(), 3 * p as usize - 1);
    assert!(pipeline.m[2].identity_residual() < 1e-12);
}

#[test]
fn per_pair_closed_forms_match_table_rows() {
    let p = 6;
    let basis = basis_ordering(p).unwrap();
    let n = basis.len();
    let pre = prefusion_matrices(p).unwrap();
    let post = replace_table(p, &pre).unwrap().table;
    for i in 1..=n {
        for j in 1..=n {
            let a = *basis.label(i);
            let b = *basis.label(j);
            let want_pre: Vec<i64> = (1..=n).map(|k| pre.coeff(i, j, k)).collect();
            assert_eq!(
                prefusion_closed(p, &a, &b).unwrap().coeffs(),
                &want_pre[..],
                "pre {i},{j}"
            );
            let want_post: Vec<i64> = (1..=n).map(|k| post.coeff(i, j, k)).collect();
            assert_eq!(
                fusion_closed(p, &a, &b).unwrap().coeffs(),
                &want_post[..],
                "post {i},{j}"
            );
        }
    }
}

#[test]
fn projection_and_small_algebra_close() {
    // the projected small matrices form a closed algebra on the irreducibles:
    // row j of small N_I has no support outside the small block by the
    // projection theorem, so products stay within the 2p x 2p space
    let p = 5;
    let table = prefusion_matrices(p).unwrap();
    let small = project_small(p, &table).unwrap();
    let n_irr = 2 * p as usize;
    // vacuum (new index 3) is the identity on the small space
    for (idx, m) in small.iter().enumerate() {
        assert_eq!(m.rows(), n_irr, "matrix {idx}");
        let prod = small[2].mul(m).unwrap();
        assert_eq!(&prod, m);
    }
}

#[test]
fn decomposition_text_roundtrip_examples() {
    let basis = basis_ordering(3).unwrap();
    let dec = Decomposition::from_coeffs(3, vec![2, 0, 4, 4, -1, 0, 0, 0]).unwrap();
    assert_eq!(
        decomposition_string(&basis, dec.coeffs()),
        "2[-1/3]+4[0]+4[1]-[~0]"
    );
    // character-level identification of the indecomposable
    let tilde_only = Decomposition::from_coeffs(3, vec![2, 0, 0, 0, 1, 0, 0, 0]).unwrap();
    assert_eq!(dec.to_character_vector(), tilde_only.to_character_vector());
}
