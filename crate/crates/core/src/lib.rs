//! Fusion rules of the c_{p,1} triplet models computed from modular data.
//!
//! Three independent routes produce the same integer tables:
//!
//! * the limit-Verlinde formula ([`limit_verlinde`]): the usual Verlinde sum
//!   applied to the alpha-dependent S-matrix, followed by the numeric
//!   alpha -> 0 limit;
//! * the extended block-diagonalisation method ([`block_diag`]): the
//!   alpha-free matrices S_p, K_p, P_p = S_p K_p and the per-label block
//!   matrices M_{p,I}, with N_{p,I} = P_p M_{p,I} P_p^{-1};
//! * closed-form stepped sums ([`closed_form`]).
//!
//! [`replacement`] turns the pre-fusion tables (which may carry negative
//! coefficients) into the conjectured fusion tables, and [`theta`] backs the
//! modular matrices with honest q-series checks.

pub mod alpha_modular;
pub mod block_diag;
pub mod closed_form;
pub mod error;
pub mod golden;
pub mod laurent;
pub mod limit_verlinde;
pub mod matrix;
pub mod replacement;
pub mod reps;
pub mod tables;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};

#[cfg(test)]
mod concurrency {
    //! Everything here is immutable value data; pipelines for distinct p (or
    //! distinct labels) can run on any number of threads.

    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn public_types_are_send_and_sync() {
        assert_send_sync::<crate::laurent::LaurentScalar>();
        assert_send_sync::<crate::laurent::AlphaMatrix>();
        assert_send_sync::<crate::matrix::CMat>();
        assert_send_sync::<crate::matrix::RMat>();
        assert_send_sync::<crate::matrix::IMat>();
        assert_send_sync::<crate::reps::BasisOrdering>();
        assert_send_sync::<crate::reps::Permutation>();
        assert_send_sync::<crate::replacement::Decomposition>();
        assert_send_sync::<crate::tables::PreFusionTable>();
        assert_send_sync::<crate::tables::TableDocument>();
        assert_send_sync::<crate::block_diag::BlockDiagPipeline>();
        assert_send_sync::<crate::theta::QSeriesContext>();
    }
}
