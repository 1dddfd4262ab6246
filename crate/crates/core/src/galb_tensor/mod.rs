//! The galb gauge of a quasi-normed space and `lambda`-tensor products with
//! `L_1(mu)`.

mod galb;
mod tensor;

pub use galb::{galb_gauge_estimate, galb_gauge_estimate_with, galbs_check, GalbConfig, GalbWitness};
pub use tensor::{i_map, i_map_term_by_term, j_map, tensor_norm_estimate, witness_terms, TensorRep, Term};
