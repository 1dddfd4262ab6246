#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bound;
pub mod cli;
pub mod convexity;
pub mod error;
pub mod ftc;
pub mod galb_tensor;
pub mod gauges;
pub mod integration;
pub mod measure;
pub mod report;
pub mod sampling;
pub mod suites;
