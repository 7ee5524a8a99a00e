//! Sparse binary parity-check matrices, quasi-cyclic base matrices and
//! their Tanner graphs.

mod alist;
mod graph;
mod matrix;
mod qc;

pub use alist::{parse_alist, write_alist};
pub use graph::{build_graph, check_no_4cycles, Edge, TannerGraph};
pub use matrix::{check_regular_gamma, BinaryMatrix};
pub use qc::{expand_qc, parse_qc, write_qc, QcMatrix};
