//! Semi-algebraic approximation of discontinuous functions from the moments
//! of their graph measures, through regularized Christoffel–Darboux kernels.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approximant;
pub mod basis;
pub mod benchmarks;
pub mod cdkernel;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod moments;
pub mod poly;
pub mod quadrature;
pub mod support;

pub use approximant::{evaluate, evaluate_batch, partial_argmin, ApproxConfig, Precision};
pub use basis::{basis_size, BasisFamily, BasisSpec, MultiIndex};
pub use benchmarks::{Benchmark, StepFamily};
pub use cdkernel::{build_kernel, gamma_threshold, CDKernel, Filter, ThresholdParams};
pub use error::{Error, Result};
pub use graph::{Discontinuities, GraphFunction};
pub use moments::{
    analytic_moment_matrix, empirical_moment_matrix, load_matrix, quadrature_moment_matrix, save_matrix,
    AnalyticGraph, MomentMatrix, Provenance,
};
pub use support::{support_report, SupportReport};
