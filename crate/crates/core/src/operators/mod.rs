//! Integral and maximal operators on lattice functions.

pub mod integral;
pub mod kernel;
pub mod maximal;
pub(crate) mod quadrature;

pub use integral::{
    bi_frac, bi_frac_split, bi_frac_with, frac_int, frac_int_with, multi_frac_int, shift_cells,
};
pub use kernel::{interval_weight, kernel_table, KernelTable};
pub use maximal::{
    frac_maximal, maximal, multi_maximal, p_maximal, sparse_bound, weighted_bilinear_maximal,
};
