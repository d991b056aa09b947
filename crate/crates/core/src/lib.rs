//! Numerical toolkit for bilinear fractional integrals on Morrey spaces with
//! multiple weights: lattice functions, dyadic geometry, stopping-time sparse
//! decompositions, singular integral and maximal operators, weight constants,
//! Morrey norms and a verification harness.

// `!(x > 0.0)` is how NaN is rejected along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod family;
pub mod geometry;
pub mod harness;
pub mod lattice;
pub mod morrey;
pub mod operators;
pub mod sparse;
pub mod summation;
pub mod weights;

pub use error::{Error, Result, RELATION_TOL};
pub use family::{CubeFamily, FamilyIndex, DEFAULT_CUBE_CAP};
pub use geometry::{grid_cubes, locate_shifted_dyadic, Cube, DyadicGrid};
pub use harness::{make_profile, CorpusKind, ExponentProfile, RawExponents, Report, TheoremTag};
pub use lattice::{bilinear_average, cube_average, integrate, CellBox, GridFunction, GridSpec};
pub use morrey::{morrey_norm, power_scaling_check, vector_morrey_norm, MorreyParams, NormValue};
pub use operators::{
    bi_frac, bi_frac_split, bi_frac_with, frac_int, frac_int_with, frac_maximal, interval_weight,
    kernel_table, maximal, multi_frac_int, multi_maximal, p_maximal, shift_cells, sparse_bound,
    weighted_bilinear_maximal, KernelTable,
};
pub use sparse::{cz_decompose, default_base, InvariantReport, SelectedCube, SparseFamily};
pub use weights::{
    ap_constant, apq_constant, iida_constant, multiple_apq_constant, reverse_holder_probe,
    two_weight_constant, ConstantReport, PairFamily, WeightVector, Witness,
};
