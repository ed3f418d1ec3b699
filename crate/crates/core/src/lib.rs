//! Exact tensor-rank workbench over finite fields.
//!
//! Computes and cross-checks the zoo of tensor ranks over GF(p^k): analytic
//! rank (exact character-sum and zero-count routes), geometric rank via
//! extension-tower estimation, slice/partition/cp-rank and subrank by
//! certificate-producing exhaustive search, and slice ranks of tensor
//! subspaces. Includes explicit interpolation constructions for
//! field-extension multiplication tensors.
//!
//! Everything is exact: counts are integers, searches are exhaustive within
//! hard guards, and every rank claim ships with a re-verifiable certificate.

pub mod constructions;
pub mod error;
pub mod gf;
pub mod mat;
pub mod ranks;
pub mod subspace;
pub mod tensor;

pub use constructions::{
    interp_decomp, poly_monotonicity_check, pushforward_to_extension, subrank_cert_interpolation,
    tw_tensor, InterpDecomp, MonotonicityReport,
};
pub use error::{Error, Result};
pub use gf::{embed, field_make, ArithOp, Embedding, FieldElem, FieldSpec};
pub use mat::Matrix;
pub use ranks::{
    analytic_rank_char, analytic_rank_zero_count, cp_decomposition_exists, cp_rank,
    geometric_rank_estimate, partition_rank, slice_rank, sr_k_subspace, sr_subspace,
    subrank_at_least, ARExact, DecompCert, DecompKind, DecompTerm, Factor, GREstimate,
    RestrictionCert, SearchGuard, DEFAULT_POINT_BUDGET,
};
pub use subspace::{
    enumerate_subspaces, gaussian_binomial, member_of_slice_sum, tensor_subspace_direct_sum,
    EnumerationGuard, Subspace, TensorSubspace,
};
pub use tensor::{
    apply_matrices, base_change, contract, direct_sum, flatten, identity_tensor, kronecker,
    matmul_tensor, mult_tensor, poly_mult_tensor, random_tensor, Contracted, MatrixTuple, Tensor,
};
