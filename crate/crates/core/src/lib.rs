//! Exact computation of the invariant-theoretic obstruction to compact
//! Clifford–Klein forms of reductive homogeneous spaces `G/H`.
//!
//! A pair is described by its compact data `(G_U, H_U, K_H)` through torus
//! embeddings `T_{K_H} ⊂ T_{H_U} ⊂ T_{G_U}`. The checker computes, degree by
//! degree, the kernel of the restriction map between Weyl-invariant rings
//! `Q[t_H]^{W_H} → Q[t_K]^{W_K}` and tests whether it escapes the ideal
//! generated by restrictions of positive-degree invariants of `G_U`. Any
//! escaping element is a witness that `G/H` has no compact quotient.
//!
//! All arithmetic is exact over the rationals.

pub mod catalog;
pub mod error;
pub mod groups;
pub mod linalg;
pub mod obstruction;
pub mod poly;
pub mod report;
pub mod restriction;
pub mod torus;

pub use catalog::{
    append_central_factor, builtin_entries, enlarge_ambient, find_entry, load_pair, serialize_pair,
    CatalogEntry, Expected,
};
pub use error::{Error, Result};
pub use groups::{
    hilbert_dimension, invariant_generators, weyl_sample, ClassicalFactor, Family, Generator, GroupSpec,
    WeylElement,
};
pub use obstruction::{
    applicability_precheck, check_obstruction, check_obstruction_with, ideal_piece, rank_criterion,
    verify_witness, Applicability, Certificate, CheckOptions, DegreeStats, ObstructionResult, PairFlags,
    PairSpec, Ranks, Verdict,
};
pub use poly::{
    elementary_symmetric, monomials_of_degree, to_graded_vector, GradedVector, Monomial, Polynomial, Rational,
};
pub use report::{catalog_sweep, family_sweep, Report, SweepReport};
pub use restriction::{
    builtin_torus_map, kernel_of_restriction, restrict_generator, Embedding, KernelElement,
};
pub use torus::TorusMap;

/// Version string embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
