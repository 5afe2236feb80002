//! Computation of doubly-twisted conjugacy relations `u = φ(z)·v·ψ(z)⁻¹` in
//! finitely generated free groups, built around remnant subwords: a
//! remnant-inequality certificate that two classes are distinct, a
//! bounded-solution-length enumeration that decides the relation when a
//! strict remnant inequality holds, and seeded experiments that measure how
//! generically those conditions arise.
//!
//! The building blocks are reduced-word arithmetic with exact ball counting
//! and uniform ball sampling ([`words`]), homomorphisms as image tuples
//! ([`hom`]), remnant analysis with an independent brute-force oracle
//! ([`remnant`]), the decision procedures ([`conjugacy`]), and density
//! experiments with exact reference formulas ([`density`]).

#![forbid(unsafe_code)]

pub mod conjugacy;
pub mod density;
mod error;
pub mod hom;
pub mod remnant;
pub mod words;

pub use conjugacy::{
    bsl_decide, certify_distinct, certify_injective, decide, membership, oracle_decide,
    singly_twisted_decide, solution_bound, Certificate, CertificateKind, Decision,
    UndecidedReason,
};
pub use density::{
    coprime_density_experiment, expected_gcd_reciprocal_experiment, image_density_bound,
    image_density_experiment, rank1_rank1_expected_density, remnant_density_experiment, zeta,
    ExperimentParams, ExperimentResult, Rank1ExpectedDensitySeq, ZetaValue,
};
pub use error::Error;
pub use hom::{sample_hom, sample_hom_with, FreeHomomorphism, TwistedPair};
pub use remnant::{
    max_cancellations, min_gap, remnant_length, remnant_report, remnant_report_bruteforce,
    GeneratorRemnant, RemnantReport,
};
pub use words::{
    ball_size, enumerate_ball, format_word, parse_word, sample_word, sphere_size, Letter, Rank,
    Sign, Word, WordSampler,
};
