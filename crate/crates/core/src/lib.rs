//! Parasupersymmetric and orthosupersymmetric quantum mechanics on truncated
//! deformed-oscillator Fock spaces.
//!
//! The crate builds the generators `N`, `a`, `a†` of a generalized deformed
//! oscillator algebra with structure function `F`, a `Z_λ` grading `T` with
//! its projectors `P_μ`, and on top of those the `(p+1) × (p+1)` block
//! realizations of three symmetry variants:
//!
//! * RSK parasupersymmetry (multilinear relation),
//! * Beckers–Debergh parasupersymmetry (double-commutator relation),
//! * orthosupersymmetry (`p` charge pairs).
//!
//! Every realization reduces to `p + 1` bosonized sectors under a unitary
//! built from projectors. The [`verifier`] checks the defining relations on
//! truncation-safe windows, the reduction, and that each sector's exact
//! spectrum equals its closed form.
//!
//! All scalar coefficient functions are exact rationals; floating point only
//! appears in matrix entries (one square root per entry).

#![no_std]

extern crate alloc;

pub mod exprlang;
pub mod fockrep;
pub mod structure;
pub mod variants;
pub mod verifier;

mod block;

pub use block::{block_compose, BlockError, BlockOperator};
pub use exprlang::{evaluate, parse_expression, EvalError, Expr, ParseError, ParseErrorKind};
pub use fockrep::{build_fock, FockError, FockRep};
pub use structure::{
    g_value, structure_value, validate_clambda, CLambdaParams, StructureError, StructureSpec,
};
pub use variants::{
    build, classify_breaking, closed_form_energy, degeneracy_table, ground_energy,
    reduction_unitary, sector_operators, Coefficients, Realization, SectorOps, VariantConfig,
    VariantError, VariantKind,
};
pub use verifier::{
    verify_fock, verify_reduction, verify_variant, Mode, Tolerances, VerificationReport,
    VerifyError,
};

/// Exact scalar type used for every coefficient, structure-function value and energy.
pub type Rational = num_rational::BigRational;

/// Dense real matrix.
pub type Matrix = nalgebra::DMatrix<f64>;

/// Dense complex matrix (only the grading operator needs one).
pub type CMatrix = nalgebra::DMatrix<nalgebra::Complex<f64>>;

/// Converts an exact value to the nearest `f64`.
pub fn to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

/// Builds a rational from an integer numerator and denominator.
///
/// Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// `n mod m` mapped into `0..m`.
pub(crate) fn residue(n: i64, m: usize) -> usize {
    n.rem_euclid(m as i64) as usize
}
