//! Structure functions `F(N)` of deformed oscillator algebras.
//!
//! Two kinds are supported: the `C_λ`-extended oscillator family, fixed by
//! `λ` real parameters `α_μ` summing to zero, and an arbitrary user
//! expression in `n`. For the `C_λ` family
//!
//! ```text
//! F(n) = n + β_{n mod λ},   β_0 = 0,   β_μ = α_0 + … + α_{μ-1}
//! ```
//!
//! which is also how `F` is continued to negative `n`.

use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::exprlang::{EvalError, Expr};
use crate::{residue, Rational};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("grading order lambda = {0} must be at least 2")]
    LambdaTooSmall(usize),
    #[error("expected {expected} alpha parameters, found {found}")]
    AlphaLength { expected: usize, found: usize },
    #[error("alpha parameters sum to {0}, not 0")]
    SumNotZero(Rational),
    #[error("PositivityViolated({mu}): alpha_0 + ... + alpha_{mu} = {partial} is not > {bound}")]
    PositivityViolated {
        mu: usize,
        partial: Rational,
        bound: i64,
    },
    #[error("F(0) = {0}, expected 0")]
    NonZeroAtOrigin(Rational),
    #[error("F({n}) = {value} is not positive")]
    NonPositive { n: i64, value: Rational },
    #[error("structure function: {0}")]
    Eval(#[from] EvalError),
}

/// Validated parameters of a `C_λ`-extended oscillator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CLambdaParams {
    lambda: usize,
    alpha: Vec<Rational>,
    beta: Vec<Rational>,
}

impl CLambdaParams {
    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn alpha(&self) -> &[Rational] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Rational] {
        &self.beta
    }
}

/// Checks `Σ α_μ = 0` and the partial-sum bounds that keep `F(μ) > 0`.
pub fn validate_clambda(
    lambda: usize,
    alpha: Vec<Rational>,
) -> Result<CLambdaParams, StructureError> {
    if lambda < 2 {
        return Err(StructureError::LambdaTooSmall(lambda));
    }
    if alpha.len() != lambda {
        return Err(StructureError::AlphaLength {
            expected: lambda,
            found: alpha.len(),
        });
    }
    let mut partial = Rational::zero();
    for (mu, a) in alpha.iter().take(lambda - 1).enumerate() {
        partial += a;
        let bound = -(mu as i64) - 1;
        if partial <= Rational::from_integer(bound.into()) {
            return Err(StructureError::PositivityViolated { mu, partial, bound });
        }
    }
    let total: Rational = alpha.iter().sum();
    if !total.is_zero() {
        return Err(StructureError::SumNotZero(total));
    }
    let mut beta = Vec::with_capacity(lambda);
    let mut acc = Rational::zero();
    beta.push(acc.clone());
    for a in &alpha[..lambda - 1] {
        acc += a;
        beta.push(acc.clone());
    }
    Ok(CLambdaParams {
        lambda,
        alpha,
        beta,
    })
}

/// A structure function together with the grading order it is used with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StructureSpec {
    CLambda(CLambdaParams),
    UserExpr { expr: Expr, lambda: usize },
}

impl StructureSpec {
    /// The standard oscillator `F(n) = n` viewed as the `α = 0` member of the `C_λ` family.
    pub fn standard(lambda: usize) -> Result<Self, StructureError> {
        Ok(StructureSpec::CLambda(validate_clambda(
            lambda,
            alloc::vec![Rational::zero(); lambda],
        )?))
    }

    pub fn clambda(lambda: usize, alpha: Vec<Rational>) -> Result<Self, StructureError> {
        Ok(StructureSpec::CLambda(validate_clambda(lambda, alpha)?))
    }

    pub fn lambda(&self) -> usize {
        match self {
            StructureSpec::CLambda(p) => p.lambda,
            StructureSpec::UserExpr { lambda, .. } => *lambda,
        }
    }

    /// `β_μ` for the `C_λ` family; `None` for expression-backed `F`.
    pub fn beta(&self) -> Option<&[Rational]> {
        match self {
            StructureSpec::CLambda(p) => Some(&p.beta),
            StructureSpec::UserExpr { .. } => None,
        }
    }

    pub fn value(&self, n: i64) -> Result<Rational, EvalError> {
        match self {
            StructureSpec::CLambda(p) => {
                Ok(Rational::from_integer(n.into()) + &p.beta[residue(n, p.lambda)])
            }
            StructureSpec::UserExpr { expr, .. } => expr.eval(n),
        }
    }

    /// `G(n) = F(n+1) - F(n)`.
    pub fn g(&self, n: i64) -> Result<Rational, EvalError> {
        Ok(self.value(n + 1)? - self.value(n)?)
    }

    /// `F(0) = 0` and `F(n) > 0` for `1 ≤ n ≤ n_max`.
    pub fn check_fock_conditions(&self, n_max: i64) -> Result<(), StructureError> {
        let f0 = self.value(0)?;
        if !f0.is_zero() {
            return Err(StructureError::NonZeroAtOrigin(f0));
        }
        for n in 1..=n_max {
            let value = self.value(n)?;
            if !value.is_positive() {
                return Err(StructureError::NonPositive { n, value });
            }
        }
        Ok(())
    }

    /// True for the `α = 0` member of the `C_λ` family, i.e. `F(n) = n`.
    pub fn is_standard(&self) -> bool {
        match self {
            StructureSpec::CLambda(p) => p.alpha.iter().all(Zero::is_zero),
            StructureSpec::UserExpr { .. } => false,
        }
    }
}

/// `F(n)`, defined for every integer.
pub fn structure_value(spec: &StructureSpec, n: i64) -> Result<Rational, EvalError> {
    spec.value(n)
}

/// `G(n) = F(n+1) - F(n)`.
pub fn g_value(spec: &StructureSpec, n: i64) -> Result<Rational, EvalError> {
    spec.g(n)
}
