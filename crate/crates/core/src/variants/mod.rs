//! The three symmetry variants realized as `(p+1) × (p+1)` block operators
//! over a `C_{p+1}`-graded Fock space, their reduction to `p + 1` bosonized
//! sectors, and the sectors' exact spectra.
//!
//! | variant | charges | defining relation |
//! |---------|---------|-------------------|
//! | RSK     | `Q = √2 Σ f_i(N+1) a e_{i+1,i}` | `Σ_k Q^{p-k} Q† Q^k = 2p Q^{p-1} ℋ` |
//! | BD      | `Q = Σ √(i(p-i+1)) f_i(N+1) a e_{i+1,i}` | `[Q, [Q†, Q]] = 2 Q ℋ` |
//! | OSSQM   | `Q_i = √2 f_i(N+i) a^i e_{1,i+1}` | `Q_i Q_j† + δ_ij Σ_k Q_k† Q_k = 2 δ_ij ℋ` |
//!
//! For RSK the `f_i` are free. For BD and OSSQM the `f_i` are derived from a
//! single function (`g`, resp. `f_p`) and optional signs `ε_i`; only their
//! squares enter the Hamiltonians, so they are carried as exact squares plus a
//! sign, and a matrix entry takes one floating square root.

mod coefficients;
mod realize;
mod sector;
mod spectrum;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::block::BlockOperator;
use crate::exprlang::{EvalError, Expr};
use crate::fockrep::{FockError, FockRep};
use crate::structure::{StructureError, StructureSpec};
use crate::{Matrix, Rational};

pub use coefficients::{bd_derive_f, ossqm_derive_f, rsk_coefficients, CoefficientTable};
pub use realize::{bd_build, build, ossqm_build, reduction_unitary, rsk_build, ReductionKind};
pub use sector::{sector_operators, SectorOps};
pub use spectrum::{
    check_constant_f_compatibility, classify_breaking, closed_form_energy, degeneracy_table,
    ground_energy, BranchIndex, BreakingVerdict, Compatibility, DegeneracyGroup, Verdict,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VariantKind {
    Rsk,
    Bd,
    Ossqm,
}

impl VariantKind {
    pub fn name(self) -> &'static str {
        match self {
            VariantKind::Rsk => "RSK",
            VariantKind::Bd => "BD",
            VariantKind::Ossqm => "OSSQM",
        }
    }

    /// Which projector unitary brings this variant to block-diagonal form.
    pub fn reduction(self) -> ReductionKind {
        match self {
            VariantKind::Rsk | VariantKind::Bd => ReductionKind::Shift,
            VariantKind::Ossqm => ReductionKind::Reflect,
        }
    }
}

impl fmt::Display for VariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VariantKind {
    type Err = VariantError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rsk" => Ok(VariantKind::Rsk),
            "bd" => Ok(VariantKind::Bd),
            "ossqm" => Ok(VariantKind::Ossqm),
            _ => Err(VariantError::UnknownVariant(s.into())),
        }
    }
}

/// Coefficient functions of a variant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coefficients {
    /// `f_1 … f_p`.
    Rsk { f: Vec<Expr> },
    /// `g` and `ε_2 … ε_p` (empty means all `+1`).
    Bd { g: Expr, signs: Vec<Expr> },
    /// The BD ansatz with every `f_i = 1`; only admissible if `F` satisfies
    /// the constraints that choice imposes.
    BdUnit,
    /// `f_p` and `ε_1 … ε_{p-1}` (empty means all `+1`).
    Ossqm { f_p: Expr, signs: Vec<Expr> },
}

impl Coefficients {
    pub fn kind(&self) -> VariantKind {
        match self {
            Coefficients::Rsk { .. } => VariantKind::Rsk,
            Coefficients::Bd { .. } | Coefficients::BdUnit => VariantKind::Bd,
            Coefficients::Ossqm { .. } => VariantKind::Ossqm,
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum VariantError {
    #[error("unknown variant `{0}` (expected RSK, BD or OSSQM)")]
    UnknownVariant(String),
    #[error("order p = {0} must be at least 2")]
    OrderTooSmall(usize),
    #[error("structure function has lambda = {lambda}, but p = {p} requires lambda = p + 1")]
    LambdaMismatch { lambda: usize, p: usize },
    #[error("expected {expected} {what}, found {found}")]
    CoefficientCount {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("sign function eps_{i} takes the value {value} at n = {n}; it must be +1 or -1")]
    SignNotUnit { i: usize, n: i64, value: Rational },
    #[error("NegativeSquare({n}, {i}): f_{i}^2({n}) = {value} < 0")]
    NegativeSquare { n: i64, i: usize, value: Rational },
    #[error(
        "f_i = 1 is incompatible with this structure function: F({n}) = {lhs} but F({m}) = {rhs}"
    )]
    ConstantCoefficientsIncompatible {
        n: i64,
        m: i64,
        // Boxed to keep `Result<_, VariantError>` small.
        lhs: Box<Rational>,
        rhs: Box<Rational>,
    },
    #[error("{what} at n = {n}: {source}")]
    Coefficient {
        what: String,
        n: i64,
        source: EvalError,
    },
    #[error("sector index mu = {mu} outside 0..={p}")]
    SectorOutOfRange { mu: usize, p: usize },
    #[error("expected a {expected} configuration, got {found}")]
    WrongVariant {
        expected: VariantKind,
        found: VariantKind,
    },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// One variant instance: order, structure function, coefficients, truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariantConfig {
    p: usize,
    structure: StructureSpec,
    coeffs: Coefficients,
    dim: usize,
}

impl VariantConfig {
    /// Validates counts, `λ = p + 1`, and that every sign function is `±1`
    /// wherever the realization at truncation `dim` consults it.
    pub fn new(
        p: usize,
        structure: StructureSpec,
        coeffs: Coefficients,
        dim: usize,
    ) -> Result<Self, VariantError> {
        if p < 2 {
            return Err(VariantError::OrderTooSmall(p));
        }
        if structure.lambda() != p + 1 {
            return Err(VariantError::LambdaMismatch {
                lambda: structure.lambda(),
                p,
            });
        }
        if dim < 2 {
            return Err(FockError::DimensionTooSmall(dim).into());
        }
        match &coeffs {
            Coefficients::Rsk { f } if f.len() != p => {
                return Err(VariantError::CoefficientCount {
                    what: "functions f_1..f_p",
                    expected: p,
                    found: f.len(),
                })
            }
            Coefficients::Bd { signs, .. } | Coefficients::Ossqm { signs, .. }
                if !signs.is_empty() && signs.len() != p - 1 =>
            {
                return Err(VariantError::CoefficientCount {
                    what: "sign functions",
                    expected: p - 1,
                    found: signs.len(),
                })
            }
            _ => {}
        }
        let cfg = VariantConfig {
            p,
            structure,
            coeffs,
            dim,
        };
        cfg.check_signs()?;
        Ok(cfg)
    }

    fn check_signs(&self) -> Result<(), VariantError> {
        for i in 1..=self.p {
            let Some(sign) = self.sign_expr(i) else {
                continue;
            };
            for n in self.coefficient_domain(i) {
                let value = sign.eval(n).map_err(|source| VariantError::Coefficient {
                    what: alloc::format!("eps_{i}"),
                    n,
                    source,
                })?;
                if value != Rational::from_integer(1.into())
                    && value != Rational::from_integer((-1).into())
                {
                    return Err(VariantError::SignNotUnit { i, n, value });
                }
            }
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn structure(&self) -> &StructureSpec {
        &self.structure
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> VariantKind {
        self.coeffs.kind()
    }

    /// `ε_i`, if one was configured (`ε_1` for BD and `ε_p` for OSSQM are always 1).
    pub(crate) fn sign_expr(&self, i: usize) -> Option<&Expr> {
        match &self.coeffs {
            Coefficients::Bd { signs, .. } if i >= 2 => signs.get(i - 2),
            Coefficients::Ossqm { signs, .. } if i < self.p => signs.get(i - 1),
            _ => None,
        }
    }

    /// Integers `n` at which the matrices consult `f_i(n)`.
    pub fn coefficient_domain(&self, i: usize) -> core::ops::RangeInclusive<i64> {
        let d = self.dim as i64;
        match self.kind() {
            VariantKind::Rsk | VariantKind::Bd => 1..=d,
            VariantKind::Ossqm => i as i64..=d - 1 + i as i64,
        }
    }
}

/// A built variant: block operators, exact Hamiltonian diagonals, and the
/// Fock representation they were built on.
#[derive(Clone, Debug)]
pub struct Realization {
    pub(crate) config: VariantConfig,
    pub(crate) fock: FockRep,
    pub(crate) coefficients: Vec<CoefficientTable>,
    pub(crate) pieces: Vec<Matrix>,
    pub(crate) charges: Vec<BlockOperator>,
    pub(crate) charges_adj: Vec<BlockOperator>,
    pub(crate) hamiltonian: BlockOperator,
    pub(crate) h_diag: Vec<Vec<Rational>>,
}

impl Realization {
    pub fn config(&self) -> &VariantConfig {
        &self.config
    }

    pub fn kind(&self) -> VariantKind {
        self.config.kind()
    }

    pub fn p(&self) -> usize {
        self.config.p
    }

    pub fn fock(&self) -> &FockRep {
        &self.fock
    }

    /// `f_1 … f_p` on [`VariantConfig::coefficient_domain`].
    pub fn coefficients(&self) -> &[CoefficientTable] {
        &self.coefficients
    }

    /// The `D × D` operator carried by the `i`-th charge block (`i` from 1):
    /// `c_i f_i(N+1) a` for RSK/BD, `√2 f_i(N+i) a^i` for OSSQM.
    pub fn ladder_piece(&self, i: usize) -> &Matrix {
        &self.pieces[i - 1]
    }

    /// `[Q]` for RSK/BD, `[Q_1, …, Q_p]` for OSSQM.
    pub fn charges(&self) -> &[BlockOperator] {
        &self.charges
    }

    pub fn charges_adj(&self) -> &[BlockOperator] {
        &self.charges_adj
    }

    pub fn hamiltonian(&self) -> &BlockOperator {
        &self.hamiltonian
    }

    /// `H_i(n)` for `i = 1..=p+1` (index `i-1`) and `n = 0..D`.
    pub fn h_diag(&self) -> &[Vec<Rational>] {
        &self.h_diag
    }
}
