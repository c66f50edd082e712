//! Truncated Fock representation of a deformed oscillator algebra with a
//! `Z_λ` grading.
//!
//! Basis `|0⟩ … |D-1⟩`; `a|n⟩ = √F(n) |n-1⟩`, `a†|n⟩ = √F(n+1) |n+1⟩`, except
//! that `a†|D-1⟩ = 0`. Relations involving `a†` therefore only hold on
//! columns far enough from the top state; see [`crate::verifier`].

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::Complex;
use num_traits::Signed;

use crate::structure::{StructureError, StructureSpec};
use crate::{residue, to_f64, CMatrix, Matrix, Rational};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FockError {
    #[error("truncation dimension {0} is below 2")]
    DimensionTooSmall(usize),
    #[error("grading order lambda = {0} must be at least 2")]
    LambdaTooSmall(usize),
    #[error("NonPositiveF({n}): F({n}) = {value}")]
    NonPositiveF { n: i64, value: Rational },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Dense matrices for `N`, `a`, `a†`, `T` and `P_μ` on `D` basis states.
#[derive(Clone, Debug)]
pub struct FockRep {
    dim: usize,
    lambda: usize,
    structure: StructureSpec,
    f_values: Vec<Rational>,
    number: Matrix,
    lower: Matrix,
    raise: Matrix,
    grading: CMatrix,
    projectors: Vec<Matrix>,
}

/// `e^{2πi k/λ}` with `k` reduced first so large `k` loses no accuracy.
pub(crate) fn root_of_unity(k: i64, lambda: usize) -> Complex<f64> {
    let angle = 2.0 * PI * residue(k, lambda) as f64 / lambda as f64;
    Complex::new(libm::cos(angle), libm::sin(angle))
}

pub fn build_fock(f: &StructureSpec, dim: usize, lambda: usize) -> Result<FockRep, FockError> {
    if dim < 2 {
        return Err(FockError::DimensionTooSmall(dim));
    }
    if lambda < 2 {
        return Err(FockError::LambdaTooSmall(lambda));
    }
    let f0 = f.value(0).map_err(StructureError::from)?;
    if !num_traits::Zero::is_zero(&f0) {
        return Err(StructureError::NonZeroAtOrigin(f0).into());
    }
    let mut f_values = Vec::with_capacity(dim);
    f_values.push(f0);
    for n in 1..dim as i64 {
        let value = f.value(n).map_err(StructureError::from)?;
        if !value.is_positive() {
            return Err(FockError::NonPositiveF { n, value });
        }
        f_values.push(value);
    }

    let number = Matrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |n, _| n as f64));
    let mut lower = Matrix::zeros(dim, dim);
    for n in 1..dim {
        lower[(n - 1, n)] = libm::sqrt(to_f64(&f_values[n]));
    }
    let raise = lower.transpose();
    let grading = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |n, _| {
        root_of_unity(n as i64, lambda)
    }));
    let projectors = (0..lambda)
        .map(|mu| {
            Matrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |n, _| {
                if n % lambda == mu {
                    1.0
                } else {
                    0.0
                }
            }))
        })
        .collect();

    Ok(FockRep {
        dim,
        lambda,
        structure: f.clone(),
        f_values,
        number,
        lower,
        raise,
        grading,
        projectors,
    })
}

impl FockRep {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn structure(&self) -> &StructureSpec {
        &self.structure
    }

    /// Exact `F(n)` for `0 ≤ n < D`.
    pub fn f_values(&self) -> &[Rational] {
        &self.f_values
    }

    pub fn number(&self) -> &Matrix {
        &self.number
    }

    /// Annihilation operator `a`.
    pub fn lower(&self) -> &Matrix {
        &self.lower
    }

    /// Creation operator `a†`.
    pub fn raise(&self) -> &Matrix {
        &self.raise
    }

    /// `T = e^{2πiN/λ}`.
    pub fn grading(&self) -> &CMatrix {
        &self.grading
    }

    /// Indicator projector onto grade `μ mod λ`.
    pub fn projector(&self, mu: i64) -> &Matrix {
        &self.projectors[residue(mu, self.lambda)]
    }

    pub fn projectors(&self) -> &[Matrix] {
        &self.projectors
    }

    pub fn grade(&self, n: usize) -> usize {
        n % self.lambda
    }

    /// `(1/λ) Σ_ν e^{-2πiμν/λ} T^ν`, built from powers of `T`.
    pub fn projector_from_grading(&self, mu: usize) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim, self.dim);
        let mut t_pow = CMatrix::identity(self.dim, self.dim);
        for nu in 0..self.lambda {
            let phase = root_of_unity(-((mu * nu) as i64), self.lambda);
            acc += &t_pow * phase;
            t_pow = &t_pow * &self.grading;
        }
        acc / Complex::new(self.lambda as f64, 0.0)
    }

    /// Diagonal matrix `diag(values[0], …, values[D-1])`.
    pub fn diag<I: IntoIterator<Item = f64>>(&self, values: I) -> Matrix {
        let v: Vec<f64> = values.into_iter().collect();
        assert_eq!(
            v.len(),
            self.dim,
            "diagonal length must equal the truncation"
        );
        Matrix::from_diagonal(&nalgebra::DVector::from_vec(v))
    }

    /// `G(N)` as a diagonal matrix.
    pub fn g_matrix(&self) -> Result<Matrix, crate::EvalError> {
        let mut values = Vec::with_capacity(self.dim);
        for n in 0..self.dim as i64 {
            values.push(to_f64(&self.structure.g(n)?));
        }
        Ok(self.diag(values))
    }
}

pub(crate) fn modulus(z: Complex<f64>) -> f64 {
    libm::hypot(z.re, z.im)
}

/// Embeds a real matrix into complex entries.
pub fn complexify(m: &Matrix) -> CMatrix {
    m.map(|x| Complex::new(x, 0.0))
}
