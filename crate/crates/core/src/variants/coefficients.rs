use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::{Coefficients, VariantConfig, VariantError, VariantKind};
use crate::exprlang::Expr;
use crate::structure::StructureSpec;
use crate::{to_f64, Rational};

/// `f_i(n)` over a contiguous range of `n`, stored as an exact square and a sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientTable {
    index: usize,
    first: i64,
    squares: Vec<Rational>,
    signs: Vec<i8>,
}

impl CoefficientTable {
    /// `i`, counted from 1.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn range(&self) -> core::ops::RangeInclusive<i64> {
        self.first..=self.first + self.squares.len() as i64 - 1
    }

    pub fn square(&self, n: i64) -> Option<&Rational> {
        self.offset(n).map(|k| &self.squares[k])
    }

    /// `-1`, `0` or `1`; zero exactly when the square is zero.
    pub fn sign(&self, n: i64) -> Option<i8> {
        self.offset(n).map(|k| self.signs[k])
    }

    /// `f_i(n)` as a float, `sign · √(f_i²(n))`.
    pub fn value(&self, n: i64) -> Option<f64> {
        let k = self.offset(n)?;
        Some(f64::from(self.signs[k]) * libm::sqrt(to_f64(&self.squares[k])))
    }

    fn offset(&self, n: i64) -> Option<usize> {
        let k = n.checked_sub(self.first)?;
        usize::try_from(k).ok().filter(|&k| k < self.squares.len())
    }
}

fn sign_of(x: &Rational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn eval(
    expr: &Expr,
    n: i64,
    what: impl FnOnce() -> alloc::string::String,
) -> Result<Rational, VariantError> {
    expr.eval(n).map_err(|source| VariantError::Coefficient {
        what: what(),
        n,
        source,
    })
}

pub(crate) fn structure_at(f: &StructureSpec, n: i64) -> Result<Rational, VariantError> {
    f.value(n).map_err(|source| VariantError::Coefficient {
        what: "F".into(),
        n,
        source,
    })
}

/// `∏ F(n + k)` over the given offsets; stops early at a zero factor.
pub(crate) fn structure_product(
    f: &StructureSpec,
    args: impl IntoIterator<Item = i64>,
) -> Result<Rational, VariantError> {
    let mut acc = Rational::one();
    for m in args {
        let v = structure_at(f, m)?;
        if v.is_zero() {
            return Ok(v);
        }
        acc *= v;
    }
    Ok(acc)
}

fn sign_factor(cfg: &VariantConfig, i: usize, n: i64) -> Result<i8, VariantError> {
    match cfg.sign_expr(i) {
        None => Ok(1),
        Some(e) => Ok(sign_of(&eval(e, n, || format!("eps_{i}"))?)),
    }
}

fn wrong(cfg: &VariantConfig, expected: VariantKind) -> VariantError {
    VariantError::WrongVariant {
        expected,
        found: cfg.kind(),
    }
}

/// Tabulates the user-supplied `f_1 … f_p` of an RSK configuration.
pub fn rsk_coefficients(cfg: &VariantConfig) -> Result<Vec<CoefficientTable>, VariantError> {
    let Coefficients::Rsk { f } = cfg.coefficients() else {
        return Err(wrong(cfg, VariantKind::Rsk));
    };
    let mut tables = Vec::with_capacity(cfg.p());
    for (k, fi) in f.iter().enumerate() {
        let i = k + 1;
        let range = cfg.coefficient_domain(i);
        let mut table = CoefficientTable {
            index: i,
            first: *range.start(),
            squares: Vec::new(),
            signs: Vec::new(),
        };
        for n in range {
            let v = eval(fi, n, || format!("f_{i}"))?;
            table.signs.push(sign_of(&v));
            table.squares.push(&v * &v);
        }
        tables.push(table);
    }
    Ok(tables)
}

/// BD coefficients from `g`:
/// `f_i²(n) = g²(n+i-1) ∏_{j≠i} F(n+i-j)`, sign `ε_i(n) · sgn g(n+i-1)`.
///
/// `g` is not evaluated where the product vanishes. For [`Coefficients::BdUnit`]
/// every `f_i = 1`, provided `F` passes [`check_constant_f_compatibility`](super::check_constant_f_compatibility).
pub fn bd_derive_f(cfg: &VariantConfig) -> Result<Vec<CoefficientTable>, VariantError> {
    let p = cfg.p();
    let f = cfg.structure();
    let g = match cfg.coefficients() {
        Coefficients::Bd { g, .. } => g,
        Coefficients::BdUnit => {
            let window = cfg.dim() as i64 - 1;
            if let super::Compatibility::Incompatible { n, i, lhs, rhs } =
                super::check_constant_f_compatibility(p, f, window)?
            {
                return Err(VariantError::ConstantCoefficientsIncompatible {
                    n,
                    m: n + i as i64 - 1,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                });
            }
            return Ok((1..=p)
                .map(|i| {
                    let range = cfg.coefficient_domain(i);
                    let len = (range.end() - range.start() + 1) as usize;
                    CoefficientTable {
                        index: i,
                        first: *range.start(),
                        squares: alloc::vec![Rational::one(); len],
                        signs: alloc::vec![1; len],
                    }
                })
                .collect());
        }
        _ => return Err(wrong(cfg, VariantKind::Bd)),
    };
    let mut tables = Vec::with_capacity(p);
    for i in 1..=p {
        let range = cfg.coefficient_domain(i);
        let mut table = CoefficientTable {
            index: i,
            first: *range.start(),
            squares: Vec::new(),
            signs: Vec::new(),
        };
        for n in range {
            let shift = n + i as i64;
            let prod = structure_product(f, (1..=p).filter(|&j| j != i).map(|j| shift - j as i64))?;
            let (square, sign) = if prod.is_zero() {
                (prod, 0)
            } else {
                let gv = eval(g, shift - 1, || "g".into())?;
                let square = &gv * &gv * prod;
                let sign = if square.is_zero() {
                    0
                } else {
                    sign_factor(cfg, i, n)? * sign_of(&gv)
                };
                (square, sign)
            };
            if square.is_negative() {
                return Err(VariantError::NegativeSquare {
                    n,
                    i,
                    value: square,
                });
            }
            table.squares.push(square);
            table.signs.push(sign);
        }
        tables.push(table);
    }
    Ok(tables)
}

/// OSSQM coefficients from `f_p`:
/// `f_i²(n) = f_p²(n+p-i) ∏_{j=1}^{p-i} F(n+j)`, sign `ε_i(n) · sgn f_p(n+p-i)`.
pub fn ossqm_derive_f(cfg: &VariantConfig) -> Result<Vec<CoefficientTable>, VariantError> {
    let Coefficients::Ossqm { f_p, .. } = cfg.coefficients() else {
        return Err(wrong(cfg, VariantKind::Ossqm));
    };
    let p = cfg.p();
    let f = cfg.structure();
    let mut tables = Vec::with_capacity(p);
    for i in 1..=p {
        let range = cfg.coefficient_domain(i);
        let mut table = CoefficientTable {
            index: i,
            first: *range.start(),
            squares: Vec::new(),
            signs: Vec::new(),
        };
        for n in range {
            let prod = structure_product(f, (1..=(p - i) as i64).map(|j| n + j))?;
            let (square, sign) = if prod.is_zero() {
                (prod, 0)
            } else {
                let fv = eval(f_p, n + (p - i) as i64, || format!("f_{p}"))?;
                let square = &fv * &fv * prod;
                let sign = if square.is_zero() {
                    0
                } else {
                    sign_factor(cfg, i, n)? * sign_of(&fv)
                };
                (square, sign)
            };
            if square.is_negative() {
                return Err(VariantError::NegativeSquare {
                    n,
                    i,
                    value: square,
                });
            }
            table.squares.push(square);
            table.signs.push(sign);
        }
        tables.push(table);
    }
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;
    use alloc::vec;

    fn sample() -> StructureSpec {
        StructureSpec::clambda(3, vec![ratio(1, 1), ratio(-1, 2), ratio(-1, 2)]).unwrap()
    }

    #[test]
    fn bd_squares_for_unit_g() {
        let cfg = VariantConfig::new(
            2,
            sample(),
            Coefficients::Bd {
                g: Expr::one(),
                signs: vec![],
            },
            6,
        )
        .unwrap();
        let t = bd_derive_f(&cfg).unwrap();
        // f_1²(n) = F(n-1) · g², f_2²(n) = F(n+1) · g².
        assert_eq!(t[0].square(1), Some(&ratio(0, 1)));
        assert_eq!(t[0].sign(1), Some(0));
        assert_eq!(t[0].square(3), Some(&ratio(5, 2)));
        assert_eq!(t[1].square(1), Some(&ratio(5, 2)));
        assert_eq!(t[1].value(2), Some(libm::sqrt(3.0)));
        assert_eq!(t[1].square(7), None);
    }

    #[test]
    fn bd_signs_follow_eps_and_g() {
        let coeffs = Coefficients::Bd {
            g: "-1".parse().unwrap(),
            signs: vec!["-1".parse().unwrap()],
        };
        let cfg = VariantConfig::new(2, sample(), coeffs, 5).unwrap();
        let t = bd_derive_f(&cfg).unwrap();
        assert_eq!(t[0].sign(2), Some(-1));
        assert_eq!(t[1].sign(2), Some(1));
    }

    #[test]
    fn ossqm_squares() {
        let cfg = VariantConfig::new(
            2,
            sample(),
            Coefficients::Ossqm {
                f_p: Expr::one(),
                signs: vec![],
            },
            6,
        )
        .unwrap();
        let t = ossqm_derive_f(&cfg).unwrap();
        // f_1²(n) = f_2²(n+1) F(n+1).
        assert_eq!(t[0].range(), 1..=6);
        assert_eq!(t[1].range(), 2..=7);
        assert_eq!(t[0].square(1), Some(&ratio(5, 2)));
        assert_eq!(t[0].square(2), Some(&ratio(3, 1)));
        assert_eq!(t[1].square(5), Some(&ratio(1, 1)));
    }

    #[test]
    fn negative_square_is_reported() {
        let spec = StructureSpec::UserExpr {
            expr: "n*(9 - n)".parse().unwrap(),
            lambda: 3,
        };
        let cfg = VariantConfig::new(
            2,
            spec,
            Coefficients::Ossqm {
                f_p: Expr::one(),
                signs: vec![],
            },
            9,
        )
        .unwrap();
        assert!(matches!(
            ossqm_derive_f(&cfg),
            Err(VariantError::NegativeSquare { n: 9, i: 1, .. })
        ));
    }

    #[test]
    fn wrong_variant() {
        let cfg = VariantConfig::new(2, sample(), Coefficients::BdUnit, 4).unwrap();
        assert!(matches!(
            ossqm_derive_f(&cfg),
            Err(VariantError::WrongVariant { .. })
        ));
        assert!(matches!(
            rsk_coefficients(&cfg),
            Err(VariantError::WrongVariant { .. })
        ));
    }
}
