#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(num.into(), den.into())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Valid `α` for a `C_λ` oscillator: partial sums `s_μ = -μ-1 + r_μ` with
/// `r_μ ∈ {1/4, …, 3}`, so every bound holds strictly, then `α_{λ-1} = -s_{λ-2}`.
pub fn random_alpha(rng: &mut ChaCha8Rng, lambda: usize) -> Vec<Q> {
    let mut sums = Vec::with_capacity(lambda - 1);
    for mu in 0..lambda - 1 {
        let r = q(rng.random_range(1..=12), 4);
        sums.push(q(-(mu as i64) - 1, 1) + r);
    }
    let mut alpha = Vec::with_capacity(lambda);
    let mut prev = Q::zero();
    for s in &sums {
        alpha.push(s - &prev);
        prev = s.clone();
    }
    alpha.push(-prev);
    alpha
}

/// `F(n) = n + β_{n mod λ}` computed from `α` here, independently of the library.
pub fn oracle_f(alpha: &[Q], n: i64) -> Q {
    let lambda = alpha.len() as i64;
    let mu = n.rem_euclid(lambda) as usize;
    let beta: Q = alpha[..mu].iter().sum();
    Q::from_integer(n.into()) + beta
}

/// Coefficient choices as (source text, exact value).
pub type CoefficientFn = (&'static str, fn(i64) -> Q);

pub const POLY: &[CoefficientFn] = &[
    ("1", |_| Q::one()),
    ("n", |n| Q::from_integer(n.into())),
    ("n + 1", |n| Q::from_integer((n + 1).into())),
    ("n^2", |n| Q::from_integer((n * n).into())),
];

/// Choices with `g²` strictly increasing on `n ≥ 0` (or constant).
pub const INCREASING: &[CoefficientFn] = &[
    ("1", |_| Q::one()),
    ("n + 1", |n| Q::from_integer((n + 1).into())),
    ("n^2 + 1", |n| Q::from_integer((n * n + 1).into())),
];

pub fn pick<'a>(rng: &mut ChaCha8Rng, from: &'a [CoefficientFn]) -> &'a CoefficientFn {
    &from[rng.random_range(0..from.len())]
}

/// Expression tree used to generate parser inputs, with its own evaluator.
#[derive(Clone, Debug)]
pub enum Gen {
    /// `mantissa / 10^decimals`
    Lit(u32, u32),
    Var,
    Neg(Box<Gen>),
    Add(Box<Gen>, Box<Gen>),
    Sub(Box<Gen>, Box<Gen>),
    Mul(Box<Gen>, Box<Gen>),
    Div(Box<Gen>, Box<Gen>),
    Pow(Box<Gen>, u32),
}

impl Gen {
    /// Fully parenthesized source text.
    pub fn render(&self) -> String {
        match self {
            Gen::Lit(m, 0) => m.to_string(),
            Gen::Lit(m, d) => {
                let digits = format!("{:0>width$}", m, width = *d as usize + 1);
                let split = digits.len() - *d as usize;
                format!("{}.{}", &digits[..split], &digits[split..])
            }
            Gen::Var => "n".into(),
            Gen::Neg(a) => format!("-({})", a.render()),
            Gen::Add(a, b) => format!("({}) + ({})", a.render(), b.render()),
            Gen::Sub(a, b) => format!("({}) - ({})", a.render(), b.render()),
            Gen::Mul(a, b) => format!("({}) * ({})", a.render(), b.render()),
            Gen::Div(a, b) => format!("({}) / ({})", a.render(), b.render()),
            Gen::Pow(a, k) => format!("({})^{}", a.render(), k),
        }
    }

    /// `None` on division by zero.
    pub fn value(&self, n: i64) -> Option<Q> {
        Some(match self {
            Gen::Lit(m, d) => Q::new(
                BigInt::from(*m),
                num_traits::pow(BigInt::from(10), *d as usize),
            ),
            Gen::Var => Q::from_integer(n.into()),
            Gen::Neg(a) => -a.value(n)?,
            Gen::Add(a, b) => a.value(n)? + b.value(n)?,
            Gen::Sub(a, b) => a.value(n)? - b.value(n)?,
            Gen::Mul(a, b) => a.value(n)? * b.value(n)?,
            Gen::Div(a, b) => {
                let (x, y) = (a.value(n)?, b.value(n)?);
                if y.is_zero() {
                    return None;
                }
                x / y
            }
            Gen::Pow(a, k) => num_traits::pow(a.value(n)?, *k as usize),
        })
    }
}

pub fn gen_expr() -> impl Strategy<Value = Gen> {
    let leaf = prop_oneof![
        (0u32..1000, 0u32..3).prop_map(|(m, d)| Gen::Lit(m, d)),
        Just(Gen::Var),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Gen::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Gen::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Gen::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Gen::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Gen::Div(Box::new(a), Box::new(b))),
            (inner, 0u32..4).prop_map(|(a, k)| Gen::Pow(Box::new(a), k)),
        ]
    })
}
