use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::VerifyError;
use crate::block::BlockOperator;
use crate::fockrep::FockRep;
use crate::residue;
use crate::variants::{Realization, SectorOps, VariantKind};
use crate::Matrix;

/// Operator names a relation may mention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// The single charge of RSK/BD.
    Q,
    QDag,
    /// `Q_i` of OSSQM, `i` from 1.
    Qi(usize),
    QiDag(usize),
    H,
    N,
    A,
    ADag,
    /// `G(N)`.
    G,
    /// `P_μ`, index taken mod the grading order.
    P(i64),
    I,
}

impl Symbol {
    /// Number of `a`/`a†` factors the operator contains.
    pub fn ladder_weight(self) -> usize {
        match self {
            Symbol::Q | Symbol::QDag | Symbol::A | Symbol::ADag => 1,
            Symbol::Qi(i) | Symbol::QiDag(i) => i,
            Symbol::H | Symbol::N | Symbol::G | Symbol::P(_) | Symbol::I => 0,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Q => f.write_str("Q"),
            Symbol::QDag => f.write_str("Q†"),
            Symbol::Qi(i) => write!(f, "Q_{i}"),
            Symbol::QiDag(i) => write!(f, "Q†_{i}"),
            Symbol::H => f.write_str("H"),
            Symbol::N => f.write_str("N"),
            Symbol::A => f.write_str("a"),
            Symbol::ADag => f.write_str("a†"),
            Symbol::G => f.write_str("G(N)"),
            Symbol::P(mu) => write!(f, "P_{mu}"),
            Symbol::I => f.write_str("I"),
        }
    }
}

/// Operator expression tree. Scalars stand for multiples of the identity.
#[derive(Clone, Debug, PartialEq)]
pub enum OpExpr {
    Sym(Symbol),
    Scalar(f64),
    Sum(Vec<OpExpr>),
    Product(Vec<OpExpr>),
    Pow(Box<OpExpr>, u32),
    Neg(Box<OpExpr>),
    Scaled(f64, Box<OpExpr>),
    Comm(Box<OpExpr>, Box<OpExpr>),
    Adjoint(Box<OpExpr>),
}

impl From<Symbol> for OpExpr {
    fn from(s: Symbol) -> Self {
        OpExpr::Sym(s)
    }
}

impl OpExpr {
    pub fn product(factors: impl IntoIterator<Item = OpExpr>) -> Self {
        OpExpr::Product(factors.into_iter().collect())
    }

    pub fn sum(terms: impl IntoIterator<Item = OpExpr>) -> Self {
        OpExpr::Sum(terms.into_iter().collect())
    }

    pub fn pow(base: impl Into<OpExpr>, k: u32) -> Self {
        OpExpr::Pow(Box::new(base.into()), k)
    }

    pub fn comm(a: impl Into<OpExpr>, b: impl Into<OpExpr>) -> Self {
        OpExpr::Comm(Box::new(a.into()), Box::new(b.into()))
    }

    pub fn scaled(c: f64, e: impl Into<OpExpr>) -> Self {
        OpExpr::Scaled(c, Box::new(e.into()))
    }

    pub fn neg(e: impl Into<OpExpr>) -> Self {
        OpExpr::Neg(Box::new(e.into()))
    }

    pub fn adjoint(e: impl Into<OpExpr>) -> Self {
        OpExpr::Adjoint(Box::new(e.into()))
    }

    pub fn zero() -> Self {
        OpExpr::Scalar(0.0)
    }

    /// Largest number of ladder factors in any monomial of the expanded expression.
    pub fn ladder_weight(&self) -> usize {
        match self {
            OpExpr::Sym(s) => s.ladder_weight(),
            OpExpr::Scalar(_) => 0,
            OpExpr::Sum(ts) => ts.iter().map(OpExpr::ladder_weight).max().unwrap_or(0),
            OpExpr::Product(fs) => fs.iter().map(OpExpr::ladder_weight).sum(),
            OpExpr::Pow(b, k) => b.ladder_weight() * *k as usize,
            OpExpr::Neg(e) | OpExpr::Scaled(_, e) | OpExpr::Adjoint(e) => e.ladder_weight(),
            OpExpr::Comm(a, b) => a.ladder_weight() + b.ladder_weight(),
        }
    }

    fn is_atomic(&self) -> bool {
        matches!(self, OpExpr::Sym(_) | OpExpr::Comm(..))
            || matches!(self, OpExpr::Scalar(c) if *c >= 0.0)
    }
}

impl fmt::Display for OpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |e: &OpExpr, f: &mut fmt::Formatter<'_>| {
            if e.is_atomic() {
                write!(f, "{e}")
            } else {
                write!(f, "({e})")
            }
        };
        match self {
            OpExpr::Sym(s) => write!(f, "{s}"),
            OpExpr::Scalar(c) => write!(f, "{c}"),
            OpExpr::Sum(ts) if ts.is_empty() => f.write_str("0"),
            OpExpr::Sum(ts) => {
                for (k, t) in ts.iter().enumerate() {
                    match (k, t) {
                        (0, OpExpr::Neg(inner)) => write!(f, "-{inner}")?,
                        (0, t) => write!(f, "{t}")?,
                        (_, OpExpr::Neg(inner)) => write!(f, " - {inner}")?,
                        (_, t) => write!(f, " + {t}")?,
                    }
                }
                Ok(())
            }
            OpExpr::Product(fs) if fs.is_empty() => f.write_str("I"),
            OpExpr::Product(fs) => {
                for (k, x) in fs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" ")?;
                    }
                    match x {
                        OpExpr::Pow(..) | OpExpr::Adjoint(_) => write!(f, "{x}")?,
                        _ => wrap(x, f)?,
                    }
                }
                Ok(())
            }
            OpExpr::Pow(b, k) => {
                wrap(b, f)?;
                write!(f, "^{k}")
            }
            OpExpr::Neg(e) => {
                f.write_str("-")?;
                wrap(e, f)
            }
            OpExpr::Scaled(c, e) => {
                write!(f, "{c} ")?;
                wrap(e, f)
            }
            OpExpr::Comm(a, b) => write!(f, "[{a}, {b}]"),
            OpExpr::Adjoint(e) => {
                wrap(e, f)?;
                f.write_str("†")
            }
        }
    }
}

/// Concrete operators for the symbols, all on `order` copies of a `dim`-state space.
#[derive(Clone, Debug)]
pub struct Bindings {
    order: usize,
    dim: usize,
    lambda: Option<usize>,
    ops: BTreeMap<Symbol, BlockOperator>,
}

fn single(m: Matrix) -> BlockOperator {
    let dim = m.nrows();
    let mut op = BlockOperator::zeros(1, dim);
    op.set_block(0, 0, m).expect("square matrix");
    op
}

fn block_diagonal(order: usize, m: &Matrix) -> BlockOperator {
    let mut op = BlockOperator::zeros(order, m.nrows());
    for i in 0..order {
        op.set_block(i, i, m.clone()).expect("square matrix");
    }
    op
}

impl Bindings {
    pub fn new(order: usize, dim: usize) -> Self {
        Bindings {
            order,
            dim,
            lambda: None,
            ops: BTreeMap::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bind(&mut self, symbol: Symbol, op: BlockOperator) -> Result<(), VerifyError> {
        if op.order() != self.order || op.dim() != self.dim {
            return Err(VerifyError::DimensionMismatch {
                symbol: alloc::format!("{symbol}"),
                expected: (self.order, self.dim),
                found: (op.order(), op.dim()),
            });
        }
        let key = match (symbol, self.lambda) {
            (Symbol::P(mu), Some(l)) => Symbol::P(residue(mu, l) as i64),
            _ => symbol,
        };
        self.ops.insert(key, op);
        Ok(())
    }

    fn bind_fock_generators(&mut self, rep: &FockRep) -> Result<(), VerifyError> {
        let order = self.order;
        let embed = |m: &Matrix| block_diagonal(order, m);
        self.lambda = Some(rep.lambda());
        self.bind(Symbol::N, embed(rep.number()))?;
        self.bind(Symbol::A, embed(rep.lower()))?;
        self.bind(Symbol::ADag, embed(rep.raise()))?;
        self.bind(Symbol::G, embed(&rep.g_matrix()?))?;
        for (mu, pm) in rep.projectors().iter().enumerate() {
            self.bind(Symbol::P(mu as i64), embed(pm))?;
        }
        Ok(())
    }

    /// `N`, `a`, `a†`, `G(N)`, `P_μ` on a single Fock copy.
    pub fn for_fock(rep: &FockRep) -> Result<Self, VerifyError> {
        let mut b = Bindings::new(1, rep.dim());
        b.bind_fock_generators(rep)?;
        Ok(b)
    }

    /// Block charges and Hamiltonian, plus the Fock generators on every copy.
    pub fn for_realization(r: &Realization) -> Result<Self, VerifyError> {
        let mut b = Bindings::new(r.p() + 1, r.fock().dim());
        b.bind_fock_generators(r.fock())?;
        b.bind(Symbol::H, r.hamiltonian().clone())?;
        bind_charges(&mut b, r.kind(), r.charges(), r.charges_adj())?;
        Ok(b)
    }

    /// The charges and Hamiltonian of one sector, plus the Fock generators.
    pub fn for_sector(s: &SectorOps, rep: &FockRep) -> Result<Self, VerifyError> {
        let mut b = Bindings::new(1, rep.dim());
        b.bind_fock_generators(rep)?;
        b.bind(Symbol::H, single(s.hamiltonian.clone()))?;
        let charges: Vec<_> = s.charges.iter().cloned().map(single).collect();
        let charges_adj: Vec<_> = s.charges_adj.iter().cloned().map(single).collect();
        bind_charges(&mut b, s.kind, &charges, &charges_adj)?;
        Ok(b)
    }

    pub fn get(&self, symbol: Symbol) -> Result<&BlockOperator, VerifyError> {
        let key = match (symbol, self.lambda) {
            (Symbol::P(mu), Some(l)) => Symbol::P(residue(mu, l) as i64),
            _ => symbol,
        };
        self.ops
            .get(&key)
            .ok_or_else(|| VerifyError::MissingBinding(alloc::format!("{symbol}")))
    }

    /// Evaluates `e` to a block operator.
    pub fn eval(&self, e: &OpExpr) -> Result<BlockOperator, VerifyError> {
        let identity = || BlockOperator::identity(self.order, self.dim);
        Ok(match e {
            OpExpr::Sym(Symbol::I) => identity(),
            OpExpr::Sym(s) => self.get(*s)?.clone(),
            OpExpr::Scalar(c) => identity().scale(*c),
            OpExpr::Sum(ts) => {
                let mut acc = BlockOperator::zeros(self.order, self.dim);
                for t in ts {
                    acc = &acc + &self.eval(t)?;
                }
                acc
            }
            OpExpr::Product(fs) => {
                let mut iter = fs.iter();
                let Some(first) = iter.next() else {
                    return Ok(identity());
                };
                let mut acc = self.eval(first)?;
                for x in iter {
                    acc = &acc * &self.eval(x)?;
                }
                acc
            }
            OpExpr::Pow(b, k) => self.eval(b)?.pow(*k),
            OpExpr::Neg(x) => -&self.eval(x)?,
            OpExpr::Scaled(c, x) => self.eval(x)?.scale(*c),
            OpExpr::Comm(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                &(&a * &b) - &(&b * &a)
            }
            OpExpr::Adjoint(x) => self.eval(x)?.adjoint(),
        })
    }
}

fn bind_charges(
    b: &mut Bindings,
    kind: VariantKind,
    charges: &[BlockOperator],
    charges_adj: &[BlockOperator],
) -> Result<(), VerifyError> {
    match kind {
        VariantKind::Rsk | VariantKind::Bd => {
            b.bind(Symbol::Q, charges[0].clone())?;
            b.bind(Symbol::QDag, charges_adj[0].clone())?;
        }
        VariantKind::Ossqm => {
            for (k, (q, qd)) in charges.iter().zip(charges_adj).enumerate() {
                b.bind(Symbol::Qi(k + 1), q.clone())?;
                b.bind(Symbol::QiDag(k + 1), qd.clone())?;
            }
        }
    }
    Ok(())
}

/// Renders `lhs = rhs`.
pub(crate) fn relation_name(lhs: &OpExpr, rhs: &OpExpr) -> String {
    alloc::format!("{lhs} = {rhs}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockrep::build_fock;
    use crate::structure::StructureSpec;
    use alloc::string::ToString;

    #[test]
    fn weights_are_syntactic() {
        let q = OpExpr::from(Symbol::Q);
        assert_eq!(OpExpr::pow(Symbol::Q, 3).ladder_weight(), 3);
        let inner = OpExpr::comm(Symbol::QDag, Symbol::Q);
        assert_eq!(OpExpr::comm(q.clone(), inner).ladder_weight(), 3);
        let sum = OpExpr::sum([
            OpExpr::product([Symbol::Qi(2).into(), Symbol::QiDag(3).into()]),
            Symbol::H.into(),
        ]);
        assert_eq!(sum.ladder_weight(), 5);
        assert_eq!(
            OpExpr::scaled(4.0, OpExpr::product([q, Symbol::H.into()])).ladder_weight(),
            1
        );
    }

    #[test]
    fn display() {
        let e = OpExpr::comm(Symbol::Q, OpExpr::comm(Symbol::QDag, Symbol::Q));
        assert_eq!(e.to_string(), "[Q, [Q†, Q]]");
        let e = OpExpr::product([
            OpExpr::pow(Symbol::Q, 2),
            Symbol::QDag.into(),
            Symbol::H.into(),
        ]);
        assert_eq!(e.to_string(), "Q^2 Q† H");
        let e = OpExpr::sum([
            Symbol::N.into(),
            OpExpr::neg(Symbol::A),
            OpExpr::scaled(2.0, Symbol::G),
        ]);
        assert_eq!(e.to_string(), "N - a + 2 G(N)");
    }

    #[test]
    fn evaluation_of_commutator() {
        let rep = build_fock(&StructureSpec::standard(2).unwrap(), 5, 2).unwrap();
        let b = Bindings::for_fock(&rep).unwrap();
        let c = b.eval(&OpExpr::comm(Symbol::N, Symbol::ADag)).unwrap();
        assert!((&c - b.get(Symbol::ADag).unwrap()).max_abs() < 1e-14);
        assert_eq!(b.get(Symbol::P(3)).unwrap(), b.get(Symbol::P(1)).unwrap());
        assert!(matches!(
            b.get(Symbol::Q),
            Err(VerifyError::MissingBinding(_))
        ));
        let wrong = BlockOperator::zeros(2, 5);
        let mut b = b;
        assert!(matches!(
            b.bind(Symbol::H, wrong),
            Err(VerifyError::DimensionMismatch { .. })
        ));
    }
}
