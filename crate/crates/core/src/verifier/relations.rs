use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use super::expr::{relation_name, Bindings, OpExpr, Symbol};
use super::VerifyError;
use crate::variants::VariantKind;

/// `lhs = rhs` with its ladder weight `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationDescriptor {
    pub name: String,
    pub lhs: OpExpr,
    pub rhs: OpExpr,
    /// Residual must be exactly zero, not merely within tolerance.
    pub exact: bool,
}

impl RelationDescriptor {
    pub fn new(lhs: impl Into<OpExpr>, rhs: impl Into<OpExpr>) -> Self {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        RelationDescriptor {
            name: relation_name(&lhs, &rhs),
            lhs,
            rhs,
            exact: false,
        }
    }

    pub fn exact(mut self) -> Self {
        self.exact = true;
        self
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn weight(&self) -> usize {
        self.lhs.ladder_weight().max(self.rhs.ladder_weight())
    }
}

/// Basis indices `0..D-w` of each Fock copy. A monomial with at most `w`
/// ladder factors applied to `|n⟩`, `n ≤ D-1-w`, never reaches past `|D-1⟩`.
pub fn safe_window(rel: &RelationDescriptor, dim: usize) -> Result<Range<usize>, VerifyError> {
    let w = rel.weight();
    if dim <= w {
        return Err(VerifyError::WindowEmpty { dim, weight: w });
    }
    Ok(0..dim - w)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelationRecord {
    pub name: String,
    pub weight: usize,
    pub window: Range<usize>,
    /// Largest column norm of `lhs - rhs` over window columns of every copy.
    pub residual: f64,
    /// Largest column norm of `lhs` or `rhs` over the same columns.
    pub scale: f64,
    pub tol: f64,
    pub exact: bool,
    pub pass: bool,
}

/// Residual of `rel` on its safe window. Passes iff the residual is at most
/// `tol · max(1, scale)`, or exactly zero for exact relations.
pub fn check_relation(
    rel: &RelationDescriptor,
    ops: &Bindings,
    tol: f64,
) -> Result<RelationRecord, VerifyError> {
    let window = safe_window(rel, ops.dim())?;
    check_relation_on(rel, ops, window, tol)
}

/// As [`check_relation`] with a caller-chosen column range.
pub fn check_relation_on(
    rel: &RelationDescriptor,
    ops: &Bindings,
    window: Range<usize>,
    tol: f64,
) -> Result<RelationRecord, VerifyError> {
    let lhs = ops.eval(&rel.lhs)?;
    let rhs = ops.eval(&rel.rhs)?;
    let diff = &lhs - &rhs;
    let mut residual = 0.0f64;
    let mut scale = 0.0f64;
    for copy in 0..ops.order() {
        for n in window.clone() {
            residual = residual.max(diff.column_norm(copy, n));
            scale = scale
                .max(lhs.column_norm(copy, n))
                .max(rhs.column_norm(copy, n));
        }
    }
    let pass = if rel.exact {
        residual == 0.0
    } else {
        residual <= tol * scale.max(1.0)
    };
    Ok(RelationRecord {
        name: rel.name.clone(),
        weight: rel.weight(),
        window,
        residual,
        scale,
        tol,
        exact: rel.exact,
        pass,
    })
}

fn sym(s: Symbol) -> OpExpr {
    s.into()
}

/// `[N, a†] = a†`, `[N, a] = -a`, `[a, a†] = G(N)`.
pub fn gdoa_relations() -> Vec<RelationDescriptor> {
    alloc::vec![
        RelationDescriptor::new(OpExpr::comm(Symbol::N, Symbol::ADag), Symbol::ADag),
        RelationDescriptor::new(OpExpr::comm(Symbol::N, Symbol::A), OpExpr::neg(Symbol::A)),
        RelationDescriptor::new(OpExpr::comm(Symbol::A, Symbol::ADag), Symbol::G),
    ]
}

/// Orthogonality, completeness, hermiticity and ladder shifting of the `P_μ`.
pub fn projector_relations(lambda: usize) -> Vec<RelationDescriptor> {
    let l = lambda as i64;
    let mut rels = Vec::new();
    for mu in 0..l {
        rels.push(RelationDescriptor::new(
            OpExpr::adjoint(Symbol::P(mu)),
            Symbol::P(mu),
        ));
        for nu in 0..l {
            let rhs = if mu == nu {
                sym(Symbol::P(mu))
            } else {
                OpExpr::zero()
            };
            rels.push(RelationDescriptor::new(
                OpExpr::product([sym(Symbol::P(mu)), sym(Symbol::P(nu))]),
                rhs,
            ));
        }
        rels.push(RelationDescriptor::new(
            OpExpr::comm(Symbol::N, Symbol::P(mu)),
            OpExpr::zero(),
        ));
        rels.push(RelationDescriptor::new(
            OpExpr::product([sym(Symbol::ADag), sym(Symbol::P(mu))]),
            OpExpr::product([sym(Symbol::P(mu + 1)), sym(Symbol::ADag)]),
        ));
        rels.push(RelationDescriptor::new(
            OpExpr::product([sym(Symbol::A), sym(Symbol::P(mu))]),
            OpExpr::product([sym(Symbol::P(mu - 1)), sym(Symbol::A)]),
        ));
    }
    rels.push(RelationDescriptor::new(
        OpExpr::sum((0..l).map(|mu| sym(Symbol::P(mu)))),
        Symbol::I,
    ));
    rels
}

/// `Σ_{k=0}^{p} Q^{p-k} Q† Q^k`.
fn rsk_multilinear(p: u32, q: Symbol, qd: Symbol, adjoint_order: bool) -> OpExpr {
    OpExpr::sum((0..=p).map(|k| {
        let (left, right) = if adjoint_order {
            (k, p - k)
        } else {
            (p - k, k)
        };
        let (x, y) = if adjoint_order { (qd, q) } else { (q, qd) };
        OpExpr::product([OpExpr::pow(x, left), sym(y), OpExpr::pow(x, right)])
    }))
}

/// The defining relations of a variant of order `p`, together with their
/// conjugates and the hermiticity identities.
pub fn variant_relations(kind: VariantKind, p: usize) -> Vec<RelationDescriptor> {
    let pu = p as u32;
    let mut rels = Vec::new();
    match kind {
        VariantKind::Rsk | VariantKind::Bd => {
            let (q, qd, h) = (Symbol::Q, Symbol::QDag, Symbol::H);
            rels.push(RelationDescriptor::new(OpExpr::pow(q, pu + 1), OpExpr::zero()).exact());
            rels.push(RelationDescriptor::new(OpExpr::comm(h, q), OpExpr::zero()));
            rels.push(RelationDescriptor::new(OpExpr::comm(h, qd), OpExpr::zero()));
            if kind == VariantKind::Rsk {
                let two_p = 2.0 * p as f64;
                rels.push(RelationDescriptor::new(
                    rsk_multilinear(pu, q, qd, false),
                    OpExpr::scaled(two_p, OpExpr::product([OpExpr::pow(q, pu - 1), sym(h)])),
                ));
                rels.push(RelationDescriptor::new(
                    rsk_multilinear(pu, q, qd, true),
                    OpExpr::scaled(two_p, OpExpr::product([sym(h), OpExpr::pow(qd, pu - 1)])),
                ));
            } else {
                rels.push(RelationDescriptor::new(
                    OpExpr::comm(q, OpExpr::comm(qd, q)),
                    OpExpr::scaled(2.0, OpExpr::product([sym(q), sym(h)])),
                ));
                rels.push(RelationDescriptor::new(
                    OpExpr::comm(OpExpr::comm(qd, q), qd),
                    OpExpr::scaled(2.0, OpExpr::product([sym(h), sym(qd)])),
                ));
            }
            rels.push(RelationDescriptor::new(OpExpr::adjoint(qd), q).exact());
        }
        VariantKind::Ossqm => {
            let h = Symbol::H;
            for i in 1..=p {
                for j in 1..=p {
                    let q_i = Symbol::Qi(i);
                    let q_j = Symbol::Qi(j);
                    rels.push(
                        RelationDescriptor::new(
                            OpExpr::product([sym(q_i), sym(q_j)]),
                            OpExpr::zero(),
                        )
                        .exact(),
                    );
                }
            }
            for i in 1..=p {
                rels.push(RelationDescriptor::new(
                    OpExpr::comm(h, Symbol::Qi(i)),
                    OpExpr::zero(),
                ));
                rels.push(RelationDescriptor::new(
                    OpExpr::comm(h, Symbol::QiDag(i)),
                    OpExpr::zero(),
                ));
            }
            let casimir = || {
                OpExpr::sum(
                    (1..=p).map(|k| OpExpr::product([sym(Symbol::QiDag(k)), sym(Symbol::Qi(k))])),
                )
            };
            for i in 1..=p {
                for j in 1..=p {
                    let mixed = OpExpr::product([sym(Symbol::Qi(i)), sym(Symbol::QiDag(j))]);
                    let rel = if i == j {
                        RelationDescriptor::new(
                            OpExpr::sum([mixed, casimir()]),
                            OpExpr::scaled(2.0, h),
                        )
                    } else {
                        RelationDescriptor::new(mixed, OpExpr::zero())
                    };
                    rels.push(rel);
                }
            }
            for i in 1..=p {
                rels.push(
                    RelationDescriptor::new(OpExpr::adjoint(Symbol::QiDag(i)), Symbol::Qi(i))
                        .exact(),
                );
            }
        }
    }
    rels.push(RelationDescriptor::new(OpExpr::adjoint(Symbol::H), Symbol::H).exact());
    rels
}
