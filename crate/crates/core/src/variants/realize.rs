use alloc::vec::Vec;

use num_traits::Zero;

use super::coefficients::{structure_at, structure_product};
use super::{
    bd_derive_f, ossqm_derive_f, rsk_coefficients, CoefficientTable, Coefficients, Realization,
    VariantConfig, VariantError, VariantKind,
};
use crate::block::{block_compose, BlockOperator};
use crate::exprlang::Expr;
use crate::fockrep::{build_fock, FockRep};
use crate::{to_f64, Matrix, Rational};

/// The two projector unitaries that bring the block operators to block-diagonal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    /// `U₁`: block `(i, j)` is `P_{i-j}` (RSK and BD).
    Shift,
    /// `U₂`: block `(i, j)` is `P_{i+j-1}` (OSSQM).
    Reflect,
}

/// `U₁` or `U₂` on `p + 1` copies of `fock`, whose grading order must be `p + 1`.
pub fn reduction_unitary(kind: ReductionKind, p: usize, fock: &FockRep) -> BlockOperator {
    assert_eq!(fock.lambda(), p + 1, "reduction needs a Z_(p+1) grading");
    let entries = (0..=p)
        .flat_map(|r| (0..=p).map(move |c| (r, c)))
        .map(|(r, c)| {
            let grade = match kind {
                ReductionKind::Shift => r as i64 - c as i64,
                ReductionKind::Reflect => (r + c + 1) as i64,
            };
            ((r, c), fock.projector(grade).clone())
        });
    block_compose(p, fock.dim(), entries).expect("projectors have the block dimension")
}

/// Builds whichever variant `cfg` describes.
pub fn build(cfg: &VariantConfig) -> Result<Realization, VariantError> {
    match cfg.kind() {
        VariantKind::Rsk => rsk_build(cfg),
        VariantKind::Bd => bd_build(cfg),
        VariantKind::Ossqm => ossqm_build(cfg),
    }
}

fn expect_kind(cfg: &VariantConfig, expected: VariantKind) -> Result<(), VariantError> {
    if cfg.kind() == expected {
        Ok(())
    } else {
        Err(VariantError::WrongVariant {
            expected,
            found: cfg.kind(),
        })
    }
}

pub fn rsk_build(cfg: &VariantConfig) -> Result<Realization, VariantError> {
    expect_kind(cfg, VariantKind::Rsk)?;
    let Coefficients::Rsk { f: exprs } = cfg.coefficients() else {
        unreachable!()
    };
    let p = cfg.p();
    let structure = cfg.structure();
    let tables = rsk_coefficients(cfg)?;
    // H_i(n) = (1/p) Σ_j f_j²(m) F(m), m = n+i-j.
    let h = h_table(cfg, |i, n| {
        let mut acc = Rational::zero();
        for (j, fj) in exprs.iter().enumerate() {
            let m = n + i as i64 - (j as i64 + 1);
            let fm = structure_at(structure, m)?;
            if fm.is_zero() {
                continue;
            }
            let v = fj.eval(m).map_err(|source| VariantError::Coefficient {
                what: alloc::format!("f_{}", j + 1),
                n: m,
                source,
            })?;
            acc += &v * &v * fm;
        }
        Ok(acc / Rational::from_integer((p as i64).into()))
    })?;
    chain_realization(cfg, tables, |_| libm::sqrt(2.0), h)
}

pub fn bd_build(cfg: &VariantConfig) -> Result<Realization, VariantError> {
    expect_kind(cfg, VariantKind::Bd)?;
    let p = cfg.p();
    let structure = cfg.structure();
    let tables = bd_derive_f(cfg)?;
    let h = match cfg.coefficients() {
        // H_i(n) = f_1²(n+i-1) F(n+i-1) with f_1 = 1.
        Coefficients::BdUnit => h_table(cfg, |i, n| structure_at(structure, n + i as i64 - 1))?,
        Coefficients::Bd { g, .. } => h_table(cfg, |i, n| {
            let shift = n + i as i64;
            let prod = structure_product(structure, (1..=p as i64).map(|j| shift - j))?;
            if prod.is_zero() {
                return Ok(prod);
            }
            Ok(square_of(g, shift - 1, "g")? * prod)
        })?,
        _ => unreachable!(),
    };
    chain_realization(cfg, tables, |i| libm::sqrt((i * (p - i + 1)) as f64), h)
}

pub fn ossqm_build(cfg: &VariantConfig) -> Result<Realization, VariantError> {
    expect_kind(cfg, VariantKind::Ossqm)?;
    let Coefficients::Ossqm { f_p, .. } = cfg.coefficients() else {
        unreachable!()
    };
    let p = cfg.p();
    let structure = cfg.structure();
    let tables = ossqm_derive_f(cfg)?;
    // H_i(n) = f_p²(n+p+1-i) ∏_j F(n+j+1-i).
    let h = h_table(cfg, |i, n| {
        let base = n + 1 - i as i64;
        let prod = structure_product(structure, (1..=p as i64).map(|j| base + j))?;
        if prod.is_zero() {
            return Ok(prod);
        }
        Ok(square_of(f_p, base + p as i64, "f_p")? * prod)
    })?;

    let fock = build_fock(structure, cfg.dim(), p + 1)?;
    let dim = cfg.dim();
    let mut a_pow = fock.lower().clone();
    let mut pieces = Vec::with_capacity(p);
    for (k, table) in tables.iter().enumerate() {
        let i = k + 1;
        if i > 1 {
            a_pow = &a_pow * fock.lower();
        }
        let scale = fock.diag(
            (0..dim as i64).map(|m| libm::sqrt(2.0) * table.value(m + i as i64).unwrap_or(0.0)),
        );
        pieces.push(scale * &a_pow);
    }
    let charges = pieces
        .iter()
        .enumerate()
        .map(|(k, l)| block_compose(p, dim, [((0, k + 1), l.clone())]))
        .collect::<Result<Vec<_>, _>>()
        .expect("pieces have the block dimension");
    let charges_adj = pieces
        .iter()
        .enumerate()
        .map(|(k, l)| block_compose(p, dim, [((k + 1, 0), l.transpose())]))
        .collect::<Result<Vec<_>, _>>()
        .expect("pieces have the block dimension");
    finish(cfg, fock, tables, pieces, charges, charges_adj, h)
}

fn square_of(e: &Expr, n: i64, what: &str) -> Result<Rational, VariantError> {
    let v = e.eval(n).map_err(|source| VariantError::Coefficient {
        what: what.into(),
        n,
        source,
    })?;
    Ok(&v * &v)
}

fn h_table(
    cfg: &VariantConfig,
    mut entry: impl FnMut(usize, i64) -> Result<Rational, VariantError>,
) -> Result<Vec<Vec<Rational>>, VariantError> {
    (1..=cfg.p() + 1)
        .map(|i| (0..cfg.dim() as i64).map(|n| entry(i, n)).collect())
        .collect()
}

/// RSK and BD share the sub-diagonal chain `Q = Σ c_i f_i(N+1) a e_{i+1,i}`.
fn chain_realization(
    cfg: &VariantConfig,
    tables: Vec<CoefficientTable>,
    norm: impl Fn(usize) -> f64,
    h: Vec<Vec<Rational>>,
) -> Result<Realization, VariantError> {
    let p = cfg.p();
    let dim = cfg.dim();
    let fock = build_fock(cfg.structure(), dim, p + 1)?;
    let pieces: Vec<Matrix> = tables
        .iter()
        .map(|t| {
            let c = norm(t.index());
            fock.diag((0..dim as i64).map(|m| c * t.value(m + 1).unwrap_or(0.0))) * fock.lower()
        })
        .collect();
    let q = block_compose(
        p,
        dim,
        pieces
            .iter()
            .enumerate()
            .map(|(k, l)| ((k + 1, k), l.clone())),
    )
    .expect("pieces have the block dimension");
    let q_adj = block_compose(
        p,
        dim,
        pieces
            .iter()
            .enumerate()
            .map(|(k, l)| ((k, k + 1), l.transpose())),
    )
    .expect("pieces have the block dimension");
    finish(
        cfg,
        fock,
        tables,
        pieces,
        alloc::vec![q],
        alloc::vec![q_adj],
        h,
    )
}

fn finish(
    cfg: &VariantConfig,
    fock: FockRep,
    coefficients: Vec<CoefficientTable>,
    pieces: Vec<Matrix>,
    charges: Vec<BlockOperator>,
    charges_adj: Vec<BlockOperator>,
    h_diag: Vec<Vec<Rational>>,
) -> Result<Realization, VariantError> {
    let p = cfg.p();
    let hamiltonian = block_compose(
        p,
        cfg.dim(),
        h_diag
            .iter()
            .enumerate()
            .map(|(k, hs)| ((k, k), fock.diag(hs.iter().map(to_f64)))),
    )
    .expect("diagonals have the block dimension");
    Ok(Realization {
        config: cfg.clone(),
        fock,
        coefficients,
        pieces,
        charges,
        charges_adj,
        hamiltonian,
        h_diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;
    use crate::structure::StructureSpec;
    use alloc::vec;

    fn sample() -> StructureSpec {
        StructureSpec::clambda(3, vec![ratio(1, 1), ratio(-1, 2), ratio(-1, 2)]).unwrap()
    }

    #[test]
    fn rsk_hamiltonian_entries() {
        let cfg = VariantConfig::new(
            2,
            sample(),
            Coefficients::Rsk {
                f: vec![Expr::one(), Expr::one()],
            },
            6,
        )
        .unwrap();
        let r = build(&cfg).unwrap();
        // H_1(0) = (F(0) + F(-1)) / 2.
        assert_eq!(r.h_diag()[0][0], ratio(-1, 4));
        assert_eq!(r.hamiltonian().block(0, 0).unwrap()[(0, 0)], -0.25);
        assert_eq!(r.charges().len(), 1);
        assert!(r.charges()[0].block(1, 0).is_some());
        assert!(r.charges()[0].block(0, 1).is_none());
        assert_eq!(r.charges_adj()[0], r.charges()[0].adjoint());
    }

    #[test]
    fn rsk_standard_diagonal() {
        let std3 = StructureSpec::standard(3).unwrap();
        let cfg = VariantConfig::new(
            2,
            std3,
            Coefficients::Rsk {
                f: vec![Expr::one(), Expr::one()],
            },
            8,
        )
        .unwrap();
        let r = build(&cfg).unwrap();
        for i in 1..=3 {
            for n in 0..8 {
                assert_eq!(
                    r.h_diag()[i - 1][n],
                    ratio(2 * (n as i64 + i as i64) - 3, 2)
                );
            }
        }
    }

    #[test]
    fn bd_hamiltonian_entry() {
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
        let r = build(&cfg).unwrap();
        // H_3(1) = F(3) F(2).
        assert_eq!(r.h_diag()[2][1], ratio(15, 2));
        // Piece 1 carries √(1·2); f_1(4) = √F(3) and a[3, 4] = √F(4).
        let expected = libm::sqrt(2.0) * libm::sqrt(3.0) * libm::sqrt(5.0);
        assert!((r.ladder_piece(1)[(3, 4)] - expected).abs() < 1e-14);
    }

    #[test]
    fn ossqm_hamiltonian_entry_and_shape() {
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
        let r = build(&cfg).unwrap();
        // H_1(0) = F(1) F(2).
        assert_eq!(r.h_diag()[0][0], ratio(5, 1));
        assert_eq!(r.charges().len(), 2);
        assert!(r.charges()[1].block(0, 2).is_some());
        let q2 = r.ladder_piece(2);
        // Q_2 lowers by two: nonzero only on the second superdiagonal.
        for row in 0..6 {
            for col in 0..6 {
                if col != row + 2 {
                    assert_eq!(q2[(row, col)], 0.0);
                }
            }
        }
    }

    #[test]
    fn unit_ansatz_rejected_for_standard_structure() {
        let cfg = VariantConfig::new(
            2,
            StructureSpec::standard(3).unwrap(),
            Coefficients::BdUnit,
            6,
        )
        .unwrap();
        assert!(matches!(
            build(&cfg),
            Err(VariantError::ConstantCoefficientsIncompatible { n: 1, m: 2, .. })
        ));
    }

    #[test]
    fn unitaries_are_permutations() {
        let fock = build_fock(&sample(), 7, 3).unwrap();
        for kind in [ReductionKind::Shift, ReductionKind::Reflect] {
            let u = reduction_unitary(kind, 2, &fock);
            let prod = &u * &u.adjoint();
            assert_eq!(prod.to_dense(), Matrix::identity(21, 21));
        }
    }
}
