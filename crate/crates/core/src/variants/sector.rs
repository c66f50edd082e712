use alloc::vec::Vec;

use super::{Realization, VariantError, VariantKind};
use crate::{residue, to_f64, Matrix, Rational};

/// One bosonized sector: `D × D` charges, their adjoints, and a diagonal
/// Hamiltonian with its exact eigenvalues.
#[derive(Clone, Debug)]
pub struct SectorOps {
    pub kind: VariantKind,
    pub p: usize,
    pub mu: usize,
    /// One charge for RSK/BD, `p` for OSSQM.
    pub charges: Vec<Matrix>,
    pub charges_adj: Vec<Matrix>,
    pub hamiltonian: Matrix,
    /// `ℋ_μ |n⟩ = energies[n] |n⟩`.
    pub energies: Vec<Rational>,
}

/// `op · P_grade`: keeps the columns of grade `grade mod (p+1)`.
fn keep_columns(op: &Matrix, grade: i64, lambda: usize) -> Matrix {
    let g = residue(grade, lambda);
    Matrix::from_fn(op.nrows(), op.ncols(), |r, c| {
        if c % lambda == g {
            op[(r, c)]
        } else {
            0.0
        }
    })
}

/// Which `H_i` (1-based) acts on level `n` of sector `μ`.
pub(crate) fn energy_branch(kind: VariantKind, p: usize, mu: usize, n: usize) -> usize {
    let lambda = p + 1;
    let r = match kind {
        VariantKind::Rsk | VariantKind::Bd => residue(mu as i64 + 1 - n as i64, lambda),
        VariantKind::Ossqm => residue(n as i64 - mu as i64, lambda),
    };
    if r == 0 {
        lambda
    } else {
        r
    }
}

/// Sector `μ ∈ 0..=p`, built directly from the ladder pieces and projectors.
///
/// For RSK/BD: `Q_μ = Σ_i L_i P_{μ+1-i}`, `ℋ_μ = Σ_i H_i P_{μ+1-i}`.
/// For OSSQM: `Q_{iμ} = L_i P_{μ+i+1}`, `ℋ_μ = Σ_i H_i P_{μ+i}`.
/// Block `μ + 1` of the reduced operators equals this exactly.
pub fn sector_operators(r: &Realization, mu: usize) -> Result<SectorOps, VariantError> {
    let p = r.p();
    if mu > p {
        return Err(VariantError::SectorOutOfRange { mu, p });
    }
    let lambda = p + 1;
    let kind = r.kind();
    let mu_i = mu as i64;
    let (charges, charges_adj) = match kind {
        VariantKind::Rsk | VariantKind::Bd => {
            let dim = r.config.dim();
            let mut q = Matrix::zeros(dim, dim);
            let mut q_adj = Matrix::zeros(dim, dim);
            for (k, piece) in r.pieces.iter().enumerate() {
                let i = k as i64 + 1;
                q += keep_columns(piece, mu_i + 1 - i, lambda);
                q_adj += keep_columns(&piece.transpose(), mu_i - i, lambda);
            }
            (alloc::vec![q], alloc::vec![q_adj])
        }
        VariantKind::Ossqm => r
            .pieces
            .iter()
            .enumerate()
            .map(|(k, piece)| {
                let i = k as i64 + 1;
                (
                    keep_columns(piece, mu_i + i + 1, lambda),
                    keep_columns(&piece.transpose(), mu_i + 1, lambda),
                )
            })
            .unzip(),
    };
    let energies: Vec<Rational> = (0..r.config.dim())
        .map(|n| r.h_diag[energy_branch(kind, p, mu, n) - 1][n].clone())
        .collect();
    let hamiltonian = r.fock.diag(energies.iter().map(to_f64));
    Ok(SectorOps {
        kind,
        p,
        mu,
        charges,
        charges_adj,
        hamiltonian,
        energies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::Expr;
    use crate::ratio;
    use crate::structure::StructureSpec;
    use crate::variants::{build, reduction_unitary, Coefficients, VariantConfig};
    use alloc::vec;

    fn sample() -> StructureSpec {
        StructureSpec::clambda(3, vec![ratio(1, 1), ratio(-1, 2), ratio(-1, 2)]).unwrap()
    }

    fn check_blocks_match(cfg: VariantConfig) {
        let r = build(&cfg).unwrap();
        let u = reduction_unitary(r.kind().reduction(), r.p(), r.fock());
        let h = r.hamiltonian().conjugate_by(&u);
        assert!(h.is_block_diagonal_of_diagonals());
        for mu in 0..=r.p() {
            let s = sector_operators(&r, mu).unwrap();
            assert_eq!(h.block_or_zero(mu, mu), s.hamiltonian, "sector {mu}");
            for (k, q) in r.charges().iter().enumerate() {
                let reduced = q.conjugate_by(&u);
                assert_eq!(
                    reduced.block_or_zero(mu, mu),
                    s.charges[k],
                    "sector {mu}, charge {k}"
                );
                let reduced_adj = r.charges_adj()[k].conjugate_by(&u);
                assert_eq!(reduced_adj.block_or_zero(mu, mu), s.charges_adj[k]);
            }
        }
    }

    #[test]
    fn rsk_sectors_are_reduced_blocks() {
        check_blocks_match(
            VariantConfig::new(
                2,
                sample(),
                Coefficients::Rsk {
                    f: vec![Expr::one(), "n + 1".parse().unwrap()],
                },
                8,
            )
            .unwrap(),
        );
    }

    #[test]
    fn bd_sectors_are_reduced_blocks() {
        check_blocks_match(
            VariantConfig::new(
                2,
                sample(),
                Coefficients::Bd {
                    g: "n^2 + 1".parse().unwrap(),
                    signs: vec![],
                },
                8,
            )
            .unwrap(),
        );
    }

    #[test]
    fn ossqm_sectors_are_reduced_blocks() {
        check_blocks_match(
            VariantConfig::new(
                2,
                sample(),
                Coefficients::Ossqm {
                    f_p: Expr::one(),
                    signs: vec![],
                },
                8,
            )
            .unwrap(),
        );
    }

    #[test]
    fn standard_bd_sector_zero_levels() {
        let std3 = StructureSpec::standard(3).unwrap();
        let cfg = VariantConfig::new(
            2,
            std3,
            Coefficients::Bd {
                g: Expr::one(),
                signs: vec![],
            },
            6,
        )
        .unwrap();
        let s = sector_operators(&build(&cfg).unwrap(), 0).unwrap();
        let expected: Vec<_> = [0, 6, 6, 6, 30].iter().map(|&e| ratio(e, 1)).collect();
        assert_eq!(&s.energies[..5], &expected[..]);
    }

    #[test]
    fn sector_index_checked() {
        let cfg = VariantConfig::new(2, sample(), Coefficients::BdUnit, 4);
        assert!(cfg.is_ok());
        let rsk = VariantConfig::new(
            2,
            sample(),
            Coefficients::Rsk {
                f: vec![Expr::one(), Expr::one()],
            },
            4,
        )
        .unwrap();
        let r = build(&rsk).unwrap();
        assert_eq!(
            sector_operators(&r, 3).unwrap_err(),
            VariantError::SectorOutOfRange { mu: 3, p: 2 }
        );
    }
}
