use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Zero;

use super::coefficients::{structure_at, structure_product};
use super::{Coefficients, Realization, SectorOps, VariantError, VariantKind};
use crate::structure::StructureSpec;
use crate::Rational;

/// `n = k (p+1) + ν` with `0 ≤ ν ≤ p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BranchIndex {
    pub k: usize,
    pub nu: usize,
}

impl BranchIndex {
    pub fn of(n: usize, p: usize) -> Self {
        BranchIndex {
            k: n / (p + 1),
            nu: n % (p + 1),
        }
    }
}

fn coefficient_err(what: &str, n: i64) -> impl FnOnce(crate::EvalError) -> VariantError + '_ {
    move |source| VariantError::Coefficient {
        what: what.into(),
        n,
        source,
    }
}

/// Eigenvalue of `ℋ_μ` on `|n⟩`, from the closed formulas indexed by the
/// branch `n = k(p+1) + ν`:
///
/// ```text
/// t = k(p+1) + μ          if ν ≤ μ
/// t = (k+1)(p+1) + μ      if ν > μ
/// RSK    (1/p) Σ_i f_i²(t-i+1) F(t-i+1)
/// BD     g²(t) ∏_i F(t-i+1)
/// OSSQM  f_p²(t) ∏_i F(t-p+i)
/// ```
///
/// Independent of the matrices; evaluated straight from the configuration.
pub fn closed_form_energy(r: &Realization, mu: usize, n: usize) -> Result<Rational, VariantError> {
    let p = r.p();
    if mu > p {
        return Err(VariantError::SectorOutOfRange { mu, p });
    }
    let BranchIndex { k, nu } = BranchIndex::of(n, p);
    let block = if nu <= mu { k } else { k + 1 };
    let t = (block * (p + 1) + mu) as i64;
    let f = r.config().structure();
    let p_i = p as i64;
    match r.config().coefficients() {
        Coefficients::Rsk { f: fs } => {
            let mut acc = Rational::zero();
            for (idx, fi) in fs.iter().enumerate() {
                let m = t - idx as i64;
                let fm = structure_at(f, m)?;
                if fm.is_zero() {
                    continue;
                }
                let v = fi.eval(m).map_err(coefficient_err("f_i", m))?;
                acc += &v * &v * fm;
            }
            Ok(acc / Rational::from_integer(p_i.into()))
        }
        Coefficients::Bd { g, .. } => {
            let prod = structure_product(f, (1..=p_i).map(|i| t - i + 1))?;
            if prod.is_zero() {
                return Ok(prod);
            }
            let v = g.eval(t).map_err(coefficient_err("g", t))?;
            Ok(&v * &v * prod)
        }
        Coefficients::BdUnit => structure_at(f, t),
        Coefficients::Ossqm { f_p, .. } => {
            let prod = structure_product(f, (1..=p_i).map(|i| t - p_i + i))?;
            if prod.is_zero() {
                return Ok(prod);
            }
            let v = f_p.eval(t).map_err(coefficient_err("f_p", t))?;
            Ok(&v * &v * prod)
        }
    }
}

/// Lowest level of sector `μ`, i.e. the closed form at `n = 0`.
pub fn ground_energy(r: &Realization, mu: usize) -> Result<Rational, VariantError> {
    closed_form_energy(r, mu, 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Unbroken,
    Broken,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Unbroken => "Unbroken",
            Verdict::Broken => "Broken",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BreakingVerdict {
    pub mu: usize,
    pub verdict: Verdict,
    pub ground_energy: Rational,
    pub ground_degeneracy: usize,
    /// Levels attaining the ground energy below the truncation margin.
    pub ground_levels: Vec<usize>,
    /// `max_g ‖X|g⟩‖` for each charge `X`, then for each adjoint.
    pub charge_residuals: Vec<f64>,
}

impl BreakingVerdict {
    pub fn max_residual(&self) -> f64 {
        self.charge_residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Levels `n < D - (p+1)` are clear of truncation effects in every charge.
fn reliable_levels(s: &SectorOps) -> usize {
    let dim = s.energies.len();
    dim.saturating_sub(s.p + 1).max(1)
}

/// Unbroken iff every charge and adjoint annihilates every ground state
/// (each column norm at most `tol`).
pub fn classify_breaking(s: &SectorOps, tol: f64) -> BreakingVerdict {
    let levels = reliable_levels(s);
    let ground_energy = s.energies[..levels]
        .iter()
        .min()
        .cloned()
        .expect("at least one level");
    let ground_levels: Vec<usize> = (0..levels)
        .filter(|&n| s.energies[n] == ground_energy)
        .collect();
    let charge_residuals: Vec<f64> = s
        .charges
        .iter()
        .chain(&s.charges_adj)
        .map(|q| {
            ground_levels
                .iter()
                .map(|&n| q.column(n).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    let verdict = if charge_residuals.iter().all(|&x| x <= tol) {
        Verdict::Unbroken
    } else {
        Verdict::Broken
    };
    BreakingVerdict {
        mu: s.mu,
        verdict,
        ground_energy,
        ground_degeneracy: ground_levels.len(),
        ground_levels,
        charge_residuals,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegeneracyGroup {
    pub energy: Rational,
    pub multiplicity: usize,
    pub levels: Vec<usize>,
    /// Some member sits within `p + 1` of the truncation, so partners may be missing.
    pub possibly_incomplete: bool,
}

/// Exact eigenvalues of a sector grouped by value, lowest first.
pub fn degeneracy_table(s: &SectorOps) -> Vec<DegeneracyGroup> {
    let edge = s.energies.len().saturating_sub(s.p + 1);
    let mut groups: BTreeMap<&Rational, Vec<usize>> = BTreeMap::new();
    for (n, e) in s.energies.iter().enumerate() {
        groups.entry(e).or_default().push(n);
    }
    groups
        .into_iter()
        .map(|(energy, levels)| DegeneracyGroup {
            energy: energy.clone(),
            multiplicity: levels.len(),
            possibly_incomplete: levels.iter().any(|&n| n >= edge),
            levels,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Compatibility {
    Compatible,
    /// `F(n) ≠ F(n + i - 1)`.
    Incompatible {
        n: i64,
        i: usize,
        lhs: Rational,
        rhs: Rational,
    },
}

/// Whether the BD ansatz with all `f_i = 1` is consistent with `F`, which
/// requires `F(n) = F(n + i - 1)` for `i = 2..=p` and `1 ≤ n ≤ window`.
pub fn check_constant_f_compatibility(
    p: usize,
    f: &StructureSpec,
    window: i64,
) -> Result<Compatibility, VariantError> {
    for n in 1..=window {
        let lhs = structure_at(f, n)?;
        for i in 2..=p {
            let rhs = structure_at(f, n + i as i64 - 1)?;
            if rhs != lhs {
                return Ok(Compatibility::Incompatible { n, i, lhs, rhs });
            }
        }
    }
    Ok(Compatibility::Compatible)
}

impl VariantKind {
    /// Variants whose symmetry is unbroken exactly when the ground energy is zero.
    pub(crate) fn zero_energy_criterion(self) -> bool {
        matches!(self, VariantKind::Bd | VariantKind::Ossqm)
    }
}
