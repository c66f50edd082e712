//! Representation-level checks of every operator identity, restricted to
//! basis columns the truncation cannot reach.
//!
//! A relation is an [`OpExpr`] equation. Its ladder weight `w` is the largest
//! number of `a`/`a†` factors in any monomial (a product adds weights, a sum
//! takes the maximum, `Q_i` of OSSQM counts `i`). Applied to `|n⟩` with
//! `n ≤ D-1-w` no monomial reaches past `|D-1⟩`, so only those columns are
//! compared.
//!
//! Entries grow like `(f² F)^{p}`, so a relation passes when the largest
//! column residual is at most `tol · max(1, s)` with `s` the largest column
//! norm of either side.

mod expr;
mod relations;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use num_traits::{Signed, Zero};

use crate::fockrep::{complexify, root_of_unity, FockError, FockRep};
use crate::structure::StructureSpec;
use crate::variants::{
    classify_breaking, closed_form_energy, degeneracy_table, reduction_unitary, sector_operators,
    BreakingVerdict, DegeneracyGroup, Realization, ReductionKind, SectorOps, VariantError,
    VariantKind, Verdict,
};
use crate::{residue, to_f64, CMatrix, Rational};

pub use expr::{Bindings, OpExpr, Symbol};
pub use relations::{
    check_relation, check_relation_on, gdoa_relations, projector_relations, safe_window,
    variant_relations, RelationDescriptor, RelationRecord,
};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("WindowEmpty: D = {dim} leaves no safe column for ladder weight {weight}")]
    WindowEmpty { dim: usize, weight: usize },
    #[error("no operator bound to `{0}`")]
    MissingBinding(String),
    #[error("operator `{symbol}` has shape {found:?} (copies, dim), expected {expected:?}")]
    DimensionMismatch {
        symbol: String,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("NotUnitary: max |U U† - I| = {residual:e}")]
    NotUnitary { residual: f64 },
    #[error(transparent)]
    Variant(#[from] VariantError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("structure function: {0}")]
    Eval(#[from] crate::EvalError),
}

/// Relation residuals use `relation`; unitarity and comparisons of
/// independently built operators use `equality`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub relation: f64,
    pub equality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            relation: 1e-9,
            equality: 1e-12,
        }
    }
}

/// `Exact` adds rational checks of everything that avoids square roots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    #[default]
    Float,
    Exact,
}

/// A named scalar check. `value` is a residual (or `0` for exact checks).
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub pass: bool,
    /// First counterexample, if any.
    pub note: Option<String>,
}

impl Check {
    fn within(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            value,
            pass: value <= tol,
            note: None,
        }
    }

    fn exact(name: impl Into<String>, failure: Option<String>) -> Self {
        Check {
            name: name.into(),
            value: 0.0,
            pass: failure.is_none(),
            note: failure,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockReport {
    pub dim: usize,
    pub lambda: usize,
    pub relations: Vec<RelationRecord>,
    /// Identities of the complex grading operator `T`.
    pub grading: Vec<RelationRecord>,
    pub projector_cross_check: Check,
    pub exact: Vec<Check>,
}

impl FockReport {
    pub fn pass(&self) -> bool {
        self.relations.iter().chain(&self.grading).all(|r| r.pass)
            && self.projector_cross_check.pass
            && self.exact.iter().all(|c| c.pass)
    }
}

fn complex_column_norm(m: &CMatrix, col: usize) -> f64 {
    libm::sqrt(
        m.column(col)
            .iter()
            .map(|z| z.re * z.re + z.im * z.im)
            .sum(),
    )
}

fn complex_record(
    name: &str,
    lhs: &CMatrix,
    rhs: &CMatrix,
    window: Range<usize>,
    weight: usize,
    tol: f64,
) -> RelationRecord {
    let diff = lhs - rhs;
    let mut residual = 0.0f64;
    let mut scale = 0.0f64;
    for n in window.clone() {
        residual = residual.max(complex_column_norm(&diff, n));
        scale = scale
            .max(complex_column_norm(lhs, n))
            .max(complex_column_norm(rhs, n));
    }
    RelationRecord {
        name: name.into(),
        weight,
        window,
        residual,
        scale,
        tol,
        exact: false,
        pass: residual <= tol * scale.max(1.0),
    }
}

fn grading_records(rep: &FockRep, tol: f64) -> Vec<RelationRecord> {
    let d = rep.dim();
    let lambda = rep.lambda();
    let t = rep.grading();
    let id = CMatrix::identity(d, d);
    let n = complexify(rep.number());
    let a = complexify(rep.lower());
    let ad = complexify(rep.raise());
    let q = root_of_unity(1, lambda);
    let q_inv = root_of_unity(-1, lambda);
    let mut t_pow = id.clone();
    for _ in 0..lambda {
        t_pow = &t_pow * t;
    }
    let ladder = 0..d - 1;
    alloc::vec![
        complex_record("T† T = I", &(t.adjoint() * t), &id, 0..d, 0, tol),
        complex_record(&format!("T^{lambda} = I"), &t_pow, &id, 0..d, 0, tol),
        complex_record(
            "[N, T] = 0",
            &(&n * t - t * &n),
            &CMatrix::zeros(d, d),
            0..d,
            0,
            tol
        ),
        complex_record(
            "a† T = q^-1 T a†",
            &(&ad * t),
            &((t * &ad) * q_inv),
            ladder.clone(),
            1,
            tol
        ),
        complex_record("a T = q T a", &(&a * t), &((t * &a) * q), ladder, 1, tol),
    ]
}

fn projector_cross_check(rep: &FockRep, tol: f64) -> Check {
    let d = rep.dim();
    let mut worst = 0.0f64;
    let mut total = CMatrix::zeros(d, d);
    for mu in 0..rep.lambda() {
        let from_t = rep.projector_from_grading(mu);
        let diff = &from_t - complexify(rep.projector(mu as i64));
        worst = diff
            .iter()
            .map(|z| crate::fockrep::modulus(*z))
            .fold(worst, f64::max);
        total += from_t;
    }
    let completeness = (total - CMatrix::identity(d, d))
        .iter()
        .map(|z| crate::fockrep::modulus(*z))
        .fold(0.0, f64::max);
    Check::within(
        "P_mu from T equals the grade indicator; sum is I",
        worst.max(completeness),
        tol,
    )
}

/// Exact versions of the oscillator and grading identities.
fn fock_exact_checks(rep: &FockRep) -> Result<Vec<Check>, VerifyError> {
    let f = rep.f_values();
    let d = rep.dim();
    let mut ccr = None;
    let mut number = None;
    for n in 0..d {
        // (a†a)_{nn} = (√F(n))², (a a†)_{nn} = (√F(n+1))² below the top state.
        if number.is_none() && f[n] != rep.structure().value(n as i64)? {
            number = Some(format!("n = {n}"));
        }
        if n + 1 < d && ccr.is_none() && &f[n + 1] - &f[n] != rep.structure().g(n as i64)? {
            ccr = Some(format!("n = {n}"));
        }
    }
    // T = q^N with exponent e(n) = n mod λ. Entry (n+1, n) of a† T carries
    // q^e(n), of q^-1 T a† carries q^(e(n+1) - 1); entry (n, n+1) of a T
    // carries q^e(n+1), of q T a carries q^(e(n) + 1).
    let lambda = rep.lambda();
    let e = |n: usize| rep.grade(n) as i64;
    let grading = (0..d - 1)
        .find(|&n| {
            residue(e(n), lambda) != residue(e(n + 1) - 1, lambda)
                || residue(e(n + 1), lambda) != residue(e(n) + 1, lambda)
        })
        .map(|n| format!("n = {n}"));
    Ok(alloc::vec![
        Check::exact("a† a = F(N) (exact)", number),
        Check::exact("[a, a†] = G(N) (exact)", ccr),
        Check::exact("a† T = q^-1 T a†, a T = q T a (exact exponents)", grading),
    ])
}

/// GDOA relations, grading identities and projector identities of one Fock representation.
pub fn verify_fock(rep: &FockRep, tol: &Tolerances, mode: Mode) -> Result<FockReport, VerifyError> {
    let ops = Bindings::for_fock(rep)?;
    let relations = gdoa_relations()
        .iter()
        .chain(&projector_relations(rep.lambda()))
        .map(|rel| check_relation(rel, &ops, tol.relation))
        .collect::<Result<Vec<_>, _>>()?;
    let exact = if mode == Mode::Exact {
        fock_exact_checks(rep)?
    } else {
        Vec::new()
    };
    Ok(FockReport {
        dim: rep.dim(),
        lambda: rep.lambda(),
        relations,
        grading: grading_records(rep, tol.relation),
        projector_cross_check: projector_cross_check(rep, tol.equality),
        exact,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionRecord {
    pub kind: ReductionKind,
    pub unitarity_residual: f64,
    /// Largest off-diagonal-block column norm of the conjugated operators.
    pub off_block_residual: f64,
    /// Largest column norm of (diagonal block μ) − (sector μ operator).
    pub block_vs_sector_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

fn check_reduction(
    r: &Realization,
    u: &crate::BlockOperator,
    sectors: &[SectorOps],
    tol: f64,
) -> Result<ReductionRecord, VerifyError> {
    let total = u.total_dim();
    let uu = (u * &u.adjoint()).to_dense();
    let unitarity_residual = (uu - crate::Matrix::identity(total, total)).amax();
    if unitarity_residual > tol {
        return Err(VerifyError::NotUnitary {
            residual: unitarity_residual,
        });
    }
    let kind = match r.kind() {
        VariantKind::Rsk | VariantKind::Bd => ReductionKind::Shift,
        VariantKind::Ossqm => ReductionKind::Reflect,
    };
    let d = r.fock().dim();
    let p = r.p();
    let mut off_block = 0.0f64;
    let mut block_vs_sector = 0.0f64;
    let mut compare = |op: &crate::BlockOperator,
                       weight: usize,
                       sector_op: &dyn Fn(&SectorOps) -> &crate::Matrix| {
        let conj = op.conjugate_by(u);
        let window = 0..d.saturating_sub(weight);
        for (copy, sector) in sectors.iter().enumerate().take(p + 1) {
            let block = conj.block_or_zero(copy, copy);
            let diff = block - sector_op(sector);
            for n in window.clone() {
                off_block = off_block.max(conj.off_diagonal_column_norm(copy, n));
                block_vs_sector = block_vs_sector.max(diff.column(n).norm());
            }
        }
    };
    compare(r.hamiltonian(), 0, &|s| &s.hamiltonian);
    for k in 0..r.charges().len() {
        let weight = match r.kind() {
            VariantKind::Ossqm => k + 1,
            _ => 1,
        };
        compare(&r.charges()[k], weight, &|s| &s.charges[k]);
        compare(&r.charges_adj()[k], weight, &|s| &s.charges_adj[k]);
    }
    Ok(ReductionRecord {
        kind,
        unitarity_residual,
        off_block_residual: off_block,
        block_vs_sector_residual: block_vs_sector,
        tol,
        pass: off_block <= tol && block_vs_sector <= tol,
    })
}

/// Conjugates every charge, adjoint and `ℋ` by `u` and compares the result
/// with block-diagonal sector operators built directly.
pub fn verify_reduction(
    r: &Realization,
    u: &crate::BlockOperator,
    tol: f64,
) -> Result<ReductionRecord, VerifyError> {
    let sectors = (0..=r.p())
        .map(|mu| sector_operators(r, mu))
        .collect::<Result<Vec<_>, _>>()?;
    check_reduction(r, u, &sectors, tol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectorReport {
    pub mu: usize,
    pub relations: Vec<RelationRecord>,
    pub energies: Vec<Rational>,
    /// `closed_form_energy(μ, n)` equals the diagonal of `ℋ_μ` for every `n < D`.
    pub closed_form_match: bool,
    pub first_mismatch: Option<usize>,
    /// BD/OSSQM only: no energy below zero.
    pub nonnegative: Option<bool>,
    pub degeneracy: Vec<DegeneracyGroup>,
    pub verdict: BreakingVerdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub kind: VariantKind,
    pub p: usize,
    pub dim: usize,
    pub mode: Mode,
    pub tolerances: Tolerances,
    pub fock: FockReport,
    pub relations: Vec<RelationRecord>,
    /// `Q^p ≠ 0` and similar scalar checks on the block realization.
    pub checks: Vec<Check>,
    pub reduction: ReductionRecord,
    pub sectors: Vec<SectorReport>,
    pub exact: Vec<Check>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.fock.pass()
            && self.relations.iter().all(|r| r.pass)
            && self.checks.iter().all(|c| c.pass)
            && self.reduction.pass
            && self.sectors.iter().all(|s| {
                s.relations.iter().all(|r| r.pass)
                    && s.closed_form_match
                    && s.nonnegative != Some(false)
            })
            && self.exact.iter().all(|c| c.pass)
    }

    pub fn verdicts(&self) -> impl Iterator<Item = &BreakingVerdict> {
        self.sectors.iter().map(|s| &s.verdict)
    }
}

fn check_all(
    rels: &[RelationDescriptor],
    ops: &Bindings,
    tol: f64,
) -> Result<Vec<RelationRecord>, VerifyError> {
    rels.iter()
        .map(|rel| check_relation(rel, ops, tol))
        .collect()
}

fn first_failure(mut it: impl Iterator<Item = Option<String>>) -> Option<String> {
    it.find_map(|x| x)
}

/// BD coefficients obey `f_i(n)√F(n) = ε_i(n) f_1(n+i-1)√F(n+i-1)`, compared
/// as exact squares plus signs.
fn bd_coefficient_condition(r: &Realization) -> Result<Check, VerifyError> {
    let tables = r.coefficients();
    let f = r.config().structure();
    let d = r.config().dim() as i64;
    let mut failure = None;
    'outer: for (k, ti) in tables.iter().enumerate().skip(1) {
        let i = (k + 1) as i64;
        for n in 1..=d - i + 1 {
            let m = n + i - 1;
            let lhs = ti.square(n).expect("in domain") * f.value(n)?;
            let rhs = tables[0].square(m).expect("in domain") * f.value(m)?;
            if lhs != rhs {
                failure = Some(format!("i = {i}, n = {n}: {lhs} != {rhs}"));
                break 'outer;
            }
            let eps = match r.config().coefficients() {
                crate::variants::Coefficients::Bd { signs, .. } if !signs.is_empty() => {
                    signs[k - 1].eval(n)?
                }
                _ => Rational::from_integer(1.into()),
            };
            let expected = if lhs.is_zero() {
                0
            } else {
                i8::from(eps.is_positive()) * 2 - 1
            };
            let found = ti.sign(n).expect("in domain") * tables[0].sign(m).expect("in domain");
            if !lhs.is_zero() && found != expected {
                failure = Some(format!("sign mismatch at i = {i}, n = {n}"));
                break 'outer;
            }
        }
    }
    Ok(Check::exact(
        "f_i(N) sqrt F(N) = eps_i f_1(N+i-1) sqrt F(N+i-1)",
        failure,
    ))
}

/// `[ℋ, Q] = 0` entry by entry in rationals: wherever a charge has a nonzero
/// entry, the two `ℋ` diagonal values it connects agree.
fn commutation_exact(r: &Realization) -> Check {
    let h = r.h_diag();
    let d = r.config().dim();
    let f = r.fock().f_values();
    let failure = match r.kind() {
        VariantKind::Rsk | VariantKind::Bd => {
            first_failure(r.coefficients().iter().enumerate().flat_map(|(k, t)| {
                (1..d).map(move |n| {
                    let nonzero = !t.square(n as i64).expect("in domain").is_zero();
                    (nonzero && h[k + 1][n - 1] != h[k][n])
                        .then(|| format!("block ({}, {}), n = {n}", k + 2, k + 1))
                })
            }))
        }
        VariantKind::Ossqm => {
            first_failure(r.coefficients().iter().enumerate().flat_map(|(k, t)| {
                let i = k + 1;
                (i..d).map(move |n| {
                    let ladder_nonzero = (0..i).all(|j| !f[n - j].is_zero());
                    let nonzero =
                        ladder_nonzero && !t.square(n as i64).expect("in domain").is_zero();
                    (nonzero && h[0][n - i] != h[i][n]).then(|| format!("Q_{i}, n = {n}"))
                })
            }))
        }
    };
    Check::exact("[H, Q] = 0 (exact)", failure)
}

fn structure_is_clambda(f: &StructureSpec) -> bool {
    matches!(f, StructureSpec::CLambda(_))
}

/// Full check of a built variant: Fock relations, block relations, reduction,
/// sector relations, closed-form spectra and symmetry-breaking verdicts.
pub fn verify_variant(
    r: &Realization,
    tol: &Tolerances,
    mode: Mode,
) -> Result<VerificationReport, VerifyError> {
    let p = r.p();
    let kind = r.kind();
    let fock = verify_fock(r.fock(), tol, mode)?;
    let rels = variant_relations(kind, p);
    let ops = Bindings::for_realization(r)?;
    let relations = check_all(&rels, &ops, tol.relation)?;

    let mut checks = Vec::new();
    if matches!(kind, VariantKind::Rsk | VariantKind::Bd) {
        let qp = r.charges()[0].pow(p as u32).max_abs();
        checks.push(Check {
            name: format!("Q^{p} != 0"),
            value: qp,
            pass: qp > 0.0,
            note: None,
        });
    }
    if kind == VariantKind::Bd {
        checks.push(bd_coefficient_condition(r)?);
    }

    let sectors_ops = (0..=p)
        .map(|mu| sector_operators(r, mu))
        .collect::<Result<Vec<_>, _>>()?;
    let u = reduction_unitary(kind.reduction(), p, r.fock());
    let reduction = check_reduction(r, &u, &sectors_ops, tol.equality)?;

    let check_signs = kind.zero_energy_criterion() && structure_is_clambda(r.config().structure());
    let mut sectors = Vec::with_capacity(p + 1);
    for s in &sectors_ops {
        let sector_bindings = Bindings::for_sector(s, r.fock())?;
        let relations = check_all(&rels, &sector_bindings, tol.relation)?;
        let mut first_mismatch = None;
        for (n, e) in s.energies.iter().enumerate() {
            if closed_form_energy(r, s.mu, n)? != *e {
                first_mismatch = Some(n);
                break;
            }
        }
        let verdict = classify_breaking(s, tol.equality);
        if kind.zero_energy_criterion() {
            let unbroken = verdict.verdict == Verdict::Unbroken;
            checks.push(Check::exact(
                format!("sector {}: unbroken iff ground energy is zero", s.mu),
                (unbroken != verdict.ground_energy.is_zero()).then(|| {
                    format!(
                        "{} with ground energy {}",
                        verdict.verdict.name(),
                        verdict.ground_energy
                    )
                }),
            ));
        }
        sectors.push(SectorReport {
            mu: s.mu,
            relations,
            energies: s.energies.clone(),
            closed_form_match: first_mismatch.is_none(),
            first_mismatch,
            nonnegative: check_signs.then(|| s.energies.iter().all(|e| !e.is_negative())),
            degeneracy: degeneracy_table(s),
            verdict,
        });
    }

    let exact = if mode == Mode::Exact {
        alloc::vec![commutation_exact(r)]
    } else {
        Vec::new()
    };
    Ok(VerificationReport {
        kind,
        p,
        dim: r.config().dim(),
        mode,
        tolerances: *tol,
        fock,
        relations,
        checks,
        reduction,
        sectors,
        exact,
    })
}

/// Largest float deviation of `ℋ`'s diagonal from the exact values.
pub fn hamiltonian_float_deviation(r: &Realization) -> f64 {
    let mut worst = 0.0f64;
    for (k, hs) in r.h_diag().iter().enumerate() {
        let block = r.hamiltonian().block_or_zero(k, k);
        for (n, h) in hs.iter().enumerate() {
            worst = worst.max((block[(n, n)] - to_f64(h)).abs());
        }
    }
    worst
}
