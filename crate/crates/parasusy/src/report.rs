//! Serialized forms of reports. Field names are stable; rationals are
//! `"num/den"` strings and floats use the shortest round-trip decimal.

use std::collections::BTreeMap;

use parasusy_core::variants::{BreakingVerdict, DegeneracyGroup};
use parasusy_core::verifier::{Check, RelationRecord, SectorReport};
use parasusy_core::{Rational, VerificationReport};
use serde::Serialize;

use crate::config::{RunConfig, StructureSource};

pub fn rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Serialize)]
pub struct ToleranceJson {
    relation: f64,
    equality: f64,
}

#[derive(Serialize)]
pub struct ConfigJson {
    variant: &'static str,
    p: usize,
    lambda: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<Vec<String>>,
    #[serde(rename = "F_expr", skip_serializing_if = "Option::is_none")]
    f_expr: Option<String>,
    coefficients: BTreeMap<String, String>,
    #[serde(rename = "D")]
    dim: usize,
    mode: &'static str,
    tolerance: ToleranceJson,
}

impl ConfigJson {
    pub fn new(cfg: &RunConfig) -> Self {
        let (alpha, f_expr) = match &cfg.structure_source {
            StructureSource::Alpha(a) => (Some(a.iter().map(rational).collect()), None),
            StructureSource::Expr(e) => (None, Some(e.clone())),
        };
        ConfigJson {
            variant: cfg.kind.name(),
            p: cfg.p,
            lambda: cfg.lambda,
            alpha,
            f_expr,
            coefficients: cfg.coefficient_sources.iter().cloned().collect(),
            dim: cfg.dim,
            mode: match cfg.mode {
                parasusy_core::Mode::Float => "float",
                parasusy_core::Mode::Exact => "exact",
            },
            tolerance: ToleranceJson {
                relation: cfg.tolerances.relation,
                equality: cfg.tolerances.equality,
            },
        }
    }
}

#[derive(Serialize)]
pub struct RelationJson {
    scope: String,
    name: String,
    w: usize,
    window: [usize; 2],
    residual: f64,
    scale: f64,
    tol: f64,
    exact: bool,
    pass: bool,
}

impl RelationJson {
    fn new(scope: &str, r: &RelationRecord) -> Self {
        RelationJson {
            scope: scope.into(),
            name: r.name.clone(),
            w: r.weight,
            window: [r.window.start, r.window.end],
            residual: r.residual,
            scale: r.scale,
            tol: r.tol,
            exact: r.exact,
            pass: r.pass,
        }
    }
}

#[derive(Serialize)]
pub struct CheckJson {
    scope: String,
    name: String,
    value: f64,
    pass: bool,
    note: Option<String>,
}

impl CheckJson {
    pub fn new(scope: &str, c: &Check) -> Self {
        CheckJson {
            scope: scope.into(),
            name: c.name.clone(),
            value: c.value,
            pass: c.pass,
            note: c.note.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct ReductionJson {
    kind: String,
    unitarity_residual: f64,
    off_block_residual: f64,
    block_vs_sector_residual: f64,
    tol: f64,
    pass: bool,
}

#[derive(Serialize)]
pub struct GroupJson {
    energy: String,
    multiplicity: usize,
    levels: Vec<usize>,
    possibly_incomplete: bool,
}

impl GroupJson {
    fn new(g: &DegeneracyGroup) -> Self {
        GroupJson {
            energy: rational(&g.energy),
            multiplicity: g.multiplicity,
            levels: g.levels.clone(),
            possibly_incomplete: g.possibly_incomplete,
        }
    }
}

#[derive(Serialize)]
pub struct SpectrumJson {
    mu: usize,
    closed_form_match: bool,
    first_mismatch: Option<usize>,
    nonnegative: Option<bool>,
    energies: Vec<String>,
    degeneracy: Vec<GroupJson>,
}

impl SpectrumJson {
    fn new(s: &SectorReport) -> Self {
        SpectrumJson {
            mu: s.mu,
            closed_form_match: s.closed_form_match,
            first_mismatch: s.first_mismatch,
            nonnegative: s.nonnegative,
            energies: s.energies.iter().map(rational).collect(),
            degeneracy: s.degeneracy.iter().map(GroupJson::new).collect(),
        }
    }
}

#[derive(Serialize)]
pub struct VerdictJson {
    mu: usize,
    verdict: &'static str,
    ground_energy: String,
    ground_degeneracy: usize,
    ground_levels: Vec<usize>,
    charge_residuals: Vec<f64>,
}

impl VerdictJson {
    pub fn new(v: &BreakingVerdict) -> Self {
        VerdictJson {
            mu: v.mu,
            verdict: v.verdict.name(),
            ground_energy: rational(&v.ground_energy),
            ground_degeneracy: v.ground_degeneracy,
            ground_levels: v.ground_levels.clone(),
            charge_residuals: v.charge_residuals.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct VerifyJson {
    config: ConfigJson,
    pass: bool,
    relations: Vec<RelationJson>,
    checks: Vec<CheckJson>,
    reduction: ReductionJson,
    spectra: Vec<SpectrumJson>,
    classification: Vec<VerdictJson>,
}

impl VerifyJson {
    pub fn new(cfg: &RunConfig, r: &VerificationReport) -> Self {
        let mut relations: Vec<RelationJson> = Vec::new();
        relations.extend(
            r.fock
                .relations
                .iter()
                .map(|x| RelationJson::new("fock", x)),
        );
        relations.extend(
            r.fock
                .grading
                .iter()
                .map(|x| RelationJson::new("grading", x)),
        );
        relations.extend(r.relations.iter().map(|x| RelationJson::new("block", x)));
        for s in &r.sectors {
            let scope = format!("sector {}", s.mu);
            relations.extend(s.relations.iter().map(|x| RelationJson::new(&scope, x)));
        }
        let mut checks = vec![CheckJson::new("fock", &r.fock.projector_cross_check)];
        checks.extend(r.fock.exact.iter().map(|c| CheckJson::new("fock", c)));
        checks.extend(r.checks.iter().map(|c| CheckJson::new("block", c)));
        checks.extend(r.exact.iter().map(|c| CheckJson::new("exact", c)));
        let red = &r.reduction;
        VerifyJson {
            config: ConfigJson::new(cfg),
            pass: r.pass(),
            relations,
            checks,
            reduction: ReductionJson {
                kind: format!("{:?}", red.kind).to_lowercase(),
                unitarity_residual: red.unitarity_residual,
                off_block_residual: red.off_block_residual,
                block_vs_sector_residual: red.block_vs_sector_residual,
                tol: red.tol,
                pass: red.pass,
            },
            spectra: r.sectors.iter().map(SpectrumJson::new).collect(),
            classification: r.verdicts().map(VerdictJson::new).collect(),
        }
    }
}

#[derive(Serialize)]
pub struct ClassifyJson {
    pub config: ConfigJson,
    pub pass: bool,
    pub classification: Vec<VerdictJson>,
    pub checks: Vec<CheckJson>,
}

/// Floats in CSV cells use the same formatting as the JSON reports.
pub fn float(x: f64) -> String {
    serde_json::to_string(&x).expect("f64 serializes")
}
