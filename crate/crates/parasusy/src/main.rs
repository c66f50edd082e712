//! `parasusy`: build a variant from a config file, verify it, and write
//! spectrum, classification and operator artifacts.
//!
//! Exit status: 0 when every requested check passes, 1 when a check fails,
//! 2 for configuration or I/O errors.

mod config;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_traits::Zero;
use parasusy_core::variants::{BranchIndex, Verdict};
use parasusy_core::{
    build, classify_breaking, closed_form_energy, degeneracy_table, reduction_unitary,
    sector_operators, verify_variant, CMatrix, Matrix, Realization, VariantKind, VerifyError,
};

use config::{ConfigError, RunConfig};
use report::{float, rational, CheckJson, ClassifyJson, ConfigJson, VerdictJson, VerifyJson};

#[derive(Parser)]
#[command(
    name = "parasusy",
    version,
    about = "Verify parasupersymmetric and orthosupersymmetric realizations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check parameters only and build the operators.
    Validate(Common),
    /// Run every relation, reduction and spectrum check; write report.json.
    Verify(Common),
    /// Write the exact sector spectra (spectrum.csv, degeneracy.csv).
    Spectrum(Common),
    /// Classify each sector as broken or unbroken (classification.json).
    Classify(Common),
    /// Write every operator matrix entry by entry (ops.csv).
    DumpOps(Common),
}

#[derive(clap::Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Relation tolerance; overrides `tolerance.relation` in the config.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Output directory; without it (and without `out` in the config) artifacts go to stdout.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl Failure {
    fn output(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
        move |source| Failure::Output {
            path: path.into(),
            source,
        }
    }
}

enum Status {
    Pass,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Status, Failure> {
    let (common, which) = match command {
        Command::Validate(c) => (c, validate as Handler),
        Command::Verify(c) => (c, verify as Handler),
        Command::Spectrum(c) => (c, spectrum as Handler),
        Command::Classify(c) => (c, classify as Handler),
        Command::DumpOps(c) => (c, dump_ops as Handler),
    };
    let mut cfg = config::load(&common.config)?;
    if let Some(tol) = common.tol {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Failure::Invalid(format!(
                "--tol {tol} is not a nonnegative number"
            )));
        }
        cfg.tolerances.relation = tol;
    }
    let out = common.out.or_else(|| cfg.out.clone());
    let r = build(&cfg.variant).map_err(|e| Failure::Invalid(e.to_string()))?;
    which(&cfg, &r, &Sink { dir: out })
}

type Handler = fn(&RunConfig, &Realization, &Sink) -> Result<Status, Failure>;

/// Where artifacts go: files under a directory, or stdout.
struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    fn write(&self, file: &str, bytes: &[u8]) -> Result<(), Failure> {
        match &self.dir {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(Failure::output(dir))?;
                let path = dir.join(file);
                std::fs::write(&path, bytes).map_err(Failure::output(&path))
            }
            None => std::io::stdout()
                .write_all(bytes)
                .map_err(Failure::output(Path::new("<stdout>"))),
        }
    }

    fn json<T: serde::Serialize>(&self, file: &str, value: &T) -> Result<(), Failure> {
        let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
        bytes.push(b'\n');
        self.write(file, &bytes)
    }
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn status(pass: bool) -> Status {
    if pass {
        Status::Pass
    } else {
        Status::CheckFailed
    }
}

fn validate(cfg: &RunConfig, _: &Realization, _: &Sink) -> Result<Status, Failure> {
    println!(
        "valid: {} p={} lambda={} D={}",
        cfg.kind, cfg.p, cfg.lambda, cfg.dim
    );
    Ok(Status::Pass)
}

fn verify(cfg: &RunConfig, r: &Realization, sink: &Sink) -> Result<Status, Failure> {
    let report = match verify_variant(r, &cfg.tolerances, cfg.mode) {
        Ok(report) => report,
        Err(e @ VerifyError::NotUnitary { .. }) => {
            eprintln!("verify: FAIL: {e}");
            return Ok(Status::CheckFailed);
        }
        Err(e) => return Err(Failure::Invalid(e.to_string())),
    };
    sink.json("report.json", &VerifyJson::new(cfg, &report))?;
    let pass = report.pass();
    eprintln!("verify: {}", if pass { "PASS" } else { "FAIL" });
    Ok(status(pass))
}

fn spectrum(cfg: &RunConfig, r: &Realization, sink: &Sink) -> Result<Status, Failure> {
    let p = cfg.p;
    let variant = cfg.kind.name().to_string();
    let mut rows = Vec::new();
    let mut groups = Vec::new();
    let mut mismatch = None;
    for mu in 0..=p {
        let s = sector_operators(r, mu).map_err(|e| Failure::Invalid(e.to_string()))?;
        let table = degeneracy_table(&s);
        let mut group_of = vec![0; s.energies.len()];
        for (id, g) in table.iter().enumerate() {
            for &n in &g.levels {
                group_of[n] = id;
            }
            groups.push(vec![
                variant.clone(),
                mu.to_string(),
                id.to_string(),
                g.energy.numer().to_string(),
                g.energy.denom().to_string(),
                g.multiplicity.to_string(),
                g.levels
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" "),
                g.possibly_incomplete.to_string(),
            ]);
        }
        for (n, e) in s.energies.iter().enumerate() {
            let closed =
                closed_form_energy(r, mu, n).map_err(|e| Failure::Invalid(e.to_string()))?;
            if closed != *e && mismatch.is_none() {
                mismatch = Some((mu, n, closed));
            }
            let BranchIndex { k, nu } = BranchIndex::of(n, p);
            rows.push(vec![
                variant.clone(),
                mu.to_string(),
                n.to_string(),
                k.to_string(),
                nu.to_string(),
                r.fock().grade(n).to_string(),
                e.numer().to_string(),
                e.denom().to_string(),
                group_of[n].to_string(),
            ]);
        }
    }
    let header = [
        "variant",
        "mu",
        "n",
        "k",
        "nu",
        "grade",
        "energy_num",
        "energy_den",
        "group_id",
    ];
    sink.write("spectrum.csv", &csv_bytes(&header, rows))?;
    if sink.dir.is_some() {
        let header = [
            "variant",
            "mu",
            "group_id",
            "energy_num",
            "energy_den",
            "multiplicity",
            "levels",
            "possibly_incomplete",
        ];
        sink.write("degeneracy.csv", &csv_bytes(&header, groups))?;
    }
    if let Some((mu, n, closed)) = mismatch {
        eprintln!(
            "spectrum: FAIL: sector {mu} level {n} differs from closed form {}",
            rational(&closed)
        );
        return Ok(Status::CheckFailed);
    }
    Ok(Status::Pass)
}

fn classify(cfg: &RunConfig, r: &Realization, sink: &Sink) -> Result<Status, Failure> {
    let mut classification = Vec::new();
    let mut checks = Vec::new();
    let mut pass = true;
    for mu in 0..=cfg.p {
        let s = sector_operators(r, mu).map_err(|e| Failure::Invalid(e.to_string()))?;
        let v = classify_breaking(&s, cfg.tolerances.equality);
        // BD and OSSQM: unbroken exactly when the ground energy vanishes.
        if cfg.kind != VariantKind::Rsk {
            let consistent = (v.verdict == Verdict::Unbroken) == v.ground_energy.is_zero();
            pass &= consistent;
            checks.push(CheckJson::new(
                "sector",
                &parasusy_core::verifier::Check {
                    name: format!("sector {mu}: unbroken iff ground energy is zero"),
                    value: 0.0,
                    pass: consistent,
                    note: None,
                },
            ));
        }
        eprintln!(
            "sector {mu}: {} (ground energy {})",
            v.verdict.name(),
            rational(&v.ground_energy)
        );
        classification.push(VerdictJson::new(&v));
    }
    sink.json(
        "classification.json",
        &ClassifyJson {
            config: ConfigJson::new(cfg),
            pass,
            classification,
            checks,
        },
    )?;
    Ok(status(pass))
}

fn dump_ops(cfg: &RunConfig, r: &Realization, sink: &Sink) -> Result<Status, Failure> {
    let fock = r.fock();
    let mut rows = Vec::new();
    let mut real = |name: &str, m: &Matrix| {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                rows.push(vec![
                    name.to_string(),
                    i.to_string(),
                    j.to_string(),
                    float(m[(i, j)]),
                    float(0.0),
                ]);
            }
        }
    };
    real("N", fock.number());
    real("a", fock.lower());
    real("a_dag", fock.raise());
    for mu in 0..cfg.lambda {
        real(&format!("P_{mu}"), fock.projector(mu as i64));
    }
    let charges = r.charges();
    for (k, (q, qd)) in charges.iter().zip(r.charges_adj()).enumerate() {
        let suffix = if charges.len() == 1 {
            String::new()
        } else {
            format!("_{}", k + 1)
        };
        real(&format!("Q{suffix}"), &q.to_dense());
        real(&format!("Q_dag{suffix}"), &qd.to_dense());
    }
    real("H", &r.hamiltonian().to_dense());
    real(
        "U",
        &reduction_unitary(cfg.kind.reduction(), cfg.p, fock).to_dense(),
    );
    let t: &CMatrix = fock.grading();
    for i in 0..t.nrows() {
        for j in 0..t.ncols() {
            let z = t[(i, j)];
            rows.push(vec![
                "T".into(),
                i.to_string(),
                j.to_string(),
                float(z.re),
                float(z.im),
            ]);
        }
    }
    sink.write(
        "ops.csv",
        &csv_bytes(&["op", "row", "col", "re", "im"], rows),
    )?;
    Ok(Status::Pass)
}
