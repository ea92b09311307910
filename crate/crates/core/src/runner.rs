//! Run configurations, dispatch and artifact persistence.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::eigen::{dense_eig, lanczos, LanczosOptions, Target};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, Regularization};
use crate::hamiltonian::{build_y_operator, hdc_operator, PotentialSpec, Sector};
use crate::kron::two_body_free_symbol;
use crate::model::{build_model_y, model_spectrum_probe, ModelProbeSpec, ModelReport, ModelSpec};
use crate::operator::{build_dense, StructuredOperator, DENSE_LIMIT};
use crate::probes::hardy::{hardy_probe, HardySpec};
use crate::probes::hydrogenic::{hydrogenic_validation, HydrogenicReport, HydrogenicSpec};
use crate::probes::kappa::{kappa_scan, KappaReport, KappaScanSpec};
use crate::probes::square::square_identity_check;
use crate::probes::weyl::{weyl_probe, WeylLadder, WeylSpec};
use crate::report::{write_csv, CheckRecord, ProbeReport, Status};
use crate::verify::{verify_all, VerifyOptions};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "DCOP_THREADS";

pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got {s:?}"))),
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigOperator {
    /// The two-body operator on the 6D grid.
    Hdc,
    /// The relative-coordinate operator at fixed `y₂`.
    YFrame,
    /// A fibre of the model operator.
    Model,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigConfig {
    pub op: EigOperator,
    pub points: usize,
    pub box_len: f64,
    pub mass: f64,
    pub k: f64,
    pub k0: f64,
    pub regularization: Regularization,
    pub y2: [f64; 3],
    pub sector: Sector,
    /// Second centre coupling of the model; the first is `k`.
    pub k2: f64,
    pub how_many: usize,
    pub target: Target,
    pub tol: f64,
    pub max_matvecs: usize,
    pub seed: u64,
    /// Compare against a dense diagonalization when the dimension allows.
    pub dense_check: bool,
}

impl Default for EigConfig {
    fn default() -> Self {
        EigConfig {
            op: EigOperator::Hdc,
            points: 2,
            box_len: 4.0,
            mass: 1.0,
            k: -0.5,
            k0: 1.0,
            regularization: Regularization::default(),
            y2: [0.0, 0.0, 1.0],
            sector: Sector::Full,
            k2: -0.5,
            how_many: 10,
            target: Target::Lowest,
            tol: 1e-8,
            max_matvecs: 20_000,
            seed: 1,
            dense_check: true,
        }
    }
}

impl EigConfig {
    pub fn operator(&self) -> Result<StructuredOperator> {
        let grid = GridSpec::new(self.points, self.box_len)?.with_regularization(self.regularization);
        let pot = PotentialSpec::new(self.k, self.k0);
        match self.op {
            EigOperator::Hdc => hdc_operator(grid, &pot, self.mass),
            EigOperator::YFrame => build_y_operator(grid, &pot, self.mass, self.y2, self.sector),
            EigOperator::Model => build_model_y(
                grid,
                &ModelSpec {
                    k1: self.k,
                    k2: self.k2,
                    k0: self.k0,
                    m: self.mass,
                    y2: self.y2,
                },
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HardyWhich {
    Win,
    Ha,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyConfig {
    pub spec: HardySpec,
    pub which: HardyWhich,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssembleConfig {
    pub xi1: [f64; 3],
    pub xi2: [f64; 3],
    pub mass: f64,
    /// Also write the symbol to this file.
    pub dump_symbol: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareConfig {
    pub mass: f64,
    pub points: usize,
    pub box_len: f64,
    pub seed: u64,
}

impl Default for SquareConfig {
    fn default() -> Self {
        SquareConfig {
            mass: 1.0,
            points: 16,
            box_len: 8.0,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylConfig {
    pub targets: Vec<WeylSpec>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Verify(VerifyOptions),
    Assemble(AssembleConfig),
    Eig(EigConfig),
    WeylProbe(WeylConfig),
    Hardy(HardyConfig),
    SquareCheck(SquareConfig),
    Hydrogenic(HydrogenicSpec),
    KappaScan(KappaScanSpec),
    Model(ModelProbeSpec),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Verify(_) => "verify",
            Command::Assemble(_) => "assemble",
            Command::Eig(_) => "eig",
            Command::WeylProbe(_) => "weyl-probe",
            Command::Hardy(_) => "hardy",
            Command::SquareCheck(_) => "square-check",
            Command::Hydrogenic(_) => "hydrogenic",
            Command::KappaScan(_) => "kappa-scan",
            Command::Model(_) => "model",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub out_dir: PathBuf,
    pub threads: Option<usize>,
    /// Replaces the tolerance of records with these names.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn new(command: Command, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            out_dir: out_dir.into(),
            threads: None,
            tolerances: BTreeMap::new(),
        }
    }
}

/// What a command produced before persistence.
struct Outcome {
    records: Vec<CheckRecord>,
    data: serde_json::Value,
    csv: Option<(Vec<String>, Vec<Vec<f64>>)>,
    extra: Vec<PathBuf>,
}

fn header(h: &[&str]) -> Vec<String> {
    h.iter().map(|s| s.to_string()).collect()
}

fn run_assemble(cfg: &AssembleConfig) -> Result<Outcome> {
    let sym = two_body_free_symbol(cfg.xi1, cfg.xi2, cfg.mass)?;
    let pack = |m: &nalgebra::DMatrix<num_complex::Complex64>| -> Vec<Vec<[f64; 2]>> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
    };
    let data = serde_json::json!({
        "xi1": cfg.xi1,
        "xi2": cfg.xi2,
        "mass": cfg.mass,
        "plain_kron": pack(&sym.plain),
        "block_order": pack(&sym.blocks),
        "consistency": sym.consistency,
    });
    let mut extra = Vec::new();
    if let Some(path) = &cfg.dump_symbol {
        std::fs::write(path, serde_json::to_string_pretty(&data)?)?;
        extra.push(path.clone());
    }
    let mut rows = Vec::new();
    for i in 0..16 {
        for j in 0..16 {
            let (p, b) = (sym.plain[(i, j)], sym.blocks[(i, j)]);
            rows.push(vec![i as f64, j as f64, p.re, p.im, b.re, b.im]);
        }
    }
    Ok(Outcome {
        records: vec![CheckRecord::compare(
            "block form equals reordered Kronecker sum",
            crate::verify::ANCHOR_VEC,
            sym.consistency,
            crate::verify::VEC_TOL,
        )],
        data,
        csv: Some((header(&["row", "col", "plain_re", "plain_im", "block_re", "block_im"]), rows)),
        extra,
    })
}

fn run_eig(cfg: &EigConfig) -> Result<Outcome> {
    let op = cfg.operator()?;
    let dim = op.dim();
    let opts = LanczosOptions {
        how_many: cfg.how_many,
        target: cfg.target,
        tol: cfg.tol,
        max_matvecs: cfg.max_matvecs,
        seed: cfg.seed,
        ..Default::default()
    };
    let res = lanczos(|x: &[num_complex::Complex64]| op.apply_slice(x), dim, &opts)?;
    let worst = res.residual_norms.iter().cloned().fold(0.0, f64::max);
    let mut records = vec![CheckRecord::compare("Ritz residuals", "||O v - theta v|| <= tol", worst, cfg.tol)];
    let mut dense_values = None;
    if cfg.dense_check && dim <= DENSE_LIMIT {
        let dense = dense_eig(&build_dense(&op)?)?;
        // A single Krylov sequence sees one copy of each degenerate level, so
        // each Ritz value is matched to its nearest dense eigenvalue.
        let nearest = res
            .ritz_values
            .iter()
            .map(|t| dense.values.iter().map(|d| (d - t).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        records.push(CheckRecord::compare("Ritz values are dense eigenvalues", "dense oracle", nearest, 1e-8));
        let extremal = match cfg.target {
            Target::Lowest => Some((res.ritz_values[0], dense.values[0])),
            Target::Highest => Some((*res.ritz_values.last().unwrap(), *dense.values.last().unwrap())),
            _ => None,
        };
        if let Some((a, b)) = extremal {
            records.push(CheckRecord::compare("extremal eigenvalue matches dense", "dense oracle", (a - b).abs(), 1e-8));
        }
        dense_values = Some(dense.values);
    }
    let rows = res
        .ritz_values
        .iter()
        .zip(&res.residual_norms)
        .zip(&res.converged)
        .enumerate()
        .map(|(i, ((v, r), c))| vec![i as f64, *v, *r, if *c { 1.0 } else { 0.0 }])
        .collect();
    Ok(Outcome {
        records,
        data: serde_json::json!({ "dim": dim, "result": res, "dense_values": dense_values }),
        csv: Some((header(&["index", "ritz_value", "residual", "converged"]), rows)),
        extra: Vec::new(),
    })
}

fn run_weyl(cfg: &WeylConfig) -> Result<Outcome> {
    let ladders = cfg.targets.iter().map(|t| weyl_probe(t, cfg.seed)).collect::<Result<Vec<WeylLadder>>>()?;
    let mut rows = Vec::new();
    for (i, l) in ladders.iter().enumerate() {
        for r in l.csv_rows() {
            let mut row = vec![i as f64, l.target];
            row.extend(r);
            rows.push(row);
        }
    }
    let mut h = header(&["target", "lambda_minus_mu"]);
    h.extend(header(&WeylLadder::CSV_HEADER));
    Ok(Outcome {
        records: ladders.iter().flat_map(|l| l.records()).collect(),
        data: serde_json::to_value(&ladders)?,
        csv: Some((h, rows)),
        extra: Vec::new(),
    })
}

fn run_hardy(cfg: &HardyConfig) -> Result<Outcome> {
    let (win, ha) = match cfg.which {
        HardyWhich::Win => (true, false),
        HardyWhich::Ha => (false, true),
        HardyWhich::Both => (true, true),
    };
    let rep = hardy_probe(&cfg.spec, win, ha)?;
    // kind 0: WIN ratio per trial function; kind 1: worst HA ratio per (μ̂, Q).
    let mut rows: Vec<Vec<f64>> = rep.win_ratios.iter().enumerate().map(|(i, r)| vec![0.0, i as f64, 0.0, *r]).collect();
    for (i, s) in rep.ha.iter().enumerate() {
        rows.push(vec![1.0, i as f64, s.mu_hat, s.worst_ratio.unwrap_or(f64::NAN)]);
    }
    Ok(Outcome {
        records: rep.records(),
        data: serde_json::to_value(&rep)?,
        csv: Some((header(&["kind", "index", "mu_hat", "ratio"]), rows)),
        extra: Vec::new(),
    })
}

fn run_square(cfg: &SquareConfig) -> Result<Outcome> {
    let rep = square_identity_check(cfg.mass, GridSpec::new(cfg.points, cfg.box_len)?, cfg.seed)?;
    let rows = vec![vec![0.0, rep.plus_plus], vec![1.0, rep.minus_minus], vec![2.0, rep.h00]];
    Ok(Outcome {
        records: rep.records(),
        data: serde_json::to_value(&rep)?,
        csv: Some((header(&["identity", "relative_deviation"]), rows)),
        extra: Vec::new(),
    })
}

fn run_hydrogenic(spec: &HydrogenicSpec) -> Result<Outcome> {
    let rep = hydrogenic_validation(spec)?;
    Ok(Outcome {
        records: rep.records(),
        data: serde_json::to_value(&rep)?,
        csv: Some((header(&HydrogenicReport::CSV_HEADER), rep.csv_rows())),
        extra: Vec::new(),
    })
}

fn run_kappa(spec: &KappaScanSpec) -> Result<Outcome> {
    let rep = kappa_scan(spec)?;
    Ok(Outcome {
        records: rep.records(),
        data: serde_json::to_value(&rep)?,
        csv: Some((header(&KappaReport::CSV_HEADER), rep.csv_rows())),
        extra: Vec::new(),
    })
}

fn run_model(spec: &ModelProbeSpec) -> Result<Outcome> {
    let rep = model_spectrum_probe(spec)?;
    Ok(Outcome {
        records: rep.records(),
        data: serde_json::to_value(&rep)?,
        csv: Some((header(&ModelReport::CSV_HEADER), rep.csv_rows())),
        extra: Vec::new(),
    })
}

fn run_verify(opts: &VerifyOptions) -> Result<Outcome> {
    let rep = verify_all(opts)?;
    let rows = rep.records.iter().enumerate().map(|(i, r)| vec![i as f64, r.deviation, r.tolerance]).collect();
    Ok(Outcome {
        records: rep.records,
        data: rep.data,
        csv: Some((header(&["record", "deviation", "tolerance"]), rows)),
        extra: Vec::new(),
    })
}

fn dispatch(command: &Command) -> Result<Outcome> {
    match command {
        Command::Verify(o) => run_verify(o),
        Command::Assemble(c) => run_assemble(c),
        Command::Eig(c) => run_eig(c),
        Command::WeylProbe(c) => run_weyl(c),
        Command::Hardy(c) => run_hardy(c),
        Command::SquareCheck(c) => run_square(c),
        Command::Hydrogenic(s) => run_hydrogenic(s),
        Command::KappaScan(s) => run_kappa(s),
        Command::Model(s) => run_model(s),
    }
}

fn apply_overrides(records: &mut [CheckRecord], tolerances: &BTreeMap<String, f64>) {
    for r in records.iter_mut() {
        if let Some(&tol) = tolerances.get(&r.name) {
            if r.status != Status::Vacuous {
                *r = CheckRecord::compare(r.name.clone(), r.anchor.clone(), r.deviation, tol);
            }
        }
    }
}

/// Runs one command and writes `<command>.json` and `<command>.csv` under
/// the output directory.
pub fn run(config: &RunConfig) -> Result<ProbeReport> {
    let start = Instant::now();
    let outcome = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(|| dispatch(&config.command))?,
        None => dispatch(&config.command)?,
    };
    std::fs::create_dir_all(&config.out_dir)?;
    let name = config.command.name();
    let mut report = ProbeReport::new(name, serde_json::to_value(config)?);
    report.records = outcome.records;
    apply_overrides(&mut report.records, &config.tolerances);
    report.data = outcome.data;
    report.artifacts = outcome.extra;
    if let Some((h, rows)) = &outcome.csv {
        let path = config.out_dir.join(format!("{name}.csv"));
        let h: Vec<&str> = h.iter().map(String::as_str).collect();
        write_csv(&path, &h, rows)?;
        report.artifacts.push(path);
    }
    let json = config.out_dir.join(format!("{name}.json"));
    report.artifacts.push(json.clone());
    report.elapsed_seconds = start.elapsed().as_secs_f64();
    report.write_json(&json)?;
    Ok(report)
}

/// Re-runs the configuration embedded in a report, writing into `out_dir`.
pub fn rerun(report: &ProbeReport, out_dir: &Path) -> Result<ProbeReport> {
    let mut config: RunConfig = serde_json::from_value(report.config.clone())?;
    config.out_dir = out_dir.to_path_buf();
    run(&config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn config_round_trips() {
        let cfg = RunConfig::new(Command::Eig(EigConfig::default()), "out");
        let v = serde_json::to_value(&cfg).unwrap();
        assert_eq!(v["command"], "eig");
        let back: RunConfig = serde_json::from_value(v).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn eig_hdc_at_n2_matches_dense() {
        let dir = tmp();
        let rep = run(&RunConfig::new(Command::Eig(EigConfig::default()), dir.path())).unwrap();
        assert!(rep.all_passed(), "{}", rep.summary());
        assert!(rep.records.iter().any(|r| r.name == "extremal eigenvalue matches dense"));
        assert!(dir.path().join("eig.json").exists() && dir.path().join("eig.csv").exists());
    }

    #[test]
    fn assemble_writes_both_orders() {
        let dir = tmp();
        let dump = dir.path().join("sym.json");
        let cfg = RunConfig::new(
            Command::Assemble(AssembleConfig {
                xi1: [0.1, 0.2, 0.3],
                xi2: [-1.0, 0.5, 2.0],
                mass: 1.0,
                dump_symbol: Some(dump.clone()),
            }),
            dir.path(),
        );
        let rep = run(&cfg).unwrap();
        assert!(rep.all_passed());
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dump).unwrap()).unwrap();
        assert_eq!(v["plain_kron"].as_array().unwrap().len(), 16);
        assert_eq!(v["block_order"][0].as_array().unwrap().len(), 16);
    }

    #[test]
    fn reports_reproduce_from_their_embedded_config() {
        let dir = tmp();
        let cfg = RunConfig {
            threads: Some(1),
            ..RunConfig::new(
                Command::SquareCheck(SquareConfig {
                    points: 8,
                    ..Default::default()
                }),
                dir.path().join("a"),
            )
        };
        let first = run(&cfg).unwrap();
        let again = rerun(&ProbeReport::read_json(&dir.path().join("a/square-check.json")).unwrap(), &dir.path().join("b")).unwrap();
        let devs = |r: &ProbeReport| r.records.iter().map(|x| x.deviation.to_bits()).collect::<Vec<_>>();
        assert_eq!(devs(&first), devs(&again));
    }

    #[test]
    fn tolerance_overrides_reclassify_records() {
        let dir = tmp();
        let mut cfg = RunConfig::new(
            Command::SquareCheck(SquareConfig {
                points: 8,
                ..Default::default()
            }),
            dir.path(),
        );
        cfg.tolerances.insert("H00^2 = 2|p|^2".into(), -1.0);
        let rep = run(&cfg).unwrap();
        assert_eq!(rep.failures().count(), 1);
    }

    #[test]
    fn invalid_grids_are_named() {
        let cfg = EigConfig {
            points: 0,
            ..Default::default()
        };
        let err = run(&RunConfig::new(Command::Eig(cfg), tmp().path())).unwrap_err();
        assert!(matches!(err, Error::InvalidGrid(_)), "{err}");
    }
}
