use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dirac_coulomb::eigen::Target;
use dirac_coulomb::grid::Regularization;
use dirac_coulomb::hamiltonian::Sector;
use dirac_coulomb::model::{ModelProbeSpec, ModelSpec};
use dirac_coulomb::probes::hardy::HardySpec;
use dirac_coulomb::probes::hydrogenic::HydrogenicSpec;
use dirac_coulomb::probes::kappa::{KappaScanSpec, ScanOptions};
use dirac_coulomb::probes::weyl::{default_targets, WeylSpec};
use dirac_coulomb::hamiltonian::PotentialSpec;
use dirac_coulomb::runner::{
    run, threads_from_env, AssembleConfig, Command, EigConfig, EigOperator, HardyConfig, HardyWhich, RunConfig, SquareConfig,
    WeylConfig,
};
use dirac_coulomb::verify::VerifyOptions;

/// Numerics for the two-electron Dirac-Coulomb operator.
///
/// Thread count is read from DCOP_THREADS. Exit codes: 0 all checks pass,
/// 1 some check failed, 2 usage error, 3 runtime error.
#[derive(Parser, Debug)]
#[command(name = "dcop", version)]
struct Cli {
    /// Directory for the JSON report and CSV.
    #[arg(long, global = true, default_value = "dcop-out")]
    out_dir: PathBuf,
    /// Override a record tolerance, as NAME=VALUE. Repeatable.
    #[arg(long = "tolerance", global = true, value_parser = parse_override)]
    tolerances: Vec<(String, f64)>,
    /// Print only the summary line.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run every exact identity and small-grid oracle check.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        field_points: usize,
        #[arg(long, default_value_t = 50)]
        dense_vectors: usize,
        /// Negative control: replace beta by the identity.
        #[arg(long, hide = true)]
        perturb_beta: bool,
    },
    /// Build the 16x16 two-body free symbol in both basis orders.
    Assemble {
        #[arg(long, value_parser = parse_vec3)]
        xi1: [f64; 3],
        #[arg(long, value_parser = parse_vec3)]
        xi2: [f64; 3],
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long)]
        dump_symbol: Option<PathBuf>,
    },
    /// Lanczos eigenvalues of a grid operator.
    Eig(EigArgs),
    /// Weyl residual ladder for the two-body operator.
    WeylProbe {
        #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
        n: Vec<usize>,
        /// |xi|; lambda = sqrt(|xi|^2 + m^2).
        #[arg(long, default_value_t = 1.0)]
        xi: f64,
        /// |eta|; mu = sqrt(|eta|^2 + m^2).
        #[arg(long, default_value_t = 2.0)]
        eta: f64,
        /// Run the three standard targets instead of --xi/--eta.
        #[arg(long)]
        all_targets: bool,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = -0.5)]
        k: f64,
        #[arg(long, default_value_t = 1.0)]
        k0: f64,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Hardy-type inequalities on a trial family.
    Hardy {
        #[arg(long, value_enum)]
        which: Option<WhichArg>,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long = "box", default_value_t = 12.0)]
        box_len: f64,
        #[arg(long, default_value_t = 100)]
        family_size: usize,
        #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5")]
        mu_hats: Vec<f64>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Square identities of the free sector operators.
    SquareCheck {
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long = "box", default_value_t = 8.0)]
        box_len: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// One-particle Coulomb ground state against the radial oracle.
    Hydrogenic {
        #[arg(long, default_value_t = -0.5)]
        k: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long = "box", default_value_t = 20.0)]
        box_len: f64,
        #[arg(long, value_delimiter = ',', default_value = "16,24,32,48")]
        points: Vec<usize>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 11)]
        seed: u64,
    },
    /// Gap eigenvalue branches of the y-frame operator under y2 -> kappa y2.
    KappaScan {
        #[arg(long, value_parser = parse_vec3, default_value = "0,0,1")]
        y2: [f64; 3],
        #[arg(long, value_delimiter = ',', default_value = "1,1.25,1.5,1.75,2,2.25,2.5,2.75,3")]
        kappas: Vec<f64>,
        #[arg(long, default_value_t = -0.5)]
        k: f64,
        #[arg(long, default_value_t = 1.0)]
        k0: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 20)]
        grid: usize,
        #[arg(long = "box", default_value_t = 16.0)]
        box_len: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5,2")]
        lambdas: Vec<f64>,
        #[arg(long, default_value_t = 4)]
        how_many: usize,
        #[arg(long, default_value_t = 3)]
        seed: u64,
    },
    /// Probes of the model operator.
    Model {
        #[arg(long, default_value_t = -0.5)]
        k1: f64,
        #[arg(long, default_value_t = -0.3)]
        k2: f64,
        #[arg(long, default_value_t = 1.0)]
        k0: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, value_parser = parse_vec3, default_value = "0,0,1")]
        y2: [f64; 3],
        #[arg(long, default_value_t = 20)]
        grid: usize,
        #[arg(long = "box", default_value_t = 16.0)]
        box_len: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,1.25,1.5,1.75,2,2.25,2.5,2.75,3")]
        kappas: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct EigArgs {
    #[arg(long, value_enum, default_value = "hdc")]
    op: OpArg,
    #[arg(long, default_value_t = 2)]
    grid: usize,
    #[arg(long = "box", default_value_t = 4.0)]
    box_len: f64,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = -0.5)]
    k: f64,
    #[arg(long, default_value_t = 1.0)]
    k0: f64,
    /// Second centre coupling of the model operator.
    #[arg(long, default_value_t = -0.5)]
    k2: f64,
    #[arg(long, default_value = "bn:4")]
    reg: Regularization,
    #[arg(long, value_parser = parse_vec3, default_value = "0,0,1")]
    y2: [f64; 3],
    #[arg(long, value_enum, default_value = "full")]
    sector: SectorArg,
    #[arg(long, default_value_t = 10)]
    how_many: usize,
    #[arg(long, value_enum, default_value = "lowest")]
    target: TargetArg,
    /// Shift for --target nearest.
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 20_000)]
    max_matvecs: usize,
    #[arg(long)]
    no_dense: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OpArg {
    Hdc,
    YFrame,
    Model,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SectorArg {
    Full,
    PlusPlus,
    MinusMinus,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TargetArg {
    Lowest,
    Highest,
    Nearest,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WhichArg {
    Win,
    Ha,
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(parts).map_err(|p| format!("expected three comma-separated numbers, got {}", p.len()))
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.rsplit_once('=').ok_or("expected NAME=VALUE")?;
    Ok((name.to_string(), value.parse().map_err(|e| format!("{value:?}: {e}"))?))
}

fn command(cmd: Cmd) -> (Command, Option<PathBuf>) {
    let c = match cmd {
        Cmd::Verify {
            seed,
            trials,
            field_points,
            dense_vectors,
            perturb_beta,
        } => Command::Verify(VerifyOptions {
            seed,
            trials,
            field_points,
            dense_vectors,
            perturb_beta,
            ..Default::default()
        }),
        Cmd::Assemble { xi1, xi2, mass, dump_symbol } => Command::Assemble(AssembleConfig { xi1, xi2, mass, dump_symbol }),
        Cmd::Eig(a) => {
            let cfg = EigConfig {
                op: match a.op {
                    OpArg::Hdc => EigOperator::Hdc,
                    OpArg::YFrame => EigOperator::YFrame,
                    OpArg::Model => EigOperator::Model,
                },
                points: a.grid,
                box_len: a.box_len,
                mass: a.mass,
                k: a.k,
                k0: a.k0,
                regularization: a.reg,
                y2: a.y2,
                sector: match a.sector {
                    SectorArg::Full => Sector::Full,
                    SectorArg::PlusPlus => Sector::PlusPlus,
                    SectorArg::MinusMinus => Sector::MinusMinus,
                },
                k2: a.k2,
                how_many: a.how_many,
                target: match a.target {
                    TargetArg::Lowest => Target::Lowest,
                    TargetArg::Highest => Target::Highest,
                    TargetArg::Nearest => Target::Nearest(a.sigma),
                },
                tol: a.tol,
                max_matvecs: a.max_matvecs,
                seed: a.seed,
                dense_check: !a.no_dense,
            };
            return (Command::Eig(cfg), a.out);
        }
        Cmd::WeylProbe {
            n,
            xi,
            eta,
            all_targets,
            mass,
            k,
            k0,
            grid,
            seed,
        } => {
            let pot = PotentialSpec::new(k, k0);
            let base = if all_targets {
                default_targets(pot)
            } else {
                vec![WeylSpec::new(xi, eta, mass, pot)]
            };
            let targets = base
                .into_iter()
                .map(|t| WeylSpec {
                    n_values: n.clone(),
                    points: grid,
                    mass,
                    ..t
                })
                .collect();
            Command::WeylProbe(WeylConfig { targets, seed })
        }
        Cmd::Hardy {
            which,
            grid,
            box_len,
            family_size,
            mu_hats,
            seed,
        } => Command::Hardy(HardyConfig {
            spec: HardySpec {
                points: grid,
                box_len,
                family_size,
                mu_hats,
                seed,
            },
            which: match which {
                None => HardyWhich::Both,
                Some(WhichArg::Win) => HardyWhich::Win,
                Some(WhichArg::Ha) => HardyWhich::Ha,
            },
        }),
        Cmd::SquareCheck { mass, grid, box_len, seed } => Command::SquareCheck(SquareConfig {
            mass,
            points: grid,
            box_len,
            seed,
        }),
        Cmd::Hydrogenic {
            k,
            mass,
            box_len,
            points,
            tol,
            seed,
        } => Command::Hydrogenic(HydrogenicSpec {
            k,
            mass,
            box_len,
            points,
            tol,
            seed,
            ..Default::default()
        }),
        Cmd::KappaScan {
            y2,
            kappas,
            k,
            k0,
            mass,
            grid,
            box_len,
            lambdas,
            how_many,
            seed,
        } => Command::KappaScan(KappaScanSpec {
            y2,
            kappas,
            k,
            k0,
            mass,
            points: grid,
            box_len,
            lambdas,
            options: ScanOptions {
                how_many,
                ..Default::default()
            },
            seed,
            ..Default::default()
        }),
        Cmd::Model {
            k1,
            k2,
            k0,
            mass,
            y2,
            grid,
            box_len,
            kappas,
            seed,
        } => Command::Model(ModelProbeSpec {
            model: ModelSpec { k1, k2, k0, m: mass, y2 },
            points: grid,
            box_len,
            kappas,
            seed,
            ..Default::default()
        }),
    };
    (c, None)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match threads_from_env() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let (cmd, copy_to) = command(cli.command);
    let config = RunConfig {
        command: cmd,
        out_dir: cli.out_dir,
        threads,
        tolerances: cli.tolerances.into_iter().collect(),
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    if let Some(path) = copy_to {
        if let Err(e) = report.write_json(&path) {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    if !cli.quiet {
        print!("{}", report.summary());
    }
    let failed = report.failures().count();
    println!(
        "{}: {} checks, {} failed, {:.2} s, report in {}",
        report.command,
        report.records.len(),
        failed,
        report.elapsed_seconds,
        config.out_dir.display()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
