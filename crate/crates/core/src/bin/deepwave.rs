use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use deepwave::envelope::{CarrierParams, EnvelopeState, Variant};
use deepwave::harness::{self, ModelKind, RunConfig};
use deepwave::normalform::{verify_homogenized_limit, verify_t1_expansion, SlopeReport};
use deepwave::reconstruct::{reconstruct_classical, reconstruct_hamiltonian};
use deepwave::spectral::io::{fmt17, load, save_real, write_cross_section_csv, Snapshot};
use deepwave::stability::{write_band_edges_csv, StabilityMap, StabilityQuery};
use deepwave::{Error, Result};

#[derive(Parser)]
#[command(name = "deepwave", version, about = "Deep-water gravity wave solvers")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Named configuration: paper-small, paper-small-0035, paper.
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,
    /// Random seed for coefficient sampling.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnvelopeKind {
    HamiltonianDysthe,
    ClassicalDysthe,
    Nls,
    ExactDispersion,
}

impl EnvelopeKind {
    fn model(self) -> ModelKind {
        match self {
            EnvelopeKind::HamiltonianDysthe => ModelKind::HamiltonianDysthe,
            EnvelopeKind::ClassicalDysthe => ModelKind::ClassicalDysthe,
            EnvelopeKind::Nls => ModelKind::Nls,
            EnvelopeKind::ExactDispersion => ModelKind::ExactDispersion,
        }
    }

    fn variant(self) -> Variant {
        self.model().envelope_variant().expect("envelope model")
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the full water-wave equations.
    SimulateFull {
        /// Continue the run stored in the output directory.
        #[arg(long)]
        resume: bool,
    },
    /// Integrate an envelope model and reconstruct surfaces at snapshots.
    SimulateEnvelope {
        #[arg(long, value_enum)]
        model: Option<EnvelopeKind>,
        #[arg(long)]
        resume: bool,
    },
    /// Reconstruct the surface of an envelope snapshot.
    Reconstruct {
        /// Complex envelope snapshot.
        #[arg(long)]
        input: PathBuf,
        /// Time of the snapshot.
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        /// Treat the input as a classical-Dysthe amplitude.
        #[arg(long)]
        classical: bool,
        /// Row of the cross-section CSV.
        #[arg(long, default_value_t = 0)]
        iy: usize,
    },
    /// Rasterize the modulational instability region.
    StabilityMap {
        #[arg(long, default_value_t = 0.003)]
        b0: f64,
        #[arg(long, default_value_t = 10.0)]
        k0: f64,
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "hamiltonian-dysthe")]
        model: EnvelopeKind,
        #[arg(long, default_value_t = 4.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 2.0)]
        mu_max: f64,
        #[arg(long, default_value_t = 200)]
        n_lambda: usize,
        #[arg(long, default_value_t = 100)]
        n_mu: usize,
    },
    /// Relative surface errors of a candidate run against a reference run.
    Compare {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        candidate: PathBuf,
    },
    /// Convergence of the quartic coefficient expansions near the carrier.
    VerifyCoeffs {
        #[arg(long, default_value_t = 10.0)]
        k0: f64,
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        #[arg(long, default_value_t = 100)]
        n_quads: usize,
    },
    /// Measure sideband growth in an envelope run.
    ProbeGrowth {
        #[arg(long, value_enum)]
        model: Option<EnvelopeKind>,
    },
}

fn run_config(c: &Common) -> Result<RunConfig> {
    let mut cfg = match (&c.config, &c.preset) {
        (Some(_), Some(_)) => return Err(Error::Config("give --config or --preset, not both".into())),
        (Some(p), None) => RunConfig::load(p)?,
        (None, Some(name)) => RunConfig::preset(name)?,
        (None, None) => RunConfig::preset("paper-small")?,
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn out_dir(c: &Common, fallback: Option<&Path>) -> Result<PathBuf> {
    let dir = c
        .out
        .clone()
        .or_else(|| fallback.map(Path::to_path_buf))
        .ok_or_else(|| Error::Config("missing --out".into()))?;
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn create(path: PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn simulate(c: &Common, cfg: RunConfig, resume: bool) -> Result<()> {
    let dir = out_dir(c, cfg.out_dir.as_deref())?;
    let sum = if resume {
        harness::resume(&cfg, &dir)?
    } else {
        harness::run(&cfg, Some(&dir))?
    };
    let full = cfg.model == ModelKind::Full;
    println!(
        "wrote {} snapshots to {}; max |relative dH| = {:e}",
        sum.snapshots.len(),
        dir.display(),
        sum.max_abs_relative_dh(full)
    );
    Ok(())
}

fn write_slopes(path: PathBuf, r: &SlopeReport) -> Result<()> {
    use std::io::Write;
    let mut w = create(path)?;
    writeln!(w, "epsilon,residual,slope")?;
    for (e, res) in r.epsilon.iter().zip(&r.residual) {
        writeln!(w, "{},{},{}", fmt17(*e), fmt17(*res), fmt17(r.slope))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    let c = &cli.common;
    match cli.command {
        Command::SimulateFull { resume } => {
            let cfg = RunConfig {
                model: ModelKind::Full,
                ..run_config(c)?
            };
            simulate(c, cfg, resume)
        }
        Command::SimulateEnvelope { model, resume } => {
            let mut cfg = run_config(c)?;
            match model {
                Some(m) => cfg.model = m.model(),
                None if cfg.model == ModelKind::Full => {
                    return Err(Error::Config("configuration selects the full model".into()))
                }
                None => {}
            }
            simulate(c, cfg, resume)
        }
        Command::Reconstruct {
            input,
            t,
            classical,
            iy,
        } => {
            let cfg = run_config(c)?;
            let u = match load(&input)? {
                Snapshot::Complex(u) => u,
                Snapshot::Real(_) => {
                    return Err(Error::Config(format!("{} is not a complex snapshot", input.display())))
                }
            };
            let carrier = CarrierParams::new(cfg.k0, cfg.g).map_err(|e| Error::Config(e.to_string()))?;
            let state = EnvelopeState::new(u, carrier, t);
            let s = if classical {
                reconstruct_classical(&state)?
            } else {
                reconstruct_hamiltonian(&state)?
            };
            let dir = out_dir(c, None)?;
            save_real(dir.join("eta.dwf"), &s.eta)?;
            save_real(dir.join("xi.dwf"), &s.xi)?;
            write_cross_section_csv(&mut create(dir.join("eta_x.csv"))?, &s.eta, iy)?;
            write_cross_section_csv(&mut create(dir.join("xi_x.csv"))?, &s.xi, iy)?;
            println!("wrote surface to {}", dir.display());
            Ok(())
        }
        Command::StabilityMap {
            b0,
            k0,
            g,
            epsilon,
            model,
            lambda_max,
            mu_max,
            n_lambda,
            n_mu,
        } => {
            let base = StabilityQuery::new(b0, k0, g, 0.0, 0.0).with_epsilon(epsilon);
            let map = StabilityMap::compute(base, model.variant(), lambda_max, mu_max, n_lambda, n_mu)
                .map_err(|e| Error::Config(e.to_string()))?;
            let dir = out_dir(c, None)?;
            map.write_csv(create(dir.join("stability.csv"))?)?;
            map.write_pgm(create(dir.join("growth.pgm"))?)?;
            let mus: Vec<f64> = (0..n_mu).map(|j| map.mu(j)).collect();
            write_band_edges_csv(&base, &mus, create(dir.join("band_edges.csv"))?)?;
            let (l, m, gr) = map.argmax;
            println!("max growth {gr:e} at lambda = {l}, mu = {m}");
            Ok(())
        }
        Command::Compare {
            reference,
            candidate,
        } => {
            let rep = harness::compare_runs(&reference, &candidate)?;
            let dir = out_dir(c, None)?;
            rep.write_csv(create(dir.join("comparison.csv"))?)?;
            rep.write_cross_section_csv(create(dir.join("cross_section.csv"))?)?;
            let worst = rep.l2.iter().cloned().fold(0.0, f64::max);
            println!("{} common snapshots; max relative L2 error {worst:e}", rep.times.len());
            Ok(())
        }
        Command::VerifyCoeffs { k0, g, n_quads } => {
            let seed = c.seed.unwrap_or(42);
            let eps: Vec<f64> = (0..5).map(|i| 0.1 / 2f64.powi(i)).collect();
            let t1 = verify_t1_expansion(k0, &eps, n_quads, seed)
                .map_err(|e| Error::Config(e.to_string()))?;
            let eps_h: Vec<f64> = (0..5).map(|i| 0.02 / 2f64.powi(i)).collect();
            let hom = verify_homogenized_limit(k0, g, &eps_h, n_quads.min(20), seed)
                .map_err(|e| Error::Config(e.to_string()))?;
            let dir = out_dir(c, None)?;
            write_slopes(dir.join("t1_expansion.csv"), &t1)?;
            write_slopes(dir.join("homogenized_limit.csv"), &hom)?;
            println!("T1 expansion slope {:.4}; homogenized limit slope {:.4}", t1.slope, hom.slope);
            Ok(())
        }
        Command::ProbeGrowth { model } => {
            let mut cfg = run_config(c)?;
            if let Some(m) = model {
                cfg.model = m.model();
            }
            let (probe, record) = harness::sideband_growth_probe(&cfg)?;
            let dir = out_dir(c, cfg.out_dir.as_deref())?;
            {
                use std::io::Write;
                let mut w = create(dir.join("growth.csv"))?;
                writeln!(w, "t,amplitude")?;
                for (t, a) in record {
                    writeln!(w, "{},{}", fmt17(t), fmt17(a))?;
                }
            }
            if probe.unstable {
                println!(
                    "growth rate {:e} over t in [{}, {}]",
                    probe.rate, probe.window.0, probe.window.1
                );
            } else {
                println!("no exponential growth window found (rate 0)");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match &e {
                e if e.is_numerical() => 3,
                Error::Config(_)
                | Error::InvalidArgument(_)
                | Error::InvalidGrid(_)
                | Error::NonLattice { .. }
                | Error::InvalidOrder { .. }
                | Error::OriginQuery => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
