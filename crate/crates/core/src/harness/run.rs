use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::dno::DnoConfig;
use crate::envelope::{
    hamiltonian_envelope, impulse, perturbed_stokes, wave_action, EnvelopeModel, EnvelopeSolver,
    EnvelopeState, Variant,
};
use crate::error::{Error, Result};
use crate::euler3d::{FullSolver, FullSolverConfig, SurfaceState};
use crate::reconstruct::{classical_from_hamiltonian, reconstruct_classical, reconstruct_hamiltonian};
use crate::spectral::io::{fmt17, load, save_complex, save_real, Snapshot};

use super::config::RunConfig;

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const SNAPSHOT_INDEX_FILE: &str = "snapshots.csv";
pub const SNAPSHOT_DIR: &str = "snapshots";
pub const CONFIG_FILE: &str = "config.json";

const FULL_HEADER: &str = "t,H,relative_dH,eta_max,eta_min";
const ENVELOPE_HEADER: &str = "t,H,M,Ix,Iy,relative_dH";

/// One row of the diagnostics series; `values` follow the CSV header after `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub values: Vec<f64>,
}

impl DiagnosticsRow {
    /// `relative_dH` column.
    pub fn relative_dh(&self, full: bool) -> f64 {
        if full {
            self.values[1]
        } else {
            self.values[4]
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    /// `(index, t)` of every stored snapshot, including earlier segments.
    pub snapshots: Vec<(usize, f64)>,
    /// Rows produced by this call, including the initial row.
    pub diagnostics: Vec<DiagnosticsRow>,
    pub h0: f64,
}

impl RunSummary {
    pub fn max_abs_relative_dh(&self, full: bool) -> f64 {
        self.diagnostics
            .iter()
            .map(|r| r.relative_dh(full).abs())
            .fold(0.0, f64::max)
    }
}

pub fn snapshot_path(dir: &Path, field: &str, index: usize) -> PathBuf {
    dir.join(SNAPSHOT_DIR).join(format!("{field}_{index:05}.dwf"))
}

/// Perturbed Stokes envelope `B0 (1 + delta cos(lambda x) cos(mu y))`.
pub fn initial_envelope(cfg: &RunConfig) -> Result<EnvelopeState> {
    perturbed_stokes(
        cfg.amplitude_b0(),
        cfg.lambda,
        cfg.mu,
        cfg.perturbation,
        &cfg.grid()?,
        cfg.carrier()?,
    )
}

/// Surface reconstructed from [`initial_envelope`], the full solver's initial data.
pub fn initial_surface(cfg: &RunConfig) -> Result<SurfaceState> {
    reconstruct_hamiltonian(&initial_envelope(cfg)?)
}

enum Driver {
    Full(FullSolver),
    Envelope(EnvelopeSolver, Variant),
}

#[derive(Clone)]
enum State {
    Surface(SurfaceState),
    Envelope(EnvelopeState),
}

impl Driver {
    fn new(cfg: &RunConfig) -> Result<Self> {
        let grid = cfg.grid()?;
        match cfg.model.envelope_variant() {
            None => {
                let fc = FullSolverConfig {
                    dno: DnoConfig::new(cfg.dno_order, cfg.g)?,
                    dt: cfg.dt,
                    g: cfg.g,
                };
                Ok(Driver::Full(FullSolver::new(&grid, fc)?))
            }
            Some(v) => Ok(Driver::Envelope(
                EnvelopeSolver::new(&grid, EnvelopeModel::lab(v), cfg.carrier()?, cfg.dt)?,
                v,
            )),
        }
    }

    fn is_full(&self) -> bool {
        matches!(self, Driver::Full(_))
    }

    fn initial(&self, cfg: &RunConfig) -> Result<State> {
        Ok(match self {
            Driver::Full(_) => State::Surface(initial_surface(cfg)?),
            Driver::Envelope(_, Variant::ClassicalDysthe) => {
                State::Envelope(classical_from_hamiltonian(&initial_envelope(cfg)?))
            }
            Driver::Envelope(..) => State::Envelope(initial_envelope(cfg)?),
        })
    }

    fn step(&self, s: &State, t: f64) -> Result<State> {
        Ok(match (self, s) {
            (Driver::Full(f), State::Surface(v)) => {
                let mut n = f.step(v)?;
                n.t = t;
                State::Surface(n)
            }
            (Driver::Envelope(e, _), State::Envelope(v)) => {
                let mut n = e.step(v)?;
                n.t = t;
                State::Envelope(n)
            }
            _ => unreachable!("state kind follows the driver"),
        })
    }

    /// Diagnostics values after `t`, with `relative_dH` computed against `h0`
    /// (or against itself when `h0` is `None`).
    fn diagnostics(&self, s: &State, h0: Option<f64>) -> Result<(f64, Vec<f64>)> {
        let rel = |h: f64, h0: f64| if h0 == 0.0 { 0.0 } else { (h - h0) / h0.abs() };
        match (self, s) {
            (Driver::Full(f), State::Surface(v)) => {
                let h = f.hamiltonian(v)?;
                let h0 = h0.unwrap_or(h);
                Ok((h, vec![h, rel(h, h0), v.eta.max(), v.eta.min()]))
            }
            (Driver::Envelope(..), State::Envelope(v)) => {
                let h = hamiltonian_envelope(v)?;
                let h0 = h0.unwrap_or(h);
                let i = impulse(v)?;
                Ok((h, vec![h, wave_action(v), i[0], i[1], rel(h, h0)]))
            }
            _ => unreachable!("state kind follows the driver"),
        }
    }

    fn surface(&self, s: &State) -> Result<SurfaceState> {
        match (self, s) {
            (Driver::Full(_), State::Surface(v)) => Ok(v.clone()),
            (Driver::Envelope(_, Variant::ClassicalDysthe), State::Envelope(v)) => {
                reconstruct_classical(v)
            }
            (Driver::Envelope(..), State::Envelope(v)) => reconstruct_hamiltonian(v),
            _ => unreachable!("state kind follows the driver"),
        }
    }

    fn save(&self, dir: &Path, index: usize, s: &State) -> Result<()> {
        let surf = self.surface(s)?;
        if !surf.is_finite() {
            return Err(Error::BlowUp {
                t: surf.t,
                detail: "non-finite surface at snapshot".into(),
            });
        }
        if let State::Envelope(v) = s {
            save_complex(snapshot_path(dir, "u", index), &v.u)?;
        }
        save_real(snapshot_path(dir, "eta", index), &surf.eta)?;
        save_real(snapshot_path(dir, "xi", index), &surf.xi)?;
        Ok(())
    }

    fn load(&self, cfg: &RunConfig, dir: &Path, index: usize, t: f64) -> Result<State> {
        let grid = cfg.grid()?;
        let real = |name: &str| match load(snapshot_path(dir, name, index))? {
            Snapshot::Real(f) => {
                grid.check_same(f.grid())?;
                Ok(f)
            }
            Snapshot::Complex(_) => Err(Error::Format(format!("{name} snapshot is complex"))),
        };
        Ok(match self {
            Driver::Full(_) => State::Surface(SurfaceState::new(real("eta")?, real("xi")?, t)?),
            Driver::Envelope(..) => match load(snapshot_path(dir, "u", index))? {
                Snapshot::Complex(u) => {
                    grid.check_same(u.grid())?;
                    State::Envelope(EnvelopeState::new(u, cfg.carrier()?, t))
                }
                Snapshot::Real(_) => return Err(Error::Format("u snapshot is real".into())),
            },
        })
    }
}

fn format_row(t: f64, values: &[f64]) -> String {
    let mut s = fmt17(t);
    for v in values {
        s.push(',');
        s.push_str(&fmt17(*v));
    }
    s
}

struct Segment {
    start_step: usize,
    state: State,
    h0: Option<f64>,
    snapshots: Vec<(usize, f64)>,
}

fn integrate(cfg: &RunConfig, dir: &Path, driver: &Driver, seg: Segment) -> Result<RunSummary> {
    let snap_stride = cfg.snapshot_stride();
    let diag_stride = cfg.diagnostics_stride();
    let mut diag = OpenOptions::new().append(true).open(dir.join(DIAGNOSTICS_FILE))?;
    let mut index = OpenOptions::new().append(true).open(dir.join(SNAPSHOT_INDEX_FILE))?;
    let mut snapshots = seg.snapshots;
    let mut rows = Vec::new();
    let mut state = seg.state;

    let (h, values) = driver.diagnostics(&state, seg.h0)?;
    let h0 = seg.h0.unwrap_or(h);
    let t_start = seg.start_step as f64 * cfg.dt;
    rows.push(DiagnosticsRow { t: t_start, values });
    if seg.start_step == 0 {
        writeln!(diag, "{}", format_row(t_start, &rows[0].values))?;
        driver.save(dir, 0, &state)?;
        writeln!(index, "0,{}", fmt17(0.0))?;
        snapshots.push((0, 0.0));
    }

    for step in seg.start_step + 1..=cfg.total_steps() {
        let t = step as f64 * cfg.dt;
        state = driver.step(&state, t)?;
        let at_snapshot = step % snap_stride == 0;
        if step % diag_stride == 0 || at_snapshot {
            let (_, values) = driver.diagnostics(&state, Some(h0))?;
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::BlowUp {
                    t,
                    detail: "non-finite diagnostics".into(),
                });
            }
            writeln!(diag, "{}", format_row(t, &values))?;
            rows.push(DiagnosticsRow { t, values });
        }
        if at_snapshot {
            let k = step / snap_stride;
            driver.save(dir, k, &state)?;
            writeln!(index, "{k},{}", fmt17(t))?;
            diag.flush()?;
            index.flush()?;
            snapshots.push((k, t));
        }
    }
    Ok(RunSummary {
        out_dir: dir.to_path_buf(),
        snapshots,
        diagnostics: rows,
        h0,
    })
}

fn output_dir(cfg: &RunConfig, out: Option<&Path>) -> Result<PathBuf> {
    out.map(Path::to_path_buf)
        .or_else(|| cfg.out_dir.clone())
        .ok_or_else(|| Error::Config("no output directory given".into()))
}

/// Run `cfg` from `t = 0`, writing the configuration, the diagnostics series,
/// the snapshot index and the snapshots into `out` (or `cfg.out_dir`).
pub fn run(cfg: &RunConfig, out: Option<&Path>) -> Result<RunSummary> {
    cfg.validate()?;
    let dir = output_dir(cfg, out)?;
    fs::create_dir_all(dir.join(SNAPSHOT_DIR))?;
    fs::write(dir.join(CONFIG_FILE), cfg.to_json())?;
    let driver = Driver::new(cfg)?;
    let header = if driver.is_full() { FULL_HEADER } else { ENVELOPE_HEADER };
    fs::write(dir.join(DIAGNOSTICS_FILE), format!("{header}\n"))?;
    fs::write(dir.join(SNAPSHOT_INDEX_FILE), "index,t\n")?;
    let state = driver.initial(cfg)?;
    integrate(
        cfg,
        &dir,
        &driver,
        Segment {
            start_step: 0,
            state,
            h0: None,
            snapshots: Vec::new(),
        },
    )
}

/// Snapshot index `(index, t)` of a run directory.
pub fn read_snapshot_index(dir: &Path) -> Result<Vec<(usize, f64)>> {
    let f = File::open(dir.join(SNAPSHOT_INDEX_FILE))?;
    let mut out = Vec::new();
    for line in BufReader::new(f).lines().skip(1) {
        let line = line?;
        let (i, t) = line
            .split_once(',')
            .ok_or_else(|| Error::Format(format!("bad snapshot index line {line:?}")))?;
        let parse_err = |_| Error::Format(format!("bad snapshot index line {line:?}"));
        out.push((i.parse().map_err(parse_err)?, t.parse().map_err(|_| Error::Format(line.clone()))?));
    }
    Ok(out)
}

/// Diagnostics rows of a run directory.
pub fn read_diagnostics(dir: &Path) -> Result<Vec<DiagnosticsRow>> {
    let f = File::open(dir.join(DIAGNOSTICS_FILE))?;
    let mut out = Vec::new();
    for line in BufReader::new(f).lines().skip(1) {
        let line = line?;
        let vals: std::result::Result<Vec<f64>, _> = line.split(',').map(str::parse).collect();
        let vals = vals.map_err(|_| Error::Format(format!("bad diagnostics line {line:?}")))?;
        if vals.is_empty() {
            continue;
        }
        out.push(DiagnosticsRow {
            t: vals[0],
            values: vals[1..].to_vec(),
        });
    }
    Ok(out)
}

/// Continue the run stored in `dir` from its last snapshot up to
/// `cfg.t_end`. Output after the snapshot is discarded and regenerated, so
/// the result matches an uninterrupted run.
pub fn resume(cfg: &RunConfig, dir: &Path) -> Result<RunSummary> {
    cfg.validate()?;
    let driver = Driver::new(cfg)?;
    let mut snapshots = read_snapshot_index(dir)?;
    let &(last, _) = snapshots
        .last()
        .ok_or_else(|| Error::Format("run directory has no snapshots".into()))?;
    let start_step = last * cfg.snapshot_stride();
    let t = start_step as f64 * cfg.dt;
    let state = driver.load(cfg, dir, last, t)?;
    snapshots.retain(|&(k, _)| k <= last);

    let diag_text = fs::read_to_string(dir.join(DIAGNOSTICS_FILE))?;
    let mut lines = diag_text.lines();
    let header = lines.next().unwrap_or_default().to_string();
    let kept: Vec<&str> = lines
        .filter(|l| l.split(',').next().and_then(|v| v.parse::<f64>().ok()).is_some_and(|v| v <= t))
        .collect();
    let h0 = kept
        .first()
        .and_then(|l| l.split(',').nth(1))
        .and_then(|v| v.parse::<f64>().ok())
        .ok_or_else(|| Error::Format("diagnostics series has no initial row".into()))?;
    let mut w = BufWriter::new(File::create(dir.join(DIAGNOSTICS_FILE))?);
    writeln!(w, "{header}")?;
    for l in &kept {
        writeln!(w, "{l}")?;
    }
    w.flush()?;
    let mut w = BufWriter::new(File::create(dir.join(SNAPSHOT_INDEX_FILE))?);
    writeln!(w, "index,t")?;
    for (k, tk) in &snapshots {
        writeln!(w, "{k},{}", fmt17(*tk))?;
    }
    w.flush()?;
    fs::write(dir.join(CONFIG_FILE), cfg.to_json())?;

    integrate(
        cfg,
        dir,
        &driver,
        Segment {
            start_step,
            state,
            h0: Some(h0),
            snapshots,
        },
    )
}
