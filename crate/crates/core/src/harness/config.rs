use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dno::MAX_ORDER;
use crate::envelope::{CarrierParams, Variant};
use crate::error::{Error, Result};
use crate::spectral::Grid2D;
use crate::stability::b0_from_a0;

/// Which equations a run integrates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Full,
    HamiltonianDysthe,
    ClassicalDysthe,
    Nls,
    ExactDispersion,
}

impl ModelKind {
    pub fn envelope_variant(self) -> Option<Variant> {
        match self {
            ModelKind::Full => None,
            ModelKind::HamiltonianDysthe => Some(Variant::HamiltonianDysthe),
            ModelKind::ClassicalDysthe => Some(Variant::ClassicalDysthe),
            ModelKind::Nls => Some(Variant::Nls),
            ModelKind::ExactDispersion => Some(Variant::ExactDispersion),
        }
    }
}

fn two_pi() -> f64 {
    2.0 * PI
}
fn default_perturbation() -> f64 {
    0.1
}
fn default_order() -> usize {
    4
}
fn default_g() -> f64 {
    1.0
}

/// Flat run configuration. Unknown keys are rejected when parsing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub nx: usize,
    pub ny: usize,
    #[serde(default = "two_pi")]
    pub lx: f64,
    #[serde(default = "two_pi")]
    pub ly: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Time between stored snapshots; a multiple of `dt`.
    pub snapshot_every: f64,
    /// Time between rows of the diagnostics series; defaults to `snapshot_every`.
    #[serde(default)]
    pub diagnostics_every: Option<f64>,
    pub model: ModelKind,
    pub k0: f64,
    #[serde(default = "default_g")]
    pub g: f64,
    /// Envelope amplitude; exactly one of `b0`, `a0` is given.
    #[serde(default)]
    pub b0: Option<f64>,
    #[serde(default)]
    pub a0: Option<f64>,
    pub lambda: f64,
    pub mu: f64,
    #[serde(default = "default_perturbation")]
    pub perturbation: f64,
    #[serde(default = "default_order")]
    pub dno_order: usize,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    /// Named presets: `paper` (512 x 64 to t = 2500), `paper-small`
    /// (256 x 32 to t = 250) and `paper-small-0035` (B0 = 0.0035, t = 150).
    pub fn preset(name: &str) -> Result<Self> {
        let small = RunConfig {
            nx: 256,
            ny: 32,
            lx: two_pi(),
            ly: two_pi(),
            dt: 0.005,
            t_end: 250.0,
            snapshot_every: 10.0,
            diagnostics_every: Some(1.0),
            model: ModelKind::HamiltonianDysthe,
            k0: 10.0,
            g: 1.0,
            b0: Some(0.003),
            a0: None,
            lambda: 1.0,
            mu: 1.0,
            perturbation: 0.1,
            dno_order: 4,
            out_dir: None,
            seed: 0,
        };
        match name {
            "paper-small" => Ok(small),
            "paper-small-0035" => Ok(RunConfig {
                t_end: 150.0,
                b0: Some(0.0035),
                ..small
            }),
            "paper" => Ok(RunConfig {
                nx: 512,
                ny: 64,
                t_end: 2500.0,
                snapshot_every: 50.0,
                diagnostics_every: Some(5.0),
                ..small
            }),
            _ => Err(Error::Config(format!("unknown preset {name:?}"))),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::new(self.nx, self.ny, self.lx, self.ly).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn carrier(&self) -> Result<CarrierParams> {
        CarrierParams::new(self.k0, self.g).map_err(|e| Error::Config(e.to_string()))
    }

    /// Hamiltonian envelope amplitude `B0`.
    pub fn amplitude_b0(&self) -> f64 {
        match (self.b0, self.a0) {
            (Some(b), _) => b,
            (None, Some(a)) => b0_from_a0(a, self.k0, self.g),
            (None, None) => 0.0,
        }
    }

    pub fn total_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn snapshot_stride(&self) -> usize {
        (self.snapshot_every / self.dt).round() as usize
    }

    pub fn diagnostics_stride(&self) -> usize {
        (self.diagnostics_every.unwrap_or(self.snapshot_every) / self.dt).round() as usize
    }

    fn multiple_of_dt(&self, name: &str, v: f64) -> Result<()> {
        let r = v / self.dt;
        if !(v > 0.0) || (r - r.round()).abs() > 1e-9 * r.max(1.0) || r.round() < 1.0 {
            return Err(Error::Config(format!(
                "{name} = {v} is not a positive multiple of dt = {}",
                self.dt
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        let bad = |m: String| Err(Error::Config(m));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad(format!("t_end = {} must be nonnegative", self.t_end));
        }
        let r = self.t_end / self.dt;
        if (r - r.round()).abs() > 1e-9 * r.max(1.0) {
            return bad(format!("t_end = {} is not a multiple of dt", self.t_end));
        }
        self.multiple_of_dt("snapshot_every", self.snapshot_every)?;
        if let Some(d) = self.diagnostics_every {
            self.multiple_of_dt("diagnostics_every", d)?;
        }
        let c = self.carrier()?;
        c.lattice_index(&grid).map_err(|e| Error::Config(format!("k0: {e}")))?;
        Grid2D::lattice_multiple(self.lambda, grid.dkx())
            .map_err(|e| Error::Config(format!("lambda: {e}")))?;
        Grid2D::lattice_multiple(self.mu, grid.dky())
            .map_err(|e| Error::Config(format!("mu: {e}")))?;
        if self.dno_order > MAX_ORDER {
            return bad(format!("dno_order = {} outside 0..={MAX_ORDER}", self.dno_order));
        }
        match (self.b0, self.a0) {
            (Some(_), Some(_)) => return bad("give either b0 or a0, not both".into()),
            (None, None) => return bad("missing amplitude b0 or a0".into()),
            _ => {}
        }
        let amp = self.amplitude_b0();
        if !(amp.is_finite() && amp >= 0.0) {
            return bad(format!("amplitude {amp} must be nonnegative"));
        }
        if !self.perturbation.is_finite() {
            return bad("perturbation must be finite".into());
        }
        Ok(())
    }
}
