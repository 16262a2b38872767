use crate::envelope::{EnvelopeModel, EnvelopeSolver, EnvelopeState};
use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::spectral::Grid2D;

use super::config::RunConfig;
use super::run::initial_envelope;

/// Measured exponential growth of a sideband.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthProbe {
    pub rate: f64,
    /// False when no growing window was found; `rate` is then 0.
    pub unstable: bool,
    pub window: (f64, f64),
    pub rms: f64,
}

/// Amplitude of the `(+-lambda, +-mu)` modes of `u`.
pub fn sideband_amplitude(u: &EnvelopeState, lambda: f64, mu: f64) -> Result<f64> {
    let grid = u.grid();
    let jx = Grid2D::lattice_multiple(lambda, grid.dkx())?;
    let jy = Grid2D::lattice_multiple(mu, grid.dky())?;
    let spec = u.u.spectrum();
    let mut modes = vec![(jx, jy), (-jx, -jy), (jx, -jy), (-jx, jy)];
    modes.sort_unstable();
    modes.dedup();
    Ok(modes
        .into_iter()
        .map(|(a, b)| spec.coeff(a, b).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Fit `log a(t)` over the window of the pre-saturation record with the
/// smallest residual. Windows span half of that record.
pub fn fit_growth(times: &[f64], amplitude: &[f64]) -> GrowthProbe {
    let stable = GrowthProbe {
        rate: 0.0,
        unstable: false,
        window: (0.0, 0.0),
        rms: 0.0,
    };
    let n = times.len().min(amplitude.len());
    if n < 8 || amplitude[..n].iter().any(|a| !(*a > 0.0)) {
        return stable;
    }
    let top = amplitude[..n].iter().cloned().fold(0.0, f64::max);
    let cut = amplitude[..n].iter().position(|&a| a >= 0.5 * top).unwrap_or(n - 1) + 1;
    let logs: Vec<f64> = amplitude[..cut].iter().map(|a| a.ln()).collect();
    let w = cut / 2;
    if w < 4 {
        return stable;
    }
    let mut best: Option<(f64, f64, usize)> = None;
    for s in 0..=cut - w {
        if let Some(f) = linear_fit(&times[s..s + w], &logs[s..s + w]) {
            if best.is_none_or(|b| f.rms < b.1) {
                best = Some((f.slope, f.rms, s));
            }
        }
    }
    let Some((slope, rms, s)) = best else {
        return stable;
    };
    let window = (times[s], times[s + w - 1]);
    // at least one e-fold across the window
    if slope <= 0.0 || slope * (window.1 - window.0) < 1.0 {
        return GrowthProbe { window, rms, ..stable };
    }
    GrowthProbe {
        rate: slope,
        unstable: true,
        window,
        rms,
    }
}

/// Integrate the envelope model of `cfg` in memory from its perturbed Stokes
/// data and fit the growth of the seeded sideband, sampled every
/// diagnostics interval. Returns the probe and the `(t, amplitude)` record.
pub fn sideband_growth_probe(cfg: &RunConfig) -> Result<(GrowthProbe, Vec<(f64, f64)>)> {
    cfg.validate()?;
    let variant = cfg
        .model
        .envelope_variant()
        .ok_or_else(|| Error::Config("growth probing needs an envelope model".into()))?;
    let grid = cfg.grid()?;
    let solver = EnvelopeSolver::new(&grid, EnvelopeModel::lab(variant), cfg.carrier()?, cfg.dt)?;
    let mut u = initial_envelope(cfg)?;
    let stride = cfg.diagnostics_stride();
    let mut record = vec![(0.0, sideband_amplitude(&u, cfg.lambda, cfg.mu)?)];
    for step in 1..=cfg.total_steps() {
        u = solver.step(&u)?;
        u.t = step as f64 * cfg.dt;
        if step % stride == 0 {
            record.push((u.t, sideband_amplitude(&u, cfg.lambda, cfg.mu)?));
        }
    }
    let (t, a): (Vec<f64>, Vec<f64>) = record.iter().cloned().unzip();
    Ok((fit_growth(&t, &a), record))
}
