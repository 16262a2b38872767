//! Full water-wave equations in the surface variables `(eta, xi)`:
//!
//! ```text
//! eta_t = G(eta) xi
//! xi_t  = -g eta - |grad xi|^2 / 2 + (G(eta) xi + grad eta . grad xi)^2 / (2 (1 + |grad eta|^2))
//! ```
//!
//! The linear part is propagated exactly mode by mode; the nonlinear
//! remainder is advanced with integrating-factor RK4.

use crate::dno::{DnoConfig, DnoOps};
use crate::error::{Error, Result};
use crate::integrator::lawson_rk4;
use crate::spectral::{Grid2D, Multiplier, Padded, RealField, Spectrum};

/// Surface elevation and potential trace at time `t`.
#[derive(Clone, Debug)]
pub struct SurfaceState {
    pub eta: RealField,
    pub xi: RealField,
    pub t: f64,
}

impl SurfaceState {
    pub fn new(eta: RealField, xi: RealField, t: f64) -> Result<Self> {
        eta.grid().check_same(xi.grid())?;
        Ok(SurfaceState { eta, xi, t })
    }

    pub fn zeros(grid: &Grid2D) -> Self {
        SurfaceState {
            eta: RealField::zeros(grid),
            xi: RealField::zeros(grid),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        self.eta.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.eta.is_finite() && self.xi.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FullSolverConfig {
    pub dno: DnoConfig,
    pub dt: f64,
    pub g: f64,
}

impl Default for FullSolverConfig {
    fn default() -> Self {
        FullSolverConfig {
            dno: DnoConfig::default(),
            dt: 0.005,
            g: 1.0,
        }
    }
}

impl FullSolverConfig {
    pub fn validate(&self) -> Result<()> {
        self.dno.validate()?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::InvalidArgument(format!("g = {} must be positive", self.g)));
        }
        Ok(())
    }
}

type Pair = (Spectrum, Spectrum);

/// Mode-wise rotation `exp(tau L)` for `eta_t = |D| xi`, `xi_t = -g eta`.
#[derive(Clone, Debug)]
struct Rotation {
    cos: Vec<f64>,
    /// `|k|/omega sin(omega tau)`
    s_eta: Vec<f64>,
    /// `g/omega sin(omega tau)`
    s_xi: Vec<f64>,
}

impl Rotation {
    fn new(absk: &[f64], g: f64, tau: f64) -> Self {
        let n = absk.len();
        let (mut cos, mut s_eta, mut s_xi) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for (i, &k) in absk.iter().enumerate() {
            if k == 0.0 {
                cos[i] = 1.0;
                s_xi[i] = g * tau;
            } else {
                let w = (g * k).sqrt();
                let (s, c) = (w * tau).sin_cos();
                cos[i] = c;
                s_eta[i] = k / w * s;
                s_xi[i] = g / w * s;
            }
        }
        Rotation { cos, s_eta, s_xi }
    }

    fn apply(&self, v: &Pair) -> Pair {
        let (mut e, mut x) = (v.0.clone(), v.1.clone());
        let (es, xs) = (e.as_mut_slice(), x.as_mut_slice());
        for i in 0..es.len() {
            let (a, b) = (es[i], xs[i]);
            es[i] = a * self.cos[i] + b * self.s_eta[i];
            xs[i] = b * self.cos[i] - a * self.s_xi[i];
        }
        (e, x)
    }
}

/// Reusable full-solver workspace for one grid and configuration.
#[derive(Clone, Debug)]
pub struct FullSolver {
    grid: Grid2D,
    cfg: FullSolverConfig,
    ops: DnoOps,
    half: Rotation,
    full: Rotation,
}

impl FullSolver {
    pub fn new(grid: &Grid2D, cfg: FullSolverConfig) -> Result<Self> {
        cfg.validate()?;
        let absk: Vec<f64> = Multiplier::abs_d(grid).half_table_re();
        Ok(FullSolver {
            grid: grid.clone(),
            cfg,
            ops: DnoOps::new(grid),
            half: Rotation::new(&absk, cfg.g, 0.5 * cfg.dt),
            full: Rotation::new(&absk, cfg.g, cfg.dt),
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
    pub fn config(&self) -> &FullSolverConfig {
        &self.cfg
    }

    fn gradient_pad(&self, f: &Spectrum) -> (Padded, Padded) {
        (
            f.apply_unchecked(&self.ops.ddx).to_padded(),
            f.apply_unchecked(&self.ops.ddy).to_padded(),
        )
    }

    /// Nonlinear remainder (everything except `|D| xi` and `-g eta`).
    fn nonlinear(&self, w: &Pair) -> Pair {
        let (eta, xi) = w;
        let series = self.ops.series(eta, xi, self.cfg.dno.order);
        let mut d_eta = Spectrum::zeros(&self.grid);
        for t in &series.terms[1..] {
            d_eta.axpy(1.0, t);
        }
        let mut gxi = series.terms[0].clone();
        gxi.axpy(1.0, &d_eta);
        let gxi = gxi.to_padded();
        let (ex, ey) = self.gradient_pad(eta);
        let (xx, xy) = (&series.xi_x, &series.xi_y);
        let n = gxi.as_slice().len();
        let mut q = Vec::with_capacity(n);
        let (gs, exs, eys, xxs, xys) = (
            gxi.as_slice(),
            ex.as_slice(),
            ey.as_slice(),
            xx.as_slice(),
            xy.as_slice(),
        );
        for i in 0..n {
            let num = gs[i] + exs[i] * xxs[i] + eys[i] * xys[i];
            let den = 1.0 + exs[i] * exs[i] + eys[i] * eys[i];
            q.push(-0.5 * (xxs[i] * xxs[i] + xys[i] * xys[i]) + 0.5 * num * num / den);
        }
        let d_xi = Padded::from_vec(&self.grid, q).truncate();
        (d_eta, d_xi)
    }

    /// Full right-hand side `(eta_t, xi_t)`.
    pub fn rhs(&self, s: &SurfaceState) -> Result<(RealField, RealField)> {
        self.grid.check_same(s.grid())?;
        let w = (s.eta.spectrum(), s.xi.spectrum());
        let (mut de, mut dx) = self.nonlinear(&w);
        de.axpy(1.0, &w.1.apply_unchecked(&self.ops.abs_pow[1]));
        dx.axpy(-self.cfg.g, &w.0);
        Ok((de.to_field(), dx.to_field()))
    }

    fn prop(&self, v: &Pair, tau: f64) -> Pair {
        if tau == 0.5 * self.cfg.dt {
            self.half.apply(v)
        } else {
            debug_assert_eq!(tau, self.cfg.dt);
            self.full.apply(v)
        }
    }

    /// Advance a spectral state by one step.
    fn step_spec(&self, w: &Pair) -> Result<Pair> {
        lawson_rk4(w, self.cfg.dt, |v, tau| self.prop(v, tau), |v| Ok(self.nonlinear(v)))
    }

    pub fn step(&self, s: &SurfaceState) -> Result<SurfaceState> {
        self.grid.check_same(s.grid())?;
        let w = self.step_spec(&(s.eta.spectrum(), s.xi.spectrum()))?;
        let t = s.t + self.cfg.dt;
        if !(w.0.is_finite() && w.1.is_finite()) {
            return Err(Error::BlowUp {
                t,
                detail: "non-finite surface state".into(),
            });
        }
        Ok(SurfaceState {
            eta: w.0.to_field(),
            xi: w.1.to_field(),
            t,
        })
    }

    /// Advance `n` steps, calling `observe` after each one.
    pub fn advance(
        &self,
        s: &SurfaceState,
        n: usize,
        mut observe: impl FnMut(&SurfaceState) -> Result<()>,
    ) -> Result<SurfaceState> {
        let mut cur = s.clone();
        for _ in 0..n {
            cur = self.step(&cur)?;
            observe(&cur)?;
        }
        Ok(cur)
    }

    /// `H = 1/2 integral (xi G(eta) xi + g eta^2)`.
    pub fn hamiltonian(&self, s: &SurfaceState) -> Result<f64> {
        self.grid.check_same(s.grid())?;
        let eta = s.eta.spectrum();
        let terms = self.ops.terms(&eta, &s.xi.spectrum(), self.cfg.dno.order);
        let mut g = terms[0].clone();
        for t in &terms[1..] {
            g.axpy(1.0, t);
        }
        let gxi = g.to_field();
        let kin = s.xi.inner(&gxi)?;
        let pot = s.eta.inner(&s.eta)?;
        Ok(0.5 * (kin + self.cfg.g * pot))
    }
}

/// Right-hand side of the full system.
pub fn rhs_full(s: &SurfaceState, cfg: &FullSolverConfig) -> Result<(RealField, RealField)> {
    FullSolver::new(s.grid(), *cfg)?.rhs(s)
}

/// One integrating-factor RK4 step of the full system.
pub fn step_full(s: &SurfaceState, cfg: &FullSolverConfig) -> Result<SurfaceState> {
    FullSolver::new(s.grid(), *cfg)?.step(s)
}

/// Total energy of the surface state.
pub fn hamiltonian_full(s: &SurfaceState, cfg: &FullSolverConfig) -> Result<f64> {
    FullSolver::new(s.grid(), *cfg)?.hamiltonian(s)
}
