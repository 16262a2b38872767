//! Envelope equations for a modulated carrier `exp(i k0 x)`: the Hamiltonian
//! Dysthe equation, its exact-dispersion and NLS variants, and the classical
//! Dysthe equation, together with their conserved quantities.
//!
//! Every variant is written as `u_t = -i (L(D) u + N(u))` with a real linear
//! symbol `L`, which is propagated exactly by the integrating factor.

mod diagnostics;
mod rhs;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::lawson_rk4;
use crate::spectral::{ComplexField, ComplexSpectrum, Grid2D, Multiplier};

pub use diagnostics::{hamiltonian_envelope, hamiltonian_moving_frame, impulse, wave_action};
pub use rhs::{nonlinear_coeffs, NonlinearCoeffs};

/// Carrier wave parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CarrierParams {
    pub k0: f64,
    pub g: f64,
    pub omega0: f64,
    /// Expansion bookkeeping scale; 1 when amplitudes carry the scale.
    pub epsilon: f64,
}

impl CarrierParams {
    pub fn new(k0: f64, g: f64) -> Result<Self> {
        Self::with_epsilon(k0, g, 1.0)
    }

    pub fn with_epsilon(k0: f64, g: f64, epsilon: f64) -> Result<Self> {
        if !(k0.is_finite() && k0 > 0.0) {
            return Err(Error::InvalidArgument(format!("k0 = {k0} must be positive")));
        }
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::InvalidArgument(format!("g = {g} must be positive")));
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon = {epsilon} must be nonnegative"
            )));
        }
        Ok(CarrierParams {
            k0,
            g,
            omega0: (g * k0).sqrt(),
            epsilon,
        })
    }

    /// Index of the carrier on the x lattice of `grid`.
    pub fn lattice_index(&self, grid: &Grid2D) -> Result<i64> {
        let j = Grid2D::lattice_multiple(self.k0, grid.dkx())?;
        if j <= 0 {
            return Err(Error::NonLattice {
                value: self.k0,
                spacing: grid.dkx(),
            });
        }
        Ok(j)
    }

    /// Group velocity `omega0 / (2 k0)`.
    pub fn group_velocity(&self) -> f64 {
        self.omega0 / (2.0 * self.k0)
    }
}

/// Envelope `u` with its carrier and time.
#[derive(Clone, Debug)]
pub struct EnvelopeState {
    pub u: ComplexField,
    pub carrier: CarrierParams,
    pub t: f64,
}

impl EnvelopeState {
    pub fn new(u: ComplexField, carrier: CarrierParams, t: f64) -> Self {
        EnvelopeState { u, carrier, t }
    }

    pub fn grid(&self) -> &Grid2D {
        self.u.grid()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    HamiltonianDysthe,
    ClassicalDysthe,
    Nls,
    ExactDispersion,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    #[default]
    Lab,
    /// Co-moving with the group velocity, with the carrier rotation removed.
    Moving,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EnvelopeModel {
    pub variant: Variant,
    pub frame: Frame,
}

impl EnvelopeModel {
    pub fn new(variant: Variant, frame: Frame) -> Self {
        EnvelopeModel { variant, frame }
    }

    pub fn lab(variant: Variant) -> Self {
        Self::new(variant, Frame::Lab)
    }
}

/// Real linear symbol `L(kx, ky)` of a model.
pub fn linear_symbol(model: EnvelopeModel, c: &CarrierParams, kx: f64, ky: f64) -> f64 {
    let (k0, w0, e) = (c.k0, c.omega0, c.epsilon);
    let cg = w0 / (2.0 * k0);
    let second = -w0 / (8.0 * k0 * k0) * kx * kx + w0 / (4.0 * k0 * k0) * ky * ky;
    let third = w0 / (16.0 * k0.powi(3)) * kx.powi(3) - 3.0 * w0 / (8.0 * k0.powi(3)) * kx * ky * ky;
    let (lin, shift) = match model.variant {
        Variant::HamiltonianDysthe => (
            w0 + e * cg * kx + e * e * second + e.powi(3) * third,
            w0 + e * cg * kx,
        ),
        Variant::Nls => (w0 + e * cg * kx + e * e * second, w0 + e * cg * kx),
        Variant::ExactDispersion => (
            (c.g * (k0 + e * kx).hypot(e * ky)).sqrt(),
            w0 + e * cg * kx,
        ),
        // the classical equation is written without the carrier rotation
        Variant::ClassicalDysthe => (cg * kx + second + third, cg * kx),
    };
    match model.frame {
        Frame::Lab => lin,
        Frame::Moving => lin - shift,
    }
}

/// Reusable envelope stepper for one grid, model, carrier and step size.
#[derive(Clone, Debug)]
pub struct EnvelopeSolver {
    grid: Grid2D,
    model: EnvelopeModel,
    carrier: CarrierParams,
    dt: f64,
    pub(crate) ops: rhs::Ops,
    linear: Vec<f64>,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
}

impl EnvelopeSolver {
    pub fn new(grid: &Grid2D, model: EnvelopeModel, carrier: CarrierParams, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt = {dt} must be positive")));
        }
        let sym = Multiplier::from_real_symbol(grid, linear_symbol(model, &carrier, 0.0, 0.0), |kx, ky| {
            linear_symbol(model, &carrier, kx, ky)
        });
        let linear: Vec<f64> = sym.full_table().iter().map(|c| c.re).collect();
        let prop = |tau: f64| -> Vec<Complex64> {
            linear
                .iter()
                .map(|&l| Complex64::new(0.0, -l * tau).exp())
                .collect()
        };
        Ok(EnvelopeSolver {
            grid: grid.clone(),
            model,
            carrier,
            dt,
            ops: rhs::Ops::new(grid),
            half: prop(0.5 * dt),
            full: prop(dt),
            linear,
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
    pub fn model(&self) -> EnvelopeModel {
        self.model
    }
    pub fn carrier(&self) -> &CarrierParams {
        &self.carrier
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `-i N(u)` in spectral form.
    fn nonlinear(&self, u: &ComplexSpectrum) -> ComplexSpectrum {
        let mut n = rhs::nonlinear(&self.ops, self.model.variant, &self.carrier, u);
        n.scale(Complex64::new(0.0, -1.0));
        n
    }

    fn check(&self, s: &EnvelopeState) -> Result<()> {
        self.grid.check_same(s.grid())?;
        if s.carrier != self.carrier {
            return Err(Error::InvalidArgument(
                "state carrier differs from the solver carrier".into(),
            ));
        }
        Ok(())
    }

    /// Time derivative `u_t`.
    pub fn rhs(&self, s: &EnvelopeState) -> Result<ComplexField> {
        self.check(s)?;
        let u = s.u.spectrum();
        let mut d = self.nonlinear(&u);
        let lin: Vec<Complex64> = self.linear.iter().map(|&l| Complex64::new(0.0, -l)).collect();
        d.axpy(Complex64::new(1.0, 0.0), &u.mul_table(&lin));
        Ok(d.to_field())
    }

    pub(crate) fn step_spec(&self, u: &ComplexSpectrum) -> Result<ComplexSpectrum> {
        lawson_rk4(
            u,
            self.dt,
            |v, tau| {
                if tau == self.dt {
                    v.mul_table(&self.full)
                } else {
                    v.mul_table(&self.half)
                }
            },
            |v| Ok(self.nonlinear(v)),
        )
    }

    pub fn step(&self, s: &EnvelopeState) -> Result<EnvelopeState> {
        self.check(s)?;
        let next = self.step_spec(&s.u.spectrum())?;
        let t = s.t + self.dt;
        if !next.is_finite() {
            return Err(Error::BlowUp {
                t,
                detail: "non-finite envelope".into(),
            });
        }
        Ok(EnvelopeState {
            u: next.to_field(),
            carrier: self.carrier,
            t,
        })
    }

    /// Advance `n` steps, calling `observe` after each one.
    pub fn advance(
        &self,
        s: &EnvelopeState,
        n: usize,
        mut observe: impl FnMut(&EnvelopeState) -> Result<()>,
    ) -> Result<EnvelopeState> {
        let mut cur = s.clone();
        for _ in 0..n {
            cur = self.step(&cur)?;
            observe(&cur)?;
        }
        Ok(cur)
    }
}

fn lab_rhs(s: &EnvelopeState, variant: Variant) -> Result<ComplexField> {
    EnvelopeSolver::new(s.grid(), EnvelopeModel::lab(variant), s.carrier, 1.0)?.rhs(s)
}

/// `u_t` under the Hamiltonian Dysthe equation.
pub fn rhs_hamiltonian_dysthe(s: &EnvelopeState) -> Result<ComplexField> {
    lab_rhs(s, Variant::HamiltonianDysthe)
}

/// `A_t` under the classical Dysthe equation.
pub fn rhs_classical_dysthe(s: &EnvelopeState) -> Result<ComplexField> {
    lab_rhs(s, Variant::ClassicalDysthe)
}

/// `u_t` under the cubic NLS truncation of the Hamiltonian Dysthe equation.
pub fn rhs_nls(s: &EnvelopeState) -> Result<ComplexField> {
    lab_rhs(s, Variant::Nls)
}

/// `u_t` with the exact linear dispersion `omega(k0 + D)`.
pub fn rhs_exact_dispersion(s: &EnvelopeState) -> Result<ComplexField> {
    lab_rhs(s, Variant::ExactDispersion)
}

/// One integrating-factor RK4 step.
pub fn step_envelope(s: &EnvelopeState, model: EnvelopeModel, dt: f64) -> Result<EnvelopeState> {
    EnvelopeSolver::new(s.grid(), model, s.carrier, dt)?.step(s)
}

/// `u = B0 (1 + 0.1 cos(lambda x) cos(mu y))`.
pub fn initial_perturbed_stokes(
    b0: f64,
    lambda: f64,
    mu: f64,
    grid: &Grid2D,
    carrier: CarrierParams,
) -> Result<EnvelopeState> {
    perturbed_stokes(b0, lambda, mu, 0.1, grid, carrier)
}

/// `u = B0 (1 + delta cos(lambda x) cos(mu y))` with a chosen perturbation factor.
pub fn perturbed_stokes(
    b0: f64,
    lambda: f64,
    mu: f64,
    delta: f64,
    grid: &Grid2D,
    carrier: CarrierParams,
) -> Result<EnvelopeState> {
    Grid2D::lattice_multiple(lambda, grid.dkx())?;
    Grid2D::lattice_multiple(mu, grid.dky())?;
    let u = ComplexField::from_fn(grid, |x, y| {
        Complex64::new(b0 * (1.0 + delta * (lambda * x).cos() * (mu * y).cos()), 0.0)
    });
    Ok(EnvelopeState::new(u, carrier, 0.0))
}
