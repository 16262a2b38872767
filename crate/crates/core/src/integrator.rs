//! Fourth-order Runge-Kutta steppers, plain and with an integrating factor.

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::{ComplexSpectrum, Spectrum};

/// Vector-space operations needed by the steppers.
pub trait StateVector: Clone {
    /// `self += a * x`
    fn axpy(&mut self, a: f64, x: &Self);
}

impl StateVector for Spectrum {
    fn axpy(&mut self, a: f64, x: &Self) {
        Spectrum::axpy(self, a, x)
    }
}

impl StateVector for ComplexSpectrum {
    fn axpy(&mut self, a: f64, x: &Self) {
        ComplexSpectrum::axpy(self, Complex64::new(a, 0.0), x)
    }
}

impl<A: StateVector, B: StateVector> StateVector for (A, B) {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.0.axpy(a, &x.0);
        self.1.axpy(a, &x.1);
    }
}

fn lin<S: StateVector>(base: &S, a: f64, x: &S) -> S {
    let mut out = base.clone();
    out.axpy(a, x);
    out
}

/// One step of the integrating-factor (Lawson) RK4 scheme for
/// `w' = L w + N(w)`, where `prop(v, tau)` returns `exp(tau L) v` and
/// `nonlinear(v)` returns `N(v)`.
pub fn lawson_rk4<S, P, F>(w: &S, h: f64, prop: P, mut nonlinear: F) -> Result<S>
where
    S: StateVector,
    P: Fn(&S, f64) -> S,
    F: FnMut(&S) -> Result<S>,
{
    let half = 0.5 * h;
    let k1 = nonlinear(w)?;
    let w_half = prop(w, half);
    let k2 = nonlinear(&prop(&lin(w, half, &k1), half))?;
    let k3 = nonlinear(&lin(&w_half, half, &k2))?;
    let w_full = prop(&w_half, half);
    let k4 = nonlinear(&lin(&w_full, h, &prop(&k3, half)))?;
    let mut k23 = k2;
    k23.axpy(1.0, &k3);
    let mut out = w_full;
    out.axpy(h / 6.0, &prop(&k1, h));
    out.axpy(h / 3.0, &prop(&k23, half));
    out.axpy(h / 6.0, &k4);
    Ok(out)
}

/// One classical RK4 step for `w' = f(w)`.
pub fn rk4<S, F>(w: &S, h: f64, mut f: F) -> Result<S>
where
    S: StateVector,
    F: FnMut(&S) -> Result<S>,
{
    let k1 = f(w)?;
    let k2 = f(&lin(w, 0.5 * h, &k1))?;
    let k3 = f(&lin(w, 0.5 * h, &k2))?;
    let k4 = f(&lin(w, h, &k3))?;
    let mut out = w.clone();
    out.axpy(h / 6.0, &k1);
    out.axpy(h / 3.0, &k2);
    out.axpy(h / 3.0, &k3);
    out.axpy(h / 6.0, &k4);
    Ok(out)
}
