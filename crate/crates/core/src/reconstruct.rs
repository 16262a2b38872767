//! Maps from envelopes to physical surfaces: the linear change to complex
//! symplectic coordinates, the Hilbert-transformed Burgers flow of the
//! normal-form transformation, and the Stokes expansion used with the
//! classical envelope.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::envelope::{CarrierParams, EnvelopeState};
use crate::error::{Error, Result};
use crate::euler3d::SurfaceState;
use crate::integrator::rk4;
use crate::spectral::{
    apply_multiplier, apply_multiplier_complex, ComplexSpectrum, Grid2D, Multiplier,
    RealField, Spectrum,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Hilbert-transformed pair at flow parameter `s`.
#[derive(Clone, Debug)]
pub struct TildePair {
    pub eta: RealField,
    pub xi: RealField,
    pub s: f64,
}

fn weight(grid: &Grid2D, jx: i64, jy: i64, g: f64) -> f64 {
    let k = (jx as f64 * grid.dkx()).hypot(jy as f64 * grid.dky());
    (g / k).powf(0.25)
}

/// Signed index ranges of a full spectrum.
fn lattice(grid: &Grid2D) -> impl Iterator<Item = (i64, i64)> {
    let (nx, ny) = (grid.nx() as i64, grid.ny() as i64);
    (-ny / 2..ny / 2).flat_map(move |jy| (-nx / 2..nx / 2).map(move |jx| (jx, jy)))
}

fn in_range(j: i64, n: usize) -> bool {
    let h = n as i64 / 2;
    (-h..h).contains(&j)
}

/// Spectrum of `z = u exp(i k0 x)`. Content shifted past the lattice edge is
/// dropped rather than wrapped.
pub fn modal_spectrum(u: &EnvelopeState) -> Result<ComplexSpectrum> {
    let grid = u.grid();
    let j0 = u.carrier.lattice_index(grid)?;
    let us = u.u.spectrum();
    let mut z = ComplexSpectrum::zeros(grid);
    for (jx, jy) in lattice(grid) {
        if in_range(jx - j0, grid.nx()) {
            z.set_coeff(jx, jy, us.coeff(jx - j0, jy));
        }
    }
    Ok(z)
}

/// Inverse of [`modal_spectrum`].
pub fn envelope_from_modal(z: &ComplexSpectrum, carrier: CarrierParams, t: f64) -> Result<EnvelopeState> {
    let grid = z.grid();
    let j0 = carrier.lattice_index(grid)?;
    let mut us = ComplexSpectrum::zeros(grid);
    for (jx, jy) in lattice(grid) {
        if in_range(jx + j0, grid.nx()) {
            us.set_coeff(jx, jy, z.coeff(jx + j0, jy));
        }
    }
    Ok(EnvelopeState::new(us.to_field(), carrier, t))
}

/// `eta_k = (z_k + conj(z_-k)) / (sqrt2 a_k)`, `xi_k = a_k (z_k - conj(z_-k)) / (i sqrt2)`,
/// with both zero modes set to 0.
pub fn surface_from_modal(z: &ComplexSpectrum, g: f64, t: f64) -> SurfaceState {
    let grid = z.grid();
    let mut eta = Spectrum::zeros(grid);
    let mut xi = Spectrum::zeros(grid);
    let ny = grid.ny() as i64;
    for jy in 0..=ny / 2 {
        for jx in -(grid.nx() as i64) / 2..grid.nx() as i64 / 2 {
            if jx == 0 && jy == 0 {
                continue;
            }
            let a = weight(grid, jx, jy, g);
            let (zk, zm) = (z.coeff(jx, jy), z.coeff(-jx, -jy).conj());
            eta.set_coeff(jx, jy, (zk + zm) / (SQRT_2 * a));
            xi.set_coeff(jx, jy, a * (zk - zm) / (I * SQRT_2));
        }
    }
    SurfaceState {
        eta: eta.to_field(),
        xi: xi.to_field(),
        t,
    }
}

/// `z_k = (a_k eta_k + i xi_k / a_k) / sqrt2`, zero mode 0.
pub fn modal_from_surface(s: &SurfaceState, g: f64) -> ComplexSpectrum {
    let grid = s.grid();
    let eta = s.eta.spectrum();
    let xi = s.xi.spectrum();
    let mut z = ComplexSpectrum::zeros(grid);
    for (jx, jy) in lattice(grid) {
        if jx == 0 && jy == 0 {
            continue;
        }
        let a = weight(grid, jx, jy, g);
        z.set_coeff(jx, jy, (a * eta.coeff(jx, jy) + I * xi.coeff(jx, jy) / a) / SQRT_2);
    }
    z
}

/// Surface variables of an envelope through the linear symplectic map.
pub fn envelope_to_surface_linear(u: &EnvelopeState) -> Result<SurfaceState> {
    Ok(surface_from_modal(&modal_spectrum(u)?, u.carrier.g, u.t))
}

/// Envelope of a surface through the linear symplectic map.
pub fn surface_to_envelope_linear(s: &SurfaceState, carrier: CarrierParams) -> Result<EnvelopeState> {
    envelope_from_modal(&modal_from_surface(s, carrier.g), carrier, s.t)
}

/// `(-i sgn(Dx) eta, -i sgn(Dx) xi)` at `s = 0`.
pub fn tilde(p: &SurfaceState) -> Result<TildePair> {
    let h = Multiplier::hilbert_x(p.grid());
    Ok(TildePair {
        eta: apply_multiplier(&p.eta, &h)?,
        xi: apply_multiplier(&p.xi, &h)?,
        s: 0.0,
    })
}

/// Inverse of [`tilde`] on `kx != 0` content.
pub fn untilde(tp: &TildePair, t: f64) -> Result<SurfaceState> {
    let h = Multiplier::inv_hilbert_x(tp.eta.grid());
    SurfaceState::new(apply_multiplier(&tp.eta, &h)?, apply_multiplier(&tp.xi, &h)?, t)
}

/// `eta_s = -eta eta_x`, `xi_s = -eta xi_x` in spectral form, with the
/// Burgers term in conservation form.
fn burgers_rhs(ddx: &Multiplier, w: &(Spectrum, Spectrum)) -> (Spectrum, Spectrum) {
    let (eta, xi) = w;
    let ep = eta.to_padded();
    let half_sq = ep.map(|v| -0.5 * v * v).truncate().apply_unchecked(ddx);
    let xi_x = xi.apply_unchecked(ddx).to_padded();
    let adv = ep.zip_map(&xi_x, |a, b| -a * b).truncate();
    (half_sq, adv)
}

/// Integrate the Burgers system from `s_from` to `s_to` with RK4 steps of
/// size at most `ds`.
///
/// Fails with [`Error::ShockFormation`] when characteristics of the initial
/// `eta` cross within the interval, i.e. when `1 + (s_to - s_from) eta_x`
/// is not positive everywhere.
pub fn burgers_flow(tp: &TildePair, s_from: f64, s_to: f64, ds: f64) -> Result<TildePair> {
    if !(ds.is_finite() && ds > 0.0) {
        return Err(Error::InvalidArgument(format!("ds = {ds} must be positive")));
    }
    tp.eta.grid().check_same(tp.xi.grid())?;
    let grid = tp.eta.grid();
    let ddx = Multiplier::ddx(grid);
    let span = s_to - s_from;
    let eta_x = apply_multiplier(&tp.eta, &ddx)?;
    if eta_x.as_slice().iter().any(|&v| 1.0 + span * v <= 0.0) {
        return Err(Error::ShockFormation {
            from: s_from,
            to: s_to,
        });
    }
    let n = (span.abs() / ds).ceil().max(1.0) as usize;
    let h = span / n as f64;
    let mut w = (tp.eta.spectrum(), tp.xi.spectrum());
    for _ in 0..n {
        w = rk4(&w, h, |v| Ok(burgers_rhs(&ddx, v)))?;
        if !(w.0.is_finite() && w.1.is_finite()) {
            return Err(Error::ShockFormation {
                from: s_from,
                to: s_to,
            });
        }
    }
    Ok(TildePair {
        eta: w.0.to_field(),
        xi: w.1.to_field(),
        s: s_to,
    })
}

/// Default Burgers step, matching the default time step of the solvers.
pub const DEFAULT_DS: f64 = 0.005;

/// Surface from a Hamiltonian-Dysthe envelope: linear map, Hilbert
/// transform, Burgers flow from `s = 0` to `s = -1`, inverse transform.
pub fn reconstruct_hamiltonian(u: &EnvelopeState) -> Result<SurfaceState> {
    reconstruct_hamiltonian_with_step(u, DEFAULT_DS)
}

pub fn reconstruct_hamiltonian_with_step(u: &EnvelopeState, ds: f64) -> Result<SurfaceState> {
    let lin = envelope_to_surface_linear(u)?;
    let flowed = burgers_flow(&tilde(&lin)?, 0.0, -1.0, ds)?;
    untilde(&flowed, u.t)
}

/// Classical envelope amplitude `A = (4 k0 / g)^{1/4} u` matching a
/// Hamiltonian envelope at leading order.
pub fn classical_from_hamiltonian(u: &EnvelopeState) -> EnvelopeState {
    let c = u.carrier;
    let f = (4.0 * c.k0 / c.g).powf(0.25);
    EnvelopeState::new(u.u.map(|z| z * f), c, u.t)
}

/// Surface from a classical-Dysthe envelope through the Stokes expansion,
/// with phase `theta = k0 x - omega0 t` and `xi(x) = phi(x, eta(x))`.
pub fn reconstruct_classical(a: &EnvelopeState) -> Result<SurfaceState> {
    let grid = a.grid();
    let c = &a.carrier;
    let (k0, w0) = (c.k0, c.omega0);
    let spec = a.u.spectrum();
    let ax = spec.apply(&Multiplier::ddx(grid))?;
    let axx = ax.apply(&Multiplier::ddx(grid))?.to_field();
    let ayy = spec
        .apply(&Multiplier::ddy(grid))?
        .apply(&Multiplier::ddy(grid))?
        .to_field();
    let ax = ax.to_field();
    let abs2 = a.u.map(|z| Complex64::new(z.norm_sqr(), 0.0));
    let phi_mean = apply_multiplier_complex(&abs2, &Multiplier::dx_inv_abs_d(grid))?.re().scaled(0.5 * w0);
    let phi_mean_x = apply_multiplier_complex(&abs2, &Multiplier::dxx_inv_abs_d(grid))?
        .re()
        .scaled(0.5 * w0);

    let n = grid.len();
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut eta = vec![0.0; n];
    let mut xi = vec![0.0; n];
    let au = a.u.as_slice();
    for ix in 0..nx {
        let theta = k0 * grid.x(ix) - w0 * a.t;
        let e1 = Complex64::from_polar(1.0, theta);
        for iy in 0..ny {
            let i = ix * ny + iy;
            let (v, vx) = (au[i], ax.as_slice()[i]);
            let h = v * e1 + 0.5 * (k0 * v * v - I * v * vx) * e1 * e1 + 0.375 * k0 * k0 * v * v * v * e1 * e1 * e1;
            let el = phi_mean_x.as_slice()[i] / (2.0 * w0) + h.re;
            let amp = -I * w0 / k0 * v + w0 / (2.0 * k0 * k0) * vx
                + 3.0 * I * w0 / (8.0 * k0.powi(3)) * axx.as_slice()[i]
                - I * w0 / (4.0 * k0.powi(3)) * ayy.as_slice()[i]
                + I / 8.0 * w0 * k0 * v.norm_sqr() * v;
            eta[i] = el;
            xi[i] = phi_mean.as_slice()[i] + (amp * e1).re * (k0 * el).exp();
        }
    }
    SurfaceState::new(RealField::from_vec(grid, eta)?, RealField::from_vec(grid, xi)?, a.t)
}

/// Leading-order check helper: complex amplitude of the `exp(i k0 x)`
/// harmonic of `eta`, averaged over `y`.
pub fn carrier_amplitude(eta: &RealField, k0: f64) -> Result<Complex64> {
    let grid = eta.grid();
    let j0 = Grid2D::lattice_multiple(k0, grid.dkx())?;
    Ok(2.0 * eta.spectrum().coeff(j0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::perturbed_stokes;
    use crate::spectral::ComplexField;

    fn grid() -> Grid2D {
        Grid2D::periodic_2pi(128, 16).unwrap()
    }

    fn carrier() -> CarrierParams {
        CarrierParams::new(10.0, 1.0).unwrap()
    }

    fn uniform(b0: f64) -> EnvelopeState {
        let g = grid();
        EnvelopeState::new(
            ComplexField::from_fn(&g, |_, _| Complex64::new(b0, 0.0)),
            carrier(),
            0.0,
        )
    }

    #[test]
    fn uniform_envelope_gives_linear_wave() {
        let b0 = 0.003;
        let s = envelope_to_surface_linear(&uniform(b0)).unwrap();
        let a0 = SQRT_2 * 10f64.powf(0.25) * b0;
        assert!((a0 - 0.0075446).abs() < 1e-7);
        let g = s.grid().clone();
        let eta = RealField::from_fn(&g, |x, _| a0 * (10.0 * x).cos());
        let xi = RealField::from_fn(&g, |x, _| a0 * 10f64.sqrt() / 10.0 * (10.0 * x).sin());
        for (a, b) in s.eta.as_slice().iter().zip(eta.as_slice()) {
            assert!((a - b).abs() < 1e-15);
        }
        for (a, b) in s.xi.as_slice().iter().zip(xi.as_slice()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_envelope_zero_surface() {
        let s = envelope_to_surface_linear(&uniform(0.0)).unwrap();
        assert_eq!(s.eta.max_abs(), 0.0);
        let s = reconstruct_hamiltonian(&uniform(0.0)).unwrap();
        assert_eq!(s.eta.max_abs() + s.xi.max_abs(), 0.0);
        let s = reconstruct_classical(&uniform(0.0)).unwrap();
        assert_eq!(s.eta.max_abs() + s.xi.max_abs(), 0.0);
    }

    #[test]
    fn linear_map_round_trip() {
        let g = grid();
        let u = ComplexField::from_fn(&g, |x, y| {
            Complex64::new(0.01 * (1.0 + 0.3 * (2.0 * x).cos() * y.sin()), 0.004 * (x + 2.0 * y).sin())
        });
        let e = EnvelopeState::new(u, carrier(), 0.0);
        let back = surface_to_envelope_linear(&envelope_to_surface_linear(&e).unwrap(), carrier()).unwrap();
        for (a, b) in back.u.as_slice().iter().zip(e.u.as_slice()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn surface_round_trip_off_zero_mode() {
        let g = grid();
        let eta = RealField::from_fn(&g, |x, y| 0.1 + (3.0 * x).cos() * (2.0 * y).sin() + 0.2 * (5.0 * x - y).sin());
        let xi = RealField::from_fn(&g, |x, y| (x + y).cos() - 0.3 * (7.0 * x).sin());
        let s = SurfaceState::new(eta.clone(), xi.clone(), 0.0).unwrap();
        let back = surface_from_modal(&modal_from_surface(&s, 1.0), 1.0, 0.0);
        let mean = eta.mean();
        for (a, b) in back.eta.as_slice().iter().zip(eta.as_slice()) {
            assert!((a - (b - mean)).abs() < 1e-13);
        }
        for (a, b) in back.xi.as_slice().iter().zip(xi.as_slice()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn tilde_examples() {
        let g = grid();
        let s = SurfaceState::new(
            RealField::from_fn(&g, |x, _| x.cos()),
            RealField::from_fn(&g, |_, y| y.cos()),
            0.0,
        )
        .unwrap();
        let tp = tilde(&s).unwrap();
        for (ix, v) in tp.eta.as_slice().chunks(g.ny()).enumerate() {
            assert!((v[0] - g.x(ix).sin()).abs() < 1e-14);
        }
        assert!(tp.xi.max_abs() < 1e-15);
        let back = untilde(&tp, 0.0).unwrap();
        for (a, b) in back.eta.as_slice().iter().zip(s.eta.as_slice()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn burgers_constant_is_fixed() {
        let g = grid();
        let tp = TildePair {
            eta: RealField::from_fn(&g, |_, y| 0.01 * y.cos()),
            xi: RealField::from_fn(&g, |_, y| 0.01 * y.sin()),
            s: 0.0,
        };
        let out = burgers_flow(&tp, 0.0, -1.0, 0.01).unwrap();
        for (a, b) in out.eta.as_slice().iter().zip(tp.eta.as_slice()) {
            assert!((a - b).abs() < 1e-16);
        }
        for (a, b) in out.xi.as_slice().iter().zip(tp.xi.as_slice()) {
            assert!((a - b).abs() < 1e-16);
        }
    }

    #[test]
    fn burgers_second_harmonic() {
        let g = grid();
        let a = 1e-2;
        let tp = TildePair {
            eta: RealField::from_fn(&g, |x, _| a * x.sin()),
            xi: RealField::zeros(&g),
            s: 0.0,
        };
        let out = burgers_flow(&tp, 0.0, 1.0, 0.01).unwrap();
        // eta = a sin x - (s a^2 / 2) sin 2x + O(a^3)
        let c2 = out.eta.spectrum().coeff(2, 0);
        let amp = 2.0 * c2.im;
        assert!((amp - 0.5 * a * a).abs() < 0.5 * a * a * 5.0 * a, "{amp}");
    }

    #[test]
    fn burgers_round_trip_and_mean() {
        let g = grid();
        let tp = TildePair {
            eta: RealField::from_fn(&g, |x, y| 0.0075 * (10.0 * x).sin() * (1.0 + 0.1 * x.cos() * y.cos())),
            xi: RealField::from_fn(&g, |x, _| -0.0024 * (10.0 * x).cos()),
            s: 0.0,
        };
        let fwd = burgers_flow(&tp, 0.0, -1.0, 0.005).unwrap();
        assert!((fwd.eta.integral() - tp.eta.integral()).abs() < 1e-14);
        let back = burgers_flow(&fwd, -1.0, 0.0, 0.005).unwrap();
        for (a, b) in back.eta.as_slice().iter().zip(tp.eta.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in back.xi.as_slice().iter().zip(tp.xi.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn burgers_detects_shock() {
        let g = grid();
        let tp = TildePair {
            eta: RealField::from_fn(&g, |x, _| 2.0 * x.sin()),
            xi: RealField::zeros(&g),
            s: 0.0,
        };
        assert!(matches!(
            burgers_flow(&tp, 0.0, 1.0, 0.01),
            Err(Error::ShockFormation { .. })
        ));
    }

    #[test]
    fn hamiltonian_reconstruction_carrier_amplitude() {
        let s = reconstruct_hamiltonian(&uniform(0.003)).unwrap();
        let amp = carrier_amplitude(&s.eta, 10.0).unwrap().norm();
        let a0 = (40f64).powf(0.25) * 0.003;
        assert!((amp / a0 - 1.0).abs() < 0.01);
        assert!(s.eta.is_finite() && s.xi.is_finite());
    }

    #[test]
    fn classical_stokes_harmonics() {
        let a0 = 0.0075;
        let s = reconstruct_classical(&uniform(a0)).unwrap();
        let sp = s.eta.spectrum();
        assert!((2.0 * sp.coeff(10, 0).re - a0).abs() < 1e-15);
        let h2 = 2.0 * sp.coeff(20, 0).re;
        assert!((h2 - 2.8125e-4).abs() < 1e-15);
        let h3 = 2.0 * sp.coeff(30, 0).re;
        assert!((h3 - 0.375 * 100.0 * a0.powi(3)).abs() < 1e-16);
        assert!((h3 - 1.582e-5).abs() < 1e-8);
    }

    #[test]
    fn classical_mean_flow_term() {
        let g = grid();
        let c = carrier();
        let e = perturbed_stokes(0.0075, 1.0, 0.0, 0.1, &g, c).unwrap();
        let s = reconstruct_classical(&e).unwrap();
        // the kx = 1, ky = 0 mode of eta comes only from dx Phi / (2 w0)
        // = (1/4) dx^2 |D|^{-1} |A|^2, |A|^2 = A0^2 (1 + 0.2 cos x + ...)
        let c1 = 2.0 * s.eta.spectrum().coeff(1, 0).re;
        let pred = -0.25 * 0.0075f64.powi(2) * 0.2;
        assert!((c1 - pred).abs() < 1e-15, "{c1} {pred}");
    }

    #[test]
    fn routes_agree_at_small_amplitude() {
        // carrier harmonic of both routes from a uniform envelope; the
        // relative difference is O(B0^2)
        let c = carrier();
        let mut diffs = Vec::new();
        let b0s = [1e-3, 2e-3, 4e-3];
        for &b0 in &b0s {
            let u = uniform(b0);
            let h = reconstruct_hamiltonian(&u).unwrap();
            let k = reconstruct_classical(&classical_from_hamiltonian(&u)).unwrap();
            let ah = carrier_amplitude(&h.eta, c.k0).unwrap();
            let ak = carrier_amplitude(&k.eta, c.k0).unwrap();
            diffs.push((ah - ak).norm() / ak.norm());
        }
        let slope = crate::fit::loglog_slope(&b0s, &diffs).unwrap();
        assert!((slope - 2.0).abs() < 0.2, "{slope} {diffs:?}");
    }
}
