//! Conserved quantities of the Hamiltonian envelope flow, evaluated with
//! spectral derivatives and the periodic trapezoidal rule.

use super::EnvelopeState;
use crate::error::Result;
use crate::spectral::{apply_multiplier, ComplexField, Multiplier, RealField};

fn sum(values: impl Iterator<Item = f64>, f: &ComplexField) -> f64 {
    values.sum::<f64>() * f.grid().cell_area()
}

fn im_conj_prod(a: &ComplexField, b: &ComplexField) -> Vec<f64> {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x.conj() * y).im)
        .collect()
}

/// Reduced Hamiltonian
/// ```text
/// H = int w0|u|^2 + e w0/(2k0) Im(conj(u) u_X) - e^2 w0/(8k0^2)|u_X|^2 + e^2 w0/(4k0^2)|u_Y|^2
///       + e^2 k0^3/2 |u|^4 + e^3 w0/(16k0^3) Im(conj(u_X) u_XX) - e^3 3w0/(8k0^3) Im(conj(u_X) u_YY)
///       + e^3 3k0^2/2 |u|^2 Im(conj(u) u_X) + e^3 k0^2/2 |u|^2 T|u|^2,   T = d_X^2 |D|^{-1}
/// ```
pub fn hamiltonian_envelope(s: &EnvelopeState) -> Result<f64> {
    let g = s.grid();
    let c = &s.carrier;
    let (k0, w0, e) = (c.k0, c.omega0, c.epsilon);
    let spec = s.u.spectrum();
    let dx = Multiplier::ddx(g);
    let dy = Multiplier::ddy(g);
    let ux_s = spec.apply(&dx)?;
    let u = &s.u;
    let ux = ux_s.to_field();
    let uy = spec.apply(&dy)?.to_field();
    let uxx = ux_s.apply(&dx)?.to_field();
    let uyy = spec.apply(&dy)?.apply(&dy)?.to_field();
    let abs2 = RealField::from_vec(g, u.as_slice().iter().map(|z| z.norm_sqr()).collect())?;
    let t_abs2 = apply_multiplier(&abs2, &Multiplier::dxx_inv_abs_d(g))?;
    let im_u_ux = im_conj_prod(u, &ux);
    let im_ux_uxx = im_conj_prod(&ux, &uxx);
    let im_ux_uyy = im_conj_prod(&ux, &uyy);
    let n = u.as_slice().len();
    let a = abs2.as_slice();
    let mut density = 0.0;
    for i in 0..n {
        density += w0 * a[i]
            + e * w0 / (2.0 * k0) * im_u_ux[i]
            - e * e * w0 / (8.0 * k0 * k0) * ux.as_slice()[i].norm_sqr()
            + e * e * w0 / (4.0 * k0 * k0) * uy.as_slice()[i].norm_sqr()
            + e * e * k0.powi(3) / 2.0 * a[i] * a[i]
            + e.powi(3) * w0 / (16.0 * k0.powi(3)) * im_ux_uxx[i]
            - e.powi(3) * 3.0 * w0 / (8.0 * k0.powi(3)) * im_ux_uyy[i]
            + e.powi(3) * 1.5 * k0 * k0 * a[i] * im_u_ux[i]
            + e.powi(3) * 0.5 * k0 * k0 * a[i] * t_abs2.as_slice()[i];
    }
    Ok(density * g.cell_area())
}

/// `M = int |u|^2`.
pub fn wave_action(s: &EnvelopeState) -> f64 {
    sum(s.u.as_slice().iter().map(|z| z.norm_sqr()), &s.u)
}

/// `I = int (k0 |u|^2 + e Im(conj(u) u_X), e Im(conj(u) u_Y))`.
pub fn impulse(s: &EnvelopeState) -> Result<[f64; 2]> {
    let g = s.grid();
    let spec = s.u.spectrum();
    let ux = spec.apply(&Multiplier::ddx(g))?.to_field();
    let uy = spec.apply(&Multiplier::ddy(g))?.to_field();
    let e = s.carrier.epsilon;
    let ix = s.carrier.k0 * wave_action(s) + e * sum(im_conj_prod(&s.u, &ux).into_iter(), &s.u);
    let iy = e * sum(im_conj_prod(&s.u, &uy).into_iter(), &s.u);
    Ok([ix, iy])
}

/// `H - (w0/(2k0)) I_x - (w0 - k0 w0/(2k0)) M`, the energy in the frame moving
/// with the group velocity.
pub fn hamiltonian_moving_frame(s: &EnvelopeState) -> Result<f64> {
    let c = &s.carrier;
    let cg = c.group_velocity();
    Ok(hamiltonian_envelope(s)? - cg * impulse(s)?[0] - (c.omega0 - c.k0 * cg) * wave_action(s))
}
