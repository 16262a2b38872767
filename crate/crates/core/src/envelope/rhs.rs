//! Nonlinear parts `N(u)` of the envelope equations. Each term is a sum of
//! pairwise products of band-limited fields, formed on the padded grid.

use num_complex::Complex64;

use super::{CarrierParams, Variant};
use crate::spectral::{ComplexSpectrum, Grid2D, Multiplier, PaddedComplex};

#[derive(Clone, Debug)]
pub(crate) struct Ops {
    pub ddx: Multiplier,
    /// `d^2/dx^2 |D|^{-1}`
    pub t_op: Multiplier,
}

impl Ops {
    pub fn new(grid: &Grid2D) -> Self {
        Ops {
            ddx: Multiplier::ddx(grid),
            t_op: Multiplier::dxx_inv_abs_d(grid),
        }
    }
}

/// Coefficients of `N(u) = cubic |u|^2 u + adv |u|^2 u_x + conj_adv u^2 conj(u_x)
/// + mean u (d_x^2 |D|^{-1} |u|^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonlinearCoeffs {
    pub cubic: Complex64,
    pub adv: Complex64,
    pub conj_adv: Complex64,
    pub mean: Complex64,
}

pub fn nonlinear_coeffs(variant: Variant, c: &CarrierParams) -> NonlinearCoeffs {
    let (k0, w0, e) = (c.k0, c.omega0, c.epsilon);
    let r = |v: f64| Complex64::new(v, 0.0);
    let i = |v: f64| Complex64::new(0.0, v);
    match variant {
        Variant::ClassicalDysthe => NonlinearCoeffs {
            cubic: r(0.5 * w0 * k0 * k0),
            adv: i(-1.5 * w0 * k0),
            conj_adv: i(-0.25 * w0 * k0),
            mean: r(0.5 * w0 * k0),
        },
        Variant::Nls => NonlinearCoeffs {
            cubic: r(e * e * k0.powi(3)),
            adv: r(0.0),
            conj_adv: r(0.0),
            mean: r(0.0),
        },
        Variant::HamiltonianDysthe | Variant::ExactDispersion => NonlinearCoeffs {
            cubic: r(e * e * k0.powi(3)),
            adv: i(-3.0 * e.powi(3) * k0 * k0),
            conj_adv: r(0.0),
            mean: r(e.powi(3) * k0 * k0),
        },
    }
}

/// Padded `u`, and the spectrum and padded values of `|u|^2`.
pub(crate) struct Modulus {
    pub u: PaddedComplex,
    pub abs2: ComplexSpectrum,
    pub abs2_pad: PaddedComplex,
}

pub(crate) fn modulus(u: &ComplexSpectrum) -> Modulus {
    let up = u.to_padded();
    let abs2 = up.map(|z| Complex64::new(z.norm_sqr(), 0.0)).truncate();
    // |u|^2 is real; drop roundoff in the imaginary part
    let abs2_pad = abs2.to_padded().map(|z| Complex64::new(z.re, 0.0));
    Modulus {
        u: up,
        abs2,
        abs2_pad,
    }
}

pub(crate) fn nonlinear(
    ops: &Ops,
    variant: Variant,
    c: &CarrierParams,
    u: &ComplexSpectrum,
) -> ComplexSpectrum {
    let k = nonlinear_coeffs(variant, c);
    let m = modulus(u);
    if variant == Variant::Nls {
        return m.abs2_pad.mul(&m.u).truncate().scaled(k.cubic.re);
    }
    let ux = u.apply_unchecked(&ops.ddx).to_padded();
    let tpad = m
        .abs2
        .apply_unchecked(&ops.t_op)
        .to_padded()
        .map(|z| Complex64::new(z.re, 0.0));
    // u^2, needed only for the classical A^2 conj(A_x) term
    let sq = (k.conj_adv != Complex64::new(0.0, 0.0)).then(|| m.u.mul(&m.u).truncate().to_padded());
    let (us, ss, uxs, ts) = (
        m.u.as_slice(),
        m.abs2_pad.as_slice(),
        ux.as_slice(),
        tpad.as_slice(),
    );
    let mut p = Vec::with_capacity(us.len());
    for idx in 0..us.len() {
        let (uu, s, ux) = (us[idx], ss[idx], uxs[idx]);
        let mut v = s * (uu * k.cubic + ux * k.adv) + uu * ts[idx] * k.mean;
        if let Some(sq) = &sq {
            v += sq.as_slice()[idx] * ux.conj() * k.conj_adv;
        }
        p.push(v);
    }
    PaddedComplex::from_vec(u.grid(), p).truncate()
}
