//! Dirichlet-Neumann operator for infinite depth as a Taylor series in the
//! surface elevation.
//!
//! With `D = -i grad`, the terms satisfy
//!
//! ```text
//! G0 = |D|
//! Gm = |D|^{m-1} D.(eta^m/m! D) - sum_{j=1..m} |D|^j (eta^j/j!) G_{m-j}
//! ```
//!
//! which reproduces `G(eta) exp(i k.x + |k| eta) = (|k| - i k.grad eta) exp(i k.x + |k| eta)`
//! order by order in `eta`. Every product is dealiased by 3/2 padding.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{ComplexField, Grid2D, Multiplier, Padded, RealField, Spectrum};

/// Largest supported series order.
pub const MAX_ORDER: usize = 6;

/// Series truncation and gravity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DnoConfig {
    /// Number of terms beyond `G0`.
    pub order: usize,
    pub g: f64,
}

impl Default for DnoConfig {
    fn default() -> Self {
        DnoConfig { order: 4, g: 1.0 }
    }
}

impl DnoConfig {
    pub fn new(order: usize, g: f64) -> Result<Self> {
        let cfg = DnoConfig { order, g };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order > MAX_ORDER {
            return Err(Error::InvalidOrder {
                order: self.order as i64,
                max: MAX_ORDER,
            });
        }
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::InvalidArgument(format!("gravity {} must be positive", self.g)));
        }
        Ok(())
    }
}

/// Multipliers reused across evaluations on one grid.
#[derive(Clone, Debug)]
pub(crate) struct DnoOps {
    pub ddx: Multiplier,
    pub ddy: Multiplier,
    /// `|D|^j` for `j = 0..=MAX_ORDER`.
    pub abs_pow: Vec<Multiplier>,
}

impl DnoOps {
    pub fn new(grid: &Grid2D) -> Self {
        let abs_pow = (0..=MAX_ORDER)
            .map(|j| {
                Multiplier::from_real_symbol(grid, if j == 0 { 1.0 } else { 0.0 }, |kx, ky| {
                    kx.hypot(ky).powi(j as i32)
                })
            })
            .collect();
        DnoOps {
            ddx: Multiplier::ddx(grid),
            ddy: Multiplier::ddy(grid),
            abs_pow,
        }
    }

    /// Spectra of `G0 xi, ..., G_order xi`.
    pub fn terms(&self, eta: &Spectrum, xi: &Spectrum, order: usize) -> Vec<Spectrum> {
        self.series(eta, xi, order).terms
    }

    /// Series terms together with the padded intermediates callers reuse.
    pub fn series(&self, eta: &Spectrum, xi: &Spectrum, order: usize) -> Series {
        let xi_x = xi.apply_unchecked(&self.ddx).to_padded();
        let xi_y = xi.apply_unchecked(&self.ddy).to_padded();
        let eta_pad = eta.to_padded();
        let mut terms = Vec::with_capacity(order + 1);
        terms.push(xi.apply_unchecked(&self.abs_pow[1]));
        // padded eta^j / j!
        let mut pows: Vec<Padded> = Vec::with_capacity(order);
        if order > 0 {
            pows.push(eta_pad.clone());
        }
        for j in 2..=order {
            let next = pows[j - 2].mul(&eta_pad).truncate().scaled(1.0 / j as f64);
            pows.push(next.to_padded());
        }
        let mut v_pad = Vec::with_capacity(order);
        for m in 1..=order {
            v_pad.push(terms[m - 1].to_padded());
            let p = &pows[m - 1];
            let fx = p.mul(&xi_x).truncate().apply_unchecked(&self.ddx);
            let fy = p.mul(&xi_y).truncate().apply_unchecked(&self.ddy);
            let mut vm = fx.add(&fy).apply_unchecked(&self.abs_pow[m - 1]);
            vm.scale(-1.0);
            for j in 1..=m {
                let prod = pows[j - 1].mul(&v_pad[m - j]).truncate();
                vm.axpy(-1.0, &prod.apply_unchecked(&self.abs_pow[j]));
            }
            terms.push(vm);
        }
        Series {
            terms,
            xi_x,
            xi_y,
        }
    }
}

/// Output of [`DnoOps::series`].
pub(crate) struct Series {
    /// `G_m xi` for `m = 0..=order`.
    pub terms: Vec<Spectrum>,
    pub xi_x: Padded,
    pub xi_y: Padded,
}

fn check_order(m: i64, cfg: &DnoConfig) -> Result<usize> {
    cfg.validate()?;
    if m < 0 || m as usize > cfg.order {
        return Err(Error::InvalidOrder {
            order: m,
            max: cfg.order,
        });
    }
    Ok(m as usize)
}

/// `G^(m)(eta) xi`.
pub fn dno_term(m: i64, eta: &RealField, xi: &RealField, cfg: &DnoConfig) -> Result<RealField> {
    let m = check_order(m, cfg)?;
    eta.grid().check_same(xi.grid())?;
    let ops = DnoOps::new(eta.grid());
    let terms = ops.terms(&eta.spectrum(), &xi.spectrum(), m);
    Ok(terms[m].to_field())
}

/// `sum_{m=0..=M} G^(m)(eta) xi`.
pub fn dno_apply(eta: &RealField, xi: &RealField, cfg: &DnoConfig) -> Result<RealField> {
    cfg.validate()?;
    eta.grid().check_same(xi.grid())?;
    let ops = DnoOps::new(eta.grid());
    let terms = ops.terms(&eta.spectrum(), &xi.spectrum(), cfg.order);
    let mut total = terms[0].clone();
    for t in &terms[1..] {
        total.axpy(1.0, t);
    }
    Ok(total.to_field())
}

/// Exact pair `(xi, G(eta) xi)` for the trace of the harmonic function
/// `exp(i k.x + |k| z)` on the surface `z = eta`.
pub fn dno_exact_on_harmonic_trace(
    eta: &RealField,
    k: [f64; 2],
) -> Result<(ComplexField, ComplexField)> {
    let grid = eta.grid();
    if k[0] == 0.0 && k[1] == 0.0 {
        return Err(Error::InvalidArgument("wavenumber must be nonzero".into()));
    }
    Grid2D::lattice_multiple(k[0], grid.dkx())?;
    Grid2D::lattice_multiple(k[1], grid.dky())?;
    let kabs = k[0].hypot(k[1]);
    let spec = eta.spectrum();
    let ex = spec.apply(&Multiplier::ddx(grid))?.to_field();
    let ey = spec.apply(&Multiplier::ddy(grid))?.to_field();
    let mut xi = Vec::with_capacity(grid.len());
    let mut gxi = Vec::with_capacity(grid.len());
    for ix in 0..grid.nx() {
        let x = grid.x(ix);
        for iy in 0..grid.ny() {
            let y = grid.y(iy);
            let e = eta.at(ix, iy);
            let v = Complex64::new(kabs * e, k[0] * x + k[1] * y).exp();
            let slope = k[0] * ex.at(ix, iy) + k[1] * ey.at(ix, iy);
            xi.push(v);
            gxi.push(Complex64::new(kabs, -slope) * v);
        }
    }
    Ok((
        ComplexField::from_vec(grid, xi)?,
        ComplexField::from_vec(grid, gxi)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid2D {
        Grid2D::periodic_2pi(32, 16).unwrap()
    }

    fn max_diff(a: &RealField, b: &RealField) -> f64 {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn order_zero_is_abs_d() {
        let g = grid();
        let eta = RealField::from_fn(&g, |x, y| 0.1 * (x + y).cos());
        let xi = RealField::from_fn(&g, |x, _| x.cos());
        let cfg = DnoConfig::default();
        let r = dno_term(0, &eta, &xi, &cfg).unwrap();
        assert!(max_diff(&r, &xi) < 1e-14);
    }

    #[test]
    fn flat_surface_terms_vanish() {
        let g = grid();
        let eta = RealField::zeros(&g);
        let xi = RealField::from_fn(&g, |x, y| (x - 2.0 * y).sin());
        let cfg = DnoConfig::default();
        for m in 1..=4 {
            assert!(dno_term(m, &eta, &xi, &cfg).unwrap().max_abs() < 1e-15);
        }
        let s2 = RealField::from_fn(&g, |x, _| (2.0 * x).sin());
        let r = dno_apply(&eta, &s2, &cfg).unwrap();
        assert!(max_diff(&r, &s2.scaled(2.0)) < 1e-13);
    }

    #[test]
    fn rejects_out_of_range_order() {
        let g = grid();
        let f = RealField::zeros(&g);
        let cfg = DnoConfig::default();
        assert!(matches!(
            dno_term(5, &f, &f, &cfg),
            Err(Error::InvalidOrder { .. })
        ));
        assert!(dno_term(-1, &f, &f, &cfg).is_err());
        assert!(DnoConfig::new(7, 1.0).is_err());
    }

    #[test]
    fn second_term_matches_explicit_formula() {
        // G2 = -1/2 (|D|^2 eta^2 |D| + |D| eta^2 |D|^2 - 2 |D| eta |D| eta |D|)
        let g = grid();
        let eta = RealField::from_fn(&g, |x, y| 0.3 * x.cos() + 0.2 * (x + y).sin());
        let xi = RealField::from_fn(&g, |x, y| (2.0 * x).cos() + 0.5 * (x - y).sin());
        let d = Multiplier::abs_d(&g);
        let ap = |f: &RealField, m: &Multiplier| crate::spectral::apply_multiplier(f, m).unwrap();
        let mul = |a: &RealField, b: &RealField| crate::spectral::dealiased_product(a, b).unwrap();
        let d2 = d.compose(&d);
        let eta2 = mul(&eta, &eta);
        let t1 = ap(&mul(&eta2, &ap(&xi, &d)), &d2);
        let t2 = ap(&mul(&eta2, &ap(&xi, &d2)), &d);
        let inner = ap(&mul(&eta, &ap(&xi, &d)), &d);
        let t3 = ap(&mul(&eta, &inner), &d);
        let want = RealField::from_vec(
            &g,
            t1.as_slice()
                .iter()
                .zip(t2.as_slice())
                .zip(t3.as_slice())
                .map(|((a, b), c)| -0.5 * (a + b - 2.0 * c))
                .collect(),
        )
        .unwrap();
        let got = dno_term(2, &eta, &xi, &DnoConfig::default()).unwrap();
        assert!(max_diff(&got, &want) < 1e-12 * want.max_abs().max(1.0));
    }

    #[test]
    fn each_order_matches_harmonic_identity() {
        // eta = a h, trace xi(a) = Re exp(i k.x + |k| a h). Collecting powers
        // of a: sum_{m+n=N} G_m(h) xi_n with xi_n = Re(e^{ik.x} (|k| h)^n / n!)
        // must equal Re(e^{ik.x} [|k| (|k|h)^N/N! - i k.grad h (|k|h)^{N-1}/(N-1)!]).
        let g = grid();
        let k = [1.0, 1.0];
        let kabs = 2f64.sqrt();
        let h = RealField::from_fn(&g, |x, y| 0.7 * x.cos() + 0.4 * (x - y).sin());
        let hx = RealField::from_fn(&g, |x, y| -0.7 * x.sin() + 0.4 * (x - y).cos());
        let hy = RealField::from_fn(&g, |x, y| -0.4 * (x - y).cos());
        let fact = |n: usize| (1..=n).map(|v| v as f64).product::<f64>();
        let xi_n = |n: usize| {
            RealField::from_fn(&g, |x, y| {
                let e = Complex64::new(0.0, k[0] * x + k[1] * y).exp();
                let hv = 0.7 * x.cos() + 0.4 * (x - y).sin();
                (e * (kabs * hv).powi(n as i32) / fact(n)).re
            })
        };
        let cfg = DnoConfig::new(MAX_ORDER, 1.0).unwrap();
        for nn in 1..=5usize {
            let mut lhs = RealField::zeros(&g);
            let mut scale: f64 = 0.0;
            for m in 0..=nn {
                let t = dno_term(m as i64, &h, &xi_n(nn - m), &cfg).unwrap();
                scale = scale.max(t.max_abs());
                lhs = lhs.zip_map(&t, |a, b| a + b).unwrap();
            }
            let rhs = RealField::from_fn(&g, |x, y| {
                let ix = (x / g.dx()).round() as usize;
                let iy = (y / g.dy()).round() as usize;
                let e = Complex64::new(0.0, k[0] * x + k[1] * y).exp();
                let hv = h.at(ix, iy);
                let slope = k[0] * hx.at(ix, iy) + k[1] * hy.at(ix, iy);
                let a = kabs * (kabs * hv).powi(nn as i32) / fact(nn);
                let b = (kabs * hv).powi(nn as i32 - 1) / fact(nn - 1);
                (e * Complex64::new(a, -slope * b)).re
            });
            // roundoff in the terms is amplified by up to |k_max|^N
            let err = max_diff(&lhs, &rhs) / scale;
            let tol = 1e-15 * (g.nx() as f64 / 2.0).powi(nn as i32);
            assert!(err < tol, "order {nn}: {err:e}");
        }
    }

    #[test]
    fn exact_oracle_flat_surface() {
        let g = grid();
        let (xi, gxi) = dno_exact_on_harmonic_trace(&RealField::zeros(&g), [1.0, 0.0]).unwrap();
        for (a, b) in xi.as_slice().iter().zip(gxi.as_slice()) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!(dno_exact_on_harmonic_trace(&RealField::zeros(&g), [0.0, 0.0]).is_err());
        assert!(dno_exact_on_harmonic_trace(&RealField::zeros(&g), [0.5, 0.0]).is_err());
    }
}
