//! Modulational (Benjamin-Feir) stability of uniform wavetrains.

use std::io::Write;

use num_complex::Complex64;

use crate::envelope::{linear_symbol, nonlinear_coeffs, CarrierParams, EnvelopeModel, Variant};
use crate::error::{Error, Result};

/// A perturbation `(lambda, mu)` of the uniform envelope `B0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityQuery {
    pub b0: f64,
    pub k0: f64,
    pub g: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl StabilityQuery {
    pub fn new(b0: f64, k0: f64, g: f64, lambda: f64, mu: f64) -> Self {
        StabilityQuery {
            b0,
            k0,
            g,
            epsilon: 1.0,
            lambda,
            mu,
        }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        StabilityQuery { epsilon, ..self }
    }

    pub fn at(self, lambda: f64, mu: f64) -> Self {
        StabilityQuery { lambda, mu, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.b0 > 0.0 && self.b0.is_finite()) {
            return Err(Error::InvalidArgument(format!("B0 = {} must be positive", self.b0)));
        }
        if !(self.k0 > 0.0 && self.k0.is_finite() && self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::InvalidArgument("k0 and g must be positive".into()));
        }
        if !(self.lambda.is_finite() && self.mu.is_finite() && self.epsilon.is_finite()) {
            return Err(Error::InvalidArgument("non-finite stability query".into()));
        }
        Ok(())
    }

    fn omega0(&self) -> f64 {
        (self.g * self.k0).sqrt()
    }
}

/// The instability discriminant; positive means unstable.
pub fn bf_discriminant(q: &StabilityQuery) -> Result<f64> {
    q.validate()?;
    if q.lambda == 0.0 && q.mu == 0.0 {
        return Err(Error::OriginQuery);
    }
    let (k0, b2) = (q.k0, q.b0 * q.b0);
    let x = q.lambda * q.lambda / 2.0 - q.mu * q.mu;
    let mean = q.epsilon * q.lambda * q.lambda / q.lambda.hypot(q.mu);
    let bracket = 2.0 * k0 * k0 * b2 * (k0 - mean) - q.omega0() / (4.0 * k0 * k0) * x;
    Ok(x * bracket)
}

pub fn bf_condition(q: &StabilityQuery) -> Result<bool> {
    Ok(bf_discriminant(q)? > 0.0)
}

/// Positive root of the `mu = 0` bracket,
/// `(w0/8k0^2) l^2 + 2 e k0^2 B0^2 l - 2 k0^3 B0^2 = 0`.
pub fn band_edge_mu0(q: &StabilityQuery) -> Result<f64> {
    q.validate()?;
    let k0 = q.k0;
    let b2 = q.b0 * q.b0;
    let a = q.omega0() / (8.0 * k0 * k0);
    let b = 2.0 * q.epsilon * k0 * k0 * b2;
    let c = -2.0 * k0.powi(3) * b2;
    // c < 0 < a, so the roots have opposite signs; stable form of the positive one
    Ok(2.0 * c / (-b - (b * b - 4.0 * a * c).sqrt()))
}

/// Open intervals of unstable `lambda > 0` at the query's `mu`.
pub fn band_edges(q: &StabilityQuery) -> Result<Vec<(f64, f64)>> {
    q.validate()?;
    if q.mu == 0.0 {
        return Ok(vec![(0.0, band_edge_mu0(q)?)]);
    }
    let k0 = q.k0;
    let growth_cap = 8.0 * k0.powi(5) * q.b0 * q.b0 / q.omega0();
    let hi = (2.0 * (q.mu * q.mu + growth_cap)).sqrt() * (1.0 + q.epsilon.abs()) + 1.0;
    let n = 4000;
    let f = |l: f64| bf_discriminant(&q.at(l, q.mu)).map(|d| d > 0.0);
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    let mut prev_l = 0.0;
    let mut prev = f(0.0)?;
    if prev {
        start = Some(0.0);
    }
    for i in 1..=n {
        let l = hi * i as f64 / n as f64;
        let cur = f(l)?;
        if cur != prev {
            let (mut a, mut b) = (prev_l, l);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if f(m)? == prev {
                    a = m;
                } else {
                    b = m;
                }
            }
            let edge = 0.5 * (a + b);
            if cur {
                start = Some(edge);
            } else if let Some(s) = start.take() {
                out.push((s, edge));
            }
        }
        prev = cur;
        prev_l = l;
    }
    if let Some(s) = start {
        out.push((s, hi));
    }
    Ok(out)
}

/// Largest real part of the growth exponents of the sideband pair
/// `e^{+-i(lambda X + mu Y)}` for the linearization of `variant` about the
/// uniform solution, in the frame rotating with it.
pub fn growth_rate_eig(q: &StabilityQuery, variant: Variant) -> Result<f64> {
    q.validate()?;
    let c = CarrierParams::with_epsilon(q.k0, q.g, q.epsilon)?;
    let model = EnvelopeModel::lab(variant);
    let k = nonlinear_coeffs(variant, &c);
    // the classical equation evolves the surface amplitude A rather than B
    let amp = match variant {
        Variant::ClassicalDysthe => a0_from_b0(q.b0, q.k0, q.g),
        _ => q.b0,
    };
    let b2 = amp * amp;
    let (l, m) = (q.lambda, q.mu);
    let tau = if l == 0.0 && m == 0.0 { 0.0 } else { -l * l / l.hypot(m) };
    let rot = linear_symbol(model, &c, 0.0, 0.0) + k.cubic.re * b2;
    // coefficients of b and conj(b) in DN[B0] b on the mode with x-wavenumber sx
    let alpha = |sx: f64| (2.0 * k.cubic + k.adv * Complex64::new(0.0, sx) + k.mean * tau) * b2;
    let beta = |sx: f64| (k.cubic + k.conj_adv * Complex64::new(0.0, sx) + k.mean * tau) * b2;
    let i = Complex64::new(0.0, 1.0);
    let d1 = linear_symbol(model, &c, l, m) - rot + alpha(l);
    let d2 = linear_symbol(model, &c, -l, -m) - rot + alpha(-l).conj();
    let m11 = -i * d1;
    let m12 = -i * beta(l);
    let m21 = i * beta(-l).conj();
    let m22 = i * d2;
    let half_tr = 0.5 * (m11 + m22);
    let disc = (half_tr * half_tr - (m11 * m22 - m12 * m21)).sqrt();
    Ok((half_tr + disc).re.max((half_tr - disc).re))
}

/// `B0 = A0 (g / 4k0)^{1/4}`.
pub fn b0_from_a0(a0: f64, k0: f64, g: f64) -> f64 {
    a0 * (g / (4.0 * k0)).powf(0.25)
}

pub fn a0_from_b0(b0: f64, k0: f64, g: f64) -> f64 {
    b0 * (4.0 * k0 / g).powf(0.25)
}

/// Wave steepness `k0 A0`.
pub fn steepness(a0: f64, k0: f64) -> f64 {
    k0 * a0
}

/// Raster of the stability region on `(0, lambda_max] x [0, mu_max]`.
#[derive(Clone, Debug)]
pub struct StabilityMap {
    pub base: StabilityQuery,
    pub variant: Variant,
    pub lambda_max: f64,
    pub mu_max: f64,
    pub n_lambda: usize,
    pub n_mu: usize,
    /// Row-major in `mu`, index `j * n_lambda + i`.
    pub unstable: Vec<bool>,
    pub growth: Vec<f64>,
    /// `(lambda, mu, growth)` of the largest growth.
    pub argmax: (f64, f64, f64),
}

impl StabilityMap {
    pub fn lambda(&self, i: usize) -> f64 {
        self.lambda_max * (i + 1) as f64 / self.n_lambda as f64
    }

    pub fn mu(&self, j: usize) -> f64 {
        if self.n_mu == 1 {
            0.0
        } else {
            self.mu_max * j as f64 / (self.n_mu - 1) as f64
        }
    }

    pub fn compute(
        base: StabilityQuery,
        variant: Variant,
        lambda_max: f64,
        mu_max: f64,
        n_lambda: usize,
        n_mu: usize,
    ) -> Result<Self> {
        if n_lambda == 0 || n_mu == 0 || !(lambda_max > 0.0) || !(mu_max >= 0.0) {
            return Err(Error::InvalidArgument("empty stability raster".into()));
        }
        let mut map = StabilityMap {
            base,
            variant,
            lambda_max,
            mu_max,
            n_lambda,
            n_mu,
            unstable: Vec::with_capacity(n_lambda * n_mu),
            growth: Vec::with_capacity(n_lambda * n_mu),
            argmax: (0.0, 0.0, f64::NEG_INFINITY),
        };
        for j in 0..n_mu {
            for i in 0..n_lambda {
                let q = base.at(map.lambda(i), map.mu(j));
                let gr = growth_rate_eig(&q, variant)?;
                map.unstable.push(bf_condition(&q)?);
                map.growth.push(gr);
                if gr > map.argmax.2 {
                    map.argmax = (q.lambda, q.mu, gr);
                }
            }
        }
        Ok(map)
    }

    /// Cells whose 8-neighbourhood shares their condition value.
    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        let v = self.unstable[j * self.n_lambda + i];
        for dj in -1i64..=1 {
            for di in -1i64..=1 {
                let (ii, jj) = (i as i64 + di, j as i64 + dj);
                if ii < 0 || jj < 0 || ii >= self.n_lambda as i64 || jj >= self.n_mu as i64 {
                    continue;
                }
                if self.unstable[jj as usize * self.n_lambda + ii as usize] != v {
                    return false;
                }
            }
        }
        true
    }

    /// `(interior cells, interior cells where growth > tol disagrees)`.
    pub fn sign_disagreements(&self, tol: f64) -> (usize, usize) {
        let (mut n, mut bad) = (0, 0);
        for j in 0..self.n_mu {
            for i in 0..self.n_lambda {
                if !self.is_interior(i, j) {
                    continue;
                }
                n += 1;
                let idx = j * self.n_lambda + i;
                if (self.growth[idx] > tol) != self.unstable[idx] {
                    bad += 1;
                }
            }
        }
        (n, bad)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "lambda,mu,unstable,growth")?;
        for j in 0..self.n_mu {
            for i in 0..self.n_lambda {
                let idx = j * self.n_lambda + i;
                writeln!(
                    w,
                    "{},{},{},{:e}",
                    self.lambda(i),
                    self.mu(j),
                    self.unstable[idx] as u8,
                    self.growth[idx]
                )?;
            }
        }
        Ok(())
    }

    /// Plain PGM of the positive growth, scaled to 0..=255, largest `mu` on top.
    pub fn write_pgm<W: Write>(&self, mut w: W) -> Result<()> {
        let top = self.growth.iter().cloned().fold(0.0_f64, f64::max);
        writeln!(w, "P2\n{} {}\n255", self.n_lambda, self.n_mu)?;
        for j in (0..self.n_mu).rev() {
            let row: Vec<String> = (0..self.n_lambda)
                .map(|i| {
                    let gr = self.growth[j * self.n_lambda + i].max(0.0);
                    let v = if top > 0.0 { (255.0 * gr / top).round() } else { 0.0 };
                    format!("{}", v as u8)
                })
                .collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Band-edge table `mu,lambda_lo,lambda_hi`, one row per unstable interval.
pub fn write_band_edges_csv<W: Write>(base: &StabilityQuery, mus: &[f64], mut w: W) -> Result<()> {
    writeln!(w, "mu,lambda_lo,lambda_hi")?;
    for &mu in mus {
        for (lo, hi) in band_edges(&base.at(0.0, mu))? {
            writeln!(w, "{mu},{lo},{hi}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> StabilityQuery {
        StabilityQuery::new(0.003, 10.0, 1.0, 0.0, 0.0)
    }

    #[test]
    fn condition_examples() {
        assert!(bf_condition(&base().at(1.5, 0.0)).unwrap());
        assert!(!bf_condition(&base().at(0.5, 1.0)).unwrap());
        assert!(!bf_condition(&base().at(3.0, 0.0)).unwrap());
        assert!(matches!(bf_condition(&base()), Err(Error::OriginQuery)));
    }

    #[test]
    fn condition_is_even_in_mu() {
        for &(l, m) in &[(0.3, 0.7), (1.2, 0.4), (2.5, 1.9)] {
            let a = bf_discriminant(&base().at(l, m)).unwrap();
            let b = bf_discriminant(&base().at(l, -m)).unwrap();
            assert_eq!(a, b);
            let ga = growth_rate_eig(&base().at(l, m), Variant::HamiltonianDysthe).unwrap();
            let gb = growth_rate_eig(&base().at(l, -m), Variant::HamiltonianDysthe).unwrap();
            assert!((ga - gb).abs() < 1e-15);
        }
    }

    #[test]
    fn mu0_band_edges() {
        let d = band_edge_mu0(&base()).unwrap();
        assert!((d - 1.918364).abs() < 1e-5, "{d}");
        // independent: positive root of l^2 + 0.455368 l - 4.553679
        let (b, c): (f64, f64) = (0.455368, -4.553679);
        assert!((d - (-b + (b * b - 4.0 * c).sqrt()) / 2.0).abs() < 2e-6);
        let n = band_edge_mu0(&base().with_epsilon(0.0)).unwrap();
        assert!((n - 2.133936).abs() < 1e-5, "{n}");
        let n2 = band_edge_mu0(&StabilityQuery { b0: 0.0035, ..base() }.with_epsilon(0.0)).unwrap();
        assert!((n2 - 2.489593).abs() < 1e-5, "{n2}");
        let closed = (16.0 * 1e5 * 0.0035f64.powi(2) / 10f64.sqrt()).sqrt();
        assert!((n2 - closed).abs() < 1e-12);
        assert!(d < n);
    }

    #[test]
    fn bisection_matches_condition() {
        for &mu in &[0.2, 0.6, 1.0, 1.7] {
            let q = base().at(0.0, mu);
            let bands = band_edges(&q).unwrap();
            for &(lo, hi) in &bands {
                assert!(lo < hi);
                let mid = 0.5 * (lo + hi);
                assert!(bf_condition(&q.at(mid, mu)).unwrap());
                if lo > 0.0 {
                    assert!(!bf_condition(&q.at(lo * (1.0 - 1e-6), mu)).unwrap());
                }
                assert!(!bf_condition(&q.at(hi * (1.0 + 1e-6), mu)).unwrap());
            }
        }
    }

    #[test]
    fn growth_examples() {
        let h = Variant::HamiltonianDysthe;
        assert!(growth_rate_eig(&base().at(3.0, 0.0), h).unwrap() <= 1e-12);
        assert!(growth_rate_eig(&base().at(1.5, 0.0), h).unwrap() > 0.0);
    }

    #[test]
    fn nls_growth_closed_form() {
        // NLS: Omega^2 = X (2 k0^3 B0^2 - w0 X / 4k0^2) w0 / (4 k0^2), X = l^2/2 - m^2
        let (k0, b0) = (10.0f64, 0.003f64);
        let w0 = k0.sqrt();
        for &(l, m) in &[(0.5, 0.0), (1.5, 0.0), (1.0, 0.3), (2.0, 0.1)] {
            let x: f64 = l * l / 2.0 - m * m;
            let s2 = x * (2.0 * k0.powi(3) * b0 * b0 - w0 * x / (4.0 * k0 * k0)) * w0 / (4.0 * k0 * k0);
            let expect = s2.max(0.0).sqrt();
            let got = growth_rate_eig(&base().at(l, m), Variant::Nls).unwrap();
            assert!((got - expect).abs() < 1e-12, "{l} {m}: {got} vs {expect}");
        }
    }

    #[test]
    fn nls_argmax() {
        let q = base();
        let mut best = (0.0, 0.0);
        for i in 1..=40000 {
            let l = 4.0 * i as f64 / 40000.0;
            let g = growth_rate_eig(&q.at(l, 0.0), Variant::Nls).unwrap();
            if g > best.1 {
                best = (l, g);
            }
        }
        let closed = (8.0 * 1e5 * 0.003f64.powi(2) / 10f64.sqrt()).sqrt();
        assert!((best.0 - closed).abs() < 1e-3);
        assert!((best.0 - 1.5091).abs() < 1e-3);
    }

    #[test]
    fn classical_and_exact_variants_are_finite() {
        for v in [Variant::ClassicalDysthe, Variant::ExactDispersion] {
            let g = growth_rate_eig(&base().at(1.5, 0.0), v).unwrap();
            assert!(g > 0.0 && g.is_finite());
            assert!(growth_rate_eig(&base().at(3.5, 0.0), v).unwrap() < 1e-12);
        }
    }

    #[test]
    fn dysthe_argmax_on_mu0_line() {
        for v in [Variant::HamiltonianDysthe, Variant::ClassicalDysthe] {
            let best = (1..=4000)
                .map(|i| 4.0 * i as f64 / 4000.0)
                .map(|l| (l, growth_rate_eig(&base().at(l, 0.0), v).unwrap()))
                .fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
            assert!((1.3..=1.6).contains(&best.0), "{v:?} {best:?}");
        }
    }

    #[test]
    fn amplitude_relation_examples() {
        assert!((b0_from_a0(0.0075, 10.0, 1.0) - 0.0029823).abs() < 5e-8);
        assert!((b0_from_a0(0.0088, 10.0, 1.0) - 0.0034992).abs() < 5e-8);
        assert_eq!(b0_from_a0(0.01, 10.0, 40.0), 0.01);
        let a = a0_from_b0(b0_from_a0(0.0075, 10.0, 1.0), 10.0, 1.0);
        assert!((a - 0.0075).abs() < 1e-15);
        assert!((steepness(0.0075, 10.0) - 0.075).abs() < 1e-15);
    }

    #[test]
    fn small_map_agrees() {
        let m = StabilityMap::compute(base(), Variant::HamiltonianDysthe, 4.0, 2.0, 40, 20).unwrap();
        let (n, bad) = m.sign_disagreements(1e-10);
        assert!(n > 0);
        assert_eq!(bad, 0);
        let mut csv = Vec::new();
        m.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 1 + 40 * 20);
        let mut pgm = Vec::new();
        m.write_pgm(&mut pgm).unwrap();
        assert!(String::from_utf8(pgm).unwrap().starts_with("P2\n40 20\n255\n"));
    }
}
