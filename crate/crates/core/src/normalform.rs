//! Kernels of the third-order normal form and the quartic coefficients of
//! the reduced Hamiltonian, with numerical checks of their expansions about
//! a carrier wavenumber.
//!
//! Prefactors follow the continuum convention (`1/2pi` per dimension); none
//! of these values feed the discrete solvers.
//!
//! Quads are stored as signed wavenumbers of the monomial
//! `z_1 z_2 conj(z_{-3}) conj(z_{-4})`, so `k1 + k2 + k3 + k4 = 0` and near a
//! carrier `k1, k2 ~ k0` while `k3, k4 ~ -k0`.

use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fit::loglog_slope;
use crate::spectral::{dispersion_omega, symplectic_weight};

pub type Vec2 = [f64; 2];

fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}
fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}
fn neg(a: Vec2) -> Vec2 {
    [-a[0], -a[1]]
}
/// `k1.k2 + |k1||k2|`, the factor that vanishes for antiparallel pairs.
fn cdot(a: Vec2, b: Vec2) -> f64 {
    dot(a, b) + norm(a) * norm(b)
}

fn nonzero(k: Vec2, what: &str) -> Result<()> {
    if norm(k) == 0.0 || !k.iter().all(|v| v.is_finite()) {
        return Err(Error::SingularKernel(format!("{what} = {k:?}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveTriple {
    pub k1: Vec2,
    pub k2: Vec2,
    pub k3: Vec2,
    pub g: f64,
}

impl WaveTriple {
    pub fn new(k1: Vec2, k2: Vec2, k3: Vec2, g: f64) -> Self {
        WaveTriple { k1, k2, k3, g }
    }

    fn check(&self) -> Result<()> {
        nonzero(self.k1, "k1")?;
        nonzero(self.k2, "k2")?;
        nonzero(self.k3, "k3")
    }

    fn omegas(&self) -> [f64; 3] {
        [self.k1, self.k2, self.k3].map(|k| dispersion_omega(k, self.g))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveQuad {
    pub k: [Vec2; 4],
    pub g: f64,
}

impl WaveQuad {
    pub fn new(k1: Vec2, k2: Vec2, k3: Vec2, k4: Vec2, g: f64) -> Self {
        WaveQuad {
            k: [k1, k2, k3, k4],
            g,
        }
    }

    /// Quad with `k1,2 = k0 + eps chi1,2` and `k3,4 = -(k0 + eps chi3,4)`,
    /// carrier along `+x`. Requires `chi1 + chi2 = chi3 + chi4`.
    pub fn near_carrier(k0: f64, eps: f64, chi: [Vec2; 4], g: f64) -> Result<Self> {
        let s = [
            chi[0][0] + chi[1][0] - chi[2][0] - chi[3][0],
            chi[0][1] + chi[1][1] - chi[2][1] - chi[3][1],
        ];
        let scale = chi.iter().map(|c| norm(*c)).sum::<f64>().max(1.0);
        if norm(s) > 1e-12 * scale {
            return Err(Error::InvalidArgument(format!(
                "chi1 + chi2 - chi3 - chi4 = {s:?} must vanish"
            )));
        }
        let at = |c: Vec2| [k0 + eps * c[0], eps * c[1]];
        Ok(WaveQuad::new(
            at(chi[0]),
            at(chi[1]),
            neg(at(chi[2])),
            neg(at(chi[3])),
            g,
        ))
    }
}

/// A coefficient value with its additive parts and the smallest resonance
/// denominator met while evaluating it.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffReport {
    pub value: f64,
    pub parts: Vec<(&'static str, f64)>,
    pub condition: f64,
}

impl CoeffReport {
    pub fn part(&self, name: &str) -> Option<f64> {
        self.parts.iter().find(|(n, _)| *n == name).map(|p| p.1)
    }
}

/// The three equivalent expressions of `d_123`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct D123Forms {
    /// `(w1+w2+w3)(w1+w2-w3)(w1-w2+w3)(w1-w2-w3)`
    pub frequency: f64,
    /// `g^2 (|k1|^2 + |k2|^2 + |k3|^2 - 2|k1||k2| - 2|k2||k3| - 2|k1||k3|)`
    pub magnitude: f64,
    /// `-2 g^2 (k1.k2 + k2.k3 + k3.k1 + |k1||k2| + |k2||k3| + |k3||k1|)`,
    /// equal to the others when `k1 + k2 + k3 = 0`.
    pub dot: f64,
    /// `g^2 (|k1| + |k2| + |k3|)^2`, the natural size of the terms.
    pub scale: f64,
}

pub fn denom_d123_forms(t: &WaveTriple) -> Result<D123Forms> {
    t.check()?;
    let [w1, w2, w3] = t.omegas();
    let [m1, m2, m3] = [t.k1, t.k2, t.k3].map(norm);
    let g2 = t.g * t.g;
    Ok(D123Forms {
        frequency: (w1 + w2 + w3) * (w1 + w2 - w3) * (w1 - w2 + w3) * (w1 - w2 - w3),
        magnitude: g2 * (m1 * m1 + m2 * m2 + m3 * m3 - 2.0 * (m1 * m2 + m2 * m3 + m1 * m3)),
        dot: -2.0 * g2 * (cdot(t.k1, t.k2) + cdot(t.k2, t.k3) + cdot(t.k3, t.k1)),
        scale: g2 * (m1 + m2 + m3).powi(2),
    })
}

/// `d_123` in its frequency-product form. The magnitude form always agrees;
/// the dot-product form agrees on closed triples.
pub fn denom_d123(t: &WaveTriple) -> Result<f64> {
    let f = denom_d123_forms(t)?;
    let tol = 1e-10 * f.scale;
    debug_assert!((f.frequency - f.magnitude).abs() <= tol);
    let closed = norm(add(add(t.k1, t.k2), t.k3)) <= 1e-13 * (f.scale.sqrt() / t.g);
    debug_assert!(!closed || (f.frequency - f.dot).abs() <= tol);
    Ok(f.frequency)
}

/// `ell_{a}^{b} = (|a||b| + a.b) / sqrt(|a||b|)`.
pub fn ell(a: Vec2, b: Vec2) -> Result<f64> {
    nonzero(a, "a")?;
    nonzero(b, "b")?;
    Ok(cdot(a, b) / (norm(a) * norm(b)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSAEll {
    pub s123: f64,
    pub a123: f64,
    /// `[ell_{k1}^{k2}, ell_{k2}^{k3}, ell_{k1}^{k3}]`
    pub ell: [f64; 3],
}

/// `S_123 = (k1.k3 + |k1||k3|) a1 a3 / a2`.
pub fn kernel_s(k1: Vec2, k2: Vec2, k3: Vec2, g: f64) -> Result<f64> {
    let a = |k| symplectic_weight(k, g).map_err(|_| Error::SingularKernel(format!("{k:?}")));
    Ok(cdot(k1, k3) * a(k1)? * a(k3)? / a(k2)?)
}

pub fn kernel_s_a_ell(t: &WaveTriple) -> Result<KernelSAEll> {
    t.check()?;
    let (k1, k2, k3, g) = (t.k1, t.k2, t.k3, t.g);
    let s123 = kernel_s(k1, k2, k3, g)?;
    let s312 = kernel_s(k3, k1, k2, g)?;
    let s231 = kernel_s(k2, k3, k1, g)?;
    Ok(KernelSAEll {
        s123,
        a123: (s123 + s312 - s231) / (8.0 * PI * SQRT_2),
        ell: [ell(k1, k2)?, ell(k2, k3)?, ell(k1, k3)?],
    })
}

/// Kernels of the normal-form flow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pqr {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    /// `|d_{k k2 k3}|`, shared by all three kernels since `d` is symmetric.
    pub condition: f64,
}

fn nonresonant(d: f64, what: &str) -> Result<f64> {
    if d == 0.0 || !d.is_finite() {
        return Err(Error::ResonantQuad(format!("{what}: d = {d}")));
    }
    Ok(d)
}

/// `P_{12k} = -|k|/2 + g^2/d_{12k} (k1.k + |k1||k|)(|k1| - |k2| - 3|k|)`.
pub fn kernel_p(k1: Vec2, k2: Vec2, k: Vec2, g: f64) -> Result<f64> {
    let d = nonresonant(denom_d123(&WaveTriple::new(k1, k2, k, g))?, "P")?;
    Ok(-0.5 * norm(k) + g * g / d * cdot(k1, k) * (norm(k1) - norm(k2) - 3.0 * norm(k)))
}

/// `Q_{k23}`.
pub fn kernel_q(k: Vec2, k2: Vec2, k3: Vec2, g: f64) -> Result<f64> {
    let d = nonresonant(denom_d123(&WaveTriple::new(k, k2, k3, g))?, "Q")?;
    let (a, b) = (cdot(k, k3), cdot(k2, k3));
    Ok(-(2.0 * a + b) / (4.0 * g) - g / (2.0 * d) * (2.0 * a * a + b * b))
}

/// `R_{k23}`.
pub fn kernel_r(k: Vec2, k2: Vec2, k3: Vec2, g: f64) -> Result<f64> {
    let d = nonresonant(denom_d123(&WaveTriple::new(k, k2, k3, g))?, "R")?;
    let (m, m2, m3) = (norm(k), norm(k2), norm(k3));
    Ok(-m3
        + g * g / d
            * (cdot(k, k3) * (m - m2 - 3.0 * m3) + cdot(k2, k3) * (m2 - m - 3.0 * m3)))
}

/// `P_{k2 k3 k}`, `Q_{k k2 k3}` and `R_{k k2 k3}`: the kernels of the
/// `xi_k` and `eta_k` derivatives of `K3`, with `k2, k3` the integration
/// wavenumbers.
pub fn kernels_pqr(k: Vec2, k2: Vec2, k3: Vec2, g: f64) -> Result<Pqr> {
    let d = denom_d123(&WaveTriple::new(k, k2, k3, g))?;
    Ok(Pqr {
        p: kernel_p(k2, k3, k, g)?,
        q: kernel_q(k, k2, k3, g)?,
        r: kernel_r(k, k2, k3, g)?,
        condition: d.abs(),
    })
}

/// Closed-form `T1` coefficient of `z1 z2 conj(z_-3) conj(z_-4)` in the
/// quartic Hamiltonian.
pub fn coeff_t1(q: &WaveQuad) -> f64 {
    // the closed form is written for the reflected pair -k3, -k4
    let [k1, k2, k3, k4] = [q.k[0], q.k[1], neg(q.k[2]), neg(q.k[3])];
    let [m1, m2, m3, m4] = [k1, k2, k3, k4].map(norm);
    let sub = |a: Vec2, b: Vec2| norm(add(a, neg(b)));
    let pre = (m1 * m2 * m3 * m4).powf(0.25) / (64.0 * PI * PI);
    pre * ((m1 * m2).sqrt() * (m1 + m2 - 2.0 * sub(k2, k3))
        + (m3 * m4).sqrt() * (m3 + m4 - 2.0 * sub(k1, k4))
        - 2.0
            * (m1 * m4).sqrt()
            * (2.0 * m1 + 2.0 * m4
                - norm(add(k1, k2))
                - norm(add(k3, k4))
                - sub(k1, k3)
                - sub(k2, k4)))
}

fn degenerate(what: &str) -> Error {
    Error::ResonantQuad(what.to_string())
}

fn ell_q(a: Vec2, b: Vec2, what: &str) -> Result<f64> {
    ell(a, b).map_err(|_| degenerate(what))
}

/// `T2 = I + II + III`, the coefficient of `z1 z2 conj(z_-3) conj(z_-4)` in
/// `{K3, H3}`.
pub fn coeff_t2(q: &WaveQuad) -> Result<CoeffReport> {
    let [k1, k2, k3, k4] = q.k;
    let g = q.g;
    let w = |k: Vec2| dispersion_omega(k, g);
    let (k12, k34, k13, k24) = (add(k1, k2), add(k3, k4), add(k1, k3), add(k2, k4));
    let m4 = [k1, k2, k3, k4].map(norm).iter().product::<f64>();
    let c = g.sqrt() / (PI * PI);

    let dens = [
        w(k1) + w(k2) + w(k12),
        w(k3) + w(k4) + w(k34),
        w(k1) + w(k13) - w(k3),
        w(k4) + w(k24) - w(k2),
        w(k1) + w(k2) - w(k12),
        w(k3) + w(k4) - w(k34),
    ];
    if dens.iter().any(|&d| d == 0.0 || !d.is_finite()) {
        return Err(degenerate("vanishing frequency denominator"));
    }

    let pre12 = (m4 * norm(k12) * norm(k34)).powf(0.25);
    let l12 = ell_q(k1, k2, "I")?;
    let l12a = ell_q(k12, neg(k1), "I")?;
    let l12b = ell_q(k12, neg(k2), "I")?;
    let l34 = ell_q(k3, k4, "I")?;
    let l34a = ell_q(k34, neg(k3), "I")?;
    let l34b = ell_q(k34, neg(k4), "I")?;
    let part1 = c / 128.0
        * pre12
        * (l12 + l12a + l12b)
        * (l34 + l34a + l34b)
        * (1.0 / dens[0] + 1.0 / dens[1]);

    let pre13 = (m4 * norm(k13) * norm(k24)).powf(0.25);
    let part2 = c / 32.0
        * pre13
        * (ell_q(k1, k3, "II")? + ell_q(k13, neg(k3), "II")? - ell_q(k13, neg(k1), "II")?)
        * (ell_q(k4, k2, "II")? + ell_q(k24, neg(k2), "II")? - ell_q(k24, neg(k4), "II")?)
        * (1.0 / dens[2] + 1.0 / dens[3]);

    let part3 = -c / 128.0
        * pre12
        * (l12a + l12b - l12)
        * (l34a + l34b - l34)
        * (1.0 / dens[4] + 1.0 / dens[5]);

    Ok(CoeffReport {
        value: part1 + part2 + part3,
        parts: vec![("I", part1), ("II", part2), ("III", part3)],
        condition: dens.iter().fold(f64::INFINITY, |a, d| a.min(d.abs())),
    })
}

/// `T1 - T2/2`, the homogenized quartic coefficient.
pub fn coeff_t_plus_minus(q: &WaveQuad) -> Result<CoeffReport> {
    let t1 = coeff_t1(q);
    let t2 = coeff_t2(q)?;
    Ok(CoeffReport {
        value: t1 - 0.5 * t2.value,
        parts: vec![("T1", t1), ("-T2/2", -0.5 * t2.value)],
        condition: t2.condition,
    })
}

/// Correction kernels of the transverse expansion of `K3`, for split-scaled
/// wavenumbers `kappa_j`.
pub fn coeff_r123_q123(k1: Vec2, k2: Vec2, k3: Vec2, g: f64) -> Result<(f64, f64)> {
    if k1[0] == 0.0 || k2[0] == 0.0 || k3[0] == 0.0 {
        return Err(Error::SingularKernel(
            "longitudinal wavenumber component must be nonzero".into(),
        ));
    }
    let s = |v: f64| v.signum();
    let (s1, s2, s3) = (s(k1[0]), s(k2[0]), s(k3[0]));
    let (a1, a2, a3) = (k1[0].abs(), k2[0].abs(), k3[0].abs());
    let r = k1[1] * k1[1] * a2 / (4.0 * k1[0] * k1[0]) * (s1 * s2 - s1 * s3)
        - k1[1] * k1[1] / (4.0 * a1) * (1.0 + s1 * s3)
        - k1[1] * k2[1] / (2.0 * a1) * (1.0 - s2 * s3);
    let q = -(k1[1] * k1[1] * a3 / a1 + k3[1] * k3[1] * a1 / a3 - 2.0 * k1[1] * k3[1] * s1 * s3)
        / (8.0 * g);
    Ok((r, q))
}

/// Leading transverse-free denominator `d^x_123` of the split-scaled expansion.
pub fn denom_d123_x(k1: Vec2, k2: Vec2, k3: Vec2, g: f64) -> f64 {
    let (a, b, c) = (k1[0].abs(), k2[0].abs(), k3[0].abs());
    g * g * (a * a + b * b + c * c - 2.0 * (a * b + a * c + b * c))
}

/// Pointwise first-order expansion of `T1` about the carrier.
pub fn t1_expansion(k0: f64, eps: f64, chi: &[Vec2; 4]) -> f64 {
    let d = |a: Vec2, b: Vec2| norm(add(a, neg(b)));
    let l = |j: usize| chi[j][0];
    let p2 = PI * PI;
    k0.powi(3) / (16.0 * p2)
        + k0 * k0 * eps / (64.0 * p2) * (l(0) + l(3) + 5.0 * (l(1) + l(2)))
        + k0 * k0 * eps / (32.0 * p2)
            * (d(chi[0], chi[2]) + d(chi[1], chi[3]) - d(chi[1], chi[2]) - d(chi[0], chi[3]))
}

/// Carrier limit of `T1 - T2/2`: `k0^3 / (8 pi^2)`.
pub fn homogenized_limit(k0: f64) -> f64 {
    k0.powi(3) / (8.0 * PI * PI)
}

/// Carrier limits of parts I and III of `T2`.
pub fn t2_part_limits(k0: f64) -> (f64, f64) {
    let c = k0.powi(3) / (16.0 * PI * PI);
    ((SQRT_2 - 1.0) * c, -(SQRT_2 + 1.0) * c)
}

/// Random `chi`-quads with `chi1 + chi2 = chi3 + chi4`, components in
/// `[-2, 2]`, kept away from the degenerate sets `chi1 = chi3`, `chi2 = chi4`.
pub fn random_chi_quads(n: usize, seed: u64) -> Vec<[Vec2; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut v = || [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let (c1, c2, c3) = (v(), v(), v());
        let c4 = [c1[0] + c2[0] - c3[0], c1[1] + c2[1] - c3[1]];
        let far = |a: Vec2, b: Vec2| norm(add(a, neg(b))) > 0.2;
        if far(c1, c3) && far(c2, c4) && far(c1, c4) && far(c2, c3) {
            out.push([c1, c2, c3, c4]);
        }
    }
    out
}

/// Residuals of an expansion check over an `eps` sweep and their log-log slope.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeReport {
    pub epsilon: Vec<f64>,
    /// Largest residual over the sampled quads at each `eps`.
    pub residual: Vec<f64>,
    pub slope: f64,
}

impl SlopeReport {
    fn from_residuals(epsilon: &[f64], residual: Vec<f64>) -> Result<Self> {
        let slope = loglog_slope(epsilon, &residual).ok_or_else(|| {
            Error::InvalidArgument("slope fit needs two or more positive residuals".into())
        })?;
        Ok(SlopeReport {
            epsilon: epsilon.to_vec(),
            residual,
            slope,
        })
    }
}

fn check_sweep(eps: &[f64]) -> Result<()> {
    if eps.len() < 2 || eps.iter().any(|&e| !(e > 0.0 && e <= 0.1)) {
        return Err(Error::InvalidArgument(
            "epsilon sweep needs two or more values in (0, 0.1]".into(),
        ));
    }
    Ok(())
}

/// Residual of `T1` against its first-order expansion, maximized over
/// `n_quads` random quads, as a function of `eps`.
pub fn verify_t1_expansion(k0: f64, eps: &[f64], n_quads: usize, seed: u64) -> Result<SlopeReport> {
    check_sweep(eps)?;
    let quads = random_chi_quads(n_quads, seed);
    let mut res = Vec::with_capacity(eps.len());
    for &e in eps {
        let mut worst = 0.0f64;
        for chi in &quads {
            let q = WaveQuad::near_carrier(k0, e, *chi, 1.0)?;
            worst = worst.max((coeff_t1(&q) - t1_expansion(k0, e, chi)).abs());
        }
        res.push(worst);
    }
    SlopeReport::from_residuals(eps, res)
}

/// `|T1 - T2/2 - k0^3/(8 pi^2)|`, maximized over random quads, against `eps`.
pub fn verify_homogenized_limit(
    k0: f64,
    g: f64,
    eps: &[f64],
    n_quads: usize,
    seed: u64,
) -> Result<SlopeReport> {
    check_sweep(eps)?;
    let quads = random_chi_quads(n_quads, seed);
    let target = homogenized_limit(k0);
    let mut res = Vec::with_capacity(eps.len());
    for &e in eps {
        let mut worst = 0.0f64;
        for chi in &quads {
            let q = WaveQuad::near_carrier(k0, e, *chi, g)?;
            worst = worst.max((coeff_t_plus_minus(&q)?.value - target).abs());
        }
        res.push(worst);
    }
    SlopeReport::from_residuals(eps, res)
}
