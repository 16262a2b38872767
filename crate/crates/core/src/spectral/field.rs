//! Sampled fields and their spectral views.
//!
//! Spectral coefficients follow the convention
//! `c_k = (1/(nx*ny)) sum_x f(x) exp(-i k.x)`, so `f(x) = sum_k c_k exp(i k.x)`.
//! Real fields keep only the `ky >= 0` half of the spectrum.

use num_complex::Complex64;

use super::grid::Grid2D;
use super::multiplier::Multiplier;
use crate::error::Result;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Real samples on a grid, row-major `[ix][iy]`.
#[derive(Clone, Debug)]
pub struct RealField {
    grid: Grid2D,
    data: Vec<f64>,
}

/// Half spectrum of a real field, `[iy][ix]` with `iy in 0..=ny/2`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Grid2D,
    data: Vec<Complex64>,
}

/// Real samples on the 3/2-padded grid belonging to `grid`.
#[derive(Clone, Debug)]
pub struct Padded {
    grid: Grid2D,
    data: Vec<f64>,
}

/// Complex samples on a grid, row-major `[ix][iy]`.
#[derive(Clone, Debug)]
pub struct ComplexField {
    grid: Grid2D,
    data: Vec<Complex64>,
}

/// Full spectrum of a complex field, `[iy][ix]`.
#[derive(Clone, Debug)]
pub struct ComplexSpectrum {
    grid: Grid2D,
    data: Vec<Complex64>,
}

/// Complex samples on the 3/2-padded grid.
#[derive(Clone, Debug)]
pub struct PaddedComplex {
    grid: Grid2D,
    data: Vec<Complex64>,
}

// ---------------------------------------------------------------------------
// RealField

impl RealField {
    pub fn zeros(grid: &Grid2D) -> Self {
        RealField {
            grid: grid.clone(),
            data: vec![0.0; grid.len()],
        }
    }

    pub fn from_vec(grid: &Grid2D, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(crate::Error::GridMismatch(format!(
                "{} samples for {:?}",
                data.len(),
                grid
            )));
        }
        Ok(RealField {
            grid: grid.clone(),
            data,
        })
    }

    pub fn from_fn(grid: &Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for ix in 0..grid.nx() {
            let x = grid.x(ix);
            for iy in 0..grid.ny() {
                data.push(f(x, grid.y(iy)));
            }
        }
        RealField {
            grid: grid.clone(),
            data,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }
    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }
    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.data[ix * self.grid.ny() + iy]
    }

    pub fn spectrum(&self) -> Spectrum {
        let plan = self.grid.base_plan();
        let mut data = plan.forward_real(&self.data);
        let norm = 1.0 / self.grid.len() as f64;
        data.iter_mut().for_each(|c| *c *= norm);
        Spectrum {
            grid: self.grid.clone(),
            data,
        }
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            grid: self.grid.clone(),
            data: self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField {
            grid: self.grid.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> Result<RealField> {
        self.grid.check_same(&other.grid)?;
        Ok(RealField {
            grid: self.grid.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scaled(&self, a: f64) -> RealField {
        self.map(|v| a * v)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
    /// Periodic trapezoid rule: plain sum times cell area.
    pub fn integral(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.grid.cell_area()
    }
    /// `sqrt(integral of f^2)` by the double trapezoidal rule.
    pub fn l2_norm(&self) -> f64 {
        (self.data.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()).sqrt()
    }
    /// Trapezoid inner product `integral of f g`.
    pub fn inner(&self, other: &RealField) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.grid.cell_area())
    }
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Samples along the row `iy` (fixed y), as `(x, value)` pairs.
    pub fn cross_section_x(&self, iy: usize) -> Vec<(f64, f64)> {
        (0..self.grid.nx())
            .map(|ix| (self.grid.x(ix), self.at(ix, iy)))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Spectrum

impl Spectrum {
    pub fn zeros(grid: &Grid2D) -> Self {
        Spectrum {
            grid: grid.clone(),
            data: vec![ZERO; grid.nx() * grid.nh()],
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Coefficient at signed lattice indices, using conjugate symmetry for
    /// `jy < 0`.
    pub fn coeff(&self, jx: i64, jy: i64) -> Complex64 {
        let (nx, ny) = (self.grid.nx() as i64, self.grid.ny() as i64);
        let jy_w = jy.rem_euclid(ny);
        if jy_w <= ny / 2 {
            self.data[jy_w as usize * nx as usize + jx.rem_euclid(nx) as usize]
        } else {
            let iy = (-jy).rem_euclid(ny) as usize;
            self.data[iy * nx as usize + (-jx).rem_euclid(nx) as usize].conj()
        }
    }

    pub fn set_coeff(&mut self, jx: i64, jy: i64, value: Complex64) {
        let (nx, ny) = (self.grid.nx() as i64, self.grid.ny() as i64);
        let jy_w = jy.rem_euclid(ny);
        if jy_w <= ny / 2 {
            self.data[jy_w as usize * nx as usize + jx.rem_euclid(nx) as usize] = value;
        } else {
            let iy = (-jy).rem_euclid(ny) as usize;
            self.data[iy * nx as usize + (-jx).rem_euclid(nx) as usize] = value.conj();
        }
    }

    pub fn to_field(&self) -> RealField {
        RealField {
            grid: self.grid.clone(),
            data: self.grid.base_plan().inverse_real(&self.data),
        }
    }

    /// Pointwise product with a multiplier's half-spectrum symbol table.
    pub fn apply(&self, m: &Multiplier) -> Result<Spectrum> {
        self.grid.check_same(m.grid())?;
        Ok(self.apply_unchecked(m))
    }

    pub(crate) fn apply_unchecked(&self, m: &Multiplier) -> Spectrum {
        // the half spectrum is the leading block of the full table
        let data = self
            .data
            .iter()
            .zip(m.full_table())
            .map(|(c, s)| c * s)
            .collect();
        Spectrum {
            grid: self.grid.clone(),
            data,
        }
    }

    /// Multiply by a real per-mode factor table laid out like the half spectrum.
    pub fn scale_by(&self, table: &[f64]) -> Spectrum {
        Spectrum {
            grid: self.grid.clone(),
            data: self.data.iter().zip(table).map(|(c, s)| c * s).collect(),
        }
    }

    /// Evaluate on the padded grid.
    pub fn to_padded(&self) -> Padded {
        let g = &self.grid;
        let pp = g.padded_plan();
        let (nx, ny, nh) = (g.nx(), g.ny(), g.nh());
        let (mx, mh) = (pp.nx, pp.nh());
        let mut out = vec![ZERO; mx * mh];
        for iy in 0..nh {
            let wy = if iy == ny / 2 { 0.5 } else { 1.0 };
            for ix in 0..nx {
                let c = self.data[iy * nx + ix] * wy;
                let jx = Grid2D::signed_index(ix, nx);
                if jx == -(nx as i64) / 2 {
                    let half = c * 0.5;
                    out[iy * mx + jx.rem_euclid(mx as i64) as usize] += half;
                    out[iy * mx + (-jx) as usize] += half;
                } else {
                    out[iy * mx + jx.rem_euclid(mx as i64) as usize] += c;
                }
            }
        }
        Padded {
            grid: g.clone(),
            data: pp.inverse_real(&out),
        }
    }

    pub fn add(&self, other: &Spectrum) -> Spectrum {
        let mut s = self.clone();
        s.axpy(1.0, other);
        s
    }

    pub fn sub(&self, other: &Spectrum) -> Spectrum {
        let mut s = self.clone();
        s.axpy(-1.0, other);
        s
    }

    pub fn axpy(&mut self, a: f64, x: &Spectrum) {
        debug_assert!(self.grid.same_as(&x.grid));
        self.data
            .iter_mut()
            .zip(&x.data)
            .for_each(|(s, v)| *s += v * a);
    }

    pub fn scale(&mut self, a: f64) {
        self.data.iter_mut().for_each(|c| *c *= a);
    }

    pub fn scaled(&self, a: f64) -> Spectrum {
        let mut s = self.clone();
        s.scale(a);
        s
    }

    /// Zero the Nyquist row and column.
    pub fn zero_nyquist(&mut self) {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        for iy in 0..self.grid.nh() {
            self.data[iy * nx + nx / 2] = ZERO;
        }
        let row = ny / 2;
        self.data[row * nx..(row + 1) * nx].fill(ZERO);
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest imaginary part among self-conjugate entries (zero/Nyquist
    /// lattice points); a real field keeps these real.
    pub fn self_conjugate_residue(&self) -> f64 {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let mut r: f64 = 0.0;
        for iy in [0, ny / 2] {
            for ix in [0, nx / 2] {
                r = r.max(self.data[iy * nx + ix].im.abs());
            }
        }
        r
    }
}

// ---------------------------------------------------------------------------
// Padded

impl Padded {
    pub(crate) fn from_vec(grid: &Grid2D, data: Vec<f64>) -> Padded {
        let (mx, my) = grid.padded_dims();
        debug_assert_eq!(data.len(), mx * my);
        Padded {
            grid: grid.clone(),
            data,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul(&self, other: &Padded) -> Padded {
        debug_assert!(self.grid.same_as(&other.grid));
        Padded {
            grid: self.grid.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn zip_map(&self, other: &Padded, f: impl Fn(f64, f64) -> f64) -> Padded {
        Padded {
            grid: self.grid.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Padded {
        Padded {
            grid: self.grid.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn add(&self, other: &Padded) -> Padded {
        self.zip_map(other, |a, b| a + b)
    }

    /// Forward transform on the padded grid, truncated to the base lattice.
    /// Nyquist modes are dropped.
    pub fn truncate(&self) -> Spectrum {
        let g = &self.grid;
        let pp = g.padded_plan();
        let (mx, my) = (pp.nx, pp.ny);
        let full = pp.forward_real(&self.data);
        let norm = 1.0 / (mx * my) as f64;
        let (nx, ny, nh) = (g.nx(), g.ny(), g.nh());
        let mut data = vec![ZERO; nx * nh];
        for iy in 0..nh {
            if iy == ny / 2 {
                continue;
            }
            for ix in 0..nx {
                let jx = Grid2D::signed_index(ix, nx);
                if jx == -(nx as i64) / 2 {
                    continue;
                }
                data[iy * nx + ix] = full[iy * mx + jx.rem_euclid(mx as i64) as usize] * norm;
            }
        }
        Spectrum {
            grid: g.clone(),
            data,
        }
    }
}

// ---------------------------------------------------------------------------
// ComplexField

impl ComplexField {
    pub fn zeros(grid: &Grid2D) -> Self {
        ComplexField {
            grid: grid.clone(),
            data: vec![ZERO; grid.len()],
        }
    }

    pub fn from_vec(grid: &Grid2D, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(crate::Error::GridMismatch(format!(
                "{} samples for {:?}",
                data.len(),
                grid
            )));
        }
        Ok(ComplexField {
            grid: grid.clone(),
            data,
        })
    }

    pub fn from_fn(grid: &Grid2D, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for ix in 0..grid.nx() {
            let x = grid.x(ix);
            for iy in 0..grid.ny() {
                data.push(f(x, grid.y(iy)));
            }
        }
        ComplexField {
            grid: grid.clone(),
            data,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }
    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.data[ix * self.grid.ny() + iy]
    }

    pub fn spectrum(&self) -> ComplexSpectrum {
        let mut data = self.grid.base_plan().forward_complex(&self.data);
        let norm = 1.0 / self.grid.len() as f64;
        data.iter_mut().for_each(|c| *c *= norm);
        ComplexSpectrum {
            grid: self.grid.clone(),
            data,
        }
    }

    pub fn re(&self) -> RealField {
        RealField {
            grid: self.grid.clone(),
            data: self.data.iter().map(|c| c.re).collect(),
        }
    }
    pub fn im(&self) -> RealField {
        RealField {
            grid: self.grid.clone(),
            data: self.data.iter().map(|c| c.im).collect(),
        }
    }
    pub fn max_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, c| m.max(c.im.abs()))
    }
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> ComplexField {
        ComplexField {
            grid: self.grid.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(
        &self,
        other: &ComplexField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexField> {
        self.grid.check_same(&other.grid)?;
        Ok(ComplexField {
            grid: self.grid.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn integral(&self) -> Complex64 {
        self.data.iter().sum::<Complex64>() * self.grid.cell_area()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

// ---------------------------------------------------------------------------
// ComplexSpectrum

impl ComplexSpectrum {
    pub fn zeros(grid: &Grid2D) -> Self {
        ComplexSpectrum {
            grid: grid.clone(),
            data: vec![ZERO; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn coeff(&self, jx: i64, jy: i64) -> Complex64 {
        self.data[self.grid.full_index(jx, jy)]
    }

    pub fn set_coeff(&mut self, jx: i64, jy: i64, value: Complex64) {
        let i = self.grid.full_index(jx, jy);
        self.data[i] = value;
    }

    pub fn to_field(&self) -> ComplexField {
        ComplexField {
            grid: self.grid.clone(),
            data: self.grid.base_plan().inverse_complex(&self.data),
        }
    }

    pub fn apply(&self, m: &Multiplier) -> Result<ComplexSpectrum> {
        self.grid.check_same(m.grid())?;
        Ok(self.apply_unchecked(m))
    }

    pub(crate) fn apply_unchecked(&self, m: &Multiplier) -> ComplexSpectrum {
        ComplexSpectrum {
            grid: self.grid.clone(),
            data: self
                .data
                .iter()
                .zip(m.full_table())
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    /// Multiply by a per-mode complex table laid out like the spectrum.
    pub fn mul_table(&self, table: &[Complex64]) -> ComplexSpectrum {
        ComplexSpectrum {
            grid: self.grid.clone(),
            data: self.data.iter().zip(table).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn to_padded(&self) -> PaddedComplex {
        let g = &self.grid;
        let pp = g.padded_plan();
        let (nx, ny) = (g.nx(), g.ny());
        let (mx, my) = (pp.nx, pp.ny);
        let mut out = vec![ZERO; mx * my];
        let targets = |j: i64, n: usize, m: usize| -> ([(usize, f64); 2], usize) {
            if j == -(n as i64) / 2 {
                (
                    [
                        (j.rem_euclid(m as i64) as usize, 0.5),
                        ((-j) as usize, 0.5),
                    ],
                    2,
                )
            } else {
                ([(j.rem_euclid(m as i64) as usize, 1.0), (0, 0.0)], 1)
            }
        };
        for iy in 0..ny {
            let jy = Grid2D::signed_index(iy, ny);
            let (ty, ny_t) = targets(jy, ny, my);
            for ix in 0..nx {
                let c = self.data[iy * nx + ix];
                if c == ZERO {
                    continue;
                }
                let jx = Grid2D::signed_index(ix, nx);
                let (tx, nx_t) = targets(jx, nx, mx);
                for &(py, wy) in &ty[..ny_t] {
                    for &(px, wx) in &tx[..nx_t] {
                        out[py * mx + px] += c * (wx * wy);
                    }
                }
            }
        }
        PaddedComplex {
            grid: g.clone(),
            data: pp.inverse_complex(&out),
        }
    }

    pub fn add(&self, other: &ComplexSpectrum) -> ComplexSpectrum {
        let mut s = self.clone();
        s.axpy(Complex64::new(1.0, 0.0), other);
        s
    }

    pub fn axpy(&mut self, a: Complex64, x: &ComplexSpectrum) {
        debug_assert!(self.grid.same_as(&x.grid));
        self.data
            .iter_mut()
            .zip(&x.data)
            .for_each(|(s, v)| *s += v * a);
    }

    pub fn scale(&mut self, a: Complex64) {
        self.data.iter_mut().for_each(|c| *c *= a);
    }

    pub fn scaled(&self, a: f64) -> ComplexSpectrum {
        let mut s = self.clone();
        s.scale(Complex64::new(a, 0.0));
        s
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}

// ---------------------------------------------------------------------------
// PaddedComplex

impl PaddedComplex {
    pub(crate) fn from_vec(grid: &Grid2D, data: Vec<Complex64>) -> PaddedComplex {
        let (mx, my) = grid.padded_dims();
        debug_assert_eq!(data.len(), mx * my);
        PaddedComplex {
            grid: grid.clone(),
            data,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul(&self, other: &PaddedComplex) -> PaddedComplex {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn zip_map(
        &self,
        other: &PaddedComplex,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> PaddedComplex {
        debug_assert!(self.grid.same_as(&other.grid));
        PaddedComplex {
            grid: self.grid.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> PaddedComplex {
        PaddedComplex {
            grid: self.grid.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn truncate(&self) -> ComplexSpectrum {
        let g = &self.grid;
        let pp = g.padded_plan();
        let (mx, my) = (pp.nx, pp.ny);
        let full = pp.forward_complex(&self.data);
        let norm = 1.0 / (mx * my) as f64;
        let (nx, ny) = (g.nx(), g.ny());
        let mut data = vec![ZERO; nx * ny];
        for iy in 0..ny {
            let jy = Grid2D::signed_index(iy, ny);
            if jy == -(ny as i64) / 2 {
                continue;
            }
            let py = jy.rem_euclid(my as i64) as usize;
            for ix in 0..nx {
                let jx = Grid2D::signed_index(ix, nx);
                if jx == -(nx as i64) / 2 {
                    continue;
                }
                data[iy * nx + ix] = full[py * mx + jx.rem_euclid(mx as i64) as usize] * norm;
            }
        }
        ComplexSpectrum {
            grid: g.clone(),
            data,
        }
    }
}
