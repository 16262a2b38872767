//! Grids, transforms, Fourier multipliers and dealiased products.

mod fft;
mod field;
mod grid;
pub mod io;
mod multiplier;

pub use field::{ComplexField, ComplexSpectrum, Padded, PaddedComplex, RealField, Spectrum};
pub use grid::Grid2D;
pub use multiplier::Multiplier;

pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// Deep-water dispersion relation `omega = sqrt(g |k|)`.
pub fn dispersion_omega(k: [f64; 2], g: f64) -> f64 {
    (g * k[0].hypot(k[1])).sqrt()
}

/// Weight `a_k = (g/|k|)^{1/4}` of the complex symplectic coordinates.
pub fn symplectic_weight(k: [f64; 2], g: f64) -> Result<f64> {
    let m = k[0].hypot(k[1]);
    if m == 0.0 {
        return Err(Error::SingularSymplecticWeight);
    }
    Ok((g / m).powf(0.25))
}

/// Apply a multiplier to a real field. The multiplier should be Hermitian;
/// otherwise the imaginary part of the result is discarded.
pub fn apply_multiplier(f: &RealField, m: &Multiplier) -> Result<RealField> {
    if m.is_hermitian() {
        Ok(f.spectrum().apply(m)?.to_field())
    } else {
        Ok(f.to_complex().spectrum().apply(m)?.to_field().re())
    }
}

/// Apply a multiplier to a complex field.
pub fn apply_multiplier_complex(f: &ComplexField, m: &Multiplier) -> Result<ComplexField> {
    Ok(f.spectrum().apply(m)?.to_field())
}

/// Product of two real fields computed on the 3/2-padded grid.
pub fn dealiased_product(f: &RealField, g: &RealField) -> Result<RealField> {
    f.grid().check_same(g.grid())?;
    let p = f.spectrum().to_padded().mul(&g.spectrum().to_padded());
    Ok(p.truncate().to_field())
}

/// Product of two complex fields computed on the 3/2-padded grid.
pub fn dealiased_product_complex(f: &ComplexField, g: &ComplexField) -> Result<ComplexField> {
    f.grid().check_same(g.grid())?;
    let p = f.spectrum().to_padded().mul(&g.spectrum().to_padded());
    Ok(p.truncate().to_field())
}
