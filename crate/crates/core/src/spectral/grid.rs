use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::fft::Plan2D;
use crate::error::{Error, Result};

/// Doubly periodic rectangular grid and its wavenumber lattice.
///
/// Cloning is cheap: the transform plans are shared.
#[derive(Clone)]
pub struct Grid2D {
    inner: Arc<Inner>,
}

struct Inner {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    base: Plan2D,
    padded: Plan2D,
}

impl Grid2D {
    /// `nx` and `ny` must be powers of two no smaller than 2.
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 2 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "{name} = {n} must be a power of two >= 2"
                )));
            }
        }
        if !(lx.is_finite() && lx > 0.0 && ly.is_finite() && ly > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "domain lengths must be positive, got ({lx}, {ly})"
            )));
        }
        let (mx, my) = (3 * nx / 2, 3 * ny / 2);
        Ok(Grid2D {
            inner: Arc::new(Inner {
                nx,
                ny,
                lx,
                ly,
                base: Plan2D::new(nx, ny),
                padded: Plan2D::new(mx, my),
            }),
        })
    }

    /// Square `2pi x 2pi` box.
    pub fn periodic_2pi(nx: usize, ny: usize) -> Result<Self> {
        Self::new(nx, ny, 2.0 * PI, 2.0 * PI)
    }

    pub fn nx(&self) -> usize {
        self.inner.nx
    }
    pub fn ny(&self) -> usize {
        self.inner.ny
    }
    pub fn lx(&self) -> f64 {
        self.inner.lx
    }
    pub fn ly(&self) -> f64 {
        self.inner.ly
    }
    pub fn len(&self) -> usize {
        self.inner.nx * self.inner.ny
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Number of retained `ky >= 0` columns of a real field's half spectrum.
    pub fn nh(&self) -> usize {
        self.inner.ny / 2 + 1
    }
    pub fn dx(&self) -> f64 {
        self.inner.lx / self.inner.nx as f64
    }
    pub fn dy(&self) -> f64 {
        self.inner.ly / self.inner.ny as f64
    }
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }
    pub fn area(&self) -> f64 {
        self.inner.lx * self.inner.ly
    }
    pub fn x(&self, ix: usize) -> f64 {
        ix as f64 * self.dx()
    }
    pub fn y(&self, iy: usize) -> f64 {
        iy as f64 * self.dy()
    }
    /// Lattice spacing in kx.
    pub fn dkx(&self) -> f64 {
        2.0 * PI / self.inner.lx
    }
    pub fn dky(&self) -> f64 {
        2.0 * PI / self.inner.ly
    }

    /// Signed lattice index in the symmetric range `-n/2 ..= n/2 - 1`.
    #[inline]
    pub fn signed_index(i: usize, n: usize) -> i64 {
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    #[inline]
    pub fn kx(&self, ix: usize) -> f64 {
        Self::signed_index(ix, self.inner.nx) as f64 * self.dkx()
    }

    /// `ky` for a full-spectrum row index `iy in 0..ny`.
    #[inline]
    pub fn ky(&self, iy: usize) -> f64 {
        Self::signed_index(iy, self.inner.ny) as f64 * self.dky()
    }

    /// Storage index of lattice point `(jx, jy)` in a full spectrum.
    pub fn full_index(&self, jx: i64, jy: i64) -> usize {
        let (nx, ny) = (self.inner.nx as i64, self.inner.ny as i64);
        let ix = jx.rem_euclid(nx) as usize;
        let iy = jy.rem_euclid(ny) as usize;
        iy * self.inner.nx + ix
    }

    /// Index of `value / spacing` if it is an integer multiple (to 1e-9).
    pub fn lattice_multiple(value: f64, spacing: f64) -> Result<i64> {
        let q = value / spacing;
        let r = q.round();
        if (q - r).abs() > 1e-9 * q.abs().max(1.0) {
            return Err(Error::NonLattice { value, spacing });
        }
        Ok(r as i64)
    }

    /// Padded (3/2) sample counts.
    pub fn padded_dims(&self) -> (usize, usize) {
        (self.inner.padded.nx, self.inner.padded.ny)
    }

    pub fn same_as(&self, other: &Grid2D) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.nx == other.inner.nx
                && self.inner.ny == other.inner.ny
                && self.inner.lx == other.inner.lx
                && self.inner.ly == other.inner.ly)
    }

    pub fn check_same(&self, other: &Grid2D) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    pub(crate) fn base_plan(&self) -> &Plan2D {
        &self.inner.base
    }
    pub(crate) fn padded_plan(&self) -> &Plan2D {
        &self.inner.padded
    }
}

impl PartialEq for Grid2D {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Debug for Grid2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Grid2D({}x{}, {:.6}x{:.6})",
            self.inner.nx, self.inner.ny, self.inner.lx, self.inner.ly
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Grid2D::new(12, 8, 1.0, 1.0).is_err());
        assert!(Grid2D::new(8, 1, 1.0, 1.0).is_err());
        assert!(Grid2D::new(8, 8, 0.0, 1.0).is_err());
        assert!(Grid2D::new(8, 8, 1.0, 1.0).is_ok());
    }

    #[test]
    fn lattice_is_symmetric() {
        let g = Grid2D::periodic_2pi(8, 4).unwrap();
        let ks: Vec<f64> = (0..8).map(|i| g.kx(i)).collect();
        assert_eq!(ks, vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
        // -k is on the lattice whenever k is (Nyquist is self-conjugate)
        for &k in &ks {
            assert!(ks.iter().any(|&q| q == -k || (k.abs() == 4.0 && q == -4.0)));
        }
        assert_eq!(g.padded_dims(), (12, 6));
    }

    #[test]
    fn lattice_multiple_detects_off_lattice() {
        assert_eq!(Grid2D::lattice_multiple(10.0, 1.0).unwrap(), 10);
        assert!(Grid2D::lattice_multiple(1.5, 1.0).is_err());
    }
}
