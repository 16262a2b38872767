use num_complex::Complex64;

use super::grid::Grid2D;

/// Fourier multiplier tabulated on a grid's wavenumber lattice.
///
/// The table is a full spectrum `[iy][ix]`; its first `nh` rows double as
/// the half-spectrum table for real fields. At a Nyquist index the symbol is
/// averaged over the `+N/2` and `-N/2` representatives, so odd symbols such
/// as `i kx` vanish there and real-to-real operators stay real.
#[derive(Clone, Debug)]
pub struct Multiplier {
    grid: Grid2D,
    table: Vec<Complex64>,
    zero_mode: Complex64,
    hermitian: bool,
}

impl Multiplier {
    /// Tabulate `symbol(kx, ky)` for `k != 0`; `zero_mode` is used at `k = 0`.
    pub fn from_symbol(
        grid: &Grid2D,
        zero_mode: Complex64,
        symbol: impl Fn(f64, f64) -> Complex64,
    ) -> Self {
        let (nx, ny) = (grid.nx(), grid.ny());
        let (dkx, dky) = (grid.dkx(), grid.dky());
        let reps = |i: usize, n: usize, dk: f64| -> Vec<f64> {
            let j = Grid2D::signed_index(i, n);
            if j == -(n as i64) / 2 {
                vec![j as f64 * dk, -(j as f64) * dk]
            } else {
                vec![j as f64 * dk]
            }
        };
        let xs: Vec<Vec<f64>> = (0..nx).map(|i| reps(i, nx, dkx)).collect();
        let ys: Vec<Vec<f64>> = (0..ny).map(|i| reps(i, ny, dky)).collect();
        let mut table = Vec::with_capacity(nx * ny);
        for ky_set in &ys {
            for kx_set in &xs {
                let mut acc = Complex64::new(0.0, 0.0);
                for &ky in ky_set {
                    for &kx in kx_set {
                        acc += if kx == 0.0 && ky == 0.0 {
                            zero_mode
                        } else {
                            symbol(kx, ky)
                        };
                    }
                }
                table.push(acc / (kx_set.len() * ky_set.len()) as f64);
            }
        }
        let mut m = Multiplier {
            grid: grid.clone(),
            table,
            zero_mode,
            hermitian: false,
        };
        m.hermitian = m.check_hermitian(1e-13);
        m
    }

    /// Real symbol `s(kx, ky)`.
    pub fn from_real_symbol(grid: &Grid2D, zero_mode: f64, symbol: impl Fn(f64, f64) -> f64) -> Self {
        Self::from_symbol(grid, Complex64::new(zero_mode, 0.0), |kx, ky| {
            Complex64::new(symbol(kx, ky), 0.0)
        })
    }

    pub fn identity(grid: &Grid2D) -> Self {
        Self::from_real_symbol(grid, 1.0, |_, _| 1.0)
    }

    /// `|D|`, symbol `|k|`.
    pub fn abs_d(grid: &Grid2D) -> Self {
        Self::from_real_symbol(grid, 0.0, |kx, ky| kx.hypot(ky))
    }

    /// `d/dx`, symbol `i kx`.
    pub fn ddx(grid: &Grid2D) -> Self {
        Self::from_symbol(grid, Complex64::new(0.0, 0.0), |kx, _| Complex64::new(0.0, kx))
    }

    /// `d/dy`, symbol `i ky`.
    pub fn ddy(grid: &Grid2D) -> Self {
        Self::from_symbol(grid, Complex64::new(0.0, 0.0), |_, ky| Complex64::new(0.0, ky))
    }

    /// Hilbert transform in x, symbol `-i sgn(kx)` with `sgn(0) = 0`.
    pub fn hilbert_x(grid: &Grid2D) -> Self {
        Self::from_symbol(grid, Complex64::new(0.0, 0.0), |kx, _| {
            Complex64::new(0.0, -sgn(kx))
        })
    }

    /// Inverse Hilbert transform in x, symbol `i sgn(kx)`.
    pub fn inv_hilbert_x(grid: &Grid2D) -> Self {
        Self::from_symbol(grid, Complex64::new(0.0, 0.0), |kx, _| {
            Complex64::new(0.0, sgn(kx))
        })
    }

    /// `|D|^{-1}`, zero at `k = 0`.
    pub fn inv_abs_d(grid: &Grid2D) -> Self {
        Self::from_real_symbol(grid, 0.0, |kx, ky| 1.0 / kx.hypot(ky))
    }

    /// `d^2/dx^2 |D|^{-1}`, symbol `-kx^2/|k|`, zero at `k = 0`.
    pub fn dxx_inv_abs_d(grid: &Grid2D) -> Self {
        Self::from_real_symbol(grid, 0.0, |kx, ky| -kx * kx / kx.hypot(ky))
    }

    /// `d/dx |D|^{-1}`, symbol `i kx/|k|`, zero at `k = 0`.
    pub fn dx_inv_abs_d(grid: &Grid2D) -> Self {
        Self::from_symbol(grid, Complex64::new(0.0, 0.0), |kx, ky| {
            Complex64::new(0.0, kx / kx.hypot(ky))
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
    pub fn zero_mode(&self) -> Complex64 {
        self.zero_mode
    }
    /// Whether `symbol(-k) = conj(symbol(k))` on the lattice.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Tabulated value at signed lattice indices.
    pub fn at(&self, jx: i64, jy: i64) -> Complex64 {
        self.table[self.grid.full_index(jx, jy)]
    }

    pub(crate) fn full_table(&self) -> &[Complex64] {
        &self.table
    }

    /// Real parts over the half-spectrum layout.
    pub(crate) fn half_table_re(&self) -> Vec<f64> {
        let n = self.grid.nx() * self.grid.nh();
        self.table[..n].iter().map(|c| c.re).collect()
    }

    /// Pointwise product of two multipliers on the same grid.
    pub fn compose(&self, other: &Multiplier) -> Multiplier {
        debug_assert!(self.grid.same_as(&other.grid));
        let table: Vec<Complex64> = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| a * b)
            .collect();
        let mut m = Multiplier {
            grid: self.grid.clone(),
            table,
            zero_mode: self.zero_mode * other.zero_mode,
            hermitian: false,
        };
        m.hermitian = m.check_hermitian(1e-13);
        m
    }

    fn check_hermitian(&self, tol: f64) -> bool {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        for iy in 0..ny {
            let jy = Grid2D::signed_index(iy, ny);
            for ix in 0..nx {
                let jx = Grid2D::signed_index(ix, nx);
                let a = self.at(jx, jy);
                let b = self.at(-jx, -jy).conj();
                if (a - b).norm() > tol * (1.0 + a.norm()) {
                    return false;
                }
            }
        }
        true
    }
}

fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_symbols_vanish_at_nyquist() {
        let g = Grid2D::periodic_2pi(8, 4).unwrap();
        let d = Multiplier::ddx(&g);
        assert_eq!(d.at(-4, 0), Complex64::new(0.0, 0.0));
        assert_eq!(d.at(1, 0), Complex64::new(0.0, 1.0));
        assert!(d.is_hermitian());
        assert!(Multiplier::abs_d(&g).is_hermitian());
        assert!(Multiplier::hilbert_x(&g).is_hermitian());
    }

    #[test]
    fn non_hermitian_symbol_is_flagged() {
        let g = Grid2D::periodic_2pi(8, 4).unwrap();
        let m = Multiplier::from_symbol(&g, Complex64::new(0.0, 0.0), |kx, _| {
            Complex64::new(0.0, kx * kx)
        });
        assert!(!m.is_hermitian());
    }

    #[test]
    fn zero_mode_value_is_used() {
        let g = Grid2D::periodic_2pi(8, 4).unwrap();
        assert_eq!(Multiplier::inv_abs_d(&g).at(0, 0).re, 0.0);
        assert_eq!(Multiplier::identity(&g).at(0, 0).re, 1.0);
    }
}
