//! Two-dimensional transforms built from batched 1-D FFTs.
//!
//! Physical arrays are stored row-major as `[ix][iy]` (y contiguous).
//! Spectral arrays are stored as `[iy][ix]` (x contiguous) so the x-axis
//! transforms run as a single batched call. Real fields use a half spectrum
//! over `iy in 0..=ny/2`. All transforms here are unnormalized; callers
//! apply the `1/(nx*ny)` factor.

use std::sync::Arc;

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

pub(crate) struct Plan2D {
    pub nx: usize,
    pub ny: usize,
    r2c_y: Arc<dyn RealToComplex<f64>>,
    c2r_y: Arc<dyn ComplexToReal<f64>>,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl Plan2D {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut real = RealFftPlanner::<f64>::new();
        let mut cplx = FftPlanner::<f64>::new();
        Plan2D {
            nx,
            ny,
            r2c_y: real.plan_fft_forward(ny),
            c2r_y: real.plan_fft_inverse(ny),
            fwd_x: cplx.plan_fft_forward(nx),
            inv_x: cplx.plan_fft_inverse(nx),
            fwd_y: cplx.plan_fft_forward(ny),
            inv_y: cplx.plan_fft_inverse(ny),
        }
    }

    #[inline]
    pub fn nh(&self) -> usize {
        self.ny / 2 + 1
    }

    /// Real `[ix][iy]` samples to half spectrum `[iy][ix]`.
    pub fn forward_real(&self, input: &[f64]) -> Vec<Complex64> {
        let (nx, ny, nh) = (self.nx, self.ny, self.nh());
        debug_assert_eq!(input.len(), nx * ny);
        let mut inbuf = input.to_vec();
        let mut rows = vec![Complex64::new(0.0, 0.0); nx * nh];
        let mut scratch = self.r2c_y.make_scratch_vec();
        for (src, dst) in inbuf.chunks_exact_mut(ny).zip(rows.chunks_exact_mut(nh)) {
            self.r2c_y
                .process_with_scratch(src, dst, &mut scratch)
                .expect("r2c length mismatch");
        }
        let mut cols = transpose(&rows, nx, nh);
        self.fwd_x.process(&mut cols);
        cols
    }

    /// Half spectrum `[iy][ix]` to real `[ix][iy]` samples.
    pub fn inverse_real(&self, spec: &[Complex64]) -> Vec<f64> {
        let (nx, ny, nh) = (self.nx, self.ny, self.nh());
        debug_assert_eq!(spec.len(), nx * nh);
        let mut cols = spec.to_vec();
        self.inv_x.process(&mut cols);
        let mut rows = transpose(&cols, nh, nx);
        let mut out = vec![0.0; nx * ny];
        let mut scratch = self.c2r_y.make_scratch_vec();
        for (src, dst) in rows.chunks_exact_mut(nh).zip(out.chunks_exact_mut(ny)) {
            // the zero and Nyquist entries of a real row are real
            src[0].im = 0.0;
            src[nh - 1].im = 0.0;
            self.c2r_y
                .process_with_scratch(src, dst, &mut scratch)
                .expect("c2r length mismatch");
        }
        out
    }

    /// Complex `[ix][iy]` samples to full spectrum `[iy][ix]`.
    pub fn forward_complex(&self, input: &[Complex64]) -> Vec<Complex64> {
        let (nx, ny) = (self.nx, self.ny);
        let mut rows = input.to_vec();
        self.fwd_y.process(&mut rows);
        let mut cols = transpose(&rows, nx, ny);
        self.fwd_x.process(&mut cols);
        cols
    }

    /// Full spectrum `[iy][ix]` to complex `[ix][iy]` samples.
    pub fn inverse_complex(&self, spec: &[Complex64]) -> Vec<Complex64> {
        let (nx, ny) = (self.nx, self.ny);
        let mut cols = spec.to_vec();
        self.inv_x.process(&mut cols);
        let mut rows = transpose(&cols, ny, nx);
        self.inv_y.process(&mut rows);
        rows
    }
}

/// Transpose a row-major `rows x cols` array.
fn transpose<T: Copy>(a: &[T], rows: usize, cols: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len());
    for c in 0..cols {
        out.extend((0..rows).map(|r| a[r * cols + c]));
    }
    out
}
