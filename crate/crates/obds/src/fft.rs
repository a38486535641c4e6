//! Thin 2-D FFT helpers over `ndarray` grids.
//!
//! Forward transforms are unnormalized; the inverse divides by the number of
//! elements, so `ifft2(fft2(g)) == g` up to rounding.

use ndarray::Array2;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Cached row/column plans for one grid shape. Reuse across repeated
/// transforms of the same size (the solver calls this every iteration).
pub struct Fft2 {
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            rows,
            cols,
            row_fwd: planner.plan_fft_forward(cols),
            row_inv: planner.plan_fft_inverse(cols),
            col_fwd: planner.plan_fft_forward(rows),
            col_inv: planner.plan_fft_inverse(rows),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn transform(&self, grid: &Array2<Complex<f64>>, forward: bool) -> Array2<Complex<f64>> {
        assert_eq!(
            grid.dim(),
            (self.rows, self.cols),
            "plan/grid shape mismatch"
        );
        let (row_plan, col_plan) = if forward {
            (&self.row_fwd, &self.col_fwd)
        } else {
            (&self.row_inv, &self.col_inv)
        };

        let mut buf: Vec<Complex<f64>> = grid.iter().copied().collect();
        for row in buf.chunks_exact_mut(self.cols) {
            row_plan.process(row);
        }

        // Transpose so columns become contiguous, transform, transpose back.
        let mut tr = vec![Complex::new(0.0, 0.0); self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                tr[j * self.rows + i] = buf[i * self.cols + j];
            }
        }
        for col in tr.chunks_exact_mut(self.rows) {
            col_plan.process(col);
        }
        for j in 0..self.cols {
            for i in 0..self.rows {
                buf[i * self.cols + j] = tr[j * self.rows + i];
            }
        }

        if !forward {
            let scale = 1.0 / (self.rows * self.cols) as f64;
            for v in &mut buf {
                *v *= scale;
            }
        }
        Array2::from_shape_vec((self.rows, self.cols), buf).unwrap()
    }

    pub fn forward(&self, grid: &Array2<Complex<f64>>) -> Array2<Complex<f64>> {
        self.transform(grid, true)
    }

    pub fn inverse(&self, grid: &Array2<Complex<f64>>) -> Array2<Complex<f64>> {
        self.transform(grid, false)
    }

    pub fn forward_real(&self, grid: &Array2<f64>) -> Array2<Complex<f64>> {
        self.forward(&grid.mapv(|v| Complex::new(v, 0.0)))
    }

    /// Inverse transform keeping only the real part. Valid when the spectrum
    /// is conjugate-symmetric (imaginary residue is rounding noise).
    pub fn inverse_real(&self, grid: &Array2<Complex<f64>>) -> Array2<f64> {
        self.inverse(grid).mapv(|v| v.re)
    }
}

/// One-shot forward 2-D FFT.
pub fn fft2(grid: &Array2<Complex<f64>>) -> Array2<Complex<f64>> {
    Fft2::new(grid.nrows(), grid.ncols()).forward(grid)
}

/// One-shot normalized inverse 2-D FFT.
pub fn ifft2(grid: &Array2<Complex<f64>>) -> Array2<Complex<f64>> {
    Fft2::new(grid.nrows(), grid.ncols()).inverse(grid)
}

/// Forward FFT of a real grid.
pub fn fft2_real(grid: &Array2<f64>) -> Array2<Complex<f64>> {
    Fft2::new(grid.nrows(), grid.ncols()).forward_real(grid)
}
