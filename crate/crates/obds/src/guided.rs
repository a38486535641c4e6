//! Self-guided edge-preserving filtering and background elimination.
//!
//! The stripe direction is estimated from a residual image rather than the
//! raw input: a guided filter run with the image as its own guide keeps
//! scene structure (edges survive because local variance drives the linear
//! coefficient toward 1) while low-contrast stripes fall into the residual.
//! Scaling that residual makes the stripe spectrum stand out.

use crate::error::{Error, Result};
use crate::image::Image;
use ndarray::Array2;

/// Parameters of the background-elimination step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundParams {
    /// Guided-filter window radius (window side is `2 * radius + 1`).
    pub radius: usize,
    /// Regularization added to the window variance; sits between the typical
    /// variance of stripes (suppressed) and of scene edges (preserved).
    pub eps: f64,
    /// Multiplier applied to the residual before spectral analysis.
    pub boost: f64,
}

impl Default for BackgroundParams {
    fn default() -> Self {
        BackgroundParams {
            radius: 1,
            eps: 0.01,
            boost: 5.0,
        }
    }
}

impl BackgroundParams {
    pub fn validate(&self) -> Result<()> {
        if self.radius == 0 {
            return Err(Error::invalid("guided filter radius must be at least 1"));
        }
        if self.eps <= 0.0 || !self.eps.is_finite() {
            return Err(Error::invalid("guided filter eps must be positive"));
        }
        if self.boost <= 0.0 || !self.boost.is_finite() {
            return Err(Error::invalid("background boost factor must be positive"));
        }
        Ok(())
    }
}

/// Sums over truncated `(2r+1)` windows along rows then columns. Windows are
/// clipped at the image border; no padding values are invented.
fn box_sum(g: &Array2<f64>, radius: usize) -> Array2<f64> {
    let (rows, cols) = g.dim();
    let r = radius as i64;
    let mut h = Array2::zeros((rows, cols));
    for i in 0..rows {
        for j in 0..cols {
            let lo = (j as i64 - r).max(0) as usize;
            let hi = (j as i64 + r).min(cols as i64 - 1) as usize;
            let mut acc = 0.0;
            for jj in lo..=hi {
                acc += g[(i, jj)];
            }
            h[(i, j)] = acc;
        }
    }
    let mut out = Array2::zeros((rows, cols));
    for j in 0..cols {
        for i in 0..rows {
            let lo = (i as i64 - r).max(0) as usize;
            let hi = (i as i64 + r).min(rows as i64 - 1) as usize;
            let mut acc = 0.0;
            for ii in lo..=hi {
                acc += h[(ii, j)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Per-pixel count of samples in the truncated window.
fn box_count(rows: usize, cols: usize, radius: usize) -> Array2<f64> {
    let r = radius as i64;
    let span = |idx: usize, len: usize| -> f64 {
        let lo = (idx as i64 - r).max(0);
        let hi = (idx as i64 + r).min(len as i64 - 1);
        (hi - lo + 1) as f64
    };
    Array2::from_shape_fn((rows, cols), |(i, j)| span(i, rows) * span(j, cols))
}

/// Guided filter with the input as its own guide.
///
/// Within every truncated window the filter fits `q = a * y + b` with
/// `a = var / (var + eps)` and `b = (1 - a) * mean`, then averages the
/// coefficients of all windows covering a pixel. Population variance is used.
pub fn guided_self_filter(y: &Image, radius: usize, eps: f64) -> Result<Image> {
    let params = BackgroundParams {
        radius,
        eps,
        boost: 1.0,
    };
    params.validate()?;
    let (rows, cols) = y.dims();
    let side = 2 * radius + 1;
    if rows < side || cols < side {
        return Err(Error::invalid(format!(
            "image {rows}x{cols} is smaller than the {side}x{side} filter window"
        )));
    }

    let g = y.as_array();
    let n = box_count(rows, cols, radius);
    let mean = box_sum(g, radius) / &n;
    let sq = box_sum(&(g * g), radius) / &n;
    let mut var = &sq - &(&mean * &mean);
    var.mapv_inplace(|v| v.max(0.0));

    let a = var.mapv(|v| v / (v + eps));
    let b = (1.0 - &a) * &mean;
    let a_bar = box_sum(&a, radius) / &n;
    let b_bar = box_sum(&b, radius) / &n;

    Image::from_array(a_bar * g + b_bar)
}

/// Boosted residual after removing the self-guided base layer:
/// `E = boost * (y - guided_self_filter(y))`.
pub fn background_eliminate(y: &Image, params: &BackgroundParams) -> Result<Image> {
    params.validate()?;
    let base = guided_self_filter(y, params.radius, params.eps)?;
    Image::from_array(params.boost * &(y.as_array() - base.as_array()))
}
