//! Seeded synthetic stripe generation for experiments and regression tests.
//!
//! Stripes are injected along an image axis first; [`make_oblique`] then
//! rotates the degraded image and the clean truth by the same angle with the
//! same interior crop, producing an aligned oblique pair whose difference is
//! exactly the rotated stripe field.

use crate::error::{Error, Result};
use crate::image::{rotate, Image, Interpolation};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// How stripe offsets are assigned to lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StripeKind {
    /// Square-wave pattern: the first half of every `period` lines gets
    /// `+amplitude`, the second half `-amplitude`.
    Periodic { period: usize },
    /// Each line is independently striped with probability `coverage`; a
    /// striped line gets an offset drawn uniformly from
    /// `(-amplitude, amplitude)`.
    Random { coverage: f64 },
}

/// Axis the stripe lines run along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripeAxis {
    /// Lines run top to bottom; offsets are per column.
    Vertical,
    /// Lines run left to right; offsets are per row.
    Horizontal,
}

/// Full description of a stripe pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripeSpec {
    pub kind: StripeKind,
    pub axis: StripeAxis,
    /// Peak absolute stripe offset.
    pub amplitude: f64,
    /// Seed for the random kind; ignored by the periodic kind.
    pub seed: u64,
}

impl StripeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.amplitude <= 0.0 || !self.amplitude.is_finite() {
            return Err(Error::invalid("stripe amplitude must be positive"));
        }
        match self.kind {
            StripeKind::Periodic { period } => {
                if period < 2 {
                    return Err(Error::invalid("stripe period must be at least 2"));
                }
            }
            StripeKind::Random { coverage } => {
                if !(0.0..=1.0).contains(&coverage) {
                    return Err(Error::invalid("stripe coverage must lie in [0, 1]"));
                }
            }
        }
        Ok(())
    }
}

/// Per-line stripe offsets for `count` lines.
fn line_offsets(spec: &StripeSpec, count: usize) -> Vec<f64> {
    match spec.kind {
        StripeKind::Periodic { period } => (0..count)
            .map(|l| {
                if (l % period) * 2 < period {
                    spec.amplitude
                } else {
                    -spec.amplitude
                }
            })
            .collect(),
        StripeKind::Random { coverage } => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            (0..count)
                .map(|_| {
                    if rng.random_range(0.0..1.0) < coverage {
                        rng.random_range(-spec.amplitude..spec.amplitude)
                    } else {
                        0.0
                    }
                })
                .collect()
        }
    }
}

/// Adds axis-aligned stripes to a clean image. Returns
/// `(degraded, stripe_field)` with `degraded = clean + stripe_field` exactly;
/// the stripe field is constant along each line and bounded by the amplitude.
pub fn add_stripes(clean: &Image, spec: &StripeSpec) -> Result<(Image, Image)> {
    spec.validate()?;
    let (rows, cols) = clean.dims();
    let offsets = match spec.axis {
        StripeAxis::Vertical => line_offsets(spec, cols),
        StripeAxis::Horizontal => line_offsets(spec, rows),
    };
    let field = Image::from_fn(rows, cols, |i, j| match spec.axis {
        StripeAxis::Vertical => offsets[j],
        StripeAxis::Horizontal => offsets[i],
    })?;
    let degraded = Image::from_array(clean.as_array() + field.as_array())?;
    Ok((degraded, field))
}

/// Rotates a degraded/truth pair by the same angle with bilinear resampling.
/// Both outputs share the same interior crop, so they stay pixel-aligned.
pub fn make_oblique(degraded: &Image, clean: &Image, angle_deg: f64) -> Result<(Image, Image)> {
    if degraded.dims() != clean.dims() {
        return Err(Error::ShapeMismatch {
            expected: degraded.dims(),
            got: clean.dims(),
        });
    }
    let y = rotate(degraded, angle_deg, Interpolation::Bilinear)?;
    let truth = rotate(clean, angle_deg, Interpolation::Bilinear)?;
    Ok((y, truth))
}

/// Adds zero-mean Gaussian noise with the given standard deviation.
pub fn add_gaussian_noise(img: &Image, sigma: f64, seed: u64) -> Result<Image> {
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(Error::invalid("noise sigma must be nonnegative"));
    }
    let normal =
        Normal::new(0.0, sigma).map_err(|e| Error::invalid(format!("bad noise sigma: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Image::from_fn(img.rows(), img.cols(), |i, j| {
        img[(i, j)] + normal.sample(&mut rng)
    })
}

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// Deterministic scene-like test field: several octaves of interpolated
/// lattice noise plus two soft-edged patches, normalized to [0, 1].
/// Different variants give different but reproducible content; the variant
/// also selects a texture style (`variant % 4`), cycling through balanced,
/// gentle, detailed, and coarse scenes.
///
/// The texture is stationary by construction. Long coherent ramps are
/// deliberately absent: a destriping model cannot distinguish a smooth
/// gradient that runs across the stripe direction from a dense bundle of
/// faint stripes, so bases dominated by such ramps make recovery ill-posed
/// rather than merely hard.
pub fn procedural_base(rows: usize, cols: usize, variant: u64) -> Result<Image> {
    if rows < 16 || cols < 16 {
        return Err(Error::invalid("base images must be at least 16x16"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b5e_ba5e ^ variant);
    let n = rows.min(cols);

    // Octave tables per style: (lattice divisor, amplitude) pairs from
    // coarse to fine.
    let style: &[(usize, f64)] = match variant % 4 {
        0 => &[
            (8, 0.05),
            (16, 0.045),
            (32, 0.04),
            (64, 0.035),
            (128, 0.025),
        ],
        1 => &[(8, 0.055), (16, 0.045), (32, 0.035), (64, 0.02)],
        2 => &[(8, 0.04), (16, 0.045), (32, 0.05), (64, 0.055), (128, 0.05)],
        _ => &[(4, 0.06), (8, 0.05), (16, 0.04)],
    };

    // Value-noise octaves: a coarse-to-fine stack of random lattices, each
    // sampled with smoothstep interpolation.
    let octaves: Vec<(Array2<f64>, usize, f64)> = style
        .iter()
        .map(|&(div, amp)| {
            let cell = (n / div).max(2);
            let lattice = Array2::from_shape_fn((rows / cell + 2, cols / cell + 2), |_| {
                rng.random_range(-1.0..1.0)
            });
            (lattice, cell, amp)
        })
        .collect();
    let sample = |lattice: &Array2<f64>, cell: usize, i: usize, j: usize| -> f64 {
        let u = i as f64 / cell as f64;
        let v = j as f64 / cell as f64;
        let (i0, j0) = (u as usize, v as usize);
        let (fu, fv) = (smoothstep(u - i0 as f64), smoothstep(v - j0 as f64));
        let a = lattice[(i0, j0)];
        let b = lattice[(i0, j0 + 1)];
        let c = lattice[(i0 + 1, j0)];
        let d = lattice[(i0 + 1, j0 + 1)];
        a + (b - a) * fv + (c - a) * fu + (a - b - c + d) * fu * fv
    };

    // one soft rectangle and one soft disc
    let rect = (
        rng.random_range(0.15..0.45),
        rng.random_range(0.15..0.45),
        rng.random_range(0.2..0.35),
        rng.random_range(0.2..0.35),
        rng.random_range(0.12..0.18),
    );
    let disc = (
        rng.random_range(0.55..0.8),
        rng.random_range(0.55..0.8),
        rng.random_range(0.12..0.22),
        -rng.random_range(0.12..0.18),
    );
    let edge = 2.0 / n as f64;

    let img = Image::from_fn(rows, cols, |i, j| {
        let x = j as f64 / (cols - 1) as f64;
        let y = i as f64 / (rows - 1) as f64;
        let mut v = 0.5;
        for (lattice, cell, amp) in &octaves {
            v += amp * sample(lattice, *cell, i, j);
        }
        let (ry, rx, rh, rw, ramp) = rect;
        let inside_y = smoothstep((y - ry) / edge + 0.5) * smoothstep((ry + rh - y) / edge + 0.5);
        let inside_x = smoothstep((x - rx) / edge + 0.5) * smoothstep((rx + rw - x) / edge + 0.5);
        v += ramp * inside_y * inside_x;
        let (cy, cx, cr, camp) = disc;
        let dist = ((y - cy).powi(2) + (x - cx).powi(2)).sqrt();
        v += camp * smoothstep((cr - dist) / edge + 0.5);
        v
    })?;
    Ok(img.normalized())
}

/// Named bundled bases: `smoothN` is an `N x N` procedural field, for
/// `N` in 32..=4096 (for example `smooth200`). Returns `None` for unknown
/// names.
pub fn builtin_base(name: &str) -> Option<Image> {
    let n: usize = name.strip_prefix("smooth")?.parse().ok()?;
    if !(32..=4096).contains(&n) {
        return None;
    }
    procedural_base(n, n, 0).ok()
}
