//! Stripe-orientation estimation.
//!
//! Stripes concentrate spectral energy along a line through the origin
//! perpendicular to the stripe direction. After background elimination the
//! strongest off-DC Fourier coefficient pins that line down, and the stripe
//! angle follows from the perpendicular. The continuous angle is then mapped
//! to the nearest member of a finite set of lattice directions, each realized
//! exactly by an integer-offset difference operator the solver can apply.

use crate::error::{Error, Result};
use crate::fft::fft2_real;
use crate::guided::{background_eliminate, BackgroundParams};
use crate::image::{Image, OffsetOperator};
use ndarray::Array2;

/// A primitive lattice direction `(a, b)` together with its angle from the
/// upward vertical, in `[0, 180)` degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateDirection {
    a: i32,
    b: i32,
    theta_deg: f64,
}

impl CandidateDirection {
    /// Canonicalizes an offset (reduces by the gcd, flips into the half-plane
    /// `b < 0` or `(a, b) = (-1, 0)`) and computes its angle.
    pub fn from_offsets(a: i32, b: i32) -> Result<CandidateDirection> {
        if a == 0 && b == 0 {
            return Err(Error::invalid("direction offset must be nonzero"));
        }
        let g = gcd(a.unsigned_abs(), b.unsigned_abs()) as i32;
        let (mut a, mut b) = (a / g, b / g);
        if b > 0 || (b == 0 && a > 0) {
            a = -a;
            b = -b;
        }
        Ok(CandidateDirection {
            a,
            b,
            theta_deg: offset_angle_deg(a, b),
        })
    }

    pub fn offsets(&self) -> (i32, i32) {
        (self.a, self.b)
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta_deg
    }

    pub fn operator(&self) -> OffsetOperator {
        OffsetOperator::new(self.a, self.b).expect("candidate offsets are nonzero")
    }
}

fn gcd(mut x: u32, mut y: u32) -> u32 {
    while y != 0 {
        let t = x % y;
        x = y;
        y = t;
    }
    x.max(1)
}

/// Angle of the displacement `(a, b)` measured from the upward vertical,
/// reduced into `[0, 180)`. `(-1, 0)` is 0 degrees, `(0, -1)` is 90.
fn offset_angle_deg(a: i32, b: i32) -> f64 {
    (-b as f64).atan2(-a as f64).to_degrees().rem_euclid(180.0)
}

/// Default offset radius for candidate enumeration: dense enough that the
/// worst-case gap to the nearest candidate stays under 3.2 degrees.
pub const DEFAULT_CANDIDATE_RADIUS: u32 = 9;

/// Enumerates every primitive direction reachable within offset radius `r`:
/// straight up plus all `(a, b)` with `|a| <= r`, `-r <= b <= -1`,
/// `gcd(|a|, |b|) = 1`. Sorted by ascending angle; angles are pairwise
/// distinct and cover `[0, 180)`.
pub fn enumerate_candidates(r: u32) -> Result<Vec<CandidateDirection>> {
    if r == 0 {
        return Err(Error::invalid("candidate radius must be at least 1"));
    }
    let r = r as i32;
    let mut out = vec![CandidateDirection {
        a: -1,
        b: 0,
        theta_deg: 0.0,
    }];
    for a in -r..=r {
        for b in -r..=-1 {
            if gcd(a.unsigned_abs(), b.unsigned_abs()) == 1 {
                out.push(CandidateDirection {
                    a,
                    b,
                    theta_deg: offset_angle_deg(a, b),
                });
            }
        }
    }
    out.sort_by(|p, q| p.theta_deg.partial_cmp(&q.theta_deg).unwrap());
    Ok(out)
}

/// Frequency offsets of the strongest off-DC coefficient of a magnitude
/// grid, already mapped to the canonical member of the conjugate pair
/// (`du < 0`, or `du = 0` and `dv > 0`). Exact magnitude ties go to the
/// lexicographically smaller `(du, dv)`.
fn strongest_off_dc(mag: &Array2<f64>) -> Option<((i64, i64), f64)> {
    let (rows, cols) = mag.dim();
    let center = |idx: usize, len: usize| -> i64 {
        let idx = idx as i64;
        let len = len as i64;
        if idx >= (len + 1) / 2 {
            idx - len
        } else {
            idx
        }
    };
    let recenter = |x: i64, len: usize| -> i64 { center(x.rem_euclid(len as i64) as usize, len) };

    let mut best: Option<((i64, i64), f64)> = None;
    for u in 0..rows {
        for v in 0..cols {
            if u == 0 && v == 0 {
                continue;
            }
            let m = mag[(u, v)];
            let mut du = center(u, rows);
            let mut dv = center(v, cols);
            if du > 0 || (du == 0 && dv < 0) {
                du = recenter(-du, rows);
                dv = recenter(-dv, cols);
            }
            let better = match best {
                None => true,
                Some(((bu, bv), bm)) => m > bm || (m == bm && (du, dv) < (bu, bv)),
            };
            if better {
                best = Some(((du, dv), m));
            }
        }
    }
    best
}

/// Strongest off-DC frequency of the residual image. Errors when the
/// spectrum carries no usable energy outside DC (flat or constant input).
pub fn dominant_frequency(e: &Image) -> Result<(i64, i64)> {
    let spec = fft2_real(e.as_array());
    let mag = spec.mapv(|c| c.norm());
    let ((du, dv), peak) = strongest_off_dc(&mag).ok_or(Error::OrientationUndeterminable)?;
    // a tone of amplitude A occupies a bin of magnitude A * rows * cols / 2;
    // anything at rounding-noise level is indistinguishable from a constant
    let floor = 1e-12 * (e.rows() * e.cols()) as f64;
    if peak <= floor {
        return Err(Error::OrientationUndeterminable);
    }
    Ok((du, dv))
}

/// Stripe angle implied by a dominant frequency. The offsets are converted
/// to physical frequencies (cycles per pixel) before taking the
/// perpendicular, so non-square grids are handled correctly.
pub fn frequency_to_angle(du: i64, dv: i64, rows: usize, cols: usize) -> Result<f64> {
    if du == 0 && dv == 0 {
        return Err(Error::invalid("DC carries no orientation"));
    }
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("empty grid"));
    }
    let fu = du as f64 / rows as f64;
    let fv = dv as f64 / cols as f64;
    // (fu, fv) points across the stripes; the stripe direction is its
    // perpendicular, expressed as an angle from the upward vertical
    Ok(fu.atan2(-fv).to_degrees().rem_euclid(180.0))
}

/// Candidate whose angle is circularly closest (mod 180) to `theta_deg`.
/// Ties resolve to the smaller angle; the result does not depend on the
/// order of `candidates`.
pub fn select_candidate(
    theta_deg: f64,
    candidates: &[CandidateDirection],
) -> Result<CandidateDirection> {
    if candidates.is_empty() {
        return Err(Error::invalid("no candidate directions given"));
    }
    if !theta_deg.is_finite() {
        return Err(Error::invalid("angle must be finite"));
    }
    let dist = |t: f64| -> f64 {
        let d = (theta_deg - t).rem_euclid(180.0);
        d.min(180.0 - d)
    };
    let mut best = candidates[0];
    let mut best_d = dist(best.theta_deg);
    for c in &candidates[1..] {
        let d = dist(c.theta_deg);
        if d < best_d || (d == best_d && c.theta_deg < best.theta_deg) {
            best = *c;
            best_d = d;
        }
    }
    Ok(best)
}

/// Result of the full orientation stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientationEstimate {
    /// Continuous stripe angle from the spectrum, degrees in `[0, 180)`.
    pub theta_stripe_deg: f64,
    /// Nearest lattice direction, used by the solver.
    pub direction: CandidateDirection,
    /// Canonical dominant frequency offsets `(du, dv)` of the residual.
    pub dominant_freq: (i64, i64),
}

/// Runs background elimination, spectral peak search, and candidate
/// selection in one step.
pub fn estimate_orientation(
    y: &Image,
    r: u32,
    background: &BackgroundParams,
) -> Result<OrientationEstimate> {
    let candidates = enumerate_candidates(r)?;
    let e = background_eliminate(y, background)?;
    let (du, dv) = dominant_frequency(&e)?;
    let theta = frequency_to_angle(du, dv, y.rows(), y.cols())?;
    let direction = select_candidate(theta, &candidates)?;
    Ok(OrientationEstimate {
        theta_stripe_deg: theta,
        direction,
        dominant_freq: (du, dv),
    })
}
