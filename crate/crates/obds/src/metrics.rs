//! Full-reference (MAE, PSNR, SSIM) and non-reference (ICV, MRD) quality
//! metrics, plus the plain-text sample-window format the non-reference
//! metrics read their evaluation regions from.
//!
//! All metrics assume intensities on the unit scale; PSNR uses a fixed peak
//! of 1.0 so scores are comparable across images.

use crate::error::{Error, Result};
use crate::image::Image;
use ndarray::Array2;
use std::path::Path;

fn check_same_shape(a: &Image, b: &Image) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::ShapeMismatch {
            expected: a.dims(),
            got: b.dims(),
        });
    }
    Ok(())
}

/// Mean absolute error.
pub fn mae(a: &Image, b: &Image) -> Result<f64> {
    check_same_shape(a, b)?;
    let n = (a.rows() * a.cols()) as f64;
    Ok(a.as_array()
        .iter()
        .zip(b.as_array().iter())
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
        / n)
}

/// Peak signal-to-noise ratio in dB with peak 1.0. Identical inputs give
/// positive infinity.
pub fn psnr(a: &Image, b: &Image) -> Result<f64> {
    check_same_shape(a, b)?;
    let n = (a.rows() * a.cols()) as f64;
    let mse = a
        .as_array()
        .iter()
        .zip(b.as_array().iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / n;
    if mse == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(10.0 * (1.0 / mse).log10())
    }
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

fn gaussian_taps() -> [f64; SSIM_WINDOW] {
    let mut k = [0.0; SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    let mut sum = 0.0;
    for (i, tap) in k.iter_mut().enumerate() {
        let d = i as f64 - c;
        *tap = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        sum += *tap;
    }
    for tap in &mut k {
        *tap /= sum;
    }
    k
}

/// Separable valid-mode Gaussian filtering; output shrinks by the window
/// size minus one in each dimension.
fn gauss_valid(g: &Array2<f64>) -> Array2<f64> {
    let k = gaussian_taps();
    let (rows, cols) = g.dim();
    let oc = cols - SSIM_WINDOW + 1;
    let or = rows - SSIM_WINDOW + 1;
    let mut h = Array2::zeros((rows, oc));
    for i in 0..rows {
        for j in 0..oc {
            let mut acc = 0.0;
            for (t, w) in k.iter().enumerate() {
                acc += w * g[(i, j + t)];
            }
            h[(i, j)] = acc;
        }
    }
    let mut out = Array2::zeros((or, oc));
    for i in 0..or {
        for j in 0..oc {
            let mut acc = 0.0;
            for (t, w) in k.iter().enumerate() {
                acc += w * h[(i + t, j)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Mean structural similarity over an 11x11 Gaussian-weighted sliding window
/// (sigma 1.5, K1 = 0.01, K2 = 0.03, unit dynamic range), averaged over the
/// fully covered interior. Errors if either dimension is below 11.
pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    check_same_shape(a, b)?;
    let (rows, cols) = a.dims();
    if rows < SSIM_WINDOW || cols < SSIM_WINDOW {
        return Err(Error::invalid(format!(
            "ssim needs at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {rows}x{cols}"
        )));
    }
    let ga = a.as_array();
    let gb = b.as_array();

    let mu_a = gauss_valid(ga);
    let mu_b = gauss_valid(gb);
    let e_aa = gauss_valid(&(ga * ga));
    let e_bb = gauss_valid(&(gb * gb));
    let e_ab = gauss_valid(&(ga * gb));

    let c1 = (SSIM_K1 * 1.0f64).powi(2);
    let c2 = (SSIM_K2 * 1.0f64).powi(2);
    let mut sum = 0.0;
    for idx in ndarray::indices(mu_a.dim()) {
        let (ma, mb) = (mu_a[idx], mu_b[idx]);
        let va = e_aa[idx] - ma * ma;
        let vb = e_bb[idx] - mb * mb;
        let cov = e_ab[idx] - ma * mb;
        sum +=
            (2.0 * ma * mb + c1) * (2.0 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    Ok(sum / (mu_a.len() as f64))
}

/// A rectangular evaluation region, `[row0, row0 + height) x [col0, col0 + width)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub row0: usize,
    pub col0: usize,
    pub height: usize,
    pub width: usize,
}

impl Window {
    fn check_inside(&self, img: &Image) -> Result<()> {
        let (rows, cols) = img.dims();
        if self.height == 0 || self.width == 0 {
            return Err(Error::invalid("window must have positive size"));
        }
        if self.row0 + self.height > rows || self.col0 + self.width > cols {
            return Err(Error::invalid(format!(
                "window {self:?} exceeds image bounds {rows}x{cols}"
            )));
        }
        Ok(())
    }

    fn stats(&self, img: &Image) -> (f64, f64) {
        let mut sum = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let n = (self.height * self.width) as f64;
        for i in self.row0..self.row0 + self.height {
            for j in self.col0..self.col0 + self.width {
                let v = img[(i, j)];
                sum += v;
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        // summation rounding must not produce a phantom spread on an
        // exactly constant window
        if lo == hi {
            return (lo, 0.0);
        }
        let mean = sum / n;
        let mut var = 0.0;
        for i in self.row0..self.row0 + self.height {
            for j in self.col0..self.col0 + self.width {
                let d = img[(i, j)] - mean;
                var += d * d;
            }
        }
        (mean, (var / n).sqrt())
    }
}

/// Role of a sample window in non-reference evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowTag {
    /// Homogeneous region crossed by stripes; used by ICV.
    StripedHomogeneous,
    /// Region free of stripes; used by MRD.
    NoiseFree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleWindow {
    pub tag: WindowTag,
    pub window: Window,
}

/// Parses the sample-window text format: one window per line as
/// `tag row0 col0 height width`, `#` starting a comment, blank lines
/// ignored. Tags are `striped-homogeneous` and `noise-free`.
pub fn parse_windows(text: &str) -> Result<Vec<SampleWindow>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::invalid(format!(
                "windows line {}: expected `tag row0 col0 height width`, got {} fields",
                lineno + 1,
                fields.len()
            )));
        }
        let tag = match fields[0] {
            "striped-homogeneous" => WindowTag::StripedHomogeneous,
            "noise-free" => WindowTag::NoiseFree,
            other => {
                return Err(Error::invalid(format!(
                    "windows line {}: unknown tag `{other}`",
                    lineno + 1
                )))
            }
        };
        let mut nums = [0usize; 4];
        for (slot, field) in nums.iter_mut().zip(&fields[1..]) {
            *slot = field.parse().map_err(|_| {
                Error::invalid(format!(
                    "windows line {}: `{field}` is not a nonnegative integer",
                    lineno + 1
                ))
            })?;
        }
        out.push(SampleWindow {
            tag,
            window: Window {
                row0: nums[0],
                col0: nums[1],
                height: nums[2],
                width: nums[3],
            },
        });
    }
    Ok(out)
}

/// Reads and parses a sample-window file.
pub fn load_windows(path: &Path) -> Result<Vec<SampleWindow>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_windows(&text).map_err(|e| match e {
        Error::InvalidInput(msg) => Error::BadFormat {
            path: path.to_path_buf(),
            reason: msg,
        },
        other => other,
    })
}

/// ICV of one window: higher means flatter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcvValue {
    pub window: Window,
    /// Window mean over window standard deviation, capped at the sentinel.
    pub value: f64,
    /// True when the window is exactly constant (the value is the sentinel).
    pub constant: bool,
}

/// Sentinel and cap for ICV on (near-)constant windows.
pub const ICV_SENTINEL: f64 = 1e6;

/// Inverse coefficient of variation (window mean / population standard
/// deviation) over homogeneous windows. Constant windows report the capped
/// sentinel and are flagged.
pub fn icv(img: &Image, windows: &[Window]) -> Result<Vec<IcvValue>> {
    let mut out = Vec::with_capacity(windows.len());
    for w in windows {
        w.check_inside(img)?;
        let (mean, std) = w.stats(img);
        let (value, constant) = if std == 0.0 {
            (ICV_SENTINEL, true)
        } else {
            ((mean / std).min(ICV_SENTINEL), false)
        };
        out.push(IcvValue {
            window: *w,
            value,
            constant,
        });
    }
    Ok(out)
}

/// MRD over all noise-free windows combined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MrdValue {
    /// Mean relative deviation, in percent.
    pub value: f64,
    /// Pixels skipped because the noisy value was exactly zero.
    pub excluded: usize,
}

/// Mean relative deviation (percent) between the noisy input and the
/// destriped output over stripe-free windows. A faithful method leaves such
/// regions almost untouched, so small is better. Zero-valued noisy pixels
/// cannot be normalized and are excluded and counted.
pub fn mrd(noisy: &Image, destriped: &Image, windows: &[Window]) -> Result<MrdValue> {
    check_same_shape(noisy, destriped)?;
    if windows.is_empty() {
        return Err(Error::invalid("mrd needs at least one window"));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut excluded = 0usize;
    for w in windows {
        w.check_inside(noisy)?;
        for i in w.row0..w.row0 + w.height {
            for j in w.col0..w.col0 + w.width {
                let n = noisy[(i, j)];
                if n == 0.0 {
                    excluded += 1;
                    continue;
                }
                sum += 100.0 * (destriped[(i, j)] - n).abs() / n.abs();
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(Error::invalid(
            "every pixel in the noise-free windows has zero value",
        ));
    }
    Ok(MrdValue {
        value: sum / count as f64,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn img(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> f64) -> Image {
        Image::from_fn(rows, cols, f).unwrap()
    }

    fn random_image(rows: usize, cols: usize, seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        img(rows, cols, |_, _| rng.random_range(0.0..1.0))
    }

    #[test]
    fn mae_is_the_mean_absolute_difference() {
        let a = Image::from_raw(1, 3, vec![0.0, 0.5, 1.0]).unwrap();
        let b = Image::from_raw(1, 3, vec![0.1, 0.4, 1.1]).unwrap();
        assert!((mae(&a, &b).unwrap() - 0.1).abs() < 1e-12);
        assert!(mae(&a, &random_image(2, 2, 0)).is_err());
    }

    #[test]
    fn psnr_of_a_uniform_tenth_offset_is_twenty_db() {
        let a = Image::constant(8, 8, 0.4).unwrap();
        let b = Image::constant(8, 8, 0.5).unwrap();
        assert!((psnr(&a, &b).unwrap() - 20.0).abs() < 1e-9);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        assert_eq!(psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
    }

    #[test]
    fn psnr_decreases_as_noise_grows() {
        let a = random_image(32, 32, 1);
        let mut prev = f64::INFINITY;
        for level in 1..=5 {
            let sigma = level as f64 * 0.02;
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            let noisy = img(32, 32, |i, j| a[(i, j)] + rng.random_range(-sigma..sigma));
            let p = psnr(&a, &noisy).unwrap();
            assert!(p < prev, "level {level}: {p} !< {prev}");
            prev = p;
        }
    }

    /// Direct sliding-window SSIM with an explicitly built 2-D kernel.
    fn naive_ssim(a: &Image, b: &Image) -> f64 {
        let mut kernel = [[0.0f64; SSIM_WINDOW]; SSIM_WINDOW];
        let c = (SSIM_WINDOW / 2) as f64;
        let mut total = 0.0;
        for (i, row) in kernel.iter_mut().enumerate() {
            for (j, w) in row.iter_mut().enumerate() {
                let (di, dj) = (i as f64 - c, j as f64 - c);
                *w = (-(di * di + dj * dj) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
                total += *w;
            }
        }
        for row in kernel.iter_mut() {
            for w in row.iter_mut() {
                *w /= total;
            }
        }
        let c1 = SSIM_K1 * SSIM_K1;
        let c2 = SSIM_K2 * SSIM_K2;
        let (rows, cols) = a.dims();
        let mut sum = 0.0;
        let mut count = 0.0;
        for i0 in 0..=(rows - SSIM_WINDOW) {
            for j0 in 0..=(cols - SSIM_WINDOW) {
                let (mut ma, mut mb, mut aa, mut bb, mut ab) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for di in 0..SSIM_WINDOW {
                    for dj in 0..SSIM_WINDOW {
                        let w = kernel[di][dj];
                        let x = a[(i0 + di, j0 + dj)];
                        let y = b[(i0 + di, j0 + dj)];
                        ma += w * x;
                        mb += w * y;
                        aa += w * x * x;
                        bb += w * y * y;
                        ab += w * x * y;
                    }
                }
                let (va, vb, cov) = (aa - ma * ma, bb - mb * mb, ab - ma * mb);
                sum += (2.0 * ma * mb + c1) * (2.0 * cov + c2)
                    / ((ma * ma + mb * mb + c1) * (va + vb + c2));
                count += 1.0;
            }
        }
        sum / count
    }

    #[test]
    fn ssim_matches_the_direct_window_reference() {
        let a = random_image(24, 20, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let b = img(24, 20, |i, j| {
            (a[(i, j)] + rng.random_range(-0.1..0.1)).clamp(0.0, 1.0)
        });
        let fast = ssim(&a, &b).unwrap();
        let slow = naive_ssim(&a, &b);
        assert!((fast - slow).abs() < 1e-8, "{fast} vs {slow}");
    }

    #[test]
    fn ssim_basics() {
        let a = random_image(32, 32, 2);
        assert_eq!(ssim(&a, &a).unwrap(), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = img(32, 32, |i, j| {
            (a[(i, j)] + rng.random_range(-0.2..0.2)).clamp(0.0, 1.0)
        });
        let s = ssim(&a, &b).unwrap();
        assert!(s < 1.0 && s > 0.0);
        assert_eq!(s, ssim(&b, &a).unwrap());

        // structural inversion of a high-contrast pattern is negative
        let hc = img(
            32,
            32,
            |i, j| if (i / 4 + j / 4) % 2 == 0 { 0.9 } else { 0.1 },
        );
        let inv = img(32, 32, |i, j| 1.0 - hc[(i, j)]);
        assert!(ssim(&hc, &inv).unwrap() < 0.0);

        let small = Image::constant(10, 32, 0.5).unwrap();
        assert!(ssim(&small, &small).is_err());
    }

    #[test]
    fn icv_uses_mean_over_population_std() {
        // alternating 0.5 +/- 0.0625: mean 0.5, std 0.0625 exactly
        let a = img(8, 8, |i, j| if (i + j) % 2 == 0 { 0.5625 } else { 0.4375 });
        let w = Window {
            row0: 0,
            col0: 0,
            height: 8,
            width: 8,
        };
        let got = icv(&a, &[w]).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].value, 8.0);
        assert!(!got[0].constant);
    }

    #[test]
    fn icv_flags_constant_windows_with_the_sentinel() {
        let a = Image::constant(8, 8, 0.3).unwrap();
        let w = Window {
            row0: 2,
            col0: 2,
            height: 4,
            width: 4,
        };
        let got = icv(&a, &[w]).unwrap();
        assert_eq!(got[0].value, ICV_SENTINEL);
        assert!(got[0].constant);
    }

    #[test]
    fn icv_rises_when_stripes_are_removed() {
        let striped = img(16, 16, |_, j| 0.5 + if j % 2 == 0 { 0.05 } else { -0.05 });
        let flat = img(16, 16, |_, _| 0.5 + 1e-4);
        let w = Window {
            row0: 0,
            col0: 0,
            height: 16,
            width: 16,
        };
        let before = icv(&striped, &[w]).unwrap()[0].value;
        let after = icv(&flat, &[w]).unwrap()[0].value;
        assert!(after > before);
    }

    #[test]
    fn windows_must_fit_inside_the_image() {
        let a = Image::constant(8, 8, 0.5).unwrap();
        let w = Window {
            row0: 4,
            col0: 4,
            height: 5,
            width: 2,
        };
        assert!(icv(&a, &[w]).is_err());
        let z = Window {
            row0: 0,
            col0: 0,
            height: 0,
            width: 3,
        };
        assert!(icv(&a, &[z]).is_err());
    }

    #[test]
    fn mrd_is_zero_for_identical_and_one_percent_for_uniform_drift() {
        let n = random_image(12, 12, 7);
        let w = Window {
            row0: 1,
            col0: 1,
            height: 10,
            width: 10,
        };
        assert_eq!(mrd(&n, &n, &[w]).unwrap().value, 0.0);
        let d = img(12, 12, |i, j| n[(i, j)] * 1.01);
        let got = mrd(&n, &d, &[w]).unwrap();
        assert!((got.value - 1.0).abs() < 1e-9, "{}", got.value);
        assert_eq!(got.excluded, 0);
    }

    #[test]
    fn mrd_excludes_zero_valued_noisy_pixels() {
        let mut vals = vec![0.5; 16];
        vals[5] = 0.0;
        let n = Image::from_raw(4, 4, vals).unwrap();
        let d = Image::constant(4, 4, 0.55).unwrap();
        let w = Window {
            row0: 0,
            col0: 0,
            height: 4,
            width: 4,
        };
        let got = mrd(&n, &d, &[w]).unwrap();
        assert_eq!(got.excluded, 1);
        assert!((got.value - 10.0).abs() < 1e-9);

        let zeros = Image::constant(4, 4, 0.0).unwrap();
        assert!(mrd(&zeros, &d, &[w]).is_err());
        assert!(mrd(&n, &d, &[]).is_err());
    }

    #[test]
    fn window_files_parse_tags_comments_and_blanks() {
        let text = "\
# evaluation regions
striped-homogeneous 4 8 10 12   # flat area crossed by stripes

noise-free 30 2 6 6
";
        let got = parse_windows(text).unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].tag, WindowTag::StripedHomogeneous);
        assert_eq!(
            got[0].window,
            Window {
                row0: 4,
                col0: 8,
                height: 10,
                width: 12
            }
        );
        assert_eq!(got[1].tag, WindowTag::NoiseFree);

        assert!(parse_windows("smooth 1 2 3 4").is_err());
        assert!(parse_windows("noise-free 1 2 3").is_err());
        assert!(parse_windows("noise-free 1 2 3 x").is_err());
    }

    proptest! {
        #[test]
        fn full_reference_metrics_are_symmetric(seed in 0u64..500) {
            let a = random_image(12, 12, seed);
            let b = random_image(12, 12, seed.wrapping_add(1));
            prop_assert_eq!(mae(&a, &b).unwrap(), mae(&b, &a).unwrap());
            prop_assert_eq!(psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
            let s_ab = ssim(&a, &b).unwrap();
            let s_ba = ssim(&b, &a).unwrap();
            prop_assert!((s_ab - s_ba).abs() < 1e-12);
        }

        #[test]
        fn icv_is_invariant_to_positive_scaling(seed in 0u64..500, scale in 0.1f64..10.0) {
            let a = random_image(16, 16, seed);
            let scaled = img(16, 16, |i, j| a[(i, j)] * scale);
            let w = Window { row0: 2, col0: 3, height: 10, width: 10 };
            let plain = icv(&a, &[w]).unwrap()[0].value;
            let after = icv(&scaled, &[w]).unwrap()[0].value;
            prop_assert!((plain - after).abs() < 1e-9 * plain.abs().max(1.0));
        }
    }
}
