//! Image file input and output.
//!
//! Three formats are supported, chosen by file extension:
//!
//! * `.png`: 8- or 16-bit grayscale on read; always 16-bit grayscale on
//!   write, with values clipped to [0, 1] and quantized.
//! * `.pgm`: binary (P5) graymap, same sample handling as PNG.
//! * `.obds`: raw little-endian `f32` grid with a 16-byte header. This is
//!   the only format that stores values outside [0, 1], such as signed
//!   stripe fields, without an encoding offset.
//!
//! The `.obds` layout is: magic `OBDS`, `u32` row count, `u32` column
//! count, `u32` reserved (zero), then row-major `f32` samples.

use crate::error::{Error, Result};
use crate::image::Image;
use image::{DynamicImage, ImageBuffer, Luma};
use std::fs;
use std::io::Write;
use std::path::Path;

/// File formats recognized by the readers and writers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Png,
    Pgm,
    /// Raw float grid; lossless for any finite data.
    Obds,
}

const OBDS_MAGIC: &[u8; 4] = b"OBDS";
const OBDS_HEADER_LEN: usize = 16;

/// Determines the format for a path from its extension
/// (case insensitive).
pub fn format_for_path(path: &Path) -> Result<FileFormat> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    match ext.as_deref() {
        Some("png") => Ok(FileFormat::Png),
        Some("pgm") => Ok(FileFormat::Pgm),
        Some("obds") => Ok(FileFormat::Obds),
        _ => Err(Error::BadFormat {
            path: path.to_path_buf(),
            reason: "unrecognized extension; expected .png, .pgm or .obds".into(),
        }),
    }
}

/// True when the path's format stores raw floats with no quantization.
pub fn is_raw(path: &Path) -> bool {
    matches!(format_for_path(path), Ok(FileFormat::Obds))
}

/// Reads a grayscale image. Integer samples are mapped to [0, 1] by
/// dividing by the sample type's maximum.
pub fn read_image(path: &Path) -> Result<Image> {
    match format_for_path(path)? {
        FileFormat::Obds => read_obds(path),
        FileFormat::Png | FileFormat::Pgm => read_gray(path),
    }
}

/// Writes an image in the format implied by the path's extension.
pub fn write_image(path: &Path, img: &Image) -> Result<()> {
    match format_for_path(path)? {
        FileFormat::Obds => write_obds(path, img),
        f @ (FileFormat::Png | FileFormat::Pgm) => write_gray(path, img, f),
    }
}

fn read_gray(path: &Path) -> Result<Image> {
    let decoded = image::open(path).map_err(|source| Error::Codec {
        path: path.to_path_buf(),
        source,
    })?;
    let (data, rows, cols) = match decoded {
        DynamicImage::ImageLuma8(buf) => {
            let (w, h) = buf.dimensions();
            let data: Vec<f64> = buf.as_raw().iter().map(|&v| v as f64 / 255.0).collect();
            (data, h as usize, w as usize)
        }
        DynamicImage::ImageLuma16(buf) => {
            let (w, h) = buf.dimensions();
            let data: Vec<f64> = buf.as_raw().iter().map(|&v| v as f64 / 65535.0).collect();
            (data, h as usize, w as usize)
        }
        other => {
            return Err(Error::BadFormat {
                path: path.to_path_buf(),
                reason: format!(
                    "expected 8- or 16-bit grayscale samples, found {:?}",
                    other.color()
                ),
            })
        }
    };
    Image::from_raw(rows, cols, data)
}

fn quantize(img: &Image) -> Vec<u16> {
    img.as_array()
        .iter()
        .map(|v| (v.clamp(0.0, 1.0) * 65535.0).round() as u16)
        .collect()
}

fn write_gray(path: &Path, img: &Image, format: FileFormat) -> Result<()> {
    let (rows, cols) = img.dims();
    let samples = quantize(img);
    match format {
        FileFormat::Png => {
            let buf =
                ImageBuffer::<Luma<u16>, Vec<u16>>::from_raw(cols as u32, rows as u32, samples)
                    .expect("sample count matches dimensions");
            DynamicImage::ImageLuma16(buf)
                .save(path)
                .map_err(|source| Error::Codec {
                    path: path.to_path_buf(),
                    source,
                })
        }
        // the pnm encoder caps binary graymaps at 8 bits, so emit the
        // 16-bit P5 layout (header, then big-endian samples) directly
        FileFormat::Pgm => {
            let io_err = |source| Error::Io {
                path: path.to_path_buf(),
                source,
            };
            let file = fs::File::create(path).map_err(io_err)?;
            let mut w = std::io::BufWriter::new(file);
            write!(w, "P5\n{cols} {rows}\n65535\n").map_err(io_err)?;
            for s in samples {
                w.write_all(&s.to_be_bytes()).map_err(io_err)?;
            }
            w.flush().map_err(io_err)
        }
        FileFormat::Obds => unreachable!("raw grids are written by write_obds"),
    }
}

fn read_obds(path: &Path) -> Result<Image> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |reason: &str| Error::BadFormat {
        path: path.to_path_buf(),
        reason: reason.into(),
    };
    if bytes.len() < OBDS_HEADER_LEN {
        return Err(bad("file shorter than the 16-byte header"));
    }
    if &bytes[0..4] != OBDS_MAGIC {
        return Err(bad("missing OBDS magic"));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
    let rows = word(4) as usize;
    let cols = word(8) as usize;
    if word(12) != 0 {
        return Err(bad("reserved header word must be zero"));
    }
    if rows == 0 || cols == 0 {
        return Err(bad("zero rows or columns"));
    }
    let expected = (rows as u64)
        .checked_mul(cols as u64)
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| n.checked_add(OBDS_HEADER_LEN as u64))
        .ok_or_else(|| bad("dimensions overflow"))?;
    if bytes.len() as u64 != expected {
        return Err(bad("payload length does not match the header dimensions"));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for chunk in bytes[OBDS_HEADER_LEN..].chunks_exact(4) {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(bad("non-finite sample"));
        }
        data.push(v as f64);
    }
    Image::from_raw(rows, cols, data)
}

fn write_obds(path: &Path, img: &Image) -> Result<()> {
    let (rows, cols) = img.dims();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = std::io::BufWriter::new(file);
    let mut header = [0u8; OBDS_HEADER_LEN];
    header[0..4].copy_from_slice(OBDS_MAGIC);
    header[4..8].copy_from_slice(&(rows as u32).to_le_bytes());
    header[8..12].copy_from_slice(&(cols as u32).to_le_bytes());
    w.write_all(&header).map_err(io_err)?;
    for &v in img.as_array().iter() {
        w.write_all(&(v as f32).to_le_bytes()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}
