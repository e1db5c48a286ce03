//! IDX binary parsing for the MNIST files.
//!
//! Big-endian throughout: image files carry magic 0x00000803 and dims
//! (n, 28, 28); label files carry magic 0x00000801 and dim (n). Files
//! starting with the gzip magic bytes 0x1f 0x8b are inflated first.
//! Parse failures name the offending field and byte offset.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;
use ndarray::Array2;

use crate::error::{Error, Result};

use super::{standardize, Dataset};

const IMAGE_MAGIC: u32 = 0x0000_0803;
const LABEL_MAGIC: u32 = 0x0000_0801;
const SIDE: usize = 28;

/// Load the four canonical MNIST IDX files into a standardized dataset:
/// pixels scaled to [0, 1], then per-feature standardized with train
/// statistics, flattened to 784 features.
pub fn load_mnist_idx(
    images_path: &Path,
    labels_path: &Path,
    test_images_path: &Path,
    test_labels_path: &Path,
) -> Result<Dataset> {
    let train_pixels = read_images(images_path)?;
    let train_labels = read_labels(labels_path)?;
    let test_pixels = read_images(test_images_path)?;
    let test_labels = read_labels(test_labels_path)?;

    if train_pixels.nrows() != train_labels.len() {
        return Err(Error::invalid_argument(format!(
            "{} train images but {} train labels",
            train_pixels.nrows(),
            train_labels.len()
        )));
    }
    if test_pixels.nrows() != test_labels.len() {
        return Err(Error::invalid_argument(format!(
            "{} test images but {} test labels",
            test_pixels.nrows(),
            test_labels.len()
        )));
    }

    let mut train_inputs = train_pixels;
    let mut test_inputs = test_pixels;
    let normalization = standardize(&mut train_inputs, &mut test_inputs);

    let ds = Dataset {
        name: "mnist".to_string(),
        train_inputs,
        train_labels,
        test_inputs,
        test_labels,
        num_classes: 10,
        normalization: Some(normalization),
    };
    ds.validate()?;
    Ok(ds)
}

/// Whole file contents, inflating when the gzip magic leads the stream.
fn read_payload(path: &Path) -> Result<Vec<u8>> {
    let mut raw = Vec::new();
    File::open(path)?.read_to_end(&mut raw)?;
    if raw.len() >= 2 && raw[0] == 0x1f && raw[1] == 0x8b {
        let mut inflated = Vec::new();
        GzDecoder::new(&raw[..]).read_to_end(&mut inflated)?;
        return Ok(inflated);
    }
    Ok(raw)
}

fn read_u32_be(bytes: &[u8], offset: usize, field: &'static str, path: &Path) -> Result<u32> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(Error::Format {
            path: path.display().to_string(),
            field,
            detail: format!("file truncated: need {end} bytes, have {}", bytes.len()),
            offset: bytes.len() as u64,
        });
    }
    Ok(u32::from_be_bytes([
        bytes[offset],
        bytes[offset + 1],
        bytes[offset + 2],
        bytes[offset + 3],
    ]))
}

/// Pixels as an `n x 784` matrix in [0, 1].
fn read_images(path: &Path) -> Result<Array2<f64>> {
    let bytes = read_payload(path)?;
    let magic = read_u32_be(&bytes, 0, "magic", path)?;
    if magic != IMAGE_MAGIC {
        return Err(Error::Format {
            path: path.display().to_string(),
            field: "magic",
            detail: format!("expected image magic {IMAGE_MAGIC:#010x}, got {magic:#010x}"),
            offset: 0,
        });
    }
    let n = read_u32_be(&bytes, 4, "count", path)? as usize;
    let rows = read_u32_be(&bytes, 8, "rows", path)? as usize;
    let cols = read_u32_be(&bytes, 12, "cols", path)? as usize;
    if rows != SIDE || cols != SIDE {
        return Err(Error::Format {
            path: path.display().to_string(),
            field: "rows",
            detail: format!("expected {SIDE}x{SIDE} images, got {rows}x{cols}"),
            offset: 8,
        });
    }
    let expected = 16 + n * SIDE * SIDE;
    if bytes.len() < expected {
        return Err(Error::Format {
            path: path.display().to_string(),
            field: "pixels",
            detail: format!(
                "truncated payload: expected {expected} bytes for {n} images, have {}",
                bytes.len()
            ),
            offset: bytes.len() as u64,
        });
    }
    let dim = SIDE * SIDE;
    let mut out = Array2::zeros((n, dim));
    for i in 0..n {
        for j in 0..dim {
            out[[i, j]] = bytes[16 + i * dim + j] as f64 / 255.0;
        }
    }
    Ok(out)
}

fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let bytes = read_payload(path)?;
    let magic = read_u32_be(&bytes, 0, "magic", path)?;
    if magic != LABEL_MAGIC {
        return Err(Error::Format {
            path: path.display().to_string(),
            field: "magic",
            detail: format!("expected label magic {LABEL_MAGIC:#010x}, got {magic:#010x}"),
            offset: 0,
        });
    }
    let n = read_u32_be(&bytes, 4, "count", path)? as usize;
    let expected = 8 + n;
    if bytes.len() < expected {
        return Err(Error::Format {
            path: path.display().to_string(),
            field: "labels",
            detail: format!(
                "truncated payload: expected {expected} bytes for {n} labels, have {}",
                bytes.len()
            ),
            offset: bytes.len() as u64,
        });
    }
    Ok(bytes[8..8 + n].iter().map(|&b| b as usize).collect())
}
