//! Dataset generation and file formats.

pub mod idx;
pub mod synthetic;
pub mod table;

use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{EmbedError, Result};
use crate::secant::DataMatrix;

pub use idx::{encode_idx, load_idx, parse_idx, save_idx, IdxHeader, IdxTensor, IMAGES_MAGIC, LABELS_MAGIC};
pub use synthetic::{default_shape_size, gen_translating_shapes, Shape, SyntheticSpec};
pub use table::{load_matrix_csv, read_matrix_csv, save_matrix_csv, write_matrix_csv};

/// Block-mean pooling of a square `g × g` image to `t × t`; `g` must be a
/// multiple of `t`. Values in `[0, 1]` stay in `[0, 1]`.
pub fn downsample(image: &DMatrix<f64>, target: usize) -> Result<DMatrix<f64>> {
    let g = image.nrows();
    if image.ncols() != g {
        return Err(EmbedError::invalid(format!(
            "image must be square, got {}x{}",
            g,
            image.ncols()
        )));
    }
    if target == 0 || !g.is_multiple_of(target) {
        return Err(EmbedError::invalid(format!(
            "cannot pool a {g}x{g} image to {target}x{target}"
        )));
    }
    let b = g / target;
    let area = (b * b) as f64;
    Ok(DMatrix::from_fn(target, target, |i, j| {
        image.view((i * b, j * b), (b, b)).sum() / area
    }))
}

/// Images of an IDX image tensor as `[0, 1]`-scaled points, optionally pooled
/// to `side × side`, flattened row-major. `indices` selects and orders items.
pub fn idx_images_to_data(images: &IdxTensor, indices: &[usize], side: Option<usize>) -> Result<DataMatrix> {
    if images.header.magic != IMAGES_MAGIC {
        return Err(EmbedError::Format("expected an IDX image tensor".into()));
    }
    let (rows, cols) = (images.dims()[1], images.dims()[2]);
    let out_side = side.unwrap_or(rows);
    let dim = match side {
        Some(t) => t * t,
        None => rows * cols,
    };
    let mut points = DMatrix::zeros(dim, indices.len());
    for (col, &i) in indices.iter().enumerate() {
        if i >= images.items() {
            return Err(EmbedError::invalid(format!("image index {i} out of range")));
        }
        let img = DMatrix::from_fn(rows, cols, |r, c| images.item(i)[r * cols + c] as f64 / 255.0);
        let img = match side {
            Some(t) => downsample(&img, t)?,
            None => img,
        };
        for r in 0..img.nrows() {
            for c in 0..img.ncols() {
                points[(r * out_side + c, col)] = img[(r, c)];
            }
        }
    }
    DataMatrix::new(points)
}

pub fn idx_labels(labels: &IdxTensor) -> Result<Vec<u32>> {
    if labels.header.magic != LABELS_MAGIC {
        return Err(EmbedError::Format("expected an IDX label vector".into()));
    }
    Ok(labels.data.iter().map(|&b| u32::from(b)).collect())
}

/// Items whose label passes `filter`, shuffled with `seed` and truncated to
/// `count` (all of them when `count` is `None`).
pub fn labeled_subset(labels: &[u32], filter: Option<u32>, count: Option<usize>, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..labels.len())
        .filter(|&i| filter.is_none_or(|f| labels[i] == f))
        .collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    if let Some(n) = count {
        idx.truncate(n);
    }
    idx
}

/// A labeled subset of an IDX image/label pair, pooled to `side × side`.
pub fn mnist_subset(
    images: &IdxTensor,
    labels: &IdxTensor,
    filter: Option<u32>,
    count: Option<usize>,
    side: Option<usize>,
    seed: u64,
) -> Result<(DataMatrix, Vec<u32>)> {
    let all = idx_labels(labels)?;
    if all.len() != images.items() {
        return Err(EmbedError::invalid("image and label counts differ"));
    }
    let idx = labeled_subset(&all, filter, count, seed);
    if idx.is_empty() {
        return Err(EmbedError::invalid("no images match the label filter"));
    }
    let data = idx_images_to_data(images, &idx, side)?;
    Ok((data, idx.iter().map(|&i| all[i]).collect()))
}

fn is_idx_file(path: &Path) -> Result<bool> {
    use std::io::Read;
    let mut head = [0u8; 4];
    let n = std::fs::File::open(path)?.read(&mut head)?;
    Ok(n >= 2 && (head[..2] == [0x1f, 0x8b] || (n == 4 && head[..2] == [0, 0] && head[2] == 8)))
}

/// Points from a CSV file (one point per row) or an IDX image file, the
/// latter pooled to `side × side` when given.
pub fn load_points(path: impl AsRef<Path>, side: Option<usize>) -> Result<DataMatrix> {
    let path = path.as_ref();
    if is_idx_file(path)? {
        let t = load_idx(path)?;
        let all: Vec<usize> = (0..t.items()).collect();
        idx_images_to_data(&t, &all, side)
    } else {
        DataMatrix::from_row_points(&load_matrix_csv(path)?)
    }
}

/// Labels from an IDX label file or a one-column CSV of integers.
pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<u32>> {
    let path = path.as_ref();
    if is_idx_file(path)? {
        return idx_labels(&load_idx(path)?);
    }
    let m = load_matrix_csv(path)?;
    m.iter()
        .map(|&x| {
            if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
                Ok(x as u32)
            } else {
                Err(EmbedError::Format(format!("label {x} is not a non-negative integer")))
            }
        })
        .collect()
}
