//! Binary images of a single square or disk at random integer offsets.

use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{EmbedError, Result};
use crate::secant::DataMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Square,
    Disk,
    /// Each image holds either a square or a disk.
    Mixed,
}

impl FromStr for Shape {
    type Err = EmbedError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(Shape::Square),
            "disk" => Ok(Shape::Disk),
            "mixed" => Ok(Shape::Mixed),
            other => Err(EmbedError::invalid(format!(
                "unknown shape {other:?} (expected square, disk or mixed)"
            ))),
        }
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Shape::Square => "square",
            Shape::Disk => "disk",
            Shape::Mixed => "mixed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub grid_side: usize,
    pub shape: Shape,
    pub shape_size: usize,
    pub count: usize,
    pub seed: u64,
}

/// Shape size used when none is given: 3 on a 7×7 grid, 5 on 14×14, 8 on
/// 16×16, and half the grid side otherwise.
pub fn default_shape_size(grid_side: usize) -> usize {
    match grid_side {
        7 => 3,
        14 => 5,
        16 => 8,
        g => (g / 2).max(1),
    }
}

impl SyntheticSpec {
    pub fn new(grid_side: usize, shape: Shape, count: usize, seed: u64) -> Self {
        Self {
            grid_side,
            shape,
            shape_size: default_shape_size(grid_side),
            count,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_side == 0 {
            return Err(EmbedError::invalid("grid side must be at least 1"));
        }
        if self.shape_size == 0 || self.shape_size > self.grid_side {
            return Err(EmbedError::invalid(format!(
                "shape size {} does not fit a {}x{} grid",
                self.shape_size, self.grid_side, self.grid_side
            )));
        }
        if self.count == 0 {
            return Err(EmbedError::invalid("count must be at least 1"));
        }
        Ok(())
    }

    /// Number of distinct images these settings can produce.
    pub fn distinct_positions(&self) -> usize {
        let per_axis = self.grid_side - self.shape_size + 1;
        let kinds = if self.shape == Shape::Mixed { 2 } else { 1 };
        kinds * per_axis * per_axis
    }
}

/// Pixel mask of a single shape: a full square, or the pixels whose centers
/// lie within the inscribed disk.
fn stamp(kind: Shape, size: usize) -> Vec<bool> {
    let r = size as f64 / 2.0;
    (0..size * size)
        .map(|idx| match kind {
            Shape::Disk => {
                let (i, j) = (idx / size, idx % size);
                let dy = i as f64 + 0.5 - r;
                let dx = j as f64 + 0.5 - r;
                dx * dx + dy * dy <= r * r
            }
            _ => true,
        })
        .collect()
}

/// One image per column, flattened row-major, with pixels in `{0, 1}`.
///
/// Positions are drawn without replacement until every distinct position is
/// used, then with replacement.
pub fn gen_translating_shapes(spec: &SyntheticSpec) -> Result<DataMatrix> {
    spec.validate()?;
    let g = spec.grid_side;
    let s = spec.shape_size;
    let per_axis = g - s + 1;
    let kinds: &[Shape] = match spec.shape {
        Shape::Mixed => &[Shape::Square, Shape::Disk],
        Shape::Square => &[Shape::Square],
        Shape::Disk => &[Shape::Disk],
    };
    let stamps: Vec<Vec<bool>> = kinds.iter().map(|&k| stamp(k, s)).collect();
    let mut positions: Vec<(usize, usize, usize)> = (0..kinds.len())
        .flat_map(|k| (0..per_axis).flat_map(move |r| (0..per_axis).map(move |c| (k, r, c))))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    positions.shuffle(&mut rng);
    let distinct = positions.len();
    let chosen: Vec<(usize, usize, usize)> = (0..spec.count)
        .map(|i| {
            if i < distinct {
                positions[i]
            } else {
                positions[rng.random_range(0..distinct)]
            }
        })
        .collect();

    let mut points = DMatrix::zeros(g * g, spec.count);
    for (col, &(k, r0, c0)) in chosen.iter().enumerate() {
        for (idx, &on) in stamps[k].iter().enumerate() {
            if on {
                let (i, j) = (idx / s, idx % s);
                points[((r0 + i) * g + c0 + j, col)] = 1.0;
            }
        }
    }
    DataMatrix::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_by_seven_squares() {
        let spec = SyntheticSpec::new(7, Shape::Square, 60, 1);
        let d = gen_translating_shapes(&spec).unwrap();
        assert_eq!((d.dim(), d.len()), (49, 60));
        for j in 0..d.len() {
            let p = d.point(j);
            assert!(p.iter().all(|&x| x == 0.0 || x == 1.0));
            assert_eq!(p.sum(), 9.0);
        }
        assert_eq!(d, gen_translating_shapes(&spec).unwrap());
    }

    #[test]
    fn full_size_square_has_one_position() {
        let mut spec = SyntheticSpec::new(7, Shape::Square, 4, 0);
        spec.shape_size = 7;
        assert_eq!(spec.distinct_positions(), 1);
        let d = gen_translating_shapes(&spec).unwrap();
        assert!(d.points().iter().all(|&x| x == 1.0));
    }

    #[test]
    fn disks_on_sixteen_grid() {
        let d = gen_translating_shapes(&SyntheticSpec::new(16, Shape::Disk, 60, 2)).unwrap();
        assert_eq!(d.dim(), 256);
        // radius 4 disk: 52 pixel centers within the circle
        assert_eq!(d.point(0).sum(), 52.0);
    }

    #[test]
    fn distinct_images_until_exhausted() {
        let spec = SyntheticSpec::new(14, Shape::Mixed, 200, 3);
        assert_eq!(spec.distinct_positions(), 200);
        let d = gen_translating_shapes(&spec).unwrap();
        let mut cols: Vec<Vec<u8>> = (0..d.len())
            .map(|j| d.point(j).iter().map(|&x| x as u8).collect())
            .collect();
        cols.sort();
        cols.dedup();
        assert_eq!(cols.len(), 200);
    }

    #[test]
    fn oversized_shape_rejected() {
        let mut spec = SyntheticSpec::new(7, Shape::Square, 3, 0);
        spec.shape_size = 8;
        assert!(gen_translating_shapes(&spec).is_err());
        assert!("triangle".parse::<Shape>().is_err());
    }
}
