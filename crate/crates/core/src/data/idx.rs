//! The big-endian IDX format used by the MNIST distribution: a 4-byte magic
//! (`0x00000803` for image tensors, `0x00000801` for label vectors), one
//! 4-byte size per dimension, then an unsigned-byte payload. Gzip-compressed
//! files are detected by their header and decompressed transparently.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use crate::error::{EmbedError, Result};

pub const IMAGES_MAGIC: u32 = 2051;
pub const LABELS_MAGIC: u32 = 2049;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxHeader {
    pub magic: u32,
    pub dims: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxTensor {
    pub header: IdxHeader,
    pub data: Vec<u8>,
}

impl IdxTensor {
    pub fn new(magic: u32, dims: Vec<usize>, data: Vec<u8>) -> Result<Self> {
        expected_rank(magic)?;
        let tensor = Self {
            header: IdxHeader { magic, dims },
            data,
        };
        tensor.check()?;
        Ok(tensor)
    }

    pub fn dims(&self) -> &[usize] {
        &self.header.dims
    }

    fn check(&self) -> Result<()> {
        let rank = expected_rank(self.header.magic)?;
        if self.header.dims.len() != rank {
            return Err(EmbedError::Format(format!(
                "magic {} needs {rank} dimensions, header has {}",
                self.header.magic,
                self.header.dims.len()
            )));
        }
        let want = self.header.dims.iter().product::<usize>();
        if want != self.data.len() {
            return Err(EmbedError::Format(format!(
                "payload has {} bytes, dimensions require {want}",
                self.data.len()
            )));
        }
        Ok(())
    }

    /// Number of items along the first dimension.
    pub fn items(&self) -> usize {
        self.header.dims[0]
    }

    /// Bytes of item `i` (one image, or one label).
    pub fn item(&self, i: usize) -> &[u8] {
        let stride = self.data.len() / self.items().max(1);
        &self.data[i * stride..(i + 1) * stride]
    }
}

fn expected_rank(magic: u32) -> Result<usize> {
    match magic {
        IMAGES_MAGIC => Ok(3),
        LABELS_MAGIC => Ok(1),
        other => Err(EmbedError::Format(format!(
            "bad IDX magic {other} (expected {IMAGES_MAGIC} or {LABELS_MAGIC})"
        ))),
    }
}

/// Parses an IDX byte stream (already decompressed).
pub fn parse_idx(bytes: &[u8]) -> Result<IdxTensor> {
    let word = |k: usize| -> Result<u32> {
        bytes
            .get(4 * k..4 * k + 4)
            .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
            .ok_or_else(|| EmbedError::Format("truncated IDX header".into()))
    };
    let magic = word(0)?;
    let rank = expected_rank(magic)?;
    let dims = (1..=rank).map(|k| word(k).map(|d| d as usize)).collect::<Result<Vec<_>>>()?;
    let offset = 4 * (rank + 1);
    let want = dims.iter().product::<usize>();
    let payload = &bytes[offset.min(bytes.len())..];
    if payload.len() < want {
        return Err(EmbedError::Format(format!(
            "truncated IDX payload: {} of {want} bytes",
            payload.len()
        )));
    }
    if payload.len() > want {
        return Err(EmbedError::Format(format!(
            "IDX payload has {} bytes, dimensions require {want}",
            payload.len()
        )));
    }
    IdxTensor::new(magic, dims, payload.to_vec())
}

/// Reads an IDX file, gunzipping it first when it starts with the gzip magic.
pub fn load_idx(path: impl AsRef<Path>) -> Result<IdxTensor> {
    let mut raw = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut raw)?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(raw.as_slice()).read_to_end(&mut out)?;
        raw = out;
    }
    parse_idx(&raw)
}

pub fn encode_idx(tensor: &IdxTensor) -> Result<Vec<u8>> {
    tensor.check()?;
    let mut out = Vec::with_capacity(4 * (tensor.header.dims.len() + 1) + tensor.data.len());
    out.extend_from_slice(&tensor.header.magic.to_be_bytes());
    for &d in &tensor.header.dims {
        let d = u32::try_from(d).map_err(|_| EmbedError::Format(format!("dimension {d} too large")))?;
        out.extend_from_slice(&d.to_be_bytes());
    }
    out.extend_from_slice(&tensor.data);
    Ok(out)
}

/// Writes `tensor`, gzip-compressed when `gzip` is set.
pub fn save_idx(tensor: &IdxTensor, path: impl AsRef<Path>, gzip: bool) -> Result<()> {
    let bytes = encode_idx(tensor)?;
    let file = BufWriter::new(File::create(path)?);
    if gzip {
        let mut enc = GzEncoder::new(file, Compression::default());
        enc.write_all(&bytes)?;
        enc.finish()?.flush()?;
    } else {
        let mut file = file;
        file.write_all(&bytes)?;
        file.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn handcrafted() -> Vec<u8> {
        let mut b = vec![0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2];
        b.extend_from_slice(&[0, 255, 128, 7]);
        b
    }

    #[test]
    fn parses_handcrafted_image_file() {
        let t = parse_idx(&handcrafted()).unwrap();
        assert_eq!(t.header.magic, 2051);
        assert_eq!(t.dims(), &[1, 2, 2]);
        assert_eq!(t.item(0), &[0, 255, 128, 7]);
        assert_eq!(encode_idx(&t).unwrap(), handcrafted());
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let mut bad = handcrafted();
        bad[..4].copy_from_slice(&9999u32.to_be_bytes());
        assert!(matches!(parse_idx(&bad), Err(EmbedError::Format(_))));
        let mut short = handcrafted();
        short.pop();
        let err = parse_idx(&short).unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");
        assert!(parse_idx(&[0, 0, 8]).is_err());
    }

    #[test]
    fn gzip_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = IdxTensor::new(LABELS_MAGIC, vec![3], vec![5, 0, 9]).unwrap();
        for gz in [false, true] {
            let path = dir.path().join(format!("labels{gz}"));
            save_idx(&t, &path, gz).unwrap();
            assert_eq!(load_idx(&path).unwrap(), t);
        }
    }
}
