//! Dense matrices as comma-separated text: one row per line, every value in
//! scientific notation with 17 significant digits so reading back is exact.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{EmbedError, Result};

fn csv_error(e: csv::Error) -> EmbedError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => EmbedError::Io(io),
        other => EmbedError::Format(format!("{other:?}")),
    }
}

pub fn write_matrix_csv<W: std::io::Write>(matrix: &DMatrix<f64>, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for row in matrix.row_iter() {
        w.write_record(row.iter().map(|x| format!("{x:.16e}")))
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_matrix_csv(matrix: &DMatrix<f64>, path: impl AsRef<Path>) -> Result<()> {
    write_matrix_csv(matrix, BufWriter::new(File::create(path)?))
}

pub fn read_matrix_csv<R: std::io::Read>(input: R) -> Result<DMatrix<f64>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut values = Vec::new();
    let mut ncols = None;
    let mut nrows = 0;
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(csv_error)?;
        if let Some(n) = ncols {
            if record.len() != n {
                return Err(EmbedError::Format(format!(
                    "ragged row {}: {} fields, expected {n}",
                    line + 1,
                    record.len()
                )));
            }
        } else {
            ncols = Some(record.len());
        }
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| {
                EmbedError::Format(format!("row {}: non-numeric field {field:?}", line + 1))
            })?;
            values.push(v);
        }
        nrows += 1;
    }
    match ncols {
        Some(n) if n > 0 => Ok(DMatrix::from_row_slice(nrows, n, &values)),
        _ => Err(EmbedError::Format("empty matrix file".into())),
    }
}

pub fn load_matrix_csv(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    read_matrix_csv(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(m: &DMatrix<f64>) -> DMatrix<f64> {
        let mut buf = Vec::new();
        write_matrix_csv(m, &mut buf).unwrap();
        read_matrix_csv(buf.as_slice()).unwrap()
    }

    #[test]
    fn identity_round_trips() {
        let m = DMatrix::<f64>::identity(2, 2);
        assert_eq!(round_trip(&m), m);
    }

    #[test]
    fn awkward_values_round_trip_exactly() {
        let m = DMatrix::from_row_slice(1, 4, &[0.1, -1.0 / 3.0, 1e-300, f64::MAX]);
        assert_eq!(round_trip(&m), m);
    }

    #[test]
    fn malformed_inputs() {
        assert!(read_matrix_csv("".as_bytes()).is_err());
        assert!(read_matrix_csv("1,2\n3\n".as_bytes()).is_err());
        assert!(read_matrix_csv("1,abc\n".as_bytes()).is_err());
    }
}
