//! CSV exchange formats.
//!
//! Distance matrices:
//!
//! ```text
//! label,a,b,c
//! a,0,1,2
//! b,1,0,1
//! c,2,1,0
//! ```
//!
//! Measured spaces append a `weight` column to the same layout.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::measure::MeasuredSpace;
use crate::metric::DistanceMatrix;

/// Largest asymmetry the readers accept before symmetrizing.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A parsed but not yet validated distance table.
#[derive(Debug, Clone, PartialEq)]
pub struct RawMatrix {
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl RawMatrix {
    /// Symmetrizes by averaging mirrored entries and builds a checked matrix.
    pub fn into_matrix(self) -> Result<DistanceMatrix> {
        let n = self.rows.len();
        let mut rows = self.rows;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (rows[i][j] + rows[j][i]);
                rows[i][j] = avg;
                rows[j][i] = avg;
            }
        }
        DistanceMatrix::new(rows)?.with_labels(self.labels)
    }
}

fn parse_entry(field: &str, row: usize, col: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Csv(format!("row {row}, column {col}: cannot parse {field:?} as a number")))
}

fn read_table<R: Read>(reader: R, weight_column: bool) -> Result<(RawMatrix, Vec<f64>)> {
    let mut csv = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    let mut records = csv.records();
    let header = records.next().ok_or(Error::Empty)??;
    let mut names: Vec<String> = header.iter().map(|s| s.trim().to_string()).collect();
    if names.first().map(String::as_str) != Some("label") {
        return Err(Error::Csv("header must start with `label`".into()));
    }
    names.remove(0);
    if weight_column {
        if names.last().map(String::as_str) != Some("weight") {
            return Err(Error::Csv("header must end with `weight`".into()));
        }
        names.pop();
    }
    let n = names.len();
    let mut rows = Vec::with_capacity(n);
    let mut weights = Vec::new();
    for (r, record) in records.enumerate() {
        let record = record?;
        let expected = n + 1 + usize::from(weight_column);
        if record.len() != expected {
            return Err(Error::Csv(format!("row {r} has {} fields, expected {expected}", record.len())));
        }
        if record[0].trim() != names.get(r).map(String::as_str).unwrap_or_default() {
            return Err(Error::Csv(format!(
                "row {r} is labelled {:?} but the header names {:?}",
                &record[0],
                names.get(r)
            )));
        }
        let row = (0..n).map(|c| parse_entry(&record[c + 1], r, c + 1)).collect::<Result<Vec<_>>>()?;
        rows.push(row);
        if weight_column {
            weights.push(parse_entry(&record[n + 1], r, n + 1)?);
        }
    }
    if rows.len() != n {
        return Err(Error::NotSquare { row: rows.len(), len: n, expected: rows.len() });
    }
    check_near_symmetric(&rows)?;
    Ok((RawMatrix { labels: names, rows }, weights))
}

fn check_near_symmetric(rows: &[Vec<f64>]) -> Result<()> {
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            let (a, b) = (rows[i][j], rows[j][i]);
            if (a - b).abs() > SYMMETRY_TOL * 1f64.max(a.abs().max(b.abs())) {
                return Err(Error::InvalidMatrix(format!(
                    "entries ({i}, {j}) and ({j}, {i}) differ by more than {SYMMETRY_TOL}: {a} vs {b}"
                )));
            }
        }
    }
    Ok(())
}

/// Reads a distance table without enforcing the quasimetric axioms beyond
/// near-symmetry, so that `validate` can report on defective inputs.
pub fn read_raw_distance_csv<R: Read>(reader: R) -> Result<RawMatrix> {
    read_table(reader, false).map(|(raw, _)| raw)
}

pub fn read_distance_csv<R: Read>(reader: R) -> Result<DistanceMatrix> {
    read_raw_distance_csv(reader)?.into_matrix()
}

pub fn read_measured_csv<R: Read>(reader: R) -> Result<MeasuredSpace> {
    let (raw, weights) = read_table(reader, true)?;
    MeasuredSpace::new(raw.into_matrix()?, weights)
}

fn header(m: &DistanceMatrix, weight_column: bool) -> Vec<String> {
    let mut h = Vec::with_capacity(m.n() + 2);
    h.push("label".to_string());
    h.extend((0..m.n()).map(|i| m.label(i)));
    if weight_column {
        h.push("weight".to_string());
    }
    h
}

pub fn write_distance_csv<W: Write>(writer: W, m: &DistanceMatrix) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(header(m, false))?;
    for (i, row) in m.rows().enumerate() {
        let mut rec = vec![m.label(i)];
        rec.extend(row.iter().map(f64::to_string));
        csv.write_record(rec)?;
    }
    csv.flush().map_err(|e| Error::Csv(e.to_string()))
}

pub fn write_measured_csv<W: Write>(writer: W, s: &MeasuredSpace) -> Result<()> {
    let m = s.metric();
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(header(m, true))?;
    for (i, row) in m.rows().enumerate() {
        let mut rec = vec![m.label(i)];
        rec.extend(row.iter().map(f64::to_string));
        rec.push(s.weights()[i].to_string());
        csv.write_record(rec)?;
    }
    csv.flush().map_err(|e| Error::Csv(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_and_symmetrizes() {
        let text = "label,a,b\na,0,1\nb,1.0000000000001,0\n";
        let m = read_distance_csv(text.as_bytes()).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));
        assert!((m.get(0, 1) - 1.0).abs() < 1e-12);
        assert_eq!(m.labels().unwrap(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let text = "label,a,b\na,0,1\nb,1.1,0\n";
        assert!(matches!(read_distance_csv(text.as_bytes()), Err(Error::InvalidMatrix(_))));
    }

    #[test]
    fn rejects_bad_layout() {
        assert!(read_distance_csv("x,a\na,0\n".as_bytes()).is_err());
        assert!(read_distance_csv("label,a,b\na,0,1\n".as_bytes()).is_err());
        assert!(read_distance_csv("label,a,b\na,0,1\nc,1,0\n".as_bytes()).is_err());
        assert!(read_distance_csv("label,a\na,zero\n".as_bytes()).is_err());
        assert!(read_distance_csv("label,a,b\na,0,1,2\nb,1,0\n".as_bytes()).is_err());
    }

    #[test]
    fn raw_reader_keeps_axiom_violations() {
        let raw = read_raw_distance_csv("label,a,b\na,0,0\nb,0,0\n".as_bytes()).unwrap();
        assert_eq!(raw.rows, vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert!(raw.into_matrix().is_err());
    }

    #[test]
    fn round_trip_measured() {
        let m = DistanceMatrix::new(vec![vec![0.0, 0.3], vec![0.3, 0.0]]).unwrap();
        let s = MeasuredSpace::new(m, vec![0.25, 0.75]).unwrap();
        let mut buf = Vec::new();
        write_measured_csv(&mut buf, &s).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "label,0,1,weight\n0,0,0.3,0.25\n1,0.3,0,0.75\n");
        let back = read_measured_csv(buf.as_slice()).unwrap();
        assert_eq!(back.weights(), s.weights());
        assert_eq!(back.metric().to_rows(), s.metric().to_rows());
    }
}
