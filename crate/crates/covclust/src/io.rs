//! CSV and JSON interchange.
//!
//! Dataset files are long-format CSV with header `series_id,t,value`: rows
//! grouped by series, `t` a 1-based consecutive integer within each series.
//! Ground truth and clustering files are `series_id,label` and
//! `series_id,cluster`. Distance matrices use `i,j,value` with 0-based
//! indices. Floats are written with the shortest representation that parses
//! back to the identical bits, so write-then-read is lossless.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::ScenarioReport;
use crate::matrix::{Matrix, PairwiseMatrix};
use crate::types::{Dataset, DatasetKind, GroundTruth, SamplePath};

fn malformed(line: usize, message: impl Into<String>) -> Error {
    Error::Malformed { line, message: message.into() }
}

struct CsvLines<R: Read> {
    lines: std::io::Lines<BufReader<R>>,
    line_no: usize,
}

impl<R: Read> CsvLines<R> {
    fn new(reader: R, expected_header: &str) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines();
        let header = lines
            .next()
            .ok_or_else(|| malformed(1, "empty file"))??;
        if header.trim_end_matches('\r') != expected_header {
            return Err(malformed(
                1,
                format!("expected header '{expected_header}', got '{header}'"),
            ));
        }
        Ok(Self { lines, line_no: 1 })
    }

    /// Next non-empty data line with its 1-based line number.
    fn next_line(&mut self) -> Result<Option<(usize, String)>> {
        for line in self.lines.by_ref() {
            self.line_no += 1;
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            return Ok(Some((self.line_no, line.to_string())));
        }
        Ok(None)
    }
}

fn split_columns(line_no: usize, line: &str, expected: usize) -> Result<Vec<String>> {
    let parts: Vec<String> = line.split(',').map(|s| s.to_string()).collect();
    if parts.len() != expected {
        return Err(malformed(
            line_no,
            format!("expected {expected} columns, got {}", parts.len()),
        ));
    }
    Ok(parts)
}

fn parse_f64(line_no: usize, field: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| malformed(line_no, format!("not a number: '{field}'")))
}

fn parse_usize(line_no: usize, field: &str) -> Result<usize> {
    field
        .parse::<usize>()
        .map_err(|_| malformed(line_no, format!("not an integer: '{field}'")))
}

pub fn write_dataset<W: Write>(writer: W, ds: &Dataset) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "series_id,t,value")?;
    for path in &ds.paths {
        for (t, value) in path.values.iter().enumerate() {
            writeln!(w, "{},{},{}", path.id, t + 1, value)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_dataset<R: Read>(reader: R, kind: DatasetKind) -> Result<Dataset> {
    let mut lines = CsvLines::new(reader, "series_id,t,value")?;
    let mut paths: Vec<SamplePath> = Vec::new();
    let mut finished: std::collections::HashSet<String> = std::collections::HashSet::new();
    let mut current: Option<SamplePath> = None;

    while let Some((line_no, line)) = lines.next_line()? {
        let cols = split_columns(line_no, &line, 3)?;
        let id = cols[0].clone();
        let t = parse_usize(line_no, &cols[1])?;
        let value = parse_f64(line_no, &cols[2])?;

        match current.as_mut() {
            Some(path) if path.id == id => {
                if t != path.len() + 1 {
                    return Err(malformed(
                        line_no,
                        format!("series '{id}': expected t={}, got t={t}", path.len() + 1),
                    ));
                }
                path.values.push(value);
            }
            _ => {
                if let Some(done) = current.take() {
                    finished.insert(done.id.clone());
                    paths.push(done);
                }
                if finished.contains(&id) {
                    return Err(malformed(
                        line_no,
                        format!("series '{id}' is not contiguous (rows must be grouped)"),
                    ));
                }
                if t != 1 {
                    return Err(malformed(
                        line_no,
                        format!("series '{id}' must start at t=1, got t={t}"),
                    ));
                }
                current = Some(SamplePath::new(id, vec![value]));
            }
        }
    }
    if let Some(done) = current.take() {
        paths.push(done);
    }
    Ok(Dataset { paths, kind })
}

pub fn write_ground_truth<W: Write>(writer: W, ds: &Dataset, gt: &GroundTruth) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "series_id,label")?;
    for (path, label) in ds.paths.iter().zip(&gt.labels) {
        writeln!(w, "{},{}", path.id, label)?;
    }
    w.flush()?;
    Ok(())
}

fn read_id_labels<R: Read>(reader: R, header: &str) -> Result<Vec<(String, u32)>> {
    let mut lines = CsvLines::new(reader, header)?;
    let mut out = Vec::new();
    while let Some((line_no, line)) = lines.next_line()? {
        let cols = split_columns(line_no, &line, 2)?;
        let label = parse_usize(line_no, &cols[1])? as u32;
        out.push((cols[0].clone(), label));
    }
    Ok(out)
}

/// Reads `series_id,label` rows in file order.
pub fn read_label_rows<R: Read>(reader: R) -> Result<Vec<(String, u32)>> {
    read_id_labels(reader, "series_id,label")
}

/// Reads `series_id,label` and aligns labels with the given series order;
/// kappa is the largest label present.
pub fn read_ground_truth<R: Read>(reader: R, ids: &[String]) -> Result<GroundTruth> {
    let rows = read_id_labels(reader, "series_id,label")?;
    align_labels(rows, ids).map(|(labels, kappa)| GroundTruth::new(labels, kappa))
}

/// Reads a clustering produced by [`write_clustering`], aligned to `ids`.
pub fn read_clustering_labels<R: Read>(reader: R, ids: &[String]) -> Result<Vec<u32>> {
    let rows = read_id_labels(reader, "series_id,cluster")?;
    align_labels(rows, ids).map(|(labels, _)| labels)
}

fn align_labels(rows: Vec<(String, u32)>, ids: &[String]) -> Result<(Vec<u32>, u32)> {
    let map: std::collections::HashMap<&str, u32> =
        rows.iter().map(|(id, l)| (id.as_str(), *l)).collect();
    if map.len() != rows.len() {
        return Err(malformed(0, "duplicate series_id in label file"));
    }
    let mut labels = Vec::with_capacity(ids.len());
    for id in ids {
        match map.get(id.as_str()) {
            Some(&l) => labels.push(l),
            None => return Err(malformed(0, format!("no label for series '{id}'"))),
        }
    }
    let kappa = labels.iter().copied().max().unwrap_or(0);
    Ok((labels, kappa))
}

pub fn write_clustering<W: Write>(writer: W, ids: &[String], assignment: &[u32]) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "series_id,cluster")?;
    for (id, label) in ids.iter().zip(assignment) {
        writeln!(w, "{},{}", id, label)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_matrix<W: Write>(writer: W, matrix: &PairwiseMatrix) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "i,j,value")?;
    for i in 0..matrix.len() {
        for j in 0..matrix.len() {
            writeln!(w, "{},{},{}", i, j, matrix.get(i, j))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads an `i,j,value` file into a symmetric distance matrix. Entries may
/// be given for one or both triangle halves; missing mirrors are filled in,
/// conflicts and nonzero diagonals are rejected.
pub fn read_matrix<R: Read>(reader: R) -> Result<PairwiseMatrix> {
    let mut lines = CsvLines::new(reader, "i,j,value")?;
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut n = 0usize;
    while let Some((line_no, line)) = lines.next_line()? {
        let cols = split_columns(line_no, &line, 3)?;
        let i = parse_usize(line_no, &cols[0])?;
        let j = parse_usize(line_no, &cols[1])?;
        let value = parse_f64(line_no, &cols[2])?;
        if !value.is_finite() {
            return Err(malformed(line_no, format!("non-finite entry at ({i},{j})")));
        }
        n = n.max(i + 1).max(j + 1);
        entries.push((i, j, value));
    }
    if n == 0 {
        return Err(malformed(0, "empty distance matrix"));
    }
    let mut full = Matrix::zeros(n, n);
    let mut seen = vec![false; n * n];
    for (i, j, value) in entries {
        if seen[i * n + j] && full.get(i, j) != value {
            return Err(malformed(
                0,
                format!("conflicting entries for ({i},{j})"),
            ));
        }
        seen[i * n + j] = true;
        full.set(i, j, value);
    }
    // mirror one-sided entries
    for i in 0..n {
        for j in 0..n {
            if seen[i * n + j] && !seen[j * n + i] {
                full.set(j, i, full.get(i, j));
            }
        }
    }
    PairwiseMatrix::from_square(full, 1e-9)
}

/// Writes the long-format rates file: `t,run,rate` with 1-based runs.
pub fn write_report<W: Write>(writer: W, report: &ScenarioReport) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "t,run,rate")?;
    for row in &report.rows {
        for (run, rate) in row.rates.iter().enumerate() {
            writeln!(w, "{},{},{}", row.t, run + 1, rate)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes the per-time-step means: `t,mean_rate`.
pub fn write_report_summary<W: Write>(writer: W, report: &ScenarioReport) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "t,mean_rate")?;
    for row in &report.rows {
        writeln!(w, "{},{}", row.t, row.mean)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dataset_file(path: impl AsRef<Path>, ds: &Dataset) -> Result<()> {
    write_dataset(File::create(path)?, ds)
}

pub fn read_dataset_file(path: impl AsRef<Path>, kind: DatasetKind) -> Result<Dataset> {
    read_dataset(File::open(path)?, kind)
}

pub fn write_json_file<T: serde::Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n")?;
    file.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_dataset() -> Dataset {
        Dataset::offline(vec![
            SamplePath::new("a", vec![1.5, -2.25, 1.0 / 3.0]),
            SamplePath::new("b", vec![0.1, 0.2, 0.30000000000000004]),
        ])
    }

    #[test]
    fn dataset_round_trip_is_bit_exact() {
        let ds = sample_dataset();
        let mut buf = Vec::new();
        write_dataset(&mut buf, &ds).unwrap();
        let back = read_dataset(buf.as_slice(), DatasetKind::Offline).unwrap();
        assert_eq!(back.paths.len(), ds.paths.len());
        for (a, b) in ds.paths.iter().zip(&back.paths) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.values, b.values); // exact, not approximate
        }
    }

    #[test]
    fn read_rejects_bad_structure() {
        let text = "series_id,t,value\na,1,0.5\na,3,0.7\n";
        let err = read_dataset(text.as_bytes(), DatasetKind::Offline).unwrap_err();
        match err {
            Error::Malformed { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }

        let split = "series_id,t,value\na,1,0.5\nb,1,0.1\na,2,0.7\n";
        assert!(read_dataset(split.as_bytes(), DatasetKind::Offline).is_err());

        let bad_header = "id,t,value\na,1,0.5\n";
        assert!(read_dataset(bad_header.as_bytes(), DatasetKind::Offline).is_err());

        let bad_value = "series_id,t,value\na,1,zebra\n";
        let err = read_dataset(bad_value.as_bytes(), DatasetKind::Offline).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 2, .. }));
    }

    #[test]
    fn ground_truth_alignment_follows_dataset_order() {
        let ds = sample_dataset();
        let ids = ds.ids();
        let text = "series_id,label\nb,2\na,1\n";
        let gt = read_ground_truth(text.as_bytes(), &ids).unwrap();
        assert_eq!(gt.labels, vec![1, 2]);
        assert_eq!(gt.kappa, 2);

        let missing = "series_id,label\nb,2\n";
        assert!(read_ground_truth(missing.as_bytes(), &ids).is_err());
    }

    #[test]
    fn matrix_round_trip_and_mirroring() {
        let m = PairwiseMatrix::from_pairs(3, &[1.0, 2.5, 0.125]);
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m).unwrap();
        let back = read_matrix(buf.as_slice()).unwrap();
        assert_eq!(back, m);

        // upper triangle only, mirrored on read
        let text = "i,j,value\n0,1,1\n0,2,2.5\n1,2,0.125\n";
        let half = read_matrix(text.as_bytes()).unwrap();
        assert_eq!(half, m);

        let asym = "i,j,value\n0,1,1\n1,0,2\n";
        assert!(read_matrix(asym.as_bytes()).is_err());
    }

    #[test]
    fn report_csv_shape() {
        let report = ScenarioReport {
            dataset_tag: "rotation-offline".into(),
            algorithm: "offline".into(),
            dissim: crate::DissimConfig::default(),
            runs: 2,
            master_seed: 1,
            shared_datasets_across_variants: true,
            rows: vec![crate::eval::TimeStepStats { t: 1, mean: 0.25, rates: vec![0.5, 0.0] }],
        };
        let mut buf = Vec::new();
        write_report(&mut buf, &report).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "t,run,rate\n1,1,0.5\n1,2,0\n");
        let mut buf = Vec::new();
        write_report_summary(&mut buf, &report).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,mean_rate\n1,0.25\n");
    }
}
