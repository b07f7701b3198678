use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{DatasetError, Result, SeriesMatrix};

/// What to do with a value column that has missing cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingPolicy {
    /// Drop the whole column.
    #[default]
    Drop,
    /// Carry the last observed value forward. A column whose first cell is
    /// missing has nothing to carry and is dropped.
    ForwardFill,
}

/// Column layout of a wide CSV file.
#[derive(Debug, Clone, Default)]
pub struct CsvSchema {
    /// Header name of the timestamp column, kept as metadata only.
    pub timestamp_column: Option<String>,
    /// Value columns to keep, in output order. `None` keeps every
    /// non-timestamp column in file order.
    pub value_columns: Option<Vec<String>>,
    pub missing: MissingPolicy,
    /// Treat exact zeros as missing (sensor feeds that encode gaps as 0).
    pub zero_is_missing: bool,
    pub resolution: Option<String>,
}

fn is_missing_token(cell: &str) -> bool {
    cell.is_empty() || cell.eq_ignore_ascii_case("nan")
}

/// Loads a wide CSV file: header row of series identifiers, one observation
/// per record, optional timestamp column.
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<SeriesMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_matrix(file, path.to_path_buf(), schema)
}

/// As [`load_csv`], reading from any byte source. `label` names the source in
/// error messages.
pub fn load_csv_from_reader<R: Read>(reader: R, label: &str, schema: &CsvSchema) -> Result<SeriesMatrix> {
    read_matrix(reader, PathBuf::from(label), schema)
}

fn read_matrix<R: Read>(reader: R, path: PathBuf, schema: &CsvSchema) -> Result<SeriesMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let csv_err = |source| DatasetError::Csv {
        path: path.clone(),
        source,
    };
    let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();

    let position = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DatasetError::UnknownColumn(name.to_string()))
    };
    let ts_index = schema.timestamp_column.as_deref().map(position).transpose()?;
    let value_index: Vec<usize> = match &schema.value_columns {
        Some(names) => names.iter().map(|n| position(n)).collect::<Result<_>>()?,
        None => (0..header.len()).filter(|&i| Some(i) != ts_index).collect(),
    };

    let mut columns: Vec<Vec<Option<f64>>> = vec![Vec::new(); value_index.len()];
    let mut timestamps = Vec::new();
    for (record_no, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let record_no = record_no + 1;
        if record.len() != header.len() {
            return Err(DatasetError::Ragged {
                path,
                record: record_no,
                found: record.len(),
                expected: header.len(),
            });
        }
        if let Some(t) = ts_index {
            timestamps.push(record[t].to_string());
        }
        for (slot, &i) in columns.iter_mut().zip(&value_index) {
            let cell = &record[i];
            let value = if is_missing_token(cell) {
                None
            } else {
                let v: f64 = cell.parse().map_err(|_| DatasetError::Parse {
                    path: path.clone(),
                    record: record_no,
                    column: header[i].clone(),
                    value: cell.to_string(),
                })?;
                (v.is_finite() && !(schema.zero_is_missing && v == 0.0)).then_some(v)
            };
            slot.push(value);
        }
    }

    let mut kept_ids = Vec::new();
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for (cells, &i) in columns.into_iter().zip(&value_index) {
        if let Some(filled) = complete_column(cells, schema.missing) {
            kept_ids.push(header[i].clone());
            kept.push(filled);
        }
    }
    if kept.is_empty() {
        return Err(DatasetError::NoColumns);
    }

    let rows = kept[0].len();
    let mut values = Vec::with_capacity(rows * kept.len());
    for r in 0..rows {
        values.extend(kept.iter().map(|c| c[r]));
    }
    let mut m = SeriesMatrix::from_row_major(values, kept.len(), kept_ids)?;
    if let Some(res) = &schema.resolution {
        m = m.with_resolution(res.clone());
    }
    if ts_index.is_some() {
        m = m.with_timestamps(timestamps)?;
    }
    Ok(m)
}

fn complete_column(cells: Vec<Option<f64>>, policy: MissingPolicy) -> Option<Vec<f64>> {
    match policy {
        MissingPolicy::Drop => cells.into_iter().collect(),
        MissingPolicy::ForwardFill => {
            let mut last = None;
            cells
                .into_iter()
                .map(|c| {
                    last = c.or(last);
                    last
                })
                .collect()
        }
    }
}

/// Writes a matrix as wide CSV. Values use the shortest representation that
/// parses back to the same `f64`, so a write/load cycle is lossless.
pub fn write_csv(m: &SeriesMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = std::io::BufWriter::new(File::create(path).map_err(io_err)?);
    let mut wtr = csv::Writer::from_writer(&mut out);
    let csv_err = |source| DatasetError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let ts = m.timestamps();
    let mut header: Vec<&str> = Vec::with_capacity(m.cols() + 1);
    if ts.is_some() {
        header.push("timestamp");
    }
    header.extend(m.series_ids().iter().map(String::as_str));
    wtr.write_record(&header).map_err(csv_err)?;
    for r in 0..m.rows() {
        let mut record: Vec<String> = Vec::with_capacity(header.len());
        if let Some(ts) = ts {
            record.push(ts[r].clone());
        }
        record.extend(m.row(r).iter().map(|v| v.to_string()));
        wtr.write_record(&record).map_err(csv_err)?;
    }
    wtr.flush().map_err(io_err)?;
    drop(wtr);
    out.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, schema: &CsvSchema) -> Result<SeriesMatrix> {
        load_csv_from_reader(text.as_bytes(), "inline.csv", schema)
    }

    #[test]
    fn parses_plain_wide_file() {
        let m = load("a,b\n1,4\n2,5\n3,6\n", &CsvSchema::default()).unwrap();
        assert_eq!((m.rows(), m.cols()), (3, 2));
        assert_eq!(m.values(), &[1.0, 4.0, 2.0, 5.0, 3.0, 6.0]);
        assert_eq!(m.series_ids(), &["a", "b"]);
    }

    #[test]
    fn drops_column_with_missing_cell() {
        let m = load("a,b,c\n1,,7\n2,5,NaN\n3,6,9\n", &CsvSchema::default()).unwrap();
        assert_eq!(m.series_ids(), &["a"]);
        assert_eq!(m.cols(), 1);
    }

    #[test]
    fn forward_fill_policy() {
        let schema = CsvSchema {
            missing: MissingPolicy::ForwardFill,
            ..Default::default()
        };
        let m = load("a,b\n1,\n2,5\n,6\n", &schema).unwrap();
        assert_eq!(m.series_ids(), &["a"]);
        assert_eq!(m.column(0), vec![1.0, 2.0, 2.0]);
    }

    #[test]
    fn timestamp_column_is_metadata() {
        let schema = CsvSchema {
            timestamp_column: Some("time".into()),
            ..Default::default()
        };
        let m = load("time,x\n2020-01-01,1.5\n2020-01-02,2.5\n", &schema).unwrap();
        assert_eq!(m.cols(), 1);
        assert_eq!(m.timestamps().unwrap(), &["2020-01-01", "2020-01-02"]);
    }

    #[test]
    fn zero_as_missing_filters_idle_sensors() {
        let schema = CsvSchema {
            zero_is_missing: true,
            ..Default::default()
        };
        let m = load("a,b\n1,0\n2,5\n", &schema).unwrap();
        assert_eq!(m.series_ids(), &["a"]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            load("a,b\n1,2\n3\n", &CsvSchema::default()),
            Err(DatasetError::Ragged { record: 2, .. })
        ));
        assert!(matches!(
            load("a\n1\nxyz\n", &CsvSchema::default()),
            Err(DatasetError::Parse { record: 2, .. })
        ));
        assert!(matches!(load("a\n1\n\n", &CsvSchema::default()), Err(DatasetError::TooFewRows { .. })));
        assert!(matches!(load("a,b\n,1\n2,\n", &CsvSchema::default()), Err(DatasetError::NoColumns)));
        let schema = CsvSchema {
            value_columns: Some(vec!["zzz".into()]),
            ..Default::default()
        };
        assert!(matches!(load("a\n1\n2\n", &schema), Err(DatasetError::UnknownColumn(_))));
        assert!(matches!(
            load_csv("/definitely/not/here.csv", &CsvSchema::default()),
            Err(DatasetError::Io { .. })
        ));
    }

    #[test]
    fn deterministic_and_lossless_round_trip() {
        let text = "t,a,b\nx,0.1,3e-7\ny,1234.5678,-2\nz,0.30000000000000004,1\n";
        let schema = CsvSchema {
            timestamp_column: Some("t".into()),
            ..Default::default()
        };
        let a = load(text, &schema).unwrap();
        let b = load(text, &schema).unwrap();
        assert_eq!(a, b);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_csv(&a, &path).unwrap();
        let schema = CsvSchema {
            timestamp_column: Some("timestamp".into()),
            ..Default::default()
        };
        let back = load_csv(&path, &schema).unwrap();
        assert_eq!(back.values(), a.values());
        assert_eq!(back.timestamps(), a.timestamps());
    }
}
