use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Column-major numeric table with an optional binary outlier label.
///
/// Labels are carried alongside the features for evaluation only; nothing
/// that fits a model ever reads them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    labels: Option<Vec<u8>>,
}

impl Table {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>, labels: Option<Vec<u8>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::InvalidTable(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        if columns.is_empty() {
            return Err(Error::InvalidTable("table has no columns".into()));
        }
        let n = columns[0].len();
        if n == 0 {
            return Err(Error::InvalidTable("table has no rows".into()));
        }
        let mut seen = HashSet::new();
        for (name, col) in names.iter().zip(&columns) {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
            if col.len() != n {
                return Err(Error::InvalidTable(format!(
                    "column \"{name}\" has {} rows, expected {n}",
                    col.len()
                )));
            }
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    row: row + 1,
                    column: name.clone(),
                });
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::InvalidTable(format!(
                    "{} labels for {n} rows",
                    labels.len()
                )));
            }
            if let Some(row) = labels.iter().position(|&l| l > 1) {
                return Err(Error::InvalidLabel {
                    row: row + 1,
                    value: labels[row].to_string(),
                });
            }
        }
        Ok(Table {
            names,
            columns,
            labels,
        })
    }

    /// Builds an unlabeled table from a row-major matrix.
    pub fn from_matrix(names: Vec<String>, m: &Matrix) -> Result<Self> {
        let columns = (0..m.cols()).map(|j| m.column(j)).collect();
        Table::new(names, columns, None)
    }

    pub fn n_rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    /// Feature view with the labels stripped. Everything on the fitting side
    /// of the pipeline receives tables produced by this method.
    pub fn without_labels(&self) -> Table {
        Table {
            names: self.names.clone(),
            columns: self.columns.clone(),
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<u8>) -> Result<Self> {
        self.labels = Some(labels);
        Table::new(self.names, self.columns, self.labels)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Table {
        Table {
            names: self.names.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&i| c[i]).collect())
                .collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| rows.iter().map(|&i| l[i]).collect()),
        }
    }

    /// Row-major copy of the feature columns.
    pub fn to_matrix(&self) -> Matrix {
        let cols: Vec<&[f64]> = self.columns.iter().map(Vec::as_slice).collect();
        Matrix::from_columns(&cols).expect("table columns share one length")
    }

    /// Checks that `other` carries the same feature columns in the same order.
    pub fn check_same_schema(&self, names: &[String]) -> Result<()> {
        if self.names != names {
            return Err(Error::SchemaMismatch(format!(
                "expected columns {:?}, got {:?}",
                names, self.names
            )));
        }
        Ok(())
    }

    pub fn load_csv(path: impl AsRef<Path>, label_column: Option<&str>) -> Result<Table> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Table::read_csv(file, label_column)
    }

    pub fn read_csv<R: Read>(reader: R, label_column: Option<&str>) -> Result<Table> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();

        let mut seen = HashSet::new();
        for h in &headers {
            if !seen.insert(h.as_str()) {
                return Err(Error::DuplicateColumn(h.clone()));
            }
        }
        let label_idx = match label_column {
            Some(name) => Some(
                headers
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| Error::LabelColumnNotFound(name.to_owned()))?,
            ),
            None => None,
        };

        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
        let mut labels = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let row = i + 1;
            for (j, cell) in record.iter().enumerate() {
                if Some(j) == label_idx {
                    labels.push(parse_label(cell, row)?);
                    continue;
                }
                let value: f64 = cell.parse().map_err(|_| Error::ParseCell {
                    row,
                    column: headers[j].clone(),
                    value: cell.to_owned(),
                })?;
                if !value.is_finite() {
                    return Err(Error::NonFinite {
                        row,
                        column: headers[j].clone(),
                    });
                }
                columns[j].push(value);
            }
        }

        let (names, columns) = match label_idx {
            Some(l) => headers
                .into_iter()
                .zip(columns)
                .enumerate()
                .filter(|(j, _)| *j != l)
                .map(|(_, nc)| nc)
                .unzip(),
            None => (headers, columns),
        };
        Table::new(names, columns, label_idx.map(|_| labels))
    }

    pub fn write_csv<W: Write>(&self, writer: W, label_column: &str) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.names.iter().map(String::as_str).collect();
        if self.labels.is_some() {
            header.push(label_column);
        }
        wtr.write_record(&header)?;
        let mut record = Vec::with_capacity(header.len());
        for i in 0..self.n_rows() {
            record.clear();
            // `Display` for f64 prints the shortest string that parses back
            // to the same bits.
            record.extend(self.columns.iter().map(|c| c[i].to_string()));
            if let Some(labels) = &self.labels {
                record.push(labels[i].to_string());
            }
            wtr.write_record(&record)?;
        }
        wtr.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>, label_column: &str) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file), label_column)
    }
}

fn parse_label(cell: &str, row: usize) -> Result<u8> {
    match cell.parse::<f64>() {
        Ok(0.0) => Ok(0),
        Ok(1.0) => Ok(1),
        _ => Err(Error::InvalidLabel {
            row,
            value: cell.to_owned(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SMALL: &str = "a,b,y\n1,2,0\n3,4,0\n5,6,1\n";

    #[test]
    fn load_with_label_column() {
        let t = Table::read_csv(SMALL.as_bytes(), Some("y")).unwrap();
        assert_eq!(t.n_rows(), 3);
        assert_eq!(t.names(), &["a", "b"]);
        assert_eq!(t.column(1), &[2.0, 4.0, 6.0]);
        assert_eq!(t.labels(), Some(&[0u8, 0, 1][..]));
    }

    #[test]
    fn load_without_label_column() {
        let t = Table::read_csv(SMALL.as_bytes(), None).unwrap();
        assert_eq!(t.names(), &["a", "b", "y"]);
        assert!(t.labels().is_none());
    }

    #[test]
    fn bad_cell_names_row_and_column() {
        let src = "a,b,y\n1,2,0\n3,abc,0\n";
        match Table::read_csv(src.as_bytes(), Some("y")) {
            Err(Error::ParseCell { row, column, value }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "b");
                assert_eq!(value, "abc");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn load_errors() {
        assert!(matches!(
            Table::read_csv("a,a\n1,2\n".as_bytes(), None),
            Err(Error::DuplicateColumn(_))
        ));
        assert!(matches!(
            Table::read_csv(SMALL.as_bytes(), Some("z")),
            Err(Error::LabelColumnNotFound(_))
        ));
        assert!(matches!(
            Table::read_csv("a,y\n1,2\n".as_bytes(), Some("y")),
            Err(Error::InvalidLabel { row: 1, .. })
        ));
        assert!(matches!(
            Table::read_csv("a,b\n1,\n".as_bytes(), None),
            Err(Error::ParseCell { .. })
        ));
        assert!(matches!(
            Table::read_csv("a,b\n1,NaN\n".as_bytes(), None),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(
            Table::load_csv("/nonexistent/file.csv", None),
            Err(Error::Io { .. })
        ));
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_exact(
            rows in prop::collection::vec((any::<f64>(), -1e300f64..1e300, 0u8..2), 1..40)
        ) {
            let a: Vec<f64> = rows.iter().map(|r| if r.0.is_finite() { r.0 } else { 0.0 }).collect();
            let b: Vec<f64> = rows.iter().map(|r| r.1).collect();
            let labels: Vec<u8> = rows.iter().map(|r| r.2).collect();
            let t = Table::new(vec!["a".into(), "b".into()], vec![a, b], Some(labels)).unwrap();
            let mut buf = Vec::new();
            t.write_csv(&mut buf, "label").unwrap();
            let back = Table::read_csv(buf.as_slice(), Some("label")).unwrap();
            prop_assert_eq!(back.columns().len(), 2);
            for (x, y) in t.columns().iter().flatten().zip(back.columns().iter().flatten()) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
            prop_assert_eq!(t.labels(), back.labels());
        }
    }
}
