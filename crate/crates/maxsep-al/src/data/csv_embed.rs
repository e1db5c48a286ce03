//! Precomputed-embedding datasets from CSV.
//!
//! Header: `split,label,f0,...,f{d-1}` with split in {train, test}. The
//! class count is inferred as `1 + max label`; gaps in the label range are
//! tolerated with a warning.

use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

use super::Dataset;

pub fn load_csv_embeddings(path: &Path) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let display = path.display().to_string();

    let headers = reader.headers()?.clone();
    if headers.len() < 3 || &headers[0] != "split" || &headers[1] != "label" {
        return Err(Error::Format {
            path: display.clone(),
            field: "header",
            detail: format!(
                "expected header `split,label,f0,...`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
            offset: 0,
        });
    }
    let dim = headers.len() - 2;
    for (j, name) in headers.iter().skip(2).enumerate() {
        if name != format!("f{j}") {
            return Err(Error::Format {
                path: display.clone(),
                field: "header",
                detail: format!("feature column {} named `{name}`, expected `f{j}`", j + 2),
                offset: 0,
            });
        }
    }

    let mut train_rows: Vec<Vec<f64>> = Vec::new();
    let mut train_labels = Vec::new();
    let mut test_rows: Vec<Vec<f64>> = Vec::new();
    let mut test_labels = Vec::new();

    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let row_no = line + 2; // header is line 1
        if record.len() != headers.len() {
            return Err(Error::Format {
                path: display.clone(),
                field: "row",
                detail: format!(
                    "row {row_no} has {} fields, expected {}",
                    record.len(),
                    headers.len()
                ),
                offset: record.position().map_or(0, |p| p.byte()),
            });
        }
        let label: usize = record[1].parse().map_err(|_| Error::Format {
            path: display.clone(),
            field: "label",
            detail: format!("row {row_no}: unparseable label `{}`", &record[1]),
            offset: record.position().map_or(0, |p| p.byte()),
        })?;
        let mut features = Vec::with_capacity(dim);
        for (j, raw) in record.iter().skip(2).enumerate() {
            let v: f64 = raw.parse().map_err(|_| Error::Format {
                path: display.clone(),
                field: "feature",
                detail: format!("row {row_no}: non-numeric value `{raw}` in f{j}"),
                offset: record.position().map_or(0, |p| p.byte()),
            })?;
            features.push(v);
        }
        match &record[0] {
            "train" => {
                train_rows.push(features);
                train_labels.push(label);
            }
            "test" => {
                test_rows.push(features);
                test_labels.push(label);
            }
            other => {
                return Err(Error::Format {
                    path: display.clone(),
                    field: "split",
                    detail: format!("row {row_no}: split `{other}` is neither train nor test"),
                    offset: record.position().map_or(0, |p| p.byte()),
                })
            }
        }
    }

    if train_rows.is_empty() {
        return Err(Error::invalid_argument(format!("{display}: train split is empty")));
    }
    if test_rows.is_empty() {
        return Err(Error::invalid_argument(format!("{display}: test split is empty")));
    }

    let max_label = train_labels.iter().chain(&test_labels).copied().max().unwrap_or(0);
    let num_classes = max_label + 1;
    let mut seen = vec![false; num_classes];
    for &y in train_labels.iter().chain(&test_labels) {
        seen[y] = true;
    }
    if seen.iter().any(|&s| !s) {
        let missing: Vec<String> = seen
            .iter()
            .enumerate()
            .filter(|(_, &s)| !s)
            .map(|(c, _)| c.to_string())
            .collect();
        eprintln!(
            "warning: {display}: labels have gaps (no samples for {{{}}}); using C = {num_classes}",
            missing.join(", ")
        );
    }

    let to_matrix = |rows: Vec<Vec<f64>>| {
        Array2::from_shape_fn((rows.len(), dim), |(i, j)| rows[i][j])
    };
    let ds = Dataset {
        name: path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "csv".to_string()),
        train_inputs: to_matrix(train_rows),
        train_labels,
        test_inputs: to_matrix(test_rows),
        test_labels,
        num_classes,
        normalization: None,
    };
    ds.validate()?;
    Ok(ds)
}
