use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::Matrix;

/// A tabular regression dataset tied to one domain.
///
/// Rows are samples. Inputs and outputs always have the same row count, there
/// is at least one row and every entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    domain_id: String,
    inputs: Matrix,
    outputs: Matrix,
    feature_names: Vec<String>,
    output_names: Vec<String>,
}

impl LabeledDataset {
    pub fn new(
        domain_id: impl Into<String>,
        inputs: Matrix,
        outputs: Matrix,
        feature_names: Vec<String>,
        output_names: Vec<String>,
    ) -> Result<Self> {
        if inputs.nrows() == 0 {
            return Err(Error::EmptyData);
        }
        if inputs.nrows() != outputs.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "{} input rows vs {} output rows",
                inputs.nrows(),
                outputs.nrows()
            )));
        }
        if inputs.ncols() == 0 || outputs.ncols() == 0 {
            return Err(Error::InvalidDataset("need at least one input and one output".into()));
        }
        if feature_names.len() != inputs.ncols() || output_names.len() != outputs.ncols() {
            return Err(Error::InvalidDataset("column name count does not match data".into()));
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidDataset(format!("duplicate feature name {name:?}")));
            }
        }
        if inputs.iter().chain(outputs.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(Self {
            domain_id: domain_id.into(),
            inputs,
            outputs,
            feature_names,
            output_names,
        })
    }

    /// Builds a dataset with generated column names (`x0..`, `y0..`).
    pub fn from_matrices(domain_id: impl Into<String>, inputs: Matrix, outputs: Matrix) -> Result<Self> {
        let feature_names = (0..inputs.ncols()).map(|j| format!("x{j}")).collect();
        let output_names = (0..outputs.ncols()).map(|j| format!("y{j}")).collect();
        Self::new(domain_id, inputs, outputs, feature_names, output_names)
    }

    pub fn domain_id(&self) -> &str {
        &self.domain_id
    }

    pub fn inputs(&self) -> &Matrix {
        &self.inputs
    }

    pub fn outputs(&self) -> &Matrix {
        &self.outputs
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn output_names(&self) -> &[String] {
        &self.output_names
    }

    pub fn n_rows(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn n_in(&self) -> usize {
        self.inputs.ncols()
    }

    pub fn n_out(&self) -> usize {
        self.outputs.ncols()
    }

    /// The concatenated `[x, y]` vector of row `i`.
    pub fn joined_row(&self, i: usize) -> Vec<f64> {
        self.inputs
            .row(i)
            .iter()
            .chain(self.outputs.row(i).iter())
            .copied()
            .collect()
    }

    /// All rows as `[x, y]` vectors.
    pub fn joined_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows()).map(|i| self.joined_row(i)).collect()
    }

    /// Copy of the dataset without row `i`; remaining rows keep their order.
    pub fn remove_row(&self, i: usize) -> Result<Self> {
        let n = self.n_rows();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        if n == 1 {
            return Err(Error::EmptyData);
        }
        let mut out = self.clone();
        out.inputs = self.inputs.clone().remove_row(i);
        out.outputs = self.outputs.clone().remove_row(i);
        Ok(out)
    }

    /// Copy with a row inserted at position `i` (`i == n_rows()` appends).
    pub fn insert_row(&self, i: usize, x: &[f64], y: &[f64]) -> Result<Self> {
        let n = self.n_rows();
        if i > n {
            return Err(Error::IndexOutOfRange { index: i, len: n + 1 });
        }
        if x.len() != self.n_in() || y.len() != self.n_out() {
            return Err(Error::ShapeMismatch("inserted row width".into()));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        let mut out = self.clone();
        out.inputs = self.inputs.clone().insert_row(i, 0.0);
        out.outputs = self.outputs.clone().insert_row(i, 0.0);
        for (j, v) in x.iter().enumerate() {
            out.inputs[(i, j)] = *v;
        }
        for (j, v) in y.iter().enumerate() {
            out.outputs[(i, j)] = *v;
        }
        Ok(out)
    }

    /// Copy restricted to the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyData);
        }
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n_rows()) {
            return Err(Error::IndexOutOfRange { index: bad, len: self.n_rows() });
        }
        let mut out = self.clone();
        out.inputs = self.inputs.select_rows(rows);
        out.outputs = self.outputs.select_rows(rows);
        Ok(out)
    }

    /// Rows of `self` followed by rows of `other`; keeps `self`'s names and domain.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.n_in() != other.n_in() || self.n_out() != other.n_out() {
            return Err(Error::ShapeMismatch("cannot stack datasets of different widths".into()));
        }
        let stack = |a: &Matrix, b: &Matrix| {
            Matrix::from_fn(a.nrows() + b.nrows(), a.ncols(), |r, c| {
                if r < a.nrows() {
                    a[(r, c)]
                } else {
                    b[(r - a.nrows(), c)]
                }
            })
        };
        let mut out = self.clone();
        out.inputs = stack(&self.inputs, &other.inputs);
        out.outputs = stack(&self.outputs, &other.outputs);
        Ok(out)
    }

    pub(crate) fn with_values(&self, inputs: Matrix, outputs: Matrix) -> Self {
        debug_assert_eq!(inputs.shape(), self.inputs.shape());
        debug_assert_eq!(outputs.shape(), self.outputs.shape());
        Self {
            inputs,
            outputs,
            ..self.clone()
        }
    }
}

/// Reads a CSV file whose header names `n_in` input columns followed by
/// `n_out` output columns.
///
/// Row and column numbers in errors are 1-based data-row / column positions.
pub fn load_csv(path: impl AsRef<Path>, n_in: usize, n_out: usize, domain_id: &str) -> Result<LabeledDataset> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let width = n_in + n_out;
    if header.len() != width {
        return Err(Error::ColumnCountMismatch { expected: width, found: header.len() });
    }

    let mut values = Vec::new();
    let mut n_rows = 0;
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != width {
            return Err(Error::ColumnCountMismatch { expected: width, found: record.len() });
        }
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::NonNumericCell(r + 1, c + 1))?;
            if !v.is_finite() {
                return Err(Error::NonNumericCell(r + 1, c + 1));
            }
            values.push(v);
        }
        n_rows += 1;
    }
    if n_rows == 0 {
        return Err(Error::EmptyData);
    }
    let all = Matrix::from_row_slice(n_rows, width, &values);
    let inputs = all.columns(0, n_in).into_owned();
    let outputs = all.columns(n_in, n_out).into_owned();
    LabeledDataset::new(
        domain_id,
        inputs,
        outputs,
        header[..n_in].to_vec(),
        header[n_in..].to_vec(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn two_rows() -> LabeledDataset {
        LabeledDataset::from_matrices(
            "d",
            Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]),
            Matrix::from_row_slice(2, 1, &[5.0, 6.0]),
        )
        .unwrap()
    }

    #[test]
    fn loads_nine_row_wire_file() {
        let mut text = String::from("MFR,TS,ED,width\n");
        for i in 0..9 {
            text.push_str(&format!("{},{},{},{}\n", 30.0 + i as f64, 10.0, 80.0, 3.1));
        }
        let f = write_tmp(&text);
        let ds = load_csv(f.path(), 3, 1, "DED-LB/w").unwrap();
        assert_eq!(ds.n_rows(), 9);
        assert_eq!(ds.n_in(), 3);
        assert_eq!(ds.feature_names(), ["MFR", "TS", "ED"]);
        assert_eq!(ds.inputs()[(8, 0)], 38.0);
    }

    #[test]
    fn header_only_is_rejected() {
        let f = write_tmp("a,b,y\n");
        assert!(matches!(load_csv(f.path(), 2, 1, "d"), Err(Error::EmptyData)));
    }

    #[test]
    fn reports_non_numeric_cell_position() {
        let f = write_tmp("a,b,y\n1,2,3\nabc,2,3\n");
        assert!(matches!(load_csv(f.path(), 2, 1, "d"), Err(Error::NonNumericCell(2, 1))));
    }

    #[test]
    fn rejects_nan_and_wrong_widths() {
        let f = write_tmp("a,b,y\n1,NaN,3\n");
        assert!(matches!(load_csv(f.path(), 2, 1, "d"), Err(Error::NonNumericCell(1, 2))));
        let f = write_tmp("a,b,y\n1,2,3\n");
        assert!(matches!(
            load_csv(f.path(), 3, 1, "d"),
            Err(Error::ColumnCountMismatch { expected: 4, found: 3 })
        ));
        assert!(matches!(load_csv("/no/such/file.csv", 2, 1, "d"), Err(Error::MissingFile(_))));
    }

    #[test]
    fn duplicate_feature_names_rejected() {
        let r = LabeledDataset::new(
            "d",
            Matrix::zeros(1, 2),
            Matrix::zeros(1, 1),
            vec!["a".into(), "a".into()],
            vec!["y".into()],
        );
        assert!(matches!(r, Err(Error::InvalidDataset(_))));
    }

    #[test]
    fn remove_row_keeps_order_and_input() {
        let ds = two_rows();
        let out = ds.remove_row(0).unwrap();
        assert_eq!(out.n_rows(), 1);
        assert_eq!(out.joined_row(0), vec![3.0, 4.0, 6.0]);
        assert_eq!(ds.n_rows(), 2);
        assert!(matches!(ds.remove_row(2), Err(Error::IndexOutOfRange { index: 2, len: 2 })));
    }

    #[test]
    fn remove_then_insert_is_identity() {
        let ds = two_rows();
        let removed = ds.remove_row(1).unwrap();
        let back = removed.insert_row(1, &[3.0, 4.0], &[6.0]).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn remove_last_of_sixty_one() {
        let ds = LabeledDataset::from_matrices(
            "p",
            Matrix::from_fn(61, 3, |r, c| (r * 3 + c) as f64),
            Matrix::from_fn(61, 1, |r, _| r as f64),
        )
        .unwrap();
        let out = ds.remove_row(60).unwrap();
        assert_eq!(out.n_rows(), 60);
        assert_eq!(out.outputs()[(59, 0)], 59.0);
    }
}
