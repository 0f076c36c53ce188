use serde::{Deserialize, Serialize};

use super::LabeledDataset;
use crate::error::{Error, Result};
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnRange {
    pub min: f64,
    pub max: f64,
}

impl ColumnRange {
    /// A constant column; such columns scale to 0.
    pub fn is_degenerate(&self) -> bool {
        self.min == self.max
    }

    fn scale(&self, v: f64) -> f64 {
        if self.is_degenerate() {
            0.0
        } else {
            (v - self.min) / (self.max - self.min)
        }
    }

    fn unscale(&self, v: f64) -> f64 {
        if self.is_degenerate() {
            self.min
        } else {
            self.min + v * (self.max - self.min)
        }
    }
}

/// Per-column min-max scaling to the unit interval, inputs first then outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSpec {
    pub n_in: usize,
    pub n_out: usize,
    pub columns: Vec<ColumnRange>,
    pub fitted_on: String,
}

/// Fits one scaler over the union of all rows of `datasets`.
pub fn fit_unit_scaler(datasets: &[&LabeledDataset]) -> Result<ScalingSpec> {
    let first = datasets.first().ok_or(Error::EmptyData)?;
    let (n_in, n_out) = (first.n_in(), first.n_out());
    if datasets.iter().any(|d| d.n_in() != n_in || d.n_out() != n_out) {
        return Err(Error::ShapeMismatch("datasets disagree on column counts".into()));
    }
    let mut columns = vec![ColumnRange { min: f64::INFINITY, max: f64::NEG_INFINITY }; n_in + n_out];
    for ds in datasets {
        for (j, col) in columns.iter_mut().enumerate() {
            let values = if j < n_in { ds.inputs().column(j) } else { ds.outputs().column(j - n_in) };
            for &v in values.iter() {
                col.min = col.min.min(v);
                col.max = col.max.max(v);
            }
        }
    }
    let fitted_on = datasets.iter().map(|d| d.domain_id()).collect::<Vec<_>>().join("+");
    Ok(ScalingSpec { n_in, n_out, columns, fitted_on })
}

impl ScalingSpec {
    pub fn input_ranges(&self) -> &[ColumnRange] {
        &self.columns[..self.n_in]
    }

    pub fn output_ranges(&self) -> &[ColumnRange] {
        &self.columns[self.n_in..]
    }

    /// Names of constant columns, for warnings.
    pub fn degenerate_columns<'a>(&self, ds: &'a LabeledDataset) -> Vec<&'a str> {
        ds.feature_names()
            .iter()
            .chain(ds.output_names())
            .zip(&self.columns)
            .filter(|(_, c)| c.is_degenerate())
            .map(|(name, _)| name.as_str())
            .collect()
    }

    fn check(&self, ds: &LabeledDataset) -> Result<()> {
        if ds.n_in() != self.n_in || ds.n_out() != self.n_out {
            return Err(Error::ShapeMismatch(format!(
                "scaler fitted for {}+{} columns, dataset has {}+{}",
                self.n_in,
                self.n_out,
                ds.n_in(),
                ds.n_out()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, ds: &LabeledDataset) -> Result<LabeledDataset> {
        self.check(ds)?;
        let inputs = map_columns(ds.inputs(), self.input_ranges(), ColumnRange::scale);
        let outputs = map_columns(ds.outputs(), self.output_ranges(), ColumnRange::scale);
        Ok(ds.with_values(inputs, outputs))
    }

    pub fn invert(&self, ds: &LabeledDataset) -> Result<LabeledDataset> {
        self.check(ds)?;
        let inputs = map_columns(ds.inputs(), self.input_ranges(), ColumnRange::unscale);
        let outputs = map_columns(ds.outputs(), self.output_ranges(), ColumnRange::unscale);
        Ok(ds.with_values(inputs, outputs))
    }

    /// Maps scaled predictions back to original output units.
    pub fn invert_outputs(&self, predictions: &Matrix) -> Result<Matrix> {
        if predictions.ncols() != self.n_out {
            return Err(Error::ShapeMismatch("prediction width".into()));
        }
        Ok(map_columns(predictions, self.output_ranges(), ColumnRange::unscale))
    }
}

fn map_columns(m: &Matrix, ranges: &[ColumnRange], f: fn(&ColumnRange, f64) -> f64) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |r, c| f(&ranges[c], m[(r, c)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn column(values: &[f64]) -> LabeledDataset {
        let n = values.len();
        LabeledDataset::from_matrices("d", Matrix::from_column_slice(n, 1, values), Matrix::from_element(n, 1, 1.0))
            .unwrap()
    }

    #[test]
    fn endpoints_map_to_unit_interval() {
        let ds = column(&[2.0, 4.0, 6.0]);
        let spec = fit_unit_scaler(&[&ds]).unwrap();
        assert_eq!(spec.columns[0], ColumnRange { min: 2.0, max: 6.0 });
        let scaled = spec.apply(&ds).unwrap();
        assert_eq!(scaled.inputs().as_slice(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn constant_column_is_degenerate_and_scales_to_zero() {
        let ds = column(&[5.0, 5.0]);
        let spec = fit_unit_scaler(&[&ds]).unwrap();
        assert!(spec.columns[0].is_degenerate());
        assert_eq!(spec.degenerate_columns(&ds), vec!["x0", "y0"]);
        assert_eq!(spec.apply(&ds).unwrap().inputs().as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn joint_fit_covers_union_of_ranges() {
        let a = column(&[0.0, 1.0]);
        let b = column(&[2.0, 3.0]);
        let spec = fit_unit_scaler(&[&a, &b]).unwrap();
        assert_eq!(spec.columns[0], ColumnRange { min: 0.0, max: 3.0 });
        assert_eq!(spec.fitted_on, "d+d");
        // Out-of-range values extrapolate.
        let c = column(&[6.0]);
        assert_eq!(spec.apply(&c).unwrap().inputs()[(0, 0)], 2.0);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = column(&[0.0, 1.0]);
        let wide = LabeledDataset::from_matrices("w", Matrix::zeros(1, 2), Matrix::zeros(1, 1)).unwrap();
        assert!(matches!(fit_unit_scaler(&[&a, &wide]), Err(Error::ShapeMismatch(_))));
        let spec = fit_unit_scaler(&[&a]).unwrap();
        assert!(matches!(spec.apply(&wide), Err(Error::ShapeMismatch(_))));
    }

    proptest! {
        #[test]
        fn round_trip_and_unit_range(values in prop::collection::vec(-1e3f64..1e3, 2..30)) {
            let n = values.len() / 2;
            prop_assume!(n >= 1);
            let inputs = Matrix::from_column_slice(n, 1, &values[..n]);
            let outputs = Matrix::from_column_slice(n, 1, &values[n..2 * n]);
            let ds = LabeledDataset::from_matrices("d", inputs, outputs).unwrap();
            let spec = fit_unit_scaler(&[&ds]).unwrap();
            let scaled = spec.apply(&ds).unwrap();
            let back = spec.invert(&scaled).unwrap();
            for (a, b) in ds.inputs().iter().chain(ds.outputs().iter()).zip(back.inputs().iter().chain(back.outputs().iter())) {
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            }
            for (j, col) in spec.columns.iter().enumerate() {
                if col.is_degenerate() { continue; }
                let m = if j == 0 { scaled.inputs().column(0).into_owned() } else { scaled.outputs().column(0).into_owned() };
                prop_assert_eq!(m.min(), 0.0);
                prop_assert!((m.max() - 1.0).abs() < 1e-12);
            }
        }
    }
}
