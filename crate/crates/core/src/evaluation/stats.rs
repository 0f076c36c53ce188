use serde::{Deserialize, Serialize};

/// Summary of per-run scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub values: Vec<f64>,
    pub median: f64,
    /// First and third quartiles, linearly interpolated.
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
}

/// Quantile `p` of sorted data with linear interpolation between order statistics.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl RunStats {
    /// Panics on an empty slice.
    pub fn from_values(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "run statistics need at least one value");
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        Self {
            median: quantile(&sorted, 0.5),
            q1: quantile(&sorted, 0.25),
            q3: quantile(&sorted, 0.75),
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn median_examples() {
        assert_eq!(RunStats::from_values(vec![3.0]).median, 3.0);
        assert_eq!(RunStats::from_values(vec![4.0, 1.0, 3.0, 2.0]).median, 2.5);
        let s = RunStats::from_values(vec![5.0, 1.0, 3.0, 2.0, 4.0]);
        assert_eq!((s.median, s.q1, s.q3, s.min, s.max), (3.0, 2.0, 4.0, 1.0, 5.0));
        assert_eq!(s.values, vec![5.0, 1.0, 3.0, 2.0, 4.0]);
    }

    proptest! {
        #[test]
        fn median_matches_sort_oracle(v in prop::collection::vec(-1e3f64..1e3, 1..60)) {
            let mut s = v.clone();
            s.sort_by(f64::total_cmp);
            let n = s.len();
            let oracle = if n % 2 == 1 { s[n / 2] } else { 0.5 * (s[n / 2 - 1] + s[n / 2]) };
            let got = RunStats::from_values(v).median;
            prop_assert!((got - oracle).abs() <= 1e-12 * oracle.abs().max(1.0));
        }
    }
}
