//! Elementwise and row-wise nonlinearities, always evaluated in f64.

use ndarray::{Array1, Array2, ArrayView1, Axis};

pub const LAYER_NORM_EPS: f64 = 1e-9;

/// Numerically stable softmax over each row.
pub fn softmax_rows(x: &Array2<f64>) -> Array2<f64> {
    let mut out = x.clone();
    for mut row in out.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

/// Normalizes each row to zero mean and unit (biased) variance, then applies
/// `gamma` and `beta`.
pub fn layer_norm(x: &Array2<f64>, gamma: ArrayView1<f64>, beta: ArrayView1<f64>) -> Array2<f64> {
    let mut out = x.clone();
    for mut row in out.rows_mut() {
        let n = row.len() as f64;
        let mean = row.sum() / n;
        let var = row.fold(0.0, |acc, &v| acc + (v - mean) * (v - mean)) / n;
        let inv = 1.0 / (var + LAYER_NORM_EPS).sqrt();
        for ((v, &g), &b) in row.iter_mut().zip(gamma).zip(beta) {
            *v = (*v - mean) * inv * g + b;
        }
    }
    out
}

/// Tanh approximation of GELU.
pub fn gelu(x: f64) -> f64 {
    const C: f64 = 0.797_884_560_802_865_4; // sqrt(2 / pi)
    0.5 * x * (1.0 + (C * (x + 0.044_715 * x * x * x)).tanh())
}

pub fn mean_pool(x: &Array2<f64>) -> Array1<f64> {
    x.mean_axis(Axis(0)).expect("mean_pool of an empty sequence")
}

pub fn argmax(v: ArrayView1<f64>) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1};
    use proptest::prelude::*;

    #[test]
    fn gelu_reference_points() {
        assert_eq!(gelu(0.0), 0.0);
        assert!((gelu(1.0) - 0.841_191_990_607_477_2).abs() < 1e-12);
        assert!((gelu(-3.0) + 0.003_637_392_4).abs() < 1e-8);
    }

    #[test]
    fn softmax_handles_large_logits() {
        let s = softmax_rows(&array![[1000.0, 1000.0], [-1e4, 0.0]]);
        assert_eq!(s[[0, 0]], 0.5);
        assert_eq!(s[[1, 1]], 1.0);
    }

    #[test]
    fn argmax_takes_first_maximum() {
        assert_eq!(argmax(array![1.0, 3.0, 3.0, 2.0].view()), 1);
    }

    fn row_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-50.0f64..50.0, 2..32)
    }

    proptest! {
        #[test]
        fn softmax_rows_sum_to_one(rows in prop::collection::vec(row_strategy(), 1..4)) {
            let width = rows[0].len();
            let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().cycle().take(width).copied()).collect();
            let x = Array2::from_shape_vec((rows.len(), width), flat).unwrap();
            for row in softmax_rows(&x).rows() {
                prop_assert!((row.sum() - 1.0).abs() <= 1e-9);
                prop_assert!(row.iter().all(|&p| p >= 0.0));
            }
        }

        #[test]
        fn layer_norm_moments(row in row_strategy()) {
            let n = row.len();
            let m0 = row.iter().sum::<f64>() / n as f64;
            prop_assume!(row.iter().map(|v| (v - m0).powi(2)).sum::<f64>() / n as f64 > 1e-2);
            let x = Array2::from_shape_vec((1, n), row).unwrap();
            let y = layer_norm(&x, Array1::ones(n).view(), Array1::zeros(n).view());
            let mean = y.sum() / n as f64;
            let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
            prop_assert!(mean.abs() <= 1e-9);
            prop_assert!((var - 1.0).abs() <= 1e-6);
        }
    }
}
