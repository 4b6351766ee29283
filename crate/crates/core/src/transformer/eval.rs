use std::path::Path;

use ndarray::{Array1, Array2};
use rayon::prelude::*;

use super::forward::{forward, ArithmeticMode, GemmRunner};
use super::model::TinyTransformer;
use super::ops::argmax;
use crate::error::{Error, Result};
use crate::sc::mix64;
use crate::tensor_io::{NamedTensor, TensorFile};

/// Labeled `[seq, d_model]` inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: Vec<Array2<f64>>,
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Reads tensors `inputs` (`[n, seq, d]`) and `labels` (`u32[n]`).
    pub fn load(path: &Path) -> Result<Self> {
        Self::from_tensor_file(&TensorFile::read(path)?, path)
    }

    pub fn from_tensor_file(file: &TensorFile, path: &Path) -> Result<Self> {
        let bad = |reason: &str| Error::TensorFormat {
            path: path.to_path_buf(),
            reason: reason.to_string(),
        };
        let inputs = file.get("inputs").ok_or_else(|| bad("missing tensor \"inputs\""))?;
        let labels = file.get("labels").ok_or_else(|| bad("missing tensor \"labels\""))?;
        let [n, seq, d] = inputs.shape[..] else {
            return Err(bad("\"inputs\" must be rank 3"));
        };
        let labels = labels.as_u32().ok_or_else(|| bad("\"labels\" must be u32"))?;
        if labels.len() != n {
            return Err(bad("label count differs from input count"));
        }
        let flat = inputs.to_f64();
        let inputs = flat
            .chunks_exact((seq * d).max(1))
            .take(n)
            .map(|c| Array2::from_shape_vec((seq, d), c.to_vec()).expect("chunk size"))
            .collect();
        Ok(Dataset {
            inputs,
            labels: labels.iter().map(|&l| l as usize).collect(),
        })
    }

    pub fn to_tensor_file(&self) -> Result<TensorFile> {
        let (seq, d) = self.inputs.first().map_or((0, 0), |x| x.dim());
        if self.inputs.iter().any(|x| x.dim() != (seq, d)) {
            return Err(Error::ShapeMismatch("dataset inputs differ in shape".into()));
        }
        let mut f = TensorFile::default();
        f.push(NamedTensor::f64(
            "inputs",
            &[self.len(), seq, d],
            self.inputs.iter().flat_map(|x| x.iter().copied()).collect(),
        ));
        f.push(NamedTensor::u32(
            "labels",
            &[self.len()],
            self.labels.iter().map(|&l| l as u32).collect(),
        ));
        Ok(f)
    }
}

/// Agreement between a reference and a candidate arithmetic mode.
///
/// The relative logit error of one item is `|z_c - z_r|_2 / |z_r|_2`, or the
/// absolute difference norm when the reference logits are all zero.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    pub reference_mode: String,
    pub candidate_mode: String,
    pub items: usize,
    pub reference_accuracy: f64,
    pub candidate_accuracy: f64,
    /// Fraction of items whose top-1 class matches between the modes.
    pub top1_agreement: f64,
    pub mean_relative_logit_error: f64,
    pub max_relative_logit_error: f64,
}

fn relative_error(candidate: &Array1<f64>, reference: &Array1<f64>) -> f64 {
    let diff = (candidate - reference).mapv(|v| v * v).sum().sqrt();
    let norm = reference.mapv(|v| v * v).sum().sqrt();
    if norm > 0.0 {
        diff / norm
    } else {
        diff
    }
}

/// Runs every item through both modes. Item `i` uses runner seed
/// `mix64(seed ^ i)` in both modes; results do not depend on thread count.
pub fn evaluate(
    model: &TinyTransformer,
    dataset: &Dataset,
    reference: ArithmeticMode,
    candidate: ArithmeticMode,
    seed: u64,
) -> Result<AccuracyReport> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if dataset.labels.len() != dataset.len() {
        return Err(Error::ShapeMismatch("label count differs from input count".into()));
    }
    let classes = model.config.vocab_or_classes;
    if let Some(&l) = dataset.labels.iter().find(|&&l| l >= classes) {
        return Err(Error::ShapeMismatch(format!(
            "label {l} out of range for {classes} classes"
        )));
    }
    let per_item: Vec<(usize, usize, f64)> = dataset
        .inputs
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let item_seed = mix64(seed ^ i as u64);
            let zr = forward(model, x, &mut GemmRunner::new(reference, item_seed))?;
            let zc = forward(model, x, &mut GemmRunner::new(candidate, item_seed))?;
            Ok((argmax(zr.view()), argmax(zc.view()), relative_error(&zc, &zr)))
        })
        .collect::<Result<_>>()?;

    let n = per_item.len() as f64;
    type Item = (usize, usize, f64);
    let count = |f: &dyn Fn(usize, &Item) -> bool| {
        per_item.iter().enumerate().filter(|(i, p)| f(*i, p)).count() as f64 / n
    };
    Ok(AccuracyReport {
        reference_mode: reference.to_string(),
        candidate_mode: candidate.to_string(),
        items: per_item.len(),
        reference_accuracy: count(&|i, p| p.0 == dataset.labels[i]),
        candidate_accuracy: count(&|i, p| p.1 == dataset.labels[i]),
        top1_agreement: count(&|_, p| p.0 == p.1),
        mean_relative_logit_error: per_item.iter().map(|p| p.2).sum::<f64>() / n,
        max_relative_logit_error: per_item.iter().map(|p| p.2).fold(0.0, f64::max),
    })
}
