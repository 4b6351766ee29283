use std::path::Path;

use ndarray::{Array1, Array2};

use super::TinyTransformerConfig;
use crate::error::{Error, Result};
use crate::tensor_io::{NamedTensor, TensorFile};

/// `y = x W + b` with `W` stored `in x out`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Linear {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Linear {
            weight: Array2::zeros((inputs, outputs)),
            bias: Array1::zeros(outputs),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerNormParams {
    pub gamma: Array1<f64>,
    pub beta: Array1<f64>,
}

impl LayerNormParams {
    pub fn identity(d: usize) -> Self {
        LayerNormParams {
            gamma: Array1::ones(d),
            beta: Array1::zeros(d),
        }
    }
}

/// Pre-LN encoder layer.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderLayer {
    pub ln1: LayerNormParams,
    pub wq: Linear,
    pub wk: Linear,
    pub wv: Linear,
    pub wo: Linear,
    pub ln2: LayerNormParams,
    pub ffn_up: Linear,
    pub ffn_down: Linear,
}

/// Encoder stack, final LayerNorm, mean pooling over the sequence and a
/// linear classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct TinyTransformer {
    pub config: TinyTransformerConfig,
    pub layers: Vec<EncoderLayer>,
    pub final_ln: LayerNormParams,
    pub classifier: Linear,
}

impl TinyTransformer {
    /// All weights and biases zero, LayerNorms identity.
    pub fn zeros(config: TinyTransformerConfig) -> Result<Self> {
        config.validate()?;
        let (d, f) = (config.d_model, config.ffn_dim);
        let layer = EncoderLayer {
            ln1: LayerNormParams::identity(d),
            wq: Linear::zeros(d, d),
            wk: Linear::zeros(d, d),
            wv: Linear::zeros(d, d),
            wo: Linear::zeros(d, d),
            ln2: LayerNormParams::identity(d),
            ffn_up: Linear::zeros(d, f),
            ffn_down: Linear::zeros(f, d),
        };
        Ok(TinyTransformer {
            config,
            layers: vec![layer; config.layers],
            final_ln: LayerNormParams::identity(d),
            classifier: Linear::zeros(d, config.vocab_or_classes),
        })
    }

    /// Loads a model written by [`TinyTransformer::to_tensor_file`] or the
    /// fixture export script. See `docs/tensor-format.md` for tensor names.
    pub fn load(path: &Path) -> Result<Self> {
        Self::from_tensor_file(&TensorFile::read(path)?, path)
    }

    pub fn from_tensor_file(file: &TensorFile, path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::TensorFormat {
            path: path.to_path_buf(),
            reason,
        };
        let cfg = file
            .get("config")
            .ok_or_else(|| bad("missing tensor \"config\"".into()))?;
        let raw = cfg
            .as_u32()
            .filter(|v| v.len() == 6)
            .ok_or_else(|| bad("\"config\" must be u32[6]".into()))?;
        let mut dims = [0usize; 6];
        for (o, &v) in dims.iter_mut().zip(raw) {
            *o = v as usize;
        }
        let config = TinyTransformerConfig::from_array(dims);
        config.validate()?;
        let (d, f, c) = (config.d_model, config.ffn_dim, config.vocab_or_classes);

        let tensor = |name: &str, shape: &[usize]| -> Result<Vec<f64>> {
            let t = file
                .get(name)
                .ok_or_else(|| bad(format!("missing tensor {name:?}")))?;
            if t.shape != shape {
                return Err(bad(format!(
                    "tensor {name:?} has shape {:?}, expected {shape:?}",
                    t.shape
                )));
            }
            Ok(t.to_f64())
        };
        let vector = |name: &str, n: usize| tensor(name, &[n]).map(Array1::from);
        let matrix = |name: &str, r: usize, k: usize| {
            tensor(name, &[r, k]).map(|v| Array2::from_shape_vec((r, k), v).expect("shape checked"))
        };
        let linear = |prefix: &str, i: usize, o: usize| -> Result<Linear> {
            Ok(Linear {
                weight: matrix(&format!("{prefix}.weight"), i, o)?,
                bias: vector(&format!("{prefix}.bias"), o)?,
            })
        };
        let norm = |prefix: &str| -> Result<LayerNormParams> {
            Ok(LayerNormParams {
                gamma: vector(&format!("{prefix}.gamma"), d)?,
                beta: vector(&format!("{prefix}.beta"), d)?,
            })
        };

        let mut layers = Vec::with_capacity(config.layers);
        for l in 0..config.layers {
            let p = |s: &str| format!("layers.{l}.{s}");
            layers.push(EncoderLayer {
                ln1: norm(&p("ln1"))?,
                wq: linear(&p("attn.q"), d, d)?,
                wk: linear(&p("attn.k"), d, d)?,
                wv: linear(&p("attn.v"), d, d)?,
                wo: linear(&p("attn.o"), d, d)?,
                ln2: norm(&p("ln2"))?,
                ffn_up: linear(&p("ffn.up"), d, f)?,
                ffn_down: linear(&p("ffn.down"), f, d)?,
            });
        }
        Ok(TinyTransformer {
            config,
            layers,
            final_ln: norm("final_ln")?,
            classifier: linear("classifier", d, c)?,
        })
    }

    pub fn to_tensor_file(&self) -> TensorFile {
        let mut f = TensorFile::default();
        let cfg: Vec<u32> = self.config.to_array().iter().map(|&v| v as u32).collect();
        f.push(NamedTensor::u32("config", &[6], cfg));
        let push_linear = |f: &mut TensorFile, prefix: &str, lin: &Linear| {
            f.push(NamedTensor::f64(
                format!("{prefix}.weight"),
                lin.weight.shape(),
                lin.weight.iter().copied().collect(),
            ));
            f.push(NamedTensor::f64(
                format!("{prefix}.bias"),
                lin.bias.shape(),
                lin.bias.to_vec(),
            ));
        };
        let push_norm = |f: &mut TensorFile, prefix: &str, n: &LayerNormParams| {
            f.push(NamedTensor::f64(format!("{prefix}.gamma"), n.gamma.shape(), n.gamma.to_vec()));
            f.push(NamedTensor::f64(format!("{prefix}.beta"), n.beta.shape(), n.beta.to_vec()));
        };
        for (l, layer) in self.layers.iter().enumerate() {
            let p = |s: &str| format!("layers.{l}.{s}");
            push_norm(&mut f, &p("ln1"), &layer.ln1);
            push_linear(&mut f, &p("attn.q"), &layer.wq);
            push_linear(&mut f, &p("attn.k"), &layer.wk);
            push_linear(&mut f, &p("attn.v"), &layer.wv);
            push_linear(&mut f, &p("attn.o"), &layer.wo);
            push_norm(&mut f, &p("ln2"), &layer.ln2);
            push_linear(&mut f, &p("ffn.up"), &layer.ffn_up);
            push_linear(&mut f, &p("ffn.down"), &layer.ffn_down);
        }
        push_norm(&mut f, "final_ln", &self.final_ln);
        push_linear(&mut f, "classifier", &self.classifier);
        f
    }
}
