use std::fmt;

use ndarray::{concatenate, s, Array1, Array2, ArrayView2, Axis};

use super::model::{EncoderLayer, Linear, TinyTransformer};
use super::ops::{gelu, layer_norm, mean_pool, softmax_rows};
use crate::error::{Error, Result};
use crate::photonic::GemmShape;
use crate::sc::{check_bits, mix64, QuantizedTensor};
use crate::vdpe::{vdpe_matmul, VdpeConfig, VdpeStats};

/// How every GEMM in a forward pass is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArithmeticMode {
    Exact,
    /// Per-tensor symmetric sign-magnitude quantization of both operands,
    /// exact integer accumulation.
    Quantized { magnitude_bits: u32 },
    /// The stochastic dot-product engine. Its master seed is replaced by a
    /// per-GEMM seed derived from the runner seed and the GEMM index.
    Stochastic(VdpeConfig),
}

impl fmt::Display for ArithmeticMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithmeticMode::Exact => write!(f, "exact"),
            ArithmeticMode::Quantized { magnitude_bits } => write!(f, "quantized-{magnitude_bits}b"),
            ArithmeticMode::Stochastic(c) => write!(
                f,
                "stochastic-{}-n{}-b{}-adc{}-{}",
                c.sc.generator, c.sc.stream_length, c.sc.magnitude_bits, c.adc, c.accumulation
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GemmRecord {
    pub shape: GemmShape,
    pub seed: u64,
}

/// Executes GEMMs in one arithmetic mode and records their shapes.
#[derive(Debug, Clone)]
pub struct GemmRunner {
    mode: ArithmeticMode,
    seed: u64,
    scope: String,
    trace: Vec<GemmRecord>,
    stats: VdpeStats,
}

impl GemmRunner {
    pub fn new(mode: ArithmeticMode, seed: u64) -> Self {
        GemmRunner {
            mode,
            seed,
            scope: String::new(),
            trace: Vec::new(),
            stats: VdpeStats::default(),
        }
    }

    pub fn mode(&self) -> &ArithmeticMode {
        &self.mode
    }

    pub fn trace(&self) -> &[GemmRecord] {
        &self.trace
    }

    /// Engine counters summed over stochastic GEMMs.
    pub fn stats(&self) -> VdpeStats {
        self.stats
    }

    /// Prefix for the names of subsequent GEMM records.
    pub fn set_scope(&mut self, scope: impl Into<String>) {
        self.scope = scope.into();
    }

    /// Seed used for the GEMM with the given call index.
    pub fn gemm_seed(&self, index: usize) -> u64 {
        mix64(self.seed ^ mix64(index as u64))
    }

    pub fn gemm(&mut self, op: &str, a: ArrayView2<f64>, b: ArrayView2<f64>) -> Result<Array2<f64>> {
        let ((m, k), (k2, n)) = (a.dim(), b.dim());
        if k != k2 || m == 0 || k == 0 || n == 0 {
            return Err(Error::ShapeMismatch(format!(
                "GEMM {op}: cannot multiply {m}x{k} by {k2}x{n}"
            )));
        }
        let seed = self.gemm_seed(self.trace.len());
        let name = if self.scope.is_empty() {
            op.to_string()
        } else {
            format!("{}.{op}", self.scope)
        };
        self.trace.push(GemmRecord {
            shape: GemmShape::new(name, m, k, n),
            seed,
        });
        match self.mode {
            ArithmeticMode::Exact => Ok(a.dot(&b)),
            ArithmeticMode::Quantized { magnitude_bits } => {
                check_bits(magnitude_bits)?;
                let qa = quantize_matrix(a, magnitude_bits)?;
                let qb = quantize_matrix(b, magnitude_bits)?;
                Ok(quantized_matmul(&qa, &qb, m, k, n))
            }
            ArithmeticMode::Stochastic(cfg) => {
                let mut cfg = cfg;
                cfg.sc.master_seed = seed;
                let bits = cfg.sc.magnitude_bits;
                let out = vdpe_matmul(&quantize_matrix(a, bits)?, &quantize_matrix(b, bits)?, &cfg)?;
                self.stats.passes += out.stats.passes;
                self.stats.adc_conversions += out.stats.adc_conversions;
                self.stats.lane_bit_events += out.stats.lane_bit_events;
                Ok(Array2::from_shape_vec((m, n), out.values).expect("engine output shape"))
            }
        }
    }

    fn linear(&mut self, op: &str, x: &Array2<f64>, lin: &Linear) -> Result<Array2<f64>> {
        Ok(self.gemm(op, x.view(), lin.weight.view())? + &lin.bias)
    }
}

fn quantize_matrix(a: ArrayView2<f64>, bits: u32) -> Result<QuantizedTensor> {
    let values: Vec<f64> = a.iter().copied().collect();
    QuantizedTensor::quantize(&[a.nrows(), a.ncols()], &values, bits)
}

/// Integer accumulation, then the same dequantization the engine applies
/// to an ideal readout: `(sum / 2^(2b)) * (scale_a * scale_b)`.
fn quantized_matmul(qa: &QuantizedTensor, qb: &QuantizedTensor, m: usize, k: usize, n: usize) -> Array2<f64> {
    let (ca, cb) = (qa.codes(), qb.codes());
    let full_scale = f64::from(1u32 << qa.magnitude_bits()) * f64::from(1u32 << qb.magnitude_bits());
    let scale = qa.scale() * qb.scale();
    Array2::from_shape_fn((m, n), |(r, c)| {
        let sum: i64 = (0..k)
            .map(|i| i64::from(ca[r * k + i]) * i64::from(cb[i * n + c]))
            .sum();
        (sum as f64 / full_scale) * scale
    })
}

/// `[seq, heads * dh]` to `heads` matrices of `[seq, dh]`.
pub fn split_heads(x: &Array2<f64>, heads: usize) -> Result<Vec<Array2<f64>>> {
    let d = x.ncols();
    if heads == 0 || d % heads != 0 {
        return Err(Error::ShapeMismatch(format!(
            "width {d} does not split into {heads} heads"
        )));
    }
    let dh = d / heads;
    Ok((0..heads)
        .map(|h| x.slice(s![.., h * dh..(h + 1) * dh]).to_owned())
        .collect())
}

pub fn merge_heads(parts: &[Array2<f64>]) -> Result<Array2<f64>> {
    let views: Vec<_> = parts.iter().map(|p| p.view()).collect();
    concatenate(Axis(1), &views).map_err(|e| Error::ShapeMismatch(format!("merge_heads: {e}")))
}

/// Multi-head self-attention without masking. Returns the output
/// projection, before the residual add.
pub fn attention_block(
    x: &Array2<f64>,
    layer: &EncoderLayer,
    heads: usize,
    runner: &mut GemmRunner,
) -> Result<Array2<f64>> {
    let d = x.ncols();
    if heads == 0 || d % heads != 0 {
        return Err(Error::ShapeMismatch(format!(
            "d_model {d} is not divisible by heads {heads}"
        )));
    }
    let q = split_heads(&runner.linear("q_proj", x, &layer.wq)?, heads)?;
    let k = split_heads(&runner.linear("k_proj", x, &layer.wk)?, heads)?;
    let v = split_heads(&runner.linear("v_proj", x, &layer.wv)?, heads)?;
    let inv_sqrt_dh = 1.0 / ((d / heads) as f64).sqrt();
    let mut context = Vec::with_capacity(heads);
    for h in 0..heads {
        let scores = runner.gemm("scores", q[h].view(), k[h].t())? * inv_sqrt_dh;
        let probs = softmax_rows(&scores);
        context.push(runner.gemm("context", probs.view(), v[h].view())?);
    }
    runner.linear("out_proj", &merge_heads(&context)?, &layer.wo)
}

/// Position-wise FFN with GELU. Returns the down projection, before the
/// residual add.
pub fn ffn_block(x: &Array2<f64>, layer: &EncoderLayer, runner: &mut GemmRunner) -> Result<Array2<f64>> {
    let hidden = runner.linear("ffn_up", x, &layer.ffn_up)?.mapv(gelu);
    runner.linear("ffn_down", &hidden, &layer.ffn_down)
}

/// Classifier logits for one `[seq, d_model]` input.
pub fn forward(model: &TinyTransformer, input: &Array2<f64>, runner: &mut GemmRunner) -> Result<Array1<f64>> {
    let c = &model.config;
    if input.ncols() != c.d_model || input.nrows() == 0 {
        return Err(Error::ShapeMismatch(format!(
            "input is {}x{}, model expects [seq, {}]",
            input.nrows(),
            input.ncols(),
            c.d_model
        )));
    }
    if input.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let mut x = input.clone();
    for (l, layer) in model.layers.iter().enumerate() {
        runner.set_scope(format!("layer{l}"));
        let h = layer_norm(&x, layer.ln1.gamma.view(), layer.ln1.beta.view());
        x = x + attention_block(&h, layer, c.heads, runner)?;
        let h = layer_norm(&x, layer.ln2.gamma.view(), layer.ln2.beta.view());
        x = x + ffn_block(&h, layer, runner)?;
    }
    runner.set_scope("head");
    let x = layer_norm(&x, model.final_ln.gamma.view(), model.final_ln.beta.view());
    let pooled = mean_pool(&x).insert_axis(Axis(0));
    let logits = runner.linear("classifier", &pooled, &model.classifier)?;
    Ok(logits.row(0).to_owned())
}
