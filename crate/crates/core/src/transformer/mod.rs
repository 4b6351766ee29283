//! Desk-scale encoder-only transformer with pluggable GEMM arithmetic.
//!
//! Every matrix product (projections, attention scores, attention context,
//! FFN and classifier) goes through a [`GemmRunner`], so one forward pass can
//! run in exact f64, 8-bit quantized fixed point, or on the stochastic
//! dot-product engine. Softmax, LayerNorm, GELU and residual adds stay in f64.

mod eval;
mod forward;
mod model;
pub mod ops;

pub use eval::{evaluate, AccuracyReport, Dataset};
pub use forward::{
    attention_block, ffn_block, forward, merge_heads, split_heads, ArithmeticMode, GemmRecord,
    GemmRunner,
};
pub use model::{EncoderLayer, LayerNormParams, Linear, TinyTransformer};

use crate::error::{Error, Result};
use crate::kv::FlatConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TinyTransformerConfig {
    pub layers: usize,
    pub d_model: usize,
    pub heads: usize,
    pub seq_len: usize,
    pub ffn_dim: usize,
    pub vocab_or_classes: usize,
}

impl TinyTransformerConfig {
    pub fn validate(&self) -> Result<()> {
        let dims = [
            ("d_model", self.d_model),
            ("heads", self.heads),
            ("seq_len", self.seq_len),
            ("ffn_dim", self.ffn_dim),
            ("vocab_or_classes", self.vocab_or_classes),
        ];
        for (name, v) in dims {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if self.d_model % self.heads != 0 {
            return Err(Error::ShapeMismatch(format!(
                "d_model {} is not divisible by heads {}",
                self.d_model, self.heads
            )));
        }
        Ok(())
    }

    pub fn head_dim(&self) -> usize {
        self.d_model / self.heads
    }

    /// Reads `layers`, `d_model`, `heads`, `seq_len`, `ffn_dim` and
    /// `vocab_or_classes` from a scoped config. All are required.
    pub fn from_kv(kv: &FlatConfig) -> Result<Self> {
        let req = |k: &str| {
            kv.usize(k)?.ok_or_else(|| Error::ConfigKey {
                key: k.to_string(),
                reason: "missing".into(),
            })
        };
        let c = TinyTransformerConfig {
            layers: req("layers")?,
            d_model: req("d_model")?,
            heads: req("heads")?,
            seq_len: req("seq_len")?,
            ffn_dim: req("ffn_dim")?,
            vocab_or_classes: req("vocab_or_classes")?,
        };
        c.validate()?;
        Ok(c)
    }

    pub(crate) fn to_array(self) -> [usize; 6] {
        [
            self.layers,
            self.d_model,
            self.heads,
            self.seq_len,
            self.ffn_dim,
            self.vocab_or_classes,
        ]
    }

    pub(crate) fn from_array(a: [usize; 6]) -> Self {
        TinyTransformerConfig {
            layers: a[0],
            d_model: a[1],
            heads: a[2],
            seq_len: a[3],
            ffn_dim: a[4],
            vocab_or_classes: a[5],
        }
    }
}
