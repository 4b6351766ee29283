use crate::error::{Error, Result};
use crate::transformer::TinyTransformerConfig;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GemmShape {
    pub name: String,
    pub m: usize,
    pub k: usize,
    pub n: usize,
}

impl GemmShape {
    pub fn new(name: impl Into<String>, m: usize, k: usize, n: usize) -> Self {
        GemmShape {
            name: name.into(),
            m,
            k,
            n,
        }
    }

    pub fn macs(&self) -> u64 {
        (self.m * self.k * self.n) as u64
    }

    pub fn outputs(&self) -> u64 {
        (self.m * self.n) as u64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GemmWorkload {
    pub gemms: Vec<GemmShape>,
}

impl GemmWorkload {
    pub fn validate(&self) -> Result<()> {
        for g in &self.gemms {
            if g.m == 0 || g.k == 0 || g.n == 0 {
                return Err(Error::ShapeMismatch(format!(
                    "GEMM {} has a zero dimension ({}x{}x{})",
                    g.name, g.m, g.k, g.n
                )));
            }
        }
        Ok(())
    }

    pub fn total_macs(&self) -> u64 {
        self.gemms.iter().map(GemmShape::macs).sum()
    }
}

/// Published layer dimensions, used for latency and energy modeling only.
pub const PRESETS: [(&str, TinyTransformerConfig); 5] = [
    (
        "transformer-base",
        TinyTransformerConfig {
            layers: 6,
            d_model: 512,
            heads: 8,
            seq_len: 128,
            ffn_dim: 2048,
            vocab_or_classes: 2,
        },
    ),
    (
        "bert-base",
        TinyTransformerConfig {
            layers: 12,
            d_model: 768,
            heads: 12,
            seq_len: 128,
            ffn_dim: 3072,
            vocab_or_classes: 2,
        },
    ),
    (
        "albert-base",
        TinyTransformerConfig {
            layers: 12,
            d_model: 768,
            heads: 12,
            seq_len: 128,
            ffn_dim: 3072,
            vocab_or_classes: 2,
        },
    ),
    (
        "vit-base",
        TinyTransformerConfig {
            layers: 12,
            d_model: 768,
            heads: 12,
            seq_len: 197,
            ffn_dim: 3072,
            vocab_or_classes: 1000,
        },
    ),
    (
        "opt-350m",
        TinyTransformerConfig {
            layers: 24,
            d_model: 1024,
            heads: 16,
            seq_len: 128,
            ffn_dim: 4096,
            vocab_or_classes: 2,
        },
    ),
];

/// Either explicit dimensions or a named preset.
#[derive(Debug, Clone, PartialEq)]
pub enum WorkloadSpec {
    Dims(TinyTransformerConfig),
    Preset(String),
}

impl WorkloadSpec {
    pub fn resolve(&self) -> Result<TinyTransformerConfig> {
        match self {
            WorkloadSpec::Dims(d) => Ok(*d),
            WorkloadSpec::Preset(name) => PRESETS
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, c)| *c)
                .ok_or_else(|| Error::UnknownPreset {
                    name: name.clone(),
                    available: PRESETS.map(|(n, _)| n).join(", "),
                }),
        }
    }
}

/// Per layer: Q, K and V projections, per-head score and context GEMMs
/// (heads stacked along M), output projection, FFN up and down.
pub fn transformer_workload(spec: &WorkloadSpec) -> Result<GemmWorkload> {
    let c = spec.resolve()?;
    c.validate()?;
    let (s, d, h, f) = (c.seq_len, c.d_model, c.heads, c.ffn_dim);
    let dh = d / h;
    let mut gemms = Vec::with_capacity(8 * c.layers);
    for l in 0..c.layers {
        let name = |op: &str| format!("layer{l}.{op}");
        gemms.extend([
            GemmShape::new(name("q_proj"), s, d, d),
            GemmShape::new(name("k_proj"), s, d, d),
            GemmShape::new(name("v_proj"), s, d, d),
            GemmShape::new(name("scores"), h * s, dh, s),
            GemmShape::new(name("context"), h * s, s, dh),
            GemmShape::new(name("out_proj"), s, d, d),
            GemmShape::new(name("ffn_up"), s, d, f),
            GemmShape::new(name("ffn_down"), s, f, d),
        ]);
    }
    Ok(GemmWorkload { gemms })
}
