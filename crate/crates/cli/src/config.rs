//! Experiment configuration: one flat dotted-key file plus `--set` overrides.

use std::path::{Path, PathBuf};

use astra_core::kv::FlatConfig;
use astra_core::photonic::{ArchConfig, GemmShape, PhotonicParams, WorkloadSpec};
use astra_core::sc::{Generator, ScConfig};
use astra_core::transformer::TinyTransformerConfig;
use astra_core::vdpe::{AdcResolution, VdpeConfig};

use crate::error::{resolve, CliError, CliResult};

const WORKLOAD_DIMS: [&str; 6] = ["layers", "d_model", "heads", "seq_len", "ffn_dim", "vocab_or_classes"];

const KEYS: &[&str] = &[
    "seed",
    "output.dir",
    "sc.stream_length",
    "sc.magnitude_bits",
    "sc.generator",
    "vdpe.lanes",
    "vdpe.adc_bits",
    "vdpe.accumulation",
    "arch.vdpe_count",
    "arch.wavelengths",
    "workload.preset",
    "multiply_sweep.stream_lengths",
    "multiply_sweep.generators",
    "multiply_sweep.pairs",
    "multiply_sweep.trials",
    "multiply_sweep.x_values",
    "multiply_sweep.w_values",
    "scalability.lanes",
    "latency.workloads",
    "latency.gemms",
    "infer.model",
    "infer.dataset",
    "infer.stream_lengths",
    "infer.generators",
    "infer.adc_bits",
    "infer.items",
];

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplySweep {
    pub stream_lengths: Vec<usize>,
    pub generators: Vec<Generator>,
    /// Operand values `(x, w)`; random when not configured.
    pub pairs: Vec<(f64, f64)>,
    /// Master seeds averaged per row.
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferStudy {
    pub model: PathBuf,
    pub dataset: PathBuf,
    pub stream_lengths: Vec<usize>,
    pub generators: Vec<Generator>,
    pub adc: Vec<AdcResolution>,
    /// Evaluate only the first `items` dataset entries.
    pub items: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub arch: ArchConfig,
    pub photonic: PhotonicParams,
    pub workload: WorkloadSpec,
    pub multiply_sweep: MultiplySweep,
    pub scalability_lanes: Vec<u64>,
    pub latency_workloads: Vec<(String, WorkloadSpec)>,
    pub latency_gemms: Vec<GemmShape>,
    pub infer: InferStudy,
}

fn cfg_err(key: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {reason}"))
}

fn non_empty<T>(key: &str, v: Vec<T>) -> CliResult<Vec<T>> {
    if v.is_empty() {
        Err(cfg_err(key, "sweep range must not be empty"))
    } else {
        Ok(v)
    }
}

fn generators(kv: &FlatConfig, key: &str, default: Generator) -> CliResult<Vec<Generator>> {
    match kv.string_list(key)? {
        None => Ok(vec![default]),
        Some(names) => non_empty(key, names)?
            .iter()
            .map(|n| n.parse::<Generator>().map_err(CliError::from))
            .collect(),
    }
}

fn parse_gemm(spec: &str) -> CliResult<GemmShape> {
    let bad = || cfg_err("latency.gemms", format!("{spec:?} is not of the form name:MxKxN"));
    let (name, dims) = spec.split_once(':').ok_or_else(bad)?;
    let d: Vec<usize> = dims
        .split('x')
        .map(|v| v.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    match d[..] {
        [m, k, n] if m > 0 && k > 0 && n > 0 => Ok(GemmShape::new(name.trim(), m, k, n)),
        _ => Err(bad()),
    }
}

impl ExperimentConfig {
    /// `base` resolves relative fixture paths (normally the config file's
    /// directory).
    pub fn from_kv(kv: &FlatConfig, base: &Path) -> CliResult<Self> {
        for key in kv.keys() {
            let known = KEYS.contains(&key)
                || key
                    .strip_prefix("photonic.")
                    .is_some_and(|k| PhotonicParams::KEYS.contains(&k))
                || key
                    .strip_prefix("workload.")
                    .is_some_and(|k| WORKLOAD_DIMS.contains(&k));
            if !known {
                return Err(cfg_err(key, "unknown key"));
            }
        }

        let seed = kv.u64("seed")?.unwrap_or(0);
        let mut sc = ScConfig {
            master_seed: seed,
            ..ScConfig::default()
        };
        if let Some(n) = kv.usize("sc.stream_length")? {
            sc.stream_length = n;
        }
        if let Some(b) = kv.u32("sc.magnitude_bits")? {
            sc.magnitude_bits = b;
        }
        if let Some(g) = kv.string("sc.generator")? {
            sc.generator = g.parse()?;
        }
        let mut vdpe = VdpeConfig {
            sc,
            ..VdpeConfig::default()
        };
        if let Some(l) = kv.usize("vdpe.lanes")? {
            vdpe.lanes = l;
        }
        if let Some(a) = kv.string("vdpe.adc_bits")? {
            vdpe.adc = a.parse()?;
        }
        if let Some(a) = kv.string("vdpe.accumulation")? {
            vdpe.accumulation = a.parse()?;
        }
        let mut arch = ArchConfig {
            vdpe,
            ..ArchConfig::default()
        };
        if let Some(v) = kv.usize("arch.vdpe_count")? {
            arch.vdpe_count = v;
        }
        if let Some(v) = kv.usize("arch.wavelengths")? {
            arch.wavelengths = v;
        }
        let photonic = PhotonicParams::from_kv(&kv.scoped("photonic"))?;
        arch.validate(&photonic)?;

        let workload = match kv.string("workload.preset")? {
            Some(name) => {
                let spec = WorkloadSpec::Preset(name);
                spec.resolve()?;
                spec
            }
            None => WorkloadSpec::Dims(TinyTransformerConfig::from_kv(&kv.scoped("workload"))?),
        };

        let ms = kv.scoped("multiply_sweep");
        let pairs = match (ms.f64_list("x_values")?, ms.f64_list("w_values")?) {
            (Some(x), Some(w)) => {
                if x.len() != w.len() {
                    return Err(cfg_err("multiply_sweep.x_values", "must match w_values in length"));
                }
                non_empty("multiply_sweep.x_values", x.into_iter().zip(w).collect())?
            }
            (None, None) => random_pairs(seed, ms.usize("pairs")?.unwrap_or(16)),
            _ => return Err(cfg_err("multiply_sweep.x_values", "set both x_values and w_values")),
        };
        if pairs.iter().any(|&(x, w)| !(x.abs() <= 1.0 && w.abs() <= 1.0)) {
            return Err(cfg_err("multiply_sweep", "operand values must lie in [-1, 1]"));
        }
        let multiply_sweep = MultiplySweep {
            stream_lengths: non_empty(
                "multiply_sweep.stream_lengths",
                ms.usize_list("stream_lengths")?.unwrap_or(vec![32, 64, 128, 256]),
            )?,
            generators: generators(kv, "multiply_sweep.generators", sc.generator)?,
            pairs,
            trials: ms.usize("trials")?.unwrap_or(64).max(1),
        };
        for &n in &multiply_sweep.stream_lengths {
            ScConfig { stream_length: n, ..sc }.validate()?;
        }

        let scalability_lanes: Vec<u64> = match kv.usize_list("scalability.lanes")? {
            Some(l) => l.into_iter().map(|v| v as u64).collect(),
            None => (0..=12).map(|e| 1u64 << e).collect(),
        };
        let scalability_lanes = non_empty("scalability.lanes", scalability_lanes)?;
        if scalability_lanes.contains(&0) {
            return Err(cfg_err("scalability.lanes", "lane counts must be positive"));
        }

        let latency_workloads = match kv.string_list("latency.workloads")? {
            None => vec![("config".to_string(), workload.clone())],
            Some(names) => names
                .into_iter()
                .map(|n| {
                    let spec = if n == "config" {
                        workload.clone()
                    } else {
                        WorkloadSpec::Preset(n.clone())
                    };
                    spec.resolve()?;
                    Ok((n, spec))
                })
                .collect::<CliResult<_>>()?,
        };
        let latency_gemms = kv
            .string_list("latency.gemms")?
            .unwrap_or_default()
            .iter()
            .map(|s| parse_gemm(s))
            .collect::<CliResult<_>>()?;

        let inf = kv.scoped("infer");
        let path = |key: &str, default: &str| -> CliResult<PathBuf> {
            Ok(resolve(base, &inf.string(key)?.unwrap_or_else(|| default.to_string())))
        };
        let adc = match inf.string_list("adc_bits")? {
            None => vec![vdpe.adc],
            Some(v) => non_empty("infer.adc_bits", v)?
                .iter()
                .map(|s| s.parse::<AdcResolution>().map_err(CliError::from))
                .collect::<CliResult<_>>()?,
        };
        for &a in &adc {
            VdpeConfig { adc: a, ..vdpe }.validate()?;
        }
        let infer = InferStudy {
            model: path("model", "tiny_model.astt")?,
            dataset: path("dataset", "tiny_dataset.astt")?,
            stream_lengths: non_empty(
                "infer.stream_lengths",
                inf.usize_list("stream_lengths")?.unwrap_or(vec![sc.stream_length]),
            )?,
            generators: generators(kv, "infer.generators", sc.generator)?,
            adc,
            items: inf.usize("items")?,
        };
        for &n in &infer.stream_lengths {
            ScConfig { stream_length: n, ..sc }.validate()?;
        }

        Ok(ExperimentConfig {
            seed,
            out_dir: PathBuf::from(kv.string("output.dir")?.unwrap_or_else(|| "out".into())),
            arch,
            photonic,
            workload,
            multiply_sweep,
            scalability_lanes,
            latency_workloads,
            latency_gemms,
            infer,
        })
    }

    pub fn sc(&self) -> ScConfig {
        self.arch.vdpe.sc
    }
}

/// Signed 8-bit grid values drawn from the experiment seed.
fn random_pairs(seed: u64, count: usize) -> Vec<(f64, f64)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || f64::from(rng.random_range(-255i32..=255)) / 256.0;
    (0..count).map(|_| (draw(), draw())).collect()
}
