//! Homodyne vector dot-product engine.
//!
//! `lanes` multipliers run in parallel on one wavelength. Each lane ANDs an
//! operand pair, and the resulting ones are integrated as photo-charge on a
//! positive or negative rail chosen by the product sign. Vectors longer than
//! the lane count are streamed in several passes while the charge stays
//! resident (output-stationary), and the rail difference is digitized by a
//! single ADC conversion per output element.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sc::{
    encode_magnitude, BitStream, ChannelId, FixedPointValue, OperandRole, QuantizedTensor,
    ScConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Accumulation {
    /// Simulate every bit slot of every lane.
    BitExact,
    /// Replace each lane popcount by its expectation `p * q * N`.
    ExpectationModel,
}

impl fmt::Display for Accumulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Accumulation::BitExact => "bit-exact",
            Accumulation::ExpectationModel => "expectation",
        })
    }
}

impl FromStr for Accumulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bit-exact" => Ok(Accumulation::BitExact),
            "expectation" => Ok(Accumulation::ExpectationModel),
            _ => Err(Error::InvalidConfig(format!(
                "unknown accumulation mode {s:?} (expected bit-exact or expectation)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdcResolution {
    Bits(u32),
    /// Infinite resolution; the analog sum passes through unchanged.
    Ideal,
}

impl fmt::Display for AdcResolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdcResolution::Bits(b) => write!(f, "{b}"),
            AdcResolution::Ideal => f.write_str("ideal"),
        }
    }
}

impl FromStr for AdcResolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "ideal" {
            return Ok(AdcResolution::Ideal);
        }
        s.parse::<u32>()
            .map(AdcResolution::Bits)
            .map_err(|_| Error::InvalidConfig(format!("adc_bits must be an integer or \"ideal\", got {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VdpeConfig {
    pub lanes: usize,
    pub sc: ScConfig,
    pub adc: AdcResolution,
    pub accumulation: Accumulation,
}

impl Default for VdpeConfig {
    fn default() -> Self {
        VdpeConfig {
            lanes: 1024,
            sc: ScConfig::default(),
            adc: AdcResolution::Bits(8),
            accumulation: Accumulation::BitExact,
        }
    }
}

impl VdpeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lanes == 0 {
            return Err(Error::InvalidConfig("lanes must be positive".into()));
        }
        if let AdcResolution::Bits(b) = self.adc {
            if !(4..=16).contains(&b) {
                return Err(Error::InvalidConfig(format!(
                    "adc_bits must be in [4, 16], got {b}"
                )));
            }
        }
        self.sc.validate()
    }
}

/// Dual-rail photo-charge accumulator. Charges are counted in quanta;
/// `quanta_per_bit` quanta make one detected 1-bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AccumulatorState {
    pub positive_charge: u128,
    pub negative_charge: u128,
    pub quanta_per_bit: u128,
}

impl AccumulatorState {
    pub fn new(quanta_per_bit: u128) -> Self {
        AccumulatorState {
            positive_charge: 0,
            negative_charge: 0,
            quanta_per_bit,
        }
    }

    #[inline]
    fn deposit(&mut self, negative: bool, charge: u128) {
        if negative {
            self.negative_charge += charge;
        } else {
            self.positive_charge += charge;
        }
    }

    /// Differential rail readout in detected bits.
    pub fn net_bits(&self) -> f64 {
        let net = self.positive_charge as i128 - self.negative_charge as i128;
        net as f64 / self.quanta_per_bit as f64
    }
}

/// One pass of a tiled vector: lanes `0..active_lanes` carry elements
/// `start..start + active_lanes`; the remaining lanes carry zeros.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pass {
    pub start: usize,
    pub active_lanes: usize,
}

/// Splits a length-`k` vector over `l` lanes.
pub fn tile_vector(k: usize, l: usize) -> Vec<Pass> {
    assert!(k >= 1 && l >= 1, "tile_vector needs k >= 1 and l >= 1");
    (0..k.div_ceil(l))
        .map(|p| {
            let start = p * l;
            Pass {
                start,
                active_lanes: l.min(k - start),
            }
        })
        .collect()
}

/// Mid-tread uniform quantizer with `2^bits` levels over `[-k, +k]`,
/// returning the reconstructed value.
pub fn adc_quantize(analog_sum: f64, k: usize, cfg: &VdpeConfig) -> Result<f64> {
    let range = k as f64;
    if !analog_sum.is_finite() || analog_sum.abs() > range {
        return Err(Error::AccumulatorOverflow {
            sum: analog_sum,
            range,
        });
    }
    match cfg.adc {
        AdcResolution::Ideal => Ok(analog_sum),
        AdcResolution::Bits(bits) => {
            let half = f64::from(1u32 << (bits - 1));
            let step = range / half;
            let code = (analog_sum / step).round().clamp(-half, half - 1.0);
            Ok(code * step)
        }
    }
}

/// Operation counters for a dot product or matrix multiply.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VdpeStats {
    pub passes: u64,
    pub adc_conversions: u64,
    /// Active lane-slot AND events (padding lanes excluded).
    pub lane_bit_events: u64,
}

impl VdpeStats {
    fn merge(self, o: VdpeStats) -> VdpeStats {
        VdpeStats {
            passes: self.passes + o.passes,
            adc_conversions: self.adc_conversions + o.adc_conversions,
            lane_bit_events: self.lane_bit_events + o.lane_bit_events,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DotProductJob {
    pub x: Vec<FixedPointValue>,
    pub w: Vec<FixedPointValue>,
}

#[derive(Debug, Clone)]
pub struct DotOutcome {
    pub value: f64,
    pub accumulator: AccumulatorState,
    pub stats: VdpeStats,
}

/// A B-to-S converted operand.
#[derive(Debug, Clone)]
struct Encoded {
    negative: bool,
    code: u32,
    stream: Option<BitStream>,
}

fn encode_operand(code: i32, role: OperandRole, index: u64, cfg: &VdpeConfig) -> Encoded {
    let magnitude = code.unsigned_abs();
    let stream = match cfg.accumulation {
        Accumulation::BitExact => {
            let channel = cfg.sc.channel(ChannelId::derive(role, index));
            Some(encode_magnitude(
                magnitude,
                cfg.sc.magnitude_bits,
                &channel,
                cfg.sc.stream_length,
            ))
        }
        Accumulation::ExpectationModel => None,
    };
    Encoded {
        negative: code < 0,
        code: magnitude,
        stream,
    }
}

/// Integrates one output element across all passes and digitizes it once.
fn run_output<'a>(
    k: usize,
    lhs: impl Fn(usize) -> &'a Encoded,
    rhs: impl Fn(usize) -> &'a Encoded,
    cfg: &VdpeConfig,
) -> Result<(f64, AccumulatorState, VdpeStats)> {
    let n = cfg.sc.stream_length;
    let quanta = match cfg.accumulation {
        Accumulation::BitExact => 1,
        Accumulation::ExpectationModel => 1u128 << (2 * cfg.sc.magnitude_bits),
    };
    let mut acc = AccumulatorState::new(quanta);
    let mut stats = VdpeStats::default();
    for pass in tile_vector(k, cfg.lanes) {
        stats.passes += 1;
        for lane in 0..pass.active_lanes {
            let i = pass.start + lane;
            let (x, w) = (lhs(i), rhs(i));
            let charge = match (&x.stream, &w.stream) {
                (Some(xs), Some(ws)) => u128::from(xs.and_count(ws)),
                _ => u128::from(x.code) * u128::from(w.code) * n as u128,
            };
            acc.deposit(x.negative ^ w.negative, charge);
        }
        stats.lane_bit_events += (pass.active_lanes * n) as u64;
    }
    let analog = acc.net_bits() / n as f64;
    let value = adc_quantize(analog, k, cfg)?;
    stats.adc_conversions += 1;
    Ok((value, acc, stats))
}

fn common_scale(values: &[FixedPointValue], bits: u32, what: &str) -> Result<f64> {
    let scale = values.first().map_or(1.0, |v| v.scale);
    for v in values {
        if v.magnitude_bits != bits {
            return Err(Error::InvalidConfig(format!(
                "{what} operand has {} magnitude bits, engine expects {bits}",
                v.magnitude_bits
            )));
        }
        if v.scale != scale {
            return Err(Error::InvalidConfig(format!(
                "{what} operands must share one scale"
            )));
        }
    }
    Ok(scale)
}

/// Signed dot product through the engine, with the accumulator state and
/// operation counters.
pub fn vdpe_dot_detailed(job: &DotProductJob, cfg: &VdpeConfig) -> Result<DotOutcome> {
    cfg.validate()?;
    if job.x.len() != job.w.len() {
        return Err(Error::ShapeMismatch(format!(
            "dot operands have lengths {} and {}",
            job.x.len(),
            job.w.len()
        )));
    }
    if job.x.is_empty() {
        return Err(Error::ShapeMismatch("dot product of empty vectors".into()));
    }
    let bits = cfg.sc.magnitude_bits;
    let sx = common_scale(&job.x, bits, "x")?;
    let sw = common_scale(&job.w, bits, "w")?;
    let xs: Vec<Encoded> = job
        .x
        .iter()
        .enumerate()
        .map(|(i, v)| encode_operand(v.signed_code(), OperandRole::Lhs, i as u64, cfg))
        .collect();
    let ws: Vec<Encoded> = job
        .w
        .iter()
        .enumerate()
        .map(|(i, v)| encode_operand(v.signed_code(), OperandRole::Rhs, i as u64, cfg))
        .collect();
    let (value, accumulator, stats) = run_output(xs.len(), |i| &xs[i], |i| &ws[i], cfg)?;
    Ok(DotOutcome {
        value: value * (sx * sw),
        accumulator,
        stats,
    })
}

pub fn vdpe_dot(job: &DotProductJob, cfg: &VdpeConfig) -> Result<f64> {
    vdpe_dot_detailed(job, cfg).map(|o| o.value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatmulOutput {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows x cols`.
    pub values: Vec<f64>,
    pub stats: VdpeStats,
}

impl MatmulOutput {
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }
}

fn matrix_dims(t: &QuantizedTensor, name: &str) -> Result<(usize, usize)> {
    match *t.shape() {
        [r, c] if r > 0 && c > 0 => Ok((r, c)),
        _ => Err(Error::ShapeMismatch(format!(
            "{name} must be a non-empty matrix, got shape {:?}",
            t.shape()
        ))),
    }
}

/// `a (M x K) * b (K x N)`. Every output element owns one accumulator for
/// all of its passes and is read by exactly one ADC conversion. Operand
/// `a[m][k]` is encoded once on channel `(Lhs, m*K + k)` and `b[k][n]` on
/// channel `(Rhs, k*N + n)`.
pub fn vdpe_matmul(a: &QuantizedTensor, b: &QuantizedTensor, cfg: &VdpeConfig) -> Result<MatmulOutput> {
    cfg.validate()?;
    let (m, k) = matrix_dims(a, "lhs")?;
    let (k2, n) = matrix_dims(b, "rhs")?;
    if k != k2 {
        return Err(Error::ShapeMismatch(format!(
            "inner dimensions differ: {m}x{k} * {k2}x{n}"
        )));
    }
    let bits = cfg.sc.magnitude_bits;
    for (t, name) in [(a, "lhs"), (b, "rhs")] {
        if t.magnitude_bits() != bits {
            return Err(Error::InvalidConfig(format!(
                "{name} has {} magnitude bits, engine expects {bits}",
                t.magnitude_bits()
            )));
        }
    }
    let lhs: Vec<Encoded> = a
        .codes()
        .par_iter()
        .enumerate()
        .map(|(i, &c)| encode_operand(c, OperandRole::Lhs, i as u64, cfg))
        .collect();
    let rhs: Vec<Encoded> = b
        .codes()
        .par_iter()
        .enumerate()
        .map(|(i, &c)| encode_operand(c, OperandRole::Rhs, i as u64, cfg))
        .collect();
    let scale = a.scale() * b.scale();
    let rows: Vec<(Vec<f64>, VdpeStats)> = (0..m)
        .into_par_iter()
        .map(|r| {
            let mut stats = VdpeStats::default();
            let mut out = Vec::with_capacity(n);
            for c in 0..n {
                let (v, _, s) = run_output(k, |i| &lhs[r * k + i], |i| &rhs[i * n + c], cfg)?;
                stats = stats.merge(s);
                out.push(v * scale);
            }
            Ok((out, stats))
        })
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(m * n);
    let mut stats = VdpeStats::default();
    for (row, s) in rows {
        values.extend(row);
        stats = stats.merge(s);
    }
    Ok(MatmulOutput {
        rows: m,
        cols: n,
        values,
        stats,
    })
}
