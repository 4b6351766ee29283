//! Stochastic computing primitives.
//!
//! Values are sign-magnitude: a magnitude in `[0, 1]` is carried by the
//! density of ones in a unipolar bitstream and the sign travels alongside as
//! one extra bit. Multiplication is a bitwise AND of the magnitude streams
//! and an XOR of the signs.

mod channel;
mod fixed;
mod quant;
mod stream;

pub use channel::{
    mix64, ChannelId, Generator, OperandRole, RngChannel, Thresholds, LFSR16_TAPS,
};
pub use fixed::{quantize, FixedPointValue};
pub(crate) use fixed::check_bits;
pub use quant::QuantizedTensor;
pub use stream::BitStream;

use crate::error::{Error, Result};

/// Largest supported stream length.
pub const MAX_STREAM_LENGTH: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScConfig {
    /// Bits per stream, a power of two.
    pub stream_length: usize,
    /// Width of the fixed-point magnitude code.
    pub magnitude_bits: u32,
    pub generator: Generator,
    pub master_seed: u64,
}

impl Default for ScConfig {
    fn default() -> Self {
        ScConfig {
            stream_length: 128,
            magnitude_bits: 8,
            generator: Generator::LowDiscrepancy,
            master_seed: 0,
        }
    }
}

impl ScConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.stream_length.is_power_of_two() || self.stream_length > MAX_STREAM_LENGTH {
            return Err(Error::InvalidConfig(format!(
                "stream_length must be a power of two in [1, {MAX_STREAM_LENGTH}], got {}",
                self.stream_length
            )));
        }
        fixed::check_bits(self.magnitude_bits)
    }

    pub fn channel(&self, id: ChannelId) -> RngChannel {
        RngChannel::new(self.generator, self.master_seed, id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticNumber {
    /// `true` for negative values.
    pub sign: bool,
    pub stream: BitStream,
    pub source_channel: ChannelId,
}

impl StochasticNumber {
    pub fn stream_length(&self) -> usize {
        self.stream.len()
    }
}

/// Comparator-based B-to-S conversion of one magnitude code.
#[inline]
pub(crate) fn encode_magnitude(code: u32, bits: u32, channel: &RngChannel, n: usize) -> BitStream {
    let level = u64::from(code) << (32 - bits);
    let mut thresholds = channel.thresholds(n);
    BitStream::from_fn(n, |_| {
        let t = thresholds.next().expect("threshold iterator shorter than stream");
        level > u64::from(t)
    })
}

/// Bit `i` is set iff `magnitude > threshold_i`; the sign is copied.
pub fn binary_to_stochastic(
    v: &FixedPointValue,
    cfg: &ScConfig,
    channel: &RngChannel,
) -> Result<StochasticNumber> {
    cfg.validate()?;
    if channel.kind() != cfg.generator {
        return Err(Error::GeneratorMismatch {
            channel: channel.kind(),
            config: cfg.generator,
        });
    }
    Ok(StochasticNumber {
        sign: v.sign,
        stream: encode_magnitude(v.magnitude_code, v.magnitude_bits, channel, cfg.stream_length),
        source_channel: channel.id(),
    })
}

/// Optical stochastic signed multiply: AND of magnitudes, XOR of signs.
pub fn ossm_multiply(x: &StochasticNumber, w: &StochasticNumber) -> Result<StochasticNumber> {
    if x.stream.len() != w.stream.len() {
        return Err(Error::StreamLengthMismatch {
            left: x.stream.len(),
            right: w.stream.len(),
        });
    }
    if x.source_channel == w.source_channel {
        return Err(Error::CorrelatedOperands(x.source_channel.raw()));
    }
    Ok(StochasticNumber {
        sign: x.sign ^ w.sign,
        stream: x.stream.and(&w.stream),
        source_channel: ChannelId::product(x.source_channel, w.source_channel),
    })
}

/// `(-1)^sign * popcount / length`.
pub fn stochastic_to_value(s: &StochasticNumber) -> f64 {
    if s.stream.is_empty() {
        return 0.0;
    }
    let m = s.stream.count_ones() as f64 / s.stream.len() as f64;
    if s.sign {
        -m
    } else {
        m
    }
}

/// Variance `pq(1 - pq) / n` of the decoded AND product of two independent
/// Bernoulli streams with densities `p` and `q`.
pub fn sc_multiply_error_model(p: f64, q: f64, n: usize) -> f64 {
    assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q) && n >= 1);
    let pq = p * q;
    pq * (1.0 - pq) / n as f64
}
