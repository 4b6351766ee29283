//! Slow, literal reference model of the stochastic datapath.
//!
//! Shares no code with `astra-core`. Every threshold is built as an exact
//! rational `num / den` from its defining formula, bitstreams are `Vec<bool>`,
//! and dot products are accumulated one bit at a time into two integer rails.
//! The LFSR feedback masks are found here by period search rather than copied.

use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gen {
    LowDiscrepancy,
    Lfsr,
    Unary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

pub fn splitmix(x: u64) -> u64 {
    const M: u128 = 1 << 64;
    let mut z = (x as u128 + 0x9E37_79B9_7F4A_7C15) % M;
    z = ((z ^ (z >> 30)) * 0xBF58_476D_1CE4_E5B9) % M;
    z = ((z ^ (z >> 27)) * 0x94D0_49BB_1331_11EB) % M;
    (z ^ (z >> 31)) as u64
}

/// 16-bit state, shift toward bit 0; when the bit shifted out is 1 the state
/// is XORed with `mask`.
fn galois_step(state: [bool; 16], mask: u16) -> [bool; 16] {
    let out = state[0];
    let mut next = [false; 16];
    next[..15].copy_from_slice(&state[1..]);
    if out {
        for (b, slot) in next.iter_mut().enumerate() {
            *slot ^= (mask >> b) & 1 == 1;
        }
    }
    next
}

fn to_bits(v: u16) -> [bool; 16] {
    std::array::from_fn(|b| (v >> b) & 1 == 1)
}

fn from_bits(s: [bool; 16]) -> u16 {
    s.iter().enumerate().map(|(b, &x)| (x as u16) << b).sum()
}

/// The first 16 masks at or above `0x8000` whose register cycles through all
/// 65535 nonzero states.
pub fn maximal_masks() -> &'static [u16] {
    static MASKS: OnceLock<Vec<u16>> = OnceLock::new();
    MASKS.get_or_init(|| {
        let mut found = Vec::new();
        for mask in 0x8000u16..=0xFFFF {
            let start = to_bits(1);
            let mut s = galois_step(start, mask);
            let mut period = 1u32;
            while s != start && period <= 65535 {
                s = galois_step(s, mask);
                period += 1;
            }
            if period == 65535 {
                found.push(mask);
                if found.len() == 16 {
                    break;
                }
            }
        }
        found
    })
}

fn side_salt(side: Side) -> u64 {
    // ASCII "lhs_opnd" / "rhs_opnd"
    match side {
        Side::Left => u64::from_be_bytes(*b"lhs_opnd"),
        Side::Right => u64::from_be_bytes(*b"rhs_opnd"),
    }
}

/// Raw channel id of operand `index` on `side`.
pub fn channel_id(side: Side, index: u64) -> u64 {
    let low62 = splitmix(index ^ side_salt(side)) % (1 << 62);
    match side {
        Side::Left => low62,
        Side::Right => low62 + (1 << 63),
    }
}

pub fn channel_key(master_seed: u64, id: u64) -> u64 {
    splitmix(master_seed ^ splitmix(id))
}

fn reverse_digits(i: u64, digits: u32) -> u64 {
    let mut r = 0;
    for d in 0..digits {
        if (i >> d) & 1 == 1 {
            r += 1 << (digits - 1 - d);
        }
    }
    r
}

/// Threshold sequence `u_0 .. u_{n-1}` as fractions `(num, den)`.
pub fn thresholds(gen: Gen, master_seed: u64, side: Side, index: u64, n: usize) -> Vec<(u64, u64)> {
    assert!(n.is_power_of_two() && n <= 1 << 16);
    let m = n.trailing_zeros();
    let key = channel_key(master_seed, channel_id(side, index));
    match gen {
        Gen::LowDiscrepancy => {
            let shift = key % n as u64;
            (0..n as u64)
                .map(|i| {
                    let point = match side {
                        Side::Left => reverse_digits(i, m),
                        Side::Right => i,
                    };
                    (point ^ shift, n as u64)
                })
                .collect()
        }
        Gen::Unary => (0..n as u64)
            .map(|i| match side {
                Side::Left => (i, n as u64),
                Side::Right => (reverse_digits(i, m), n as u64),
            })
            .collect(),
        Gen::Lfsr => {
            let mask = maximal_masks()[(key % 16) as usize];
            let mut s = to_bits(((key >> 16) % 65535 + 1) as u16);
            (0..n)
                .map(|_| {
                    s = galois_step(s, mask);
                    (u64::from(from_bits(s)), 65536)
                })
                .collect()
        }
    }
}

/// Bit `i` is 1 iff `code / 2^bits > num_i / den_i`.
pub fn encode(code: u32, bits: u32, th: &[(u64, u64)]) -> Vec<bool> {
    th.iter()
        .map(|&(num, den)| u128::from(code) * u128::from(den) > u128::from(num) << bits)
        .collect()
}

/// Nearest of the levels `j * k / 2^(bits-1)`, `j` in `[-2^(bits-1), 2^(bits-1) - 1]`.
/// Ties resolve away from zero. `None` bits means no quantization.
pub fn adc(value: f64, k: usize, bits: Option<u32>) -> f64 {
    let Some(bits) = bits else {
        return value;
    };
    let half = 1i64 << (bits - 1);
    let step = k as f64 / half as f64;
    let lo = (value / step).floor() as i64;
    let mut best = lo;
    for cand in [lo, lo + 1] {
        let (dc, db) = ((cand as f64 * step - value).abs(), (best as f64 * step - value).abs());
        if dc < db || (dc == db && (cand.abs() > best.abs())) {
            best = cand;
        }
    }
    best.clamp(-half, half - 1) as f64 * step
}

#[derive(Debug, Clone, Copy)]
pub struct Engine {
    pub gen: Gen,
    pub master_seed: u64,
    pub stream_length: usize,
    pub magnitude_bits: u32,
    pub adc_bits: Option<u32>,
}

/// Normalized engine output for one dot product of signed codes, before
/// scale factors: ADC of `(ones on + rail - ones on - rail) / N`.
/// `x[i]` sits on left channel `x_index(i)`, `w[i]` on right channel
/// `w_index(i)`.
pub fn dot(
    e: &Engine,
    x: &[i32],
    w: &[i32],
    x_index: impl Fn(usize) -> u64,
    w_index: impl Fn(usize) -> u64,
) -> f64 {
    assert_eq!(x.len(), w.len());
    let n = e.stream_length;
    let (mut plus, mut minus) = (0u64, 0u64);
    for i in 0..x.len() {
        let tx = thresholds(e.gen, e.master_seed, Side::Left, x_index(i), n);
        let tw = thresholds(e.gen, e.master_seed, Side::Right, w_index(i), n);
        let sx = encode(x[i].unsigned_abs(), e.magnitude_bits, &tx);
        let sw = encode(w[i].unsigned_abs(), e.magnitude_bits, &tw);
        let negative = (x[i] < 0) != (w[i] < 0);
        for t in 0..n {
            if sx[t] && sw[t] {
                if negative {
                    minus += 1;
                } else {
                    plus += 1;
                }
            }
        }
    }
    let analog = (plus as f64 - minus as f64) / n as f64;
    adc(analog, x.len(), e.adc_bits)
}

/// `a (m x k) * b (k x n)` on signed codes, row-major, normalized like [`dot`].
pub fn matmul(e: &Engine, a: &[i32], b: &[i32], m: usize, k: usize, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(m * n);
    for r in 0..m {
        for c in 0..n {
            let x: Vec<i32> = (0..k).map(|i| a[r * k + i]).collect();
            let w: Vec<i32> = (0..k).map(|i| b[i * n + c]).collect();
            out.push(dot(
                e,
                &x,
                &w,
                |i| (r * k + i) as u64,
                |i| (i * n + c) as u64,
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masks_match_known_primitive_polynomial_count_prefix() {
        let m = maximal_masks();
        assert_eq!(m.len(), 16);
        assert!(m.windows(2).all(|w| w[0] < w[1]));
        assert!(m.iter().all(|x| x.count_ones() % 2 == 0));
    }

    #[test]
    fn splitmix_reference_value() {
        // First output of the SplitMix64 generator seeded with 0.
        assert_eq!(splitmix(0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn adc_levels() {
        assert_eq!(adc(0.0, 4, Some(4)), 0.0);
        assert_eq!(adc(4.0, 4, Some(4)), 3.5);
        assert_eq!(adc(-4.0, 4, Some(4)), -4.0);
        assert_eq!(adc(0.25, 4, Some(4)), 0.5);
        assert_eq!(adc(-0.25, 4, Some(4)), -0.5);
    }
}
