//! Threshold sequence generators feeding the binary-to-stochastic comparators.
//!
//! Every generator emits thresholds as 32-bit binary fractions `t / 2^32` so
//! the comparator `code / 2^b > t / 2^32` is evaluated exactly in integers.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Maximal-length (period 65535) Galois feedback masks for a 16-bit
/// right-shifting LFSR.
pub const LFSR16_TAPS: [u16; 16] = [
    0x8016, 0x801C, 0x801F, 0x8029, 0x805E, 0x806B, 0x8097, 0x809E, 0x80A7, 0x80AE, 0x80CB,
    0x80D0, 0x80D6, 0x80DF, 0x80E3, 0x810A,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    /// Digitally shifted two-dimensional Hammersley net: left operands use the
    /// base-2 radical inverse of the slot index, right operands the slot index
    /// itself. Any left/right pair forms a (0, m, 2)-net.
    LowDiscrepancy,
    /// One maximal-length 16-bit LFSR per channel, taps and seed chosen by the
    /// channel hash.
    Lfsr,
    /// Thermometer code on the left operand (first `ceil(p N)` bits set)
    /// against an unshifted van der Corput sequence on the right operand.
    ExhaustiveUnary,
}

impl Generator {
    pub const ALL: [Generator; 3] = [
        Generator::LowDiscrepancy,
        Generator::Lfsr,
        Generator::ExhaustiveUnary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::LowDiscrepancy => "low-discrepancy",
            Generator::Lfsr => "lfsr",
            Generator::ExhaustiveUnary => "exhaustive-unary",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown generator {s:?} (expected low-discrepancy, lfsr or exhaustive-unary)"
                ))
            })
    }
}

/// Which side of a multiplication an operand sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperandRole {
    Lhs,
    Rhs,
}

const ROLE_BIT: u64 = 1 << 63;
const PRODUCT_BIT: u64 = 1 << 62;
const INDEX_MASK: u64 = PRODUCT_BIT - 1;

/// Identifier of one comparator/threshold source.
///
/// Bit 63 carries the operand role and bit 62 marks ids synthesized for
/// product streams; the remaining bits hash the element position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelId(u64);

impl ChannelId {
    pub const fn from_raw(raw: u64) -> Self {
        ChannelId(raw)
    }

    /// Channel for the operand at `element_index` of a tensor playing `role`.
    pub fn derive(role: OperandRole, element_index: u64) -> Self {
        let salt = match role {
            OperandRole::Lhs => 0x6C68_735F_6F70_6E64,
            OperandRole::Rhs => 0x7268_735F_6F70_6E64,
        };
        let hashed = mix64(element_index ^ salt) & INDEX_MASK;
        match role {
            OperandRole::Lhs => ChannelId(hashed),
            OperandRole::Rhs => ChannelId(hashed | ROLE_BIT),
        }
    }

    /// Synthetic id tagging the AND of two streams.
    pub fn product(a: ChannelId, b: ChannelId) -> Self {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        ChannelId(mix64(lo.0 ^ mix64(hi.0)) | PRODUCT_BIT)
    }

    pub const fn raw(self) -> u64 {
        self.0
    }

    pub fn role(self) -> OperandRole {
        if self.0 & ROLE_BIT == 0 {
            OperandRole::Lhs
        } else {
            OperandRole::Rhs
        }
    }
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ChannelState {
    LowDiscrepancy { shift: u32 },
    Lfsr { taps: u16, seed: u16 },
    Unary,
}

/// A threshold source. Its output is a pure function of
/// `(kind, master_seed, channel_id)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngChannel {
    id: ChannelId,
    kind: Generator,
    state: ChannelState,
}

impl RngChannel {
    pub fn new(kind: Generator, master_seed: u64, id: ChannelId) -> Self {
        let key = mix64(master_seed ^ mix64(id.raw()));
        let state = match kind {
            Generator::LowDiscrepancy => ChannelState::LowDiscrepancy { shift: key as u32 },
            Generator::Lfsr => ChannelState::Lfsr {
                taps: LFSR16_TAPS[(key & 0xF) as usize],
                seed: ((key >> 16) % 0xFFFF) as u16 + 1,
            },
            Generator::ExhaustiveUnary => ChannelState::Unary,
        };
        RngChannel { id, kind, state }
    }

    pub fn id(&self) -> ChannelId {
        self.id
    }

    pub fn kind(&self) -> Generator {
        self.kind
    }

    /// First `n` thresholds as 32-bit fractions. `n` must be a power of two
    /// no larger than 2^16.
    pub fn thresholds(&self, n: usize) -> Thresholds {
        debug_assert!(n.is_power_of_two() && n <= 1 << 16);
        let log_n = n.trailing_zeros();
        let kind = match self.state {
            ChannelState::LowDiscrepancy { shift } => {
                let shift = shift & (n as u32 - 1);
                match self.id.role() {
                    OperandRole::Lhs => ThresholdKind::Grid {
                        reverse: true,
                        shift,
                    },
                    OperandRole::Rhs => ThresholdKind::Grid {
                        reverse: false,
                        shift,
                    },
                }
            }
            ChannelState::Unary => match self.id.role() {
                OperandRole::Lhs => ThresholdKind::Grid {
                    reverse: false,
                    shift: 0,
                },
                OperandRole::Rhs => ThresholdKind::Grid {
                    reverse: true,
                    shift: 0,
                },
            },
            ChannelState::Lfsr { taps, seed } => ThresholdKind::Lfsr { taps, state: seed },
        };
        Thresholds {
            kind,
            log_n,
            next: 0,
            n,
        }
    }
}

#[derive(Debug, Clone)]
enum ThresholdKind {
    Grid { reverse: bool, shift: u32 },
    Lfsr { taps: u16, state: u16 },
}

/// Iterator over a channel's thresholds.
#[derive(Debug, Clone)]
pub struct Thresholds {
    kind: ThresholdKind,
    log_n: u32,
    next: usize,
    n: usize,
}

impl Iterator for Thresholds {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.next >= self.n {
            return None;
        }
        let i = self.next as u32;
        self.next += 1;
        Some(match &mut self.kind {
            ThresholdKind::Grid { reverse, shift } => {
                let slot = if *reverse {
                    bit_reverse(i, self.log_n)
                } else {
                    i
                };
                (((slot ^ *shift) as u64) << (32 - self.log_n)) as u32
            }
            ThresholdKind::Lfsr { taps, state } => {
                let lsb = *state & 1;
                *state >>= 1;
                if lsb == 1 {
                    *state ^= *taps;
                }
                u32::from(*state) << 16
            }
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rem = self.n - self.next;
        (rem, Some(rem))
    }
}

impl ExactSizeIterator for Thresholds {}

#[inline]
fn bit_reverse(i: u32, bits: u32) -> u32 {
    if bits == 0 {
        0
    } else {
        i.reverse_bits() >> (32 - bits)
    }
}
