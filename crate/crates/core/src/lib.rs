//! Functional and analytical models of a stochastic-photonic transformer
//! accelerator.
//!
//! The crate is split along the hardware datapath:
//!
//! - [`sc`]: sign-magnitude stochastic numbers, bitstream generators and the
//!   optical stochastic signed multiplier (bitwise AND on magnitudes, XOR on
//!   signs).
//! - [`vdpe`]: the vector dot-product engine. Lanes of multipliers feed a
//!   dual-rail photo-charge accumulator read out by a single ADC per output.
//! - [`photonic`]: analytical optical power budget, latency and energy model.
//! - [`transformer`]: a desk-scale transformer evaluated in exact, 8-bit
//!   quantized and stochastic arithmetic.
//! - [`kv`]: the flat dotted-key parameter file format shared by all configs.
//! - [`tensor_io`]: the little-endian binary tensor container used for the
//!   committed model and dataset fixtures.

pub mod error;
pub mod kv;
pub mod photonic;
pub mod sc;
pub mod tensor_io;
pub mod transformer;
pub mod vdpe;

pub use error::{Error, Result};
