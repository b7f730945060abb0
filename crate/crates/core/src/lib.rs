//! Statistical decoding of random binary linear codes.
//!
//! The crate covers the whole pipeline: GF(2) linear algebra ([`bitmat`]),
//! random codes and instances ([`codec`]), exact parity-check biases
//! ([`bias`]), low-weight dual codeword harvesting ([`harvest`]), majority
//! and weighted decoders ([`decode`]), and the asymptotic exponent
//! calculator ([`asympt`]). [`formats`] holds the on-disk formats and
//! [`experiment`] the seeded campaign runner.

pub mod asympt;
pub mod bias;
pub mod bitmat;
pub mod codec;
pub mod combinat;
pub mod decode;
pub mod experiment;
pub mod formats;
pub mod harvest;
pub mod rng;

pub use bitmat::{BitMatrix, BitVector, Permutation};
pub use codec::{CodeInstance, DecodingProblem};
pub use num_rational::BigRational;
