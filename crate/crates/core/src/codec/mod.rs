//! Prefix-free integer codes and the transcript container.

mod bits;
pub mod elias;
mod golomb;
pub mod transcript;

pub use bits::{BitReader, BitString};
pub use golomb::GeometricCode;

use crate::error::{Error, Result};

pub fn elias_encode(n: u64) -> Result<BitString> {
    elias::encode(n)
}

pub fn elias_decode(bits: &[bool]) -> Result<(u64, usize)> {
    elias::decode(bits)
}

/// Concatenated Elias codewords, one per component.
pub fn tuple_encode(tuple: &[u64]) -> Result<BitString> {
    if tuple.is_empty() {
        return Err(Error::Empty("tuple"));
    }
    let mut out = BitString::new();
    for &i in tuple {
        elias::encode_into(i, &mut out)?;
    }
    Ok(out)
}

pub fn tuple_decode(reader: &mut BitReader<'_>, r: usize) -> Result<Vec<u64>> {
    (0..r).map(|_| elias::decode_from(reader)).collect()
}

pub fn tuple_length(tuple: &[u64]) -> usize {
    tuple.iter().map(|&i| elias::length(i)).sum()
}

/// `log₂Π + 2r·log₂log₂Π + 4r` for a product `Π ≥ 2`.
pub fn tuple_length_bound(tuple: &[u64]) -> Option<f64> {
    let lg: f64 = tuple.iter().map(|&i| (i as f64).log2()).sum();
    if lg < 1.0 {
        return None;
    }
    let r = tuple.len() as f64;
    Some(lg + 2.0 * r * lg.log2() + 4.0 * r)
}
