//! Elias-delta code for positive integers.

use super::bits::{BitReader, BitString};
use crate::error::{Error, Result};

fn bit_length(n: u64) -> u32 {
    64 - n.leading_zeros()
}

/// `(LL−1)` zeros, `L` in `LL` bits, then the low `L−1` bits of `n`, where `L`
/// is the bit length of `n` and `LL` that of `L`.
pub fn encode_into(n: u64, out: &mut BitString) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
            range: "n >= 1",
        });
    }
    let l = bit_length(n);
    let ll = bit_length(l as u64);
    for _ in 0..ll - 1 {
        out.push(false);
    }
    out.push_bits(l as u64, ll);
    out.push_bits(n, l - 1);
    Ok(())
}

pub fn encode(n: u64) -> Result<BitString> {
    let mut out = BitString::new();
    encode_into(n, &mut out)?;
    Ok(out)
}

pub fn decode_from(reader: &mut BitReader<'_>) -> Result<u64> {
    let start = reader.position();
    let mut zeros = 0u32;
    while !reader.read_bit()? {
        zeros += 1;
        if zeros > 6 {
            return Err(Error::Decode {
                offset: start,
                reason: "length prefix exceeds 64-bit range".into(),
            });
        }
    }
    let l = (1u64 << zeros) | reader.read_bits(zeros)?;
    if l > 64 {
        return Err(Error::Decode {
            offset: start,
            reason: format!("bit length {l} exceeds 64"),
        });
    }
    let l = l as u32;
    let low = reader.read_bits(l - 1)?;
    Ok(if l == 64 { (1u64 << 63) | low } else { (1u64 << (l - 1)) | low })
}

/// Decodes one codeword from the front of `bits`; returns `(n, bits consumed)`.
pub fn decode(bits: &[bool]) -> Result<(u64, usize)> {
    let mut r = BitReader::new(bits);
    let n = decode_from(&mut r)?;
    Ok((n, r.position()))
}

/// Codeword length `(L−1) + 2·LL − 1`.
pub fn length(n: u64) -> usize {
    assert!(n >= 1);
    let l = bit_length(n) as usize;
    let ll = bit_length(l as u64) as usize;
    (l - 1) + 2 * ll - 1
}

/// `⌈log₂ n⌉ + 2⌈log₂ max(2, log₂ n)⌉ + 1`, for `n ≥ 2`.
///
/// The inner `max(2, ·)` only matters at `n = 2`, where `log log n = 0` would
/// give a bound of 2 below the shortest possible codeword for `n > 1`.
pub fn length_bound(n: u64) -> f64 {
    assert!(n >= 2);
    let lg = (n as f64).log2();
    lg.ceil() + 2.0 * lg.max(2.0).log2().ceil() + 1.0
}
