//! Golomb code for the index of the first success in Bernoulli(δ²) trials.

use super::bits::{BitReader, BitString};
use crate::error::{check_open_unit, Error, Result};

/// Tail mass below which the expected-length series stops.
const SERIES_TAIL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricCode {
    delta: f64,
    /// Golomb parameter `M`.
    modulus: u64,
}

impl GeometricCode {
    /// `M = ⌈−1/log₂(1−δ²)⌉`.
    pub fn new(delta: f64) -> Result<Self> {
        check_open_unit("delta", delta)?;
        let fail = 1.0 - delta * delta;
        let modulus = (-1.0 / fail.log2()).ceil().max(1.0) as u64;
        Ok(GeometricCode { delta, modulus })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Per-trial success probability `δ²`.
    pub fn success_prob(&self) -> f64 {
        self.delta * self.delta
    }

    fn remainder_width(&self) -> u32 {
        64 - (self.modulus - 1).leading_zeros()
    }

    /// Encodes `k ≥ 1`: unary quotient of `k−1` (ones closed by a zero), then
    /// the remainder in truncated binary.
    pub fn encode_into(&self, k: u64, out: &mut BitString) -> Result<()> {
        if k == 0 {
            return Err(Error::OutOfRange {
                name: "k",
                value: 0.0,
                range: "k >= 1",
            });
        }
        let n = k - 1;
        let q = n / self.modulus;
        let r = n % self.modulus;
        for _ in 0..q {
            out.push(true);
        }
        out.push(false);
        let b = self.remainder_width();
        if b > 0 {
            let cutoff = (1u64 << b) - self.modulus;
            if r < cutoff {
                out.push_bits(r, b - 1);
            } else {
                out.push_bits(r + cutoff, b);
            }
        }
        Ok(())
    }

    pub fn encode(&self, k: u64) -> Result<BitString> {
        let mut out = BitString::new();
        self.encode_into(k, &mut out)?;
        Ok(out)
    }

    pub fn decode_from(&self, reader: &mut BitReader<'_>) -> Result<u64> {
        let mut q = 0u64;
        while reader.read_bit()? {
            q += 1;
        }
        let b = self.remainder_width();
        let mut r = 0;
        if b > 0 {
            let cutoff = (1u64 << b) - self.modulus;
            r = reader.read_bits(b - 1)?;
            if r >= cutoff {
                r = ((r << 1) | reader.read_bit()? as u64) - cutoff;
            }
        }
        Ok(q * self.modulus + r + 1)
    }

    pub fn decode(&self, bits: &[bool]) -> Result<(u64, usize)> {
        let mut reader = BitReader::new(bits);
        let k = self.decode_from(&mut reader)?;
        Ok((k, reader.position()))
    }

    pub fn length(&self, k: u64) -> usize {
        assert!(k >= 1);
        let n = k - 1;
        let q = (n / self.modulus) as usize;
        let r = n % self.modulus;
        let b = self.remainder_width();
        let rem = if b == 0 {
            0
        } else if r < (1u64 << b) - self.modulus {
            b as usize - 1
        } else {
            b as usize
        };
        q + 1 + rem
    }

    /// `P(k) = (1−δ²)^{k−1} δ²`.
    pub fn probability(&self, k: u64) -> f64 {
        let s = self.success_prob();
        (1.0 - s).powf((k - 1) as f64) * s
    }

    /// Expected codeword length under the geometric law, by direct summation
    /// until the remaining tail contributes less than `1e-12`.
    pub fn expected_length(&self) -> f64 {
        let s = self.success_prob();
        let fail = 1.0 - s;
        let mut total = 0.0;
        let mut mass = s;
        let mut tail = 1.0;
        let mut k = 1u64;
        loop {
            total += mass * self.length(k) as f64;
            tail -= mass;
            // Beyond k the length grows by at most one bit per M steps, so
            // the tail is dominated by tail·(len(k) + 1/s).
            if tail.max(0.0) * (self.length(k) as f64 + 1.0 / s + 1.0) < SERIES_TAIL {
                break;
            }
            mass *= fail;
            k += 1;
        }
        total
    }

    /// Shannon entropy of the geometric law in bits.
    pub fn source_entropy(&self) -> f64 {
        let s = self.success_prob();
        crate::qcore::binary_entropy(s) / s
    }

    /// `2 log₂(4/δ)`.
    pub fn length_budget(&self) -> f64 {
        2.0 * (4.0 / self.delta).log2()
    }
}
