//! Binary transcript container: `OQC1`, then per message an LEB128 bit length
//! followed by the bits packed MSB-first and zero-padded to a byte boundary.

use std::io::{Read, Write};

use super::bits::BitString;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"OQC1";

fn write_varint<W: Write>(w: &mut W, mut v: u64) -> Result<()> {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            w.write_all(&[byte])?;
            return Ok(());
        }
        w.write_all(&[byte | 0x80])?;
    }
}

fn read_varint(bytes: &[u8], pos: &mut usize) -> Result<u64> {
    let start = *pos;
    let mut v = 0u64;
    for shift in (0..64).step_by(7) {
        let byte = *bytes.get(*pos).ok_or_else(|| Error::Decode {
            offset: *pos * 8,
            reason: "truncated length header".into(),
        })?;
        *pos += 1;
        v |= ((byte & 0x7f) as u64) << shift;
        if byte & 0x80 == 0 {
            return Ok(v);
        }
    }
    Err(Error::Decode {
        offset: start * 8,
        reason: "length header too long".into(),
    })
}

pub fn write_transcript<W: Write>(w: &mut W, messages: &[BitString]) -> Result<()> {
    w.write_all(MAGIC)?;
    for m in messages {
        write_varint(w, m.len() as u64)?;
        w.write_all(&m.to_bytes())?;
    }
    Ok(())
}

pub fn read_transcript<R: Read>(r: &mut R) -> Result<Vec<BitString>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::Decode {
            offset: 0,
            reason: "missing OQC1 magic".into(),
        });
    }
    let mut pos = 4;
    let mut out = Vec::new();
    while pos < bytes.len() {
        let len = read_varint(&bytes, &mut pos)? as usize;
        let nbytes = len.div_ceil(8);
        if pos + nbytes > bytes.len() {
            return Err(Error::Decode {
                offset: pos * 8,
                reason: format!("message of {len} bits truncated"),
            });
        }
        out.push(BitString::from_bytes(&bytes[pos..pos + nbytes], len)?);
        pos += nbytes;
    }
    Ok(out)
}
