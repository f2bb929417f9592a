//! Run-length binary dump of accepted-bit sequences.
//!
//! Layout: the magic `TBRL`, a version byte, the sequence length, then the
//! run lengths alternating rejected/accepted starting with rejected (a
//! leading run may be empty). Integers are unsigned LEB128.

use std::io::{self, Read, Write};

const MAGIC: &[u8; 4] = b"TBRL";
const VERSION: u8 = 1;

pub fn encode<W: Write>(bits: &[bool], out: &mut W) -> io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&[VERSION])?;
    leb128::write::unsigned(out, bits.len() as u64)?;
    let mut current = false;
    let mut run = 0u64;
    for &b in bits {
        if b != current {
            leb128::write::unsigned(out, run)?;
            current = b;
            run = 0;
        }
        run += 1;
    }
    if !bits.is_empty() {
        leb128::write::unsigned(out, run)?;
    }
    Ok(())
}

pub fn to_bytes(bits: &[bool]) -> Vec<u8> {
    let mut v = Vec::new();
    encode(bits, &mut v).expect("writing to a Vec cannot fail");
    v
}

fn invalid(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}

pub fn decode<R: Read>(input: &mut R) -> io::Result<Vec<bool>> {
    let mut head = [0u8; 5];
    input.read_exact(&mut head)?;
    if &head[..4] != MAGIC {
        return Err(invalid("not a run-length bit dump"));
    }
    if head[4] != VERSION {
        return Err(invalid("unsupported dump version"));
    }
    let read = |input: &mut R| leb128::read::unsigned(input).map_err(|e| invalid(&e.to_string()));
    let len = read(input)? as usize;
    let mut bits = Vec::with_capacity(len.min(1 << 24));
    let mut current = false;
    while bits.len() < len {
        let run = read(input)? as usize;
        if run > len - bits.len() {
            return Err(invalid("runs exceed the stated length"));
        }
        bits.extend(std::iter::repeat_n(current, run));
        current = !current;
    }
    Ok(bits)
}
