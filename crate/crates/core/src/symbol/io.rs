//! Binary symbol files: the 8-byte magic, then `u32 n`, `u32 J`, `f64 d`,
//! `f64 ρ`, `f64 δ`, then `|Λ|²` little-endian `(re, im)` pairs in row-major
//! `[x][κ]` order.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{Symbol, SymbolType};
use crate::error::{Error, Result};
use crate::grid::TorusGrid;

pub const SYMBOL_MAGIC: &[u8; 8] = b"PSDOSYM1";

pub fn write_symbol(a: &Symbol, mut out: impl Write) -> Result<()> {
    let grid = a.grid();
    out.write_all(SYMBOL_MAGIC)?;
    out.write_all(&(grid.dim() as u32).to_le_bytes())?;
    out.write_all(&grid.depth().to_le_bytes())?;
    for v in [a.order(), a.kind().rho(), a.kind().delta()] {
        out.write_all(&v.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(a.samples().len() * 16);
    for v in a.samples() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

fn read_array<const K: usize>(input: &mut impl Read) -> Result<[u8; K]> {
    let mut b = [0u8; K];
    input.read_exact(&mut b).map_err(|e| Error::Format(format!("truncated symbol header: {e}")))?;
    Ok(b)
}

pub fn read_symbol(mut input: impl Read) -> Result<Symbol> {
    let magic: [u8; 8] = read_array(&mut input)?;
    if &magic != SYMBOL_MAGIC {
        return Err(Error::Format("not a symbol file (bad magic)".into()));
    }
    let dim = u32::from_le_bytes(read_array(&mut input)?) as usize;
    let depth = u32::from_le_bytes(read_array(&mut input)?);
    let order = f64::from_le_bytes(read_array(&mut input)?);
    let rho = f64::from_le_bytes(read_array(&mut input)?);
    let delta = f64::from_le_bytes(read_array(&mut input)?);
    let grid = TorusGrid::new(dim, depth)?;
    let kind = SymbolType::from_rho_delta(rho, delta)?;
    let count = grid.len() * grid.len();
    if count > super::MAX_SYMBOL_SAMPLES {
        return Err(Error::Resource(format!("symbol file declares {count} samples")));
    }
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() != count * 16 {
        return Err(Error::Format(format!("expected {} bytes of samples, found {}", count * 16, body.len())));
    }
    let samples = body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Symbol::new(grid, samples, order, kind)
}
