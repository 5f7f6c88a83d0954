//! Grid files: a compact binary block and a plain-text graymap.
//!
//! Binary layout: magic `TFL1`, little-endian `u32` width and height, `f64`
//! cell size, row-major label bytes, then the domain and frozen masks as
//! bit planes (row-major, least significant bit first, each padded to whole
//! bytes).
//!
//! Graymap layout (`P2`): values 0..=2 are free labels, 3..=5 are frozen
//! labels plus 3, and 9 marks a cell outside the domain. A comment of the
//! form `# h = 0.01` sets the cell size, which otherwise is `1 / width`.

use super::{GridError, LabelGrid};
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"TFL1";
const OUTSIDE: u32 = 9;

fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            out[i / 8] |= 1 << (i % 8);
        }
    }
    out
}

fn unpack_bits(bytes: &[u8], n: usize) -> Vec<bool> {
    (0..n).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1).collect()
}

pub fn write_binary<W: Write>(grid: &LabelGrid, mut w: W) -> Result<(), GridError> {
    w.write_all(MAGIC)?;
    w.write_all(&(grid.width as u32).to_le_bytes())?;
    w.write_all(&(grid.height as u32).to_le_bytes())?;
    w.write_all(&grid.h.to_le_bytes())?;
    w.write_all(&grid.labels)?;
    w.write_all(&pack_bits(&grid.domain))?;
    w.write_all(&pack_bits(&grid.frozen))?;
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<LabelGrid, GridError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(GridError::Format("missing TFL1 magic".into()));
    }
    let mut u = [0u8; 4];
    r.read_exact(&mut u)?;
    let width = u32::from_le_bytes(u) as usize;
    r.read_exact(&mut u)?;
    let height = u32::from_le_bytes(u) as usize;
    let mut f = [0u8; 8];
    r.read_exact(&mut f)?;
    let h = f64::from_le_bytes(f);
    let n = width
        .checked_mul(height)
        .filter(|&n| n > 0 && n <= 1 << 30)
        .ok_or_else(|| GridError::Format(format!("implausible size {width}x{height}")))?;
    let mut labels = vec![0u8; n];
    r.read_exact(&mut labels)?;
    let mut plane = vec![0u8; n.div_ceil(8)];
    r.read_exact(&mut plane)?;
    let domain = unpack_bits(&plane, n);
    r.read_exact(&mut plane)?;
    let frozen = unpack_bits(&plane, n);
    LabelGrid::new(width, height, h, labels, domain, frozen)
}

pub fn write_pgm<W: Write>(grid: &LabelGrid, mut w: W) -> Result<(), GridError> {
    writeln!(w, "P2")?;
    writeln!(w, "# h = {}", grid.h)?;
    writeln!(w, "{} {}", grid.width, grid.height)?;
    writeln!(w, "{OUTSIDE}")?;
    for row in 0..grid.height {
        let line: Vec<String> = (0..grid.width)
            .map(|col| {
                let i = grid.index(row, col);
                let v = if !grid.domain[i] {
                    OUTSIDE
                } else if grid.frozen[i] {
                    grid.labels[i] as u32 + 3
                } else {
                    grid.labels[i] as u32
                };
                v.to_string()
            })
            .collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_pgm(text: &str) -> Result<LabelGrid, GridError> {
    let mut h = None;
    let mut tokens = Vec::new();
    for line in text.lines() {
        let (body, comment) = match line.find('#') {
            Some(k) => (&line[..k], Some(&line[k + 1..])),
            None => (line, None),
        };
        if let Some(c) = comment {
            if let Some((key, value)) = c.split_once('=') {
                if key.trim() == "h" {
                    h = Some(
                        value
                            .trim()
                            .parse::<f64>()
                            .map_err(|e| GridError::Format(format!("bad cell size: {e}")))?,
                    );
                }
            }
        }
        tokens.extend(body.split_whitespace());
    }
    let mut it = tokens.into_iter();
    if it.next() != Some("P2") {
        return Err(GridError::Format("missing P2 header".into()));
    }
    let mut num = |what: &str| -> Result<u32, GridError> {
        it.next()
            .ok_or_else(|| GridError::Format(format!("missing {what}")))?
            .parse::<u32>()
            .map_err(|e| GridError::Format(format!("bad {what}: {e}")))
    };
    let width = num("width")? as usize;
    let height = num("height")? as usize;
    let _maxval = num("maximum value")?;
    let n = width * height;
    let mut labels = vec![0u8; n];
    let mut domain = vec![true; n];
    let mut frozen = vec![false; n];
    for i in 0..n {
        match num("cell value")? {
            v @ 0..=2 => labels[i] = v as u8,
            v @ 3..=5 => {
                labels[i] = (v - 3) as u8;
                frozen[i] = true;
            }
            OUTSIDE => domain[i] = false,
            v => return Err(GridError::Format(format!("cell value {v} is not 0-5 or 9"))),
        }
    }
    let h = h.unwrap_or(1.0 / width.max(1) as f64);
    LabelGrid::new(width, height, h, labels, domain, frozen)
}

fn is_pgm(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("pgm" | "p2")
    )
}

/// Loads a grid, choosing the format from the extension (`.pgm`/`.p2` for
/// text, anything else binary).
pub fn load(path: &Path) -> Result<LabelGrid, GridError> {
    if is_pgm(path) {
        read_pgm(&std::fs::read_to_string(path)?)
    } else {
        read_binary(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

pub fn save(grid: &LabelGrid, path: &Path) -> Result<(), GridError> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    if is_pgm(path) {
        write_pgm(grid, &mut w)?;
    } else {
        write_binary(grid, &mut w)?;
    }
    w.flush()?;
    Ok(())
}
