//! Binary checkpoint format for field snapshots.
//!
//! Layout (all integers little-endian u64, all floats little-endian f64):
//! magic `MSLB1`, dim, the dim-1 tangential mode counts, the normal node
//! count, the tangential period, the snapshot time, the number of field
//! arrays, then each array's samples row-major in storage order
//! `[normal][axis-2][axis-1]`.

use crate::{build_grid, Field, GridError, SlabGrid};
use ndarray::Array3;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const CHECKPOINT_MAGIC: &[u8; 5] = b"MSLB1";

fn io_err(path: &Path, source: std::io::Error) -> GridError {
    GridError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn format_err(path: &Path, kind: impl Into<String>) -> GridError {
    GridError::Checkpoint {
        path: path.display().to_string(),
        kind: kind.into(),
    }
}

/// Write a snapshot of `fields` (all on `grid`) at time `time`.
pub fn write_checkpoint(
    path: &Path,
    grid: &SlabGrid,
    time: f64,
    fields: &[&Field],
) -> Result<(), GridError> {
    for f in fields {
        if !f.grid().same_layout(grid) {
            return Err(GridError::ShapeMismatch {
                expected: grid.shape(),
                got: f.grid().shape(),
            });
        }
    }
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let mut put = |bytes: &[u8]| w.write_all(bytes).map_err(|e| io_err(path, e));
    put(CHECKPOINT_MAGIC)?;
    put(&(grid.dim() as u64).to_le_bytes())?;
    for &n in grid.n_tangential() {
        put(&(n as u64).to_le_bytes())?;
    }
    put(&(grid.n_normal() as u64).to_le_bytes())?;
    put(&grid.period().to_le_bytes())?;
    put(&time.to_le_bytes())?;
    put(&(fields.len() as u64).to_le_bytes())?;
    for f in fields {
        for &v in f.values().iter() {
            put(&v.to_le_bytes())?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Read a snapshot back: rebuilds the grid from the header and returns
/// `(grid, time, fields)` with fields in the order they were written.
pub fn read_checkpoint(path: &Path) -> Result<(SlabGrid, f64, Vec<Field>), GridError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut r = BufReader::new(file);

    let mut magic = [0u8; 5];
    r.read_exact(&mut magic).map_err(|e| io_err(path, e))?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(format_err(path, "bad magic"));
    }
    let mut u64buf = [0u8; 8];
    let mut get_u64 = |r: &mut BufReader<File>| -> Result<u64, GridError> {
        r.read_exact(&mut u64buf).map_err(|e| io_err(path, e))?;
        Ok(u64::from_le_bytes(u64buf))
    };
    let dim = get_u64(&mut r)? as usize;
    if dim != 2 && dim != 3 {
        return Err(format_err(path, format!("bad dimension {dim}")));
    }
    let mut n_tangential = Vec::new();
    for _ in 0..dim - 1 {
        n_tangential.push(get_u64(&mut r)? as usize);
    }
    let n_normal = get_u64(&mut r)? as usize;
    let mut f64buf = [0u8; 8];
    let mut get_f64 = |r: &mut BufReader<File>| -> Result<f64, GridError> {
        r.read_exact(&mut f64buf).map_err(|e| io_err(path, e))?;
        Ok(f64::from_le_bytes(f64buf))
    };
    let period = get_f64(&mut r)?;
    let time = get_f64(&mut r)?;
    let mut countbuf = [0u8; 8];
    r.read_exact(&mut countbuf).map_err(|e| io_err(path, e))?;
    let count = u64::from_le_bytes(countbuf) as usize;

    let grid = build_grid(dim, &n_tangential, n_normal, period)?;
    let (n3, n2, n1) = grid.shape();
    let len = n3 * n2 * n1;
    let mut fields = Vec::with_capacity(count);
    let mut raw = vec![0u8; len * 8];
    for _ in 0..count {
        r.read_exact(&mut raw).map_err(|e| io_err(path, e))?;
        let mut data = Vec::with_capacity(len);
        for chunk in raw.chunks_exact(8) {
            data.push(f64::from_le_bytes(chunk.try_into().expect("8-byte chunk")));
        }
        let arr = Array3::from_shape_vec((n3, n2, n1), data).expect("length matches shape");
        fields.push(Field::from_values(&grid, arr)?);
    }
    let mut probe = [0u8; 1];
    match r.read(&mut probe) {
        Ok(0) => Ok((grid, time, fields)),
        Ok(_) => Err(format_err(path, "trailing bytes after field data")),
        Err(e) => Err(io_err(path, e)),
    }
}
