//! GridFunction serialization: flat little-endian doubles with a JSON
//! sidecar, plus CSV export for 1-d/2-d slices.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HgcError, Result};
use crate::grid::{Grid, GridFunction};

/// Sidecar metadata stored next to the binary payload.
#[derive(Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub dims: Vec<usize>,
    pub extents: Vec<f64>,
    pub steps: Vec<f64>,
    /// Payload layout: interleaved (re, im) doubles, row-major.
    pub scalar: String,
    pub border: Vec<usize>,
}

/// Write `<base>.bin` (interleaved re/im little-endian f64) and
/// `<base>.json`.
pub fn write_grid_function(base: &Path, f: &GridFunction) -> Result<()> {
    let side = Sidecar {
        dims: f.grid.sizes().to_vec(),
        extents: f.grid.extents().to_vec(),
        steps: f.grid.steps().to_vec(),
        scalar: "c128-le-interleaved".to_string(),
        border: f.border.clone(),
    };
    let json_path = base.with_extension("json");
    let bin_path = base.with_extension("bin");
    serde_json::to_writer_pretty(BufWriter::new(File::create(json_path)?), &side)?;
    let mut w = BufWriter::new(File::create(bin_path)?);
    for v in &f.values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Read a pair written by [`write_grid_function`].
pub fn read_grid_function(base: &Path) -> Result<GridFunction> {
    let side: Sidecar =
        serde_json::from_reader(BufReader::new(File::open(base.with_extension("json"))?))?;
    let grid = Grid::new(side.extents, side.dims)?;
    let mut bytes = Vec::new();
    BufReader::new(File::open(base.with_extension("bin"))?).read_to_end(&mut bytes)?;
    let expect = grid.total_points() * 16;
    if bytes.len() != expect {
        return Err(HgcError::InvalidArgument(format!(
            "binary payload has {} bytes, expected {expect}",
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    Ok(GridFunction { grid, values, border: side.border })
}

/// Export a 1-d function, or a 1-d/2-d slice of a higher-dimensional one,
/// as CSV. `fixed` pins (axis, index) pairs; the remaining one or two axes
/// become columns `x[,y],re,im`.
pub fn export_csv(path: &Path, f: &GridFunction, fixed: &[(usize, usize)]) -> Result<()> {
    let n = f.dim();
    let free: Vec<usize> = (0..n).filter(|ax| !fixed.iter().any(|(a, _)| a == ax)).collect();
    if free.len() != 1 && free.len() != 2 {
        return Err(HgcError::InvalidArgument(format!(
            "CSV export needs 1 or 2 free axes, got {}",
            free.len()
        )));
    }
    let mut w = BufWriter::new(File::create(path)?);
    if free.len() == 1 {
        writeln!(w, "x,re,im")?;
    } else {
        writeln!(w, "x,y,re,im")?;
    }
    let mut idx = vec![0usize; n];
    for &(ax, i) in fixed {
        if ax >= n || i >= f.grid.sizes()[ax] {
            return Err(HgcError::InvalidArgument("fixed axis/index out of range".into()));
        }
        idx[ax] = i;
    }
    let sizes = f.grid.sizes();
    match free.as_slice() {
        [a] => {
            for i in 0..sizes[*a] {
                idx[*a] = i;
                let p = f.grid.point(&idx);
                let v = f.values[f.grid.flatten(&idx)];
                writeln!(w, "{},{},{}", p[*a], v.re, v.im)?;
            }
        }
        [a, b] => {
            for i in 0..sizes[*a] {
                idx[*a] = i;
                for j in 0..sizes[*b] {
                    idx[*b] = j;
                    let p = f.grid.point(&idx);
                    let v = f.values[f.grid.flatten(&idx)];
                    writeln!(w, "{},{},{},{}", p[*a], p[*b], v.re, v.im)?;
                }
            }
        }
        _ => unreachable!(),
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let g = Grid::new(vec![2.0, 3.0], vec![16, 8]).unwrap();
        let f = GridFunction::sample(&g, |x| Complex64::new(x[0], x[1] * 0.5)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let base = dir.path().join("field");
        write_grid_function(&base, &f).unwrap();
        let back = read_grid_function(&base).unwrap();
        assert_eq!(back.grid, f.grid);
        assert_eq!(back.values, f.values);
    }

    #[test]
    fn csv_slice() {
        let g = Grid::new(vec![1.0, 1.0], vec![8, 8]).unwrap();
        let f = GridFunction::sample_real(&g, |x| x[0] + 10.0 * x[1]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("slice.csv");
        export_csv(&path, &f, &[(1, 4)]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,re,im");
        assert_eq!(lines.len(), 9);
    }
}
