//! Little-endian `FNLS` snapshot files.
//!
//! Layout: magic `"FNLS"`, version `u32 = 1`, `Nx u32`, `Ny u32`, `Lx f64`,
//! `time f64`, representation `u8` (0 physical, 1 spectral), then `Nx·Ny`
//! pairs `(re, im)` of `f64` in storage order (y fastest; FFT order for
//! spectral data).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use super::{Field, Grid, Representation};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"FNLS";
pub const VERSION: u32 = 1;

/// A field together with the time it was taken at.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub field: Field,
    pub time: f64,
}

pub fn write_snapshot<W: Write>(mut w: W, field: &Field, time: f64) -> Result<()> {
    let g = field.grid();
    if !g.is_torus() {
        return Err(Error::Unsupported(
            "snapshots store cylinder fields only (transverse period fixed at 2π)".into(),
        ));
    }
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(g.nx() as u32).to_le_bytes())?;
    w.write_all(&(g.ny() as u32).to_le_bytes())?;
    w.write_all(&g.lx().to_le_bytes())?;
    w.write_all(&time.to_le_bytes())?;
    let tag: u8 = match field.representation() {
        Representation::Physical => 0,
        Representation::Spectral => 1,
    };
    w.write_all(&[tag])?;
    let mut buf = Vec::with_capacity(16 * g.len());
    for c in field.data().iter() {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)
        .map_err(|e| Error::Snapshot(format!("truncated header: {e}")))?;
    Ok(b)
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<Snapshot> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::Snapshot(format!("bad magic {magic:?}")));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let nx = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let ny = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let lx = f64::from_le_bytes(read_array(&mut r)?);
    let time = f64::from_le_bytes(read_array(&mut r)?);
    let [tag] = read_array::<1, _>(&mut r)?;
    let repr = match tag {
        0 => Representation::Physical,
        1 => Representation::Spectral,
        t => return Err(Error::Snapshot(format!("unknown representation tag {t}"))),
    };
    let grid = Grid::cylinder(nx, ny, lx)?;
    let mut raw = vec![0u8; 16 * nx * ny];
    r.read_exact(&mut raw)
        .map_err(|e| Error::Snapshot(format!("truncated payload: {e}")))?;
    let values: Vec<Complex64> = raw
        .chunks_exact(16)
        .map(|b| {
            let re = f64::from_le_bytes(b[..8].try_into().unwrap());
            let im = f64::from_le_bytes(b[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    let data = Array2::from_shape_vec((nx, ny), values).expect("sized above");
    Ok(Snapshot {
        field: Field::from_data(&grid, repr, data)?,
        time,
    })
}

pub fn save_snapshot(path: &Path, field: &Field, time: f64) -> Result<()> {
    let f = File::create(path).map_err(|e| io_at(path, e))?;
    write_snapshot(BufWriter::new(f), field, time)
}

pub fn load_snapshot(path: &Path) -> Result<Snapshot> {
    let f = File::open(path).map_err(|e| io_at(path, e))?;
    read_snapshot(BufReader::new(f))
}

fn io_at(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn header_layout() {
        let g = make_grid(4, 6, 2.5).unwrap();
        let u = Field::from_fn(&g, |x, y| Complex64::new(x, -y));
        let mut bytes = Vec::new();
        write_snapshot(&mut bytes, &u, 0.125).unwrap();
        assert_eq!(bytes.len(), 4 + 4 + 4 + 4 + 8 + 8 + 1 + 16 * 24);
        assert_eq!(&bytes[..4], b"FNLS");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 4);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 6);
        assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), 2.5);
        assert_eq!(f64::from_le_bytes(bytes[24..32].try_into().unwrap()), 0.125);
        assert_eq!(bytes[32], 0);
        // first value is u(x0, y0) = (-Lx/2, 0)
        assert_eq!(f64::from_le_bytes(bytes[33..41].try_into().unwrap()), -1.25);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_snapshot(&b"NOPE"[..]).is_err());
        let g = make_grid(4, 4, 1.0).unwrap();
        let mut bytes = Vec::new();
        write_snapshot(&mut bytes, &Field::zeros(&g, Representation::Spectral), 0.0).unwrap();
        bytes.truncate(bytes.len() - 3);
        assert!(matches!(read_snapshot(&bytes[..]), Err(Error::Snapshot(_))));
    }
}
