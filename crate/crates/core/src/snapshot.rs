//! Binary snapshot dumps of the evolving field.
//!
//! Layout: one ASCII header line
//! `SPINOR1D v1 n_points=<N> dy=<dy> y_min=<y_min>\n`, then one record per
//! snapshot, all little-endian: step index `u64`, time `f64`, then `N`
//! interleaved `[Re up, Im up, Re down, Im down]` `f64` quadruples.

use std::io::{BufRead, BufReader, Read, Write};

use crate::grid::{Grid1D, SpinorField};
use crate::propagator::Observer;
use crate::{Error, Result, C64};

pub const MAGIC: &str = "SPINOR1D v1";

pub struct SnapshotWriter<W: Write> {
    out: W,
    grid: Grid1D,
}

impl<W: Write> SnapshotWriter<W> {
    pub fn new(mut out: W, grid: Grid1D) -> Result<Self> {
        writeln!(
            out,
            "{MAGIC} n_points={} dy={} y_min={}",
            grid.n_points(),
            grid.dy(),
            grid.y_min()
        )?;
        Ok(SnapshotWriter { out, grid })
    }

    pub fn write(&mut self, step: u64, time: f64, field: &SpinorField) -> Result<()> {
        if field.grid != self.grid {
            return Err(Error::GridMismatch);
        }
        let mut buf = Vec::with_capacity(16 + 32 * field.up.len());
        buf.extend_from_slice(&step.to_le_bytes());
        buf.extend_from_slice(&time.to_le_bytes());
        for (u, d) in field.up.iter().zip(&field.down) {
            for v in [u.re, u.im, d.re, d.im] {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        self.out.write_all(&buf)?;
        Ok(())
    }

    pub fn into_inner(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

impl<W: Write> Observer for SnapshotWriter<W> {
    fn observe(&mut self, step: u64, time: f64, field: &SpinorField) -> Result<()> {
        self.write(step, time, field)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: u64,
    pub time: f64,
    pub field: SpinorField,
}

pub fn read_snapshots<R: Read>(input: R) -> Result<Vec<Snapshot>> {
    let mut reader = BufReader::new(input);
    let mut header = String::new();
    reader.read_line(&mut header)?;
    let grid = parse_header(header.trim_end())?;
    let n = grid.n_points();
    let mut out = Vec::new();
    let mut word = [0u8; 8];
    loop {
        match reader.read_exact(&mut word) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => break,
            Err(e) => return Err(e.into()),
        }
        let step = u64::from_le_bytes(word);
        let time = read_f64(&mut reader)?;
        let mut field = SpinorField::zeros(grid);
        for j in 0..n {
            let v = [
                read_f64(&mut reader)?,
                read_f64(&mut reader)?,
                read_f64(&mut reader)?,
                read_f64(&mut reader)?,
            ];
            field.up[j] = C64::new(v[0], v[1]);
            field.down[j] = C64::new(v[2], v[3]);
        }
        out.push(Snapshot { step, time, field });
    }
    Ok(out)
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut w = [0u8; 8];
    r.read_exact(&mut w)?;
    Ok(f64::from_le_bytes(w))
}

fn parse_header(line: &str) -> Result<Grid1D> {
    let rest = line
        .strip_prefix(MAGIC)
        .ok_or_else(|| Error::InvalidParameter(format!("bad snapshot header: {line:?}")))?;
    let (mut n, mut dy, mut y_min) = (None, None, None);
    for kv in rest.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("bad header field {kv:?}")))?;
        let bad = |_| Error::InvalidParameter(format!("bad header value {kv:?}"));
        match k {
            "n_points" => n = Some(v.parse::<usize>().map_err(|_| Error::InvalidParameter(format!("bad header value {kv:?}")))?),
            "dy" => dy = Some(v.parse::<f64>().map_err(bad)?),
            "y_min" => y_min = Some(v.parse::<f64>().map_err(bad)?),
            _ => {}
        }
    }
    match (n, dy, y_min) {
        (Some(n), Some(dy), Some(y_min)) => Grid1D::with_spacing(y_min, dy, n),
        _ => Err(Error::InvalidParameter(format!("incomplete snapshot header: {line:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{init_gaussian, make_grid, PacketSpec, SpinSign};

    #[test]
    fn header_and_record_layout() {
        let g = make_grid(-20.0, 20.0, 401).unwrap();
        let spec = PacketSpec {
            y0: -5.0,
            sigma_y: 1.0,
            k0: 2.0,
            spin_axis: [0.0, 0.0, 1.0],
            spin_sign: SpinSign::Down,
        };
        let f = init_gaussian(g, &spec).unwrap();
        let mut w = SnapshotWriter::new(Vec::new(), g).unwrap();
        w.write(7, 0.25, &f).unwrap();
        w.write(9, 0.5, &f).unwrap();
        let bytes = w.into_inner().unwrap();

        let header = format!("SPINOR1D v1 n_points=401 dy={} y_min=-20\n", g.dy());
        assert!(bytes.starts_with(header.as_bytes()));
        let body = &bytes[header.len()..];
        assert_eq!(body.len(), 2 * (16 + 401 * 32));
        assert_eq!(u64::from_le_bytes(body[0..8].try_into().unwrap()), 7);
        assert_eq!(f64::from_le_bytes(body[8..16].try_into().unwrap()), 0.25);
        // node 150 is y = -5; spin down along z lives in the second component
        let off = 16 + 150 * 32;
        let re_down = f64::from_le_bytes(body[off + 16..off + 24].try_into().unwrap());
        assert_eq!(re_down, f.down[150].re);

        let snaps = read_snapshots(&bytes[..]).unwrap();
        assert_eq!(snaps.len(), 2);
        assert_eq!(snaps[1].step, 9);
        assert_eq!(snaps[0].field, f);
    }

    #[test]
    fn bad_header_rejected() {
        assert!(read_snapshots(&b"SPINOR2D v1 n_points=3\n"[..]).is_err());
        assert!(read_snapshots(&b"SPINOR1D v1 n_points=20 dy=0.1\n"[..]).is_err());
    }
}
