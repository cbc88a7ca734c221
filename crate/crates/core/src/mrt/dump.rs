use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::LatticeState;
use crate::error::{Error, Result};
use crate::exact::fmt_f64_digits;

const MAGIC: &[u8; 8] = b"LQFIELD1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FieldFormat {
    Csv,
    Binary,
}

/// Density and momentum per site; `None` on solid sites.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub shape: [usize; 3],
    pub step: u64,
    pub values: Vec<Option<[f64; 4]>>,
}

impl FieldSnapshot {
    pub fn capture(state: &LatticeState) -> Self {
        let d = state.domain();
        let values = (0..d.sites())
            .map(|s| {
                (!d.is_solid(s)).then(|| {
                    let (rho, q) = state.site_moments(s);
                    [rho, q[0], q[1], q[2]]
                })
            })
            .collect();
        Self { shape: state.shape(), step: state.time(), values }
    }

    fn coords(&self, site: usize) -> [usize; 3] {
        let [nx, ny, _] = self.shape;
        [site % nx, (site / nx) % ny, site / (nx * ny)]
    }
}

/// `x,y,z,rho,qx,qy,qz`, fluid sites only, x fastest.
pub fn write_fields_csv<W: Write>(out: W, snap: &FieldSnapshot, digits: Option<usize>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "z", "rho", "qx", "qy", "qz"])?;
    for (site, v) in snap.values.iter().enumerate() {
        if let Some(v) = v {
            let [x, y, z] = snap.coords(site);
            let mut rec = vec![x.to_string(), y.to_string(), z.to_string()];
            rec.extend(v.iter().map(|c| fmt_f64_digits(*c, digits)));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Little-endian layout: 8-byte magic, `nx ny nz step` as u64, then
/// `rho qx qy qz` as f64 for every site (x fastest). Solid sites hold NaN.
pub fn write_fields_binary<W: Write>(mut out: W, snap: &FieldSnapshot) -> Result<()> {
    out.write_all(MAGIC)?;
    for n in snap.shape {
        out.write_all(&(n as u64).to_le_bytes())?;
    }
    out.write_all(&snap.step.to_le_bytes())?;
    for v in &snap.values {
        for c in v.unwrap_or([f64::NAN; 4]) {
            out.write_all(&c.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_fields_binary<R: Read>(mut input: R) -> Result<FieldSnapshot> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Experiment("not a field dump (bad magic)".into()));
    }
    let mut word = [0u8; 8];
    let mut next_u64 = |input: &mut R| -> Result<u64> {
        input.read_exact(&mut word)?;
        Ok(u64::from_le_bytes(word))
    };
    let shape = [next_u64(&mut input)? as usize, next_u64(&mut input)? as usize, next_u64(&mut input)? as usize];
    let step = next_u64(&mut input)?;
    let n = shape.iter().product();
    let mut values = Vec::with_capacity(n);
    let mut buf = [0u8; 32];
    for _ in 0..n {
        input.read_exact(&mut buf)?;
        let v: [f64; 4] = std::array::from_fn(|i| f64::from_le_bytes(buf[i * 8..(i + 1) * 8].try_into().expect("8 bytes")));
        values.push((!v[0].is_nan()).then_some(v));
    }
    Ok(FieldSnapshot { shape, step, values })
}
