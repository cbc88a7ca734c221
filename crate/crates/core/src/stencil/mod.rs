//! D3Q27 velocity set and the integer orthogonal moment matrix.

mod moments;
mod velocity;

pub use moments::{
    build_raw_moments, float_inverse_defect, has_fractional_entries, index, invert, is_identity, orthogonalize,
    MomentMatrix, RationalMatrix, RawMomentMatrix, CONSERVED, MOMENT_NAMES,
};
pub use velocity::{build_velocities, VelocitySet, DIM, Q};

use crate::exact::fmt_rational;

/// Writes `M` (rows), `d_i` or `M^-1` as CSV with exact `p/q` entries.
pub fn write_matrix_csv<W: std::io::Write>(out: W, m: &MomentMatrix, what: MatrixPart) -> crate::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    match what {
        MatrixPart::Rows => {
            for r in m.rows() {
                w.write_record(r.iter().map(|v| v.to_string()))?;
            }
        }
        MatrixPart::Norms => {
            w.write_record(["row", "name", "norm"])?;
            for (i, d) in m.row_norms().iter().enumerate() {
                w.write_record([i.to_string(), MOMENT_NAMES[i].to_string(), d.to_string()])?;
            }
        }
        MatrixPart::Inverse => {
            for r in m.inverse() {
                w.write_record(r.iter().map(fmt_rational))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixPart {
    Rows,
    Norms,
    Inverse,
}
