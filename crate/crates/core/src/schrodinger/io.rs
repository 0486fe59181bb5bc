use std::path::Path;

use crate::error::Result;
use crate::io_util::{fmt_f64, CsvWriter};
use crate::numerics::ComplexField;
use crate::schrodinger::NelsonFields;

/// Snapshot of a wavefunction and its drift fields as CSV
/// (x, re_psi, im_psi, rho, u, v). Masked points print as nan.
pub fn write_nelson_snapshot_csv(
    path: &Path,
    psi: &ComplexField,
    fields: &NelsonFields,
) -> Result<()> {
    let mut w = CsvWriter::create(path, "x,re_psi,im_psi,rho,u,v")?;
    for (i, x) in psi.grid().points().enumerate() {
        let val = psi.values()[i];
        w.row(&[
            fmt_f64(x),
            fmt_f64(val.re),
            fmt_f64(val.im),
            fmt_f64(fields.rho[i]),
            fmt_f64(fields.u[i]),
            fmt_f64(fields.v[i]),
        ])?;
    }
    w.finish()
}
