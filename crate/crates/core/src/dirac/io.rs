use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::io_util::{fmt_f64, CsvWriter};
use crate::numerics::Grid1D;

use super::rs_photon::RsDiracState;
use super::spectral::WeylSpinor;
use super::telegraph::TelegraphState;

/// Write a multi-component complex field as long-form CSV:
/// one row per (site, component), columns x, component, re, im.
pub fn write_complex_snapshot(
    path: &Path,
    grid: &Grid1D,
    components: &[&[Complex64]],
) -> Result<()> {
    for (c, comp) in components.iter().enumerate() {
        if comp.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "component {c} has length {} on a {}-point grid",
                comp.len(),
                grid.len()
            )));
        }
    }
    let mut out = CsvWriter::create(path, "x,component,re,im")?;
    for (i, x) in grid.points().enumerate() {
        for (c, comp) in components.iter().enumerate() {
            out.row(&[
                fmt_f64(x),
                c.to_string(),
                fmt_f64(comp[i].re),
                fmt_f64(comp[i].im),
            ])?;
        }
    }
    out.finish()
}

pub fn write_spinor_snapshot(path: &Path, spinor: &WeylSpinor) -> Result<()> {
    write_complex_snapshot(
        path,
        spinor.grid(),
        &[spinor.psi_plus(), spinor.psi_minus()],
    )
}

pub fn write_rs_snapshot(path: &Path, state: &RsDiracState) -> Result<()> {
    write_complex_snapshot(path, state.grid(), &state.components())
}

/// Write the two telegraph densities: columns x, p_plus, p_minus.
pub fn write_telegraph_snapshot(path: &Path, state: &TelegraphState) -> Result<()> {
    let mut out = CsvWriter::create(path, "x,p_plus,p_minus")?;
    for (i, x) in state.grid().points().enumerate() {
        out.row(&[
            fmt_f64(x),
            fmt_f64(state.p_plus()[i]),
            fmt_f64(state.p_minus()[i]),
        ])?;
    }
    out.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Boundary;

    #[test]
    fn snapshot_rows_cover_every_site_and_component() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.csv");
        let grid = Grid1D::new(0.0, 1.0, 4, Boundary::Periodic).unwrap();
        let a: Vec<Complex64> = (0..4).map(|i| Complex64::new(i as f64, 0.5)).collect();
        let b: Vec<Complex64> = (0..4).map(|i| Complex64::new(0.0, -(i as f64))).collect();
        write_complex_snapshot(&path, &grid, &[&a, &b]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 4 * 2);
        assert_eq!(lines[0], "x,component,re,im");
        assert!(lines[1].starts_with("0.0000000000000000e0,0,"));
        assert!(lines[2].starts_with("0.0000000000000000e0,1,"));
        let last: Vec<&str> = lines[8].split(',').collect();
        assert_eq!(last[1], "1");
        assert_eq!(last[3].parse::<f64>().unwrap(), -3.0);
    }

    #[test]
    fn mismatched_component_length_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid1D::new(0.0, 1.0, 4, Boundary::Periodic).unwrap();
        let short = vec![Complex64::ZERO; 3];
        assert!(write_complex_snapshot(&dir.path().join("x.csv"), &grid, &[&short]).is_err());
    }
}
