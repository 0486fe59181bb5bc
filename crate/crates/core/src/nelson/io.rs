use std::path::Path;

use crate::error::{Error, Result};
use crate::io_util::{fmt_f64, CsvWriter};

use super::ensemble::Ensemble;

/// Streams (particle_id, t, x) rows to CSV, keeping every `thin`-th particle.
pub struct TrajectoryRecorder {
    writer: CsvWriter,
    thin: usize,
}

impl TrajectoryRecorder {
    pub fn create(path: &Path, thin: usize) -> Result<Self> {
        if thin == 0 {
            return Err(Error::Domain("thinning factor must be >= 1".into()));
        }
        Ok(TrajectoryRecorder {
            writer: CsvWriter::create(path, "particle_id,t,x")?,
            thin,
        })
    }

    /// Append one row per retained particle at the ensemble's current time.
    pub fn record(&mut self, ens: &Ensemble) -> Result<()> {
        let t = fmt_f64(ens.time());
        for (i, x) in ens.positions().iter().enumerate().step_by(self.thin) {
            self.writer.row(&[i.to_string(), t.clone(), fmt_f64(*x)])?;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        self.writer.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    #[test]
    fn thinned_trajectories_keep_every_kth_particle() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("paths.csv");
        let ens =
            Ensemble::from_positions(vec![0.0, 1.0, 2.0, 3.0, 4.0], RngStream::new(0, 0)).unwrap();
        let mut rec = TrajectoryRecorder::create(&path, 2).unwrap();
        rec.record(&ens).unwrap();
        rec.record(&ens).unwrap();
        rec.finish().unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "particle_id,t,x");
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert!(lines[1].starts_with("0,"));
        assert!(lines[2].starts_with("2,"));
        assert!(lines[3].starts_with("4,"));
        assert!(TrajectoryRecorder::create(&dir.path().join("x.csv"), 0).is_err());
    }
}
