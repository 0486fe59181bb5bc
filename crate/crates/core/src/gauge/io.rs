use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::algebra::SuNAlgebra;
use super::field::{LieField, ResidualReport};

/// On-disk form of a field: the rank is enough to rebuild the algebra.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldRecord {
    pub n: usize,
    pub g: f64,
    pub e: Vec<[f64; 3]>,
    pub b: Vec<[f64; 3]>,
}

impl From<&LieField> for FieldRecord {
    fn from(field: &LieField) -> Self {
        FieldRecord {
            n: field.algebra().rank(),
            g: field.coupling(),
            e: field.e().to_vec(),
            b: field.b().to_vec(),
        }
    }
}

impl FieldRecord {
    pub fn into_field(self) -> Result<LieField> {
        let algebra = SuNAlgebra::new(self.n)?;
        LieField::new(algebra, self.e, self.b, self.g)
    }
}

pub fn write_field_json(path: &Path, field: &LieField) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let record = FieldRecord::from(field);
    std::fs::write(path, serde_json::to_string_pretty(&record)?)?;
    Ok(())
}

pub fn read_field_json(path: &Path) -> Result<LieField> {
    let record: FieldRecord = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    record.into_field()
}

pub fn write_residual_report(path: &Path, report: &ResidualReport) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(report)?)?;
    Ok(())
}
