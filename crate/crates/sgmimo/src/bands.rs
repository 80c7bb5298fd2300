//! SRD band table: built-in band 54 plus records loaded from JSON.
//!
//! The file holds an array of objects with `band_id`, `f_low_hz`, `f_high_hz`,
//! `max_erp_dbm` and `max_duty_cycle`.

use std::path::Path;

use sgmimo_core::srd860::{builtin_bands, SrdBand};

use crate::{IoError, Result};

pub fn parse_bands(json: &str) -> Result<Vec<SrdBand>> {
    let bands: Vec<SrdBand> =
        serde_json::from_str(json).map_err(|e| IoError::Band(e.to_string()))?;
    for b in &bands {
        b.validate()?;
    }
    Ok(bands)
}

pub fn load_bands(path: impl AsRef<Path>) -> Result<Vec<SrdBand>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_bands(&text)
}

/// Built-in bands followed by `extra`; later entries win on duplicate ids.
pub fn find_band(id: &str, extra: &[SrdBand]) -> Result<SrdBand> {
    extra
        .iter()
        .rev()
        .chain(builtin_bands().iter().rev())
        .find(|b| b.band_id == id)
        .cloned()
        .ok_or_else(|| IoError::Band(format!("unknown band '{id}'")))
}
