//! Per-antenna average channel gain curves digitized from the outdoor campaign
//! (31 usable antennas, ULA and URA, LoS and NLoS). See `fixtures/README.md`.

use sgmimo_core::{ChannelTensor, Complex, Dims, GainProfile, MeasurementMeta, Scenario};

use crate::{csv_io, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainFixture {
    UlaLos,
    UlaNlos,
    UraLos,
    UraNlos,
}

impl GainFixture {
    pub const ALL: [GainFixture; 4] = [
        GainFixture::UlaLos,
        GainFixture::UlaNlos,
        GainFixture::UraLos,
        GainFixture::UraNlos,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GainFixture::UlaLos => "ula-los",
            GainFixture::UlaNlos => "ula-nlos",
            GainFixture::UraLos => "ura-los",
            GainFixture::UraNlos => "ura-nlos",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == name.to_ascii_lowercase().replace('_', "-"))
    }

    pub fn array(&self) -> &'static str {
        match self {
            GainFixture::UlaLos | GainFixture::UlaNlos => "ULA",
            GainFixture::UraLos | GainFixture::UraNlos => "URA",
        }
    }

    pub fn scenario(&self) -> Scenario {
        match self {
            GainFixture::UlaLos | GainFixture::UraLos => Scenario::LoS,
            GainFixture::UlaNlos | GainFixture::UraNlos => Scenario::NLoS,
        }
    }

    pub fn csv(&self) -> &'static str {
        match self {
            GainFixture::UlaLos => include_str!("../fixtures/avg_gain_ula_los.csv"),
            GainFixture::UlaNlos => include_str!("../fixtures/avg_gain_ula_nlos.csv"),
            GainFixture::UraLos => include_str!("../fixtures/avg_gain_ura_los.csv"),
            GainFixture::UraNlos => include_str!("../fixtures/avg_gain_ura_nlos.csv"),
        }
    }

    pub fn profile(&self) -> Result<GainProfile> {
        csv_io::read_gain_profile(self.csv().as_bytes(), self.scenario())
    }
}

/// Single-snapshot, single-subcarrier tensor whose per-antenna power equals the
/// profile, i.e. `h_m = 10^(g_m/20)`.
pub fn profile_tensor(profile: &GainProfile) -> Result<ChannelTensor> {
    let dims = Dims::new(1, 1, profile.len())?;
    let samples = profile
        .per_antenna_gain_db
        .iter()
        .map(|g| Complex::new(10f64.powf(g / 20.0) as f32 as f64, 0.0))
        .collect();
    Ok(ChannelTensor::new(dims, samples)?)
}

/// Metadata for a profile tensor.
pub fn profile_meta(
    profile: &GainProfile,
    array: &str,
    path_label: Option<&str>,
) -> Result<MeasurementMeta> {
    let mut meta = MeasurementMeta::for_dims(Dims::new(1, 1, profile.len())?);
    meta.array_label = array.to_string();
    meta.scenario = profile.scenario;
    meta.path_label = path_label.map(str::to_string);
    Ok(meta)
}
