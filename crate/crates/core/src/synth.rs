//! Seeded synthetic channels.
//!
//! Each snapshot draws from its own ChaCha8 stream keyed by `(seed, n)` and fills
//! subcarriers and antennas in row-major order, so a tensor is bit-identical for a
//! given seed whatever the thread count. Samples are rounded to `f32` precision to
//! match the dataset payload, which makes generated tensors survive a save/load
//! cycle unchanged.
//!
//! Small-scale models have unit average power per antenna element; a large-scale
//! profile is applied multiplicatively afterwards.

use alloc::vec::Vec;

use crate::geometry::{steering_vector, ArrayGeometry};
use crate::tensor::{ChannelTensor, Dims};
use crate::{math, par, rng, Complex, Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ChannelModel {
    IidRayleigh,
    /// Plane-wave line-of-sight component plus i.i.d. scatter, `k_factor` linear.
    Rician {
        k_factor: f64,
        azimuth_rad: f64,
        elevation_rad: f64,
    },
    Constant(Complex),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub model: ChannelModel,
    pub dims: Dims,
    /// Optional per-antenna large-scale gain in dB, length `M`.
    pub large_scale_db: Option<Vec<f64>>,
    pub seed: u64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        Dims::new(
            self.dims.snapshots,
            self.dims.subcarriers,
            self.dims.antennas,
        )?;
        if let ChannelModel::Rician { k_factor, .. } = self.model {
            if !(k_factor.is_finite() && k_factor >= 0.0) {
                return Err(Error::invalid(alloc::format!(
                    "Rician K-factor must be finite and non-negative, got {k_factor}"
                )));
            }
        }
        if let ChannelModel::Constant(v) = self.model {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::invalid("constant channel value must be finite"));
            }
        }
        if let Some(g) = &self.large_scale_db {
            if g.len() != self.dims.antennas {
                return Err(Error::LengthMismatch {
                    what: "large-scale gains",
                    expected: self.dims.antennas,
                    actual: g.len(),
                });
            }
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("large-scale gains must be finite"));
            }
        }
        Ok(())
    }
}

fn round_f32(c: Complex) -> Complex {
    Complex::new(c.re as f32 as f64, c.im as f32 as f64)
}

/// Fills a tensor snapshot by snapshot; `fill(rng, snapshot_samples)` sees `F·M` slots.
fn generate<F>(dims: Dims, seed: u64, fill: F) -> ChannelTensor
where
    F: Fn(&mut rand_chacha::ChaCha8Rng, &mut [Complex]) + Sync + Send,
{
    let mut samples = alloc::vec![Complex::new(0.0, 0.0); dims.len()];
    par::for_each_chunk(
        &mut samples,
        dims.subcarriers * dims.antennas,
        |n, chunk| {
            let mut r = rng::stream(seed, n as u64);
            fill(&mut r, chunk);
            chunk.iter_mut().for_each(|c| *c = round_f32(*c));
        },
    );
    ChannelTensor::new(dims, samples).expect("generated samples are finite")
}

/// i.i.d. `CN(0, 1)` samples.
pub fn gen_iid_rayleigh(dims: Dims, seed: u64) -> ChannelTensor {
    generate(dims, seed, |r, out| {
        out.iter_mut().for_each(|c| *c = rng::complex_normal(r));
    })
}

/// `h = sqrt(K/(K+1))·a(θ, φ) + sqrt(1/(K+1))·w` with `w` i.i.d. `CN(0, 1)`.
///
/// With `K = 0` the output equals [`gen_iid_rayleigh`] for the same seed.
pub fn gen_rician(config: &SynthConfig, geometry: &ArrayGeometry) -> Result<ChannelTensor> {
    config.validate()?;
    let ChannelModel::Rician {
        k_factor,
        azimuth_rad,
        elevation_rad,
    } = config.model
    else {
        return Err(Error::invalid("gen_rician needs a Rician model"));
    };
    if geometry.len() != config.dims.antennas {
        return Err(Error::LengthMismatch {
            what: "array elements",
            expected: config.dims.antennas,
            actual: geometry.len(),
        });
    }
    let los = math::sqrt(k_factor / (k_factor + 1.0));
    let nlos = math::sqrt(1.0 / (k_factor + 1.0));
    let a = steering_vector(geometry, azimuth_rad, elevation_rad);
    let m = config.dims.antennas;
    Ok(generate(config.dims, config.seed, |r, out| {
        for (i, c) in out.iter_mut().enumerate() {
            *c = a[i % m] * los + rng::complex_normal(r) * nlos;
        }
    }))
}

/// Scales antenna `m` by `10^(gains_db[m]/20)`.
pub fn apply_large_scale(tensor: &ChannelTensor, gains_db: &[f64]) -> Result<ChannelTensor> {
    let m = tensor.dims().antennas;
    if gains_db.len() != m {
        return Err(Error::LengthMismatch {
            what: "large-scale gains",
            expected: m,
            actual: gains_db.len(),
        });
    }
    let amps: Vec<f64> = gains_db.iter().map(|g| math::amp_from_db(*g)).collect();
    let samples = tensor
        .samples()
        .iter()
        .enumerate()
        .map(|(i, c)| c * amps[i % m])
        .collect();
    tensor.with_samples(samples)
}

/// Generates the tensor described by `config`. Rician models need `geometry`.
pub fn synthesize(config: &SynthConfig, geometry: Option<&ArrayGeometry>) -> Result<ChannelTensor> {
    config.validate()?;
    let small = match config.model {
        ChannelModel::IidRayleigh => gen_iid_rayleigh(config.dims, config.seed),
        ChannelModel::Rician { .. } => {
            let g = geometry
                .ok_or_else(|| Error::invalid("Rician model requires an array geometry"))?;
            gen_rician(config, g)?
        }
        ChannelModel::Constant(v) => ChannelTensor::constant(config.dims, round_f32(v))?,
    };
    match &config.large_scale_db {
        None => Ok(small),
        Some(g) => {
            let scaled = apply_large_scale(&small, g)?;
            let rounded = scaled.samples().iter().map(|c| round_f32(*c)).collect();
            scaled.with_samples(rounded)
        }
    }
}
