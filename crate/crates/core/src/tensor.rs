//! CSI tensors, measurement metadata and per-antenna gain profiles.
//!
//! Samples are complex voltage gains stored row-major as `[n][f][m]`, so the
//! antenna vector for one snapshot and subcarrier is a contiguous slice.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Complex, Error, Result};

/// Shape of a [`ChannelTensor`]: snapshots `N`, subcarriers `F`, antennas `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dims {
    pub snapshots: usize,
    pub subcarriers: usize,
    pub antennas: usize,
}

impl Dims {
    pub fn new(snapshots: usize, subcarriers: usize, antennas: usize) -> Result<Self> {
        if snapshots == 0 || subcarriers == 0 || antennas == 0 {
            return Err(Error::invalid(alloc::format!(
                "tensor dimensions must be at least 1, got N={snapshots}, F={subcarriers}, M={antennas}"
            )));
        }
        snapshots
            .checked_mul(subcarriers)
            .and_then(|x| x.checked_mul(antennas))
            .ok_or_else(|| Error::invalid("tensor dimensions overflow"))?;
        Ok(Dims {
            snapshots,
            subcarriers,
            antennas,
        })
    }

    /// Total number of samples `N·F·M`; never zero.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.snapshots * self.subcarriers * self.antennas
    }

    /// Number of `(n, f)` realizations `N·F`.
    pub fn realizations(&self) -> usize {
        self.snapshots * self.subcarriers
    }

    pub fn offset(&self, n: usize, f: usize, m: usize) -> usize {
        (n * self.subcarriers + f) * self.antennas + m
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{}x{}",
            self.snapshots, self.subcarriers, self.antennas
        )
    }
}

/// Propagation condition of a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Scenario {
    LoS,
    NLoS,
    #[default]
    Unknown,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::LoS => "LoS",
            Scenario::NLoS => "NLoS",
            Scenario::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "los" => Ok(Scenario::LoS),
            "nlos" => Ok(Scenario::NLoS),
            "unknown" | "" => Ok(Scenario::Unknown),
            other => Err(Error::invalid(alloc::format!("unknown scenario '{other}'"))),
        }
    }
}

/// Description of a measurement run, as carried in a dataset header.
///
/// Defaults follow the outdoor campaign setup: 869.525 MHz carrier, two 15 kHz
/// subcarriers, 22.6 dBm coerced transmit power, one node, 10 ms sample interval,
/// 66.67 µs sample duration, base station at 7 m and node at 1.5 m, QPSK.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMeta {
    pub carrier_freq_hz: f64,
    pub n_subcarriers_used: usize,
    pub n_snapshots: usize,
    pub tx_power_dbm: f64,
    pub n_bs_antennas: usize,
    pub n_nodes: usize,
    pub array_label: String,
    pub sample_interval_s: f64,
    pub sample_duration_s: f64,
    pub bs_height_m: f64,
    pub ue_height_m: f64,
    pub modulation: String,
    pub scenario: Scenario,
    pub path_label: Option<String>,
    /// Header entries this crate does not interpret, kept verbatim as JSON text.
    pub extra: BTreeMap<String, String>,
}

impl MeasurementMeta {
    pub const CARRIER_FREQ_HZ: f64 = 869.525e6;
    pub const TX_POWER_DBM: f64 = 22.6;
    pub const SAMPLE_INTERVAL_S: f64 = 10e-3;
    pub const SAMPLE_DURATION_S: f64 = 66.67e-6;

    /// Metadata for a tensor of the given shape with campaign defaults.
    pub fn for_dims(dims: Dims) -> Self {
        MeasurementMeta {
            carrier_freq_hz: Self::CARRIER_FREQ_HZ,
            n_subcarriers_used: dims.subcarriers,
            n_snapshots: dims.snapshots,
            tx_power_dbm: Self::TX_POWER_DBM,
            n_bs_antennas: dims.antennas,
            n_nodes: 1,
            array_label: "ULA".to_string(),
            sample_interval_s: Self::SAMPLE_INTERVAL_S,
            sample_duration_s: Self::SAMPLE_DURATION_S,
            bs_height_m: 7.0,
            ue_height_m: 1.5,
            modulation: "QPSK".to_string(),
            scenario: Scenario::Unknown,
            path_label: None,
            extra: BTreeMap::new(),
        }
    }

    pub fn dims(&self) -> Result<Dims> {
        Dims::new(
            self.n_snapshots,
            self.n_subcarriers_used,
            self.n_bs_antennas,
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.dims()?;
        let positive = [
            ("carrier_freq_hz", self.carrier_freq_hz),
            ("sample_interval_s", self.sample_interval_s),
            ("sample_duration_s", self.sample_duration_s),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(alloc::format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !self.tx_power_dbm.is_finite() {
            return Err(Error::invalid("tx_power_dbm must be finite"));
        }
        if self.n_nodes == 0 {
            return Err(Error::invalid("n_nodes must be at least 1"));
        }
        Ok(())
    }
}

/// Complex CSI samples `h_m(n, f)` with a validated shape.
///
/// Immutable once built; every sample is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTensor {
    dims: Dims,
    samples: Vec<Complex>,
    meta: Option<Arc<MeasurementMeta>>,
}

impl ChannelTensor {
    pub fn new(dims: Dims, samples: Vec<Complex>) -> Result<Self> {
        let dims = Dims::new(dims.snapshots, dims.subcarriers, dims.antennas)?;
        if samples.len() != dims.len() {
            return Err(Error::LengthMismatch {
                what: "tensor samples",
                expected: dims.len(),
                actual: samples.len(),
            });
        }
        if let Some(i) = samples
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            let m = i % dims.antennas;
            let f = (i / dims.antennas) % dims.subcarriers;
            let n = i / (dims.antennas * dims.subcarriers);
            return Err(Error::NonFinite {
                snapshot: n,
                subcarrier: f,
                antenna: m,
            });
        }
        Ok(ChannelTensor {
            dims,
            samples,
            meta: None,
        })
    }

    /// Builds a tensor by evaluating `f(n, f, m)` in row-major order.
    pub fn from_fn(
        dims: Dims,
        mut gen: impl FnMut(usize, usize, usize) -> Complex,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(dims.len());
        for n in 0..dims.snapshots {
            for f in 0..dims.subcarriers {
                for m in 0..dims.antennas {
                    samples.push(gen(n, f, m));
                }
            }
        }
        Self::new(dims, samples)
    }

    /// Tensor with every sample equal to `value`.
    pub fn constant(dims: Dims, value: Complex) -> Result<Self> {
        Self::new(dims, alloc::vec![value; dims.len()])
    }

    pub fn with_meta(mut self, meta: MeasurementMeta) -> Self {
        self.meta = Some(Arc::new(meta));
        self
    }

    pub fn meta(&self) -> Option<&MeasurementMeta> {
        self.meta.as_deref()
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn samples(&self) -> &[Complex] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex> {
        self.samples
    }

    pub fn get(&self, n: usize, f: usize, m: usize) -> Complex {
        self.samples[self.dims.offset(n, f, m)]
    }

    /// Antenna vector `h(n, f)` of length `M`.
    pub fn vector(&self, n: usize, f: usize) -> &[Complex] {
        let start = self.dims.offset(n, f, 0);
        &self.samples[start..start + self.dims.antennas]
    }

    /// All `F·M` samples of snapshot `n`.
    pub fn snapshot(&self, n: usize) -> &[Complex] {
        let len = self.dims.subcarriers * self.dims.antennas;
        &self.samples[n * len..(n + 1) * len]
    }

    /// Iterates antenna vectors in `(n, f)` order.
    pub fn vectors(&self) -> impl Iterator<Item = &[Complex]> + '_ {
        self.samples.chunks_exact(self.dims.antennas)
    }

    /// Keeps only the first `m` antennas.
    pub fn select_antennas(&self, m: usize) -> Result<ChannelTensor> {
        check_m_selected(m, self.dims.antennas)?;
        let dims = Dims::new(self.dims.snapshots, self.dims.subcarriers, m)?;
        let samples = self
            .vectors()
            .flat_map(|v| v[..m].iter().copied())
            .collect();
        Ok(ChannelTensor {
            dims,
            samples,
            meta: self.meta.clone(),
        })
    }

    /// One single-snapshot tensor per snapshot, for treating snapshots as positions.
    pub fn split_snapshots(&self) -> Vec<ChannelTensor> {
        let dims = Dims {
            snapshots: 1,
            ..self.dims
        };
        (0..self.dims.snapshots)
            .map(|n| ChannelTensor {
                dims,
                samples: self.snapshot(n).to_vec(),
                meta: None,
            })
            .collect()
    }

    /// Same shape and metadata, new samples (must keep the length and stay finite).
    pub(crate) fn with_samples(&self, samples: Vec<Complex>) -> Result<ChannelTensor> {
        let mut out = ChannelTensor::new(self.dims, samples)?;
        out.meta = self.meta.clone();
        Ok(out)
    }
}

pub(crate) fn check_m_selected(m: usize, antennas: usize) -> Result<()> {
    if m == 0 || m > antennas {
        return Err(Error::invalid(alloc::format!(
            "selected antenna count {m} outside [1, {antennas}]"
        )));
    }
    Ok(())
}

/// Per-antenna gain in dB, averaged over time and frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct GainProfile {
    pub per_antenna_gain_db: Vec<f64>,
    pub scenario: Scenario,
    pub source_dims: Option<Dims>,
}

impl GainProfile {
    /// Profile from raw dB values, e.g. a transcribed curve.
    pub fn from_db(values: Vec<f64>, scenario: Scenario) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("gain profile must not be empty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("gain profile values must be finite"));
        }
        Ok(GainProfile {
            per_antenna_gain_db: values,
            scenario,
            source_dims: None,
        })
    }

    pub fn len(&self) -> usize {
        self.per_antenna_gain_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_antenna_gain_db.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn zero_dims_rejected() {
        assert!(Dims::new(0, 1, 1).is_err());
        assert!(Dims::new(1, 0, 1).is_err());
        assert!(Dims::new(1, 1, 0).is_err());
    }

    #[test]
    fn wrong_length_rejected() {
        let dims = Dims::new(2, 1, 3).unwrap();
        let err = ChannelTensor::new(dims, alloc::vec![c(1.0, 0.0); 5]).unwrap_err();
        assert_eq!(
            err,
            Error::LengthMismatch {
                what: "tensor samples",
                expected: 6,
                actual: 5
            }
        );
    }

    #[test]
    fn nan_sample_located() {
        let dims = Dims::new(2, 2, 3).unwrap();
        let mut s = alloc::vec![c(1.0, 0.0); 12];
        s[dims.offset(1, 0, 2)] = c(0.0, f64::NAN);
        let err = ChannelTensor::new(dims, s).unwrap_err();
        assert_eq!(
            err,
            Error::NonFinite {
                snapshot: 1,
                subcarrier: 0,
                antenna: 2
            }
        );
    }

    #[test]
    fn indexing_visits_every_sample_once() {
        let dims = Dims::new(3, 2, 4).unwrap();
        let t =
            ChannelTensor::from_fn(dims, |n, f, m| c(dims.offset(n, f, m) as f64, 0.0)).unwrap();
        let mut seen = alloc::vec![0u32; dims.len()];
        for n in 0..3 {
            for f in 0..2 {
                for (m, h) in t.vector(n, f).iter().enumerate() {
                    assert_eq!(*h, t.get(n, f, m));
                    seen[h.re as usize] += 1;
                }
            }
        }
        assert!(seen.iter().all(|&k| k == 1));
        assert_eq!(t.vectors().count(), dims.realizations());
    }

    #[test]
    fn select_and_split() {
        let dims = Dims::new(2, 1, 3).unwrap();
        let t = ChannelTensor::from_fn(dims, |n, _, m| c((10 * n + m) as f64, 0.0)).unwrap();
        let s = t.select_antennas(2).unwrap();
        assert_eq!(
            s.samples(),
            &[c(0.0, 0.0), c(1.0, 0.0), c(10.0, 0.0), c(11.0, 0.0)]
        );
        assert!(t.select_antennas(4).is_err());
        let parts = t.split_snapshots();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[1].samples(), t.snapshot(1));
    }

    #[test]
    fn scenario_parse() {
        assert_eq!("nlos".parse::<Scenario>().unwrap(), Scenario::NLoS);
        assert_eq!("LoS".parse::<Scenario>().unwrap(), Scenario::LoS);
        assert!("indoor".parse::<Scenario>().is_err());
    }

    #[test]
    fn meta_defaults_validate() {
        let meta = MeasurementMeta::for_dims(Dims::new(1000, 2, 32).unwrap());
        meta.validate().unwrap();
        let mut bad = meta.clone();
        bad.sample_interval_s = 0.0;
        assert!(bad.validate().is_err());
        let mut bad = meta;
        bad.n_nodes = 0;
        assert!(bad.validate().is_err());
    }
}
