//! Channel statistics: averaged per-antenna gain, hardening, normalization,
//! correlation and combined gain over time.
//!
//! Antenna subsets are always the contiguous prefix `0..m` in antenna index order.
//! Variances are population variances over all `N·F` realizations.

use alloc::vec::Vec;

use rand::Rng;

use crate::tensor::{check_m_selected, ChannelTensor, GainProfile, Scenario};
use crate::{math, par, rng, Complex, Error, Result};

/// Entry `m` is `10·log10((1/(N·F)) Σ_{n,f} |h_m(n,f)|²)`.
pub fn avg_gain_per_antenna(tensor: &ChannelTensor) -> Result<GainProfile> {
    let dims = tensor.dims();
    let mut acc = alloc::vec![0.0f64; dims.antennas];
    for v in tensor.vectors() {
        for (a, h) in acc.iter_mut().zip(v) {
            *a += h.norm_sqr();
        }
    }
    let count = dims.realizations() as f64;
    let per_antenna_gain_db = acc
        .iter()
        .enumerate()
        .map(|(m, &p)| {
            if p > 0.0 {
                Ok(math::pow_db(p / count))
            } else {
                Err(Error::ZeroPowerAntenna { antenna: m })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GainProfile {
        per_antenna_gain_db,
        scenario: tensor
            .meta()
            .map(|m| m.scenario)
            .unwrap_or(Scenario::Unknown),
        source_dims: Some(dims),
    })
}

/// Population standard deviation of the per-antenna dB values.
pub fn gain_std_db(profile: &GainProfile) -> Result<f64> {
    if profile.len() < 2 {
        return Err(Error::invalid(alloc::format!(
            "gain standard deviation needs at least 2 antennas, got {}",
            profile.len()
        )));
    }
    let (_, var) = math::mean_var(&profile.per_antenna_gain_db);
    Ok(math::sqrt(var))
}

/// `‖h(n,f)‖²` over the first `m` antennas, in `(n, f)` order.
pub fn norm_sqr_series(tensor: &ChannelTensor, m: usize) -> Result<Vec<f64>> {
    check_m_selected(m, tensor.dims().antennas)?;
    Ok(tensor
        .vectors()
        .map(|v| v[..m].iter().map(|h| h.norm_sqr()).sum())
        .collect())
}

fn ratio_from_series(xs: &[f64]) -> Result<f64> {
    let (mean, var) = math::mean_var(xs);
    if mean <= 0.0 {
        return Err(Error::ZeroPower("hardening ratio of an all-zero channel"));
    }
    Ok(var / (mean * mean))
}

fn check_realizations(tensor: &ChannelTensor) -> Result<()> {
    let k = tensor.dims().realizations();
    if k < 2 {
        return Err(Error::invalid(alloc::format!(
            "hardening needs at least 2 snapshot-subcarrier realizations, got {k}"
        )));
    }
    Ok(())
}

/// `Var(‖h‖²) / E[‖h‖²]²` over the first `m_selected` antennas, with the moments
/// taken over snapshots and subcarriers jointly.
pub fn hardening_ratio(tensor: &ChannelTensor, m_selected: usize) -> Result<f64> {
    check_realizations(tensor)?;
    ratio_from_series(&norm_sqr_series(tensor, m_selected)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardeningPoint {
    pub m_selected: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardeningCurve {
    pub points: Vec<HardeningPoint>,
    pub selection: &'static str,
}

/// Evaluates [`hardening_ratio`] for each entry of `m_list` (sorted, duplicates dropped).
pub fn hardening_curve(tensor: &ChannelTensor, m_list: &[usize]) -> Result<HardeningCurve> {
    check_realizations(tensor)?;
    let ms = sorted_m_list(m_list, tensor.dims().antennas)?;
    // cumulative ‖h‖² per realization, one column per requested m
    let mut cols: Vec<Vec<f64>> = ms
        .iter()
        .map(|_| Vec::with_capacity(tensor.dims().realizations()))
        .collect();
    for v in tensor.vectors() {
        let mut acc = 0.0;
        let mut next = 0;
        for (i, h) in v.iter().enumerate() {
            acc += h.norm_sqr();
            while next < ms.len() && ms[next] == i + 1 {
                cols[next].push(acc);
                next += 1;
            }
        }
    }
    let points = ms
        .iter()
        .zip(&cols)
        .map(|(&m, xs)| {
            Ok(HardeningPoint {
                m_selected: m,
                ratio: ratio_from_series(xs)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HardeningCurve {
        points,
        selection: "contiguous-from-first",
    })
}

fn sorted_m_list(m_list: &[usize], antennas: usize) -> Result<Vec<usize>> {
    if m_list.is_empty() {
        return Err(Error::invalid("antenna count list is empty"));
    }
    for &m in m_list {
        check_m_selected(m, antennas)?;
    }
    let mut ms = m_list.to_vec();
    ms.sort_unstable();
    ms.dedup();
    Ok(ms)
}

/// Divides every sample by `sqrt((1/(N·F·M)) Σ |h|²)`.
pub fn normalize_channels(tensor: &ChannelTensor) -> Result<ChannelTensor> {
    let total: f64 = tensor.samples().iter().map(|h| h.norm_sqr()).sum();
    if !(total > 0.0) {
        return Err(Error::ZeroPower("cannot normalize an all-zero tensor"));
    }
    let scale = 1.0 / math::sqrt(total / tensor.dims().len() as f64);
    tensor.with_samples(tensor.samples().iter().map(|h| h * scale).collect())
}

/// `δ = |⟨h_i, h_j⟩|² / (‖h_i‖²·‖h_j‖²)` with `⟨a, b⟩ = Σ a_k·conj(b_k)`.
///
/// The result lies in `[0, 1]`; scalars always give exactly 1.
pub fn correlation_coefficient(h_i: &[Complex], h_j: &[Complex]) -> Result<f64> {
    if h_i.len() != h_j.len() {
        return Err(Error::LengthMismatch {
            what: "correlation vectors",
            expected: h_i.len(),
            actual: h_j.len(),
        });
    }
    if h_i.is_empty() {
        return Err(Error::invalid("correlation vectors must not be empty"));
    }
    let ni: f64 = h_i.iter().map(|h| h.norm_sqr()).sum();
    let nj: f64 = h_j.iter().map(|h| h.norm_sqr()).sum();
    if !(ni > 0.0 && nj > 0.0) {
        return Err(Error::ZeroPower("correlation with a zero vector"));
    }
    if h_i.len() == 1 {
        return Ok(1.0);
    }
    let inner: Complex = h_i.iter().zip(h_j).map(|(a, b)| a * b.conj()).sum();
    Ok((inner.norm_sqr() / (ni * nj)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationEstimate {
    pub m_selected: usize,
    pub mean_delta: f64,
    pub n_trials: usize,
    pub seed: u64,
}

/// Mean correlation coefficient between random position pairs for each `m` in `m_list`.
///
/// Trial `t` uses its own stream keyed by `(seed, t)` to draw two distinct
/// positions, one snapshot and one subcarrier; every `m` is evaluated on that draw
/// using the first `m` antennas. `positions` must share one shape. The coefficient
/// is scale invariant, so per-position power normalization does not change it and
/// is skipped.
pub fn avg_correlation_vs_m(
    positions: &[ChannelTensor],
    m_list: &[usize],
    n_trials: usize,
    seed: u64,
) -> Result<Vec<CorrelationEstimate>> {
    if positions.len() < 2 {
        return Err(Error::invalid(alloc::format!(
            "correlation needs at least 2 positions, got {}",
            positions.len()
        )));
    }
    if n_trials == 0 {
        return Err(Error::invalid("number of trials must be at least 1"));
    }
    let dims = positions[0].dims();
    if let Some(p) = positions.iter().find(|p| p.dims() != dims) {
        return Err(Error::invalid(alloc::format!(
            "all positions must share one shape, found {} and {}",
            dims,
            p.dims()
        )));
    }
    let ms = sorted_m_list(m_list, dims.antennas)?;

    let per_trial: Vec<Result<Vec<f64>>> = par::map_indexed(n_trials, |t| {
        let mut r = rng::stream(seed, t as u64);
        let i = r.random_range(0..positions.len());
        let mut j = r.random_range(0..positions.len() - 1);
        if j >= i {
            j += 1;
        }
        let n = r.random_range(0..dims.snapshots);
        let f = r.random_range(0..dims.subcarriers);
        let (a, b) = (positions[i].vector(n, f), positions[j].vector(n, f));
        ms.iter()
            .map(|&m| correlation_coefficient(&a[..m], &b[..m]))
            .collect()
    });

    let mut sums = alloc::vec![0.0f64; ms.len()];
    for deltas in per_trial {
        for (s, d) in sums.iter_mut().zip(deltas?) {
            *s += d;
        }
    }
    Ok(ms
        .iter()
        .zip(sums)
        .map(|(&m, s)| CorrelationEstimate {
            m_selected: m,
            mean_delta: s / n_trials as f64,
            n_trials,
            seed,
        })
        .collect())
}

/// Per snapshot `10·log10((1/F) Σ_f ‖h(n,f)‖²)` over the first `m_selected` antennas.
pub fn combined_gain_series(tensor: &ChannelTensor, m_selected: usize) -> Result<Vec<f64>> {
    let dims = tensor.dims();
    let powers = norm_sqr_series(tensor, m_selected)?;
    powers
        .chunks_exact(dims.subcarriers)
        .enumerate()
        .map(|(n, p)| {
            let avg = p.iter().sum::<f64>() / dims.subcarriers as f64;
            if avg > 0.0 {
                Ok(math::pow_db(avg))
            } else {
                Err(Error::ZeroPowerSnapshot { snapshot: n })
            }
        })
        .collect()
}
