//! Uplink link-level simulation for a single node: post-combining SNR per snapshot,
//! empirical outage and the transmit power needed for a target outage.
//!
//! Noise is a power over the occupied bandwidth (dBm). Combining assumes perfect
//! CSI unless the least-squares path is used explicitly.

use alloc::vec::Vec;

use crate::tensor::{check_m_selected, ChannelTensor};
use crate::{math, metrics, par, rng, Complex, Error, Result};

/// Thermal noise density at room temperature.
pub const THERMAL_NOISE_DBM_HZ: f64 = -174.0;

/// `N₀ = −174 dBm/Hz + 10·log10(BW) + NF`.
pub fn noise_power_dbm(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    THERMAL_NOISE_DBM_HZ + math::pow_db(bandwidth_hz) + noise_figure_db
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub target_snr_db: f64,
    pub target_outage: f64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        if !(self.tx_power_dbm.is_finite()
            && self.noise_power_dbm.is_finite()
            && self.target_snr_db.is_finite())
        {
            return Err(Error::invalid("link budget powers must be finite"));
        }
        check_outage(self.target_outage)
    }
}

fn check_outage(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(alloc::format!(
            "target outage must be in (0, 1), got {p}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combiner {
    SingleAntenna(usize),
    /// Maximal-ratio combining over the first `m` antennas.
    Mrc(usize),
}

impl Combiner {
    pub fn label(&self) -> alloc::string::String {
        match self {
            Combiner::SingleAntenna(i) => alloc::format!("single:{i}"),
            Combiner::Mrc(m) => alloc::format!("mrc:{m}"),
        }
    }

    pub fn m_selected(&self) -> usize {
        match *self {
            Combiner::SingleAntenna(_) => 1,
            Combiner::Mrc(m) => m,
        }
    }

    fn antennas(&self, available: usize) -> Result<core::ops::Range<usize>> {
        match *self {
            Combiner::SingleAntenna(i) if i < available => Ok(i..i + 1),
            Combiner::SingleAntenna(i) => Err(Error::invalid(alloc::format!(
                "antenna index {i} outside [0, {available})"
            ))),
            Combiner::Mrc(m) => {
                check_m_selected(m, available)?;
                Ok(0..m)
            }
        }
    }
}

impl core::str::FromStr for Combiner {
    type Err = Error;

    /// `single:<index>` or `mrc:<m>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::invalid(alloc::format!(
                "bad combiner '{s}', expected single:<index> or mrc:<m>"
            ))
        };
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        let v: usize = arg.trim().parse().map_err(|_| bad())?;
        match kind.to_ascii_lowercase().as_str() {
            "single" => Ok(Combiner::SingleAntenna(v)),
            "mrc" => Ok(Combiner::Mrc(v)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnrSeries {
    pub snr_db: Vec<f64>,
    pub combiner: Combiner,
    pub m_selected: usize,
}

impl SnrSeries {
    pub fn len(&self) -> usize {
        self.snr_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snr_db.is_empty()
    }
}

fn snr_db(power_gain: f64, tx_power_dbm: f64, noise_power_dbm: f64) -> f64 {
    tx_power_dbm - noise_power_dbm + math::pow_db(power_gain)
}

/// Post-MRC SNR `P − N₀ + 10·log10(‖h‖²)`.
pub fn mrc_snr(h: &[Complex], tx_power_dbm: f64, noise_power_dbm: f64) -> Result<f64> {
    let p: f64 = h.iter().map(|x| x.norm_sqr()).sum();
    if !(p > 0.0) {
        return Err(Error::ZeroPower("MRC SNR of a zero channel vector"));
    }
    Ok(snr_db(p, tx_power_dbm, noise_power_dbm))
}

/// Subcarrier-averaged combined channel power per snapshot, linear.
pub fn channel_power_series(tensor: &ChannelTensor, combiner: Combiner) -> Result<Vec<f64>> {
    let dims = tensor.dims();
    let range = combiner.antennas(dims.antennas)?;
    let mut out = Vec::with_capacity(dims.snapshots);
    for n in 0..dims.snapshots {
        let p: f64 = (0..dims.subcarriers)
            .map(|f| {
                tensor.vector(n, f)[range.clone()]
                    .iter()
                    .map(|h| h.norm_sqr())
                    .sum::<f64>()
            })
            .sum::<f64>()
            / dims.subcarriers as f64;
        if !(p > 0.0) {
            return Err(Error::ZeroPowerSnapshot { snapshot: n });
        }
        out.push(p);
    }
    Ok(out)
}

pub fn simulate_uplink(
    tensor: &ChannelTensor,
    budget: &LinkBudget,
    combiner: Combiner,
) -> Result<SnrSeries> {
    budget.validate()?;
    let snr = channel_power_series(tensor, combiner)?
        .into_iter()
        .map(|p| snr_db(p, budget.tx_power_dbm, budget.noise_power_dbm))
        .collect();
    Ok(SnrSeries {
        snr_db: snr,
        combiner,
        m_selected: combiner.m_selected(),
    })
}

/// Least-squares estimate `ĥ = y / p` for one pilot observation per entry.
pub fn estimate_channel_ls(rx_pilots: &[Complex], pilot: Complex) -> Result<Vec<Complex>> {
    if pilot.norm_sqr() == 0.0 {
        return Err(Error::invalid("pilot symbol must be nonzero"));
    }
    Ok(rx_pilots.iter().map(|y| y / pilot).collect())
}

/// Like [`simulate_uplink`] but combining with LS channel estimates.
///
/// For each `(n, f)` the receiver observes `y = sqrt(P)·h·p + w`, `w ~ CN(0, N₀)`,
/// estimates `ĥ` and combines with it; the SNR is
/// `P·|ĥᴴh|² / (N₀·‖ĥ‖²)` averaged over subcarriers. Noise draws use one stream per
/// snapshot keyed by `(seed, n)`.
pub fn simulate_uplink_ls(
    tensor: &ChannelTensor,
    budget: &LinkBudget,
    combiner: Combiner,
    pilot: Complex,
    seed: u64,
) -> Result<SnrSeries> {
    budget.validate()?;
    if pilot.norm_sqr() == 0.0 {
        return Err(Error::invalid("pilot symbol must be nonzero"));
    }
    let dims = tensor.dims();
    let range = combiner.antennas(dims.antennas)?;
    let p_lin = libm::pow(10.0, budget.tx_power_dbm / 10.0);
    let n0_lin = libm::pow(10.0, budget.noise_power_dbm / 10.0);
    let amp = math::sqrt(p_lin);
    let noise_amp = math::sqrt(n0_lin);

    let gains: Vec<Result<f64>> = par::map_indexed(dims.snapshots, |n| {
        let mut r = rng::stream(seed, n as u64);
        let mut acc = 0.0;
        for f in 0..dims.subcarriers {
            let h = &tensor.vector(n, f)[range.clone()];
            let y: Vec<Complex> = h
                .iter()
                .map(|x| x * pilot * amp + rng::complex_normal(&mut r) * noise_amp)
                .collect();
            let est: Vec<Complex> = estimate_channel_ls(&y, pilot * amp)?;
            let inner: Complex = est.iter().zip(h).map(|(e, x)| e.conj() * x).sum();
            let est_pow: f64 = est.iter().map(|e| e.norm_sqr()).sum();
            if est_pow > 0.0 {
                acc += inner.norm_sqr() / est_pow;
            }
        }
        let g = acc / dims.subcarriers as f64;
        if g > 0.0 {
            Ok(g)
        } else {
            Err(Error::ZeroPowerSnapshot { snapshot: n })
        }
    });
    let snr = gains
        .into_iter()
        .map(|g| g.map(|g| snr_db(g, budget.tx_power_dbm, budget.noise_power_dbm)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SnrSeries {
        snr_db: snr,
        combiner,
        m_selected: combiner.m_selected(),
    })
}

/// Fraction of snapshots with SNR strictly below `target_snr_db`.
pub fn outage_probability(series: &SnrSeries, target_snr_db: f64) -> f64 {
    if series.is_empty() {
        return 0.0;
    }
    let below = series.snr_db.iter().filter(|&&s| s < target_snr_db).count();
    below as f64 / series.len() as f64
}

/// Smallest transmit power (dBm) whose empirical outage is at most `target_outage`.
///
/// With `k = ⌊ε·N⌋` snapshots allowed below target, the answer is
/// `S + N₀ − G₍ₖ₎` where `G₍ₖ₎` is the `k`-th smallest channel gain in dB.
pub fn required_tx_power(
    tensor: &ChannelTensor,
    noise_power_dbm: f64,
    combiner: Combiner,
    target_snr_db: f64,
    target_outage: f64,
) -> Result<f64> {
    check_outage(target_outage)?;
    if !(noise_power_dbm.is_finite() && target_snr_db.is_finite()) {
        return Err(Error::invalid("noise power and target SNR must be finite"));
    }
    let mut gains_db: Vec<f64> = channel_power_series(tensor, combiner)?
        .into_iter()
        .map(math::pow_db)
        .collect();
    gains_db.sort_by(f64::total_cmp);
    let n = gains_db.len();
    let k = (math::floor(target_outage * n as f64 + 1e-9) as usize).min(n - 1);
    Ok(target_snr_db + noise_power_dbm - gains_db[k])
}

/// `10·log10` of the mean linear combined power over snapshots and subcarriers.
///
/// Averaging happens before the logarithm, as for the per-antenna gain; the mean
/// of [`metrics::combined_gain_series`] itself is biased low under fading.
pub fn mean_combined_gain_db(tensor: &ChannelTensor, m_selected: usize) -> Result<f64> {
    let p = metrics::norm_sqr_series(tensor, m_selected)?;
    let avg = p.iter().sum::<f64>() / p.len() as f64;
    if !(avg > 0.0) {
        return Err(Error::ZeroPower("combined gain of an all-zero channel"));
    }
    Ok(math::pow_db(avg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Dims;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn budget() -> LinkBudget {
        LinkBudget {
            tx_power_dbm: 0.0,
            noise_power_dbm: -100.0,
            target_snr_db: 10.0,
            target_outage: 0.01,
        }
    }

    #[test]
    fn mrc_snr_examples() {
        assert_eq!(mrc_snr(&[c(1.0, 0.0)], 0.0, -100.0).unwrap(), 100.0);
        let single = mrc_snr(&[c(1.0, 0.0)], 3.0, -90.0).unwrap();
        let all = mrc_snr(&[c(1.0, 0.0); 32], 3.0, -90.0).unwrap();
        assert!((all - single - 15.051499783199061).abs() < 1e-12);
        assert!(mrc_snr(&[c(0.0, 0.0)], 0.0, 0.0).is_err());
    }

    #[test]
    fn noise_helper() {
        assert!((noise_power_dbm(195e3, 0.0) - (-174.0 + 52.900_346_113_625_18)).abs() < 1e-9);
        assert_eq!(noise_power_dbm(1.0, 5.0), -169.0);
    }

    #[test]
    fn constant_offset_between_combiners() {
        let t = ChannelTensor::constant(Dims::new(5, 2, 32).unwrap(), c(1.0, 0.0)).unwrap();
        let mrc = simulate_uplink(&t, &budget(), Combiner::Mrc(32)).unwrap();
        let one = simulate_uplink(&t, &budget(), Combiner::SingleAntenna(0)).unwrap();
        for (a, b) in mrc.snr_db.iter().zip(&one.snr_db) {
            assert!((a - b - 15.051499783199061).abs() < 1e-12);
        }
        assert_eq!(
            simulate_uplink(&t, &budget(), Combiner::Mrc(1))
                .unwrap()
                .snr_db,
            one.snr_db
        );
    }

    #[test]
    fn invalid_combiners() {
        let t = ChannelTensor::constant(Dims::new(2, 1, 4).unwrap(), c(1.0, 0.0)).unwrap();
        assert!(simulate_uplink(&t, &budget(), Combiner::SingleAntenna(4)).is_err());
        assert!(simulate_uplink(&t, &budget(), Combiner::Mrc(0)).is_err());
        assert!(simulate_uplink(&t, &budget(), Combiner::Mrc(5)).is_err());
        let mut b = budget();
        b.target_outage = 1.0;
        assert!(simulate_uplink(&t, &b, Combiner::Mrc(1)).is_err());
    }

    #[test]
    fn combiner_parse() {
        assert_eq!("mrc:32".parse::<Combiner>().unwrap(), Combiner::Mrc(32));
        assert_eq!(
            "single:3".parse::<Combiner>().unwrap(),
            Combiner::SingleAntenna(3)
        );
        assert!("sum:3".parse::<Combiner>().is_err());
        assert!("mrc".parse::<Combiner>().is_err());
    }

    #[test]
    fn outage_extremes() {
        let s = SnrSeries {
            snr_db: alloc::vec![5.0, 6.0, 7.0],
            combiner: Combiner::Mrc(1),
            m_selected: 1,
        };
        assert_eq!(outage_probability(&s, 4.0), 0.0);
        assert_eq!(outage_probability(&s, 8.0), 1.0);
        assert!((outage_probability(&s, 6.5) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn required_power_deterministic_channel() {
        let t = ChannelTensor::constant(Dims::new(10, 1, 1).unwrap(), c(1.0, 0.0)).unwrap();
        for eps in [0.01, 0.5, 0.99] {
            let p = required_tx_power(&t, -120.0, Combiner::SingleAntenna(0), 7.5, eps).unwrap();
            assert_eq!(p, 7.5 + -120.0);
        }
        assert!(required_tx_power(&t, -120.0, Combiner::SingleAntenna(0), 7.5, 0.0).is_err());
        let zero = ChannelTensor::constant(Dims::new(3, 1, 1).unwrap(), c(0.0, 0.0)).unwrap();
        assert!(required_tx_power(&zero, -120.0, Combiner::SingleAntenna(0), 7.5, 0.1).is_err());
    }

    #[test]
    fn required_power_meets_outage() {
        let dims = Dims::new(100, 1, 1).unwrap();
        let t = ChannelTensor::from_fn(dims, |n, _, _| c(0.1 + n as f64 * 0.01, 0.0)).unwrap();
        let p = required_tx_power(&t, -100.0, Combiner::SingleAntenna(0), 10.0, 0.05).unwrap();
        let b = LinkBudget {
            tx_power_dbm: p,
            ..budget()
        };
        let s = simulate_uplink(&t, &b, Combiner::SingleAntenna(0)).unwrap();
        assert!(outage_probability(&s, 10.0) <= 0.05);
        let lower = LinkBudget {
            tx_power_dbm: p - 0.01,
            ..b
        };
        let s = simulate_uplink(&t, &lower, Combiner::SingleAntenna(0)).unwrap();
        assert!(outage_probability(&s, 10.0) > 0.05);
    }

    #[test]
    fn ls_estimation_basics() {
        let h = [c(0.5, -1.0), c(2.0, 0.25)];
        let p = c(0.0, 1.0);
        let y: Vec<Complex> = h.iter().map(|x| x * p).collect();
        assert_eq!(estimate_channel_ls(&y, p).unwrap(), h.to_vec());
        let w = [c(0.1, 0.1), c(-0.2, 0.0)];
        let y: Vec<Complex> = h.iter().zip(&w).map(|(a, b)| a + b).collect();
        let est = estimate_channel_ls(&y, c(1.0, 0.0)).unwrap();
        for ((e, a), b) in est.iter().zip(&h).zip(&w) {
            assert_eq!(*e, a + b);
        }
        assert!(estimate_channel_ls(&y, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn ls_simulation_approaches_perfect_at_high_snr() {
        let t = ChannelTensor::constant(Dims::new(20, 2, 8).unwrap(), c(1.0, 0.0)).unwrap();
        let b = LinkBudget {
            tx_power_dbm: 30.0,
            ..budget()
        };
        let perfect = simulate_uplink(&t, &b, Combiner::Mrc(8)).unwrap();
        let ls = simulate_uplink_ls(&t, &b, Combiner::Mrc(8), c(1.0, 0.0), 1).unwrap();
        for (a, e) in perfect.snr_db.iter().zip(&ls.snr_db) {
            assert!(e <= &(a + 1e-9));
            assert!(a - e < 1e-6);
        }
        assert_eq!(
            ls,
            simulate_uplink_ls(&t, &b, Combiner::Mrc(8), c(1.0, 0.0), 1).unwrap()
        );
    }
}
