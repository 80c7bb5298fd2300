//! SRD860 short-range-device rules for the narrowband uplink: effective radiated
//! power, duty cycle, occupied bandwidth and the reduced LTE-style frame.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{math, Error, Result};

/// dBi → dBd offset of a half-wave dipole.
pub const DIPOLE_GAIN_DBI: f64 = 2.15;

/// One hour, the regulatory observation window.
pub const OBSERVATION_WINDOW_S: f64 = 3600.0;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SrdBand {
    pub band_id: String,
    pub f_low_hz: f64,
    pub f_high_hz: f64,
    pub max_erp_dbm: f64,
    pub max_duty_cycle: f64,
}

impl SrdBand {
    /// Band 54: 869.40–869.65 MHz, 500 mW (27 dBm) ERP, 10 % duty cycle.
    pub fn band_54() -> Self {
        SrdBand {
            band_id: "54".to_string(),
            f_low_hz: 869.40e6,
            f_high_hz: 869.65e6,
            max_erp_dbm: 27.0,
            max_duty_cycle: 0.10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_low_hz.is_finite()
            && self.f_high_hz.is_finite()
            && self.f_low_hz < self.f_high_hz)
        {
            return Err(Error::invalid(alloc::format!(
                "band {}: f_low must be below f_high",
                self.band_id
            )));
        }
        if !self.max_erp_dbm.is_finite() {
            return Err(Error::invalid(alloc::format!(
                "band {}: max ERP must be finite",
                self.band_id
            )));
        }
        if !(self.max_duty_cycle > 0.0 && self.max_duty_cycle <= 1.0) {
            return Err(Error::invalid(alloc::format!(
                "band {}: duty cycle limit must be in (0, 1], got {}",
                self.band_id,
                self.max_duty_cycle
            )));
        }
        Ok(())
    }
}

/// Built-in band table.
pub fn builtin_bands() -> Vec<SrdBand> {
    alloc::vec![SrdBand::band_54()]
}

/// `ERP = P_in + (G_dBi − 2.15)`.
pub fn erp_dbm(p_in_dbm: f64, antenna_gain_dbi: f64) -> f64 {
    p_in_dbm + (antenna_gain_dbi - DIPOLE_GAIN_DBI)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OnInterval {
    pub start_s: f64,
    pub duration_s: f64,
}

impl OnInterval {
    pub fn new(start_s: f64, duration_s: f64) -> Self {
        OnInterval {
            start_s,
            duration_s,
        }
    }

    fn end_s(&self) -> f64 {
        self.start_s + self.duration_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DutyCycle {
    pub fraction: f64,
    /// Set when overlapping intervals had to be merged.
    pub merged_overlaps: bool,
}

/// Sorted, merged `[start, end)` intervals; touching intervals are joined too.
fn merge(intervals: &[OnInterval]) -> Result<(Vec<(f64, f64)>, bool)> {
    for iv in intervals {
        if !(iv.start_s.is_finite() && iv.duration_s.is_finite()) || iv.duration_s < 0.0 {
            return Err(Error::invalid(alloc::format!(
                "on-interval needs finite start and non-negative duration, got ({}, {})",
                iv.start_s,
                iv.duration_s
            )));
        }
    }
    let mut spans: Vec<(f64, f64)> = intervals
        .iter()
        .filter(|iv| iv.duration_s > 0.0)
        .map(|iv| (iv.start_s, iv.end_s()))
        .collect();
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(spans.len());
    let mut overlapped = false;
    for (s, e) in spans {
        match out.last_mut() {
            Some(last) if s <= last.1 => {
                if s < last.1 {
                    overlapped = true;
                }
                last.1 = last.1.max(e);
            }
            _ => out.push((s, e)),
        }
    }
    Ok((out, overlapped))
}

/// Largest on-time inside any window `[t, t + window)` over merged spans.
fn max_window_on_time(spans: &[(f64, f64)], window: f64) -> f64 {
    if spans.is_empty() {
        return 0.0;
    }
    let mut prefix = Vec::with_capacity(spans.len() + 1);
    prefix.push(0.0);
    for (s, e) in spans {
        prefix.push(prefix.last().unwrap() + (e - s));
    }
    // on-time in (-inf, t]
    let cumulative = |t: f64| -> f64 {
        let idx = spans.partition_point(|(s, _)| *s <= t);
        if idx == 0 {
            return 0.0;
        }
        let (s, e) = spans[idx - 1];
        prefix[idx - 1] + (t.min(e) - s)
    };
    // The coverage is piecewise linear in t; its maximum sits where the window
    // starts on a span start or ends on a span end.
    spans
        .iter()
        .flat_map(|&(s, e)| [s, e - window])
        .map(|t| cumulative(t + window) - cumulative(t))
        .fold(0.0, f64::max)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::invalid(alloc::format!(
            "{name} must be positive, got {v}"
        )));
    }
    Ok(())
}

/// Maximum fraction of on-time over all sliding windows of `observation_window_s`.
/// Overlapping intervals are merged and flagged.
pub fn duty_cycle(on_intervals: &[OnInterval], observation_window_s: f64) -> Result<DutyCycle> {
    check_positive("observation window", observation_window_s)?;
    let (spans, merged_overlaps) = merge(on_intervals)?;
    let on = max_window_on_time(&spans, observation_window_s);
    Ok(DutyCycle {
        fraction: (on / observation_window_s).min(1.0),
        merged_overlaps,
    })
}

/// Duty cycle of a schedule that repeats every `period_s`.
///
/// `on_intervals` are folded into `[0, period_s)`. A window of `q` whole periods
/// plus a remainder `r` holds `q` periods of on-time plus the busiest stretch of
/// length `r`, so long windows are evaluated without unrolling.
pub fn periodic_duty_cycle(
    on_intervals: &[OnInterval],
    period_s: f64,
    observation_window_s: f64,
) -> Result<DutyCycle> {
    check_positive("period", period_s)?;
    check_positive("observation window", observation_window_s)?;
    let (spans, mut merged_overlaps) = merge(on_intervals)?;
    let mut folded: Vec<OnInterval> = Vec::new();
    for (s, e) in spans {
        if e - s >= period_s {
            return Ok(DutyCycle {
                fraction: 1.0,
                merged_overlaps,
            });
        }
        let s0 = s - math::floor(s / period_s) * period_s;
        let e0 = s0 + (e - s);
        if e0 <= period_s {
            folded.push(OnInterval::new(s0, e0 - s0));
        } else {
            folded.push(OnInterval::new(s0, period_s - s0));
            folded.push(OnInterval::new(0.0, e0 - period_s));
        }
    }
    let (one, overlap) = merge(&folded)?;
    merged_overlaps |= overlap;
    let on_per_period: f64 = one.iter().map(|(s, e)| e - s).sum();

    let ratio = observation_window_s / period_s;
    let q = math::floor(ratio + 1e-9);
    let rem = (observation_window_s - q * period_s).max(0.0);
    let partial = if rem > 1e-12 * period_s {
        // two copies cover every window of length < period
        let two: Vec<(f64, f64)> = one
            .iter()
            .copied()
            .chain(one.iter().map(|(s, e)| (s + period_s, e + period_s)))
            .collect();
        let (two, _) = merge(
            &two.iter()
                .map(|(s, e)| OnInterval::new(*s, e - s))
                .collect::<Vec<_>>(),
        )?;
        max_window_on_time(&two, rem)
    } else {
        0.0
    };
    Ok(DutyCycle {
        fraction: ((q * on_per_period + partial) / observation_window_s).min(1.0),
        merged_overlaps,
    })
}

/// OFDM parameter set. The default is the LTE 20 MHz grid reduced to 13 active
/// subcarriers around the centre.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Numerology {
    pub subcarrier_spacing_hz: f64,
    pub total_subcarriers: usize,
    pub active_subcarriers: usize,
    pub symbol_duration_s: f64,
    pub subframes_per_frame: usize,
    pub slots_per_subframe: usize,
    pub symbols_per_slot: usize,
    pub frame_duration_s: f64,
}

impl Default for Numerology {
    fn default() -> Self {
        Numerology {
            subcarrier_spacing_hz: 15e3,
            total_subcarriers: 1200,
            active_subcarriers: 13,
            // useful symbol time 1/Δf, quoted as 66.67 µs
            symbol_duration_s: 1.0 / 15e3,
            subframes_per_frame: 10,
            slots_per_subframe: 2,
            symbols_per_slot: 7,
            frame_duration_s: 10e-3,
        }
    }
}

impl Numerology {
    pub fn symbols_per_frame(&self) -> usize {
        self.subframes_per_frame * self.slots_per_subframe * self.symbols_per_slot
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("subcarrier spacing", self.subcarrier_spacing_hz)?;
        check_positive("symbol duration", self.symbol_duration_s)?;
        check_positive("frame duration", self.frame_duration_s)?;
        let counts = [
            self.total_subcarriers,
            self.active_subcarriers,
            self.subframes_per_frame,
            self.slots_per_subframe,
            self.symbols_per_slot,
        ];
        if counts.contains(&0) {
            return Err(Error::invalid("numerology counts must be at least 1"));
        }
        if self.active_subcarriers > self.total_subcarriers {
            return Err(Error::invalid(alloc::format!(
                "{} active subcarriers exceed the {} available",
                self.active_subcarriers,
                self.total_subcarriers
            )));
        }
        if self.symbols_per_frame() as f64 * self.symbol_duration_s
            > self.frame_duration_s * (1.0 + 1e-12)
        {
            return Err(Error::invalid("symbols do not fit in the frame duration"));
        }
        Ok(())
    }
}

/// `active_subcarriers × subcarrier_spacing_hz`.
pub fn occupied_bandwidth(numerology: &Numerology) -> f64 {
    numerology.active_subcarriers as f64 * numerology.subcarrier_spacing_hz
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SymbolRole {
    Pilot,
    UplinkData,
    Silent,
}

impl SymbolRole {
    pub fn is_on_air(&self) -> bool {
        !matches!(self, SymbolRole::Silent)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FramePattern {
    /// Pilot on symbol 0, uplink data on symbols 1 and 2, everything else silent.
    UplinkPilotPlusTwo,
    AllSilent,
    /// Pilot on symbol 0, data on every other symbol.
    AllActive,
    /// Explicit `(symbol index, role)` assignments over an all-silent frame.
    Custom(Vec<(usize, SymbolRole)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FramePlan {
    pub symbol_roles: Vec<SymbolRole>,
    pub symbol_duration_s: f64,
    pub frame_duration_s: f64,
}

impl FramePlan {
    /// On-air symbols as intervals within one frame; symbols are packed from t = 0
    /// and the tail of the frame is guard time.
    pub fn on_intervals(&self) -> Vec<OnInterval> {
        self.symbol_roles
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_on_air())
            .map(|(i, _)| {
                OnInterval::new(i as f64 * self.symbol_duration_s, self.symbol_duration_s)
            })
            .collect()
    }

    pub fn active_symbols(&self) -> usize {
        self.symbol_roles.iter().filter(|r| r.is_on_air()).count()
    }

    /// Duty cycle of the frame repeated back to back, over the given window.
    pub fn duty_cycle(&self, observation_window_s: f64) -> Result<f64> {
        Ok(periodic_duty_cycle(
            &self.on_intervals(),
            self.frame_duration_s,
            observation_window_s,
        )?
        .fraction)
    }
}

pub fn build_frame(numerology: &Numerology, pattern: &FramePattern) -> Result<FramePlan> {
    numerology.validate()?;
    let len = numerology.symbols_per_frame();
    let mut roles = alloc::vec![SymbolRole::Silent; len];
    match pattern {
        FramePattern::AllSilent => {}
        FramePattern::UplinkPilotPlusTwo => {
            if len < 3 {
                return Err(Error::invalid(
                    "frame too short for pilot plus two data symbols",
                ));
            }
            roles[0] = SymbolRole::Pilot;
            roles[1] = SymbolRole::UplinkData;
            roles[2] = SymbolRole::UplinkData;
        }
        FramePattern::AllActive => {
            roles.fill(SymbolRole::UplinkData);
            roles[0] = SymbolRole::Pilot;
        }
        FramePattern::Custom(assign) => {
            for &(i, role) in assign {
                if i >= len {
                    return Err(Error::invalid(alloc::format!(
                        "symbol index {i} outside a frame of {len} symbols"
                    )));
                }
                roles[i] = role;
            }
        }
    }
    let has_data = roles.contains(&SymbolRole::UplinkData);
    if has_data && !roles.contains(&SymbolRole::Pilot) {
        return Err(Error::invalid(
            "uplink data requires at least one pilot symbol",
        ));
    }
    Ok(FramePlan {
        symbol_roles: roles,
        symbol_duration_s: numerology.symbol_duration_s,
        frame_duration_s: numerology.frame_duration_s,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplianceReport {
    pub band_id: String,
    pub erp_dbm: f64,
    pub erp_ok: bool,
    /// `max_erp − erp`, positive when compliant.
    pub erp_margin_db: f64,
    pub duty_cycle: f64,
    pub duty_cycle_ok: bool,
    pub duty_cycle_margin: f64,
    pub occupied_hz: f64,
    pub bandwidth_ok: bool,
    /// Smallest distance between an occupied edge and the band edge.
    pub bandwidth_margin_hz: f64,
    pub carrier_in_band: bool,
    pub carrier_margin_hz: f64,
    pub overall: bool,
}

pub fn check_compliance(
    band: &SrdBand,
    carrier_hz: f64,
    numerology: &Numerology,
    frame: &FramePlan,
    p_in_dbm: f64,
    antenna_gain_dbi: f64,
) -> Result<ComplianceReport> {
    band.validate()?;
    numerology.validate()?;
    check_positive("carrier frequency", carrier_hz)?;
    if !(p_in_dbm.is_finite() && antenna_gain_dbi.is_finite()) {
        return Err(Error::invalid(
            "transmit power and antenna gain must be finite",
        ));
    }

    let erp = erp_dbm(p_in_dbm, antenna_gain_dbi);
    let erp_margin_db = band.max_erp_dbm - erp;
    let dc = frame.duty_cycle(OBSERVATION_WINDOW_S)?;
    let duty_cycle_margin = band.max_duty_cycle - dc;
    let occupied_hz = occupied_bandwidth(numerology);
    let lower = carrier_hz - occupied_hz / 2.0;
    let upper = carrier_hz + occupied_hz / 2.0;
    let bandwidth_margin_hz = (lower - band.f_low_hz).min(band.f_high_hz - upper);
    let carrier_margin_hz = (carrier_hz - band.f_low_hz).min(band.f_high_hz - carrier_hz);

    let erp_ok = erp <= band.max_erp_dbm;
    let duty_cycle_ok = dc <= band.max_duty_cycle;
    let bandwidth_ok = lower >= band.f_low_hz && upper <= band.f_high_hz;
    let carrier_in_band = band.f_low_hz <= carrier_hz && carrier_hz <= band.f_high_hz;
    Ok(ComplianceReport {
        band_id: band.band_id.clone(),
        erp_dbm: erp,
        erp_ok,
        erp_margin_db,
        duty_cycle: dc,
        duty_cycle_ok,
        duty_cycle_margin,
        occupied_hz,
        bandwidth_ok,
        bandwidth_margin_hz,
        carrier_in_band,
        carrier_margin_hz,
        overall: erp_ok && duty_cycle_ok && bandwidth_ok && carrier_in_band,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erp_reference_points() {
        assert_eq!(erp_dbm(20.0, 2.15), 20.0);
        assert_eq!(erp_dbm(0.0, 2.15), 0.0);
        assert!((erp_dbm(22.6, 5.9) - 26.35).abs() < 1e-12);
    }

    #[test]
    fn duty_cycle_trivial() {
        assert_eq!(duty_cycle(&[], 3600.0).unwrap().fraction, 0.0);
        let on = duty_cycle(&[OnInterval::new(0.0, 10.0)], 10.0).unwrap();
        assert_eq!(on.fraction, 1.0);
        assert!(!on.merged_overlaps);
        assert_eq!(
            duty_cycle(&[OnInterval::new(0.0, 100.0)], 10.0)
                .unwrap()
                .fraction,
            1.0
        );
    }

    #[test]
    fn duty_cycle_sliding_window_finds_busiest_stretch() {
        // bursts at 0..1 and 5..6, window 6 captures both, window 2 only one
        let ivs = [OnInterval::new(0.0, 1.0), OnInterval::new(5.0, 1.0)];
        assert!((duty_cycle(&ivs, 6.0).unwrap().fraction - 2.0 / 6.0).abs() < 1e-15);
        assert!((duty_cycle(&ivs, 2.0).unwrap().fraction - 0.5).abs() < 1e-15);
        assert!((duty_cycle(&ivs, 5.5).unwrap().fraction - 1.5 / 5.5).abs() < 1e-15);
    }

    #[test]
    fn duty_cycle_overlaps_merged() {
        let dc = duty_cycle(
            &[OnInterval::new(0.0, 2.0), OnInterval::new(1.0, 2.0)],
            10.0,
        )
        .unwrap();
        assert!((dc.fraction - 0.3).abs() < 1e-15);
        assert!(dc.merged_overlaps);
    }

    #[test]
    fn duty_cycle_bad_input() {
        assert!(duty_cycle(&[OnInterval::new(0.0, -1.0)], 1.0).is_err());
        assert!(duty_cycle(&[OnInterval::new(f64::NAN, 1.0)], 1.0).is_err());
        assert!(duty_cycle(&[], 0.0).is_err());
        assert!(periodic_duty_cycle(&[], 0.0, 1.0).is_err());
    }

    #[test]
    fn periodic_three_symbols_per_frame() {
        let t = 1.0 / 15e3;
        let ivs = [OnInterval::new(0.0, 3.0 * t)];
        let dc = periodic_duty_cycle(&ivs, 10e-3, 3600.0).unwrap();
        assert!((dc.fraction - 0.02).abs() < 1e-12);
        // window shorter than a period hits a full burst
        let short = periodic_duty_cycle(&ivs, 10e-3, 3.0 * t).unwrap();
        assert!((short.fraction - 1.0).abs() < 1e-9);
    }

    #[test]
    fn periodic_wraps_intervals() {
        // burst straddling the period boundary
        let dc = periodic_duty_cycle(&[OnInterval::new(9.0, 2.0)], 10.0, 10.0).unwrap();
        assert!((dc.fraction - 0.2).abs() < 1e-15);
        assert_eq!(
            periodic_duty_cycle(&[OnInterval::new(0.0, 10.0)], 10.0, 7.0)
                .unwrap()
                .fraction,
            1.0
        );
    }

    #[test]
    fn bandwidth_values() {
        let num = Numerology::default();
        assert_eq!(occupied_bandwidth(&num), 195_000.0);
        let one = Numerology {
            active_subcarriers: 1,
            ..num.clone()
        };
        assert_eq!(occupied_bandwidth(&one), 15_000.0);
        let full = Numerology {
            active_subcarriers: 1200,
            ..num
        };
        assert_eq!(occupied_bandwidth(&full), 18_000_000.0);
    }

    #[test]
    fn numerology_validation() {
        assert!(Numerology::default().validate().is_ok());
        let bad = Numerology {
            active_subcarriers: 1201,
            ..Numerology::default()
        };
        assert!(bad.validate().is_err());
        let crowded = Numerology {
            symbols_per_slot: 8,
            ..Numerology::default()
        };
        assert!(crowded.validate().is_err());
    }

    #[test]
    fn frames() {
        let num = Numerology::default();
        let f = build_frame(&num, &FramePattern::UplinkPilotPlusTwo).unwrap();
        assert_eq!(f.symbol_roles.len(), 140);
        assert_eq!(f.symbol_roles[0], SymbolRole::Pilot);
        assert_eq!(f.active_symbols(), 3);
        assert!((f.duty_cycle(OBSERVATION_WINDOW_S).unwrap() - 0.02).abs() < 1e-12);

        let silent = build_frame(&num, &FramePattern::AllSilent).unwrap();
        assert_eq!(silent.duty_cycle(OBSERVATION_WINDOW_S).unwrap(), 0.0);

        let active = build_frame(&num, &FramePattern::AllActive).unwrap();
        let dc = active.duty_cycle(OBSERVATION_WINDOW_S).unwrap();
        assert!((dc - 140.0 / 15e3 / 10e-3).abs() < 1e-12);
        assert!((dc - 0.9333).abs() < 1e-4);

        assert!(build_frame(
            &num,
            &FramePattern::Custom(alloc::vec![(140, SymbolRole::Pilot)])
        )
        .is_err());
        assert!(build_frame(
            &num,
            &FramePattern::Custom(alloc::vec![(3, SymbolRole::UplinkData)])
        )
        .is_err());
        let custom = build_frame(
            &num,
            &FramePattern::Custom(alloc::vec![
                (7, SymbolRole::Pilot),
                (8, SymbolRole::UplinkData)
            ]),
        )
        .unwrap();
        assert_eq!(custom.on_intervals()[0].start_s, 7.0 / 15e3);
    }

    #[test]
    fn compliance_default_setup_and_failures() {
        let band = SrdBand::band_54();
        let num = Numerology::default();
        let frame = build_frame(&num, &FramePattern::UplinkPilotPlusTwo).unwrap();
        let r = check_compliance(&band, 869.525e6, &num, &frame, 22.6, 5.9).unwrap();
        assert!(r.overall);
        assert!((r.erp_margin_db - 0.65).abs() < 1e-9);
        assert!((r.bandwidth_margin_hz - 27_500.0).abs() < 1e-3);

        let hot = check_compliance(&band, 869.525e6, &num, &frame, 28.0, 5.9).unwrap();
        assert!(!hot.erp_ok && !hot.overall);
        // 28 + (5.9 − 2.15) = 31.75 dBm against a 27 dBm limit
        assert!((hot.erp_margin_db + 4.75).abs() < 1e-9);

        let edge = check_compliance(&band, 869.60e6, &num, &frame, 22.6, 5.9).unwrap();
        assert!(!edge.bandwidth_ok && edge.carrier_in_band && !edge.overall);

        let out = check_compliance(&band, 870.0e6, &num, &frame, 22.6, 5.9).unwrap();
        assert!(!out.carrier_in_band && out.carrier_margin_hz < 0.0);

        let busy = build_frame(&num, &FramePattern::AllActive).unwrap();
        let r = check_compliance(&band, 869.525e6, &num, &busy, 22.6, 5.9).unwrap();
        assert!(!r.duty_cycle_ok && !r.overall && r.erp_ok && r.bandwidth_ok);
    }

    #[test]
    fn band_validation() {
        assert!(SrdBand::band_54().validate().is_ok());
        let mut b = SrdBand::band_54();
        b.f_low_hz = b.f_high_hz;
        assert!(b.validate().is_err());
        let mut b = SrdBand::band_54();
        b.max_duty_cycle = 0.0;
        assert!(b.validate().is_err());
    }
}
