//! Planar patch arrays with half-wavelength pitch.
//!
//! Coordinates: element 0 sits at the origin, `x` runs along a row in increasing
//! antenna index, `z` points up and the array faces `+y`. Seen from the front this
//! numbers elements right to left and bottom to top, so element `i` of a URA with
//! `cols` columns is at row `i / cols`, column `i % cols`.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{math, Complex, Error, Result};

pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Gain of the in-house patch element.
pub const PATCH_GAIN_DBI: f64 = 5.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Layout {
    Ula { cols: usize },
    Ura { rows: usize, cols: usize },
}

impl Layout {
    pub fn rows(&self) -> usize {
        match *self {
            Layout::Ula { .. } => 1,
            Layout::Ura { rows, .. } => rows,
        }
    }

    pub fn cols(&self) -> usize {
        match *self {
            Layout::Ula { cols } | Layout::Ura { cols, .. } => cols,
        }
    }

    pub fn element_count(&self) -> usize {
        self.rows() * self.cols()
    }

    pub fn label(&self) -> &'static str {
        match self {
            Layout::Ula { .. } => "ULA",
            Layout::Ura { .. } => "URA",
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Layout::Ula { cols } => write!(f, "ula:{cols}"),
            Layout::Ura { rows, cols } => write!(f, "ura:{rows}x{cols}"),
        }
    }
}

/// Parses `ula:<cols>` or `ura:<rows>x<cols>`.
impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::invalid(alloc::format!(
                "bad layout '{s}', expected ula:<cols> or ura:<rows>x<cols>"
            ))
        };
        let (kind, dims) = s.split_once(':').ok_or_else(bad)?;
        match kind.to_ascii_lowercase().as_str() {
            "ula" => Ok(Layout::Ula {
                cols: dims.trim().parse().map_err(|_| bad())?,
            }),
            "ura" => {
                let (r, c) = dims.split_once(['x', 'X']).ok_or_else(bad)?;
                Ok(Layout::Ura {
                    rows: r.trim().parse().map_err(|_| bad())?,
                    cols: c.trim().parse().map_err(|_| bad())?,
                })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    pub layout: Layout,
    /// Element positions in meters, indexed by antenna number.
    pub element_positions: Vec<[f64; 3]>,
    pub wavelength_m: f64,
    pub element_gain_dbi: f64,
}

impl ArrayGeometry {
    pub fn len(&self) -> usize {
        self.element_positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.element_positions.is_empty()
    }

    pub fn spacing_m(&self) -> f64 {
        self.wavelength_m / 2.0
    }

    /// `(row, col)` of antenna `index`.
    pub fn grid_index(&self, index: usize) -> (usize, usize) {
        let cols = self.layout.cols();
        (index / cols, index % cols)
    }

    /// Pairs of antenna indices that are horizontal or vertical grid neighbours.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        let (rows, cols) = (self.layout.rows(), self.layout.cols());
        let mut out = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let i = r * cols + c;
                if c + 1 < cols {
                    out.push((i, i + 1));
                }
                if r + 1 < rows {
                    out.push((i, i + cols));
                }
            }
        }
        out
    }
}

pub fn wavelength_m(carrier_freq_hz: f64) -> Result<f64> {
    if !(carrier_freq_hz.is_finite() && carrier_freq_hz > 0.0) {
        return Err(Error::invalid(alloc::format!(
            "carrier frequency must be positive, got {carrier_freq_hz}"
        )));
    }
    Ok(SPEED_OF_LIGHT_M_S / carrier_freq_hz)
}

pub fn build_array_geometry(
    layout: Layout,
    carrier_freq_hz: f64,
    element_gain_dbi: f64,
) -> Result<ArrayGeometry> {
    let wavelength = wavelength_m(carrier_freq_hz)?;
    if layout.rows() == 0 || layout.cols() == 0 {
        return Err(Error::invalid(alloc::format!(
            "array dimensions must be at least 1, got {layout}"
        )));
    }
    if !element_gain_dbi.is_finite() {
        return Err(Error::invalid("element gain must be finite"));
    }
    let d = wavelength / 2.0;
    let cols = layout.cols();
    let element_positions = (0..layout.element_count())
        .map(|i| [(i % cols) as f64 * d, 0.0, (i / cols) as f64 * d])
        .collect();
    Ok(ArrayGeometry {
        layout,
        element_positions,
        wavelength_m: wavelength,
        element_gain_dbi,
    })
}

/// Unit vector for azimuth (from broadside, in the horizontal plane, towards `+x`)
/// and elevation (above the horizontal plane).
pub fn direction(azimuth_rad: f64, elevation_rad: f64) -> [f64; 3] {
    let (sa, ca) = (libm::sin(azimuth_rad), libm::cos(azimuth_rad));
    let (se, ce) = (libm::sin(elevation_rad), libm::cos(elevation_rad));
    [ce * sa, ce * ca, se]
}

/// Narrowband plane-wave response `exp(j·2π/λ·⟨p_m, u⟩)` for every element.
pub fn steering_vector(
    geometry: &ArrayGeometry,
    azimuth_rad: f64,
    elevation_rad: f64,
) -> Vec<Complex> {
    let u = direction(azimuth_rad, elevation_rad);
    let k = 2.0 * core::f64::consts::PI / geometry.wavelength_m;
    geometry
        .element_positions
        .iter()
        .map(|p| math::cis(k * (p[0] * u[0] + p[1] * u[1] + p[2] * u[2])))
        .collect()
}
