//! Float helpers routed through `libm` so results are identical with and without `std`.

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// Power ratio to decibels, `10·log10(x)`.
pub(crate) fn pow_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}

/// Amplitude factor for a gain in dB, `10^(db/20)`.
pub(crate) fn amp_from_db(db: f64) -> f64 {
    libm::pow(10.0, db / 20.0)
}

pub(crate) fn cis(phase: f64) -> crate::Complex {
    crate::Complex::new(libm::cos(phase), libm::sin(phase))
}

/// Population mean and variance (divide by count), two-pass.
pub(crate) fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}
