//! Baseline channels for the spectral-efficiency plots: ideal AWGN and a
//! time-invariant Gaussian filter with AWGN, the latter water-filled over
//! frequency.
//!
//! The Gaussian filter's exact parameterisation is not pinned down by the
//! comparison it serves, so its curve is illustrative. The default power
//! response `|H(f)|^2 = exp(-2 pi f^2 / beta_g^2)` mirrors the heat channel's
//! frequency profile.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::error::{domain, invalid, Result};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::w0::ToleranceConfig;
use crate::waterfill::solve_water_level;

/// `log2(1 + snr)` in bit/s/Hz.
pub fn awgn_spectral_efficiency(snr: f64) -> Result<f64> {
    if !(snr >= 0.0) || snr.is_infinite() {
        return Err(domain(
            "awgn_spectral_efficiency",
            format!("snr must be finite and >= 0, got {snr}"),
        ));
    }
    Ok(snr.ln_1p() / LN_2)
}

/// `snr / log2(1 + snr)`, linear units.
pub fn awgn_ebn0(snr: f64) -> Result<f64> {
    if !(snr > 0.0) || snr.is_infinite() {
        return Err(domain("awgn_ebn0", format!("snr must be finite and > 0, got {snr}")));
    }
    Ok(snr / awgn_spectral_efficiency(snr)?)
}

/// Gaussian filter `|H(f)|^2 = exp(-exponent f^2 / beta_g^2)` with one-sided
/// noise density `n0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianFilterSpec {
    beta_g: f64,
    n0: f64,
    exponent: f64,
}

impl GaussianFilterSpec {
    pub const DEFAULT_EXPONENT: f64 = 2.0 * PI;

    pub fn new(beta_g: f64, n0: f64) -> Result<Self> {
        Self::with_exponent(beta_g, n0, Self::DEFAULT_EXPONENT)
    }

    pub fn with_exponent(beta_g: f64, n0: f64, exponent: f64) -> Result<Self> {
        for (name, v) in [("beta_g", beta_g), ("n0", n0), ("exponent", exponent)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(
                    "gaussian filter",
                    format!("{name} must be finite and > 0, got {v}"),
                ));
            }
        }
        Ok(Self { beta_g, n0, exponent })
    }

    pub fn beta_g(&self) -> f64 {
        self.beta_g
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Plotting bandwidth `beta_g / 2`; SNR is `P / ((beta_g / 2) n0)`.
    pub fn bandwidth(&self) -> f64 {
        0.5 * self.beta_g
    }
}

/// Even power response, nonincreasing in `|f|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterProfile {
    Gaussian {
        beta_g: f64,
        exponent: f64,
    },
    /// `|H|^2 = 1` on `[-half_band, half_band]`, zero outside.
    Flat {
        half_band: f64,
    },
}

impl FilterProfile {
    fn scale(&self) -> f64 {
        match *self {
            FilterProfile::Gaussian { beta_g, .. } => beta_g,
            FilterProfile::Flat { half_band } => half_band,
        }
    }

    /// `1 / |H|^2` at normalized frequency `x = f / scale`.
    fn inverse_gain(&self, x: f64) -> f64 {
        match *self {
            FilterProfile::Gaussian { exponent, .. } => (exponent * x * x).exp(),
            FilterProfile::Flat { .. } => {
                if x.abs() <= 1.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

impl From<&GaussianFilterSpec> for FilterProfile {
    fn from(spec: &GaussianFilterSpec) -> Self {
        FilterProfile::Gaussian {
            beta_g: spec.beta_g,
            exponent: spec.exponent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyWaterfill {
    /// Water level in noise-PSD units (same units as `n0 / 2`).
    pub water_level: f64,
    /// Active band `[lower, upper]` in Hz.
    pub lower: f64,
    pub upper: f64,
    pub capacity_bits_per_s: f64,
}

/// Point where the normalized noise `inverse_gain` crosses `level`, searched
/// along `direction` (+1 or -1) from the origin.
fn band_edge(profile: &FilterProfile, level: f64, direction: f64) -> f64 {
    if profile.inverse_gain(0.0) >= level {
        return 0.0;
    }
    let mut inside = 0.0_f64;
    let mut outside = 1.0_f64;
    while profile.inverse_gain(direction * outside) < level {
        inside = outside;
        outside *= 2.0;
    }
    loop {
        let mid = 0.5 * (inside + outside);
        if mid <= inside || mid >= outside {
            return direction * inside;
        }
        if profile.inverse_gain(direction * mid) < level {
            inside = mid;
        } else {
            outside = mid;
        }
    }
}

/// Water-fill `N(f) = (n0 / 2) / |H(f)|^2` over frequency with total power
/// `power`. Integrals run in normalized frequency `f / scale` and noise
/// units of `n0 / 2`, so `quad`'s absolute tolerance is scale free.
pub fn frequency_waterfill(
    profile: &FilterProfile,
    n0: f64,
    power: f64,
    quad: &QuadratureSpec,
) -> Result<FrequencyWaterfill> {
    if !(power >= 0.0) || power.is_infinite() {
        return Err(domain(
            "frequency_waterfill",
            format!("power must be finite and >= 0, got {power}"),
        ));
    }
    if !(n0 > 0.0 && n0.is_finite()) {
        return Err(invalid("noise density", format!("n0 must be finite and > 0, got {n0}")));
    }
    let scale = profile.scale();
    let half_n0 = 0.5 * n0;
    if power == 0.0 {
        return Ok(FrequencyWaterfill {
            water_level: half_n0 * profile.inverse_gain(0.0),
            lower: 0.0,
            upper: 0.0,
            capacity_bits_per_s: 0.0,
        });
    }

    let target = power / (half_n0 * scale);
    let floor = profile.inverse_gain(0.0);
    let tol = ToleranceConfig::default();
    let power_quad = quad.with_abs_tol(0.01 * tol.rel_tol() * target)?;
    let delivered = |level: f64| -> Result<f64> {
        let lo = band_edge(profile, level, -1.0);
        let hi = band_edge(profile, level, 1.0);
        integrate(|x| (level - profile.inverse_gain(x)).max(0.0), lo, hi, &power_quad).map(|i| i.value)
    };
    // solve for delivered / target = 1 so the tolerance is relative
    let level = solve_water_level(|l| Ok(delivered(l)? / target), floor, 1.0, &tol)?;

    let lo = band_edge(profile, level, -1.0);
    let hi = band_edge(profile, level, 1.0);
    let nats = integrate(|x| 0.5 * (level / profile.inverse_gain(x)).ln().max(0.0), lo, hi, quad)?.value;
    Ok(FrequencyWaterfill {
        water_level: level * half_n0,
        lower: lo * scale,
        upper: hi * scale,
        capacity_bits_per_s: nats / LN_2 * scale,
    })
}

/// Capacity in bit/s of the Gaussian-filter channel at input power `power`.
pub fn gallager_gaussian_capacity(spec: &GaussianFilterSpec, power: f64) -> Result<f64> {
    gallager_gaussian_capacity_with(spec, power, &QuadratureSpec::default())
}

pub fn gallager_gaussian_capacity_with(spec: &GaussianFilterSpec, power: f64, quad: &QuadratureSpec) -> Result<f64> {
    Ok(frequency_waterfill(&FilterProfile::from(spec), spec.n0, power, quad)?.capacity_bits_per_s)
}

/// Gaussian-filter capacity divided by `beta_g / 2` at `snr = P / ((beta_g / 2) n0)`.
pub fn gallager_spectral_efficiency(spec: &GaussianFilterSpec, snr: f64) -> Result<f64> {
    if !(snr >= 0.0) || snr.is_infinite() {
        return Err(domain(
            "gallager_spectral_efficiency",
            format!("snr must be finite and >= 0, got {snr}"),
        ));
    }
    let power = snr * spec.bandwidth() * spec.n0;
    Ok(gallager_gaussian_capacity(spec, power)? / spec.bandwidth())
}
