//! Heat-channel capacity: closed form, eigenmode ladder and rate forms.
//!
//! Capacities are per transmission in nats unless a name says otherwise.
//! SNR is always linear here; dB only appears in the curve and CLI layers.

use std::f64::consts::{LOG2_E, PI};

use serde::Serialize;

use crate::error::{domain, invalid, Result};
use crate::quadrature::QuadratureSpec;
use crate::w0::{w0, ToleranceConfig};
use crate::waterfill::{
    waterfill_discrete, waterfill_quadrature_2d_with, ModeSpectrum, QuadraturePath, WaterfillResult,
};

/// Time scale `alpha` (s), frequency scale `beta` (Hz) and noise
/// parameter `theta2` of a heat channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatChannelGeometry {
    alpha: f64,
    beta: f64,
    theta2: f64,
}

impl HeatChannelGeometry {
    pub fn new(alpha: f64, beta: f64, theta2: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("theta2", theta2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid("geometry", format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(Self { alpha, beta, theta2 })
    }

    /// Geometry with `alpha * beta = tbp`, `beta = 1`.
    pub fn from_tbp(tbp: f64, theta2: f64) -> Result<Self> {
        Self::new(tbp, 1.0, theta2)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    /// Time-bandwidth product `alpha * beta`.
    pub fn tbp(&self) -> f64 {
        self.alpha * self.beta
    }

    /// Approximate duration of a capacity-achieving signal, `2 pi alpha`.
    pub fn duration(&self) -> f64 {
        2.0 * PI * self.alpha
    }

    /// Bandwidth in positive frequencies, `beta / 2`.
    pub fn bandwidth(&self) -> f64 {
        0.5 * self.beta
    }

    /// One-sided noise power spectral density, `2 theta2`.
    pub fn n0(&self) -> f64 {
        2.0 * self.theta2
    }

    pub(crate) fn with_theta2(&self, theta2: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, theta2)
    }

    /// `S / ((alpha beta / 2) theta2)`, the argument of `w0` in the closed form.
    pub fn normalized_energy(&self, s_energy: f64) -> f64 {
        s_energy / (0.5 * self.tbp() * self.theta2)
    }
}

fn check_snr(op: &'static str, snr: f64) -> Result<()> {
    if !(snr >= 0.0) || snr.is_infinite() {
        return Err(domain(op, format!("snr must be finite and >= 0, got {snr}")));
    }
    Ok(())
}

fn check_energy(op: &'static str, s_energy: f64) -> Result<()> {
    if !(s_energy >= 0.0) || s_energy.is_infinite() {
        return Err(domain(op, format!("energy must be finite and >= 0, got {s_energy}")));
    }
    Ok(())
}

/// Input energy over one transmission, `S = 2 pi alpha P` with `P = snr W N0`.
pub fn snr_to_energy(geom: &HeatChannelGeometry, snr: f64) -> Result<f64> {
    check_snr("snr_to_energy", snr)?;
    let power = snr * geom.bandwidth() * geom.n0();
    Ok(geom.duration() * power)
}

/// Leading term `(alpha beta / 2) w0(S / ((alpha beta / 2) theta2))^2` of the
/// capacity, in nats. The `o(alpha beta)` remainder is not modelled.
pub fn capacity_closed_form(geom: &HeatChannelGeometry, s_energy: f64) -> Result<f64> {
    capacity_closed_form_with(geom, s_energy, &ToleranceConfig::default())
}

pub fn capacity_closed_form_with(geom: &HeatChannelGeometry, s_energy: f64, tol: &ToleranceConfig) -> Result<f64> {
    check_energy("capacity_closed_form", s_energy)?;
    let x = w0(geom.normalized_energy(s_energy), tol)?;
    Ok(0.5 * geom.tbp() * x * x)
}

/// Eigenmode ladder `N_k = theta2 exp((2k + 1) / (alpha beta))`, `k < k_max`:
/// midpoints of the level variable at spacing `2 / (alpha beta)`.
pub fn heat_mode_spectrum(geom: &HeatChannelGeometry, k_max: usize) -> Result<ModeSpectrum> {
    if k_max < 1 {
        return Err(invalid("mode count", "k_max must be >= 1"));
    }
    let tbp = geom.tbp();
    let levels = (0..k_max)
        .map(|k| geom.theta2 * ((2 * k + 1) as f64 / tbp).exp())
        .collect();
    ModeSpectrum::new(levels)
}

/// Initial ladder length before auto-growth.
fn initial_mode_count(geom: &HeatChannelGeometry, s_energy: f64) -> usize {
    let tbp = geom.tbp();
    let reach = (s_energy / (tbp * geom.theta2)).ln_1p().max(1.0);
    (tbp * reach).ceil().max(1.0) as usize
}

/// Water-fill the eigenmode ladder, doubling its length until the top mode
/// is dry.
pub fn capacity_exact_discrete(geom: &HeatChannelGeometry, s_energy: f64) -> Result<WaterfillResult> {
    capacity_exact_discrete_with(geom, s_energy, &ToleranceConfig::default())
}

pub fn capacity_exact_discrete_with(
    geom: &HeatChannelGeometry,
    s_energy: f64,
    tol: &ToleranceConfig,
) -> Result<WaterfillResult> {
    check_energy("capacity_exact_discrete", s_energy)?;
    let mut k_max = initial_mode_count(geom, s_energy);
    loop {
        let spectrum = heat_mode_spectrum(geom, k_max)?;
        let result = waterfill_discrete(&spectrum, s_energy, tol)?;
        if result.active_count < k_max {
            return Ok(result);
        }
        k_max = k_max
            .checked_mul(2)
            .ok_or_else(|| invalid("mode count", "ladder length overflow"))?;
    }
}

/// Water-filling over the time-frequency plane, in units where `theta2 = 1`
/// so the result depends on `S / theta2` alone.
pub fn capacity_quadrature(
    geom: &HeatChannelGeometry,
    s_energy: f64,
    spec: &QuadratureSpec,
    path: QuadraturePath,
) -> Result<WaterfillResult> {
    check_energy("capacity_quadrature", s_energy)?;
    let unit = geom.with_theta2(1.0)?;
    let mut r = waterfill_quadrature_2d_with(&unit, s_energy / geom.theta2, spec, path)?;
    r.water_level *= geom.theta2;
    Ok(r)
}

/// Time-averaged capacity `(W / 2 pi) w0(4 pi snr)^2 log2 e` in bit/s.
pub fn rate_bits_per_second(geom: &HeatChannelGeometry, snr: f64) -> Result<f64> {
    check_snr("rate_bits_per_second", snr)?;
    let x = w0(2.0 * PI * 2.0 * snr, &ToleranceConfig::default())?;
    Ok(geom.bandwidth() / (2.0 * PI) * x * x * LOG2_E)
}

/// Spectral efficiency `(1 / 2 pi) w0(4 pi snr)^2 log2 e` in bit/s/Hz.
pub fn spectral_efficiency(snr: f64) -> Result<f64> {
    check_snr("spectral_efficiency", snr)?;
    let x = w0(4.0 * PI * snr, &ToleranceConfig::default())?;
    Ok(x * x / (2.0 * PI) * LOG2_E)
}

/// `Eb/N0 = snr / (C/W)` along the parametric curve, linear units.
pub fn ebn0_from_snr(snr: f64) -> Result<f64> {
    if !(snr > 0.0) || snr.is_infinite() {
        return Err(domain(
            "ebn0_from_snr",
            format!("snr must be finite and > 0, got {snr}"),
        ));
    }
    Ok(snr / spectral_efficiency(snr)?)
}

/// Which capacity methods to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodSet {
    pub closed: bool,
    pub discrete: bool,
    pub quadrature: bool,
}

impl MethodSet {
    pub const ALL: Self = Self {
        closed: true,
        discrete: true,
        quadrature: true,
    };
}

/// Capacity by each requested method, with the pairwise relative spreads.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityReport {
    pub s_energy: f64,
    pub closed_form_nats: Option<f64>,
    pub discrete: Option<DiscreteSummary>,
    pub quadrature_nats: Option<f64>,
    pub spreads: Vec<Spread>,
    pub consistency_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteSummary {
    pub capacity_nats: f64,
    pub water_level: f64,
    pub active_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spread {
    pub a: &'static str,
    pub b: &'static str,
    pub relative: f64,
}

pub fn relative_spread(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

impl CapacityReport {
    pub const DEFAULT_CONSISTENCY_BOUND: f64 = 0.01;

    pub fn compute(
        geom: &HeatChannelGeometry,
        s_energy: f64,
        methods: MethodSet,
        quad: &QuadratureSpec,
        consistency_bound: f64,
    ) -> Result<Self> {
        check_energy("capacity", s_energy)?;
        let closed_form_nats = methods
            .closed
            .then(|| capacity_closed_form(geom, s_energy))
            .transpose()?;
        let discrete = methods
            .discrete
            .then(|| capacity_exact_discrete(geom, s_energy))
            .transpose()?
            .map(|r| DiscreteSummary {
                capacity_nats: r.capacity_nats,
                water_level: r.water_level,
                active_count: r.active_count,
            });
        let quadrature_nats = methods
            .quadrature
            .then(|| capacity_quadrature(geom, s_energy, quad, QuadraturePath::Collapsed))
            .transpose()?
            .map(|r| r.capacity_nats);

        let named = [
            ("closed", closed_form_nats),
            ("discrete", discrete.as_ref().map(|d| d.capacity_nats)),
            ("quadrature", quadrature_nats),
        ];
        let present: Vec<(&'static str, f64)> = named.iter().filter_map(|(n, v)| v.map(|v| (*n, v))).collect();
        let mut spreads = Vec::new();
        for i in 0..present.len() {
            for j in i + 1..present.len() {
                spreads.push(Spread {
                    a: present[i].0,
                    b: present[j].0,
                    relative: relative_spread(present[i].1, present[j].1),
                });
            }
        }
        Ok(Self {
            s_energy,
            closed_form_nats,
            discrete,
            quadrature_nats,
            spreads,
            consistency_bound,
        })
    }

    pub fn max_spread(&self) -> f64 {
        self.spreads.iter().map(|s| s.relative).fold(0.0, f64::max)
    }

    pub fn is_consistent(&self) -> bool {
        self.max_spread() <= self.consistency_bound
    }
}
