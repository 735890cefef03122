//! Water-filling over discrete mode ladders and over the heat channel's
//! time-frequency noise profile.
//!
//! The continuous profile is `N(t, f) = theta2 * exp(2 pi t^2 / alpha^2 + 2 pi f^2 / beta^2)`.
//! Writing `u = 2 pi t^2 / alpha^2 + 2 pi f^2 / beta^2`, the sublevel set
//! `{u <= c}` is an ellipse of area `(alpha beta / 2) c`, so both water-filling
//! integrals reduce to one-dimensional integrals in `u`. That reduction is the
//! default ([`QuadraturePath::Collapsed`]); the Cartesian double integral is
//! kept as [`QuadraturePath::TensorGrid`] to check it.

use std::f64::consts::PI;

use crate::error::{domain, invalid, Error, Result};
use crate::heat::HeatChannelGeometry;
use crate::quadrature::{integrate, QuadratureSpec};
use crate::w0::ToleranceConfig;

/// Nondecreasing ladder of strictly positive effective noise levels.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    levels: Vec<f64>,
}

impl ModeSpectrum {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(invalid("mode spectrum", "no levels"));
        }
        if let Some(bad) = levels.iter().find(|n| !(n.is_finite() && **n > 0.0)) {
            return Err(invalid(
                "mode spectrum",
                format!("levels must be finite and > 0, found {bad}"),
            ));
        }
        if levels.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("mode spectrum", "levels must be nondecreasing"));
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaterfillResult {
    /// Water level ν.
    pub water_level: f64,
    pub capacity_nats: f64,
    /// Number of modes with positive power. Zero for continuum results.
    pub active_count: usize,
    /// Per-mode power `ν - N_k` for active modes and zero otherwise; empty
    /// for continuum results.
    pub allocation: Vec<f64>,
}

impl WaterfillResult {
    pub fn capacity_bits(&self) -> f64 {
        self.capacity_nats * std::f64::consts::LOG2_E
    }
}

/// Water-fill energy `s_energy` over a discrete ladder.
///
/// `K` is the largest count with `ν = (S + Σ_{k<K} N_k) / K > N_{K-1}`;
/// capacity is `Σ_{k<K} ½ ln(ν / N_k)` nats. With `S = 0` no mode is wet and
/// the water level sits at the lowest noise level.
pub fn waterfill_discrete(spectrum: &ModeSpectrum, s_energy: f64, tol: &ToleranceConfig) -> Result<WaterfillResult> {
    if !(s_energy >= 0.0) || s_energy.is_infinite() {
        return Err(domain(
            "waterfill_discrete",
            format!("energy must be finite and >= 0, got {s_energy}"),
        ));
    }
    let levels = spectrum.levels();
    let n = levels.len();
    if s_energy == 0.0 {
        return Ok(WaterfillResult {
            water_level: levels[0],
            capacity_nats: 0.0,
            active_count: 0,
            allocation: vec![0.0; n],
        });
    }

    // Levels relative to the floor keep the sums well scaled when S is small.
    let floor = levels[0];
    let mut active = 0;
    let mut excess_sum = 0.0;
    let mut chosen_excess = 0.0;
    for (k, &level) in levels.iter().enumerate() {
        excess_sum += level - floor;
        let count = (k + 1) as f64;
        let lift = (s_energy + excess_sum) / count;
        if floor + lift > level {
            active = k + 1;
            chosen_excess = excess_sum;
        } else {
            break;
        }
    }
    // Allocation s_k = lift - (N_k - floor) stays accurate even when the
    // levels dwarf the budget; the water level is floor + lift.
    let mut lift = (s_energy + chosen_excess) / active as f64;
    let mut allocation = vec![0.0; n];
    for _ in 0..tol.max_iter().min(4) {
        for (s, &level) in allocation.iter_mut().zip(levels).take(active) {
            *s = lift - (level - floor);
        }
        let delivered: f64 = allocation[..active].iter().sum();
        let residual = s_energy - delivered;
        if residual.abs() <= 0.25 * tol.rel_tol() * s_energy {
            break;
        }
        lift += residual / active as f64;
    }
    let water_level = floor + lift;

    let capacity_nats = allocation[..active]
        .iter()
        .zip(levels)
        .map(|(s, n)| 0.5 * (s / n).ln_1p())
        .sum();

    Ok(WaterfillResult {
        water_level,
        capacity_nats,
        active_count: active,
        allocation,
    })
}

/// Find the water level `ν` at which a nondecreasing delivered-energy
/// profile reaches `s_target`.
///
/// `nu_floor` is the lowest noise level (`s_of_nu(nu_floor) = 0`). The
/// upper end of the bracket is `nu_floor * e^u` with `u` doubled until the
/// profile exceeds the target; the root is then bisected until
/// `|s_of_nu(ν) - s_target| <= rel_tol * max(1, s_target)`.
pub fn solve_water_level<F>(s_of_nu: F, nu_floor: f64, s_target: f64, tol: &ToleranceConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(nu_floor > 0.0 && nu_floor.is_finite()) {
        return Err(domain(
            "solve_water_level",
            format!("noise floor must be finite and > 0, got {nu_floor}"),
        ));
    }
    if !(s_target >= 0.0) || s_target.is_infinite() {
        return Err(domain(
            "solve_water_level",
            format!("target energy must be finite and >= 0, got {s_target}"),
        ));
    }
    if s_target == 0.0 {
        return Ok(nu_floor);
    }
    let abs_tol = tol.rel_tol() * s_target.max(1.0);

    const LIMIT: f64 = 1e308;
    let mut lo = nu_floor;
    let mut u = 1.0_f64;
    let mut hi = nu_floor * u.exp();
    loop {
        let delivered = s_of_nu(hi)?;
        if (delivered - s_target).abs() <= abs_tol {
            return Ok(hi);
        }
        if delivered > s_target {
            break;
        }
        lo = hi;
        u *= 2.0;
        hi = nu_floor * u.exp();
        if !(hi <= LIMIT) {
            return Err(Error::Divergence {
                op: "solve_water_level",
                limit: LIMIT,
            });
        }
    }

    let mut residual = f64::INFINITY;
    // bisection needs ~log2(hi / ulp) steps on top of the caller's cap
    let steps = tol.max_iter().max(1100);
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let delivered = s_of_nu(mid)?;
        residual = delivered - s_target;
        if residual.abs() <= abs_tol {
            return Ok(mid);
        }
        if residual < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Convergence {
        op: "solve_water_level",
        iterations: steps,
        residual,
    })
}

/// How the time-frequency integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadraturePath {
    /// One-dimensional integral over the level variable `u`.
    #[default]
    Collapsed,
    /// Nested Gauss–Kronrod over `t` then `f` on the wet ellipse.
    TensorGrid,
}

/// Delivered energy and capacity at a fixed water level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileIntegrals {
    pub energy: f64,
    pub capacity_nats: f64,
}

fn integral_value(r: Result<crate::quadrature::Integral>) -> Result<f64> {
    r.map(|i| i.value)
}

/// Energy `∬ (ν - N)⁺ dt df` delivered by water level `nu` over the heat
/// channel's noise profile. `abs_tol` is absolute, in energy units.
fn profile_energy(
    geom: &HeatChannelGeometry,
    nu: f64,
    abs_tol: f64,
    spec: &QuadratureSpec,
    path: QuadraturePath,
) -> Result<f64> {
    let theta2 = geom.theta2();
    if nu <= theta2 {
        return Ok(0.0);
    }
    let u_star = (nu / theta2).ln();
    let qspec = spec.with_abs_tol(abs_tol)?;
    match path {
        QuadraturePath::Collapsed => {
            let density = 0.5 * geom.tbp();
            integral_value(integrate(|u| density * (nu - theta2 * u.exp()), 0.0, u_star, &qspec))
        }
        QuadraturePath::TensorGrid => tensor_grid(geom, u_star, &qspec, |u| nu - theta2 * u.exp()),
    }
}

/// Capacity `∬ ½ ln(ν / N)⁺ dt df` in nats at water level `nu`.
fn profile_capacity(geom: &HeatChannelGeometry, nu: f64, spec: &QuadratureSpec, path: QuadraturePath) -> Result<f64> {
    let theta2 = geom.theta2();
    if nu <= theta2 {
        return Ok(0.0);
    }
    let u_star = (nu / theta2).ln();
    match path {
        QuadraturePath::Collapsed => {
            let density = 0.5 * geom.tbp();
            integral_value(integrate(|u| density * 0.5 * (u_star - u), 0.0, u_star, spec))
        }
        QuadraturePath::TensorGrid => tensor_grid(geom, u_star, spec, |u| 0.5 * (u_star - u)),
    }
}

/// Integrate `g(u(t, f))` over the ellipse `u(t, f) <= u_star` in Cartesian
/// coordinates. The outer variable is `t = t_max sin φ`, which removes the
/// square-root edge of the inner limits.
fn tensor_grid<G: Fn(f64) -> f64>(geom: &HeatChannelGeometry, u_star: f64, spec: &QuadratureSpec, g: G) -> Result<f64> {
    let (alpha, beta) = (geom.alpha(), geom.beta());
    let t_coef = 2.0 * PI / (alpha * alpha);
    let f_coef = 2.0 * PI / (beta * beta);
    let t_max = (u_star / t_coef).sqrt();
    // the outer integral spans π in φ with weight ≤ t_max
    let inner_spec = spec.with_abs_tol(spec.abs_tol() / (4.0 * PI * t_max.max(f64::MIN_POSITIVE)))?;
    let outer_spec = spec.with_abs_tol(0.5 * spec.abs_tol())?;

    let inner_failure = std::cell::Cell::new(None);
    let outer = integrate(
        |phi| {
            let t = t_max * phi.sin();
            let time_part = t_coef * t * t;
            let remaining = (u_star - time_part).max(0.0);
            let f_max = (remaining / f_coef).sqrt();
            if f_max == 0.0 {
                return 0.0;
            }
            match integrate(|f| g(time_part + f_coef * f * f), -f_max, f_max, &inner_spec) {
                Ok(inner) => inner.value * t_max * phi.cos(),
                Err(e) => {
                    inner_failure.set(Some(e.to_string()));
                    f64::NAN
                }
            }
        },
        -0.5 * PI,
        0.5 * PI,
        &outer_spec,
    );
    if let Some(msg) = inner_failure.take() {
        return Err(invalid("tensor-grid inner integral", msg));
    }
    integral_value(outer)
}

/// Evaluate both water-filling integrals at a given water level.
pub fn profile_integrals(
    geom: &HeatChannelGeometry,
    nu: f64,
    spec: &QuadratureSpec,
    path: QuadraturePath,
) -> Result<ProfileIntegrals> {
    if !(nu > 0.0) || nu.is_infinite() {
        return Err(domain(
            "profile_integrals",
            format!("water level must be finite and > 0, got {nu}"),
        ));
    }
    let energy_tol = spec.abs_tol() * (geom.theta2() * nu).max(1.0);
    Ok(ProfileIntegrals {
        energy: profile_energy(geom, nu, energy_tol, spec, path)?,
        capacity_nats: profile_capacity(geom, nu, spec, path)?,
    })
}

/// Water-filling over the time-frequency plane, evaluated by the default
/// collapsed quadrature.
pub fn waterfill_quadrature_2d(
    geom: &HeatChannelGeometry,
    s_energy: f64,
    spec: &QuadratureSpec,
) -> Result<WaterfillResult> {
    waterfill_quadrature_2d_with(geom, s_energy, spec, QuadraturePath::Collapsed)
}

/// Water-filling over the time-frequency plane along a chosen quadrature
/// path. `active_count` is always 0 and `allocation` empty.
pub fn waterfill_quadrature_2d_with(
    geom: &HeatChannelGeometry,
    s_energy: f64,
    spec: &QuadratureSpec,
    path: QuadraturePath,
) -> Result<WaterfillResult> {
    if !(s_energy >= 0.0) || s_energy.is_infinite() {
        return Err(domain(
            "waterfill_quadrature_2d",
            format!("energy must be finite and >= 0, got {s_energy}"),
        ));
    }
    let theta2 = geom.theta2();
    if s_energy == 0.0 {
        return Ok(WaterfillResult {
            water_level: theta2,
            capacity_nats: 0.0,
            active_count: 0,
            allocation: Vec::new(),
        });
    }
    let tol = ToleranceConfig::default();
    // energy quadrature well inside the root tolerance
    let energy_tol = 0.01 * tol.rel_tol() * s_energy;
    // normalized to a unit target so the tolerance is relative for any S
    let nu = solve_water_level(
        |nu| Ok(profile_energy(geom, nu, energy_tol, spec, path)? / s_energy),
        theta2,
        1.0,
        &tol,
    )?;
    let capacity_nats = profile_capacity(geom, nu, spec, path)?;
    Ok(WaterfillResult {
        water_level: nu,
        capacity_nats,
        active_count: 0,
        allocation: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(levels: &[f64]) -> ModeSpectrum {
        ModeSpectrum::new(levels.to_vec()).unwrap()
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn single_mode() {
        let r = waterfill_discrete(&spectrum(&[1.0]), 1.0, &tol()).unwrap();
        assert_eq!(r.active_count, 1);
        assert!((r.water_level - 2.0).abs() < 1e-15);
        assert!((r.capacity_nats - 0.5 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn two_modes_both_wet() {
        let r = waterfill_discrete(&spectrum(&[1.0, 4.0]), 7.0, &tol()).unwrap();
        assert_eq!(r.active_count, 2);
        assert!((r.water_level - 6.0).abs() < 1e-14);
        assert!((r.capacity_nats - 3f64.ln()).abs() < 1e-14);
        assert_eq!(r.allocation.len(), 2);
    }

    #[test]
    fn second_mode_stays_dry() {
        let r = waterfill_discrete(&spectrum(&[1.0, 4.0]), 1.0, &tol()).unwrap();
        assert_eq!(r.active_count, 1);
        assert!((r.water_level - 2.0).abs() < 1e-15);
        assert_eq!(r.allocation[1], 0.0);
        assert!((r.capacity_nats - 0.5 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn threshold_keeps_mode_dry() {
        // ν reaches the second level exactly: that mode gets no power
        let r = waterfill_discrete(&spectrum(&[1.0, 4.0]), 3.0, &tol()).unwrap();
        assert_eq!(r.active_count, 1);
        assert!((r.water_level - 4.0).abs() < 1e-15);
    }

    #[test]
    fn zero_energy() {
        let r = waterfill_discrete(&spectrum(&[2.0, 3.0]), 0.0, &tol()).unwrap();
        assert_eq!(r.active_count, 0);
        assert_eq!(r.capacity_nats, 0.0);
        assert_eq!(r.water_level, 2.0);
    }

    #[test]
    fn negative_energy_is_domain_error() {
        let e = waterfill_discrete(&spectrum(&[1.0]), -1.0, &tol()).unwrap_err();
        assert!(matches!(e, Error::Domain { .. }));
    }

    #[test]
    fn spectrum_validation() {
        assert!(ModeSpectrum::new(vec![]).is_err());
        assert!(ModeSpectrum::new(vec![1.0, 0.0]).is_err());
        assert!(ModeSpectrum::new(vec![2.0, 1.0]).is_err());
        assert!(ModeSpectrum::new(vec![1.0, f64::NAN]).is_err());
        assert!(ModeSpectrum::new(vec![1.0, 1.0, 2.0]).is_ok());
    }

    #[test]
    fn energy_conserved_when_levels_dwarf_budget() {
        let levels: Vec<f64> = (0..50).map(|k| 1e6 + k as f64 * 1e-3).collect();
        let s = 1e-4;
        let r = waterfill_discrete(&spectrum(&levels), s, &tol()).unwrap();
        let total: f64 = r.allocation.iter().sum();
        assert!((total - s).abs() <= 1e-12 * s, "{total} vs {s}");
    }

    #[test]
    fn water_level_linear_profiles() {
        let nu = solve_water_level(|nu| Ok((nu - 1.0).max(0.0)), 1.0, 1.0, &tol()).unwrap();
        assert!((nu - 2.0).abs() < 1e-11);
        let nu = solve_water_level(|nu| Ok((nu - 1.0).max(0.0) + (nu - 4.0).max(0.0)), 1.0, 7.0, &tol()).unwrap();
        assert!((nu - 6.0).abs() < 1e-11);
    }

    #[test]
    fn water_level_zero_target_is_floor() {
        let nu = solve_water_level(|nu| Ok(nu - 3.0), 3.0, 0.0, &tol()).unwrap();
        assert_eq!(nu, 3.0);
    }

    #[test]
    fn water_level_divergence() {
        let e = solve_water_level(|_| Ok(0.0), 1.0, 1.0, &tol()).unwrap_err();
        assert!(matches!(e, Error::Divergence { .. }));
    }

    #[test]
    fn water_level_propagates_callable_errors() {
        let e = solve_water_level(|_| Err(invalid("probe", "boom")), 1.0, 1.0, &tol()).unwrap_err();
        assert!(matches!(e, Error::Invalid { .. }));
    }
}
