//! Physical configuration of the oscillator-cavity system.

use core::fmt;
use core::f64::consts::PI;

use crate::math;

/// Default number of retained field modes.
///
/// The coupling weights decay like `1/k^2`, so the truncated probability tail
/// is about `4 delta / (pi K)`; with `K = 20_000` it stays below `1e-6` of
/// the total for the configurations this crate targets.
pub const DEFAULT_TRUNCATION: usize = 20_000;

/// Inputs describing one oscillator-in-a-cavity system.
///
/// `omega_bar` is the renormalized (physical) oscillator frequency and
/// `coupling` the oscillator-field coupling, both in rad/time. The cavity
/// enters through the field-mode spacing `delta_omega = pi * wave_speed /
/// radius`; the dimensionless size parameter is `delta = coupling /
/// delta_omega`. Physical units are accepted at this boundary and converted
/// once; everything downstream works with `omega_bar`, `coupling` and
/// `delta_omega` only.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityConfig {
    omega_bar: f64,
    coupling: f64,
    radius: f64,
    wave_speed: f64,
    truncation: usize,
}

impl CavityConfig {
    pub fn new(
        omega_bar: f64,
        coupling: f64,
        radius: f64,
        wave_speed: f64,
        truncation: usize,
    ) -> Result<Self, ConfigError> {
        check_positive("omega_bar", omega_bar)?;
        check_positive("coupling", coupling)?;
        check_positive("radius", radius)?;
        check_positive("wave_speed", wave_speed)?;
        if truncation == 0 {
            return Err(ConfigError::ZeroTruncation);
        }
        Ok(Self {
            omega_bar,
            coupling,
            radius,
            wave_speed,
            truncation,
        })
    }

    /// Build a configuration directly from the dimensionless cavity-size
    /// parameter `delta`, reconstructing the radius with `wave_speed = 1`.
    pub fn from_delta(
        omega_bar: f64,
        coupling: f64,
        delta: f64,
        truncation: usize,
    ) -> Result<Self, ConfigError> {
        check_positive("delta", delta)?;
        check_positive("coupling", coupling)?;
        Self::new(omega_bar, coupling, PI * delta / coupling, 1.0, truncation)
    }

    pub fn omega_bar(&self) -> f64 {
        self.omega_bar
    }

    /// Oscillator-field coupling constant (frequency units).
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn wave_speed(&self) -> f64 {
        self.wave_speed
    }

    /// Number of retained field modes `K`; the spectrum then has `K + 1`
    /// normal modes.
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Field-mode spacing `pi * wave_speed / radius`.
    pub fn delta_omega(&self) -> f64 {
        PI * self.wave_speed / self.radius
    }

    /// Dimensionless cavity-size parameter `coupling / delta_omega`.
    pub fn delta(&self) -> f64 {
        self.coupling / self.delta_omega()
    }

    /// `(delta_omega, delta)` in one call.
    pub fn derived_params(&self) -> (f64, f64) {
        let delta_omega = self.delta_omega();
        (delta_omega, self.coupling / delta_omega)
    }

    /// Coupling normalization `eta = sqrt(4 g delta_omega / pi)`.
    pub fn eta(&self) -> f64 {
        math::sqrt(4.0 * self.coupling * self.delta_omega() / PI)
    }

    /// Bare field frequency `omega_k = k * delta_omega`, `k >= 1`.
    pub fn field_frequency(&self, k: usize) -> f64 {
        k as f64 * self.delta_omega()
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<(), ConfigError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::NonPositive { name, value })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// A physical input that must be a positive finite number was not.
    NonPositive { name: &'static str, value: f64 },
    /// At least one field mode must be retained.
    ZeroTruncation,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::NonPositive { name, value } => {
                write!(f, "{name} must be a positive finite number, got {value}")
            }
            ConfigError::ZeroTruncation => write!(f, "truncation must be at least 1"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ConfigError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_params_microwave_example() {
        // omega_bar = 2e11 rad/s, g = omega_bar / 137, R = 1 cm, c = 3e8 m/s
        let cfg = CavityConfig::new(2e11, 2e11 / 137.0, 1e-2, 3e8, 100).unwrap();
        let (dw, delta) = cfg.derived_params();
        assert!((dw - PI * 3e10).abs() / dw < 1e-15);
        assert!((delta - 0.015489).abs() < 1e-5);
        assert!(delta >= 0.0150 && delta <= 0.0160);
    }

    #[test]
    fn derived_params_direct_arithmetic() {
        let cfg = CavityConfig::new(1.0, 0.5, PI, 5.0, 10).unwrap();
        let (dw, delta) = cfg.derived_params();
        assert_eq!(dw, 5.0);
        assert_eq!(delta, 0.1);
    }

    #[test]
    fn delta_of_one_when_coupling_equals_spacing() {
        let cfg = CavityConfig::new(1.0, 1.0, PI, 1.0, 10).unwrap();
        assert_eq!(cfg.delta_omega(), 1.0);
        assert_eq!(cfg.delta(), 1.0);
    }

    #[test]
    fn from_delta_round_trips() {
        let cfg = CavityConfig::from_delta(1.0, 0.5, 0.1, 10).unwrap();
        assert!((cfg.delta() - 0.1).abs() < 1e-15);
        assert!((cfg.delta_omega() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            CavityConfig::new(-1.0, 0.5, 1.0, 1.0, 10),
            Err(ConfigError::NonPositive { name: "omega_bar", .. })
        ));
        assert!(matches!(
            CavityConfig::new(1.0, 0.0, 1.0, 1.0, 10),
            Err(ConfigError::NonPositive { name: "coupling", .. })
        ));
        assert!(matches!(
            CavityConfig::new(1.0, 0.5, 1.0, 1.0, 0),
            Err(ConfigError::ZeroTruncation)
        ));
        assert!(CavityConfig::new(1.0, f64::NAN, 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn eta_definition() {
        let cfg = CavityConfig::new(1.0, 0.5, PI, 5.0, 10).unwrap();
        // eta^2 = 4 g dw / pi = 10 / pi
        let eta = cfg.eta();
        assert!((eta * eta - 10.0 / PI).abs() < 1e-14);
    }
}
