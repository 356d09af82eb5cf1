//! Infinite-cavity (continuum) evaluation of the survival amplitude.
//!
//! In the continuum limit the mode sum becomes a frequency integral whose
//! real (cosine) part has residue-theorem closed forms in three damping
//! regimes, while the imaginary part requires oscillatory quadrature. Large
//! times admit a `1/t^3` asymptote for the imaginary part and simple
//! weak/strong-coupling approximations for the whole density matrix.

use core::fmt;

use num_complex::Complex64;

use crate::evolution::{
    reduced_density_unchecked, AmplitudeMethod, ReducedState, SuperpositionSpec, SurvivalAmplitude,
};
use crate::math;
use crate::quad::{oscillatory_integral, OscKernel};

use core::f64::consts::PI;

/// Relative half-width of the strip around `kappa^2 = 0` evaluated by the
/// series form to dodge the 0/0 in the closed underdamped expression.
pub const CRITICAL_KAPPA_TOL: f64 = 1e-6;

/// Default absolute error target of the imaginary-part quadrature.
pub const G_ABS_TOL_DEFAULT: f64 = 1e-8;
/// Default relative error target of the imaginary-part quadrature.
pub const G_REL_TOL_DEFAULT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `omega_bar > g`: damped oscillation.
    Underdamped,
    /// `omega_bar = g` within tolerance.
    Critical,
    /// `omega_bar < g`: monotone-envelope decay.
    Overdamped,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::Underdamped => "underdamped",
            Regime::Critical => "critical",
            Regime::Overdamped => "overdamped",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaRegime {
    /// `omega_bar^2 - g^2`.
    pub kappa_sq: f64,
    pub regime: Regime,
}

/// Classify by the sign of `omega_bar^2 - g^2`; anything within
/// `tol * omega_bar^2` of zero counts as critical.
pub fn classify_regime(omega_bar: f64, g: f64, tol: f64) -> KappaRegime {
    let kappa_sq = omega_bar * omega_bar - g * g;
    let regime = if math::abs(kappa_sq) <= tol * omega_bar * omega_bar {
        Regime::Critical
    } else if kappa_sq > 0.0 {
        Regime::Underdamped
    } else {
        Regime::Overdamped
    };
    KappaRegime { kappa_sq, regime }
}

/// Real part of the continuum survival amplitude, by residue closed forms.
///
/// Near the critical line the underdamped and overdamped expressions suffer
/// catastrophic cancellation in `(g/kappa) sin(kappa t)`; a series in
/// `kappa^2 t^2` (valid for either sign) takes over there and limits to
/// `e^{-g t} (1 - g t)` at criticality.
pub fn f00_real_closed(t: f64, omega_bar: f64, g: f64) -> f64 {
    let kappa_sq = omega_bar * omega_bar - g * g;
    let damp = math::exp(-g * t);
    if math::abs(kappa_sq) < CRITICAL_KAPPA_TOL * omega_bar * omega_bar {
        let x = kappa_sq * t * t;
        // cos(kt) and sin(kt)/(kt) as series in x = (kt)^2, sign-agnostic
        let c = 1.0 + x * (-0.5 + x * (1.0 / 24.0 + x * (-1.0 / 720.0 + x / 40320.0)));
        let s = 1.0 + x * (-1.0 / 6.0 + x * (1.0 / 120.0 + x * (-1.0 / 5040.0 + x / 362880.0)));
        damp * (c - g * t * s)
    } else if kappa_sq > 0.0 {
        let kappa = math::sqrt(kappa_sq);
        let (sin, cos) = math::sin_cos(kappa * t);
        damp * (cos - g / kappa * sin)
    } else {
        let kappa = math::sqrt(-kappa_sq);
        let a = g / kappa;
        // overflow-safe split of e^{-gt} (cosh - a sinh); both exponents <= 0
        0.5 * ((1.0 - a) * math::exp((kappa - g) * t) + (1.0 + a) * math::exp(-(kappa + g) * t))
    }
}

/// Quadrature diagnostics for the imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureReport {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub intervals_used: usize,
    pub accelerated: bool,
}

/// Imaginary part of the continuum survival amplitude:
/// `-(4g/pi) * int_0^inf y^2 sin(y t) / ((y^2 - wb^2)^2 + 4 g^2 y^2) dy`.
pub fn g_integral(t: f64, omega_bar: f64, g: f64) -> Result<QuadratureReport, ContinuumError> {
    g_integral_with_tol(t, omega_bar, g, G_ABS_TOL_DEFAULT, G_REL_TOL_DEFAULT)
}

pub fn g_integral_with_tol(
    t: f64,
    omega_bar: f64,
    g: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureReport, ContinuumError> {
    if t == 0.0 {
        return Ok(QuadratureReport {
            value: 0.0,
            abs_error_estimate: 0.0,
            intervals_used: 0,
            accelerated: false,
        });
    }
    let prefactor = 4.0 * g / PI;
    let out = oscillatory_integral(
        &envelope(omega_bar, g),
        OscKernel::Sin,
        t,
        omega_bar + 3.0 * g,
        0.1 / omega_bar,
        abs_tol / prefactor,
        rel_tol,
    );
    let report = QuadratureReport {
        value: -prefactor * out.value,
        abs_error_estimate: prefactor * out.error,
        intervals_used: out.intervals,
        accelerated: out.accelerated,
    };
    if out.converged {
        Ok(report)
    } else {
        Err(ContinuumError::QuadratureStall { report })
    }
}

/// Spectral envelope `y^2 / ((y^2 - wb^2)^2 + 4 g^2 y^2)` rearranged as
/// `1 / ((y - wb^2/y)^2 + 4 g^2)` so it stays finite for arbitrarily large
/// `y` (no `y^4` overflow) and evaluates to 0 at `y = 0`.
fn envelope(omega_bar: f64, g: f64) -> impl Fn(f64) -> f64 {
    let wb2 = omega_bar * omega_bar;
    let g2x4 = 4.0 * g * g;
    move |y: f64| {
        if y == 0.0 {
            return 0.0;
        }
        let u = y - wb2 / y;
        1.0 / (u * u + g2x4)
    }
}

/// Large-time approximation of the imaginary part, `8 g / (pi wb^4 t^3)`.
pub fn g_asymptotic(t: f64, omega_bar: f64, g: f64) -> f64 {
    let wb4 = omega_bar * omega_bar * omega_bar * omega_bar;
    8.0 * g / (PI * wb4 * t * t * t)
}

/// Cosine-part quadrature of the defining integral; the independent check of
/// the residue closed forms. Requires `t > 0` (at `t = 0` the envelope tail
/// no longer benefits from oscillation).
pub fn f00_real_by_quadrature(
    t: f64,
    omega_bar: f64,
    g: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureReport, ContinuumError> {
    debug_assert!(t > 0.0);
    let prefactor = 4.0 * g / PI;
    let out = oscillatory_integral(
        &envelope(omega_bar, g),
        OscKernel::Cos,
        t,
        omega_bar + 3.0 * g,
        0.1 / omega_bar,
        abs_tol / prefactor,
        rel_tol,
    );
    let report = QuadratureReport {
        value: prefactor * out.value,
        abs_error_estimate: prefactor * out.error,
        intervals_used: out.intervals,
        accelerated: out.accelerated,
    };
    if out.converged {
        Ok(report)
    } else {
        Err(ContinuumError::QuadratureStall { report })
    }
}

/// Full continuum survival amplitude: residue closed form for the real part
/// plus quadrature for the imaginary part.
pub fn f00_continuum(
    t: f64,
    omega_bar: f64,
    g: f64,
) -> Result<SurvivalAmplitude, ContinuumError> {
    f00_continuum_with_tol(t, omega_bar, g, G_ABS_TOL_DEFAULT, G_REL_TOL_DEFAULT)
}

pub fn f00_continuum_with_tol(
    t: f64,
    omega_bar: f64,
    g: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<SurvivalAmplitude, ContinuumError> {
    let re = f00_real_closed(t, omega_bar, g);
    let im = g_integral_with_tol(t, omega_bar, g, abs_tol, rel_tol)?;
    let slack = 10.0 * im.abs_error_estimate;
    Ok(SurvivalAmplitude {
        t,
        value: Complex64::new(re, im.value),
        method: AmplitudeMethod::Continuum,
        leakage_bound: slack * (2.0 + slack),
    })
}

/// A density matrix built from one of the large-time approximations, with a
/// flag recording whether the sample point sits inside the approximation's
/// validity range. Out-of-range points are reported, never rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticState {
    pub state: ReducedState,
    pub valid: bool,
}

/// Weak-coupling (`g << omega_bar`) large-time density matrix.
pub fn rho_weak_asymptotic(
    t: f64,
    omega_bar: f64,
    g: f64,
    spec: &SuperpositionSpec,
) -> AsymptoticState {
    let (sin, cos) = math::sin_cos(omega_bar * t);
    let re = math::exp(-g * t) * (cos - g / omega_bar * sin);
    let f = Complex64::new(re, g_asymptotic(t, omega_bar, g));
    AsymptoticState {
        state: reduced_density_unchecked(t, f, spec),
        valid: g <= 0.2 * omega_bar && t * omega_bar >= 10.0,
    }
}

/// Strong-coupling (`g >> omega_bar`) large-time density matrix.
pub fn rho_strong_asymptotic(
    t: f64,
    omega_bar: f64,
    g: f64,
    spec: &SuperpositionSpec,
) -> AsymptoticState {
    let f = Complex64::new(math::exp(-2.0 * g * t), g_asymptotic(t, omega_bar, g));
    AsymptoticState {
        state: reduced_density_unchecked(t, f, spec),
        valid: g >= 5.0 * omega_bar && t * omega_bar >= 10.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContinuumError {
    /// The quadrature could not certify the requested error target within
    /// its interval budget; the partial result is attached.
    QuadratureStall { report: QuadratureReport },
}

impl fmt::Display for ContinuumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContinuumError::QuadratureStall { report } => write!(
                f,
                "quadrature stalled at value {} with error estimate {} after {} intervals",
                report.value, report.abs_error_estimate, report.intervals_used
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ContinuumError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_classification() {
        let r = classify_regime(1.5, 1.0, CRITICAL_KAPPA_TOL);
        assert_eq!(r.regime, Regime::Underdamped);
        assert!((r.kappa_sq - 1.25).abs() < 1e-15);

        let r = classify_regime(2.0, 2.0, CRITICAL_KAPPA_TOL);
        assert_eq!(r.regime, Regime::Critical);

        let r = classify_regime(1.0, 1.2, CRITICAL_KAPPA_TOL);
        assert_eq!(r.regime, Regime::Overdamped);
        assert!((r.kappa_sq + 0.44).abs() < 1e-15);
    }

    #[test]
    fn closed_form_is_one_at_t_zero() {
        for &(wb, g) in &[(1.5, 1.0), (2.0, 2.0), (1.0, 1.2), (1.0, 1.0 - 1e-9)] {
            assert!((f00_real_closed(0.0, wb, g) - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn critical_zero_crossing() {
        // at criticality the amplitude vanishes at t = 1/g
        let v = f00_real_closed(0.5, 2.0, 2.0);
        assert!(v.abs() < 1e-15, "got {v}");
    }

    #[test]
    fn continuous_across_critical_strip() {
        // step over the series/closed-form threshold on both sides
        let wb = 1.0;
        for &t in &[0.3, 1.0, 5.0, 20.0] {
            for sign in [1.0, -1.0] {
                let ks_in = sign * 0.99 * CRITICAL_KAPPA_TOL;
                let ks_out = sign * 1.01 * CRITICAL_KAPPA_TOL;
                let g_in = (1.0 - ks_in).sqrt();
                let g_out = (1.0 - ks_out).sqrt();
                let jump = (f00_real_closed(t, wb, g_in) - f00_real_closed(t, wb, g_out)).abs();
                assert!(jump <= 1e-8, "t={t} sign={sign}: jump {jump}");
            }
        }
    }

    #[test]
    fn overdamped_envelope_decays() {
        // |f| <= 0.5 (|1-a| e^{(k-g)t} + (1+a) e^{-(k+g)t}) and -> 0
        let (wb, g): (f64, f64) = (1.0, 2.0);
        let kappa = (g * g - wb * wb).sqrt();
        let a = g / kappa;
        let mut prev_env = f64::INFINITY;
        for i in 1..=40 {
            let t = 0.5 * i as f64;
            let v = f00_real_closed(t, wb, g);
            let env = 0.5 * ((1.0 - a).abs() * ((kappa - g) * t).exp()
                + (1.0 + a) * (-(kappa + g) * t).exp());
            assert!(v.abs() <= env * (1.0 + 1e-12), "t={t}");
            assert!(env < prev_env);
            prev_env = env;
        }
        assert!(f00_real_closed(60.0, wb, g).abs() < 1e-6);
    }

    #[test]
    fn g_integral_zero_at_zero() {
        let r = g_integral(0.0, 1.0, 0.5).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.abs_error_estimate, 0.0);
    }

    #[test]
    fn g_integral_negative_at_small_times() {
        let r = g_integral(0.1, 1.0, 0.5).unwrap();
        assert!(r.value < 0.0, "G(0.1) = {}", r.value);
    }

    #[test]
    fn g_integral_matches_asymptote() {
        let r = g_integral(50.0, 1.0, 0.5).unwrap();
        let asym = g_asymptotic(50.0, 1.0, 0.5);
        assert!((asym - 1.0186e-5).abs() < 1e-9);
        assert!((r.value - asym).abs() / asym < 0.05, "G = {}", r.value);
    }

    #[test]
    fn asymptote_scales_as_t_cubed() {
        let a = g_asymptotic(7.0, 1.0, 0.5);
        let b = g_asymptotic(14.0, 1.0, 0.5);
        assert!((a / b - 8.0).abs() < 1e-12);
    }

    #[test]
    fn g_error_estimates_hold_against_tight_reference() {
        // tight references live on the half-period branch (t >= 1/(10 wb))
        for &t in &[0.3, 0.8, 6.0, 40.0] {
            let rough = g_integral(t, 1.5, 1.0).unwrap();
            let tight = g_integral_with_tol(t, 1.5, 1.0, 1e-12, 1e-10).unwrap();
            let dev = (rough.value - tight.value).abs();
            assert!(
                dev <= rough.abs_error_estimate.max(1e-12),
                "t={t}: dev {dev} vs claim {}",
                rough.abs_error_estimate
            );
        }
    }

    #[test]
    fn fig1_curve_is_stable_and_decays() {
        // underdamped sample set: decaying oscillation whose sign pattern and
        // extremum grid cells do not move when the error target halves
        let (wb, g) = (1.5, 1.0);
        let n = 151;
        let grid: Vec<f64> = (0..n).map(|i| 15.0 * i as f64 / (n - 1) as f64).collect();
        let coarse: Vec<f64> = grid.iter().map(|&t| g_integral(t, wb, g).unwrap().value).collect();
        let fine: Vec<f64> = grid
            .iter()
            .map(|&t| g_integral_with_tol(t, wb, g, 5e-9, 5e-7).unwrap().value)
            .collect();
        let mut sign_changes = 0;
        for i in 1..n {
            if coarse[i] != 0.0 && coarse[i - 1] != 0.0 {
                if coarse[i].signum() != coarse[i - 1].signum() {
                    sign_changes += 1;
                }
                assert_eq!(coarse[i].signum(), fine[i].signum(), "i={i}");
            }
            assert!((coarse[i] - fine[i]).abs() < 2e-8);
        }
        assert!(sign_changes >= 3, "oscillation expected, got {sign_changes}");
        let early_max = coarse[..30].iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
        let late_max = coarse[n - 30..].iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
        assert!(late_max < 0.2 * early_max, "decay expected");
    }

    #[test]
    fn f00_continuum_is_unit_at_zero_and_bounded() {
        let f = f00_continuum(0.0, 1.0, 0.5).unwrap();
        assert_eq!(f.value, Complex64::new(1.0, 0.0));
        for i in 1..=30 {
            let t = 0.5 * i as f64;
            let f = f00_continuum(t, 1.0, 0.5).unwrap();
            assert!(
                f.value.norm_sqr() <= 1.0 + f.leakage_bound + 1e-12,
                "t={t}: |f|^2 = {}",
                f.value.norm_sqr()
            );
        }
    }

    #[test]
    fn weak_asymptotic_formula_and_flags() {
        let spec = SuperpositionSpec::new(0.6, 0.0).unwrap();
        let (wb, g, t) = (1.0, 0.05, 60.0);
        let out = rho_weak_asymptotic(t, wb, g, &spec);
        assert!(out.valid);
        // pin the transcription
        let bracket = (wb * t).cos() - g / wb * (wb * t).sin();
        let expected_rho11 = 0.6
            * ((-2.0 * g * t).exp() * bracket * bracket
                + 64.0 * g * g / (PI * PI * t.powi(6)));
        assert!((out.state.rho11 - expected_rho11).abs() < 1e-12);
        let expected_coh = (0.6_f64 * 0.4).sqrt();
        let f_re = (-g * t).exp() * bracket;
        let f_im = 8.0 * g / (PI * t.powi(3));
        assert!((out.state.rho10 - Complex64::new(f_re, f_im) * expected_coh).norm_sqr().sqrt() < 1e-12);

        assert!(!rho_weak_asymptotic(60.0, 1.0, 0.5, &spec).valid);
        assert!(!rho_weak_asymptotic(2.0, 1.0, 0.05, &spec).valid);
    }

    #[test]
    fn strong_asymptotic_formula_and_exponent_ratio() {
        let spec = SuperpositionSpec::new(0.5, 1.0).unwrap();
        let (wb, g) = (1.0, 10.0);
        for &t in &[20.0, 40.0] {
            let out = rho_strong_asymptotic(t, wb, g, &spec);
            assert!(out.valid);
            let expected_rho11 =
                0.5 * ((-4.0 * g * t).exp() + 64.0 * g * g / (PI * PI * t.powi(6)));
            assert!((out.state.rho11 - expected_rho11).abs() < 1e-14);
            // coherence exponential is the square root of the population one
            let coh_exp = (-2.0 * g * t).exp();
            let pop_exp = (-4.0 * g * t).exp();
            assert!((coh_exp * coh_exp - pop_exp).abs() <= 1e-300);
        }
        assert!(!rho_strong_asymptotic(20.0, 1.0, 2.0, &spec).valid);
    }

    #[test]
    fn weak_crossover_time_is_finite_and_computable() {
        // e^{-2gt} = 64 g^2 / (pi^2 t^6) has a root; bisect it
        let g = 0.05;
        // positive while the exponential dominates, negative once the
        // power-law remnant takes over
        let h = |t: f64| -2.0 * g * t - (64.0 * g * g / (PI * PI)).ln() + 6.0 * t.ln();
        let (mut lo, mut hi) = (10.0, 1e4);
        assert!(h(lo) > 0.0 && h(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t_cross = 0.5 * (lo + hi);
        assert!(t_cross > 100.0 && t_cross < 1000.0, "t_cross = {t_cross}");
        // beyond the crossover the power-law term dominates
        let t = 1.2 * t_cross;
        assert!((-2.0 * g * t).exp() < 64.0 * g * g / (PI * PI * t.powi(6)));
    }

    #[test]
    fn vacuum_limit_of_asymptotics() {
        let spec = SuperpositionSpec::new(1e-12, 0.0);
        // xi -> 0 is outside the open interval; emulate with the smallest
        // admissible weight and check the elements scale away
        let spec = match spec {
            Ok(s) => s,
            Err(_) => SuperpositionSpec::new(1e-9, 0.0).unwrap(),
        };
        let out = rho_strong_asymptotic(30.0, 1.0, 10.0, &spec);
        assert!(out.state.rho11.abs() < 1e-9);
        assert!(out.state.rho10.norm_sqr().sqrt() < 1e-4);
        assert!((out.state.rho00 - 1.0).abs() < 1e-9);
    }
}
