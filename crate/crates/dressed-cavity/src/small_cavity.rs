//! Small-cavity expansion: approximate couplings and survival amplitude,
//! the oscillating excited-level population with its analytic lower bound,
//! and the dissipative/nondissipative classifier.
//!
//! For `delta = g / delta_omega` small the excitation stays concentrated on
//! the oscillator: the mode weights decay as `1/k^2`, so the population can
//! never fall below an analytic floor and the system keeps exchanging quanta
//! with the field without dissipating.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::config::CavityConfig;
use crate::continuum::f00_continuum;
use crate::coupling::{build_couplings, CouplingTable};
use crate::evolution::{f00_mode_sum, AmplitudeMethod, SurvivalAmplitude};
use crate::math;
use crate::spectrum::{small_cavity_spectrum, solve_spectrum, SpectrumError};
use crate::sum::{Compensated, CompensatedComplex};

/// Default mode count for the small-cavity sums; the `1/k^2` weights leave a
/// tail below `4 delta / (pi K)`.
pub const DEFAULT_MODEL_TRUNCATION: usize = 1000;

/// Small-cavity model: normalization-derived weights plus the asymptotic
/// spectrum.
///
/// The oscillator weight comes from the normalization condition rather than
/// from expanding the closed-form matrix element, which would break the
/// `|f00| <= 1` requirement.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallCavityModel {
    delta: f64,
    omega_bar: f64,
    coupling: f64,
    truncation: usize,
    weight0: f64,
    frequencies: Vec<f64>,
    tail_weight: f64,
}

impl SmallCavityModel {
    pub fn new(
        omega_bar: f64,
        coupling: f64,
        delta: f64,
        truncation: usize,
    ) -> Result<Self, SpectrumError> {
        let config = CavityConfig::from_delta(omega_bar, coupling, delta, truncation)
            .map_err(|_| SpectrumError::DeltaOutOfRange { delta, limit: 0.0 })?;
        Self::from_config(&config)
    }

    /// Build from a full cavity configuration (same validity conditions as
    /// [`small_cavity_spectrum`]).
    pub fn from_config(config: &CavityConfig) -> Result<Self, SpectrumError> {
        let spectrum = small_cavity_spectrum(config)?;
        let delta = config.delta();
        let truncation = config.truncation();
        let weight0 = 1.0 / (1.0 + 2.0 * PI * delta / 3.0);
        let tail = PI * PI / 6.0 - zeta2_partial(truncation);
        Ok(Self {
            delta,
            omega_bar: config.omega_bar(),
            coupling: config.coupling(),
            truncation,
            weight0,
            frequencies: spectrum.frequencies().to_vec(),
            tail_weight: weight0 * 4.0 * delta / PI * tail,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn omega_bar(&self) -> f64 {
        self.omega_bar
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// `(t00)^2 ~ (1 + 2 pi delta / 3)^{-1}` from the normalization condition.
    pub fn weight0(&self) -> f64 {
        self.weight0
    }

    /// Relative field weight `(tk0)^2 / (t00)^2 ~ 4 delta / (pi k^2)`.
    pub fn mode_weight(&self, k: usize) -> f64 {
        4.0 * self.delta / (PI * (k * k) as f64)
    }

    /// Asymptotic normal-mode frequencies, oscillator mode first.
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// Probability weight beyond the retained modes.
    pub fn tail_weight(&self) -> f64 {
        self.tail_weight
    }
}

/// Partial sum of `1/k^2`, accumulated small-terms-first.
fn zeta2_partial(k_max: usize) -> f64 {
    let mut acc = Compensated::new();
    for k in (1..=k_max).rev() {
        let kf = k as f64;
        acc.add(1.0 / (kf * kf));
    }
    acc.value()
}

/// Small-cavity survival amplitude:
/// `w0 [ e^{-i Omega_0 t} + sum_k (4 delta / pi k^2) e^{-i Omega_k t} ]`.
pub fn f00_small(t: f64, model: &SmallCavityModel) -> SurvivalAmplitude {
    let mut acc = CompensatedComplex::new();
    let (sin0, cos0) = math::sin_cos(model.frequencies[0] * t);
    acc.add(Complex64::new(cos0, -sin0));
    for k in 1..=model.truncation {
        let w = model.mode_weight(k);
        let (sin, cos) = math::sin_cos(model.frequencies[k] * t);
        acc.add(Complex64::new(w * cos, -w * sin));
    }
    SurvivalAmplitude {
        t,
        value: acc.value() * model.weight0,
        method: AmplitudeMethod::SmallCavity,
        leakage_bound: model.tail_weight,
    }
}

/// Excited-level population by the explicit double cosine sum.
///
/// This is the printed expansion of `xi |f00|^2`: a single sum beating the
/// oscillator mode against each field mode plus a double sum over field-mode
/// pairs with cross frequency `(g/delta - 2g/(pi k l))(k - l)`. It must agree
/// with `xi * |f00_small|^2` to machine precision; the production paths use
/// that cheaper form, and the agreement is what certifies this transcription.
pub fn rho11_small(t: f64, model: &SmallCavityModel, xi: f64) -> f64 {
    let delta = model.delta;
    let g = model.coupling;
    let omega0 = model.frequencies[0];
    let k_max = model.truncation;

    let mut single = Compensated::new();
    for k in 1..=k_max {
        let kf = k as f64;
        let omega_k = model.frequencies[k];
        single.add(math::cos((omega0 - omega_k) * t) / (kf * kf));
    }

    let mut double = Compensated::new();
    for k in 1..=k_max {
        let kf = k as f64;
        for l in 1..=k_max {
            let lf = l as f64;
            let freq = (g / delta - 2.0 * g / (PI * kf * lf)) * (kf - lf);
            double.add(math::cos(freq * t) / (kf * kf * lf * lf));
        }
    }

    let bracket = 1.0
        + 8.0 * delta / PI * single.value()
        + 16.0 * delta * delta / (PI * PI) * double.value();
    xi * model.weight0 * model.weight0 * bracket
}

/// Analytic floor of the excited-level population:
/// `xi (1 - 8 pi delta / 3 + 8 pi^2 delta^2 / 9)`.
pub fn rho11_lower_bound(delta: f64, xi: f64) -> f64 {
    xi * (1.0 - 8.0 * PI * delta / 3.0 + 8.0 * PI * PI * delta * delta / 9.0)
}

/// Result of a population minimization over a probe horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizationResult {
    pub t_at_min: f64,
    pub min_value: f64,
    pub grid_points: usize,
}

/// Minimum of `xi |f00_small|^2` over `[0, horizon]`: dense grid plus
/// golden-section refinement around the best cell. Ties resolve to the
/// earlier time.
pub fn minimize_rho11(
    model: &SmallCavityModel,
    xi: f64,
    horizon: f64,
    grid_points: usize,
) -> MinimizationResult {
    minimize_scalar(
        |t| xi * f00_small(t, model).abs_sqr(),
        horizon,
        grid_points,
    )
}

/// Same minimization against the exact mode-sum path.
pub fn minimize_rho11_exact(
    table: &CouplingTable,
    xi: f64,
    horizon: f64,
    grid_points: usize,
) -> MinimizationResult {
    minimize_scalar(
        |t| xi * f00_mode_sum(t, table).abs_sqr(),
        horizon,
        grid_points,
    )
}

fn minimize_scalar(f: impl Fn(f64) -> f64, horizon: f64, grid_points: usize) -> MinimizationResult {
    let n = grid_points.max(2);
    let step = horizon / (n - 1) as f64;
    let mut best_t = 0.0;
    let mut best = f(0.0);
    for i in 1..n {
        let t = i as f64 * step;
        let v = f(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }

    // golden-section sweep of the winning cell and its neighbors
    let mut lo = (best_t - step).max(0.0);
    let mut hi = (best_t + step).min(horizon);
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if hi - lo < 1e-12 * (1.0 + hi) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let (t_ref, v_ref) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if v_ref < best {
        best = v_ref;
        best_t = t_ref;
    }
    MinimizationResult {
        t_at_min: best_t,
        min_value: best,
        grid_points: n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Dissipative,
    Nondissipative,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Dissipative => "dissipative",
            Verdict::Nondissipative => "nondissipative",
        }
    }
}

/// What a classification verdict rests on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evidence {
    /// Small-cavity regime: the analytic population floor (per unit `xi`).
    /// `asymptotic_condition_met` records whether the stricter expansion
    /// condition `delta < 2 g^2 / (pi omega_bar^2)` also holds.
    SmallCavityBound {
        delta: f64,
        bound_over_xi: f64,
        asymptotic_condition_met: bool,
    },
    /// Continuum regime: sampled late-time population (per unit `xi`).
    ContinuumDecay {
        probe_time: f64,
        rho11_over_xi_at_probe: f64,
    },
    /// Neither expansion applies; measured population minimum vs a floor.
    Empirical {
        min_rho11_over_xi: f64,
        floor: f64,
        horizon: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub evidence: Evidence,
}

/// Thresholds and probe parameters for [`dissipation_classifier`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierSettings {
    /// `delta` at or below this classifies as small-cavity.
    pub small_delta_max: f64,
    /// `delta` at or above this classifies as continuum-like.
    pub continuum_delta_min: f64,
    /// Population floor (per unit `xi`) separating the empirical verdicts.
    pub empirical_floor: f64,
    /// Probe horizon in units of `1/omega_bar`.
    pub probe_horizon: f64,
    /// Grid points of the empirical minimization.
    pub probe_grid: usize,
}

impl Default for ClassifierSettings {
    fn default() -> Self {
        Self {
            small_delta_max: 0.2,
            continuum_delta_min: 10.0,
            empirical_floor: 1e-2,
            probe_horizon: 1e3,
            probe_grid: 20_000,
        }
    }
}

/// Decide whether a configuration dissipates its excitation.
///
/// Small `delta` gives the nondissipative verdict backed by the analytic
/// floor; large `delta` gives the dissipative verdict backed by a sampled
/// late-time continuum population; anything between is measured directly on
/// the exact mode-sum path and labeled empirical.
pub fn dissipation_classifier(
    config: &CavityConfig,
    settings: &ClassifierSettings,
) -> Result<Classification, SpectrumError> {
    let delta = config.delta();
    let omega_bar = config.omega_bar();
    let g = config.coupling();

    if delta <= settings.small_delta_max {
        let condition = delta < 2.0 * g * g / (PI * omega_bar * omega_bar);
        return Ok(Classification {
            verdict: Verdict::Nondissipative,
            evidence: Evidence::SmallCavityBound {
                delta,
                bound_over_xi: rho11_lower_bound(delta, 1.0),
                asymptotic_condition_met: condition,
            },
        });
    }

    if delta >= settings.continuum_delta_min {
        let probe_time = 20.0 / g;
        let rho11_over_xi = f00_continuum(probe_time, omega_bar, g)
            .map(|f| f.abs_sqr())
            .unwrap_or(f64::NAN);
        return Ok(Classification {
            verdict: Verdict::Dissipative,
            evidence: Evidence::ContinuumDecay {
                probe_time,
                rho11_over_xi_at_probe: rho11_over_xi,
            },
        });
    }

    let spectrum = solve_spectrum(config)?;
    let table = build_couplings(config, &spectrum)
        .map_err(|_| SpectrumError::BracketFailure { interval: 0 })?;
    let horizon = settings.probe_horizon / omega_bar;
    let min = minimize_rho11_exact(&table, 1.0, horizon, settings.probe_grid);
    let verdict = if min.min_value > settings.empirical_floor {
        Verdict::Nondissipative
    } else {
        Verdict::Dissipative
    };
    Ok(Classification {
        verdict,
        evidence: Evidence::Empirical {
            min_rho11_over_xi: min.min_value,
            floor: settings.empirical_floor,
            horizon,
        },
    })
}
