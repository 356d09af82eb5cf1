//! Dressed-state amplitudes, the reduced 2x2 density matrix, and its
//! impurity.
//!
//! The whole reduced state of the oscillator is driven by the survival
//! amplitude `f00(t)`: populations go as `xi |f00|^2`, coherences carry
//! `f00` itself, and the impurity is an algebraic function of `|f00|^2`.
//! Evaluation at different times is stateless and order-independent.

use core::f64::consts::TAU;
use core::fmt;

use num_complex::Complex64;

use crate::coupling::CouplingTable;
use crate::math;
use crate::sum::CompensatedComplex;

/// Which evaluation route produced a survival amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeMethod {
    ModeSum,
    Continuum,
    SmallCavity,
}

impl AmplitudeMethod {
    /// Stable lowercase label for CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            AmplitudeMethod::ModeSum => "mode_sum",
            AmplitudeMethod::Continuum => "continuum",
            AmplitudeMethod::SmallCavity => "small_cavity",
        }
    }
}

/// `f00(t)` with provenance and a truncation/error allowance.
///
/// `leakage_bound` is the slack on the unitarity bound: the contract is
/// `|value|^2 <= 1 + leakage_bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalAmplitude {
    pub t: f64,
    pub value: Complex64,
    pub method: AmplitudeMethod,
    pub leakage_bound: f64,
}

impl SurvivalAmplitude {
    pub fn abs_sqr(&self) -> f64 {
        self.value.norm_sqr()
    }
}

/// Initial superposition `sqrt(xi) |excited> + sqrt(1 - xi) e^{i phi} |ground>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionSpec {
    xi: f64,
    phi: f64,
}

impl SuperpositionSpec {
    /// `xi` must lie strictly inside (0, 1); `phi` is reduced to [0, 2 pi).
    pub fn new(xi: f64, phi: f64) -> Result<Self, EvolutionError> {
        if !(xi > 0.0 && xi < 1.0) {
            return Err(EvolutionError::InvalidSuperposition { xi });
        }
        let mut phi = phi % TAU;
        if phi < 0.0 {
            phi += TAU;
        }
        Ok(Self { xi, phi })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Reduced density matrix of the oscillator at one instant.
///
/// Constructed so that `rho00 + rho11 = 1` holds exactly and `rho01` is
/// always the conjugate of `rho10`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub t: f64,
    pub rho00: f64,
    pub rho11: f64,
    pub rho10: Complex64,
    /// Impurity `D = 1 - Tr(rho^2) = 2 xi^2 |f00|^2 (1 - |f00|^2)`.
    pub impurity: f64,
}

impl ReducedState {
    pub fn rho01(&self) -> Complex64 {
        self.rho10.conj()
    }

    pub fn trace(&self) -> f64 {
        self.rho00 + self.rho11
    }

    /// `Tr(rho^2)` from all four matrix elements.
    pub fn purity(&self) -> f64 {
        self.rho00 * self.rho00 + self.rho11 * self.rho11 + 2.0 * self.rho10.norm_sqr()
    }

    /// Determinant; non-negative (within rounding) for a physical state.
    pub fn det(&self) -> f64 {
        self.rho00 * self.rho11 - self.rho10.norm_sqr()
    }
}

/// Amplitude `f(mu -> nu)(t) = sum_s t(mu,s) t(nu,s) e^{-i Omega_s t}`.
///
/// Summed in ascending mode order with compensated accumulation, so results
/// are bit-reproducible.
pub fn f_amplitude(
    mu: usize,
    nu: usize,
    t: f64,
    table: &CouplingTable,
) -> Result<Complex64, EvolutionError> {
    let len = table.truncation() + 1;
    if mu >= len || nu >= len {
        let index = if mu >= len { mu } else { nu };
        return Err(EvolutionError::IndexOutOfRange { index, len });
    }
    let mut acc = CompensatedComplex::new();
    for (s, &omega) in table.frequencies().iter().enumerate() {
        let w = table.t(mu, s) * table.t(nu, s);
        let (sin, cos) = math::sin_cos(omega * t);
        acc.add(Complex64::new(w * cos, -w * sin));
    }
    Ok(acc.value())
}

/// Survival amplitude of the first excited level by exact mode summation.
///
/// The leakage bound is the particle-row normalization defect of the table;
/// by the triangle inequality the modulus can never exceed `1` minus that
/// defect, so the unitarity contract holds by construction.
pub fn f00_mode_sum(t: f64, table: &CouplingTable) -> SurvivalAmplitude {
    let mut acc = CompensatedComplex::new();
    for (s, &omega) in table.frequencies().iter().enumerate() {
        let w = table.t0(s);
        let w2 = w * w;
        let (sin, cos) = math::sin_cos(omega * t);
        acc.add(Complex64::new(w2 * cos, -w2 * sin));
    }
    SurvivalAmplitude {
        t,
        value: acc.value(),
        method: AmplitudeMethod::ModeSum,
        leakage_bound: table.particle_row_defect(),
    }
}

/// Assemble the reduced density matrix from a survival amplitude.
pub fn reduced_density(
    f00: &SurvivalAmplitude,
    spec: &SuperpositionSpec,
) -> Result<ReducedState, EvolutionError> {
    let p = f00.value.norm_sqr();
    let allowed = 1.0 + f00.leakage_bound + 16.0 * f64::EPSILON;
    if p > allowed {
        return Err(EvolutionError::ContractViolation {
            abs_sqr: p,
            allowed,
        });
    }
    Ok(reduced_density_unchecked(f00.t, f00.value, spec))
}

/// Same assembly without the amplitude-contract check; used for asymptotic
/// forms whose validity is reported through flags instead of errors.
pub(crate) fn reduced_density_unchecked(
    t: f64,
    f00: Complex64,
    spec: &SuperpositionSpec,
) -> ReducedState {
    let xi = spec.xi;
    let p = f00.norm_sqr();
    let rho11 = xi * p;
    let (sin_phi, cos_phi) = math::sin_cos(spec.phi);
    let coherence = math::sqrt(xi * (1.0 - xi));
    let rho10 = Complex64::new(cos_phi, -sin_phi) * coherence * f00;
    ReducedState {
        t,
        rho00: 1.0 - rho11,
        rho11,
        rho10,
        impurity: 2.0 * xi * xi * p * (1.0 - p),
    }
}

/// Residuals of the two algebraic identities the impurity must satisfy:
/// `D = 2 rho11 (xi - rho11)` and `D = 1 - Tr(rho^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpurityDefects {
    pub vs_population_form: f64,
    pub vs_trace_form: f64,
}

impl ImpurityDefects {
    pub fn max(&self) -> f64 {
        if self.vs_population_form > self.vs_trace_form {
            self.vs_population_form
        } else {
            self.vs_trace_form
        }
    }
}

pub fn impurity_identity_check(state: &ReducedState, spec: &SuperpositionSpec) -> ImpurityDefects {
    let d_pop = 2.0 * state.rho11 * (spec.xi - state.rho11);
    let d_trace = 1.0 - state.purity();
    ImpurityDefects {
        vs_population_form: math::abs(state.impurity - d_pop),
        vs_trace_form: math::abs(state.impurity - d_trace),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvolutionError {
    IndexOutOfRange { index: usize, len: usize },
    InvalidSuperposition { xi: f64 },
    /// The amplitude breaches its own unitarity allowance, which signals an
    /// upstream truncation or quadrature failure.
    ContractViolation { abs_sqr: f64, allowed: f64 },
}

impl fmt::Display for EvolutionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvolutionError::IndexOutOfRange { index, len } => {
                write!(f, "mode index {index} out of range for {len} modes")
            }
            EvolutionError::InvalidSuperposition { xi } => {
                write!(f, "xi = {xi} must lie strictly between 0 and 1")
            }
            EvolutionError::ContractViolation { abs_sqr, allowed } => write!(
                f,
                "|f00|^2 = {abs_sqr} exceeds the allowed bound {allowed}"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EvolutionError {}
