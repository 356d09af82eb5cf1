//! Normal-mode frequencies of the coupled oscillator-field system.
//!
//! The eigenfrequency condition is transcendental, with cotangent poles at
//! every multiple of the mode spacing. Clearing the denominators gives a
//! function that is continuous on each pole interval, changes sign exactly
//! once there, and can be bracketed and refined reliably. All trigonometry
//! is evaluated in pole-relative coordinates so that roots crowding a pole
//! lose no precision.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::config::CavityConfig;
use crate::math;

/// How a [`Spectrum`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumMethod {
    /// Bracketed root finding on the cleared eigenfrequency condition.
    Exact,
    /// Small-cavity expansion of the roots, valid for `delta << 1`.
    SmallCavityAsymptotic,
}

/// Ordered normal-mode frequencies with per-root residual diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    frequencies: Vec<f64>,
    residuals: Vec<f64>,
    method: SpectrumMethod,
    delta_omega: f64,
}

impl Spectrum {
    /// Assemble a spectrum from precomputed frequencies.
    ///
    /// Intended for tests and for feeding externally produced mode lists into
    /// the coupling builder; the frequencies must be strictly increasing and
    /// positive. Residuals are recorded as NaN (unknown).
    pub fn from_parts(
        frequencies: Vec<f64>,
        method: SpectrumMethod,
        delta_omega: f64,
    ) -> Result<Self, SpectrumError> {
        if frequencies.is_empty() || frequencies[0] <= 0.0 {
            return Err(SpectrumError::NonPositiveLowestRoot {
                omega_bar: f64::NAN,
                coupling: f64::NAN,
                delta_omega,
            });
        }
        for w in frequencies.windows(2) {
            if w[1] <= w[0] {
                return Err(SpectrumError::BracketFailure { interval: 0 });
            }
        }
        let residuals = vec![f64::NAN; frequencies.len()];
        Ok(Self {
            frequencies,
            residuals,
            method,
            delta_omega,
        })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn method(&self) -> SpectrumMethod {
        self.method
    }

    pub fn delta_omega(&self) -> f64 {
        self.delta_omega
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Frequency of normal mode `r`.
    pub fn frequency(&self, r: usize) -> f64 {
        self.frequencies[r]
    }
}

/// Sub-points scanned per pole interval when isolating a sign change.
const SCAN_POINTS: usize = 64;
/// Bracket width at which refinement stops, relative to the root's
/// pole-relative coordinate. Tighter than the nominal 1e-12 contract;
/// roots crowding a pole keep full relative precision this way.
const REFINE_TOL: f64 = 1e-15;
const MAX_REFINE_ITER: usize = 160;

/// Residual ceiling for exact roots, in the cleared form's normalized metric.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Validity ceiling on `delta` for the small-cavity expansion.
pub const SMALL_CAVITY_DELTA_MAX: f64 = 0.2;

/// Denominator-cleared eigenfrequency function.
///
/// In pole-relative coordinates `theta = interval + phi` the function is
/// `q(phi) = 2 g Omega cos(pi phi) - (Omega^2 - omega_bar^2 + 2 g dw / pi)
/// sin(pi phi)` up to a per-interval sign that does not affect roots. It is
/// positive at the left end of every interval and negative at the right end.
struct Cleared {
    coupling: f64,
    delta_omega: f64,
    /// `2 g delta_omega / pi - omega_bar^2`
    shift: f64,
}

impl Cleared {
    fn new(config: &CavityConfig) -> Self {
        let delta_omega = config.delta_omega();
        let coupling = config.coupling();
        Self {
            coupling,
            delta_omega,
            shift: 2.0 * coupling * delta_omega / PI - config.omega_bar() * config.omega_bar(),
        }
    }

    #[inline]
    fn eval(&self, interval: usize, phi: f64) -> f64 {
        let omega = (interval as f64 + phi) * self.delta_omega;
        let (s, c) = math::sin_cos(PI * phi);
        2.0 * self.coupling * omega * c - (omega * omega + self.shift) * s
    }

    /// Magnitude scale of the cleared form's coefficients at `theta`,
    /// used to normalize residuals.
    fn scale(&self, theta: f64) -> f64 {
        let omega = theta * self.delta_omega;
        2.0 * self.coupling * omega + math::abs(omega * omega + self.shift)
    }
}

/// Solve the eigenfrequency condition exactly on every pole interval.
///
/// Returns `truncation + 1` strictly increasing roots. Each root is isolated
/// by a sign-change scan and refined with alternating bisection/secant steps
/// to near machine precision; the reported residual is the cleared-form value
/// at the root divided by the local coefficient scale.
pub fn solve_spectrum(config: &CavityConfig) -> Result<Spectrum, SpectrumError> {
    let cleared = Cleared::new(config);
    let n = config.truncation() + 1;
    let mut frequencies = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);

    for interval in 0..n {
        let (phi, q) = isolate_root(&cleared, interval).ok_or_else(|| {
            if interval == 0 {
                SpectrumError::NonPositiveLowestRoot {
                    omega_bar: cleared_omega_bar(&cleared),
                    coupling: config.coupling(),
                    delta_omega: config.delta_omega(),
                }
            } else {
                SpectrumError::BracketFailure { interval }
            }
        })?;
        let theta = interval as f64 + phi;
        frequencies.push(theta * config.delta_omega());
        residuals.push(math::abs(q) / cleared.scale(theta));
    }

    Ok(Spectrum {
        frequencies,
        residuals,
        method: SpectrumMethod::Exact,
        delta_omega: config.delta_omega(),
    })
}

fn cleared_omega_bar(cleared: &Cleared) -> f64 {
    math::sqrt(math::abs(
        2.0 * cleared.coupling * cleared.delta_omega / PI - cleared.shift,
    ))
}

/// Scan the interval for the sign change and refine it. Returns the root's
/// pole-relative coordinate and the cleared-form value there.
fn isolate_root(cleared: &Cleared, interval: usize) -> Option<(f64, f64)> {
    // Left-end value. For interval 0 the cleared form vanishes linearly at
    // theta = 0 with slope pi * omega_bar^2 > 0, so the sign is known without
    // an evaluation; for every other interval the value at the pole itself is
    // 2 g Omega > 0 in local coordinates.
    let mut lo = 0.0;
    let mut flo = if interval == 0 {
        None
    } else {
        Some(cleared.eval(interval, 0.0))
    };

    let step = 1.0 / SCAN_POINTS as f64;
    for i in 1..=SCAN_POINTS {
        let phi = i as f64 * step;
        let f = cleared.eval(interval, phi);
        if f == 0.0 {
            return Some((phi, f));
        }
        if f < 0.0 {
            return Some(refine(cleared, interval, lo, phi, flo, f));
        }
        lo = phi;
        flo = Some(f);
    }
    None
}

/// Safeguarded hybrid refinement: secant proposals alternate with bisection,
/// and any proposal outside the open bracket falls back to bisection.
fn refine(
    cleared: &Cleared,
    interval: usize,
    mut lo: f64,
    mut hi: f64,
    mut flo: Option<f64>,
    mut fhi: f64,
) -> (f64, f64) {
    let mut best = (hi, fhi);
    for iter in 0..MAX_REFINE_ITER {
        let width = hi - lo;
        if width <= REFINE_TOL * hi {
            break;
        }
        let mid = match flo {
            Some(fl) if iter % 2 == 1 && fl != fhi => {
                let m = hi - fhi * width / (fhi - fl);
                let guard = 1e-3 * width;
                if m > lo + guard && m < hi - guard {
                    m
                } else {
                    lo + 0.5 * width
                }
            }
            _ => lo + 0.5 * width,
        };
        if mid <= lo || mid >= hi {
            break; // float exhaustion
        }
        let fm = cleared.eval(interval, mid);
        if math::abs(fm) <= math::abs(best.1) {
            best = (mid, fm);
        }
        if fm > 0.0 {
            lo = mid;
            flo = Some(fm);
        } else if fm < 0.0 {
            hi = mid;
            fhi = fm;
        } else {
            return (mid, 0.0);
        }
    }
    best
}

/// Small-cavity expansion of the spectrum.
///
/// Valid when `delta` is small and `delta < 2 g^2 / (pi omega_bar^2)`, which
/// together place the oscillator mode below the first field mode. The lowest
/// root comes out as `omega_bar / sqrt(1 + 2 pi delta / 3)` and the field
/// roots sit just above their poles at `delta_omega (k + 2 delta / (pi k))`.
pub fn small_cavity_spectrum(config: &CavityConfig) -> Result<Spectrum, SpectrumError> {
    let (delta_omega, delta) = config.derived_params();
    let omega_bar = config.omega_bar();
    let g = config.coupling();
    let condition = 2.0 * g * g / (PI * omega_bar * omega_bar);
    let limit = if SMALL_CAVITY_DELTA_MAX < condition {
        SMALL_CAVITY_DELTA_MAX
    } else {
        condition
    };
    if !(delta <= SMALL_CAVITY_DELTA_MAX && delta < condition) {
        return Err(SpectrumError::DeltaOutOfRange { delta, limit });
    }

    let cleared = Cleared::new(config);
    let n = config.truncation() + 1;
    let mut frequencies = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);

    let omega0 = omega_bar / math::sqrt(1.0 + 2.0 * PI * delta / 3.0);
    let theta0 = omega0 / delta_omega;
    frequencies.push(omega0);
    residuals.push(math::abs(cleared.eval(0, theta0)) / cleared.scale(theta0));

    for k in 1..n {
        let phi = 2.0 * delta / (PI * k as f64);
        frequencies.push(delta_omega * (k as f64 + phi));
        residuals.push(math::abs(cleared.eval(k, phi)) / cleared.scale(k as f64 + phi));
    }

    Ok(Spectrum {
        frequencies,
        residuals,
        method: SpectrumMethod::SmallCavityAsymptotic,
        delta_omega,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumError {
    /// No sign change found inside a pole interval. Signals a formulation or
    /// tolerance bug, not a physical regime.
    BracketFailure { interval: usize },
    /// The search below the first pole failed.
    NonPositiveLowestRoot {
        omega_bar: f64,
        coupling: f64,
        delta_omega: f64,
    },
    /// The small-cavity expansion was requested outside its validity range.
    DeltaOutOfRange { delta: f64, limit: f64 },
}

impl fmt::Display for SpectrumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumError::BracketFailure { interval } => {
                write!(f, "no sign change in pole interval {interval}")
            }
            SpectrumError::NonPositiveLowestRoot {
                omega_bar,
                coupling,
                delta_omega,
            } => write!(
                f,
                "no root below the first pole (omega_bar={omega_bar}, coupling={coupling}, \
                 delta_omega={delta_omega})"
            ),
            SpectrumError::DeltaOutOfRange { delta, limit } => write!(
                f,
                "delta={delta} outside the small-cavity validity range (limit {limit})"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SpectrumError {}
