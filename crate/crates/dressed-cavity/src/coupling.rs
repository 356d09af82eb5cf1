//! Principal-axis transformation: oscillator/field weights of every normal
//! mode, the renormalized-coordinate coefficients, and dressed-state overlap
//! amplitudes.

use alloc::vec::Vec;
use core::fmt;

use crate::config::CavityConfig;
use crate::math;
use crate::spectrum::Spectrum;
use crate::sum::Compensated;

/// Columns beyond this truncation get an analytic tail estimate instead of a
/// measured normalization defect (the measured sweep is O(K^2)).
const MEASURED_DEFECT_MAX: usize = 4096;

/// Terms summed explicitly before switching to the integral tail estimate.
const TAIL_EXPLICIT_TERMS: usize = 64;

/// Relative distance to a cotangent pole below which the field weight
/// `1 / (omega_k^2 - Omega_r^2)` is no longer resolvable in f64. Genuine
/// roots always sit strictly inside their interval, so only hand-fed or
/// inconsistent spectra trip this.
const DEGENERACY_REL_TOL: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CouplingOptions {
    /// Keep the `eta^2/2 (3 Omega^2 - omega_bar^2)` term of the closed-form
    /// oscillator weight. It is essential away from the continuum limit (the
    /// weight diverges as the coupling vanishes without it) and only becomes
    /// negligible as the mode spacing goes to zero.
    pub include_eta_correction: bool,
}

impl Default for CouplingOptions {
    fn default() -> Self {
        Self {
            include_eta_correction: true,
        }
    }
}

/// Transformation-matrix data for a solved spectrum.
///
/// Stores the oscillator row `t0[r]` explicitly; the field entries
/// `tk(k, r)` follow from a closed form and are generated on demand, which
/// keeps the table O(K) in memory even for very large truncations.
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTable {
    eta: f64,
    omega_bar: f64,
    coupling: f64,
    delta_omega: f64,
    truncation: usize,
    frequencies: Vec<f64>,
    t0: Vec<f64>,
    column_defects: Vec<f64>,
    defects_measured: bool,
    particle_row_defect: f64,
}

impl CouplingTable {
    /// Number of retained field modes `K`.
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn omega_bar(&self) -> f64 {
        self.omega_bar
    }

    pub fn delta_omega(&self) -> f64 {
        self.delta_omega
    }

    /// Normal-mode frequencies the table was built for.
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// Oscillator weight `t0[r]` (positive by convention).
    pub fn t0(&self, r: usize) -> f64 {
        self.t0[r]
    }

    /// Field weight of mode `k` (1-based) in normal mode `r`. The sign is
    /// inherited from `1 / (omega_k^2 - Omega_r^2)`.
    pub fn tk(&self, k: usize, r: usize) -> f64 {
        let omega_k = k as f64 * self.delta_omega;
        let omega_r = self.frequencies[r];
        self.eta * omega_k / ((omega_k - omega_r) * (omega_k + omega_r)) * self.t0[r]
    }

    /// Matrix element for row `mu` (0 = oscillator, `k >= 1` = field mode).
    pub fn t(&self, mu: usize, r: usize) -> f64 {
        if mu == 0 {
            self.t0[r]
        } else {
            self.tk(mu, r)
        }
    }

    /// Full row `mu` over all normal modes.
    pub fn row(&self, mu: usize) -> Vec<f64> {
        (0..self.frequencies.len()).map(|r| self.t(mu, r)).collect()
    }

    /// Squared oscillator weight of the lowest normal mode, the probability
    /// that the dressed excitation sits on the oscillator.
    pub fn t00_squared(&self) -> f64 {
        self.t0[0] * self.t0[0]
    }

    /// Per-column normalization defect `|1 - sum_mu t(mu, r)^2|`, measured
    /// when the truncation is modest and estimated from the analytic 1/k^2
    /// tail otherwise (see [`CouplingTable::defects_measured`]).
    pub fn column_defect(&self, r: usize) -> f64 {
        self.column_defects[r]
    }

    pub fn column_defects(&self) -> &[f64] {
        &self.column_defects
    }

    /// True if the recorded column defects came from an explicit sum over
    /// retained modes rather than the tail estimate.
    pub fn defects_measured(&self) -> bool {
        self.defects_measured
    }

    /// Sum of all column defects; bounds the truncation error of unitarity
    /// sums together with the particle-row defect.
    pub fn total_column_defect(&self) -> f64 {
        let mut acc = Compensated::new();
        for &d in &self.column_defects {
            acc.add(d);
        }
        acc.value()
    }

    /// `|1 - sum_r t0[r]^2|`: how much excitation probability the retained
    /// normal modes fail to account for.
    pub fn particle_row_defect(&self) -> f64 {
        self.particle_row_defect
    }

    /// Row-`mu` normalization defect `|1 - sum_r t(mu, r)^2|`, computed on
    /// demand in O(K).
    pub fn row_defect(&self, mu: usize) -> f64 {
        if mu == 0 {
            return self.particle_row_defect;
        }
        let mut acc = Compensated::new();
        for r in 0..self.frequencies.len() {
            let t = self.tk(mu, r);
            acc.add(t * t);
        }
        math::abs(1.0 - acc.value())
    }

    /// Explicitly measured column defect, regardless of table size. O(K).
    pub fn measured_column_defect(&self, r: usize) -> f64 {
        let mut acc = Compensated::new();
        acc.add(self.t0[r] * self.t0[r]);
        for k in 1..=self.truncation {
            let t = self.tk(k, r);
            acc.add(t * t);
        }
        math::abs(1.0 - acc.value())
    }
}

/// Build the coupling table from the closed-form matrix elements.
pub fn build_couplings(
    config: &CavityConfig,
    spectrum: &Spectrum,
) -> Result<CouplingTable, CouplingError> {
    build_couplings_with(config, spectrum, CouplingOptions::default())
}

pub fn build_couplings_with(
    config: &CavityConfig,
    spectrum: &Spectrum,
    options: CouplingOptions,
) -> Result<CouplingTable, CouplingError> {
    let k_trunc = config.truncation();
    if spectrum.len() != k_trunc + 1 {
        return Err(CouplingError::SpectrumMismatch {
            expected: k_trunc + 1,
            got: spectrum.len(),
        });
    }

    let eta = config.eta();
    let eta2 = eta * eta;
    let omega_bar = config.omega_bar();
    let wb2 = omega_bar * omega_bar;
    let g = config.coupling();
    let delta_omega = config.delta_omega();

    // Guard against normal modes pinned onto a cotangent pole: the field
    // weights there divide by omega_k^2 - Omega_r^2.
    for (r, &omega) in spectrum.frequencies().iter().enumerate() {
        let theta = omega / delta_omega;
        let k_near = math::floor(theta + 0.5) as usize;
        if k_near >= 1 && k_near <= k_trunc {
            let omega_k = k_near as f64 * delta_omega;
            if math::abs(omega_k * omega_k - omega * omega)
                <= DEGENERACY_REL_TOL * omega_k * omega_k
            {
                return Err(CouplingError::ResonanceDegeneracy { mode: k_near, root: r });
            }
        }
    }

    let mut t0 = Vec::with_capacity(k_trunc + 1);
    for &omega in spectrum.frequencies() {
        let w2 = omega * omega;
        let detune = w2 - wb2;
        let mut denom = detune * detune + 4.0 * g * g * w2;
        if options.include_eta_correction {
            denom += 0.5 * eta2 * (3.0 * w2 - wb2);
        }
        t0.push(eta * omega / math::sqrt(denom));
    }

    let mut row_acc = Compensated::new();
    for &w in &t0 {
        row_acc.add(w * w);
    }
    let particle_row_defect = math::abs(1.0 - row_acc.value());

    let table = CouplingTable {
        eta,
        omega_bar,
        coupling: g,
        delta_omega,
        truncation: k_trunc,
        frequencies: spectrum.frequencies().to_vec(),
        t0,
        column_defects: Vec::new(),
        defects_measured: false,
        particle_row_defect,
    };

    let measured = k_trunc <= MEASURED_DEFECT_MAX;
    let column_defects = if measured {
        (0..=k_trunc).map(|r| table.measured_column_defect(r)).collect()
    } else {
        (0..=k_trunc).map(|r| column_tail_estimate(&table, r)).collect()
    };

    Ok(CouplingTable {
        column_defects,
        defects_measured: measured,
        ..table
    })
}

/// Tail estimate of the column-`r` defect: the first few dropped terms
/// summed explicitly, then the smooth remainder integrated.
fn column_tail_estimate(table: &CouplingTable, r: usize) -> f64 {
    let omega = table.frequencies[r];
    let dw = table.delta_omega;
    let scale = table.eta * table.t0[r];
    let mut acc = Compensated::new();
    for k in table.truncation + 1..=table.truncation + TAIL_EXPLICIT_TERMS {
        let omega_k = k as f64 * dw;
        let t = scale * omega_k / ((omega_k - omega) * (omega_k + omega));
        acc.add(t * t);
    }
    // integral of (scale * w / (w^2 - Omega^2))^2 from w_lo to infinity
    let w_lo = (table.truncation + TAIL_EXPLICIT_TERMS) as f64 * dw + 0.5 * dw;
    let integral = w_lo / (2.0 * (w_lo * w_lo - omega * omega))
        + math::ln((w_lo + omega) / (w_lo - omega)) / (4.0 * omega);
    acc.add(scale * scale * integral / dw);
    acc.value()
}

/// Renormalized-coordinate coefficients `alpha[mu][nu]`.
///
/// Dense `(K+1)^2` storage; intended for modest truncations (diagnostics,
/// decoupling-limit checks), not for the large mode counts used in evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl AlphaMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.data[mu * self.dim + nu]
    }
}

/// Build `alpha[mu][nu] = sum_r t(mu,r) t(nu,r) sqrt(Omega_r / bare(mu))`
/// where `bare(0)` is the oscillator frequency and `bare(k)` the k-th field
/// frequency. The transformation is intentionally not orthogonal.
pub fn alpha_matrix(
    config: &CavityConfig,
    spectrum: &Spectrum,
    table: &CouplingTable,
) -> AlphaMatrix {
    let dim = spectrum.len();
    let sqrt_omega: Vec<f64> = spectrum.frequencies().iter().map(|&w| math::sqrt(w)).collect();
    let rows: Vec<Vec<f64>> = (0..dim).map(|mu| table.row(mu)).collect();

    let mut data = Vec::with_capacity(dim * dim);
    for mu in 0..dim {
        let bare = if mu == 0 {
            config.omega_bar()
        } else {
            config.field_frequency(mu)
        };
        let inv_sqrt_bare = 1.0 / math::sqrt(bare);
        for nu in 0..dim {
            let mut acc = Compensated::new();
            for r in 0..dim {
                acc.add(rows[mu][r] * rows[nu][r] * sqrt_omega[r]);
            }
            data.push(acc.value() * inv_sqrt_bare);
        }
    }
    AlphaMatrix { dim, data }
}

/// Overlap amplitude between the dressed state with `n` quanta in dressed
/// oscillator `mu` and the eigenstate with occupation numbers `occupations`
/// over the normal modes: a multinomial weight times the corresponding
/// product of matrix elements.
pub fn overlap_coefficient(
    table: &CouplingTable,
    mu: usize,
    n: u32,
    occupations: &[u32],
) -> Result<f64, OverlapError> {
    if mu > table.truncation() {
        return Err(OverlapError::IndexOutOfRange {
            index: mu,
            len: table.truncation() + 1,
        });
    }
    if occupations.len() > table.truncation() + 1 {
        return Err(OverlapError::IndexOutOfRange {
            index: occupations.len(),
            len: table.truncation() + 1,
        });
    }
    let total: u64 = occupations.iter().map(|&l| l as u64).sum();
    if total != n as u64 {
        return Err(OverlapError::OccupationMismatch { n, total });
    }
    if n > 20 {
        return Err(OverlapError::OverflowGuard { n });
    }

    // exact multinomial n! / prod(l_r!) built as a product of binomials
    let mut coeff: u128 = 1;
    let mut placed: u128 = 0;
    for &l in occupations {
        for i in 1..=l as u128 {
            placed += 1;
            coeff = coeff * placed / i;
        }
    }

    let mut amp = math::sqrt(coeff as f64);
    for (r, &l) in occupations.iter().enumerate() {
        if l == 0 {
            continue;
        }
        let t = table.t(mu, r);
        for _ in 0..l {
            amp *= t;
        }
    }
    Ok(amp)
}

#[derive(Debug, Clone, PartialEq)]
pub enum CouplingError {
    /// The spectrum does not match the configuration's truncation.
    SpectrumMismatch { expected: usize, got: usize },
    /// A normal mode coincides with a field frequency to within f64
    /// resolution, so the field weights cannot be evaluated.
    ResonanceDegeneracy { mode: usize, root: usize },
}

impl fmt::Display for CouplingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CouplingError::SpectrumMismatch { expected, got } => {
                write!(f, "spectrum has {got} modes, configuration expects {expected}")
            }
            CouplingError::ResonanceDegeneracy { mode, root } => write!(
                f,
                "normal mode {root} is degenerate with field frequency {mode} to f64 resolution"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CouplingError {}

#[derive(Debug, Clone, PartialEq)]
pub enum OverlapError {
    IndexOutOfRange { index: usize, len: usize },
    OccupationMismatch { n: u32, total: u64 },
    /// Beyond 20 quanta the multinomial weight is no longer exactly
    /// representable.
    OverflowGuard { n: u32 },
}

impl fmt::Display for OverlapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OverlapError::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for {len} modes")
            }
            OverlapError::OccupationMismatch { n, total } => {
                write!(f, "occupation numbers sum to {total}, expected {n}")
            }
            OverlapError::OverflowGuard { n } => {
                write!(f, "n = {n} exceeds the exact-arithmetic limit of 20")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for OverlapError {}
