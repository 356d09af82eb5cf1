//! Quadrature machinery: 7/15 Gauss-Kronrod with adaptive bisection, and a
//! half-period decomposition with epsilon-algorithm acceleration for
//! oscillatory integrals over `[0, inf)`.
//!
//! The oscillatory driver assumes an envelope that is eventually monotone
//! decreasing past `core_cutoff`; the region before that (where a resonance
//! may sit) is integrated adaptively, the rest as an alternating series of
//! half-period pieces whose limit Wynn's epsilon algorithm extrapolates.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use crate::math;
use crate::sum::Compensated;

// 15-point Kronrod abscissae (positive half) with the embedded 7-point Gauss
// rule at the odd indices; weights from QUADPACK.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Gk {
    pub value: f64,
    pub error: f64,
}

/// One 15-point Gauss-Kronrod application with the QUADPACK error heuristic.
pub(crate) fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Gk {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);

    let mut fv1 = [0.0_f64; 7];
    let mut fv2 = [0.0_f64; 7];
    let mut res_gauss = fc * WG[3];
    let mut res_kronrod = fc * WGK[7];
    let mut res_abs = math::abs(res_kronrod);

    for j in 0..3 {
        let idx = 2 * j + 1;
        let dx = half * XGK[idx];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[idx] = f1;
        fv2[idx] = f2;
        res_gauss += WG[j] * (f1 + f2);
        res_kronrod += WGK[idx] * (f1 + f2);
        res_abs += WGK[idx] * (math::abs(f1) + math::abs(f2));
    }
    for j in 0..4 {
        let idx = 2 * j;
        if idx >= 7 {
            break;
        }
        let dx = half * XGK[idx];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[idx] = f1;
        fv2[idx] = f2;
        res_kronrod += WGK[idx] * (f1 + f2);
        res_abs += WGK[idx] * (math::abs(f1) + math::abs(f2));
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * math::abs(fc - mean);
    for idx in 0..7 {
        res_asc += WGK[idx] * (math::abs(fv1[idx] - mean) + math::abs(fv2[idx] - mean));
    }

    let half_abs = math::abs(half);
    let value = res_kronrod * half;
    let raw = math::abs((res_kronrod - res_gauss) * half);
    Gk {
        value,
        error: rescale_error(raw, res_abs * half_abs, res_asc * half_abs),
    }
}

fn rescale_error(raw: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = raw;
    if res_asc != 0.0 && err != 0.0 {
        let scale = 200.0 * err / res_asc;
        let scale = scale * math::sqrt(scale);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * res_abs;
        if floor > err {
            err = floor;
        }
    }
    err
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    error: f64,
    a: f64,
    b: f64,
    value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // worst error first; deterministic tie-break on the left endpoint
        self.error
            .total_cmp(&other.error)
            .then(other.a.total_cmp(&self.a))
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct QuadOutcome {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

/// Globally adaptive bisection, worst interval first.
pub(crate) fn adaptive_gk15(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> QuadOutcome {
    let first = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        error: first.error,
        a,
        b,
        value: first.value,
    });
    let mut total_value = first.value;
    let mut total_error = first.error;

    while total_error > target(abs_tol, rel_tol, total_value) && heap.len() < max_intervals {
        let worst = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // float exhaustion on this segment; put it back and stop
            heap.push(worst);
            break;
        }
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(Segment {
            error: left.error,
            a: worst.a,
            b: mid,
            value: left.value,
        });
        heap.push(Segment {
            error: right.error,
            a: mid,
            b: worst.b,
            value: right.value,
        });
    }

    // Recompute the totals in a canonical order so the result does not
    // depend on heap internals.
    let mut segments: Vec<Segment> = heap.into_vec();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = Compensated::new();
    let mut error = Compensated::new();
    for s in &segments {
        value.add(s.value);
        error.add(s.error);
    }
    let value = value.value();
    let error = error.value();
    QuadOutcome {
        value,
        error,
        intervals: segments.len(),
        converged: error <= target(abs_tol, rel_tol, value),
    }
}

#[inline]
fn target(abs_tol: f64, rel_tol: f64, value: f64) -> f64 {
    let rel = rel_tol * math::abs(value);
    if rel > abs_tol {
        rel
    } else {
        abs_tol
    }
}

/// Extrapolate the limit of a partial-sum sequence with Wynn's epsilon
/// algorithm.
///
/// Deep epsilon columns eventually drown in roundoff, so the returned value
/// is the even-column estimate at the smallest consecutive spread rather
/// than the deepest one; that spread doubles as the error gauge.
pub(crate) fn wynn_limit(partial: &[f64]) -> (f64, f64) {
    let n = partial.len();
    if n < 3 {
        let last = *partial.last().unwrap_or(&0.0);
        return (last, f64::INFINITY);
    }
    let mut prev: Vec<f64> = alloc::vec![0.0; n + 1];
    let mut cur: Vec<f64> = partial.to_vec();
    let mut estimates: Vec<f64> = alloc::vec![cur[n - 1]];
    let mut order = 0usize;

    while cur.len() >= 2 {
        let m = cur.len() - 1;
        let mut next = Vec::with_capacity(m);
        let mut stop = false;
        for j in 0..m {
            let d = cur[j + 1] - cur[j];
            if d == 0.0 {
                return (cur[j + 1], 0.0);
            }
            let v = prev[j + 1] + 1.0 / d;
            if !v.is_finite() {
                stop = true;
                break;
            }
            next.push(v);
        }
        if stop {
            break;
        }
        order += 1;
        if order % 2 == 0 {
            estimates.push(next[next.len() - 1]);
        }
        prev = cur;
        cur = next;
    }

    let mut best = estimates[0];
    let mut best_spread = f64::INFINITY;
    for pair in estimates.windows(2) {
        let spread = math::abs(pair[1] - pair[0]);
        if spread <= best_spread {
            best_spread = spread;
            best = pair[1];
        }
    }
    (best, best_spread)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum OscKernel {
    Sin,
    Cos,
}

impl OscKernel {
    #[inline]
    fn eval(self, x: f64) -> f64 {
        match self {
            OscKernel::Sin => math::sin(x),
            OscKernel::Cos => math::cos(x),
        }
    }

    /// `j`-th positive zero of the kernel at frequency `t`, `j >= 1`.
    #[inline]
    fn zero(self, j: usize, t: f64) -> f64 {
        match self {
            OscKernel::Sin => j as f64 * PI / t,
            OscKernel::Cos => (j as f64 - 0.5) * PI / t,
        }
    }

    /// Smallest `j >= 1` whose zero lies at or beyond `y`.
    fn first_zero_at_or_beyond(self, y: f64, t: f64) -> usize {
        let raw = match self {
            OscKernel::Sin => y * t / PI,
            OscKernel::Cos => y * t / PI + 0.5,
        };
        let j = math::ceil(raw) as usize;
        j.max(1)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct OscOutcome {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    pub accelerated: bool,
    pub converged: bool,
}

const MAX_TAIL_TERMS: usize = 160;
const MIN_TAIL_TERMS: usize = 12;
const CORE_BUDGET: usize = 60_000;

/// Integral of `env(y) * kernel(t y)` over `[0, inf)` for `t > 0`.
///
/// `env` must be non-negative and eventually monotone decreasing past
/// `core_cutoff`. For `t` below `small_t_switch` the oscillation is slow and
/// a truncated adaptive pass is cheaper; the truncation point is pushed out
/// until the second-mean-value tail bound `2 env(Y) / t` is negligible.
pub(crate) fn oscillatory_integral(
    env: &impl Fn(f64) -> f64,
    kernel: OscKernel,
    t: f64,
    core_cutoff: f64,
    small_t_switch: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> OscOutcome {
    debug_assert!(t > 0.0);
    let f = |y: f64| env(y) * kernel.eval(t * y);

    if t < small_t_switch {
        let mut y_end = 2.0 * core_cutoff;
        let mut tail = 2.0 * env(y_end) / t;
        let mut doublings = 0;
        while tail > 0.5 * abs_tol && doublings < 600 && y_end < 1e300 {
            y_end *= 2.0;
            tail = 2.0 * env(y_end) / t;
            doublings += 1;
        }
        let quad = adaptive_gk15(&f, 0.0, y_end, 0.5 * abs_tol, 0.5 * rel_tol, CORE_BUDGET);
        let error = quad.error + tail;
        return OscOutcome {
            value: quad.value,
            error,
            intervals: quad.intervals,
            accelerated: false,
            converged: quad.converged && error <= target(abs_tol, rel_tol, quad.value),
        };
    }

    let j0 = kernel.first_zero_at_or_beyond(core_cutoff, t);
    let y0 = kernel.zero(j0, t);
    // 45/45 split of the budget leaves headroom for the final combined
    // check. The core gets no relative allowance: its value partially
    // cancels against the tail, so only the absolute budget is meaningful.
    let core = adaptive_gk15(&f, 0.0, y0, 0.45 * abs_tol, 0.0, CORE_BUDGET);

    // Alternating series of half-period pieces, accelerated. Each piece is
    // refined to its own slice of the budget so the summed error estimates
    // stay below what the extrapolation can deliver.
    let term_tol = 0.25 * abs_tol / MAX_TAIL_TERMS as f64;
    let mut acc = Compensated::new();
    let mut partials: Vec<f64> = Vec::with_capacity(MAX_TAIL_TERMS);
    let mut term_error = 0.0;
    let mut tail_value = 0.0;
    let mut tail_spread = f64::INFINITY;
    let mut tail_converged = false;
    let mut term_intervals = 0;

    for n in 0..MAX_TAIL_TERMS {
        let a = kernel.zero(j0 + n, t);
        let b = kernel.zero(j0 + n + 1, t);
        let piece = adaptive_gk15(&f, a, b, term_tol, 0.0, 64);
        acc.add(piece.value);
        term_error += piece.error;
        term_intervals += piece.intervals;
        partials.push(acc.value());
        let terms_used = n + 1;

        if terms_used >= MIN_TAIL_TERMS && terms_used % 4 == 0 {
            let (limit, spread) = wynn_limit(&partials);
            tail_value = limit;
            tail_spread = spread;
            let budget = 0.45 * target(abs_tol, rel_tol, core.value + limit);
            if 3.0 * spread + term_error <= budget {
                tail_converged = true;
                break;
            }
        }
    }
    if !tail_converged {
        let (limit, spread) = wynn_limit(&partials);
        tail_value = limit;
        tail_spread = spread;
    }

    let value = core.value + tail_value;
    let tail_err = if tail_spread.is_finite() {
        3.0 * tail_spread + term_error
    } else {
        f64::INFINITY
    };
    let error = core.error + tail_err;
    OscOutcome {
        value,
        error,
        intervals: core.intervals + term_intervals,
        accelerated: true,
        converged: error <= target(abs_tol, rel_tol, value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk15_exact_on_polynomials() {
        let g = gk15(&|x: f64| x * x * x * x, 0.0, 1.0);
        assert!((g.value - 0.2).abs() < 1e-15);
        let g = gk15(&|x: f64| x.sin(), 0.0, PI);
        assert!((g.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        // Lorentzian of width 1e-3 around 1: integral over [0, 2] ~ pi * 1e-3
        let w = 1e-3;
        let f = |x: f64| w / ((x - 1.0) * (x - 1.0) + w * w);
        let out = adaptive_gk15(&f, 0.0, 2.0, 1e-12, 1e-12, 10_000);
        let exact = (1.0_f64 / w).atan() * 2.0;
        assert!(out.converged);
        assert!((out.value - exact).abs() < 1e-10, "value {}", out.value);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // sum (-1)^n / (n+1) = ln 2
        let mut s = 0.0;
        let partials: Vec<f64> = (0..30)
            .map(|n| {
                s += if n % 2 == 0 { 1.0 } else { -1.0 } / (n as f64 + 1.0);
                s
            })
            .collect();
        let (limit, spread) = wynn_limit(&partials);
        assert!((limit - 2.0_f64.ln()).abs() < 1e-12, "limit {limit}");
        assert!(spread < 1e-10);
    }

    // Closed forms used below:
    //   int_0^inf y sin(t y) / (1 + y^2)       dy = (pi/2) e^{-t}
    //   int_0^inf   cos(t y) / (1 + y^2)       dy = (pi/2) e^{-t}
    //   int_0^inf y sin(t y) / (1 + y^2)^2     dy = (pi/4) t e^{-t}
    //   int_0^inf   cos(t y) / (1 + y^2)^2     dy = (pi/4) (1 + t) e^{-t}

    #[test]
    fn oscillatory_sin_against_closed_form() {
        let env = |y: f64| y / (1.0 + y * y);
        for &t in &[0.5, 3.0, 20.0, 120.0] {
            let out = oscillatory_integral(&env, OscKernel::Sin, t, 2.0, 0.1, 1e-10, 1e-9);
            let exact = 0.5 * PI * (-t).exp();
            assert!(out.converged, "t={t} not converged, err={}", out.error);
            assert!(
                (out.value - exact).abs() <= out.error.max(1e-10),
                "t={t}: {} vs {exact} (err {})",
                out.value,
                out.error
            );
        }
    }

    #[test]
    fn oscillatory_cos_against_closed_form() {
        let env = |y: f64| 1.0 / (1.0 + y * y);
        for &t in &[0.5, 3.0, 20.0] {
            let out = oscillatory_integral(&env, OscKernel::Cos, t, 2.0, 0.1, 1e-10, 1e-9);
            let exact = 0.5 * PI * (-t).exp();
            assert!(
                out.converged,
                "t={t}: value {} exact {exact} err {} intervals {}",
                out.value,
                out.error,
                out.intervals
            );
            assert!(
                (out.value - exact).abs() <= out.error.max(1e-10),
                "t={t}: {} vs {exact}",
                out.value
            );
        }
    }

    #[test]
    fn small_t_branch_against_closed_form() {
        let env = |y: f64| y / ((1.0 + y * y) * (1.0 + y * y));
        for &t in &[0.01, 0.05, 0.5, 5.0] {
            let out = oscillatory_integral(&env, OscKernel::Sin, t, 2.0, 0.1, 1e-9, 1e-8);
            let exact = 0.25 * PI * t * (-t).exp();
            assert!(out.converged, "t={t}");
            assert!(
                (out.value - exact).abs() <= out.error.max(1e-9),
                "t={t}: {} vs {exact} +/- {}",
                out.value,
                out.error
            );
            if t < 0.1 {
                assert!(!out.accelerated, "t={t} should use the truncated branch");
            }
        }
    }

    #[test]
    fn cos_small_t_branch() {
        let env = |y: f64| 1.0 / ((1.0 + y * y) * (1.0 + y * y));
        let t = 0.02;
        let out = oscillatory_integral(&env, OscKernel::Cos, t, 2.0, 0.1, 1e-9, 1e-8);
        let exact = 0.25 * PI * (1.0 + t) * (-t).exp();
        assert!(out.converged);
        assert!((out.value - exact).abs() <= out.error.max(1e-9));
    }

    #[test]
    fn error_estimates_are_honest() {
        let env = |y: f64| y / (1.0 + y * y);
        for &t in &[0.7, 4.0, 35.0] {
            let rough = oscillatory_integral(&env, OscKernel::Sin, t, 2.0, 0.1, 1e-6, 1e-5);
            let exact = 0.5 * PI * (-t).exp();
            assert!(
                (rough.value - exact).abs() <= rough.error.max(1e-12) * 2.0,
                "t={t}: dev {} vs claimed {}",
                (rough.value - exact).abs(),
                rough.error
            );
        }
    }
}


