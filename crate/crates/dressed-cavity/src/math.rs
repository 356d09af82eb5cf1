//! Thin shims over the float functions so the crate builds both with `std`
//! and with `libm` under `no_std`.

#[cfg(feature = "std")]
macro_rules! shim {
    ($name:ident, $libm:path) => {
        #[inline(always)]
        pub(crate) fn $name(x: f64) -> f64 {
            f64::$name(x)
        }
    };
}

#[cfg(not(feature = "std"))]
macro_rules! shim {
    ($name:ident, $libm:path) => {
        #[inline(always)]
        pub(crate) fn $name(x: f64) -> f64 {
            $libm(x)
        }
    };
}

shim!(sqrt, libm::sqrt);
shim!(sin, libm::sin);
shim!(cos, libm::cos);
shim!(exp, libm::exp);
shim!(ln, libm::log);
shim!(floor, libm::floor);
shim!(ceil, libm::ceil);

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn sin_cos(x: f64) -> (f64, f64) {
    x.sin_cos()
}

#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn sin_cos(x: f64) -> (f64, f64) {
    libm::sincos(x)
}

/// `|x|` without relying on std-only intrinsics.
#[inline(always)]
pub(crate) fn abs(x: f64) -> f64 {
    f64::from_bits(x.to_bits() & (u64::MAX >> 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs_matches_std() {
        for &x in &[0.0, -0.0, 1.5, -1.5, f64::INFINITY, f64::NEG_INFINITY] {
            assert_eq!(abs(x), x.abs());
        }
        assert!(abs(f64::NAN).is_nan());
    }

    #[test]
    fn sin_cos_pair() {
        let (s, c) = sin_cos(0.7);
        assert_eq!(s, 0.7_f64.sin());
        assert_eq!(c, 0.7_f64.cos());
    }
}
