//! Area under a per-size curve.
//!
//! A curve holds one value per subset size `k = 1..=n`. Size `k` sits at
//! `x = k / n`; the first value is held constant back to `x = 0` and the
//! points are joined by trapezoids, so a constant curve of value `c` has
//! area exactly `c`.

use crate::scalar::Scalar;

/// Signed area of the first `window` points, on the x-axis scaled by the
/// full length `n = values.len()`.
pub fn anchored_area_prefix<T: Scalar>(values: &[T], window: usize) -> T {
    let n = values.len();
    let window = window.min(n);
    if window == 0 {
        return T::zero();
    }
    let half = T::lit(0.5);
    let mut area = values[0];
    for k in 1..window {
        area += half * (values[k - 1] + values[k]);
    }
    area / T::from_count(n)
}

/// Signed area over the whole curve, in `[min, max]` of its values.
pub fn anchored_area<T: Scalar>(values: &[T]) -> T {
    anchored_area_prefix(values, values.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_curves() {
        assert_eq!(anchored_area(&[1.0f64; 7]), 1.0);
        assert_eq!(anchored_area(&[0.5f64; 3]), 0.5);
        assert_eq!(anchored_area(&[-1.0f64; 4]), -1.0);
        assert_eq!(anchored_area(&[0.01f64]), 0.01);
    }

    #[test]
    fn linear_ramp() {
        // points (0,0) (1/2,0) (1,1): 0 + 0.5 * 0.5 * 1
        assert_eq!(anchored_area(&[0.0f64, 1.0]), 0.25);
    }

    #[test]
    fn prefix_window() {
        let v = [0.2f64, 0.4, 1.0, 1.0];
        // (0.2 + 0.3) / 4
        assert!((anchored_area_prefix(&v, 2) - 0.125).abs() < 1e-15);
        assert_eq!(anchored_area_prefix(&v, 10), anchored_area(&v));
        assert_eq!(anchored_area_prefix(&v, 0), 0.0);
    }
}
