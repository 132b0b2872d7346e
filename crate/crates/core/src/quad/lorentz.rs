//! Lorentzian approximants of the principal value and of the delta function.

use crate::error::{Error, Result};
use crate::Scalar;

/// `x / (x² + ξ²)`; reduces to `1/x` at `ξ = 0`.
pub fn p_xi<T: Scalar>(x: T, xi: T) -> Result<T> {
    if xi < T::zero() || xi.is_nan() {
        return Err(Error::domain("xi must be non-negative"));
    }
    if xi == T::zero() && x == T::zero() {
        return Err(Error::domain(
            "principal-value approximant undefined at x = 0 for xi = 0",
        ));
    }
    Ok(x / (x * x + xi * xi))
}

/// `ξ / (π (x² + ξ²))`. At `ξ = 0` this is a distribution; callers must take
/// the exact delta path instead.
pub fn delta_xi<T: Scalar>(x: T, xi: T) -> Result<T> {
    if !(xi > T::zero()) {
        return Err(Error::domain("delta approximant needs xi > 0"));
    }
    Ok(xi / (T::PI() * (x * x + xi * xi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, integrate_semi_infinite, principal_value};
    use proptest::prelude::*;

    #[test]
    fn values_at_the_origin() {
        assert_eq!(p_xi(0.0, 0.01).unwrap(), 0.0);
        let peak = delta_xi(0.0, 0.01).unwrap();
        assert!((peak - 1.0 / (0.01 * std::f64::consts::PI)).abs() < 1e-12);
        assert!((peak - 31.8310).abs() < 1e-4);
    }

    #[test]
    fn zero_width_errors() {
        assert!(p_xi(0.0, 0.0).is_err());
        assert_eq!(p_xi(2.0, 0.0).unwrap(), 0.5);
        assert!(delta_xi(1.0, 0.0).is_err());
        assert!(p_xi(1.0, -1.0).is_err());
    }

    #[test]
    fn delta_is_normalised() {
        for xi in [1.0, 0.1, 1e-3] {
            let half = integrate_semi_infinite(|x: f64| delta_xi(x, xi).unwrap(), 0.0, 1e-12).unwrap();
            assert!((2.0 * half.value - 1.0).abs() < 1e-9, "xi = {xi}");
        }
    }

    // Smooth bump with compact support on [-1, 1].
    fn bump(x: f64) -> f64 {
        if x.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - x * x)).exp() * (1.0 + 0.5 * x)
        }
    }

    #[test]
    fn delta_ladder_approaches_point_value() {
        let target = bump(0.0);
        let mut gaps = Vec::new();
        for xi in [1e-2, 1e-3, 1e-4] {
            let mut total = 0.0;
            for (a, b) in [(-1.0, -xi), (-xi, xi), (xi, 1.0)] {
                total += integrate(|x: f64| bump(x) * delta_xi(x, xi).unwrap(), a, b, 1e-13)
                    .unwrap()
                    .value;
            }
            gaps.push((total - target).abs());
        }
        // O(ξ) approach: each decade shrinks the gap roughly tenfold.
        assert!(gaps[1] < 0.2 * gaps[0] && gaps[2] < 0.2 * gaps[1], "{gaps:?}");
        assert!(gaps[2] < 1e-3);
    }

    #[test]
    fn p_ladder_approaches_principal_value() {
        let pv = principal_value(|x: f64| bump(x) / x, 0.0, -1.0, 1.0, 1e-13)
            .unwrap()
            .value;
        let mut gaps = Vec::new();
        for xi in [1e-2, 1e-3, 1e-4] {
            let mut total = 0.0;
            for (a, b) in [(-1.0, -xi), (-xi, xi), (xi, 1.0)] {
                total += integrate(|x: f64| bump(x) * p_xi(x, xi).unwrap(), a, b, 1e-13)
                    .unwrap()
                    .value;
            }
            gaps.push((total - pv).abs());
        }
        assert!(gaps[1] < gaps[0] && gaps[2] < gaps[1], "{gaps:?}");
        assert!(gaps[2] < 1e-3);
    }

    proptest! {
        #[test]
        fn parity(x in -1e3f64..1e3, xi in 1e-6f64..1e2) {
            prop_assert_eq!(p_xi(-x, xi).unwrap(), -p_xi(x, xi).unwrap());
            prop_assert_eq!(delta_xi(-x, xi).unwrap(), delta_xi(x, xi).unwrap());
        }
    }
}
