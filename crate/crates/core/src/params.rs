//! Physical parameters in natural units (`c = ħ = 1`).
//!
//! Frequencies, momenta and masses share one dimension; lengths are inverse
//! mass. `g` carries mass^(1/2), `γ` mass^(3/2), `ξ` mass².

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Scalar;

/// The oscillator "atom". `omega_p` is always the renormalised frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomParams<T> {
    pub g: T,
    pub omega_p: T,
}

impl<T: Scalar> AtomParams<T> {
    pub fn new(g: T, omega_p: T) -> Result<Self> {
        if !(omega_p > T::zero()) || !omega_p.is_finite() {
            return Err(Error::domain("omega_p must be positive and finite"));
        }
        if !(g >= T::zero()) || !g.is_finite() {
            return Err(Error::domain("g must be non-negative and finite"));
        }
        Ok(AtomParams { g, omega_p })
    }

    pub(crate) fn validate(&self) -> Result<()> {
        Self::new(self.g, self.omega_p).map(|_| ())
    }

    /// Image under the unit rescaling `ω → λω` (so `g² → λ g²`).
    pub fn scaled(&self, lambda: T) -> Self {
        AtomParams {
            g: self.g * lambda.sqrt(),
            omega_p: self.omega_p * lambda,
        }
    }
}

/// The plate's microscopic oscillators and their loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MirrorParams<T> {
    pub gamma: T,
    pub omega_m: T,
    pub xi: T,
}

impl<T: Scalar> MirrorParams<T> {
    pub fn new(gamma: T, omega_m: T, xi: T) -> Result<Self> {
        if !(omega_m > T::zero()) || !omega_m.is_finite() {
            return Err(Error::domain("omega_m must be positive and finite"));
        }
        if !(gamma >= T::zero()) || !gamma.is_finite() {
            return Err(Error::domain("gamma must be non-negative and finite"));
        }
        if !(xi >= T::zero()) || !xi.is_finite() {
            return Err(Error::domain("xi must be non-negative and finite"));
        }
        Ok(MirrorParams { gamma, omega_m, xi })
    }

    pub(crate) fn validate(&self) -> Result<()> {
        Self::new(self.gamma, self.omega_m, self.xi).map(|_| ())
    }

    /// `γ² → λ³γ²`, `Ω_m → λΩ_m`, `ξ → λ²ξ`.
    pub fn scaled(&self, lambda: T) -> Self {
        MirrorParams {
            gamma: self.gamma * lambda * lambda.sqrt(),
            omega_m: self.omega_m * lambda,
            xi: self.xi * lambda * lambda,
        }
    }
}

/// Ratios to the atom frequency used by the plotting conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessSet<T> {
    pub nu_tilde: T,
    pub a_tilde: T,
    pub omega_m_tilde: T,
    pub xi_tilde: T,
}

pub fn to_dimensionless<T: Scalar>(
    atom: &AtomParams<T>,
    mirror: &MirrorParams<T>,
    a: T,
    nu: T,
) -> Result<DimensionlessSet<T>> {
    let w = atom.omega_p;
    if !(w > T::zero()) {
        return Err(Error::domain("omega_p must be positive"));
    }
    if !(a.is_finite() && nu.is_finite() && mirror.omega_m.is_finite() && mirror.xi.is_finite()) {
        return Err(Error::domain("inputs must be finite"));
    }
    Ok(DimensionlessSet {
        nu_tilde: nu / w,
        a_tilde: a * w,
        omega_m_tilde: mirror.omega_m / w,
        xi_tilde: mirror.xi / (w * w),
    })
}

impl<T: Scalar> DimensionlessSet<T> {
    /// Inverse of [`to_dimensionless`] for a given `Ω_p`: `(ν, a, Ω_m, ξ)`.
    pub fn to_dimensional(&self, omega_p: T) -> (T, T, T, T) {
        (
            self.nu_tilde * omega_p,
            self.a_tilde / omega_p,
            self.omega_m_tilde * omega_p,
            self.xi_tilde * omega_p * omega_p,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduction_examples() {
        let atom = AtomParams::new(1.0, 1.0).unwrap();
        let mirror = MirrorParams::new(1.0, 2.0, 0.01).unwrap();
        let d = to_dimensionless(&atom, &mirror, 1.0, 3.0).unwrap();
        assert_eq!(
            (d.nu_tilde, d.a_tilde, d.omega_m_tilde, d.xi_tilde),
            (3.0, 1.0, 2.0, 0.01)
        );

        let atom = AtomParams::new(1.0, 2.0).unwrap();
        let mirror = MirrorParams::new(1.0, 2.0, 0.0).unwrap();
        let d = to_dimensionless(&atom, &mirror, 0.5, 2.0).unwrap();
        assert_eq!(
            (d.nu_tilde, d.a_tilde, d.omega_m_tilde, d.xi_tilde),
            (1.0, 1.0, 1.0, 0.0)
        );

        let d = to_dimensionless(&atom, &mirror, 0.5, 0.0).unwrap();
        assert_eq!(d.nu_tilde, 0.0);
    }

    #[test]
    fn invalid_parameters() {
        assert!(AtomParams::new(1.0, 0.0).is_err());
        assert!(AtomParams::new(-1.0, 1.0).is_err());
        assert!(MirrorParams::new(1.0, 1.0, -0.1).is_err());
        assert!(MirrorParams::new(1.0, 0.0, 0.1).is_err());
        let bad = AtomParams { g: 1.0, omega_p: -1.0 };
        let mirror = MirrorParams::new(1.0, 1.0, 0.0).unwrap();
        assert!(to_dimensionless(&bad, &mirror, 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(w in 1e-3f64..1e3, wm in 1e-3f64..1e3, xi in 0.0f64..10.0, a in 1e-3f64..1e3, nu in -1e3f64..1e3) {
            let atom = AtomParams::new(0.5, w).unwrap();
            let mirror = MirrorParams::new(1.0, wm, xi).unwrap();
            let d = to_dimensionless(&atom, &mirror, a, nu).unwrap();
            let (nu2, a2, wm2, xi2) = d.to_dimensional(w);
            let close = |x: f64, y: f64| (x - y).abs() <= 4.0 * f64::EPSILON * x.abs().max(y.abs());
            prop_assert!(close(nu, nu2) && close(a, a2) && close(wm, wm2) && close(xi, xi2));
        }
    }
}
