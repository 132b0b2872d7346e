//! Quantum friction for uniform motion parallel to the plate.
//!
//! The `ξ → 0` limit is taken analytically, leaving
//!
//! `Im Γ/T = (γ²g²a / 32π Ω_m Ω_p) ∫₀^∞ dx e^{-(2/u)√(x²+K²)} / (x²+K²)`
//!
//! with `K² = a²((Ω_m+Ω_p)² - u²Ω_m²)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{AtomParams, MirrorParams};
use crate::quad::{self, QuadConfig, QuadResult};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrictionQuery<T> {
    pub atom: AtomParams<T>,
    pub mirror: MirrorParams<T>,
    pub a: T,
    /// Speed; the sign of the input velocity is dropped.
    pub u: T,
}

impl<T: Scalar> FrictionQuery<T> {
    pub fn new(atom: AtomParams<T>, mirror: MirrorParams<T>, a: T, u: T) -> Result<Self> {
        let q = Self {
            atom,
            mirror,
            a,
            u: u.abs(),
        };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        self.atom.validate()?;
        self.mirror.validate()?;
        if !(self.a > T::zero()) || !self.a.is_finite() {
            return Err(Error::domain("distance a must be positive"));
        }
        if !(self.u > T::zero() && self.u < T::one()) {
            return Err(Error::domain("speed must satisfy 0 < |u| < 1"));
        }
        Ok(())
    }

    pub fn with_distance(&self, a: T) -> Result<Self> {
        Self::new(self.atom, self.mirror, a, self.u)
    }

    /// Same physics in units rescaled by `λ`; the rate scales by `λ`.
    pub fn scaled(&self, lambda: T) -> Self {
        Self {
            atom: self.atom.scaled(lambda),
            mirror: self.mirror.scaled(lambda),
            a: self.a / lambda,
            u: self.u,
        }
    }

    /// `K = a √((Ω_m+Ω_p)² - u²Ω_m²)`, dimensionless.
    pub fn gap(&self) -> T {
        let s = self.mirror.omega_m + self.atom.omega_p;
        let um = self.u * self.mirror.omega_m;
        self.a * ((s - um) * (s + um)).sqrt()
    }

    fn prefactor(&self) -> T {
        let (m, p) = (&self.mirror, &self.atom);
        m.gamma * m.gamma * p.g * p.g * self.a / (T::c(32.0) * T::PI() * m.omega_m * p.omega_p)
    }
}

/// `∫₀^∞ e^{-(2/u)(√(x²+K²) - K)} / (x²+K²) dx`, the integral with the
/// `e^{-2K/u}` factor pulled out.
fn reduced_integral<T: Scalar>(q: &FrictionQuery<T>, tol: T) -> Result<QuadResult<T>> {
    let k = q.gap();
    let k2 = k * k;
    let two_over_u = T::c(2.0) / q.u;
    let f = |x: T| {
        let d = x * x + k2;
        // √(x²+K²) - K without cancellation
        let excess = x * x / (d.sqrt() + k);
        (-two_over_u * excess).exp() / d
    };
    // Laplace width of the peak at x = 0
    let width = (q.u * k).sqrt().max(k.min(T::one()));
    let cfg = QuadConfig::relative(tol);
    Ok(quad::integrate_with(f, T::zero(), width, &cfg)?.merge(quad::integrate_semi_infinite_with(f, width, &cfg)?))
}

/// `Im Γ/T`. Underflows to zero for deeply suppressed queries; use
/// [`friction_log_rate`] there.
pub fn friction_rate<T: Scalar>(q: &FrictionQuery<T>, tol: T) -> Result<QuadResult<T>> {
    q.validate()?;
    let r = reduced_integral(q, tol)?;
    let factor = q.prefactor() * (-T::c(2.0) * q.gap() / q.u).exp();
    Ok(r.scale(factor))
}

/// `ln(Im Γ/T)`, finite even where the rate itself underflows.
pub fn friction_log_rate<T: Scalar>(q: &FrictionQuery<T>, tol: T) -> Result<T> {
    q.validate()?;
    let r = reduced_integral(q, tol)?;
    let v = q.prefactor().ln() - T::c(2.0) * q.gap() / q.u + r.value.ln();
    if !v.is_finite() {
        return Err(Error::Range(format!(
            "log friction rate not finite at a = {:e}; lower a or raise u",
            q.a.as_f64()
        )));
    }
    Ok(v)
}

/// Finite-difference slope of `ln(rate)` in `a` between `a_lo` and `a_hi`.
/// Approaches `-(2/u)√((Ω_m+Ω_p)² - u²Ω_m²)` as `a` grows, with a
/// `-1/(2a)` correction from the algebraic prefactor.
pub fn friction_large_a_log_slope<T: Scalar>(q: &FrictionQuery<T>, a_lo: T, a_hi: T, tol: T) -> Result<T> {
    if !(a_hi > a_lo) || !(a_lo > T::zero()) {
        return Err(Error::domain("need 0 < a_lo < a_hi"));
    }
    let lo = friction_rate(&q.with_distance(a_lo)?, tol)?.value;
    let hi = friction_rate(&q.with_distance(a_hi)?, tol)?.value;
    if !(lo > T::zero() && hi > T::zero()) {
        return Err(Error::Range(format!(
            "friction rate underflows between a = {:e} and {:e}; lower a",
            a_lo.as_f64(),
            a_hi.as_f64()
        )));
    }
    Ok((hi.ln() - lo.ln()) / (a_hi - a_lo))
}

/// Asymptotic slope `-(2/u)√((Ω_m+Ω_p)² - u²Ω_m²)`.
pub fn asymptotic_log_slope<T: Scalar>(q: &FrictionQuery<T>) -> T {
    -T::c(2.0) * q.gap() / (q.u * q.a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn query(a: f64, u: f64) -> FrictionQuery<f64> {
        FrictionQuery::new(
            AtomParams::new(1.0, 1.0).unwrap(),
            MirrorParams::new(1.0, 1.0, 0.0).unwrap(),
            a,
            u,
        )
        .unwrap()
    }

    #[test]
    fn invalid_queries() {
        let atom = AtomParams::new(1.0, 1.0).unwrap();
        let mirror = MirrorParams::new(1.0, 1.0, 0.0).unwrap();
        assert!(FrictionQuery::new(atom, mirror, 1.0, 0.0).is_err());
        assert!(FrictionQuery::new(atom, mirror, 1.0, 1.0).is_err());
        assert!(FrictionQuery::new(atom, mirror, 0.0, 0.5).is_err());
        assert_eq!(FrictionQuery::new(atom, mirror, 1.0, -0.5).unwrap().u, 0.5);
    }

    #[test]
    fn direct_integral_agrees_with_factored_form() {
        let q = query(1.0, 0.5);
        let k2 = 4.0 - 0.25;
        let direct = quad::integrate_semi_infinite(
            |x: f64| (-(2.0 / 0.5) * (x * x + k2).sqrt()).exp() / (x * x + k2),
            0.0,
            1e-12,
        )
        .unwrap()
        .value;
        let expect = direct / (32.0 * std::f64::consts::PI);
        let got = friction_rate(&q, 1e-12).unwrap().value;
        assert!((got - expect).abs() < 1e-11 * expect, "{got} {expect}");
    }

    #[test]
    fn slow_motion_is_deeply_suppressed() {
        let q = query(1.0, 1e-3);
        let r = friction_rate(&q, 1e-10).unwrap().value;
        assert!(r < (-700f64).exp());
        let lr = friction_log_rate(&q, 1e-10).unwrap();
        assert!(lr < -1000.0 && lr.is_finite());
    }

    #[test]
    fn decreasing_with_distance() {
        let r1 = friction_rate(&query(1.0, 0.5), 1e-10).unwrap().value;
        let r2 = friction_rate(&query(2.0, 0.5), 1e-10).unwrap().value;
        assert!(r2 < r1 && r2 > 0.0);
    }

    #[test]
    fn log_rate_matches_rate() {
        let q = query(1.5, 0.4);
        let r = friction_rate(&q, 1e-12).unwrap().value;
        assert!((friction_log_rate(&q, 1e-12).unwrap() - r.ln()).abs() < 1e-12);
    }

    #[test]
    fn slope_approaches_asymptote() {
        let q = query(1.0, 0.5);
        let target = asymptotic_log_slope(&q);
        assert!((target + 4.0 * 3.75f64.sqrt()).abs() < 1e-12);
        let near = friction_large_a_log_slope(&q, 5.0, 6.0, 1e-12).unwrap();
        let far = friction_large_a_log_slope(&q, 50.0, 51.0, 1e-12).unwrap();
        assert!((far - target).abs() < (near - target).abs());
        // the leftover is the -1/(2a) prefactor term
        assert!((far - target + 1.0 / (2.0 * 50.5)).abs() < 2e-3, "{far} {target}");
        let u_small = FrictionQuery::new(
            AtomParams::new(1.0, 1.0).unwrap(),
            MirrorParams::new(1.0, 1e-6, 0.0).unwrap(),
            1.0,
            0.9,
        )
        .unwrap();
        let s: f64 = friction_large_a_log_slope(&u_small, 50.0, 51.0, 1e-12).unwrap();
        assert!((s / (-2.0 / 0.9) - 1.0).abs() < 0.01, "{s}");
    }

    #[test]
    fn slope_underflow_is_reported() {
        let q = query(1.0, 0.01);
        assert!(matches!(
            friction_large_a_log_slope(&q, 20.0, 30.0, 1e-10),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn triple_delta_support_is_empty() {
        // |ν| = |p¹ u| < |p| for every momentum when |u| < 1
        for (px, py, pz, u) in [(1.0f64, 0.0, 0.0, 0.999), (3.0, -2.0, 0.5, 0.5), (-0.1, 0.0, 1e-9, 0.9)] {
            let p = (px * px + py * py + pz * pz).sqrt();
            assert!((px * u).abs() < p);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn positive_and_sign_symmetric(a in 0.2f64..4.0, u in 0.2f64..0.95) {
            let q = query(a, u);
            let r = friction_rate(&q, 1e-10).unwrap().value;
            prop_assert!(r > 0.0);
            let m = FrictionQuery::new(q.atom, q.mirror, a, -u).unwrap();
            prop_assert_eq!(friction_rate(&m, 1e-10).unwrap().value, r);
        }

        #[test]
        fn dimensional_scaling(lambda in 0.2f64..5.0, a in 0.3f64..3.0, u in 0.3f64..0.9) {
            let q = query(a, u);
            let r = friction_rate(&q, 1e-12).unwrap().value;
            let s = friction_rate(&q.scaled(lambda), 1e-12).unwrap().value;
            prop_assert!((s - lambda * r).abs() <= 1e-8 * lambda * r);
        }

        #[test]
        fn triple_delta_kinematics(px in -10.0f64..10.0, py in -10.0f64..10.0, pz in -10.0f64..10.0, u in -0.999f64..0.999) {
            let p = (px * px + py * py + pz * pz).sqrt();
            prop_assume!(p > 0.0);
            prop_assert!((px * u).abs() < p);
        }
    }
}
