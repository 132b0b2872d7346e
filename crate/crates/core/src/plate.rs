//! Emission kernels for small oscillations near a lossy plate.
//!
//! The plate is a continuum of oscillators of frequency `Ω_m` and damping
//! `ξ`. Each kernel is a resonance term, a Lorentzian in `ν² - (Ω_m+Ω_p)²`
//! weighted by an `A` coefficient, plus a threshold term above `|ν| = Ω_p`
//! weighted by a `B` coefficient.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_space::spectral_average;
use crate::params::{AtomParams, MirrorParams};
use crate::quad::{self, delta_xi, p_xi, sine_integral, QuadConfig, QuadResult};
use crate::trajectory::DisplacementSpectrum;
use crate::Scalar;

/// `(α, β)` with `β² - α² = u`, `αβ = ξ/2`, both non-negative.
pub fn alpha_beta<T: Scalar>(u: T, xi: T) -> Result<(T, T)> {
    if !(xi >= T::zero()) {
        return Err(Error::domain("xi must be non-negative"));
    }
    let r = u.hypot(xi);
    if r == T::zero() {
        return Ok((T::zero(), T::zero()));
    }
    // take the root without cancellation, then the other from αβ = ξ/2
    if u >= T::zero() {
        let beta = ((r + u) / T::c(2.0)).sqrt();
        Ok((xi / (T::c(2.0) * beta), beta))
    } else {
        let alpha = ((r - u) / T::c(2.0)).sqrt();
        Ok((alpha, xi / (T::c(2.0) * alpha)))
    }
}

fn check_geometry<T: Scalar>(xi: T, omega_m: T, a: T) -> Result<()> {
    if !(a > T::zero()) || !a.is_finite() {
        return Err(Error::domain("distance a must be positive"));
    }
    if !(omega_m > T::zero()) || !omega_m.is_finite() {
        return Err(Error::domain("omega_m must be positive"));
    }
    if !(xi >= T::zero()) || !xi.is_finite() {
        return Err(Error::domain("xi must be non-negative"));
    }
    Ok(())
}

/// `∫_{-Ω_m²}^∞ du h(u)`, split at `u = 0` where the integrands have
/// structure of width `ξ`.
fn integrate_coefficient<T: Scalar, F: Fn(T) -> T>(h: F, xi: T, omega_m: T, tol: T) -> Result<QuadResult<T>> {
    let lo = -omega_m * omega_m;
    let s = (T::c(0.5) * omega_m * omega_m)
        .min(T::c(50.0) * xi)
        .max(T::c(1e-3) * omega_m * omega_m);
    let cfg = QuadConfig::relative(tol);
    let r = quad::integrate_with(&h, lo, -s, &cfg)?
        .merge(quad::integrate_with(&h, -s, T::zero(), &cfg)?)
        .merge(quad::integrate_with(&h, T::zero(), s, &cfg)?)
        .merge(quad::integrate_semi_infinite_with(&h, s, &cfg)?);
    Ok(r)
}

/// `A_∥ = ∫_{-Ω_m²}^∞ du u/(u²+ξ²) e^{-2βa} [u cos 2αa + ξ sin 2αa]`.
pub fn coeff_a_parallel<T: Scalar>(xi: T, omega_m: T, a: T, tol: T) -> Result<QuadResult<T>> {
    check_geometry(xi, omega_m, a)?;
    let two_a = T::c(2.0) * a;
    integrate_coefficient(
        |u: T| {
            let (alpha, beta) = alpha_beta(u, xi).unwrap_or((T::nan(), T::nan()));
            let d = u * u + xi * xi;
            if d == T::zero() {
                return T::one();
            }
            (-two_a * beta).exp() * (u * u * (two_a * alpha).cos() + u * xi * (two_a * alpha).sin()) / d
        },
        xi,
        omega_m,
        tol,
    )
}

/// `A_⊥ = ∫_{-Ω_m²}^∞ du e^{-2βa} cos 2αa`.
pub fn coeff_a_perp<T: Scalar>(xi: T, omega_m: T, a: T, tol: T) -> Result<QuadResult<T>> {
    check_geometry(xi, omega_m, a)?;
    let two_a = T::c(2.0) * a;
    integrate_coefficient(
        |u: T| {
            let (alpha, beta) = alpha_beta(u, xi).unwrap_or((T::nan(), T::nan()));
            (-two_a * beta).exp() * (two_a * alpha).cos()
        },
        xi,
        omega_m,
        tol,
    )
}

/// Below this the closed forms lose digits to cancellation.
const B_SERIES_MAX: f64 = 0.25;

/// `B_⊥(x) = ∫₀¹ u sin(2xu) du = (sin 2x - 2x cos 2x)/(4x²)`.
pub fn coeff_b_perp<T: Scalar>(x: T) -> T {
    if x.abs() < T::c(B_SERIES_MAX) {
        // Σ (-1)ⁿ (2x)^{2n+1} / ((2n+1)! (2n+3))
        let y = T::c(2.0) * x;
        let (mut term, mut sum) = (y, y / T::c(3.0));
        for n in 1..30 {
            let k = T::c(2.0 * n as f64);
            term = -term * y * y / (k * (k + T::one()));
            let c = term / (k + T::c(3.0));
            sum += c;
            if c.abs() <= T::epsilon() * sum.abs() {
                break;
            }
        }
        return sum;
    }
    let y = T::c(2.0) * x;
    (y.sin() - y * y.cos()) / (y * x * T::c(2.0))
}

/// `B_∥(x) = ∫₀¹ (1-u²)/u sin(2xu) du = Si(2x) - B_⊥(x)`.
pub fn coeff_b_parallel<T: Scalar>(x: T) -> T {
    let y = T::c(2.0) * x;
    if x.abs() < T::c(B_SERIES_MAX) {
        // Σ (-1)ⁿ (2x)^{2n+1} · 2 / ((2n+1)! (2n+1) (2n+3))
        let (mut term, mut sum) = (y, y * T::c(2.0) / T::c(3.0));
        for n in 1..30 {
            let k = T::c(2.0 * n as f64);
            term = -term * y * y / (k * (k + T::one()));
            let c = term * T::c(2.0) / ((k + T::one()) * (k + T::c(3.0)));
            sum += c;
            if c.abs() <= T::epsilon() * sum.abs() {
                break;
            }
        }
        return sum;
    }
    sine_integral(y) + (y * y.cos() - y.sin()) / (y * x * T::c(2.0))
}

/// Resonance and threshold parts of one kernel at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelTerms<T> {
    pub resonance: T,
    pub threshold: T,
    pub total: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlateKernelPoint<T> {
    pub nu: T,
    pub m_parallel: T,
    pub m_perp: T,
    pub resonance_term_parallel: T,
    pub threshold_term_parallel: T,
    pub resonance_term_perp: T,
    pub threshold_term_perp: T,
}

/// Kernels at fixed atom, plate and distance, with the `A` coefficients
/// computed once.
#[derive(Debug, Clone, Copy)]
pub struct PlateResponse<T> {
    pub atom: AtomParams<T>,
    pub mirror: MirrorParams<T>,
    pub a: T,
    pub a_parallel: QuadResult<T>,
    pub a_perp: QuadResult<T>,
}

impl<T: Scalar> PlateResponse<T> {
    pub fn new(atom: &AtomParams<T>, mirror: &MirrorParams<T>, a: T, tol: T) -> Result<Self> {
        atom.validate()?;
        mirror.validate()?;
        let a_parallel = coeff_a_parallel(mirror.xi, mirror.omega_m, a, tol)?;
        let a_perp = coeff_a_perp(mirror.xi, mirror.omega_m, a, tol)?;
        Ok(Self {
            atom: *atom,
            mirror: *mirror,
            a,
            a_parallel,
            a_perp,
        })
    }

    /// `Ω_m + Ω_p`.
    pub fn resonance(&self) -> T {
        self.mirror.omega_m + self.atom.omega_p
    }

    /// Half width at half maximum of the resonance Lorentzian in `ν`.
    pub fn resonance_half_width(&self) -> T {
        self.mirror.xi / (T::c(2.0) * self.resonance())
    }

    /// `(δ_ξ(ν² - R²), θ(|ν|-Ω_p) k² P_ξ(k² - Ω_m²), k)` with `k = |ν| - Ω_p`.
    fn shared(&self, nu: T) -> Result<(T, T, T)> {
        let xi = self.mirror.xi;
        let r = self.resonance();
        let detune = nu * nu - r * r;
        let delta = if xi > T::zero() {
            delta_xi(detune, xi)?
        } else if detune == T::zero() {
            return Err(Error::RegularizationRequired { nu: nu.as_f64() });
        } else {
            T::zero()
        };
        let k = nu.abs() - self.atom.omega_p;
        if !(k > T::zero()) {
            return Ok((delta, T::zero(), k));
        }
        let x = k * k - self.mirror.omega_m * self.mirror.omega_m;
        if xi == T::zero() && x == T::zero() {
            return Err(Error::RegularizationRequired { nu: nu.as_f64() });
        }
        Ok((delta, k * k * p_xi(x, xi)?, k))
    }

    fn coupling(&self) -> T {
        T::PI() * self.mirror.gamma * self.mirror.gamma * self.atom.g * self.atom.g / (T::c(2.0) * self.atom.omega_p)
    }

    pub fn m_parallel(&self, nu: T) -> Result<KernelTerms<T>> {
        let (delta, thr, k) = self.shared(nu)?;
        let pref = T::c(0.5) * self.coupling();
        let m = self.mirror.omega_m;
        let resonance = pref * self.resonance() / (T::c(4.0) * T::PI() * m) * delta * self.a_parallel.value;
        let threshold = if thr == T::zero() {
            T::zero()
        } else {
            pref / (T::c(8.0) * T::PI() * T::PI()) * thr * coeff_b_parallel(k * self.a)
        };
        Ok(KernelTerms {
            resonance,
            threshold,
            total: resonance + threshold,
        })
    }

    pub fn m_perp(&self, nu: T) -> Result<KernelTerms<T>> {
        let (delta, thr, k) = self.shared(nu)?;
        let pref = self.coupling();
        let m = self.mirror.omega_m;
        let resonance = pref * self.resonance() / (T::c(16.0) * T::PI() * m) * delta * self.a_perp.value;
        let threshold = if thr == T::zero() {
            T::zero()
        } else {
            -pref / (T::c(8.0) * T::PI() * T::PI()) * thr * coeff_b_perp(k * self.a)
        };
        Ok(KernelTerms {
            resonance,
            threshold,
            total: resonance + threshold,
        })
    }

    pub fn point(&self, nu: T) -> Result<PlateKernelPoint<T>> {
        let par = self.m_parallel(nu)?;
        let perp = self.m_perp(nu)?;
        Ok(PlateKernelPoint {
            nu,
            m_parallel: par.total,
            m_perp: perp.total,
            resonance_term_parallel: par.resonance,
            threshold_term_parallel: par.threshold,
            resonance_term_perp: perp.resonance,
            threshold_term_perp: perp.threshold,
        })
    }

    /// Frequencies where the kernels have structure, for splitting `ν` integrals.
    fn breakpoints(&self) -> Vec<T> {
        let r = self.resonance();
        let w = self.resonance_half_width();
        let mut out = vec![self.atom.omega_p, self.atom.omega_p + self.mirror.omega_m, r];
        for k in [1.0, 5.0, 25.0] {
            out.push(r - T::c(k) * w);
            out.push(r + T::c(k) * w);
        }
        out
    }
}

pub fn m_parallel<T: Scalar>(
    atom: &AtomParams<T>,
    mirror: &MirrorParams<T>,
    a: T,
    nu: T,
    tol: T,
) -> Result<KernelTerms<T>> {
    PlateResponse::new(atom, mirror, a, tol)?.m_parallel(nu)
}

pub fn m_perp<T: Scalar>(
    atom: &AtomParams<T>,
    mirror: &MirrorParams<T>,
    a: T,
    nu: T,
    tol: T,
) -> Result<KernelTerms<T>> {
    PlateResponse::new(atom, mirror, a, tol)?.m_perp(nu)
}

/// `a → ∞` limit of `m_∥`: `(γ²g²/64Ω_p) θ k² P_ξ(k² - Ω_m²)`.
pub fn m_parallel_far_limit<T: Scalar>(atom: &AtomParams<T>, mirror: &MirrorParams<T>, nu: T) -> Result<T> {
    let k = nu.abs() - atom.omega_p;
    if !(k > T::zero()) {
        return Ok(T::zero());
    }
    let x = k * k - mirror.omega_m * mirror.omega_m;
    if mirror.xi == T::zero() && x == T::zero() {
        return Err(Error::RegularizationRequired { nu: nu.as_f64() });
    }
    let c = mirror.gamma * mirror.gamma * atom.g * atom.g / (T::c(64.0) * atom.omega_p);
    Ok(c * k * k * p_xi(x, mirror.xi)?)
}

/// `(1/2) ∫ dν/2π [m_∥ |ỹ_∥|² + m_⊥ |ỹ₃|²]`.
pub fn im_gamma_mp_smallosc<T: Scalar>(
    response: &PlateResponse<T>,
    y_par: &DisplacementSpectrum<'_, T>,
    y_perp: &DisplacementSpectrum<'_, T>,
    nu_max: T,
    tol: T,
) -> Result<QuadResult<T>> {
    let breaks = response.breakpoints();
    let par = spectral_average(
        y_par,
        |nu| response.m_parallel(nu).map(|m| m.total),
        nu_max,
        &breaks,
        tol,
    )?;
    let perp = spectral_average(y_perp, |nu| response.m_perp(nu).map(|m| m.total), nu_max, &breaks, tol)?;
    Ok(par.merge(perp).scale(T::c(0.5)))
}
