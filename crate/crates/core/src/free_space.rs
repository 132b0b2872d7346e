//! Dissipative kernels of the atom in free space.
//!
//! First order in the coupling: emission requires the centre-of-mass
//! frequency to exceed the internal one, giving the cubic threshold kernel
//! [`m_p_first_order`]. Second order: the renormalised kernel
//! `Σ^(ren) = Σ₁ + Σ₂ + Σ₃`, returned by [`sigma_ren`] in units of `Ω` as a
//! function of `ν/Ω`.

use num_traits::Num;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::AtomParams;
use crate::quad::{self, QuadConfig, QuadResult};
use crate::trajectory::{DisplacementSpectrum, RadialSpectrum};
use crate::Scalar;

/// `(g²/12πΩ_p) θ(|ν| - Ω_p) (|ν| - Ω_p)³`, zero on the threshold itself.
pub fn m_p_first_order<T: Scalar>(atom: &AtomParams<T>, nu: T) -> T {
    let excess = nu.abs() - atom.omega_p;
    if excess > T::zero() {
        atom.g * atom.g / (T::c(12.0) * T::PI() * atom.omega_p) * excess * excess * excess
    } else {
        T::zero()
    }
}

/// First-order imaginary action for a general trajectory,
/// `(g²/4Ω_p) ∫ d³p/(2π)³ |f(p, p+Ω_p)|²/p`, with the angular integral
/// already folded into `spectrum`. Both poles of the one-loop kernel
/// (`ν = ±(p + Ω_p)`) contribute equally, hence `1/4` rather than `1/8`.
pub fn im_gamma1_general<T: Scalar>(
    atom: &AtomParams<T>,
    spectrum: &RadialSpectrum<T>,
    p_max: Option<T>,
    tol: T,
) -> Result<QuadResult<T>> {
    atom.validate()?;
    let pref = atom.g * atom.g / (T::c(8.0) * T::PI() * T::PI() * atom.omega_p);
    let within = |p: T| p_max.map_or(true, |m| p <= m);
    let result = match spectrum {
        RadialSpectrum::Zero => QuadResult {
            value: T::zero(),
            abs_error_estimate: T::zero(),
            evaluations: 0,
            subdivisions: 0,
        },
        RadialSpectrum::Lines(lines) => {
            let value = lines
                .iter()
                .filter(|l| l.p > T::zero() && within(l.p))
                .fold(T::zero(), |acc, l| acc + l.p * l.weight);
            QuadResult {
                value,
                abs_error_estimate: T::zero(),
                evaluations: lines.len(),
                subdivisions: 0,
            }
        }
        RadialSpectrum::Density(f_sq) => {
            let integrand = |p: T| p * f_sq(p);
            let cfg = QuadConfig::relative(tol);
            match p_max {
                Some(m) if m.is_finite() => quad::integrate_with(integrand, T::zero(), m, &cfg)?,
                _ => quad::integrate_semi_infinite_with(integrand, T::zero(), &cfg)?,
            }
        }
    };
    Ok(result.scale(pref))
}

const DENSITY_PANELS: usize = 64;

/// `∫ dν/2π |ỹ(ν)|² K(ν)` per unit time for an even kernel `K`. `breaks`
/// are extra panel edges where `K` has structure.
pub(crate) fn spectral_average<T: Scalar, K>(
    spectrum: &DisplacementSpectrum<'_, T>,
    mut kernel: K,
    nu_max: T,
    breaks: &[T],
    tol: T,
) -> Result<QuadResult<T>>
where
    K: FnMut(T) -> Result<T>,
{
    match spectrum {
        DisplacementSpectrum::Line { nu0, amplitude_sq } => {
            if !(*nu0 > T::zero()) || *amplitude_sq < T::zero() {
                return Err(Error::domain("line spectrum needs nu0 > 0 and amplitude² >= 0"));
            }
            let k = kernel(*nu0)?;
            Ok(QuadResult {
                value: *amplitude_sq * T::c(0.5) * k,
                abs_error_estimate: T::zero(),
                evaluations: 1,
                subdivisions: 0,
            })
        }
        DisplacementSpectrum::Density(y_sq) => {
            if !(nu_max > T::zero()) {
                return Err(Error::domain("nu_max must be positive"));
            }
            let failure = std::cell::RefCell::new(None);
            let integrand = |nu: T| {
                let weight = y_sq(nu) + y_sq(-nu);
                if weight == T::zero() {
                    return T::zero();
                }
                match kernel(nu) {
                    Ok(k) => weight * k,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        T::nan()
                    }
                }
            };
            // Equal starting panels so narrow peaks are not stepped over.
            let cfg = QuadConfig::hybrid(tol);
            let width = nu_max / T::c(DENSITY_PANELS as f64);
            let mut edges: Vec<T> = (0..=DENSITY_PANELS).map(|k| width * T::c(k as f64)).collect();
            edges.extend(breaks.iter().copied().filter(|&b| b > T::zero() && b < nu_max));
            edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
            edges.dedup();
            let mut integrand = integrand;
            let mut total: Option<QuadResult<T>> = None;
            for w in edges.windows(2) {
                let r = quad::integrate_with(&mut integrand, w[0], w[1], &cfg);
                if let Some(e) = failure.borrow_mut().take() {
                    return Err(e);
                }
                let r = r?;
                total = Some(match total {
                    Some(t) => t.merge(r),
                    None => r,
                });
            }
            Ok(total.unwrap().scale(T::one() / (T::c(2.0) * T::PI())))
        }
    }
}

/// `(1/2) ∫ dν/2π |ỹ(ν)|² m_p(ν)`: the small-amplitude first-order rate.
pub fn im_gamma1_smallosc<T: Scalar>(
    atom: &AtomParams<T>,
    spectrum: &DisplacementSpectrum<'_, T>,
    nu_max: T,
    tol: T,
) -> Result<QuadResult<T>> {
    atom.validate()?;
    let r = spectral_average(
        spectrum,
        |nu| Ok(m_p_first_order(atom, nu)),
        nu_max,
        &[atom.omega_p],
        tol,
    )?;
    Ok(r.scale(T::c(0.5)))
}

/// Frequency shift from the linear cutoff divergence,
/// `δΩ = -(g²/4π²) Λ/Ω_ren`.
pub fn freq_shift<T: Scalar>(g: T, omega_ren: T, cutoff_lambda: T) -> Result<T> {
    if !(omega_ren > T::zero()) || !(cutoff_lambda > T::zero()) {
        return Err(Error::domain("renormalised frequency and cutoff must be positive"));
    }
    Ok(-(g * g) / (T::c(4.0) * T::PI() * T::PI()) * cutoff_lambda / omega_ren)
}

/// Renormalised second-order kernel at one frequency, in units of `Ω`.
///
/// `sigma1..3` are Hadamard finite parts taken with a common symmetric
/// bracket around `q = Ω`; individually they depend on that convention, only
/// `total` is physical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaBreakdown<T> {
    pub nu_over_omega: T,
    pub sigma1: T,
    pub sigma2: T,
    pub sigma3: T,
    pub total: T,
    pub abs_error_estimate: T,
}

// Literal integrands with Ω = 1, D = x - 1. Written over `Num` so the same
// formulas can run in exact arithmetic.

fn sigma1_integrand<F: Num + Clone>(q: F, x: F) -> F {
    let d = q.clone() * q.clone() - F::one();
    let r = x - q.clone();
    q * r.clone() * r.clone() * r / (d.clone() * d)
}

fn sigma2_integrand<F: Num + Clone>(q: F, x: F) -> F {
    let two = F::one() + F::one();
    let gap = x - F::one();
    // q²/(q²-1) - 1
    (two.clone() + F::one()) * gap.clone() * gap / (two * (q.clone() - F::one()) * (q + F::one()))
}

fn sigma3_integrand<F: Num + Clone>(q: F, x: F) -> F {
    let two = F::one() + F::one();
    let gap = x - F::one();
    let d = (q.clone() - F::one()) * (q.clone() + F::one());
    // q²(q²-3)/(q²-1)² - 1 = -(q²+1)/(q²-1)²
    let pos = gap.clone() * gap.clone() * gap * (q.clone() * q + F::one()) / (two * d.clone() * d);
    F::zero() - pos
}

fn combined_literal<F: Num + Clone + PartialOrd>(q: F, x: F) -> F {
    let mut s = if q < x {
        sigma1_integrand(q.clone(), x.clone())
    } else {
        F::zero()
    };
    if x > F::one() {
        s = s + sigma2_integrand(q.clone(), x.clone()) + sigma3_integrand(q, x);
    }
    s
}

/// The three renormalised integrands summed as written, with `Σ₁`'s cut off
/// at `q = ν`. All quantities in units of `Ω`. Above threshold the double and
/// simple poles at `q = 1` cancel between the terms.
pub fn sigma_combined_integrand<T: Scalar>(q_over_omega: T, nu_over_omega: T) -> T {
    combined_literal(q_over_omega, nu_over_omega)
}

/// [`sigma_combined_integrand`] evaluated in exact rational arithmetic at
/// the given binary points and rounded once. Free of the `O(D³/ε²)` rounding
/// the pole terms suffer in `f64` close to `q = Ω`.
#[cfg(feature = "oracle")]
pub fn sigma_combined_integrand_exact(q_over_omega: f64, nu_over_omega: f64) -> f64 {
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive};
    let (Some(q), Some(x)) = (
        BigRational::from_float(q_over_omega),
        BigRational::from_float(nu_over_omega),
    ) else {
        return f64::NAN;
    };
    if q == BigRational::one() && x > BigRational::one() {
        return f64::NAN;
    }
    combined_literal(q, x).to_f64().unwrap_or(f64::NAN)
}

/// Combined integrand on `q < ν` with the `(q-1)²` factor divided out of the
/// numerator; equal to [`sigma_combined_integrand`] there, but pole free.
fn combined_reduced<T: Scalar>(q: T, x: T) -> T {
    let gap = x - T::one();
    let num = -q * q + (T::c(3.0) * x - T::c(2.0)) * q - T::c(1.5) * gap * gap - T::c(0.5) * gap * gap * gap;
    let s = q + T::one();
    num / (s * s)
}

fn tail_integrand<T: Scalar>(q: T, x: T) -> T {
    sigma2_integrand(q, x) + sigma3_integrand(q, x)
}

/// Compare the reduced form with the literal sum on both sides of the pole.
fn check_cancellation<T: Scalar>(x: T) -> Result<()> {
    let above = T::c(1e-3).min(T::c(0.5) * (x - T::one()));
    for eps in [above, T::c(-1e-3)] {
        let q = T::one() + eps;
        let literal = sigma_combined_integrand(q, x);
        let reduced = combined_reduced(q, x);
        let scale = T::one() + reduced.abs() + (x - T::one()).powi(3);
        // Literal terms are O(D³/ε²); allow their rounding.
        if (literal - reduced).abs() > T::c(1e-6) * scale {
            return Err(Error::SingularityCancellation {
                at: q.as_f64(),
                residual: (literal - reduced).as_f64(),
            });
        }
    }
    Ok(())
}

/// Total `Σ^(ren)/Ω` at `ν/Ω = x` without the per-term breakdown.
pub fn sigma_ren_total<T: Scalar>(nu_over_omega: T, tol: T) -> Result<QuadResult<T>> {
    let x = nu_over_omega;
    if !(x >= T::zero()) || !x.is_finite() {
        return Err(Error::domain("nu/omega must be finite and non-negative"));
    }
    let cfg = QuadConfig::relative(tol);
    if x == T::zero() {
        return Ok(QuadResult {
            value: T::zero(),
            abs_error_estimate: T::zero(),
            evaluations: 0,
            subdivisions: 0,
        });
    }
    if x <= T::one() {
        // q = x s pulls out the x⁵ scaling; the pole stays outside [0, 1].
        let x5 = x.powi(5);
        let r = quad::integrate_with(
            |s: T| {
                let d = x * x * s * s - T::one();
                let r = T::one() - s;
                s * r * r * r / (d * d)
            },
            T::zero(),
            T::one(),
            &cfg,
        )?;
        return Ok(r.scale(x5));
    }
    check_cancellation(x)?;
    let below = quad::integrate_with(|q| combined_reduced(q, x), T::zero(), T::one(), &cfg)?;
    let above = quad::integrate_with(|q| combined_reduced(q, x), T::one(), x, &cfg)?;
    let tail = quad::integrate_semi_infinite_with(|q| tail_integrand(q, x), x, &cfg)?;
    Ok(below.merge(above).merge(tail))
}

/// Finite part of `∫ f` over `[lo, hi]` (`hi` may be infinite) where
/// `f = c/(q-1)² + b/(q-1) + regular(q)`, using the bracket `[1-δ, 1+δ]`.
/// Inside the bracket the simple pole folds to zero and only the regular part
/// is integrated, so nothing cancels in floating point.
fn finite_part<T: Scalar, F: Fn(T) -> T, G: Fn(T) -> T>(
    f: F,
    regular: G,
    c: T,
    delta: T,
    lo: T,
    hi: T,
    cfg: &QuadConfig<T>,
) -> Result<QuadResult<T>> {
    let one = T::one();
    let mut out = quad::integrate_with(&f, lo, one - delta, cfg)?;
    out = out.merge(if hi.is_finite() {
        quad::integrate_with(&f, one + delta, hi, cfg)?
    } else {
        quad::integrate_semi_infinite_with(&f, one + delta, cfg)?
    });
    let core = quad::integrate_with(&regular, one - delta, one + delta, cfg)?;
    Ok(out.merge(core).merge(QuadResult {
        value: -T::c(2.0) * c / delta,
        abs_error_estimate: T::zero(),
        evaluations: 0,
        subdivisions: 0,
    }))
}

// Regular parts of the partial-fraction split about q = 1. For Σ₁,
// q(x-q)³/(q²-1)² = -1 - (3D²/4)/(q-1) + (D³/4)/(q-1)²
//                   + (3/4)(x+1)²/(q+1) - (1/4)(x+1)³/(q+1)².

fn sigma1_regular<T: Scalar>(q: T, x: T) -> T {
    let (s, xp) = (q + T::one(), x + T::one());
    -T::one() + T::c(0.75) * xp * xp / s - T::c(0.25) * xp * xp * xp / (s * s)
}

fn sigma2_regular<T: Scalar>(q: T, x: T) -> T {
    let gap = x - T::one();
    -T::c(0.75) * gap * gap / (q + T::one())
}

fn sigma3_regular<T: Scalar>(q: T, x: T) -> T {
    let (gap, s) = (x - T::one(), q + T::one());
    -T::c(0.25) * gap * gap * gap / (s * s)
}

/// `Σ^(ren)/Ω` at `ν/Ω = nu_over_omega`, with the per-term breakdown.
pub fn sigma_ren<T: Scalar>(nu_over_omega: T, tol: T) -> Result<SigmaBreakdown<T>> {
    let x = nu_over_omega;
    let total = sigma_ren_total(x, tol)?;
    if x <= T::one() {
        return Ok(SigmaBreakdown {
            nu_over_omega: x,
            sigma1: total.value,
            sigma2: T::zero(),
            sigma3: T::zero(),
            total: total.value,
            abs_error_estimate: total.abs_error_estimate,
        });
    }

    let gap = x - T::one();
    let delta = T::c(0.5) * gap.min(T::one());
    let cfg = QuadConfig {
        abs_tol: tol * (T::one() + gap * gap * gap),
        rel_tol: tol,
        max_subdivisions: quad::MAX_SUBDIVISIONS,
    };
    let c1 = gap * gap * gap / T::c(4.0);
    let (zero, inf) = (T::zero(), T::infinity());
    let s1 = finite_part(
        |q| sigma1_integrand(q, x),
        |q| sigma1_regular(q, x),
        c1,
        delta,
        zero,
        x,
        &cfg,
    )?;
    let s2 = finite_part(
        |q| sigma2_integrand(q, x),
        |q| sigma2_regular(q, x),
        zero,
        delta,
        zero,
        inf,
        &cfg,
    )?;
    let s3 = finite_part(
        |q| sigma3_integrand(q, x),
        |q| sigma3_regular(q, x),
        -c1,
        delta,
        zero,
        inf,
        &cfg,
    )?;

    Ok(SigmaBreakdown {
        nu_over_omega: x,
        sigma1: s1.value,
        sigma2: s2.value,
        sigma3: s3.value,
        total: total.value,
        abs_error_estimate: total.abs_error_estimate,
    })
}

/// `(g⁴/24π³) ∫ dν/2π |ỹ(ν)|² Σ^(ren)(ν, Ω)`; the sign follows `Σ^(ren)`.
pub fn im_gamma2_smallosc<T: Scalar>(
    atom: &AtomParams<T>,
    spectrum: &DisplacementSpectrum<'_, T>,
    nu_max: T,
    tol: T,
) -> Result<QuadResult<T>> {
    atom.validate()?;
    let w = atom.omega_p;
    let inner_tol = tol * T::c(1e-2);
    let kernel = |nu: T| sigma_ren_total(nu.abs() / w, inner_tol).map(|r| w * r.value);
    let r = spectral_average(spectrum, kernel, nu_max, &[w], tol)?;
    let g2 = atom.g * atom.g;
    Ok(r.scale(g2 * g2 / (T::c(24.0) * T::PI().powi(3))))
}
