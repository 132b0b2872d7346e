//! Adaptive quadrature, principal values, Lorentzian approximants and the
//! special functions the kernels need.
//!
//! Every routine returns a [`QuadResult`] or an [`Error`]; a result that did
//! not reach the requested tolerance is never returned as `Ok`.

mod kronrod;
mod lorentz;
mod special;

pub use lorentz::{delta_xi, p_xi};
pub use special::{bessel_j_upto, sine_integral};

use crate::error::{Error, Result};
use crate::Scalar;

use kronrod::gk15;

/// Default hybrid tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Hard cap on interval bisections per call.
pub const MAX_SUBDIVISIONS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_error_estimate: T,
    pub evaluations: usize,
    pub subdivisions: usize,
}

impl<T: Scalar> QuadResult<T> {
    fn zero() -> Self {
        QuadResult {
            value: T::zero(),
            abs_error_estimate: T::zero(),
            evaluations: 0,
            subdivisions: 0,
        }
    }

    /// Combine the results of integrating adjacent pieces.
    pub fn merge(self, other: Self) -> Self {
        QuadResult {
            value: self.value + other.value,
            abs_error_estimate: self.abs_error_estimate + other.abs_error_estimate,
            evaluations: self.evaluations + other.evaluations,
            subdivisions: self.subdivisions + other.subdivisions,
        }
    }

    /// Multiply value and error estimate by a constant factor.
    pub fn scale(self, factor: T) -> Self {
        QuadResult {
            value: self.value * factor,
            abs_error_estimate: self.abs_error_estimate * factor.abs(),
            ..self
        }
    }
}

/// Stopping rule: converged when `error <= max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
}

impl<T: Scalar> QuadConfig<T> {
    /// The absolute-or-relative hybrid used by [`integrate`].
    pub fn hybrid(tol: T) -> Self {
        QuadConfig {
            abs_tol: tol,
            rel_tol: tol,
            max_subdivisions: MAX_SUBDIVISIONS,
        }
    }

    /// Purely relative; for integrals whose magnitude is far from one.
    pub fn relative(tol: T) -> Self {
        QuadConfig {
            abs_tol: T::zero(),
            rel_tol: tol,
            max_subdivisions: MAX_SUBDIVISIONS,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.abs_tol >= T::zero()
            && self.rel_tol >= T::zero()
            && (self.abs_tol > T::zero() || self.rel_tol > T::zero());
        if !ok {
            return Err(Error::domain("quadrature tolerance must be positive"));
        }
        Ok(())
    }
}

impl<T: Scalar> Default for QuadConfig<T> {
    fn default() -> Self {
        Self::hybrid(T::c(DEFAULT_TOL))
    }
}

#[derive(Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    abs_value: T,
}

/// Adaptive Gauss-Kronrod integral of `f` over `[lo, hi]` with the hybrid
/// tolerance `tol`.
pub fn integrate<T: Scalar, F: FnMut(T) -> T>(f: F, lo: T, hi: T, tol: T) -> Result<QuadResult<T>> {
    integrate_with(f, lo, hi, &QuadConfig::hybrid(tol))
}

pub fn integrate_with<T: Scalar, F: FnMut(T) -> T>(
    mut f: F,
    lo: T,
    hi: T,
    cfg: &QuadConfig<T>,
) -> Result<QuadResult<T>> {
    cfg.validate()?;
    if !(lo.is_finite() && hi.is_finite()) || !(lo < hi) {
        return Err(Error::domain(format!(
            "integration bounds must be finite with lo < hi (got [{:e}, {:e}])",
            lo.as_f64(),
            hi.as_f64()
        )));
    }

    let non_finite = |x: T| Error::NonFinite { at: x.as_f64() };
    let first = gk15(&mut f, lo, hi).map_err(non_finite)?;
    let mut evaluations = 15;
    let mut segments = vec![Segment {
        a: lo,
        b: hi,
        value: first.value,
        error: first.error,
        abs_value: first.abs_value,
    }];
    let mut total = first.value;
    let mut total_err = first.error;
    let mut total_abs = first.abs_value;
    let mut subdivisions = 0;

    loop {
        let target = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        // Below this the rule cannot resolve anything further.
        let roundoff = T::c(100.0) * T::epsilon() * total_abs;
        if total_err <= target || total_err <= roundoff {
            return Ok(QuadResult {
                value: total,
                abs_error_estimate: total_err,
                evaluations,
                subdivisions,
            });
        }

        let fail = Error::Convergence {
            estimate: total.as_f64(),
            error_estimate: total_err.as_f64(),
            subdivisions,
        };
        if subdivisions >= cfg.max_subdivisions {
            return Err(fail);
        }

        let (worst, _) =
            segments.iter().enumerate().fold(
                (0, T::neg_infinity()),
                |acc, (i, s)| {
                    if s.error > acc.1 {
                        (i, s.error)
                    } else {
                        acc
                    }
                },
            );
        let seg = segments.swap_remove(worst);
        let mid = T::c(0.5) * (seg.a + seg.b);
        if !(seg.a < mid && mid < seg.b) {
            return Err(fail);
        }

        let left = gk15(&mut f, seg.a, mid).map_err(non_finite)?;
        let right = gk15(&mut f, mid, seg.b).map_err(non_finite)?;
        evaluations += 30;
        subdivisions += 1;

        total = total - seg.value + left.value + right.value;
        total_err = total_err - seg.error + left.error + right.error;
        total_abs = total_abs - seg.abs_value + left.abs_value + right.abs_value;
        // Recompute from scratch occasionally so cancellation in the running
        // sums cannot drift.
        if subdivisions % 64 == 0 {
            total_err = segments
                .iter()
                .map(|s| s.error)
                .fold(left.error + right.error, |a, b| a + b);
        }

        segments.push(Segment {
            a: seg.a,
            b: mid,
            value: left.value,
            error: left.error,
            abs_value: left.abs_value,
        });
        segments.push(Segment {
            a: mid,
            b: seg.b,
            value: right.value,
            error: right.error,
            abs_value: right.abs_value,
        });
    }
}

/// Integral over `[lo, ∞)` through `x = lo + t/(1-t)`.
pub fn integrate_semi_infinite<T: Scalar, F: FnMut(T) -> T>(f: F, lo: T, tol: T) -> Result<QuadResult<T>> {
    integrate_semi_infinite_with(f, lo, &QuadConfig::hybrid(tol))
}

pub fn integrate_semi_infinite_with<T: Scalar, F: FnMut(T) -> T>(
    mut f: F,
    lo: T,
    cfg: &QuadConfig<T>,
) -> Result<QuadResult<T>> {
    if !lo.is_finite() {
        return Err(Error::domain("lower bound must be finite"));
    }
    let mapped = |t: T| {
        let s = T::one() - t;
        let x = lo + t / s;
        if !x.is_finite() {
            return T::zero();
        }
        f(x) / (s * s)
    };
    match integrate_with(mapped, T::zero(), T::one(), cfg) {
        Ok(r) => Ok(r),
        Err(err @ Error::Convergence { estimate, .. }) | Err(err @ Error::NonFinite { at: estimate }) => {
            if tail_diverges(&mut f, lo) {
                Err(Error::Divergence { estimate })
            } else {
                Err(err)
            }
        }
        Err(e) => Err(e),
    }
}

/// Integrate dyadic shells `[lo + 2^k, lo + 2^(k+1)]`; a convergent tail
/// shows shrinking shell contributions.
fn tail_diverges<T: Scalar, F: FnMut(T) -> T>(f: &mut F, lo: T) -> bool {
    let cfg = QuadConfig::hybrid(T::c(1e-6));
    let mut shells = Vec::new();
    for k in 4..24 {
        let a = lo + T::c(2f64.powi(k));
        let b = lo + T::c(2f64.powi(k + 1));
        match integrate_with(&mut *f, a, b, &cfg) {
            Ok(r) => shells.push(r.value.abs()),
            Err(_) => return true,
        }
    }
    let n = shells.len();
    let late = shells[n - 4..].iter().fold(T::zero(), |a, &b| a + b);
    let early = shells[n - 8..n - 4].iter().fold(T::zero(), |a, &b| a + b);
    late > T::zero() && late >= T::c(0.5) * early
}

/// Cauchy principal value of `∫ f` over `[lo, hi]` with a simple pole at
/// `pole`, by symmetric excision: the bracket of half-width
/// `δ = min(pole - lo, hi - pole)` is folded onto `(0, δ]` as
/// `f(pole + x) + f(pole - x)`, where the pole cancels.
pub fn principal_value<T: Scalar, F: FnMut(T) -> T>(f: F, pole: T, lo: T, hi: T, tol: T) -> Result<QuadResult<T>> {
    principal_value_with(f, pole, lo, hi, &QuadConfig::hybrid(tol))
}

pub fn principal_value_with<T: Scalar, F: FnMut(T) -> T>(
    mut f: F,
    pole: T,
    lo: T,
    hi: T,
    cfg: &QuadConfig<T>,
) -> Result<QuadResult<T>> {
    if !(lo < pole && pole < hi) {
        return Err(Error::domain("principal value needs lo < pole < hi"));
    }
    let delta = (pole - lo).min(hi - pole);

    // x * g(x) must vanish at the pole for a simple pole; it grows like 1/x
    // for a double one.
    let probe = |f: &mut F, x: T| {
        let g = f(pole + x) + f(pole - x);
        (x * g).abs()
    };
    let near = probe(&mut f, delta * T::c(1e-9));
    let far = probe(&mut f, delta * T::c(1e-6));
    if !near.is_finite() || (near > T::c(10.0) * far && near > T::c(1e-6)) {
        return Err(Error::NonIntegrableSingularity { at: pole.as_f64() });
    }

    let mut out = QuadResult::zero();
    let left_end = pole - delta;
    let right_end = pole + delta;
    if lo < left_end {
        out = out.merge(integrate_with(&mut f, lo, left_end, cfg)?);
    }
    if right_end < hi {
        out = out.merge(integrate_with(&mut f, right_end, hi, cfg)?);
    }
    let folded = integrate_with(|x: T| f(pole + x) + f(pole - x), T::zero(), delta, cfg)?;
    Ok(out.merge(folded))
}
