//! Trajectories `t ↦ r(t)` and their spectral functions
//! `f(p, ν) = ∫ dt e^{-ip·r(t)} e^{iνt}`.
//!
//! Uniform motion and harmonic motion have purely discrete spectra; these are
//! returned as tagged lines, `f = 2π Σ wₙ δ(ν - νₙ)`, never as numbers.
//! Sampled trajectories are windowed with a raised-cosine taper and give
//! ordinary values.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quad::{self, bessel_j_upto, QuadConfig};
use crate::Scalar;

pub type Vec3<T> = [T; 3];

fn dot<T: Scalar>(a: &Vec3<T>, b: &Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm<T: Scalar>(a: &Vec3<T>) -> T {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledTrajectory<T> {
    times: Vec<T>,
    positions: Vec<Vec3<T>>,
    flat_fraction: T,
}

impl<T: Scalar> SampledTrajectory<T> {
    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn positions(&self) -> &[Vec3<T>] {
        &self.positions
    }

    pub fn flat_fraction(&self) -> T {
        self.flat_fraction
    }

    /// Tukey window: flat over the central `flat_fraction` of the record,
    /// half-cosine ramps at both ends.
    fn window(&self, t: T) -> T {
        let t0 = self.times[0];
        let total = *self.times.last().unwrap() - t0;
        let ramp = T::c(0.5) * (T::one() - self.flat_fraction) * total;
        if ramp <= T::zero() {
            return T::one();
        }
        let s = t - t0;
        let edge = s.min(total - s);
        if edge >= ramp {
            T::one()
        } else {
            T::c(0.5) * (T::one() - (T::PI() * edge / ramp).cos())
        }
    }

    /// Trapezoid weight times window at each sample.
    fn weights(&self) -> Vec<T> {
        let n = self.times.len();
        (0..n)
            .map(|k| {
                let left = if k > 0 {
                    self.times[k] - self.times[k - 1]
                } else {
                    T::zero()
                };
                let right = if k + 1 < n {
                    self.times[k + 1] - self.times[k]
                } else {
                    T::zero()
                };
                T::c(0.5) * (left + right) * self.window(self.times[k])
            })
            .collect()
    }

    /// `T_eff = ∫ w(t)² dt`, the time normalisation for rates.
    pub fn effective_time(&self) -> T {
        let n = self.times.len();
        (0..n)
            .map(|k| {
                let left = if k > 0 {
                    self.times[k] - self.times[k - 1]
                } else {
                    T::zero()
                };
                let right = if k + 1 < n {
                    self.times[k + 1] - self.times[k]
                } else {
                    T::zero()
                };
                let w = self.window(self.times[k]);
                T::c(0.5) * (left + right) * w * w
            })
            .fold(T::zero(), |a, b| a + b)
    }

    fn transform(&self, weights: &[T], p: &Vec3<T>, nu: T) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for ((t, r), w) in self.times.iter().zip(&self.positions).zip(weights) {
            let phase = nu * *t - dot(p, r);
            acc = acc + Complex::new(phase.cos(), phase.sin()) * *w;
        }
        acc
    }

    pub fn shifted(&self, dt: T, dr: Vec3<T>) -> Self {
        Self {
            times: self.times.iter().map(|&t| t + dt).collect(),
            positions: self
                .positions
                .iter()
                .map(|r| [r[0] + dr[0], r[1] + dr[1], r[2] + dr[2]])
                .collect(),
            flat_fraction: self.flat_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Trajectory<T> {
    /// `r(t) = r₀ + u t`; `u = 0` is the static particle.
    UniformVelocity {
        u: Vec3<T>,
        r0: Vec3<T>,
    },
    /// `r(t) = r₀ + A cos(ν₀ t)`.
    HarmonicLine {
        amplitude: Vec3<T>,
        nu0: T,
        r0: Vec3<T>,
    },
    Sampled(SampledTrajectory<T>),
}

impl<T: Scalar> Trajectory<T> {
    pub fn uniform(u: Vec3<T>, r0: Vec3<T>) -> Result<Self> {
        if !(norm(&u) < T::one()) {
            return Err(Error::domain("speed must be below 1"));
        }
        Ok(Self::UniformVelocity { u, r0 })
    }

    pub fn harmonic(amplitude: Vec3<T>, nu0: T, r0: Vec3<T>) -> Result<Self> {
        if !(nu0 > T::zero()) || !nu0.is_finite() {
            return Err(Error::domain("nu0 must be positive"));
        }
        if !(norm(&amplitude) * nu0 < T::one()) {
            return Err(Error::domain("peak speed |A| nu0 must be below 1"));
        }
        Ok(Self::HarmonicLine { amplitude, nu0, r0 })
    }

    pub fn sampled(times: Vec<T>, positions: Vec<Vec3<T>>, flat_fraction: T) -> Result<Self> {
        if times.len() != positions.len() {
            return Err(Error::domain("times and positions differ in length"));
        }
        if times.len() < 2 {
            return Err(Error::domain("need at least two samples"));
        }
        if !(flat_fraction >= T::zero() && flat_fraction <= T::one()) {
            return Err(Error::domain("flat fraction must lie in [0, 1]"));
        }
        for k in 1..times.len() {
            let dt = times[k] - times[k - 1];
            if !(dt > T::zero()) {
                return Err(Error::domain(format!("times not strictly increasing at sample {k}")));
            }
            let a = positions[k];
            let b = positions[k - 1];
            let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
            if !(norm(&d) / dt < T::one()) {
                return Err(Error::domain(format!(
                    "finite-difference speed reaches 1 at sample {k}"
                )));
            }
        }
        Ok(Self::Sampled(SampledTrajectory {
            times,
            positions,
            flat_fraction,
        }))
    }

    /// Parse whitespace-separated `t x y z` rows; `#` starts a comment line.
    pub fn parse_sampled(text: &str, flat_fraction: T) -> Result<Self> {
        let mut times = Vec::new();
        let mut positions = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<f64> = line
                .split_whitespace()
                .map(str::parse::<f64>)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::domain(format!("line {}: {e}", lineno + 1)))?;
            if cols.len() != 4 {
                return Err(Error::domain(format!(
                    "line {}: expected 4 columns (t x y z), found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            times.push(T::c(cols[0]));
            positions.push([T::c(cols[1]), T::c(cols[2]), T::c(cols[3])]);
        }
        Self::sampled(times, positions, flat_fraction)
    }
}

/// `2π · weight · δ(ν - nu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine<T> {
    pub nu: T,
    pub weight: Complex<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralValue<T> {
    Lines(Vec<SpectralLine<T>>),
    Value(Complex<T>),
}

impl<T: Scalar> SpectralValue<T> {
    pub fn pointwise(&self) -> Result<Complex<T>> {
        match self {
            Self::Value(v) => Ok(*v),
            Self::Lines(_) => Err(Error::DistributionalSpectrum("sum of delta lines")),
        }
    }
}

fn harmonic_orders<T: Scalar>(z: T) -> usize {
    (z.abs().as_f64() * 1.5) as usize + 30
}

/// `f(p, ν)` for one momentum. Distributional spectra return their full
/// line set and ignore `nu`.
pub fn spectrum_f<T: Scalar>(traj: &Trajectory<T>, p: Vec3<T>, nu: T) -> Result<SpectralValue<T>> {
    match traj {
        Trajectory::UniformVelocity { u, r0 } => {
            let ph = -dot(&p, r0);
            Ok(SpectralValue::Lines(vec![SpectralLine {
                nu: dot(&p, u),
                weight: Complex::new(ph.cos(), ph.sin()),
            }]))
        }
        Trajectory::HarmonicLine { amplitude, nu0, r0 } => {
            // e^{-iz cos θ} = Σ (-i)ⁿ Jₙ(z) e^{inθ}
            let z = dot(&p, amplitude);
            let nmax = harmonic_orders(z);
            let j = bessel_j_upto(nmax, z);
            let ph = -dot(&p, r0);
            let base = Complex::new(ph.cos(), ph.sin());
            let mut lines = Vec::with_capacity(2 * nmax + 1);
            for n in -(nmax as i64)..=(nmax as i64) {
                let m = n.unsigned_abs() as usize;
                let jn = if n < 0 && m % 2 == 1 { -j[m] } else { j[m] };
                let phase = match n.rem_euclid(4) {
                    0 => Complex::new(T::one(), T::zero()),
                    1 => Complex::new(T::zero(), -T::one()),
                    2 => Complex::new(-T::one(), T::zero()),
                    _ => Complex::new(T::zero(), T::one()),
                };
                lines.push(SpectralLine {
                    nu: -T::c(n as f64) * *nu0,
                    weight: base * phase * jn,
                });
            }
            Ok(SpectralValue::Lines(lines))
        }
        Trajectory::Sampled(s) => Ok(SpectralValue::Value(s.transform(&s.weights(), &p, nu))),
    }
}

/// Second-order term `-(1/2) e^{-ip·r₀} pⁱpʲ (ỹⁱ ⋆ ỹʲ)(ν)` of the
/// small-amplitude expansion: lines at `0` and `±2ν₀`.
pub fn second_order_lines<T: Scalar>(traj: &Trajectory<T>, p: Vec3<T>) -> Result<Vec<SpectralLine<T>>> {
    let Trajectory::HarmonicLine { amplitude, nu0, r0 } = traj else {
        return Err(Error::ExpansionInvalid(
            "second-order lines are only defined for harmonic motion".into(),
        ));
    };
    let z = dot(&p, amplitude);
    let ph = -dot(&p, r0);
    let base = Complex::new(ph.cos(), ph.sin());
    let quarter = z * z / T::c(4.0);
    Ok(vec![
        SpectralLine {
            nu: T::zero(),
            weight: base * (-quarter),
        },
        SpectralLine {
            nu: T::c(2.0) * *nu0,
            weight: base * (-quarter / T::c(2.0)),
        },
        SpectralLine {
            nu: -T::c(2.0) * *nu0,
            weight: base * (-quarter / T::c(2.0)),
        },
    ])
}

/// Small-amplitude line decomposed against a plate with normal `ẑ`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LineSpectrum<T> {
    pub nu0: T,
    pub amplitude_par_sq: T,
    pub amplitude_perp_sq: T,
}

impl<T: Scalar> LineSpectrum<T> {
    pub fn parallel(&self) -> DisplacementSpectrum<'static, T> {
        DisplacementSpectrum::Line {
            nu0: self.nu0,
            amplitude_sq: self.amplitude_par_sq,
        }
    }

    pub fn perpendicular(&self) -> DisplacementSpectrum<'static, T> {
        DisplacementSpectrum::Line {
            nu0: self.nu0,
            amplitude_sq: self.amplitude_perp_sq,
        }
    }

    pub fn total(&self) -> DisplacementSpectrum<'static, T> {
        DisplacementSpectrum::Line {
            nu0: self.nu0,
            amplitude_sq: self.amplitude_par_sq + self.amplitude_perp_sq,
        }
    }
}

pub fn smallosc_lines<T: Scalar>(traj: &Trajectory<T>) -> Result<LineSpectrum<T>> {
    match traj {
        Trajectory::HarmonicLine { amplitude, nu0, .. } => Ok(LineSpectrum {
            nu0: *nu0,
            amplitude_par_sq: amplitude[0] * amplitude[0] + amplitude[1] * amplitude[1],
            amplitude_perp_sq: amplitude[2] * amplitude[2],
        }),
        Trajectory::UniformVelocity { .. } => {
            Err(Error::ExpansionInvalid("uniform motion has unbounded excursion".into()))
        }
        Trajectory::Sampled(_) => Err(Error::ExpansionInvalid(
            "sampled motion has no single-line small-amplitude form".into(),
        )),
    }
}

/// Power spectrum `|ỹ(ν)|²` per unit time of one displacement component.
#[derive(Clone, Copy)]
pub enum DisplacementSpectrum<'a, T> {
    /// Density over the whole real `ν` axis.
    Density(&'a (dyn Fn(T) -> T + Sync)),
    /// `y(t) = A cos(ν₀ t)`: lines at `±ν₀`, each of weight `A²/4`.
    Line { nu0: T, amplitude_sq: T },
}

impl<T: fmt::Debug> fmt::Debug for DisplacementSpectrum<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Density(_) => f.write_str("Density(..)"),
            Self::Line { nu0, amplitude_sq } => f
                .debug_struct("Line")
                .field("nu0", nu0)
                .field("amplitude_sq", amplitude_sq)
                .finish(),
        }
    }
}

/// `weight · δ(p - p)` in the radial momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialLine<T> {
    pub p: T,
    pub weight: T,
}

/// Angular average of `|f(p, p+Ω_p)|²` per unit time, as a function of `p`.
#[derive(Clone)]
pub enum RadialSpectrum<T> {
    Zero,
    Lines(Vec<RadialLine<T>>),
    Density(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T: Scalar> RadialSpectrum<T> {
    pub fn density(f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self::Density(Arc::new(f))
    }

    pub fn at(&self, p: T) -> Result<T> {
        match self {
            Self::Zero => Ok(T::zero()),
            Self::Lines(_) => Err(Error::DistributionalSpectrum("radial lines")),
            Self::Density(f) => Ok(f(p)),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for RadialSpectrum<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => f.write_str("Zero"),
            Self::Lines(l) => f.debug_tuple("Lines").field(l).finish(),
            Self::Density(_) => f.write_str("Density(..)"),
        }
    }
}

const MAX_HARMONIC_LINES: usize = 400;
const SPHERE_POLAR: usize = 24;
const SPHERE_AZIMUTH: usize = 32;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre<T: Scalar>(n: usize) -> Vec<(T, T)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (T::c(x), T::c(2.0 / ((1.0 - x * x) * dp * dp)))
        })
        .collect()
}

/// Radial spectrum feeding the first-order free-space rate.
///
/// Uniform motion never reaches `ν = p + Ω_p` because `|u| < 1`. Harmonic
/// motion gives lines at `p = mν₀ - Ω_p` with weight `2π ⟨J_m(p A·p̂)²⟩`.
pub fn f_sq_angular_integrated<T: Scalar>(traj: &Trajectory<T>, omega_p: T) -> Result<RadialSpectrum<T>> {
    if !(omega_p > T::zero()) {
        return Err(Error::domain("omega_p must be positive"));
    }
    match traj {
        Trajectory::UniformVelocity { .. } => Ok(RadialSpectrum::Zero),
        Trajectory::HarmonicLine { amplitude, nu0, .. } => {
            let amp = norm(amplitude);
            if amp == T::zero() {
                return Ok(RadialSpectrum::Zero);
            }
            let cfg = QuadConfig::relative(T::c(1e-10));
            let mut lines: Vec<RadialLine<T>> = Vec::new();
            let mut running = T::zero();
            let mut quiet = 0;
            let first = (omega_p / *nu0).floor().to_usize().unwrap_or(usize::MAX - 1) + 1;
            for m in first..first + MAX_HARMONIC_LINES {
                let p = T::c(m as f64) * *nu0 - omega_p;
                if p <= T::zero() {
                    continue;
                }
                let avg = quad::integrate_with(
                    |mu: T| bessel_j_upto(m, p * amp * mu)[m].powi(2),
                    T::zero(),
                    T::one(),
                    &cfg,
                )?;
                let weight = T::c(2.0) * T::PI() * avg.value;
                running += p * weight;
                lines.push(RadialLine { p, weight });
                if p * weight <= T::epsilon() * running {
                    quiet += 1;
                    if quiet >= 3 {
                        break;
                    }
                } else {
                    quiet = 0;
                }
            }
            Ok(RadialSpectrum::Lines(lines))
        }
        Trajectory::Sampled(s) => {
            let s = s.clone();
            let weights = s.weights();
            let t_eff = s.effective_time();
            let polar = gauss_legendre::<T>(SPHERE_POLAR);
            Ok(RadialSpectrum::density(move |p: T| {
                let nu = p + omega_p;
                let mut acc = T::zero();
                for &(mu, wmu) in &polar {
                    let st = (T::one() - mu * mu).max(T::zero()).sqrt();
                    for k in 0..SPHERE_AZIMUTH {
                        let phi = T::c(2.0) * T::PI() * T::c(k as f64) / T::c(SPHERE_AZIMUTH as f64);
                        let dir = [st * phi.cos(), st * phi.sin(), mu];
                        let pv = [p * dir[0], p * dir[1], p * dir[2]];
                        acc += wmu * s.transform(&weights, &pv, nu).norm_sqr();
                    }
                }
                acc / (T::c(2.0 * SPHERE_AZIMUTH as f64) * t_eff)
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_space::{im_gamma1_general, im_gamma1_smallosc, m_p_first_order};
    use crate::params::AtomParams;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn close(a: Complex<f64>, b: Complex<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    fn wobble(n: usize, amp: f64) -> Trajectory<f64> {
        let times: Vec<f64> = (0..n).map(|k| k as f64 * 0.05).collect();
        let pos = times
            .iter()
            .map(|&t| {
                [
                    amp * (1.3 * t).sin(),
                    0.5 * amp * (0.7 * t).cos(),
                    amp * (2.1 * t).sin(),
                ]
            })
            .collect();
        Trajectory::sampled(times, pos, 0.5).unwrap()
    }

    #[test]
    fn static_particle_is_zero_frequency_line() {
        let r0 = [0.3, -1.0, 2.0];
        let t = Trajectory::<f64>::uniform([0.0; 3], r0).unwrap();
        let p = [1.0, 0.5, -0.2];
        let f = spectrum_f(&t, p, 0.7).unwrap();
        let SpectralValue::Lines(lines) = &f else { panic!() };
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].nu, 0.0);
        let ph: f64 = -(0.3 - 0.5 - 0.4);
        assert!(close(lines[0].weight, Complex::new(ph.cos(), ph.sin()), 1e-15));
        assert!(matches!(f.pointwise(), Err(Error::DistributionalSpectrum(_))));
    }

    #[test]
    fn uniform_velocity_support() {
        let t = Trajectory::<f64>::uniform([0.4, 0.0, 0.0], [0.0; 3]).unwrap();
        let SpectralValue::Lines(l) = spectrum_f(&t, [2.0, 1.0, 0.0], 0.0).unwrap() else {
            panic!()
        };
        assert_eq!(l[0].nu, 0.8);
        assert!(Trajectory::<f64>::uniform([1.0, 0.0, 0.0], [0.0; 3]).is_err());
    }

    #[test]
    fn harmonic_first_order_lines() {
        let a = 1e-3;
        let t = Trajectory::<f64>::harmonic([a, 0.0, 0.0], 2.0, [0.0; 3]).unwrap();
        let p = [1.5, 0.0, 0.0];
        let SpectralValue::Lines(l) = spectrum_f(&t, p, 0.0).unwrap() else {
            panic!()
        };
        // f⁽¹⁾ = -i pA π[δ(ν-ν₀) + δ(ν+ν₀)] = 2π (-i pA/2) δ(ν∓ν₀)
        for target in [2.0, -2.0] {
            let w = l.iter().find(|x| x.nu == target).unwrap().weight;
            assert!(close(w, Complex::new(0.0, -1.5 * a / 2.0), 1e-6), "{w}");
        }
        let w0 = l.iter().find(|x| x.nu == 0.0).unwrap().weight;
        assert!((w0.re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn second_order_matches_bessel_expansion() {
        let t = Trajectory::<f64>::harmonic([0.0, 2e-3, 1e-3], 1.0, [0.1, 0.2, 0.3]).unwrap();
        let p = [0.0, 3.0, -1.0];
        let SpectralValue::Lines(exact) = spectrum_f(&t, p, 0.0).unwrap() else {
            panic!()
        };
        let second = second_order_lines(&t, p).unwrap();
        for s in &second {
            let e = exact.iter().find(|x| x.nu == s.nu).unwrap().weight;
            let e2 = if s.nu == 0.0 {
                let ph: f64 = -0.3;
                e - Complex::new(ph.cos(), ph.sin())
            } else {
                e
            };
            assert!((e2 - s.weight).norm() < 1e-3 * s.weight.norm(), "{e2} {}", s.weight);
        }
        let u = Trajectory::<f64>::uniform([0.1, 0.0, 0.0], [0.0; 3]).unwrap();
        assert!(matches!(second_order_lines(&u, p), Err(Error::ExpansionInvalid(_))));
    }

    #[test]
    fn line_decomposition() {
        let a = 0.01;
        let s = |amp| smallosc_lines(&Trajectory::harmonic(amp, 1.0, [0.0; 3]).unwrap()).unwrap();
        let l = s([a, 0.0, 0.0]);
        assert_eq!((l.amplitude_par_sq, l.amplitude_perp_sq), (a * a, 0.0));
        let l = s([0.0, 0.0, a]);
        assert_eq!((l.amplitude_par_sq, l.amplitude_perp_sq), (0.0, a * a));
        let b = a / 2f64.sqrt();
        let l = s([b, 0.0, b]);
        assert!((l.amplitude_par_sq - a * a / 2.0).abs() < 1e-18);
        assert!((l.amplitude_perp_sq - a * a / 2.0).abs() < 1e-18);
        assert!(matches!(
            smallosc_lines(&wobble(10, 0.01)),
            Err(Error::ExpansionInvalid(_))
        ));
    }

    #[test]
    fn harmonic_below_threshold_has_no_first_order_line() {
        let t = Trajectory::<f64>::harmonic([1e-3, 0.0, 0.0], 0.5, [0.0; 3]).unwrap();
        let RadialSpectrum::Lines(l) = f_sq_angular_integrated(&t, 1.0).unwrap() else {
            panic!()
        };
        // the lowest line sits at m = 3 and is third order in the amplitude
        assert!(l[0].p > 0.0 && (l[0].p - 0.5).abs() < 1e-15);
        assert!(l[0].weight < 1e-12);
    }

    #[test]
    fn harmonic_rate_matches_threshold_kernel() {
        let atom = AtomParams::new(1.0, 1.0).unwrap();
        let amp = 1e-3;
        let t = Trajectory::<f64>::harmonic([0.0, amp, 0.0], 2.0, [0.0; 3]).unwrap();
        let spec = f_sq_angular_integrated(&t, 1.0).unwrap();
        let RadialSpectrum::Lines(l) = &spec else { panic!() };
        assert!((l[0].p - 1.0).abs() < 1e-15);
        let general = im_gamma1_general(&atom, &spec, None, 1e-10).unwrap().value;
        let line = smallosc_lines(&t).unwrap().total();
        let small = im_gamma1_smallosc(&atom, &line, 10.0, 1e-10).unwrap().value;
        let direct = m_p_first_order(&atom, 2.0) * amp * amp / 4.0;
        assert!((small - direct).abs() < 1e-14 * direct);
        assert!((general - direct).abs() < 1e-5 * direct, "{general} {direct}");
    }

    #[test]
    fn static_and_uniform_radial_spectra_vanish() {
        let t = Trajectory::<f64>::uniform([0.5, 0.0, 0.0], [0.0; 3]).unwrap();
        let s = f_sq_angular_integrated(&t, 1.0).unwrap();
        assert_eq!(s.at(2.0).unwrap(), 0.0);
    }

    #[test]
    fn sampled_window_and_effective_time() {
        let n = 401;
        let times: Vec<f64> = (0..n).map(|k| k as f64 * 0.01).collect();
        let t = Trajectory::sampled(times, vec![[0.0; 3]; n], 0.5).unwrap();
        let Trajectory::Sampled(s) = &t else { panic!() };
        // flat over half the record, two cosine ramps with ⟨w²⟩ = 3/8
        let expect = 4.0 * (0.5 + 0.5 * 3.0 / 8.0);
        assert!((s.effective_time() - expect).abs() < 1e-4);
        assert_eq!(s.window(2.0), 1.0);
        assert_eq!(s.window(0.0), 0.0);
    }

    #[test]
    fn sampled_static_spectrum_concentrates_at_zero() {
        let n = 2001;
        let times: Vec<f64> = (0..n).map(|k| k as f64 * 0.05).collect();
        let t = Trajectory::sampled(times, vec![[0.0; 3]; n], 0.2).unwrap();
        let at = |nu| spectrum_f(&t, [1.0, 0.0, 0.0], nu).unwrap().pointwise().unwrap().norm();
        assert!(at(10.0) < 1e-6 * at(0.0));
        let s = f_sq_angular_integrated(&t, 1.0).unwrap();
        assert!(s.at(1.0).unwrap() < 1e-8);
    }

    #[test]
    fn parse_text_format() {
        let text = "# t x y z\n0 0 0 0\n0.1 0.01 0 0\n\n# mid\n0.2 0.02 0 0.01\n";
        let t = Trajectory::<f64>::parse_sampled(text, 0.5).unwrap();
        let Trajectory::Sampled(s) = &t else { panic!() };
        assert_eq!(s.times(), &[0.0, 0.1, 0.2]);
        assert_eq!(s.positions()[2], [0.02, 0.0, 0.01]);
        assert!(Trajectory::<f64>::parse_sampled("0 0 0 0\n0 1 0 0\n", 0.5).is_err());
        assert!(Trajectory::<f64>::parse_sampled("0 0 0\n1 0 0\n", 0.5).is_err());
        assert!(Trajectory::<f64>::parse_sampled("0 0 0 0\n0.1 1 0 0\n", 0.5).is_err());
        assert!(Trajectory::<f64>::parse_sampled("0 0 0 0\n1 x 0 0\n", 0.5).is_err());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre::<f64>(SPHERE_POLAR);
        let sum: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((sum - 2.0).abs() < 1e-14);
        let x10: f64 = rule.iter().map(|(x, w)| w * x.powi(10)).sum();
        assert!((x10 - 2.0 / 11.0).abs() < 1e-14);
        let _ = PI;
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn sampled_covariance_and_reality(
            dt in -5.0f64..5.0,
            dx in -3.0f64..3.0,
            px in -4.0f64..4.0,
            pz in -4.0f64..4.0,
            nu in -6.0f64..6.0,
        ) {
            let t = wobble(200, 0.05);
            let Trajectory::Sampled(s) = &t else { unreachable!() };
            let p = [px, 0.3, pz];
            let f = spectrum_f(&t, p, nu).unwrap().pointwise().unwrap();
            let shifted = Trajectory::Sampled(s.shifted(dt, [dx, 0.0, -dx]));
            let g = spectrum_f(&shifted, p, nu).unwrap().pointwise().unwrap();
            prop_assert!((f.norm_sqr() - g.norm_sqr()).abs() <= 1e-10 * (1.0 + f.norm_sqr()));
            let phase = nu * dt - (px * dx - pz * dx);
            let expect = f * Complex::new(phase.cos(), phase.sin());
            prop_assert!((g - expect).norm() <= 1e-9 * (1.0 + f.norm()));
            let r = spectrum_f(&t, [-p[0], -p[1], -p[2]], -nu).unwrap().pointwise().unwrap();
            prop_assert!((r.norm_sqr() - f.norm_sqr()).abs() <= 1e-10 * (1.0 + f.norm_sqr()));
        }

        #[test]
        fn harmonic_line_weights_are_unitary(z in -20.0f64..20.0) {
            // Σ |Jₙ(z)|² = 1: the spectrum only redistributes weight
            let t = Trajectory::<f64>::harmonic([0.04, 0.0, 0.0], 1.0, [0.0; 3]).unwrap();
            let SpectralValue::Lines(l) = spectrum_f(&t, [z / 0.04, 0.0, 0.0], 0.0).unwrap() else { unreachable!() };
            let s: f64 = l.iter().map(|x| x.weight.norm_sqr()).sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
