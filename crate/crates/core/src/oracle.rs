//! Brute-force cross-checks, built only with the `oracle` feature.
//!
//! Everything here uses fixed grids (midpoint Romberg or composite
//! Gauss–Legendre) written out below, never the adaptive code in
//! [`crate::quad`], and starts from the unreduced integrals.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::friction::FrictionQuery;
use crate::params::{AtomParams, MirrorParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub quantity: String,
    pub main_value: f64,
    pub oracle_value: f64,
    pub rel_diff: f64,
    pub method: String,
}

impl OracleReport {
    pub fn new(quantity: impl Into<String>, main_value: f64, oracle_value: f64, method: impl Into<String>) -> Self {
        Self {
            quantity: quantity.into(),
            main_value,
            oracle_value,
            rel_diff: (main_value - oracle_value).abs() / oracle_value.abs().max(1e-300),
            method: method.into(),
        }
    }
}

/// Midpoint rule on `n` panels, refined twice and Richardson-extrapolated.
fn romberg<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mid = |m: usize| {
        let h = (b - a) / m as f64;
        (0..m).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
    };
    let (m1, m2, m4) = (mid(n), mid(2 * n), mid(4 * n));
    let r1 = (4.0 * m2 - m1) / 3.0;
    let r2 = (4.0 * m4 - m2) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

/// Gauss–Legendre rule on `[-1, 1]`.
struct GaussLegendre {
    nodes: Vec<(f64, f64)>,
}

impl GaussLegendre {
    fn new(n: usize) -> Self {
        let nodes = (0..n)
            .map(|i| {
                let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut d = 1.0;
                for _ in 0..100 {
                    let mut p = (1.0, x);
                    for k in 2..=n {
                        let k = k as f64;
                        p = (p.1, ((2.0 * k - 1.0) * x * p.1 - (k - 1.0) * p.0) / k);
                    }
                    d = n as f64 * (x * p.1 - p.0) / (x * x - 1.0);
                    let step = p.1 / d;
                    x -= step;
                    if step.abs() < 1e-16 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * d * d))
            })
            .collect();
        Self { nodes }
    }

    fn panel<V, F>(&self, f: &F, a: f64, b: f64) -> V
    where
        V: std::ops::Add<Output = V> + std::ops::Mul<f64, Output = V> + Default,
        F: Fn(f64) -> V,
    {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .fold(V::default(), |acc, &(x, w)| acc + f(c + h * x) * (w * h))
    }

    /// Composite rule over consecutive edges.
    fn over<V, F>(&self, f: &F, edges: &[f64]) -> V
    where
        V: std::ops::Add<Output = V> + std::ops::Mul<f64, Output = V> + Default,
        F: Fn(f64) -> V,
    {
        edges
            .windows(2)
            .fold(V::default(), |acc, e| acc + self.panel(f, e[0], e[1]))
    }
}

fn uniform_edges(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Edges crowding geometrically onto `c` from both sides, down to `fine`.
fn graded_edges(lo: f64, hi: f64, c: f64, fine: f64, uniform_width: f64) -> Vec<f64> {
    let mut e = vec![lo, hi];
    if c > lo && c < hi {
        e.push(c);
        let mut d = fine;
        while d < (c - lo).max(hi - c) {
            if c - d > lo {
                e.push(c - d);
            }
            if c + d < hi {
                e.push(c + d);
            }
            d *= 2.0;
        }
    }
    let n = ((hi - lo) / uniform_width).ceil() as usize;
    e.extend(uniform_edges(lo, hi, n.max(1)));
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    e
}

// ---------------------------------------------------------------- Σ^(ren)

/// The three renormalised integrands at `Ω = 1`, summed as written.
fn sigma_raw(q: f64, x: f64) -> f64 {
    let mut s = 0.0;
    if q < x {
        s += q * (x - q).powi(3) / (q * q - 1.0).powi(2);
    }
    if x > 1.0 {
        let d = x - 1.0;
        s += 1.5 * d * d * (q * q / (q * q - 1.0) - 1.0);
        s += 0.5 * d.powi(3) * (q * q * (q * q - 3.0) / (q * q - 1.0).powi(2) - 1.0);
    }
    s
}

/// `Σ^(ren)/Ω` at `ν/Ω = x` on fixed midpoint grids of `grid_n` cells per
/// region, pairing points symmetrically about `q = Ω`.
pub fn oracle_sigma(nu_over_omega: f64, grid_n: usize) -> Result<f64> {
    let x = nu_over_omega;
    if grid_n < 10_000 {
        return Err(Error::domain("oracle grid needs at least 1e4 cells"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("nu/omega must be finite and non-negative"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x <= 1.0 {
        return Ok(romberg(|q| sigma_raw(q, x), 0.0, x, grid_n));
    }
    let delta = (x - 1.0).min(1.0);
    let below = romberg(|q| sigma_raw(q, x), 0.0, 1.0 - delta, grid_n);
    let paired = romberg(|t| sigma_raw(1.0 + t, x) + sigma_raw(1.0 - t, x), 0.0, delta, grid_n);
    let above = romberg(|q| sigma_raw(q, x), 1.0 + delta, x, grid_n);
    // q = x/t maps the tail onto (0, 1]
    let tail = romberg(|t| sigma_raw(x / t, x) * x / (t * t), 0.0, 1.0, grid_n);
    Ok(below + paired + above + tail)
}

// ------------------------------------------------------------ A and B

fn alpha_beta_direct(u: f64, xi: f64) -> (f64, f64) {
    let r = (u * u + xi * xi).sqrt();
    (((r - u) / 2.0).max(0.0).sqrt(), ((r + u) / 2.0).max(0.0).sqrt())
}

fn a_integral<F: Fn(f64) -> f64>(h: F, omega_m: f64, a: f64, grid_n: usize) -> f64 {
    // u = -v² below zero, u = v² above, truncated where e^{-2a v} < 1e-30
    let below = romberg(|v| 2.0 * v * h(-v * v), 0.0, omega_m, grid_n);
    let above = romberg(|v| 2.0 * v * h(v * v), 0.0, 35.0 / a, grid_n);
    below + above
}

pub fn oracle_a_parallel(xi: f64, omega_m: f64, a: f64, grid_n: usize) -> f64 {
    a_integral(
        |u| {
            let (al, be) = alpha_beta_direct(u, xi);
            let d = u * u + xi * xi;
            if d == 0.0 {
                return 1.0;
            }
            u / d * (-2.0 * be * a).exp() * (u * (2.0 * al * a).cos() + xi * (2.0 * al * a).sin())
        },
        omega_m,
        a,
        grid_n,
    )
}

pub fn oracle_a_perp(xi: f64, omega_m: f64, a: f64, grid_n: usize) -> f64 {
    a_integral(
        |u| {
            let (al, be) = alpha_beta_direct(u, xi);
            (-2.0 * be * a).exp() * (2.0 * al * a).cos()
        },
        omega_m,
        a,
        grid_n,
    )
}

fn b_cells(x: f64) -> usize {
    10_000usize.max((x.abs() * 40.0) as usize)
}

pub fn oracle_b_perp(x: f64) -> f64 {
    romberg(|u| u * (2.0 * x * u).sin(), 0.0, 1.0, b_cells(x))
}

pub fn oracle_b_parallel(x: f64) -> f64 {
    romberg(|u| (1.0 - u * u) / u * (2.0 * x * u).sin(), 0.0, 1.0, b_cells(x))
}

// ------------------------------------------------------------ friction

/// Friction rate from the two-dimensional `p∥` form, with the
/// `δ(|p¹u| - (Ω_m+Ω_p))` resolved in `p¹` and `p²` integrated over the
/// whole line on a Gauss–Legendre grid.
pub fn oracle_friction_2d(q: &FrictionQuery<f64>) -> f64 {
    let (m, p) = (&q.mirror, &q.atom);
    let p1 = (m.omega_m + p.omega_p) / q.u;
    let c = p1 * p1 - m.omega_m * m.omega_m;
    let f = |p2: f64| {
        let s = p2 * p2 + c;
        (-2.0 * q.a * s.sqrt()).exp() / s
    };
    // the integrand falls by e^{-60} at |p²| = √c + 30/a
    let span = c.sqrt() + 30.0 / q.a;
    let width = (q.u * c.sqrt() / q.a).sqrt().min(span) / 4.0;
    let n = ((2.0 * span / width).ceil() as usize).clamp(64, 20_000);
    let gl = GaussLegendre::new(16);
    let integral: f64 = gl.over(&f, &uniform_edges(-span, span, n));
    // (π γ² g² / 32 Ω_p Ω_m) · (1/4π²) · (2/u)
    m.gamma * m.gamma * p.g * p.g / (64.0 * PI * p.omega_p * m.omega_m * q.u) * integral
}

// ---------------------------------------------------------------- plate

/// Unreduced evaluation of `m_∥` at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OraclePlatePoint {
    pub resonance: f64,
    pub threshold: f64,
    pub total: f64,
}

/// `∫ dp³/2π e^{-ip³a} / (p³² + w + iξ)`.
fn propagator_transform(w: f64, xi: f64, a: f64, gl: &GaussLegendre) -> Complex64 {
    // poles at p³ = ±(α - iβ); grade the grid onto p³ = α
    let (al, be) = alpha_beta_direct(w, xi);
    let periods = 200.0;
    let lim = 2.0 * PI * periods / a;
    let fine = (be.min(al.max(be)) / 4.0).max(1e-12);
    let edges = graded_edges(0.0, lim, al, fine, PI / (2.0 * a));
    let f = |p: f64| Complex64::new((p * a).cos(), 0.0) / Complex64::new(p * p + w, xi);
    let s: Complex64 = gl.over(&f, &edges);
    // even integrand: (1/2π)·2∫₀^∞
    s / PI
}

/// `(1/2π) ∫ dq³ e^{-iq³a} / (q³² - s²)` as a principal value, folding the
/// pole at `q³ = s`.
fn pv_transform(s: f64, a: f64, gl: &GaussLegendre) -> f64 {
    let g = |q: f64| (q * a).cos() / ((q - s) * (q + s));
    let folded = |t: f64| g(s + t) + g(s - t);
    let near: f64 = gl.over(&folded, &uniform_edges(0.0, s, 8));
    let periods = 400.0;
    let lim = 2.0 * s + 2.0 * PI * periods / a;
    // geometric panels first: the integrand varies on the scale s near 2s
    let step = PI / (2.0 * a);
    let mut edges = vec![2.0 * s];
    while *edges.last().unwrap() < 2.0 * s + step {
        let e = *edges.last().unwrap();
        edges.push(e + (e - s).min(step));
    }
    let start = *edges.last().unwrap();
    let n = ((lim - start) / step).ceil() as usize;
    edges.extend(uniform_edges(start, lim, n.max(1)).into_iter().skip(1));
    let far: f64 = gl.over(&g, &edges);
    (near + far) / PI
}

/// `m_∥(ν)` from the momentum-space form before the `p³`, `q³` integrals.
///
/// Resonance part: `∫ d²p∥ |p∥|² Re[(∫ dp³/2π e^{-ip³a}/(p² - Ω_m² + iξ))²]`.
/// Threshold part: the `δ(p - |ν| + Ω_p)` fixes `p³ = ±√(k² - p∥²)`; the
/// `q³` principal value and the `p∥` integral are done on grids.
pub fn oracle_plate_point(
    atom: &AtomParams<f64>,
    mirror: &MirrorParams<f64>,
    a: f64,
    nu: f64,
) -> Result<OraclePlatePoint> {
    let (g, w_p) = (atom.g, atom.omega_p);
    let (gamma, m, xi) = (mirror.gamma, mirror.omega_m, mirror.xi);
    if !(xi > 0.0) {
        return Err(Error::domain("oracle needs xi > 0"));
    }
    if !(a > 0.0) {
        return Err(Error::domain("distance a must be positive"));
    }
    let r = m + w_p;
    let half_width = xi / (2.0 * r);
    if (nu.abs() - r).abs() < 2.0 * half_width {
        return Err(Error::domain(
            "oracle is out of domain within two widths of the resonance",
        ));
    }
    let gl = GaussLegendre::new(10);
    let k_par = 0.5 * PI * gamma * gamma * g * g / (2.0 * w_p);

    // resonance: w = p∥² - Ω_m² over [-Ω_m², W]
    let detune = nu * nu - r * r;
    let lorentz = xi / (PI * (detune * detune + xi * xi));
    let w_max = (30.0 / a).powi(2);
    let weight = |w: f64| {
        let gt = propagator_transform(w, xi, a, &gl);
        (w + m * m) * (gt * gt).re
    };
    let w_edges = graded_edges(-m * m, w_max, 0.0, xi / 4.0, (m * m + w_max) / 200.0);
    let gl_outer = GaussLegendre::new(8);
    let res_integral: f64 = gl_outer.over(&weight, &w_edges);
    let resonance = k_par * (r / m) * lorentz * res_integral / (4.0 * PI);

    // threshold
    let k = nu.abs() - w_p;
    let threshold = if k > 0.0 {
        let x = k * k - m * m;
        let pv_lorentz = x / (x * x + xi * xi);
        // p∥ → s = √(k² - p∥²): (1/2π)∫₀^k (k² - s²) s ds · (k/πs) cos(sa) · PV(s)
        let f = |s: f64| (k * k - s * s) * k * (s * a).cos() * pv_transform(s, a, &gl) / (2.0 * PI * PI);
        let n = ((k * a / PI).ceil() as usize * 4).max(40);
        let inner: f64 = gl.over(&f, &uniform_edges(0.0, k, n));
        -k_par / k * pv_lorentz * inner
    } else {
        0.0
    };
    Ok(OraclePlatePoint {
        resonance,
        threshold,
        total: resonance + threshold,
    })
}
