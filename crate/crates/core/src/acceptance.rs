//! The acceptance suite: fifteen numbered checks, each reduced to a
//! pass/fail outcome with the numbers behind it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::free_space::{
    im_gamma1_general, im_gamma1_smallosc, m_p_first_order, sigma_combined_integrand_exact, sigma_ren_total,
};
use crate::friction::{asymptotic_log_slope, friction_large_a_log_slope, friction_rate, FrictionQuery};
use crate::oracle::{oracle_friction_2d, oracle_plate_point, oracle_sigma, OracleReport};
use crate::params::{AtomParams, MirrorParams};
use crate::plate::{
    coeff_a_parallel, coeff_a_perp, coeff_b_parallel, coeff_b_perp, m_parallel_far_limit, PlateResponse,
};
use crate::quad::sine_integral;
use crate::sweep::{evaluate, render_csv, Format, Grid, Scan, ScanParams, Spacing};
use crate::trajectory::{f_sq_angular_integrated, DisplacementSpectrum, Trajectory};

const SEED: u64 = 0x5eed_f0ac;
const TOL: f64 = 1e-10;
const ORACLE_GRID: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// Worst cases first; informational rows may follow.
    pub reports: Vec<OracleReport>,
}

impl CriterionOutcome {
    fn new(id: u32, name: &'static str, passed: bool, reports: Vec<OracleReport>) -> Self {
        Self {
            id,
            name,
            passed,
            reports,
        }
    }

    fn failed(id: u32, name: &'static str, err: crate::Error) -> Self {
        let r = OracleReport::new(format!("error: {err}"), f64::NAN, f64::NAN, "evaluation failed");
        Self::new(id, name, false, vec![r])
    }

    fn from_result(id: u32, name: &'static str, r: Result<(bool, Vec<OracleReport>)>) -> Self {
        match r {
            Ok((passed, reports)) => Self::new(id, name, passed, reports),
            Err(e) => Self::failed(id, name, e),
        }
    }

    /// `criterion 7 [a-closed-form] FAIL: worst ...`
    pub fn summary_line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let worst = self
            .reports
            .first()
            .map(|r| {
                format!(
                    ": {} main={:.6e} ref={:.6e} rel={:.3e} ({})",
                    r.quantity, r.main_value, r.oracle_value, r.rel_diff, r.method
                )
            })
            .unwrap_or_default();
        format!("criterion {:2} [{}] {status}{worst}", self.id, self.name)
    }
}

fn unit_atom() -> AtomParams<f64> {
    AtomParams::new(1.0, 1.0).expect("valid atom")
}

fn worst_first(mut reports: Vec<OracleReport>) -> Vec<OracleReport> {
    reports.sort_by(|a, b| b.rel_diff.total_cmp(&a.rel_diff));
    reports
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    Grid {
        min: lo,
        max: hi,
        points: n,
        spacing: Spacing::Log,
    }
    .values()
    .expect("static grid")
}

fn lsq_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn threshold_law() -> CriterionOutcome {
    let name = "threshold-law";
    let atom = AtomParams::new(1.3, 0.7).expect("valid atom");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut below_ok = true;
    for _ in 0..200 {
        let nu = rng.gen_range(0.0..=atom.omega_p);
        below_ok &= m_p_first_order(&atom, nu) == 0.0 && m_p_first_order(&atom, -nu) == 0.0;
    }
    let mut reports = Vec::new();
    for _ in 0..200 {
        let nu = rng.gen_range(atom.omega_p..10.0 * atom.omega_p);
        let d = nu - atom.omega_p;
        let direct = atom.g * atom.g / (12.0 * std::f64::consts::PI * atom.omega_p) * d * d * d;
        reports.push(OracleReport::new(
            format!("m_p({nu:.6})"),
            m_p_first_order(&atom, nu),
            direct,
            "direct formula",
        ));
    }
    let reports = worst_first(reports);
    let passed = below_ok && reports[0].rel_diff <= 1e-14;
    let mut out = vec![reports[0].clone()];
    out.push(OracleReport::new(
        "zero below threshold (200 draws)",
        if below_ok { 0.0 } else { 1.0 },
        0.0,
        "exact zero",
    ));
    CriterionOutcome::new(1, name, passed, out)
}

fn sigma_slope(lo: f64, hi: f64, n: usize) -> Result<(f64, Vec<f64>)> {
    let xs = log_grid(lo, hi, n);
    let totals = xs
        .iter()
        .map(|&x| sigma_ren_total(x, TOL).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = totals.iter().map(|t| t.abs().ln()).collect();
    Ok((lsq_slope(&lx, &ly), totals))
}

pub fn sigma_low_frequency_slope() -> CriterionOutcome {
    let r = sigma_slope(0.01, 0.1, 20).map(|(slope, totals)| {
        let passed = (slope - 5.0).abs() <= 0.10 && totals.iter().all(|&t| t > 0.0);
        let rep = OracleReport::new(
            "log-log slope of sigma on [0.01, 0.1]",
            slope,
            5.0,
            "least squares; 20 log points; band 0.10",
        );
        (passed, vec![rep])
    });
    CriterionOutcome::from_result(2, "sigma-low-slope", r)
}

pub fn sigma_high_frequency_slope() -> CriterionOutcome {
    let r = sigma_slope(50.0, 200.0, 20).map(|(slope, totals)| {
        let negative = totals.iter().all(|&t| t < 0.0);
        let passed = (slope - 3.0).abs() <= 0.15 && negative;
        let mut reps = vec![OracleReport::new(
            "log-log slope of |sigma| on [50, 200]",
            slope,
            3.0,
            "least squares; 20 log points; band 0.15",
        )];
        reps.push(OracleReport::new(
            "largest total (must be < 0)",
            totals.iter().cloned().fold(f64::MIN, f64::max),
            0.0,
            "sign",
        ));
        (passed, reps)
    });
    CriterionOutcome::from_result(3, "sigma-high-slope", r)
}

/// Differences of the literal integrand between `ε = 1e-3, 1e-4, 1e-5` on
/// each side of the pole; a finite limit makes them shrink like `ε`. Exact
/// arithmetic keeps `f64` rounding of the pole terms out of the picture.
pub fn pole_cancellation() -> CriterionOutcome {
    let mut passed = true;
    let mut reports = Vec::new();
    for x in [1.5f64, 2.0, 5.0] {
        for side in [1.0f64, -1.0] {
            let f = |eps: f64| sigma_combined_integrand_exact(1.0 + side * eps, x);
            let (f3, f4, f5) = (f(1e-3), f(1e-4), f(1e-5));
            let (d1, d2) = ((f3 - f4).abs(), (f4 - f5).abs());
            // exact linear shrink gives 10
            let ratio = d1 / d2;
            let ok = f3.is_finite() && f5.is_finite() && (5.0..=20.0).contains(&ratio);
            passed &= ok;
            reports.push(OracleReport::new(
                format!("x={x} side={side:+}: difference ratio"),
                ratio,
                10.0,
                format!("f(1e-5)={f5:.6e}"),
            ));
        }
    }
    CriterionOutcome::new(4, "pole-cancellation", passed, worst_first(reports))
}

pub fn sigma_oracle() -> CriterionOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut points: Vec<(f64, f64)> = (0..20).map(|_| (rng.gen_range(0.05..0.99), 1e-6)).collect();
    points.extend((0..10).map(|_| (rng.gen_range(1.1..5.0), 1e-5)));
    let rows: Result<Vec<(OracleReport, bool)>> = points
        .par_iter()
        .map(|&(x, tol)| {
            let main = sigma_ren_total(x, 1e-12)?.value;
            let o = oracle_sigma(x, ORACLE_GRID)?;
            let rep = OracleReport::new(
                format!("sigma({x:.6})"),
                main,
                o,
                format!("fixed-grid Romberg; tol {tol:e}"),
            );
            let ok = rep.rel_diff <= tol;
            Ok((rep, ok))
        })
        .collect();
    let r = rows.map(|rows| {
        let passed = rows.iter().all(|(_, ok)| *ok);
        (passed, worst_first(rows.into_iter().map(|(r, _)| r).collect()))
    });
    CriterionOutcome::from_result(5, "sigma-oracle", r)
}

pub fn si_identity() -> CriterionOutcome {
    let reports: Vec<OracleReport> = log_grid(1e-3, 1e3, 50)
        .into_iter()
        .map(|x| {
            let sum = coeff_b_parallel(x) + coeff_b_perp(x);
            OracleReport::new(format!("B sum at x={x:.6e}"), sum, sine_integral(2.0 * x), "Si(2x)")
        })
        .collect();
    let reports = worst_first(reports);
    let passed = reports[0].rel_diff <= 1e-12;
    CriterionOutcome::new(6, "si-identity", passed, reports)
}

/// `(2/a²)(2 - (1 + Ω_m a) e^{-Ω_m a})`.
pub fn a_closed_form(omega_m: f64, a: f64) -> f64 {
    2.0 / (a * a) * (2.0 - (1.0 + omega_m * a) * (-omega_m * a).exp())
}

pub fn a_closed_form_limit() -> CriterionOutcome {
    let r = (|| {
        let mut reports = Vec::new();
        for (m, a) in [(2.0, 1.0), (1.0, 2.0), (4.0, 0.5)] {
            let target = a_closed_form(m, a);
            let par = coeff_a_parallel(1e-4, m, a, 1e-12)?.value;
            let perp = coeff_a_perp(1e-4, m, a, 1e-12)?.value;
            reports.push(OracleReport::new(
                format!("A_par(Om={m}, a={a})"),
                par,
                target,
                "xi=1e-4 vs closed form",
            ));
            reports.push(OracleReport::new(
                format!("A_perp(Om={m}, a={a})"),
                perp,
                target,
                "xi=1e-4 vs closed form",
            ));
        }
        let reports = worst_first(reports);
        Ok((reports[0].rel_diff <= 1e-3, reports))
    })();
    CriterionOutcome::from_result(7, "a-closed-form", r)
}

/// Peak of `|m|` on a grid resolving the Lorentzian, in half-widths from the
/// resonance. Returns the offsets for `|m|` and signed `m`.
fn peak_offsets(r: &PlateResponse<f64>, perp: bool) -> Result<(f64, f64)> {
    let (c, w) = (r.resonance(), r.resonance_half_width());
    let nus: Vec<f64> = (0..=800).map(|i| c + w * (-20.0 + 0.05 * i as f64)).collect();
    let vals = nus
        .iter()
        .map(|&nu| {
            Ok(if perp {
                r.m_perp(nu)?.total
            } else {
                r.m_parallel(nu)?.total
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let argmax = |key: &dyn Fn(f64) -> f64| {
        let i = (0..vals.len())
            .max_by(|&i, &j| key(vals[i]).total_cmp(&key(vals[j])))
            .expect("non-empty");
        (nus[i] - c) / w
    };
    Ok((argmax(&|v| v.abs()), argmax(&|v| v)))
}

pub fn resonance_location() -> CriterionOutcome {
    let r = (|| {
        let mut passed = true;
        let (mut reports, mut offsets) = (Vec::new(), Vec::new());
        for m in [1.0, 2.0] {
            for a in [0.5, 1.0] {
                let mirror = MirrorParams::new(1.0, m, 0.01)?;
                let resp = PlateResponse::new(&unit_atom(), &mirror, a, TOL)?;
                for (label, perp) in [("m_par", false), ("m_perp", true)] {
                    let (abs_off, signed_off) = peak_offsets(&resp, perp)?;
                    passed &= abs_off.abs() <= 1.0;
                    let (c, w) = (resp.resonance(), resp.resonance_half_width());
                    offsets.push(abs_off.abs());
                    reports.push(OracleReport::new(
                        format!("{label} peak (Om={m}, a={a}): {abs_off:+.2} half-widths"),
                        c + abs_off * w,
                        c,
                        format!("peak of |m|; bound 1 half-width; signed maximum at {signed_off:+.2}"),
                    ));
                }
            }
        }
        let mut order: Vec<usize> = (0..reports.len()).collect();
        order.sort_by(|&i, &j| offsets[j].total_cmp(&offsets[i]));
        let reports = order.into_iter().map(|i| reports[i].clone()).collect();
        Ok((passed, reports))
    })();
    CriterionOutcome::from_result(8, "resonance-location", r)
}

pub fn far_plate_dichotomy() -> CriterionOutcome {
    let r = (|| {
        let mirror = MirrorParams::new(1.0, 1.0, 0.01)?;
        let resp = PlateResponse::new(&unit_atom(), &mirror, 50.0, TOL)?;
        let p = resp.point(3.0)?;
        let far = m_parallel_far_limit(&unit_atom(), &mirror, 3.0)?;
        let lim = OracleReport::new("m_par at a=50, nu=3", p.m_parallel, far, "far-plate limit; 2%");
        let ratio = OracleReport::new("|m_perp|/m_par", (p.m_perp / p.m_parallel).abs(), 0.0, "must be < 0.05");
        let passed = lim.rel_diff <= 0.02 && ratio.main_value < 0.05;
        Ok((passed, vec![lim, ratio]))
    })();
    CriterionOutcome::from_result(9, "far-plate", r)
}

pub fn threshold_sign_structure() -> CriterionOutcome {
    let r = (|| {
        let m = 1.0;
        let mirror = MirrorParams::new(1.0, m, 0.01)?;
        let resp = PlateResponse::new(&unit_atom(), &mirror, 1.0, TOL)?;
        let step = 0.01;
        let nus: Vec<f64> = (0..=180).map(|i| 1.2 + step * i as f64).collect();
        let th = nus
            .iter()
            .map(|&nu| resp.m_parallel(nu).map(|k| k.threshold))
            .collect::<Result<Vec<_>>>()?;
        let expected = 1.0 + m;
        let crossings: Vec<f64> = (1..nus.len())
            .filter(|&i| th[i - 1].signum() != th[i].signum())
            .map(|i| 0.5 * (nus[i - 1] + nus[i]))
            .collect();
        let nearest = crossings
            .iter()
            .cloned()
            .min_by(|a, b| (a - expected).abs().total_cmp(&(b - expected).abs()))
            .unwrap_or(f64::NAN);
        let passed = (nearest - expected).abs() <= step;
        let rep = OracleReport::new(
            "threshold sign change of m_par",
            nearest,
            expected,
            format!("grid step {step}"),
        );
        Ok((passed, vec![rep]))
    })();
    CriterionOutcome::from_result(10, "threshold-sign", r)
}

pub fn friction_oracle() -> CriterionOutcome {
    let r = (|| {
        let atom = unit_atom();
        let mut passed = true;
        let mut reports = Vec::new();
        let points = [
            (1.0, 1.0, 1.0, 0.5),
            (1.0, 2.0, 0.5, 0.3),
            (0.5, 1.0, 2.0, 0.8),
            (1.0, 0.5, 1.5, 0.6),
            (1.0, 1.0, 1.0, 0.1),
        ];
        for (gamma, m, a, u) in points {
            let q = FrictionQuery::new(atom, MirrorParams::new(gamma, m, 0.0)?, a, u)?;
            let rep = OracleReport::new(
                format!("friction(gamma={gamma}, Om={m}, a={a}, u={u})"),
                friction_rate(&q, 1e-12)?.value,
                oracle_friction_2d(&q),
                "two-dimensional momentum grid",
            );
            passed &= rep.rel_diff <= 1e-6;
            reports.push(rep);
        }
        let q = FrictionQuery::new(atom, MirrorParams::new(1.0, 1.0, 0.0)?, 1.0, 0.5)?;
        let rates = (1..=10)
            .map(|i| friction_rate(&q.with_distance(0.5 * i as f64)?, TOL).map(|r| r.value))
            .collect::<Result<Vec<_>>>()?;
        let positive = rates.iter().all(|&r| r > 0.0);
        let monotone = rates.windows(2).all(|w| w[1] < w[0]);
        passed &= positive && monotone;
        let mut reports = worst_first(reports);
        reports.push(OracleReport::new(
            "positive and decreasing on a in [0.5, 5]",
            if positive && monotone { 1.0 } else { 0.0 },
            1.0,
            "10-point grid",
        ));
        Ok((passed, reports))
    })();
    CriterionOutcome::from_result(11, "friction-oracle", r)
}

pub fn friction_slope() -> CriterionOutcome {
    let r = (|| {
        let q = FrictionQuery::new(unit_atom(), MirrorParams::new(1.0, 1.0, 0.0)?, 5.0, 0.5)?;
        let slope = friction_large_a_log_slope(&q, 5.0, 6.0, 1e-12)?;
        let target = asymptotic_log_slope(&q);
        let rep = OracleReport::new(
            "d ln(rate)/da on [5, 6]",
            slope,
            target,
            "-(2/u) sqrt((Om+Op)^2 - u^2 Om^2); 1%",
        );
        Ok((rep.rel_diff <= 0.01, vec![rep]))
    })();
    CriterionOutcome::from_result(12, "friction-slope", r)
}

pub fn plate_oracle_point() -> CriterionOutcome {
    let r = (|| {
        let atom = unit_atom();
        let mirror = MirrorParams::new(1.0, 2.0, 0.01)?;
        let main = PlateResponse::new(&atom, &mirror, 1.0, 1e-12)?.m_parallel(2.5)?;
        let o = oracle_plate_point(&atom, &mirror, 1.0, 2.5)?;
        let total = OracleReport::new("m_par(nu=2.5)", main.total, o.total, "unreduced momentum integrals; 1%");
        let passed = total.rel_diff <= 0.01;
        let reports = vec![
            total,
            OracleReport::new("resonance part", main.resonance, o.resonance, "informational"),
            OracleReport::new("threshold part", main.threshold, o.threshold, "informational"),
        ];
        Ok((passed, reports))
    })();
    CriterionOutcome::from_result(13, "plate-oracle", r)
}

pub fn cross_module_consistency() -> CriterionOutcome {
    let r = (|| {
        let atom = unit_atom();
        let amp = 1e-5;
        let nu0 = 2.0 * atom.omega_p;
        let traj = Trajectory::harmonic([0.0, 0.0, amp], nu0, [0.0; 3])?;
        let spectrum = f_sq_angular_integrated(&traj, atom.omega_p)?;
        let general = im_gamma1_general(&atom, &spectrum, None, 1e-12)?.value;
        // the line carries (A²/2) m_p(ν₀) through the spectral average, then
        // the rate takes half of that
        let line = DisplacementSpectrum::Line {
            nu0,
            amplitude_sq: amp * amp,
        };
        let smallosc = im_gamma1_smallosc(&atom, &line, 10.0 * nu0, 1e-12)?.value;
        let closed = 0.5 * m_p_first_order(&atom, nu0) * amp * amp / 2.0;
        let rep = OracleReport::new(
            "harmonic line rate",
            general,
            smallosc,
            "general vs small-oscillation path; 1e-8",
        );
        let ref_closed = OracleReport::new(
            "harmonic line rate",
            general,
            closed,
            "(1/2) m_p(2 Op) A^2/2 closed form",
        );
        Ok((
            rep.rel_diff <= 1e-8 && ref_closed.rel_diff <= 1e-8,
            vec![rep, ref_closed],
        ))
    })();
    CriterionOutcome::from_result(14, "cross-module", r)
}

fn render_with_threads(threads: usize, scan: Scan, grid: &Grid, params: &ScanParams) -> Result<String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(|| evaluate(scan, grid, params, TOL).map(|t| t.render(Format::Csv)))
}

pub fn determinism() -> CriterionOutcome {
    let params = ScanParams::default();
    let nu_grid = Grid {
        min: 0.5,
        max: 4.0,
        points: 24,
        spacing: Spacing::Linear,
    };
    let cases = [
        (Scan::MpScan, nu_grid),
        (
            Scan::SigmaScan,
            Grid {
                min: 0.01,
                max: 5.0,
                points: 24,
                spacing: Spacing::Log,
            },
        ),
        (
            Scan::FrictionScan,
            Grid {
                min: 0.5,
                max: 5.0,
                points: 24,
                spacing: Spacing::Linear,
            },
        ),
        (Scan::PlateScan, nu_grid),
        (Scan::FarLimit, nu_grid),
    ];
    let r = (|| {
        let mut passed = true;
        let mut reports = Vec::new();
        for (scan, grid) in cases {
            let one = render_with_threads(1, scan, &grid, &params)?;
            let four = render_with_threads(4, scan, &grid, &params)?;
            let same = one == four;
            passed &= same;
            reports.push(OracleReport::new(
                format!("{} byte-identical", scan.name()),
                if same { 1.0 } else { 0.0 },
                1.0,
                format!("{} bytes; 1 vs 4 threads", one.len()),
            ));
        }
        Ok((passed, reports))
    })();
    CriterionOutcome::from_result(15, "determinism", r)
}

/// Every criterion, in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    let checks: [fn() -> CriterionOutcome; 15] = [
        threshold_law,
        sigma_low_frequency_slope,
        sigma_high_frequency_slope,
        pole_cancellation,
        sigma_oracle,
        si_identity,
        a_closed_form_limit,
        resonance_location,
        far_plate_dichotomy,
        threshold_sign_structure,
        friction_oracle,
        friction_slope,
        plate_oracle_point,
        cross_module_consistency,
        determinism,
    ];
    checks.iter().map(|c| c()).collect()
}

/// One CSV row per report, tagged with its criterion and status.
pub fn render_report(outcomes: &[CriterionOutcome]) -> String {
    let clean = |s: &str| s.replace([',', '\n'], ";");
    let fmt = crate::sweep::format_value;
    let rows: Vec<Vec<String>> = outcomes
        .iter()
        .flat_map(|o| {
            let status = if o.passed { "PASS" } else { "FAIL" };
            o.reports.iter().map(move |r| {
                vec![
                    o.id.to_string(),
                    o.name.to_string(),
                    status.to_string(),
                    clean(&r.quantity),
                    fmt(r.main_value),
                    fmt(r.oracle_value),
                    fmt(r.rel_diff),
                    clean(&r.method),
                ]
            })
        })
        .collect();
    render_csv(
        &[
            "criterion",
            "name",
            "status",
            "quantity",
            "main_value",
            "reference_value",
            "rel_diff",
            "method",
        ],
        &rows,
    )
}
