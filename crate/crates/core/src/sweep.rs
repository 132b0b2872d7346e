//! Parameter sweeps over the kernels, rendered as CSV or JSON.
//!
//! Grid points are evaluated in parallel and collected in grid order, so the
//! output does not depend on the thread count.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_space::{m_p_first_order, sigma_ren};
use crate::friction::{friction_rate, FrictionQuery};
use crate::params::{AtomParams, MirrorParams};
use crate::plate::{m_parallel_far_limit, PlateResponse};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scan {
    MpScan,
    SigmaScan,
    FrictionScan,
    PlateScan,
    FarLimit,
}

impl Scan {
    pub fn name(self) -> &'static str {
        match self {
            Self::MpScan => "mp-scan",
            Self::SigmaScan => "sigma-scan",
            Self::FrictionScan => "friction-scan",
            Self::PlateScan => "plate-scan",
            Self::FarLimit => "far-limit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::domain("grid needs at least 2 points"));
        }
        if !(self.min < self.max) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::domain("grid needs finite min < max"));
        }
        if self.spacing == Spacing::Log && !(self.min > 0.0) {
            return Err(Error::domain("log grid needs min > 0"));
        }
        Ok(())
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let last = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect())
    }
}

/// Inputs in units of `Ω_p`, plus the overall scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanParams {
    pub g: f64,
    pub gamma: f64,
    pub omega_p: f64,
    pub omega_m_tilde: f64,
    pub xi_tilde: f64,
    pub a_tilde: f64,
    pub u: f64,
}

impl Default for ScanParams {
    fn default() -> Self {
        Self {
            g: 1.0,
            gamma: 1.0,
            omega_p: 1.0,
            omega_m_tilde: 2.0,
            xi_tilde: 0.01,
            a_tilde: 1.0,
            u: 0.5,
        }
    }
}

impl ScanParams {
    fn atom(&self) -> Result<AtomParams<f64>> {
        AtomParams::new(self.g, self.omega_p)
    }

    fn mirror(&self) -> Result<MirrorParams<f64>> {
        MirrorParams::new(
            self.gamma,
            self.omega_m_tilde * self.omega_p,
            self.xi_tilde * self.omega_p * self.omega_p,
        )
    }

    fn a(&self) -> f64 {
        self.a_tilde / self.omega_p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub scan: Scan,
    pub grid: Grid,
    pub params: ScanParams,
    pub tol: f64,
    pub output: PathBuf,
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

fn collect_rows<F>(grid: &[f64], f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync,
{
    // first failure in grid order wins
    grid.par_iter().map(|&x| f(x)).collect::<Vec<_>>().into_iter().collect()
}

/// Evaluate one scan over its grid.
pub fn evaluate(scan: Scan, grid: &Grid, params: &ScanParams, tol: f64) -> Result<Table> {
    if !(tol > 0.0) {
        return Err(Error::domain("tol must be positive"));
    }
    let xs = grid.values()?;
    let w = params.omega_p;
    let (columns, rows) = match scan {
        Scan::MpScan => {
            let atom = params.atom()?;
            let rows = collect_rows(&xs, |nt| Ok(vec![nt, nt * w, m_p_first_order(&atom, nt * w)]))?;
            (vec!["nu_tilde", "nu", "m_p"], rows)
        }
        Scan::SigmaScan => {
            let rows = collect_rows(&xs, |x| {
                let s = sigma_ren(x, tol)?;
                Ok(vec![x, s.sigma1, s.sigma2, s.sigma3, s.total, s.abs_error_estimate])
            })?;
            (
                vec!["nu_over_omega", "sigma1", "sigma2", "sigma3", "total", "err"],
                rows,
            )
        }
        Scan::FrictionScan => {
            let (atom, mirror) = (params.atom()?, params.mirror()?);
            let rows = collect_rows(&xs, |at| {
                let q = FrictionQuery::new(atom, mirror, at / w, params.u)?;
                let r = friction_rate(&q, tol)?;
                Ok(vec![at, at / w, q.u, r.value, r.abs_error_estimate])
            })?;
            (vec!["a_tilde", "a", "u", "rate", "err"], rows)
        }
        Scan::PlateScan => {
            let response = PlateResponse::new(&params.atom()?, &params.mirror()?, params.a(), tol)?;
            let rows = collect_rows(&xs, |nt| {
                let p = response.point(nt * w)?;
                Ok(vec![
                    nt,
                    p.nu,
                    p.m_parallel,
                    p.m_perp,
                    p.resonance_term_parallel,
                    p.threshold_term_parallel,
                    p.resonance_term_perp,
                    p.threshold_term_perp,
                ])
            })?;
            (
                vec![
                    "nu_tilde",
                    "nu",
                    "m_parallel",
                    "m_perp",
                    "resonance_parallel",
                    "threshold_parallel",
                    "resonance_perp",
                    "threshold_perp",
                ],
                rows,
            )
        }
        Scan::FarLimit => {
            let (atom, mirror) = (params.atom()?, params.mirror()?);
            let response = PlateResponse::new(&atom, &mirror, params.a(), tol)?;
            let rows = collect_rows(&xs, |nt| {
                let p = response.point(nt * w)?;
                let far = m_parallel_far_limit(&atom, &mirror, nt * w)?;
                Ok(vec![nt, p.nu, p.m_parallel, far, p.m_perp])
            })?;
            (vec!["nu_tilde", "nu", "m_parallel", "m_parallel_far", "m_perp"], rows)
        }
    };
    Ok(Table { columns, rows })
}

/// Twelve significant digits, independent of locale.
pub fn format_value(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn render_csv(columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

impl Table {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let rows: Vec<Vec<String>> = self
                    .rows
                    .iter()
                    .map(|r| r.iter().map(|&v| format_value(v)).collect())
                    .collect();
                render_csv(&self.columns, &rows)
            }
            Format::Json => {
                // round through the CSV text so both formats carry the same digits
                let rows: Vec<Vec<f64>> = self
                    .rows
                    .iter()
                    .map(|r| r.iter().map(|&v| format_value(v).parse().unwrap_or(f64::NAN)).collect())
                    .collect();
                let doc = serde_json::json!({ "columns": self.columns, "rows": rows });
                let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
                s.push('\n');
                s
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// 2 for domain problems, 3 for quadrature failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(e) if e.is_quadrature_failure() => 3,
            Self::Core(_) => 2,
            Self::Io { .. } => 4,
        }
    }
}

pub fn write_output(path: &Path, contents: &str) -> std::result::Result<(), RunError> {
    std::fs::write(path, contents).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Evaluate, render and write one sweep.
pub fn run(config: &SweepConfig) -> std::result::Result<(), RunError> {
    let table = evaluate(config.scan, &config.grid, &config.params, config.tol)?;
    write_output(&config.output, &table.render(config.format))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(min: f64, max: f64, points: usize, spacing: Spacing) -> Grid {
        Grid {
            min,
            max,
            points,
            spacing,
        }
    }

    #[test]
    fn grid_validation() {
        assert!(grid(0.0, 1.0, 1, Spacing::Linear).validate().is_err());
        assert!(grid(1.0, 1.0, 5, Spacing::Linear).validate().is_err());
        assert!(grid(0.0, 1.0, 5, Spacing::Log).validate().is_err());
        let v = grid(0.01, 1.0, 3, Spacing::Log).values().unwrap();
        assert!((v[1] - 0.1).abs() < 1e-15);
        assert_eq!(grid(0.0, 1.0, 5, Spacing::Linear).values().unwrap()[4], 1.0);
    }

    #[test]
    fn value_formatting() {
        assert_eq!(format_value(1.0), "1.00000000000e0");
        assert_eq!(format_value(-0.0123456789012345), "-1.23456789012e-2");
    }

    #[test]
    fn sigma_scan_schema() {
        let t = evaluate(
            Scan::SigmaScan,
            &grid(0.01, 5.0, 8, Spacing::Log),
            &ScanParams::default(),
            1e-9,
        )
        .unwrap();
        let csv = t.render(Format::Csv);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "nu_over_omega,sigma1,sigma2,sigma3,total,err");
        assert_eq!(csv.lines().count(), 9);
        assert!(!csv.contains('\r'));
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn plate_scan_peaks_at_resonance() {
        let params = ScanParams {
            omega_m_tilde: 2.0,
            xi_tilde: 0.01,
            a_tilde: 1.0,
            ..ScanParams::default()
        };
        let g = grid(2.5, 3.5, 201, Spacing::Linear);
        let t = evaluate(Scan::PlateScan, &g, &params, 1e-10).unwrap();
        let step = 1.0 / 200.0;
        let peak = t
            .rows
            .iter()
            .max_by(|a, b| a[2].abs().partial_cmp(&b[2].abs()).unwrap())
            .unwrap();
        assert!((peak[0] - 3.0).abs() <= step + 1e-12, "{}", peak[0]);
    }

    #[test]
    fn friction_scan_decreases() {
        let g = grid(0.5, 5.0, 10, Spacing::Linear);
        let t = evaluate(Scan::FrictionScan, &g, &ScanParams::default(), 1e-10).unwrap();
        assert!(t.rows.windows(2).all(|w| w[1][3] < w[0][3]));
    }

    #[test]
    fn json_matches_csv_digits() {
        let t = evaluate(
            Scan::MpScan,
            &grid(0.5, 3.0, 4, Spacing::Linear),
            &ScanParams::default(),
            1e-9,
        )
        .unwrap();
        let json: serde_json::Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(json["columns"][2], "m_p");
        assert_eq!(json["rows"].as_array().unwrap().len(), 4);
        let v = json["rows"][3][2].as_f64().unwrap();
        assert_eq!(format_value(v), format_value(t.rows[3][2]));
    }

    #[test]
    fn exit_codes() {
        let bad = evaluate(
            Scan::MpScan,
            &grid(1.0, 0.0, 4, Spacing::Linear),
            &ScanParams::default(),
            1e-9,
        )
        .unwrap_err();
        assert_eq!(RunError::from(bad).exit_code(), 2);
        let q = RunError::Core(Error::Convergence {
            estimate: 0.0,
            error_estimate: 1.0,
            subdivisions: 2000,
        });
        assert_eq!(q.exit_code(), 3);
        let cfg = SweepConfig {
            scan: Scan::MpScan,
            grid: grid(0.5, 3.0, 4, Spacing::Linear),
            params: ScanParams::default(),
            tol: 1e-9,
            output: PathBuf::from("/nonexistent-dir/out.csv"),
            format: Format::Csv,
        };
        assert_eq!(run(&cfg).unwrap_err().exit_code(), 4);
    }

    #[test]
    fn same_output_for_different_thread_counts() {
        let g = grid(0.01, 5.0, 40, Spacing::Log);
        let render = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    evaluate(Scan::SigmaScan, &g, &ScanParams::default(), 1e-9)
                        .unwrap()
                        .render(Format::Csv)
                })
        };
        assert_eq!(render(1), render(4));
    }
}
