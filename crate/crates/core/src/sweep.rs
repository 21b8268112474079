//! Wehrl-entropy scans over the coupling λ. Points are computed in batches
//! on the current rayon pool and handed back strictly in λ order.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::eigensolve::{converge_cutoff, CutoffPolicy};
use crate::error::{Error, Result};
use crate::export::fmt_f64;
use crate::husimi::{default_quadrature, husimi_integrals};
use crate::model::ModelParams;
use crate::quadrature::QuadratureSpec;
use crate::variational::{
    equilibrium_minimize, equilibrium_paper, variational_integrals, wehrl_variational_analytic_at, CatState,
    EquilibriumSource,
};

/// `steps` evenly spaced couplings from `from` to `to` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LambdaRange {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl LambdaRange {
    pub fn new(from: f64, to: f64, steps: usize) -> Result<Self> {
        let r = Self { from, to, steps };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.from.is_finite() && self.to.is_finite()) || self.from < 0.0 || self.to < self.from {
            return Err(Error::Validation(format!(
                "lambda range [{}, {}] must satisfy 0 <= from <= to",
                self.from, self.to
            )));
        }
        if self.steps == 0 || (self.steps == 1 && self.to != self.from) {
            return Err(Error::Validation(
                "steps must be >= 1 (and >= 2 for a non-degenerate range)".into(),
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        let span = self.to - self.from;
        let last = (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.from + span * i as f64 / last).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMethod {
    Both,
    Exact,
    Variational,
}

/// Numerical settings shared by every point of a scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSettings {
    pub cutoff: CutoffPolicy,
    /// Point counts, tolerance and doublings; the α extent is set per point.
    pub quadrature: QuadratureSpec,
    pub source: EquilibriumSource,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            cutoff: CutoffPolicy::default(),
            quadrature: QuadratureSpec::default(),
            source: EquilibriumSource::Minimizer,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VariationalPoint {
    pub alpha_e: f64,
    pub z_e: f64,
    pub w_analytic: Option<f64>,
    pub w_quadrature: f64,
    pub source: EquilibriumSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub w_exact: Option<f64>,
    pub variational: Option<VariationalPoint>,
}

/// Exact Wehrl entropy of the converged ground state at `p`.
pub fn exact_point(p: &ModelParams, settings: &SweepSettings) -> Result<f64> {
    let g = converge_cutoff(p, &settings.cutoff)?;
    let q = QuadratureSpec {
        alpha_extent: default_quadrature(&g).alpha_extent,
        ..settings.quadrature
    };
    Ok(husimi_integrals(&g, &q)?.entropy)
}

pub fn variational_point(p: &ModelParams, settings: &SweepSettings) -> Result<VariationalPoint> {
    let eq = match settings.source {
        EquilibriumSource::Minimizer => equilibrium_minimize(p)?,
        EquilibriumSource::PaperFormula => equilibrium_paper(p),
    };
    let cat = CatState::even(&eq)?;
    let q = QuadratureSpec {
        alpha_extent: cat.default_quadrature().alpha_extent,
        ..settings.quadrature
    };
    Ok(VariationalPoint {
        alpha_e: eq.alpha_e,
        z_e: eq.z_e,
        w_analytic: wehrl_variational_analytic_at(&eq).value,
        w_quadrature: variational_integrals(&cat, &q)?.entropy,
        source: eq.source,
    })
}

fn row(p: &ModelParams, method: SweepMethod, settings: &SweepSettings) -> Result<SweepRow> {
    let w_exact = match method {
        SweepMethod::Variational => None,
        _ => Some(exact_point(p, settings)?),
    };
    let variational = match method {
        SweepMethod::Exact => None,
        _ => Some(variational_point(p, settings)?),
    };
    Ok(SweepRow {
        lambda: p.lambda,
        w_exact,
        variational,
    })
}

/// Runs the scan, calling `emit` once per point in increasing λ.
pub fn wehrl_sweep<F>(
    base: &ModelParams,
    range: &LambdaRange,
    method: SweepMethod,
    settings: &SweepSettings,
    mut emit: F,
) -> Result<()>
where
    F: FnMut(&SweepRow) -> Result<()>,
{
    range.validate()?;
    settings.quadrature.validate()?;
    let params: Vec<ModelParams> = range
        .values()
        .into_iter()
        .map(|l| base.with_lambda(l))
        .collect::<Result<_>>()?;
    let batch = rayon::current_num_threads().max(1);
    for chunk in params.chunks(batch) {
        let rows: Vec<Result<SweepRow>> = chunk.par_iter().map(|p| row(p, method, settings)).collect();
        for r in rows {
            emit(&r?)?;
        }
    }
    Ok(())
}

pub fn collect_sweep(
    base: &ModelParams,
    range: &LambdaRange,
    method: SweepMethod,
    settings: &SweepSettings,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(range.steps);
    wehrl_sweep(base, range, method, settings, |r| {
        rows.push(*r);
        Ok(())
    })?;
    Ok(rows)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// CSV header for the columns `method` produces.
pub fn csv_header(method: SweepMethod) -> &'static str {
    match method {
        SweepMethod::Both => "lambda,W_exact,W_variational",
        SweepMethod::Exact => "lambda,W",
        SweepMethod::Variational => "lambda,alpha_e,z_e,W_analytic,W_quadrature,source",
    }
}

/// One CSV line; the crossover regime leaves `W_analytic` empty.
pub fn csv_line(r: &SweepRow, method: SweepMethod) -> String {
    let lambda = fmt_f64(r.lambda);
    match (method, r.variational) {
        (SweepMethod::Exact, _) => format!("{lambda},{}", opt(r.w_exact)),
        (SweepMethod::Both, v) => format!("{lambda},{},{}", opt(r.w_exact), opt(v.map(|v| v.w_quadrature))),
        (SweepMethod::Variational, Some(v)) => format!(
            "{lambda},{},{},{},{},{}",
            fmt_f64(v.alpha_e),
            fmt_f64(v.z_e),
            opt(v.w_analytic),
            fmt_f64(v.w_quadrature),
            v.source.as_str()
        ),
        (SweepMethod::Variational, None) => format!("{lambda},,,,,"),
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], method: SweepMethod, mut w: W) -> Result<()> {
    writeln!(w, "{}", csv_header(method))?;
    for r in rows {
        writeln!(w, "{}", csv_line(r, method))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast() -> SweepSettings {
        SweepSettings {
            quadrature: QuadratureSpec::default().with_points(24, 24, 24),
            ..SweepSettings::default()
        }
    }

    #[test]
    fn lambda_grid() {
        let r = LambdaRange::new(0.0, 1.0, 41).unwrap();
        let v = r.values();
        assert_eq!(v.len(), 41);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[40], 1.0);
        assert!((v[20] - 0.5).abs() < 1e-15);
        assert_eq!(LambdaRange::new(0.3, 0.3, 1).unwrap().values(), vec![0.3]);
        assert!(LambdaRange::new(1.0, 0.0, 5).is_err());
        assert!(LambdaRange::new(-0.1, 1.0, 5).is_err());
        assert!(LambdaRange::new(0.0, 1.0, 1).is_err());
        assert!(LambdaRange::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn rows_arrive_in_order_and_match_single_points() {
        let base = ModelParams::resonant(0.0, 1.0).unwrap();
        let range = LambdaRange::new(0.0, 0.9, 4).unwrap();
        let rows = collect_sweep(&base, &range, SweepMethod::Both, &fast()).unwrap();
        let lambdas: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
        assert_eq!(lambdas, range.values());
        let p = base.with_lambda(range.values()[2]).unwrap();
        assert_eq!(rows[2].w_exact.unwrap(), exact_point(&p, &fast()).unwrap());
        assert!((rows[0].w_exact.unwrap() - 5.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn csv_layouts() {
        let base = ModelParams::resonant(0.0, 2.0).unwrap();
        let range = LambdaRange::new(0.2, 1.0, 2).unwrap();
        let rows = collect_sweep(&base, &range, SweepMethod::Variational, &fast()).unwrap();
        let mut out = Vec::new();
        write_csv(&rows, SweepMethod::Variational, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "lambda,alpha_e,z_e,W_analytic,W_quadrature,source");
        assert!(lines[1].starts_with("0.2,0,0,1.8,"));
        assert!(lines[1].ends_with(",minimizer"));
        assert_eq!(lines[2].split(',').count(), 6);
    }
}
