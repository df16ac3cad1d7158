use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::fit::{loglog_fit, signal_window, LogLogFit};
use crate::error::Result;
use crate::stats::Estimate;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub param: f64,
    /// H_p norm of the difference
    pub error: f64,
    pub stderr: f64,
    /// `E sup |u_n - u|^p`
    pub moment: f64,
    pub moment_se: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolvent_distance: Option<f64>,
}

impl SweepPoint {
    pub fn from_moment(param: f64, moment: Estimate, p: f64) -> Self {
        let e = moment.pth_root(p);
        Self {
            param,
            error: e.value,
            stderr: e.se,
            moment: moment.value,
            moment_se: moment.se,
            resolvent_distance: None,
        }
    }

    pub fn estimate(&self) -> Estimate {
        Estimate { value: self.error, se: self.stderr }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Informational checks do not affect the report outcome.
    pub required: bool,
    pub detail: String,
}

impl Check {
    pub fn required(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, required: true, detail: detail.into() }
    }

    pub fn info(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, required: false, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportMeta {
    pub base_seed: u64,
    pub paths: usize,
    pub horizon: f64,
    pub steps: usize,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub theorem_id: String,
    /// Name of the sweep parameter, e.g. `lambda` or `n`.
    pub sweep: String,
    pub points: Vec<SweepPoint>,
    pub fit: Option<LogLogFit>,
    pub checks: Vec<Check>,
    pub details: BTreeMap<String, f64>,
    pub meta: ReportMeta,
}

impl ConvergenceReport {
    pub fn new(theorem_id: &str, sweep: &str, points: Vec<SweepPoint>, meta: ReportMeta) -> Self {
        let errs: Vec<Estimate> = points.iter().map(SweepPoint::estimate).collect();
        let xs: Vec<f64> = points.iter().map(|p| p.param).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.error).collect();
        let fit = loglog_fit(&xs, &ys, &signal_window(&errs));
        Self {
            theorem_id: theorem_id.into(),
            sweep: sweep.into(),
            points,
            fit,
            checks: Vec::new(),
            details: BTreeMap::new(),
            meta,
        }
    }

    pub fn errors(&self) -> Vec<Estimate> {
        self.points.iter().map(SweepPoint::estimate).collect()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn detail(&mut self, key: &str, value: f64) {
        self.details.insert(key.into(), value);
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().filter(|c| c.required).all(|c| c.pass)
    }

    /// `theorem_id,sweep_param,error,stderr,slope,slope_window,pass`
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "theorem_id,sweep_param,error,stderr,slope,slope_window,pass")?;
        let (slope, window) = match &self.fit {
            Some(f) => (format!("{:e}", f.slope), format!("{:e}:{:e}", f.window.0, f.window.1)),
            None => (String::new(), String::new()),
        };
        for p in &self.points {
            writeln!(
                w,
                "{},{:e},{:e},{:e},{},{},{}",
                self.theorem_id,
                p.param,
                p.error,
                p.stderr,
                slope,
                window,
                self.pass()
            )?;
        }
        Ok(())
    }

    /// Log-log plot data `x,y`.
    pub fn write_plot_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "x,y")?;
        for p in &self.points {
            writeln!(w, "{:e},{:e}", p.param, p.error)?;
        }
        Ok(())
    }

    pub fn write_json(&self, w: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(w, self).map_err(std::io::Error::from)?;
        Ok(())
    }
}
