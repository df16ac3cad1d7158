//! Rate fits and the monotonicity rules applied to sweep errors.

use serde::Serialize;

use crate::stats::Estimate;

/// Points whose error exceeds this many standard errors carry signal.
pub const SIGNAL_RATIO: f64 = 5.0;
/// Allowed growth between consecutive signal points.
pub const MONOTONE_SLACK: f64 = 1.2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Smallest and largest sweep parameter used.
    pub window: (f64, f64),
    pub points: usize,
}

/// Indices whose error is above `SIGNAL_RATIO * se`.
pub fn signal_window(errors: &[Estimate]) -> Vec<usize> {
    errors
        .iter()
        .enumerate()
        .filter(|(_, e)| e.value > SIGNAL_RATIO * e.se && e.value > 0.0)
        .map(|(i, _)| i)
        .collect()
}

/// Least squares of `log y` on `log x` over `idx`; `None` with fewer than 2 points.
pub fn loglog_fit(xs: &[f64], ys: &[f64], idx: &[usize]) -> Option<LogLogFit> {
    if idx.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = idx.iter().map(|&i| xs[i].ln()).collect();
    let ly: Vec<f64> = idx.iter().map(|&i| ys[i].ln()).collect();
    let n = idx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let sel: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
    let lo = sel.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = sel.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Some(LogLogFit { slope, intercept: my - slope * mx, window: (lo, hi), points: idx.len() })
}

/// Among signal points, each error is at most `MONOTONE_SLACK` times the previous one.
pub fn monotone_beyond_noise(errors: &[Estimate]) -> bool {
    let idx = signal_window(errors);
    idx.windows(2).all(|w| errors[w[1]].value <= MONOTONE_SLACK * errors[w[0]].value)
}

/// Every error is a signal point and the sequence strictly decreases.
pub fn strictly_decreasing_signal(errors: &[Estimate]) -> bool {
    signal_window(errors).len() == errors.len()
        && errors.windows(2).all(|w| w[1].value < w[0].value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(v: &[f64]) -> Vec<Estimate> {
        v.iter().map(|&value| Estimate { value, se: 0.01 * value }).collect()
    }

    #[test]
    fn fit_recovers_power_law() {
        let xs = [1e-1, 1e-2, 1e-3, 1e-4];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.sqrt()).collect();
        let f = loglog_fit(&xs, &ys, &[0, 1, 2, 3]).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert_eq!(f.window, (1e-4, 1e-1));
    }

    #[test]
    fn noise_points_are_ignored() {
        let mut e = est(&[1.0, 0.5, 0.2]);
        e.push(Estimate { value: 0.3, se: 0.1 });
        assert_eq!(signal_window(&e), vec![0, 1, 2]);
        assert!(monotone_beyond_noise(&e));
        assert!(!strictly_decreasing_signal(&e));
        assert!(!monotone_beyond_noise(&est(&[1.0, 1.3])));
        assert!(monotone_beyond_noise(&est(&[1.0, 1.1])));
    }
}
