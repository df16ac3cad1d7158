//! Empirical maximal inequalities for stochastic convolutions with
//! deterministic integrands.

use nalgebra::DMatrix;

use super::report::{Check, ConvergenceReport, ReportMeta, SweepPoint};
use crate::coefficients::hs_q_squared;
use crate::error::{Error, Result};
use crate::noise::{JumpLaw, MartingaleDriver, NoiseDriver, PoissonRandomMeasureDriver, TimeGrid};
use crate::operators::SpectralOperator;
use crate::solver::{stochastic_convolution, ConvolutionIntegrand};
use crate::stats::{path_moments, Estimate};

/// Constant in `E sup|Y|^2 <= C E int |B Q^{1/2}|_HS^2 dt`: Doob's 4, times
/// the growth `e^{2 eta T}` of a quasi-contraction semigroup.
pub fn maxi2_cap(eta: f64, horizon: f64) -> f64 {
    4.0 * (2.0 * eta * horizon).exp()
}

/// Constant in `E sup|Y|^p <= C E int [int |G|^p m + (int |G|^2 m)^{p/2}] dt`.
/// For `p = 2` both integrals coincide and Doob gives `4 = 2 * 2`; above 2
/// we use the conservative `p^p max(T, 1)^{p/2 - 1}`.
pub fn star_cap(p: f64, eta: f64, horizon: f64) -> f64 {
    let base = if p == 2.0 { 2.0 } else { p.powf(p) * horizon.max(1.0).powf(p / 2.0 - 1.0) };
    base * (p * eta * horizon).exp()
}

#[derive(Clone, Debug)]
pub struct MaximalCase {
    pub name: String,
    pub operator: SpectralOperator,
    pub driver: NoiseDriver,
    pub integrand: ConvolutionIntegrand,
    pub grid: TimeGrid,
    pub p: f64,
}

impl MaximalCase {
    pub fn is_martingale(&self) -> bool {
        matches!(self.driver, NoiseDriver::Martingale(_))
    }

    pub fn cap(&self) -> f64 {
        let (eta, t) = (self.operator.eta(), self.grid.horizon());
        if self.is_martingale() {
            maxi2_cap(eta, t)
        } else {
            star_cap(self.p, eta, t)
        }
    }

    /// Right-hand side integral of the inequality (without the constant).
    pub fn rhs(&self) -> Result<f64> {
        let dt = self.grid.dt();
        match (&self.integrand, &self.driver) {
            (ConvolutionIntegrand::Martingale(cells), NoiseDriver::Martingale(m)) => {
                if self.p != 2.0 {
                    return Err(Error::HypothesisViolated("martingale audit is stated in H_2".into()));
                }
                let q = m.covariance();
                Ok(cells.iter().map(|b| hs_q_squared(b, &q) * dt).sum())
            }
            (ConvolutionIntegrand::Poisson { cells, intensities }, NoiseDriver::Prm(_)) => {
                let p = self.p;
                Ok(cells
                    .iter()
                    .map(|g| {
                        let sq: Vec<f64> = g.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>()).collect();
                        let lp: f64 = sq.iter().zip(intensities).map(|(s, m)| m * s.powf(p / 2.0)).sum();
                        let l2: f64 = sq.iter().zip(intensities).map(|(s, m)| m * s).sum();
                        dt * (lp + l2.powf(p / 2.0))
                    })
                    .sum())
            }
            _ => Err(Error::DriverMismatch(format!("case {}: integrand and driver disagree", self.name))),
        }
    }

    /// `E sup_k |Y(t_k)|^p`
    pub fn lhs(&self, paths: usize, seed: u64) -> Result<Estimate> {
        self.rhs()?;
        let probe = self.driver.sample_path(&self.grid, seed, 0);
        stochastic_convolution(&self.operator, &self.integrand, &probe)?;
        let m = path_moments(paths, 1, |i| {
            let path = self.driver.sample_path(&self.grid, seed, i as u64);
            let y = stochastic_convolution(&self.operator, &self.integrand, &path).expect("checked case");
            vec![y.sup_pow(self.p)]
        });
        Ok(m[0].estimate())
    }
}

/// One point per case: the ratio LHS / RHS with its standard error. A case
/// passes when `ratio + 3 se` stays below its cap.
pub fn audit_maximal(id: &str, cases: &[MaximalCase], paths: usize, seed: u64) -> Result<ConvergenceReport> {
    if paths < 2 {
        return Err(Error::ConfigInvalid("need at least 2 paths".into()));
    }
    let mut points = Vec::new();
    let mut checks = Vec::new();
    let mut fitted = 0.0_f64;
    for (i, case) in cases.iter().enumerate() {
        let lhs = case.lhs(paths, seed)?;
        let rhs = case.rhs()?;
        let (r, se) = if rhs > 0.0 { (lhs.value / rhs, lhs.se / rhs) } else { (0.0, 0.0) };
        let ok = if rhs > 0.0 { r + 3.0 * se <= case.cap() } else { lhs.value == 0.0 };
        fitted = fitted.max(r);
        points.push(SweepPoint {
            param: (i + 1) as f64,
            error: r,
            stderr: se,
            moment: lhs.value,
            moment_se: lhs.se,
            resolvent_distance: None,
        });
        checks.push(Check::required(
            &format!("case_{}", i + 1),
            ok,
            format!("{}: ratio {r:.4} +- {se:.4}, cap {:.2}", case.name, case.cap()),
        ));
    }
    let meta = ReportMeta {
        base_seed: seed,
        paths,
        horizon: cases.first().map_or(0.0, |c| c.grid.horizon()),
        steps: cases.first().map_or(0, |c| c.grid.steps()),
        p: cases.first().map_or(2.0, |c| c.p),
    };
    let mut report = ConvergenceReport::new(id, "case", points, meta);
    report.fit = None;
    report.checks = checks;
    report.detail("fitted_constant", fitted);
    Ok(report)
}

fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v))
}

/// Five martingale configurations, including time-varying integrands and a
/// quasi-contractive operator.
pub fn default_maxi2_cases() -> Vec<MaximalCase> {
    let grid = TimeGrid::new(1.0, 100).expect("valid grid");
    let steps = grid.steps();
    let vary = |f: &dyn Fn(f64) -> f64, b: DMatrix<f64>| {
        ConvolutionIntegrand::Martingale((0..steps).map(|k| &b * f(grid.time(k))).collect())
    };
    let qa = SpectralOperator::diagonal(vec![-0.5, 1.0, 4.0], 0.5).expect("valid operator");
    let dense = SpectralOperator::dense_random(vec![1.0, 3.0], 0.0, 11).expect("valid operator");
    vec![
        MaximalCase {
            name: "wiener, A = 0, B = I".into(),
            operator: SpectralOperator::diagonal(vec![0.0, 0.0], 0.0).expect("valid operator"),
            driver: MartingaleDriver::wiener(vec![1.0, 0.5]).into(),
            integrand: ConvolutionIntegrand::constant_matrix(DMatrix::identity(2, 2), steps),
            grid,
            p: 2.0,
        },
        MaximalCase {
            name: "wiener, heat, rank-one B".into(),
            operator: SpectralOperator::heat(3),
            driver: MartingaleDriver::wiener(vec![1.0]).into(),
            integrand: ConvolutionIntegrand::constant_matrix(DMatrix::from_element(3, 1, 1.0), steps),
            grid,
            p: 2.0,
        },
        MaximalCase {
            name: "wiener, eta = 0.5, oscillating B".into(),
            operator: qa,
            driver: MartingaleDriver::wiener(vec![1.0, 0.25, 0.1]).into(),
            integrand: vary(&|t| 1.0 + (2.0 * std::f64::consts::PI * t).sin(), DMatrix::identity(3, 3)),
            grid,
            p: 2.0,
        },
        MaximalCase {
            name: "compound poisson, scalar".into(),
            operator: SpectralOperator::diagonal(vec![1.0], 0.0).expect("valid operator"),
            driver: MartingaleDriver::compound_poisson(2.0, JumpLaw::symmetric_unit()).into(),
            integrand: ConvolutionIntegrand::constant_matrix(DMatrix::identity(1, 1), steps),
            grid,
            p: 2.0,
        },
        MaximalCase {
            name: "compound poisson, dense A, growing B".into(),
            operator: dense,
            driver: MartingaleDriver::compound_poisson(5.0, JumpLaw::Gaussian { variances: vec![1.0, 0.5] })
                .into(),
            integrand: vary(&|t| t, diag(&[1.0, 2.0])),
            grid,
            p: 2.0,
        },
    ]
}

/// Five Poisson-measure configurations at `p = 2` and `p = 4`.
pub fn default_star_cases() -> Vec<MaximalCase> {
    let grid = TimeGrid::new(1.0, 100).expect("valid grid");
    let steps = grid.steps();
    let prm = |m: Vec<f64>| NoiseDriver::Prm(PoissonRandomMeasureDriver { intensities: m });
    let vary = |f: &dyn Fn(f64) -> f64, g: Vec<Vec<f64>>, m: Vec<f64>| ConvolutionIntegrand::Poisson {
        cells: (0..steps)
            .map(|k| {
                let s = f(grid.time(k));
                g.iter().map(|v| v.iter().map(|x| s * x).collect()).collect()
            })
            .collect(),
        intensities: m,
    };
    let zero1 = SpectralOperator::diagonal(vec![0.0], 0.0).expect("valid operator");
    let qa = SpectralOperator::diagonal(vec![-0.5, 1.0, 4.0], 0.5).expect("valid operator");
    let dense = SpectralOperator::dense_random(vec![1.0, 3.0], 0.0, 5).expect("valid operator");
    vec![
        MaximalCase {
            name: "two marks, A = 0, p = 2".into(),
            operator: zero1.clone(),
            driver: prm(vec![1.0, 3.0]),
            integrand: ConvolutionIntegrand::constant_marks(vec![vec![1.0], vec![-0.5]], vec![1.0, 3.0], steps),
            grid,
            p: 2.0,
        },
        MaximalCase {
            name: "two marks, A = 0, p = 4".into(),
            operator: zero1,
            driver: prm(vec![1.0, 3.0]),
            integrand: ConvolutionIntegrand::constant_marks(vec![vec![1.0], vec![-0.5]], vec![1.0, 3.0], steps),
            grid,
            p: 4.0,
        },
        MaximalCase {
            name: "one mark, heat, p = 4".into(),
            operator: SpectralOperator::heat(3),
            driver: prm(vec![2.0]),
            integrand: ConvolutionIntegrand::constant_marks(vec![vec![1.0, 1.0, 1.0]], vec![2.0], steps),
            grid,
            p: 4.0,
        },
        MaximalCase {
            name: "three marks, eta = 0.5, oscillating G, p = 2".into(),
            operator: qa,
            driver: prm(vec![1.0, 1.0, 1.0]),
            integrand: vary(
                &|t| 1.0 + (2.0 * std::f64::consts::PI * t).sin(),
                vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.5, 0.5, 0.5]],
                vec![1.0, 1.0, 1.0],
            ),
            grid,
            p: 2.0,
        },
        MaximalCase {
            name: "two marks, dense A, growing G, p = 4".into(),
            operator: dense,
            driver: prm(vec![0.5, 2.0]),
            integrand: vary(&|t| t, vec![vec![1.0, -1.0], vec![0.3, 0.6]], vec![0.5, 2.0]),
            grid,
            p: 4.0,
        },
    ]
}
