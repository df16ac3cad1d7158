use evolab::coefficients::{CoefficientSequence, DiffusionMap, DriftMap, JumpMap, Perturbation};
use evolab::convergence::*;
use evolab::noise::{JumpLaw, MartingaleDriver, PoissonRandomMeasureDriver, TimeGrid};
use evolab::operators::{OperatorFamily, SpectralOperator};
use evolab::rate::Rate;
use evolab::solver::{EvolutionProblem, InitialSpec, NoiseTerm, PathEnsemble};
use evolab::solver::hp_norm_estimate;
use evolab::Error;

const SEED: u64 = 77;

fn linear(op: SpectralOperator, q: Vec<f64>, y0: Vec<f64>, p: f64) -> EvolutionProblem {
    let d = op.dim();
    EvolutionProblem::new(
        op,
        DriftMap::Zero,
        NoiseTerm::Martingale {
            driver: MartingaleDriver::wiener(q),
            diffusion: DiffusionMap::additive_identity(d, 1.0),
        },
        InitialSpec::fixed(y0),
        TimeGrid::new(1.0, 50).unwrap(),
        p,
    )
    .unwrap()
}

fn opts(paths: usize) -> SweepOptions {
    SweepOptions::new(paths, SEED)
}

#[test]
fn zero_operator_has_no_yosida_error() {
    let base = linear(SpectralOperator::diagonal(vec![0.0; 2], 0.0).unwrap(), vec![1.0, 1.0], vec![1.0, 0.0], 2.0);
    let r = run_yosida_sweep(&base, &[0.5, 0.1, 0.01], &opts(50)).unwrap();
    assert_eq!(r.theorem_id, "yo2sc");
    assert!(r.points.iter().all(|p| p.error == 0.0 && p.stderr == 0.0));
    let c = audit_corollary_utile(&base, &[0.5, 0.1], &[0.2], &opts(50)).unwrap();
    assert!(c.points.iter().all(|p| p.error == 0.0));
    assert!(c.pass());
}

#[test]
fn constant_family_has_no_error() {
    let base = linear(SpectralOperator::heat(3), vec![1.0; 3], vec![1.0; 3], 2.0);
    let fam = OperatorFamily::constant(base.operator.clone());
    let r = run_resolvent_sweep(&base, &fam, &[1, 2, 4], &opts(50)).unwrap();
    assert_eq!(r.theorem_id, "nyo2sc");
    assert!(r.points.iter().all(|p| p.error == 0.0 && p.resolvent_distance == Some(0.0)));
}

#[test]
fn resolvent_sweep_reproduces_yosida_sweep() {
    let base = linear(SpectralOperator::heat(4), vec![1.0, 0.5, 0.25, 0.125], vec![1.0; 4], 2.0);
    let ns = [1usize, 2, 4, 8, 16, 32];
    let lambdas: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();
    let a = run_yosida_sweep(&base, &lambdas, &opts(200)).unwrap();
    let fam = OperatorFamily::yosida(base.operator.clone(), Rate::harmonic());
    let b = run_resolvent_sweep(&base, &fam, &ns, &opts(200)).unwrap();
    for (x, y) in a.points.iter().zip(&b.points) {
        assert!((x.error - y.error).abs() <= 1e-12 * (1.0 + x.error));
    }
    assert!(b.points.windows(2).all(|w| w[1].resolvent_distance <= w[0].resolvent_distance));
}

#[test]
fn galerkin_error_tracks_noise_energy() {
    let d = 8;
    let op = SpectralOperator::heat(d);
    let base = linear(op.clone(), vec![1.0; d], vec![0.0; d], 2.0);
    // Stationary energy of mode k is q_k / (2 a_k).
    let energy: Vec<f64> = op.eigenvalues().iter().map(|a| 0.5 / a).collect();
    let total: f64 = energy.iter().sum();
    let ns: Vec<usize> = (1..=d).collect();
    let r = run_resolvent_sweep(&base, &OperatorFamily::galerkin(op), &ns, &opts(400)).unwrap();
    let norm = hp_norm_estimate(&PathEnsemble::generate(&base, 400, SEED).unwrap(), 2.0).unwrap().value;
    for n in 1..=d {
        let tail: f64 = energy[n..].iter().sum::<f64>() / total;
        let rel = r.points[n - 1].error / norm;
        if tail < 0.01 {
            assert!(rel < 0.15, "n={n} relative error {rel}");
        }
    }
    assert_eq!(r.points[d - 1].error, 0.0);
    assert!(r.points.windows(2).all(|w| w[1].error <= w[0].error));
}

#[test]
fn error_estimate_stabilises_in_paths() {
    let base = linear(SpectralOperator::heat(3), vec![1.0; 3], vec![1.0; 3], 2.0);
    let small = run_yosida_sweep(&base, &[0.01], &opts(500)).unwrap().points[0].clone();
    let large = run_yosida_sweep(&base, &[0.01], &opts(4000)).unwrap().points[0].clone();
    let se = (small.stderr.powi(2) + large.stderr.powi(2)).sqrt();
    assert!((small.error - large.error).abs() < 3.0 * se);
    assert!(large.stderr < small.stderr);
}

#[test]
fn sweeps_reject_bad_input() {
    let base = linear(SpectralOperator::heat(2), vec![1.0; 2], vec![1.0; 2], 2.0);
    assert!(matches!(run_yosida_sweep(&base, &[0.1], &opts(1)), Err(Error::ConfigInvalid(_))));
    assert!(run_yosida_sweep(&base, &[0.01, 0.1], &opts(10)).is_err());
    let mut nonlinear = base.clone();
    nonlinear.drift = DriftMap::Linear { c: 1.0 };
    assert!(run_yosida_sweep(&nonlinear, &[0.1], &opts(10)).is_err());
    let other = OperatorFamily::constant(SpectralOperator::heat(3));
    assert!(run_resolvent_sweep(&base, &other, &[1, 2], &opts(10)).is_err());
    let c = coupled_moments(&base, &[linear(SpectralOperator::heat(3), vec![1.0; 3], vec![1.0; 3], 2.0)], 10, SEED);
    assert!(matches!(c, Err(Error::CouplingMismatch(_))));
}

fn semilinear_base(noise: NoiseTerm) -> EvolutionProblem {
    EvolutionProblem::new(
        SpectralOperator::heat(3),
        DriftMap::Sigmoid { scale: 1.0, gain: 1.0 },
        noise,
        InitialSpec::fixed(vec![0.2, -0.1, 0.1]),
        TimeGrid::new(1.0, 40).unwrap(),
        2.0,
    )
    .unwrap()
}

fn mult_noise() -> NoiseTerm {
    NoiseTerm::Martingale {
        driver: MartingaleDriver::compound_poisson(2.0, JumpLaw::Gaussian { variances: vec![0.5, 0.2, 0.1] }),
        diffusion: DiffusionMap::DiagonalMultiplicative { offset: vec![0.2; 3], sigma: vec![0.3; 3] },
    }
}

#[test]
fn unperturbed_sweep_is_exact() {
    let setup = SemilinearSetup::unperturbed(semilinear_base(mult_noise()));
    let out = run_semilinear_sweep(&setup, &[1, 2, 4], &opts(100)).unwrap();
    assert_eq!(out.report.theorem_id, "nyo2");
    assert!(out.report.points.iter().all(|p| p.error == 0.0));
    assert!(out.report.details.iter().filter(|(k, _)| k.contains("_part[")).all(|(_, &v)| v == 0.0));
    assert_eq!(out.lemmas.len(), 3);
    for l in &out.lemmas {
        assert!(l.points.iter().all(|p| p.error == 0.0), "{}", l.theorem_id);
        assert!(l.check("inequality_holds").unwrap().pass);
    }
}

#[test]
fn initial_datum_only_sweep() {
    let base = EvolutionProblem::new(
        SpectralOperator::heat(3),
        DriftMap::Zero,
        NoiseTerm::None,
        InitialSpec::fixed(vec![1.0, 0.5, -0.5]),
        TimeGrid::new(1.0, 20).unwrap(),
        2.0,
    )
    .unwrap();
    let c = vec![0.3, 0.0, 0.4];
    let setup = SemilinearSetup { initial_shift: Some((c, Rate::harmonic())), ..SemilinearSetup::unperturbed(base) };
    let out = run_semilinear_sweep(&setup, &[1, 2, 4, 8], &opts(10)).unwrap();
    for p in &out.report.points {
        assert!((p.error - 0.5 / p.param).abs() < 1e-12, "{p:?}");
        let n = p.param as usize;
        assert!((out.report.details[&format!("semigroup_part[n={n}]")] - p.error).abs() < 1e-12);
        assert_eq!(out.report.details[&format!("drift_part[n={n}]")], 0.0);
    }
    let uno = out.lemma("lemma_uno").unwrap();
    assert!(uno.pass() && uno.points[0].error > 0.0);
    assert!(out.lemma("lemma_due").unwrap().points.iter().all(|p| p.error == 0.0));
}

#[test]
fn full_semilinear_sweep_on_small_problem() {
    let base = semilinear_base(mult_noise());
    let diffusion = match &base.noise {
        NoiseTerm::Martingale { diffusion, .. } => diffusion.clone(),
        _ => unreachable!(),
    };
    let setup = SemilinearSetup {
        family: OperatorFamily::spectral_perturbation(base.operator.clone(), Rate::harmonic()),
        drift: CoefficientSequence::make_convergent_sequence(
            base.drift.clone(),
            Perturbation::Additive { direction: DriftMap::Constant { value: vec![0.5; 3] } },
            Rate::harmonic(),
        ),
        noise: NoiseSequence::Diffusion(CoefficientSequence::make_convergent_sequence(
            diffusion,
            Perturbation::Scale,
            Rate::harmonic(),
        )),
        initial_shift: Some((vec![0.05; 3], Rate::harmonic())),
        base,
    };
    let out = run_semilinear_sweep(&setup, &[1, 2, 4, 8, 16], &opts(400)).unwrap();
    let r = &out.report;
    for name in ["monotone_beyond_noise", "triangle_decomposition", "gronwall_closure", "gronwall_closure_fitted"] {
        assert!(r.check(name).unwrap().pass, "{name}");
    }
    assert!(r.points[4].error < r.points[0].error / 4.0);
    for l in &out.lemmas {
        assert!(l.pass(), "{}", l.theorem_id);
        assert!(l.details["min_margin"] > 0.0);
    }
}

#[test]
fn additive_sweep_at_p4() {
    let base = EvolutionProblem::new(
        SpectralOperator::heat(3),
        DriftMap::Sigmoid { scale: 1.0, gain: 1.0 },
        NoiseTerm::Martingale {
            driver: MartingaleDriver::compound_poisson(2.0, JumpLaw::Gaussian { variances: vec![0.5, 0.2, 0.1] }),
            diffusion: DiffusionMap::additive_identity(3, 1.0),
        },
        InitialSpec::fixed(vec![0.2, 0.0, 0.1]),
        TimeGrid::new(1.0, 40).unwrap(),
        4.0,
    )
    .unwrap();
    let NoiseTerm::Martingale { diffusion, .. } = &base.noise else { unreachable!() };
    let scaled = NoiseSequence::Diffusion(CoefficientSequence::make_convergent_sequence(
        diffusion.clone(),
        Perturbation::Scale,
        Rate::harmonic(),
    ));
    let setup = SemilinearSetup { noise: scaled, ..SemilinearSetup::unperturbed(base.clone()) };
    let out = run_additive_sweep(&setup, &[1, 2, 4, 8, 16], &opts(400)).unwrap();
    assert_eq!(out.report.theorem_id, "additive_p");
    assert!(out.report.check("monotone_beyond_noise").unwrap().pass);
    assert!(out.report.points[4].error < out.report.points[0].error / 4.0);

    let fixed_noise = SemilinearSetup {
        drift: CoefficientSequence::make_convergent_sequence(
            base.drift.clone(),
            Perturbation::Scale,
            Rate::harmonic(),
        ),
        ..SemilinearSetup::unperturbed(base)
    };
    let out = run_additive_sweep(&fixed_noise, &[1, 2, 4], &opts(100)).unwrap();
    assert!(out.report.details.iter().filter(|(k, _)| k.starts_with("noise_part")).all(|(_, &v)| v == 0.0));

    let mult = SemilinearSetup::unperturbed(semilinear_base(mult_noise()));
    assert!(run_additive_sweep(&mult, &[1, 2], &opts(10)).is_err());
}

#[test]
fn poisson_semilinear_ids() {
    let jump = JumpMap::Mark { shift: vec![vec![0.2, 0.0, 0.1]], gain: vec![0.3], saturation: None };
    let base = semilinear_base(NoiseTerm::Poisson {
        driver: PoissonRandomMeasureDriver { intensities: vec![2.0] },
        jump,
    });
    let out = run_semilinear_sweep(&SemilinearSetup::unperturbed(base), &[1, 2], &opts(20)).unwrap();
    assert_eq!(out.report.theorem_id, "nyop");
    assert!(out.lemma("lemma_treppe").is_some() && out.lemma("lemma_tre").is_none());
}

#[test]
fn trotter_kato_constant_data_and_forcing_bound() {
    let op = SpectralOperator::diagonal(vec![2.0, 0.5], 0.0).unwrap();
    let setup = TrotterKatoSetup {
        family: OperatorFamily::constant(op.clone()),
        forcing: vec![1.0, -1.0],
        forcing_shift: None,
        u0: vec![0.5, 0.5],
        grid: TimeGrid::new(1.0, 100).unwrap(),
    };
    let r = run_trotter_kato(&setup, &[1, 2, 4], 1e-12).unwrap();
    assert!(r.points.iter().all(|p| p.error < 1e-14));
    let forced = TrotterKatoSetup { forcing_shift: Some((vec![1.0, 0.0], Rate::harmonic())), ..setup };
    let r = run_trotter_kato(&forced, &[1, 2, 4, 8], 0.2).unwrap();
    for p in &r.points {
        assert!(p.error <= 1.0 / p.param + 1e-12);
    }
    assert!(r.pass());
}

#[test]
fn shift_reproduces_quasi_monotone_run() {
    let op = SpectralOperator::diagonal(vec![-0.5, 1.0, 4.0], 0.5).unwrap();
    let p = EvolutionProblem::new(
        op,
        DriftMap::Sigmoid { scale: 1.0, gain: 1.0 },
        mult_noise(),
        InitialSpec::fixed(vec![1.0, 0.0, -1.0]),
        TimeGrid::new(1.0, 30).unwrap(),
        2.0,
    )
    .unwrap();
    let shifted = shifted_problem(&p);
    assert_eq!(shifted.operator.eta(), 0.0);
    assert!(shift_deviation(&p, 50, SEED).unwrap() < 1e-10);
}

#[test]
fn maximal_audits_hold_on_default_cases() {
    let r = audit_maximal("maxi2", &default_maxi2_cases()[..2], 400, SEED).unwrap();
    assert!(r.pass());
    let r = audit_maximal("star", &default_star_cases()[..2], 400, SEED).unwrap();
    assert!(r.pass());
    assert!(r.details["fitted_constant"] > 0.0);
}

#[test]
fn reports_serialise() {
    let base = linear(SpectralOperator::heat(2), vec![1.0; 2], vec![1.0; 2], 2.0);
    let r = run_yosida_sweep(&base, &[0.1, 0.01], &opts(20)).unwrap();
    let mut csv = Vec::new();
    r.write_csv(&mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().nth(1).unwrap().starts_with("yo2sc,1e-1,"));
    let mut plot = Vec::new();
    r.write_plot_csv(&mut plot).unwrap();
    assert!(String::from_utf8(plot).unwrap().starts_with("x,y\n"));
    let mut json = Vec::new();
    r.write_json(&mut json).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
    assert_eq!(v["theorem_id"], "yo2sc");
}
