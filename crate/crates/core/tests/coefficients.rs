use evolab::coefficients::{
    builtin_family, default_probes, estimate_lipschitz, gaussian_sampler, mark_norm, LipschitzAudit, Coefficient,
    CoefficientSequence, DiffusionMap, DiffusionNorm, DriftMap, JumpMap, JumpNorm, ParamValue, Params,
    Perturbation,
};
use evolab::rate::Rate;
use evolab::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn params(kv: &[(&str, ParamValue)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn drift(name: &str, kv: &[(&str, ParamValue)]) -> DriftMap {
    match builtin_family(name, &params(kv)).unwrap() {
        Coefficient::Drift(f) => f,
        other => panic!("{other:?}"),
    }
}

fn l_norm(values: &[Vec<f64>], m: &[f64], p: f64) -> f64 {
    values
        .iter()
        .zip(m)
        .map(|(v, w)| w * v.iter().map(|x| x * x).sum::<f64>().sqrt().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

#[test]
fn linear_estimate_is_exact() {
    let f = drift("linear", &[("c", ParamValue::Scalar(2.0))]);
    let est = estimate_lipschitz(&f, gaussian_sampler(3, 1.0), 200, 5).unwrap();
    assert!(est > 2.0 - 1e-6 && est <= 2.0);
}

#[test]
fn constant_maps_estimate_zero() {
    let f = drift("constant_drift", &[("value", ParamValue::List(vec![1.0, -2.0]))]);
    assert_eq!(estimate_lipschitz(&f, gaussian_sampler(2, 3.0), 100, 1).unwrap(), 0.0);
    let b = DiffusionMap::additive_diagonal(&[1.0, 2.0]);
    let q = DMatrix::from_diagonal_element(2, 2, 1.0);
    let norm = DiffusionNorm { map: &b, q: &q };
    assert_eq!(estimate_lipschitz(&norm, gaussian_sampler(2, 1.0), 100, 1).unwrap(), 0.0);
}

#[test]
fn tanh_estimate_approaches_one_near_zero() {
    let f = drift("saturating_sigmoid", &[("s", ParamValue::Scalar(0.5))]);
    let wide = estimate_lipschitz(&f, gaussian_sampler(2, 3.0), 500, 2).unwrap();
    let near = estimate_lipschitz(&f, gaussian_sampler(2, 1e-3), 500, 2).unwrap();
    assert!(wide <= 1.0 && near <= 1.0);
    assert!(near > 0.999 && near > wide);
}

#[test]
fn falsified_bound_is_reported() {
    struct Liar;
    impl LipschitzAudit for Liar {
        fn declared(&self) -> f64 {
            1.0
        }
        fn image_distance(&self, u: &[f64], v: &[f64]) -> f64 {
            3.0 * u.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
        }
    }
    let f = Liar;
    assert!(matches!(
        estimate_lipschitz(&f, gaussian_sampler(2, 0.1), 50, 1),
        Err(Error::BoundViolated { .. })
    ));
}

#[test]
fn jump_and_diffusion_bounds_hold() {
    let b = DiffusionMap::DiagonalMultiplicative { offset: vec![0.1, 0.2], sigma: vec![0.5, -1.5] };
    let q = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.25]));
    let est = estimate_lipschitz(&DiffusionNorm { map: &b, q: &q }, gaussian_sampler(2, 1.0), 300, 3).unwrap();
    assert!(est <= b.lipschitz(&q) * (1.0 + 1e-8));
    let g = JumpMap::Mark {
        shift: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        gain: vec![0.3, -0.6],
        saturation: Some(1.0),
    };
    let m = [1.0, 2.0];
    for p in [2.0, 4.0] {
        let norm = JumpNorm { map: &g, intensities: &m, p };
        let est = estimate_lipschitz(&norm, gaussian_sampler(2, 1.0), 300, 3).unwrap();
        assert!(est <= g.lipschitz(&m, p) * (1.0 + 1e-8));
    }
}

#[test]
fn additive_sequence_distance() {
    let c = vec![3.0, 4.0];
    let seq = CoefficientSequence::make_convergent_sequence(
        DriftMap::Linear { c: -1.0 },
        Perturbation::Additive { direction: DriftMap::Constant { value: c } },
        Rate::harmonic(),
    );
    for h in default_probes(2, 4) {
        for n in [1usize, 2, 7, 100] {
            let a = seq.member(n).eval(&h);
            let b = seq.limit.eval(&h);
            let d = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            assert!((d - 5.0 / n as f64).abs() < 1e-12);
        }
    }
    let members: Vec<f64> = [1usize, 2, 4, 8].iter().map(|&n| seq.member(n).lipschitz()).collect();
    assert!(members.iter().all(|&l| l <= 1.0));
}

#[test]
fn zero_rate_sequence_is_constant() {
    let seq = CoefficientSequence::make_convergent_sequence(
        DiffusionMap::additive_identity(2, 1.0),
        Perturbation::Scale,
        Rate::zero(),
    );
    let u = [0.3, 0.4];
    for n in [1usize, 5, 50] {
        assert_eq!(seq.member(n).matrix(&u, 2), seq.limit.matrix(&u, 2));
    }
}

#[test]
fn scaled_jump_sequence_distance() {
    let g = JumpMap::Mark {
        shift: vec![vec![0.2, 0.1], vec![-0.3, 0.4], vec![0.0, 1.0]],
        gain: vec![0.1, 0.5, -0.2],
        saturation: None,
    };
    let m = [0.5, 1.0, 2.0];
    let seq = CoefficientSequence::make_convergent_sequence(g.clone(), Perturbation::Scale, Rate::harmonic());
    for h in default_probes(2, 8) {
        let values: Vec<Vec<f64>> = (0..3).map(|i| g.eval(i, &h)).collect();
        for p in [2.0, 3.0, 4.0] {
            let want = l_norm(&values, &m, 2.0).max(l_norm(&values, &m, p));
            for n in [1usize, 3, 9] {
                let member = seq.member(n);
                let got = JumpNorm { map: &member, intensities: &m, p }.between(&g, &h, &h);
                assert!((got - want / n as f64).abs() < 1e-12 * (1.0 + want));
            }
        }
    }
}

#[test]
fn probes_span_magnitudes() {
    let probes = default_probes(4, 1);
    assert_eq!(probes[0], vec![0.0; 4]);
    let norms: Vec<f64> = probes.iter().map(|h| h.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    assert_eq!(norms.iter().filter(|&&n| (n - 1.0).abs() < 1e-12).count(), 3);
    assert_eq!(norms.iter().filter(|&&n| (n - 10.0).abs() < 1e-12).count(), 2);
}

#[test]
fn builtin_names() {
    assert!(matches!(builtin_family("cubic", &Params::new()), Err(Error::UnknownFamily(_))));
    let b = builtin_family("additive_constant", &params(&[("b", ParamValue::Scalar(2.0)), ("dim", ParamValue::Scalar(3.0))]));
    let Ok(Coefficient::Diffusion(b)) = b else { panic!() };
    assert!(b.is_additive());
    assert_eq!(b.lipschitz(&DMatrix::identity(3, 3)), 0.0);
    let f = drift("clipped_quadratic", &[("c", ParamValue::Scalar(0.5)), ("r", ParamValue::Scalar(2.0))]);
    assert_eq!(f.lipschitz(), 2.0);
    let est = estimate_lipschitz(&f, gaussian_sampler(2, 2.0), 500, 9).unwrap();
    assert!(est <= 2.0);
}

proptest! {
    #[test]
    fn mark_norm_sandwich(
        values in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 2), 1..6),
        weights in prop::collection::vec(0.0..3.0f64, 6),
        p in 2.0..8.0f64,
    ) {
        let m = &weights[..values.len()];
        let (a, b) = (l_norm(&values, m, 2.0), l_norm(&values, m, p));
        let mx = mark_norm(&values, m, p);
        prop_assert!((mx - a.max(b)).abs() <= 1e-12 * (1.0 + mx));
        let sum = a.powf(p) + b.powf(p);
        prop_assert!(mx.powf(p) <= sum * (1.0 + 1e-12) + 1e-300);
        prop_assert!(sum <= 2.0 * mx.powf(p) * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn sequences_stay_uniformly_lipschitz(
        gain in 0.1..3.0f64,
        c in prop::collection::vec(-2.0..2.0f64, 3),
        seed in any::<u64>(),
    ) {
        let seq = CoefficientSequence::make_convergent_sequence(
            DriftMap::Sigmoid { scale: 1.0, gain },
            Perturbation::Additive { direction: DriftMap::Constant { value: c } },
            Rate::harmonic(),
        );
        for n in [1usize, 2, 4, 8, 16] {
            let est = estimate_lipschitz(&seq.member(n), gaussian_sampler(3, 1.0), 50, seed).unwrap();
            prop_assert!(est <= gain * (1.0 + 1e-8));
        }
    }
}
