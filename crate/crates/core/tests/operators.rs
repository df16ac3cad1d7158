use evolab::operators::{default_test_vectors, HVector, OperatorFamily, SpectralOperator};
use evolab::rate::Rate;
use evolab::Error;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn close(a: &HVector, b: &HVector, tol: f64) -> bool {
    a.sub(b).norm() <= tol * (1.0 + b.norm())
}

fn spectrum() -> impl Strategy<Value = (Vec<f64>, f64)> {
    (1usize..7, 0.0..1.0f64).prop_flat_map(|(d, eta)| {
        (prop::collection::vec(-eta..20.0, d), Just(eta))
    })
}

fn op_and_vec(dense: bool) -> impl Strategy<Value = (SpectralOperator, HVector)> {
    (spectrum(), any::<u64>()).prop_flat_map(move |((eig, eta), seed)| {
        let d = eig.len();
        let op = if dense {
            SpectralOperator::dense_random(eig, eta, seed).unwrap()
        } else {
            SpectralOperator::diagonal(eig, eta).unwrap()
        };
        (Just(op), prop::collection::vec(-2.0..2.0f64, d).prop_map(HVector::new))
    })
}

fn admissible(op: &SpectralOperator, frac: f64) -> f64 {
    frac * op.lambda_limit().min(10.0)
}

fn matrix_apply(op: &SpectralOperator, x: &HVector) -> HVector {
    HVector::new((op.matrix() * DVector::from_column_slice(x.as_slice())).as_slice().to_vec())
}

proptest! {
    #[test]
    fn yosida_is_scaled_resolvent_complement((op, x) in op_and_vec(false), frac in 0.01..0.99f64) {
        let l = admissible(&op, frac);
        let j = op.resolvent(l, &x).unwrap();
        let al = op.yosida_apply(l, &x).unwrap();
        prop_assert!(close(&al, &x.sub(&j).scale(1.0 / l), 1e-12 / l.min(1.0)));
    }

    #[test]
    fn yosida_is_a_times_resolvent((op, x) in op_and_vec(true), frac in 0.01..0.99f64) {
        let l = admissible(&op, frac);
        let j = op.resolvent(l, &x).unwrap();
        let al = op.yosida_apply(l, &x).unwrap();
        prop_assert!(close(&al, &matrix_apply(&op, &j), 1e-10));
    }

    #[test]
    fn resolvent_and_yosida_bounds((op, x) in op_and_vec(true), frac in 0.01..0.99f64) {
        let l = admissible(&op, frac);
        let c = 1.0 / (1.0 - l * op.eta());
        let j = op.resolvent(l, &x).unwrap();
        prop_assert!(j.norm() <= c * x.norm() * (1.0 + 1e-10) + 1e-14);
        let al = op.yosida_apply(l, &x).unwrap();
        let ax = matrix_apply(&op, &x);
        prop_assert!(al.norm() <= c * ax.norm() * (1.0 + 1e-10) + 1e-12);
    }

    #[test]
    fn semigroup_law((op, x) in op_and_vec(false), t in 0.0..2.0f64, s in 0.0..2.0f64) {
        let a = op.semigroup_apply(t, &op.semigroup_apply(s, &x).unwrap()).unwrap();
        prop_assert!(close(&a, &op.semigroup_apply(t + s, &x).unwrap(), 1e-12));
        prop_assert_eq!(op.semigroup_apply(0.0, &x).unwrap(), x);
    }

    #[test]
    fn dense_semigroup_law((op, x) in op_and_vec(true), t in 0.0..1.0f64, s in 0.0..1.0f64) {
        let a = op.semigroup_apply(t, &op.semigroup_apply(s, &x).unwrap()).unwrap();
        prop_assert!(close(&a, &op.semigroup_apply(t + s, &x).unwrap(), 1e-10));
    }

    #[test]
    fn monotone_yosida_semigroup_contracts(
        eig in prop::collection::vec(0.0..50.0f64, 1..6),
        seed in any::<u64>(),
        l in 1e-4..1.0f64,
        t in 0.0..3.0f64,
    ) {
        let op = SpectralOperator::dense_random(eig.clone(), 0.0, seed).unwrap();
        for x in default_test_vectors(eig.len(), 3, seed) {
            let y = op.yosida_semigroup_apply(l, t, &x).unwrap();
            prop_assert!(y.norm() <= x.norm() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn resolvent_tends_to_identity((op, x) in op_and_vec(true)) {
        prop_assume!(x.norm() > 1e-3);
        let lmax = op.lambda_limit().min(1.0);
        let errs: Vec<f64> = (1..=8)
            .map(|k| 10f64.powi(-k))
            .filter(|&l| l < lmax)
            .map(|l| op.resolvent(l, &x).unwrap().sub(&x).norm())
            .collect();
        for w in errs.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-13);
        }
        prop_assert!(*errs.last().unwrap() < 1e-5 * (1.0 + x.norm()));
    }
}

#[test]
fn resolvent_examples() {
    let op = SpectralOperator::diagonal(vec![2.0], 0.0).unwrap();
    assert_eq!(op.resolvent(0.5, &HVector::new(vec![1.0])).unwrap().as_slice(), &[0.5]);
    assert_eq!(op.yosida_apply(0.5, &HVector::new(vec![1.0])).unwrap().as_slice(), &[1.0]);
    let zero = SpectralOperator::diagonal(vec![0.0; 3], 0.0).unwrap();
    let x = HVector::new(vec![0.3, -1.0, 2.0]);
    assert_eq!(zero.resolvent(7.0, &x).unwrap(), x);
}

#[test]
fn dense_resolvent_matches_linear_solve() {
    let op = SpectralOperator::dense_random(vec![1.0, 3.0], 0.0, 42).unwrap();
    let x = default_test_vectors(2, 1, 42).pop().unwrap();
    let m = DMatrix::identity(2, 2) + op.matrix() * 0.25;
    let want = m.lu().solve(&DVector::from_column_slice(x.as_slice())).unwrap();
    let got = op.resolvent(0.25, &x).unwrap();
    assert!(close(&got, &HVector::new(want.as_slice().to_vec()), 1e-10));
    let al = op.yosida_apply(0.25, &x).unwrap();
    assert!(close(&al, &matrix_apply(&op, &got), 1e-10));
}

#[test]
fn yosida_eigenvalues_converge() {
    let op = SpectralOperator::diagonal(vec![3.0], 0.0).unwrap();
    let x = HVector::new(vec![1.0]);
    let mut last = f64::INFINITY;
    for k in 1..=6 {
        let e = (op.yosida_apply(10f64.powi(-k), &x).unwrap().as_slice()[0] - 3.0).abs();
        assert!(e < last);
        last = e;
    }
    assert!(last < 1e-4);
}

#[test]
fn semigroup_examples() {
    let op = SpectralOperator::diagonal(vec![1.0], 0.0).unwrap();
    let y = op.semigroup_apply(std::f64::consts::LN_2, &HVector::new(vec![1.0])).unwrap();
    assert!((y.as_slice()[0] - 0.5).abs() < 1e-15);
    assert!(matches!(op.semigroup_apply(-1.0, &HVector::new(vec![1.0])), Err(Error::NegativeTime(_))));
    let op = SpectralOperator::diagonal(vec![2.0], 0.0).unwrap();
    let y = op.yosida_semigroup_apply(0.5, 1.0, &HVector::new(vec![1.0])).unwrap();
    assert!((y.as_slice()[0] - (-1.0f64).exp()).abs() < 1e-15);
    let op = SpectralOperator::diagonal(vec![5.0], 0.0).unwrap();
    let y = op.yosida_semigroup_apply(0.1, 0.4, &HVector::new(vec![2.0])).unwrap();
    assert!((y.as_slice()[0] - 2.0 * (-0.4 * 5.0 / 1.5f64).exp()).abs() < 1e-14);
}

#[test]
fn yosida_semigroup_tends_to_semigroup() {
    let op = SpectralOperator::heat(4);
    let x = HVector::new(vec![1.0, -1.0, 0.5, 0.25]);
    let s = op.semigroup_apply(0.05, &x).unwrap();
    let errs: Vec<f64> = [1e-2, 1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&l| op.yosida_semigroup_apply(l, 0.05, &x).unwrap().sub(&s).norm())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
    assert!(errs[3] < 1e-3);
}

#[test]
fn lambda_guard_is_strict() {
    let op = SpectralOperator::diagonal(vec![-0.5, 1.0], 0.5).unwrap();
    let x = HVector::new(vec![1.0, 1.0]);
    assert!(matches!(op.resolvent(2.0, &x), Err(Error::LambdaOutOfRange { .. })));
    assert!(matches!(op.resolvent(0.0, &x), Err(Error::LambdaOutOfRange { .. })));
    assert!(op.resolvent(1.99, &x).is_ok());
}

#[test]
fn quasi_monotonicity_check() {
    let (ok, margin) = SpectralOperator::diagonal(vec![1.0, 2.0, 3.0], 0.0).unwrap().check_quasi_monotone(100, 1);
    assert!(ok && margin >= 1.0 - 1e-12);
    let (ok, margin) = SpectralOperator::diagonal(vec![-0.5, 1.0], 0.5).unwrap().check_quasi_monotone(100, 1);
    assert!(ok && margin >= -1e-12);
    assert!(SpectralOperator::diagonal(vec![-1.0, 2.0], 0.5).is_err());
    let op = SpectralOperator::diagonal_unchecked(vec![-1.0, 2.0], 0.5).unwrap();
    assert!(!op.check_quasi_monotone(100, 1).0);
}

#[test]
fn shift_round_trip() {
    let op = SpectralOperator::diagonal(vec![-0.5, 1.0], 0.5).unwrap();
    let (shifted, eta) = op.shift_operator();
    assert_eq!(shifted.eigenvalues(), &[0.0, 1.5]);
    assert_eq!((shifted.eta(), eta), (0.0, 0.5));
    let x = HVector::new(vec![0.7, -0.2]);
    for t in [0.0, 0.3, 1.7] {
        let a = shifted.semigroup_apply(t, &x).unwrap().scale((eta * t).exp());
        assert!(close(&a, &op.semigroup_apply(t, &x).unwrap(), 1e-14));
    }
    let plain = SpectralOperator::heat(2);
    assert_eq!(plain.shift_operator().0.eigenvalues(), plain.eigenvalues());
}

#[test]
fn yosida_family_distance_vanishes() {
    let fam = OperatorFamily::yosida(SpectralOperator::heat(5), Rate::harmonic());
    let tv = default_test_vectors(5, 4, 3);
    let ns = [1, 4, 16, 64, 256, 1024, 4096];
    let d = fam.resolvent_profile(&ns, 0.5, &tv).unwrap();
    assert!(d.windows(2).all(|w| w[1] <= w[0]));
    assert!(d[6] < 1e-3);
    assert_eq!(fam.eta_excess(&ns).unwrap(), None);
}
