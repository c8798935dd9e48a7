use num_rational::BigRational;
use num_traits::One;

use weylcalc::bohr_sommerfeld::{
    action_corrections, bs_eigenvalues, schrodinger_oracle, universal_polynomial, ActionEvaluator, ActionForm,
    Hamiltonian1D, OrbitIntegrand, OrbitProblem,
};

fn quartic() -> Hamiltonian1D {
    Hamiltonian1D::parse_split(BigRational::one(), "x^4").unwrap()
}

#[test]
fn quartic_against_oracle() {
    let levels = bs_eigenvalues::<f64>(&quartic(), 1.0, &[1, 2, 3, 4, 5, 6], 4, ActionForm::Reduced).unwrap();
    let oracle = schrodinger_oracle(1.0, &[0.0, 0.0, 0.0, 0.0, 1.0], 1.0, 6).unwrap();
    assert!(oracle.converged);
    let err = |order: usize, n: usize| (levels[n - 1].energy(order).unwrap() - oracle.energies[n - 1]).abs();
    for n in 2..=6 {
        assert!(err(2, n) < err(0, n), "order 2 not closer at n={n}");
    }
    for n in 3..=6 {
        assert!(err(4, n) / oracle.energies[n - 1] <= 5e-4);
    }
    for n in 3..6 {
        assert!(err(4, n + 1) < err(4, n));
    }
}

#[test]
fn oracle_regression_and_self_convergence() {
    let r = schrodinger_oracle(1.0, &[0.0, 0.0, 0.0, 0.0, 1.0], 1.0, 1).unwrap();
    assert!((r.energies[0] - 0.667_986_259_155_777).abs() < 1e-8);
    let wide = schrodinger_oracle(1.0, &[0.0, 0.0, 0.0, 0.0, 1.0], 1.0, 3).unwrap();
    assert!((wide.energies[0] - r.energies[0]).abs() < 1e-8 * r.energies[0]);
}

#[test]
fn double_well_levels_are_ordered() {
    let h = Hamiltonian1D::parse_split(BigRational::one(), "x^4 - x^2").unwrap();
    let levels = bs_eigenvalues::<f64>(&h, 0.2, &[3, 4, 5], 2, ActionForm::Reduced).unwrap();
    let oracle = schrodinger_oracle(1.0, &[0.0, 0.0, -1.0, 0.0, 1.0], 0.2, 5).unwrap();
    for l in &levels {
        assert!(l.energies[1] > 0.0, "above the barrier");
        assert!((l.energies[1] - oracle.energies[l.n - 1]).abs() < 0.05);
    }
}

#[test]
fn odd_orders_vanish() {
    let h = quartic();
    for l in 2..=6 {
        assert!(universal_polynomial(h.symbol(), 3, l).unwrap().is_zero());
    }
    let series = action_corrections(h.symbol(), 4, ActionForm::Full).unwrap();
    assert!(series.terms.keys().all(|j| j % 2 == 0));
}

#[test]
fn harmonic_null_corrections() {
    let h = Hamiltonian1D::parse_split(BigRational::one(), "x^2/2").unwrap();
    for form in [ActionForm::Full, ActionForm::Reduced] {
        let eval = ActionEvaluator::<f64>::new(&h, 4, form).unwrap();
        for e in [0.2, 1.0, 3.0] {
            assert!(eval.correction(e, 2).unwrap().abs() < 1e-9);
            assert!(eval.correction(e, 4).unwrap().abs() < 1e-9);
            assert!((eval.action(e).unwrap() - 2.0 * std::f64::consts::PI * e).abs() < 1e-10);
        }
    }
}

#[test]
fn period_of_harmonic_and_second_derivative_integral() {
    let o = OrbitProblem::<f64>::new(1.0, vec![0.0, 0.0, 0.5]).unwrap();
    let one = OrbitIntegrand { parts: vec![(0, vec![1.0])] };
    let tau = 2.0 * std::f64::consts::PI;
    for e in [0.01, 1.0, 100.0] {
        let j = o.integrate(e, &one, 1).unwrap();
        assert!((j.value() - tau).abs() < 1e-10 * tau);
        assert!(j.derivative(1).abs() < 1e-9);
    }
}

#[test]
fn single_precision_pipeline() {
    let h = Hamiltonian1D::parse_split(BigRational::one(), "x^2/2").unwrap();
    let l = bs_eigenvalues::<f32>(&h, 1.0, &[2], 2, ActionForm::Reduced).unwrap();
    assert!((l[0].energies[1] - 1.5).abs() < 1e-4);
}
