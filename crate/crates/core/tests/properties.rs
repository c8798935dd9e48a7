use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use weylcalc::bohr_sommerfeld::{bs_eigenvalues, ActionForm, Hamiltonian1D, Jet};
use weylcalc::functional_calculus::{connected_jets, labeled_jets, unlabeled_jets, JetSeries};
use weylcalc::graphs::oracle::brute_force_symmetry_order;
use weylcalc::graphs::{c_of_arrows, c_via_facts_arrows, canonicalize, symmetry_order, ArrowGraph, LabeledGraph};
use weylcalc::phase::{random_polynomial, HbarSeries, PhasePolynomial};
use weylcalc::star_products::{moyal, StarConfig};
use weylcalc::{Coefficient, ComplexCoefficient, GaussianRational, Poly};

fn poly(seed: u64, dim: usize, degree: usize) -> Poly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_polynomial::<GaussianRational, _>(&mut rng, dim, degree, 4)
}

fn series(p: Poly, order: usize) -> HbarSeries<Poly> {
    HbarSeries::constant(order, p).unwrap()
}

fn arrow_graph() -> impl Strategy<Value = ArrowGraph> {
    (2usize..=5)
        .prop_flat_map(|v| (Just(v), prop::collection::vec((0..v, 0..v), 1..=5)))
        .prop_filter_map("no loops", |(v, pairs)| {
            let arrows: Vec<_> = pairs.into_iter().filter(|(a, b)| a != b).collect();
            (!arrows.is_empty()).then(|| ArrowGraph::new(v, arrows).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn moyal_is_associative(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), dim in 1usize..=2) {
        let cfg = StarConfig::moyal(dim, 3).unwrap();
        let (a, b, c) = (series(poly(s1, dim, 3), 3), series(poly(s2, dim, 3), 3), series(poly(s3, dim, 3), 3));
        let left = moyal(&moyal(&a, &b, &cfg).unwrap(), &c, &cfg).unwrap();
        let right = moyal(&a, &moyal(&b, &c, &cfg).unwrap(), &cfg).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn moyal_conjugation_reverses_order(s1 in any::<u64>(), s2 in any::<u64>()) {
        // real symbols: conj(a ⋆ b) = b ⋆ a
        let real = |p: Poly| p.map_coefficients(|c| GaussianRational::from_rational(&c.real_part()));
        let cfg = StarConfig::moyal(1, 4).unwrap();
        let a = series(real(poly(s1, 1, 4)), 4);
        let b = series(real(poly(s2, 1, 4)), 4);
        let ab = moyal(&a, &b, &cfg).unwrap().map(|p| p.map_coefficients(|c| c.conj()));
        prop_assert_eq!(ab, moyal(&b, &a, &cfg).unwrap());
    }

    #[test]
    fn c_flips_sign_with_an_arrow(g in arrow_graph(), pick in any::<prop::sample::Index>()) {
        let i = pick.index(g.arrows().len());
        prop_assert_eq!(c_of_arrows(&g.flip(i)).unwrap(), -c_of_arrows(&g).unwrap());
    }

    #[test]
    fn c_recursion_matches_definition(g in arrow_graph()) {
        prop_assert_eq!(c_via_facts_arrows(&g), c_of_arrows(&g).unwrap());
    }

    #[test]
    fn symmetry_order_matches_brute_force(g in arrow_graph()) {
        let labeled = g.undirected();
        let keep: Vec<usize> = (0..labeled.vertex_count()).filter(|&v| labeled.degrees()[v] > 0).collect();
        let reduced = g.induced(&keep).undirected();
        let canon = canonicalize(&reduced);
        prop_assert_eq!(Some(symmetry_order(&canon)), brute_force_symmetry_order(&reduced));
    }

    #[test]
    fn canonical_form_ignores_labels(g in arrow_graph(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..g.vertex_count()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(canonicalize(&g.undirected()), canonicalize(&g.relabel(&perm).undirected()));
    }

    #[test]
    fn forms_agree_and_round_trip(s in any::<u64>(), dim in 1usize..=2) {
        let cfg = StarConfig::moyal(dim, 3).unwrap();
        let a = series(poly(s, dim, 3), 3);
        let l = labeled_jets(&a, &cfg).unwrap();
        prop_assert_eq!(&l, &unlabeled_jets(&a, &cfg).unwrap());
        prop_assert_eq!(&l, &connected_jets(&a, &cfg).unwrap());
        prop_assert!(l.odd_orders_vanish());
        let text = serde_json::to_string(&l.to_json()).unwrap();
        let back = JetSeries::from_json(&serde_json::from_str(&text).unwrap(), dim).unwrap();
        prop_assert_eq!(l, back);
    }

    #[test]
    fn polynomial_json_round_trip(s in any::<u64>(), dim in 1usize..=3) {
        let p = poly(s, dim, 5);
        let text = serde_json::to_string(&p).unwrap();
        let back: PhasePolynomial<GaussianRational> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(p, back);
    }

    #[test]
    fn jet_sqrt_squares_back(c in prop::collection::vec(-3.0f64..3.0, 4), lead in 0.5f64..5.0) {
        let mut x = Jet::variable(lead, 3);
        for (k, v) in c.iter().enumerate().skip(1) {
            x = x.add(&Jet::variable(0.0, 3).powi(k as i32).scale(*v));
        }
        let s = x.sqrt();
        let diff = s.mul(&s).sub(&x);
        prop_assert!(diff.coeffs().iter().all(|d| d.abs() < 1e-10));
    }

    #[test]
    fn harmonic_levels_any_mass(mass in 1i64..=4, k in 1i64..=4, hbar in 0.1f64..2.0) {
        let text = format!("{k}*x^2/2");
        let m = num_rational::BigRational::from_integer(mass.into());
        let h = Hamiltonian1D::parse_split(m, &text).unwrap();
        let omega = (k as f64 / mass as f64).sqrt();
        for l in bs_eigenvalues::<f64>(&h, hbar, &[1, 3], 4, ActionForm::Reduced).unwrap() {
            for e in &l.energies {
                prop_assert!((e - hbar * omega * (l.n as f64 - 0.5)).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn labeled_graph_json_round_trip() {
    let g = LabeledGraph::new(3, vec![(0, 1), (0, 1), (1, 2)]).unwrap();
    assert_eq!(LabeledGraph::from_json(&serde_json::from_str(&serde_json::to_string(&g.to_json()).unwrap()).unwrap()).unwrap(), g);
}
