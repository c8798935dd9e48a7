//! Cross-oracle checks with fixed tolerances and time budgets, shared by the
//! `verify` command and the acceptance test target.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bohr_sommerfeld::{
    action_corrections, bs_eigenvalues, schrodinger_oracle, split_normal_form, ActionEvaluator, ActionForm,
    Hamiltonian1D, ReducedKey, SplitSymbol,
};
use crate::error::Result;
use crate::functional_calculus::{
    connected_jets, labeled_jets, materialize, nota_check, pointwise_jets, resolvent_symbol_check, unlabeled_jets,
    FunctionJet, Materialized,
};
use crate::graphs::{
    c_coefficient, c_of_arrows, canonicalize, enumerate_reduced, symmetry_order, ArrowGraph, EnumOptions,
    LabeledGraph,
};
use crate::lambda_eval::{attach_arrows_expand, lambda, lambda_arrows};
use crate::phase::{random_polynomial, HbarSeries, PhasePolynomial, QuantizationTensor};
use crate::quadratic::{
    closed_form_jets, time_evolution_closed, time_evolution_from_jets, zag_numbers, zag_via_bernoulli,
    zag_via_tangent, QuadraticForm,
};
use crate::scalar::{Coefficient, GaussianRational};
use crate::star_products::{star_fold, star_n_fold, StarConfig};

type G = GaussianRational;
type P = PhasePolynomial<G>;

/// Outcome of one numbered check.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CheckReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {:>8.2}s / {:>4}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

type CheckFn = fn(u64) -> Result<(bool, String)>;

/// `(id, name, budget in seconds, check)`.
const CHECKS: [(usize, &str, u64, CheckFn); 11] = [
    (1, "graph-table", 5, graph_table),
    (2, "zag-numbers", 1, zag),
    (3, "power-oracle", 60, power_oracle),
    (4, "three-forms", 60, three_forms),
    (5, "order-four-expansion", 30, order_four_expansion),
    (6, "iterated-star", 60, iterated_star),
    (7, "resolvent-identity", 120, resolvent_identity),
    (8, "quadratic-closed-form", 30, quadratic_closed_form),
    (9, "bs-coefficients", 30, bs_coefficients),
    (10, "bs-numerics", 300, bs_numerics),
    (11, "lemma-suite", 60, lemma_suite),
];

pub fn check_names() -> Vec<(usize, &'static str)> {
    CHECKS.iter().map(|c| (c.0, c.1)).collect()
}

/// Run check `id` (1-based). `None` for an unknown id.
pub fn run_check(id: usize, seed: u64) -> Option<CheckReport> {
    let &(id, name, budget, f) = CHECKS.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let outcome = f(seed);
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget);
    let (ok, mut detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    let passed = ok && elapsed <= budget;
    if ok && !passed {
        detail.push_str("; over time budget");
    }
    Some(CheckReport { id, name, passed, detail, elapsed, budget })
}

pub fn run_all(seed: u64) -> Vec<CheckReport> {
    CHECKS.iter().filter_map(|c| run_check(c.0, seed)).collect()
}

fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn series(p: &P, order: usize) -> Result<HbarSeries<P>> {
    HbarSeries::constant(order, p.clone())
}

fn arrows(v: usize, a: &[(usize, usize)]) -> ArrowGraph {
    ArrowGraph::new(v, a.to_vec()).expect("valid table graph")
}

/// Random battery: degree ≤ 3, dimension 1 or 2.
fn battery(seed: u64, salt: u64, count: usize) -> Vec<P> {
    let mut r = rng(seed, salt);
    (0..count)
        .map(|i| {
            let dim = 1 + i % 2;
            random_polynomial::<G, _>(&mut r, dim, 3, 4)
        })
        .collect()
}

// Connected reduced graphs with 2 and 4 edges: arrows (vertices numbered in
// reading order), S, c.
fn table() -> Vec<(ArrowGraph, u64, i128)> {
    vec![
        (arrows(2, &[(0, 1), (0, 1)]), 4, 2),
        (arrows(3, &[(0, 1), (1, 2)]), 2, -2),
        (arrows(2, &[(0, 1); 4]), 48, 2),
        (arrows(3, &[(0, 1), (0, 1), (0, 1), (1, 2)]), 6, -2),
        (arrows(3, &[(0, 1), (0, 1), (1, 2), (1, 2)]), 8, 6),
        (arrows(3, &[(0, 1), (0, 1), (0, 2), (1, 2)]), 4, 2),
        (arrows(4, &[(0, 1), (1, 3), (2, 0), (3, 2)]), 8, 8),
        (arrows(4, &[(0, 1), (1, 2), (1, 3), (3, 0)]), 2, 0),
        (arrows(4, &[(0, 1), (0, 1), (1, 2), (1, 3)]), 4, 8),
        (arrows(4, &[(0, 1), (0, 1), (1, 2), (2, 3)]), 2, -8),
        (arrows(4, &[(0, 1), (1, 2), (1, 2), (2, 3)]), 4, 0),
        (arrows(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]), 2, 16),
        (arrows(5, &[(0, 1), (1, 2), (2, 3), (2, 4)]), 2, -8),
        (arrows(5, &[(0, 1), (1, 2), (1, 3), (1, 4)]), 24, -24),
    ]
}

fn graph_table(seed: u64) -> Result<(bool, String)> {
    let mut enumerated = BTreeSet::new();
    for e in [2, 4] {
        for g in enumerate_reduced(e, EnumOptions { connected_only: true, ..Default::default() })? {
            enumerated.insert(g);
        }
    }
    let mut r = rng(seed, 1);
    let a = random_polynomial::<G, _>(&mut r, 1, 5, 6);
    let j = QuantizationTensor::moyal(1);
    let mut seen = BTreeSet::new();
    let mut bad = Vec::new();
    let rows = table();
    for (i, (g, s, c)) in rows.iter().enumerate() {
        let canon = canonicalize(&g.undirected());
        let c_canon = c_coefficient(&canon)?;
        let ok_s = symmetry_order(&canon) == *s;
        let ok_c = c_of_arrows(g)? == *c;
        // c·λ does not depend on the orientation or labeling
        let lhs = lambda_arrows(g, &vec![a.clone(); g.vertex_count()], &j)?.scale(&G::from_i64(*c as i64));
        let rhs = lambda(&canon.to_labeled(), &vec![a.clone(); canon.vertex_count()], &j)?
            .scale(&G::from_i64(c_canon as i64));
        if !(ok_s && ok_c && lhs == rhs && enumerated.contains(&canon)) {
            bad.push(i + 1);
        }
        seen.insert(canon);
    }
    let complete = seen == enumerated;
    let detail = format!(
        "{} rows, {} enumerated graphs, mismatched rows {:?}{}",
        rows.len(),
        enumerated.len(),
        bad,
        if complete { "" } else { ", table and enumeration differ" }
    );
    Ok((bad.is_empty() && complete, detail))
}

fn zag(_seed: u64) -> Result<(bool, String)> {
    let want: Vec<BigInt> = [1, 2, 16, 272, 7936].iter().map(|&x| BigInt::from(x)).collect();
    let routes = [zag_numbers(4), zag_via_tangent(4), zag_via_bernoulli(4)];
    let ok = routes.iter().all(|r| *r == want);
    let shown: Vec<String> = routes[0].iter().map(|x| x.to_string()).collect();
    Ok((ok, format!("recurrence/tangent/Bernoulli give {}", shown.join(" "))))
}

fn power_oracle(seed: u64) -> Result<(bool, String)> {
    let mut failures = 0;
    let mut cases = 0;
    for a in battery(seed, 3, 20) {
        let cfg = StarConfig::moyal(a.dimension(), 4)?;
        let s = series(&a, 4)?;
        let jets = unlabeled_jets(&s, &cfg)?;
        for n in 2..=4 {
            let mut coeffs = vec![G::from_i64(0); n + 1];
            coeffs[n] = G::from_i64(1);
            let Materialized::Polynomial(b) = materialize(&jets, &a, &FunctionJet::Polynomial(coeffs))? else {
                unreachable!("polynomial f materializes to a polynomial")
            };
            let direct = star_fold(&vec![s.clone(); n], &cfg)?;
            cases += 1;
            if b != direct {
                failures += 1;
            }
        }
    }
    Ok((failures == 0, format!("{cases} cases (20 symbols, n = 2..4), {failures} mismatches")))
}

fn three_forms(seed: u64) -> Result<(bool, String)> {
    let mut failures = 0;
    let battery = battery(seed, 3, 20);
    for a in &battery {
        let cfg = StarConfig::moyal(a.dimension(), 4)?;
        let s = series(a, 4)?;
        let l = labeled_jets(&s, &cfg)?;
        if l != unlabeled_jets(&s, &cfg)? || l != connected_jets(&s, &cfg)? {
            failures += 1;
        }
    }
    Ok((failures == 0, format!("{} symbols, {failures} disagreements", battery.len())))
}

/// The displayed ℏ² and ℏ⁴ terms: `(ℏ power, f derivative, weight, arrows)`.
fn displayed_terms() -> Vec<(usize, usize, BigRational, ArrowGraph)> {
    let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    let e2 = r(-1, 4);
    let e4 = r(1, 16);
    let t = |e: usize, v: usize, w: BigRational, nv: usize, a: &[(usize, usize)]| (e, v, w, arrows(nv, a));
    vec![
        t(2, 2, &e2 * r(1, 2 * 2), 2, &[(0, 1), (0, 1)]),
        t(2, 3, &e2 * r(1, 6), 3, &[(0, 1), (2, 1)]),
        t(4, 2, &e4 * r(1, 24 * 2), 2, &[(0, 1); 4]),
        t(4, 3, &e4 * r(1, 3 * 6), 3, &[(0, 1), (0, 1), (0, 1), (2, 1)]),
        t(4, 3, &e4 * r(1, 2 * 6), 3, &[(0, 1), (0, 1), (0, 2), (1, 2)]),
        t(4, 3, &e4 * r(3, 4 * 6), 3, &[(0, 1), (0, 1), (1, 2), (1, 2)]),
        t(4, 4, &e4 * r(3, 4 * 24), 4, &[(0, 1), (0, 1), (2, 3), (2, 3)]),
        t(4, 4, &e4 * r(1, 24), 4, &[(0, 1), (1, 3), (2, 0), (3, 2)]),
        t(4, 4, &e4 * r(4, 24), 4, &[(0, 1), (0, 1), (1, 2), (3, 2)]),
        t(4, 4, &e4 * r(2, 24), 4, &[(0, 1), (0, 1), (1, 2), (1, 3)]),
        t(4, 5, &e4 * r(8, 120), 5, &[(0, 1), (1, 2), (2, 4), (4, 3)]),
        t(4, 5, &e4 * r(1, 120), 5, &[(0, 1), (2, 1), (3, 1), (4, 1)]),
        t(4, 5, &e4 * r(5, 120), 5, &[(0, 1), (0, 1), (2, 3), (4, 3)]),
        t(4, 5, &e4 * r(4, 120), 5, &[(1, 0), (1, 2), (2, 4), (2, 3)]),
        t(4, 6, &e4 * r(10, 720), 6, &[(0, 1), (2, 1), (3, 4), (5, 4)]),
    ]
}

fn order_four_expansion(seed: u64) -> Result<(bool, String)> {
    let mut r = rng(seed, 5);
    let terms = displayed_terms();
    let mut mismatches = Vec::new();
    for i in 0..5 {
        let dim = 1 + i % 2;
        let a = random_polynomial::<G, _>(&mut r, dim, if dim == 1 { 5 } else { 4 }, 5);
        let tensor = QuantizationTensor::moyal(dim);
        let jets = labeled_jets(&series(&a, 4)?, &StarConfig::moyal(dim, 4)?)?;
        let mut want: BTreeMap<(usize, usize), P> = BTreeMap::new();
        for (e, v, w, g) in &terms {
            let lam = lambda_arrows(g, &vec![a.clone(); g.vertex_count()], &tensor)?;
            let slot = want.entry((*e, *v)).or_insert_with(|| P::zero(a.dimension()));
            *slot = &*slot + &lam.scale(&G::from_rational(w));
        }
        let mut ok = jets.get(0, 0) == P::one(a.dimension()) && jets.odd_orders_vanish();
        for e in [2usize, 4] {
            for v in 0..=6 {
                let expect = want.get(&(e, v)).cloned().unwrap_or_else(|| P::zero(a.dimension()));
                if jets.get(e, v) != expect {
                    ok = false;
                    mismatches.push(format!("A{} ℏ^{e} f^({v})", i + 1));
                }
            }
        }
        if !ok && mismatches.is_empty() {
            mismatches.push(format!("A{} order 0 or odd orders", i + 1));
        }
    }
    Ok((mismatches.is_empty(), format!("{} displayed terms on 5 symbols; mismatches {:?}", terms.len(), mismatches)))
}

fn iterated_star(seed: u64) -> Result<(bool, String)> {
    let mut r = rng(seed, 6);
    let mut failures = 0;
    let mut cases = 0;
    for n in 3..=5 {
        for trial in 0..4 {
            let dim = 1 + trial % 2;
            let factors: Vec<_> = (0..n)
                .map(|_| series(&random_polynomial::<G, _>(&mut r, dim, 3, 3), 4))
                .collect::<Result<_>>()?;
            let cfg = StarConfig::moyal(dim, 4)?;
            cases += 1;
            if star_n_fold(&factors, &cfg)? != star_fold(&factors, &cfg)? {
                failures += 1;
            }
        }
    }
    // A⋆A⋆A at ℏ²: (3/2)(i/2)² λ(A⇉A)·A + ((4−2)/2)(i/2)² λ(A→A←A)
    let a = random_polynomial::<G, _>(&mut r, 1, 4, 5);
    let j = QuantizationTensor::moyal(1);
    let dbl = lambda_arrows(&arrows(2, &[(0, 1), (0, 1)]), &[a.clone(), a.clone()], &j)?;
    let vee = lambda_arrows(&arrows(3, &[(0, 1), (2, 1)]), &[a.clone(), a.clone(), a.clone()], &j)?;
    let quarter = G::from_ratio(-1, 4);
    let want = &(&dbl * &a).scale(&G::from_ratio(3, 2)) + &vee.scale(&G::from_ratio(4 - 2, 2));
    let s = series(&a, 2)?;
    let cube = star_n_fold(&[s.clone(), s.clone(), s], &StarConfig::moyal(1, 2)?)?;
    let displayed = cube.coeff(2) == want.scale(&quarter);
    Ok((
        failures == 0 && displayed,
        format!("{cases} products (n = 3..5), {failures} mismatches; displayed ℏ² cube coefficients {}", if displayed { "match" } else { "differ" }),
    ))
}

fn resolvent_identity(_seed: u64) -> Result<(bool, String)> {
    let mut parts = Vec::new();
    let mut ok = true;
    for text in ["x^2 + p^2", "x^3 + p^2"] {
        let a = crate::phase::parse_symbol::<G>(text, Some(1))?;
        let check = resolvent_symbol_check(&series(&a, 4)?, &StarConfig::moyal(1, 4)?)?;
        ok &= check.holds();
        parts.push(format!("{text}: {}", if check.holds() { "inverse through ℏ⁴" } else { "fails" }));
    }
    Ok((ok, parts.join("; ")))
}

fn quadratic_closed_form(_seed: u64) -> Result<(bool, String)> {
    let q = QuadraticForm::identity(1);
    let a = q.symbol::<G>();
    let half = crate::phase::parse_symbol::<G>("(x^2 + p^2)/2", Some(1))?;
    let graph = labeled_jets(&series(&a, 4)?, &StarConfig::moyal(1, 4)?)?;
    let closed = closed_form_jets::<G>(&q, 4)?;
    let time_ok = time_evolution_closed::<G>(&q, 4)? == time_evolution_from_jets(&graph, 4)?;
    let ok = a == half && closed == graph && time_ok;
    Ok((
        ok,
        format!(
            "closed form {} graph expansion to ℏ⁴; time evolution {} through t⁴",
            if closed == graph { "equals" } else { "differs from" },
            if time_ok { "matches" } else { "differs" }
        ),
    ))
}

fn bs_coefficients(_seed: u64) -> Result<(bool, String)> {
    let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    let prefactor = r(1, 128 * 9);
    let mut want2 = BTreeMap::new();
    want2.insert(ReducedKey { mu: 1, n: 1, v: vec![0, 0, 1] }, r(-1, 24));
    let mut want4 = BTreeMap::new();
    want4.insert(ReducedKey { mu: 2, n: 3, v: vec![0, 0, 2] }, &prefactor * r(7, 5));
    want4.insert(ReducedKey { mu: 2, n: 2, v: vec![0, 0, 0, 0, 1] }, -prefactor);
    let mut ok = true;
    let mut parts = Vec::new();
    for form in [ActionForm::Full, ActionForm::Reduced] {
        let nf = split_normal_form(form, 4)?;
        let good = nf.get(&2) == Some(&want2) && nf.get(&4) == Some(&want4) && nf.len() == 2;
        let graphs = action_corrections(&SplitSymbol::hamiltonian(), 4, form)?.graph_count(4);
        parts.push(format!("{form:?} ({graphs} ℏ⁴ graphs) {}", if good { "exact" } else { "differs" }));
        ok &= good;
    }
    Ok((ok, parts.join("; ")))
}

fn bs_numerics(_seed: u64) -> Result<(bool, String)> {
    let one = BigRational::one();
    let harmonic = Hamiltonian1D::parse_split(one.clone(), "x^2/2")?;
    let mut harm_err: f64 = 0.0;
    for hbar in [1.0, 0.3] {
        for l in bs_eigenvalues::<f64>(&harmonic, hbar, &[1, 2, 3, 4, 5, 6], 4, ActionForm::Reduced)? {
            for e in &l.energies {
                harm_err = harm_err.max((e - hbar * (l.n as f64 - 0.5)).abs());
            }
        }
    }
    let quartic = Hamiltonian1D::parse_split(one, "x^4")?;
    let levels = bs_eigenvalues::<f64>(&quartic, 1.0, &[3, 4, 5, 6], 4, ActionForm::Reduced)?;
    let oracle = schrodinger_oracle(1.0, &[0.0, 0.0, 0.0, 0.0, 1.0], 1.0, 6)?;
    let mut rel: f64 = 0.0;
    for l in &levels {
        let exact = oracle.energies[l.n - 1];
        rel = rel.max((l.energies[2] - exact).abs() / exact);
    }
    let quartic_half = Hamiltonian1D::from_split(BigRational::one(), vec![
        BigRational::from_integer(0.into()),
        BigRational::from_integer(0.into()),
        BigRational::from_integer(0.into()),
        BigRational::from_integer(0.into()),
        BigRational::one(),
    ])?;
    let full = ActionEvaluator::<f64>::new(&quartic_half, 4, ActionForm::Full)?;
    let reduced = ActionEvaluator::<f64>::new(&quartic_half, 4, ActionForm::Reduced)?;
    let mut graph_rel: f64 = 0.0;
    for e in [0.5, 1.0, 2.0, 5.0, 10.0] {
        let a = full.correction(e, 4)?;
        let b = reduced.correction(e, 4)?;
        graph_rel = graph_rel.max((a - b).abs() / a.abs());
    }
    let ok = harm_err <= 1e-9 && rel <= 5e-4 && graph_rel <= 1e-6 && oracle.converged;
    Ok((
        ok,
        format!("harmonic max err {harm_err:.1e}; x⁴ n=3..6 max rel err {rel:.1e}; full vs reduced ℏ⁴ rel {graph_rel:.1e}"),
    ))
}

fn random_labeled_graph<R: Rng>(r: &mut R) -> LabeledGraph {
    let v = r.gen_range(1..=3);
    let e = if v == 1 { 0 } else { r.gen_range(0..=3) };
    let edges = (0..e)
        .map(|_| {
            let a = r.gen_range(0..v);
            let b = (a + r.gen_range(1..v)) % v;
            (a.min(b), a.max(b))
        })
        .collect();
    LabeledGraph::new(v, edges).expect("valid random graph")
}

fn lemma_suite(seed: u64) -> Result<(bool, String)> {
    let mut r = rng(seed, 11);
    let mut expansion_fail = 0;
    let trials = 12;
    for i in 0..trials {
        let dim = 1 + i % 2;
        let g = random_labeled_graph(&mut r);
        let assign: Vec<P> = (0..g.vertex_count()).map(|_| random_polynomial::<G, _>(&mut r, dim, 3, 3)).collect();
        let d = random_polynomial::<G, _>(&mut r, dim, 3, 3);
        for k in 0..=2 {
            let x = attach_arrows_expand(&g, &assign, k, &d, &QuantizationTensor::moyal(dim))?;
            if x.lhs != x.rhs {
                expansion_fail += 1;
            }
        }
    }
    let mut pointwise_fail = 0;
    let mut nota_fail = 0;
    let cfg = StarConfig::moyal(1, 4)?;
    let a = random_polynomial::<G, _>(&mut r, 1, 3, 4);
    let s = series(&a, 4)?;
    let jets = labeled_jets(&s, &cfg)?;
    for _ in 0..10 {
        let z0: Vec<G> = (0..2).map(|_| G::from_ratio(r.gen_range(-6..=6), r.gen_range(1..=3))).collect();
        let pw = pointwise_jets(&s, &z0, &cfg)?;
        let mut graph = BTreeMap::new();
        for ((e, al), q) in jets.terms() {
            let v = q.evaluate(&z0)?;
            if !num_traits::Zero::is_zero(&v) {
                graph.insert((*e, al[0] as usize), v);
            }
        }
        if graph != pw.as_jet_values() {
            pointwise_fail += 1;
        }
        if !nota_check(&s, &z0, &cfg, 4)?.iter().all(|n| n.holds) {
            nota_fail += 1;
        }
    }
    let ok = expansion_fail == 0 && pointwise_fail == 0 && nota_fail == 0;
    Ok((
        ok,
        format!(
            "arrow expansion {expansion_fail}/{} fail; pointwise {pointwise_fail}/10 fail; vanishing order {nota_fail}/10 fail",
            trials * 3
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_checks_pass() {
        for id in [1, 2, 9] {
            let r = run_check(id, 7).unwrap();
            assert!(r.passed, "{}", r.line());
        }
        assert!(run_check(99, 0).is_none());
    }
}
