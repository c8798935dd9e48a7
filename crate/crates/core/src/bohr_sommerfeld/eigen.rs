//! Numerical action corrections and the quantization condition
//! `S(E) = 2π(n − 1/2)ℏ` with `S = S₀ + ℏ²S₂ + ℏ⁴S₄`.

use std::collections::BTreeMap;

use num_rational::BigRational;

use super::quadrature::{OrbitIntegrand, OrbitProblem};
use super::{action_corrections, ActionForm, Hamiltonian1D};
use crate::error::{Error, Result};
use crate::phase::{PhasePolynomial, Symbol};
use crate::scalar::{rational_to_f64, Real};

/// Highest ℏ power of the implemented corrections.
pub const MAX_BS_ORDER: usize = 4;

/// Evaluates `S₀(E)` and `S_j(E)` for a kinetic-plus-potential Hamiltonian.
#[derive(Clone, Debug)]
pub struct ActionEvaluator<R> {
    orbit: OrbitProblem<R>,
    order: usize,
    /// ℏ power → (d/dE count → summed weighted integrand)
    terms: BTreeMap<usize, Vec<(usize, OrbitIntegrand<R>)>>,
}

impl<R: Real> ActionEvaluator<R> {
    pub fn new(h: &Hamiltonian1D, order: usize, form: ActionForm) -> Result<Self> {
        let split = h
            .split()
            .ok_or_else(|| Error::Unsupported("Bohr–Sommerfeld needs H = p²/2m + V(x)".into()))?;
        let orbit = OrbitProblem::new(
            R::lit(rational_to_f64(&split.mass)),
            split.potential.iter().map(|c| R::lit(rational_to_f64(c))).collect(),
        )?;
        let series = action_corrections(h.symbol(), order, form)?;
        let mut terms = BTreeMap::new();
        for (j, list) in &series.terms {
            let mut by_d: BTreeMap<usize, PhasePolynomial<BigRational>> = BTreeMap::new();
            for t in list {
                let scaled = t.integrand.scale(&t.weight);
                let slot = by_d.entry(t.derivative).or_insert_with(|| scaled.zero_like());
                *slot = slot.add_ref(&scaled);
            }
            let mut parts = Vec::new();
            for (d, g) in by_d {
                parts.push((d, OrbitIntegrand::from_polynomial(&g)?));
            }
            terms.insert(*j, parts);
        }
        Ok(ActionEvaluator { orbit, order, terms })
    }

    pub fn orbit(&self) -> &OrbitProblem<R> {
        &self.orbit
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `S₀(E) = ∮ p dx = ∫_γ p²/m dt`.
    pub fn action(&self, e: R) -> Result<R> {
        Ok(self.action_jet(e, 0)?[0])
    }

    /// `S₀` and its first `order` energy derivatives.
    pub fn action_jet(&self, e: R, order: usize) -> Result<Vec<R>> {
        let g = OrbitIntegrand { parts: vec![(2, vec![R::one() / self.orbit.mass()])] };
        let j = self.orbit.integrate(e, &g, order)?;
        Ok((0..=order).map(|k| j.derivative(k)).collect())
    }

    /// The coefficient `S_j(E)` of `ℏ^j`.
    pub fn correction(&self, e: R, j: usize) -> Result<R> {
        let mut total = R::zero();
        for (d, g) in self.terms.get(&j).into_iter().flatten() {
            total = total + self.orbit.integrate(e, g, *d)?.derivative(*d);
        }
        Ok(total)
    }

    /// `S₀ + Σ_{j ≤ order} ℏ^j S_j` together with the individual terms.
    pub fn series(&self, e: R, hbar: R, order: usize) -> Result<(R, Vec<R>)> {
        let s0 = self.action(e)?;
        let mut parts = Vec::new();
        let mut total = s0;
        for j in (2..=order.min(self.order)).step_by(2) {
            let t = hbar.powi(j as i32) * self.correction(e, j)?;
            parts.push(t);
            total = total + t;
        }
        Ok((total, parts))
    }
}

/// Bohr–Sommerfeld energies of level `n` at orders 0, 2, 4.
#[derive(Clone, Debug, PartialEq)]
pub struct BsLevel<R> {
    pub n: usize,
    /// Index `i` holds the energy including corrections through `ℏ^{2i}`.
    pub energies: Vec<R>,
    /// The ℏ⁴ term outweighs the ℏ² term at the root.
    pub blowup: bool,
}

impl<R: Real> BsLevel<R> {
    pub fn energy(&self, order: usize) -> Option<R> {
        if order % 2 == 1 {
            return None;
        }
        self.energies.get(order / 2).copied()
    }
}

/// Solves the quantization condition for each `n ≥ 1` at every even order
/// up to `order`.
pub fn bs_eigenvalues<R: Real>(
    h: &Hamiltonian1D,
    hbar: R,
    levels: &[usize],
    order: usize,
    form: ActionForm,
) -> Result<Vec<BsLevel<R>>> {
    if hbar <= R::zero() {
        return Err(Error::Unsupported("ℏ must be positive".into()));
    }
    let eval = ActionEvaluator::<R>::new(h, order, form)?;
    let (_, vmin) = eval.orbit.minimum();
    let mut out = Vec::new();
    for &n in levels {
        if n == 0 {
            return Err(Error::Unsupported("levels are numbered from n = 1".into()));
        }
        let target = R::lit(2.0) * R::pi() * (R::lit(n as f64) - R::lit(0.5)) * hbar;
        let s0 = |e: R| eval.action(e).map(|s| s - target);
        let e0 = solve_above(&s0, vmin)?;
        let mut energies = vec![e0];
        let mut blowup = false;
        for k in (2..=order).step_by(2) {
            let f = |e: R| eval.series(e, hbar, k).map(|(s, _)| s - target);
            let prev = *energies.last().expect("order 0 solved");
            let root = solve_near(&f, prev, vmin)?;
            if k == 4 {
                let (_, parts) = eval.series(root, hbar, 4)?;
                let scale = R::lit(1e-12) * target.abs();
                blowup = parts[1].abs() > parts[0].abs() && parts[1].abs() > scale;
            }
            energies.push(root);
        }
        out.push(BsLevel { n, energies, blowup });
    }
    Ok(out)
}

fn solve_above<R: Real>(f: &dyn Fn(R) -> Result<R>, vmin: R) -> Result<R> {
    let mut width = R::one() + vmin.abs() * R::lit(1e-3);
    let lo = vmin + width * R::epsilon().sqrt() * R::lit(1e-2);
    let flo = f(lo)?;
    if flo > R::zero() {
        return Err(Error::NotBracketed("action already exceeds the target at the minimum".into()));
    }
    for _ in 0..200 {
        let hi = vmin + width;
        let fhi = f(hi)?;
        if fhi > R::zero() {
            return bracketed_root(f, (lo, flo), (hi, fhi));
        }
        width = width * R::lit(2.0);
    }
    Err(Error::NotBracketed("no energy reaches the quantization target".into()))
}

fn solve_near<R: Real>(f: &dyn Fn(R) -> Result<R>, guess: R, vmin: R) -> Result<R> {
    let mut delta = (guess - vmin) * R::lit(0.05);
    for _ in 0..60 {
        let lo = (guess - delta).max(vmin + (guess - vmin) * R::lit(1e-6));
        let hi = guess + delta;
        let (flo, fhi) = (f(lo)?, f(hi)?);
        if flo.signum() != fhi.signum() || flo == R::zero() || fhi == R::zero() {
            return bracketed_root(f, (lo, flo), (hi, fhi));
        }
        delta = delta * R::lit(2.0);
    }
    Err(Error::NotBracketed(format!("corrected condition has no root near E = {guess}")))
}

/// Illinois regula falsi with a bisection fallback.
fn bracketed_root<R: Real>(f: &dyn Fn(R) -> Result<R>, a: (R, R), b: (R, R)) -> Result<R> {
    let ((mut x0, mut f0), (mut x1, mut f1)) = (a, b);
    if f0 == R::zero() {
        return Ok(x0);
    }
    if f1 == R::zero() {
        return Ok(x1);
    }
    let mut side = 0i8;
    for _ in 0..300 {
        let mut x = (x0 * f1 - x1 * f0) / (f1 - f0);
        if !x.is_finite() || x <= x0.min(x1) || x >= x0.max(x1) {
            x = (x0 + x1) / R::lit(2.0);
        }
        let fx = f(x)?;
        if fx == R::zero() || (x1 - x0).abs() <= R::epsilon() * R::lit(8.0) * (R::one() + x.abs()) {
            return Ok(x);
        }
        if fx.signum() == f1.signum() {
            x1 = x;
            f1 = fx;
            if side == -1 {
                f0 = f0 / R::lit(2.0);
            }
            side = -1;
        } else {
            x0 = x;
            f0 = fx;
            if side == 1 {
                f1 = f1 / R::lit(2.0);
            }
            side = 1;
        }
        if (x1 - x0).abs() <= R::lit(1e-14) * (R::one() + x.abs()) {
            return Ok((x0 + x1) / R::lit(2.0));
        }
    }
    Err(Error::Numerical("root iteration did not converge".into()))
}

/// `k`-th derivative by central differences with one Richardson step.
pub fn fd_derivative<R: Real>(f: &dyn Fn(R) -> Result<R>, x: R, k: usize, step: R) -> Result<R> {
    let central = |h: R| -> Result<R> {
        let mut acc = R::zero();
        let mut binom = R::one();
        for i in 0..=k {
            let offset = R::lit(k as f64 / 2.0 - i as f64) * h;
            let sign = if i % 2 == 0 { R::one() } else { -R::one() };
            acc = acc + sign * binom * f(x + offset)?;
            binom = binom * R::lit((k - i) as f64) / R::lit((i + 1) as f64);
        }
        Ok(acc / h.powi(k as i32))
    };
    let coarse = central(step)?;
    let fine = central(step / R::lit(2.0))?;
    Ok((R::lit(4.0) * fine - coarse) / R::lit(3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn quartic() -> Hamiltonian1D {
        Hamiltonian1D::parse_split(BigRational::one(), "x^4").unwrap()
    }

    #[test]
    fn harmonic_levels_exact() {
        let h = Hamiltonian1D::parse_split(BigRational::one(), "x^2/2").unwrap();
        let levels = bs_eigenvalues::<f64>(&h, 0.7, &[1, 2, 5], 4, ActionForm::Reduced).unwrap();
        for l in &levels {
            for e in &l.energies {
                assert!((e - 0.7 * (l.n as f64 - 0.5)).abs() < 1e-9, "{l:?}");
            }
            assert!(!l.blowup);
        }
        let eval = ActionEvaluator::<f64>::new(&h, 4, ActionForm::Full).unwrap();
        for e in [0.3, 2.0] {
            assert!(eval.correction(e, 2).unwrap().abs() < 1e-9);
            assert!(eval.correction(e, 4).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn full_and_reduced_agree() {
        let h = Hamiltonian1D::parse_split(BigRational::one(), "x^4 - x^2 + x/3").unwrap();
        let full = ActionEvaluator::<f64>::new(&h, 4, ActionForm::Full).unwrap();
        let reduced = ActionEvaluator::<f64>::new(&h, 4, ActionForm::Reduced).unwrap();
        for e in [0.5, 1.0, 2.0, 4.0, 8.0] {
            for j in [2, 4] {
                let a = full.correction(e, j).unwrap();
                let b = reduced.correction(e, j).unwrap();
                assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-3), "E={e} j={j}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn jet_derivative_matches_finite_differences() {
        let eval = ActionEvaluator::<f64>::new(&quartic(), 4, ActionForm::Reduced).unwrap();
        let jet = eval.action_jet(1.3, 3).unwrap();
        let s = |e: f64| eval.action(e);
        for k in 1..=3 {
            let fd = fd_derivative(&s, 1.3, k, 0.02).unwrap();
            assert!((fd - jet[k]).abs() < 1e-5 * jet[k].abs(), "k={k}: {fd} vs {}", jet[k]);
        }
    }

    #[test]
    fn quartic_levels_ordered() {
        let levels = bs_eigenvalues::<f64>(&quartic(), 1.0, &[1, 2, 3], 4, ActionForm::Reduced).unwrap();
        assert!(levels.windows(2).all(|w| w[0].energies[2] < w[1].energies[2]));
        assert_eq!(levels[2].energy(2), Some(levels[2].energies[1]));
    }

    #[test]
    fn non_split_rejected() {
        let h = Hamiltonian1D::new(crate::phase::parse_symbol("x^2*p^2 + p^2 + x^2", Some(1)).unwrap()).unwrap();
        assert!(ActionEvaluator::<f64>::new(&h, 2, ActionForm::Reduced).is_err());
    }
}
