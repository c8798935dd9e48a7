//! Integrals `∫_γ G(x, p) dt` over the orbit `H = E` of a
//! kinetic-plus-potential Hamiltonian, returned as Taylor jets in `E`.
//!
//! With turning points `a < b`, `E − V = (x − a)(b − x) q(x)` and
//! `x = c + h sin θ`, the factor `(x − a)(b − x) = h² cos² θ` cancels the
//! endpoint singularity and the integrand is smooth in `θ`.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::phase::PhasePolynomial;
use crate::scalar::{rational_to_f64, Real};

/// Truncated Taylor series `Σ c_k ε^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<R> {
    c: Vec<R>,
}

impl<R: Real> Jet<R> {
    pub fn constant(x: R, order: usize) -> Self {
        let mut c = vec![R::zero(); order + 1];
        c[0] = x;
        Jet { c }
    }

    /// `x + ε`.
    pub fn variable(x: R, order: usize) -> Self {
        let mut j = Self::constant(x, order);
        if order > 0 {
            j.c[1] = R::one();
        }
        j
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> R {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[R] {
        &self.c
    }

    /// `k`-th derivative at `ε = 0`.
    pub fn derivative(&self, k: usize) -> R {
        let f = (1..=k).fold(R::one(), |acc, i| acc * R::lit(i as f64));
        self.c.get(k).copied().unwrap_or_else(R::zero) * f
    }

    pub fn add(&self, o: &Self) -> Self {
        Jet { c: self.c.iter().zip(&o.c).map(|(a, b)| *a + *b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Jet { c: self.c.iter().zip(&o.c).map(|(a, b)| *a - *b).collect() }
    }

    pub fn scale(&self, s: R) -> Self {
        Jet { c: self.c.iter().map(|a| *a * s).collect() }
    }

    pub fn add_scalar(&self, s: R) -> Self {
        let mut out = self.clone();
        out.c[0] = out.c[0] + s;
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.c.len();
        let mut c = vec![R::zero(); n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] = c[i + j] + self.c[i] * o.c[j];
            }
        }
        Jet { c }
    }

    pub fn recip(&self) -> Self {
        let n = self.c.len();
        let mut c = vec![R::zero(); n];
        c[0] = R::one() / self.c[0];
        for k in 1..n {
            let mut s = R::zero();
            for j in 1..=k {
                s = s + self.c[j] * c[k - j];
            }
            c[k] = -s * c[0];
        }
        Jet { c }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    /// Requires a positive constant term.
    pub fn sqrt(&self) -> Self {
        let n = self.c.len();
        let mut c = vec![R::zero(); n];
        c[0] = self.c[0].sqrt();
        let two = R::lit(2.0);
        for k in 1..n {
            let mut s = self.c[k];
            for j in 1..k {
                s = s - c[j] * c[k - j];
            }
            c[k] = s / (two * c[0]);
        }
        Jet { c }
    }

    pub fn powi(&self, k: i32) -> Self {
        let base = if k < 0 { self.recip() } else { self.clone() };
        let mut out = Self::constant(R::one(), self.order());
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }
}

fn horner<R: Real>(coeffs: &[R], x: &Jet<R>) -> Jet<R> {
    let mut acc = Jet::constant(R::zero(), x.order());
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add_scalar(*c);
    }
    acc
}

fn horner_jets<R: Real>(coeffs: &[Jet<R>], x: &Jet<R>) -> Jet<R> {
    let mut acc = Jet::constant(R::zero(), x.order());
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

fn horner_f<R: Real>(coeffs: &[R], x: R) -> R {
    coeffs.iter().rev().fold(R::zero(), |acc, c| acc * x + *c)
}

fn derivative_coeffs<R: Real>(coeffs: &[R]) -> Vec<R> {
    coeffs.iter().enumerate().skip(1).map(|(k, c)| *c * R::lit(k as f64)).collect()
}

/// `n`-point Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `G(x, p) = Σ_k g_k(x) p^k` keeping only even `k` (odd powers integrate
/// to zero over the symmetric orbit).
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitIntegrand<R> {
    pub parts: Vec<(usize, Vec<R>)>,
}

impl<R: Real> OrbitIntegrand<R> {
    pub fn from_polynomial(g: &PhasePolynomial<BigRational>) -> Result<Self> {
        if g.dimension() != 1 {
            return Err(Error::DimensionMismatch { left: g.dimension(), right: 1 });
        }
        let mut parts: Vec<(usize, Vec<R>)> = Vec::new();
        for (e, c) in g.terms() {
            let (kx, kp) = (e[0] as usize, e[1] as usize);
            if kp % 2 == 1 {
                continue;
            }
            let idx = match parts.iter().position(|(k, _)| *k == kp) {
                Some(i) => i,
                None => {
                    parts.push((kp, Vec::new()));
                    parts.len() - 1
                }
            };
            let poly = &mut parts[idx].1;
            if poly.len() <= kx {
                poly.resize(kx + 1, R::zero());
            }
            poly[kx] = R::lit(rational_to_f64(c));
        }
        parts.sort_by_key(|p| p.0);
        Ok(OrbitIntegrand { parts })
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Orbits of `p²/2m + V(x)` for a confining polynomial `V`.
#[derive(Clone, Debug)]
pub struct OrbitProblem<R> {
    mass: R,
    potential: Vec<R>,
    dpotential: Vec<R>,
    xmin: R,
    vmin: R,
    tol: R,
    nodes: Vec<R>,
    weights: Vec<R>,
}

/// Largest number of quadrature panels before giving up.
const MAX_PANELS: usize = 512;
const GL_POINTS: usize = 20;

impl<R: Real> OrbitProblem<R> {
    pub fn new(mass: R, potential: Vec<R>) -> Result<Self> {
        let mut potential = potential;
        while potential.len() > 1 && potential.last() == Some(&R::zero()) {
            potential.pop();
        }
        let deg = potential.len() - 1;
        if deg < 2 || deg % 2 == 1 || potential[deg] <= R::zero() {
            return Err(Error::NotConfining(format!("degree {deg} potential with leading coefficient {}", potential[deg])));
        }
        if mass <= R::zero() {
            return Err(Error::Unsupported("mass must be positive".into()));
        }
        let dpotential = derivative_coeffs(&potential);
        let (xmin, vmin) = global_minimum(&potential, &dpotential);
        let tol = R::lit(1e-10).max(R::epsilon() * R::lit(100.0));
        let (n, w) = gauss_legendre(GL_POINTS);
        Ok(OrbitProblem {
            mass,
            potential,
            dpotential,
            xmin,
            vmin,
            tol,
            nodes: n.into_iter().map(R::lit).collect(),
            weights: w.into_iter().map(R::lit).collect(),
        })
    }

    pub fn mass(&self) -> R {
        self.mass
    }

    pub fn potential(&self) -> &[R] {
        &self.potential
    }

    pub fn minimum(&self) -> (R, R) {
        (self.xmin, self.vmin)
    }

    pub fn v(&self, x: R) -> R {
        horner_f(&self.potential, x)
    }

    /// `(x₋, x₊)` with `V(x±) = E`, nearest the minimum on either side.
    pub fn turning_points(&self, e: R) -> Result<(R, R)> {
        if e <= self.vmin {
            return Err(Error::BelowMinimum { energy: to_f64(e), minimum: to_f64(self.vmin) });
        }
        let a = self.crossing(e, -R::one())?;
        let b = self.crossing(e, R::one())?;
        for t in [a, b] {
            if horner_f(&self.dpotential, t).abs() <= R::epsilon() * R::lit(1e3) * (R::one() + e.abs()) {
                return Err(Error::NotBracketed(format!("turning point at {t} is not simple")));
            }
        }
        Ok((a, b))
    }

    fn crossing(&self, e: R, dir: R) -> Result<R> {
        let f = |x: R| self.v(x) - e;
        let mut step = R::lit(0.25) * (R::one() + self.xmin.abs());
        let mut inner = self.xmin;
        let mut outer = self.xmin + dir * step;
        let mut tries = 0;
        while f(outer) <= R::zero() {
            inner = outer;
            step = step * R::lit(2.0);
            outer = self.xmin + dir * step;
            tries += 1;
            if tries > 200 {
                return Err(Error::NotBracketed(format!("no turning point for E = {e}")));
            }
        }
        let (mut lo, mut hi) = (inner, outer);
        for _ in 0..200 {
            let mid = (lo + hi) / R::lit(2.0);
            if f(mid) <= R::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo).abs() <= R::epsilon() * R::lit(4.0) * (R::one() + mid.abs()) {
                break;
            }
        }
        Ok((lo + hi) / R::lit(2.0))
    }

    /// `∫_γ G dt` at `E + ε` as a jet of the given order.
    pub fn integrate(&self, e: R, g: &OrbitIntegrand<R>, order: usize) -> Result<Jet<R>> {
        if g.is_zero() {
            return Ok(Jet::constant(R::zero(), order));
        }
        let (a0, b0) = self.turning_points(e)?;
        let ej = Jet::variable(e, order);
        let a = self.jet_root(a0, &ej);
        let b = self.jet_root(b0, &ej);
        let q = self.deflate(&ej, &a, &b);
        let two = R::lit(2.0);
        let c = a.add(&b).scale(R::one() / two);
        let h = b.sub(&a).scale(R::one() / two);
        let two_m = two * self.mass;
        let integrand = |theta: R| -> Jet<R> {
            let x = c.add(&h.scale(theta.sin()));
            let s = horner_jets(&q, &x).scale(two_m).sqrt();
            let hc = h.scale(theta.cos());
            let mut acc = Jet::constant(R::zero(), order);
            for (k, gk) in &g.parts {
                let gx = horner(gk, &x);
                let term = if *k == 0 {
                    gx.div(&s)
                } else {
                    gx.mul(&hc.powi(*k as i32)).mul(&s.powi(*k as i32 - 1))
                };
                acc = acc.add(&term.scale(two_m));
            }
            acc
        };
        self.panel_integrate(&integrand, order)
    }

    /// Newton iteration on jets: each step doubles the number of correct
    /// Taylor coefficients of the root of `V(x) = E + ε`.
    fn jet_root(&self, x0: R, e: &Jet<R>) -> Jet<R> {
        let mut x = Jet::constant(x0, e.order());
        let steps = 2 + (usize::BITS - e.order().leading_zeros()) as usize;
        for _ in 0..steps {
            let f = horner(&self.potential, &x).sub(e);
            let df = horner(&self.dpotential, &x);
            x = x.sub(&f.div(&df));
        }
        x
    }

    /// `q` with `V − E = (x − a)(x − b)·q`, so `E − V = (x − a)(b − x)·q`.
    fn deflate(&self, e: &Jet<R>, a: &Jet<R>, b: &Jet<R>) -> Vec<Jet<R>> {
        let n = e.order();
        let mut r: Vec<Jet<R>> = self.potential.iter().map(|&c| Jet::constant(c, n)).collect();
        r[0] = r[0].sub(e);
        let s1 = a.add(b).scale(-R::one());
        let s0 = a.mul(b);
        let d = r.len() - 1;
        let mut q = vec![Jet::constant(R::zero(), n); d - 1];
        for i in (2..=d).rev() {
            let lead = r[i].clone();
            r[i - 1] = r[i - 1].sub(&lead.mul(&s1));
            r[i - 2] = r[i - 2].sub(&lead.mul(&s0));
            q[i - 2] = lead;
        }
        q
    }

    fn panel_integrate(&self, f: &dyn Fn(R) -> Jet<R>, order: usize) -> Result<Jet<R>> {
        let half_pi = R::pi() / R::lit(2.0);
        let mut panels = 1;
        let mut prev = self.composite(f, panels, -half_pi, half_pi, order);
        while panels < MAX_PANELS {
            panels *= 2;
            let cur = self.composite(f, panels, -half_pi, half_pi, order);
            let norm = cur.c.iter().fold(R::zero(), |m, v| m.max(v.abs()));
            let ok = cur
                .c
                .iter()
                .zip(&prev.c)
                .all(|(x, y)| (*x - *y).abs() <= self.tol * x.abs() + R::lit(1e-14).max(R::epsilon() * R::lit(10.0)) * norm);
            if ok {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(Error::Numerical(format!("orbit quadrature did not converge with {MAX_PANELS} panels")))
    }

    fn composite(&self, f: &dyn Fn(R) -> Jet<R>, panels: usize, lo: R, hi: R, order: usize) -> Jet<R> {
        let width = (hi - lo) / R::lit(panels as f64);
        let mut acc = Jet::constant(R::zero(), order);
        for p in 0..panels {
            let a = lo + width * R::lit(p as f64);
            let mid = a + width / R::lit(2.0);
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                let t = mid + *x * width / R::lit(2.0);
                acc = acc.add(&f(t).scale(*w * width / R::lit(2.0)));
            }
        }
        acc
    }
}

fn to_f64<R: Real>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Global minimum over the real critical points of a confining polynomial.
fn global_minimum<R: Real>(v: &[R], dv: &[R]) -> (R, R) {
    let lead = *dv.last().expect("nonconstant");
    let bound = R::one() + dv.iter().take(dv.len() - 1).fold(R::zero(), |m, c| m.max((*c / lead).abs()));
    let samples = 4000;
    let mut best = (R::zero(), horner_f(v, R::zero()));
    let mut consider = |x: R| {
        let val = horner_f(v, x);
        if val < best.1 {
            best = (x, val);
        }
    };
    let step = bound * R::lit(2.0) / R::lit(samples as f64);
    let mut prev_x = -bound;
    let mut prev = horner_f(dv, prev_x);
    for i in 1..=samples {
        let x = -bound + step * R::lit(i as f64);
        let d = horner_f(dv, x);
        if d == R::zero() {
            consider(x);
        } else if (prev < R::zero()) != (d < R::zero()) && prev != R::zero() {
            // a minimum is where V′ goes from negative to positive
            let (mut lo, mut hi) = (prev_x, x);
            for _ in 0..200 {
                let mid = (lo + hi) / R::lit(2.0);
                if (horner_f(dv, mid) < R::zero()) == (prev < R::zero()) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            consider((lo + hi) / R::lit(2.0));
        }
        prev_x = x;
        prev = d;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic() -> OrbitProblem<f64> {
        OrbitProblem::new(1.0, vec![0.0, 0.0, 0.5]).unwrap()
    }

    fn one() -> OrbitIntegrand<f64> {
        OrbitIntegrand { parts: vec![(0, vec![1.0])] }
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let (x, w) = gauss_legendre(5);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn jet_sqrt_and_recip() {
        let x = Jet::variable(4.0f64, 3);
        let s = x.sqrt();
        assert!((s.mul(&s).sub(&x)).coeffs().iter().all(|c| c.abs() < 1e-14));
        let r = x.recip().mul(&x);
        assert!((r.value() - 1.0).abs() < 1e-15 && r.coeffs()[1..].iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn harmonic_period_is_two_pi() {
        let o = harmonic();
        for e in [0.1, 1.0, 7.5] {
            let j = o.integrate(e, &one(), 3).unwrap();
            assert!((j.value() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
            assert!(j.coeffs()[1..].iter().all(|c| c.abs() < 1e-10));
        }
    }

    #[test]
    fn harmonic_area() {
        // ∫ p² dt = S₀ = 2πE for m = 1
        let o = harmonic();
        let g = OrbitIntegrand { parts: vec![(2, vec![1.0])] };
        let j = o.integrate(2.0, &g, 2).unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        assert!((j.value() - 2.0 * tau).abs() < 1e-12);
        assert!((j.derivative(1) - tau).abs() < 1e-12);
    }

    #[test]
    fn quartic_period_two_schemes() {
        // T(E) = 2∫ dx/√(2(E − x⁴)); reference by a tanh-sinh rule on x = b·s.
        let o = OrbitProblem::new(1.0, vec![0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let t = o.integrate(1.0, &one(), 0).unwrap().value();
        let f = |s: f64| 2.0 / (2.0 * (1.0 - s.powi(4))).sqrt();
        let mut reference = 0.0;
        let hstep = 1.0 / 64.0;
        for k in -400..=400 {
            let u = k as f64 * hstep;
            let arg = std::f64::consts::FRAC_PI_2 * u.sinh();
            let s = arg.tanh();
            let ds = std::f64::consts::FRAC_PI_2 * u.cosh() / arg.cosh().powi(2);
            if s.abs() < 1.0 {
                reference += hstep * f(s) * ds;
            }
        }
        assert!((t - reference).abs() < 1e-8 * reference, "{t} vs {reference}");
    }

    #[test]
    fn below_minimum_rejected() {
        assert!(matches!(harmonic().integrate(-1.0, &one(), 0), Err(Error::BelowMinimum { .. })));
        assert!(OrbitProblem::new(1.0, vec![0.0, 0.0, 0.0, 1.0]).is_err());
    }
}
