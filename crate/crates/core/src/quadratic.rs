//! Quadratic symbols `A = ½ zᵀQz`: Zag numbers, the path and cycle graph
//! families, and the closed forms for `f(Â)` and `e^{−itÂ/ℏ}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::functional_calculus::{materialize, FunctionJet, JetSeries, Materialized};
use crate::graphs::ArrowGraph;
use crate::phase::{PhasePolynomial, QuantizationTensor};
use crate::scalar::{binomial, factorial, ComplexCoefficient};

/// `A(z) = ½ zᵀQz` on `T*R^N`, `Q` symmetric `2N×2N`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm {
    dim: usize,
    q: Vec<Vec<BigRational>>,
}

impl QuadraticForm {
    pub fn new(q: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = q.len();
        if n == 0 || !n.is_multiple_of(2) || q.iter().any(|r| r.len() != n) {
            return Err(Error::NotQuadratic(format!("Q must be square of even size, got {n} rows")));
        }
        for i in 0..n {
            for j in 0..i {
                if q[i][j] != q[j][i] {
                    return Err(Error::NotQuadratic(format!("Q is not symmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        Ok(QuadraticForm { dim: n / 2, q })
    }

    /// `"a,b;c,d"` rows separated by `;`.
    pub fn parse(text: &str) -> Result<Self> {
        let rows = text
            .split(';')
            .map(|r| {
                r.split(',')
                    .map(|x| {
                        crate::scalar::parse_rational(x.trim()).ok_or_else(|| Error::Parse {
                            position: 0,
                            message: format!("bad matrix entry `{}`", x.trim()),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    /// Read `Q` off a homogeneous quadratic polynomial with real coefficients.
    pub fn from_symbol<C: ComplexCoefficient>(a: &PhasePolynomial<C>) -> Result<Self> {
        let n = 2 * a.dimension();
        let mut q = vec![vec![BigRational::zero(); n]; n];
        for (e, c) in a.terms() {
            if e.iter().map(|&k| k as usize).sum::<usize>() != 2 {
                return Err(Error::NotQuadratic(format!("term of degree other than 2 in {a}")));
            }
            let c = c.as_real().ok_or_else(|| Error::NotQuadratic("complex coefficient".into()))?;
            let vars: Vec<usize> = (0..n).filter(|&v| e[v] > 0).collect();
            match vars[..] {
                [v] => q[v][v] = c * BigRational::from_integer(2.into()),
                [u, v] => {
                    q[u][v] = c.clone();
                    q[v][u] = c;
                }
                _ => unreachable!(),
            }
        }
        Self::new(q)
    }

    pub fn identity(dim: usize) -> Self {
        let n = 2 * dim;
        let q = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        QuadraticForm { dim, q }
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[Vec<BigRational>] {
        &self.q
    }

    pub fn symbol<C: ComplexCoefficient>(&self) -> PhasePolynomial<C> {
        let n = 2 * self.dim;
        let half = BigRational::new(1.into(), 2.into());
        let mut out = PhasePolynomial::zero(self.dim);
        for i in 0..n {
            for j in 0..n {
                if !self.q[i][j].is_zero() {
                    let t = &PhasePolynomial::variable(self.dim, i) * &PhasePolynomial::variable(self.dim, j);
                    out = &out + &t.scale(&C::from_rational(&(&self.q[i][j] * &half)));
                }
            }
        }
        out
    }

    /// `ω² = det Q` (one degree of freedom only).
    pub fn omega_squared(&self) -> Result<BigRational> {
        if self.dim != 1 {
            return Err(Error::Unsupported("closed forms are one-dimensional".into()));
        }
        Ok(&self.q[0][0] * &self.q[1][1] - &self.q[0][1] * &self.q[1][0])
    }
}

/// Signed `c_{Δ_k}`, `k = 0..=k_max`, from the recurrence
/// `c_k = −Σ_j C(2k, 2j+1) c_j c_{k−j−1}`.
pub fn zag_signed(k_max: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::one()];
    for k in 1..=k_max {
        let s: BigInt = (0..k).map(|j| binomial(2 * k, 2 * j + 1) * &c[j] * &c[k - j - 1]).sum();
        c.push(-s);
    }
    c
}

/// Zag numbers `|c_{Δ_k}|` for `k = 0..=k_max`.
pub fn zag_numbers(k_max: usize) -> Vec<BigInt> {
    zag_signed(k_max).into_iter().map(|c| c.abs()).collect()
}

/// Maclaurin coefficients of `num/den` up to `x^n` (`den[0] ≠ 0`).
fn series_div(num: &[BigRational], den: &[BigRational], n: usize) -> Vec<BigRational> {
    let mut q = vec![BigRational::zero(); n + 1];
    for k in 0..=n {
        let mut s = num.get(k).cloned().unwrap_or_else(BigRational::zero);
        for j in 1..=k.min(den.len() - 1) {
            s -= &den[j] * &q[k - j];
        }
        q[k] = s / &den[0];
    }
    q
}

fn trig_series(n: usize, sine: bool) -> Vec<BigRational> {
    (0..=n)
        .map(|k| {
            let parity = if sine { 1 } else { 0 };
            if k % 2 != parity {
                return BigRational::zero();
            }
            let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
            BigRational::new(BigInt::from(sign), factorial(k))
        })
        .collect()
}

/// Maclaurin coefficients of `tan x` up to `x^n`, as `sin/cos`.
pub fn tan_series(n: usize) -> Vec<BigRational> {
    series_div(&trig_series(n, true), &trig_series(n, false), n)
}

/// Maclaurin coefficients of `sec x` up to `x^n`, as `1/cos`.
pub fn sec_series(n: usize) -> Vec<BigRational> {
    series_div(&[BigRational::one()], &trig_series(n, false), n)
}

/// Zag numbers read off `tan x = Σ |c_k| x^{2k+1}/(2k+1)!`.
pub fn zag_via_tangent(k_max: usize) -> Vec<BigInt> {
    let t = tan_series(2 * k_max + 1);
    (0..=k_max)
        .map(|k| {
            let v = &t[2 * k + 1] * BigRational::from_integer(factorial(2 * k + 1));
            v.to_integer()
        })
        .collect()
}

/// Bernoulli numbers `B_0..=B_n` (`B_1 = −1/2`) by `Σ_{j≤m} C(m+1, j) B_j = 0`.
pub fn bernoulli(n: usize) -> Vec<BigRational> {
    let mut b = vec![BigRational::one()];
    for m in 1..=n {
        let s: BigRational = (0..m).map(|j| BigRational::from_integer(binomial(m + 1, j)) * &b[j]).sum();
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// Zag numbers from Bernoulli numbers:
/// `|c_{Δ_k}| = 2^{2n}(2^{2n} − 1)|B_{2n}|/(2n)` with `n = k + 1`.
pub fn zag_via_bernoulli(k_max: usize) -> Vec<BigInt> {
    let b = bernoulli(2 * k_max + 2);
    (0..=k_max)
        .map(|k| {
            let n = k + 1;
            let p = BigInt::one() << (2 * n);
            let v = BigRational::from_integer(&p * (&p - 1)) * b[2 * n].abs() / BigRational::from_integer((2 * n).into());
            v.to_integer()
        })
        .collect()
}

/// `y = Σ zag_k x^{2k+1}/(2k+1)!` satisfies `y′ = 1 + y²` through `x^degree`.
pub fn tangent_ode_holds(zag: &[BigInt], degree: usize) -> bool {
    let mut y = vec![BigRational::zero(); degree + 2];
    for (k, z) in zag.iter().enumerate() {
        if 2 * k < degree + 1 {
            y[2 * k + 1] = BigRational::new(z.clone(), factorial(2 * k + 1));
        }
    }
    (0..=degree).all(|n| {
        let lhs = &y[n + 1] * BigRational::from_integer((n + 1).into());
        let mut rhs: BigRational = (0..=n).map(|i| &y[i] * &y[n - i]).sum();
        if n == 0 {
            rhs += BigRational::one();
        }
        lhs == rhs
    })
}

/// Path `Δ_k`: `2k+1` vertices, arrows `i → i+1`.
pub fn delta_graph(k: usize) -> ArrowGraph {
    ArrowGraph::new(2 * k + 1, (0..2 * k).map(|i| (i, i + 1)).collect()).expect("valid")
}

/// Cycle `Λ_k`: `2k` vertices, arrows `i → i+1 mod 2k`.
pub fn lambda_cycle_graph(k: usize) -> ArrowGraph {
    assert!(k >= 1);
    let n = 2 * k;
    ArrowGraph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).expect("valid")
}

/// `(λ_{Δ_k}, λ_{Λ_k}) = ((−1)^k ω^{2k}·2A, (−1)^k ω^{2k}·2)`.
pub fn lambda_closed_forms<C: ComplexCoefficient>(q: &QuadraticForm, k: usize) -> Result<(PhasePolynomial<C>, C)> {
    let w: C = signed_omega_power(q, k)?;
    let a = q.symbol::<C>();
    let two = C::from_i64(2);
    Ok((a.scale(&(w.clone() * two.clone())), w * two))
}

/// `(−ω²)^k`.
fn signed_omega_power<C: ComplexCoefficient>(q: &QuadraticForm, k: usize) -> Result<C> {
    let w2 = -q.omega_squared()?;
    Ok(C::from_rational(&pow_rat(&w2, k)))
}

fn pow_rat(x: &BigRational, k: usize) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, _| acc * x)
}

/// `λ` of both families straight from the contraction (reference values).
pub fn lambda_families_direct<C: ComplexCoefficient>(q: &QuadraticForm, k: usize) -> Result<(PhasePolynomial<C>, C)> {
    let a = q.symbol::<C>();
    let j = QuantizationTensor::moyal(q.dimension());
    let d = crate::lambda_eval::lambda_single(&delta_graph(k), &a, &j)?;
    let l = crate::lambda_eval::lambda_single(&lambda_cycle_graph(k), &a, &j)?;
    Ok((d, l.constant_term()))
}

fn rat<C: ComplexCoefficient>(r: BigRational) -> C {
    C::from_rational(&r)
}

/// `Σ_{k≥1} (−ω²/4)^k` contributions assembled directly from the graph
/// families: `exp[A Σ |c_{Δ_k}| u_k D^{2k+1}/(2k+1)! + Σ |c_{Δ_{k−1}}| u_k D^{2k}/(2k)!]`
/// with `u_k = (iℏω/2)^{2k}`.
pub fn family_sum_jets<C: ComplexCoefficient>(q: &QuadraticForm, order: usize) -> Result<JetSeries<C>> {
    let w2 = q.omega_squared()?;
    let a = q.symbol::<C>();
    let zag = zag_numbers(order / 2 + 1);
    let mut x = JetSeries::zero(1, 1, order)?;
    let quarter = -w2 / BigRational::from_integer(4.into());
    for k in 1..=order / 2 {
        let u = pow_rat(&quarter, k);
        let tan_c = BigRational::new(zag[k].clone(), factorial(2 * k + 1));
        let sec_c = BigRational::new(zag[k - 1].clone(), factorial(2 * k));
        x.add_term(2 * k, vec![(2 * k + 1) as u8], a.scale(&rat::<C>(&u * tan_c)));
        x.add_term(2 * k, vec![(2 * k) as u8], PhasePolynomial::constant(1, rat::<C>(&u * sec_c)));
    }
    x.exp()
}

/// `sec(iℏωD/2)·exp[(2A/(iℏω)) tan(iℏωD/2) − AD]` as jets, with `tan` and
/// `sec` expanded as series quotients of `sin` and `cos`.
pub fn closed_form_jets<C: ComplexCoefficient>(q: &QuadraticForm, order: usize) -> Result<JetSeries<C>> {
    let w2 = q.omega_squared()?;
    let a = q.symbol::<C>();
    let n = order + 1;
    let tan = tan_series(n);
    let sec = sec_series(n);
    let quarter = -w2 / BigRational::from_integer(4.into());
    // (2A/(iℏω)) tan(u) − AD with u = iℏωD/2: A D Σ_{k≥1} tan_{2k+1} u^{2k}.
    let mut x = JetSeries::zero(1, 1, order)?;
    let mut s = JetSeries::zero(1, 1, order)?;
    for k in 0..=order / 2 {
        let u = pow_rat(&quarter, k);
        if k >= 1 {
            x.add_term(2 * k, vec![(2 * k + 1) as u8], a.scale(&rat::<C>(&u * &tan[2 * k + 1])));
        }
        s.add_term(2 * k, vec![(2 * k) as u8], PhasePolynomial::constant(1, rat::<C>(&u * &sec[2 * k])));
    }
    s.mul(&x.exp()?)
}

/// Closed-form symbol of `f(Â)` for a quadratic `A`.
pub fn quadratic_closed_symbol<C: ComplexCoefficient>(
    q: &QuadraticForm,
    f: &FunctionJet<C>,
    order: usize,
) -> Result<Materialized<C>> {
    let jets = closed_form_jets::<C>(q, order)?;
    materialize(&jets, &q.symbol(), f)
}

/// Double series in `t` and `ℏ` (negative ℏ powers allowed) with
/// polynomial coefficients: the cofactor of `e^{−itA/ℏ}` in the symbol of
/// the time evolution operator.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries<C> {
    pub t_order: usize,
    /// `(t power, ℏ power) → coefficient`.
    pub terms: BTreeMap<(usize, i32), PhasePolynomial<C>>,
}

impl<C: ComplexCoefficient> TimeSeries<C> {
    fn one(t_order: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((0, 0), PhasePolynomial::one(1));
        TimeSeries { t_order, terms }
    }

    fn add_term(&mut self, t: usize, h: i32, p: PhasePolynomial<C>) {
        if t > self.t_order || p.is_zero() {
            return;
        }
        let e = self.terms.entry((t, h)).or_insert_with(|| PhasePolynomial::zero(1));
        *e = &*e + &p;
        if e.is_zero() {
            self.terms.remove(&(t, h));
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = TimeSeries { t_order: self.t_order.min(other.t_order), terms: BTreeMap::new() };
        for (&(t1, h1), p1) in &self.terms {
            for (&(t2, h2), p2) in &other.terms {
                out.add_term(t1 + t2, h1 + h2, p1 * p2);
            }
        }
        out
    }
}

/// `sec(tω/2)·exp[(2A/(iℏω))(tan(tω/2) − tω/2)]` through `t^{t_order}`.
pub fn time_evolution_closed<C: ComplexCoefficient>(q: &QuadraticForm, t_order: usize) -> Result<TimeSeries<C>> {
    let w2 = q.omega_squared()?;
    let a = q.symbol::<C>();
    let tan = tan_series(t_order + 1);
    let sec = sec_series(t_order + 1);
    let quarter = w2 / BigRational::from_integer(4.into());
    let minus_i = -C::imaginary_unit();
    let mut secs = TimeSeries { t_order, terms: BTreeMap::new() };
    let mut x = TimeSeries { t_order, terms: BTreeMap::new() };
    for k in 0..=t_order / 2 {
        let u = pow_rat(&quarter, k);
        secs.add_term(2 * k, 0, PhasePolynomial::constant(1, rat::<C>(&u * &sec[2 * k])));
        if k >= 1 {
            // (2/ω)(tω/2)^{2k+1} = (ω²/4)^k t^{2k+1}; 1/i = −i.
            let c: C = rat::<C>(&u * &tan[2 * k + 1]) * minus_i.clone();
            x.add_term(2 * k + 1, -1, a.scale(&c));
        }
    }
    let mut e = TimeSeries::one(t_order);
    let mut power = TimeSeries::one(t_order);
    for n in 1..=t_order {
        power = power.mul(&x);
        let inv = rat::<C>(BigRational::new(1.into(), factorial(n)));
        for ((t, h), p) in &power.terms {
            e.add_term(*t, *h, p.scale(&inv));
        }
    }
    Ok(secs.mul(&e))
}

/// Read the same double series off jets of `f(y) = e^{εy}` with `ε = −it/ℏ`:
/// `ℏ^e Q_{e,v} ε^v ↦ (−i)^v Q_{e,v} t^v ℏ^{e−v}`.
pub fn time_evolution_from_jets<C: ComplexCoefficient>(jets: &JetSeries<C>, t_order: usize) -> Result<TimeSeries<C>> {
    if jets.vars() != 1 || jets.dimension() != 1 {
        return Err(Error::Unsupported("time evolution needs one operator with N = 1".into()));
    }
    let minus_i = -C::imaginary_unit();
    let mut out = TimeSeries { t_order, terms: BTreeMap::new() };
    for ((e, a), p) in jets.terms() {
        let v = a[0] as usize;
        let w = (0..v).fold(C::one(), |acc, _| acc * minus_i.clone());
        out.add_term(v, *e as i32 - v as i32, p.scale(&w));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Coefficient, GaussianRational};

    type G = GaussianRational;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn zag_three_routes() {
        let want = ints(&[1, 2, 16, 272, 7936, 353792]);
        assert_eq!(zag_numbers(5), want);
        assert_eq!(zag_via_tangent(5), want);
        assert_eq!(zag_via_bernoulli(5), want);
        assert!(tangent_ode_holds(&zag_numbers(5), 9));
    }

    #[test]
    fn zag_signs_alternate() {
        assert_eq!(zag_signed(3), ints(&[1, -2, 16, -272]));
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli(6);
        assert_eq!(b[1], BigRational::new((-1).into(), 2.into()));
        assert_eq!(b[2], BigRational::new(1.into(), 6.into()));
        assert_eq!(b[4], BigRational::new((-1).into(), 30.into()));
        assert_eq!(b[6], BigRational::new(1.into(), 42.into()));
    }

    #[test]
    fn closed_forms_match_contraction() {
        let q = QuadraticForm::parse("2,1;1,3").unwrap();
        for k in 1..=3 {
            assert_eq!(lambda_closed_forms::<G>(&q, k).unwrap(), lambda_families_direct::<G>(&q, k).unwrap());
        }
        let (d, l) = lambda_closed_forms::<G>(&QuadraticForm::identity(1), 1).unwrap();
        assert_eq!(d, QuadraticForm::identity(1).symbol::<G>().scale(&G::from_i64(-2)));
        assert_eq!(l, G::from_i64(-2));
    }

    #[test]
    fn degenerate_q() {
        let q = QuadraticForm::parse("1,0;0,0").unwrap();
        assert_eq!(lambda_closed_forms::<G>(&q, 2).unwrap().1, G::from_i64(0));
    }

    #[test]
    fn from_symbol_round_trip() {
        let q = QuadraticForm::parse("2,1;1,3").unwrap();
        assert_eq!(QuadraticForm::from_symbol(&q.symbol::<G>()).unwrap(), q);
        let cubic = &PhasePolynomial::<G>::x(1, 0).pow(3) + &PhasePolynomial::p(1, 0);
        assert!(QuadraticForm::from_symbol(&cubic).is_err());
    }

    #[test]
    fn closed_form_equals_family_sum() {
        let q = QuadraticForm::parse("2,1;1,3").unwrap();
        assert_eq!(closed_form_jets::<G>(&q, 6).unwrap(), family_sum_jets::<G>(&q, 6).unwrap());
    }

    #[test]
    fn zero_form_is_trivial() {
        let q = QuadraticForm::parse("0,0;0,0").unwrap();
        let j = closed_form_jets::<G>(&q, 4).unwrap();
        assert_eq!(j, JetSeries::one(1, 1, 4).unwrap());
    }

    #[test]
    fn closed_form_equals_graph_expansion() {
        use crate::functional_calculus::unlabeled_jets;
        use crate::phase::HbarSeries;
        use crate::star_products::StarConfig;
        for text in ["1,0;0,1", "2,1;1,3"] {
            let q = QuadraticForm::parse(text).unwrap();
            let a = HbarSeries::constant(4, q.symbol::<G>()).unwrap();
            let graph = unlabeled_jets(&a, &StarConfig::moyal(1, 4).unwrap()).unwrap();
            assert_eq!(closed_form_jets::<G>(&q, 4).unwrap(), graph);
        }
    }

    #[test]
    fn time_evolution_matches_jets() {
        let q = QuadraticForm::identity(1);
        let jets = closed_form_jets::<G>(&q, 4).unwrap();
        assert_eq!(time_evolution_closed::<G>(&q, 4).unwrap(), time_evolution_from_jets(&jets, 4).unwrap());
    }
}
