//! Star products: the binary product `Σ_k (1/k!)(iℏ/2)^k {C,D}_k` for any
//! tensor, and the n-fold product as a sum over labeled graphs.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::graphs::labeled_edge_multisets;
use crate::phase::check_order;
use crate::phase::{bracket_k, contract, HbarSeries, PhasePolynomial, QuantizationTensor, Symbol};
use crate::scalar::{factorial, half_i_pow, ComplexCoefficient};

#[derive(Clone, Debug, PartialEq)]
pub struct StarConfig {
    pub tensor: QuantizationTensor,
    pub truncation_order: usize,
}

impl StarConfig {
    pub fn new(tensor: QuantizationTensor, truncation_order: usize) -> Result<Self> {
        check_order(truncation_order)?;
        Ok(StarConfig { tensor, truncation_order })
    }

    pub fn moyal(dim: usize, truncation_order: usize) -> Result<Self> {
        Self::new(QuantizationTensor::moyal(dim), truncation_order)
    }

    pub fn standard(dim: usize, truncation_order: usize) -> Result<Self> {
        Self::new(QuantizationTensor::standard(dim), truncation_order)
    }
}

/// `(i/2)^k / k!`.
pub fn star_weight<C: ComplexCoefficient>(k: usize) -> C {
    half_i_pow::<C>(k) * C::from_rational(&BigRational::new(BigInt::from(1), factorial(k)))
}

/// `C ⋆ D` with the tensor of `cfg`, truncated at `cfg.truncation_order`.
pub fn moyal<T>(c: &HbarSeries<T>, d: &HbarSeries<T>, cfg: &StarConfig) -> Result<HbarSeries<T>>
where
    T: Symbol,
    T::Coeff: ComplexCoefficient,
{
    cfg.tensor.check_dimension(c.dimension())?;
    cfg.tensor.check_dimension(d.dimension())?;
    let order = cfg.truncation_order.min(c.order()).min(d.order());
    let zero = c.coeff(0).zero_like();
    let mut out = vec![zero.clone(); order + 1];
    for i in 0..=order {
        let ci = c.coeff(i);
        if ci.is_zero() {
            continue;
        }
        for j in 0..=order - i {
            let dj = d.coeff(j);
            if dj.is_zero() {
                continue;
            }
            for k in 0..=order - i - j {
                let b = bracket_k(&ci, &dj, k, &cfg.tensor)?;
                if !b.is_zero() {
                    out[i + j + k] = out[i + j + k].add_ref(&b.scale(&star_weight::<T::Coeff>(k)));
                }
            }
        }
    }
    HbarSeries::new(order, out, &zero)
}

/// Standard-order product: the tensor `[[0, 0], [I, 0]]`.
pub fn star_standard_order<T>(c: &HbarSeries<T>, d: &HbarSeries<T>, truncation_order: usize) -> Result<HbarSeries<T>>
where
    T: Symbol,
    T::Coeff: ComplexCoefficient,
{
    let cfg = StarConfig::standard(c.dimension(), truncation_order)?;
    moyal(c, d, &cfg)
}

/// Left fold `((C₁ ⋆ C₂) ⋆ C₃) ⋯` of the binary product.
pub fn star_fold<C: ComplexCoefficient>(
    factors: &[HbarSeries<PhasePolynomial<C>>],
    cfg: &StarConfig,
) -> Result<HbarSeries<PhasePolynomial<C>>> {
    let dim = cfg.tensor.dimension();
    let mut acc = HbarSeries::constant(cfg.truncation_order, PhasePolynomial::one(dim))?;
    for f in factors {
        acc = moyal(&acc, f, cfg)?;
    }
    Ok(acc)
}

/// `C₁ ⋆ ⋯ ⋆ C_n = Σ_k (1/k!)(iℏ/2)^k Σ_{Γ: n vertices, k labeled edges} λ_Γ(C₁,…,C_n)`.
///
/// For ℏ-graded inputs the sum runs over every choice of grades; a term is
/// kept when edges plus grades stay within the truncation order.
pub fn star_n_fold<C: ComplexCoefficient>(
    factors: &[HbarSeries<PhasePolynomial<C>>],
    cfg: &StarConfig,
) -> Result<HbarSeries<PhasePolynomial<C>>> {
    let dim = cfg.tensor.dimension();
    for f in factors {
        cfg.tensor.check_dimension(f.dimension())?;
    }
    let order = factors.iter().map(|f| f.order()).fold(cfg.truncation_order, usize::min);
    let zero = PhasePolynomial::zero(dim);
    let n = factors.len();
    if n == 0 {
        return HbarSeries::constant(order, PhasePolynomial::one(dim));
    }
    if n == 1 {
        return factors[0].with_order(order);
    }
    let classes: Vec<_> = (0..=order).map(|k| labeled_edge_multisets(n, k)).collect();
    let mut out = vec![zero.clone(); order + 1];
    let mut grades = vec![0usize; n];
    loop {
        let used: usize = grades.iter().sum();
        if used <= order {
            let verts: Vec<PhasePolynomial<C>> = grades.iter().zip(factors).map(|(&g, f)| f.coeff(g)).collect();
            if verts.iter().all(|v| !v.is_zero()) {
                let refs: Vec<&PhasePolynomial<C>> = verts.iter().collect();
                for (k, ks) in classes.iter().enumerate().take(order - used + 1) {
                    let mut sum = zero.clone();
                    for class in ks {
                        let lam = contract(class.graph.edges(), &refs, &cfg.tensor);
                        if !lam.is_zero() {
                            sum = &sum + &lam.scale(&C::from_i64(class.count as i64));
                        }
                    }
                    out[used + k] = &out[used + k] + &sum.scale(&star_weight::<C>(k));
                }
            }
        }
        if !next_grades(&mut grades, order) {
            break;
        }
    }
    HbarSeries::new(order, out, &zero)
}

fn next_grades(g: &mut [usize], max: usize) -> bool {
    for slot in g.iter_mut() {
        if *slot < max {
            *slot += 1;
            return true;
        }
        *slot = 0;
    }
    false
}

/// `ℏ`-independent factor as a series.
pub fn lift<C: ComplexCoefficient>(a: &PhasePolynomial<C>, order: usize) -> Result<HbarSeries<PhasePolynomial<C>>> {
    HbarSeries::constant(order, a.clone())
}

/// Reject anything but an antisymmetric tensor.
pub fn require_antisymmetric(t: &QuantizationTensor) -> Result<()> {
    if !t.is_antisymmetric() {
        return Err(Error::Unsupported("this form needs an antisymmetric (Moyal) tensor".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Coefficient, GaussianRational};

    type P = PhasePolynomial<GaussianRational>;
    type S = HbarSeries<P>;

    fn s(p: P) -> S {
        HbarSeries::constant(4, p).unwrap()
    }

    fn half_i() -> GaussianRational {
        GaussianRational::new(crate::scalar::int(0), crate::scalar::ratio(1, 2))
    }

    #[test]
    fn x_star_p() {
        let cfg = StarConfig::moyal(1, 4).unwrap();
        let xp = moyal(&s(P::x(1, 0)), &s(P::p(1, 0)), &cfg).unwrap();
        assert_eq!(xp.coeff(0), &P::x(1, 0) * &P::p(1, 0));
        assert_eq!(xp.coeff(1), P::constant(1, half_i()));
        assert!(xp.coeffs()[2..].iter().all(|c| c.is_zero()));
        let px = moyal(&s(P::p(1, 0)), &s(P::x(1, 0)), &cfg).unwrap();
        assert_eq!(px.coeff(1), P::constant(1, -half_i()));
    }

    #[test]
    fn unit() {
        let cfg = StarConfig::moyal(1, 4).unwrap();
        let a = &P::x(1, 0).pow(3) + &P::p(1, 0);
        assert_eq!(moyal(&s(a.clone()), &s(P::one(1)), &cfg).unwrap(), s(a));
    }

    #[test]
    fn standard_order_examples() {
        let xp = star_standard_order(&s(P::x(1, 0)), &s(P::p(1, 0)), 4).unwrap();
        assert_eq!(xp, s(&P::x(1, 0) * &P::p(1, 0)));
        let px = star_standard_order(&s(P::p(1, 0)), &s(P::x(1, 0)), 4).unwrap();
        assert_eq!(px.coeff(1), P::constant(1, half_i()));
    }

    #[test]
    fn x_squared_star_p_squared() {
        let cfg = StarConfig::moyal(1, 4).unwrap();
        let r = moyal(&s(P::x(1, 0).pow(2)), &s(P::p(1, 0).pow(2)), &cfg).unwrap();
        // x²p² + 2iℏxp − ℏ²/2
        assert_eq!(r.coeff(2), P::constant(1, GaussianRational::from_ratio(-1, 2)));
    }

    #[test]
    fn three_fold_matches_fold() {
        let cfg = StarConfig::moyal(1, 4).unwrap();
        let a = &(&P::x(1, 0).pow(2) + &(&P::x(1, 0) * &P::p(1, 0))) + &P::p(1, 0).pow(3);
        let f = [s(a.clone()), s(a.clone()), s(a)];
        assert_eq!(star_n_fold(&f, &cfg).unwrap(), star_fold(&f, &cfg).unwrap());
    }
}
