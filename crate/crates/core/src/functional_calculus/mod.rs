//! Symbols of functions of operators, `f(Â)` and `F(Â₁,…,Â_n)`, as sums over
//! graphs with the function kept formal through its derivatives at `A₀`.

mod forms;
mod jets;
mod pointwise;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use forms::{connected_exponent, connected_jets, labeled_jets, multifunction_jets, unlabeled_jets};
pub use jets::{Deriv, JetSeries, JetSeriesJson, JetTermJson};
pub use pointwise::{nota_check, pointwise_jets, resolvent_symbol_check, NotaReport, PointwiseJets, ResolventCheck};

use crate::error::{Error, Result};
use crate::phase::{HbarSeries, PhasePolynomial, ResolventSymbol};
use crate::scalar::{factorial, parse_rational, ComplexCoefficient};
use crate::star_products::StarConfig;

type Series<C> = HbarSeries<PhasePolynomial<C>>;

/// Which graph sum produces the jets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    /// Labeled reduced graphs; any tensor.
    Labeled,
    /// Unlabeled reduced graphs weighted by `c_Γ/S_Γ`; Moyal only.
    Unlabeled,
    /// Exponential of the connected graphs; Moyal only.
    Connected,
}

impl std::str::FromStr for Form {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "labeled" => Ok(Form::Labeled),
            "unlabeled" => Ok(Form::Unlabeled),
            "connected" => Ok(Form::Connected),
            _ => Err(Error::Parse { position: 0, message: format!("unknown form `{s}`") }),
        }
    }
}

/// The function `f` in `f(Â)`.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionJet<C> {
    /// Left formal; only the jets are produced.
    Abstract,
    /// `Σ c_k y^k`, ascending coefficients.
    Polynomial(Vec<C>),
    /// `e^{r y}`; materialized as the cofactor of `e^{r A₀}`.
    Exponential(C),
    /// `1/(a − y)` with `a` formal.
    Resolvent,
    /// `1/(a − y)` at a fixed `a`; usable pointwise only.
    ResolventAt(C),
}

impl<C: ComplexCoefficient> FunctionJet<C> {
    /// `abstract`, `poly:c0,c1,…`, `exp:r`, `resolvent`, `resolvent:a`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: String| Error::Parse { position: 0, message: m };
        let num = |s: &str| {
            parse_rational(s.trim()).map(|r| C::from_rational(&r)).ok_or_else(|| bad(format!("bad number `{s}`")))
        };
        let (head, tail) = match text.split_once(':') {
            Some((h, t)) => (h.trim(), Some(t)),
            None => (text.trim(), None),
        };
        match (head, tail) {
            ("abstract", None) => Ok(FunctionJet::Abstract),
            ("resolvent", None) => Ok(FunctionJet::Resolvent),
            ("resolvent", Some(a)) => Ok(FunctionJet::ResolventAt(num(a)?)),
            ("exp", Some(r)) => Ok(FunctionJet::Exponential(num(r)?)),
            ("poly", Some(cs)) => Ok(FunctionJet::Polynomial(cs.split(',').map(num).collect::<Result<_>>()?)),
            _ => Err(bad(format!("unknown function `{text}`"))),
        }
    }

    /// `f^{(k)}(y)`; for the exponential the factor `e^{ry}` is dropped.
    /// `None` when the function is formal or `y` is a pole.
    pub fn scaled_derivative(&self, k: usize, y: &C) -> Option<C> {
        match self {
            FunctionJet::Abstract | FunctionJet::Resolvent => None,
            FunctionJet::Polynomial(cs) => {
                let d = poly_derivative(cs, k);
                Some(d.iter().rev().fold(C::zero(), |acc, c| acc * y.clone() + c.clone()))
            }
            FunctionJet::Exponential(r) => Some(pow(r, k)),
            FunctionJet::ResolventAt(a) => {
                let d = a.clone() - y.clone();
                let den = pow(&d, k + 1);
                C::from_rational(&BigRational::from_integer(factorial(k))).checked_div(&den)
            }
        }
    }
}

fn pow<C: ComplexCoefficient>(x: &C, k: usize) -> C {
    (0..k).fold(C::one(), |acc, _| acc * x.clone())
}

/// Coefficients of the `k`-th derivative.
fn poly_derivative<C: ComplexCoefficient>(cs: &[C], k: usize) -> Vec<C> {
    cs.iter()
        .enumerate()
        .skip(k)
        .map(|(n, c)| {
            let falling: BigInt = ((n - k + 1)..=n).map(BigInt::from).product();
            c.clone() * C::from_rational(&BigRational::from_integer(falling))
        })
        .collect()
}

/// A jet series with `f` substituted.
#[derive(Clone, Debug, PartialEq)]
pub enum Materialized<C> {
    Polynomial(Series<C>),
    /// `B = e^{r A₀} · cofactor`.
    ExponentialCofactor { rate: C, cofactor: Series<C> },
    Resolvent(HbarSeries<ResolventSymbol<C>>),
}

/// Substitute `f` into jets of a one-operator series built at `base = A₀`.
pub fn materialize<C: ComplexCoefficient>(
    jets: &JetSeries<C>,
    base: &PhasePolynomial<C>,
    f: &FunctionJet<C>,
) -> Result<Materialized<C>> {
    if jets.vars() != 1 {
        return Err(Error::Unsupported("materialize needs a one-operator series".into()));
    }
    let dim = jets.dimension();
    let order = jets.order();
    let zero = PhasePolynomial::zero(dim);
    match f {
        FunctionJet::Abstract | FunctionJet::ResolventAt(_) => Err(Error::FormalFunction("materialize needs a concrete function".into())),
        FunctionJet::Polynomial(cs) => {
            let mut out = vec![zero.clone(); order + 1];
            for ((e, a), q) in jets.terms() {
                let d = base.substitute_into(&poly_derivative(cs, a[0] as usize));
                out[*e] = &out[*e] + &(q * &d);
            }
            Ok(Materialized::Polynomial(HbarSeries::new(order, out, &zero)?))
        }
        FunctionJet::Exponential(r) => {
            let mut out = vec![zero.clone(); order + 1];
            for ((e, a), q) in jets.terms() {
                out[*e] = &out[*e] + &q.scale(&pow(r, a[0] as usize));
            }
            Ok(Materialized::ExponentialCofactor { rate: r.clone(), cofactor: HbarSeries::new(order, out, &zero)? })
        }
        FunctionJet::Resolvent => {
            let rzero = ResolventSymbol::from_polynomial(base, zero, 0);
            let mut out = vec![rzero.clone(); order + 1];
            for ((e, a), q) in jets.terms() {
                let v = a[0] as usize;
                let w = C::from_rational(&BigRational::from_integer(factorial(v)));
                let term = ResolventSymbol::from_polynomial(base, q.scale(&w), v + 1);
                out[*e] = out[*e].checked_add(&term)?;
            }
            Ok(Materialized::Resolvent(HbarSeries::new(order, out, &rzero)?))
        }
    }
}

/// Jets plus the materialized symbol when `f` is concrete.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionSymbol<C> {
    pub jets: JetSeries<C>,
    pub value: Option<Materialized<C>>,
}

/// Symbol of `f(Â)` to `cfg.truncation_order`.
pub fn symbol_of_function<C: ComplexCoefficient>(
    a: &Series<C>,
    f: &FunctionJet<C>,
    form: Form,
    cfg: &StarConfig,
) -> Result<FunctionSymbol<C>> {
    let jets = match form {
        Form::Labeled => labeled_jets(a, cfg)?,
        Form::Unlabeled => unlabeled_jets(a, cfg)?,
        Form::Connected => connected_jets(a, cfg)?,
    };
    let value = match f {
        FunctionJet::Abstract | FunctionJet::ResolventAt(_) => None,
        _ => Some(materialize(&jets, &a.coeff(0), f)?),
    };
    Ok(FunctionSymbol { jets, value })
}

/// Symbol of `F(Â₁,…,Â_n)` for commuting operators, with `F` formal.
pub fn symbol_of_multifunction<C: ComplexCoefficient>(symbols: &[Series<C>], cfg: &StarConfig) -> Result<JetSeries<C>> {
    if symbols.is_empty() {
        return Err(Error::Unsupported("no operators given".into()));
    }
    multifunction_jets(symbols, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Coefficient, GaussianRational};
    use crate::star_products::{moyal, star_fold};

    type G = GaussianRational;
    type P = PhasePolynomial<G>;
    type S = HbarSeries<P>;

    fn x() -> P {
        P::x(1, 0)
    }
    fn p() -> P {
        P::p(1, 0)
    }

    fn series(p: P, order: usize) -> S {
        HbarSeries::constant(order, p).unwrap()
    }

    fn cubic() -> P {
        &(&x().pow(3) + &(&x() * &p().pow(2))) + &p()
    }

    #[test]
    fn parse_functions() {
        assert_eq!(FunctionJet::<G>::parse("abstract").unwrap(), FunctionJet::Abstract);
        assert_eq!(
            FunctionJet::<G>::parse("poly:0,0,1").unwrap(),
            FunctionJet::Polynomial(vec![G::from_i64(0), G::from_i64(0), G::from_i64(1)])
        );
        assert_eq!(FunctionJet::<G>::parse("exp:1/2").unwrap(), FunctionJet::Exponential(G::from_ratio(1, 2)));
        assert!(FunctionJet::<G>::parse("sin").is_err());
    }

    #[test]
    fn forms_agree() {
        let cfg = StarConfig::moyal(1, 4).unwrap();
        let a = series(cubic(), 4);
        let l = labeled_jets(&a, &cfg).unwrap();
        assert_eq!(l, unlabeled_jets(&a, &cfg).unwrap());
        assert_eq!(l, connected_jets(&a, &cfg).unwrap());
        assert!(l.odd_orders_vanish());
    }

    #[test]
    fn second_order_jets() {
        let cfg = StarConfig::moyal(1, 2).unwrap();
        let a = series(cubic(), 2);
        let l = labeled_jets(&a, &cfg).unwrap();
        let j = cfg.tensor.clone();
        let two = crate::graphs::LabeledGraph::new(2, vec![(0, 1), (0, 1)]).unwrap();
        let path = crate::graphs::LabeledGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let l2 = crate::lambda_eval::lambda(&two, &[cubic(), cubic()], &j).unwrap();
        let l3 = crate::lambda_eval::lambda(&path, &[cubic(), cubic(), cubic()], &j).unwrap();
        // c/S: double edge 2/4, path 0→1→2 is −2/2; weight (i/2)²/V!.
        assert_eq!(l.get(2, 2), l2.scale(&G::from_ratio(-1, 16)));
        assert_eq!(l.get(2, 3), l3.scale(&G::from_ratio(1, 24)));
    }

    #[test]
    fn square_matches_star_square() {
        let cfg = StarConfig::moyal(1, 4).unwrap();
        let a = series(cubic(), 4);
        let f = FunctionJet::Polynomial(vec![G::from_i64(0), G::from_i64(0), G::from_i64(1)]);
        let sym = symbol_of_function(&a, &f, Form::Labeled, &cfg).unwrap();
        let Some(Materialized::Polynomial(b)) = sym.value else { panic!() };
        assert_eq!(b, moyal(&a, &a, &cfg).unwrap());
    }

    #[test]
    fn cube_with_hbar_dependent_symbol_standard_order() {
        let cfg = StarConfig::standard(1, 3).unwrap();
        let a1 = &x() * &p();
        let a = HbarSeries::new(3, vec![cubic(), a1], &P::zero(1)).unwrap();
        let f = FunctionJet::Polynomial(vec![G::from_i64(1), G::from_i64(0), G::from_i64(0), G::from_i64(1)]);
        let sym = symbol_of_function(&a, &f, Form::Labeled, &cfg).unwrap();
        let Some(Materialized::Polynomial(b)) = sym.value else { panic!() };
        let cube = star_fold(&[a.clone(), a.clone(), a], &cfg).unwrap();
        let one = HbarSeries::constant(3, P::one(1)).unwrap();
        assert_eq!(b, cube.add(&one).unwrap());
    }

    #[test]
    fn unlabeled_rejects_standard_order() {
        let cfg = StarConfig::standard(1, 2).unwrap();
        assert!(unlabeled_jets(&series(cubic(), 2), &cfg).is_err());
    }

    #[test]
    fn multifunction_product_is_symmetrized() {
        // F(y1,y2) = y1 y2 with commuting A1 = x, A2 = p² is not meaningful
        // (they do not commute), so use A1 = A2 = A: F = y1 y2 gives A⋆A.
        let cfg = StarConfig::moyal(1, 2).unwrap();
        let a = series(cubic(), 2);
        let j = symbol_of_multifunction(&[a.clone(), a.clone()], &cfg).unwrap();
        // ∂₁∂₂F = 1, other second derivatives 0, F(A₀) = A₀².
        let mut b = &a.coeff(0) * &a.coeff(0);
        let mut h2 = P::zero(1);
        for ((e, al), q) in j.terms() {
            match (e, al.as_slice()) {
                (0, [0, 0]) => b = q * &b,
                (2, [1, 1]) => h2 = &h2 + q,
                (2, [1, 0]) | (2, [0, 1]) => h2 = &h2 + &(q * &a.coeff(0)),
                _ => {}
            }
        }
        let expect = moyal(&a, &a, &cfg).unwrap();
        assert_eq!(b, expect.coeff(0));
        assert_eq!(h2, expect.coeff(2));
    }
}
