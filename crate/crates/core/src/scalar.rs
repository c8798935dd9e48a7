//! Scalar abstractions.
//!
//! Exact symbolic code is generic over [`Coefficient`] (rationals and
//! Gaussian rationals); numerical code (quadrature, root finding, the
//! finite-difference eigenvalue oracle) is generic over [`Real`].

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Exact Gaussian rational `re + i·im`.
pub type GaussianRational = Complex<BigRational>;

/// Exact ring of coefficients for phase-space polynomials.
pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_rational(r: &BigRational) -> Self;

    /// Exact division; `None` when `other` is zero.
    fn checked_div(&self, other: &Self) -> Option<Self>;

    /// `(re, im)` approximations.
    fn to_f64_parts(&self) -> (f64, f64);

    /// Real part when the value is real, `None` otherwise.
    fn as_real(&self) -> Option<BigRational>;

    /// Exact `(re, im)`.
    fn exact_parts(&self) -> (BigRational, BigRational);

    /// Inverse of [`Coefficient::exact_parts`]; `None` if the ring cannot hold `im`.
    fn from_parts(re: BigRational, im: BigRational) -> Option<Self>;

    /// Text form used in polynomial printing: `3/2`, `-i`, `(1/2+3*i)`.
    fn to_text(&self) -> String {
        let (re, im) = self.exact_parts();
        match (re.is_zero(), im.is_zero()) {
            (_, true) => format_rational(&re),
            (true, false) => imaginary_text(&im),
            (false, false) => {
                let im_txt = imaginary_text(&im);
                if im_txt.starts_with('-') {
                    format!("({}{})", format_rational(&re), im_txt)
                } else {
                    format!("({}+{})", format_rational(&re), im_txt)
                }
            }
        }
    }

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
}

/// Coefficient rings containing the imaginary unit, needed by star products.
pub trait ComplexCoefficient: Coefficient {
    fn imaginary_unit() -> Self;
    fn conj(&self) -> Self;
    fn real_part(&self) -> BigRational;
    fn imag_part(&self) -> BigRational;
}

impl Coefficient for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn checked_div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            None
        } else {
            Some(self / other)
        }
    }

    fn to_f64_parts(&self) -> (f64, f64) {
        (rational_to_f64(self), 0.0)
    }

    fn as_real(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn exact_parts(&self) -> (BigRational, BigRational) {
        (self.clone(), BigRational::zero())
    }

    fn from_parts(re: BigRational, im: BigRational) -> Option<Self> {
        im.is_zero().then_some(re)
    }
}

impl Coefficient for GaussianRational {
    fn from_rational(r: &BigRational) -> Self {
        Complex::new(r.clone(), BigRational::zero())
    }

    fn checked_div(&self, other: &Self) -> Option<Self> {
        let norm = other.norm_sqr();
        if norm.is_zero() {
            return None;
        }
        let num = self * other.conj();
        Some(Complex::new(num.re / &norm, num.im / norm))
    }

    fn to_f64_parts(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn as_real(&self) -> Option<BigRational> {
        if self.im.is_zero() {
            Some(self.re.clone())
        } else {
            None
        }
    }

    fn exact_parts(&self) -> (BigRational, BigRational) {
        (self.re.clone(), self.im.clone())
    }

    fn from_parts(re: BigRational, im: BigRational) -> Option<Self> {
        Some(Complex::new(re, im))
    }
}

impl ComplexCoefficient for GaussianRational {
    fn imaginary_unit() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn real_part(&self) -> BigRational {
        self.re.clone()
    }

    fn imag_part(&self) -> BigRational {
        self.im.clone()
    }
}

/// Floating-point scalar for the numerical modules.
pub trait Real: num_traits::Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn pi() -> Self {
        Self::lit(std::f64::consts::PI)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `a/b` as a big rational.
pub fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

pub fn int(a: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(a))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Scale huge numerators/denominators down before converting.
    let n = r.numer().bits() as i64;
    let d = r.denom().bits() as i64;
    let shift = (n.max(d) - 1000).max(0) as usize;
    let num = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let den = (r.denom() >> shift).to_f64().unwrap_or(1.0);
    num / den
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Exact rational printed as `a` or `a/b` (used at every CLI boundary).
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn imaginary_text(im: &BigRational) -> String {
    if im.is_one() {
        "i".to_string()
    } else if (-im).is_one() {
        "-i".to_string()
    } else {
        format!("{}*i", format_rational(im))
    }
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}

/// Exact `i^k`.
pub fn i_pow<C: ComplexCoefficient>(k: usize) -> C {
    match k % 4 {
        0 => C::one(),
        1 => C::imaginary_unit(),
        2 => -C::one(),
        _ => -C::imaginary_unit(),
    }
}

/// `(i/2)^k` exactly.
pub fn half_i_pow<C: ComplexCoefficient>(k: usize) -> C {
    let two_k = BigRational::from_integer(BigInt::one() << k);
    i_pow::<C>(k) * C::from_rational(&(BigRational::one() / two_k))
}

pub fn abs_rational(r: &BigRational) -> BigRational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_division_is_exact() {
        let a = Complex::new(ratio(1, 2), ratio(3, 4));
        let b = Complex::new(ratio(-2, 3), ratio(5, 7));
        let q = a.checked_div(&b).unwrap();
        assert_eq!(q * b, a);
        assert!(a.checked_div(&GaussianRational::zero()).is_none());
    }

    #[test]
    fn half_i_powers() {
        let q: GaussianRational = half_i_pow(2);
        assert_eq!(q, GaussianRational::from_ratio(-1, 4));
        let q: GaussianRational = half_i_pow(4);
        assert_eq!(q, GaussianRational::from_ratio(1, 16));
    }

    #[test]
    fn rational_formatting() {
        assert_eq!(format_rational(&ratio(272, 1)), "272");
        assert_eq!(format_rational(&ratio(-1, 8)), "-1/8");
        assert_eq!(parse_rational("-3/6"), Some(ratio(-1, 2)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
