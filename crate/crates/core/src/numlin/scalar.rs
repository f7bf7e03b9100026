use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A Gaussian rational `re + i·im` with arbitrary-precision parts.
///
/// `BigRational` keeps every fraction reduced with a positive denominator, so
/// two equal scalars always compare equal structurally.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactScalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }

    pub fn from_gaussian_int(re: i64, im: i64) -> Self {
        Self::new(
            BigRational::from_integer(BigInt::from(re)),
            BigRational::from_integer(BigInt::from(im)),
        )
    }

    /// `num / den` as a real scalar. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn half() -> Self {
        Self::ratio(1, 2)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|²`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        Self::new(&self.re * &k, &self.im * &k)
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    /// `|z|` rounded to `f64`.
    pub fn abs_f64(&self) -> f64 {
        self.to_complex64().norm()
    }

    /// Entry rendering used by the pretty printer: `0`, `-1`, `1/2`, `i`,
    /// `-i/2`, `1+i`, `1/2-3/2i`.
    pub fn render(&self) -> String {
        if self.im.is_zero() {
            return render_rational(&self.re);
        }
        let im_part = render_imag(&self.im);
        if self.re.is_zero() {
            return im_part;
        }
        let re = render_rational(&self.re);
        if im_part.starts_with('-') {
            format!("{re}{im_part}")
        } else {
            format!("{re}+{im_part}")
        }
    }
}

fn render_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn render_imag(q: &BigRational) -> String {
    let sign = if q.is_negative() { "-" } else { "" };
    let a = q.abs();
    if a.is_one() {
        format!("{sign}i")
    } else if a.is_integer() {
        format!("{sign}{}i", a.numer())
    } else if a.numer().is_one() {
        format!("{sign}i/{}", a.denom())
    } else {
        format!("{sign}{}i/{}", a.numer(), a.denom())
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_i64(), q.denom().to_i64()) {
        // exact for |n|, d < 2^53
        return n as f64 / d as f64;
    }
    q.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl From<i64> for ExactScalar {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl<'a> Add<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: ExactScalar) -> ExactScalar {
        ExactScalar::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, rhs: &ExactScalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl<'a> Sub<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Sub for ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: ExactScalar) -> ExactScalar {
        ExactScalar::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl<'a> Mul<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        // fast paths for the purely real entries that dominate grid matrices
        if self.im.is_zero() && rhs.im.is_zero() {
            return ExactScalar::new(&self.re * &rhs.re, BigRational::zero());
        }
        ExactScalar::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Mul for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: ExactScalar) -> ExactScalar {
        &self * &rhs
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl<'a> Div<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn div(self, rhs: &ExactScalar) -> ExactScalar {
        let inv = rhs.inv().expect("division by zero scalar");
        self * &inv
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-self.re, -self.im)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-self.re.clone(), -self.im.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops_are_exact() {
        let a = ExactScalar::from_gaussian_int(1, 2);
        let b = ExactScalar::ratio(1, 3);
        let c = &(&a * &b) / &b;
        assert_eq!(c, a);
        let inv = a.inv().unwrap();
        assert_eq!(&a * &inv, ExactScalar::one());
        assert_eq!(&ExactScalar::i() * &ExactScalar::i(), ExactScalar::from_int(-1));
    }

    #[test]
    fn fractions_stay_reduced() {
        let a = ExactScalar::ratio(2, 4);
        assert_eq!(a, ExactScalar::half());
        assert_eq!(a.re.denom(), &BigInt::from(2));
        let neg = ExactScalar::ratio(1, -2);
        assert!(neg.re.denom().is_positive());
    }

    #[test]
    fn conj_and_norm() {
        let a = ExactScalar::from_gaussian_int(3, -4);
        assert_eq!(a.conj(), ExactScalar::from_gaussian_int(3, 4));
        assert_eq!(a.norm_sqr(), BigRational::from_integer(BigInt::from(25)));
        assert!((a.abs_f64() - 5.0).abs() < 1e-15);
        assert!(ExactScalar::zero().inv().is_none());
    }

    #[test]
    fn rendering() {
        assert_eq!(ExactScalar::from_int(-1).render(), "-1");
        assert_eq!(ExactScalar::half().render(), "1/2");
        assert_eq!(ExactScalar::i().render(), "i");
        assert_eq!((-ExactScalar::i()).render(), "-i");
        assert_eq!(
            (&ExactScalar::i() * &ExactScalar::ratio(-1, 2)).render(),
            "-i/2"
        );
        assert_eq!(ExactScalar::from_gaussian_int(1, 1).render(), "1+i");
        assert_eq!(ExactScalar::from_gaussian_int(2, -3).render(), "2-3i");
    }
}
