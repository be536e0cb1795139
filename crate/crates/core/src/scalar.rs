//! Exact complex-rational scalars.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact rational number.
///
/// Values whose reduced numerator and denominator fit in an `i64` are
/// stored inline and combined in `i128`; larger ones fall back to
/// [`BigRational`]. The representation is canonical, so derived equality
/// and hashing are mathematical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Rational {
    /// Reduced, denominator positive, both parts in `±i64::MAX`.
    Small(i64, i64),
    Big(Box<BigRational>),
}

fn fits(v: i128) -> bool {
    v.unsigned_abs() <= i64::MAX as u128
}

impl Rational {
    pub fn from_integer(n: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(n))
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_i128(n.into(), 1)
    }

    pub fn new(num: BigInt, den: BigInt) -> Self {
        Self::from_big(BigRational::new(num, den))
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        if den != 1 {
            let (a, b) = (num.unsigned_abs(), den as u128);
            let g = match (u64::try_from(a), u64::try_from(b)) {
                (Ok(a), Ok(b)) => a.gcd(&b) as u128,
                _ => a.gcd(&b),
            };
            if g > 1 {
                num /= g as i128;
                den /= g as i128;
            }
        }
        if fits(num) && fits(den) {
            Rational::Small(num as i64, den as i64)
        } else {
            Rational::Big(Box::new(BigRational::new_raw(num.into(), den.into())))
        }
    }

    fn from_big(q: BigRational) -> Self {
        match (q.numer().to_i64(), q.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => Rational::Small(n, d),
            _ => Rational::Big(Box::new(q)),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new_raw((*n).into(), (*d).into()),
            Rational::Big(q) => (**q).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rational::Small(n, _) => (*n).into(),
            Rational::Big(q) => q.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rational::Small(_, d) => (*d).into(),
            Rational::Big(q) => q.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small(_, d) => *d == 1,
            Rational::Big(q) => q.is_integer(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Rational::Small(n, _) => *n > 0,
            Rational::Big(q) => q.is_positive(),
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Rational::Small(n, d) => Rational::Small(n.abs(), *d),
            Rational::Big(q) => Rational::Big(Box::new(q.abs())),
        }
    }

    /// `1/self`; panics on zero.
    pub fn recip(&self) -> Self {
        match self {
            Rational::Small(n, d) => {
                assert!(*n != 0, "reciprocal of zero");
                Self::from_i128((*d).into(), (*n).into())
            }
            Rational::Big(q) => Self::from_big(q.recip()),
        }
    }
}

impl From<BigRational> for Rational {
    fn from(q: BigRational) -> Self {
        Self::from_big(q)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::Small(0, 1)
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::Small(0, 1)
    }
    fn is_zero(&self) -> bool {
        matches!(self, Rational::Small(0, _))
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::Small(1, 1)
    }
}

macro_rules! rational_op {
    ($trait:ident, $method:ident, $small:expr, $big:expr) => {
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                match (self, rhs) {
                    (Rational::Small(a, b), Rational::Small(c, d)) => {
                        let f: fn(i64, i64, i64, i64) -> Rational = $small;
                        f(*a, *b, *c, *d)
                    }
                    _ => {
                        let f: fn(BigRational, BigRational) -> BigRational = $big;
                        Rational::from_big(f(self.to_big(), rhs.to_big()))
                    }
                }
            }
        }

        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
    };
}

fn small_add(a: i64, b: i64, c: i64, d: i64) -> Rational {
    if b == d {
        if let Some(n) = a.checked_add(c) {
            if b == 1 && n != i64::MIN {
                return Rational::Small(n, 1);
            }
            return Rational::from_i128(n.into(), b.into());
        }
    }
    let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
    Rational::from_i128(a * d + c * b, b * d)
}

fn small_mul(a: i64, b: i64, c: i64, d: i64) -> Rational {
    if b == 1 && d == 1 {
        if let Some(n) = a.checked_mul(c) {
            if n != i64::MIN {
                return Rational::Small(n, 1);
            }
        }
    }
    Rational::from_i128(a as i128 * c as i128, b as i128 * d as i128)
}

rational_op!(Add, add, |a, b, c, d| small_add(a, b, c, d), |x, y| x + y);
rational_op!(Sub, sub, |a, b, c, d| small_add(a, b, -c, d), |x, y| x - y);
rational_op!(Mul, mul, |a, b, c, d| small_mul(a, b, c, d), |x, y| x * y);
rational_op!(
    Div,
    div,
    |a, b, c, d| {
        assert!(c != 0, "division by zero rational");
        Rational::from_i128(a as i128 * d as i128, b as i128 * c as i128)
    },
    |x, y| x / y
);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = &*self - rhs;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self {
            Rational::Small(n, d) => Rational::Small(-n, d),
            Rational::Big(q) => Rational::Big(Box::new(-*q)),
        }
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -self.clone()
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rational::Small(a, b), Rational::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A complex number `re + im*i` with arbitrary-precision rational parts.
///
/// Both parts are kept as reduced fractions, so structural equality is
/// mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ComplexRational {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexRational {
    pub fn new(re: impl Into<Rational>, im: impl Into<Rational>) -> Self {
        Self {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(Rational::from_i64(n), Rational::zero())
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::new(
            Rational::new(BigInt::from(num), BigInt::from(den)),
            Rational::zero(),
        )
    }

    pub fn real(re: impl Into<Rational>) -> Self {
        Self::new(re, Rational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    /// `k * i` for an integer `k`.
    pub fn imag_int(k: i64) -> Self {
        Self::new(Rational::zero(), Rational::from_i64(k))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_imaginary(&self) -> bool {
        self.re.is_zero()
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Self::real(self.re.recip()));
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Self::new(&self.re / &norm, -(&self.im / &norm)))
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let k = Rational::from_i64(k);
        Self::new(&self.re * &k, &self.im * &k)
    }

    /// Multiply by `i^power`.
    pub fn mul_i_pow(&self, power: u32) -> Self {
        match power % 4 {
            0 => self.clone(),
            1 => Self::new(-self.im.clone(), self.re.clone()),
            2 => -self.clone(),
            _ => Self::new(self.im.clone(), -self.re.clone()),
        }
    }
}

impl Zero for ComplexRational {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for ComplexRational {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl Add for &ComplexRational {
    type Output = ComplexRational;
    fn add(self, rhs: &ComplexRational) -> ComplexRational {
        ComplexRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Add for ComplexRational {
    type Output = ComplexRational;
    fn add(self, rhs: ComplexRational) -> ComplexRational {
        &self + &rhs
    }
}

impl AddAssign<&ComplexRational> for ComplexRational {
    fn add_assign(&mut self, rhs: &ComplexRational) {
        self.re += &rhs.re;
        if !rhs.im.is_zero() {
            self.im += &rhs.im;
        }
    }
}

impl SubAssign<&ComplexRational> for ComplexRational {
    fn sub_assign(&mut self, rhs: &ComplexRational) {
        self.re -= &rhs.re;
        if !rhs.im.is_zero() {
            self.im -= &rhs.im;
        }
    }
}

impl Sub for &ComplexRational {
    type Output = ComplexRational;
    fn sub(self, rhs: &ComplexRational) -> ComplexRational {
        ComplexRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Sub for ComplexRational {
    type Output = ComplexRational;
    fn sub(self, rhs: ComplexRational) -> ComplexRational {
        &self - &rhs
    }
}

impl Mul for &ComplexRational {
    type Output = ComplexRational;
    fn mul(self, rhs: &ComplexRational) -> ComplexRational {
        // Most coefficients are purely real or purely imaginary.
        let (ar, ai) = (self.im.is_zero(), self.re.is_zero());
        let (br, bi) = (rhs.im.is_zero(), rhs.re.is_zero());
        match (ar, ai, br, bi) {
            (true, _, true, _) => ComplexRational::real(&self.re * &rhs.re),
            (_, true, _, true) => ComplexRational::real(-(&self.im * &rhs.im)),
            (true, _, _, true) => ComplexRational::new(Rational::zero(), &self.re * &rhs.im),
            (_, true, true, _) => ComplexRational::new(Rational::zero(), &self.im * &rhs.re),
            (true, _, _, _) => ComplexRational::new(&self.re * &rhs.re, &self.re * &rhs.im),
            (_, _, true, _) => ComplexRational::new(&self.re * &rhs.re, &self.im * &rhs.re),
            _ => ComplexRational::new(
                &self.re * &rhs.re - &self.im * &rhs.im,
                &self.re * &rhs.im + &self.im * &rhs.re,
            ),
        }
    }
}

impl Mul for ComplexRational {
    type Output = ComplexRational;
    fn mul(self, rhs: ComplexRational) -> ComplexRational {
        &self * &rhs
    }
}

impl Div for &ComplexRational {
    type Output = ComplexRational;
    fn div(self, rhs: &ComplexRational) -> ComplexRational {
        self * &rhs.inv().expect("division by zero complex rational")
    }
}

impl Neg for ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        ComplexRational::new(-self.re, -self.im)
    }
}

impl Neg for &ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        -self.clone()
    }
}

fn fmt_rational(q: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{q}")
}

impl fmt::Display for ComplexRational {
    /// Canonical form: `a`, `b*i`, `i`, `-i`, or `(a+b*i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one = Rational::one();
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => fmt_rational(&self.re, f),
            (true, false) => {
                if self.im == one {
                    write!(f, "i")
                } else if self.im == -one {
                    write!(f, "-i")
                } else {
                    fmt_rational(&self.im, f)?;
                    write!(f, "*i")
                }
            }
            (false, false) => {
                write!(f, "(")?;
                fmt_rational(&self.re, f)?;
                if self.im.is_positive() {
                    write!(f, "+")?;
                } else {
                    write!(f, "-")?;
                }
                let abs = self.im.abs();
                if abs != one {
                    fmt_rational(&abs, f)?;
                    write!(f, "*")?;
                }
                write!(f, "i)")
            }
        }
    }
}

impl fmt::Debug for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact() {
        let a = ComplexRational::from_frac(1, 3);
        let b = ComplexRational::from_frac(2, 6);
        assert_eq!(a, b);
        let i = ComplexRational::i();
        assert_eq!(&i * &i, ComplexRational::from_int(-1));
        let z = ComplexRational::new(
            BigRational::new(3.into(), 2.into()),
            BigRational::from_integer((-2).into()),
        );
        assert_eq!(&(&z / &z), &ComplexRational::one());
        assert_eq!(z.mul_i_pow(1), &z * &i);
        assert_eq!(z.mul_i_pow(3), &(&z * &i) * &(&i * &i));
    }

    #[test]
    fn small_and_big_rationals_agree() {
        let big = Rational::from_i64(i64::MAX);
        let sq = &big * &big;
        assert!(matches!(sq, Rational::Big(_)));
        let back = &sq / &big;
        assert_eq!(back, big);
        assert!(matches!(back, Rational::Small(..)));
        let third = Rational::new(1.into(), 3.into());
        assert_eq!(&(&third + &third) + &third, Rational::one());
        assert_eq!(Rational::new((-2).into(), (-4).into()), Rational::new(1.into(), 2.into()));
        assert!(Rational::from_i64(-1) < third && third < Rational::from(BigRational::new(1.into(), 2.into())));
        assert_eq!((&sq - &sq), Rational::zero());
        assert_eq!(third.recip().to_string(), "3");
        assert_eq!((-&third).to_string(), "-1/3");
    }

    #[test]
    fn display_forms() {
        assert_eq!(ComplexRational::from_frac(-3, 6).to_string(), "-1/2");
        assert_eq!(ComplexRational::i().to_string(), "i");
        assert_eq!(ComplexRational::imag_int(-1).to_string(), "-i");
        assert_eq!(ComplexRational::imag_int(3).to_string(), "3*i");
        let z = ComplexRational::new(
            BigRational::from_integer(1.into()),
            BigRational::new((-1).into(), 2.into()),
        );
        assert_eq!(z.to_string(), "(1-1/2*i)");
    }
}
