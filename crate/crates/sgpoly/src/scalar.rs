//! Number backends.
//!
//! Everything numeric in the crate is generic over [`Scalar`], which has three
//! implementations: [`BigRational`] (exact, the type used at API boundaries),
//! [`RBig`] (exact, with much faster gcd on large operands; preferred for
//! heavy exact work) and [`Float`] (binary floating point with a per-value
//! significand length). Constants are created "like"
//! an existing value so that the float precision propagates without a global
//! context.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::{Context, FBig};
use dashu_int::{IBig, UBig};
pub use dashu_ratio::RBig;
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Default significand length of the float backend, in bits.
pub const DEFAULT_PRECISION: usize = 256;

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    /// True for the exact rational backend.
    const EXACT: bool;

    /// Converts an exact rational into this backend, at `self`'s precision.
    fn lift(&self, q: &BigRational) -> Self;

    fn int(&self, n: i64) -> Self {
        self.lift(&BigRational::from_integer(BigInt::from(n)))
    }

    fn ratio(&self, p: i64, q: i64) -> Self {
        self.lift(&BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    fn zero_like(&self) -> Self {
        self.int(0)
    }

    fn one_like(&self) -> Self {
        self.int(1)
    }

    fn is_zero(&self) -> bool;

    fn abs(&self) -> Self;

    /// Whether `self` is indistinguishable from zero relative to `scale`.
    ///
    /// Exact values are negligible only when they are zero; floats when
    /// `|self| <= 2^(-precision/2) * |scale|`.
    fn negligible(&self, scale: &Self) -> bool;

    /// `2^-(precision - lost_bits)` for floats, zero for exact values.
    fn rel_eps(&self, lost_bits: usize) -> Self;

    fn max_of(self, other: Self) -> Self {
        if other > self { other } else { self }
    }

    fn to_f64(&self) -> f64;

    /// CSV rendering: `p/q` for rationals, shortest round-trip decimal for floats.
    fn render(&self) -> String;

    fn powi(&self, n: u32) -> Self {
        let mut acc = self.one_like();
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }

    fn signum_i32(&self) -> i32 {
        match self.partial_cmp(&self.zero_like()) {
            Some(Ordering::Greater) => 1,
            Some(Ordering::Less) => -1,
            _ => 0,
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn lift(&self, q: &BigRational) -> Self {
        q.clone()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn negligible(&self, _scale: &Self) -> bool {
        Zero::is_zero(self)
    }

    fn rel_eps(&self, _lost_bits: usize) -> Self {
        BigRational::zero()
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl Scalar for RBig {
    const EXACT: bool = true;

    fn lift(&self, q: &BigRational) -> Self {
        to_rbig(q)
    }

    fn int(&self, n: i64) -> Self {
        RBig::from(n)
    }

    fn is_zero(&self) -> bool {
        *self == RBig::ZERO
    }

    fn abs(&self) -> Self {
        if *self < RBig::ZERO { -self.clone() } else { self.clone() }
    }

    fn negligible(&self, _scale: &Self) -> bool {
        Scalar::is_zero(self)
    }

    fn rel_eps(&self, _lost_bits: usize) -> Self {
        RBig::ZERO
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(&from_rbig(self))
    }

    fn render(&self) -> String {
        from_rbig(self).to_string()
    }
}

pub fn to_rbig(q: &BigRational) -> RBig {
    let den = UBig::from_le_bytes(&q.denom().to_bytes_le().1);
    RBig::from_parts(to_ibig(q.numer()), den)
}

pub fn from_rbig(q: &RBig) -> BigRational {
    let num = q.numerator();
    let neg = *num < IBig::ZERO;
    let mag = UBig::try_from(if neg { -num.clone() } else { num.clone() }).expect("nonnegative");
    let n = BigInt::from_bytes_le(if neg { Sign::Minus } else { Sign::Plus }, &mag.to_le_bytes());
    let d = BigInt::from_bytes_le(Sign::Plus, &q.denominator().to_le_bytes());
    // already in lowest terms with a positive denominator
    BigRational::new_raw(n, d)
}

/// Converts a rational to the nearest `f64` without overflowing on large
/// numerators and denominators.
pub fn ratio_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let f = Float::from_rational(q, 80);
    f.to_f64()
}

type Repr = FBig<HalfEven, 2>;

/// Binary floating point number carrying its own significand length.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Float(Repr);

fn to_ibig(n: &BigInt) -> IBig {
    let (sign, bytes) = n.to_bytes_le();
    let mag = IBig::from(dashu_int::UBig::from_le_bytes(&bytes));
    if sign == Sign::Minus { -mag } else { mag }
}

impl Float {
    /// The value `q` correctly rounded to `precision` bits.
    pub fn from_rational(q: &BigRational, precision: usize) -> Self {
        let num = Repr::from(to_ibig(q.numer()));
        let den = Repr::from(to_ibig(q.denom()));
        let ctx = Context::<HalfEven>::new(precision);
        // division by a positive integer never fails
        let v = ctx.div(num.repr(), den.repr()).map(|r| r.value()).unwrap_or(Repr::ZERO);
        Float(v.with_precision(precision).value())
    }

    pub fn from_i64(n: i64, precision: usize) -> Self {
        Float(Repr::from(n).with_precision(precision).value())
    }

    /// Rounds an `f64` to `precision` bits (exact when `precision >= 53`).
    pub fn from_f64(x: f64, precision: usize) -> Self {
        let v = Repr::try_from(x).unwrap_or(Repr::ZERO);
        Float(v.with_precision(precision).value())
    }

    pub fn precision(&self) -> usize {
        self.0.precision()
    }

    /// `2^exp` at this value's precision.
    pub fn pow2_like(&self, exp: isize) -> Self {
        Float(Repr::from_parts(IBig::ONE, exp).with_precision(self.precision()).value())
    }

    pub fn sqrt(&self) -> Self {
        Float(self.0.sqrt())
    }

    fn to_decimal(&self, digits: usize) -> FBig<HalfEven, 10> {
        self.0.clone().with_base_and_precision::<10>(digits).value()
    }
}

impl fmt::Display for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

macro_rules! float_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Float {
            type Output = Float;
            fn $m(self, rhs: Float) -> Float {
                Float(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a Float> for Float {
            type Output = Float;
            fn $m(self, rhs: &'a Float) -> Float {
                Float(self.0 $op &rhs.0)
            }
        }
    };
}

float_binop!(Add, add, +);
float_binop!(Sub, sub, -);
float_binop!(Mul, mul, *);
float_binop!(Div, div, /);

impl Neg for Float {
    type Output = Float;
    fn neg(self) -> Float {
        Float(-self.0)
    }
}

impl Scalar for Float {
    const EXACT: bool = false;

    fn lift(&self, q: &BigRational) -> Self {
        Float::from_rational(q, self.precision())
    }

    fn int(&self, n: i64) -> Self {
        Float::from_i64(n, self.precision())
    }

    fn is_zero(&self) -> bool {
        self.0 == Repr::ZERO
    }

    fn abs(&self) -> Self {
        if self.0 < Repr::ZERO { Float(-self.0.clone()) } else { self.clone() }
    }

    fn negligible(&self, scale: &Self) -> bool {
        let tol = scale.abs() * self.pow2_like(-((self.precision() / 2) as isize));
        self.abs() <= tol
    }

    fn rel_eps(&self, lost_bits: usize) -> Self {
        let bits = self.precision().saturating_sub(lost_bits).max(1);
        self.pow2_like(-(bits as isize))
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        // bisect on the digit count; the upper end always round-trips
        let p = self.precision();
        let mut hi = (p as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
        let mut lo = 1;
        let roundtrips = |n: usize| {
            self.to_decimal(n).with_base_and_precision::<2>(p).value() == self.0
        };
        while lo < hi {
            let mid = (lo + hi) / 2;
            if roundtrips(mid) { hi = mid } else { lo = mid + 1 }
        }
        format!("{:e}", self.to_decimal(hi))
    }
}

/// Exact-or-float selector used by callers that build scalars from rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float { precision: usize },
}

impl Default for Backend {
    fn default() -> Self {
        Backend::Float { precision: DEFAULT_PRECISION }
    }
}

/// Helper for sums over iterators of owned scalars with a known zero.
pub fn sum<S: Scalar>(zero: &S, it: impl IntoIterator<Item = S>) -> S {
    it.into_iter().fold(zero.clone(), |a, b| a + b)
}

pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rounds_thirds() {
        let third = Float::from_rational(&rational(1, 3), 256);
        let back = third.clone() * Float::from_i64(3, 256);
        let err = (back - Float::from_i64(1, 256)).abs();
        assert!(err.negligible(&Float::from_i64(1, 256)));
        assert_eq!(third.precision(), 256);
    }

    #[test]
    fn render_shortest() {
        let x = Float::from_rational(&rational(1, 4), 256);
        assert_eq!(x.render(), "2.5e-1");
        let y = Float::from_rational(&rational(1, 3), 64);
        assert!(y.render().starts_with("3.33333333333333333"));
        assert_eq!(rational(-3, 6).render(), "-1/2");
    }

    #[test]
    fn rbig_round_trips() {
        for q in [rational(-3, 6), rational(0, 1), rational(7, 1), BigRational::new(BigInt::from(10).pow(80u32) + 1, BigInt::from(3).pow(90u32))] {
            let f = to_rbig(&q);
            assert_eq!(from_rbig(&f), q);
            assert_eq!(f.render(), q.render());
        }
        let x = to_rbig(&rational(2, 3));
        assert_eq!(x.clone() * x.int(3) / &x.ratio(4, 3), x.ratio(3, 2));
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = BigInt::from(10).pow(400u32);
        let q = BigRational::new(big.clone() * BigInt::from(3), big);
        assert!((ratio_to_f64(&q) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn negligible_is_relative() {
        let one = Float::from_i64(1, 128);
        assert!(one.pow2_like(-70).negligible(&one));
        assert!(!one.pow2_like(-60).negligible(&one));
    }
}
