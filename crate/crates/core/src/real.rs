//! Scalar abstraction shared by every numerical routine.
//!
//! Two backends: native `f64` and [`Ext`], a fixed 512-bit binary float.
//! All algorithms are written once against [`Real`] and complex values use
//! `num_complex::Complex<R>`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use dashu_float::round::mode::HalfAway;
use dashu_float::{DBig, FBig};
use num_complex::Complex;
use num_traits::{Num, One, Zero};

pub type Cx<R> = Complex<R>;

/// Working precision selector carried in parameters and documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    Double,
    Extended,
}

impl Precision {
    pub fn name(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::Extended => "ext",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "double" | "f64" => Some(Precision::Double),
            "ext" | "extended" => Some(Precision::Extended),
            _ => None,
        }
    }
}

pub trait Real:
    Clone + fmt::Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    const BITS: u32;
    const PRECISION: Precision;

    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn atan2(&self, x: &Self) -> Self;
    fn pi() -> Self;
    /// Unit roundoff of the backend.
    fn eps() -> Self;
    /// Shortest decimal string that parses back to the same value.
    fn to_decimal(&self) -> String;
    fn parse_decimal(s: &str) -> Option<Self>;

    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 {
            Self::one() / self.clone()
        } else {
            self.clone()
        };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a < b {
            b
        } else {
            a
        }
    }
}

impl Real for f64 {
    const BITS: u32 = 53;
    const PRECISION: Precision = Precision::Double;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn eps() -> Self {
        f64::EPSILON / 2.0
    }
    fn to_decimal(&self) -> String {
        format!("{:e}", self)
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

type Big = FBig<HalfAway, 2>;

/// 512-bit binary floating point value.
///
/// Every constructor pins the precision so that arithmetic between two
/// `Ext` values never silently drops to the precision of a literal.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Ext(Big);

impl Ext {
    pub const BITS: usize = 512;

    fn wrap(x: Big) -> Self {
        Ext(x.with_precision(Self::BITS).value())
    }

    pub fn inner(&self) -> &FBig<HalfAway, 2> {
        &self.0
    }
}

impl fmt::Debug for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ext({:e})", self.to_f64())
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

macro_rules! ext_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Ext {
            type Output = Ext;
            fn $m(self, rhs: Ext) -> Ext {
                Ext(&self.0 $op &rhs.0)
            }
        }
        impl<'a> $tr<&'a Ext> for &'a Ext {
            type Output = Ext;
            fn $m(self, rhs: &'a Ext) -> Ext {
                Ext(&self.0 $op &rhs.0)
            }
        }
    };
}

ext_binop!(Add, add, +);
ext_binop!(Sub, sub, -);
ext_binop!(Mul, mul, *);
ext_binop!(Div, div, /);

impl Rem for Ext {
    type Output = Ext;
    fn rem(self, rhs: Ext) -> Ext {
        let q = (&self.0 / &rhs.0).trunc();
        Ext(&self.0 - &(&q * &rhs.0))
    }
}

impl Neg for Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        Ext(-self.0)
    }
}

impl Zero for Ext {
    fn zero() -> Self {
        Ext::wrap(Big::ZERO)
    }
    fn is_zero(&self) -> bool {
        self.0 == Big::ZERO
    }
}

impl One for Ext {
    fn one() -> Self {
        Ext::wrap(Big::ONE)
    }
}

impl Num for Ext {
    type FromStrRadixErr = String;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, String> {
        if radix != 10 {
            return Err(format!("unsupported radix {radix}"));
        }
        Ext::parse_decimal(s).ok_or_else(|| format!("bad decimal literal {s:?}"))
    }
}

impl Real for Ext {
    const BITS: u32 = 512;
    const PRECISION: Precision = Precision::Extended;

    fn from_f64(x: f64) -> Self {
        Ext::wrap(Big::try_from(x).expect("finite f64"))
    }
    fn from_i64(n: i64) -> Self {
        Ext::wrap(Big::from(n))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
    fn sin(&self) -> Self {
        Ext(self.0.sin())
    }
    fn cos(&self) -> Self {
        Ext(self.0.cos())
    }
    fn sqrt(&self) -> Self {
        Ext(self.0.sqrt())
    }
    fn exp(&self) -> Self {
        Ext(self.0.exp())
    }
    fn ln(&self) -> Self {
        Ext(self.0.ln())
    }
    fn atan2(&self, x: &Self) -> Self {
        Ext(self.0.atan2(&x.0))
    }
    fn pi() -> Self {
        Ext(Big::pi(Self::BITS))
    }
    fn eps() -> Self {
        Ext::from_f64(2.0).powi(-(Self::BITS as i64))
    }
    fn to_decimal(&self) -> String {
        // 512 bits need 156 significant decimal digits to round-trip.
        let d: DBig = self.0.clone().with_base_and_precision::<10>(160).value();
        d.to_string()
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        let d: DBig = s.trim().parse().ok()?;
        Some(Ext(d.with_base_and_precision::<2>(Self::BITS).value()))
    }
}

pub fn cx<R: Real>(re: R, im: R) -> Cx<R> {
    Complex::new(re, im)
}

pub fn cx_f64<R: Real>(z: Complex<f64>) -> Cx<R> {
    Complex::new(R::from_f64(z.re), R::from_f64(z.im))
}

pub fn to_c64<R: Real>(z: &Cx<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

/// e^{iθ}
pub fn cis<R: Real>(theta: &R) -> Cx<R> {
    Complex::new(theta.cos(), theta.sin())
}

pub fn cabs<R: Real>(z: &Cx<R>) -> R {
    (z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()).sqrt()
}

pub fn carg<R: Real>(z: &Cx<R>) -> R {
    z.im.atan2(&z.re)
}

pub fn cscale<R: Real>(z: &Cx<R>, s: &R) -> Cx<R> {
    Complex::new(z.re.clone() * s.clone(), z.im.clone() * s.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_keeps_precision_through_literals() {
        let third = Ext::one() / Ext::from_f64(3.0);
        let back = third.clone() * Ext::from_f64(3.0);
        let err = (back - Ext::one()).abs();
        assert!(err < Ext::from_f64(1e-150));
        assert_eq!(third.inner().precision(), 512);
    }

    #[test]
    fn ext_trig_identity() {
        let x = Ext::from_f64(0.7);
        let s = x.sin();
        let c = x.cos();
        let one = s.clone() * s + c.clone() * c;
        assert!((one - Ext::one()).abs() < Ext::from_f64(1e-150));
        let pi = Ext::pi();
        assert!((pi.to_f64() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn ext_atan2_quadrants() {
        let y = Ext::from_f64(1.0);
        let x = Ext::from_f64(-1.0);
        let a = y.atan2(&x).to_f64();
        assert!((a - 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let a = (-y).atan2(&x).to_f64();
        assert!((a + 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn decimal_round_trip() {
        let x = Ext::pi() / Ext::from_f64(7.0);
        let s = x.to_decimal();
        let y = Ext::parse_decimal(&s).unwrap();
        assert!((x - y).abs() < Ext::from_f64(1e-152));
        let f = 0.1f64 + 0.2;
        assert_eq!(f64::parse_decimal(&f.to_decimal()), Some(f));
    }

    #[test]
    fn powi_negative() {
        assert_eq!(2.0f64.powi(-3), <f64 as Real>::powi(&2.0, -3));
        assert!((Real::powi(&Ext::from_f64(2.0), -3).to_f64() - 0.125).abs() < 1e-18);
    }
}
