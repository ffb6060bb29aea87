//! Exact Gaussian rational scalars.
//!
//! Every computation in this crate is a linear-algebra problem over the
//! subfield Q(i) of the complex numbers. A [`Scalar`] is a pair of exact
//! rationals (real and imaginary part), kept in lowest terms with positive
//! denominators by `num_rational`, so equality is structural.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// An element of Q(i), stored as exact real and imaginary rational parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Scalar {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// True when the imaginary part vanishes.
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Scalar {
        Scalar {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// |z|^2 = re^2 + im^2, an exact non-negative rational.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Scalar {
        let n = self.norm_sq();
        assert!(!n.is_zero(), "division by zero scalar");
        Scalar {
            re: &self.re / &n,
            im: -&self.im / &n,
        }
    }

    fn fmt_rational(r: &BigRational) -> String {
        format!("{}/{}", r.numer(), r.denom())
    }

    /// Canonical text form: `a/b` for real scalars, `a/b+c/d*i` or
    /// `a/b-c/d*i` otherwise. Denominators are always written and positive.
    pub fn to_canonical_string(&self) -> String {
        if self.im.is_zero() {
            Self::fmt_rational(&self.re)
        } else if self.im.is_negative() {
            format!(
                "{}-{}*i",
                Self::fmt_rational(&self.re),
                Self::fmt_rational(&-self.im.clone())
            )
        } else {
            format!(
                "{}+{}*i",
                Self::fmt_rational(&self.re),
                Self::fmt_rational(&self.im)
            )
        }
    }

    fn parse_rational(s: &str) -> Result<BigRational, Error> {
        let bad = || Error::ScalarParse(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let numer = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let denom = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if denom.is_zero() {
                return Err(Error::ScalarParse(format!("zero denominator in `{s}`")));
            }
            Ok(BigRational::new(numer, denom))
        } else {
            let numer = BigInt::from_str(s.trim()).map_err(|_| bad())?;
            Ok(BigRational::from_integer(numer))
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `a/b`, plain integers, and `a/b+c/d*i` / `a/b-c/d*i`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::ScalarParse("empty scalar".into()));
        }
        if let Some(im_part) = s.strip_suffix("*i") {
            // split at the sign separating real and imaginary parts; skip a
            // leading sign on the real part
            let body = im_part;
            let mut split_at = None;
            for (idx, ch) in body.char_indices().skip(1) {
                if (ch == '+' || ch == '-') && !body[..idx].ends_with('/') {
                    split_at = Some((idx, ch));
                }
            }
            let (idx, sign) = split_at.ok_or_else(|| Error::ScalarParse(s.to_string()))?;
            let re = Self::parse_rational(&body[..idx])?;
            let im_mag = Self::parse_rational(&body[idx + 1..])?;
            let im = if sign == '-' { -im_mag } else { im_mag };
            Ok(Scalar { re, im })
        } else {
            Ok(Scalar {
                re: Self::parse_rational(s)?,
                im: BigRational::zero(),
            })
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_canonical_string())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_canonical_string())
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    // division by a nonzero Gaussian rational is multiplication by its inverse
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.inv()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $trait::$method(&self, &rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}
