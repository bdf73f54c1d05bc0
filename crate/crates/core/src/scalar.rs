//! Numeric scalars for the interval module.
//!
//! Boundary logic (open versus closed endpoints, points such as `0`) is only
//! trustworthy with exact arithmetic. Floats are supported for quick
//! exploration but can misclassify endpoints after rounding.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num::traits::{Num, Signed};
use num::{BigRational, Rational64};

use crate::error::{Error, Result};

pub trait Scalar: Clone + PartialOrd + Debug + Display + Num + Signed + Send + Sync + 'static {
    /// Parses `"p/q"`, `"p"` or (for floats) decimal text.
    fn parse_scalar(text: &str) -> Result<Self>;

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn from_i64(v: i64) -> Self;

    fn midpoint(a: &Self, b: &Self) -> Self {
        (a.clone() + b.clone()) / (Self::one() + Self::one())
    }
}

fn parse_error(text: &str) -> Error {
    Error::Format(format!("`{text}` is not a number"))
}

impl Scalar for BigRational {
    fn parse_scalar(text: &str) -> Result<Self> {
        BigRational::from_str(text.trim()).map_err(|_| parse_error(text))
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
}

impl Scalar for Rational64 {
    fn parse_scalar(text: &str) -> Result<Self> {
        Rational64::from_str(text.trim()).map_err(|_| parse_error(text))
    }

    fn from_i64(v: i64) -> Self {
        Rational64::from_integer(v)
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn parse_scalar(text: &str) -> Result<Self> {
                let text = text.trim();
                if let Some((p, q)) = text.split_once('/') {
                    let p: $t = p.trim().parse().map_err(|_| parse_error(text))?;
                    let q: $t = q.trim().parse().map_err(|_| parse_error(text))?;
                    return Ok(p / q);
                }
                text.parse().map_err(|_| parse_error(text))
            }

            fn from_i64(v: i64) -> Self {
                v as $t
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);
