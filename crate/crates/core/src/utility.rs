//! Utility values: exact rationals for the rational payoff families, floats
//! for the publishing family.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Utility {
    Exact(Rational64),
    Real(f64),
}

impl Utility {
    pub fn zero() -> Self {
        Utility::Exact(Rational64::zero())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Utility::Exact(_))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Utility::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Utility::Real(x) => x,
        }
    }

    pub fn as_exact(self) -> Option<Rational64> {
        match self {
            Utility::Exact(r) => Some(r),
            Utility::Real(_) => None,
        }
    }

    /// Multiply by a non-negative rational (used for switching costs).
    pub fn scale(self, k: Rational64) -> Self {
        match self {
            Utility::Exact(r) => Utility::Exact(r * k),
            Utility::Real(x) => Utility::Real(x * k.to_f64().unwrap_or(f64::NAN)),
        }
    }

    /// Compare with `other`. Exact pairs compare exactly; otherwise values
    /// within `tol` of each other are equal.
    pub fn compare(self, other: Utility, tol: f64) -> Ordering {
        match (self, other) {
            (Utility::Exact(a), Utility::Exact(b)) => a.cmp(&b),
            _ => {
                let d = self.to_f64() - other.to_f64();
                if d > tol {
                    Ordering::Greater
                } else if d < -tol {
                    Ordering::Less
                } else {
                    Ordering::Equal
                }
            }
        }
    }

    pub fn gt(self, other: Utility, tol: f64) -> bool {
        self.compare(other, tol) == Ordering::Greater
    }

    pub fn lt(self, other: Utility, tol: f64) -> bool {
        self.compare(other, tol) == Ordering::Less
    }
}

impl Add for Utility {
    type Output = Utility;
    fn add(self, rhs: Utility) -> Utility {
        match (self, rhs) {
            (Utility::Exact(a), Utility::Exact(b)) => Utility::Exact(a + b),
            _ => Utility::Real(self.to_f64() + rhs.to_f64()),
        }
    }
}

impl Sub for Utility {
    type Output = Utility;
    fn sub(self, rhs: Utility) -> Utility {
        match (self, rhs) {
            (Utility::Exact(a), Utility::Exact(b)) => Utility::Exact(a - b),
            _ => Utility::Real(self.to_f64() - rhs.to_f64()),
        }
    }
}

impl fmt::Display for Utility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Utility::Exact(r) => write!(f, "{r}"),
            Utility::Real(x) => write!(f, "{x}"),
        }
    }
}
