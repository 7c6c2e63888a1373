//! Numbers of the form `a + b·π` with rational `a`, `b`.
//!
//! Fluxes, holonomies and charge values of U(1) fields carry a factor of π;
//! keeping π symbolic keeps every identity exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::q::Q;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QPi {
    pub rational: Q,
    pub pi: Q,
}

impl QPi {
    pub fn zero() -> QPi {
        QPi { rational: Q::zero(), pi: Q::zero() }
    }

    pub fn rational(q: Q) -> QPi {
        QPi { rational: q, pi: Q::zero() }
    }

    /// `q·π`.
    pub fn pi_times(q: Q) -> QPi {
        QPi { rational: Q::zero(), pi: q }
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.pi.is_zero()
    }

    pub fn scale(&self, s: &Q) -> QPi {
        QPi { rational: &self.rational * s, pi: &self.pi * s }
    }

    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64() + self.pi.to_f64() * std::f64::consts::PI
    }
}

impl Add for &QPi {
    type Output = QPi;
    fn add(self, o: &QPi) -> QPi {
        QPi { rational: &self.rational + &o.rational, pi: &self.pi + &o.pi }
    }
}

impl Add for QPi {
    type Output = QPi;
    fn add(self, o: QPi) -> QPi {
        &self + &o
    }
}

impl Sub for &QPi {
    type Output = QPi;
    fn sub(self, o: &QPi) -> QPi {
        QPi { rational: &self.rational - &o.rational, pi: &self.pi - &o.pi }
    }
}

impl Sub for QPi {
    type Output = QPi;
    fn sub(self, o: QPi) -> QPi {
        &self - &o
    }
}

impl Neg for &QPi {
    type Output = QPi;
    fn neg(self) -> QPi {
        QPi { rational: -&self.rational, pi: -&self.pi }
    }
}

impl Mul<&Q> for &QPi {
    type Output = QPi;
    fn mul(self, s: &Q) -> QPi {
        self.scale(s)
    }
}

impl From<Q> for QPi {
    fn from(q: Q) -> QPi {
        QPi::rational(q)
    }
}

impl fmt::Display for QPi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rational.is_zero(), self.pi.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.rational),
            (true, false) => write!(f, "{}*pi", self.pi),
            (false, false) => {
                if self.pi.signum() < 0 {
                    write!(f, "{}-{}*pi", self.rational, -&self.pi)
                } else {
                    write!(f, "{}+{}*pi", self.rational, self.pi)
                }
            }
        }
    }
}

impl fmt::Debug for QPi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for QPi {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
