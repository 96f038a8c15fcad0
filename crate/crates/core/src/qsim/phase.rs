use std::fmt;
use std::ops::{Mul, MulAssign, Neg};

use num_complex::Complex64;

/// The scalar `i^t` for `t` in `0..4`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct PhasePower(u8);

impl PhasePower {
    pub const ONE: Self = Self(0);
    pub const I: Self = Self(1);
    pub const MINUS_ONE: Self = Self(2);
    pub const MINUS_I: Self = Self(3);

    pub fn new(t: i64) -> Self {
        Self(t.rem_euclid(4) as u8)
    }

    /// `(-1)^k`.
    pub fn sign(k: usize) -> Self {
        Self::new(2 * (k % 2) as i64)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn conj(self) -> Self {
        Self::new(-(self.0 as i64))
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl Mul for PhasePower {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Self((self.0 + rhs.0) % 4)
    }
}

impl MulAssign for PhasePower {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Neg for PhasePower {
    type Output = Self;

    fn neg(self) -> Self {
        self * Self::MINUS_ONE
    }
}

impl fmt::Display for PhasePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
