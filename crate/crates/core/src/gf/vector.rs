use std::fmt;

use serde::{Deserialize, Serialize};

/// Maximum number of coordinates a packed [`Vector`] can hold.
pub const MAX_COORDS: usize = 64;

/// A prime field supported by the packed representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Prime {
    Two,
    Three,
}

impl Prime {
    pub fn from_u32(p: u32) -> Option<Prime> {
        match p {
            2 => Some(Prime::Two),
            3 => Some(Prime::Three),
            _ => None,
        }
    }

    #[inline]
    pub fn value(self) -> u32 {
        match self {
            Prime::Two => 2,
            Prime::Three => 3,
        }
    }

    #[inline]
    pub fn add(self, a: Vector, b: Vector) -> Vector {
        match self {
            Prime::Two => Vector { lo: a.lo ^ b.lo, hi: 0 },
            Prime::Three => add3(a, b),
        }
    }

    #[inline]
    pub fn neg(self, a: Vector) -> Vector {
        match self {
            Prime::Two => a,
            Prime::Three => Vector { lo: a.hi, hi: a.lo },
        }
    }

    #[inline]
    pub fn sub(self, a: Vector, b: Vector) -> Vector {
        self.add(a, self.neg(b))
    }

    /// `c * a` for a scalar `c` in `0..p`.
    #[inline]
    pub fn scale(self, c: u32, a: Vector) -> Vector {
        match c % self.value() {
            0 => Vector::ZERO,
            1 => a,
            _ => self.neg(a),
        }
    }

    /// `a + c * b`.
    #[inline]
    pub fn axpy(self, a: Vector, c: u32, b: Vector) -> Vector {
        match c % self.value() {
            0 => a,
            1 => self.add(a, b),
            _ => self.sub(a, b),
        }
    }

    #[inline]
    pub fn inv_scalar(self, c: u32) -> u32 {
        // every nonzero element of F_2 and F_3 is its own inverse
        debug_assert!(!c.is_multiple_of(self.value()));
        c % self.value()
    }

    pub fn powers(self, e: u32) -> u64 {
        (self.value() as u64).pow(e)
    }
}

#[inline(always)]
pub(crate) fn sub3(a: Vector, b: Vector) -> Vector {
    add3(a, Vector { lo: b.hi, hi: b.lo })
}

// Bitsliced F_3: lo marks entries equal to 1, hi marks entries equal to 2.
#[inline(always)]
pub(crate) fn add3(a: Vector, b: Vector) -> Vector {
    let (al, ah, bl, bh) = (a.lo, a.hi, b.lo, b.hi);
    let a0 = !(al | ah);
    let b0 = !(bl | bh);
    let lo = (al & b0) | (a0 & bl) | (ah & bh);
    let hi = (ah & b0) | (a0 & bh) | (al & bl);
    Vector { lo, hi }
}

/// A vector over F_2 or F_3 of up to 64 coordinates, stored as two bit planes.
///
/// Over F_2 only `lo` is used. Over F_3 coordinate `i` is 1 when bit `i` of
/// `lo` is set and 2 when bit `i` of `hi` is set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Vector {
    pub lo: u64,
    pub hi: u64,
}

impl Vector {
    pub const ZERO: Vector = Vector { lo: 0, hi: 0 };

    #[inline]
    pub fn is_zero(self) -> bool {
        (self.lo | self.hi) == 0
    }

    #[inline]
    pub fn support(self) -> u64 {
        self.lo | self.hi
    }

    #[inline]
    pub fn get(self, i: usize) -> u32 {
        ((self.lo >> i) & 1) as u32 | ((((self.hi >> i) & 1) as u32) << 1)
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: u32) {
        let bit = 1u64 << i;
        self.lo &= !bit;
        self.hi &= !bit;
        match value {
            0 => {}
            1 => self.lo |= bit,
            2 => self.hi |= bit,
            _ => panic!("coordinate value {value} out of range"),
        }
    }

    pub fn with(mut self, i: usize, value: u32) -> Vector {
        self.set(i, value);
        self
    }

    /// Index of the first nonzero coordinate.
    #[inline]
    pub fn leading(self) -> Option<usize> {
        let s = self.support();
        if s == 0 {
            None
        } else {
            Some(s.trailing_zeros() as usize)
        }
    }

    #[inline]
    pub fn shift_down(self, k: usize) -> Vector {
        Vector { lo: self.lo >> k, hi: self.hi >> k }
    }

    #[inline]
    pub fn shift_up(self, k: usize) -> Vector {
        Vector { lo: self.lo << k, hi: self.hi << k }
    }

    #[inline]
    pub fn mask(self, bits: u64) -> Vector {
        Vector { lo: self.lo & bits, hi: self.hi & bits }
    }

    #[inline]
    pub fn or(self, other: Vector) -> Vector {
        Vector { lo: self.lo | other.lo, hi: self.hi | other.hi }
    }

    /// Coordinates `0..len` as digits.
    pub fn digits(self, len: usize) -> Vec<u32> {
        (0..len).map(|i| self.get(i)).collect()
    }

    pub fn from_digits(digits: &[u32]) -> Vector {
        let mut v = Vector::ZERO;
        for (i, &d) in digits.iter().enumerate() {
            v.set(i, d);
        }
        v
    }

    /// Dense integer index of the vector, reading coordinates as base-`p` digits
    /// with coordinate 0 least significant.
    pub fn to_index(self, p: Prime, len: usize) -> u64 {
        let mut idx = 0u64;
        for i in (0..len).rev() {
            idx = idx * p.value() as u64 + self.get(i) as u64;
        }
        idx
    }

    pub fn from_index(p: Prime, len: usize, mut idx: u64) -> Vector {
        let mut v = Vector::ZERO;
        let base = p.value() as u64;
        for i in 0..len {
            v.set(i, (idx % base) as u32);
            idx /= base;
        }
        v
    }

    /// Dot product over F_p.
    pub fn dot(self, p: Prime, other: Vector) -> u32 {
        match p {
            Prime::Two => (self.lo & other.lo).count_ones() & 1,
            Prime::Three => {
                // products equal to 1: (1,1),(2,2); equal to 2: (1,2),(2,1)
                let ones = (self.lo & other.lo) | (self.hi & other.hi);
                let twos = (self.lo & other.hi) | (self.hi & other.lo);
                (ones.count_ones() + 2 * twos.count_ones()) % 3
            }
        }
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let top = 64 - self.support().leading_zeros() as usize;
        let s: String = (0..top.max(1))
            .map(|i| char::from_digit(self.get(i), 10).unwrap())
            .collect();
        write!(f, "Vector({s})")
    }
}

#[inline]
pub fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}
