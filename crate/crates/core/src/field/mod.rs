//! Prime-field arithmetic and length-n vectors over it.
//!
//! Elements carry their modulus so that mixing fields is detected. The
//! operator impls (`+`, `-`, `*`, unary `-`) panic on a modulus mismatch;
//! the `checked_*` methods return [`Error::ParamsMismatch`] instead.
//! Every operation is tallied by the per-thread [`counter`].

pub mod counter;
mod prime;
mod vector;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use crate::error::{Error, Result};

pub use counter::OpCounter;
pub use prime::is_prime;
pub use vector::{FieldVector, NonZeroVector};

/// Largest modulus supported: products are widened to 128 bits and sums must
/// fit in a `u64`.
pub const MAX_MODULUS: u64 = (1 << 63) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldMode {
    /// Requires p >= 4n.
    Standard,
    /// Allows p < 4n; only meant for tiny enumeration instances.
    Relaxed,
}

impl fmt::Display for FieldMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldMode::Standard => "standard",
            FieldMode::Relaxed => "relaxed",
        })
    }
}

/// Prime modulus `p` and vector dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldParams {
    p: u64,
    n: usize,
    mode: FieldMode,
}

impl FieldParams {
    /// Standard-mode parameters; rejects `p < 4n`.
    pub fn new(p: u64, n: usize) -> Result<Self> {
        Self::with_mode(p, n, FieldMode::Standard)
    }

    pub fn relaxed(p: u64, n: usize) -> Result<Self> {
        Self::with_mode(p, n, FieldMode::Relaxed)
    }

    pub fn with_mode(p: u64, n: usize, mode: FieldMode) -> Result<Self> {
        if !(3..=MAX_MODULUS).contains(&p) {
            return Err(Error::ModulusOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let bound = 4 * n as u128;
        if mode == FieldMode::Standard && (p as u128) < bound {
            return Err(Error::FieldTooSmall { p, bound });
        }
        Ok(FieldParams { p, n, mode })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> FieldMode {
        self.mode
    }

    /// Bit length of `p`; the width of one coordinate in the canonical
    /// memory encoding.
    pub fn coord_bits(&self) -> usize {
        64 - self.p.leading_zeros() as usize
    }

    /// Same field at another dimension, keeping the mode.
    pub fn with_dimension(&self, n: usize) -> Result<Self> {
        Self::with_mode(self.p, n, self.mode)
    }

    /// `value mod p`.
    pub fn element(&self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.p,
            p: self.p,
        }
    }

    /// Rejects `value >= p` instead of reducing it.
    pub fn try_element(&self, value: u64) -> Result<FieldElement> {
        if value >= self.p {
            return Err(Error::NotAResidue { value, p: self.p });
        }
        Ok(FieldElement { value, p: self.p })
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    /// Builds a dimension-n vector from residues.
    pub fn vector(&self, values: &[u64]) -> Result<FieldVector> {
        if values.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: values.len(),
            });
        }
        let coords = values
            .iter()
            .map(|&v| self.try_element(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldVector::from_elements(self.p, coords))
    }

    pub fn nonzero_vector(&self, values: &[u64]) -> Result<NonZeroVector> {
        NonZeroVector::try_from(self.vector(values)?)
    }

    pub fn zero_vector(&self) -> FieldVector {
        FieldVector::from_elements(self.p, vec![self.zero(); self.n])
    }

    /// Checks that `v` lives in this field with this dimension.
    pub fn check_vector(&self, v: &FieldVector) -> Result<()> {
        if v.modulus() != self.p {
            return Err(Error::ParamsMismatch(format!(
                "vector modulus {} vs field modulus {}",
                v.modulus(),
                self.p
            )));
        }
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: v.len(),
            });
        }
        Ok(())
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement {
            value: rng.random_range(0..self.p),
            p: self.p,
        }
    }

    /// Uniform on F minus zero, by rejection from the uniform distribution.
    pub fn sample_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        loop {
            let v = rng.random_range(0..self.p);
            if v != 0 {
                return FieldElement { value: v, p: self.p };
            }
        }
    }

    pub fn sample_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldVector {
        let coords = (0..self.n).map(|_| self.sample_uniform(rng)).collect();
        FieldVector::from_elements(self.p, coords)
    }

    pub fn sample_nonzero_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> NonZeroVector {
        let coords = (0..self.n).map(|_| self.sample_nonzero(rng)).collect();
        NonZeroVector::new_unchecked(FieldVector::from_elements(self.p, coords))
    }

    /// Every vector of `F^n`, in lexicographic order. Intended for tiny
    /// enumeration instances only.
    pub fn all_vectors(&self) -> impl Iterator<Item = FieldVector> + use<> {
        self.odometer(0)
    }

    /// Every vector of `(F \ {0})^n`, in lexicographic order.
    pub fn all_nonzero_vectors(&self) -> impl Iterator<Item = NonZeroVector> + use<> {
        self.odometer(1).map(NonZeroVector::new_unchecked)
    }

    fn odometer(&self, low: u64) -> impl Iterator<Item = FieldVector> + use<> {
        let (n, p) = (self.n, self.p);
        let mut digits = Some(vec![low; n]);
        std::iter::from_fn(move || {
            let current = digits.clone()?;
            let next = digits.as_mut().unwrap();
            let mut i = n;
            loop {
                if i == 0 {
                    digits = None;
                    break;
                }
                i -= 1;
                next[i] += 1;
                if next[i] < p {
                    break;
                }
                next[i] = low;
            }
            let coords = current
                .into_iter()
                .map(|value| FieldElement { value, p })
                .collect();
            Some(FieldVector::from_elements(p, coords))
        })
    }
}

impl fmt::Display for FieldParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} n={} mode={}", self.p, self.n, self.mode)
    }
}

/// A residue modulo a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u64,
    p: u64,
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &FieldElement) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ParamsMismatch(format!(
                "moduli {} and {}",
                self.p, other.p
            )));
        }
        Ok(())
    }

    pub fn checked_add(self, rhs: FieldElement) -> Result<FieldElement> {
        self.check(&rhs)?;
        Ok(self.add_raw(rhs))
    }

    pub fn checked_sub(self, rhs: FieldElement) -> Result<FieldElement> {
        self.check(&rhs)?;
        Ok(self.sub_raw(rhs))
    }

    pub fn checked_mul(self, rhs: FieldElement) -> Result<FieldElement> {
        self.check(&rhs)?;
        Ok(self.mul_raw(rhs))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(self) -> Result<FieldElement> {
        if self.value == 0 {
            return Err(Error::InverseOfZero);
        }
        counter::record_inv();
        let value = if self.p < 1 << 62 {
            inv_euclid_i64(self.value, self.p)
        } else {
            inv_euclid_i128(self.value, self.p)
        };
        Ok(FieldElement { value, p: self.p })
    }

    fn add_raw(self, rhs: FieldElement) -> FieldElement {
        counter::record_add();
        // p < 2^63, so the sum cannot overflow.
        let s = self.value + rhs.value;
        FieldElement {
            value: if s >= self.p { s - self.p } else { s },
            p: self.p,
        }
    }

    fn sub_raw(self, rhs: FieldElement) -> FieldElement {
        counter::record_add();
        let value = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.value + self.p - rhs.value
        };
        FieldElement { value, p: self.p }
    }

    fn mul_raw(self, rhs: FieldElement) -> FieldElement {
        counter::record_mul();
        let value = if self.p <= u32::MAX as u64 {
            self.value * rhs.value % self.p
        } else {
            ((self.value as u128 * rhs.value as u128) % self.p as u128) as u64
        };
        FieldElement { value, p: self.p }
    }
}

fn inv_euclid_i64(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    t0.rem_euclid(p as i64) as u64
}

fn inv_euclid_i128(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    t0.rem_euclid(p as i128) as u64
}

macro_rules! binop {
    ($tr:ident, $method:ident, $raw:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;

            fn $method(self, rhs: FieldElement) -> FieldElement {
                assert_eq!(self.p, rhs.p, "field modulus mismatch");
                self.$raw(rhs)
            }
        }
    };
}

binop!(Add, add, add_raw);
binop!(Sub, sub, sub_raw);
binop!(Mul, mul, mul_raw);

impl Neg for FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        FieldElement { value: 0, p: self.p } - self
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
