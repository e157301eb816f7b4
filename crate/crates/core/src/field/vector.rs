use std::fmt;
use std::ops::Deref;

use super::FieldElement;
use crate::error::{Error, Result};

/// A vector of field elements sharing one modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldVector {
    p: u64,
    coords: Vec<FieldElement>,
}

impl FieldVector {
    pub(crate) fn from_elements(p: u64, coords: Vec<FieldElement>) -> Self {
        debug_assert!(coords.iter().all(|c| c.modulus() == p));
        FieldVector { p, coords }
    }

    /// Collects elements into a vector; rejects mixed moduli and empty input.
    pub fn from_coords(coords: Vec<FieldElement>) -> Result<Self> {
        let p = coords
            .first()
            .map(FieldElement::modulus)
            .ok_or(Error::ZeroDimension)?;
        if let Some(bad) = coords.iter().find(|c| c.modulus() != p) {
            return Err(Error::ParamsMismatch(format!(
                "moduli {} and {} in one vector",
                p,
                bad.modulus()
            )));
        }
        Ok(FieldVector { p, coords })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn values(&self) -> Vec<u64> {
        self.coords.iter().map(FieldElement::value).collect()
    }

    pub fn first_zero(&self) -> Option<usize> {
        self.coords.iter().position(FieldElement::is_zero)
    }

    pub fn is_nonzero_coordinatewise(&self) -> bool {
        self.first_zero().is_none()
    }

    fn compatible(&self, other: &FieldVector) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ParamsMismatch(format!(
                "vector moduli {} and {}",
                self.p, other.p
            )));
        }
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &FieldVector,
        op: impl Fn(FieldElement, FieldElement) -> FieldElement,
    ) -> Result<FieldVector> {
        self.compatible(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(FieldVector { p: self.p, coords })
    }

    pub fn add(&self, other: &FieldVector) -> Result<FieldVector> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &FieldVector) -> Result<FieldVector> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Coordinate-wise product.
    pub fn hadamard(&self, other: &FieldVector) -> Result<FieldVector> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Coordinate-wise inverse; fails on the first zero coordinate.
    pub fn inverses(&self) -> Result<FieldVector> {
        let coords = self
            .coords
            .iter()
            .map(|c| c.inv())
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldVector { p: self.p, coords })
    }

    /// `sum u_i v_i`, using exactly `n` multiplications and `n - 1` additions.
    pub fn inner_product(&self, other: &FieldVector) -> Result<FieldElement> {
        self.compatible(other)?;
        let mut terms = self.coords.iter().zip(&other.coords).map(|(&a, &b)| a * b);
        let first = terms.next().ok_or(Error::ZeroDimension)?;
        Ok(terms.fold(first, |acc, t| acc + t))
    }

    pub fn with_coord(&self, index: usize, value: FieldElement) -> FieldVector {
        let mut out = self.clone();
        out.coords[index] = value;
        out
    }
}

impl fmt::Display for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// A vector in `(F \ {0})^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NonZeroVector(FieldVector);

impl NonZeroVector {
    pub(crate) fn new_unchecked(v: FieldVector) -> Self {
        debug_assert!(v.is_nonzero_coordinatewise());
        NonZeroVector(v)
    }

    pub fn as_vector(&self) -> &FieldVector {
        &self.0
    }

    pub fn into_vector(self) -> FieldVector {
        self.0
    }
}

impl TryFrom<FieldVector> for NonZeroVector {
    type Error = Error;

    fn try_from(v: FieldVector) -> Result<Self> {
        match v.first_zero() {
            Some(index) => Err(Error::ZeroCoordinate { index }),
            None => Ok(NonZeroVector(v)),
        }
    }
}

impl Deref for NonZeroVector {
    type Target = FieldVector;

    fn deref(&self) -> &FieldVector {
        &self.0
    }
}

impl fmt::Display for NonZeroVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use crate::field::{counter, FieldParams, OpCounter};
    use crate::rng::SeededRng;
    use crate::Error;

    #[test]
    fn inner_product_examples() {
        let k = FieldParams::new(11, 2).unwrap();
        let ip = |u: &[u64], v: &[u64]| {
            k.vector(u)
                .unwrap()
                .inner_product(&k.vector(v).unwrap())
                .unwrap()
                .value()
        };
        assert_eq!(ip(&[2, 3], &[1, 4]), 3);
        assert_eq!(ip(&[1, 1], &[0, 0]), 0);
        assert_eq!(ip(&[1, 2], &[5, 1]), 7);
    }

    #[test]
    fn inner_product_dimension_mismatch() {
        let a = FieldParams::new(11, 2).unwrap().vector(&[1, 2]).unwrap();
        let b = FieldParams::relaxed(11, 3).unwrap().vector(&[1, 2, 3]).unwrap();
        assert_eq!(
            a.inner_product(&b),
            Err(Error::DimensionMismatch {
                expected: 2,
                actual: 3
            })
        );
    }

    #[test]
    fn inner_product_op_count_and_symmetry() {
        let mut rng = SeededRng::new(3, "ip");
        for n in [1usize, 2, 7, 64] {
            let k = FieldParams::new(65537, n).unwrap();
            for _ in 0..50 {
                let u = k.sample_vector(&mut rng);
                let v = k.sample_vector(&mut rng);
                let (uv, ops) = counter::measure(|| u.inner_product(&v).unwrap());
                assert_eq!(
                    ops,
                    OpCounter {
                        adds: n as u64 - 1,
                        muls: n as u64,
                        invs: 0
                    }
                );
                assert_eq!(uv, v.inner_product(&u).unwrap());
            }
        }
    }

    #[test]
    fn nonzero_refinement() {
        let k = FieldParams::new(11, 2).unwrap();
        assert_eq!(
            k.nonzero_vector(&[3, 0]),
            Err(Error::ZeroCoordinate { index: 1 })
        );
        assert!(k.nonzero_vector(&[3, 1]).is_ok());
        assert_eq!(
            k.vector(&[11, 1]),
            Err(Error::NotAResidue { value: 11, p: 11 })
        );
    }

    #[test]
    fn sampled_nonzero_vectors_scan_clean() {
        let k = FieldParams::relaxed(3, 16).unwrap();
        let mut rng = SeededRng::new(9, "nz");
        for _ in 0..10_000 {
            assert!(k.sample_nonzero_vector(&mut rng).is_nonzero_coordinatewise());
        }
    }
}
