//! The inner-product LRS: a secret `s` is stored as two nonzero-coordinate
//! vectors `(L, R)` with `<L, R> = s`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldParams, NonZeroVector};

/// How [`encode_with`] samples from the constraint set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodeMode {
    /// Draw both vectors from `(F \ {0})^n` and retry until the inner
    /// product matches. Expected `p` attempts.
    Rejection,
    /// Draw `L` and `R_2..R_n`, solve for `R_1`, and retry only if `R_1 = 0`.
    /// O(n) per attempt and fit for large fields.
    Constructive,
}

/// Shares `L` (held by the left party) and `R` (held by the right party).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Encoding {
    params: FieldParams,
    left: NonZeroVector,
    right: NonZeroVector,
}

impl Encoding {
    pub fn new(params: FieldParams, left: NonZeroVector, right: NonZeroVector) -> Result<Self> {
        params.check_vector(&left)?;
        params.check_vector(&right)?;
        Ok(Encoding {
            params,
            left,
            right,
        })
    }

    /// Convenience constructor from raw residues.
    pub fn from_values(params: FieldParams, left: &[u64], right: &[u64]) -> Result<Self> {
        Encoding::new(
            params,
            params.nonzero_vector(left)?,
            params.nonzero_vector(right)?,
        )
    }

    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn left(&self) -> &NonZeroVector {
        &self.left
    }

    pub fn right(&self) -> &NonZeroVector {
        &self.right
    }

    pub fn into_parts(self) -> (NonZeroVector, NonZeroVector) {
        (self.left, self.right)
    }

    pub fn decode(&self) -> FieldElement {
        // Dimensions were checked at construction.
        self.left
            .inner_product(&self.right)
            .expect("encoding shares have matching dimensions")
    }
}

/// Dec: the inner product of the two shares.
pub fn decode(e: &Encoding) -> FieldElement {
    e.decode()
}

fn check_nonempty(s: FieldElement, params: &FieldParams) -> Result<()> {
    if s.modulus() != params.modulus() {
        return Err(Error::ParamsMismatch(format!(
            "secret modulus {} vs field modulus {}",
            s.modulus(),
            params.modulus()
        )));
    }
    // With n = 1 the only way to hit zero is a zero coordinate.
    if params.dimension() == 1 && s.is_zero() {
        return Err(Error::EmptyConstraintSet {
            secret: 0,
            n: 1,
        });
    }
    Ok(())
}

/// Largest modulus for which [`encode`] uses rejection sampling.
pub const REJECTION_MAX_P: u64 = 4096;

/// Enc, exactly uniform over `{(L, R) in ((F \ {0})^n)^2 : <L, R> = s}`.
/// Both samplers are exact; rejection is only used where it is cheap.
pub fn encode<R: Rng + ?Sized>(s: FieldElement, params: FieldParams, rng: &mut R) -> Result<Encoding> {
    let mode = if params.modulus() <= REJECTION_MAX_P {
        EncodeMode::Rejection
    } else {
        EncodeMode::Constructive
    };
    encode_with(s, params, mode, rng)
}

pub fn encode_with<R: Rng + ?Sized>(
    s: FieldElement,
    params: FieldParams,
    mode: EncodeMode,
    rng: &mut R,
) -> Result<Encoding> {
    check_nonempty(s, &params)?;
    match mode {
        EncodeMode::Rejection => loop {
            let left = params.sample_nonzero_vector(rng);
            let right = params.sample_nonzero_vector(rng);
            if left.inner_product(&right)? == s {
                return Encoding::new(params, left, right);
            }
        },
        EncodeMode::Constructive => loop {
            let left = params.sample_nonzero_vector(rng);
            let mut right = params.sample_nonzero_vector(rng).into_vector();
            // R_1 = L_1^{-1} (s - sum_{i>=2} L_i R_i)
            let rest = left.coords()[1..]
                .iter()
                .zip(&right.coords()[1..])
                .fold(params.zero(), |acc, (&l, &r)| acc + l * r);
            let r1 = left.coords()[0].inv()? * (s - rest);
            if r1.is_zero() {
                continue;
            }
            right = right.with_coord(0, r1);
            return Encoding::new(params, left, NonZeroVector::try_from(right)?);
        },
    }
}

/// Uniform sample of a fresh pair carrying the secret `s`, as needed by the
/// reconstruction experiment. Errors when the constraint set is empty.
pub fn sample_encoding_pair_with_secret<R: Rng + ?Sized>(
    s: FieldElement,
    params: FieldParams,
    rng: &mut R,
) -> Result<Encoding> {
    encode_with(s, params, EncodeMode::Rejection, rng)
}

/// Every pair in the constraint set, in lexicographic order. Tiny fields only.
pub fn enumerate_constraint_set(
    s: FieldElement,
    params: FieldParams,
) -> impl Iterator<Item = Encoding> {
    params.all_nonzero_vectors().flat_map(move |left| {
        params.all_nonzero_vectors().filter_map(move |right| {
            (left.inner_product(&right).ok()? == s)
                .then(|| Encoding::new(params, left.clone(), right).expect("enumerated in params"))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::stats::chi_square_uniform;
    use crate::rng::SeededRng;
    use std::collections::{BTreeMap, HashMap};

    #[test]
    fn decode_examples() {
        let k = FieldParams::new(11, 2).unwrap();
        let d = |l: &[u64], r: &[u64]| Encoding::from_values(k, l, r).unwrap().decode().value();
        assert_eq!(d(&[2, 3], &[1, 4]), 3);
        assert_eq!(d(&[1, 1], &[1, 1]), 2);
        assert_eq!(d(&[1, 5], &[9, 1]), 3);
    }

    #[test]
    fn encoding_rejects_zero_coordinates_and_foreign_vectors() {
        let k = FieldParams::new(11, 2).unwrap();
        assert_eq!(
            Encoding::from_values(k, &[1, 0], &[1, 1]),
            Err(Error::ZeroCoordinate { index: 1 })
        );
        let other = FieldParams::new(13, 2).unwrap();
        let l = other.nonzero_vector(&[1, 1]).unwrap();
        let r = k.nonzero_vector(&[1, 1]).unwrap();
        assert!(matches!(
            Encoding::new(k, l, r),
            Err(Error::ParamsMismatch(_))
        ));
    }

    #[test]
    fn roundtrip_and_nonzero_scan() {
        let mut rng = SeededRng::new(11, "enc-roundtrip");
        for (p, n) in [(11, 2), (101, 8), (65537, 64)] {
            let k = FieldParams::new(p, n).unwrap();
            for i in 0..10_000 / 3 {
                let s = k.sample_uniform(&mut rng);
                let mode = if p > 1000 { EncodeMode::Constructive } else if i % 2 == 0 { EncodeMode::Rejection } else { EncodeMode::Constructive };
                let e = encode_with(s, k, mode, &mut rng).unwrap();
                assert_eq!(e.decode(), s);
                assert!(e.left().is_nonzero_coordinatewise());
                assert!(e.right().is_nonzero_coordinatewise());
            }
        }
    }

    #[test]
    fn n1_p5_lands_in_the_four_element_set() {
        let k = FieldParams::relaxed(5, 1).unwrap();
        let s = k.element(3);
        let set: Vec<(u64, u64)> = enumerate_constraint_set(s, k)
            .map(|e| (e.left().values()[0], e.right().values()[0]))
            .collect();
        assert_eq!(set, vec![(1, 3), (2, 4), (3, 1), (4, 2)]);

        let mut rng = SeededRng::new(5, "enc-n1");
        let trials = 100_000;
        let mut counts: BTreeMap<(u64, u64), u64> = BTreeMap::new();
        for _ in 0..trials {
            let e = encode(s, k, &mut rng).unwrap();
            *counts
                .entry((e.left().values()[0], e.right().values()[0]))
                .or_default() += 1;
        }
        assert_eq!(counts.keys().copied().collect::<Vec<_>>(), set);
        let cells: Vec<u64> = counts.values().copied().collect();
        assert!(chi_square_uniform(&cells).z_score() < 5.0);
    }

    #[test]
    fn n1_zero_secret_is_an_empty_constraint_set() {
        let k = FieldParams::relaxed(5, 1).unwrap();
        let mut rng = SeededRng::new(0, "empty");
        assert_eq!(
            sample_encoding_pair_with_secret(k.zero(), k, &mut rng),
            Err(Error::EmptyConstraintSet { secret: 0, n: 1 })
        );
        assert_eq!(enumerate_constraint_set(k.zero(), k).count(), 0);
    }

    #[test]
    fn n2_zero_secret_is_reachable() {
        let k = FieldParams::relaxed(5, 2).unwrap();
        let e = Encoding::from_values(k, &[1, 1], &[2, 3]).unwrap();
        assert!(e.decode().is_zero());
        let mut rng = SeededRng::new(0, "zero-n2");
        let e = sample_encoding_pair_with_secret(k.zero(), k, &mut rng).unwrap();
        assert!(e.decode().is_zero());
    }

    fn uniformity_over_enumerated_set(mode: EncodeMode, p: u64, n: usize, secret: u64, trials: u64) {
        let k = FieldParams::relaxed(p, n).unwrap();
        let s = k.element(secret);
        let index: HashMap<Encoding, usize> = enumerate_constraint_set(s, k)
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        let mut counts = vec![0u64; index.len()];
        let mut rng = SeededRng::new(17, "enc-uniform");
        for _ in 0..trials {
            let e = encode_with(s, k, mode, &mut rng).unwrap();
            counts[*index.get(&e).expect("outside the constraint set")] += 1;
        }
        let chi = chi_square_uniform(&counts);
        assert!(chi.z_score() < 5.0, "{mode:?}: {chi:?}");
    }

    #[test]
    fn rejection_mode_is_uniform_p11_n2() {
        uniformity_over_enumerated_set(EncodeMode::Rejection, 11, 2, 3, 1_000_000);
    }

    #[test]
    fn constructive_mode_is_uniform_p5_n2() {
        uniformity_over_enumerated_set(EncodeMode::Constructive, 5, 2, 2, 200_000);
        uniformity_over_enumerated_set(EncodeMode::Constructive, 5, 3, 0, 200_000);
    }
}
