//! The leak-free component: uniformly random `(A, A~, B, B~)` with
//!
//! 1. `<A, B> + <A~, B~> = 0`,
//! 2. every `A_i != 0`,
//! 3. every `B~_i != 0`.
//!
//! Sampling draws `A`, `A~`, `B~` and `B_2..B_n` freely and solves the
//! linear condition for `B_1`. For each fixed `(A, A~, B~)` the admissible
//! `B` form an affine hyperplane with `|F|^(n-1)` points, so the joint
//! output is exactly uniform on the constraint set.

use std::collections::VecDeque;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::field::{counter, FieldParams, FieldVector, NonZeroVector};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OracleSample {
    pub a: NonZeroVector,
    pub a_tilde: FieldVector,
    pub b: FieldVector,
    pub b_tilde: NonZeroVector,
}

impl OracleSample {
    /// Validated constructor; reports which condition failed.
    pub fn new(
        params: FieldParams,
        a: FieldVector,
        a_tilde: FieldVector,
        b: FieldVector,
        b_tilde: FieldVector,
    ) -> Result<Self> {
        for v in [&a, &a_tilde, &b, &b_tilde] {
            params.check_vector(v)?;
        }
        let a = NonZeroVector::try_from(a)
            .map_err(|_| Error::InvalidOracleSample("A nonzero-coordinate"))?;
        let b_tilde = NonZeroVector::try_from(b_tilde)
            .map_err(|_| Error::InvalidOracleSample("B~ nonzero-coordinate"))?;
        let sample = OracleSample {
            a,
            a_tilde,
            b,
            b_tilde,
        };
        if !sample.orthogonal() {
            return Err(Error::InvalidOracleSample("<A,B> + <A~,B~> = 0"));
        }
        Ok(sample)
    }

    fn orthogonal(&self) -> bool {
        verify(self)
    }

    /// `<A, B>`, which equals `-<A~, B~>` for a valid sample.
    pub fn alpha(&self) -> crate::field::FieldElement {
        counter::uncounted(|| {
            self.a
                .inner_product(&self.b)
                .expect("oracle vectors share a dimension")
        })
    }
}

/// True iff all three oracle conditions hold.
pub fn verify(sample: &OracleSample) -> bool {
    verify_parts(&sample.a, &sample.a_tilde, &sample.b, &sample.b_tilde)
}

/// [`verify`] on untyped vectors, so that zero coordinates can be presented.
pub fn verify_parts(
    a: &FieldVector,
    a_tilde: &FieldVector,
    b: &FieldVector,
    b_tilde: &FieldVector,
) -> bool {
    a.is_nonzero_coordinatewise()
        && b_tilde.is_nonzero_coordinatewise()
        && counter::uncounted(|| {
            match (a.inner_product(b), a_tilde.inner_product(b_tilde)) {
                (Ok(x), Ok(y)) => (x + y).is_zero(),
                _ => false,
            }
        })
}

/// Uniform sample from the oracle's constraint set.
pub fn sample<R: RngCore + ?Sized>(params: FieldParams, rng: &mut R) -> OracleSample {
    counter::uncounted(|| {
        let a = params.sample_nonzero_vector(rng);
        let a_tilde = params.sample_vector(rng);
        let b_tilde = params.sample_nonzero_vector(rng);
        let mut b = params.sample_vector(rng);
        let target = -a_tilde
            .inner_product(&b_tilde)
            .expect("same dimension");
        let rest = a.coords()[1..]
            .iter()
            .zip(&b.coords()[1..])
            .fold(params.zero(), |acc, (&x, &y)| acc + x * y);
        let b1 = a.coords()[0].inv().expect("A is nonzero") * (target - rest);
        b = b.with_coord(0, b1);
        OracleSample {
            a,
            a_tilde,
            b,
            b_tilde,
        }
    })
}

/// Source of oracle samples for the refresh protocol.
pub trait OracleSampler {
    fn draw(&mut self, params: FieldParams, rng: &mut dyn RngCore) -> Result<OracleSample>;
}

/// The uniform leak-free oracle.
#[derive(Debug, Clone, Copy, Default)]
pub struct LeakFreeOracle;

impl OracleSampler for LeakFreeOracle {
    fn draw(&mut self, params: FieldParams, rng: &mut dyn RngCore) -> Result<OracleSample> {
        Ok(sample(params, rng))
    }
}

/// Replays fixed samples in order, then falls back to uniform sampling.
/// Used for golden tests and for driving the restart path.
#[derive(Debug, Clone, Default)]
pub struct ScriptedOracle {
    queue: VecDeque<OracleSample>,
    fallback: bool,
}

impl ScriptedOracle {
    pub fn new(samples: impl IntoIterator<Item = OracleSample>) -> Self {
        ScriptedOracle {
            queue: samples.into_iter().collect(),
            fallback: true,
        }
    }

    /// Errors instead of falling back once the script is exhausted.
    pub fn strict(samples: impl IntoIterator<Item = OracleSample>) -> Self {
        ScriptedOracle {
            queue: samples.into_iter().collect(),
            fallback: false,
        }
    }

    pub fn remaining(&self) -> usize {
        self.queue.len()
    }
}

impl OracleSampler for ScriptedOracle {
    fn draw(&mut self, params: FieldParams, rng: &mut dyn RngCore) -> Result<OracleSample> {
        match self.queue.pop_front() {
            Some(s) => {
                if !verify(&s) {
                    return Err(Error::InvalidOracleSample("scripted sample"));
                }
                params.check_vector(&s.a)?;
                Ok(s)
            }
            None if self.fallback => Ok(sample(params, rng)),
            None => Err(Error::Precondition("scripted oracle exhausted".into())),
        }
    }
}

/// Every tuple of `(F \ {0})^n x F^n x F^n x (F \ {0})^n`, including those
/// violating the orthogonality condition. Tiny fields only.
pub fn enumerate_raw(params: FieldParams) -> impl Iterator<Item = OracleSample> {
    params.all_nonzero_vectors().flat_map(move |a| {
        params.all_vectors().flat_map(move |a_tilde| {
            let a = a.clone();
            params.all_vectors().flat_map(move |b| {
                let a = a.clone();
                let a_tilde = a_tilde.clone();
                params.all_nonzero_vectors().map(move |b_tilde| OracleSample {
                    a: a.clone(),
                    a_tilde: a_tilde.clone(),
                    b: b.clone(),
                    b_tilde,
                })
            })
        })
    })
}

/// `(p - 1)^(2n) * p^(2n)`, the size of [`enumerate_raw`].
pub fn raw_space_size(params: FieldParams) -> u128 {
    let p = params.modulus() as u128;
    let n = params.dimension() as u32;
    (p - 1)
        .checked_pow(2 * n)
        .and_then(|x| x.checked_mul(p.checked_pow(2 * n)?))
        .unwrap_or(u128::MAX)
}
