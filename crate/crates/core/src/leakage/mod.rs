//! The lambda-leakage game: memory parts that leak independently, a
//! leakage oracle enforcing a per-part bit budget, and adaptive adversaries.

mod distance;
mod function;
mod game;

use std::fmt;
use std::str::FromStr;

use crate::encoding::Encoding;
use crate::error::{Error, Result};
use crate::field::FieldParams;

pub use distance::{distinguishing_experiment, total_variation, DistanceEstimate, Histogram};
pub use function::LeakageFunction;
pub use game::{
    audit_budget, parse_adversary, run_game, Adversary, BudgetAudit, Budget, GameAbort,
    GameOutcome, LeakageOracle, LeakageQuery, LogRecord, QueryOutcome, ScriptedAdversary,
    DEFAULT_QUERY_CAP,
};

/// Budget suggested by the security bound of the inner-product LRS:
/// `floor(0.49 * log2(|F|^n) - 1)`, clamped at zero.
pub fn default_lambda(params: FieldParams) -> usize {
    let bits = params.dimension() as f64 * (params.modulus() as f64).log2();
    (0.49 * bits - 1.0).floor().max(0.0) as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn bit(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn extend(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    /// Big-endian, fixed width.
    pub fn push_uint(&mut self, value: u64, width: usize) {
        for i in (0..width).rev() {
            self.0.push((value >> i) & 1 == 1);
        }
    }

    /// Reads `width` bits starting at `offset` as a big-endian integer.
    pub fn read_uint(&self, offset: usize, width: usize) -> Option<u64> {
        let slice = self.0.get(offset..offset + width)?;
        Some(slice.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse {
                    line: 1,
                    column: i + 1,
                    message: format!("expected 0 or 1, found {c:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

/// Contents `M_1..M_l` of the memory parts, all `c` bits long.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemoryParts {
    parts: Vec<BitString>,
}

impl MemoryParts {
    pub fn new(parts: Vec<BitString>) -> Result<Self> {
        let c = parts
            .first()
            .map(BitString::len)
            .ok_or_else(|| Error::Precondition("at least one memory part".into()))?;
        if parts.iter().any(|p| p.len() != c) {
            return Err(Error::Precondition(
                "memory parts must have equal length".into(),
            ));
        }
        Ok(MemoryParts { parts })
    }

    pub fn count(&self) -> usize {
        self.parts.len()
    }

    /// Bits per part.
    pub fn part_len(&self) -> usize {
        self.parts[0].len()
    }

    pub fn part(&self, index: usize) -> Option<&BitString> {
        self.parts.get(index)
    }
}

/// Two parts: `L` in part 0 and `R` in part 1, each coordinate written
/// big-endian with the bit length of `p`.
pub fn serialize_shares_to_memory(enc: &Encoding) -> MemoryParts {
    let w = enc.params().coord_bits();
    let write = |v: &crate::field::FieldVector| {
        let mut bits = BitString::default();
        for c in v.coords() {
            bits.push_uint(c.value(), w);
        }
        bits
    };
    MemoryParts {
        parts: vec![write(enc.left()), write(enc.right())],
    }
}

/// Inverse of [`serialize_shares_to_memory`].
pub fn parse_shares_from_memory(params: FieldParams, memory: &MemoryParts) -> Result<Encoding> {
    if memory.count() != 2 {
        return Err(Error::Precondition(format!(
            "expected 2 memory parts, found {}",
            memory.count()
        )));
    }
    let w = params.coord_bits();
    let read = |part: &BitString| -> Result<Vec<u64>> {
        if part.len() != w * params.dimension() {
            return Err(Error::DimensionMismatch {
                expected: w * params.dimension(),
                actual: part.len(),
            });
        }
        Ok((0..params.dimension())
            .map(|i| part.read_uint(i * w, w).expect("length checked"))
            .collect())
    };
    Encoding::from_values(params, &read(&memory.parts[0])?, &read(&memory.parts[1])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::encode;
    use crate::rng::SeededRng;

    #[test]
    fn serialization_examples() {
        let k = FieldParams::new(11, 1).unwrap();
        let enc = Encoding::from_values(k, &[9], &[3]).unwrap();
        let m = serialize_shares_to_memory(&enc);
        assert_eq!(m.part(0).unwrap().to_string(), "1001");
        assert_eq!(m.part(1).unwrap().to_string(), "0011");

        let k = FieldParams::new(11, 2).unwrap();
        let enc = Encoding::from_values(k, &[2, 3], &[1, 4]).unwrap();
        let m = serialize_shares_to_memory(&enc);
        assert_eq!(m.part_len(), 8);
        assert_eq!(m.part(0).unwrap().to_string(), "00100011");
    }

    #[test]
    fn parse_inverts_serialize() {
        let mut rng = SeededRng::new(3, "mem");
        for (p, n) in [(11, 2), (101, 5), (65537, 9)] {
            let k = FieldParams::new(p, n).unwrap();
            for _ in 0..20 {
                let s = k.sample_nonzero(&mut rng);
                let enc = crate::encoding::encode_with(s, k, crate::encoding::EncodeMode::Constructive, &mut rng).unwrap();
                let m = serialize_shares_to_memory(&enc);
                assert_eq!(m.part_len(), k.coord_bits() * n);
                assert_eq!(parse_shares_from_memory(k, &m).unwrap(), enc);
            }
        }
        let k = FieldParams::new(11, 2).unwrap();
        let enc = encode(k.element(3), k, &mut rng).unwrap();
        let m = serialize_shares_to_memory(&enc);
        let k3 = FieldParams::relaxed(11, 3).unwrap();
        assert!(parse_shares_from_memory(k3, &m).is_err());
    }

    #[test]
    fn default_lambda_follows_the_bound() {
        assert_eq!(default_lambda(FieldParams::new(11, 2).unwrap()), 2);
        // 0.49 * 64 * 16.00002 - 1 = 500.76
        assert_eq!(default_lambda(FieldParams::new(65537, 64).unwrap()), 500);
        assert_eq!(default_lambda(FieldParams::relaxed(3, 1).unwrap()), 0);
    }

    #[test]
    fn bitstring_parse_and_uint() {
        let b: BitString = "10110".parse().unwrap();
        assert_eq!(b.read_uint(0, 3), Some(5));
        assert_eq!(b.read_uint(3, 3), None);
        assert!("10a".parse::<BitString>().is_err());
    }
}
