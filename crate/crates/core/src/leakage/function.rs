use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::BitString;
use crate::error::{Error, Result};

type Callback = Arc<dyn Fn(&BitString) -> BitString + Send + Sync>;

/// A leakage function `{0,1}^c -> {0,1}^w`.
///
/// All variants except [`LeakageFunction::Opaque`] have a textual form
/// (`bit-select:0,2`, `parity:0,1,2`, `projection:coord=1,width=4,bits=2`)
/// that round-trips through `Display`/`FromStr`.
#[derive(Clone)]
pub enum LeakageFunction {
    /// The bits at the listed positions, in order.
    BitSelect(Vec<usize>),
    /// XOR of the bits at the listed positions; an empty set gives `0`.
    Parity(Vec<usize>),
    /// The `bits` least significant bits of coordinate `coord`, where the
    /// part is a sequence of `width`-bit big-endian coordinates.
    Projection {
        coord: usize,
        width: usize,
        bits: usize,
    },
    /// Arbitrary in-process function with a declared output width.
    Opaque {
        name: String,
        width: usize,
        f: Callback,
    },
}

impl LeakageFunction {
    pub fn opaque(
        name: &str,
        width: usize,
        f: impl Fn(&BitString) -> BitString + Send + Sync + 'static,
    ) -> Self {
        LeakageFunction::Opaque {
            name: name.to_owned(),
            width,
            f: Arc::new(f),
        }
    }

    /// Declared output width.
    pub fn output_bits(&self) -> usize {
        match self {
            LeakageFunction::BitSelect(pos) => pos.len(),
            LeakageFunction::Parity(_) => 1,
            LeakageFunction::Projection { bits, .. } => *bits,
            LeakageFunction::Opaque { width, .. } => *width,
        }
    }

    /// Checks the descriptor against a part length without evaluating it.
    pub fn validate(&self, part_len: usize) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedLeakageFunction(m));
        match self {
            LeakageFunction::BitSelect(pos) | LeakageFunction::Parity(pos) => {
                if let Some(p) = pos.iter().find(|&&p| p >= part_len) {
                    return bad(format!("bit position {p} outside a {part_len}-bit part"));
                }
            }
            LeakageFunction::Projection { coord, width, bits } => {
                if *width == 0 || bits > width {
                    return bad(format!("projection needs 0 < bits <= width, got bits={bits} width={width}"));
                }
                if (coord + 1) * width > part_len {
                    return bad(format!("coordinate {coord} of width {width} outside a {part_len}-bit part"));
                }
            }
            LeakageFunction::Opaque { .. } => {}
        }
        Ok(())
    }

    pub fn apply(&self, part: &BitString) -> Result<BitString> {
        self.validate(part.len())?;
        let out = match self {
            LeakageFunction::BitSelect(pos) => {
                BitString::new(pos.iter().map(|&p| part.bits()[p]).collect())
            }
            LeakageFunction::Parity(pos) => {
                BitString::new(vec![pos.iter().fold(false, |acc, &p| acc ^ part.bits()[p])])
            }
            LeakageFunction::Projection { coord, width, bits } => {
                let start = coord * width + (width - bits);
                BitString::new(part.bits()[start..start + bits].to_vec())
            }
            LeakageFunction::Opaque { f, .. } => f(part),
        };
        if out.len() != self.output_bits() {
            return Err(Error::MalformedLeakageFunction(format!(
                "{self} declared {} output bits but produced {}",
                self.output_bits(),
                out.len()
            )));
        }
        Ok(out)
    }
}

impl fmt::Debug for LeakageFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LeakageFunction({self})")
    }
}

fn join(pos: &[usize]) -> String {
    pos.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for LeakageFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LeakageFunction::BitSelect(pos) => write!(f, "bit-select:{}", join(pos)),
            LeakageFunction::Parity(pos) => write!(f, "parity:{}", join(pos)),
            LeakageFunction::Projection { coord, width, bits } => {
                write!(f, "projection:coord={coord},width={width},bits={bits}")
            }
            LeakageFunction::Opaque { name, width, .. } => write!(f, "opaque:{name}/{width}"),
        }
    }
}

fn positions(s: &str) -> Result<Vec<usize>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::MalformedLeakageFunction(format!("bad bit position {t:?}")))
        })
        .collect()
}

impl FromStr for LeakageFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::MalformedLeakageFunction(format!("missing ':' in {s:?}")))?;
        match kind {
            "bit-select" => Ok(LeakageFunction::BitSelect(positions(args)?)),
            "parity" => Ok(LeakageFunction::Parity(positions(args)?)),
            "projection" => {
                let (mut coord, mut width, mut bits) = (None, None, None);
                for kv in args.split(',') {
                    let (k, v) = kv.split_once('=').ok_or_else(|| {
                        Error::MalformedLeakageFunction(format!("expected key=value, got {kv:?}"))
                    })?;
                    let v: usize = v.parse().map_err(|_| {
                        Error::MalformedLeakageFunction(format!("bad number {v:?}"))
                    })?;
                    match k {
                        "coord" => coord = Some(v),
                        "width" => width = Some(v),
                        "bits" => bits = Some(v),
                        _ => {
                            return Err(Error::MalformedLeakageFunction(format!(
                                "unknown projection key {k:?}"
                            )))
                        }
                    }
                }
                match (coord, width, bits) {
                    (Some(coord), Some(width), Some(bits)) => {
                        Ok(LeakageFunction::Projection { coord, width, bits })
                    }
                    _ => Err(Error::MalformedLeakageFunction(
                        "projection needs coord, width and bits".into(),
                    )),
                }
            }
            _ => Err(Error::MalformedLeakageFunction(format!(
                "unknown leakage function {kind:?}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn part(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn bit_select_and_parity() {
        let m = part("10110");
        assert_eq!(LeakageFunction::BitSelect(vec![0, 2]).apply(&m).unwrap().to_string(), "11");
        assert_eq!(LeakageFunction::Parity(vec![0, 1, 2, 3, 4]).apply(&m).unwrap().to_string(), "1");
        assert_eq!(LeakageFunction::Parity((0..5).collect()).apply(&part("00000")).unwrap().to_string(), "0");
        assert!(LeakageFunction::BitSelect(vec![5]).apply(&m).is_err());
    }

    #[test]
    fn projection_takes_low_bits_of_a_coordinate() {
        // coords 1001 and 0110
        let m = part("10010110");
        let f = LeakageFunction::Projection { coord: 1, width: 4, bits: 3 };
        assert_eq!(f.apply(&m).unwrap().to_string(), "110");
        assert!(LeakageFunction::Projection { coord: 2, width: 4, bits: 1 }.apply(&m).is_err());
        assert!(LeakageFunction::Projection { coord: 0, width: 4, bits: 5 }.apply(&m).is_err());
    }

    #[test]
    fn opaque_width_is_enforced() {
        let liar = LeakageFunction::opaque("liar", 1, |_| BitString::new(vec![true, true]));
        assert!(matches!(liar.apply(&part("0")), Err(Error::MalformedLeakageFunction(_))));
        let ok = LeakageFunction::opaque("first", 1, |b| BitString::new(vec![b.bits()[0]]));
        assert_eq!(ok.apply(&part("10")).unwrap().to_string(), "1");
    }

    #[test]
    fn malformed_descriptors() {
        for s in ["bits:1", "bit-select", "bit-select:a", "projection:coord=1", "projection:x=1,width=2,bits=1"] {
            assert!(s.parse::<LeakageFunction>().is_err(), "{s}");
        }
    }

    proptest! {
        #[test]
        fn descriptor_text_round_trips(pos in proptest::collection::vec(0usize..64, 0..6), c in 0usize..8, w in 1usize..20, b in 0usize..20) {
            for f in [
                LeakageFunction::BitSelect(pos.clone()),
                LeakageFunction::Parity(pos.clone()),
                LeakageFunction::Projection { coord: c, width: w, bits: b },
            ] {
                let back: LeakageFunction = f.to_string().parse().unwrap();
                prop_assert_eq!(back.to_string(), f.to_string());
            }
        }
    }
}
