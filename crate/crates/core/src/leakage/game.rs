use std::collections::VecDeque;
use std::fmt;

use super::{BitString, LeakageFunction, MemoryParts};
use crate::error::{Error, Result};

pub const DEFAULT_QUERY_CAP: usize = 10_000;

/// Request to leak `function(M_part)`. Parts are numbered from 0.
#[derive(Debug, Clone)]
pub struct LeakageQuery {
    pub part: usize,
    pub function: LeakageFunction,
}

impl LeakageQuery {
    pub fn new(part: usize, function: LeakageFunction) -> Self {
        LeakageQuery { part, function }
    }

    pub fn output_bits(&self) -> usize {
        self.function.output_bits()
    }
}

/// Per-part total of leaked bits, capped at `lambda`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    lambda: usize,
    consumed: Vec<usize>,
}

impl Budget {
    pub fn new(lambda: usize, parts: usize) -> Self {
        Budget {
            lambda,
            consumed: vec![0; parts],
        }
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn consumed(&self, part: usize) -> usize {
        self.consumed[part]
    }

    pub fn remaining(&self, part: usize) -> usize {
        self.lambda - self.consumed[part]
    }
}

/// The referee: answers queries while enforcing the budget.
#[derive(Debug, Clone)]
pub struct LeakageOracle {
    memory: MemoryParts,
    budget: Budget,
}

impl LeakageOracle {
    pub fn new(memory: MemoryParts, lambda: usize) -> Self {
        let parts = memory.count();
        LeakageOracle {
            memory,
            budget: Budget::new(lambda, parts),
        }
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    /// Answers `q` or refuses it. A refused query leaves the state untouched.
    pub fn query(&mut self, q: &LeakageQuery) -> Result<BitString> {
        let part = self.memory.part(q.part).ok_or_else(|| {
            Error::MalformedLeakageFunction(format!(
                "part {} out of range (have {})",
                q.part,
                self.memory.count()
            ))
        })?;
        let requested = q.output_bits();
        let consumed = self.budget.consumed[q.part];
        if consumed + requested > self.budget.lambda {
            return Err(Error::BudgetExceeded {
                part: q.part,
                consumed,
                requested,
                lambda: self.budget.lambda,
            });
        }
        let answer = q.function.apply(part)?;
        self.budget.consumed[q.part] += requested;
        Ok(answer)
    }
}

/// An adaptive adversary. The harness alternates `next_query` and
/// `observe`, so query `i + 1` is chosen after answer `i` is known.
pub trait Adversary {
    fn next_query(&mut self) -> Option<LeakageQuery>;
    fn observe(&mut self, answer: &Result<BitString>);
    fn output(&mut self) -> BitString;
}

/// Issues a fixed list of queries and outputs the concatenated answers.
#[derive(Debug, Clone, Default)]
pub struct ScriptedAdversary {
    queries: VecDeque<LeakageQuery>,
    transcript: BitString,
}

impl ScriptedAdversary {
    pub fn new(queries: impl IntoIterator<Item = LeakageQuery>) -> Self {
        ScriptedAdversary {
            queries: queries.into_iter().collect(),
            transcript: BitString::default(),
        }
    }
}

impl Adversary for ScriptedAdversary {
    fn next_query(&mut self) -> Option<LeakageQuery> {
        self.queries.pop_front()
    }

    fn observe(&mut self, answer: &Result<BitString>) {
        if let Ok(bits) = answer {
            self.transcript.extend(bits);
        }
    }

    fn output(&mut self) -> BitString {
        self.transcript.clone()
    }
}

/// Parses `PART/DESCRIPTOR;PART/DESCRIPTOR;...`, e.g.
/// `0/bit-select:0,2;1/parity:0,1`.
pub fn parse_adversary(spec: &str) -> Result<ScriptedAdversary> {
    let queries = spec
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (part, desc) = item.trim().split_once('/').ok_or_else(|| {
                Error::MalformedLeakageFunction(format!("expected PART/DESCRIPTOR, got {item:?}"))
            })?;
            let part = part
                .parse()
                .map_err(|_| Error::MalformedLeakageFunction(format!("bad part index {part:?}")))?;
            Ok(LeakageQuery::new(part, desc.parse()?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScriptedAdversary::new(queries))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryOutcome {
    Answered(BitString),
    Refused(String),
}

/// One line of the query log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogRecord {
    /// Strictly increasing sequence number.
    pub index: usize,
    pub part: usize,
    pub descriptor: String,
    pub width: usize,
    pub outcome: QueryOutcome,
    /// Bits consumed from `part` after this query.
    pub consumed: usize,
}

impl fmt::Display for LogRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let answer = match &self.outcome {
            QueryOutcome::Answered(b) => b.to_string(),
            QueryOutcome::Refused(_) => "REFUSED".to_owned(),
        };
        write!(
            f,
            "index={} part={} descriptor={} width={} answer={} consumed={}",
            self.index, self.part, self.descriptor, self.width, answer, self.consumed
        )
    }
}

#[derive(Debug, Clone)]
pub struct GameOutcome {
    pub output: BitString,
    pub log: Vec<LogRecord>,
    pub lambda: usize,
    pub parts: usize,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("{reason}")]
pub struct GameAbort {
    pub reason: Error,
    pub log: Vec<LogRecord>,
}

/// Plays the game to completion and returns the adversary's output along
/// with the full query log.
pub fn run_game(
    memory: MemoryParts,
    adversary: &mut dyn Adversary,
    lambda: usize,
    max_queries: usize,
) -> std::result::Result<GameOutcome, GameAbort> {
    let parts = memory.count();
    let mut oracle = LeakageOracle::new(memory, lambda);
    let mut log = Vec::new();
    while let Some(q) = adversary.next_query() {
        if log.len() == max_queries {
            return Err(GameAbort {
                reason: Error::QueryCapExceeded { cap: max_queries },
                log,
            });
        }
        let answer = oracle.query(&q);
        let consumed = if q.part < parts {
            oracle.budget().consumed(q.part)
        } else {
            0
        };
        log.push(LogRecord {
            index: log.len(),
            part: q.part,
            descriptor: q.function.to_string(),
            width: q.output_bits(),
            outcome: match &answer {
                Ok(bits) => QueryOutcome::Answered(bits.clone()),
                Err(e) => QueryOutcome::Refused(e.to_string()),
            },
            consumed,
        });
        adversary.observe(&answer);
    }
    Ok(GameOutcome {
        output: adversary.output(),
        log,
        lambda,
        parts,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetAudit {
    /// Answer bits actually returned per part, recounted from the log.
    pub leaked: Vec<usize>,
    pub lambda: usize,
    /// Every log index is the previous plus one.
    pub ordered: bool,
    /// Every answered query returned exactly its declared width.
    pub widths_match: bool,
}

impl BudgetAudit {
    pub fn passed(&self) -> bool {
        self.ordered && self.widths_match && self.leaked.iter().all(|&b| b <= self.lambda)
    }
}

/// Recounts leaked bits from the log alone, without trusting the oracle's
/// own counters.
pub fn audit_budget(log: &[LogRecord], parts: usize, lambda: usize) -> BudgetAudit {
    let mut leaked = vec![0; parts];
    let mut widths_match = true;
    for r in log {
        if let QueryOutcome::Answered(bits) = &r.outcome {
            if r.part < parts {
                leaked[r.part] += bits.len();
            } else {
                widths_match = false;
            }
            widths_match &= bits.len() == r.width;
        }
    }
    BudgetAudit {
        leaked,
        lambda,
        ordered: log.iter().enumerate().all(|(i, r)| r.index == i),
        widths_match,
    }
}
