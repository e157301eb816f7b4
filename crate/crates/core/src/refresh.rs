//! The O(n) two-party refresh protocol.
//!
//! Per attempt:
//!
//! 1. The oracle hands `(A, A~)` to the left party and `(B, B~)` to the right.
//! 2. Left sends `V_i = L_i^{-1} A_i`.
//! 3. Right computes `X_i = V_i B_i` and `R' = R + X`.
//! 4. Restart if some `R'_i = 0`.
//! 5. Right sends `V~_i = R'_i^{-1} B~_i`.
//! 6. Left computes `X~_i = V~_i A~_i` and `L' = L + X~`.
//! 7. Restart if some `L'_i = 0`.
//!
//! `<L, X> = <A, B> = alpha` and `<X~, R'> = <A~, B~> = -alpha`, hence
//! `<L', R'> = <L, R>`. A restart discards the whole attempt, including the
//! oracle sample, and starts over from step 1.

use std::fmt;

use rand::RngCore;

use crate::channel::{Channel, Direction, MemoryChannel, Message};
use crate::encoding::Encoding;
use crate::error::{Error, Result};
use crate::field::{counter, FieldElement, FieldParams, FieldVector, NonZeroVector, OpCounter};
use crate::oracle::{LeakFreeOracle, OracleSample, OracleSampler};

pub const DEFAULT_RESTART_CAP: u32 = 1000;

/// What the left party saw: `(L, A, V, A~, V~)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ViewL {
    pub l: NonZeroVector,
    pub a: NonZeroVector,
    pub v: FieldVector,
    pub a_tilde: FieldVector,
    pub v_tilde: FieldVector,
}

/// What the right party saw: `(R, B, V, B~, V~)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ViewR {
    pub r: NonZeroVector,
    pub b: FieldVector,
    pub v: FieldVector,
    pub b_tilde: NonZeroVector,
    pub v_tilde: FieldVector,
}

/// Where an attempt was abandoned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RestartStep {
    /// Step 4: the refreshed right share had a zero coordinate.
    RightShareZero,
    /// Step 7: the refreshed left share had a zero coordinate.
    LeftShareZero,
}

impl fmt::Display for RestartStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RestartStep::RightShareZero => "right-share-zero",
            RestartStep::LeftShareZero => "left-share-zero",
        })
    }
}

/// A discarded attempt, kept for diagnostics only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailedAttempt {
    pub step: RestartStep,
    pub messages: Vec<Message>,
    pub ops: OpCounter,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefreshTrace {
    pub output: Encoding,
    pub view_l: ViewL,
    pub view_r: ViewR,
    /// `<A, B>` of the accepted oracle sample.
    pub alpha: FieldElement,
    pub restarts: u32,
    /// Messages of the accepting attempt.
    pub messages: Vec<Message>,
    pub failed_attempts: Vec<FailedAttempt>,
    /// Party operations in the accepting attempt.
    pub op_count: OpCounter,
}

impl RefreshTrace {
    /// Party operations summed over every attempt, restarts included.
    pub fn total_ops(&self) -> OpCounter {
        self.failed_attempts
            .iter()
            .fold(self.op_count, |acc, f| acc + f.ops)
    }

    pub fn attempts(&self) -> u32 {
        self.restarts + 1
    }

    /// Per-attempt operation counts in execution order.
    pub fn attempt_ops(&self) -> impl Iterator<Item = OpCounter> + '_ {
        self.failed_attempts
            .iter()
            .map(|f| f.ops)
            .chain(std::iter::once(self.op_count))
    }
}

/// Left party state for one attempt.
#[derive(Debug)]
pub struct LeftParty {
    l: NonZeroVector,
    a: NonZeroVector,
    a_tilde: FieldVector,
    v: Option<FieldVector>,
    v_tilde: Option<FieldVector>,
}

impl LeftParty {
    pub fn new(l: NonZeroVector, a: NonZeroVector, a_tilde: FieldVector) -> Self {
        LeftParty {
            l,
            a,
            a_tilde,
            v: None,
            v_tilde: None,
        }
    }

    /// Step 2.
    pub fn send_v(&mut self, channel: &mut dyn Channel) -> Result<()> {
        let v = self.l.inverses()?.hadamard(&self.a)?;
        channel.send(Direction::LeftToRight, v.clone());
        self.v = Some(v);
        Ok(())
    }

    /// Steps 6 and 7. `None` means the attempt must restart.
    pub fn receive_v_tilde(&mut self, channel: &mut dyn Channel) -> Result<Option<NonZeroVector>> {
        let v_tilde = channel.recv(Direction::RightToLeft)?;
        let x_tilde = v_tilde.hadamard(&self.a_tilde)?;
        let l_prime = self.l.add(&x_tilde)?;
        self.v_tilde = Some(v_tilde);
        Ok(NonZeroVector::try_from(l_prime).ok())
    }

    pub fn into_view(self) -> Result<ViewL> {
        let missing = || Error::Precondition("left party did not finish the attempt".into());
        Ok(ViewL {
            l: self.l,
            a: self.a,
            v: self.v.ok_or_else(missing)?,
            a_tilde: self.a_tilde,
            v_tilde: self.v_tilde.ok_or_else(missing)?,
        })
    }
}

/// Right party state for one attempt.
#[derive(Debug)]
pub struct RightParty {
    r: NonZeroVector,
    b: FieldVector,
    b_tilde: NonZeroVector,
    v: Option<FieldVector>,
    r_prime: Option<NonZeroVector>,
    v_tilde: Option<FieldVector>,
}

impl RightParty {
    pub fn new(r: NonZeroVector, b: FieldVector, b_tilde: NonZeroVector) -> Self {
        RightParty {
            r,
            b,
            b_tilde,
            v: None,
            r_prime: None,
            v_tilde: None,
        }
    }

    /// Steps 3 and 4. `false` means the attempt must restart.
    pub fn receive_v(&mut self, channel: &mut dyn Channel) -> Result<bool> {
        let v = channel.recv(Direction::LeftToRight)?;
        let x = v.hadamard(&self.b)?;
        let r_prime = self.r.add(&x)?;
        self.v = Some(v);
        match NonZeroVector::try_from(r_prime) {
            Ok(r_prime) => {
                self.r_prime = Some(r_prime);
                Ok(true)
            }
            Err(_) => Ok(false),
        }
    }

    /// Step 5.
    pub fn send_v_tilde(&mut self, channel: &mut dyn Channel) -> Result<()> {
        let r_prime = self
            .r_prime
            .as_ref()
            .ok_or_else(|| Error::Precondition("right share not refreshed yet".into()))?;
        let v_tilde = r_prime.inverses()?.hadamard(&self.b_tilde)?;
        channel.send(Direction::RightToLeft, v_tilde.clone());
        self.v_tilde = Some(v_tilde);
        Ok(())
    }

    pub fn into_view(self) -> Result<(ViewR, NonZeroVector)> {
        let missing = || Error::Precondition("right party did not finish the attempt".into());
        Ok((
            ViewR {
                r: self.r,
                b: self.b,
                v: self.v.ok_or_else(missing)?,
                b_tilde: self.b_tilde,
                v_tilde: self.v_tilde.ok_or_else(missing)?,
            },
            self.r_prime.ok_or_else(missing)?,
        ))
    }
}

/// Result of a single attempt on a given oracle sample.
#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)] // built once per attempt, never stored in bulk
pub enum Attempt {
    Accepted {
        output: Encoding,
        view_l: ViewL,
        view_r: ViewR,
    },
    Restart(RestartStep),
}

/// Steps 2 to 7 on a fixed oracle sample.
pub fn run_attempt(
    enc: &Encoding,
    sample: OracleSample,
    channel: &mut dyn Channel,
) -> Result<Attempt> {
    let params = enc.params();
    for v in [&*sample.a, &sample.a_tilde, &sample.b, &*sample.b_tilde] {
        params.check_vector(v)?;
    }
    let OracleSample {
        a,
        a_tilde,
        b,
        b_tilde,
    } = sample;
    let mut left = LeftParty::new(enc.left().clone(), a, a_tilde);
    let mut right = RightParty::new(enc.right().clone(), b, b_tilde);

    left.send_v(channel)?;
    if !right.receive_v(channel)? {
        return Ok(Attempt::Restart(RestartStep::RightShareZero));
    }
    right.send_v_tilde(channel)?;
    let Some(l_prime) = left.receive_v_tilde(channel)? else {
        return Ok(Attempt::Restart(RestartStep::LeftShareZero));
    };

    let view_l = left.into_view()?;
    let (view_r, r_prime) = right.into_view()?;
    Ok(Attempt::Accepted {
        output: Encoding::new(params, l_prime, r_prime)?,
        view_l,
        view_r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RefreshConfig {
    /// Maximum number of restarts before giving up.
    pub restart_cap: u32,
}

impl Default for RefreshConfig {
    fn default() -> Self {
        RefreshConfig {
            restart_cap: DEFAULT_RESTART_CAP,
        }
    }
}

/// Runs the protocol with the default restart cap.
pub fn refresh(
    enc: &Encoding,
    oracle: &mut dyn OracleSampler,
    channel: &mut dyn Channel,
    rng: &mut dyn RngCore,
) -> Result<RefreshTrace> {
    refresh_with(enc, oracle, channel, rng, RefreshConfig::default())
}

/// Uniform oracle, fresh in-memory channel.
pub fn refresh_default(enc: &Encoding, rng: &mut dyn RngCore) -> Result<RefreshTrace> {
    refresh(enc, &mut LeakFreeOracle, &mut MemoryChannel::new(), rng)
}

pub fn refresh_with(
    enc: &Encoding,
    oracle: &mut dyn OracleSampler,
    channel: &mut dyn Channel,
    rng: &mut dyn RngCore,
    config: RefreshConfig,
) -> Result<RefreshTrace> {
    let params = enc.params();
    let mut failed_attempts = Vec::new();
    loop {
        let sample = oracle.draw(params, rng)?;
        let alpha = sample.alpha();
        let start = channel.transcript().len();
        let (attempt, ops) = counter::measure(|| run_attempt(enc, sample, channel));
        let messages = channel.transcript()[start..].to_vec();
        match attempt? {
            Attempt::Accepted {
                output,
                view_l,
                view_r,
            } => {
                return Ok(RefreshTrace {
                    output,
                    view_l,
                    view_r,
                    alpha,
                    restarts: failed_attempts.len() as u32,
                    messages,
                    failed_attempts,
                    op_count: ops,
                })
            }
            Attempt::Restart(step) => {
                failed_attempts.push(FailedAttempt {
                    step,
                    messages,
                    ops,
                });
                if failed_attempts.len() as u64 > config.restart_cap as u64 {
                    return Err(Error::RestartCapExceeded {
                        cap: config.restart_cap,
                    });
                }
            }
        }
    }
}

/// Checks every defining equation of the protocol against a trace:
/// `V = L^{-1} A`, `R' = R + V B`, `V~ = R'^{-1} B~`, `L' = L + V~ A~`,
/// and that both views agree on the exchanged messages.
pub fn verify_views(trace: &RefreshTrace, original: &Encoding) -> bool {
    counter::uncounted(|| views_consistent(&trace.view_l, &trace.view_r, original, &trace.output))
        .unwrap_or(false)
}

pub(crate) fn views_consistent(
    vl: &ViewL,
    vr: &ViewR,
    original: &Encoding,
    output: &Encoding,
) -> Result<bool> {
    let params: FieldParams = original.params();
    if output.params() != params {
        return Ok(false);
    }
    for v in [&vl.v, &vl.a_tilde, &vl.v_tilde, &vr.b, &vr.v, &vr.v_tilde] {
        if params.check_vector(v).is_err() {
            return Ok(false);
        }
    }
    if vl.l != *original.left() || vr.r != *original.right() {
        return Ok(false);
    }
    if vl.v != vr.v || vl.v_tilde != vr.v_tilde {
        return Ok(false);
    }
    let v_ok = vl.l.hadamard(&vl.v)? == *vl.a.as_vector();
    let x = vr.v.hadamard(&vr.b)?;
    let r_ok = vr.r.add(&x)? == *output.right().as_vector();
    let v_tilde_ok = output.right().hadamard(&vr.v_tilde)? == *vr.b_tilde.as_vector();
    let x_tilde = vl.v_tilde.hadamard(&vl.a_tilde)?;
    let l_ok = vl.l.add(&x_tilde)? == *output.left().as_vector();
    Ok(v_ok && r_ok && v_tilde_ok && l_ok)
}
