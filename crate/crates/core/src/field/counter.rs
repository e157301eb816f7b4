//! Per-thread field operation counting.
//!
//! Every arithmetic operation on [`FieldElement`](super::FieldElement)
//! bumps a thread-local tally. A counting scope is opened with
//! [`measure`], which reports the difference between the tallies before and
//! after the closure ran. Scopes therefore never observe operations from
//! other threads, and concurrent runs on different threads do not interfere.

use std::cell::Cell;
use std::fmt;
use std::ops::{Add, AddAssign, Sub};

/// Counts of additions (including subtractions), multiplications and
/// inversions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OpCounter {
    pub adds: u64,
    pub muls: u64,
    pub invs: u64,
}

impl OpCounter {
    pub fn total(&self) -> u64 {
        self.adds + self.muls + self.invs
    }
}

impl Add for OpCounter {
    type Output = OpCounter;

    fn add(self, rhs: OpCounter) -> OpCounter {
        OpCounter {
            adds: self.adds + rhs.adds,
            muls: self.muls + rhs.muls,
            invs: self.invs + rhs.invs,
        }
    }
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, rhs: OpCounter) {
        *self = *self + rhs;
    }
}

impl Sub for OpCounter {
    type Output = OpCounter;

    fn sub(self, rhs: OpCounter) -> OpCounter {
        OpCounter {
            adds: self.adds - rhs.adds,
            muls: self.muls - rhs.muls,
            invs: self.invs - rhs.invs,
        }
    }
}

impl fmt::Display for OpCounter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "adds={} muls={} invs={} total={}",
            self.adds,
            self.muls,
            self.invs,
            self.total()
        )
    }
}

thread_local! {
    static TALLY: Cell<OpCounter> = const { Cell::new(OpCounter { adds: 0, muls: 0, invs: 0 }) };
    static SUSPENDED: Cell<u32> = const { Cell::new(0) };
}

#[inline]
fn bump(update: impl FnOnce(&mut OpCounter)) {
    if SUSPENDED.with(Cell::get) > 0 {
        return;
    }
    TALLY.with(|t| {
        let mut c = t.get();
        update(&mut c);
        t.set(c);
    });
}

#[inline]
pub(crate) fn record_add() {
    bump(|c| c.adds += 1);
}

#[inline]
pub(crate) fn record_mul() {
    bump(|c| c.muls += 1);
}

#[inline]
pub(crate) fn record_inv() {
    bump(|c| c.invs += 1);
}

/// Cumulative tally for the current thread.
pub fn snapshot() -> OpCounter {
    TALLY.with(Cell::get)
}

/// Runs `f` and returns the operations it performed on this thread.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, OpCounter) {
    let before = snapshot();
    let out = f();
    (out, snapshot() - before)
}

/// Runs `f` without counting any of its operations.
///
/// Used for the trusted oracle and for diagnostics that are not part of a
/// party's computation.
pub fn uncounted<T>(f: impl FnOnce() -> T) -> T {
    struct Resume;
    impl Drop for Resume {
        fn drop(&mut self) {
            SUSPENDED.with(|s| s.set(s.get() - 1));
        }
    }
    SUSPENDED.with(|s| s.set(s.get() + 1));
    let _resume = Resume;
    f()
}
