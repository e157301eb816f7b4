//! Message passing between the two parties.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

impl Direction {
    fn slot(self) -> usize {
        match self {
            Direction::LeftToRight => 0,
            Direction::RightToLeft => 1,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::LeftToRight => "L->R",
            Direction::RightToLeft => "R->L",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Message {
    pub direction: Direction,
    pub payload: FieldVector,
}

/// A bidirectional channel that records every message it carries.
pub trait Channel {
    fn send(&mut self, direction: Direction, payload: FieldVector);
    fn recv(&mut self, direction: Direction) -> Result<FieldVector>;
    /// All messages sent so far, in send order.
    fn transcript(&self) -> &[Message];
}

/// In-process FIFO channel.
#[derive(Debug, Clone, Default)]
pub struct MemoryChannel {
    queues: [VecDeque<FieldVector>; 2],
    transcript: Vec<Message>,
}

impl MemoryChannel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pending(&self, direction: Direction) -> usize {
        self.queues[direction.slot()].len()
    }
}

impl Channel for MemoryChannel {
    fn send(&mut self, direction: Direction, payload: FieldVector) {
        self.transcript.push(Message {
            direction,
            payload: payload.clone(),
        });
        self.queues[direction.slot()].push_back(payload);
    }

    fn recv(&mut self, direction: Direction) -> Result<FieldVector> {
        self.queues[direction.slot()]
            .pop_front()
            .ok_or_else(|| Error::Channel(format!("no pending message {direction}")))
    }

    fn transcript(&self) -> &[Message] {
        &self.transcript
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;

    #[test]
    fn fifo_per_direction_and_recorded_once() {
        let k = FieldParams::new(11, 1).unwrap();
        let v = |x| k.vector(&[x]).unwrap();
        let mut ch = MemoryChannel::new();
        ch.send(Direction::LeftToRight, v(1));
        ch.send(Direction::RightToLeft, v(2));
        ch.send(Direction::LeftToRight, v(3));
        assert_eq!(ch.recv(Direction::LeftToRight).unwrap(), v(1));
        assert_eq!(ch.recv(Direction::RightToLeft).unwrap(), v(2));
        assert_eq!(ch.recv(Direction::LeftToRight).unwrap(), v(3));
        assert!(ch.recv(Direction::LeftToRight).is_err());
        let dirs: Vec<_> = ch.transcript().iter().map(|m| m.direction).collect();
        assert_eq!(
            dirs,
            [
                Direction::LeftToRight,
                Direction::RightToLeft,
                Direction::LeftToRight
            ]
        );
    }
}
