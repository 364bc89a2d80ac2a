//! Basic-operation accounting.
//!
//! Algorithms charge a plain [`OpCounter`] explicitly; nothing is
//! intercepted. The charging discipline every algorithm in this crate
//! follows:
//!
//! * one `Comparison` per comparison of keys or indices (loop tests included),
//! * one `Arithmetic` per add/sub/mul/div/floor on keys or indices, loop
//!   increments included, and one per PRNG draw,
//! * one `Power` per exponentiation,
//! * one `Logical` per boolean connective,
//! * one `Assignment` per write to a variable or array slot,
//! * one `MemoryAccess` per array-element read.
//!
//! Appending to a growable array costs one `Assignment` and one
//! `MemoryAccess`; reallocation is not charged.

use std::fmt;
use std::ops::{Add, AddAssign, Index};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Arithmetic,
    Power,
    Comparison,
    Logical,
    Assignment,
    MemoryAccess,
}

impl OpKind {
    pub const ALL: [OpKind; 6] = [
        OpKind::Arithmetic,
        OpKind::Power,
        OpKind::Comparison,
        OpKind::Logical,
        OpKind::Assignment,
        OpKind::MemoryAccess,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpKind::Arithmetic => "arithmetic",
            OpKind::Power => "power",
            OpKind::Comparison => "comparison",
            OpKind::Logical => "logical",
            OpKind::Assignment => "assignment",
            OpKind::MemoryAccess => "memory_access",
        }
    }

    #[inline]
    const fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-kind tallies of basic operations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OpCounter {
    tallies: [u64; 6],
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `n` operations of `kind`.
    ///
    /// Panics if the tally would overflow a `u64`.
    #[inline]
    pub fn charge(&mut self, kind: OpKind, n: u64) {
        let slot = &mut self.tallies[kind.slot()];
        *slot = slot
            .checked_add(n)
            .unwrap_or_else(|| panic!("{kind} tally overflowed"));
    }

    #[inline]
    pub fn get(&self, kind: OpKind) -> u64 {
        self.tallies[kind.slot()]
    }

    pub fn total(&self) -> u64 {
        self.tallies
            .iter()
            .try_fold(0u64, |acc, &t| acc.checked_add(t))
            .expect("operation total overflowed")
    }

    pub fn merge(&self, other: &OpCounter) -> OpCounter {
        let mut out = *self;
        out.absorb(other);
        out
    }

    pub fn absorb(&mut self, other: &OpCounter) {
        for kind in OpKind::ALL {
            self.charge(kind, other.get(kind));
        }
    }

    pub fn reset(&mut self) {
        self.tallies = [0; 6];
    }

    pub fn snapshot(&self) -> OpSnapshot {
        OpSnapshot {
            arithmetic: self.get(OpKind::Arithmetic),
            power: self.get(OpKind::Power),
            comparison: self.get(OpKind::Comparison),
            logical: self.get(OpKind::Logical),
            assignment: self.get(OpKind::Assignment),
            memory_access: self.get(OpKind::MemoryAccess),
            total: self.total(),
        }
    }

    // Shorthands used throughout the instrumented algorithms.

    #[inline]
    pub fn arith(&mut self, n: u64) {
        self.charge(OpKind::Arithmetic, n)
    }

    #[inline]
    pub fn pow(&mut self, n: u64) {
        self.charge(OpKind::Power, n)
    }

    #[inline]
    pub fn cmp(&mut self, n: u64) {
        self.charge(OpKind::Comparison, n)
    }

    #[inline]
    pub fn logic(&mut self, n: u64) {
        self.charge(OpKind::Logical, n)
    }

    #[inline]
    pub fn assign(&mut self, n: u64) {
        self.charge(OpKind::Assignment, n)
    }

    #[inline]
    pub fn read(&mut self, n: u64) {
        self.charge(OpKind::MemoryAccess, n)
    }

    /// One iteration of a counted loop: the bound test, the increment and
    /// the write-back of the induction variable.
    #[inline]
    pub fn loop_step(&mut self) {
        self.cmp(1);
        self.arith(1);
        self.assign(1);
    }

    /// `iters` iterations of a counted loop plus its final failing test.
    #[inline]
    pub fn loop_steps(&mut self, iters: u64) {
        self.cmp(iters + 1);
        self.arith(iters);
        self.assign(iters + 1);
    }
}

impl Index<OpKind> for OpCounter {
    type Output = u64;

    fn index(&self, kind: OpKind) -> &u64 {
        &self.tallies[kind.slot()]
    }
}

impl Add for OpCounter {
    type Output = OpCounter;

    fn add(self, rhs: OpCounter) -> OpCounter {
        self.merge(&rhs)
    }
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, rhs: OpCounter) {
        self.absorb(&rhs);
    }
}

impl std::iter::Sum for OpCounter {
    fn sum<I: Iterator<Item = OpCounter>>(iter: I) -> Self {
        iter.fold(OpCounter::new(), |acc, c| acc + c)
    }
}

/// Serialized form of a counter: the six tallies plus their total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpSnapshot {
    pub arithmetic: u64,
    pub power: u64,
    pub comparison: u64,
    pub logical: u64,
    pub assignment: u64,
    pub memory_access: u64,
    pub total: u64,
}

impl Serialize for OpCounter {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.snapshot().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OpCounter {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = OpSnapshot::deserialize(deserializer)?;
        let mut c = OpCounter::new();
        c.arith(s.arithmetic);
        c.pow(s.power);
        c.cmp(s.comparison);
        c.logic(s.logical);
        c.assign(s.assignment);
        c.read(s.memory_access);
        if c.total() != s.total {
            return Err(serde::de::Error::custom("total does not match the tallies"));
        }
        Ok(c)
    }
}
