//! The admissible class profiles `I(v)` and the pair-set arithmetic used to
//! combine profiles of ingredient designs.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Number of 4-cycle classes `r` and 3-star classes `s` of a resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassPair {
    pub r: u32,
    pub s: u32,
}

impl ClassPair {
    pub const fn new(r: u32, s: u32) -> Self {
        ClassPair { r, s }
    }

    /// The member of `I(v)` with `4x` star classes. Does not check range.
    pub fn from_index(v: u32, x: u32) -> Self {
        ClassPair::new(v - 1 - 3 * x, 4 * x)
    }

    /// `x = s / 4` when `s` is a multiple of four.
    pub fn star_index(&self) -> Option<u32> {
        (self.s % 4 == 0).then_some(self.s / 4)
    }

    pub fn total(&self) -> u32 {
        self.r + self.s
    }
}

impl std::ops::Add for ClassPair {
    type Output = ClassPair;

    fn add(self, rhs: ClassPair) -> ClassPair {
        ClassPair::new(self.r + rhs.r, self.s + rhs.s)
    }
}

impl fmt::Display for ClassPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r, self.s)
    }
}

/// A finite set of profiles.
pub type PairSet = BTreeSet<ClassPair>;

/// `I(v)` listed extensionally, in decreasing-`r` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumSet {
    pub v: u32,
    pub pairs: Vec<ClassPair>,
}

impl SpectrumSet {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn contains(&self, p: ClassPair) -> bool {
        self.pairs.contains(&p)
    }

    pub fn to_set(&self) -> PairSet {
        self.pairs.iter().copied().collect()
    }
}

/// Largest `x` allowed for order `v`, or `None` when `v` is not a positive
/// multiple of four.
pub fn max_star_index(v: u32) -> Option<u32> {
    if v == 0 || v % 4 != 0 {
        return None;
    }
    let numerator = match v % 12 {
        0 => v - 3,
        4 => v - 1,
        8 => v - 2,
        _ => unreachable!("v is a multiple of 4"),
    };
    assert_eq!(numerator % 3, 0, "range bound must be integral for v = {v}");
    Some(numerator / 3)
}

pub fn spectrum_set(v: u32) -> SpectrumSet {
    let pairs = match max_star_index(v) {
        Some(hi) => (0..=hi).map(|x| ClassPair::from_index(v, x)).collect(),
        None => Vec::new(),
    };
    SpectrumSet { v, pairs }
}

pub fn admissible(v: u32, p: ClassPair) -> bool {
    match max_star_index(v) {
        Some(hi) => p.s % 4 == 0 && p.s / 4 <= hi && p == ClassPair::from_index(v, p.s / 4),
        None => false,
    }
}

/// `X + Y`: all componentwise sums.
pub fn sum_sets(x: &PairSet, y: &PairSet) -> PairSet {
    x.iter()
        .flat_map(|a| y.iter().map(move |b| *a + *b))
        .collect()
}

/// `h * X`: all sums of `h` elements of `X`, repetition allowed.
pub fn multiple(h: u32, x: &PairSet) -> PairSet {
    assert!(h >= 1, "multiple needs h >= 1");
    let mut acc = x.clone();
    for _ in 1..h {
        acc = sum_sets(&acc, x);
    }
    acc
}

pub fn pair_set<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> PairSet {
    pairs.into_iter().map(|(r, s)| ClassPair::new(r, s)).collect()
}
