//! Subsets of the coordinate axes of the cube.
//!
//! Axes are stored 0-based and strictly increasing; display and parsing use
//! the 1-based convention of the reports (`{1,3}` means the first and third
//! axes).

use std::fmt;

use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet {
    n: usize,
    members: Vec<usize>,
}

impl IndexSet {
    /// A subset of `{0, .., n-1}`; members are sorted and deduplicated.
    pub fn new(n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut m: Vec<usize> = members.into_iter().collect();
        m.sort_unstable();
        m.dedup();
        if let Some(&bad) = m.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        Ok(Self { n, members: m })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            members: Vec::new(),
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            n,
            members: (0..n).collect(),
        }
    }

    pub fn singleton(n: usize, i: usize) -> Result<Self> {
        Self::new(n, [i])
    }

    /// Builds from 1-based axis labels, as used on the command line.
    pub fn from_one_based(n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut m = Vec::new();
        for i in members {
            if i == 0 {
                return Err(Error::IndexOutOfRange { index: 0, n });
            }
            m.push(i - 1);
        }
        Self::new(n, m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn card(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    /// Position of `i` within the sorted member list.
    pub fn position_of(&self, i: usize) -> Option<usize> {
        self.members.binary_search(&i).ok()
    }

    fn assert_same_n(&self, other: &Self) {
        assert_eq!(self.n, other.n, "index sets over different dimensions");
    }

    pub fn union(&self, other: &Self) -> Self {
        self.assert_same_n(other);
        Self::new(self.n, self.iter().chain(other.iter())).expect("members already in range")
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.assert_same_n(other);
        Self::new(self.n, self.iter().filter(|i| other.contains(*i))).expect("in range")
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.assert_same_n(other);
        Self::new(self.n, self.iter().filter(|i| !other.contains(*i))).expect("in range")
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        self.assert_same_n(other);
        let from_self = self.iter().filter(|i| !other.contains(*i));
        let from_other = other.iter().filter(|i| !self.contains(*i));
        Self::new(self.n, from_self.chain(from_other)).expect("in range")
    }

    pub fn complement(&self) -> Self {
        Self::new(self.n, (0..self.n).filter(|i| !self.contains(*i))).expect("in range")
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.assert_same_n(other);
        !self.iter().any(|i| other.contains(i))
    }

    pub fn with_member(&self, i: usize) -> Result<Self> {
        Self::new(self.n, self.iter().chain([i]))
    }

    /// Image under an axis map, staying in the same ambient dimension.
    pub fn map_members(&self, f: impl Fn(usize) -> usize) -> Result<Self> {
        Self::new(self.n, self.iter().map(f))
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.members.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.members.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
