use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A strictly increasing subset of `{1, …, n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Combination {
    n: usize,
    members: Vec<usize>,
}

impl Combination {
    pub fn new(n: usize, members: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = members.iter().find(|&&x| x == 0 || x > n) {
            return Err(Error::InvalidArgument(format!("{bad} is not in 1..={n}")));
        }
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "members {members:?} are not strictly increasing"
            )));
        }
        Ok(Self { n, members })
    }

    /// Sorts first; duplicates are rejected.
    pub fn from_unsorted(n: usize, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        Self::new(n, members)
    }

    pub fn empty(n: usize) -> Self {
        Self { n, members: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Self {
            n,
            members: (1..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    fn filtered(&self, keep: impl Fn(usize) -> bool) -> Self {
        Self {
            n: self.n,
            members: (1..=self.n).filter(|&x| keep(x)).collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.filtered(|x| self.contains(x) || other.contains(x))
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.filtered(|x| self.contains(x) && other.contains(x))
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.filtered(|x| self.contains(x) && !other.contains(x))
    }

    pub fn complement(&self) -> Self {
        self.filtered(|x| !self.contains(x))
    }

    pub fn with(&self, x: usize) -> Self {
        self.filtered(|y| y == x || self.contains(y))
    }

    pub fn without(&self, x: usize) -> Self {
        self.filtered(|y| y != x && self.contains(y))
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.members.iter().all(|&x| !other.contains(x))
    }

    /// Position among all `C(n, len)` combinations in lexicographic order.
    pub fn rank(&self) -> usize {
        let r = self.len();
        let mut rank = 0;
        let mut prev = 0;
        for (pos, &m) in self.members.iter().enumerate() {
            for v in prev + 1..m {
                rank += binomial(self.n - v, r - pos - 1);
            }
            prev = m;
        }
        rank
    }

    pub fn unrank(n: usize, r: usize, mut rank: usize) -> Result<Self> {
        if r > n || rank >= binomial(n, r) {
            return Err(Error::InvalidArgument(format!(
                "rank {rank} out of range for C({n},{r})"
            )));
        }
        let mut members = Vec::with_capacity(r);
        let mut v = 1;
        for pos in 0..r {
            loop {
                let block = binomial(n - v, r - pos - 1);
                if rank < block {
                    break;
                }
                rank -= block;
                v += 1;
            }
            members.push(v);
            v += 1;
        }
        Ok(Self { n, members })
    }
}

impl fmt::Display for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.members.iter().map(|m| m.to_string()).collect();
        write!(f, "{{{}}}", body.join(","))
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// All `r`-subsets of `{1, …, n}` in lexicographic order.
pub fn combinations(n: usize, r: usize) -> Result<Vec<Combination>> {
    if r > n {
        return Err(Error::InvalidArgument(format!("cannot choose {r} of {n}")));
    }
    let mut out = Vec::with_capacity(binomial(n, r));
    let mut cur: Vec<usize> = (1..=r).collect();
    loop {
        out.push(Combination {
            n,
            members: cur.clone(),
        });
        let Some(pos) = (0..r).rev().find(|&p| cur[p] < n - (r - 1 - p)) else {
            return Ok(out);
        };
        cur[pos] += 1;
        for q in pos + 1..r {
            cur[q] = cur[q - 1] + 1;
        }
    }
}
