use std::fmt;

use super::code::{pair_count, pair_from_index, pair_index, GraphCode};
use crate::error::{Error, Result};

/// A permutation of `{0, .., k-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm {
    images: Vec<u8>,
}

impl Perm {
    pub fn identity(k: usize) -> Self {
        Perm { images: (0..k as u8).collect() }
    }

    pub fn new(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &i in &images {
            if i >= k || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Invalid(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Perm { images: images.into_iter().map(|i| i as u8).collect() })
    }

    /// Builds a permutation from 1-based images, e.g. `[1, 3, 2]` for `(2 3)`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::Invalid("1-based permutation contains 0".into()));
        }
        Self::new(images.iter().map(|&i| i - 1).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm { images: other.images.iter().map(|&i| self.images[i as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Perm { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j as usize)
    }

    /// Relabels a graph: `σ(i)σ(j)` is an edge of `σ·F` iff `ij` is an edge of `F`.
    #[inline]
    pub fn act(&self, g: GraphCode) -> GraphCode {
        GraphCode::from_raw(g.order(), self.act_bits(g.bits()))
    }

    #[inline]
    pub(crate) fn act_bits(&self, mut bits: u64) -> u64 {
        let mut out = 0u64;
        while bits != 0 {
            let p = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let (i, j) = pair_from_index(p);
            out |= 1 << pair_index(self.apply(i), self.apply(j));
        }
        out
    }

    /// Image of every pair index, for repeated application.
    pub(crate) fn pair_table(&self) -> Vec<u8> {
        (0..pair_count(self.len()))
            .map(|p| {
                let (i, j) = pair_from_index(p);
                pair_index(self.apply(i), self.apply(j)) as u8
            })
            .collect()
    }

    /// All `k!` permutations in lexicographic order of image vectors.
    pub fn all(k: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (0..k as u8).collect();
        loop {
            out.push(Perm { images: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
            let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

/// Applies a table from [`Perm::pair_table`] to an edge mask.
#[inline]
pub(crate) fn act_with_table(table: &[u8], mut bits: u64) -> u64 {
    let mut out = 0u64;
    while bits != 0 {
        let p = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        out |= 1 << table[p];
    }
    out
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_based: Vec<String> = self.images.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "[{}]", one_based.join(" "))
    }
}
