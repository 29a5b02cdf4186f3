use std::fmt;

use crate::error::{Error, Result};

/// Largest order whose edge set fits the 64-bit code.
pub const MAX_ORDER: usize = 11;

/// Number of unordered pairs on `k` vertices.
pub const fn pair_count(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Colexicographic bit index of the pair `{i, j}` (0-based, `i != j`).
///
/// Pairs inside `[0, k)` occupy exactly the low `C(k,2)` bits, so a code of
/// order `k` denotes the same edge set when read at any larger order.
#[inline]
pub fn pair_index(i: usize, j: usize) -> usize {
    debug_assert_ne!(i, j);
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    hi * (hi - 1) / 2 + lo
}

/// Inverse of [`pair_index`]: returns `(lo, hi)` with `lo < hi`.
pub fn pair_from_index(idx: usize) -> (usize, usize) {
    let mut hi = 1;
    while pair_count(hi + 1) <= idx {
        hi += 1;
    }
    (idx - pair_count(hi), hi)
}

/// A labelled graph on `{0, .., order-1}` stored as an edge bitmask.
///
/// Text and file formats show vertices 1-based, matching the usual `[k]`
/// labelling; the in-memory API is 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphCode {
    order: u8,
    bits: u64,
}

impl GraphCode {
    pub fn new(order: usize, bits: u64) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::UnsupportedOrder(order));
        }
        if bits & !Self::mask(order) != 0 {
            return Err(Error::Invalid(format!(
                "code {bits} has bits beyond the {} pairs of order {order}",
                pair_count(order)
            )));
        }
        Ok(GraphCode { order: order as u8, bits })
    }

    #[inline]
    pub(crate) fn from_raw(order: usize, bits: u64) -> Self {
        debug_assert!(bits & !Self::mask(order) == 0);
        GraphCode { order: order as u8, bits }
    }

    /// Bitmask of all pairs at this order.
    pub fn mask(order: usize) -> u64 {
        let n = pair_count(order);
        if n >= 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    pub fn empty(order: usize) -> Self {
        Self::from_raw(order, 0)
    }

    pub fn complete(order: usize) -> Self {
        Self::from_raw(order, Self::mask(order))
    }

    pub fn from_edges(order: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut bits = 0u64;
        for &(i, j) in edges {
            if i == j || i >= order || j >= order {
                return Err(Error::Invalid(format!("bad edge ({i},{j}) at order {order}")));
            }
            bits |= 1 << pair_index(i, j);
        }
        Self::new(order, bits)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order as usize
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.bits >> pair_index(i, j) & 1 == 1
    }

    pub fn with_edge(self, i: usize, j: usize) -> Self {
        Self::from_raw(self.order(), self.bits | 1 << pair_index(i, j))
    }

    pub fn without_edge(self, i: usize, j: usize) -> Self {
        Self::from_raw(self.order(), self.bits & !(1 << pair_index(i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn complement(&self) -> Self {
        Self::from_raw(self.order(), !self.bits & Self::mask(self.order()))
    }

    /// Edges as `(lo, hi)` pairs in colex order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..pair_count(self.order()))
            .filter(|&p| self.bits >> p & 1 == 1)
            .map(pair_from_index)
    }

    /// Induced subgraph on the first `k` vertices.
    pub fn restrict(&self, k: usize) -> Self {
        debug_assert!(k <= self.order());
        Self::from_raw(k, self.bits & Self::mask(k))
    }

    /// The same edge set read at a larger order.
    pub fn widen(&self, order: usize) -> Self {
        debug_assert!(order >= self.order());
        Self::from_raw(order, self.bits)
    }

    /// Neighbourhood of `v` as a bitmask over vertices.
    pub fn neighbours(&self, v: usize) -> u32 {
        (0..self.order())
            .filter(|&u| u != v && self.has_edge(u, v))
            .fold(0, |acc, u| acc | 1 << u)
    }

    /// All graphs of the given order in increasing code order.
    pub fn all(order: usize) -> impl Iterator<Item = GraphCode> {
        (0..=Self::mask(order)).map(move |b| Self::from_raw(order, b))
    }
}

impl fmt::Display for GraphCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.bits, self.order)
    }
}
