use crate::error::{Error, Result};

/// Undirected simple graph stored as one bitset row per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitGraph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitGraph {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitGraph { n, words, bits: vec![0; n * words] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = BitGraph::new(n);
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(Error::Invalid(format!("bad edge ({}, {})", u + 1, v + 1)));
            }
            g.set_edge(u, v, true);
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn set_edge(&mut self, u: usize, v: usize, on: bool) {
        for (a, b) in [(u, v), (v, u)] {
            let w = &mut self.bits[a * self.words + b / 64];
            if on {
                *w |= 1 << (b % 64);
            } else {
                *w &= !(1 << (b % 64));
            }
        }
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| (u + 1..self.n).filter(move |&v| self.has_edge(u, v)).map(move |v| (u, v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_and_count() {
        let mut g = BitGraph::new(130);
        g.set_edge(0, 129, true);
        g.set_edge(64, 3, true);
        assert!(g.has_edge(129, 0) && g.has_edge(3, 64));
        assert_eq!(g.edge_count(), 2);
        g.set_edge(0, 129, false);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(3, 64)]);
        assert!(BitGraph::from_edges(3, &[(1, 1)]).is_err());
    }
}
