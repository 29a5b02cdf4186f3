//! `S_k` acting on labelled graphs and pair-rooted graphs.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use super::code::{pair_count, pair_from_index, GraphCode};
use super::perm::{act_with_table, Perm};
use crate::error::{Error, Result};

/// Largest order for which `S_k` is enumerated explicitly.
pub const PERM_LIMIT: usize = 8;

pub(crate) struct PermEntry {
    pub perm: Perm,
    pub table: Vec<u8>,
}

/// All permutations of order `k` with precomputed pair tables, cached.
pub(crate) fn perms(k: usize) -> Result<&'static [PermEntry]> {
    static CACHE: [OnceLock<Vec<PermEntry>>; PERM_LIMIT + 1] = [const { OnceLock::new() }; PERM_LIMIT + 1];
    if k == 0 || k > PERM_LIMIT {
        return Err(Error::CapExceeded { order: k, cap: PERM_LIMIT });
    }
    Ok(CACHE[k].get_or_init(|| {
        Perm::all(k)
            .into_iter()
            .map(|perm| {
                let table = perm.pair_table();
                PermEntry { perm, table }
            })
            .collect()
    }))
}

/// A labelled graph with an ordered pair of distinct roots `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootedPairGraph {
    pub graph: GraphCode,
    pub a: usize,
    pub b: usize,
}

impl RootedPairGraph {
    pub fn new(graph: GraphCode, a: usize, b: usize) -> Result<Self> {
        let k = graph.order();
        if a == b || a >= k || b >= k {
            return Err(Error::Invalid(format!("roots ({a},{b}) invalid at order {k}")));
        }
        Ok(RootedPairGraph { graph, a, b })
    }

    pub fn order(&self) -> usize {
        self.graph.order()
    }

    /// Whether the root pair `ab` is an edge.
    pub fn roots_adjacent(&self) -> bool {
        self.graph.has_edge(self.a, self.b)
    }

    /// Every element of `G_k`, ordered by `(bits, a, b)`.
    pub fn all(k: usize) -> impl Iterator<Item = RootedPairGraph> {
        GraphCode::all(k).flat_map(move |g| {
            (0..k).flat_map(move |a| {
                (0..k).filter(move |&b| b != a).map(move |b| RootedPairGraph { graph: g, a, b })
            })
        })
    }
}

impl fmt::Display for RootedPairGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.graph.bits(), self.a + 1, self.b + 1)
    }
}

/// `σ · F^{a,b} = (σ·F)^{σ(a),σ(b)}`.
pub fn apply_perm(sigma: &Perm, g: &RootedPairGraph) -> Result<RootedPairGraph> {
    if sigma.len() != g.order() {
        return Err(Error::Invalid(format!(
            "permutation of length {} applied at order {}",
            sigma.len(),
            g.order()
        )));
    }
    Ok(RootedPairGraph { graph: sigma.act(g.graph), a: sigma.apply(g.a), b: sigma.apply(g.b) })
}

/// An isomorphism class `J` of pair-rooted graphs, named by its minimal member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitClass {
    pub canon: RootedPairGraph,
    pub size: usize,
}

/// Serialized class key: `{"code", "a", "b"}` with 1-based roots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassKey {
    pub code: u64,
    pub a: usize,
    pub b: usize,
}

impl From<&RootedPairGraph> for ClassKey {
    fn from(g: &RootedPairGraph) -> Self {
        ClassKey { code: g.graph.bits(), a: g.a + 1, b: g.b + 1 }
    }
}

fn memo() -> &'static Mutex<HashMap<RootedPairGraph, OrbitClass>> {
    static MEMO: OnceLock<Mutex<HashMap<RootedPairGraph, OrbitClass>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// Canonical class: the `(bits, a, b)`-minimal image over all of `S_k`.
pub fn canonical_class(g: &RootedPairGraph) -> Result<OrbitClass> {
    if let Some(c) = memo().lock().unwrap().get(g) {
        return Ok(*c);
    }
    let k = g.order();
    if k < 2 {
        return Err(Error::Invalid("no root pairs below order 2".into()));
    }
    let mut images = BTreeSet::new();
    for e in perms(k)? {
        let img = RootedPairGraph {
            graph: GraphCode::from_raw(k, act_with_table(&e.table, g.graph.bits())),
            a: e.perm.apply(g.a),
            b: e.perm.apply(g.b),
        };
        images.insert(img);
    }
    let class = OrbitClass { canon: *images.first().unwrap(), size: images.len() };
    memo().lock().unwrap().insert(*g, class);
    Ok(class)
}

/// Dense lookup from every element of `G_k` to its class.
pub struct ClassTable {
    order: usize,
    classes: Vec<OrbitClass>,
    index: Vec<u32>,
}

impl ClassTable {
    /// Cached table for order `k`, built on first use.
    pub fn get(k: usize, cap: usize) -> Result<Arc<ClassTable>> {
        if k > cap {
            return Err(Error::CapExceeded { order: k, cap });
        }
        if k == 0 || k > PERM_LIMIT {
            return Err(Error::CapExceeded { order: k, cap: cap.min(PERM_LIMIT) });
        }
        static TABLES: OnceLock<RwLock<HashMap<usize, Arc<ClassTable>>>> = OnceLock::new();
        let tables = TABLES.get_or_init(Default::default);
        if let Some(t) = tables.read().unwrap().get(&k) {
            return Ok(t.clone());
        }
        let table = Arc::new(Self::build(k)?);
        tables.write().unwrap().insert(k, table.clone());
        Ok(table)
    }

    fn build(k: usize) -> Result<Self> {
        let pairs = k * (k - 1);
        let total = (GraphCode::mask(k) as usize + 1) * pairs;
        let mut index = vec![u32::MAX; total];
        let mut classes = Vec::new();
        if pairs == 0 {
            return Ok(ClassTable { order: k, classes, index });
        }
        let group = perms(k)?;
        // Elements are visited in (bits, a, b) order, so the first unassigned
        // element of an orbit is its minimum.
        for slot in 0..total {
            if index[slot] != u32::MAX {
                continue;
            }
            let g = Self::element(k, slot);
            let id = classes.len() as u32;
            let mut size = 0;
            for e in group {
                let img = Self::slot(
                    k,
                    act_with_table(&e.table, g.graph.bits()),
                    e.perm.apply(g.a),
                    e.perm.apply(g.b),
                );
                if index[img] == u32::MAX {
                    index[img] = id;
                    size += 1;
                }
            }
            classes.push(OrbitClass { canon: g, size });
        }
        Ok(ClassTable { order: k, classes, index })
    }

    #[inline]
    fn root_slot(k: usize, a: usize, b: usize) -> usize {
        a * (k - 1) + if b < a { b } else { b - 1 }
    }

    #[inline]
    fn slot(k: usize, bits: u64, a: usize, b: usize) -> usize {
        bits as usize * k * (k - 1) + Self::root_slot(k, a, b)
    }

    fn element(k: usize, slot: usize) -> RootedPairGraph {
        let pairs = k * (k - 1);
        let bits = (slot / pairs) as u64;
        let r = slot % pairs;
        let a = r / (k - 1);
        let b0 = r % (k - 1);
        let b = if b0 < a { b0 } else { b0 + 1 };
        RootedPairGraph { graph: GraphCode::from_raw(k, bits), a, b }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Classes sorted by canonical representative.
    pub fn classes(&self) -> &[OrbitClass] {
        &self.classes
    }

    /// Position of the class containing `g` within [`classes`](Self::classes).
    #[inline]
    pub fn class_index(&self, g: &RootedPairGraph) -> usize {
        debug_assert_eq!(g.order(), self.order);
        self.index[Self::slot(self.order, g.graph.bits(), g.a, g.b)] as usize
    }

    #[inline]
    pub(crate) fn class_index_raw(&self, bits: u64, a: usize, b: usize) -> usize {
        self.index[Self::slot(self.order, bits, a, b)] as usize
    }

    pub fn class_of(&self, g: &RootedPairGraph) -> OrbitClass {
        self.classes[self.class_index(g)]
    }
}

/// The isomorphism classes `J_k`, sorted by canonical representative.
pub fn enumerate_classes(k: usize, cap: usize) -> Result<Vec<OrbitClass>> {
    Ok(ClassTable::get(k, cap)?.classes().to_vec())
}

/// Distinct images of `F` under `S_k`.
pub fn graph_orbit(f: GraphCode) -> Result<Vec<GraphCode>> {
    let k = f.order();
    let set: BTreeSet<u64> = perms(k)?.iter().map(|e| act_with_table(&e.table, f.bits())).collect();
    Ok(set.into_iter().map(|b| GraphCode::from_raw(k, b)).collect())
}

/// Distinct images of the pair `(F, H)` under the diagonal action of `S_k`.
pub fn pair_orbit(f: GraphCode, h: GraphCode) -> Result<Vec<(GraphCode, GraphCode)>> {
    let k = f.order();
    let set: BTreeSet<(u64, u64)> = perms(k)?
        .iter()
        .map(|e| (act_with_table(&e.table, f.bits()), act_with_table(&e.table, h.bits())))
        .collect();
    Ok(set
        .into_iter()
        .map(|(a, b)| (GraphCode::from_raw(k, a), GraphCode::from_raw(k, b)))
        .collect())
}

/// Canonical representative of the orbit of `(F, H)`.
pub fn pair_orbit_canon(f: GraphCode, h: GraphCode) -> Result<(GraphCode, GraphCode)> {
    let k = f.order();
    let best = perms(k)?
        .iter()
        .map(|e| (act_with_table(&e.table, f.bits()), act_with_table(&e.table, h.bits())))
        .min()
        .unwrap();
    Ok((GraphCode::from_raw(k, best.0), GraphCode::from_raw(k, best.1)))
}

/// The stabilizer `S_F` of a graph.
pub fn stabilizer(f: GraphCode) -> Result<Vec<Perm>> {
    Ok(perms(f.order())?
        .iter()
        .filter(|e| act_with_table(&e.table, f.bits()) == f.bits())
        .map(|e| e.perm.clone())
        .collect())
}

/// Orbits of unordered pairs (as pair indices) under a permutation group,
/// sorted by smallest member.
pub fn pair_orbits(k: usize, group: &[Perm]) -> Vec<Vec<usize>> {
    let n = pair_count(k);
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for p in 0..n {
        if seen[p] {
            continue;
        }
        let (i, j) = pair_from_index(p);
        let mut orbit: BTreeSet<usize> = BTreeSet::new();
        for s in group {
            orbit.insert(super::code::pair_index(s.apply(i), s.apply(j)));
        }
        for &q in &orbit {
            seen[q] = true;
        }
        out.push(orbit.into_iter().collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rpg(k: usize, bits: u64, a: usize, b: usize) -> RootedPairGraph {
        RootedPairGraph::new(GraphCode::new(k, bits).unwrap(), a - 1, b - 1).unwrap()
    }

    #[test]
    fn apply_perm_examples() {
        let g = rpg(3, 1, 1, 2);
        assert_eq!(apply_perm(&Perm::identity(3), &g).unwrap(), g);
        let swap23 = Perm::from_one_based(&[1, 3, 2]).unwrap();
        assert_eq!(apply_perm(&swap23, &g).unwrap(), rpg(3, 2, 1, 3));
        let cycle = Perm::from_one_based(&[2, 3, 1]).unwrap();
        assert_eq!(apply_perm(&cycle, &rpg(3, 7, 1, 2)).unwrap(), rpg(3, 7, 2, 3));
        assert!(apply_perm(&Perm::identity(4), &g).is_err());
    }

    #[test]
    fn canonical_examples() {
        let c = canonical_class(&rpg(3, 7, 2, 3)).unwrap();
        assert_eq!(c.canon, rpg(3, 7, 1, 2));
        assert_eq!(c.size, 6);
        let e = canonical_class(&rpg(3, 0, 1, 2)).unwrap();
        assert_eq!((e.canon, e.size), (rpg(3, 0, 1, 2), 6));
    }

    #[test]
    fn class_counts_small_orders() {
        assert!(enumerate_classes(1, 6).unwrap().is_empty());
        let two = enumerate_classes(2, 6).unwrap();
        assert_eq!(two.len(), 2);
        assert!(two.iter().all(|c| c.size == 2));
        let three = enumerate_classes(3, 6).unwrap();
        assert_eq!(three.len(), 8);
        assert_eq!(three.iter().map(|c| c.size).sum::<usize>(), 48);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(enumerate_classes(7, 6), Err(Error::CapExceeded { order: 7, cap: 6 })));
    }

    #[test]
    fn table_agrees_with_brute_force_at_order_four() {
        let table = ClassTable::get(4, 6).unwrap();
        for g in RootedPairGraph::all(4) {
            assert_eq!(table.class_of(&g), canonical_class(&g).unwrap());
        }
    }

    #[test]
    fn stabilizer_and_pair_orbits() {
        // single edge {1,2} at k = 4: S_F = <(12),(34)>, pair orbits {12},{34},{13,14,23,24}
        let f = GraphCode::from_edges(4, &[(0, 1)]).unwrap();
        let stab = stabilizer(f).unwrap();
        assert_eq!(stab.len(), 4);
        let mut sizes: Vec<usize> = pair_orbits(4, &stab).iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 1, 4]);
        assert_eq!(graph_orbit(f).unwrap().len(), 6);
        assert_eq!(pair_orbit(f, GraphCode::empty(4)).unwrap().len(), 6);
    }
}
