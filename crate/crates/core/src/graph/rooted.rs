//! Rooted graphs of arbitrary size: twins, twinfree versions, blowups and
//! root-respecting relation-preserving maps.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple graph with an ordered list of distinct roots.
///
/// Vertices are `0..n` internally and carry display labels for file I/O.
/// The root order is the order of [`roots`](Self::roots).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedGraph {
    labels: Vec<String>,
    adj: Vec<BTreeSet<usize>>,
    roots: Vec<usize>,
}

/// JSON form: `{"vertices": [..], "edges": [[u, v], ..], "roots": [..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootedGraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    #[serde(default)]
    pub roots: Vec<String>,
}

impl RootedGraph {
    pub fn new(labels: Vec<String>, edges: &[(usize, usize)], roots: Vec<usize>) -> Result<Self> {
        let n = labels.len();
        let mut adj = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Invalid(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(Error::Invalid(format!("self-loop at {}", labels[u])));
            }
            adj[u].insert(v);
            adj[v].insert(u);
        }
        let mut seen = BTreeSet::new();
        for &r in &roots {
            if r >= n || !seen.insert(r) {
                return Err(Error::Invalid(format!("root {r} repeated or out of range")));
            }
        }
        Ok(RootedGraph { labels, adj, roots })
    }

    /// Vertices labelled `1..=n`.
    pub fn numbered(n: usize, edges: &[(usize, usize)], roots: Vec<usize>) -> Result<Self> {
        Self::new((1..=n).map(|i| i.to_string()).collect(), edges, roots)
    }

    pub fn unrooted(&self) -> Self {
        RootedGraph { roots: Vec::new(), ..self.clone() }
    }

    pub fn with_roots(&self, roots: Vec<usize>) -> Result<Self> {
        Self::new(self.labels.clone(), &self.edges(), roots)
    }

    pub fn from_file(file: &RootedGraphFile) -> Result<Self> {
        let pos: HashMap<&str, usize> =
            file.vertices.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if pos.len() != file.vertices.len() {
            return Err(Error::Invalid("duplicate vertex names".into()));
        }
        let look = |s: &str| {
            pos.get(s).copied().ok_or_else(|| Error::Invalid(format!("unknown vertex {s:?}")))
        };
        let edges = file
            .edges
            .iter()
            .map(|[u, v]| Ok((look(u)?, look(v)?)))
            .collect::<Result<Vec<_>>>()?;
        let roots = file.roots.iter().map(|r| look(r)).collect::<Result<Vec<_>>>()?;
        Self::new(file.vertices.clone(), &edges, roots)
    }

    pub fn to_file(&self) -> RootedGraphFile {
        RootedGraphFile {
            vertices: self.labels.clone(),
            edges: self
                .edges()
                .into_iter()
                .map(|(u, v)| [self.labels[u].clone(), self.labels[v].clone()])
                .collect(),
            roots: self.roots.iter().map(|&r| self.labels[r].clone()).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn is_root(&self, v: usize) -> bool {
        self.roots.contains(&v)
    }

    pub fn root_position(&self, v: usize) -> Option<usize> {
        self.roots.iter().position(|&r| r == v)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn neighbours(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.vertex_count())
            .flat_map(|u| self.adj[u].range(u + 1..).map(move |&v| (u, v)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn are_twins(&self, u: usize, v: usize) -> bool {
        self.adj[u] == self.adj[v]
    }

    /// Twins are allowed only as root/non-root pairs.
    pub fn is_twinfree(&self) -> bool {
        let n = self.vertex_count();
        (0..n).all(|u| {
            (u + 1..n).all(|v| self.is_root(u) != self.is_root(v) || !self.are_twins(u, v))
        })
    }

    /// Non-root vertices with a twin among the roots (`U(F^R)`).
    pub fn root_twinned(&self) -> Vec<usize> {
        (0..self.vertex_count())
            .filter(|&v| !self.is_root(v) && self.roots.iter().any(|&r| self.are_twins(v, r)))
            .collect()
    }

    /// `v*(F^R)`: non-roots without a twin among the roots.
    pub fn v_star(&self) -> usize {
        self.vertex_count() - self.roots.len() - self.root_twinned().len()
    }

    /// Quotient by `u ~ v` iff `N(u) = N(v)` and `u`, `v` are both roots or
    /// both non-roots.
    ///
    /// Classes are ordered by smallest member and labelled by it; roots are
    /// ordered by the earliest original root they contain.
    pub fn twinfree_version(&self) -> RootedGraph {
        let (classes, _) = self.twin_classes();
        let n = classes.len();
        let mut class_of = vec![0; self.vertex_count()];
        for (c, members) in classes.iter().enumerate() {
            for &v in members {
                class_of[v] = c;
            }
        }
        let mut edges = BTreeSet::new();
        for (u, v) in self.edges() {
            let (a, b) = (class_of[u], class_of[v]);
            edges.insert((a.min(b), a.max(b)));
        }
        let mut roots = Vec::new();
        for &r in &self.roots {
            if !roots.contains(&class_of[r]) {
                roots.push(class_of[r]);
            }
        }
        let labels = classes.iter().map(|m| self.labels[m[0]].clone()).collect::<Vec<_>>();
        debug_assert_eq!(labels.len(), n);
        RootedGraph::new(labels, &edges.into_iter().collect::<Vec<_>>(), roots)
            .expect("quotient is well formed")
    }

    /// Classes of `~_tf(R)` ordered by smallest member, plus their sizes.
    pub fn twin_classes(&self) -> (Vec<Vec<usize>>, BlowupVector) {
        let mut by_key: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut first: HashMap<(bool, &BTreeSet<usize>), usize> = HashMap::new();
        for v in 0..self.vertex_count() {
            let key = (self.is_root(v), &self.adj[v]);
            let leader = *first.entry(key).or_insert(v);
            by_key.entry(leader).or_default().push(v);
        }
        let classes: Vec<Vec<usize>> = by_key.into_values().collect();
        let sizes = BlowupVector(classes.iter().map(Vec::len).collect());
        (classes, sizes)
    }

    /// The `m`-blowup: vertex `i` becomes an independent set of `m_i`
    /// vertices, edges become complete bipartite graphs, and each root
    /// becomes an interval of roots in the base root order.
    pub fn blowup(&self, m: &BlowupVector) -> Result<RootedGraph> {
        if m.0.len() != self.vertex_count() {
            return Err(Error::Invalid(format!(
                "blowup vector has {} entries for {} vertices",
                m.0.len(),
                self.vertex_count()
            )));
        }
        let mut labels = Vec::new();
        let mut copies: Vec<Vec<usize>> = Vec::with_capacity(self.vertex_count());
        for (v, &mult) in m.0.iter().enumerate() {
            let ids = (0..mult)
                .map(|t| {
                    labels.push(if mult == 1 {
                        self.labels[v].clone()
                    } else {
                        format!("{}.{}", self.labels[v], t + 1)
                    });
                    labels.len() - 1
                })
                .collect();
            copies.push(ids);
        }
        let mut edges = Vec::new();
        for (u, v) in self.edges() {
            for &x in &copies[u] {
                for &y in &copies[v] {
                    edges.push((x, y));
                }
            }
        }
        let roots = self.roots.iter().flat_map(|&r| copies[r].iter().copied()).collect();
        RootedGraph::new(labels, &edges, roots)
    }

    /// The `X`-rooted version: each vertex of `X` is blown up by a factor of
    /// two and the duplicates, in `X` order, become the roots.
    pub fn rooted_version(&self, x: &[usize]) -> Result<RootedGraph> {
        let n = self.vertex_count();
        let mut seen = BTreeSet::new();
        if x.iter().any(|&v| v >= n || !seen.insert(v)) {
            return Err(Error::Invalid("X must be distinct vertices of the graph".into()));
        }
        let mut labels = self.labels.clone();
        let mut dup = HashMap::new();
        for &v in x {
            labels.push(format!("{}'", self.labels[v]));
            dup.insert(v, labels.len() - 1);
        }
        let mut edges = Vec::new();
        for (u, v) in self.edges() {
            let us: Vec<usize> = std::iter::once(u).chain(dup.get(&u).copied()).collect();
            let vs: Vec<usize> = std::iter::once(v).chain(dup.get(&v).copied()).collect();
            for &a in &us {
                for &b in &vs {
                    edges.push((a, b));
                }
            }
        }
        let roots = x.iter().map(|v| dup[v]).collect();
        RootedGraph::new(labels, &edges, roots)
    }
}

/// Vertex multiplicities for a blowup, indexed by base vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlowupVector(pub Vec<usize>);

impl BlowupVector {
    pub fn ones(n: usize) -> Self {
        BlowupVector(vec![1; n])
    }

    /// Builds a vector from a label map; every base vertex must be present.
    pub fn from_labels(base: &RootedGraph, m: &BTreeMap<String, usize>) -> Result<Self> {
        base.labels()
            .iter()
            .map(|l| {
                m.get(l).copied().ok_or_else(|| Error::Invalid(format!("no multiplicity for {l:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(BlowupVector)
    }
}

struct MapSearch<'a> {
    src: &'a RootedGraph,
    dst: &'a RootedGraph,
    bijective: bool,
    limit: usize,
    phi: Vec<usize>,
    used: Vec<bool>,
    found: Vec<Vec<usize>>,
}

impl MapSearch<'_> {
    fn compatible(&self, u: usize, image: usize) -> bool {
        let (src, dst) = (self.src, self.dst);
        let src_root = src.root_position(u);
        let dst_root = dst.root_position(image);
        if src_root.is_some() != dst_root.is_some() {
            return false;
        }
        if self.bijective && (self.used[image] || src.degree(u) != dst.degree(image)) {
            return false;
        }
        for w in 0..u {
            let img_w = self.phi[w];
            let want = src.has_edge(u, w);
            let got = image != img_w && dst.has_edge(image, img_w);
            if want != got {
                return false;
            }
            if let (Some(pu), Some(pw)) = (src_root, src.root_position(w)) {
                let qu = dst_root.unwrap();
                let qw = dst.root_position(img_w).unwrap();
                if (qu <= qw) != (pu <= pw) || (qw <= qu) != (pw <= pu) {
                    return false;
                }
            }
        }
        true
    }

    fn go(&mut self, u: usize) {
        if self.found.len() >= self.limit {
            return;
        }
        if u == self.src.vertex_count() {
            self.found.push(self.phi.clone());
            return;
        }
        for image in 0..self.dst.vertex_count() {
            if self.compatible(u, image) {
                self.phi.push(image);
                self.used[image] = true;
                self.go(u + 1);
                self.used[image] = false;
                self.phi.pop();
            }
        }
    }
}

fn search(src: &RootedGraph, dst: &RootedGraph, bijective: bool, limit: usize) -> Vec<Vec<usize>> {
    let mut s = MapSearch {
        src,
        dst,
        bijective,
        limit,
        phi: Vec::with_capacity(src.vertex_count()),
        used: vec![false; dst.vertex_count()],
        found: Vec::new(),
    };
    s.go(0);
    s.found
}

/// All root-order-preserving root-respecting relation-preserving maps
/// `V(src) -> V(dst)`, each given as the image vector.
pub fn count_rrr_maps(src: &RootedGraph, dst: &RootedGraph) -> Vec<Vec<usize>> {
    search(src, dst, false, usize::MAX)
}

/// A rooted-graph isomorphism `g -> h`, if one exists.
pub fn find_isomorphism(g: &RootedGraph, h: &RootedGraph) -> Option<Vec<usize>> {
    if g.vertex_count() != h.vertex_count()
        || g.roots.len() != h.roots.len()
        || g.edge_count() != h.edge_count()
    {
        return None;
    }
    let mut dg: Vec<usize> = (0..g.vertex_count()).map(|v| g.degree(v)).collect();
    let mut dh: Vec<usize> = (0..h.vertex_count()).map(|v| h.degree(v)).collect();
    dg.sort_unstable();
    dh.sort_unstable();
    if dg != dh {
        return None;
    }
    search(g, h, true, 1).pop()
}

pub fn is_isomorphic(g: &RootedGraph, h: &RootedGraph) -> bool {
    find_isomorphism(g, h).is_some()
}

pub fn automorphisms(g: &RootedGraph) -> Vec<Vec<usize>> {
    search(g, g, true, usize::MAX)
}

/// Whether some automorphism `φ` of a twinfree base has `m_i = n_{φ(i)}`;
/// equivalently whether the two blowups are isomorphic.
pub fn blowup_vectors_equivalent(
    base: &RootedGraph,
    m: &BlowupVector,
    n: &BlowupVector,
) -> Result<bool> {
    if !base.is_twinfree() {
        return Err(Error::NotTwinfree);
    }
    let k = base.vertex_count();
    if m.0.len() != k || n.0.len() != k {
        return Err(Error::Invalid("blowup vector length differs from base".into()));
    }
    Ok(automorphisms(base).iter().any(|phi| (0..k).all(|i| m.0[i] == n.0[phi[i]])))
}
