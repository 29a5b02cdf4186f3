//! Labelled and rooted graphs and the symmetric-group actions on them.

mod code;
mod orbit;
mod perm;
mod rooted;

pub use code::{pair_count, pair_from_index, pair_index, GraphCode, MAX_ORDER};
pub use orbit::{
    apply_perm, canonical_class, enumerate_classes, graph_orbit, pair_orbit, pair_orbit_canon,
    pair_orbits, stabilizer, ClassKey, ClassTable, OrbitClass, RootedPairGraph, PERM_LIMIT,
};
pub(crate) use orbit::perms;
pub(crate) use perm::act_with_table;
pub use perm::Perm;
pub use rooted::{
    automorphisms, blowup_vectors_equivalent, count_rrr_maps, find_isomorphism, is_isomorphic,
    BlowupVector, RootedGraph, RootedGraphFile,
};
