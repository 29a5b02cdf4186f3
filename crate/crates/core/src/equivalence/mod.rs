//! Deciding when two rules drive the same graphon trajectories.
//!
//! For a rule `R` of order `k` and a class `J` of pair-rooted graphs,
//!
//! ```text
//! a_{J,R} = Σ_{F^{a,b} ∈ J} ( Σ_H R_{F,H}·1[ab ∈ E(H)] − 1[ab ∈ E(F)] )
//! ```
//!
//! Rules of equal order have the same trajectories iff these coefficient
//! vectors agree exactly. Rules of different orders are compared after
//! lifting the smaller one. Nothing here integrates a trajectory.

mod unique;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{graph_orbit, pair_count, pair_orbit, pair_orbit_canon, ClassKey, ClassTable, GraphCode, OrbitClass, MAX_ORDER};
use crate::rational::{self, Rational};
use crate::rule::Rule;

pub use unique::{
    classify_unique, orbit_edge_histogram, symmetric_coefficient, UniquenessReason,
    UniquenessVerdict, WitnessCase,
};

/// The certificate `J ↦ a_{J,R}` over all of `J_k`, sorted by class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffVector {
    order: usize,
    entries: Vec<(OrbitClass, Rational)>,
}

/// One certificate line: `{"class": {"code","a","b"}, "size", "coeff": "p/q"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateEntry {
    pub class: ClassKey,
    pub size: usize,
    #[serde(with = "rational::serde_text")]
    pub coeff: Rational,
}

impl CoeffVector {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[(OrbitClass, Rational)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, class: &OrbitClass) -> Option<&Rational> {
        self.entries
            .binary_search_by(|(c, _)| c.canon.cmp(&class.canon))
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, a)| a.is_zero())
    }

    pub fn certificate(&self) -> Vec<CertificateEntry> {
        self.entries
            .iter()
            .map(|(c, a)| CertificateEntry { class: ClassKey::from(&c.canon), size: c.size, coeff: a.clone() })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.certificate()).expect("certificate serializes")
    }
}

/// Exact coefficient vector of a rule. Identity rows contribute nothing.
pub fn coeff_vector(rule: &Rule, cap: usize) -> Result<CoeffVector> {
    let k = rule.order();
    let table = ClassTable::get(k, cap)?;
    let mut coeffs = vec![Rational::zero(); table.classes().len()];
    for f in rule.explicit_rows() {
        let row = rule.row(f);
        for a in 0..k {
            for b in a + 1..k {
                let z = edge_change(&row, f, a, b);
                if z.is_zero() {
                    continue;
                }
                coeffs[table.class_index_raw(f.bits(), a, b)] += &z;
                coeffs[table.class_index_raw(f.bits(), b, a)] += z;
            }
        }
    }
    Ok(CoeffVector { order: k, entries: table.classes().iter().copied().zip(coeffs).collect() })
}

/// `Z_{F^{a,b},R} = Σ_H R_{F,H}·1[ab ∈ E(H)] − 1[ab ∈ E(F)]` for one row.
pub(crate) fn edge_change(row: &[(GraphCode, Rational)], f: GraphCode, a: usize, b: usize) -> Rational {
    let mut z: Rational = row.iter().filter(|(h, _)| h.has_edge(a, b)).map(|(_, p)| p.clone()).sum();
    if f.has_edge(a, b) {
        z -= Rational::one();
    }
    z
}

/// Outcome of [`compare`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    /// Common order after lifting.
    pub order: usize,
    pub left: CoeffVector,
    pub right: CoeffVector,
    /// Smallest class whose coefficients differ.
    pub first_difference: Option<OrbitClass>,
}

/// Same-trajectory decision, lifting the lower-order rule first.
pub fn compare(r1: &Rule, r2: &Rule, cap: usize) -> Result<EquivalenceVerdict> {
    let (l1, l2) = common_order(r1, r2)?;
    let left = coeff_vector(&l1, cap)?;
    let right = coeff_vector(&l2, cap)?;
    let first_difference = left
        .entries
        .iter()
        .zip(&right.entries)
        .find(|((_, a), (_, b))| a != b)
        .map(|((c, _), _)| *c);
    Ok(EquivalenceVerdict {
        equivalent: first_difference.is_none(),
        order: l1.order(),
        left,
        right,
        first_difference,
    })
}

fn common_order(r1: &Rule, r2: &Rule) -> Result<(Rule, Rule)> {
    let k = r1.order().max(r2.order());
    Ok((lift(r1, k)?, lift(r2, k)?))
}

/// Embeds a rule into a larger order: the replacement acts on the subgraph
/// induced by the first `order` vertices and leaves every other pair alone.
pub fn lift(rule: &Rule, to: usize) -> Result<Rule> {
    let k = rule.order();
    if to < k {
        return Err(Error::Invalid(format!("cannot lift order {k} down to {to}")));
    }
    if to > MAX_ORDER {
        return Err(Error::UnsupportedOrder(to));
    }
    if to == k {
        return Ok(rule.clone());
    }
    let low = pair_count(k);
    let high = pair_count(to) - low;
    let mut rows = BTreeMap::new();
    for g in rule.explicit_rows() {
        let row = rule.row(g);
        for hi in 0..1u64 << high {
            let f = GraphCode::from_raw(to, hi << low | g.bits());
            let lifted: BTreeMap<GraphCode, Rational> = row
                .iter()
                .map(|(h, p)| (GraphCode::from_raw(to, hi << low | h.bits()), p.clone()))
                .collect();
            rows.insert(f, lifted);
        }
    }
    Ok(Rule::from_rows_unchecked(to, rows))
}

/// Drawn graphs whose `S_k`-orbit meets an explicit row of any given rule.
fn touched_rows(rules: &[&Rule]) -> Result<BTreeSet<GraphCode>> {
    let mut touched = BTreeSet::new();
    for rule in rules {
        for f in rule.explicit_rows() {
            if !touched.contains(&f) {
                touched.extend(graph_orbit(f)?);
            }
        }
    }
    Ok(touched)
}

/// Orbit-averages a rule over `S_k`: `R×_{F,H}` is the mean of `R` over the
/// orbit of `(F, H)`. The result is symmetric with the same trajectories.
pub fn symmetrize(rule: &Rule) -> Result<Rule> {
    let mut rows: BTreeMap<GraphCode, BTreeMap<GraphCode, Rational>> = BTreeMap::new();
    for f in touched_rows(&[rule])? {
        for (h, p) in rule.row(f) {
            let orbit = pair_orbit(f, h)?;
            let share = p / Rational::from_integer(orbit.len().into());
            for (f2, h2) in orbit {
                *rows.entry(f2).or_default().entry(h2).or_insert_with(Rational::zero) += &share;
            }
        }
    }
    Ok(Rule::from_rows_unchecked(rule.order(), rows))
}

/// Orbit sums `Σ_{(F,H) ∈ B} R_{F,H}` keyed by canonical orbit member.
fn orbit_sums(rule: &Rule, rows: &BTreeSet<GraphCode>) -> Result<BTreeMap<(GraphCode, GraphCode), Rational>> {
    let mut sums = BTreeMap::new();
    for &f in rows {
        for (h, p) in rule.row(f) {
            *sums.entry(pair_orbit_canon(f, h)?).or_insert_with(Rational::zero) += p;
        }
    }
    Ok(sums)
}

/// Conjectured flip-distribution equivalence: equal sums of `R` over every
/// `S_k`-orbit of `(F, H)` pairs. This is an open conjecture, not a theorem.
pub fn check_k1(r1: &Rule, r2: &Rule) -> Result<bool> {
    if r1.order() != r2.order() {
        return Err(Error::OrderMismatch(r1.order(), r2.order()));
    }
    let rows = touched_rows(&[r1, r2])?;
    Ok(orbit_sums(r1, &rows)? == orbit_sums(r2, &rows)?)
}

/// The constant `C > 0` with `a_{J,R1} = C·a_{J,R2}` for all `J`, so that
/// `Θ_{R1}^t = Θ_{R2}^{Ct}`. Two zero vectors give `1`.
pub fn dilation_factor(r1: &Rule, r2: &Rule, cap: usize) -> Result<Option<Rational>> {
    let (l1, l2) = common_order(r1, r2)?;
    let v1 = coeff_vector(&l1, cap)?;
    let v2 = coeff_vector(&l2, cap)?;
    let Some((_, pivot)) = v2.entries.iter().find(|(_, a)| !a.is_zero()) else {
        return Ok(v1.is_zero().then(Rational::one));
    };
    let idx = v2.entries.iter().position(|(_, a)| !a.is_zero()).unwrap();
    let c = &v1.entries[idx].1 / pivot;
    if !c.is_positive() {
        return Ok(None);
    }
    let proportional = v1.entries.iter().zip(&v2.entries).all(|((_, a), (_, b))| *a == &c * b);
    Ok(proportional.then_some(c))
}
