//! Uniqueness classification and witness construction.
//!
//! A rule is unique when no other rule has its trajectories. That happens
//! exactly at order at most two and for symmetric deterministic rules. For
//! anything else we build an explicit distinct rule with the same
//! coefficient vector and check it before returning.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{compare, symmetrize};
use crate::error::{Error, Result};
use crate::graph::{
    canonical_class, pair_from_index, pair_index, pair_orbit, pair_orbits, perms, stabilizer,
    GraphCode, RootedPairGraph,
};
use crate::rational::Rational;
use crate::rule::Rule;
use crate::DEFAULT_CAP;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UniquenessReason {
    Order2,
    SymmetricDeterministic,
    Witness,
}

impl fmt::Display for UniquenessReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UniquenessReason::Order2 => "order-2",
            UniquenessReason::SymmetricDeterministic => "symmetric-deterministic",
            UniquenessReason::Witness => "witness",
        })
    }
}

/// How a witness was built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessCase {
    Symmetrization,
    D1,
    D2,
    D3,
    D4,
}

impl fmt::Display for WitnessCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessCase::Symmetrization => "symmetrization",
            WitnessCase::D1 => "D1",
            WitnessCase::D2 => "D2",
            WitnessCase::D3 => "D3",
            WitnessCase::D4 => "D4",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniquenessVerdict {
    pub unique: bool,
    pub reason: UniquenessReason,
    pub case: Option<WitnessCase>,
    /// Present iff `unique` is false.
    pub witness: Option<Rule>,
}

impl UniquenessVerdict {
    fn unique(reason: UniquenessReason) -> Self {
        UniquenessVerdict { unique: true, reason, case: None, witness: None }
    }
}

pub fn classify_unique(rule: &Rule) -> Result<UniquenessVerdict> {
    let k = rule.order();
    if k == 1 {
        return Ok(UniquenessVerdict::unique(UniquenessReason::SymmetricDeterministic));
    }
    if k == 2 {
        return Ok(UniquenessVerdict::unique(UniquenessReason::Order2));
    }
    let symmetric = rule.is_symmetric()?;
    if symmetric && rule.is_deterministic() {
        return Ok(UniquenessVerdict::unique(UniquenessReason::SymmetricDeterministic));
    }
    let (case, witness) = if !symmetric {
        (WitnessCase::Symmetrization, symmetrize(rule)?)
    } else {
        perturb(rule)?
    };
    if witness == *rule || !compare(rule, &witness, DEFAULT_CAP.max(k))?.equivalent {
        return Err(Error::Internal(format!("{case} witness failed verification")));
    }
    Ok(UniquenessVerdict { unique: false, reason: UniquenessReason::Witness, case: Some(case), witness: Some(witness) })
}

fn perturb(rule: &Rule) -> Result<(WitnessCase, Rule)> {
    let rows: Vec<RowView> = rule.explicit_rows().map(|f| RowView::new(rule, f)).collect::<Result<_>>()?;
    type Finder = fn(&Rule, &RowView) -> Result<Option<Rule>>;
    let cases: [(WitnessCase, Finder); 4] =
        [(WitnessCase::D1, d1), (WitnessCase::D2, d2), (WitnessCase::D3, d3), (WitnessCase::D4, d4)];
    for (case, find) in cases {
        for view in &rows {
            if let Some(w) = find(rule, view)? {
                return Ok((case, w));
            }
        }
    }
    Err(Error::UncoveredCase)
}

/// Row `F` seen through the pair orbits `T_F` of its stabilizer.
struct RowView {
    f: GraphCode,
    orbits: Vec<Vec<usize>>,
    /// Support `(H, R_{F,H}, p(H))` where `p_A = |E(H) ∩ A|`.
    support: Vec<(GraphCode, Rational, Vec<usize>)>,
}

impl RowView {
    fn new(rule: &Rule, f: GraphCode) -> Result<Self> {
        let orbits = pair_orbits(f.order(), &stabilizer(f)?);
        let support = rule
            .row(f)
            .into_iter()
            .map(|(h, p)| {
                let v = profile(h, &orbits);
                (h, p, v)
            })
            .collect();
        Ok(RowView { f, orbits, support })
    }

    fn find(&self, p: &[usize]) -> Option<&(GraphCode, Rational, Vec<usize>)> {
        self.support.iter().find(|(_, _, q)| q == p)
    }

    fn singletons(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.orbits.len()).filter(|&i| self.orbits[i].len() == 1)
    }
}

fn profile(h: GraphCode, orbits: &[Vec<usize>]) -> Vec<usize> {
    orbits.iter().map(|o| o.iter().filter(|&&e| has(h, e)).count()).collect()
}

fn has(h: GraphCode, e: usize) -> bool {
    h.bits() >> e & 1 == 1
}

fn toggle(h: GraphCode, e: usize) -> GraphCode {
    let (i, j) = pair_from_index(e);
    if has(h, e) {
        h.without_edge(i, j)
    } else {
        h.with_edge(i, j)
    }
}

fn orbit_size(f: GraphCode, h: GraphCode) -> Result<Rational> {
    Ok(Rational::from_integer(pair_orbit(f, h)?.len().into()))
}

/// Mutable copy of a rule's matrix.
struct Draft {
    order: usize,
    rows: BTreeMap<GraphCode, BTreeMap<GraphCode, Rational>>,
}

impl Draft {
    fn new(rule: &Rule) -> Self {
        let mut rows: BTreeMap<GraphCode, BTreeMap<GraphCode, Rational>> = BTreeMap::new();
        for (f, h, p) in rule.entries() {
            rows.entry(f).or_default().insert(h, p.clone());
        }
        Draft { order: rule.order(), rows }
    }

    fn add(&mut self, f: GraphCode, h: GraphCode, delta: &Rational) {
        let row = self.rows.entry(f).or_insert_with(|| BTreeMap::from([(f, Rational::one())]));
        *row.entry(h).or_insert_with(Rational::zero) += delta;
    }

    /// Adds `total / |orb(F,H)|` to every member of the orbit of `(F, H)`.
    fn add_orbit(&mut self, f: GraphCode, h: GraphCode, total: Rational) -> Result<()> {
        let orbit = pair_orbit(f, h)?;
        let share = total / Rational::from_integer(orbit.len().into());
        for (f2, h2) in orbit {
            self.add(f2, h2, &share);
        }
        Ok(())
    }

    fn finish(self) -> Result<Rule> {
        let entries: Vec<_> = self
            .rows
            .iter()
            .flat_map(|(f, row)| row.iter().map(move |(h, p)| (f.bits(), h.bits(), p.clone())))
            .collect();
        Rule::from_entries(self.order, &entries)
            .map_err(|e| Error::Internal(format!("perturbed rule is invalid: {e}")))
    }
}

/// Support meets the interior of some `[|I|]_0`.
fn d1(rule: &Rule, v: &RowView) -> Result<Option<Rule>> {
    for (h, r, p) in &v.support {
        for (i, orbit) in v.orbits.iter().enumerate() {
            if p[i] == 0 || p[i] == orbit.len() {
                continue;
            }
            let present = *orbit.iter().find(|&&e| has(*h, e)).unwrap();
            let absent = *orbit.iter().find(|&&e| !has(*h, e)).unwrap();
            let eps = orbit_size(v.f, *h)? * r;
            let half = &eps / Rational::from_integer(2.into());
            let mut d = Draft::new(rule);
            d.add_orbit(v.f, *h, -eps)?;
            d.add_orbit(v.f, toggle(*h, present), half.clone())?;
            d.add_orbit(v.f, toggle(*h, absent), half)?;
            return d.finish().map(Some);
        }
    }
    Ok(None)
}

/// Support hits both ends of `[|I|]_0` with everything else equal.
fn d2(rule: &Rule, v: &RowView) -> Result<Option<Rule>> {
    for (h0, r0, p0) in &v.support {
        for (i, orbit) in v.orbits.iter().enumerate() {
            if orbit.len() < 2 || p0[i] != 0 {
                continue;
            }
            let mut target = p0.clone();
            target[i] = orbit.len();
            let Some((h1, r1, _)) = v.find(&target) else { continue };
            let eps = (orbit_size(v.f, *h0)? * r0).min(orbit_size(v.f, *h1)? * r1);
            let e = orbit[0];
            let mut d = Draft::new(rule);
            d.add_orbit(v.f, *h0, -eps.clone())?;
            d.add_orbit(v.f, *h1, -eps.clone())?;
            if orbit.len() >= 3 {
                d.add_orbit(v.f, toggle(*h0, e), eps.clone())?;
                d.add_orbit(v.f, toggle(*h1, e), eps)?;
            } else {
                d.add_orbit(v.f, toggle(*h0, e), eps * Rational::from_integer(2.into()))?;
            }
            return d.finish().map(Some);
        }
    }
    Ok(None)
}

/// Two fixed pairs whose four on/off combinations are all in the support.
fn d3(rule: &Rule, v: &RowView) -> Result<Option<Rule>> {
    let singles: Vec<usize> = v.singletons().collect();
    for (x, &i) in singles.iter().enumerate() {
        for &l in &singles[x + 1..] {
            for (_, _, p00) in v.support.iter().filter(|(_, _, p)| p[i] == 0 && p[l] == 0) {
                let mut corners = Vec::with_capacity(4);
                for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    let mut q = p00.clone();
                    q[i] = a;
                    q[l] = b;
                    match v.find(&q) {
                        Some((h, r, _)) => corners.push((*h, r.clone(), (a + b) % 2 == 0, orbit_size(v.f, *h)?)),
                        None => break,
                    }
                }
                if corners.len() < 4 {
                    continue;
                }
                let half = Rational::new(1.into(), 2.into());
                let loose = corners
                    .iter()
                    .map(|(_, r, even, n)| {
                        let inner = &half - n * r;
                        if *even { &half + inner } else { &half - inner }
                    })
                    .min()
                    .unwrap();
                // The bound above can be non-positive when |orb(F,H)| > 1.
                // Fall back to the largest ε keeping every entry in [0,1].
                let eps = if loose.is_positive() {
                    loose
                } else {
                    corners
                        .iter()
                        .map(|(_, r, even, n)| if *even { n * (Rational::one() - r) } else { n * r })
                        .min()
                        .unwrap()
                };
                let mut d = Draft::new(rule);
                for (h, _, even, _) in &corners {
                    d.add_orbit(v.f, *h, if *even { eps.clone() } else { -eps.clone() })?;
                }
                return d.finish().map(Some);
            }
        }
    }
    Ok(None)
}

/// A fixed pair `ab` toggled inside the support; moves mass between `F`
/// and a distinct image `σ·F`. The result is not symmetric.
fn d4(rule: &Rule, v: &RowView) -> Result<Option<Rule>> {
    let k = v.f.order();
    let Some(sigma) = perms(k)?.iter().find(|e| e.perm.act(v.f) != v.f) else {
        return Ok(None);
    };
    let g = sigma.perm.act(v.f);
    for ab in v.singletons() {
        for (hm, rm, pm) in v.support.iter().filter(|(_, _, p)| p[ab] == 0) {
            let mut target = pm.clone();
            target[ab] = 1;
            let Some((hp, rp, _)) = v.find(&target) else { continue };
            let (ghm, ghp) = (sigma.perm.act(*hm), sigma.perm.act(*hp));
            let eps = [rm.clone(), rule.prob(g, ghp), Rational::one() - rp, Rational::one() - rule.prob(g, ghm)]
                .into_iter()
                .min()
                .unwrap();
            let mut d = Draft::new(rule);
            d.add(v.f, *hm, &-eps.clone());
            d.add(g, ghp, &-eps.clone());
            d.add(v.f, *hp, &eps);
            d.add(g, ghm, &eps);
            return d.finish().map(Some);
        }
    }
    Ok(None)
}

/// `R(F, ab, ℓ)`: total probability that the replacement meets the
/// `S_F`-orbit of `ab` in exactly `ℓ` pairs. Only non-zero levels appear.
pub fn orbit_edge_histogram(rule: &Rule, f: GraphCode, ab: (usize, usize)) -> Result<BTreeMap<usize, Rational>> {
    if !rule.is_symmetric()? {
        return Err(Error::NotSymmetric);
    }
    let orbit = ab_orbit(f, ab)?;
    let mut hist: BTreeMap<usize, Rational> = BTreeMap::new();
    for (h, p) in rule.row(f) {
        let level = orbit.iter().filter(|&&e| has(h, e)).count();
        *hist.entry(level).or_insert_with(Rational::zero) += p;
    }
    Ok(hist)
}

fn ab_orbit(f: GraphCode, (a, b): (usize, usize)) -> Result<Vec<usize>> {
    let k = f.order();
    if a == b || a >= k || b >= k {
        return Err(Error::Invalid(format!("pair ({a},{b}) invalid at order {k}")));
    }
    let target = pair_index(a, b);
    Ok(pair_orbits(k, &stabilizer(f)?).into_iter().find(|o| o.contains(&target)).unwrap())
}

/// `a_{J,R}` for `J = orb(F^{a,b})` via the orbit-level histogram:
/// `|J|·(Σ_ℓ ℓ·R(F,ab,ℓ)/|O| − 1[ab ∈ E(F)])`.
pub fn symmetric_coefficient(rule: &Rule, f: GraphCode, ab: (usize, usize)) -> Result<Rational> {
    let hist = orbit_edge_histogram(rule, f, ab)?;
    let o = Rational::from_integer(ab_orbit(f, ab)?.len().into());
    let size = canonical_class(&RootedPairGraph::new(f, ab.0, ab.1)?)?.size;
    let mut mean: Rational = hist.iter().map(|(l, p)| p * Rational::from_integer((*l).into())).sum::<Rational>() / o;
    if f.has_edge(ab.0, ab.1) {
        mean -= Rational::one();
    }
    Ok(mean * Rational::from_integer(size.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::coeff_vector;
    use crate::rational::{int, ratio};
    use crate::rule::{make_named, Family, NamedParams};

    fn named(f: Family, k: usize) -> Rule {
        make_named(f, k, &NamedParams::default()).unwrap()
    }

    fn check_witness(rule: &Rule) -> UniquenessVerdict {
        let v = classify_unique(rule).unwrap();
        assert!(!v.unique);
        let w = v.witness.as_ref().unwrap();
        assert_ne!(w, rule);
        assert!(w.validate().is_ok());
        assert_eq!(coeff_vector(w, 6).unwrap(), coeff_vector(rule, 6).unwrap());
        v
    }

    #[test]
    fn unique_rules() {
        assert!(classify_unique(&named(Family::Complementing, 2)).unwrap().unique);
        assert_eq!(classify_unique(&Rule::identity(1).unwrap()).unwrap().reason, UniquenessReason::SymmetricDeterministic);
        assert_eq!(classify_unique(&Rule::identity(2).unwrap()).unwrap().reason, UniquenessReason::Order2);
        for f in [Family::TriangleRemoval, Family::Identity, Family::Extremist] {
            let v = classify_unique(&named(f, 3)).unwrap();
            assert!(v.unique && v.witness.is_none());
        }
    }

    #[test]
    fn triangle_edge_removal_witness() {
        let v = check_witness(&named(Family::TriangleEdgeRemoval, 3));
        assert_eq!(v.case, Some(WitnessCase::D1));
    }

    #[test]
    fn ignorant_k4_witness() {
        let params = NamedParams { distribution: vec![(63, ratio(1, 2)), (0, ratio(1, 2))], ..Default::default() };
        check_witness(&make_named(Family::Ignorant, 4, &params).unwrap());
    }

    #[test]
    fn non_symmetric_uses_symmetrization() {
        let r = Rule::from_entries(3, &[(1, 0, int(1))]).unwrap();
        let v = check_witness(&r);
        assert_eq!(v.case, Some(WitnessCase::Symmetrization));
        assert!(v.witness.unwrap().is_symmetric().unwrap());
    }

    #[test]
    fn d3_and_d4_constructions() {
        // k = 3, F = path 12,13 (bits 0b011): S_F = <(23)>, T_F = {12,13}, {23}.
        // Rows touching only {23} keep everything else fixed.
        let mut entries = Vec::new();
        for f in GraphCode::all(3).filter(|f| f.edge_count() == 2) {
            let missing = (0..3).find(|&e| !has(f, e)).unwrap();
            let with = toggle(f, missing);
            entries.push((f.bits(), f.bits(), ratio(1, 2)));
            entries.push((f.bits(), with.bits(), ratio(1, 2)));
        }
        let r = Rule::from_entries(3, &entries).unwrap();
        assert!(r.is_symmetric().unwrap());
        let v = check_witness(&r);
        assert_eq!(v.case, Some(WitnessCase::D4));
        assert!(!v.witness.unwrap().is_symmetric().unwrap());
    }

    #[test]
    fn uncovered_case_surfaces() {
        // single edges go to ∅ or K3 with probability 1/2 each
        let mut entries = Vec::new();
        for f in [1u64, 2, 4] {
            entries.push((f, 0, ratio(1, 2)));
            entries.push((f, 7, ratio(1, 2)));
        }
        let r = Rule::from_entries(3, &entries).unwrap();
        assert!(matches!(classify_unique(&r), Err(Error::UncoveredCase)));

        // it is still not unique: spread the mass over the mixed profiles
        let mut other = Vec::new();
        for f in [1u64, 2, 4] {
            let g = GraphCode::new(3, f).unwrap();
            for h in GraphCode::all(3).filter(|h| h.edge_count() == 1 && *h != g) {
                other.push((f, h.bits(), ratio(1, 4)));
                other.push((f, (h.bits() | f), ratio(1, 4)));
            }
        }
        let partner = Rule::from_entries(3, &other).unwrap();
        assert!(partner.is_symmetric().unwrap());
        assert_eq!(coeff_vector(&partner, 6).unwrap(), coeff_vector(&r, 6).unwrap());
    }

    #[test]
    fn histogram_examples() {
        let id = Rule::identity(3).unwrap();
        let hist = orbit_edge_histogram(&id, GraphCode::complete(3), (0, 1)).unwrap();
        assert_eq!(hist, BTreeMap::from([(3, int(1))]));
        let te = named(Family::TriangleEdgeRemoval, 3);
        let hist = orbit_edge_histogram(&te, GraphCode::complete(3), (0, 1)).unwrap();
        assert_eq!(hist, BTreeMap::from([(2, int(1))]));
        let ns = Rule::from_entries(3, &[(1, 0, int(1))]).unwrap();
        assert!(matches!(orbit_edge_histogram(&ns, GraphCode::complete(3), (0, 1)), Err(Error::NotSymmetric)));
    }

    #[test]
    fn symmetric_coefficient_matches_vector() {
        for r in [named(Family::TriangleEdgeRemoval, 3), named(Family::ComponentCompletion, 3)] {
            let v = coeff_vector(&r, 6).unwrap();
            for f in GraphCode::all(3) {
                for (a, b) in [(0, 1), (1, 2), (0, 2)] {
                    let class = canonical_class(&RootedPairGraph::new(f, a, b).unwrap()).unwrap();
                    assert_eq!(&symmetric_coefficient(&r, f, (a, b)).unwrap(), v.get(&class).unwrap());
                }
            }
        }
    }
}
