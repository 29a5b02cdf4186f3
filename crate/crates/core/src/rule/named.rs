//! Named rule families.
//!
//! `extremist` and `component-completion` follow the usual descriptions of
//! these families: an extremist rule completes or empties the drawn graph
//! depending on whether it has at least a threshold number of edges
//! (default half of all pairs); component completion turns every connected
//! component of the drawn graph into a clique.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_traits::One;

use super::Rule;
use crate::error::{Error, Result};
use crate::graph::{pair_count, GraphCode};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Identity,
    TriangleRemoval,
    TriangleEdgeRemoval,
    Complementing,
    Extremist,
    CliqueRemoval,
    ComponentCompletion,
    Ignorant,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Identity,
        Family::TriangleRemoval,
        Family::TriangleEdgeRemoval,
        Family::Complementing,
        Family::Extremist,
        Family::CliqueRemoval,
        Family::ComponentCompletion,
        Family::Ignorant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Identity => "identity",
            Family::TriangleRemoval => "triangle-removal",
            Family::TriangleEdgeRemoval => "triangle-edge-removal",
            Family::Complementing => "complementing",
            Family::Extremist => "extremist",
            Family::CliqueRemoval => "clique-removal",
            Family::ComponentCompletion => "component-completion",
            Family::Ignorant => "ignorant",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown rule family {s:?}")))
    }
}

/// Optional parameters for [`make_named`].
#[derive(Clone, Debug, Default)]
pub struct NamedParams {
    /// Edge-count threshold for `extremist`.
    pub threshold: Option<Rational>,
    /// Replacement distribution for `ignorant`, as `(code, p)`.
    pub distribution: Vec<(u64, Rational)>,
}

impl NamedParams {
    /// Parses `"code=p,code=p"`.
    pub fn parse_distribution(text: &str) -> Result<Vec<(u64, Rational)>> {
        text.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|item| {
                let (code, p) = item
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("expected code=p, got {item:?}")))?;
                let code = code.trim().parse().map_err(|_| Error::Parse(format!("bad code {code:?}")))?;
                Ok((code, rational::parse(p)?))
            })
            .collect()
    }
}

fn deterministic(k: usize, map: impl Fn(GraphCode) -> GraphCode) -> Rule {
    let rows = GraphCode::all(k)
        .filter_map(|f| {
            let h = map(f);
            (h != f).then(|| (f, BTreeMap::from([(h, Rational::one())])))
        })
        .collect();
    Rule::from_rows_unchecked(k, rows)
}

fn component_completion(f: GraphCode) -> GraphCode {
    let k = f.order();
    let mut comp: Vec<usize> = (0..k).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        if c[x] != x {
            c[x] = find(c, c[x]);
        }
        c[x]
    }
    for (i, j) in f.edges().collect::<Vec<_>>() {
        let (a, b) = (find(&mut comp, i), find(&mut comp, j));
        comp[a] = b;
    }
    let mut h = GraphCode::empty(k);
    for i in 0..k {
        for j in i + 1..k {
            if find(&mut comp, i) == find(&mut comp, j) {
                h = h.with_edge(i, j);
            }
        }
    }
    h
}

/// Builds a rule of the named family.
pub fn make_named(family: Family, k: usize, params: &NamedParams) -> Result<Rule> {
    let need_three = |name: &str| {
        if k != 3 {
            Err(Error::Invalid(format!("{name} is defined at order 3, not {k}")))
        } else {
            Ok(())
        }
    };
    let rule = match family {
        Family::Identity => Rule::identity(k)?,
        Family::TriangleRemoval => {
            need_three("triangle-removal")?;
            Rule::from_entries(3, &[(7, 0, Rational::one())])?
        }
        Family::TriangleEdgeRemoval => {
            need_three("triangle-edge-removal")?;
            let third = rational::ratio(1, 3);
            Rule::from_entries(3, &[(7, 3, third.clone()), (7, 5, third.clone()), (7, 6, third)])?
        }
        Family::Complementing => {
            Rule::identity(k)?;
            deterministic(k, |f| f.complement())
        }
        Family::Extremist => {
            Rule::identity(k)?;
            let threshold = params
                .threshold
                .clone()
                .unwrap_or_else(|| rational::ratio(pair_count(k) as i64, 2));
            deterministic(k, |f| {
                if Rational::from_integer(f.edge_count().into()) >= threshold {
                    GraphCode::complete(k)
                } else {
                    GraphCode::empty(k)
                }
            })
        }
        Family::CliqueRemoval => {
            Rule::identity(k)?;
            deterministic(k, |f| if f == GraphCode::complete(k) { GraphCode::empty(k) } else { f })
        }
        Family::ComponentCompletion => {
            Rule::identity(k)?;
            deterministic(k, component_completion)
        }
        Family::Ignorant => {
            if params.distribution.is_empty() {
                return Err(Error::Invalid("ignorant rule needs a distribution".into()));
            }
            Rule::identity(k)?;
            let mut entries = Vec::new();
            for f in GraphCode::all(k) {
                for (h, p) in &params.distribution {
                    entries.push((f.bits(), *h, p.clone()));
                }
            }
            Rule::from_entries(k, &entries)?
        }
    };
    debug_assert!(rule.validate().is_ok());
    Ok(rule)
}
