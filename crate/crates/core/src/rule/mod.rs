//! Rules: row-stochastic replacement matrices over labelled graphs on `[k]`.
//!
//! Storage is sparse. A row that is absent is the identity row (`F -> F`
//! with probability one), so natural rules that touch a handful of drawn
//! graphs stay small even at order six. Probabilities are exact rationals.

mod named;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{act_with_table, perms, GraphCode, MAX_ORDER};
use crate::rational::{self, Rational};

pub use named::{make_named, Family, NamedParams};

type Row = BTreeMap<GraphCode, Rational>;

/// A validated rule. Rows equal to the identity and zero entries are never
/// stored, so structural equality is equality of matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    order: usize,
    rows: BTreeMap<GraphCode, Row>,
}

/// One problem found while validating raw rule entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Issue {
    BadOrder(usize),
    CodeOutOfRange(u64),
    OutOfRange { from: u64, to: u64, p: Rational },
    Duplicate { from: u64, to: u64 },
    RowSum { from: u64, sum: Rational },
    UnknownDefault(String),
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::BadOrder(k) => write!(f, "order {k} unsupported"),
            Issue::CodeOutOfRange(c) => write!(f, "code {c} out of range"),
            Issue::OutOfRange { from, to, p } => {
                write!(f, "entry {from}->{to}: probability {} outside [0,1]", rational::format(p))
            }
            Issue::Duplicate { from, to } => write!(f, "entry {from}->{to} given twice"),
            Issue::RowSum { from, sum } => {
                write!(f, "row {from}: row sum {}", rational::format(sum))
            }
            Issue::UnknownDefault(d) => write!(f, "unknown default row {d:?}"),
        }
    }
}

/// Every issue found in a candidate rule.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.issues.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

impl std::error::Error for ValidationReport {}

/// Rule file: `{"order": k, "entries": [{"from", "to", "p"}], "default": "identity"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleFile {
    pub order: usize,
    pub entries: Vec<EntryFile>,
    #[serde(default = "identity_default")]
    pub default: String,
}

fn identity_default() -> String {
    "identity".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryFile {
    pub from: u64,
    pub to: u64,
    #[serde(with = "rational::serde_text")]
    pub p: Rational,
}

/// Checks raw `(from, to, p)` entries without building a rule.
pub fn validate_entries(order: usize, entries: &[(u64, u64, Rational)]) -> Result<(), ValidationReport> {
    let mut issues = Vec::new();
    if order == 0 || order > MAX_ORDER {
        issues.push(Issue::BadOrder(order));
        return Err(ValidationReport { issues });
    }
    let mask = GraphCode::mask(order);
    let mut sums: BTreeMap<u64, Rational> = BTreeMap::new();
    let mut seen = std::collections::BTreeSet::new();
    for (from, to, p) in entries {
        for c in [from, to] {
            if c & !mask != 0 && !issues.contains(&Issue::CodeOutOfRange(*c)) {
                issues.push(Issue::CodeOutOfRange(*c));
            }
        }
        if !seen.insert((*from, *to)) {
            issues.push(Issue::Duplicate { from: *from, to: *to });
        }
        if p.is_negative_or_above_one() {
            issues.push(Issue::OutOfRange { from: *from, to: *to, p: p.clone() });
        }
        *sums.entry(*from).or_insert_with(Rational::zero) += p;
    }
    for (from, sum) in sums {
        if !sum.is_one() {
            issues.push(Issue::RowSum { from, sum });
        }
    }
    if issues.is_empty() {
        Ok(())
    } else {
        Err(ValidationReport { issues })
    }
}

trait UnitInterval {
    fn is_negative_or_above_one(&self) -> bool;
}

impl UnitInterval for Rational {
    fn is_negative_or_above_one(&self) -> bool {
        *self < Rational::zero() || *self > Rational::one()
    }
}

impl Rule {
    pub fn identity(order: usize) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::UnsupportedOrder(order));
        }
        Ok(Rule { order, rows: BTreeMap::new() })
    }

    /// Validates and normalizes raw entries.
    pub fn from_entries(order: usize, entries: &[(u64, u64, Rational)]) -> Result<Self> {
        validate_entries(order, entries).map_err(Error::InvalidRule)?;
        let mut rows: BTreeMap<GraphCode, Row> = BTreeMap::new();
        for (from, to, p) in entries {
            rows.entry(GraphCode::from_raw(order, *from))
                .or_default()
                .insert(GraphCode::from_raw(order, *to), p.clone());
        }
        Ok(Self::normalized(order, rows))
    }

    /// Builds a rule from rows already known to be stochastic.
    pub(crate) fn from_rows_unchecked(order: usize, rows: BTreeMap<GraphCode, Row>) -> Self {
        let rule = Self::normalized(order, rows);
        debug_assert!(rule.validate().is_ok());
        rule
    }

    fn normalized(order: usize, mut rows: BTreeMap<GraphCode, Row>) -> Self {
        rows.retain(|f, row| {
            row.retain(|_, p| !p.is_zero());
            !(row.len() == 1 && row.get(f).is_some_and(One::is_one))
        });
        Rule { order, rows }
    }

    pub fn from_file(file: &RuleFile) -> Result<Self> {
        if file.default != "identity" {
            return Err(Error::InvalidRule(ValidationReport {
                issues: vec![Issue::UnknownDefault(file.default.clone())],
            }));
        }
        let entries: Vec<_> = file.entries.iter().map(|e| (e.from, e.to, e.p.clone())).collect();
        Self::from_entries(file.order, &entries)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }

    pub fn to_file(&self) -> RuleFile {
        RuleFile {
            order: self.order,
            entries: self
                .entries()
                .map(|(f, h, p)| EntryFile { from: f.bits(), to: h.bits(), p: p.clone() })
                .collect(),
            default: identity_default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("rule serializes")
    }

    /// Re-checks the stochastic invariants.
    pub fn validate(&self) -> Result<(), ValidationReport> {
        let entries: Vec<_> = self.entries().map(|(f, h, p)| (f.bits(), h.bits(), p.clone())).collect();
        validate_entries(self.order, &entries)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `R_{F,H}`.
    pub fn prob(&self, f: GraphCode, h: GraphCode) -> Rational {
        match self.rows.get(&f) {
            Some(row) => row.get(&h).cloned().unwrap_or_else(Rational::zero),
            None if f == h => Rational::one(),
            None => Rational::zero(),
        }
    }

    /// Support of row `F` with probabilities, in increasing code order.
    pub fn row(&self, f: GraphCode) -> Vec<(GraphCode, Rational)> {
        match self.rows.get(&f) {
            Some(row) => row.iter().map(|(h, p)| (*h, p.clone())).collect(),
            None => vec![(f, Rational::one())],
        }
    }

    pub fn has_explicit_row(&self, f: GraphCode) -> bool {
        self.rows.contains_key(&f)
    }

    /// Drawn graphs whose row differs from the identity.
    pub fn explicit_rows(&self) -> impl Iterator<Item = GraphCode> + '_ {
        self.rows.keys().copied()
    }

    /// Non-zero entries of non-identity rows, sorted by `(from, to)`.
    pub fn entries(&self) -> impl Iterator<Item = (GraphCode, GraphCode, &Rational)> + '_ {
        self.rows.iter().flat_map(|(f, row)| row.iter().map(move |(h, p)| (*f, *h, p)))
    }

    pub fn is_identity(&self) -> bool {
        self.rows.is_empty()
    }

    /// `R_{σ·F, σ·H} = R_{F,H}` for every `σ ∈ S_k`.
    pub fn is_symmetric(&self) -> Result<bool> {
        let group = perms(self.order)?;
        for (f, h, p) in self.entries() {
            for e in group {
                let sf = GraphCode::from_raw(self.order, act_with_table(&e.table, f.bits()));
                let sh = GraphCode::from_raw(self.order, act_with_table(&e.table, h.bits()));
                if self.prob(sf, sh) != *p {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Every row is a point mass.
    pub fn is_deterministic(&self) -> bool {
        self.rows.values().all(|row| row.len() == 1)
    }

    /// The common replacement distribution, if every row has the same one.
    pub fn ignorant_distribution(&self) -> Option<Vec<(GraphCode, Rational)>> {
        let first = self.row(GraphCode::empty(self.order));
        GraphCode::all(self.order).all(|f| self.row(f) == first).then_some(first)
    }

    /// Expected replacement edge count `d_R` when the rule is ignorant.
    pub fn ignorant_edge_count(&self) -> Option<Rational> {
        self.ignorant_distribution().map(|dist| {
            dist.iter().map(|(h, p)| p * Rational::from_integer(h.edge_count().into())).sum()
        })
    }
}
