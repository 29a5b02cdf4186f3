use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::RootedGraph;
use crate::rational;
use crate::scalar::Scalar;

/// A kernel constant on the blocks `Ω_i × Ω_j` of a finite partition with
/// part measures `z_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepKernel<T> {
    weights: Vec<T>,
    /// Row-major `m × m`, symmetric.
    values: Vec<T>,
}

fn tolerance<T: Scalar>() -> T {
    if T::EXACT {
        T::zero()
    } else {
        T::from_f64_lossy(1e-9)
    }
}

impl<T: Scalar> StepKernel<T> {
    pub fn new(weights: Vec<T>, values: Vec<Vec<T>>) -> Result<Self> {
        let m = weights.len();
        if m == 0 {
            return Err(Error::Invalid("a step kernel needs at least one part".into()));
        }
        if weights.iter().any(|z| z.is_negative()) {
            return Err(Error::Invalid("part weights must be non-negative".into()));
        }
        let total = weights.iter().cloned().fold(T::zero(), |a, b| a + b);
        if (total - T::one()).abs() > tolerance() {
            return Err(Error::Invalid("part weights must sum to 1".into()));
        }
        if values.len() != m || values.iter().any(|row| row.len() != m) {
            return Err(Error::Invalid(format!("values must be a {m}x{m} matrix")));
        }
        let asymmetric = (0..m).flat_map(|i| (0..i).map(move |j| (i, j))).find(|&(i, j)| values[i][j] != values[j][i]);
        if let Some((i, j)) = asymmetric {
            return Err(Error::Invalid(format!("values not symmetric at ({}, {})", i + 1, j + 1)));
        }
        Ok(StepKernel { weights, values: values.into_iter().flatten().collect() })
    }

    /// One part with value `p`.
    pub fn constant(p: T) -> Self {
        StepKernel { weights: vec![T::one()], values: vec![p] }
    }

    /// `W_G^z`: value `1[ij ∈ E(G)]` on `Ω_i × Ω_j`. Roots of `g` are ignored.
    pub fn from_graph(g: &RootedGraph, z: Vec<T>) -> Result<Self> {
        let m = g.vertex_count();
        if z.len() != m {
            return Err(Error::Invalid(format!("{} weights for {m} vertices", z.len())));
        }
        let values = (0..m)
            .map(|i| (0..m).map(|j| if i != j && g.has_edge(i, j) { T::one() } else { T::zero() }).collect())
            .collect();
        Self::new(z, values)
    }

    pub fn parts(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn value(&self, i: usize, j: usize) -> &T {
        &self.values[i * self.parts() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let m = self.parts();
        self.values[i * m + j] = v.clone();
        self.values[j * m + i] = v;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.values.chunks(self.parts()).map(<[T]>::to_vec).collect()
    }

    /// Every block value lies in `[0, 1]`.
    pub fn is_graphon(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative() && *v <= T::one())
    }

    /// Block values `(i, j)` with `i ≤ j`, row-major.
    pub fn upper(&self) -> Vec<T> {
        let m = self.parts();
        (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).map(|(i, j)| self.value(i, j).clone()).collect()
    }

    /// Same partition, new upper-triangle values.
    pub fn with_upper(&self, upper: &[T]) -> Self {
        let m = self.parts();
        let mut out = self.clone();
        let mut it = upper.iter();
        for i in 0..m {
            for j in i..m {
                out.set(i, j, it.next().expect("upper triangle length").clone());
            }
        }
        out
    }

    /// `‖U − W‖∞` over blocks; the partitions must match.
    pub fn distance(&self, other: &Self) -> T {
        assert_eq!(self.parts(), other.parts(), "kernels on different partitions");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a.clone() - b.clone()).abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn to_f64(&self) -> StepKernel<f64> {
        StepKernel {
            weights: self.weights.iter().map(Scalar::to_f64_lossy).collect(),
            values: self.values.iter().map(Scalar::to_f64_lossy).collect(),
        }
    }

    pub fn from_file(file: &StepKernelFile) -> Result<Self> {
        let weights = file.weights.iter().map(Number::to_scalar).collect::<Result<_>>()?;
        let values = file
            .values
            .iter()
            .map(|row| row.iter().map(Number::to_scalar).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Self::new(weights, values)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }

    /// Weights as strings; values as JSON numbers, or strings when exact.
    pub fn to_file(&self) -> StepKernelFile {
        StepKernelFile {
            weights: self.weights.iter().map(|z| Number::Text(z.to_text())).collect(),
            values: self.rows().iter().map(|row| row.iter().map(Number::from_scalar).collect()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("kernel serializes")
    }
}

/// `{"weights": ["1/2", "1/2"], "values": [[0, 1], [1, 0]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepKernelFile {
    pub weights: Vec<Number>,
    pub values: Vec<Vec<Number>>,
}

/// A JSON number or an exact `"p/q"` / decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Value(f64),
    Text(String),
}

impl Number {
    fn from_scalar<T: Scalar>(v: &T) -> Self {
        if T::EXACT {
            Number::Text(v.to_text())
        } else {
            Number::Value(v.to_f64_lossy())
        }
    }

    fn to_scalar<T: Scalar>(&self) -> Result<T> {
        match self {
            Number::Value(x) if x.is_finite() => Ok(T::from_f64_lossy(*x)),
            Number::Value(x) => Err(Error::Parse(format!("non-finite number {x}"))),
            Number::Text(s) => Ok(T::from_rational(&rational::parse(s)?)),
        }
    }
}
