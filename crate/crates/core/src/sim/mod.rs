//! The discrete flip process on `n` vertices.
//!
//! Each step draws an ordered `k`-tuple of distinct vertices uniformly,
//! reads the induced labelled graph `F` in tuple order, draws `H` from row
//! `F` of the rule and rewrites the `C(k,2)` tuple pairs to match `H`.
//! After `⌊t·n²⌋` steps the block edge densities on the initial partition
//! are compared with the integrated trajectory at time `t`.
//!
//! Runs are reproducible: run `r` of a configuration with master seed `s`
//! uses a ChaCha8 stream seeded with `splitmix64(s + (r + 1)·γ)`, where `γ`
//! is the 64-bit golden-ratio increment `0x9E3779B97F4A7C15`. The same
//! stream first samples the initial graph and then drives the process.

mod graph;

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{integrate_at, IntegrateOptions, StepKernel};
use crate::error::{Error, Result};
use crate::graph::{pair_count, pair_from_index};
use crate::rule::Rule;
use crate::scalar::Scalar;

pub use graph::BitGraph;

/// Default memory guard on the vertex count.
pub const DEFAULT_MAX_N: usize = 5000;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 output function.
pub fn splitmix64(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of run `run` under master seed `seed`.
pub fn run_seed(seed: u64, run: usize) -> u64 {
    splitmix64(seed.wrapping_add((run as u64 + 1).wrapping_mul(GOLDEN_GAMMA)))
}

#[derive(Clone, Debug)]
pub enum Initial {
    /// A step graphon, instantiated as a W-random graph per run.
    Kernel(StepKernel<f64>),
    /// A fixed graph; densities are measured on a single block.
    Graph(Vec<(usize, usize)>),
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub rule: Rule,
    pub n: usize,
    pub initial: Initial,
    /// Horizon `T`; the process runs `⌊T·n²⌋` steps.
    pub horizon: f64,
    pub seed: u64,
    pub runs: usize,
    /// Number of intervals between sample times; samples are `T·j/S`, `j = 0..=S`.
    pub samples: usize,
    pub max_n: usize,
    /// Step size for the reference trajectory.
    pub step: f64,
}

impl SimConfig {
    pub fn new(rule: Rule, n: usize, initial: Initial, horizon: f64, seed: u64) -> Self {
        SimConfig { rule, n, initial, horizon, seed, runs: 1, samples: 10, max_n: DEFAULT_MAX_N, step: 1e-3 }
    }

    fn check(&self) -> Result<()> {
        if self.n > self.max_n {
            return Err(Error::TooLarge { n: self.n, max: self.max_n });
        }
        if self.n < self.rule.order() {
            return Err(Error::Invalid(format!("n = {} is below the rule order {}", self.n, self.rule.order())));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::Invalid("horizon must be a non-negative number".into()));
        }
        if self.runs == 0 || self.samples == 0 {
            return Err(Error::Invalid("runs and samples must be positive".into()));
        }
        match &self.initial {
            Initial::Kernel(w) if !w.is_graphon() => Err(Error::Invalid("initial kernel must be a graphon".into())),
            Initial::Graph(edges) if edges.iter().any(|&(u, v)| u == v || u >= self.n || v >= self.n) => {
                Err(Error::Invalid("initial edge list has an invalid pair".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn sample_times(&self) -> Vec<f64> {
        (0..=self.samples).map(|j| self.horizon * j as f64 / self.samples as f64).collect()
    }

    /// Steps taken by time `t`.
    pub fn steps_at(&self, t: f64) -> u64 {
        (t * (self.n as f64) * (self.n as f64)).floor() as u64
    }
}

/// Part sizes `≈ z_i·n` by largest remainder; ties go to the lower index.
pub fn part_sizes(weights: &[f64], n: usize) -> Vec<usize> {
    let raw: Vec<f64> = weights.iter().map(|z| z * n as f64).collect();
    let mut sizes: Vec<usize> = raw.iter().map(|x| x.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| (raw[b] - raw[b].floor()).total_cmp(&(raw[a] - raw[a].floor())).then(a.cmp(&b)));
    let assigned: usize = sizes.iter().sum();
    for &i in order.iter().cycle().take(n.saturating_sub(assigned)) {
        sizes[i] += 1;
    }
    sizes
}

/// Cumulative distributions for the non-identity rows of a rule.
#[derive(Clone, Debug)]
pub struct RowSampler {
    order: usize,
    rows: HashMap<u64, (Vec<f64>, Vec<u64>)>,
}

impl RowSampler {
    pub fn new(rule: &Rule) -> Self {
        let rows = rule
            .explicit_rows()
            .map(|f| {
                let mut acc = 0.0;
                let (cum, to): (Vec<f64>, Vec<u64>) = rule
                    .row(f)
                    .into_iter()
                    .map(|(h, p)| {
                        acc += p.to_f64_lossy();
                        (acc, h.bits())
                    })
                    .unzip();
                (f.bits(), (cum, to))
            })
            .collect();
        RowSampler { order: rule.order(), rows }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn sample(&self, f: u64, rng: &mut impl Rng) -> u64 {
        match self.rows.get(&f) {
            None => f,
            Some((cum, to)) => {
                let u = rng.gen::<f64>() * cum[cum.len() - 1];
                to[cum.partition_point(|&c| c <= u).min(to.len() - 1)]
            }
        }
    }
}

/// One step's draw, for inspection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub tuple: Vec<usize>,
    pub drawn: u64,
    pub replacement: u64,
}

/// A running flip process with block edge counts on a fixed partition.
#[derive(Clone, Debug)]
pub struct FlipProcess {
    graph: BitGraph,
    sampler: RowSampler,
    index: Vec<usize>,
    part: Vec<usize>,
    sizes: Vec<usize>,
    counts: Vec<u64>,
}

impl FlipProcess {
    /// `part[v]` assigns vertices to blocks `0..parts`.
    pub fn new(graph: BitGraph, rule: &Rule, part: Vec<usize>) -> Result<Self> {
        let n = graph.vertex_count();
        if n < rule.order() || part.len() != n {
            return Err(Error::Invalid("graph too small or partition length mismatch".into()));
        }
        let parts = part.iter().max().map_or(1, |p| p + 1);
        let mut sizes = vec![0; parts];
        for &p in &part {
            sizes[p] += 1;
        }
        let mut counts = vec![0u64; parts * parts];
        for (u, v) in graph.edges() {
            counts[part[u] * parts + part[v]] += 1;
            if part[u] != part[v] {
                counts[part[v] * parts + part[u]] += 1;
            }
        }
        Ok(FlipProcess { graph, sampler: RowSampler::new(rule), index: (0..n).collect(), part, sizes, counts })
    }

    pub fn graph(&self) -> &BitGraph {
        &self.graph
    }

    pub fn parts(&self) -> usize {
        self.sizes.len()
    }

    fn set_pair(&mut self, u: usize, v: usize, on: bool) {
        if self.graph.has_edge(u, v) == on {
            return;
        }
        self.graph.set_edge(u, v, on);
        let m = self.parts();
        let (a, b) = (self.part[u], self.part[v]);
        for idx in if a == b { vec![a * m + b] } else { vec![a * m + b, b * m + a] } {
            if on {
                self.counts[idx] += 1;
            } else {
                self.counts[idx] -= 1;
            }
        }
    }

    /// One step of the process.
    pub fn step(&mut self, rng: &mut impl Rng) -> StepOutcome {
        let k = self.sampler.order();
        let n = self.index.len();
        for i in 0..k {
            let j = rng.gen_range(i..n);
            self.index.swap(i, j);
        }
        let tuple = self.index[..k].to_vec();
        let mut drawn = 0u64;
        for p in 0..pair_count(k) {
            let (i, j) = pair_from_index(p);
            if self.graph.has_edge(tuple[i], tuple[j]) {
                drawn |= 1 << p;
            }
        }
        let replacement = self.sampler.sample(drawn, rng);
        let diff = drawn ^ replacement;
        for p in 0..pair_count(k) {
            if diff >> p & 1 == 1 {
                let (i, j) = pair_from_index(p);
                self.set_pair(tuple[i], tuple[j], replacement >> p & 1 == 1);
            }
        }
        StepOutcome { tuple, drawn, replacement }
    }

    /// Edge density of block `(i, j)`, or `None` when it has no pairs.
    pub fn block_density(&self, i: usize, j: usize) -> Option<f64> {
        let (si, sj) = (self.sizes[i] as u64, self.sizes[j] as u64);
        let pairs = if i == j { si * si.saturating_sub(1) / 2 } else { si * sj };
        (pairs > 0).then(|| self.counts[i * self.parts() + j] as f64 / pairs as f64)
    }

    /// Upper-triangle block densities, row-major.
    pub fn densities(&self) -> Vec<Option<f64>> {
        let m = self.parts();
        (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).map(|(i, j)| self.block_density(i, j)).collect()
    }
}

/// Block densities of one run at each sample time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub densities: Vec<Vec<Option<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub n: usize,
    pub part_sizes: Vec<usize>,
    pub times: Vec<f64>,
    pub runs: Vec<RunRecord>,
    /// Integrated trajectory at the sample times, upper triangle.
    pub reference: Option<Vec<Vec<f64>>>,
}

impl SimResult {
    fn parts(&self) -> usize {
        self.part_sizes.len()
    }

    /// Largest block deviation from the reference, per run and sample time.
    pub fn deviations(&self) -> Option<Vec<Vec<f64>>> {
        let reference = self.reference.as_ref()?;
        Some(
            self.runs
                .iter()
                .map(|r| {
                    r.densities
                        .iter()
                        .zip(reference)
                        .map(|(d, w)| {
                            d.iter().zip(w).filter_map(|(x, y)| x.map(|x| (x - y).abs())).fold(0.0, f64::max)
                        })
                        .collect()
                })
                .collect(),
        )
    }

    /// Largest deviation over all times, per run.
    pub fn max_deviation(&self) -> Option<Vec<f64>> {
        self.deviations().map(|d| d.iter().map(|r| r.iter().copied().fold(0.0, f64::max)).collect())
    }

    /// `run,t,block_i,block_j,density,reference,abs_dev` with 1-based blocks.
    pub fn to_csv(&self) -> String {
        let m = self.parts();
        let blocks: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
        let mut out = String::from("run,t,block_i,block_j,density,reference,abs_dev\n");
        for r in &self.runs {
            for (s, (t, d)) in self.times.iter().zip(&r.densities).enumerate() {
                for (b, &(i, j)) in blocks.iter().enumerate() {
                    let density = d[b].map_or(String::new(), |x| x.to_string());
                    let (reference, dev) = match (&self.reference, d[b]) {
                        (Some(w), Some(x)) => (w[s][b].to_string(), (x - w[s][b]).abs().to_string()),
                        (Some(w), None) => (w[s][b].to_string(), String::new()),
                        _ => (String::new(), String::new()),
                    };
                    let _ = writeln!(out, "{},{t},{},{},{density},{reference},{dev}", r.run, i + 1, j + 1);
                }
            }
        }
        out
    }
}

fn initial_state(config: &SimConfig, rng: &mut ChaCha8Rng) -> Result<(BitGraph, Vec<usize>)> {
    let n = config.n;
    match &config.initial {
        Initial::Graph(edges) => Ok((BitGraph::from_edges(n, edges)?, vec![0; n])),
        Initial::Kernel(w) => {
            let sizes = part_sizes(w.weights(), n);
            let part: Vec<usize> = sizes.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat_n(i, s)).collect();
            let mut g = BitGraph::new(n);
            for v in 1..n {
                for u in 0..v {
                    if rng.gen::<f64>() < *w.value(part[u], part[v]) {
                        g.set_edge(u, v, true);
                    }
                }
            }
            Ok((g, part))
        }
    }
}

fn simulate_run(config: &SimConfig, run: usize, times: &[f64]) -> Result<RunRecord> {
    let seed = run_seed(config.seed, run);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (graph, part) = initial_state(config, &mut rng)?;
    let mut process = FlipProcess::new(graph, &config.rule, part)?;
    let mut done = 0u64;
    let mut densities = Vec::with_capacity(times.len());
    for &t in times {
        let target = config.steps_at(t);
        while done < target {
            process.step(&mut rng);
            done += 1;
        }
        densities.push(process.densities());
    }
    Ok(RunRecord { run, seed, densities })
}

/// Runs the process `config.runs` times in parallel, plus the reference
/// trajectory when the start is a step graphon.
pub fn run(config: &SimConfig) -> Result<SimResult> {
    config.check()?;
    let times = config.sample_times();
    let runs = (0..config.runs)
        .into_par_iter()
        .map(|r| simulate_run(config, r, &times))
        .collect::<Result<Vec<_>>>()?;
    let (part_sizes, reference) = match &config.initial {
        Initial::Kernel(w) => {
            let opts = IntegrateOptions { step: config.step, ..Default::default() };
            let traj = integrate_at(&config.rule, w, &times, &opts)?;
            (part_sizes(w.weights(), config.n), Some(traj.states().iter().map(StepKernel::upper).collect()))
        }
        Initial::Graph(_) => (vec![config.n], None),
    };
    Ok(SimResult { n: config.n, part_sizes, times, runs, reference })
}

/// Outcome of comparing simulated block densities with the trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferenceReport {
    pub n: usize,
    pub horizon: f64,
    pub tolerance: f64,
    pub times: Vec<f64>,
    /// Largest block deviation over all runs at each sample time.
    pub max_deviation: Vec<f64>,
    /// Largest deviation over all times, per run.
    pub run_max_deviation: Vec<f64>,
    pub runs_within: usize,
    pub runs: usize,
    /// Every run stays within tolerance at every sample time.
    pub pass: bool,
    pub note: String,
}

pub fn transference_check(config: &SimConfig, tolerance: f64) -> Result<TransferenceReport> {
    if !matches!(config.initial, Initial::Kernel(_)) {
        return Err(Error::Invalid("transference check needs a step-graphon start".into()));
    }
    let result = run(config)?;
    let dev = result.deviations().expect("kernel start has a reference");
    let max_deviation = (0..result.times.len()).map(|s| dev.iter().map(|r| r[s]).fold(0.0, f64::max)).collect();
    let run_max_deviation: Vec<f64> = result.max_deviation().expect("reference present");
    let runs_within = run_max_deviation.iter().filter(|&&d| d <= tolerance).count();
    Ok(TransferenceReport {
        n: config.n,
        horizon: config.horizon,
        tolerance,
        times: result.times,
        max_deviation,
        runs_within,
        runs: config.runs,
        pass: runs_within == config.runs,
        run_max_deviation,
        note: "desk-scale tolerance chosen empirically; the limit theorem is asymptotic in n".into(),
    })
}
