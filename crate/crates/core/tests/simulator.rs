mod common;

use std::collections::BTreeSet;

use common::*;
use flipproc::dynamics::velocity;
use flipproc::rule::{make_named, Family, NamedParams};
use flipproc::sim::{part_sizes, run, BitGraph, FlipProcess, Initial, SimConfig};
use flipproc::{Error, Kernel, DEFAULT_CAP};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn edge_set(g: &BitGraph) -> BTreeSet<(usize, usize)> {
    g.edges().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn steps_only_touch_tuple_pairs(seed in any::<u64>(), k in 2usize..=4, n in 4usize..=20) {
        let mut rng = rng(seed);
        let rule = random_rule(&mut rng, k, 8);
        let graph = BitGraph::from_edges(n, &random_edges(&mut rng, n)).unwrap();
        let part: Vec<usize> = (0..n).map(|v| v % 2).collect();
        let mut process = FlipProcess::new(graph, &rule, part.clone()).unwrap();
        for _ in 0..30 {
            let before = edge_set(process.graph());
            let out = process.step(&mut rng);
            let after = edge_set(process.graph());
            let tuple: BTreeSet<usize> = out.tuple.iter().copied().collect();
            prop_assert_eq!(tuple.len(), k);
            for &(u, v) in before.symmetric_difference(&after) {
                prop_assert!(tuple.contains(&u) && tuple.contains(&v));
            }
            // incremental block counts agree with a recount
            for (i, j) in [(0, 0), (0, 1), (1, 1)] {
                let pairs_ij = after.iter().filter(|&&(u, v)| {
                    (part[u], part[v]) == (i, j) || (part[u], part[v]) == (j, i)
                }).count() as f64;
                let (si, sj) = ((0..n).filter(|v| part[*v] == i).count() as f64, (0..n).filter(|v| part[*v] == j).count() as f64);
                let total = if i == j { si * (si - 1.0) / 2.0 } else { si * sj };
                prop_assert!((process.block_density(i, j).unwrap() - pairs_ij / total).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn part_sizes_sum_to_n(raw in prop::collection::vec(1u32..10, 1..6), n in 0usize..500) {
        let total: u32 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|&x| x as f64 / total as f64).collect();
        let sizes = part_sizes(&w, n);
        prop_assert_eq!(sizes.iter().sum::<usize>(), n);
        for (s, z) in sizes.iter().zip(&w) {
            prop_assert!((*s as f64 - z * n as f64).abs() < 1.0 + 1e-9);
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let w = Kernel::new(vec![0.4, 0.6], vec![vec![0.7, 0.2], vec![0.2, 0.5]]).unwrap();
    let mut cfg = SimConfig::new(make_named(Family::Complementing, 3, &NamedParams::default()).unwrap(), 80, Initial::Kernel(w), 0.2, 77);
    cfg.runs = 4;
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
    assert_ne!(a.runs[0].densities, a.runs[1].densities);
    cfg.seed = 78;
    assert_ne!(run(&cfg).unwrap().runs[0].densities, a.runs[0].densities);
}

#[test]
fn edge_density_drift_matches_velocity() {
    let p = 0.8;
    let rule = make_named(Family::TriangleRemoval, 3, &NamedParams::default()).unwrap();
    let mut cfg = SimConfig::new(rule.clone(), 400, Initial::Kernel(Kernel::constant(p)), 0.002, 5);
    cfg.runs = 24;
    cfg.samples = 1;
    let result = run(&cfg).unwrap();
    let slopes: Vec<f64> = result
        .runs
        .iter()
        .map(|r| (r.densities[1][0].unwrap() - r.densities[0][0].unwrap()) / cfg.horizon)
        .collect();
    let n = slopes.len() as f64;
    let mean = slopes.iter().sum::<f64>() / n;
    let sd = (slopes.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let expected = *velocity(&rule, &Kernel::constant(p), DEFAULT_CAP).unwrap().value(0, 0);
    assert!((mean - expected).abs() <= 3.0 * sd / n.sqrt(), "mean {mean}, velocity {expected}, sd {sd}");
}

#[test]
fn graph_start_and_limits() {
    let rule = make_named(Family::TriangleRemoval, 3, &NamedParams::default()).unwrap();
    let triangle = vec![(0, 1), (0, 2), (1, 2)];
    let mut cfg = SimConfig::new(rule.clone(), 3, Initial::Graph(triangle), 1.0, 1);
    cfg.samples = 1;
    let result = run(&cfg).unwrap();
    assert!(result.reference.is_none());
    // nine steps on K3 of order 3: the first step empties it
    assert_eq!(result.runs[0].densities[1][0], Some(0.0));

    let mut big = SimConfig::new(rule.clone(), 10, Initial::Kernel(Kernel::constant(0.5)), 0.1, 1);
    big.max_n = 5;
    assert!(matches!(run(&big), Err(Error::TooLarge { .. })));
    let tiny = SimConfig::new(rule, 2, Initial::Kernel(Kernel::constant(0.5)), 0.1, 1);
    assert!(run(&tiny).is_err());
}

#[test]
fn tuples_are_uniform_over_ordered_triples() {
    let rule = make_named(Family::Identity, 3, &NamedParams::default()).unwrap();
    let mut process = FlipProcess::new(BitGraph::new(4), &rule, vec![0; 4]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut counts = std::collections::HashMap::new();
    let draws = 48_000;
    for _ in 0..draws {
        *counts.entry(process.step(&mut rng).tuple).or_insert(0usize) += 1;
    }
    // 4·3·2 ordered triples, each expected 2000 times
    assert_eq!(counts.len(), 24);
    for c in counts.values() {
        assert!((*c as f64 - 2000.0).abs() < 5.0 * 2000f64.sqrt(), "{c}");
    }
}
