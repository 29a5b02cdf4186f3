//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use flipproc::equivalence::symmetrize;
use flipproc::graph::{stabilizer, GraphCode, Perm, RootedGraph};
use flipproc::rational::ratio;
use flipproc::rule::Rule;
use flipproc::{Kernel, Rational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pairs(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Random probability vector of length `len` with small positive integer weights.
pub fn random_distribution(rng: &mut impl Rng, len: usize) -> Vec<Rational> {
    let w: Vec<i64> = (0..len).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = w.iter().sum();
    w.into_iter().map(|x| ratio(x, total)).collect()
}

/// Random rule with up to `max_rows` explicit rows, each with 1 to 4 targets.
pub fn random_rule(rng: &mut impl Rng, k: usize, max_rows: usize) -> Rule {
    let n = 1u64 << pairs(k);
    let mut codes: Vec<u64> = (0..n).collect();
    codes.shuffle(rng);
    let rows = rng.gen_range(1..=max_rows.min(n as usize));
    let mut entries = Vec::new();
    for &f in &codes[..rows] {
        let mut targets: Vec<u64> = (0..n).collect();
        targets.shuffle(rng);
        let t = rng.gen_range(1..=4.min(n as usize));
        for (&h, p) in targets[..t].iter().zip(random_distribution(rng, t)) {
            entries.push((f, h, p));
        }
    }
    Rule::from_entries(k, &entries).unwrap()
}

/// Random rule whose first explicit row has full support.
pub fn random_rule_full_row(rng: &mut impl Rng, k: usize) -> Rule {
    let n = 1u64 << pairs(k);
    let f = rng.gen_range(0..n);
    let mut entries: Vec<(u64, u64, Rational)> =
        (0..n).zip(random_distribution(rng, n as usize)).map(|(h, p)| (f, h, p)).collect();
    let base = random_rule(rng, k, 3);
    for (g, h, p) in base.entries() {
        if g.bits() != f {
            entries.push((g.bits(), h.bits(), p.clone()));
        }
    }
    Rule::from_entries(k, &entries).unwrap()
}

/// Symmetric rule that is not deterministic, with D1 available.
pub fn random_symmetric_nondeterministic(rng: &mut impl Rng, k: usize) -> Rule {
    symmetrize(&random_rule_full_row(rng, k)).unwrap()
}

pub fn random_nonsymmetric(rng: &mut impl Rng, k: usize) -> Rule {
    loop {
        let r = random_rule(rng, k, 4);
        if !r.is_symmetric().unwrap() {
            return r;
        }
    }
}

/// Symmetric deterministic rule: on a few random orbits, `σF ↦ σH` with
/// `H` chosen among graphs fixed by the stabilizer of `F`.
pub fn random_symmetric_deterministic(rng: &mut impl Rng, k: usize) -> Rule {
    let n = 1u64 << pairs(k);
    let all = Perm::all(k);
    let mut map: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..rng.gen_range(1..=3) {
        let f = GraphCode::new(k, rng.gen_range(0..n)).unwrap();
        if map.contains_key(&f.bits()) {
            continue;
        }
        let stab = stabilizer(f).unwrap();
        let fixed: Vec<GraphCode> = GraphCode::all(k).filter(|h| stab.iter().all(|s| s.act(*h) == *h)).collect();
        let h = *fixed.choose(rng).unwrap();
        for s in &all {
            map.insert(s.act(f).bits(), s.act(h).bits());
        }
    }
    let entries: Vec<_> = map.into_iter().map(|(f, h)| (f, h, ratio(1, 1))).collect();
    Rule::from_entries(k, &entries).unwrap()
}

/// Ignorant rule with replacement distribution over random targets.
pub fn ignorant(k: usize, dist: &[(u64, Rational)]) -> Rule {
    let entries: Vec<_> =
        (0..1u64 << pairs(k)).flat_map(|f| dist.iter().map(move |(h, p)| (f, *h, p.clone()))).collect();
    Rule::from_entries(k, &entries).unwrap()
}

#[allow(clippy::needless_range_loop)]
pub fn random_kernel(rng: &mut impl Rng, m: usize) -> Kernel {
    let w: Vec<f64> = (0..m).map(|_| rng.gen_range(1..=5) as f64).collect();
    let total: f64 = w.iter().sum();
    let weights = w.into_iter().map(|x| x / total).collect();
    let mut values = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v: f64 = rng.gen_range(0.0..=1.0);
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    Kernel::new(weights, values).unwrap()
}

/// All permutations of `0..k`, lexicographic.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                go(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

fn pair_bit(i: usize, j: usize) -> usize {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    hi * (hi - 1) / 2 + lo
}

/// Edge bitmask relabelled by `sigma` (vertex `i` goes to `sigma[i]`).
pub fn relabel(k: usize, bits: u64, sigma: &[usize]) -> u64 {
    let mut out = 0;
    for j in 1..k {
        for i in 0..j {
            if bits >> pair_bit(i, j) & 1 == 1 {
                out |= 1 << pair_bit(sigma[i], sigma[j]);
            }
        }
    }
    out
}

/// Lexicographically least `(bits, a, b)` image over all relabellings.
pub fn brute_canon(k: usize, bits: u64, a: usize, b: usize, perms: &[Vec<usize>]) -> (u64, usize, usize) {
    perms.iter().map(|s| (relabel(k, bits, s), s[a], s[b])).min().unwrap()
}

/// Coefficients from the defining sum over every rooted element, keyed by
/// brute-force canonical form with 1-based roots.
pub fn naive_coefficients(rule: &Rule) -> BTreeMap<(u64, usize, usize), Rational> {
    let k = rule.order();
    let perms = permutations(k);
    let mut out = BTreeMap::new();
    for f in GraphCode::all(k) {
        let row = rule.row(f);
        for a in 0..k {
            for b in 0..k {
                if a == b {
                    continue;
                }
                let bit = pair_bit(a, b);
                let mut z: Rational = row
                    .iter()
                    .filter(|(h, _)| h.bits() >> bit & 1 == 1)
                    .map(|(_, p)| p.clone())
                    .sum();
                if f.bits() >> bit & 1 == 1 {
                    z -= ratio(1, 1);
                }
                let (c, x, y) = brute_canon(k, f.bits(), a, b, &perms);
                *out.entry((c, x + 1, y + 1)).or_insert_with(|| ratio(0, 1)) += z;
            }
        }
    }
    out
}

/// Random graph on `n` vertices with edge probability 1/2.
pub fn random_edges(rng: &mut impl Rng, n: usize) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for j in 1..n {
        for i in 0..j {
            if rng.gen_bool(0.5) {
                e.push((i, j));
            }
        }
    }
    e
}

/// Random rooted graph on `n` vertices that is twinfree, with `roots` roots.
pub fn random_twinfree(rng: &mut impl Rng, n: usize, roots: usize) -> RootedGraph {
    loop {
        let mut vs: Vec<usize> = (0..n).collect();
        vs.shuffle(rng);
        let g = RootedGraph::numbered(n, &random_edges(rng, n), vs[..roots].to_vec()).unwrap();
        if g.is_twinfree() {
            return g;
        }
    }
}
