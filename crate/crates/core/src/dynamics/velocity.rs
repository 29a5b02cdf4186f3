use super::StepKernel;
use crate::equivalence::edge_change;
use crate::error::{Error, Result};
use crate::graph::{pair_count, pair_from_index, Perm};
use crate::rational::Rational;
use crate::rule::Rule;
use crate::scalar::Scalar;

/// `V_R` regrouped by the graph induced on an ordered tuple: with roots
/// relabelled to `(1, 2)`,
///
/// ```text
/// V_R W(x, y) = Σ_{F ∈ L_k} w(F) · T_{F^{1,2}} W(x, y)
/// ```
///
/// where `w(F)` collects `Z_{G^{a,b}}` over all rooted `G^{a,b}` that
/// relabel to `F^{1,2}`. Evaluation enumerates part assignments of the
/// `k − 2` free vertices and folds `w` against the pair values.
#[derive(Clone, Debug)]
pub struct VelocityOperator<T> {
    order: usize,
    weights: Vec<T>,
}

impl<T: Scalar> VelocityOperator<T> {
    /// Fails when `2^C(k,2)` weights would exceed the enumeration cap.
    pub fn new(rule: &Rule, cap: usize) -> Result<Self> {
        let k = rule.order();
        if k > cap {
            return Err(Error::CapExceeded { order: k, cap });
        }
        let mut acc = vec![Rational::default(); if k < 2 { 0 } else { 1 << pair_count(k) }];
        for f in rule.explicit_rows() {
            let row = rule.row(f);
            for a in 0..k {
                for b in 0..k {
                    if a == b {
                        continue;
                    }
                    let z = edge_change(&row, f, a, b);
                    if z != Rational::default() {
                        acc[to_front(k, a, b).act(f).bits() as usize] += z;
                    }
                }
            }
        }
        Ok(VelocityOperator { order: k, weights: acc.iter().map(T::from_rational).collect() })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `V_R W` on block `(x, y)`.
    pub fn block(&self, w: &StepKernel<T>, x: usize, y: usize) -> T {
        let k = self.order;
        if k < 2 {
            return T::zero();
        }
        let m = w.parts();
        let pairs = pair_count(k);
        let ends: Vec<(usize, usize)> = (0..pairs).map(pair_from_index).collect();
        let mut part = vec![0usize; k];
        part[0] = x;
        part[1] = y;
        let mut total = T::zero();
        let mut buf = self.weights.clone();
        loop {
            let mass = part[2..].iter().fold(T::one(), |acc, &p| acc * w.weights()[p].clone());
            if !mass.is_zero() {
                buf.clone_from(&self.weights);
                let mut len = buf.len();
                for &(i, j) in &ends {
                    let q = w.value(part[i], part[j]).clone();
                    let off = T::one() - q.clone();
                    len /= 2;
                    for t in 0..len {
                        buf[t] = buf[2 * t].clone() * off.clone() + buf[2 * t + 1].clone() * q.clone();
                    }
                }
                total = total + mass * buf[0].clone();
            }
            let mut pos = 2;
            loop {
                if pos == k {
                    return total;
                }
                part[pos] += 1;
                if part[pos] < m {
                    break;
                }
                part[pos] = 0;
                pos += 1;
            }
        }
    }

    /// `V_R W` as a kernel on the same partition.
    pub fn apply(&self, w: &StepKernel<T>) -> StepKernel<T> {
        let m = w.parts();
        let upper: Vec<T> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).map(|(i, j)| self.block(w, i, j)).collect();
        w.with_upper(&upper)
    }
}

/// The permutation sending `a ↦ 0`, `b ↦ 1` and the rest, in order, to `2..k`.
fn to_front(k: usize, a: usize, b: usize) -> Perm {
    let mut images = vec![0; k];
    images[a] = 0;
    images[b] = 1;
    let mut next = 2;
    for (v, img) in images.iter_mut().enumerate() {
        if v != a && v != b {
            *img = next;
            next += 1;
        }
    }
    Perm::new(images).expect("bijection")
}

pub fn velocity<T: Scalar>(rule: &Rule, w: &StepKernel<T>, cap: usize) -> Result<StepKernel<T>> {
    Ok(VelocityOperator::new(rule, cap)?.apply(w))
}

/// `C_k = (k)_2^2 · 2^{C(k,2) − 1}` with `(k)_2 = k(k − 1)`.
pub fn lipschitz_constant(k: usize) -> f64 {
    let falling = (k * k.saturating_sub(1)) as f64;
    falling * falling * 2f64.powi(pair_count(k) as i32 - 1)
}
