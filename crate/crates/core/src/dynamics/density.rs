use super::StepKernel;
use crate::error::{Error, Result};
use crate::graph::{count_rrr_maps, BlowupVector, RootedGraph, RootedPairGraph};
use crate::scalar::Scalar;

/// Sum over part assignments of the free vertices of
/// `Π z · Π_{edges} W · Π_{non-edges} (1 − W)`, with `pinned[i]` fixing
/// vertex `i` to a part.
fn induced_density<T: Scalar>(
    n: usize,
    edge: impl Fn(usize, usize) -> bool,
    pinned: &[Option<usize>],
    w: &StepKernel<T>,
) -> T {
    let m = w.parts();
    let free: Vec<usize> = (0..n).filter(|&v| pinned[v].is_none()).collect();
    let mut part: Vec<usize> = pinned.iter().map(|p| p.unwrap_or(0)).collect();
    let mut total = T::zero();
    loop {
        let mut term = free.iter().fold(T::one(), |acc, &v| acc * w.weights()[part[v]].clone());
        if !term.is_zero() {
            'pairs: for j in 1..n {
                for i in 0..j {
                    let x = w.value(part[i], part[j]).clone();
                    term = term * if edge(i, j) { x } else { T::one() - x };
                    if term.is_zero() {
                        break 'pairs;
                    }
                }
            }
            total = total + term;
        }
        // odometer over the free vertices
        let mut pos = 0;
        loop {
            if pos == free.len() {
                return total;
            }
            let v = free[pos];
            part[v] += 1;
            if part[v] < m {
                break;
            }
            part[v] = 0;
            pos += 1;
        }
    }
}

fn check_part<T: Scalar>(w: &StepKernel<T>, x: usize) -> Result<()> {
    if x >= w.parts() {
        return Err(Error::Invalid(format!("part {} out of range 1..={}", x + 1, w.parts())));
    }
    Ok(())
}

/// `T_{F^{a,b}} W(x, y)` for `x ∈ Ω_x`, `y ∈ Ω_y`.
pub fn rooted_density<T: Scalar>(g: &RootedPairGraph, w: &StepKernel<T>, x: usize, y: usize) -> Result<T> {
    check_part(w, x)?;
    check_part(w, y)?;
    let k = g.order();
    let mut pinned = vec![None; k];
    pinned[g.a] = Some(x);
    pinned[g.b] = Some(y);
    Ok(induced_density(k, |i, j| g.graph.has_edge(i, j), &pinned, w))
}

/// Rooted induced density of a graph with exactly two ordered roots.
pub fn rooted_density_graph<T: Scalar>(g: &RootedGraph, w: &StepKernel<T>, x: usize, y: usize) -> Result<T> {
    check_part(w, x)?;
    check_part(w, y)?;
    let &[p, q] = g.roots() else {
        return Err(Error::Invalid(format!("expected two roots, found {}", g.roots().len())));
    };
    let mut pinned = vec![None; g.vertex_count()];
    pinned[p] = Some(x);
    pinned[q] = Some(y);
    Ok(induced_density(g.vertex_count(), |i, j| g.has_edge(i, j), &pinned, w))
}

/// Both sides of the map-counting formula for `T_{F^R(m)} W_G^z(x, y)`.
///
/// Returns `(numeric, combinatorial)`: the density of the blowup evaluated
/// directly, and `Σ_φ Π_{i ∉ R} z_{φ(i)}^{m_i}` over root-order-preserving
/// root-respecting relation-preserving maps into the `(x,y)`-rooted version
/// of `G` (zero when `|R| > |T|`). Inputs outside the formula's hypotheses,
/// `|R| < |T|` or `v*(F^R) < v*(H^T)`, are rejected.
pub fn density_formula_check<T: Scalar>(
    base: &RootedGraph,
    m: &BlowupVector,
    g: &RootedGraph,
    z: &[T],
    x: usize,
    y: usize,
) -> Result<(T, T)> {
    if !base.is_twinfree() || !g.unrooted().is_twinfree() {
        return Err(Error::NotTwinfree);
    }
    if m.0.len() != base.vertex_count() || m.0.contains(&0) {
        return Err(Error::Invalid("blowup vector must be positive with one entry per vertex".into()));
    }
    if base.roots().iter().map(|&r| m.0[r]).sum::<usize>() != 2 {
        return Err(Error::Invalid("root multiplicities must sum to 2".into()));
    }
    let w = StepKernel::from_graph(&g.unrooted(), z.to_vec())?;
    let numeric = rooted_density_graph(&base.blowup(m)?, &w, x, y)?;

    let rooted = g.unrooted().rooted_version(&if x == y { vec![x] } else { vec![x, y] })?;
    let combinatorial = if base.roots().len() > rooted.roots().len() {
        T::zero()
    } else if base.roots().len() == rooted.roots().len() && base.v_star() >= rooted.v_star() {
        count_rrr_maps(base, &rooted)
            .iter()
            .map(|phi| {
                (0..base.vertex_count())
                    .filter(|&i| !base.is_root(i))
                    .fold(T::one(), |acc, i| acc * pow(&z[phi[i]], m.0[i]))
            })
            .fold(T::zero(), |a, b| a + b)
    } else {
        return Err(Error::Invalid("|R| < |T| or v*(F^R) < v*(H^T): formula does not apply".into()));
    };
    Ok((numeric, combinatorial))
}

fn pow<T: Scalar>(z: &T, e: usize) -> T {
    (0..e).fold(T::one(), |acc, _| acc * z.clone())
}
