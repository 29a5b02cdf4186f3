use std::fmt::Write as _;

use super::{StepKernel, VelocityOperator};
use crate::error::{Error, Result};
use crate::rule::Rule;
use crate::scalar::Scalar;
use crate::DEFAULT_CAP;

/// Largest excursion outside `[0, 1]` that is clamped rather than reported.
pub const DRIFT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct IntegrateOptions {
    /// RK4 step size `h`.
    pub step: f64,
    /// Permit a start outside `[0, 1]`; no clamping is applied then.
    pub allow_kernel: bool,
    /// Keep every `emit_every`-th grid state (the final state is always kept).
    pub emit_every: usize,
    pub cap: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions { step: 1e-3, allow_kernel: false, emit_every: 1, cap: DEFAULT_CAP }
    }
}

/// States of `Θ^t_R W` at increasing times on one partition.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    order: usize,
    step: f64,
    times: Vec<f64>,
    states: Vec<StepKernel<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[StepKernel<T>] {
        &self.states
    }

    pub fn last(&self) -> &StepKernel<T> {
        self.states.last().expect("trajectory has a start state")
    }

    /// The stored state whose time is nearest to `t`.
    pub fn nearest(&self, t: f64) -> &StepKernel<T> {
        let i = self.times.partition_point(|&s| s < t);
        let i = match i {
            0 => 0,
            i if i == self.times.len() => i - 1,
            i if t - self.times[i - 1] <= self.times[i] - t => i - 1,
            i => i,
        };
        &self.states[i]
    }

    /// `t,w_1_1,w_1_2,...`: one row per state, upper triangle row-major.
    pub fn to_csv(&self) -> String {
        let m = self.states[0].parts();
        let mut out = String::from("t");
        for i in 1..=m {
            for j in i..=m {
                let _ = write!(out, ",w_{i}_{j}");
            }
        }
        out.push('\n');
        for (t, w) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{t}");
            for v in w.upper() {
                let _ = write!(out, ",{}", v.to_f64_lossy());
            }
            out.push('\n');
        }
        out
    }
}

struct Stepper<T> {
    op: VelocityOperator<T>,
    clamp: bool,
}

impl<T: Scalar> Stepper<T> {
    fn rhs(&self, base: &StepKernel<T>, y: &[T]) -> Vec<T> {
        self.op.apply(&base.with_upper(y)).upper()
    }

    fn rk4(&self, base: &StepKernel<T>, y: &[T], h: &T) -> Vec<T> {
        let two = T::one() + T::one();
        let half = h.clone() / two.clone();
        let shift = |k: &[T], by: &T| -> Vec<T> { y.iter().zip(k).map(|(a, b)| a.clone() + by.clone() * b.clone()).collect() };
        let k1 = self.rhs(base, y);
        let k2 = self.rhs(base, &shift(&k1, &half));
        let k3 = self.rhs(base, &shift(&k2, &half));
        let k4 = self.rhs(base, &shift(&k3, h));
        let sixth = h.clone() / (two.clone() + two.clone() + two);
        y.iter()
            .enumerate()
            .map(|(i, a)| {
                let two = T::one() + T::one();
                let sum = k1[i].clone() + two.clone() * k2[i].clone() + two * k3[i].clone() + k4[i].clone();
                a.clone() + sixth.clone() * sum
            })
            .collect()
    }

    /// Clamps values within the drift tolerance back into `[0, 1]`.
    fn settle(&self, y: &mut [T], t: f64) -> Result<()> {
        if !self.clamp {
            return Ok(());
        }
        let tol = T::from_f64_lossy(DRIFT_TOLERANCE);
        for v in y.iter_mut() {
            let over = if v.is_negative() {
                -v.clone()
            } else if *v > T::one() {
                v.clone() - T::one()
            } else {
                continue;
            };
            if over > tol {
                return Err(Error::Drift { t, overshoot: over.to_f64_lossy() });
            }
            *v = if v.is_negative() { T::zero() } else { T::one() };
        }
        Ok(())
    }

    /// Advances from `t0` to `t1` in equal substeps no longer than `h`.
    fn advance(&self, base: &StepKernel<T>, y: Vec<T>, t0: f64, t1: f64, h: f64) -> Result<Vec<T>> {
        let span = t1 - t0;
        if span <= 0.0 {
            return Ok(y);
        }
        let n = ((span / h) - 1e-9).ceil().max(1.0) as usize;
        let sub = T::from_f64_lossy(span / n as f64);
        let mut y = y;
        for s in 0..n {
            y = self.rk4(base, &y, &sub);
            self.settle(&mut y, t0 + span * (s + 1) as f64 / n as f64)?;
        }
        Ok(y)
    }
}

fn stepper<T: Scalar>(rule: &Rule, w0: &StepKernel<T>, opts: &IntegrateOptions, forward: bool) -> Result<Stepper<T>> {
    if !(opts.step > 0.0 && opts.step.is_finite()) {
        return Err(Error::Invalid("step size must be positive".into()));
    }
    let graphon = w0.is_graphon();
    if !graphon && forward && !opts.allow_kernel {
        return Err(Error::Invalid("start is not a graphon; pass allow_kernel to integrate a kernel".into()));
    }
    Ok(Stepper { op: VelocityOperator::new(rule, opts.cap)?, clamp: graphon })
}

/// RK4 on the grid `0, h, 2h, …, t_max` (last step shortened if needed).
pub fn integrate<T: Scalar>(rule: &Rule, w0: &StepKernel<T>, t_max: f64, opts: &IntegrateOptions) -> Result<Trajectory<T>> {
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::Invalid("t_max must be a non-negative number".into()));
    }
    let st = stepper(rule, w0, opts, t_max > 0.0)?;
    let every = opts.emit_every.max(1);
    let mut times = vec![0.0];
    let mut states = vec![w0.clone()];
    let mut y = w0.upper();
    let mut t = 0.0;
    let mut i = 0usize;
    while t < t_max {
        i += 1;
        let next = (i as f64 * opts.step).min(t_max);
        let next = if t_max - next < opts.step * 1e-9 { t_max } else { next };
        y = st.advance(w0, y, t, next, opts.step)?;
        t = next;
        if i.is_multiple_of(every) || t >= t_max {
            times.push(t);
            states.push(w0.with_upper(&y));
        }
    }
    Ok(Trajectory { order: rule.order(), step: opts.step, times, states })
}

/// States at the given non-decreasing times, each reached with substeps of
/// at most `h`.
pub fn integrate_at<T: Scalar>(rule: &Rule, w0: &StepKernel<T>, times: &[f64], opts: &IntegrateOptions) -> Result<Trajectory<T>> {
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || times.windows(2).any(|p| p[1] < p[0]) {
        return Err(Error::Invalid("times must be non-negative and non-decreasing".into()));
    }
    let st = stepper(rule, w0, opts, times.iter().any(|&t| t > 0.0))?;
    let mut y = w0.upper();
    let mut t = 0.0;
    let mut states = Vec::with_capacity(times.len());
    for &target in times {
        y = st.advance(w0, y, t, target, opts.step)?;
        t = target;
        states.push(w0.with_upper(&y));
    }
    Ok(Trajectory { order: rule.order(), step: opts.step, times: times.to_vec(), states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::{make_named, Family, NamedParams};

    fn named(f: Family, k: usize) -> Rule {
        make_named(f, k, &NamedParams::default()).unwrap()
    }

    #[test]
    fn identity_is_constant() {
        let w = StepKernel::new(vec![0.25, 0.75], vec![vec![0.1, 0.9], vec![0.9, 0.4]]).unwrap();
        let traj = integrate(&Rule::identity(3).unwrap(), &w, 0.5, &IntegrateOptions { step: 0.01, ..Default::default() }).unwrap();
        assert_eq!(traj.times().len(), 51);
        assert!(traj.states().iter().all(|s| *s == w));
    }

    #[test]
    fn triangle_removal_analytic() {
        let tr = named(Family::TriangleRemoval, 3);
        let traj = integrate(&tr, &StepKernel::constant(0.8), 2.0, &IntegrateOptions::default()).unwrap();
        for (t, s) in traj.times().iter().zip(traj.states()) {
            let exact = 0.8 / (1.0 + 12.0 * 0.64 * t).sqrt();
            assert!((s.value(0, 0) - exact).abs() < 1e-6, "t = {t}");
        }
        assert_eq!(*traj.times().last().unwrap(), 2.0);
    }

    #[test]
    fn csv_layout() {
        let w = StepKernel::new(vec![0.5, 0.5], vec![vec![0.1, 0.2], vec![0.2, 0.3]]).unwrap();
        let traj = integrate(&Rule::identity(2).unwrap(), &w, 0.0, &IntegrateOptions::default()).unwrap();
        assert_eq!(traj.to_csv(), "t,w_1_1,w_1_2,w_2_2\n0,0.1,0.2,0.3\n");
    }

    #[test]
    fn kernel_start_needs_flag() {
        let w = StepKernel::constant(1.5);
        let tr = named(Family::TriangleRemoval, 3);
        assert!(integrate(&tr, &w, 0.1, &IntegrateOptions::default()).is_err());
        let opts = IntegrateOptions { allow_kernel: true, ..Default::default() };
        assert!(integrate(&tr, &w, 0.1, &opts).is_ok());
        assert!(integrate(&tr, &w, 0.0, &IntegrateOptions::default()).is_ok());
    }

    #[test]
    fn sampled_times_match_grid() {
        let c = named(Family::Complementing, 3);
        let w = StepKernel::constant(0.1);
        let at = integrate_at(&c, &w, &[0.0, 0.25, 0.5], &IntegrateOptions::default()).unwrap();
        for (t, s) in at.times().iter().zip(at.states()) {
            assert!((s.value(0, 0) - (0.5 - 0.4 * (-12.0 * t).exp())).abs() < 1e-6);
        }
    }
}
