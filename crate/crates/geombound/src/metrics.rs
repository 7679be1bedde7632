//! Probability metrics between truncated pmfs.
//!
//! Results are intervals: the lower endpoint is a certified lower bound on
//! the true metric, the upper endpoint a certified upper bound. When both
//! inputs have (numerically) zero tail mass the interval collapses to a
//! point.

use crate::pmf::{DiscretePmf, MASS_TOL};

/// A certified enclosure [lo, hi] of a metric value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// Index up to which both pmfs have exactly known point masses.
/// A zero-tail pmf is known everywhere (its mass beyond L is exactly 0).
fn known_level(a: &DiscretePmf, b: &DiscretePmf) -> usize {
    let la = if a.tail_mass() <= MASS_TOL {
        usize::MAX
    } else {
        a.truncation_level()
    };
    let lb = if b.tail_mass() <= MASS_TOL {
        usize::MAX
    } else {
        b.truncation_level()
    };
    la.min(lb).min(a.truncation_level().max(b.truncation_level()))
}

/// Total variation distance, d_TV = sup_A |ℙ(a ∈ A) − ℙ(b ∈ A)|.
///
/// Everything above the jointly known level is treated as a single atom,
/// which gives the certified enclosure
/// `[base + |sa−sb|/2, base + (sa+sb)/2]` with `base` the half L1 distance
/// of the known entries and `sa`, `sb` the residual survival masses.
pub fn tv_distance(a: &DiscretePmf, b: &DiscretePmf) -> Interval {
    let k = known_level(a, b);
    let mut base = 0.0;
    for j in 0..=k {
        base += (a.prob(j) - b.prob(j)).abs();
    }
    base *= 0.5;
    let sa = a.survival(k);
    let sb = b.survival(k);
    Interval {
        lo: base + 0.5 * (sa - sb).abs(),
        hi: base + 0.5 * (sa + sb),
    }
}

/// Kolmogorov distance, sup_j |F_a(j) − F_b(j)|.
pub fn kolmogorov_distance(a: &DiscretePmf, b: &DiscretePmf) -> Interval {
    let k = known_level(a, b);
    let mut sup = 0.0f64;
    let mut fa = 0.0;
    let mut fb = 0.0;
    for j in 0..=k {
        fa += a.prob(j);
        fb += b.prob(j);
        sup = sup.max((fa - fb).abs());
    }
    let sa = a.survival(k);
    let sb = b.survival(k);
    Interval {
        lo: sup,
        hi: sup.max(sa.max(sb)),
    }
}

/// Wasserstein distance; on Z⁺ this is the L1 distance of the CDFs.
///
/// With residual mass on both sides the upper endpoint is genuinely
/// unbounded (the tail mean is unknown) and reported as infinity.
pub fn wasserstein_distance(a: &DiscretePmf, b: &DiscretePmf) -> Interval {
    let k = known_level(a, b);
    let mut lo = 0.0;
    let mut fa = 0.0;
    let mut fb = 0.0;
    for j in 0..=k {
        fa += a.prob(j);
        fb += b.prob(j);
        lo += (fa - fb).abs();
    }
    let sa = a.survival(k);
    let sb = b.survival(k);
    let hi = if sa <= MASS_TOL && sb <= MASS_TOL {
        lo
    } else {
        f64::INFINITY
    };
    Interval { lo, hi }
}

/// Shift smoothness u = 1 − d_TV(L(X), L(X+1)), rounded down so that a
/// truncated X can only weaken the Stein factor, never invalidate it.
pub fn shift_smoothness_u(x: &DiscretePmf) -> f64 {
    (1.0 - tv_distance(x, &x.shift(1)).hi).max(0.0)
}
