//! Truncated probability mass functions on the nonnegative integers.
//!
//! Every pmf carries its unassigned tail mass explicitly. Operations never
//! silently drop mass: whatever cannot be represented below the truncation
//! level accrues to `tail_mass`, and downstream metrics widen their result
//! intervals accordingly.

use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// Tolerance for mass-conservation invariants (Σ probs + tail = 1).
pub const MASS_TOL: f64 = 1e-12;

/// A probability mass function on `{0, 1, ..., L}` with explicit tail mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePmf {
    probs: Vec<f64>,
    tail_mass: f64,
}

impl DiscretePmf {
    /// Builds a pmf from point masses and an explicit tail.
    pub fn new(probs: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::domain("pmf needs at least one entry"));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::domain("pmf entries must be finite and nonnegative"));
        }
        if !(tail_mass >= -MASS_TOL) {
            return Err(Error::domain(format!("negative tail mass {tail_mass}")));
        }
        let total: f64 = probs.iter().sum::<f64>() + tail_mass;
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!("pmf total mass {total} != 1")));
        }
        Ok(DiscretePmf {
            probs,
            tail_mass: tail_mass.max(0.0),
        })
    }

    /// Builds a pmf from point masses; the tail is whatever is missing.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let assigned: f64 = probs.iter().sum();
        if assigned > 1.0 + 1e-9 {
            return Err(Error::domain(format!("pmf mass {assigned} exceeds 1")));
        }
        let tail = (1.0 - assigned).max(0.0);
        DiscretePmf::new(probs, tail)
    }

    /// Point mass at `k`.
    pub fn point_mass(k: usize) -> Self {
        let mut probs = vec![0.0; k + 1];
        probs[k] = 1.0;
        DiscretePmf {
            probs,
            tail_mass: 0.0,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// ℙ(W = k); zero beyond the truncation level (the tail is elsewhere).
    pub fn prob(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Highest represented index L.
    pub fn truncation_level(&self) -> usize {
        self.probs.len() - 1
    }

    /// ℙ(W ≤ j); exact for j ≤ L since the tail lies above L.
    pub fn cdf(&self, j: usize) -> f64 {
        self.probs.iter().take(j + 1).sum()
    }

    /// ℙ(W > j); exact for j ≤ L. Summed from the tail end so that small
    /// survival values keep full relative precision.
    pub fn survival(&self, j: usize) -> f64 {
        let above: f64 = self.probs.iter().skip(j + 1).rev().sum();
        above + self.tail_mass
    }

    /// The law of W + k.
    pub fn shift(&self, k: usize) -> Self {
        let mut probs = vec![0.0; self.probs.len() + k];
        probs[k..].copy_from_slice(&self.probs);
        DiscretePmf {
            probs,
            tail_mass: self.tail_mass,
        }
    }

    /// Drops trailing zero entries (keeps at least one entry).
    pub fn trimmed(mut self) -> Self {
        while self.probs.len() > 1 && *self.probs.last().unwrap() == 0.0 {
            self.probs.pop();
        }
        self
    }

    /// Mean, variance and the tail mass that limits their certification.
    ///
    /// The reported mean and variance are computed from the represented
    /// entries only, so they underestimate the true values whenever
    /// `tail_mass > 0`. Callers must check [`PmfMoments::certified`]
    /// against their own tolerance before trusting them.
    pub fn moments(&self) -> PmfMoments {
        let mean: f64 = self
            .probs
            .iter()
            .enumerate()
            .map(|(k, &p)| k as f64 * p)
            .sum();
        let second: f64 = self
            .probs
            .iter()
            .enumerate()
            .map(|(k, &p)| (k as f64) * (k as f64) * p)
            .sum();
        PmfMoments {
            mean,
            variance: (second - mean * mean).max(0.0),
            tail_mass: self.tail_mass,
        }
    }
}

/// Moments of a truncated pmf, flagged by the tail mass left out of them.
#[derive(Debug, Clone, Copy)]
pub struct PmfMoments {
    pub mean: f64,
    pub variance: f64,
    pub tail_mass: f64,
}

impl PmfMoments {
    /// True when the tail mass is small enough that the moments can be
    /// treated as point values at tolerance `tol`.
    pub fn certified(&self, tol: f64) -> bool {
        self.tail_mass <= tol
    }
}

/// The pair (p, law of X) defining Y = Σ_{i=1}^N X_i with N ~ Geom(p).
#[derive(Debug, Clone)]
pub struct CompoundGeometricSpec {
    p: f64,
    x_pmf: DiscretePmf,
}

impl CompoundGeometricSpec {
    /// Requires p ∈ (0,1) and X supported on {1,2,...}.
    pub fn new(p: f64, x_pmf: DiscretePmf) -> Result<Self> {
        check_open_unit(p, "geometric parameter p")?;
        if x_pmf.prob(0) != 0.0 {
            return Err(Error::domain("X must assign zero mass to 0"));
        }
        Ok(CompoundGeometricSpec { p, x_pmf })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn x_pmf(&self) -> &DiscretePmf {
        &self.x_pmf
    }

    /// EY = (1−p)·EX/p, from the represented part of X.
    pub fn implied_mean(&self) -> f64 {
        (1.0 - self.p) * self.x_pmf.moments().mean / self.p
    }
}

fn check_open_unit(p: f64, name: &str) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("{name} must lie in (0,1), got {p}")));
    }
    Ok(())
}

/// Geom(p) truncated at L: probs[k] = p(1−p)^k, tail = (1−p)^{L+1}.
pub fn geometric_pmf(p: f64, level: usize) -> Result<DiscretePmf> {
    check_open_unit(p, "geometric parameter p")?;
    let q = 1.0 - p;
    let mut probs = Vec::with_capacity(level + 1);
    let mut term = p;
    for _ in 0..=level {
        probs.push(term);
        term *= q;
    }
    DiscretePmf::new(probs, q.powi(level as i32 + 1))
}

/// Geom(p) extended until the tail drops below `tail_tol` or the global cap.
pub fn geometric_pmf_auto(p: f64, tail_tol: f64) -> Result<DiscretePmf> {
    check_open_unit(p, "geometric parameter p")?;
    let q = 1.0 - p;
    // tail after L+1 entries is q^{L+1}
    let need = (tail_tol.ln() / q.ln()).ceil() as usize;
    let level = need.min(crate::truncation_cap());
    geometric_pmf(p, level)
}

/// Materializes the compound geometric law by the single-pass recursion
/// f_Y(0) = p, f_Y(n) = (1−p) Σ_{k=1}^n f_X(k) f_Y(n−k).
pub fn compound_geometric_pmf(spec: &CompoundGeometricSpec, level: usize) -> Result<DiscretePmf> {
    let p = spec.p();
    let q = 1.0 - p;
    let x = spec.x_pmf();
    let mut probs = vec![0.0; level + 1];
    probs[0] = p;
    for n in 1..=level {
        let mut acc = 0.0;
        let kmax = n.min(x.truncation_level());
        for k in 1..=kmax {
            acc += x.prob(k) * probs[n - k];
        }
        probs[n] = q * acc;
    }
    DiscretePmf::from_probs(probs)
}

/// Pólya pmf on 0..m: ℙ(W=k) = C(d+m−k−2, m−k) / C(d+m−1, m).
///
/// Computed with log-gamma so that m and d up to 10^6 do not overflow.
pub fn polya_pmf(m: usize, d: usize) -> Result<DiscretePmf> {
    if d < 2 {
        return Err(Error::domain(format!("Pólya requires d >= 2, got {d}")));
    }
    let ln_denom = ln_binomial(d + m - 1, m);
    let mut probs = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let ln_num = ln_binomial(d + m - k - 2, m - k);
        probs.push((ln_num - ln_denom).exp());
    }
    let total: f64 = probs.iter().sum();
    // renormalize away log-gamma rounding; the law has no tail
    for p in &mut probs {
        *p /= total;
    }
    DiscretePmf::new(probs, 0.0)
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Law of N(T) for a rate-λ Poisson process and T ~ Γ(α,β): the
/// negative binomial probs[k] = Γ(α+k)/(Γ(α) k!) (β/(β+λ))^α (λ/(β+λ))^k.
pub fn mixed_poisson_gamma_pmf(
    alpha: f64,
    beta: f64,
    lambda: f64,
    level: usize,
) -> Result<DiscretePmf> {
    for (v, name) in [(alpha, "alpha"), (beta, "beta"), (lambda, "lambda")] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    let ln_success = (beta / (beta + lambda)).ln();
    let ln_fail = (lambda / (beta + lambda)).ln();
    let mut probs = Vec::with_capacity(level + 1);
    for k in 0..=level {
        let kf = k as f64;
        let ln_p = ln_gamma(alpha + kf) - ln_gamma(alpha) - ln_gamma(kf + 1.0)
            + alpha * ln_success
            + kf * ln_fail;
        probs.push(ln_p.exp());
    }
    DiscretePmf::from_probs(probs)
}

/// Convolution of two truncated pmfs over the full combined support.
///
/// The result's tail mass upper-bounds everything lost to either input
/// tail; it is exact (zero) when both inputs have zero tail.
pub fn convolve(a: &DiscretePmf, b: &DiscretePmf) -> DiscretePmf {
    let la = a.truncation_level();
    let lb = b.truncation_level();
    let mut probs = vec![0.0; la + lb + 1];
    for (i, &pa) in a.probs().iter().enumerate() {
        if pa == 0.0 {
            continue;
        }
        for (j, &pb) in b.probs().iter().enumerate() {
            probs[i + j] += pa * pb;
        }
    }
    let assigned: f64 = probs.iter().sum();
    DiscretePmf {
        probs,
        tail_mass: (1.0 - assigned).max(0.0),
    }
}
