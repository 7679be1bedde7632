//! Numerical solution of the Stein equation for compound geometric laws,
//! plus verification of the solver-smoothness lemma.
//!
//! The solution is evaluated through its explicit geometric series rather
//! than by running the defining recurrence forward: the recurrence is
//! unstable for small p, while the series terms decay like (1−p)^i.

use crate::bounds::stein_factor;
use crate::pmf::{compound_geometric_pmf, convolve, CompoundGeometricSpec, DiscretePmf};
use crate::Result;

/// A target set A ⊆ {0,1,…} for the Stein equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetSet {
    Finite(Vec<usize>),
    /// The even nonnegative integers.
    Even,
    /// Complement of the listed points.
    Cofinite(Vec<usize>),
}

impl TargetSet {
    pub fn singleton(j: usize) -> Self {
        TargetSet::Finite(vec![j])
    }

    pub fn contains(&self, j: usize) -> bool {
        match self {
            TargetSet::Finite(pts) => pts.contains(&j),
            TargetSet::Even => j % 2 == 0,
            TargetSet::Cofinite(pts) => !pts.contains(&j),
        }
    }

    /// Whether the set captures all sufficiently large integers.
    fn contains_all_large(&self) -> bool {
        matches!(self, TargetSet::Cofinite(_))
    }
}

/// Precomputed series data for one compound geometric spec, reusable
/// across many target sets.
pub struct SteinSolver {
    spec: CompoundGeometricSpec,
    /// (1−p)^i for i = 0..=i_max.
    weights: Vec<f64>,
    /// S_i = X₁+⋯+X_i as pmfs (S_0 = δ₀).
    pows: Vec<DiscretePmf>,
    /// Y + S_i pmfs, aligned with `pows`.
    y_pows: Vec<DiscretePmf>,
    y: DiscretePmf,
    j_max: usize,
    series_tol: f64,
}

impl SteinSolver {
    pub fn new(spec: &CompoundGeometricSpec, j_max: usize, series_tol: f64) -> Result<Self> {
        let p = spec.p();
        let q = 1.0 - p;
        let mut i_max = 0usize;
        let mut w = 1.0;
        while w >= series_tol && i_max < 100_000 {
            w *= q;
            i_max += 1;
        }
        let x_width = spec.x_pmf().truncation_level().max(1);
        let probe = j_max + i_max * x_width + 1;
        let y = compound_geometric_pmf(spec, probe)?;
        let mut weights = Vec::with_capacity(i_max + 1);
        let mut pows = Vec::with_capacity(i_max + 1);
        let mut y_pows = Vec::with_capacity(i_max + 1);
        let mut wi = 1.0;
        let mut s = DiscretePmf::point_mass(0);
        let mut ys = y.clone();
        for i in 0..=i_max {
            weights.push(wi);
            pows.push(s.clone());
            y_pows.push(ys.clone());
            wi *= q;
            if i < i_max {
                s = convolve(&s, spec.x_pmf());
                ys = convolve(&ys, spec.x_pmf());
            }
        }
        Ok(SteinSolver {
            spec: spec.clone(),
            weights,
            pows,
            y_pows,
            y,
            j_max,
            series_tol,
        })
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    fn prob_in(&self, pmf: &DiscretePmf, shift: usize, a: &TargetSet) -> f64 {
        let mut total: f64 = (0..=pmf.truncation_level())
            .map(|k| if a.contains(shift + k) { pmf.prob(k) } else { 0.0 })
            .sum();
        if a.contains_all_large() {
            total += pmf.tail_mass();
        }
        total
    }

    /// f_A(0..=j_max): the series evaluated pointwise and pinned to
    /// f_A(0) = 0 by subtracting its value at zero.
    pub fn solve(&self, a: &TargetSet) -> Vec<f64> {
        // complement symmetry: the Stein data negates, hence so does f
        if let TargetSet::Cofinite(pts) = a {
            return self
                .solve(&TargetSet::Finite(pts.clone()))
                .into_iter()
                .map(|v| -v)
                .collect();
        }
        let mut raw = vec![0.0f64; self.j_max + 1];
        for (i, wi) in self.weights.iter().enumerate() {
            let py = self.prob_in(&self.y_pows[i], 0, a);
            let s = &self.pows[i];
            for (j, r) in raw.iter_mut().enumerate() {
                *r -= wi * (self.prob_in(s, j, a) - py);
            }
        }
        let f0 = raw[0];
        raw.iter_mut().for_each(|v| *v -= f0);
        raw
    }

    /// Largest |I(j∈A) − ℙ(Y∈A) − (1−p)Ef_A(j+X) + f_A(j)| over the j
    /// range where f is fully known (a support-width guard at the top).
    pub fn residual_sup(&self, a: &TargetSet, f: &[f64]) -> f64 {
        let x = self.spec.x_pmf();
        let width = x.truncation_level();
        if self.j_max < width {
            return 0.0;
        }
        let pya = self.prob_in(&self.y, 0, a);
        let mut sup = 0.0f64;
        for j in 0..=(self.j_max - width) {
            let ef: f64 = (1..=width).map(|k| x.prob(k) * f[j + k]).sum();
            let lhs = if a.contains(j) { 1.0 } else { 0.0 } - pya;
            let rhs = (1.0 - self.spec.p()) * ef - f[j];
            sup = sup.max((lhs - rhs).abs());
        }
        sup
    }

    /// Certified residual tolerance for this solver's truncations.
    pub fn residual_tol(&self) -> f64 {
        10.0 * self.series_tol
    }
}

/// One-shot evaluation of f_A(0..=j_max).
pub fn solve_fa(
    spec: &CompoundGeometricSpec,
    a: &TargetSet,
    j_max: usize,
    series_tol: f64,
) -> Result<Vec<f64>> {
    Ok(SteinSolver::new(spec, j_max, series_tol)?.solve(a))
}

/// Result of sweeping the smoothness lemma over a family of target sets.
#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub sup_increment: f64,
    /// H_p(X)/p.
    pub bound: f64,
    pub ok: bool,
}

/// Checks sup_j |f_A(j+1) − f_A(j)| ≤ H_p(X)/p over every set in the
/// family (singletons up to j_max, the even set, and any extras).
pub fn verify_smoothness_lemma(
    spec: &CompoundGeometricSpec,
    extra_sets: &[TargetSet],
    j_max: usize,
    series_tol: f64,
) -> Result<LemmaReport> {
    let solver = SteinSolver::new(spec, j_max, series_tol)?;
    let mut family: Vec<TargetSet> = (0..=j_max).map(TargetSet::singleton).collect();
    family.push(TargetSet::Even);
    family.extend_from_slice(extra_sets);
    let sups = crate::par::map_collect(family, |a| {
        let f = solver.solve(&a);
        f.windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0f64, f64::max)
    });
    let sup_increment = sups.into_iter().fold(0.0f64, f64::max);
    let bound = stein_factor(spec.p(), spec.x_pmf())? / spec.p();
    Ok(LemmaReport {
        sup_increment,
        bound,
        ok: sup_increment <= bound + 1e-8,
    })
}
