//! Hitting-time distributions, quasi-stationary limits and birth–death
//! (Karlin–McGregor) quantities.

use std::fmt;
use std::sync::Arc;

use crate::bounds::{stein_factor, BoundReport, Ingredients, TargetMetric};
use crate::pmf::DiscretePmf;
use crate::reliability::CheckOutcome;
use crate::{Error, Result};

const ROW_TOL: f64 = 1e-10;

/// A transition kernel on {0,1,…} truncated at level L, with per-row
/// escape mass tracked explicitly.
#[derive(Debug, Clone)]
pub struct CountableMarkovChain {
    rows: Vec<Vec<f64>>,
    tails: Vec<f64>,
    absorbing_zero: bool,
    start_state: usize,
}

impl CountableMarkovChain {
    pub fn new(rows: Vec<Vec<f64>>, absorbing_zero: bool, start_state: usize) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::domain("chain needs at least one state"));
        }
        let l = rows.len() - 1;
        let mut tails = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != l + 1 {
                return Err(Error::domain(format!(
                    "row {i} has length {}, expected {}",
                    row.len(),
                    l + 1
                )));
            }
            if row.iter().any(|&v| !(0.0..=1.0 + ROW_TOL).contains(&v)) {
                return Err(Error::domain(format!("row {i} has entries outside [0,1]")));
            }
            let sum: f64 = row.iter().sum();
            if sum > 1.0 + ROW_TOL {
                return Err(Error::domain(format!("row {i} sums to {sum} > 1")));
            }
            tails.push((1.0 - sum).max(0.0));
        }
        let mut rows = rows;
        if absorbing_zero {
            if (rows[0][0] - 1.0).abs() > ROW_TOL {
                return Err(Error::domain("state 0 declared absorbing but p00 != 1"));
            }
            rows[0].iter_mut().for_each(|v| *v = 0.0);
            rows[0][0] = 1.0;
            tails[0] = 0.0;
        }
        if start_state > l {
            return Err(Error::domain("start state beyond truncation"));
        }
        Ok(CountableMarkovChain {
            rows,
            tails,
            absorbing_zero,
            start_state,
        })
    }

    pub fn level(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// Mass of row i escaping past the truncation level.
    pub fn row_tail(&self, i: usize) -> f64 {
        self.tails[i]
    }

    pub fn absorbing_zero(&self) -> bool {
        self.absorbing_zero
    }

    pub fn start_state(&self) -> usize {
        self.start_state
    }
}

/// Nonzero transitions among transient states, per row i = 1..=L.
fn sparse_transient_rows(chain: &CountableMarkovChain) -> Vec<Vec<(usize, f64)>> {
    (1..=chain.level())
        .map(|i| {
            chain.row(i)
                .iter()
                .enumerate()
                .skip(1)
                .filter(|&(_, &v)| v != 0.0)
                .map(|(j, &v)| (j, v))
                .collect()
        })
        .collect()
}

/// Law of W = min{n ≥ 0 : Z_n = 0} with Z₋₁ = start_state.
///
/// ℙ(W = n) is the mass newly absorbed at step n. Mass escaping past the
/// truncation level, and mass still transient after `l_time` steps, both
/// accrue to the tail.
pub fn hitting_time_pmf(chain: &CountableMarkovChain, l_time: usize) -> Result<DiscretePmf> {
    if !chain.absorbing_zero {
        return Err(Error::domain("hitting time requires absorbing state 0"));
    }
    if chain.start_state == 0 {
        return Err(Error::domain("start state must be >= 1"));
    }
    let l = chain.level();
    let sparse = sparse_transient_rows(chain);
    let mut v = vec![0.0f64; l + 1];
    v[chain.start_state] = 1.0;
    let mut probs = Vec::with_capacity(l_time + 1);
    let mut escaped = 0.0;
    for _ in 0..=l_time {
        let mut next = vec![0.0f64; l + 1];
        let mut absorbed = 0.0;
        for i in 1..=l {
            let mass = v[i];
            if mass == 0.0 {
                continue;
            }
            absorbed += mass * chain.row(i)[0];
            escaped += mass * chain.row_tail(i);
            for &(j, pij) in &sparse[i - 1] {
                next[j] += mass * pij;
            }
        }
        probs.push(absorbed);
        v = next;
        if v[1..].iter().sum::<f64>() < 1e-16 {
            break;
        }
    }
    let remaining: f64 = v[1..].iter().sum();
    DiscretePmf::new(probs, (escaped + remaining).max(0.0))
}

/// A converged quasi-stationary iterate.
#[derive(Debug, Clone)]
pub struct QuasiStationary {
    /// dist[i-1] = lim ℙ(Z_j = i | Z_j ≥ 1) for i = 1..=L.
    pub dist: Vec<f64>,
    /// Perron value of the substochastic restriction to states ≥ 1.
    pub decay: f64,
    pub iterations: usize,
}

impl QuasiStationary {
    pub fn at_state(&self, i: usize) -> f64 {
        self.dist[i - 1]
    }
}

/// Power-iterates v ↦ normalize(v·P restricted to states ≥ 1) until the
/// total-variation change per step drops below `tol`.
pub fn quasi_stationary_dist(chain: &CountableMarkovChain, tol: f64) -> Result<QuasiStationary> {
    if !(tol > 0.0) {
        return Err(Error::domain("tol must be positive"));
    }
    let l = chain.level();
    if l == 0 {
        return Err(Error::domain("no transient states"));
    }
    let sparse = sparse_transient_rows(chain);
    let mut v = vec![1.0 / l as f64; l];
    let mut prev2: Option<Vec<f64>> = None;
    const CAP: usize = 200_000;
    for iter in 1..=CAP {
        let mut next = vec![0.0f64; l];
        for i in 1..=l {
            let mass = v[i - 1];
            if mass == 0.0 {
                continue;
            }
            for &(j, pij) in &sparse[i - 1] {
                next[j - 1] += mass * pij;
            }
        }
        let total: f64 = next.iter().sum();
        if total <= 0.0 {
            return Err(Error::NoConvergence(
                "restriction annihilates all mass in one step".into(),
            ));
        }
        next.iter_mut().for_each(|x| *x /= total);
        let decay = total;
        let diff: f64 = v
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * 0.5;
        let osc = prev2.as_ref().map(|p| {
            p.iter()
                .zip(&next)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>()
                * 0.5
        });
        prev2 = Some(v);
        v = next;
        if diff < tol {
            return Ok(QuasiStationary {
                dist: v,
                decay,
                iterations: iter,
            });
        }
        if iter > 1000 {
            if let Some(o) = osc {
                if o < tol * 1e-3 && diff > tol {
                    return Err(Error::NoConvergence(format!(
                        "period-2 oscillation detected at iteration {iter}"
                    )));
                }
            }
        }
    }
    Err(Error::NoConvergence(format!(
        "quasi-stationary iteration did not reach tol {tol} in {CAP} steps"
    )))
}

/// δ̃ = Σ_i p_{i0} · lim ℙ(Z_j = i | Z_j ≥ 1).
///
/// The r̃ ≥ δ̃ guarantee behind this quantity needs P⁺ TP₂ (or a DFR
/// assertion); callers check that separately via `reliability::tp2_check`.
pub fn delta_tilde(chain: &CountableMarkovChain, tol: f64) -> Result<f64> {
    let qs = quasi_stationary_dist(chain, tol)?;
    Ok((1..=chain.level())
        .map(|i| chain.row(i)[0] * qs.at_state(i))
        .sum())
}

type RateFn = Arc<dyn Fn(usize) -> (f64, f64, f64) + Send + Sync>;

/// Birth–death rates (p_i up, q_i down, r_i stay) for i ≥ 1, given lazily.
#[derive(Clone)]
pub struct BirthDeathSpec {
    rates: RateFn,
}

impl fmt::Debug for BirthDeathSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q, r) = (self.rates)(1);
        write!(f, "BirthDeathSpec {{ rates(1) = ({p}, {q}, {r}), .. }}")
    }
}

impl BirthDeathSpec {
    pub fn from_fn(rates: impl Fn(usize) -> (f64, f64, f64) + Send + Sync + 'static) -> Self {
        BirthDeathSpec {
            rates: Arc::new(rates),
        }
    }

    pub fn constant(p: f64, q: f64, r: f64) -> Self {
        BirthDeathSpec::from_fn(move |_| (p, q, r))
    }

    /// Validated rates at state i ≥ 1.
    pub fn rates(&self, i: usize) -> Result<(f64, f64, f64)> {
        if i == 0 {
            return Err(Error::domain("birth-death rates are defined for i >= 1"));
        }
        let (p, q, r) = (self.rates)(i);
        if p < 0.0 || q < 0.0 || r < 0.0 || (p + q + r - 1.0).abs() > ROW_TOL {
            return Err(Error::domain(format!(
                "rates at {i} invalid: ({p}, {q}, {r})"
            )));
        }
        if i == 1 && q <= 0.0 {
            return Err(Error::domain("q1 must be positive"));
        }
        Ok((p, q, r))
    }

    /// Materializes the chain on {0,…,level} with absorbing 0, start 1.
    pub fn to_chain(&self, level: usize) -> Result<CountableMarkovChain> {
        if level < 1 {
            return Err(Error::domain("level must be >= 1"));
        }
        let mut rows = Vec::with_capacity(level + 1);
        let mut row0 = vec![0.0; level + 1];
        row0[0] = 1.0;
        rows.push(row0);
        for i in 1..=level {
            let (p, q, r) = self.rates(i)?;
            let mut row = vec![0.0; level + 1];
            row[i - 1] = q;
            row[i] = r;
            if i < level {
                row[i + 1] = p;
            }
            // at i = level the birth mass p escapes into the row tail
            rows.push(row);
        }
        CountableMarkovChain::new(rows, true, 1)
    }
}

/// π₁ = 1, π_j = (p₁⋯p_{j−1})/(q₂⋯q_j), computed in log space.
pub fn bd_pi(spec: &BirthDeathSpec, j_max: usize) -> Result<Vec<f64>> {
    if j_max < 1 {
        return Err(Error::domain("j_max must be >= 1"));
    }
    let mut out = Vec::with_capacity(j_max);
    let mut log_pi = 0.0f64;
    out.push(1.0);
    for j in 2..=j_max {
        let (p_prev, _, _) = spec.rates(j - 1)?;
        let (_, q_j, _) = spec.rates(j)?;
        if q_j <= 0.0 {
            return Err(Error::domain(format!("q_{j} = 0: pi undefined")));
        }
        if p_prev <= 0.0 {
            // chain cannot reach j; all later pi vanish
            out.resize(j_max, 0.0);
            return Ok(out);
        }
        log_pi += p_prev.ln() - q_j.ln();
        out.push(log_pi.exp());
    }
    Ok(out)
}

/// Q₁(x) = 1, p₁Q₂(x) = x − r₁, xQ_j = q_jQ_{j−1} + r_jQ_j + p_jQ_{j+1}.
pub fn bd_polynomials(spec: &BirthDeathSpec, x: f64, j_max: usize) -> Result<Vec<f64>> {
    if j_max < 1 {
        return Err(Error::domain("j_max must be >= 1"));
    }
    let mut q = Vec::with_capacity(j_max);
    q.push(1.0);
    for j in 1..j_max {
        let (p_j, q_j, r_j) = spec.rates(j)?;
        if p_j <= 0.0 {
            return Err(Error::domain(format!("p_{j} = 0: recurrence stalls")));
        }
        let prev = if j >= 2 { q[j - 2] } else { 0.0 };
        let down = if j >= 2 { q_j * prev } else { 0.0 };
        q.push(((x - r_j) * q[j - 1] - down) / p_j);
    }
    Ok(q)
}

/// η estimate together with the Jacobi truncation it converged at.
#[derive(Debug, Clone, Copy)]
pub struct EtaEstimate {
    pub eta: f64,
    pub k: usize,
    pub converged: bool,
}

/// Number of eigenvalues of the K×K symmetric tridiagonal (diag, offdiag)
/// strictly below x, by the Sturm / LDLᵀ inertia count.
fn sturm_count_below(diag: &[f64], offdiag: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0f64;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { offdiag[i - 1] * offdiag[i - 1] };
        d = diag[i] - x - b2 / d;
        if d == 0.0 {
            d = -1e-300;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn largest_eigenvalue(diag: &[f64], offdiag: &[f64]) -> f64 {
    let k = diag.len();
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for i in 0..k {
        let spread = (if i > 0 { offdiag[i - 1].abs() } else { 0.0 })
            + (if i < k - 1 { offdiag[i].abs() } else { 0.0 });
        hi = hi.max(diag[i] + spread);
        lo = lo.min(diag[i] - spread);
    }
    // bisect for the point with exactly k eigenvalues strictly below
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if sturm_count_below(diag, offdiag, mid) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// η = lim of the largest zero of Q_{K+1}, computed as the top eigenvalue
/// of the symmetrized Jacobi matrix (diag r_j, offdiag √(p_j q_{j+1})),
/// growing K until successive estimates differ by less than `tol`.
pub fn bd_eta(spec: &BirthDeathSpec, tol: f64) -> Result<EtaEstimate> {
    if !(tol > 0.0) {
        return Err(Error::domain("tol must be positive"));
    }
    const K_CAP: usize = 16_384;
    let mut prev: Option<f64> = None;
    let mut k = 64;
    loop {
        let mut diag = Vec::with_capacity(k);
        let mut offdiag = Vec::with_capacity(k - 1);
        for j in 1..=k {
            let (p_j, _, r_j) = spec.rates(j)?;
            diag.push(r_j);
            if j < k {
                let (_, q_next, _) = spec.rates(j + 1)?;
                offdiag.push((p_j * q_next).sqrt());
            }
        }
        let eta = largest_eigenvalue(&diag, &offdiag);
        if let Some(p) = prev {
            if (eta - p).abs() < tol {
                return Ok(EtaEstimate {
                    eta,
                    k,
                    converged: true,
                });
            }
        }
        prev = Some(eta);
        if k >= K_CAP {
            return Ok(EtaEstimate {
                eta,
                k,
                converged: false,
            });
        }
        k *= 2;
    }
}

/// Heuristic verdict for the divergence condition (it concerns an
/// infinite sum, so a truncated computation can never report "true").
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceHeuristic {
    Likely,
    Undetermined,
}

#[derive(Debug, Clone, Copy)]
pub struct BdAssumptions {
    /// Σ (p_kπ_k)^{-1} = ∞ (extinction is certain) — divergence heuristic.
    pub bd1: DivergenceHeuristic,
    /// η < 1.
    pub bd2: bool,
    /// Spectral-measure condition; not computable here, user-asserted.
    pub bd3: CheckOutcome,
    /// r_j ≥ 1/2 for all j (checked over the truncation).
    pub bd4: bool,
}

impl BdAssumptions {
    pub fn all_hold(&self) -> bool {
        self.bd1 == DivergenceHeuristic::Likely && self.bd2 && self.bd3.holds() && self.bd4
    }
}

const BD_SCAN: usize = 2_000;
const BD1_THRESHOLD: f64 = 1e6;

pub fn bd_assumptions(spec: &BirthDeathSpec, eta: f64, bd3_asserted: bool) -> Result<BdAssumptions> {
    let pi = bd_pi(spec, BD_SCAN)?;
    let mut partial = 0.0f64;
    let mut half_sum = 0.0f64;
    let mut diverges = false;
    for (idx, &pik) in pi.iter().enumerate() {
        let (p_k, _, _) = spec.rates(idx + 1)?;
        if p_k * pik <= 0.0 {
            // the sum has an infinite term: divergence immediate
            diverges = true;
            break;
        }
        partial += 1.0 / (p_k * pik);
        if idx + 1 == BD_SCAN / 2 {
            half_sum = partial;
        }
        if partial > BD1_THRESHOLD {
            diverges = true;
            break;
        }
    }
    // a tail still contributing at the truncation is the divergence signal
    if partial - half_sum > 1e-8 * partial.max(1.0) {
        diverges = true;
    }
    let mut bd4 = true;
    for j in 1..=BD_SCAN {
        let (_, _, r_j) = spec.rates(j)?;
        if r_j < 0.5 - ROW_TOL {
            bd4 = false;
            break;
        }
    }
    Ok(BdAssumptions {
        bd1: if diverges {
            DivergenceHeuristic::Likely
        } else {
            DivergenceHeuristic::Undetermined
        },
        bd2: eta < 1.0 - 1e-6,
        bd3: CheckOutcome::Asserted(bd3_asserted),
        bd4,
    })
}

/// Compounding-law choice for the extinction bound.
#[derive(Debug, Clone, Copy)]
pub enum BdX<'a> {
    Auto,
    Explicit(&'a DiscretePmf),
}

/// Geometric/compound-geometric bound on the extinction time:
/// d_TV ≤ H_{q₁}(X) ((1−q₁)EX/q₁ − EW), valid when (1−q₁)(1−η)EX ≥ q₁η
/// and assumptions (bd1), (bd2), (bd4) hold with (bd3) asserted.
///
/// EW comes from the truncated hitting-time pmf; truncation can only
/// lower it, which only enlarges the reported value, so the upper bound
/// stays sound.
pub fn bd_extinction_bound(
    spec: &BirthDeathSpec,
    x: BdX<'_>,
    bd3_asserted: bool,
) -> Result<BoundReport> {
    let (_, q1, _) = spec.rates(1)?;
    let eta = bd_eta(spec, 1e-9)?;
    let assumptions = bd_assumptions(spec, eta.eta, bd3_asserted)?;
    let eta = eta.eta;

    if !assumptions.bd2 {
        // without eta < 1 there is no usable delta and EW may be huge;
        // refuse before committing to the hitting-time enumeration
        return Ok(BoundReport {
            value: f64::INFINITY,
            target: TargetMetric::TotalVariation,
            approximant_p: q1,
            approximant_x: None,
            ingredients: Ingredients {
                p: Some(q1),
                ..Ingredients::default()
            },
            valid: false,
            invalid_reason: Some("assumption bd2 (eta < 1) fails".into()),
            provenance: "bd-extinction",
            wasserstein_value: None,
        });
    }

    let ex_floor = if eta < 1.0 {
        (q1 * eta / ((1.0 - q1) * (1.0 - eta))).max(1.0)
    } else {
        f64::INFINITY
    };
    let x_pmf = match x {
        BdX::Explicit(p) => p.clone(),
        BdX::Auto => {
            if !ex_floor.is_finite() {
                return Err(Error::domain("eta >= 1: no admissible auto X"));
            }
            crate::queueing::adjacent_integer_mixture(ex_floor)?
        }
    };
    let ex = x_pmf.moments().mean;

    let level = 200.max((10.0 / (1.0 - eta).max(1e-3)).ceil() as usize);
    let chain = spec.to_chain(level)?;
    let mut l_time = 4 * level;
    let w = loop {
        let w = hitting_time_pmf(&chain, l_time)?;
        if w.tail_mass() < 1e-9 || l_time >= 400_000 {
            break w;
        }
        l_time *= 4;
    };
    let ew = w.moments().mean;

    let h = stein_factor(q1, &x_pmf)?;
    let ey = (1.0 - q1) * ex / q1;
    let delta = (1.0 - eta) / eta;
    let mut report = BoundReport {
        value: h * (ey - ew),
        target: TargetMetric::TotalVariation,
        approximant_p: q1,
        approximant_x: Some(x_pmf),
        ingredients: Ingredients {
            p: Some(q1),
            delta: Some(delta),
            ex: Some(ex),
            ey: Some(ey),
            ew: Some(ew),
            h_factor: Some(h),
            u: None,
        },
        valid: true,
        invalid_reason: None,
        provenance: "bd-extinction",
        wasserstein_value: Some(ey - ew),
    };
    if !assumptions.bd4 {
        report.valid = false;
        report.invalid_reason = Some("assumption bd4 (r_j >= 1/2) fails".into());
    } else if assumptions.bd1 != DivergenceHeuristic::Likely {
        report.valid = false;
        report.invalid_reason = Some("assumption bd1 (certain extinction) undetermined".into());
    } else if !assumptions.bd3.holds() {
        report.valid = false;
        report.invalid_reason = Some("assumption bd3 not asserted".into());
    } else if (1.0 - q1) * (1.0 - eta) * ex < q1 * eta - 1e-12 {
        report.valid = false;
        report.invalid_reason = Some("mean condition".into());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::tv_distance;
    use crate::pmf::geometric_pmf;
    use approx::assert_abs_diff_eq;

    fn two_state(a: f64) -> CountableMarkovChain {
        CountableMarkovChain::new(vec![vec![1.0, 0.0], vec![a, 1.0 - a]], true, 1).unwrap()
    }

    #[test]
    fn two_state_hitting_time_is_geometric() {
        let chain = two_state(0.3);
        let w = hitting_time_pmf(&chain, 300).unwrap();
        let g = geometric_pmf(0.3, 300).unwrap();
        assert!(tv_distance(&w, &g).hi < 1e-10);
    }

    #[test]
    fn hitting_time_conserves_mass() {
        let chain = CountableMarkovChain::new(
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.4, 0.5, 0.1],
                vec![0.2, 0.5, 0.25], // 0.05 escapes
            ],
            true,
            2,
        )
        .unwrap();
        let w = hitting_time_pmf(&chain, 50).unwrap();
        let total: f64 = w.probs().iter().sum::<f64>() + w.tail_mass();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
        assert!(w.tail_mass() > 0.0);
    }

    #[test]
    fn three_state_matches_closed_forms() {
        // rows (alpha, beta, eps) to states (0, 1, 2); start at 2
        let (a1, b1, e1, a2, b2, e2) = (0.4, 0.5, 0.1, 0.2, 0.5, 0.3);
        let chain = CountableMarkovChain::new(
            vec![vec![1.0, 0.0, 0.0], vec![a1, b1, e1], vec![a2, b2, e2]],
            true,
            2,
        )
        .unwrap();
        let w = hitting_time_pmf(&chain, 4000).unwrap();
        assert_abs_diff_eq!(w.prob(0), a2, epsilon = 1e-12);
        assert_abs_diff_eq!(w.moments().mean, 7.0 / 3.0, epsilon = 1e-10);
        let closed = crate::bounds::three_state_example(a1, b1, e1, a2, b2, e2).unwrap();
        assert_abs_diff_eq!(w.moments().mean, closed.ew, epsilon = 1e-10);
    }

    #[test]
    fn quasi_stationary_two_state_is_point_mass() {
        let qs = quasi_stationary_dist(&two_state(0.3), 1e-12).unwrap();
        assert_eq!(qs.dist, vec![1.0]);
        assert_abs_diff_eq!(qs.decay, 0.7, epsilon = 1e-14);
    }

    #[test]
    fn delta_tilde_two_state() {
        assert_abs_diff_eq!(delta_tilde(&two_state(0.25), 1e-12).unwrap(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn bd_pi_closed_forms() {
        let spec = BirthDeathSpec::constant(0.25, 0.25, 0.5);
        let pi = bd_pi(&spec, 6).unwrap();
        for v in pi {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        }
        let spec = BirthDeathSpec::constant(0.2, 0.3, 0.5);
        let pi = bd_pi(&spec, 6).unwrap();
        for (j, v) in pi.iter().enumerate() {
            assert_abs_diff_eq!(*v, (2.0f64 / 3.0).powi(j as i32), epsilon = 1e-12);
        }
    }

    #[test]
    fn bd_polynomial_base_cases() {
        let spec = BirthDeathSpec::constant(0.2, 0.3, 0.5);
        let q = bd_polynomials(&spec, 0.5, 4).unwrap();
        assert_eq!(q[0], 1.0);
        // Q2(r1) = 0
        assert_abs_diff_eq!(q[1], 0.0, epsilon = 1e-14);
        let q = bd_polynomials(&spec, 0.9, 2).unwrap();
        assert_abs_diff_eq!(q[1], (0.9 - 0.5) / 0.2, epsilon = 1e-14);
    }

    #[test]
    fn bd_polynomial_zeros_interlace() {
        let spec = BirthDeathSpec::constant(0.25, 0.25, 0.5);
        // locate zeros of Q_j by sign scan over [-1, 2]
        let zeros = |j: usize| -> Vec<f64> {
            let mut out = Vec::new();
            let n = 4000;
            let mut prev = bd_polynomials(&spec, -1.0, j).unwrap()[j - 1];
            for i in 1..=n {
                let x = -1.0 + 3.0 * i as f64 / n as f64;
                let v = bd_polynomials(&spec, x, j).unwrap()[j - 1];
                if prev.signum() != v.signum() {
                    out.push(x);
                }
                prev = v;
            }
            out
        };
        for j in 2..=7 {
            let zj = zeros(j);
            let zj1 = zeros(j + 1);
            assert_eq!(zj.len(), j - 1);
            assert_eq!(zj1.len(), j);
            for (k, z) in zj.iter().enumerate() {
                assert!(zj1[k] < *z && *z < zj1[k + 1]);
            }
        }
    }

    #[test]
    fn bd_eta_constant_chain_closed_form() {
        let spec = BirthDeathSpec::constant(0.1, 0.4, 0.5);
        let est = bd_eta(&spec, 1e-7).unwrap();
        assert!(est.converged);
        assert_abs_diff_eq!(est.eta, 0.9, epsilon = 1e-5);
    }

    #[test]
    fn bd_eta_boundary_case_fails_bd2() {
        let spec = BirthDeathSpec::constant(0.25, 0.25, 0.5);
        let est = bd_eta(&spec, 1e-7).unwrap();
        assert!(est.eta > 1.0 - 1e-6);
        let a = bd_assumptions(&spec, est.eta, true).unwrap();
        assert!(!a.bd2);
        assert_eq!(a.bd1, DivergenceHeuristic::Likely);
        assert!(a.bd4);
    }

    #[test]
    fn bd_eta_tends_to_r_as_p_vanishes() {
        let spec = BirthDeathSpec::from_fn(|_| (1e-12, 0.4 - 1e-12, 0.6));
        let est = bd_eta(&spec, 1e-9).unwrap();
        assert_abs_diff_eq!(est.eta, 0.6, epsilon = 1e-5);
    }

    #[test]
    fn quasi_stationary_decay_matches_eta() {
        let spec = BirthDeathSpec::constant(0.1, 0.4, 0.5);
        let chain = spec.to_chain(200).unwrap();
        let qs = quasi_stationary_dist(&chain, 2e-10).unwrap();
        assert_abs_diff_eq!(qs.decay, 0.9, epsilon = 1e-3);
    }

    #[test]
    fn delta_tilde_is_one_minus_eta_for_birth_death() {
        let spec = BirthDeathSpec::constant(0.1, 0.4, 0.5);
        let chain = spec.to_chain(200).unwrap();
        let dt = delta_tilde(&chain, 2e-10).unwrap();
        assert_abs_diff_eq!(dt, 0.1, epsilon = 1e-3);
    }

    #[test]
    fn extinction_bound_sound_against_enumeration() {
        let spec = BirthDeathSpec::constant(0.1, 0.4, 0.5);
        let report = bd_extinction_bound(&spec, BdX::Auto, true).unwrap();
        assert!(report.valid, "reason: {:?}", report.invalid_reason);
        let chain = spec.to_chain(400).unwrap();
        let w = hitting_time_pmf(&chain, 5000).unwrap();
        let y = crate::pmf::compound_geometric_pmf(
            &crate::pmf::CompoundGeometricSpec::new(0.4, report.approximant_x.clone().unwrap())
                .unwrap(),
            w.truncation_level(),
        )
        .unwrap();
        let tv = tv_distance(&w, &y);
        assert!(report.value >= tv.lo - 1e-9);
    }

    #[test]
    fn extinction_bound_refuses_eta_at_one() {
        let spec = BirthDeathSpec::constant(0.25, 0.25, 0.5);
        let x = DiscretePmf::point_mass(5);
        let report = bd_extinction_bound(&spec, BdX::Explicit(&x), true).unwrap();
        assert!(!report.valid);
        assert!(report.invalid_reason.unwrap().contains("bd2"));
    }

    #[test]
    fn extinction_bound_tracks_bd3_assertion() {
        let spec = BirthDeathSpec::constant(0.1, 0.4, 0.5);
        let report = bd_extinction_bound(&spec, BdX::Auto, false).unwrap();
        assert!(!report.valid);
        assert!(report.invalid_reason.unwrap().contains("bd3"));
    }

    #[test]
    fn chain_rejects_bad_rows() {
        assert!(CountableMarkovChain::new(vec![vec![0.9, 0.2]], false, 0).is_err());
        assert!(CountableMarkovChain::new(vec![vec![0.5, 0.4], vec![0.5, 0.5]], true, 1).is_err());
    }
}
