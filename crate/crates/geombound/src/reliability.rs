//! Failure rates, monotonicity classification, and the order predicates
//! used as preconditions by the bound evaluators.
//!
//! All predicates are tail-aware: where the truncated part of a pmf could
//! change the answer, they report `Undetermined` rather than guess.

use crate::markov::CountableMarkovChain;
use crate::pmf::{DiscretePmf, MASS_TOL};
use crate::queueing::{ServiceKind, ServiceTimeModel};
use crate::{Error, Result};

/// Slack for monotonicity comparisons; ties count as monotone.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Ifr,
    Dfr,
    Nonmonotone,
    Undetermined,
}

/// Three-valued answer for order predicates on truncated pmfs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trilean {
    True,
    False,
    Undetermined,
}

impl Trilean {
    pub fn is_true(self) -> bool {
        self == Trilean::True
    }
}

/// Outcome of a structural check that may rest on a user assertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckOutcome {
    True,
    False,
    /// Passed through from a caller-supplied flag, not verified here.
    Asserted(bool),
}

impl CheckOutcome {
    pub fn holds(self) -> bool {
        matches!(self, CheckOutcome::True | CheckOutcome::Asserted(true))
    }
}

/// Both failure-rate conventions over the certified range of a pmf.
#[derive(Debug, Clone)]
pub struct FailureRateProfile {
    /// r_W(j) = ℙ(W=j)/ℙ(W>j).
    pub rates: Vec<f64>,
    /// r̃_W(j) = ℙ(W=j)/ℙ(W≥j).
    pub alt_rates: Vec<f64>,
    /// Monotonicity over the certified range. Only a statement about the
    /// whole law when the pmf has (numerically) no tail.
    pub classification: Classification,
    /// Certified lower bound δ on r_W, when one can be given.
    pub inf_rate: Option<f64>,
}

/// Largest j for which rates are reported: the survival function must
/// still dominate what the tail could contribute.
fn certified_len(pmf: &DiscretePmf) -> usize {
    let threshold = 10.0 * pmf.tail_mass() + 1e-290;
    let mut len = 0;
    for j in 0..=pmf.truncation_level() {
        if pmf.survival(j) <= threshold {
            break;
        }
        len = j + 1;
    }
    len
}

/// Computes both failure-rate conventions and classifies monotonicity.
///
/// `inf_rate` is populated only when the scan covers the full support
/// (tail below [`MASS_TOL`]); otherwise the tail could hide a smaller
/// rate and the caller must supply a structural guarantee through
/// [`failure_rates_with_guarantee`].
pub fn failure_rates(pmf: &DiscretePmf) -> FailureRateProfile {
    failure_rates_inner(pmf, None)
}

/// Like [`failure_rates`], but accepts a caller-certified structure.
/// An `Ifr` guarantee certifies `inf_rate = r_W(0)` regardless of tail.
pub fn failure_rates_with_guarantee(
    pmf: &DiscretePmf,
    guarantee: Classification,
) -> FailureRateProfile {
    failure_rates_inner(pmf, Some(guarantee))
}

fn failure_rates_inner(pmf: &DiscretePmf, guarantee: Option<Classification>) -> FailureRateProfile {
    let len = certified_len(pmf);
    let mut rates = Vec::with_capacity(len);
    let mut alt_rates = Vec::with_capacity(len);
    // suffix sums keep tiny survival values at full relative precision
    let mut above = pmf.survival(len.saturating_sub(1));
    let mut suffix = Vec::with_capacity(len);
    for j in (0..len).rev() {
        suffix.push(above); // ℙ(W > j)
        above += pmf.prob(j);
    }
    for j in 0..len {
        let above = suffix[len - 1 - j];
        let at_least = above + pmf.prob(j);
        rates.push(pmf.prob(j) / above);
        alt_rates.push(pmf.prob(j) / at_least);
    }

    let full_support = pmf.tail_mass() <= MASS_TOL;
    let nondecreasing = rates.windows(2).all(|w| w[1] >= w[0] - MONOTONE_SLACK);
    let nonincreasing = rates.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);
    let scan = if rates.len() < 2 {
        Classification::Undetermined
    } else if nondecreasing {
        Classification::Ifr
    } else if nonincreasing {
        Classification::Dfr
    } else {
        Classification::Nonmonotone
    };

    let min_rate = rates.iter().cloned().fold(f64::INFINITY, f64::min);
    let inf_rate = if guarantee == Some(Classification::Ifr) {
        rates.first().copied()
    } else if full_support && !rates.is_empty() {
        Some(min_rate)
    } else {
        None
    };

    FailureRateProfile {
        rates,
        alt_rates,
        classification: scan,
        inf_rate,
    }
}

/// Converts a lower bound on r̃ into one on r: δ = δ̃/(1−δ̃).
pub fn delta_from_alt(delta_tilde: f64) -> Result<f64> {
    if !(delta_tilde > 0.0 && delta_tilde < 1.0) {
        return Err(Error::domain(format!(
            "delta_tilde must lie in (0,1), got {delta_tilde}"
        )));
    }
    Ok(delta_tilde / (1.0 - delta_tilde))
}

/// Largest index up to which per-point masses of `pmf` are known exactly:
/// everything when the tail is (numerically) zero, else the truncation level.
fn exact_level(pmf: &DiscretePmf) -> usize {
    if pmf.tail_mass() <= MASS_TOL {
        usize::MAX
    } else {
        pmf.truncation_level()
    }
}

/// a ≤_st b: ℙ(a > j) ≤ ℙ(b > j) for all j.
pub fn stochastic_order_leq(a: &DiscretePmf, b: &DiscretePmf) -> Trilean {
    let known = exact_level(a)
        .min(exact_level(b))
        .min(a.truncation_level().max(b.truncation_level()));
    for j in 0..=known {
        if a.survival(j) > b.survival(j) + MONOTONE_SLACK {
            return Trilean::False;
        }
    }
    // beyond the known range, ℙ(a > j) ≤ tail(a) while ℙ(b > j) ≥ 0
    if a.survival(known) <= MASS_TOL {
        Trilean::True
    } else if a.survival(known) > b.survival(known) + MONOTONE_SLACK {
        Trilean::False
    } else if a.tail_mass() <= MASS_TOL && b.tail_mass() <= MASS_TOL {
        Trilean::True
    } else {
        Trilean::Undetermined
    }
}

/// a ≤_hr b: r_a(j) ≥ r_b(j) wherever both rates are defined.
pub fn hazard_order_leq(a: &DiscretePmf, b: &DiscretePmf) -> Trilean {
    let known = exact_level(a)
        .min(exact_level(b))
        .min(a.truncation_level().max(b.truncation_level()));
    for j in 0..=known {
        let sa = a.survival(j);
        let sb = b.survival(j);
        // once a survival drops to the order of the (truncation or
        // rounding) tail, the rates are noise; settle from the tails
        if sb <= 10.0 * b.tail_mass() + 1e-290 {
            return if b.tail_mass() > MASS_TOL {
                Trilean::Undetermined
            } else if sa > MASS_TOL {
                // b's support has ended; a must not continue past it
                Trilean::False
            } else {
                Trilean::True
            };
        }
        if sa <= 10.0 * a.tail_mass() + 1e-290 {
            // a's rate is +infinity (or uncertified) from here on
            return if a.tail_mass() <= MASS_TOL {
                Trilean::True
            } else {
                Trilean::Undetermined
            };
        }
        let ra = a.prob(j) / sa;
        let rb = b.prob(j) / sb;
        if ra < rb - MONOTONE_SLACK {
            return Trilean::False;
        }
    }
    if a.tail_mass() <= MASS_TOL && b.tail_mass() <= MASS_TOL {
        Trilean::True
    } else {
        Trilean::Undetermined
    }
}

/// TP₂ check on P⁺ (row tail sums): all 2×2 minors nonnegative.
///
/// Naive O(L⁴) over the truncated chain; fine at desk scale (L ≤ 200).
pub fn tp2_check(chain: &CountableMarkovChain) -> bool {
    let l = chain.level();
    // p⁺_{ij} = Σ_{k≥j} p_{ik}, including the row tail beyond L
    let plus: Vec<Vec<f64>> = (0..=l)
        .map(|i| {
            let tail = chain.row_tail(i);
            let row = chain.row(i);
            let mut acc = vec![0.0; l + 1];
            let mut running = tail;
            for j in (0..=l).rev() {
                running += row[j];
                acc[j] = running;
            }
            acc
        })
        .collect();

    let pairs: Vec<(usize, usize)> = (0..=l)
        .flat_map(|i| ((i + 1)..=l).map(move |j| (i, j)))
        .collect();
    let results = crate::par::map_collect(pairs, |(i, j)| {
        for k in 0..=l {
            for m in (k + 1)..=l {
                if plus[i][k] * plus[j][m] < plus[i][m] * plus[j][k] - MASS_TOL {
                    return false;
                }
            }
        }
        true
    });
    results.into_iter().all(|ok| ok)
}

/// NBUE check for a service-time model: analytic where the model family
/// admits it, otherwise a pass-through of the caller's assertion.
pub fn nbue_check(s: &ServiceTimeModel) -> CheckOutcome {
    match s.kind() {
        // memoryless: equality for all t
        ServiceKind::Exponential { .. } => CheckOutcome::True,
        // residual life is at most the remaining constant
        ServiceKind::Deterministic { .. } => CheckOutcome::True,
        // Erlang is IFR, hence NBUE
        ServiceKind::Erlang { .. } => CheckOutcome::True,
        ServiceKind::Custom { .. } => CheckOutcome::Asserted(s.nbue_asserted()),
    }
}
