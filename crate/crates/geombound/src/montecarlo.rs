//! Simulation oracles used to cross-validate the analytic formulas.
//!
//! Every run is deterministic given its seed. Parallel runs split the work
//! into fixed-size chunks, each driven by its own counter-derived RNG
//! stream, so the merged output is identical with and without the
//! `parallel` feature.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, Gamma, Poisson};

use crate::pmf::DiscretePmf;
use crate::queueing::{Mg1System, ServiceKind, ServiceTimeModel};
use crate::{Error, Result};

/// A point estimate with a 95% confidence half-width.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub half_width: f64,
}

impl Estimate {
    pub fn contains(&self, v: f64) -> bool {
        (self.value - v).abs() <= self.half_width
    }

    /// Widened interval check: within `k` half-widths.
    pub fn within(&self, v: f64, k: f64) -> bool {
        (self.value - v).abs() <= k * self.half_width
    }
}

fn sample_service(kind: &ServiceKind, rng: &mut impl Rng) -> Result<f64> {
    Ok(match kind {
        ServiceKind::Exponential { rate } => rng.sample(Exp::new(*rate).unwrap()),
        ServiceKind::Erlang { k, beta } => {
            rng.sample(Gamma::new(*k as f64, 1.0 / *beta).unwrap())
        }
        ServiceKind::Deterministic { value } => *value,
        ServiceKind::Custom { .. } => {
            return Err(Error::domain(
                "custom service model carries no sampler; simulate a named family",
            ))
        }
    })
}

fn service_sampler_check(s: &ServiceTimeModel) -> Result<()> {
    if matches!(s.kind(), ServiceKind::Custom { .. }) {
        return Err(Error::domain(
            "custom service model carries no sampler; simulate a named family",
        ));
    }
    Ok(())
}

fn histogram_to_pmf(hist: &[u64], total: u64) -> Result<DiscretePmf> {
    let probs: Vec<f64> = hist.iter().map(|&c| c as f64 / total as f64).collect();
    DiscretePmf::new(probs, 0.0)
}

/// Result of a time-averaged M/G/1 run.
#[derive(Debug, Clone)]
pub struct Mg1Simulation {
    /// Time-averaged distribution of customers in system.
    pub pmf: DiscretePmf,
    /// Time-averaged E[number in system], batch-means CI.
    pub mean: Estimate,
    /// Fraction of time the system is empty, batch-means CI.
    pub p_empty: Estimate,
}

const BATCHES: usize = 20;
// two-sided 97.5% Student-t quantile at 19 degrees of freedom
const T_QUANTILE: f64 = 2.093;

/// Discrete-event simulation of the number in system of an M/G/1 queue,
/// observed by time averaging over `[warmup, horizon]`.
pub fn simulate_mg1(
    sys: &Mg1System,
    horizon: f64,
    warmup: f64,
    seed: u64,
) -> Result<Mg1Simulation> {
    sys.require_stable()?;
    service_sampler_check(&sys.service)?;
    if !(horizon > warmup && warmup >= 0.0) {
        return Err(Error::domain("need 0 <= warmup < horizon"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let interarrival = Exp::new(sys.lambda).unwrap();

    let span = horizon - warmup;
    let batch_len = span / BATCHES as f64;
    let mut occupancy: Vec<f64> = Vec::new();
    let mut batch_area = [0.0f64; BATCHES];
    let mut batch_empty = [0.0f64; BATCHES];

    let mut t = 0.0f64;
    let mut n: usize = 0;
    let mut next_arrival = rng.sample(interarrival);
    let mut next_departure = f64::INFINITY;
    while t < horizon {
        let te = next_arrival.min(next_departure).min(horizon);
        let lo = t.max(warmup);
        if te > lo {
            if occupancy.len() <= n {
                occupancy.resize(n + 1, 0.0);
            }
            // split the occupancy interval across batch boundaries
            let mut a = lo;
            while a < te {
                let b_idx = (((a - warmup) / batch_len) as usize).min(BATCHES - 1);
                let b_end = warmup + (b_idx + 1) as f64 * batch_len;
                let b = te.min(b_end);
                let dt = b - a;
                occupancy[n] += dt;
                batch_area[b_idx] += n as f64 * dt;
                if n == 0 {
                    batch_empty[b_idx] += dt;
                }
                a = b;
            }
        }
        t = te;
        if t >= horizon {
            break;
        }
        if next_arrival <= next_departure {
            n += 1;
            if n == 1 {
                next_departure = t + sample_service(sys.service.kind(), &mut rng)?;
            }
            next_arrival = t + rng.sample(interarrival);
        } else {
            n -= 1;
            next_departure = if n > 0 {
                t + sample_service(sys.service.kind(), &mut rng)?
            } else {
                f64::INFINITY
            };
        }
    }

    let total: f64 = occupancy.iter().sum();
    let probs: Vec<f64> = occupancy.iter().map(|&a| a / total).collect();
    let pmf = DiscretePmf::new(probs, 0.0)?;
    let batch_stat = |areas: &[f64; BATCHES]| {
        let means: Vec<f64> = areas.iter().map(|&a| a / batch_len).collect();
        let m = means.iter().sum::<f64>() / BATCHES as f64;
        let var = means.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (BATCHES - 1) as f64;
        Estimate {
            value: m,
            half_width: T_QUANTILE * (var / BATCHES as f64).sqrt(),
        }
    };
    Ok(Mg1Simulation {
        pmf,
        mean: batch_stat(&batch_area),
        p_empty: batch_stat(&batch_empty),
    })
}

/// Result of simulating regeneration cycles of the M/G/1 queue.
#[derive(Debug, Clone)]
pub struct BusyPeriodSimulation {
    /// Empirical pmf of (customers served during a busy period) − 1.
    pub pmf: DiscretePmf,
    /// Mean customers served per busy period, CLT CI.
    pub mean_served: Estimate,
    /// ℙ(exactly one customer served), exact-binomial-width CI.
    pub p_single: Estimate,
}

const CHUNK: u64 = 1024;

/// Simulates `n_periods` independent busy periods and tallies the number
/// of customers served in each.
pub fn simulate_busy_period_customers(
    sys: &Mg1System,
    n_periods: u64,
    seed: u64,
) -> Result<BusyPeriodSimulation> {
    sys.require_stable()?;
    service_sampler_check(&sys.service)?;
    if n_periods == 0 {
        return Err(Error::domain("need at least one period"));
    }
    let n_chunks = n_periods.div_ceil(CHUNK);
    let chunks: Vec<u64> = (0..n_chunks).collect();
    let lambda = sys.lambda;
    let kind = sys.service.kind().clone();
    // (histogram, count, sum, sum of squares) per chunk
    let partials: Vec<Result<(Vec<u64>, u64, f64, f64)>> =
        crate::par::map_collect(chunks, |c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c + 1);
            let todo = CHUNK.min(n_periods - c * CHUNK);
            let mut hist: Vec<u64> = Vec::new();
            let mut sum = 0.0f64;
            let mut sum_sq = 0.0f64;
            for _ in 0..todo {
                let mut pending: u64 = 1;
                let mut served: u64 = 0;
                while pending > 0 {
                    let s = sample_service(&kind, &mut rng)?;
                    let arrivals = if lambda * s > 0.0 {
                        rng.sample(Poisson::new(lambda * s).unwrap()) as u64
                    } else {
                        0
                    };
                    pending = pending + arrivals - 1;
                    served += 1;
                }
                let w = (served - 1) as usize;
                if hist.len() <= w {
                    hist.resize(w + 1, 0);
                }
                hist[w] += 1;
                sum += served as f64;
                sum_sq += (served as f64) * (served as f64);
            }
            Ok((hist, todo, sum, sum_sq))
        });

    let mut hist: Vec<u64> = Vec::new();
    let (mut count, mut sum, mut sum_sq) = (0u64, 0.0f64, 0.0f64);
    for part in partials {
        let (h, c, s, s2) = part?;
        if hist.len() < h.len() {
            hist.resize(h.len(), 0);
        }
        for (i, v) in h.into_iter().enumerate() {
            hist[i] += v;
        }
        count += c;
        sum += s;
        sum_sq += s2;
    }
    let nf = count as f64;
    let mean = sum / nf;
    let var = (sum_sq / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
    let p1 = hist.first().copied().unwrap_or(0) as f64 / nf;
    Ok(BusyPeriodSimulation {
        pmf: histogram_to_pmf(&hist, count)?,
        mean_served: Estimate {
            value: mean,
            half_width: 1.96 * (var / nf).sqrt(),
        },
        p_single: Estimate {
            value: p1,
            half_width: 1.96 * (p1 * (1.0 - p1) / nf).sqrt(),
        },
    })
}

/// Samples N(T) with T ~ Γ(α, β) and N a Poisson process at rate λ.
pub fn sample_mixed_poisson(
    alpha: f64,
    beta: f64,
    lambda: f64,
    n: u64,
    seed: u64,
) -> Result<DiscretePmf> {
    if !(alpha > 0.0 && beta > 0.0 && lambda > 0.0) {
        return Err(Error::domain("alpha, beta, lambda must be positive"));
    }
    if n == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let n_chunks = n.div_ceil(CHUNK);
    let gamma = Gamma::new(alpha, 1.0 / beta).unwrap();
    let partials: Vec<Vec<u64>> = crate::par::map_range(n_chunks as usize, |c| {
        let c = c as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c + 1);
        let todo = CHUNK.min(n - c * CHUNK);
        let mut hist: Vec<u64> = Vec::new();
        for _ in 0..todo {
            let t: f64 = rng.sample(gamma);
            let k = if lambda * t > 0.0 {
                rng.sample(Poisson::new(lambda * t).unwrap()) as usize
            } else {
                0
            };
            if hist.len() <= k {
                hist.resize(k + 1, 0);
            }
            hist[k] += 1;
        }
        hist
    });
    let mut hist: Vec<u64> = Vec::new();
    for h in partials {
        if hist.len() < h.len() {
            hist.resize(h.len(), 0);
        }
        for (i, v) in h.into_iter().enumerate() {
            hist[i] += v;
        }
    }
    histogram_to_pmf(&hist, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::tv_distance;
    use crate::pmf::{geometric_pmf_auto, mixed_poisson_gamma_pmf};
    use crate::queueing::mg1_equilibrium;

    fn mm1(rho: f64) -> Mg1System {
        Mg1System::new(rho, ServiceTimeModel::exponential(1.0).unwrap()).unwrap()
    }

    #[test]
    fn determinism_same_seed_same_output() {
        let sys = mm1(0.5);
        let a = simulate_busy_period_customers(&sys, 10_000, 7).unwrap();
        let b = simulate_busy_period_customers(&sys, 10_000, 7).unwrap();
        assert_eq!(a.pmf.probs(), b.pmf.probs());
        let c = simulate_mg1(&sys, 5_000.0, 500.0, 11).unwrap();
        let d = simulate_mg1(&sys, 5_000.0, 500.0, 11).unwrap();
        assert_eq!(c.pmf.probs(), d.pmf.probs());
        let e = sample_mixed_poisson(2.0, 1.0, 0.5, 20_000, 3).unwrap();
        let f = sample_mixed_poisson(2.0, 1.0, 0.5, 20_000, 3).unwrap();
        assert_eq!(e.probs(), f.probs());
    }

    #[test]
    fn mm1_empty_probability() {
        let sys = mm1(0.5);
        let sim = simulate_mg1(&sys, 200_000.0, 5_000.0, 42).unwrap();
        assert!(sim.p_empty.within(0.5, 3.0), "p0 = {:?}", sim.p_empty);
        assert!(sim.mean.within(1.0, 3.0), "mean = {:?}", sim.mean);
    }

    #[test]
    fn erlang_service_matches_equilibrium_mean() {
        let service = ServiceTimeModel::erlang(2, 4.0).unwrap(); // ES = 0.5
        let sys = Mg1System::new(1.0, service).unwrap(); // rho = 0.5
        let eq = mg1_equilibrium(&sys).unwrap();
        let sim = simulate_mg1(&sys, 200_000.0, 5_000.0, 9).unwrap();
        assert!(sim.mean.within(eq.ew, 3.0), "{:?} vs {}", sim.mean, eq.ew);
        assert!(sim.p_empty.within(eq.p0, 3.0));
    }

    #[test]
    fn busy_period_mean_and_p_single() {
        let rho = 0.3;
        let sys = mm1(rho);
        let sim = simulate_busy_period_customers(&sys, 200_000, 5).unwrap();
        assert!(
            sim.mean_served.within(1.0 / (1.0 - rho), 3.0),
            "{:?}",
            sim.mean_served
        );
        // ℙ(one customer) = E e^{−λS} = 1/(1+ρ) for exponential unit service
        assert!(sim.p_single.within(1.0 / (1.0 + rho), 3.0));
    }

    #[test]
    fn mixed_poisson_alpha_one_is_geometric() {
        let (beta, lambda) = (1.0, 0.7);
        let emp = sample_mixed_poisson(1.0, beta, lambda, 400_000, 17).unwrap();
        let p = beta / (beta + lambda);
        let g = geometric_pmf_auto(p, 1e-12).unwrap();
        assert!(tv_distance(&emp, &g).lo < 0.01);
    }

    #[test]
    fn mixed_poisson_matches_analytic_pmf() {
        let (alpha, beta, lambda) = (2.0, 1.0, 0.5);
        let emp = sample_mixed_poisson(alpha, beta, lambda, 400_000, 23).unwrap();
        let exact = mixed_poisson_gamma_pmf(alpha, beta, lambda, 60).unwrap();
        assert!(tv_distance(&emp, &exact).lo < 0.01);
        let mean = emp.moments().mean;
        assert!((mean - lambda * alpha / beta).abs() < 0.05);
    }

    #[test]
    fn custom_service_has_no_sampler() {
        let s = ServiceTimeModel::custom(
            1.0,
            2.0,
            std::sync::Arc::new(|s: f64| 1.0 / (1.0 + s)),
            std::sync::Arc::new(|s: f64| -1.0 / ((1.0 + s) * (1.0 + s))),
            None,
            false,
            false,
        )
        .unwrap();
        let sys = Mg1System::new(0.5, s).unwrap();
        assert!(simulate_mg1(&sys, 100.0, 0.0, 1).is_err());
    }
}
