//! Self-contained verification suites: each re-derives a family of claims
//! from scratch and reports one pass/fail line per check. The CLI `verify`
//! subcommand and the acceptance tests both run through these.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::bounds::{self, HorizonModel};
use crate::markov::{self, BdX, BirthDeathSpec};
use crate::metrics::{kolmogorov_distance, tv_distance};
use crate::montecarlo;
use crate::pmf::{
    compound_geometric_pmf, geometric_pmf_auto, mixed_poisson_gamma_pmf, polya_pmf,
    CompoundGeometricSpec, DiscretePmf,
};
use crate::queueing::{busy_period_chain, mg1_equilibrium, Mg1System, ServiceTimeModel};
use crate::reliability::{self, Classification, Trilean};
use crate::stein::{SteinSolver, TargetSet};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckResult {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    match name {
        "stein" => stein_suite(),
        "orders" => orders_suite(seed),
        "soundness" => soundness_suite(seed),
        "simulation" => simulation_suite(seed),
        other => Err(Error::domain(format!(
            "unknown suite '{other}'; expected stein|orders|soundness|simulation"
        ))),
    }
}

pub const SUITES: [&str; 4] = ["stein", "orders", "soundness", "simulation"];

fn test_specs() -> Vec<CompoundGeometricSpec> {
    let u12 = DiscretePmf::from_probs(vec![0.0, 0.5, 0.5]).unwrap();
    let skewed = DiscretePmf::from_probs(vec![0.0, 0.6, 0.3, 0.1]).unwrap();
    vec![
        CompoundGeometricSpec::new(0.5, DiscretePmf::point_mass(1)).unwrap(),
        CompoundGeometricSpec::new(0.3, DiscretePmf::point_mass(1)).unwrap(),
        CompoundGeometricSpec::new(0.5, DiscretePmf::point_mass(2)).unwrap(),
        CompoundGeometricSpec::new(0.3, u12).unwrap(),
        CompoundGeometricSpec::new(0.7, skewed).unwrap(),
    ]
}

pub fn stein_suite() -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite: "stein".into(),
        checks: Vec::new(),
    };
    let j_max = 12;

    for (si, spec) in test_specs().iter().enumerate() {
        let solver = SteinSolver::new(spec, j_max, 1e-10)?;
        // residuals over a representative set family
        let mut sets: Vec<TargetSet> = (0..=j_max).map(TargetSet::singleton).collect();
        sets.push(TargetSet::Even);
        sets.push(TargetSet::Finite(vec![0, 2, 5, 9]));
        sets.push(TargetSet::Cofinite(vec![1, 3]));
        let worst = sets
            .iter()
            .map(|a| solver.residual_sup(a, &solver.solve(a)))
            .fold(0.0f64, f64::max);
        report.push(
            format!("stein-identity-residual-spec{si}"),
            worst < 1e-8,
            format!("max residual {worst:.3e}"),
        );

        // lemma over exhaustive A subsets of {0..12}
        let fs: Vec<Vec<f64>> = solver_exhaustive(&solver, j_max);
        let sup = fs
            .iter()
            .flat_map(|f| f.windows(2).map(|w| (w[1] - w[0]).abs()))
            .fold(0.0f64, f64::max);
        let bound = bounds::stein_factor(spec.p(), spec.x_pmf())? / spec.p();
        report.push(
            format!("stein-lemma-exhaustive-spec{si}"),
            sup <= bound + 1e-8,
            format!("sup increment {sup:.6} vs bound {bound:.6}"),
        );
    }

    // sharpness: X = 2 a.s., A = even attains H_p(X)/p = 1/p
    let p = 0.5;
    let spec = CompoundGeometricSpec::new(p, DiscretePmf::point_mass(2))?;
    let solver = SteinSolver::new(&spec, j_max, 1e-12)?;
    let f = solver.solve(&TargetSet::Even);
    let sup = f
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0f64, f64::max);
    report.push(
        "stein-sharpness-equality-attained",
        (sup - 1.0 / p).abs() < 1e-8,
        format!("sup increment {sup:.10} vs 1/p = {}", 1.0 / p),
    );

    // Theorem reconstructed from parts on small IFR laws
    for (m, d) in [(3, 4), (5, 3), (4, 6), (6, 2), (10, 10)] {
        let w = polya_pmf(m, d)?;
        let p = w.prob(0);
        let x = DiscretePmf::point_mass(1);
        let y = compound_geometric_pmf(&CompoundGeometricSpec::new(p, x.clone())?, 2000)?;
        let h = bounds::stein_factor(p, &x)?;
        let budget = h * ((1.0 - p) / p - w.moments().mean);
        let diffs: Vec<f64> = (0..=j_max).map(|j| w.prob(j) - y.prob(j)).collect();
        let mut ok = true;
        let mut worst = 0.0f64;
        for mask in 0u16..(1 << (j_max + 1)) {
            let d_sum: f64 = (0..=j_max)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| diffs[b])
                .sum();
            worst = worst.max(d_sum.abs());
            if d_sum.abs() > budget + 1e-9 {
                ok = false;
            }
        }
        report.push(
            format!("theorem-from-parts-polya-{m}-{d}"),
            ok,
            format!("worst |P(W in A)-P(Y in A)| {worst:.6} vs budget {budget:.6}"),
        );
    }
    Ok(report)
}

fn solver_exhaustive(solver: &SteinSolver, j_max: usize) -> Vec<Vec<f64>> {
    let masks: Vec<u16> = (1..(1u16 << (j_max + 1))).collect();
    crate::par::map_collect(masks, |mask| {
        let pts: Vec<usize> = (0..=j_max).filter(|b| mask >> b & 1 == 1).collect();
        solver.solve(&TargetSet::Finite(pts))
    })
}

fn random_pmf_from_hazards(rng: &mut impl Rng, floor: Option<&[f64]>, len: usize) -> DiscretePmf {
    // build a pmf from its discrete hazard sequence; last hazard 1 closes it
    let mut probs = Vec::with_capacity(len);
    let mut surv = 1.0f64;
    for j in 0..len {
        let h = if j + 1 == len {
            1.0
        } else {
            match floor {
                Some(f) => f[j] + rng.gen::<f64>() * (0.95 - f[j]),
                None => 0.05 + rng.gen::<f64>() * 0.55,
            }
        };
        probs.push(surv * h);
        surv *= 1.0 - h;
    }
    DiscretePmf::from_probs(probs).unwrap()
}

pub fn orders_suite(seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite: "orders".into(),
        checks: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // hazard order implies stochastic order on 100 constructed pairs
    let mut verified = 0;
    let mut implied = 0;
    for _ in 0..100 {
        let len = 6 + (rng.gen::<u64>() % 6) as usize;
        let b = random_pmf_from_hazards(&mut rng, None, len);
        // a gets pointwise larger hazards, hence a <=hr b
        let hazards_b: Vec<f64> = (0..len)
            .map(|j| {
                let surv_before = if j == 0 { 1.0 } else { b.survival(j - 1) };
                b.prob(j) / surv_before
            })
            .collect();
        let a = random_pmf_from_hazards(&mut rng, Some(&hazards_b), len);
        if reliability::hazard_order_leq(&a, &b) == Trilean::True {
            verified += 1;
            if reliability::stochastic_order_leq(&a, &b) == Trilean::True {
                implied += 1;
            }
        }
    }
    report.push(
        "hazard-order-implies-stochastic-order",
        verified == implied && verified >= 90,
        format!("{implied}/{verified} implications held (100 pairs drawn)"),
    );

    // Polya classification and domination by the matching geometric
    for (m, d) in [(10usize, 10usize), (10, 200), (200, 10), (200, 200)] {
        let w = polya_pmf(m, d)?;
        let prof = reliability::failure_rates(&w);
        let ifr_ok = prof.classification == Classification::Ifr;
        let p = (d as f64 - 1.0) / ((d + m - 1) as f64);
        let g = geometric_pmf_auto(p, 1e-13)?;
        let st = reliability::stochastic_order_leq(&w, &g);
        report.push(
            format!("polya-{m}-{d}-ifr-and-dominated"),
            ifr_ok && st == Trilean::True,
            format!("classification {:?}, W <=st Geom(p): {st:?}", prof.classification),
        );
    }
    Ok(report)
}

pub fn soundness_suite(seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite: "soundness".into(),
        checks: Vec::new(),
    };

    // Table rows: closed-form bound vs exact distance
    for row in crate::tables::polya_table(&crate::tables::default_polya_rows())? {
        report.push(
            format!("polya-{}-{}-bound-covers-exact", row.m, row.d),
            row.upper_tv >= row.tv_exact - 1e-12 && row.lower_tv <= row.tv_exact + 1e-12,
            format!(
                "lower {:.6e} <= exact {:.6e} <= upper {:.6e}",
                row.lower_tv, row.tv_exact, row.upper_tv
            ),
        );
    }

    // mixed Poisson grid
    for alpha in [1.0, 2.0, 5.0] {
        for beta in [0.5, 1.0] {
            for lambda in [0.1, 0.5] {
                let horizon = HorizonModel {
                    mean: alpha / beta,
                    var: alpha / (beta * beta),
                    laplace_at_lambda: (1.0 + lambda / beta).powf(-alpha),
                    ifr_certified: alpha >= 1.0,
                };
                let b = bounds::poisson_process_bounds(lambda, &horizon)?;
                let n = mixed_poisson_gamma_pmf(alpha, beta, lambda, 300)?;
                let g = geometric_pmf_auto(horizon.laplace_at_lambda, 1e-13)?;
                let tv = tv_distance(&n, &g);
                let g_mean = geometric_pmf_auto(
                    1.0 / (1.0 + lambda * alpha / beta),
                    1e-13,
                )?;
                let dk = kolmogorov_distance(&n, &g_mean);
                let ok = b.tv.valid
                    && b.kolmogorov.valid
                    && b.tv.value >= tv.lo - 1e-10
                    && b.kolmogorov.value >= dk.lo - 1e-10;
                report.push(
                    format!("mixed-poisson-a{alpha}-b{beta}-l{lambda}"),
                    ok,
                    format!(
                        "tv bound {:.5e} >= {:.5e}; dK bound {:.5e} >= {:.5e}",
                        b.tv.value, tv.lo, b.kolmogorov.value, dk.lo
                    ),
                );
            }
        }
    }

    // random three-state chains satisfying the IFR sufficient conditions
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut attempts = 0;
    while done < 20 && attempts < 100_000 {
        attempts += 1;
        let draw = |rng: &mut ChaCha8Rng| {
            let (a, b, c) = (
                rng.gen::<f64>() + 0.01,
                rng.gen::<f64>() + 0.01,
                rng.gen::<f64>() + 0.01,
            );
            let t = a + b + c;
            (a / t, b / t, c / t)
        };
        let (a1, b1, e1) = draw(&mut rng);
        let (a2, b2, e2) = draw(&mut rng);
        let r = match bounds::three_state_example(a1, b1, e1, a2, b2, e2) {
            Ok(r) => r,
            Err(_) => continue,
        };
        if !r.ifr_ok {
            continue;
        }
        done += 1;
        // exact law of W1 = (W - 1 | W >= 1) from the chain
        let chain = markov::CountableMarkovChain::new(
            vec![vec![1.0, 0.0, 0.0], vec![a1, b1, e1], vec![a2, b2, e2]],
            true,
            2,
        )?;
        let w = markov::hitting_time_pmf(&chain, 20_000)?;
        let at_least_one = 1.0 - w.prob(0);
        let probs: Vec<f64> = (1..=w.truncation_level())
            .map(|j| w.prob(j) / at_least_one)
            .collect();
        let w1 = DiscretePmf::new(probs, w.tail_mass() / at_least_one)?;
        let g = geometric_pmf_auto(r.p1, 1e-13)?;
        let tv = tv_distance(&w1, &g);
        report.push(
            format!("three-state-{done}"),
            r.bound >= tv.lo - 1e-9,
            format!("bound {:.6e} vs exact >= {:.6e}", r.bound, tv.lo),
        );
    }
    if done < 20 {
        report.push("three-state-generation", false, "could not draw 20 chains");
    }

    // random TP2 birth-death specs (r >= 1/2 guarantees TP2)
    let mut bd_done = 0;
    while bd_done < 10 {
        let r = 0.5 + 0.2 * rng.gen::<f64>();
        let q = (1.0 - r) * (0.6 + 0.35 * rng.gen::<f64>());
        let p = 1.0 - r - q;
        let spec = BirthDeathSpec::constant(p, q, r);
        let rep = markov::bd_extinction_bound(&spec, BdX::Auto, true)?;
        if !rep.valid {
            continue;
        }
        bd_done += 1;
        let chain = spec.to_chain(300)?;
        let w = markov::hitting_time_pmf(&chain, 40_000)?;
        let x = rep.approximant_x.clone().unwrap();
        let y = compound_geometric_pmf(
            &CompoundGeometricSpec::new(rep.approximant_p, x)?,
            w.truncation_level(),
        )?;
        let tv = tv_distance(&w, &y);
        report.push(
            format!("birth-death-{bd_done}"),
            rep.value >= tv.lo - 1e-9,
            format!("bound {:.6e} vs exact >= {:.6e}", rep.value, tv.lo),
        );
    }
    Ok(report)
}

pub fn simulation_suite(seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite: "simulation".into(),
        checks: Vec::new(),
    };
    let services: [(&str, fn() -> ServiceTimeModel); 3] = [
        ("exponential", || ServiceTimeModel::exponential(1.0).unwrap()),
        ("erlang2", || ServiceTimeModel::erlang(2, 2.0).unwrap()),
        ("deterministic", || {
            ServiceTimeModel::deterministic(1.0).unwrap()
        }),
    ];
    for rho in [0.3, 0.5] {
        for (name, make) in &services {
            let sys = Mg1System::new(rho, make())?;
            let eq = mg1_equilibrium(&sys)?;
            let mut mean_hits = 0;
            let mut p0_hits = 0;
            const REPS: u64 = 20;
            for rep in 0..REPS {
                let sim = montecarlo::simulate_mg1(&sys, 30_000.0, 2_000.0, seed ^ (rep * 7919))?;
                // the CI half-width is a t-quantile multiple of sigma-hat
                let sigma_scale = 3.0 / 2.093;
                if sim.mean.within(eq.ew, sigma_scale) {
                    mean_hits += 1;
                }
                if sim.p_empty.within(eq.p0, sigma_scale) {
                    p0_hits += 1;
                }
            }
            report.push(
                format!("mg1-{name}-rho{rho}"),
                // 3-sigma coverage is ~99.7% per rep; one excursion in
                // twenty is within expectation, two is not
                mean_hits >= REPS - 1 && p0_hits >= REPS - 1,
                format!("EW within 3 sigma {mean_hits}/{REPS}, P(empty) {p0_hits}/{REPS}"),
            );
        }
    }

    // busy period empirical law vs the embedded chain hitting time
    let sys = Mg1System::new(0.3, ServiceTimeModel::exponential(1.0)?)?;
    let sim = montecarlo::simulate_busy_period_customers(&sys, 1_000_000, seed)?;
    let chain = busy_period_chain(&sys, 120)?;
    let exact = markov::hitting_time_pmf(&chain, 4_000)?;
    let tv = tv_distance(&sim.pmf, &exact);
    report.push(
        "busy-period-empirical-vs-chain",
        tv.lo < 0.01,
        format!("TV lower endpoint {:.5}", tv.lo),
    );

    // mixed Poisson sampler vs analytic pmf
    let emp = montecarlo::sample_mixed_poisson(2.0, 1.0, 0.5, 400_000, seed.wrapping_add(1))?;
    let exact = mixed_poisson_gamma_pmf(2.0, 1.0, 0.5, 80)?;
    let tv = tv_distance(&emp, &exact);
    report.push(
        "mixed-poisson-sampler-vs-analytic",
        tv.lo < 0.01,
        format!("TV lower endpoint {:.5}", tv.lo),
    );
    Ok(report)
}
