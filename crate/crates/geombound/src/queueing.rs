//! M/G/1 analytics: equilibrium queue length, the busy-period embedded
//! chain, Kyprianou's limiting ratio θ, and the Erlang specialization.

use std::fmt;
use std::sync::Arc;

use crate::bounds::{stein_factor, BoundReport, Ingredients, TargetMetric};
use crate::markov::CountableMarkovChain;
use crate::pmf::{mixed_poisson_gamma_pmf, DiscretePmf};
use crate::reliability::{self, delta_from_alt, CheckOutcome};
use crate::{Error, Result};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Service-time distribution families.
#[derive(Clone)]
pub enum ServiceKind {
    Exponential {
        rate: f64,
    },
    Erlang {
        k: u32,
        beta: f64,
    },
    Deterministic {
        value: f64,
    },
    /// User-supplied Laplace transform and derivative. Both must be exact
    /// analytic expressions: numeric differentiation is refused because
    /// the resulting bounds would no longer be certified.
    Custom {
        mean: f64,
        second_moment: f64,
        laplace: RealFn,
        laplace_prime: RealFn,
        density: Option<RealFn>,
        ifr_asserted: bool,
        nbue_asserted: bool,
    },
}

impl fmt::Debug for ServiceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ServiceKind::Exponential { rate } => write!(f, "Exponential {{ rate: {rate} }}"),
            ServiceKind::Erlang { k, beta } => write!(f, "Erlang {{ k: {k}, beta: {beta} }}"),
            ServiceKind::Deterministic { value } => write!(f, "Deterministic {{ value: {value} }}"),
            ServiceKind::Custom { mean, .. } => write!(f, "Custom {{ mean: {mean}, .. }}"),
        }
    }
}

/// A service-time distribution with its moments and Laplace transform.
#[derive(Debug, Clone)]
pub struct ServiceTimeModel {
    kind: ServiceKind,
}

impl ServiceTimeModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0) {
            return Err(Error::domain("exponential rate must be positive"));
        }
        Ok(ServiceTimeModel {
            kind: ServiceKind::Exponential { rate },
        })
    }

    pub fn erlang(k: u32, beta: f64) -> Result<Self> {
        if k == 0 || !(beta > 0.0) {
            return Err(Error::domain("Erlang requires k >= 1 and beta > 0"));
        }
        Ok(ServiceTimeModel {
            kind: ServiceKind::Erlang { k, beta },
        })
    }

    pub fn deterministic(value: f64) -> Result<Self> {
        if !(value > 0.0) {
            return Err(Error::domain("deterministic service time must be positive"));
        }
        Ok(ServiceTimeModel {
            kind: ServiceKind::Deterministic { value },
        })
    }

    /// Builds a custom model; validates φ(0) = 1 and φ′(0) = −ES to 1e−8.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        mean: f64,
        second_moment: f64,
        laplace: RealFn,
        laplace_prime: RealFn,
        density: Option<RealFn>,
        ifr_asserted: bool,
        nbue_asserted: bool,
    ) -> Result<Self> {
        if !(mean > 0.0) || second_moment < mean * mean {
            return Err(Error::domain(
                "custom service model needs ES > 0 and E[S^2] >= (ES)^2",
            ));
        }
        if (laplace(0.0) - 1.0).abs() > 1e-8 {
            return Err(Error::domain("custom laplace transform has phi(0) != 1"));
        }
        if (laplace_prime(0.0) + mean).abs() > 1e-8 {
            return Err(Error::domain("custom laplace transform has phi'(0) != -ES"));
        }
        Ok(ServiceTimeModel {
            kind: ServiceKind::Custom {
                mean,
                second_moment,
                laplace,
                laplace_prime,
                density,
                ifr_asserted,
                nbue_asserted,
            },
        })
    }

    pub fn kind(&self) -> &ServiceKind {
        &self.kind
    }

    pub fn mean(&self) -> f64 {
        match &self.kind {
            ServiceKind::Exponential { rate } => 1.0 / rate,
            ServiceKind::Erlang { k, beta } => *k as f64 / beta,
            ServiceKind::Deterministic { value } => *value,
            ServiceKind::Custom { mean, .. } => *mean,
        }
    }

    pub fn second_moment(&self) -> f64 {
        match &self.kind {
            ServiceKind::Exponential { rate } => 2.0 / (rate * rate),
            ServiceKind::Erlang { k, beta } => {
                let kf = *k as f64;
                kf * (kf + 1.0) / (beta * beta)
            }
            ServiceKind::Deterministic { value } => value * value,
            ServiceKind::Custom { second_moment, .. } => *second_moment,
        }
    }

    /// φ(s) = E e^{−sS}. Returns NaN outside the transform's domain.
    pub fn laplace(&self, s: f64) -> f64 {
        match &self.kind {
            ServiceKind::Exponential { rate } => {
                if s + rate <= 0.0 {
                    f64::NAN
                } else {
                    rate / (s + rate)
                }
            }
            ServiceKind::Erlang { k, beta } => {
                if s + beta <= 0.0 {
                    f64::NAN
                } else {
                    (beta / (s + beta)).powi(*k as i32)
                }
            }
            ServiceKind::Deterministic { value } => (-s * value).exp(),
            ServiceKind::Custom { laplace, .. } => laplace(s),
        }
    }

    /// φ′(s). Returns NaN outside the transform's domain.
    pub fn laplace_prime(&self, s: f64) -> f64 {
        match &self.kind {
            ServiceKind::Exponential { rate } => {
                if s + rate <= 0.0 {
                    f64::NAN
                } else {
                    -rate / ((s + rate) * (s + rate))
                }
            }
            ServiceKind::Erlang { k, beta } => {
                if s + beta <= 0.0 {
                    f64::NAN
                } else {
                    let kf = *k as f64;
                    -kf * beta.powi(*k as i32) / (s + beta).powi(*k as i32 + 1)
                }
            }
            ServiceKind::Deterministic { value } => -value * (-s * value).exp(),
            ServiceKind::Custom { laplace_prime, .. } => laplace_prime(s),
        }
    }

    /// IFR status: analytic for the standard families, asserted for custom.
    pub fn ifr_status(&self) -> CheckOutcome {
        match &self.kind {
            ServiceKind::Exponential { .. }
            | ServiceKind::Erlang { .. }
            | ServiceKind::Deterministic { .. } => CheckOutcome::True,
            ServiceKind::Custom { ifr_asserted, .. } => CheckOutcome::Asserted(*ifr_asserted),
        }
    }

    pub(crate) fn nbue_asserted(&self) -> bool {
        match &self.kind {
            ServiceKind::Custom { nbue_asserted, .. } => *nbue_asserted,
            _ => true,
        }
    }
}

/// An M/G/1 system: Poisson arrivals at rate λ, i.i.d. service times.
#[derive(Debug, Clone)]
pub struct Mg1System {
    pub lambda: f64,
    pub service: ServiceTimeModel,
}

impl Mg1System {
    pub fn new(lambda: f64, service: ServiceTimeModel) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::domain("arrival rate must be positive"));
        }
        Ok(Mg1System { lambda, service })
    }

    pub fn rho(&self) -> f64 {
        self.lambda * self.service.mean()
    }

    pub fn require_stable(&self) -> Result<()> {
        let rho = self.rho();
        if rho >= 1.0 {
            return Err(Error::Unstable { rho });
        }
        Ok(())
    }
}

/// Equilibrium quantities of the number of customers in the system.
#[derive(Debug, Clone, Copy)]
pub struct Mg1Equilibrium {
    /// ℙ(W = 0) = 1 − ρ.
    pub p0: f64,
    /// EW = ρ + ρ² E[S²] / (2(1−ρ)(ES)²).
    pub ew: f64,
}

pub fn mg1_equilibrium(sys: &Mg1System) -> Result<Mg1Equilibrium> {
    sys.require_stable()?;
    let rho = sys.rho();
    let es = sys.service.mean();
    let es2 = sys.service.second_moment();
    Ok(Mg1Equilibrium {
        p0: 1.0 - rho,
        ew: rho + rho * rho * es2 / (2.0 * (1.0 - rho) * es * es),
    })
}

/// d_TV(L(W), Geom(1−ρ)) ≤ ρ²(1 − E[S²]/(2(ES)²)) for NBUE service.
pub fn corollary_q1_bound(sys: &Mg1System) -> Result<BoundReport> {
    sys.require_stable()?;
    let rho = sys.rho();
    let es = sys.service.mean();
    let es2 = sys.service.second_moment();
    let value = rho * rho * (1.0 - es2 / (2.0 * es * es));
    let nbue = reliability::nbue_check(&sys.service);
    let ew = mg1_equilibrium(sys)?.ew;
    let mut report = BoundReport {
        value,
        target: TargetMetric::TotalVariation,
        approximant_p: 1.0 - rho,
        approximant_x: None,
        ingredients: Ingredients {
            p: Some(1.0 - rho),
            ew: Some(ew),
            ..Ingredients::default()
        },
        valid: nbue.holds(),
        invalid_reason: None,
        provenance: "mg1-equilibrium-nbue",
        wasserstein_value: None,
    };
    if !report.valid {
        report.invalid_reason = Some("NBUE not certified".into());
    }
    Ok(report)
}

/// g(k) = E[e^{−λS}(λS)^k]/k!, the arrivals-per-service kernel.
pub fn service_arrival_kernel(sys: &Mg1System, count: usize) -> Result<Vec<f64>> {
    let lambda = sys.lambda;
    match sys.service.kind() {
        ServiceKind::Exponential { rate } => {
            erlang_kernel(1, *rate, lambda, count)
        }
        ServiceKind::Erlang { k, beta } => erlang_kernel(*k, *beta, lambda, count),
        ServiceKind::Deterministic { value } => {
            let mut g = Vec::with_capacity(count + 1);
            let mut term = (-lambda * value).exp();
            for k in 0..=count {
                g.push(term);
                term *= lambda * value / (k as f64 + 1.0);
            }
            Ok(g)
        }
        ServiceKind::Custom { density, .. } => {
            let density = density.as_ref().ok_or_else(|| {
                Error::domain("custom service model needs a density for the busy-period kernel")
            })?;
            Ok(numeric_kernel(density, lambda, count, sys.service.mean()))
        }
    }
}

fn erlang_kernel(k: u32, beta: f64, lambda: f64, count: usize) -> Result<Vec<f64>> {
    // E[e^{−λS}(λS)^j]/j! for S ~ Γ(k, β) is the negative binomial pmf
    let pmf = mixed_poisson_gamma_pmf(k as f64, beta, lambda, count)?;
    Ok(pmf.probs().to_vec())
}

fn numeric_kernel(density: &RealFn, lambda: f64, count: usize, mean: f64) -> Vec<f64> {
    // Simpson integration of e^{−λx}(λx)^k/k! f(x) over a generous window
    let upper = (mean * 50.0).max(50.0);
    let n = 200_000usize;
    let h = upper / n as f64;
    let mut g = vec![0.0; count + 1];
    for k in 0..=count {
        let kf = k as f64;
        let ln_fact: f64 = (1..=k).map(|j| (j as f64).ln()).sum();
        let integrand = |x: f64| -> f64 {
            if x <= 0.0 {
                return 0.0;
            }
            let ln_w = -lambda * x + kf * (lambda * x).ln() - ln_fact;
            ln_w.exp() * density(x)
        };
        let mut sum = integrand(h * 1e-9) + integrand(upper);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * integrand(i as f64 * h);
        }
        g[k] = sum * h / 3.0;
    }
    g
}

/// The embedded busy-period chain: p₀₀ = 1 and p_{ij} = g(j+1−i).
pub fn busy_period_chain(sys: &Mg1System, level: usize) -> Result<CountableMarkovChain> {
    sys.require_stable()?;
    let g = service_arrival_kernel(sys, level)?;
    let mut rows = Vec::with_capacity(level + 1);
    let mut row0 = vec![0.0; level + 1];
    row0[0] = 1.0;
    rows.push(row0);
    for i in 1..=level {
        let mut row = vec![0.0; level + 1];
        for j in (i - 1)..=level {
            row[j] = g[j + 1 - i];
        }
        rows.push(row);
    }
    CountableMarkovChain::new(rows, true, 1)
}

/// ξ and θ from Kyprianou's limiting-ratio formula.
#[derive(Debug, Clone, Copy)]
pub struct KyprianouTheta {
    pub theta: f64,
    pub xi: f64,
}

/// Solves 1 + λφ′(s) = 0 for the root nearest the origin, then evaluates
/// θ = (ξ − λ + λφ(ξ)) / ((ξ − λ)φ(λ)).
pub fn kyprianou_theta(sys: &Mg1System) -> Result<KyprianouTheta> {
    sys.require_stable()?;
    let lambda = sys.lambda;
    let f = |s: f64| 1.0 + lambda * sys.service.laplace_prime(s);
    let xi = locate_root(&f, 1.0 / sys.service.mean())?;
    let phi_xi = sys.service.laplace(xi);
    let theta = (xi - lambda + lambda * phi_xi) / ((xi - lambda) * sys.service.laplace(lambda));
    Ok(KyprianouTheta { theta, xi })
}

/// Expands a bracket geometrically from s = 0 in the direction where the
/// objective decreases, then bisects. `scale` sets the initial step.
fn locate_root(f: &dyn Fn(f64) -> f64, scale: f64) -> Result<f64> {
    let f0 = f(0.0);
    if !f0.is_finite() {
        return Err(Error::XiNotLocated("objective undefined at 0".into()));
    }
    let probe = scale * 1e-6;
    let dir = if f(-probe) < f(probe) { -1.0 } else { 1.0 };
    let mut step = scale * 1e-3;
    let mut prev = 0.0;
    let mut bracket = None;
    for _ in 0..300 {
        let mut s = prev + dir * step;
        // back off if we stepped past the transform's domain boundary
        let mut shrink = 0;
        while !f(s).is_finite() && shrink < 80 {
            s = (prev + s) / 2.0;
            shrink += 1;
        }
        let fs = f(s);
        if !fs.is_finite() {
            return Err(Error::XiNotLocated(
                "no finite evaluation beyond current bracket".into(),
            ));
        }
        if fs.signum() != f0.signum() {
            bracket = Some((prev, s));
            break;
        }
        step = (s - prev).abs() * 2.0;
        prev = s;
    }
    let (mut lo, mut hi) = bracket
        .ok_or_else(|| Error::XiNotLocated("no sign change in search window".into()))?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if !fm.is_finite() || fm.signum() == f0.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() < 1e-15 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form ξ for Erlang(k, β) service: (λkβ^k)^{1/(k+1)} − β.
pub fn erlang_xi_analytic(k: u32, beta: f64, lambda: f64) -> f64 {
    let kf = k as f64;
    ((lambda.ln() + kf.ln() + kf * beta.ln()) / (kf + 1.0)).exp() - beta
}

/// Closed-form A for Erlang service: (β+λ)(k^k/(λβ^k))^{1/(k+1)} − k.
pub fn erlang_a(k: u32, beta: f64, lambda: f64) -> f64 {
    let kf = k as f64;
    (beta + lambda) * ((kf * kf.ln() - lambda.ln() - kf * beta.ln()) / (kf + 1.0)).exp() - kf
}

/// Closed-form θ for Erlang service: ((β+λ)/β)^k (1 − 1/A).
pub fn erlang_theta_analytic(k: u32, beta: f64, lambda: f64) -> f64 {
    let a = erlang_a(k, beta, lambda);
    ((beta + lambda) / beta).powi(k as i32) * (1.0 - 1.0 / a)
}

/// The tabulated busy-period upper bound U = 1/(A−1) − kλ/(β−kλ),
/// defined for kλ < β.
pub fn erlang_u(k: u32, beta: f64, lambda: f64) -> Result<f64> {
    let kf = k as f64;
    if kf * lambda >= beta {
        return Err(Error::domain("requires k*lambda < beta"));
    }
    let a = erlang_a(k, beta, lambda);
    Ok(1.0 / (a - 1.0) - kf * lambda / (beta - kf * lambda))
}

/// Compounding-variable choice for the busy-period bound.
pub enum BusyPeriodX<'a> {
    /// Adjacent-integer mixture with the smallest admissible mean.
    Auto,
    Explicit(&'a DiscretePmf),
}

/// Two-point pmf on {⌊target⌋, ⌈target⌉} ⊂ {1,2,...} with mean `target`.
pub fn adjacent_integer_mixture(target: f64) -> Result<DiscretePmf> {
    if !(target >= 1.0) || !target.is_finite() {
        return Err(Error::domain(format!(
            "mixture mean must be >= 1, got {target}"
        )));
    }
    let floor = target.floor() as usize;
    let frac = target - floor as f64;
    let mut probs = vec![0.0; floor + 2];
    probs[floor] = 1.0 - frac;
    probs[floor + 1] = frac;
    DiscretePmf::new(probs, 0.0).map(DiscretePmf::trimmed)
}

/// Compound geometric bound on the number of customers served in a busy
/// period (minus one): H_p(X)((1−p)EX/p − ρ/(1−ρ)).
pub fn busy_period_bound(sys: &Mg1System, x: BusyPeriodX<'_>) -> Result<BoundReport> {
    sys.require_stable()?;
    let rho = sys.rho();
    let p = sys.service.laplace(sys.lambda);
    let theta = kyprianou_theta(sys)?.theta;
    let delta_tilde = p * theta;
    let delta = delta_from_alt(delta_tilde)?;
    let ex_floor = (1.0 - delta_tilde) / ((1.0 - p) * theta);
    let x_pmf = match x {
        BusyPeriodX::Auto => adjacent_integer_mixture(ex_floor.max(1.0))?,
        BusyPeriodX::Explicit(pmf) => pmf.clone(),
    };
    let ex = x_pmf.moments().mean;
    let ew = rho / (1.0 - rho);
    let h = stein_factor(p, &x_pmf)?;
    let ey = (1.0 - p) * ex / p;
    let value = h * (ey - ew);
    let u = ey - ew;

    let ifr = sys.service.ifr_status();
    let mean_condition = (1.0 - p) * theta * ex >= (1.0 - delta_tilde) - 1e-12;
    let (valid, reason) = if !ifr.holds() {
        (false, Some("service IFR not certified".into()))
    } else if !mean_condition {
        (false, Some("mean condition".into()))
    } else {
        (true, None)
    };

    Ok(BoundReport {
        value,
        target: TargetMetric::TotalVariation,
        approximant_p: p,
        approximant_x: Some(x_pmf.clone()),
        ingredients: Ingredients {
            p: Some(p),
            delta: Some(delta),
            ex: Some(ex),
            ey: Some(ey),
            ew: Some(ew),
            h_factor: Some(h),
            u: Some(crate::metrics::shift_smoothness_u(&x_pmf)),
        },
        valid,
        invalid_reason: reason,
        provenance: "busy-period",
        wasserstein_value: Some(u),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mm1(lambda: f64, mu: f64) -> Mg1System {
        Mg1System::new(lambda, ServiceTimeModel::exponential(mu).unwrap()).unwrap()
    }

    #[test]
    fn mm1_equilibrium() {
        let eq = mg1_equilibrium(&mm1(0.5, 1.0)).unwrap();
        assert_abs_diff_eq!(eq.p0, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(eq.ew, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn md1_equilibrium() {
        let sys = Mg1System::new(0.5, ServiceTimeModel::deterministic(1.0).unwrap()).unwrap();
        let eq = mg1_equilibrium(&sys).unwrap();
        assert_abs_diff_eq!(eq.ew, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn unstable_system_is_rejected() {
        let sys = mm1(1.0, 1.0);
        assert!(matches!(mg1_equilibrium(&sys), Err(Error::Unstable { .. })));
    }

    #[test]
    fn q1_bound_vanishes_for_exponential_service() {
        let report = corollary_q1_bound(&mm1(0.5, 1.0)).unwrap();
        assert!(report.valid);
        assert_abs_diff_eq!(report.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn q1_bound_for_deterministic_and_erlang() {
        let sys = Mg1System::new(0.5, ServiceTimeModel::deterministic(1.0).unwrap()).unwrap();
        let rho: f64 = 0.5;
        assert_abs_diff_eq!(
            corollary_q1_bound(&sys).unwrap().value,
            rho * rho / 2.0,
            epsilon = 1e-12
        );
        let sys = Mg1System::new(0.25, ServiceTimeModel::erlang(2, 1.0).unwrap()).unwrap();
        let rho = sys.rho();
        assert_abs_diff_eq!(
            corollary_q1_bound(&sys).unwrap().value,
            rho * rho / 4.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn kernel_is_geometric_for_exponential_service() {
        let sys = mm1(0.5, 2.0);
        let g = service_arrival_kernel(&sys, 30).unwrap();
        let (lambda, mu) = (0.5f64, 2.0f64);
        for (k, &gk) in g.iter().enumerate() {
            let expect = (mu / (mu + lambda)) * (lambda / (mu + lambda)).powi(k as i32);
            assert_abs_diff_eq!(gk, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn kernel_normalizes() {
        let sys = Mg1System::new(0.3, ServiceTimeModel::erlang(3, 1.0).unwrap()).unwrap();
        let g = service_arrival_kernel(&sys, 400).unwrap();
        let total: f64 = g.iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn chain_zero_state_probability_is_laplace_transform() {
        let sys = mm1(0.5, 2.0);
        let chain = busy_period_chain(&sys, 50).unwrap();
        let p = sys.service.laplace(sys.lambda);
        assert_abs_diff_eq!(chain.row(1)[0], p, epsilon = 1e-12);
    }

    #[test]
    fn xi_root_matches_erlang_closed_form() {
        for k in [1u32, 2, 5, 10] {
            for (lambda, beta) in [(0.01, 1.0), (0.05, 1.5), (0.001, 0.1)] {
                if k as f64 * lambda >= beta {
                    continue;
                }
                let sys =
                    Mg1System::new(lambda, ServiceTimeModel::erlang(k, beta).unwrap()).unwrap();
                let found = kyprianou_theta(&sys).unwrap().xi;
                let analytic = erlang_xi_analytic(k, beta, lambda);
                assert!(
                    (found - analytic).abs() < 1e-9,
                    "k={k} lambda={lambda} beta={beta}: {found} vs {analytic}"
                );
            }
        }
    }

    #[test]
    fn theta_matches_erlang_closed_form() {
        let (k, lambda, beta) = (3u32, 0.02, 0.5);
        let sys = Mg1System::new(lambda, ServiceTimeModel::erlang(k, beta).unwrap()).unwrap();
        let theta = kyprianou_theta(&sys).unwrap().theta;
        assert_abs_diff_eq!(theta, erlang_theta_analytic(k, beta, lambda), epsilon = 1e-9);
    }

    #[test]
    fn deterministic_xi_closed_form() {
        // 1 = λ s e^{−ξs} gives ξ = ln(λs)/s
        let (lambda, s) = (0.5, 1.0);
        let sys = Mg1System::new(lambda, ServiceTimeModel::deterministic(s).unwrap()).unwrap();
        let xi = kyprianou_theta(&sys).unwrap().xi;
        assert_abs_diff_eq!(xi, (lambda * s).ln() / s, epsilon = 1e-9);
    }

    #[test]
    fn table_hand_value() {
        // the A value quoted for k=1, λ=0.001, β=0.1
        assert_abs_diff_eq!(erlang_a(1, 0.1, 0.001), 9.1, epsilon = 1e-9);
        assert_abs_diff_eq!(erlang_u(1, 1.0, 0.01).unwrap(), 0.1134, epsilon = 5e-5);
    }

    #[test]
    fn busy_period_bound_reports_u() {
        let (k, lambda, beta) = (1u32, 0.01, 1.0);
        let sys = Mg1System::new(lambda, ServiceTimeModel::erlang(k, beta).unwrap()).unwrap();
        let report = busy_period_bound(&sys, BusyPeriodX::Auto).unwrap();
        assert!(report.valid);
        // with the auto mean at the admissibility floor (here > 1), the
        // normalized value value/H equals the tabulated U
        let u = report.wasserstein_value.unwrap();
        assert_abs_diff_eq!(u, erlang_u(k, beta, lambda).unwrap(), epsilon = 1e-6);
    }

    #[test]
    fn adjacent_mixture_mean() {
        let x = adjacent_integer_mixture(2.3).unwrap();
        assert_abs_diff_eq!(x.moments().mean, 2.3, epsilon = 1e-12);
        assert_eq!(x.prob(0), 0.0);
        assert!(adjacent_integer_mixture(0.5).is_err());
    }

    #[test]
    fn custom_model_validation() {
        use std::sync::Arc;
        let bad = ServiceTimeModel::custom(
            1.0,
            2.0,
            Arc::new(|_s| 0.5),
            Arc::new(|_s| -1.0),
            None,
            false,
            false,
        );
        assert!(bad.is_err());
    }
}
