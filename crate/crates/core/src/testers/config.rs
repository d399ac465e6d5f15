use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::estimators::{halfspace_norm_samples, mean_budget};

/// Where the outer region begins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TRule {
    /// `T = 2^k t̃` with the dyadic ring count `k`.
    RingEnd,
    /// `T = max(2^k t̃, 2 t̃ n / ε²)`; points between the last ring and `T`
    /// are left unassigned.
    ProofBound,
    /// Enough rings that `2^k t̃ ≥ 2 t̃ n / ε²`, and `T = 2^k t̃`.
    Max,
}

impl std::str::FromStr for TRule {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ring-end" => Ok(Self::RingEnd),
            "proof-bound" => Ok(Self::ProofBound),
            "max" => Ok(Self::Max),
            _ => Err(invalid(format!(
                "unknown T rule `{s}` (ring-end, proof-bound, max)"
            ))),
        }
    }
}

/// Test parameters and the constants that turn the asymptotic budgets into
/// sample counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TesterConfig {
    pub eps: f64,
    pub delta: f64,
    /// Mean/halfspace-norm accuracy `ε₁³ = K₁ C² ε³` in Simple-Tester.
    pub k1: f64,
    /// Tolerance `ε₂ = K₂ ε^{3+η}`.
    pub k2: f64,
    /// Norm-gap gate `ε₃³ = K₃ C² ε³` in Simple-Tester.
    pub k3: f64,
    /// Inner-radius fraction of a bounded ring.
    pub c: f64,
    /// Constant in the inner-product budgets.
    pub l: f64,
    pub eta: f64,
    /// Divisor `κ` in `ε₁ = C ε / κ` for Check-Consistency.
    pub kappa: f64,
    /// Leading constant of the Check-Consistency inner-product budget
    /// `B √n ln(6/δ) / ε₁⁴`.
    pub consistency_scale: f64,
    pub t_rule: TRule,
    pub ring_count_override: Option<usize>,
}

impl Default for TesterConfig {
    fn default() -> Self {
        Self::calibrated(0.25, 0.2)
    }
}

impl TesterConfig {
    /// Constants tuned so desk-scale runs finish in seconds.
    pub fn calibrated(eps: f64, delta: f64) -> Self {
        Self {
            eps,
            delta,
            k1: 8.0,
            k2: 2.5,
            k3: 32.0,
            c: 0.5,
            l: 0.08,
            eta: 1.0,
            kappa: 0.8,
            consistency_scale: 0.1,
            t_rule: TRule::Max,
            ring_count_override: None,
        }
    }

    /// The constants as they appear in the analysis. Budgets are enormous.
    pub fn theoretical(eps: f64, delta: f64) -> Self {
        Self {
            eps,
            delta,
            k1: 1.0 / 128.0,
            k2: 2.5,
            k3: 1.0 / 32.0,
            c: 0.5,
            l: 8.0,
            eta: 1.0,
            kappa: 12f64.sqrt(),
            consistency_scale: 1.0,
            t_rule: TRule::Max,
            ring_count_override: None,
        }
    }

    pub fn with_eps_delta(mut self, eps: f64, delta: f64) -> Self {
        self.eps = eps;
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eps", self.eps), ("delta", self.delta)] {
            if !(v > 0.0 && v < 0.5) {
                return Err(invalid(format!("{name} = {v} must lie in (0, 1/2)")));
            }
        }
        for (name, v) in [
            ("k1", self.k1),
            ("k2", self.k2),
            ("k3", self.k3),
            ("l", self.l),
            ("eta", self.eta),
            ("kappa", self.kappa),
            ("consistency_scale", self.consistency_scale),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} = {v} must be positive")));
            }
        }
        if self.k1 > self.k3 / 4.0 * (1.0 + 1e-12) {
            return Err(invalid(format!(
                "k1 = {} exceeds k3/4 = {}",
                self.k1,
                self.k3 / 4.0
            )));
        }
        if !(self.c > 0.0 && self.c <= 1.0) {
            return Err(invalid(format!("c = {} must lie in (0, 1]", self.c)));
        }
        if self.ring_count_override == Some(0) {
            return Err(invalid("ring_count_override must be ≥ 1"));
        }
        Ok(())
    }

    /// `ε₁³ = K₁ C² ε³`.
    pub fn simple_accuracy(&self, eps: f64) -> f64 {
        self.k1 * self.c * self.c * eps.powi(3)
    }

    /// `ε₃³ = K₃ C² ε³`.
    pub fn simple_gate(&self, eps: f64) -> f64 {
        self.k3 * self.c * self.c * eps.powi(3)
    }

    /// `ε₂ = K₂ ε^{3+η}`.
    pub fn tolerance(&self, eps: f64) -> f64 {
        self.k2 * eps.powf(3.0 + self.eta)
    }

    /// `ε₁ = C ε / κ` in Check-Consistency.
    pub fn consistency_accuracy(&self, eps: f64) -> f64 {
        self.c * eps / self.kappa
    }

    /// Per-half Estimate-Norm budget in Simple-Tester.
    pub fn simple_norm_m(&self, n: usize, eps: f64, delta: f64) -> usize {
        let a = self.simple_accuracy(eps);
        ceil_count(self.l * (n as f64).sqrt() / (a * a) * (3.0 / delta).ln())
    }

    /// Per-half inner-product budget in Check-Consistency.
    pub fn consistency_m(&self, n: usize, eps: f64, delta: f64) -> usize {
        let e1 = self.consistency_accuracy(eps);
        ceil_count(self.consistency_scale * (n as f64).sqrt() * (6.0 / delta).ln() / e1.powi(4))
    }

    /// Longest prefix read by a replayed Simple-Tester.
    pub fn simple_prefix(&self, n: usize, eps: f64, delta: f64) -> usize {
        let a = self.simple_accuracy(eps);
        mean_budget(a, delta / 3.0)
            .max(2 * self.simple_norm_m(n, eps, delta))
            .max(halfspace_norm_samples(n, a, delta / 3.0, self.l))
    }

    /// Draws of a live Simple-Tester that reaches the norm gate.
    pub fn simple_total(&self, n: usize, eps: f64, delta: f64) -> usize {
        let a = self.simple_accuracy(eps);
        mean_budget(a, delta / 3.0)
            + 2 * self.simple_norm_m(n, eps, delta)
            + halfspace_norm_samples(n, a, delta / 3.0, self.l)
    }

    /// Longest prefix read from either side by a replayed Check-Consistency.
    pub fn consistency_prefix(&self, n: usize, eps: f64, delta: f64) -> usize {
        mean_budget(eps / 3.0, delta / 6.0)
            .max(2 * self.consistency_m(n, eps, delta))
            .max(threshold_check_budget(eps, delta / 6.0))
    }

    /// `m(ε, δ)`: samples a ring needs to host every simulated subroutine.
    pub fn ring_budget(&self, n: usize, eps: f64, delta: f64) -> usize {
        self.simple_prefix(n, eps, delta)
            .max(self.consistency_prefix(n, eps, delta))
            .max(mean_budget(eps / 2.0, delta))
    }

    /// Smallest ε for which the outer-region completeness argument applies:
    /// `(4 C² n)^{-1/6}`.
    pub fn eps_guard(&self, n: usize) -> f64 {
        (4.0 * self.c * self.c * n as f64).powf(-1.0 / 6.0)
    }
}

/// `⌈(9 / 2ε²) ln(8/δ)⌉` per side: four empirical quantiles, each within
/// `ε/3` at confidence `δ/4`.
pub fn threshold_check_budget(eps: f64, delta: f64) -> usize {
    ceil_count(9.0 / (2.0 * eps * eps) * (8.0 / delta).ln())
}

pub(crate) fn ceil_count(v: f64) -> usize {
    let c = (v - 1e-9 * v.abs().max(1.0)).ceil();
    c.max(1.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_accuracies() {
        let cfg = TesterConfig::calibrated(0.25, 0.2);
        cfg.validate().unwrap();
        assert!((cfg.simple_accuracy(0.25) - 0.03125).abs() < 1e-15);
        assert!((cfg.simple_gate(0.25) - 0.125).abs() < 1e-15);
        let th = TesterConfig::theoretical(0.25, 0.2);
        th.validate().unwrap();
        assert!((th.consistency_accuracy(0.3) - 0.5 * 0.3 / 12f64.sqrt()).abs() < 1e-15);
        assert!((th.tolerance(0.5) - 2.5 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let mut cfg = TesterConfig::default();
        cfg.k1 = cfg.k3;
        assert!(cfg.validate().is_err());
        let cfg = TesterConfig::default().with_eps_delta(0.6, 0.1);
        assert!(cfg.validate().is_err());
        let cfg = TesterConfig {
            c: 1.5,
            ..TesterConfig::default()
        };
        assert!(cfg.validate().is_err());
        assert_eq!("max".parse::<TRule>().unwrap(), TRule::Max);
        assert!("nope".parse::<TRule>().is_err());
    }

    #[test]
    fn budgets_grow_like_root_n() {
        let cfg = TesterConfig::default();
        let a = cfg.ring_budget(16, 0.25, 0.01) as f64;
        let b = cfg.ring_budget(64, 0.25, 0.01) as f64;
        assert!(b / a > 1.2 && b / a <= 2.0 + 1e-9, "{}", b / a);
        assert_eq!(
            threshold_check_budget(0.5, 0.8),
            (18.0 * 10f64.ln()).ceil() as usize
        );
    }
}
