//! Shared result types of the secret-key-rate calculations.

use crate::math::h_bits;
use crate::{Error, Result};

/// Error-correction model: practical codes leak `f_EC * h(Q)` bits per
/// sifted bit, with inefficiency `f_EC >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcModel {
    pub f_ec: f64,
}

impl EcModel {
    /// Shannon-limit code.
    pub const IDEAL: EcModel = EcModel { f_ec: 1.0 };

    pub fn new(f_ec: f64) -> Result<Self> {
        if !(f_ec >= 1.0) {
            return Err(Error::OutOfRange {
                name: "f_ec",
                value: f_ec,
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        Ok(EcModel { f_ec })
    }

    /// Bits disclosed during error correction per sifted bit.
    pub fn leak(&self, qber: f64) -> f64 {
        self.f_ec * h_bits(qber)
    }
}

/// Bundle of the quantities describing one key-rate evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    /// Raw detection rate `R` (Hz).
    pub rate: f64,
    /// Observed QBER (or CV equivalent noise summary, 0 when not
    /// applicable).
    pub qber: f64,
    /// Bits to remove in privacy amplification per sifted bit.
    pub eve_info: f64,
    /// Secret fraction `r` (clamped at 0).
    pub secret_fraction: f64,
    /// Secret key rate `K = R r` (Hz).
    pub key_rate: f64,
    /// Optimized source parameter (intensity, pair parameter or modulation
    /// variance), when an optimization produced this result.
    pub mu_opt: Option<f64>,
    /// False when the bracket went non-positive (or a validity condition
    /// failed) and the rate was clamped to 0.
    pub feasible: bool,
}

impl RateResult {
    /// Clamps a signed secret fraction into a result; a non-positive
    /// fraction yields `K = 0` with `feasible = false` so that parameter
    /// sweeps traverse infeasible regions gracefully.
    pub(crate) fn from_fraction(rate: f64, qber: f64, eve_info: f64, fraction: f64) -> Self {
        let feasible = fraction > 0.0;
        let secret_fraction = fraction.max(0.0);
        RateResult {
            rate,
            qber,
            eve_info,
            secret_fraction,
            key_rate: rate * secret_fraction,
            mu_opt: None,
            feasible,
        }
    }

    /// An infeasible placeholder with `K = 0`.
    pub(crate) fn infeasible(rate: f64, qber: f64) -> Self {
        RateResult {
            rate,
            qber,
            eve_info: 1.0,
            secret_fraction: 0.0,
            key_rate: 0.0,
            mu_opt: None,
            feasible: false,
        }
    }

    pub(crate) fn with_mu(mut self, mu: f64) -> Self {
        self.mu_opt = Some(mu);
        self
    }
}

/// One-way post-processing bound `r = max(I(A:B) - I_E, 0)`.
pub fn csiszar_korner_rate(i_ab: f64, i_eve: f64) -> f64 {
    (i_ab - i_eve).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{binary_entropy, Probability};
    use crate::optimize::bisect_root;
    use approx::assert_relative_eq;

    #[test]
    fn ec_model_validates() {
        assert!(EcModel::new(0.9).is_err());
        let ec = EcModel::new(1.2).unwrap();
        assert_relative_eq!(
            ec.leak(0.05),
            1.2 * binary_entropy(Probability::new(0.05).unwrap()),
            max_relative = 1e-15
        );
    }

    #[test]
    fn intercept_resend_kills_the_key() {
        // Full intercept-resend: Q = 0.25, Eve holds half the raw key.
        let i_ab = 1.0 - binary_entropy(Probability::new(0.25).unwrap());
        assert_relative_eq!(i_ab, 0.18872187554086717, max_relative = 1e-12);
        assert_eq!(csiszar_korner_rate(i_ab, 0.5), 0.0);
    }

    #[test]
    fn partial_intercept_resend_threshold() {
        // Attacking a fraction p gives Q = p/4 and I_E = 2Q; the rate
        // 1 - h(Q) - 2Q changes sign near 17%.
        let f = |q: f64| 1.0 - h(q) - 2.0 * q;
        assert!(f(0.16) > 0.0 && f(0.18) < 0.0);
        let root = bisect_root(f, 0.05, 0.3, 60);
        assert!((0.16..=0.18).contains(&root), "root = {root}");

        fn h(q: f64) -> f64 {
            binary_entropy(Probability::new(q).unwrap())
        }
    }

    #[test]
    fn no_eavesdropper_keeps_mutual_information() {
        assert_eq!(csiszar_korner_rate(0.7, 0.0), 0.7);
    }
}
