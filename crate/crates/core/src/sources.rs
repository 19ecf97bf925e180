//! Photon-number statistics of the compared source families and the
//! repetition-rate limits of pulsed and continuous-wave setups.

use crate::math::{poisson_p, poisson_tail_ge};
use crate::{Error, Result};

/// Photon-number distribution `p_A(n)` of a source, as seen at Alice's
/// output (for pair sources: conditioned on Alice's herald).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhotonStatistics {
    /// Ideal sub-Poissonian source: exactly one photon per pulse.
    SinglePhoton,
    /// Phase-randomized attenuated laser with mean photon number `mu`.
    Poissonian { mu: f64 },
    /// Continuous-wave pumped pair source heralded by Alice's detector:
    /// `mu_prime` is the pair generation rate (1/s), `delta_t` the
    /// coincidence window (s). Conditioned on the herald,
    /// `p(1) ~ 1 - mu' dt` and `p(2) ~ mu' dt`.
    HeraldedPairCw { mu_prime: f64, delta_t: f64 },
    /// Pulsed pair source with mean pair number `mu` per pulse:
    /// `p(1) ~ mu`, `p(2) ~ 3/4 mu^2`, remainder in vacuum. The quadratic
    /// expansion is only meaningful for small `mu`; construction rejects
    /// `mu > 0.2`.
    HeraldedPairPulsed { mu: f64 },
}

impl PhotonStatistics {
    pub fn poissonian(mu: f64) -> Result<Self> {
        if !(mu >= 0.0) {
            return Err(Error::OutOfRange {
                name: "mu",
                value: mu,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        Ok(PhotonStatistics::Poissonian { mu })
    }

    pub fn heralded_pair_cw(mu_prime: f64, delta_t: f64) -> Result<Self> {
        if !(mu_prime >= 0.0) || !(delta_t >= 0.0) {
            return Err(Error::OutOfRange {
                name: "mu_prime/delta_t",
                value: mu_prime.min(delta_t),
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        if mu_prime * delta_t >= 1.0 {
            return Err(Error::Regime(format!(
                "heralded cw source needs mu' * dt < 1, got {}",
                mu_prime * delta_t
            )));
        }
        Ok(PhotonStatistics::HeraldedPairCw { mu_prime, delta_t })
    }

    pub fn heralded_pair_pulsed(mu: f64) -> Result<Self> {
        if !(mu >= 0.0) {
            return Err(Error::OutOfRange {
                name: "mu",
                value: mu,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        if mu > 0.2 {
            return Err(Error::Regime(format!(
                "pulsed pair statistics p(2) ~ 3/4 mu^2 hold only for small mu, got {mu}"
            )));
        }
        Ok(PhotonStatistics::HeraldedPairPulsed { mu })
    }

    /// Probability of exactly one photon (pair) per signal.
    pub fn p_single(&self) -> f64 {
        match *self {
            PhotonStatistics::SinglePhoton => 1.0,
            PhotonStatistics::Poissonian { mu } => poisson_p(1, mu).unwrap().value(),
            PhotonStatistics::HeraldedPairCw { mu_prime, delta_t } => 1.0 - mu_prime * delta_t,
            PhotonStatistics::HeraldedPairPulsed { mu } => mu,
        }
    }

    /// Probability of two or more photons (pairs) per signal.
    pub fn p_multi(&self) -> f64 {
        match *self {
            PhotonStatistics::SinglePhoton => 0.0,
            PhotonStatistics::Poissonian { mu } => poisson_tail_ge(2, mu).unwrap().value(),
            PhotonStatistics::HeraldedPairCw { mu_prime, delta_t } => mu_prime * delta_t,
            PhotonStatistics::HeraldedPairPulsed { mu } => 0.75 * mu * mu,
        }
    }

    /// Vacuum probability.
    pub fn p_vac(&self) -> f64 {
        match *self {
            PhotonStatistics::SinglePhoton => 0.0,
            PhotonStatistics::Poissonian { mu } => poisson_p(0, mu).unwrap().value(),
            // A herald guarantees at least one photon towards Bob.
            PhotonStatistics::HeraldedPairCw { .. } => 0.0,
            // The paper fixes only p(1) and p(2); the remainder is
            // normalized into vacuum.
            PhotonStatistics::HeraldedPairPulsed { mu } => 1.0 - mu - 0.75 * mu * mu,
        }
    }

    /// `p_A(n)` for use in photon-number series. Exact for Poissonian
    /// sources; pair sources use their truncated expansions (all mass on
    /// n <= 2).
    pub fn prob_n(&self, n: u32) -> f64 {
        match *self {
            PhotonStatistics::SinglePhoton => {
                if n == 1 {
                    1.0
                } else {
                    0.0
                }
            }
            PhotonStatistics::Poissonian { mu } => poisson_p(n, mu).unwrap().value(),
            _ => match n {
                0 => self.p_vac(),
                1 => self.p_single(),
                2 => self.p_multi(),
                _ => 0.0,
            },
        }
    }
}

/// Hardware limits that cap the usable repetition rate.
///
/// A dead time (or duty-cycle period) of 0 encodes "no constraint"; the
/// min() selecting the rate needs an absorbing identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepetitionLimits {
    /// Maximal repetition rate of the source itself (Hz).
    pub nu_max: f64,
    /// Dead time of Bob's detectors (s).
    pub tau_d: f64,
    /// Dead time of Alice's detectors (s), cw pair sources only.
    pub tau_d_alice: f64,
    /// Duty-cycle period (s); 0 means none.
    pub t_dc: f64,
    /// Efficiency of Alice's detectors (cw trigger).
    pub eta_alice: f64,
    /// Transmittance of Alice's part of the apparatus (cw trigger).
    pub t_alice: f64,
}

fn inv_or_inf(x: f64) -> f64 {
    if x > 0.0 {
        1.0 / x
    } else {
        f64::INFINITY
    }
}

/// Usable repetition rate of a pulsed source (Hz):
/// `min(nu_max, 1/(tau_d mu t t_B eta), 1/T_dc)`.
///
/// The dead-time term caps the rate so that at most one photon arrives per
/// dead-time window; it disappears when the detection probability
/// `mu t t_B eta` vanishes.
pub fn pulsed_repetition_rate(
    lim: &RepetitionLimits,
    mu: f64,
    t: f64,
    t_bob: f64,
    eta: f64,
) -> f64 {
    let p_detect = mu * t * t_bob * eta;
    let dead = inv_or_inf(lim.tau_d * p_detect);
    let duty = inv_or_inf(lim.t_dc);
    lim.nu_max.min(dead).min(duty)
}

/// Usable repetition rate of a cw-pumped heralded source (Hz):
/// `min(eta_A t_A mu', 1/tau_d^A, 1/(tau_d t t_B eta), 1/dt)`.
///
/// The first term is the trigger rate at which Alice announces pair
/// creations.
pub fn cw_repetition_rate(
    lim: &RepetitionLimits,
    mu_prime: f64,
    t: f64,
    t_bob: f64,
    eta: f64,
    delta_t: f64,
) -> f64 {
    let trigger = lim.eta_alice * lim.t_alice * mu_prime;
    let dead_a = inv_or_inf(lim.tau_d_alice);
    let dead_b = inv_or_inf(lim.tau_d * t * t_bob * eta);
    let window = inv_or_inf(delta_t);
    trigger.min(dead_a).min(dead_b).min(window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn single_photon_statistics() {
        let s = PhotonStatistics::SinglePhoton;
        assert_eq!(s.p_single(), 1.0);
        assert_eq!(s.p_multi(), 0.0);
        assert_eq!(s.p_vac(), 0.0);
    }

    #[test]
    fn poissonian_statistics() {
        let s = PhotonStatistics::poissonian(0.1).unwrap();
        assert_relative_eq!(s.p_multi(), 0.00467884016044, max_relative = 1e-12);
        assert_relative_eq!(
            s.p_vac() + s.p_single() + s.p_multi(),
            1.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn pulsed_pair_statistics() {
        let s = PhotonStatistics::heralded_pair_pulsed(0.05).unwrap();
        assert_relative_eq!(s.p_multi(), 0.001875, max_relative = 1e-15);
        assert_relative_eq!(
            s.p_vac() + s.p_single() + s.p_multi(),
            1.0,
            max_relative = 1e-15
        );
        assert!(PhotonStatistics::heralded_pair_pulsed(0.25).is_err());
    }

    #[test]
    fn cw_pair_regime_check() {
        assert!(PhotonStatistics::heralded_pair_cw(1e6, 1e-9).is_ok());
        assert!(PhotonStatistics::heralded_pair_cw(1e10, 1e-9).is_err());
    }

    #[test]
    fn pulsed_rate_reference_points() {
        let mut lim = RepetitionLimits {
            nu_max: 1e7,
            tau_d: 0.0,
            tau_d_alice: 0.0,
            t_dc: 0.0,
            eta_alice: 1.0,
            t_alice: 1.0,
        };
        // Unconstrained beyond the source itself.
        assert_eq!(pulsed_repetition_rate(&lim, 0.1, 0.1, 1.0, 0.1), 1e7);

        lim.nu_max = 1e9;
        lim.tau_d = 1e-6;
        // mu t t_B eta = 1e-2 -> dead-time cap at 1e8 Hz.
        assert_relative_eq!(
            pulsed_repetition_rate(&lim, 0.1, 1.0, 1.0, 0.1),
            1e8,
            max_relative = 1e-12
        );
        lim.t_dc = 1e-7;
        assert_relative_eq!(
            pulsed_repetition_rate(&lim, 0.1, 1.0, 1.0, 0.1),
            1e7,
            max_relative = 1e-12
        );
    }

    #[test]
    fn cw_rate_reference_points() {
        let lim = RepetitionLimits {
            nu_max: f64::INFINITY,
            tau_d: 0.0,
            tau_d_alice: 0.0,
            t_dc: 0.0,
            eta_alice: 1.0,
            t_alice: 1.0,
        };
        // Trigger-limited.
        assert_eq!(cw_repetition_rate(&lim, 1e6, 1.0, 1.0, 1.0, 0.0), 1e6);
        // A 1/dt cap of 1e9 does not bind below the 1e6 trigger.
        assert_eq!(cw_repetition_rate(&lim, 1e6, 1.0, 1.0, 1.0, 1e-9), 1e6);

        let lim = RepetitionLimits {
            tau_d: 1e-6,
            ..lim
        };
        // Dead-time term 1/(tau_d t t_B eta) = 2e6 beats the 1e7 trigger.
        assert_relative_eq!(
            cw_repetition_rate(&lim, 1e7, 0.5, 1.0, 1.0, 0.0),
            2e6,
            max_relative = 1e-12
        );
    }

    proptest! {
        #[test]
        fn poissonian_partition(mu in 0.0..5.0f64) {
            let s = PhotonStatistics::poissonian(mu).unwrap();
            prop_assert!((s.p_vac() + s.p_single() + s.p_multi() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn pulsed_rate_monotone_in_constraints(
            tau_d in 1e-9..1e-3f64,
            mu in 0.01..1.0f64,
            t in 0.001..1.0f64,
            scale in 1.0..10.0f64,
        ) {
            let lim = RepetitionLimits {
                nu_max: 1e10, tau_d, tau_d_alice: 0.0, t_dc: 0.0,
                eta_alice: 1.0, t_alice: 1.0,
            };
            let base = pulsed_repetition_rate(&lim, mu, t, 1.0, 0.1);
            let tighter = RepetitionLimits { tau_d: tau_d * scale, ..lim };
            prop_assert!(pulsed_repetition_rate(&tighter, mu, t, 1.0, 0.1) <= base);
            prop_assert!(pulsed_repetition_rate(&lim, mu * scale, t, 1.0, 0.1) <= base);
            prop_assert!(pulsed_repetition_rate(&lim, mu, (t * scale).min(1.0), 1.0, 0.1) <= base);
        }

        #[test]
        fn cw_rate_is_exact_min(
            trig in 1e3..1e9f64,
            tda in 1e-9..1e-3f64,
            tdb in 1e-9..1e-3f64,
            dt in 1e-10..1e-6f64,
        ) {
            let lim = RepetitionLimits {
                nu_max: f64::INFINITY, tau_d: tdb, tau_d_alice: tda, t_dc: 0.0,
                eta_alice: 1.0, t_alice: 1.0,
            };
            let r = cw_repetition_rate(&lim, trig, 1.0, 1.0, 1.0, dt);
            let expect = trig.min(1.0 / tda).min(1.0 / tdb).min(1.0 / dt);
            prop_assert_eq!(r, expect);
        }
    }
}
