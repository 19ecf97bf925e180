//! Expected detection and error rates of the a-priori comparison channel:
//! depolarization with visibility `V`, losses, and detector dark counts.
//!
//! These are the rates one would measure in the absence of an eavesdropper;
//! the security formulas in [`crate::dv`] treat them as the observed
//! parameters.

use crate::sources::PhotonStatistics;
use crate::{Error, Result};

/// Channel transmittance and device parameters of a DV link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    /// Channel transmittance `t`.
    pub t: f64,
    /// Transmittance of Bob's internal optics `t_B`.
    pub t_bob: f64,
    /// Detector efficiency `eta`.
    pub eta: f64,
    /// Dark-count probability per gate `p_d`.
    pub p_dark: f64,
    /// Interference visibility `V`; the channel error is `(1-V)/2`.
    pub visibility: f64,
    /// Effective pulse rate (Hz) after the sifting convention is folded in.
    pub nu_eff: f64,
}

impl LinkParams {
    pub fn new(
        t: f64,
        t_bob: f64,
        eta: f64,
        p_dark: f64,
        visibility: f64,
        nu_eff: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("t", t),
            ("t_bob", t_bob),
            ("eta", eta),
            ("p_dark", p_dark),
            ("visibility", visibility),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    min: 0.0,
                    max: 1.0,
                });
            }
        }
        if !(nu_eff > 0.0) {
            return Err(Error::OutOfRange {
                name: "nu_eff",
                value: nu_eff,
                min: f64::MIN_POSITIVE,
                max: f64::INFINITY,
            });
        }
        Ok(LinkParams {
            t,
            t_bob,
            eta,
            p_dark,
            visibility,
            nu_eff,
        })
    }

    /// Overall photon transmission `t * t_B * eta`.
    pub fn tau(&self) -> f64 {
        self.t * self.t_bob * self.eta
    }
}

/// Expected detection statistics of a link, per effective pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedStats {
    /// Detection rate `R = nu_eff (P + P_d)` (Hz).
    pub rate: f64,
    /// Total QBER.
    pub qber: f64,
    /// Vacuum yield estimate `Y_0 = nu_eff 2 p_d p_A(0) / R`.
    pub y0: f64,
    /// Single-photon yield estimate `Y_1 = nu_eff p_A(1) t t_B eta / R`.
    pub y1: f64,
    /// Single-photon error estimate; the dark counts are housed in `Y_0`,
    /// so the channel error is attributed to the single-photon pulses.
    pub eps1: f64,
    /// Signal detection probability per pulse, `P`.
    pub p_sig: f64,
    /// Dark detection probability per pulse, `P_d`.
    pub p_dark: f64,
    /// Multi-photon probability `p_A(n >= 2)` of the source feeding this
    /// link; carried along for the yield bounds.
    pub p_multi: f64,
    /// Effective pulse rate the stats were computed at (Hz).
    pub nu_eff: f64,
}

/// Summand cutoff of the photon-number series relative to the accumulator.
const SERIES_TOL: f64 = 1e-18;

/// Sums `sum_n p_A(n) f(n)` adaptively; Poisson tails decay factorially, so
/// the sum is truncated once a term falls below `SERIES_TOL` of the
/// accumulator (past the distribution mode).
fn photon_series(ps: &PhotonStatistics, f: impl Fn(u32) -> f64) -> f64 {
    let mode = match *ps {
        PhotonStatistics::Poissonian { mu } => mu.ceil() as u32 + 1,
        _ => 3,
    };
    let mut acc = 0.0;
    for n in 0..10_000 {
        let term = ps.prob_n(n) * f(n);
        acc += term;
        if n > mode && term.abs() < SERIES_TOL * acc.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    acc
}

fn detection_probs(ps: &PhotonStatistics, lp: &LinkParams) -> (f64, f64) {
    let tau = lp.tau();
    // log1p/exp_m1 keep 1 - (1-tau)^n accurate for small tau. At tau = 1
    // log_miss is -inf and the n = 0 terms must bypass the 0 * inf NaN.
    let log_miss = (-tau).ln_1p();
    let p_sig = photon_series(ps, |n| {
        if n == 0 {
            0.0
        } else {
            -(n as f64 * log_miss).exp_m1()
        }
    });
    let survive = photon_series(ps, |n| {
        if n == 0 {
            1.0
        } else {
            (n as f64 * log_miss).exp()
        }
    });
    let p_dark = 2.0 * lp.p_dark * survive;
    (p_sig, p_dark)
}

fn stats_from(
    ps: &PhotonStatistics,
    lp: &LinkParams,
    eps_channel: f64,
    p_sig: f64,
    p_dark: f64,
) -> ExpectedStats {
    let total = p_sig + p_dark;
    let qber = if total > 0.0 {
        (eps_channel * p_sig + p_dark / 2.0) / total
    } else {
        // No detections at all: dark counts alone would give 1/2.
        0.5
    };
    let y0 = if total > 0.0 {
        2.0 * lp.p_dark * ps.prob_n(0) / total
    } else {
        0.0
    };
    let y1 = if total > 0.0 {
        ps.prob_n(1) * lp.tau() / total
    } else {
        0.0
    };
    ExpectedStats {
        rate: lp.nu_eff * total,
        qber,
        y0,
        y1,
        eps1: qber,
        p_sig,
        p_dark,
        p_multi: ps.p_multi(),
        nu_eff: lp.nu_eff,
    }
}

/// Expected statistics of a prepare-and-measure DV link:
/// `P = sum_{n>=1} p_A(n) [1 - (1 - t t_B eta)^n]`,
/// `P_d = 2 p_d sum_n p_A(n) (1 - t t_B eta)^n`, `R = nu_eff (P + P_d)` and
/// `Q = [eps P + P_d / 2] / (P + P_d)` with `eps = (1 - V)/2`.
pub fn expected_dv_stats(ps: &PhotonStatistics, lp: &LinkParams) -> ExpectedStats {
    let (p_sig, p_dark) = detection_probs(ps, lp);
    let eps = (1.0 - lp.visibility) / 2.0;
    stats_from(ps, lp, eps, p_sig, p_dark)
}

/// Expected statistics of an entanglement-based link with a cw-pumped pair
/// source: the double-pair events add an intrinsic error
/// `eps' ~ mu' dt / 2` on top of the channel error.
pub fn expected_eb_stats(
    ps: &PhotonStatistics,
    lp: &LinkParams,
    mu_prime: f64,
    delta_t: f64,
) -> Result<ExpectedStats> {
    if !(mu_prime * delta_t < 1.0) || mu_prime < 0.0 || delta_t < 0.0 {
        return Err(Error::Regime(format!(
            "eb statistics need 0 <= mu' dt < 1, got {}",
            mu_prime * delta_t
        )));
    }
    let (p_sig, p_dark) = detection_probs(ps, lp);
    let eps = (1.0 - lp.visibility) / 2.0;
    let eps_pair = mu_prime * delta_t / 2.0;
    // Total optical error; an error probability cannot exceed 1/2.
    let eps_total = (eps + eps_pair).min(0.5);
    Ok(stats_from(ps, lp, eps_total, p_sig, p_dark))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn link(t: f64, p_dark: f64, visibility: f64) -> LinkParams {
        LinkParams::new(t, 1.0, 0.1, p_dark, visibility, 1.0).unwrap()
    }

    #[test]
    fn single_photon_ideal_link() {
        let lp = link(0.2, 0.0, 1.0);
        let s = expected_dv_stats(&PhotonStatistics::SinglePhoton, &lp);
        assert_eq!(s.qber, 0.0);
        assert_relative_eq!(s.rate, lp.nu_eff * lp.tau(), max_relative = 1e-14);
    }

    #[test]
    fn dark_counts_dominate_at_zero_transmittance() {
        let lp = link(0.0, 1e-5, 1.0);
        let s = expected_dv_stats(&PhotonStatistics::SinglePhoton, &lp);
        assert_relative_eq!(s.qber, 0.5, max_relative = 1e-12);
        assert_relative_eq!(s.rate / lp.nu_eff, 2.0 * lp.p_dark, max_relative = 1e-12);
    }

    #[test]
    fn poissonian_matches_generating_function_oracle() {
        // For a Poissonian source the photon-number series have the closed
        // forms P = 1 - e^{-mu tau} and P_d = 2 p_d e^{-mu tau}; the
        // adaptive summation must agree.
        let lp = link(0.1, 1e-5, 0.99);
        let ps = PhotonStatistics::poissonian(0.1).unwrap();
        let s = expected_dv_stats(&ps, &lp);
        let survive = (-0.1 * lp.tau()).exp();
        assert_relative_eq!(s.p_sig, 1.0 - survive, max_relative = 1e-10);
        assert_relative_eq!(s.p_dark, 2e-5 * survive, max_relative = 1e-10);
        // Frozen values of the full bundle at set #1-like parameters.
        assert_relative_eq!(s.rate, 0.00101948017662168, max_relative = 1e-10);
        assert_relative_eq!(s.qber, 0.0147011253138084, max_relative = 1e-10);
        assert_relative_eq!(s.y0, 0.0177509565911205, max_relative = 1e-10);
        assert_relative_eq!(s.y1, 0.887547829556023, max_relative = 1e-10);
        assert_eq!(s.eps1, s.qber);
        assert!(s.y0 + s.y1 <= 1.0);
    }

    #[test]
    fn brute_force_series_oracle() {
        // Fixed-cutoff sum over n <= 60 with explicitly written factorial
        // weights, independent of the adaptive path.
        let lp = link(0.37, 3e-4, 0.93);
        let mu = 1.7;
        let ps = PhotonStatistics::poissonian(mu).unwrap();
        let s = expected_dv_stats(&ps, &lp);
        let tau = lp.tau();
        let mut p = 0.0;
        let mut survive = 0.0;
        let mut weight = (-mu).exp();
        for n in 0..=60u32 {
            if n > 0 {
                weight *= mu / n as f64;
            }
            p += weight * (1.0 - (1.0 - tau).powi(n as i32));
            survive += weight * (1.0 - tau).powi(n as i32);
        }
        assert_relative_eq!(s.p_sig, p, max_relative = 1e-10);
        assert_relative_eq!(s.p_dark, 2.0 * lp.p_dark * survive, max_relative = 1e-10);
        let q = ((1.0 - lp.visibility) / 2.0 * p + lp.p_dark * survive)
            / (p + 2.0 * lp.p_dark * survive);
        assert_relative_eq!(s.qber, q, max_relative = 1e-10);
    }

    #[test]
    fn eb_reduces_to_dv_without_pairs() {
        let lp = link(0.3, 1e-5, 0.96);
        let ps = PhotonStatistics::SinglePhoton;
        let eb = expected_eb_stats(&ps, &lp, 0.0, 1e-9).unwrap();
        let dv = expected_dv_stats(&ps, &lp);
        assert_eq!(eb, dv);
    }

    #[test]
    fn eb_double_pair_error() {
        // mu' dt / 2 with mu' = 1e6/s and dt = 1ns gives 5e-4, added on top
        // of the visibility error.
        let lp = LinkParams::new(1.0, 1.0, 1.0, 0.0, 0.96, 1.0).unwrap();
        let ps = PhotonStatistics::heralded_pair_cw(1e6, 1e-9).unwrap();
        let s = expected_eb_stats(&ps, &lp, 1e6, 1e-9).unwrap();
        assert_relative_eq!(s.qber, 0.02 + 5e-4, max_relative = 1e-10);
        assert!(expected_eb_stats(&ps, &lp, 2e9, 1e-9).is_err());
    }

    #[test]
    fn qber_grows_as_transmittance_drops() {
        let ps = PhotonStatistics::poissonian(0.5).unwrap();
        let mut last = 0.0;
        for i in 0..40 {
            let t = 10f64.powf(-(i as f64) / 8.0);
            let s = expected_dv_stats(&ps, &link(t, 1e-5, 0.99));
            assert!(
                s.qber >= last - 1e-12,
                "Q not monotone at t={t}: {} < {last}",
                s.qber
            );
            last = s.qber;
        }
    }

    #[test]
    fn no_darks_yields_pure_channel_error() {
        for ps in [
            PhotonStatistics::SinglePhoton,
            PhotonStatistics::poissonian(0.8).unwrap(),
            PhotonStatistics::heralded_pair_pulsed(0.1).unwrap(),
        ] {
            let s = expected_dv_stats(&ps, &link(0.05, 0.0, 0.9));
            assert_relative_eq!(s.qber, 0.05, max_relative = 1e-12);
        }
    }
}
