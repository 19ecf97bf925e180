//! Distributed-phase-reference protocols: DPS and COW under the collective
//! beam-splitting attack, and COW under the stronger two-pulse attack
//! family used for the cross-platform comparison.
//!
//! Only upper bounds exist for these protocols; all three follow the
//! uncalibrated-device convention with the forwarded fraction
//! `tau = t t_B eta`.

use crate::channel::LinkParams;
use crate::math::h_bits;
use crate::optimize::maximize_log;
use crate::rate::{EcModel, RateResult};
use crate::{Error, Result};

/// Parameters of a DPS/COW link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DprParams {
    /// Mean photon number per pulse.
    pub mu: f64,
    /// Fraction forwarded to Bob, `tau = t t_B eta`.
    pub tau: f64,
    /// Interferometer visibility `V`.
    pub visibility: f64,
    /// Bit error rate of the key line; for COW this is not tied to the
    /// visibility and must be chosen independently.
    pub eps: f64,
    /// Fraction of decoy sequences (COW); they do not contribute to the
    /// raw key.
    pub f_decoy: f64,
    /// Source pulse rate (Hz).
    pub nu_s: f64,
    /// Dark-count probability per gate.
    pub p_dark: f64,
}

impl DprParams {
    pub fn new(
        mu: f64,
        tau: f64,
        visibility: f64,
        eps: f64,
        f_decoy: f64,
        nu_s: f64,
        p_dark: f64,
    ) -> Result<Self> {
        if !(mu >= 0.0) {
            return Err(Error::OutOfRange {
                name: "mu",
                value: mu,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        for (name, value, max) in [
            ("tau", tau, 1.0),
            ("visibility", visibility, 1.0),
            ("eps", eps, 0.5),
            ("p_dark", p_dark, 1.0),
        ] {
            if !(0.0..=max).contains(&value) {
                return Err(Error::OutOfRange {
                    name,
                    value,
                    min: 0.0,
                    max,
                });
            }
        }
        if !(0.0..1.0).contains(&f_decoy) {
            return Err(Error::OutOfRange {
                name: "f_decoy",
                value: f_decoy,
                min: 0.0,
                max: 1.0,
            });
        }
        if !(nu_s > 0.0) {
            return Err(Error::OutOfRange {
                name: "nu_s",
                value: nu_s,
                min: f64::MIN_POSITIVE,
                max: f64::INFINITY,
            });
        }
        Ok(DprParams {
            mu,
            tau,
            visibility,
            eps,
            f_decoy,
            nu_s,
            p_dark,
        })
    }

    /// Effective pulse rate for COW, `nu_S (1 - f)/2`: the decoy sequences
    /// are discarded and half of the remaining pulses are empty.
    pub fn nu_eff_cow(&self) -> f64 {
        self.nu_s * (1.0 - self.f_decoy) / 2.0
    }
}

/// Overlap of Eve's beam-splitter ancilla states,
/// `gamma = e^{-mu (1 - tau)}`: Eve keeps the complement of the fraction
/// forwarded to Bob.
pub fn bs_overlap_gamma(mu: f64, tau: f64) -> f64 {
    (-mu * (1.0 - tau)).exp()
}

/// DPS under the collective beam-splitting attack:
/// `I_E = 2 h[(1 - gamma^2)/2] - h[(1 - gamma^4)/2]` and
/// `K = nu_S (1 - e^{-mu tau}) [1 - I_E]`.
pub fn rate_dps_bs(p: &DprParams) -> RateResult {
    let gamma = bs_overlap_gamma(p.mu, p.tau);
    let eve = 2.0 * h_bits((1.0 - gamma * gamma) / 2.0)
        - h_bits((1.0 - gamma.powi(4)) / 2.0);
    let rate = p.nu_s * (-(-p.mu * p.tau).exp_m1());
    RateResult::from_fraction(rate, 0.0, eve, 1.0 - eve)
}

/// COW under the collective beam-splitting attack:
/// `I_E = h[(1 - gamma)/2]` and
/// `K = nu_S (1 - f)/2 (1 - e^{-mu tau}) [1 - I_E]`.
pub fn rate_cow_bs(p: &DprParams) -> RateResult {
    let gamma = bs_overlap_gamma(p.mu, p.tau);
    let eve = h_bits((1.0 - gamma) / 2.0);
    let rate = p.nu_eff_cow() * (-(-p.mu * p.tau).exp_m1());
    RateResult::from_fraction(rate, 0.0, eve, 1.0 - eve)
}

/// COW under the two-pulse coherent attack family, the estimate used for
/// distributed-phase-reference platforms in the comparison plots.
///
/// The attack is derived in the `mu t << 1` regime; results with
/// `mu t > 0.1` are flagged infeasible (out of validity) rather than
/// rejected. With `xi = 2 sqrt(V (1 - V))`: if `e^{-mu} <= xi` no security
/// is possible (`I_E = 1`); otherwise
/// `I_E = Q + (1 - Q) h[(1 + F_V)/2]` with
/// `F_V = (2V - 1) e^{-mu} - xi sqrt(1 - e^{-2 mu})`.
///
/// `R = nu_eff [mu t t_B eta + 2 p_d]` and the observed bit error mixes the
/// optical error with the dark counts exactly as for P&M BB84:
/// `Q = (eps mu t t_B eta + p_d) / (mu t t_B eta + 2 p_d)`; for `p_d = 0`
/// this reduces to `Q = eps`.
pub fn rate_cow_twopulse(p: &DprParams, lp: &LinkParams, ec: &EcModel) -> RateResult {
    let p_sig = p.mu * lp.tau();
    let p_dark = 2.0 * lp.p_dark;
    let detected = p_sig + p_dark;
    let nu_eff = p.nu_s * (1.0 - p.f_decoy) / 2.0;
    let rate = nu_eff * detected;
    if detected <= 0.0 {
        return RateResult::infeasible(rate, 0.5);
    }
    let q = (p.eps * p_sig + lp.p_dark) / detected;

    let xi = 2.0 * (p.visibility * (1.0 - p.visibility)).sqrt();
    let em = (-p.mu).exp();
    let eve = if em <= xi {
        1.0
    } else {
        let f_v = (2.0 * p.visibility - 1.0) * em - xi * (-(-2.0 * p.mu).exp_m1()).sqrt();
        q + (1.0 - q) * h_bits((1.0 + f_v) / 2.0)
    };
    let mut result =
        RateResult::from_fraction(rate, q, eve, 1.0 - eve - ec.leak(q)).with_mu(p.mu);
    // Outside the not-too-short-distance regime of the attack bound. The
    // slack absorbs one ulp of rounding when mu sits exactly on the
    // 0.1 / t cap.
    if p.mu * lp.t > 0.1 + 1e-12 {
        result.feasible = false;
    }
    result
}

/// Optimizes the two-pulse COW rate over the intensity, restricted to the
/// validity domain `mu t <= 0.1` so the bound stays applicable across the
/// whole sweep.
pub fn optimize_cow_twopulse(
    template: &DprParams,
    lp: &LinkParams,
    ec: &EcModel,
) -> RateResult {
    let hi = (0.1 / lp.t.max(1e-300)).min(2.0);
    let eval = |mu: f64| {
        let p = DprParams { mu, ..*template };
        rate_cow_twopulse(&p, lp, ec)
    };
    let (mu, k, _) = maximize_log(|m| eval(m).key_rate, 1e-8, hi, 80);
    if k <= 0.0 {
        let mut r = eval(mu);
        r.feasible = false;
        r.key_rate = 0.0;
        r.secret_fraction = 0.0;
        return r;
    }
    eval(mu)
}
