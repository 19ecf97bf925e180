//! Secret-key rates of the BB84 implementations (lower bounds in the
//! uncalibrated-device scenario, upper bounds for calibrated devices) and
//! the SARG04 error mapping.
//!
//! All formulas follow the structure `K = R [ ... - leak_EC(Q) ]` with the
//! bracket clamped at 0; sweeps must traverse infeasible regions without
//! erroring.

use crate::channel::{expected_dv_stats, ExpectedStats, LinkParams};
use crate::math::h_bits;
use crate::optimize::maximize_log;
use crate::rate::{EcModel, RateResult};
use crate::sources::PhotonStatistics;
use crate::{Error, Result};

/// Search window for source-intensity optimizations.
const MU_RANGE: (f64, f64) = (1e-8, 3.0);
/// Search window for the pair parameter `mu' dt` of EB links.
const PAIR_RANGE: (f64, f64) = (1e-9, 0.5);

/// BB84 with a perfect single-photon source: every pulse carries one
/// photon, so the single-photon yield is 1 and
/// `K = R [1 - h(Q) - leak_EC(Q)]`.
pub fn rate_bb84_single_photon(stats: &ExpectedStats, ec: &EcModel) -> RateResult {
    let q = stats.qber;
    if q > 0.5 {
        return RateResult::infeasible(stats.rate, q);
    }
    let eve = h_bits(q);
    RateResult::from_fraction(stats.rate, q, eve, 1.0 - eve - ec.leak(q))
}

/// BB84 with weak coherent pulses and no decoy states.
///
/// Only `R` and `Q` are measured, so Eve is assumed to attack the
/// multi-photon pulses losslessly; the single-photon yield is bounded by
/// `Y_1 = 1 - (nu_eff / R) p_A(n >= 2)` and carries all the errors,
/// `eps_1 = Q / Y_1`.
pub fn rate_bb84_wcp_nodecoy(ps: &PhotonStatistics, lp: &LinkParams, ec: &EcModel) -> RateResult {
    let stats = expected_dv_stats(ps, lp);
    rate_wcp_nodecoy_from_stats(&stats, ec)
}

fn rate_wcp_nodecoy_from_stats(stats: &ExpectedStats, ec: &EcModel) -> RateResult {
    let q = stats.qber;
    let detected = stats.p_sig + stats.p_dark;
    if detected <= 0.0 {
        return RateResult::infeasible(stats.rate, q);
    }
    let y1 = 1.0 - stats.p_multi / detected;
    if y1 <= 0.0 {
        return RateResult::infeasible(stats.rate, q);
    }
    let eps1 = q / y1;
    if eps1 > 0.5 {
        return RateResult::infeasible(stats.rate, q);
    }
    let eve = 1.0 - y1 * (1.0 - h_bits(eps1));
    let fraction = y1 * (1.0 - h_bits(eps1)) - ec.leak(q);
    RateResult::from_fraction(stats.rate, q, eve, fraction)
}

/// BB84 with weak coherent pulses and decoy states, in the idealization
/// where the decoy estimation determines the yields exactly:
/// `K = R [Y_0 + Y_1 (1 - h(eps_1)) - leak_EC(Q)]`.
pub fn rate_bb84_decoy(ps: &PhotonStatistics, lp: &LinkParams, ec: &EcModel) -> RateResult {
    let stats = expected_dv_stats(ps, lp);
    let q = stats.qber;
    if stats.eps1 > 0.5 {
        return RateResult::infeasible(stats.rate, q);
    }
    let kept = stats.y0 + stats.y1 * (1.0 - h_bits(stats.eps1));
    RateResult::from_fraction(stats.rate, q, 1.0 - kept, kept - ec.leak(q))
}

/// Entanglement-based BB84 with the source on Alice's side.
///
/// `zeta` is the coherent fraction of the multi-pair events; Eve extracts
/// full information from those, so `Y'_m = p_A(n >= 2) (nu_eff / R) zeta`
/// and `K = R [Y'_1 (1 - h(Q / Y'_1)) - leak_EC(Q)]`. For `zeta = 0` this
/// coincides with the uncharacterized-source bound
/// `K = R [1 - h(Q) - leak_EC(Q)]`.
pub fn rate_bb84_eb(stats: &ExpectedStats, zeta: f64, ec: &EcModel) -> Result<RateResult> {
    if !(0.0..=1.0).contains(&zeta) {
        return Err(Error::OutOfRange {
            name: "zeta",
            value: zeta,
            min: 0.0,
            max: 1.0,
        });
    }
    let q = stats.qber;
    let detected = stats.p_sig + stats.p_dark;
    if detected <= 0.0 {
        return Ok(RateResult::infeasible(stats.rate, q));
    }
    let y_multi = stats.p_multi * zeta / detected;
    let y1 = 1.0 - y_multi;
    if y1 <= 0.0 || q / y1 > 0.5 {
        return Ok(RateResult::infeasible(stats.rate, q));
    }
    let eve = y_multi + y1 * h_bits(q / y1);
    let fraction = y1 * (1.0 - h_bits(q / y1)) - ec.leak(q);
    Ok(RateResult::from_fraction(stats.rate, q, eve, fraction))
}

/// Upper bound on the BB84 key rate when the calibration of Bob's devices
/// is taken into account (dark counts and detector losses are not
/// attributed to Eve).
///
/// The photon fraction of the detections depends only on the total rate,
/// `Y = (1 - 2 p_d nu_eff / R) / (1 - 2 p_d)`, and the dark counts
/// contribute `2 delta = 1 - Y` of intrinsically private bits. Without
/// decoy states the single-photon yield keeps the detector factor:
/// `Y_1 = Y - t_B eta (nu_eff / R) p_A(n >= 2)`. Eve is still assumed to
/// forward at most one photon, which is known to be sub-optimal, so this is
/// an upper bound only.
pub fn rate_bb84_upperbound_calibrated(
    ps: &PhotonStatistics,
    lp: &LinkParams,
    ec: &EcModel,
    decoy: bool,
) -> RateResult {
    let stats = expected_dv_stats(ps, lp);
    let q = stats.qber;
    let detected = stats.p_sig + stats.p_dark;
    if detected <= 0.0 {
        return RateResult::infeasible(stats.rate, q);
    }
    let y = (1.0 - 2.0 * lp.p_dark / detected) / (1.0 - 2.0 * lp.p_dark);
    if y <= 0.0 || y > 1.0 {
        return RateResult::infeasible(stats.rate, q);
    }
    let delta = (1.0 - y) / 2.0;
    let y1 = if decoy {
        stats.y1
    } else {
        y - lp.t_bob * lp.eta * stats.p_multi / detected
    };
    if y1 <= 0.0 {
        return RateResult::infeasible(stats.rate, q);
    }
    let eps1 = if decoy {
        // Decoy estimation measures the photonic error; in this channel
        // model all photon contributions share the same error rate.
        (q - delta) / y
    } else {
        (q - delta) / y1
    };
    if !(0.0..=0.5).contains(&eps1) {
        return RateResult::infeasible(stats.rate, q);
    }
    let fraction = y1 * (1.0 - h_bits(eps1)) + 2.0 * delta - ec.leak(q);
    let eve = y - y1 * (1.0 - h_bits(eps1));
    RateResult::from_fraction(stats.rate, q, eve, fraction)
}

/// SARG04 error mapping: a channel perturbation `eps~` appears in the
/// sifted key as `eps = eps~ / (1/2 + eps~)`, roughly twice the BB84 error.
pub fn sarg_error_map(eps_tilde: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&eps_tilde) {
        return Err(Error::OutOfRange {
            name: "eps_tilde",
            value: eps_tilde,
            min: 0.0,
            max: 0.5,
        });
    }
    Ok(eps_tilde / (0.5 + eps_tilde))
}

/// Inverse of [`sarg_error_map`]: `eps~ = eps / (2 (1 - eps))`.
pub fn sarg_error_map_inverse(eps: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            min: 0.0,
            max: 0.5,
        });
    }
    Ok(eps / (2.0 * (1.0 - eps)))
}

/// Analytic estimate of the optimal decoy intensity in the small-`mu`
/// expansion, `mu_opt ~ (1/2) [1 - h(Q) / (1 - h(Q))]`.
///
/// A guideline with the right order of magnitude; the exact optimum of the
/// full rate lies noticeably higher.
pub fn decoy_mu_estimate(q: f64) -> f64 {
    let hq = h_bits(q);
    0.5 * (1.0 - hq / (1.0 - hq))
}

fn optimize_over(
    lo: f64,
    hi: f64,
    eval: impl Fn(f64) -> RateResult,
) -> RateResult {
    let (x, k, _) = maximize_log(|m| eval(m).key_rate, lo, hi, 80);
    if k <= 0.0 {
        let mut r = eval(x);
        r.feasible = false;
        r.key_rate = 0.0;
        r.secret_fraction = 0.0;
        return r;
    }
    eval(x).with_mu(x)
}

/// Optimizes the no-decoy WCP rate over the laser intensity.
pub fn optimize_wcp_nodecoy(lp: &LinkParams, ec: &EcModel) -> RateResult {
    optimize_over(MU_RANGE.0, MU_RANGE.1, |mu| {
        rate_bb84_wcp_nodecoy(&PhotonStatistics::Poissonian { mu }, lp, ec)
    })
}

/// Optimizes the decoy-state WCP rate over the laser intensity.
pub fn optimize_decoy(lp: &LinkParams, ec: &EcModel) -> RateResult {
    optimize_over(MU_RANGE.0, MU_RANGE.1, |mu| {
        rate_bb84_decoy(&PhotonStatistics::Poissonian { mu }, lp, ec)
    })
}

/// Optimizes the EB rate over the pair parameter `mu' dt` of a cw-pumped
/// source (only the product enters the statistics).
pub fn optimize_eb(lp: &LinkParams, zeta: f64, ec: &EcModel) -> RateResult {
    optimize_over(PAIR_RANGE.0, PAIR_RANGE.1, |m2| {
        let ps = PhotonStatistics::HeraldedPairCw {
            mu_prime: m2,
            delta_t: 1.0,
        };
        match crate::channel::expected_eb_stats(&ps, lp, m2, 1.0) {
            Ok(stats) => rate_bb84_eb(&stats, zeta, ec).unwrap(),
            Err(_) => RateResult::infeasible(0.0, 0.5),
        }
    })
}

/// Optimizes the calibrated-device upper bound over the laser intensity.
pub fn optimize_upperbound_calibrated(lp: &LinkParams, ec: &EcModel, decoy: bool) -> RateResult {
    optimize_over(MU_RANGE.0, MU_RANGE.1, |mu| {
        rate_bb84_upperbound_calibrated(&PhotonStatistics::Poissonian { mu }, lp, ec, decoy)
    })
}
