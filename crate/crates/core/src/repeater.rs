//! Elementary quantum-repeater rate model (direct link vs two-link
//! repeater with multimode memories) and the cost model of a linear
//! trusted-relay network.

use crate::math::{fiber_transmittance, h_bits};
use crate::{Error, Result};
use rand::Rng;

/// Standard group velocity of light in fiber (km/s); the classical
/// acknowledgment traveling back to the central station moves at this
/// speed.
pub const FIBER_SIGNAL_SPEED_KM_S: f64 = 2.0e5;

/// Parameters of the repeater model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepeaterParams {
    /// Source repetition rate (Hz).
    pub nu_s: f64,
    /// End-detector efficiency.
    pub eta: f64,
    /// Bell-measurement detector efficiency.
    pub eta_m: f64,
    /// Memory in-out probability (absorb then re-emit on demand).
    pub p_m: f64,
    /// Number of modes the multimode memory stores.
    pub n_modes: u32,
    /// Memory lifetime (s), acting as a sharp cutoff.
    pub t_m: f64,
    /// Bell-measurement fidelity; depolarized noise model.
    pub fidelity: f64,
    /// Fiber attenuation (dB/km).
    pub alpha_db_per_km: f64,
    /// Total Alice-Bob distance (km).
    pub length_km: f64,
    /// Signal speed in fiber (km/s).
    pub c_fiber_km_s: f64,
}

impl RepeaterParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        nu_s: f64,
        eta: f64,
        eta_m: f64,
        p_m: f64,
        n_modes: u32,
        t_m: f64,
        fidelity: f64,
        alpha_db_per_km: f64,
        length_km: f64,
    ) -> Result<Self> {
        for (name, v) in [("eta", eta), ("eta_m", eta_m), ("p_m", p_m)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    min: 0.0,
                    max: 1.0,
                });
            }
        }
        if !(0.25..=1.0).contains(&fidelity) {
            return Err(Error::OutOfRange {
                name: "fidelity",
                value: fidelity,
                min: 0.25,
                max: 1.0,
            });
        }
        if n_modes < 1 {
            return Err(Error::OutOfRange {
                name: "n_modes",
                value: 0.0,
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        if !(t_m > 0.0) || !(nu_s > 0.0) || !(length_km >= 0.0) || !(alpha_db_per_km >= 0.0) {
            return Err(Error::Regime(
                "nu_s, t_m must be positive; lengths non-negative".into(),
            ));
        }
        Ok(RepeaterParams {
            nu_s,
            eta,
            eta_m,
            p_m,
            n_modes,
            t_m,
            fidelity,
            alpha_db_per_km,
            length_km,
            c_fiber_km_s: FIBER_SIGNAL_SPEED_KM_S,
        })
    }

    fn transmittance(&self) -> f64 {
        fiber_transmittance(self.alpha_db_per_km, self.length_km)
            .expect("validated at construction")
            .value()
    }
}

/// Direct-link key rate: with a perfect pair source and no dark counts the
/// key rate is the two-sided detection rate `K_1 = nu_S t eta^2`.
pub fn rate_direct(rp: &RepeaterParams) -> f64 {
    rp.nu_s * rp.transmittance() * rp.eta * rp.eta
}

/// Expected number of rounds until both links of the repeater have
/// announced a detection, where each round succeeds per link with
/// probability `x`: `<n> = (1/x) (3 - 2x) / (2 - x)`.
pub fn expected_rounds(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            min: f64::MIN_POSITIVE,
            max: 1.0,
        });
    }
    Ok((3.0 - 2.0 * x) / (x * (2.0 - x)))
}

/// Monte Carlo estimate of [`expected_rounds`]: the empirical mean of
/// `max(G1, G2)` over two independent geometric variables with success
/// probability `x`. Returns `(mean, standard_error)`.
pub fn expected_rounds_mc<R: Rng>(x: f64, trials: u64, rng: &mut R) -> Result<(f64, f64)> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            min: f64::MIN_POSITIVE,
            max: 1.0,
        });
    }
    let geometric = |rng: &mut R| -> u64 {
        let mut n = 1;
        while !rng.gen_bool(x) {
            n += 1;
        }
        n
    };
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let n = geometric(rng).max(geometric(rng)) as f64;
        sum += n;
        sum_sq += n * n;
    }
    let mean = sum / trials as f64;
    let var = (sum_sq / trials as f64 - mean * mean).max(0.0);
    Ok((mean, (var / trials as f64).sqrt()))
}

/// Result of the two-link repeater evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLinkRate {
    /// Per-round success probability of one link,
    /// `x = 1 - (1 - sqrt(t) eta)^N`.
    pub p_link: f64,
    /// Mean time until the Bell measurement (s).
    pub wait_time: f64,
    /// Raw rate `R_2` (Hz); 0 once the wait time exceeds the memory
    /// lifetime.
    pub raw_rate: f64,
    /// Bit error `eps = (2/3)(1 - F)`; one of the wrong Bell states still
    /// gives the correct bit correlations.
    pub eps: f64,
    /// Secret key rate `K_2 = R_2 [1 - 2 h(eps)]`, clamped at 0.
    pub key_rate: f64,
}

/// Two-link repeater: each half-link succeeds per round with probability
/// `x = 1 - (1 - sqrt(t) eta)^N`; a round takes `l / c`; the Bell
/// measurement fires after `<n>` rounds on average and succeeds with
/// probability `1/2 p_M^2 eta_M^2`.
pub fn rate_two_link(rp: &RepeaterParams) -> TwoLinkRate {
    let sqrt_t = rp.transmittance().sqrt();
    let x = 1.0 - (1.0 - sqrt_t * rp.eta).powi(rp.n_modes as i32);
    let eps = 2.0 / 3.0 * (1.0 - rp.fidelity);
    if x <= 0.0 {
        return TwoLinkRate {
            p_link: 0.0,
            wait_time: f64::INFINITY,
            raw_rate: 0.0,
            eps,
            key_rate: 0.0,
        };
    }
    let round_time = rp.length_km / rp.c_fiber_km_s;
    let wait_time = expected_rounds(x).expect("x in (0,1] here") * round_time;
    // The memory lifetime is a sharp cut.
    let raw_rate = if wait_time < rp.t_m {
        0.5 * rp.p_m * rp.p_m * rp.eta_m * rp.eta_m / wait_time
    } else {
        0.0
    };
    let key_rate = raw_rate * (1.0 - 2.0 * h_bits(eps)).max(0.0);
    TwoLinkRate {
        p_link: x,
        wait_time,
        raw_rate,
        eps,
        key_rate,
    }
}

/// Shorthand wait-time estimate `tau ~ (3/2) (l/c) / (N sqrt(t) eta)`,
/// the small-`x` limit of the exact expectation; exposed for figure
/// reproduction.
pub fn wait_time_approx(rp: &RepeaterParams) -> f64 {
    let sqrt_t = rp.transmittance().sqrt();
    1.5 * (rp.length_km / rp.c_fiber_km_s) / (rp.n_modes as f64 * sqrt_t * rp.eta)
}

/// Specification of a linear chain of QKD devices spanning `total_km` at
/// target rate `k_target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkSpec {
    /// End-to-end distance `L` (km).
    pub total_km: f64,
    /// Required end-to-end secret key rate (Hz).
    pub k_target: f64,
    /// Cost of one point-to-point device.
    pub device_cost: f64,
}

/// One evaluated spacing of the network cost curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostPoint {
    /// Device spacing (km).
    pub spacing_km: f64,
    /// Point-to-point key rate at this spacing (Hz).
    pub key_rate: f64,
    /// Total network cost `C_1 (L / l) (K_target / K(l))`; infinite where
    /// the link produces no key.
    pub cost: f64,
}

/// Evaluates the network cost over a spacing grid and locates the optimal
/// spacing, which maximizes `F(l) = l K(l)`. Returns the cost curve and
/// the optimal spacing (None when no spacing yields a key).
pub fn network_cost(
    ns: &NetworkSpec,
    key_rate_of_spacing: impl Fn(f64) -> f64,
    grid: &[f64],
) -> (Vec<CostPoint>, Option<f64>) {
    let mut curve = Vec::with_capacity(grid.len());
    let mut best: Option<(f64, f64)> = None;
    for &l in grid {
        let k = key_rate_of_spacing(l);
        let cost = if k > 0.0 && l > 0.0 {
            ns.device_cost * (ns.total_km / l) * (ns.k_target / k)
        } else {
            f64::INFINITY
        };
        curve.push(CostPoint {
            spacing_km: l,
            key_rate: k,
            cost,
        });
        let figure = l * k;
        if k > 0.0 && best.is_none_or(|(_, f)| figure > f) {
            best = Some((l, figure));
        }
    }
    (curve, best.map(|(l, _)| l))
}

/// Analytic optimal spacing for rates scaling as `K ~ t^k`:
/// `l_opt = 10 / (k alpha ln 10)`.
pub fn optimal_spacing_tk(k: f64, alpha_db_per_km: f64) -> f64 {
    10.0 / (k * alpha_db_per_km * 10f64.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    /// Best-case parameters of the repeater comparison figure, line (a).
    fn line_a(length_km: f64) -> RepeaterParams {
        RepeaterParams::new(1e10, 0.5, 0.9, 0.9, 1000, 10.0, 0.95, 0.2, length_km).unwrap()
    }

    #[test]
    fn direct_link_reference_points() {
        let rp = line_a(0.0);
        assert_relative_eq!(rate_direct(&rp), 1e10 * 0.25, max_relative = 1e-12);

        let rp = line_a(500.0);
        assert_relative_eq!(rate_direct(&rp), 0.25, max_relative = 1e-10);

        // Halving the distance gains exactly the attenuation exponent.
        let ratio = rate_direct(&line_a(250.0)) / rate_direct(&line_a(500.0));
        assert_relative_eq!(ratio, 1e5, max_relative = 1e-9);
    }

    #[test]
    fn expected_rounds_reference_points() {
        assert_eq!(expected_rounds(1.0).unwrap(), 1.0);
        assert_relative_eq!(expected_rounds(0.5).unwrap(), 8.0 / 3.0, max_relative = 1e-15);
        assert!(expected_rounds(0.0).is_err());
    }

    #[test]
    fn expected_rounds_matches_monte_carlo() {
        let mut rng = ChaCha12Rng::seed_from_u64(0xA11CE);
        for &x in &[0.01, 0.1, 0.5] {
            let trials = if x < 0.05 { 200_000 } else { 1_000_000 };
            let (mean, se) = expected_rounds_mc(x, trials, &mut rng).unwrap();
            let exact = expected_rounds(x).unwrap();
            assert!(
                (mean - exact).abs() <= 3.0 * se,
                "x={x}: MC {mean} +- {se} vs exact {exact}"
            );
        }
    }

    #[test]
    fn two_link_reference_points() {
        // Perfect Bell measurement: K2 = R2.
        let mut rp = line_a(300.0);
        rp.fidelity = 1.0;
        let r = rate_two_link(&rp);
        assert!(r.wait_time < rp.t_m);
        assert_eq!(r.key_rate, r.raw_rate);
    }

    #[test]
    fn fidelity_threshold() {
        // K2 > 0 iff F exceeds ~83.5%; bisect the sign change.
        let rp = line_a(100.0);
        let key = |f: f64| {
            let p = RepeaterParams {
                fidelity: f,
                ..rp
            };
            rate_two_link(&p).key_rate
        };
        assert!(key(0.85) > 0.0 && key(0.82) == 0.0);
        let root = crate::optimize::bisect_root(
            |f| if key(f) > 0.0 { 1.0 } else { -1.0 },
            0.8,
            0.9,
            40,
        );
        assert!((root - 0.835).abs() < 1e-3, "threshold at {root}");
    }

    #[test]
    fn repeater_overtakes_direct_link_near_500km() {
        let crossed = |l: f64| rate_two_link(&line_a(l)).key_rate > rate_direct(&line_a(l));
        assert!(!crossed(400.0));
        assert!(crossed(600.0));
        let cross = crate::optimize::bisect_root(
            |l| if crossed(l) { 1.0 } else { -1.0 },
            400.0,
            600.0,
            40,
        );
        assert!((400.0..=600.0).contains(&cross), "crossover at {cross}");
    }

    #[test]
    fn memory_lifetime_sharp_cut() {
        // Find the length where the wait time crosses T_M; the rate is
        // positive just below and exactly zero at and above the cut.
        let mut lo = 500.0;
        let mut hi = 800.0;
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if rate_two_link(&line_a(mid)).wait_time < 10.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(rate_two_link(&line_a(lo)).key_rate > 0.0);
        assert_eq!(rate_two_link(&line_a(hi)).key_rate, 0.0);
    }

    #[test]
    fn two_link_scales_as_sqrt_t() {
        // Vary t through alpha at fixed geometry (N = 1 keeps the link
        // success probability exactly sqrt(t) eta); the log-log slope of
        // R2 vs t must be 1/2 within 2%.
        let rp = |alpha: f64| {
            RepeaterParams::new(1e10, 0.5, 0.9, 0.9, 1, 1e9, 0.95, alpha, 100.0).unwrap()
        };
        let mut pts = Vec::new();
        for i in 0..=10 {
            let target_t = 10f64.powf(-6.0 + 3.0 * i as f64 / 10.0);
            let alpha = -10.0 * target_t.log10() / 100.0;
            let p = rp(alpha);
            let r = rate_two_link(&p);
            pts.push((target_t.ln(), r.raw_rate.ln()));
        }
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!((slope - 0.5).abs() < 0.01, "slope = {slope}");
    }

    #[test]
    fn wait_time_approx_agrees_in_small_x_regime() {
        let rp = line_a(600.0);
        let exact = rate_two_link(&rp).wait_time;
        let approx = wait_time_approx(&rp);
        assert!((exact - approx).abs() / exact < 0.05, "{exact} vs {approx}");
    }

    #[test]
    fn network_cost_reference_points() {
        let ns = NetworkSpec {
            total_km: 500.0,
            k_target: 1000.0,
            device_cost: 1.0,
        };
        let grid: Vec<f64> = (1..=4000).map(|i| i as f64 * 0.025).collect();
        for (k, expect) in [(1.0, 21.7147240952), (2.0, 10.8573620476)] {
            let rate = |l: f64| 10f64.powf(-0.2 * l * k / 10.0);
            let (_, l_opt) = network_cost(&ns, rate, &grid);
            let l_opt = l_opt.unwrap();
            assert!(
                (l_opt - expect).abs() <= 0.025 + 1e-9,
                "k={k}: l_opt={l_opt} expected {expect}"
            );
            assert_relative_eq!(optimal_spacing_tk(k, 0.2), expect, max_relative = 1e-11);
        }
    }

    #[test]
    fn network_cost_scale_invariant_and_infeasible_flagged() {
        let ns = NetworkSpec {
            total_km: 100.0,
            k_target: 1.0,
            device_cost: 1.0,
        };
        let grid: Vec<f64> = (1..=500).map(|i| i as f64 * 0.2).collect();
        let rate = |l: f64| 10f64.powf(-0.02 * l);
        let (_, a) = network_cost(&ns, rate, &grid);
        let (_, b) = network_cost(&ns, |l| 7.3 * rate(l), &grid);
        assert_eq!(a, b);

        let (curve, none) = network_cost(&ns, |_| 0.0, &grid);
        assert!(none.is_none());
        assert!(curve.iter().all(|c| c.cost.is_infinite()));
    }
}
