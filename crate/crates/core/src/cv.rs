//! Continuous-variable QKD: the coherent-state homodyne protocol with
//! Gaussian modulation, bounded against individual attacks (Heisenberg
//! uncertainty) and collective attacks (Holevo quantity of the purifying
//! eavesdropper).
//!
//! Works in the uncalibrated-device scenario: detector efficiency and
//! electronic noise are folded into the channel noise, so every quantity
//! depends on the product `t eta` only.

use crate::optimize::maximize_log;
use crate::rate::RateResult;
use crate::{Error, Result};

/// State of a CV link in shot-noise units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvState {
    /// Variance of Alice's output thermal state, `v = v_A + 1 >= 1`.
    pub v: f64,
    /// Channel transmittance `t`.
    pub t: f64,
    /// Homodyne detection efficiency `eta`.
    pub eta: f64,
    /// Electronic noise of the detector (SNU).
    pub v_el: f64,
    /// Excess noise referred to the channel input (SNU).
    pub epsilon: f64,
    /// Reconciliation efficiency `beta` in (0, 1].
    pub beta: f64,
}

impl CvState {
    pub fn new(v: f64, t: f64, eta: f64, v_el: f64, epsilon: f64, beta: f64) -> Result<Self> {
        if !(v >= 1.0) {
            return Err(Error::OutOfRange {
                name: "v",
                value: v,
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        for (name, value) in [("t", t), ("eta", eta), ("beta", beta)] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::OutOfRange {
                    name,
                    value,
                    min: f64::MIN_POSITIVE,
                    max: 1.0,
                });
            }
        }
        for (name, value) in [("v_el", v_el), ("epsilon", epsilon)] {
            if !(value >= 0.0) {
                return Err(Error::OutOfRange {
                    name,
                    value,
                    min: 0.0,
                    max: f64::INFINITY,
                });
            }
        }
        Ok(CvState {
            v,
            t,
            eta,
            v_el,
            epsilon,
            beta,
        })
    }

    /// Builds a state specified through the effective transmittance `t eta`
    /// alone (perfect detector, losses in the channel).
    pub fn from_effective(v: f64, t_eta: f64, epsilon: f64, beta: f64) -> Result<Self> {
        CvState::new(v, t_eta, 1.0, 0.0, epsilon, beta)
    }

    /// Effective transmittance `t eta`.
    pub fn t_eta(&self) -> f64 {
        self.t * self.eta
    }

    /// Conditional variance of Bob's quadrature given Alice's heterodyne
    /// data: `v_{B|A_M} = t eta (delta + 1)`.
    pub fn v_b_given_alice(&self) -> f64 {
        self.t_eta() * (total_noise(self) + 1.0)
    }

    /// Smallest achievable `v_{B|A}`, reached by squeezed-state
    /// preparation: `v_{B|A} = t eta (delta + 1/v)`.
    pub fn v_b_given_alice_squeezed(&self) -> f64 {
        self.t_eta() * (total_noise(self) + 1.0 / self.v)
    }

    /// Heisenberg bound on Eve's uncertainty,
    /// `v_{B|E} >= 1 / v_{B|A}`; the product with
    /// [`CvState::v_b_given_alice_squeezed`] is 1 by construction.
    pub fn v_b_given_eve_bound(&self) -> f64 {
        1.0 / self.v_b_given_alice_squeezed()
    }
}

/// Total channel noise referred to the input (SNU):
/// `delta = (1 - t)/t + delta_h/t + epsilon` with the homodyne term
/// `delta_h = (1 + v_el)/eta - 1`; algebraically identical to
/// `(1 - t eta + v_el)/(t eta) + epsilon`.
pub fn total_noise(cs: &CvState) -> f64 {
    let te = cs.t_eta();
    (1.0 - te + cs.v_el) / te + cs.epsilon
}

/// The three contributions to [`total_noise`]: loss-induced vacuum noise,
/// homodyne-detection noise, excess noise.
pub fn total_noise_terms(cs: &CvState) -> (f64, f64, f64) {
    let delta_h = (1.0 + cs.v_el) / cs.eta - 1.0;
    ((1.0 - cs.t) / cs.t, delta_h / cs.t, cs.epsilon)
}

/// Mutual information per symbol between Alice and Bob:
/// `I(A:B) = (1/2) log2 [(delta + v) / (delta + 1)]`.
pub fn mutual_info_ab(cs: &CvState) -> f64 {
    let d = total_noise(cs);
    0.5 * ((d + cs.v) / (d + 1.0)).log2()
}

/// Secret fraction under individual attacks in reverse reconciliation:
/// `r = (1/2) log2 [1 / ((t eta)^2 (delta + 1/v)(delta + 1))]`.
///
/// Remains positive in the high-loss, large-modulation limit as long as
/// the excess noise stays below 1/2.
pub fn rate_cv_individual(cs: &CvState, nu_eff: f64) -> RateResult {
    let i_ab = mutual_info_ab(cs);
    let r = -0.5 * (cs.v_b_given_alice_squeezed() * cs.v_b_given_alice()).log2();
    let mut result = RateResult::from_fraction(nu_eff, 0.0, i_ab - r, r);
    // Keep the signed fraction visible for threshold scans even though the
    // key rate itself is clamped.
    result.secret_fraction = r;
    result
}

/// Two-mode covariance matrix of the entanglement-based protocol in
/// `(x_A, p_A, x_B, p_B)` ordering, block-diagonal per quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct CvCovariance(pub [[f64; 4]; 4]);

impl CvCovariance {
    /// Symplectic eigenvalues: the moduli of the eigenvalues of
    /// `Omega gamma` (each appears twice), sorted descending.
    ///
    /// Computed through a terminating similarity route: the squared
    /// moduli are the spectrum of `-(Omega gamma)^2`, which is similar to
    /// the symmetric positive matrix
    /// `gamma^{1/2} (-Omega gamma Omega) gamma^{1/2}`; two symmetric
    /// eigendecompositions suffice. This generic linear-algebra path is
    /// independent of the closed forms in [`holevo_be_collective`] and
    /// serves as their cross-check.
    pub fn symplectic_eigenvalues(&self) -> Result<[f64; 2]> {
        let g = nalgebra::Matrix4::from_fn(|r, c| self.0[r][c]);
        // Omega = diag([[0,1],[-1,0]], [[0,1],[-1,0]]) in xpxp ordering.
        let omega = nalgebra::Matrix4::new(
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, -1.0, 0.0,
        );
        let eig_g = nalgebra::SymmetricEigen::new(g);
        for &l in eig_g.eigenvalues.iter() {
            if l < -1e-9 {
                return Err(Error::NonPhysical(format!(
                    "covariance matrix not positive semidefinite (eigenvalue {l})"
                )));
            }
        }
        let sqrt_vals =
            nalgebra::Vector4::from_fn(|i, _| eig_g.eigenvalues[i].max(0.0).sqrt());
        let g_sqrt = eig_g.eigenvectors
            * nalgebra::Matrix4::from_diagonal(&sqrt_vals)
            * eig_g.eigenvectors.transpose();
        let k = -omega * g * omega;
        let c = g_sqrt * k * g_sqrt;
        let c = (c + c.transpose()) * 0.5;
        let mut sq: Vec<f64> = nalgebra::SymmetricEigen::new(c)
            .eigenvalues
            .iter()
            .map(|&v| v.max(0.0).sqrt())
            .collect();
        sq.sort_by(|a, b| a.total_cmp(b));
        // Values come in coincident pairs [l2, l2, l1, l1].
        let nu = [sq[3], sq[1]];
        for &n in &nu {
            if n < 1.0 - 1e-9 {
                return Err(Error::NonPhysical(format!(
                    "symplectic eigenvalue {n} < 1 violates the uncertainty principle"
                )));
            }
        }
        Ok(nu)
    }
}

/// Assembles the covariance matrix with blocks
/// `[[v, +-sqrt(t eta (v^2 - 1))], [.., t eta (v + delta)]]`; the `+` sign
/// belongs to the `x` block, the `-` sign to the `p` block.
pub fn cv_covariance(cs: &CvState) -> CvCovariance {
    let te = cs.t_eta();
    let d = total_noise(cs);
    let c = (te * (cs.v * cs.v - 1.0)).sqrt();
    let b = te * (cs.v + d);
    let mut g = [[0.0; 4]; 4];
    g[0][0] = cs.v;
    g[1][1] = cs.v;
    g[2][2] = b;
    g[3][3] = b;
    g[0][2] = c;
    g[2][0] = c;
    g[1][3] = -c;
    g[3][1] = -c;
    CvCovariance(g)
}

fn g_thermal(x: f64) -> f64 {
    // (x+1) log2 (x+1) - x log2 x with the 0 log 0 = 0 guard; negative
    // rounding slop at pure-state boundaries is clamped.
    let x = x.max(0.0);
    crate::math::thermal_entropy_g(x).expect("non-negative by clamp")
}

/// Closed-form symplectic spectrum entering the collective bound:
/// `lambda_{1,2}^2 = (A +- sqrt(A^2 - 4B)) / 2` with
/// `A = v^2 (1 - 2 t eta) + 2 t eta + [t eta (v + delta)]^2` and
/// `B = [t eta (v delta + 1)]^2`, plus
/// `lambda_3^2 = v (1 + v delta) / (v + delta)`.
pub fn holevo_lambdas(cs: &CvState) -> Result<[f64; 3]> {
    let te = cs.t_eta();
    let d = total_noise(cs);
    let a = cs.v * cs.v * (1.0 - 2.0 * te) + 2.0 * te + (te * (cs.v + d)).powi(2);
    let b = (te * (cs.v * d + 1.0)).powi(2);
    let disc = a * a - 4.0 * b;
    // The discriminant is a difference of quantities of order A^2; judge
    // negativity relative to that scale before clamping rounding slop.
    if disc < -1e-9 * (a * a).max(1.0) {
        return Err(Error::NonPhysical(format!(
            "A^2 - 4B = {disc} < 0: state is not physical"
        )));
    }
    let s = disc.max(0.0).sqrt();
    let l1 = ((a + s) / 2.0).sqrt();
    let l2 = ((a - s) / 2.0).max(0.0).sqrt();
    let l3 = (cs.v * (1.0 + cs.v * d) / (cs.v + d)).sqrt();
    Ok([l1, l2, l3])
}

/// Holevo bound on Eve's information in reverse reconciliation:
/// `chi(B:E) = g(l1~) + g(l2~) - g(l3~)` with `lk~ = (lk - 1)/2`.
pub fn holevo_be_collective(cs: &CvState) -> Result<f64> {
    let [l1, l2, l3] = holevo_lambdas(cs)?;
    Ok(g_thermal((l1 - 1.0) / 2.0) + g_thermal((l2 - 1.0) / 2.0) - g_thermal((l3 - 1.0) / 2.0))
}

/// Secret key rate against collective attacks:
/// `K = nu_eff max(beta I(A:B) - chi(B:E), 0)`.
pub fn rate_cv_collective(cs: &CvState, nu_eff: f64) -> Result<RateResult> {
    let i_ab = mutual_info_ab(cs);
    let chi = holevo_be_collective(cs)?;
    Ok(RateResult::from_fraction(
        nu_eff,
        0.0,
        chi,
        cs.beta * i_ab - chi,
    ))
}

/// Search window for the modulation-variance optimization. The optimal
/// variance comes out rather demanding, so the upper bracket is large.
const V_RANGE: (f64, f64) = (1.0 + 1e-9, 1e4);

/// Optimizes the collective rate over the modulation variance `v`.
pub fn optimize_cv_collective(
    t: f64,
    eta: f64,
    v_el: f64,
    epsilon: f64,
    beta: f64,
    nu_eff: f64,
) -> Result<RateResult> {
    // Parameter errors surface immediately; v varies inside the search.
    CvState::new(1.0, t, eta, v_el, epsilon, beta)?;
    let eval = |v: f64| {
        let cs = CvState {
            v,
            t,
            eta,
            v_el,
            epsilon,
            beta,
        };
        rate_cv_collective(&cs, nu_eff)
            .map(|r| r.key_rate)
            .unwrap_or(0.0)
    };
    let (v_opt, k, _) = maximize_log(eval, V_RANGE.0, V_RANGE.1, 80);
    let cs = CvState {
        v: v_opt,
        t,
        eta,
        v_el,
        epsilon,
        beta,
    };
    let mut r = rate_cv_collective(&cs, nu_eff)?;
    if k <= 0.0 {
        r.feasible = false;
        r.key_rate = 0.0;
        r.secret_fraction = 0.0;
    } else {
        r = r.with_mu(v_opt);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Set #1 CV device parameters.
    fn set1(v: f64, t: f64) -> CvState {
        CvState::new(v, t, 0.6, 0.01, 0.005, 0.9).unwrap()
    }

    #[test]
    fn total_noise_reference_points() {
        let perfect = CvState::new(2.0, 1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(total_noise(&perfect), 0.0);
        let half = CvState::new(2.0, 0.5, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(total_noise(&half), 1.0, max_relative = 1e-14);
        assert!(CvState::new(2.0, 0.0, 1.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn total_noise_two_routes_agree() {
        let cs = set1(10.0, 0.1);
        let (loss, homodyne, excess) = total_noise_terms(&cs);
        assert_relative_eq!(
            loss + homodyne + excess,
            total_noise(&cs),
            max_relative = 1e-12
        );
    }

    #[test]
    fn mutual_info_reference_points() {
        let cs = CvState::new(1.0, 0.5, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(mutual_info_ab(&cs), 0.0);
        let cs = CvState::new(2.0, 1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(mutual_info_ab(&cs), 0.5, max_relative = 1e-14);
        // delta = 1, v = 11 -> (1/2) log2 6.
        let cs = CvState::new(11.0, 0.5, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(mutual_info_ab(&cs), 1.29248125036, max_relative = 1e-11);
    }

    #[test]
    fn heisenberg_product_is_one() {
        for (v, t) in [(1.5, 0.9), (20.0, 0.3), (500.0, 0.01)] {
            let cs = set1(v, t);
            assert_relative_eq!(
                cs.v_b_given_eve_bound() * cs.v_b_given_alice_squeezed(),
                1.0,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn individual_rate_monotone_in_modulation() {
        let r10 = rate_cv_individual(&CvState::from_effective(10.0, 1.0, 0.0, 1.0).unwrap(), 1.0);
        let r100 =
            rate_cv_individual(&CvState::from_effective(100.0, 1.0, 0.0, 1.0).unwrap(), 1.0);
        assert!(r100.secret_fraction > r10.secret_fraction);
        assert!(r10.secret_fraction > 0.0);
    }

    #[test]
    fn individual_rate_excess_noise_threshold() {
        // At high losses and large modulation the sign of r follows
        // epsilon vs 1/2.
        let below = CvState::from_effective(1e5, 1e-4, 0.49, 1.0).unwrap();
        let above = CvState::from_effective(1e5, 1e-4, 0.51, 1.0).unwrap();
        assert!(rate_cv_individual(&below, 1.0).secret_fraction > 0.0);
        assert!(rate_cv_individual(&above, 1.0).secret_fraction < 0.0);
    }

    #[test]
    fn individual_rate_matches_conditional_variance_oracle() {
        // Rebuild both conditional variances numerically from the
        // covariance matrix: v_{X|Y} = <x^2> - <xy>^2 / <y^2>, with one
        // vacuum unit added to Alice's measured quadrature for heterodyne.
        let cs = CvState::from_effective(20.0, 0.5, 0.0, 1.0).unwrap();
        let g = cv_covariance(&cs).0;
        let v_ba = g[2][2] - g[0][2] * g[0][2] / g[0][0];
        let v_bam = g[2][2] - g[0][2] * g[0][2] / (g[0][0] + 1.0);
        let oracle = 0.5 * (1.0 / (v_ba * v_bam)).log2();
        let r = rate_cv_individual(&cs, 1.0);
        assert_relative_eq!(r.secret_fraction, oracle, max_relative = 1e-12);
    }

    #[test]
    fn covariance_reference_points() {
        // No modulation: diagonal matrix.
        let cs = set1(1.0, 0.4);
        let g = cv_covariance(&cs).0;
        assert_eq!(g[0][2], 0.0);
        let b = cs.t_eta() * (1.0 + total_noise(&cs));
        assert_relative_eq!(g[2][2], b, max_relative = 1e-14);

        // Lossless noiseless line: pure two-mode squeezed state.
        let pure = CvState::new(7.0, 1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        let nu = cv_covariance(&pure).symplectic_eigenvalues().unwrap();
        assert!((nu[0] - 1.0).abs() < 1e-9 && (nu[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn closed_form_lambdas_match_symplectic_oracle() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rand01 = move || {
            // xorshift64*; only used to scatter test states.
            state ^= state >> 12;
            state ^= state << 25;
            state ^= state >> 27;
            (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let cs = CvState::new(
                1.0 + 999.0 * rand01(),
                0.01 + 0.99 * rand01(),
                0.1 + 0.9 * rand01(),
                0.1 * rand01(),
                0.3 * rand01(),
                1.0,
            )
            .unwrap();
            let [l1, l2, _] = holevo_lambdas(&cs).unwrap();
            let nu = cv_covariance(&cs).symplectic_eigenvalues().unwrap();
            assert_relative_eq!(l1, nu[0], max_relative = 1e-9);
            assert_relative_eq!(l2, nu[1], max_relative = 1e-9);
        }
    }

    #[test]
    fn holevo_vanishes_without_modulation_on_pure_loss() {
        // v = 1 with no detector noise: Bob's state is pure loss, Eve
        // learns nothing; the g-terms cancel.
        for t in [1.0, 0.7, 0.2, 0.01] {
            let cs = CvState::new(1.0, t, 1.0, 0.0, 0.0, 1.0).unwrap();
            let chi = holevo_be_collective(&cs).unwrap();
            assert!(chi.abs() < 1e-10, "t={t}: chi={chi}");
        }
    }

    #[test]
    fn holevo_nonnegative_and_bounded_at_purity() {
        let pure = CvState::new(30.0, 1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        let chi = holevo_be_collective(&pure).unwrap();
        assert!(chi.abs() < 1e-8);
        for (v, t) in [(2.0, 0.9), (50.0, 0.2), (1000.0, 0.05)] {
            let chi = holevo_be_collective(&set1(v, t)).unwrap();
            assert!(chi >= 0.0);
        }
    }

    #[test]
    fn collective_weaker_than_individual() {
        let mut state = 0xdeadbeefcafef00du64;
        let mut rand01 = move || {
            state ^= state >> 12;
            state ^= state << 25;
            state ^= state >> 27;
            (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let cs = CvState::new(
                1.0 + 100.0 * rand01(),
                0.01 + 0.99 * rand01(),
                0.1 + 0.9 * rand01(),
                0.1 * rand01(),
                0.3 * rand01(),
                1.0,
            )
            .unwrap();
            let r_coll = mutual_info_ab(&cs) - holevo_be_collective(&cs).unwrap();
            let r_ind = rate_cv_individual(&cs, 1.0).secret_fraction;
            assert!(
                r_coll <= r_ind + 1e-12,
                "collective {r_coll} > individual {r_ind} at {cs:?}"
            );
        }
    }

    #[test]
    fn collective_rate_reference_points() {
        // No modulation: nothing to distill.
        let cs = set1(1.0, 0.5);
        let r = rate_cv_collective(&cs, 1.0).unwrap();
        assert_eq!(r.key_rate, 0.0);

        // Set #1 back to back: positive rate with a finite optimum.
        let opt = optimize_cv_collective(1.0, 0.6, 0.01, 0.005, 0.9, 1.0).unwrap();
        assert!(opt.key_rate > 0.0);
        let v_opt = opt.mu_opt.unwrap();
        assert!(v_opt > 1.0 && v_opt < 1e4);
        // Frozen against an independent high-precision golden-section run.
        assert_relative_eq!(opt.key_rate, 0.31821590106, max_relative = 1e-8);
        assert_relative_eq!(v_opt, 15.039, max_relative = 1e-2);

        // Lower reconciliation efficiency costs rate.
        let beta_low = CvState { beta: 0.9, ..set1(v_opt, 1.0) };
        let beta_high = CvState { beta: 1.0, ..beta_low };
        assert!(
            rate_cv_collective(&beta_high, 1.0).unwrap().key_rate
                > rate_cv_collective(&beta_low, 1.0).unwrap().key_rate
        );
    }

    #[test]
    fn optimized_rate_monotone_in_length_and_noise() {
        let mut last = f64::INFINITY;
        for i in 0..12 {
            let t = 10f64.powf(-i as f64 / 8.0);
            let k = optimize_cv_collective(t, 0.6, 0.01, 0.005, 0.9, 1.0)
                .unwrap()
                .key_rate;
            assert!(k <= last * (1.0 + 1e-9) + 1e-300, "not monotone at t={t}");
            last = k;
        }
        let mut last = f64::INFINITY;
        for i in 0..8 {
            let eps = 0.001 + 0.01 * i as f64;
            let k = optimize_cv_collective(0.5, 0.6, 0.01, eps, 0.9, 1.0)
                .unwrap()
                .key_rate;
            assert!(k <= last * (1.0 + 1e-9) + 1e-300, "not monotone at eps={eps}");
            last = k;
        }
    }
}
