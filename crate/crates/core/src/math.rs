//! Numeric kernels shared by all rate formulas: entropies, Poisson
//! statistics and channel loss models.

use crate::{Error, Result};

/// Tolerance on the normalization of a [`DiscreteDistribution`].
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A real number constrained to `[0, 1]`.
///
/// Houses error rates, visibilities, transmittances and detection
/// probabilities throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfRange {
                name: "probability",
                value,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(Probability(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A normalized distribution over finitely many outcomes.
///
/// Houses photon-number distributions, Bell-state eigenvalue vectors and
/// classical alphabets entering the Holevo quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution(Vec<f64>);

impl DiscreteDistribution {
    /// Validates that all weights are non-negative and sum to 1 within
    /// [`NORMALIZATION_TOL`].
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        for &w in &weights {
            if !(w >= 0.0) {
                return Err(Error::OutOfRange {
                    name: "weight",
                    value: w,
                    min: 0.0,
                    max: 1.0,
                });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(DiscreteDistribution(weights))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }
}

/// `x log2 x` with the limit value 0 at `x = 0`.
///
/// The guarded branch removes IEEE NaN propagation at distribution
/// boundaries.
#[inline]
fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Binary entropy on a raw `f64` already known to lie in `[0, 1]`.
///
/// Rate formulas call this after their own feasibility checks; the public
/// checked entry point is [`binary_entropy`].
#[inline]
pub(crate) fn h_bits(p: f64) -> f64 {
    debug_assert!((-1e-12..=1.0 + 1e-12).contains(&p), "h_bits({p})");
    -xlog2x(p) - xlog2x(1.0 - p)
}

/// Binary entropy `h(p) = -p log2 p - (1-p) log2 (1-p)` in bits.
///
/// Endpoints return exactly 0.
pub fn binary_entropy(p: Probability) -> f64 {
    h_bits(p.value())
}

/// Shannon entropy `H(d) = -sum_i w_i log2 w_i` in bits, with `0 log 0 = 0`.
pub fn shannon_entropy(d: &DiscreteDistribution) -> f64 {
    -d.weights().iter().copied().map(xlog2x).sum::<f64>()
}

/// Entropy of a thermal state with mean photon number `x`, in bits:
/// `g(x) = (x+1) log2 (x+1) - x log2 x`, with `g(0) = 0`.
pub fn thermal_entropy_g(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::OutOfRange {
            name: "mean photon number",
            value: x,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    Ok(xlog2x(x + 1.0) - xlog2x(x))
}

/// Poissonian photon-number probability `P(n|mu) = e^{-mu} mu^n / n!`.
pub fn poisson_p(n: u32, mu: f64) -> Result<Probability> {
    if !(mu >= 0.0) {
        return Err(Error::OutOfRange {
            name: "mu",
            value: mu,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    // Iterative product keeps every partial result in (0, 1]; no factorial
    // overflow for the photon numbers relevant here.
    let mut term = (-mu).exp();
    for k in 1..=n {
        term *= mu / k as f64;
    }
    Probability::new(term.min(1.0))
}

/// Tail probability `P(n >= n_min | mu)` as the complement of a finite
/// partial sum, avoiding an incomplete-gamma dependency.
pub fn poisson_tail_ge(n_min: u32, mu: f64) -> Result<Probability> {
    if !(mu >= 0.0) {
        return Err(Error::OutOfRange {
            name: "mu",
            value: mu,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    let mut head = 0.0;
    let mut term = (-mu).exp();
    for k in 0..n_min {
        if k > 0 {
            term *= mu / k as f64;
        }
        head += term;
    }
    Probability::new((1.0 - head).clamp(0.0, 1.0))
}

/// Second-order correlation at zero delay, `g2(0) ~ 2 p(2) / p(1)^2`.
///
/// Equals 1 for Poissonian sources in the small-intensity limit; smaller
/// values indicate sub-Poissonian statistics.
pub fn g2_zero(p1: Probability, p2: Probability) -> Result<f64> {
    if p1.value() == 0.0 {
        return Err(Error::OutOfRange {
            name: "p1",
            value: 0.0,
            min: f64::MIN_POSITIVE,
            max: 1.0,
        });
    }
    Ok(2.0 * p2.value() / (p1.value() * p1.value()))
}

/// Fiber transmittance `t = 10^{-alpha l / 10}` for attenuation `alpha` in
/// dB/km and length `l` in km.
pub fn fiber_transmittance(alpha_db_per_km: f64, length_km: f64) -> Result<Probability> {
    if !(alpha_db_per_km >= 0.0) {
        return Err(Error::OutOfRange {
            name: "alpha_db_per_km",
            value: alpha_db_per_km,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    if !(length_km >= 0.0) {
        return Err(Error::OutOfRange {
            name: "length_km",
            value: length_km,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    Probability::new(10f64.powf(-alpha_db_per_km * length_km / 10.0))
}

/// Line-of-sight free-space transmittance: geometric aperture factor
/// `(d_r / (d_s + D l))^2` times atmospheric scattering `10^{-alpha l / 10}`.
///
/// `d_s`, `d_r` are the sending/receiving apertures, `D` the beam
/// divergence. The geometric factor is clamped to 1; a transmittance above
/// unity is unphysical. Scintillation is not modeled.
pub fn freespace_transmittance(
    d_s: f64,
    d_r: f64,
    divergence: f64,
    alpha_db_per_km: f64,
    length_km: f64,
) -> Result<Probability> {
    for (name, v) in [
        ("d_s", d_s),
        ("d_r", d_r),
        ("divergence", divergence),
        ("alpha_db_per_km", alpha_db_per_km),
        ("length_km", length_km),
    ] {
        if !(v >= 0.0) {
            return Err(Error::OutOfRange {
                name,
                value: v,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
    }
    let denom = d_s + divergence * length_km;
    if denom <= 0.0 {
        return Err(Error::Regime(format!(
            "free-space geometry degenerate: d_s + D*l = {denom}"
        )));
    }
    let geometric = (d_r / denom).powi(2).min(1.0);
    let scattering = 10f64.powf(-alpha_db_per_km * length_km / 10.0);
    Probability::new(geometric * scattering)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    #[test]
    fn binary_entropy_reference_points() {
        assert_eq!(binary_entropy(p(0.5)), 1.0);
        assert_eq!(binary_entropy(p(0.0)), 0.0);
        assert_eq!(binary_entropy(p(1.0)), 0.0);
        // High-precision evaluation, frozen to 12 digits.
        assert_relative_eq!(binary_entropy(p(0.11)), 0.499915958165, max_relative = 1e-12);
    }

    #[test]
    fn binary_entropy_rejects_out_of_domain() {
        assert!(Probability::new(-0.1).is_err());
        assert!(Probability::new(1.1).is_err());
        assert!(Probability::new(f64::NAN).is_err());
    }

    #[test]
    fn shannon_entropy_reference_points() {
        let d = DiscreteDistribution::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(shannon_entropy(&d), 0.0);
        let u = DiscreteDistribution::new(vec![0.25; 4]).unwrap();
        assert_relative_eq!(shannon_entropy(&u), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn shannon_entropy_rejects_unnormalized() {
        assert!(DiscreteDistribution::new(vec![0.5, 0.4]).is_err());
        assert!(DiscreteDistribution::new(vec![0.5, -0.1, 0.6]).is_err());
    }

    #[test]
    fn shannon_entropy_bell_diagonal_parametrization() {
        // lambda = ((1-e)(1-u), (1-e)u, e(1-v), ev) at u = v = eps_x has
        // H(lambda) = h(eps_z) + h(eps_x); check the difference identity at
        // eps_x = eps_z = 0.05.
        let (eps_z, eps_x) = (0.05, 0.05);
        let lambda = DiscreteDistribution::new(vec![
            (1.0 - eps_z) * (1.0 - eps_x),
            (1.0 - eps_z) * eps_x,
            eps_z * (1.0 - eps_x),
            eps_z * eps_x,
        ])
        .unwrap();
        let lhs = shannon_entropy(&lambda) - binary_entropy(p(eps_z));
        assert_relative_eq!(lhs, binary_entropy(p(eps_x)), max_relative = 1e-12);
    }

    #[test]
    fn thermal_entropy_reference_points() {
        assert_eq!(thermal_entropy_g(0.0).unwrap(), 0.0);
        assert_relative_eq!(thermal_entropy_g(1.0).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(
            thermal_entropy_g(0.5).unwrap(),
            1.37744375108,
            max_relative = 1e-11
        );
        assert!(thermal_entropy_g(-0.1).is_err());
    }

    #[test]
    fn thermal_entropy_derivative_matches_analytic() {
        // d g / dx = log2((x+1)/x); central finite difference on a log grid.
        let mut x = 0.01;
        while x <= 100.0 {
            let dx = x * 1e-6;
            let num = (thermal_entropy_g(x + dx).unwrap() - thermal_entropy_g(x - dx).unwrap())
                / (2.0 * dx);
            let ana = ((x + 1.0) / x).log2();
            assert_relative_eq!(num, ana, max_relative = 1e-6);
            x *= 1.6;
        }
    }

    #[test]
    fn poisson_reference_points() {
        let mu = 0.3;
        assert_relative_eq!(
            poisson_p(0, mu).unwrap().value(),
            (-mu).exp(),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            poisson_p(1, 0.1).unwrap().value(),
            0.0904837418036,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            poisson_tail_ge(2, 0.1).unwrap().value(),
            0.00467884016044,
            max_relative = 1e-12
        );
        assert!(poisson_p(1, -0.5).is_err());
    }

    #[test]
    fn poisson_normalizes_up_to_n60() {
        for &mu in &[0.01, 0.1, 1.0, 5.0, 10.0] {
            let sum: f64 = (0..=60).map(|n| poisson_p(n, mu).unwrap().value()).sum();
            assert!((sum - 1.0).abs() < 1e-12, "mu={mu}: sum={sum}");
        }
    }

    #[test]
    fn g2_reference_points() {
        // For a Poissonian source the estimate gives exactly e^mu.
        let mu = 0.05;
        let p1 = poisson_p(1, mu).unwrap();
        let p2 = poisson_p(2, mu).unwrap();
        let g2 = g2_zero(p1, p2).unwrap();
        assert_relative_eq!(g2, mu.exp(), max_relative = 1e-12);
        assert!((g2 - 1.0).abs() < 0.06);

        assert_eq!(g2_zero(p(0.1), p(0.0)).unwrap(), 0.0);
        assert_relative_eq!(g2_zero(p(0.5), p(0.125)).unwrap(), 1.0, max_relative = 1e-15);
        assert!(g2_zero(p(0.0), p(0.1)).is_err());
    }

    #[test]
    fn fiber_transmittance_reference_points() {
        assert_eq!(fiber_transmittance(0.2, 0.0).unwrap().value(), 1.0);
        assert_relative_eq!(
            fiber_transmittance(0.2, 50.0).unwrap().value(),
            0.1,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            fiber_transmittance(0.34, 10.0).unwrap().value(),
            0.457088189615,
            max_relative = 1e-11
        );
        assert!(fiber_transmittance(0.2, -1.0).is_err());
    }

    #[test]
    fn freespace_transmittance_reference_points() {
        // Lossless: no divergence, equal apertures, no scattering.
        assert_eq!(
            freespace_transmittance(0.1, 0.1, 0.0, 0.0, 10.0)
                .unwrap()
                .value(),
            1.0
        );
        // Scattering only.
        assert_relative_eq!(
            freespace_transmittance(0.1, 0.1, 0.0, 0.1, 10.0)
                .unwrap()
                .value(),
            0.794328234724,
            max_relative = 1e-11
        );
        // Geometric only; the oversized receiver triggers the clamp.
        assert_eq!(
            freespace_transmittance(0.1, 1.0, 0.009, 0.0, 10.0)
                .unwrap()
                .value(),
            1.0
        );
        assert_relative_eq!(
            freespace_transmittance(0.1, 0.1, 0.009, 0.0, 10.0)
                .unwrap()
                .value(),
            0.277008310249,
            max_relative = 1e-11
        );
        assert!(freespace_transmittance(0.0, 0.1, 0.0, 0.0, 10.0).is_err());
    }

    proptest! {
        #[test]
        fn binary_entropy_symmetric(q in 0.0..=1.0f64) {
            let a = binary_entropy(p(q));
            let b = binary_entropy(p(1.0 - q));
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn binary_entropy_concave(a in 0.0..=1.0f64, b in 0.0..=1.0f64, w in 0.0..=1.0f64) {
            let mid = binary_entropy(p(w * a + (1.0 - w) * b));
            let chord = w * binary_entropy(p(a)) + (1.0 - w) * binary_entropy(p(b));
            prop_assert!(mid >= chord - 1e-12);
        }

        #[test]
        fn shannon_two_outcome_equals_binary(q in 0.0..=1.0f64) {
            let d = DiscreteDistribution::new(vec![q, 1.0 - q]).unwrap();
            prop_assert!((shannon_entropy(&d) - binary_entropy(p(q))).abs() < 1e-12);
        }

        #[test]
        fn thermal_entropy_monotone(x in 0.0..100.0f64, dx in 1e-6..1.0f64) {
            prop_assert!(
                thermal_entropy_g(x + dx).unwrap() > thermal_entropy_g(x).unwrap()
            );
        }

        #[test]
        fn fiber_transmittance_multiplicative(
            alpha in 0.0..1.0f64,
            l1 in 0.0..100.0f64,
            l2 in 0.0..100.0f64,
        ) {
            let t12 = fiber_transmittance(alpha, l1 + l2).unwrap().value();
            let t1 = fiber_transmittance(alpha, l1).unwrap().value();
            let t2 = fiber_transmittance(alpha, l2).unwrap().value();
            prop_assert!((t12 - t1 * t2).abs() < 1e-12);
        }
    }
}
