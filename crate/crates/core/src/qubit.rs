//! Unconditional security bounds for BB84 and six-state with single-qubit
//! signals, derived from Bell-diagonal attack states.
//!
//! The optimal collective attack leaves Alice and Bob with a Bell-diagonal
//! state `diag(l1..l4)`; the observable error rates are sums of pairs of
//! eigenvalues, and Eve's information is `H(lambda) - h(eps_z)`.

use crate::math::{h_bits, DiscreteDistribution};
use crate::optimize::bisect_root;
use crate::{Error, Result};

/// Bell-diagonal two-qubit state, stored as the four eigenvalues in the
/// order (Phi+, Phi-, Psi+, Psi-).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellDiagonalState {
    lambda: [f64; 4],
}

impl BellDiagonalState {
    pub fn new(lambda: [f64; 4]) -> Result<Self> {
        // Reuse the distribution checks: non-negative, normalized to 1e-12.
        DiscreteDistribution::new(lambda.to_vec())?;
        Ok(BellDiagonalState { lambda })
    }

    pub fn lambda(&self) -> [f64; 4] {
        self.lambda
    }

    /// Error rates in the three bases:
    /// `eps_x = l2 + l4`, `eps_y = l2 + l3`, `eps_z = l3 + l4`
    /// (the Psi states anti-correlate Z, the minus states flip X).
    pub fn error_rates(&self) -> (f64, f64, f64) {
        let [_, l2, l3, l4] = self.lambda;
        (l2 + l4, l2 + l3, l3 + l4)
    }
}

/// Reconstructs the Bell eigenvalues from an error triple, rejecting
/// triples no Bell-diagonal state can produce.
fn lambdas_from_errors(eps_x: f64, eps_y: f64, eps_z: f64) -> Result<[f64; 4]> {
    let l2 = (eps_x + eps_y - eps_z) / 2.0;
    let l3 = (eps_y + eps_z - eps_x) / 2.0;
    let l4 = (eps_x + eps_z - eps_y) / 2.0;
    let l1 = 1.0 - l2 - l3 - l4;
    let lambda = [l1, l2, l3, l4];
    for l in lambda {
        if !(l >= -1e-12) {
            return Err(Error::NonPhysical(format!(
                "error triple ({eps_x}, {eps_y}, {eps_z}) has no Bell-diagonal state: lambda = {lambda:?}"
            )));
        }
    }
    Ok(lambda.map(|l| l.max(0.0)))
}

/// Eve's information on the Z-basis key of the six-state protocol, where
/// all three error rates are measured and determine the state completely:
/// `I_E = eps_z h[(1 + (eps_x - eps_y)/eps_z)/2]
///       + (1 - eps_z) h[(1 - (eps_x + eps_y + eps_z)/2)/(1 - eps_z)]`.
pub fn eve_info_sixstate(eps_x: f64, eps_y: f64, eps_z: f64) -> Result<f64> {
    lambdas_from_errors(eps_x, eps_y, eps_z)?;
    let second = if eps_z < 1.0 {
        (1.0 - eps_z) * h_bits(((1.0 - (eps_x + eps_y + eps_z) / 2.0) / (1.0 - eps_z)).clamp(0.0, 1.0))
    } else {
        0.0
    };
    // eps_z h(.) -> 0 as eps_z -> 0 with a bounded argument.
    let first = if eps_z > 0.0 {
        eps_z * h_bits(((1.0 + (eps_x - eps_y) / eps_z) / 2.0).clamp(0.0, 1.0))
    } else {
        0.0
    };
    Ok(first + second)
}

/// Six-state bound on the usual depolarizing channel,
/// `eps_x = eps_y = eps_z = Q`:
/// `I_E(Q) = Q + (1 - Q) h[(1 - 3Q/2)/(1 - Q)]`.
pub fn eve_info_sixstate_depolarizing(q: f64) -> Result<f64> {
    eve_info_sixstate(q, q, q)
}

/// Eve's information for BB84, where only `eps_x` is measured; maximizing
/// over the unconstrained eigenvalue direction gives `I_E = h(eps_x)`.
pub fn eve_info_bb84(eps_x: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&eps_x) {
        return Err(Error::OutOfRange {
            name: "eps_x",
            value: eps_x,
            min: 0.0,
            max: 0.5,
        });
    }
    Ok(h_bits(eps_x))
}

/// Y-basis error implied by `eps_x = eps_z = Q` in the BB84 optimum: the
/// phase-covariant cloning value `eps_y = 2 Q (1 - Q)`.
pub fn phase_covariant_eps_y(q: f64) -> f64 {
    2.0 * q * (1.0 - q)
}

/// Critical QBER of one-way BB84: the root of `1 - 2 h(Q)`, near 11%.
pub fn critical_qber_bb84() -> f64 {
    bisect_root(|q| 1.0 - 2.0 * h_bits(q), 0.05, 0.2, 60)
}

/// Critical QBER of the six-state protocol: the root of
/// `1 - h(Q) - I_E(Q)` on the depolarizing channel, near 12.61%.
pub fn critical_qber_sixstate() -> f64 {
    bisect_root(
        |q| 1.0 - h_bits(q) - eve_info_sixstate_depolarizing(q).unwrap(),
        0.05,
        0.2,
        60,
    )
}
