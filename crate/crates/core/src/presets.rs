//! The two device parameter sets used for the a-priori platform
//! comparison: set #1 is state-of-the-art hardware, set #2 an optimistic
//! but not unrealistic development.

use crate::channel::LinkParams;
use crate::cv::CvState;
use crate::rate::EcModel;
use crate::Result;

/// Discrete-variable (BB84, COW) device parameters of one set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DvPreset {
    /// Visibility of prepare-and-measure interferometry.
    pub visibility_pm: f64,
    /// Visibility of the entanglement-based implementation.
    pub visibility_eb: f64,
    /// Transmission in Bob's device.
    pub t_bob: f64,
    /// Detector efficiency.
    pub eta: f64,
    /// Dark-count probability per gate.
    pub p_dark: f64,
    /// COW bit error (independent of the visibility).
    pub eps_cow: f64,
    /// Coherent multi-pair fraction of the EB source.
    pub zeta_eb: f64,
    /// Error-correction inefficiency.
    pub f_ec: f64,
}

/// Continuous-variable device parameters of one set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvPreset {
    /// Excess optical noise (SNU).
    pub epsilon: f64,
    /// Homodyne detection efficiency.
    pub eta: f64,
    /// Electronic noise (SNU).
    pub v_el: f64,
    /// Reconciliation efficiency.
    pub beta: f64,
}

/// One column of the comparison parameter table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterSet {
    pub dv: DvPreset,
    pub cv: CvPreset,
}

pub const SET1: ParameterSet = ParameterSet {
    dv: DvPreset {
        visibility_pm: 0.99,
        visibility_eb: 0.96,
        t_bob: 1.0,
        eta: 0.1,
        p_dark: 1e-5,
        eps_cow: 0.03,
        zeta_eb: 0.0,
        f_ec: 1.2,
    },
    cv: CvPreset {
        epsilon: 0.005,
        eta: 0.6,
        v_el: 0.01,
        beta: 0.9,
    },
};

pub const SET2: ParameterSet = ParameterSet {
    dv: DvPreset {
        visibility_pm: 0.99,
        visibility_eb: 0.99,
        t_bob: 1.0,
        eta: 0.2,
        p_dark: 1e-6,
        eps_cow: 0.01,
        zeta_eb: 0.0,
        f_ec: 1.0,
    },
    cv: CvPreset {
        epsilon: 0.001,
        eta: 0.85,
        v_el: 0.0,
        beta: 0.9,
    },
};

/// Looks a set up by its 1-based table index.
pub fn parameter_set(index: u8) -> Option<&'static ParameterSet> {
    match index {
        1 => Some(&SET1),
        2 => Some(&SET2),
        _ => None,
    }
}

impl DvPreset {
    /// Link parameters at channel transmittance `t` using the
    /// prepare-and-measure visibility.
    pub fn link_pm(&self, t: f64, nu_eff: f64) -> Result<LinkParams> {
        LinkParams::new(t, self.t_bob, self.eta, self.p_dark, self.visibility_pm, nu_eff)
    }

    /// Link parameters at channel transmittance `t` using the EB
    /// visibility.
    pub fn link_eb(&self, t: f64, nu_eff: f64) -> Result<LinkParams> {
        LinkParams::new(t, self.t_bob, self.eta, self.p_dark, self.visibility_eb, nu_eff)
    }

    pub fn ec(&self) -> EcModel {
        EcModel { f_ec: self.f_ec }
    }
}

impl CvPreset {
    /// CV state at modulation variance `v` and channel transmittance `t`.
    pub fn state(&self, v: f64, t: f64) -> Result<CvState> {
        CvState::new(v, t, self.eta, self.v_el, self.epsilon, self.beta)
    }
}
