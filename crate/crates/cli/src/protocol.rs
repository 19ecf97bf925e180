//! Protocol selector and single-point rate evaluation shared by the
//! `rate`, `optimize` and `sweep` commands.

use crate::config::ResolvedDevice;
use anyhow::{bail, Result};
use qkd_core::channel::{expected_dv_stats, expected_eb_stats, LinkParams};
use qkd_core::rate::{EcModel, RateResult};
use qkd_core::sources::PhotonStatistics;
use qkd_core::{cv, dpr, dv};

/// The platforms of the comparison, plus the auxiliary single-point modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    /// BB84 with a perfect single-photon source.
    SinglePhoton,
    /// BB84, weak coherent pulses, no decoy states.
    Wcp,
    /// BB84, weak coherent pulses with decoy states.
    Decoy,
    /// Entanglement-based BB84 (cw-pumped pair source).
    Eb,
    /// CV Gaussian modulation, collective attacks.
    Cv,
    /// COW under the two-pulse attack family (stands in for the
    /// distributed-phase-reference platforms).
    Cow,
    /// CV Gaussian modulation, individual attacks.
    CvIndividual,
    /// DPS under the beam-splitting attack (errorless curve).
    DpsBs,
    /// COW under the beam-splitting attack (errorless curve).
    CowBs,
}

impl Protocol {
    /// The six curves of the platform-comparison figures.
    pub const COMPARISON: [Protocol; 6] = [
        Protocol::SinglePhoton,
        Protocol::Wcp,
        Protocol::Decoy,
        Protocol::Eb,
        Protocol::Cv,
        Protocol::Cow,
    ];

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "single-photon" | "1ph" => Protocol::SinglePhoton,
            "wcp" | "wcp-nodecoy" => Protocol::Wcp,
            "decoy" => Protocol::Decoy,
            "eb" => Protocol::Eb,
            "cv" | "cv-collective" => Protocol::Cv,
            "cow" => Protocol::Cow,
            "cv-individual" => Protocol::CvIndividual,
            "dps-bs" => Protocol::DpsBs,
            "cow-bs" => Protocol::CowBs,
            other => bail!(
                "unknown protocol '{other}' (single-photon, wcp, decoy, eb, cv, cow, \
                 cv-individual, dps-bs, cow-bs)"
            ),
        })
    }

    /// Column label used in CSV headers.
    pub fn label(&self) -> &'static str {
        match self {
            Protocol::SinglePhoton => "single_photon",
            Protocol::Wcp => "wcp",
            Protocol::Decoy => "decoy",
            Protocol::Eb => "eb",
            Protocol::Cv => "cv",
            Protocol::Cow => "cow",
            Protocol::CvIndividual => "cv_individual",
            Protocol::DpsBs => "dps_bs",
            Protocol::CowBs => "cow_bs",
        }
    }

    /// Name of the source parameter this protocol optimizes, if any.
    pub fn opt_param(&self) -> Option<&'static str> {
        match self {
            Protocol::SinglePhoton | Protocol::CvIndividual => None,
            Protocol::Cv => Some("v"),
            Protocol::Eb => Some("pair_m2"),
            _ => Some("mu"),
        }
    }
}

/// Values that pin the otherwise-optimized source parameters for
/// single-point `rate` evaluations.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedSource {
    /// Laser intensity / pulse mean photon number.
    pub mu: Option<f64>,
    /// EB pair parameter `mu' dt`.
    pub pair_m2: Option<f64>,
    /// CV modulation variance `v`.
    pub v_modulation: Option<f64>,
    /// Direct QBER override (single-photon and EB only): evaluate the
    /// formulas at this observed error rate instead of the channel model.
    pub qber: Option<f64>,
}

fn dv_link(dev: &ResolvedDevice, t: f64) -> Result<LinkParams> {
    Ok(LinkParams::new(
        t,
        dev.t_bob,
        dev.eta,
        dev.p_dark,
        dev.visibility,
        1.0,
    )?)
}

fn eb_link(dev: &ResolvedDevice, t: f64) -> Result<LinkParams> {
    Ok(LinkParams::new(
        t,
        dev.t_bob,
        dev.eta,
        dev.p_dark,
        dev.visibility_eb,
        1.0,
    )?)
}

fn override_qber(stats: &mut qkd_core::ExpectedStats, qber: Option<f64>) {
    if let Some(q) = qber {
        stats.qber = q;
        stats.eps1 = q;
    }
}

/// Evaluates one protocol at channel transmittance `t`, normalized to the
/// source rate (`K / nu_S`). Source parameters in `fixed` suppress the
/// corresponding optimization.
pub fn evaluate(
    protocol: Protocol,
    dev: &ResolvedDevice,
    t: f64,
    fixed: &FixedSource,
) -> Result<RateResult> {
    let ec = EcModel::new(dev.f_ec)?;
    Ok(match protocol {
        Protocol::SinglePhoton => {
            let lp = dv_link(dev, t)?;
            let mut stats = expected_dv_stats(&PhotonStatistics::SinglePhoton, &lp);
            override_qber(&mut stats, fixed.qber);
            dv::rate_bb84_single_photon(&stats, &ec)
        }
        Protocol::Wcp => {
            let lp = dv_link(dev, t)?;
            match fixed.mu {
                Some(mu) => {
                    dv::rate_bb84_wcp_nodecoy(&PhotonStatistics::poissonian(mu)?, &lp, &ec)
                }
                None => dv::optimize_wcp_nodecoy(&lp, &ec),
            }
        }
        Protocol::Decoy => {
            let lp = dv_link(dev, t)?;
            match fixed.mu {
                Some(mu) => dv::rate_bb84_decoy(&PhotonStatistics::poissonian(mu)?, &lp, &ec),
                None => dv::optimize_decoy(&lp, &ec),
            }
        }
        Protocol::Eb => {
            let lp = eb_link(dev, t)?;
            match fixed.pair_m2 {
                Some(m2) => {
                    let ps = PhotonStatistics::heralded_pair_cw(m2, 1.0)?;
                    let mut stats = expected_eb_stats(&ps, &lp, m2, 1.0)?;
                    override_qber(&mut stats, fixed.qber);
                    dv::rate_bb84_eb(&stats, dev.zeta_eb, &ec)?
                }
                None => dv::optimize_eb(&lp, dev.zeta_eb, &ec),
            }
        }
        Protocol::Cv => match fixed.v_modulation {
            Some(v) => {
                let cs = cv::CvState::new(v, t, dev.cv_eta, dev.cv_v_el, dev.cv_epsilon, dev.cv_beta)?;
                cv::rate_cv_collective(&cs, 1.0)?
            }
            None => cv::optimize_cv_collective(
                t,
                dev.cv_eta,
                dev.cv_v_el,
                dev.cv_epsilon,
                dev.cv_beta,
                1.0,
            )?,
        },
        Protocol::CvIndividual => {
            let v = fixed.v_modulation.unwrap_or(1e4);
            let cs = cv::CvState::new(v, t, dev.cv_eta, dev.cv_v_el, dev.cv_epsilon, dev.cv_beta)?;
            cv::rate_cv_individual(&cs, 1.0)
        }
        Protocol::Cow => {
            let lp = dv_link(dev, t)?;
            let template = dpr::DprParams::new(
                0.0,
                lp.tau(),
                dev.visibility,
                dev.eps_cow,
                0.0,
                1.0,
                dev.p_dark,
            )?;
            match fixed.mu {
                Some(mu) => {
                    dpr::rate_cow_twopulse(&dpr::DprParams { mu, ..template }, &lp, &ec)
                }
                None => dpr::optimize_cow_twopulse(&template, &lp, &ec),
            }
        }
        Protocol::DpsBs => {
            let lp = dv_link(dev, t)?;
            let mu = fixed.mu.unwrap_or(0.2);
            dpr::rate_dps_bs(&dpr::DprParams::new(
                mu,
                lp.tau(),
                dev.visibility,
                0.0,
                0.0,
                1.0,
                dev.p_dark,
            )?)
        }
        Protocol::CowBs => {
            let lp = dv_link(dev, t)?;
            let mu = fixed.mu.unwrap_or(0.2);
            dpr::rate_cow_bs(&dpr::DprParams::new(
                mu,
                lp.tau(),
                dev.visibility,
                0.0,
                0.0,
                1.0,
                dev.p_dark,
            )?)
        }
    })
}

/// Objective for the bracketing report of `optimize`: `K(x)` with `x` the
/// protocol's source parameter at fixed channel.
pub fn objective(
    protocol: Protocol,
    dev: &ResolvedDevice,
    t: f64,
) -> Result<(impl Fn(f64) -> f64 + '_, (f64, f64))> {
    let dev = *dev;
    let range = match protocol {
        Protocol::Cv => (1.0 + 1e-9, 1e4),
        Protocol::Eb => (1e-9, 0.5),
        Protocol::Cow => (1e-8, (0.1 / t.max(1e-300)).min(2.0)),
        Protocol::Wcp | Protocol::Decoy => (1e-8, 3.0),
        _ => bail!(
            "protocol '{}' has no source parameter to optimize",
            protocol.label()
        ),
    };
    let f = move |x: f64| {
        let fixed = match protocol {
            Protocol::Cv => FixedSource {
                v_modulation: Some(x),
                ..Default::default()
            },
            Protocol::Eb => FixedSource {
                pair_m2: Some(x),
                ..Default::default()
            },
            _ => FixedSource {
                mu: Some(x),
                ..Default::default()
            },
        };
        evaluate(protocol, &dev, t, &fixed)
            .map(|r| r.key_rate)
            .unwrap_or(0.0)
    };
    Ok((f, range))
}
