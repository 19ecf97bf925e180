//! The comparison sweep engine: evaluates the selected protocols over a
//! grid of channel parameters and emits CSV.
//!
//! Grid points are evaluated concurrently; the CSV assembly collects the
//! results in index order, so the output is deterministic.

use crate::config::{BoundKind, ResolvedDevice};
use crate::protocol::{evaluate, FixedSource, Protocol};
use anyhow::{bail, Context, Result};
use qkd_core::math::fiber_transmittance;
use qkd_core::optimize::bisect_root;
use qkd_core::qubit;
use qkd_core::repeater::{rate_direct, rate_two_link, RepeaterParams};
use rayon::prelude::*;
use std::io::Write;
use std::path::Path;

/// Sweep abscissa selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    /// Channel transmittance `t` (log grid); the platform-comparison
    /// figure.
    Transmittance,
    /// Distance in km (linear grid); also emits the cost figure of merit
    /// `F = l K / nu_S` per protocol.
    Distance,
    /// QBER: secret fractions of the single-qubit bounds.
    Qber,
    /// Bell-measurement fidelity: repeater rates at fixed geometry.
    Fidelity,
    /// Device spacing of a linear network: alias of `Distance` with the
    /// same `F` columns.
    Spacing,
}

impl std::str::FromStr for SweepVar {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "transmittance" | "t" => SweepVar::Transmittance,
            "distance" | "l" => SweepVar::Distance,
            "qber" | "q" => SweepVar::Qber,
            "fidelity" | "f" => SweepVar::Fidelity,
            "spacing" => SweepVar::Spacing,
            other => bail!(
                "unknown sweep variable '{other}' \
                 (transmittance | distance | qber | fidelity | spacing)"
            ),
        })
    }
}

/// A sweep table: header plus rows of optional cells (None = empty cell,
/// for not-applicable entries).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    /// Serializes as comma-separated values with a header row; empty cell
    /// for None. Float formatting is shortest-roundtrip, so parsing the
    /// emitted file recovers the rows exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| c.map(|v| format!("{v}")).unwrap_or_default())
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Table> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader
            .headers()
            .context("missing CSV header")?
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.context("malformed CSV record")?;
            let mut row = Vec::with_capacity(header.len());
            for cell in record.iter() {
                if cell.is_empty() {
                    row.push(None);
                } else {
                    row.push(Some(cell.parse::<f64>().with_context(|| {
                        format!("cell '{cell}' is not a number")
                    })?));
                }
            }
            rows.push(row);
        }
        Ok(Table { header, rows })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)
            .with_context(|| format!("cannot create {}", path.display()))?;
        file.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn lin_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Runs the platform-comparison sweep.
///
/// For `Transmittance` the columns are `k_<proto>` (key rate per source
/// pulse, with the per-point source optimization) and `<param>_<proto>`
/// for the optimized parameter. `Distance`/`Spacing` add `f_<proto>`
/// (`l * K / nu_S`). With [`BoundKind::CalibratedUpper`] the WCP columns
/// gain `k_wcp_upper` / `k_decoy_upper` companions.
pub fn run_sweep(
    var: SweepVar,
    protocols: &[Protocol],
    dev: &ResolvedDevice,
    lo: f64,
    hi: f64,
    grid: usize,
    bound: BoundKind,
) -> Result<Table> {
    if grid < 2 {
        bail!("grid must have at least 2 points");
    }
    if !(lo < hi) || !(lo > 0.0) {
        bail!("sweep range must satisfy 0 < lo < hi (got {lo}..{hi})");
    }
    match var {
        SweepVar::Transmittance => comparison_sweep(protocols, dev, &log_grid(lo, hi, grid), None, bound),
        SweepVar::Distance | SweepVar::Spacing => {
            let ls = lin_grid(lo, hi, grid);
            comparison_sweep(protocols, dev, &ls, Some(dev.alpha_db_per_km), bound)
        }
        SweepVar::Qber => qber_sweep(&lin_grid(lo, hi, grid)),
        SweepVar::Fidelity => fidelity_sweep(&lin_grid(lo, hi, grid), dev),
    }
}

fn comparison_sweep(
    protocols: &[Protocol],
    dev: &ResolvedDevice,
    xs: &[f64],
    distance_alpha: Option<f64>,
    bound: BoundKind,
) -> Result<Table> {
    let mut header = vec![match distance_alpha {
        Some(_) => "l_km".to_string(),
        None => "t".to_string(),
    }];
    for p in protocols {
        header.push(format!("k_{}", p.label()));
        if let Some(param) = p.opt_param() {
            header.push(format!("{}_{}", param, p.label()));
        }
        if distance_alpha.is_some() {
            header.push(format!("f_{}", p.label()));
        }
    }
    if bound == BoundKind::CalibratedUpper {
        for p in [Protocol::Wcp, Protocol::Decoy] {
            if protocols.contains(&p) {
                header.push(format!("k_{}_upper", p.label()));
                header.push(format!("mu_{}_upper", p.label()));
            }
        }
    }

    let rows: Result<Vec<Vec<Option<f64>>>> = xs
        .par_iter()
        .map(|&x| {
            let t = match distance_alpha {
                Some(alpha) => fiber_transmittance(alpha, x)?.value(),
                None => x,
            };
            let mut row = vec![Some(x)];
            for p in protocols {
                let r = evaluate(*p, dev, t, &FixedSource::default())?;
                let k = if r.feasible { r.key_rate } else { 0.0 };
                row.push(Some(k));
                if p.opt_param().is_some() {
                    row.push(if r.feasible { r.mu_opt } else { None });
                }
                if distance_alpha.is_some() {
                    row.push(Some(x * k));
                }
            }
            if bound == BoundKind::CalibratedUpper {
                let lp = qkd_core::LinkParams::new(
                    t,
                    dev.t_bob,
                    dev.eta,
                    dev.p_dark,
                    dev.visibility,
                    1.0,
                )?;
                let ec = qkd_core::EcModel::new(dev.f_ec)?;
                for (p, decoy) in [(Protocol::Wcp, false), (Protocol::Decoy, true)] {
                    if protocols.contains(&p) {
                        let r = qkd_core::dv::optimize_upperbound_calibrated(&lp, &ec, decoy);
                        row.push(Some(if r.feasible { r.key_rate } else { 0.0 }));
                        row.push(if r.feasible { r.mu_opt } else { None });
                    }
                }
            }
            Ok(row)
        })
        .collect();
    Ok(Table {
        header,
        rows: rows?,
    })
}

fn qber_sweep(qs: &[f64]) -> Result<Table> {
    let header = vec![
        "q".to_string(),
        "r_bb84".to_string(),
        "r_sixstate".to_string(),
        "r_intercept_resend".to_string(),
    ];
    let rows = qs
        .iter()
        .map(|&q| {
            let h = qkd_core::math::binary_entropy(qkd_core::math::Probability::new(q)?);
            let bb84 = (1.0 - 2.0 * h).max(0.0);
            let six = (1.0 - h - qubit::eve_info_sixstate_depolarizing(q)?).max(0.0);
            let ir = (1.0 - h - 2.0 * q).max(0.0);
            Ok(vec![Some(q), Some(bb84), Some(six), Some(ir)])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { header, rows })
}

fn fidelity_sweep(fs: &[f64], dev: &ResolvedDevice) -> Result<Table> {
    let header = vec!["fidelity".to_string(), "k2_hz".to_string(), "k1_hz".to_string()];
    let base = RepeaterParams::new(
        1e10,
        0.5,
        0.9,
        0.9,
        1000,
        10.0,
        0.95,
        dev.alpha_db_per_km,
        500.0,
    )?;
    let rows = fs
        .iter()
        .map(|&f| {
            let rp = RepeaterParams {
                fidelity: f,
                ..base
            };
            Ok(vec![
                Some(f),
                Some(rate_two_link(&rp).key_rate),
                Some(rate_direct(&rp)),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { header, rows })
}

/// Repeater comparison table: direct link vs the two-link repeater for
/// the three memory/fidelity variants of the reference figure.
pub fn repeater_table(base: &RepeaterParams, max_km: f64, grid: usize) -> Result<Table> {
    if grid < 2 {
        bail!("grid must have at least 2 points");
    }
    let header = vec![
        "l_km".to_string(),
        "k1_hz".to_string(),
        "k2_a_hz".to_string(),
        "k2_b_hz".to_string(),
        "k2_c_hz".to_string(),
    ];
    let rows = lin_grid(1.0, max_km, grid)
        .into_iter()
        .map(|l| {
            let at = |n_modes: u32, fidelity: f64| {
                let rp = RepeaterParams {
                    n_modes,
                    fidelity,
                    length_km: l,
                    ..*base
                };
                rate_two_link(&rp).key_rate
            };
            let direct = rate_direct(&RepeaterParams {
                length_km: l,
                ..*base
            });
            vec![
                Some(l),
                Some(direct),
                Some(at(1000, 0.95)),
                Some(at(1000, 0.90)),
                Some(at(100, 0.95)),
            ]
        })
        .collect();
    Ok(Table { header, rows })
}

/// Largest abscissa with a positive value in `col` (the curve's cutoff).
pub fn cutoff_distance(table: &Table, col: &str) -> Option<f64> {
    let i = table.column(col)?;
    table
        .rows
        .iter()
        .filter(|r| r[i].is_some_and(|v| v > 0.0))
        .map(|r| r[0].unwrap())
        .fold(None, |acc, x| Some(acc.map_or(x, |a: f64| a.max(x))))
}

/// Smallest abscissa with a positive value in `col`.
pub fn onset(table: &Table, col: &str) -> Option<f64> {
    let i = table.column(col)?;
    table
        .rows
        .iter()
        .filter(|r| r[i].is_some_and(|v| v > 0.0))
        .map(|r| r[0].unwrap())
        .fold(None, |acc, x| Some(acc.map_or(x, |a: f64| a.min(x))))
}

/// Critical-QBER report used by the `rate` command summary.
pub fn critical_qbers() -> (f64, f64, f64) {
    let ir = bisect_root(
        |q| 1.0 - qkd_core::math::binary_entropy(qkd_core::math::Probability::new(q).unwrap()) - 2.0 * q,
        0.05,
        0.3,
        60,
    );
    (
        qubit::critical_qber_bb84(),
        qubit::critical_qber_sixstate(),
        ir,
    )
}
