//! `qkdrate`: secret-key-rate evaluations, platform-comparison sweeps,
//! source-parameter optimization, a Monte Carlo BB84 simulator, repeater
//! and network-cost models, and SVG plotting of the emitted CSVs.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 infeasible
//! result (no positive key rate).

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qkd_cli::config::{resolve_device, BoundKind, FileConfig, ResolvedDevice};
use qkd_cli::protocol::{evaluate, objective, FixedSource, Protocol};
use qkd_cli::svg::{render, PlotSpec};
use qkd_cli::sweep::{repeater_table, run_sweep, SweepVar, Table};
use qkd_core::math::fiber_transmittance;
use qkd_core::optimize::scan_log_grid;
use qkd_core::repeater::{
    network_cost, NetworkSpec, RepeaterParams,
};
use qkd_core::sim::{final_key_length, run_bb84, SimConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qkdrate",
    version,
    about = "Secret-key-rate models and platform comparison for QKD"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Device parameter set (1: state of the art, 2: optimistic).
    #[arg(long, global = true)]
    set: Option<u8>,
    /// Output path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Grid size of sweeps and optimizer scans.
    #[arg(long, global = true)]
    grid: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one protocol at a single channel point.
    Rate {
        #[command(flatten)]
        common: CommonArgs,
        /// Protocol name (single-photon, wcp, decoy, eb, cv, cow, ...).
        #[arg(long)]
        protocol: Option<String>,
        /// Channel transmittance t.
        #[arg(long, conflicts_with = "distance_km")]
        t: Option<f64>,
        /// Distance in km (converted through the fiber loss model).
        #[arg(long)]
        distance_km: Option<f64>,
        /// Fix the laser intensity instead of optimizing it.
        #[arg(long)]
        mu: Option<f64>,
        /// Fix the EB pair parameter mu' dt.
        #[arg(long)]
        pair_m2: Option<f64>,
        /// Fix the CV modulation variance.
        #[arg(long)]
        v_modulation: Option<f64>,
        /// Override the observed QBER (single-photon / eb).
        #[arg(long)]
        qber: Option<f64>,
    },
    /// Sweep a channel variable and emit one CSV row per grid point.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Sweep variable: transmittance | distance | qber | fidelity |
        /// spacing.
        #[arg(long)]
        sweep: Option<String>,
        /// Comma-separated protocols (default: the six comparison curves).
        #[arg(long)]
        protocol: Option<String>,
        /// Lower end of the sweep range.
        #[arg(long)]
        lo: Option<f64>,
        /// Upper end of the sweep range.
        #[arg(long)]
        hi: Option<f64>,
        /// Bound scenario: lower | calibrated-upper.
        #[arg(long)]
        bound: Option<String>,
    },
    /// Optimize a protocol's source parameter at one channel point and
    /// report bracketing evidence.
    Optimize {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        protocol: Option<String>,
        #[arg(long, conflicts_with = "distance_km")]
        t: Option<f64>,
        #[arg(long)]
        distance_km: Option<f64>,
    },
    /// Run the Monte Carlo BB84 simulator.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        pulses: Option<u64>,
        /// Intercept-resend probability.
        #[arg(long)]
        p_intercept: Option<f64>,
        #[arg(long)]
        visibility: Option<f64>,
        /// Total transmission probability.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        f_ec: Option<f64>,
        /// Fraction of the sifted key removed in privacy amplification
        /// (default: from the empirical QBER and Eve fraction).
        #[arg(long)]
        pa_rate: Option<f64>,
    },
    /// Render a sweep CSV as an SVG line plot.
    Plot {
        #[command(flatten)]
        common: CommonArgs,
        /// Input CSV (from `sweep`, `repeater` or `network-cost`).
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated columns to draw (default: all).
        #[arg(long)]
        columns: Option<String>,
        /// Plot title.
        #[arg(long)]
        title: Option<String>,
        /// Force a logarithmic x axis.
        #[arg(long)]
        log_x: bool,
    },
    /// Cost curve of a linear trusted-relay network and its optimal
    /// device spacing.
    NetworkCost {
        #[command(flatten)]
        common: CommonArgs,
        /// Point-to-point protocol supplying K(l); omit to use the
        /// analytic t^k model.
        #[arg(long)]
        protocol: Option<String>,
        /// Rate-scaling exponent k of the t^k model.
        #[arg(long)]
        exponent: Option<f64>,
        /// End-to-end distance L in km.
        #[arg(long)]
        total_km: Option<f64>,
        /// Target end-to-end key rate in Hz.
        #[arg(long)]
        k_target_hz: Option<f64>,
        /// Largest spacing to scan (km).
        #[arg(long)]
        max_spacing_km: Option<f64>,
    },
    /// Direct link vs two-link repeater rates over distance.
    Repeater {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest distance to tabulate (km).
        #[arg(long)]
        max_km: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version go to stdout with success; real usage
            // errors exit 1.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_config(common: &CommonArgs) -> Result<(FileConfig, Option<u8>)> {
    let file = match &common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let set = common
        .set
        .or_else(|| file.scenario.as_ref().and_then(|s| s.set));
    Ok((file, set))
}

fn device(common: &CommonArgs) -> Result<(FileConfig, ResolvedDevice)> {
    let (file, set) = load_config(common)?;
    let dev = resolve_device(set, &file)?;
    Ok((file, dev))
}

fn channel_point(
    dev: &ResolvedDevice,
    t: Option<f64>,
    distance_km: Option<f64>,
    file: &FileConfig,
) -> Result<f64> {
    if let Some(t) = t {
        return Ok(t);
    }
    if let Some(l) = distance_km {
        return Ok(fiber_transmittance(dev.alpha_db_per_km, l)?.value());
    }
    if let Some(t) = file.link.as_ref().and_then(|l| l.t) {
        return Ok(t);
    }
    bail!("missing field link.t: pass --t or --distance-km or set it in the config")
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Rate {
            common,
            protocol,
            t,
            distance_km,
            mu,
            pair_m2,
            v_modulation,
            qber,
        } => {
            let (file, dev) = device(&common)?;
            let name = protocol
                .or_else(|| {
                    file.scenario
                        .as_ref()
                        .and_then(|s| s.protocol.clone())
                })
                .ok_or_else(|| anyhow!("missing field scenario.protocol: pass --protocol"))?;
            let proto = Protocol::parse(&name)?;
            let t = channel_point(&dev, t, distance_km, &file)?;
            let source = file.source.clone().unwrap_or_default();
            let cv = file.cv.clone().unwrap_or_default();
            let fixed = FixedSource {
                mu: mu.or(source.mu),
                pair_m2: pair_m2.or(source.pair_m2),
                v_modulation: v_modulation.or(cv.v_modulation),
                qber,
            };
            let r = evaluate(proto, &dev, t, &fixed)?;
            println!("protocol: {}", proto.label());
            println!("t: {t}");
            println!("rate_per_pulse: {}", r.rate);
            println!("qber: {}", r.qber);
            println!("eve_info_bits: {}", r.eve_info);
            println!("secret_fraction: {}", r.secret_fraction);
            println!("key_rate_per_pulse: {}", r.key_rate);
            if let Some(m) = r.mu_opt {
                println!("{}: {m}", proto.opt_param().unwrap_or("param"));
            }
            println!("feasible: {}", r.feasible);
            Ok(if r.feasible && r.key_rate > 0.0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Cmd::Sweep {
            common,
            sweep,
            protocol,
            lo,
            hi,
            bound,
        } => {
            let (file, dev) = device(&common)?;
            let scenario = file.scenario.clone().unwrap_or_default();
            let var: SweepVar = sweep
                .or(scenario.sweep)
                .unwrap_or_else(|| "transmittance".into())
                .parse()?;
            let protocols: Vec<Protocol> = match protocol {
                Some(orders) => orders
                    .split(',')
                    .map(|s| Protocol::parse(s.trim()))
                    .collect::<Result<_>>()?,
                None => Protocol::COMPARISON.to_vec(),
            };
            let (def_lo, def_hi) = match var {
                SweepVar::Transmittance => (1e-5, 1.0),
                SweepVar::Distance | SweepVar::Spacing => (1.0, 200.0),
                SweepVar::Qber => (1e-3, 0.2),
                SweepVar::Fidelity => (0.75, 1.0),
            };
            let lo = lo.or(scenario.lo).unwrap_or(def_lo);
            let hi = hi.or(scenario.hi).unwrap_or(def_hi);
            let grid = common.grid.or(scenario.grid).unwrap_or(80);
            let bound: BoundKind = bound
                .or(scenario.bound)
                .unwrap_or_else(|| "lower".into())
                .parse()?;
            let table = run_sweep(var, &protocols, &dev, lo, hi, grid, bound)?;
            let out = common
                .out
                .or_else(|| scenario.out.clone().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("sweep.csv"));
            table.write(&out)?;
            eprintln!("wrote {} rows to {}", table.rows.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Optimize {
            common,
            protocol,
            t,
            distance_km,
        } => {
            let (file, dev) = device(&common)?;
            let name = protocol
                .or_else(|| file.scenario.as_ref().and_then(|s| s.protocol.clone()))
                .ok_or_else(|| anyhow!("missing field scenario.protocol: pass --protocol"))?;
            let proto = Protocol::parse(&name)?;
            let t = channel_point(&dev, t, distance_km, &file)?;
            let (f, (lo, hi)) = objective(proto, &dev, t)?;
            let coarse = common.grid.unwrap_or(80);
            let scan = scan_log_grid(&f, lo, hi, coarse);
            if !scan.unimodal {
                eprintln!(
                    "warning: coarse grid is not unimodal; falling back to a dense scan"
                );
            }
            let r = evaluate(proto, &dev, t, &FixedSource::default())?;
            println!("protocol: {}", proto.label());
            println!("t: {t}");
            println!("unimodal_coarse_grid: {}", scan.unimodal);
            match r.mu_opt {
                Some(x) => {
                    println!("{}_opt: {x}", proto.opt_param().unwrap_or("param"));
                    println!("key_rate_per_pulse: {}", r.key_rate);
                    // Bracketing evidence: coarse-grid neighbors of the
                    // optimum evaluate lower.
                    let i = scan.best;
                    let (il, ir) = (i.saturating_sub(1), (i + 1).min(scan.xs.len() - 1));
                    println!(
                        "bracket: K({:e}) = {:e} <= K_opt; K({:e}) = {:e} <= K_opt",
                        scan.xs[il], scan.ys[il], scan.xs[ir], scan.ys[ir]
                    );
                    if scan.ys[il] > r.key_rate || scan.ys[ir] > r.key_rate {
                        bail!("optimizer returned a non-bracketing optimum");
                    }
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("feasible: false");
                    Ok(ExitCode::from(2))
                }
            }
        }
        Cmd::Simulate {
            common,
            pulses,
            p_intercept,
            visibility,
            t,
            f_ec,
            pa_rate,
        } => {
            let (file, _) = load_config(&common)?;
            let sim = file.sim.clone().unwrap_or_default();
            let cfg = SimConfig {
                n_pulses: pulses.or(sim.pulses).unwrap_or(1_000_000),
                p_intercept: p_intercept.or(sim.p_intercept).unwrap_or(0.0),
                visibility: visibility.or(sim.visibility).unwrap_or(1.0),
                t_total: t.or(sim.t_total).unwrap_or(1.0),
                seed: common.seed.or(sim.seed).unwrap_or(1),
                f_ec: f_ec.or(sim.f_ec).unwrap_or(1.0),
                pa_rate: 0.0,
            };
            // First pass estimates the removal fraction from the run
            // itself unless the caller pinned it.
            let probe = run_bb84(&cfg)?;
            let pa = match pa_rate.or(sim.pa_rate) {
                Some(r) => r,
                None => {
                    let keep = final_key_length(
                        probe.n_sifted,
                        probe.qber_hat,
                        probe.eve_fraction,
                        cfg.f_ec,
                    );
                    1.0 - keep as f64 / probe.n_sifted.max(1) as f64
                }
            };
            let out = run_bb84(&SimConfig {
                pa_rate: pa,
                ..cfg
            })?;
            println!("n_pulses: {}", cfg.n_pulses);
            println!("n_sifted: {}", out.n_sifted);
            println!("n_errors: {}", out.n_errors);
            println!("qber_hat: {}", out.qber_hat);
            println!("eve_fraction: {}", out.eve_fraction);
            println!("pa_rate: {pa}");
            println!("final_key_bits: {}", out.key_bits.len());
            if let Some(path) = &common.out {
                let mut table = Table {
                    header: vec![
                        "n_pulses".into(),
                        "n_sifted".into(),
                        "n_errors".into(),
                        "qber_hat".into(),
                        "eve_fraction".into(),
                        "final_key_bits".into(),
                        "seed".into(),
                    ],
                    rows: vec![vec![
                        Some(cfg.n_pulses as f64),
                        Some(out.n_sifted as f64),
                        Some(out.n_errors as f64),
                        Some(out.qber_hat),
                        Some(out.eve_fraction),
                        Some(out.key_bits.len() as f64),
                        Some(cfg.seed as f64),
                    ]],
                };
                // Key digest row keeps the CSV compact while remaining
                // reproducible: first 64 key bits as an integer.
                let head: u64 = out
                    .key_bits
                    .iter()
                    .take(64)
                    .enumerate()
                    .fold(0, |acc, (i, &b)| acc | ((b as u64) << i));
                table.header.push("key_head_u64".into());
                table.rows[0].push(Some(head as f64));
                table.write(path)?;
                eprintln!("wrote outcome to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Plot {
            common,
            input,
            columns,
            title,
            log_x,
        } => {
            let text = std::fs::read_to_string(&input)
                .with_context(|| format!("cannot read {}", input.display()))?;
            let table = Table::parse_csv(&text)?;
            let spec = PlotSpec {
                columns: columns
                    .map(|c| c.split(',').map(|s| s.trim().to_string()).collect())
                    .unwrap_or_default(),
                title: title.unwrap_or_else(|| input.display().to_string()),
                log_x: if log_x { Some(true) } else { None },
            };
            let svg = render(&table, &spec)?;
            let out = common
                .out
                .unwrap_or_else(|| input.with_extension("svg"));
            std::fs::write(&out, svg)
                .with_context(|| format!("cannot write {}", out.display()))?;
            eprintln!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::NetworkCost {
            common,
            protocol,
            exponent,
            total_km,
            k_target_hz,
            max_spacing_km,
        } => {
            let (file, dev) = device(&common)?;
            let net = file.network.clone().unwrap_or_default();
            let spec = NetworkSpec {
                total_km: total_km.or(net.total_km).unwrap_or(500.0),
                k_target: k_target_hz.or(net.k_target_hz).unwrap_or(1000.0),
                device_cost: net.device_cost.unwrap_or(1.0),
            };
            let alpha = net.alpha_db_per_km.unwrap_or(dev.alpha_db_per_km);
            let grid_n = common.grid.unwrap_or(400);
            let max_l = max_spacing_km.unwrap_or(120.0);
            let grid: Vec<f64> = (1..=grid_n)
                .map(|i| max_l * i as f64 / grid_n as f64)
                .collect();
            let rate_fn: Box<dyn Fn(f64) -> f64 + Sync> = match (&protocol, exponent) {
                (Some(name), _) => {
                    let proto = Protocol::parse(name)?;
                    Box::new(move |l: f64| {
                        let t = fiber_transmittance(alpha, l)
                            .map(|p| p.value())
                            .unwrap_or(0.0);
                        evaluate(proto, &dev, t, &FixedSource::default())
                            .map(|r| r.key_rate)
                            .unwrap_or(0.0)
                    })
                }
                (None, k) => {
                    let k = k.or(net.exponent).unwrap_or(1.0);
                    Box::new(move |l: f64| 10f64.powf(-alpha * l * k / 10.0))
                }
            };
            let (curve, l_opt) = network_cost(&spec, &rate_fn, &grid);
            let table = Table {
                header: vec![
                    "spacing_km".into(),
                    "key_rate_per_pulse".into(),
                    "cost".into(),
                    "figure_of_merit".into(),
                ],
                rows: curve
                    .iter()
                    .map(|c| {
                        vec![
                            Some(c.spacing_km),
                            Some(c.key_rate),
                            c.cost.is_finite().then_some(c.cost),
                            Some(c.spacing_km * c.key_rate),
                        ]
                    })
                    .collect(),
            };
            if let Some(path) = &common.out {
                table.write(path)?;
                eprintln!("wrote cost curve to {}", path.display());
            }
            match l_opt {
                Some(l) => {
                    println!("l_opt_km: {l}");
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("l_opt_km: none (no feasible spacing)");
                    Ok(ExitCode::from(2))
                }
            }
        }
        Cmd::Repeater { common, max_km } => {
            let (file, _) = load_config(&common)?;
            let rep = file.repeater.clone().unwrap_or_default();
            let base = RepeaterParams::new(
                rep.nu_pulse_hz.unwrap_or(1e10),
                rep.eta.unwrap_or(0.5),
                rep.eta_m.unwrap_or(0.9),
                rep.p_m.unwrap_or(0.9),
                rep.n_modes.unwrap_or(1000),
                rep.t_m_s.unwrap_or(10.0),
                rep.fidelity.unwrap_or(0.95),
                rep.alpha_db_per_km.unwrap_or(0.2),
                1.0,
            )?;
            let table = repeater_table(&base, max_km.unwrap_or(700.0), common.grid.unwrap_or(140))?;
            let out = common
                .out
                .unwrap_or_else(|| PathBuf::from("repeater.csv"));
            table.write(&out)?;
            eprintln!("wrote {} rows to {}", table.rows.len(), out.display());
            // Report the crossover where the repeater overtakes the
            // direct link, when it happens inside the tabulated range.
            let (k1, k2) = (
                table.column("k1_hz").unwrap(),
                table.column("k2_a_hz").unwrap(),
            );
            let cross = table
                .rows
                .iter()
                .find(|r| r[k2].unwrap() > r[k1].unwrap() && r[k2].unwrap() > 0.0)
                .map(|r| r[0].unwrap());
            match cross {
                Some(l) => println!("crossover_km: {l}"),
                None => println!("crossover_km: none"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
