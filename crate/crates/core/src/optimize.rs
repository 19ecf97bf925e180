//! One-dimensional search utilities shared by the rate optimizers.
//!
//! The source-parameter optimizations (intensity `mu`, modulation variance
//! `v`) are unimodal in every regime treated here, which a coarse grid scan
//! verifies before a golden-section refinement narrows the bracket.

/// Result of a coarse grid scan used to bracket a maximum.
#[derive(Debug, Clone)]
pub struct GridScan {
    /// Scanned abscissas.
    pub xs: Vec<f64>,
    /// Objective values at `xs`.
    pub ys: Vec<f64>,
    /// Index of the best grid point.
    pub best: usize,
    /// Whether the scan is unimodal (single local maximum up to ties).
    pub unimodal: bool,
}

/// Scans `f` on a logarithmically spaced grid over `[lo, hi]`.
pub fn scan_log_grid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> GridScan {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (llo, lhi) = (lo.ln(), hi.ln());
    let xs: Vec<f64> = (0..=n)
        .map(|i| (llo + (lhi - llo) * i as f64 / n as f64).exp())
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let best = ys
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    // Count strict direction changes; a unimodal profile has at most one
    // rise-to-fall transition. Flat stretches (clamped zero rates) are
    // ignored.
    let mut dirs = Vec::new();
    for w in ys.windows(2) {
        let d = w[1] - w[0];
        if d != 0.0 {
            dirs.push(d > 0.0);
        }
    }
    let changes = dirs.windows(2).filter(|w| w[0] != w[1]).count();
    let unimodal = changes <= 1;
    GridScan {
        xs,
        ys,
        best,
        unimodal,
    }
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
///
/// Stops when the bracket no longer improves the best value by more than
/// `rel_tol` relative, or after `max_iter` iterations. Returns `(x, f(x))`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let max_iter = 200;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
        let best = f1.max(f2);
        let spread = (f1 - f2).abs();
        if spread <= rel_tol * best.abs().max(f64::MIN_POSITIVE) && (b - a) <= 1e-12 * b.abs() + 1e-300 {
            break;
        }
        if (b - a) <= rel_tol * (a.abs() + b.abs()) {
            break;
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximizes `f` over a logarithmic domain `[lo, hi]`: coarse scan, then
/// golden-section refinement inside the bracketing neighbors of the best
/// grid point. Falls back to a dense grid when the coarse scan is not
/// unimodal. Returns `(x_opt, f_max, scan)`.
pub fn maximize_log(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    coarse: usize,
) -> (f64, f64, GridScan) {
    let scan = scan_log_grid(&f, lo, hi, coarse);
    let scan = if scan.unimodal {
        scan
    } else {
        // Non-unimodal coarse profile: re-scan densely before refining.
        scan_log_grid(&f, lo, hi, coarse * 20)
    };
    let i = scan.best;
    let a = scan.xs[i.saturating_sub(1)];
    let b = scan.xs[(i + 1).min(scan.xs.len() - 1)];
    let (x, fx) = golden_max(&f, a, b, 1e-9);
    if fx >= scan.ys[i] {
        (x, fx, scan)
    } else {
        (scan.xs[i], scan.ys[i], scan)
    }
}

/// Bisection root finder for a continuous `f` with `f(lo)` and `f(hi)` of
/// opposite sign. Runs a fixed number of iterations (60 halvings reach
/// ~1e-18 relative bracket width).
pub fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: u32) -> f64 {
    let flo = f(lo);
    assert!(
        (flo > 0.0) != (f(hi) > 0.0),
        "bisect_root requires a sign change on [{lo}, {hi}]"
    );
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
