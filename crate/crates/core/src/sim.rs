//! Qubit-level Monte Carlo BB84 simulator: source, intercept-resend
//! eavesdropper, depolarizing channel, loss, sifting, QBER estimation and
//! privacy amplification by Toeplitz hashing.
//!
//! Serves as an empirical oracle for the analytic rate formulas. Pulses
//! are simulated in fixed-size batches drawing from disjoint sub-streams
//! of the master seed, so results are reproducible bit-for-bit and the
//! tally merge is order-independent.

use crate::math::h_bits;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Simulation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Number of pulses Alice sends.
    pub n_pulses: u64,
    /// Probability that Eve intercept-resends a pulse.
    pub p_intercept: f64,
    /// Channel visibility; depolarization flips the encoded bit with
    /// probability `(1 - V)/2`.
    pub visibility: f64,
    /// Total transmission probability of a pulse.
    pub t_total: f64,
    /// Master seed; every run with the same config is bit-identical.
    pub seed: u64,
    /// Error-correction inefficiency for the key-length accounting.
    pub f_ec: f64,
    /// Fraction of the sifted key removed in privacy amplification.
    pub pa_rate: f64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p_intercept", self.p_intercept),
            ("visibility", self.visibility),
            ("t_total", self.t_total),
            ("pa_rate", self.pa_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    min: 0.0,
                    max: 1.0,
                });
            }
        }
        if self.n_pulses < 1 {
            return Err(Error::Regime("n_pulses must be at least 1".into()));
        }
        if !(self.f_ec >= 1.0) {
            return Err(Error::OutOfRange {
                name: "f_ec",
                value: self.f_ec,
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        Ok(())
    }
}

/// Tallies and final key of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    /// Sifted-key length (matching bases, detected pulses).
    pub n_sifted: u64,
    /// Errors in the sifted key.
    pub n_errors: u64,
    /// `n_errors / n_sifted` (0 for an empty sifted key).
    pub qber_hat: f64,
    /// Fraction of sifted bits Eve knows exactly (her basis matched
    /// Alice's on an intercepted pulse).
    pub eve_fraction: f64,
    /// Count of sifted bits Eve knows exactly.
    pub eve_hits: u64,
    /// Final bit sequence after privacy amplification.
    pub key_bits: Vec<bool>,
}

const BATCH: u64 = 1 << 16;

struct BatchTally {
    sifted: Vec<bool>,
    errors: u64,
    eve_hits: u64,
}

fn run_batch(cfg: &SimConfig, batch_index: u64, pulses: u64) -> BatchTally {
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    // Stream 0 is reserved for privacy amplification.
    rng.set_stream(batch_index + 1);
    let eps = (1.0 - cfg.visibility) / 2.0;
    let mut sifted = Vec::new();
    let mut errors = 0;
    let mut eve_hits = 0;
    for _ in 0..pulses {
        let alice_bit = rng.gen_bool(0.5);
        let alice_basis = rng.gen_bool(0.5);
        let mut basis = alice_basis;
        let mut bit = alice_bit;

        // Intercept-resend: Eve measures in a random basis and resends her
        // outcome state. A matching basis hands her the bit exactly.
        let mut eve_knows = false;
        if cfg.p_intercept > 0.0 && rng.gen_bool(cfg.p_intercept) {
            let eve_basis = rng.gen_bool(0.5);
            if eve_basis == basis {
                eve_knows = true;
            } else {
                bit = rng.gen_bool(0.5);
                basis = eve_basis;
            }
        }

        // Depolarization after Eve and before Bob: an independent
        // bit-flip in the current encoding basis.
        if eps > 0.0 && rng.gen_bool(eps) {
            bit = !bit;
        }

        // Loss acts on the (possibly resent) photon.
        if cfg.t_total < 1.0 && !rng.gen_bool(cfg.t_total) {
            continue;
        }

        let bob_basis = rng.gen_bool(0.5);
        let bob_bit = if bob_basis == basis {
            bit
        } else {
            rng.gen_bool(0.5)
        };

        if bob_basis == alice_basis {
            sifted.push(alice_bit);
            if bob_bit != alice_bit {
                errors += 1;
            }
            if eve_knows {
                eve_hits += 1;
            }
        }
    }
    BatchTally {
        sifted,
        errors,
        eve_hits,
    }
}

/// Runs the BB84 simulation: per pulse Alice draws a uniform (bit, basis),
/// Eve intercept-resends with probability `p_intercept`, the channel
/// depolarizes and loses the pulse, Bob measures in a uniform basis, and
/// sifting keeps matching bases. The sifted key is then hashed down by
/// [`privacy_amplify`] to `(1 - pa_rate)` of its length.
pub fn run_bb84(cfg: &SimConfig) -> Result<SimOutcome> {
    cfg.validate()?;
    let mut sifted = Vec::new();
    let mut errors = 0;
    let mut eve_hits = 0;
    let batches = cfg.n_pulses.div_ceil(BATCH);
    for b in 0..batches {
        let pulses = BATCH.min(cfg.n_pulses - b * BATCH);
        let tally = run_batch(cfg, b, pulses);
        sifted.extend_from_slice(&tally.sifted);
        errors += tally.errors;
        eve_hits += tally.eve_hits;
    }
    let n_sifted = sifted.len() as u64;
    let qber_hat = if n_sifted > 0 {
        errors as f64 / n_sifted as f64
    } else {
        0.0
    };
    let eve_fraction = if n_sifted > 0 {
        eve_hits as f64 / n_sifted as f64
    } else {
        0.0
    };
    let out_len = ((n_sifted as f64) * (1.0 - cfg.pa_rate)).floor() as usize;
    let key_bits = privacy_amplify(&sifted, out_len, cfg.seed)?;
    Ok(SimOutcome {
        n_sifted,
        n_errors: errors,
        qber_hat,
        eve_fraction,
        eve_hits,
        key_bits,
    })
}

fn pack_bits(bits: impl Iterator<Item = bool>, words: &mut Vec<u64>) {
    let mut word = 0u64;
    let mut filled = 0;
    for b in bits {
        if b {
            word |= 1 << filled;
        }
        filled += 1;
        if filled == 64 {
            words.push(word);
            word = 0;
            filled = 0;
        }
    }
    if filled > 0 {
        words.push(word);
    }
}

/// Privacy amplification by a seeded random binary Toeplitz matrix over
/// GF(2): `out[i] = XOR_j T[i][j] key[j]` with `T[i][j] = d[i - j + n - 1]`
/// for a diagonal bit string `d` drawn from the seed. The family is
/// two-universal, and the output is deterministic given the seed.
pub fn privacy_amplify(key: &[bool], out_len: usize, seed: u64) -> Result<Vec<bool>> {
    let n = key.len();
    if out_len > n {
        return Err(Error::OutOfRange {
            name: "out_len",
            value: out_len as f64,
            min: 0.0,
            max: n as f64,
        });
    }
    if out_len == 0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(0);

    // Substituting m = i + n - 1 - j turns each output bit into the parity
    // of d[i .. i + n) AND-ed with the reversed key, so the rows become
    // sliding windows over the packed diagonal bits.
    let mut key_rev = Vec::with_capacity(n / 64 + 1);
    pack_bits(key.iter().rev().copied(), &mut key_rev);
    let diag_bits = n + out_len - 1;
    let mut diag = vec![0u64; diag_bits / 64 + 2];
    for w in diag.iter_mut() {
        *w = rng.gen();
    }

    let key_words = n.div_ceil(64);
    let tail_bits = n % 64;
    let tail_mask = if tail_bits == 0 {
        u64::MAX
    } else {
        (1u64 << tail_bits) - 1
    };
    let mut out = Vec::with_capacity(out_len);
    for i in 0..out_len {
        let base = i / 64;
        let off = i % 64;
        let mut acc = 0u64;
        for w in 0..key_words {
            let window = if off == 0 {
                diag[base + w]
            } else {
                (diag[base + w] >> off) | (diag[base + w + 1] << (64 - off))
            };
            let masked = if w + 1 == key_words {
                window & tail_mask
            } else {
                window
            };
            acc ^= masked & key_rev[w];
        }
        out.push(acc.count_ones() % 2 == 1);
    }
    Ok(out)
}

/// Asymptotic final key length after error correction and privacy
/// amplification: `floor(n max(1 - f_EC h(q) - I_E, 0))`.
pub fn final_key_length(n_sifted: u64, qber_hat: f64, i_eve: f64, f_ec: f64) -> u64 {
    let fraction = (1.0 - f_ec * h_bits(qber_hat.clamp(0.0, 1.0)) - i_eve).max(0.0);
    (n_sifted as f64 * fraction).floor() as u64
}
