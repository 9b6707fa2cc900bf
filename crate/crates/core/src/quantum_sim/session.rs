//! Monte Carlo protocol sessions.
//!
//! A qubit-string session sends single qubits in one of three bases, keeps
//! rounds where Alice's and Bob's bases agree, and groups the surviving bits
//! big-endian into `n`-bit symbols (a partial trailing group is dropped). A
//! qudit session sends `2^n`-level systems in one of `2^n + 1` bases and is
//! simulated at the level of symbol outcome distributions.
//!
//! Randomness comes from ChaCha8 seeded with `seed`; shard `i` of a sharded
//! run uses stream `i`. The unsharded run is shard 0 of a one-shard run, so a
//! fixed `(seed, shards)` pair always reproduces the same statistics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimate::{empirical_information, ContingencyTable, InfoEstimate, SideInformation};
use super::state::{clone_attack, intercept_resend_round, Basis, OutcomeSampler};
use crate::error::{validation, Result};
use crate::infotheory::{binary_entropy_unchecked, xlog2y};
use crate::qubit_attack::{params_from_beta, string_information, symbol_disturbance};
use crate::qudit_attack::{qudit_disturbances, qudit_information, qudit_params_from_beta};
use crate::security_solver::Protocol;
use crate::MAX_SYMBOL_BITS;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Attack {
    None,
    /// Asymmetric cloner; `beta` is `β` for qubits and `β̃` for qudits.
    Cloner {
        beta: f64,
    },
    InterceptResend,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub protocol: Protocol,
    pub n: u32,
    pub rounds: u64,
    pub attack: Attack,
    pub seed: u64,
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_SYMBOL_BITS {
            return Err(validation(format!(
                "symbol width n = {} outside [1, {MAX_SYMBOL_BITS}]",
                self.n
            )));
        }
        if self.rounds == 0 {
            return Err(validation("rounds must be at least 1"));
        }
        if let Attack::Cloner { beta } = self.attack {
            if !(0.0..=1.0).contains(&beta) {
                return Err(validation(format!("cloner beta = {beta} outside [0, 1]")));
            }
        }
        Ok(())
    }

    fn dimension(&self) -> u32 {
        1u32 << self.n
    }
}

/// Unit in which `qber` is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorUnit {
    Qubit,
    Dit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionStats {
    pub protocol: Protocol,
    pub n: u32,
    pub rounds_sent: u64,
    pub rounds_sifted: u64,
    pub sift_fraction: f64,
    pub qber_unit: ErrorUnit,
    /// Sifted qubits or qudits, the denominator of `qber`.
    pub sifted_units: u64,
    pub qber: f64,
    /// Complete `2^n`-valued symbols assembled from the sifted key.
    pub symbols: u64,
    pub dit_disturbance: f64,
    pub bob_info: Option<InfoEstimate>,
    pub eve_info: Option<InfoEstimate>,
}

impl SessionStats {
    pub fn bob_info_empirical(&self) -> Option<f64> {
        self.bob_info.map(|e| e.bits)
    }

    pub fn eve_info_empirical(&self) -> Option<f64> {
        self.eve_info.map(|e| e.bits)
    }
}

/// Additive counters of one shard.
#[derive(Debug, Clone, Default)]
struct Tally {
    rounds_sent: u64,
    rounds_sifted: u64,
    units: u64,
    unit_errors: u64,
    symbols: u64,
    symbol_errors: u64,
    bob: ContingencyTable,
    eve: ContingencyTable,
}

impl Tally {
    fn merge(&mut self, other: &Tally) {
        self.rounds_sent += other.rounds_sent;
        self.rounds_sifted += other.rounds_sifted;
        self.units += other.units;
        self.unit_errors += other.unit_errors;
        self.symbols += other.symbols;
        self.symbol_errors += other.symbol_errors;
        self.bob.merge(&other.bob);
        self.eve.merge(&other.eve);
    }

    fn record_symbol(&mut self, flags: u32, alice: u32, bob: u32, eve: u32) {
        self.symbols += 1;
        self.symbol_errors += u64::from(alice != bob);
        self.bob.record(0, alice, bob);
        self.eve.record(flags, alice, eve);
    }

    fn finish(self, config: &SessionConfig) -> Result<SessionStats> {
        let ratio = |k: u64, n: u64| if n == 0 { 0.0 } else { k as f64 / n as f64 };
        let estimate = |t: &ContingencyTable, side| {
            if t.total() == 0 {
                Ok(None)
            } else {
                empirical_information(t, config.n, side).map(Some)
            }
        };
        Ok(SessionStats {
            protocol: config.protocol,
            n: config.n,
            rounds_sent: self.rounds_sent,
            rounds_sifted: self.rounds_sifted,
            sift_fraction: ratio(self.rounds_sifted, self.rounds_sent),
            qber_unit: match config.protocol {
                Protocol::QubitString => ErrorUnit::Qubit,
                Protocol::QuditMub => ErrorUnit::Dit,
            },
            sifted_units: self.units,
            qber: ratio(self.unit_errors, self.units),
            symbols: self.symbols,
            dit_disturbance: ratio(self.symbol_errors, self.symbols),
            bob_info: estimate(&self.bob, SideInformation::Ignored)?,
            eve_info: estimate(&self.eve, SideInformation::Used)?,
        })
    }
}

/// Bits of the symbol currently being assembled.
#[derive(Default)]
struct SymbolBuffer {
    len: u32,
    alice: u32,
    bob: u32,
    eve: u32,
    flags: u32,
}

impl SymbolBuffer {
    fn push(&mut self, alice: u8, bob: u8, eve: u8, flag: u8) {
        self.alice = (self.alice << 1) | u32::from(alice);
        self.bob = (self.bob << 1) | u32::from(bob);
        self.eve = (self.eve << 1) | u32::from(eve);
        self.flags = (self.flags << 1) | u32::from(flag);
        self.len += 1;
    }
}

fn simulate_qubits(config: &SessionConfig, rounds: u64, rng: &mut ChaCha8Rng) -> Result<Tally> {
    let samplers = match config.attack {
        Attack::Cloner { beta } => {
            let params = params_from_beta(beta)?;
            let mut table = Vec::with_capacity(6);
            for basis in Basis::ALL {
                for k in 0..2 {
                    table.push(OutcomeSampler::new(&clone_attack(k, basis, &params)?)?);
                }
            }
            Some(table)
        }
        _ => None,
    };

    let mut tally = Tally {
        rounds_sent: rounds,
        ..Tally::default()
    };
    let mut buf = SymbolBuffer::default();
    for _ in 0..rounds {
        let bit: u8 = rng.random_range(0..2);
        let alice_basis = rng.random_range(0..3usize);
        let bob_basis = rng.random_range(0..3usize);
        if alice_basis != bob_basis {
            continue;
        }
        tally.rounds_sifted += 1;

        let (bob, eve, flag) = match config.attack {
            // Eve has nothing to go on and guesses.
            Attack::None => (bit, rng.random_range(0..2), 0),
            Attack::Cloner { .. } => {
                let sampler =
                    &samplers.as_ref().expect("cloner samplers")[2 * alice_basis + bit as usize];
                let (b, e, m) = sampler.sample(rng);
                (b, e, e ^ m)
            }
            Attack::InterceptResend => {
                let basis = Basis::ALL[alice_basis];
                let r = intercept_resend_round(bit, basis, rng);
                (r.bob_bit, r.eve_bit, u8::from(r.eve_basis == basis))
            }
        };

        tally.units += 1;
        tally.unit_errors += u64::from(bob != bit);
        buf.push(bit, bob, eve, flag);
        if buf.len == config.n {
            tally.record_symbol(buf.flags, buf.alice, buf.bob, buf.eve);
            buf = SymbolBuffer::default();
        }
    }
    Ok(tally)
}

fn simulate_qudits(config: &SessionConfig, rounds: u64, rng: &mut ChaCha8Rng) -> Result<Tally> {
    let d = config.dimension();
    let bases = d + 1;
    let disturbances = match config.attack {
        Attack::Cloner { beta } => Some(qudit_disturbances(&qudit_params_from_beta(
            config.n, beta,
        )?)?),
        _ => None,
    };
    let wrong_symbol = |rng: &mut ChaCha8Rng, s: u32| (s + 1 + rng.random_range(0..d - 1)) % d;

    let mut tally = Tally {
        rounds_sent: rounds,
        ..Tally::default()
    };
    for _ in 0..rounds {
        let alice = rng.random_range(0..d);
        let alice_basis = rng.random_range(0..bases);
        let bob_basis = rng.random_range(0..bases);
        if alice_basis != bob_basis {
            continue;
        }
        tally.rounds_sifted += 1;

        let (bob, eve, flag) = match config.attack {
            Attack::None => (alice, rng.random_range(0..d), 0),
            Attack::Cloner { .. } => {
                let dist = disturbances.expect("qudit disturbances");
                if rng.random::<f64>() < dist.bob {
                    // Bob's copy is disturbed and Eve holds the symbol.
                    (wrong_symbol(rng, alice), alice, 1)
                } else if rng.random::<f64>() < dist.mu {
                    (alice, wrong_symbol(rng, alice), 0)
                } else {
                    (alice, alice, 0)
                }
            }
            Attack::InterceptResend => {
                // Mutually unbiased bases: a wrong guess of basis gives a
                // uniform outcome, and so does Bob's measurement of the resent
                // state.
                let eve_basis = rng.random_range(0..bases);
                if eve_basis == alice_basis {
                    (alice, alice, 1)
                } else {
                    let eve = rng.random_range(0..d);
                    (rng.random_range(0..d), eve, 0)
                }
            }
        };

        tally.units += 1;
        tally.unit_errors += u64::from(bob != alice);
        tally.record_symbol(flag, alice, bob, eve);
    }
    Ok(tally)
}

fn simulate_shard(config: &SessionConfig, rounds: u64, shard: u64) -> Result<Tally> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(shard);
    match config.protocol {
        Protocol::QubitString => simulate_qubits(config, rounds, &mut rng),
        Protocol::QuditMub => simulate_qudits(config, rounds, &mut rng),
    }
}

/// Runs a session on a single stream. This is the canonical deterministic
/// mode.
pub fn run_session(config: &SessionConfig) -> Result<SessionStats> {
    run_session_sharded(config, 1)
}

/// Splits the rounds over `shards` independent streams and merges the
/// counts. Results depend on `(seed, shards)` but not on thread scheduling.
pub fn run_session_sharded(config: &SessionConfig, shards: usize) -> Result<SessionStats> {
    config.validate()?;
    if shards == 0 {
        return Err(validation("shard count must be at least 1"));
    }
    let shards = shards as u64;
    let base = config.rounds / shards;
    let extra = config.rounds % shards;
    let tallies: Vec<Tally> = (0..shards)
        .into_par_iter()
        .map(|i| simulate_shard(config, base + u64::from(i < extra), i))
        .collect::<Result<_>>()?;

    let mut total = Tally::default();
    for t in &tallies {
        total.merge(t);
    }
    total.finish(config)
}

/// Closed-form expectations for the quantities a session measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub sift_fraction: f64,
    pub qber: f64,
    pub dit_disturbance: f64,
    pub info_bob: f64,
    pub info_eve: f64,
}

pub fn predict(config: &SessionConfig) -> Result<Prediction> {
    config.validate()?;
    let bits = f64::from(config.n);
    let d = f64::from(config.dimension());
    Ok(match (config.protocol, config.attack) {
        (Protocol::QubitString, Attack::None) => Prediction {
            sift_fraction: 1.0 / 3.0,
            qber: 0.0,
            dit_disturbance: 0.0,
            info_bob: bits,
            info_eve: 0.0,
        },
        (Protocol::QubitString, Attack::Cloner { beta }) => {
            let params = params_from_beta(beta)?;
            let pb = params.outcome_probabilities().pb;
            let point = string_information(config.n, &params)?;
            Prediction {
                sift_fraction: 1.0 / 3.0,
                qber: pb,
                dit_disturbance: point.disturbance,
                info_bob: point.info_bob,
                info_eve: point.info_eve,
            }
        }
        // Eve guesses the basis right a third of the time and then knows the
        // bit; otherwise Bob's result is a fair coin.
        (Protocol::QubitString, Attack::InterceptResend) => Prediction {
            sift_fraction: 1.0 / 3.0,
            qber: 1.0 / 3.0,
            dit_disturbance: symbol_disturbance(config.n, 1.0 / 3.0),
            info_bob: bits * (1.0 - binary_entropy_unchecked(1.0 / 3.0)),
            info_eve: bits / 3.0,
        },
        (Protocol::QuditMub, Attack::None) => Prediction {
            sift_fraction: 1.0 / (d + 1.0),
            qber: 0.0,
            dit_disturbance: 0.0,
            info_bob: bits,
            info_eve: 0.0,
        },
        (Protocol::QuditMub, Attack::Cloner { beta }) => {
            let point = qudit_information(&qudit_params_from_beta(config.n, beta)?)?;
            Prediction {
                sift_fraction: 1.0 / (d + 1.0),
                qber: point.d_bob,
                dit_disturbance: point.d_bob,
                info_bob: point.info_bob,
                info_eve: point.info_eve,
            }
        }
        (Protocol::QuditMub, Attack::InterceptResend) => {
            let err = (d - 1.0) / (d + 1.0);
            Prediction {
                sift_fraction: 1.0 / (d + 1.0),
                qber: err,
                dit_disturbance: err,
                info_bob: bits + xlog2y(1.0 - err, 1.0 - err) + xlog2y(err, err / (d - 1.0)),
                info_eve: bits / (d + 1.0),
            }
        }
    })
}

/// Binomial standard deviation of a rate estimated from `trials` draws.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// `(observed - expected) / σ`. `None` when `σ = 0` and the rates differ.
pub fn z_score(observed: f64, expected: f64, trials: u64) -> Option<f64> {
    let sigma = binomial_sigma(expected, trials);
    if observed == expected {
        Some(0.0)
    } else if sigma > 0.0 && trials > 0 {
        Some((observed - expected) / sigma)
    } else {
        None
    }
}
