//! Border disturbances: where Bob's information drops to Eve's.
//!
//! Below the border `I_B > I_E` and privacy amplification can distill a
//! secret key. Both protocols are solved by bisection on a bracket whose
//! endpoints are checked for a sign change first.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::infotheory::binary_entropy_unchecked;
use crate::qubit_attack::{params_from_pb, string_information, symbol_disturbance, ClonerParams};
use crate::qudit_attack::{qudit_information, qudit_params_from_beta, QuditClonerParams};
use crate::MAX_SYMBOL_BITS;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Every returned border satisfies `|I_B - I_E|` below this.
pub const MAX_RESIDUAL: f64 = 1e-9;

/// Residual the bisection aims for, leaving headroom under [`MAX_RESIDUAL`].
const TARGET_RESIDUAL: f64 = 1e-11;

/// Distance of the qudit bracket from the endpoints of `β̃ ∈ [0, 1]`.
pub const QUDIT_BRACKET_EPS: f64 = 1e-9;

const MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    /// `n` independent qubits in the six-state protocol.
    QubitString,
    /// One `2^n`-level system in `2^n + 1` mutually unbiased bases.
    QuditMub,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::QubitString => "qubit-string",
            Protocol::QuditMub => "qudit-mub",
        })
    }
}

fn check_bits(n: u32) -> Result<()> {
    if n == 0 || n > MAX_SYMBOL_BITS {
        return Err(validation(format!(
            "symbol width n = {n} outside [1, {MAX_SYMBOL_BITS}]"
        )));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(validation(format!(
            "tolerance {tol} must be positive and finite"
        )));
    }
    Ok(())
}

/// Bisection on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol` and `|f(mid)| <
/// max_residual`, or when the bracket can no longer be split in `f64`.
fn bisect<F>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_residual: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::Solver(format!(
            "no sign change on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"
        )));
    }
    let lo_sign = f_lo.signum();
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        let next = 0.5 * (lo + hi);
        if next == lo || next == hi {
            return Ok(next);
        }
        if hi - lo < tol && f(next).abs() < max_residual {
            return Ok(next);
        }
    }
    Err(Error::Solver(format!(
        "bisection did not converge in {MAX_ITER} iterations"
    )))
}

/// `I_B - I_E` per qubit, up to a positive factor: `h(q)(1 - pb) - h(pb)`.
fn qubit_gap(pb: f64) -> f64 {
    match params_from_pb(pb) {
        Ok(p) => {
            let o = p.outcome_probabilities();
            binary_entropy_unchecked(o.q) * (1.0 - o.pb) - binary_entropy_unchecked(o.pb)
        }
        Err(_) => f64::NAN,
    }
}

/// Per-qubit error rate at which Bob's and Eve's informations cross.
pub fn qubit_border(tol: f64) -> Result<f64> {
    check_tol(tol)?;
    bisect(qubit_gap, 0.0, 0.5, tol, f64::INFINITY)
}

/// The crossing is independent of `n`, so it is solved once per process.
fn cached_qubit_border() -> Result<f64> {
    static BORDER: OnceLock<f64> = OnceLock::new();
    if let Some(pb) = BORDER.get() {
        return Ok(*pb);
    }
    let pb = bisect(qubit_gap, 0.0, 0.5, 1e-15, TARGET_RESIDUAL)?;
    Ok(*BORDER.get_or_init(|| pb))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CrossingParams {
    Qubit(ClonerParams),
    Qudit(QuditClonerParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BorderResult {
    pub protocol: Protocol,
    pub n: u32,
    pub d: u64,
    pub border_disturbance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_qubit_pb: Option<f64>,
    pub crossing_params: CrossingParams,
    /// `|I_B - I_E|` at the returned parameters.
    pub residual: f64,
}

pub fn qubit_string_border(n: u32) -> Result<BorderResult> {
    check_bits(n)?;
    let pb = cached_qubit_border()?;
    let params = params_from_pb(pb)?;
    let point = string_information(n, &params)?;
    Ok(BorderResult {
        protocol: Protocol::QubitString,
        n,
        d: 1u64 << n,
        border_disturbance: symbol_disturbance(n, pb),
        per_qubit_pb: Some(pb),
        crossing_params: CrossingParams::Qubit(params),
        residual: (point.info_bob - point.info_eve).abs(),
    })
}

pub fn qudit_border(n: u32, tol: f64) -> Result<BorderResult> {
    check_bits(n)?;
    check_tol(tol)?;
    let gap =
        |beta_t: f64| match qudit_params_from_beta(n, beta_t).and_then(|p| qudit_information(&p)) {
            Ok(pt) => pt.info_bob - pt.info_eve,
            Err(_) => f64::NAN,
        };
    let beta_t = bisect(
        gap,
        QUDIT_BRACKET_EPS,
        1.0 - QUDIT_BRACKET_EPS,
        tol,
        TARGET_RESIDUAL,
    )?;
    let params = qudit_params_from_beta(n, beta_t)?;
    let point = qudit_information(&params)?;
    let residual = (point.info_bob - point.info_eve).abs();
    if residual >= MAX_RESIDUAL {
        return Err(Error::Solver(format!(
            "qudit border for n = {n} left residual {residual:e}"
        )));
    }
    Ok(BorderResult {
        protocol: Protocol::QuditMub,
        n,
        d: 1u64 << n,
        border_disturbance: point.d_bob,
        per_qubit_pb: None,
        crossing_params: CrossingParams::Qudit(params),
        residual,
    })
}

pub fn border(protocol: Protocol, n: u32, tol: f64) -> Result<BorderResult> {
    match protocol {
        Protocol::QubitString => {
            check_tol(tol)?;
            qubit_string_border(n)
        }
        Protocol::QuditMub => qudit_border(n, tol),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Figure1Row {
    pub n: u32,
    pub d: u64,
    pub border_qubit_string: f64,
    pub border_qudit_mub: f64,
}

/// Border disturbances of both protocols for `n = 1..=max_n`.
pub fn figure1_table(max_n: u32) -> Result<Vec<Figure1Row>> {
    check_bits(max_n)?;
    (1..=max_n)
        .map(|n| {
            let qubit = qubit_string_border(n)?;
            let qudit = qudit_border(n, DEFAULT_TOL)?;
            Ok(Figure1Row {
                n,
                d: 1u64 << n,
                border_qubit_string: qubit.border_disturbance,
                border_qudit_mub: qudit.border_disturbance,
            })
        })
        .collect()
}

/// Fraction of transmitted systems that survive sifting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateComparison {
    pub n: u32,
    pub qubit_sift_fraction: f64,
    pub qudit_sift_fraction: f64,
    /// Qubits transmitted per sifted `2^n`-valued symbol.
    pub qubits_per_sifted_dit: u32,
}

pub fn sifting_rates(n: u32) -> Result<RateComparison> {
    check_bits(n)?;
    Ok(RateComparison {
        n,
        qubit_sift_fraction: 1.0 / 3.0,
        qudit_sift_fraction: 1.0 / ((1u64 << n) + 1) as f64,
        qubits_per_sifted_dit: 3 * n,
    })
}
