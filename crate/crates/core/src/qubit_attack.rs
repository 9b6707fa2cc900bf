//! Asymmetric cloning attack on the six-state qubit protocol.
//!
//! Eve entangles each qubit with two ancillas E and M. After basis
//! disclosure she measures both ancillas in Alice's basis; the E outcome is
//! her guess and `m = e XOR m_bit` tells her whether Bob's copy was flipped.
//! A key of `2^n`-valued symbols is built from `n` independently attacked
//! qubits, so the per-qubit quantities below compose symbol-wise.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::infotheory::{binary_entropy_unchecked, ProbVector};

/// Tolerance on the cloner normalization `α² + αβ + β² = 1`.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// Cloning-machine amplitudes `(α, β)`, constrained by `α² + αβ + β² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClonerParams {
    alpha: f64,
    beta: f64,
}

impl ClonerParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&beta) {
            return Err(validation(format!(
                "cloner amplitudes ({alpha}, {beta}) must lie in [0, 1]"
            )));
        }
        let residual = alpha * alpha + alpha * beta + beta * beta - 1.0;
        if residual.abs() > CONSTRAINT_TOL {
            return Err(validation(format!(
                "cloner amplitudes ({alpha}, {beta}) violate normalization by {residual:e}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Solves the normalization for the non-negative `α` at the given `β`.
    pub fn from_beta(beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(validation(format!("beta = {beta} outside [0, 1]")));
        }
        let alpha = (0.5 * ((4.0 - 3.0 * beta * beta).sqrt() - beta)).clamp(0.0, 1.0);
        Ok(Self { alpha, beta })
    }

    /// Cloner whose flip probability on Bob's qubit is `pb = β²/2`.
    pub fn from_pb(pb: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&pb) {
            return Err(validation(format!("pb = {pb} outside [0, 1/2]")));
        }
        Self::from_beta((2.0 * pb).sqrt().min(1.0))
    }

    /// The symmetric cloner `α = β = 1/√3`.
    pub fn symmetric() -> Self {
        let a = 3f64.sqrt().recip();
        Self { alpha: a, beta: a }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn constraint_residual(&self) -> f64 {
        self.alpha * self.alpha + self.alpha * self.beta + self.beta * self.beta - 1.0
    }

    pub fn outcome_probabilities(&self) -> OutcomeProbabilities {
        outcome_probabilities(self)
    }
}

pub fn params_from_beta(beta: f64) -> Result<ClonerParams> {
    ClonerParams::from_beta(beta)
}

pub fn params_from_pb(pb: f64) -> Result<ClonerParams> {
    ClonerParams::from_pb(pb)
}

/// Per-qubit joint outcome probabilities of Bob and Eve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbabilities {
    /// Bob and Eve both correct.
    pub p0: f64,
    /// Bob correct, Eve wrong.
    pub pe: f64,
    /// Bob wrong, Eve correct. This is the qubit error rate.
    pub pb: f64,
    /// Eve correct given `m = 0`.
    pub q: f64,
}

pub fn outcome_probabilities(params: &ClonerParams) -> OutcomeProbabilities {
    let (a, b) = (params.alpha, params.beta);
    let p0 = 0.5 * (a + b) * (a + b);
    let pe = 0.5 * a * a;
    let pb = 0.5 * b * b;
    OutcomeProbabilities {
        p0,
        pe,
        pb,
        q: p0 / (p0 + pe),
    }
}

/// Case analysis for a quart (two attacked qubits) sent as `00`.
///
/// Rows are indexed by `2·m₁ + m₂`, the first bit being the major one.
/// Symbol distributions are ordered `(00, 01, 10, 11)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuartCaseTable {
    pub xi: [f64; 4],
    pub eve_cond: [ProbVector; 4],
    pub bob_cond: [ProbVector; 4],
    pub bob_avg: ProbVector,
}

impl QuartCaseTable {
    /// `⟨H(P_E)⟩`, averaged over the flag cases Eve can see.
    pub fn eve_average_entropy(&self) -> f64 {
        self.xi
            .iter()
            .zip(&self.eve_cond)
            .map(|(w, p)| w * p.entropy())
            .sum()
    }

    pub fn info_eve(&self) -> f64 {
        2.0 - self.eve_average_entropy()
    }

    pub fn info_bob(&self) -> f64 {
        2.0 - self.bob_avg.entropy()
    }
}

pub fn quart_case_table(params: &ClonerParams) -> Result<QuartCaseTable> {
    let OutcomeProbabilities { p0, pe, pb, q } = outcome_probabilities(params);
    let keep = p0 + pe;
    let r = 1.0 - q;

    let xi = [keep * keep, pb * keep, pb * keep, pb * pb];
    let eve_cond = [
        ProbVector::new(vec![q * q, q * r, q * r, r * r])?,
        ProbVector::new(vec![q, 0.0, r, 0.0])?,
        ProbVector::new(vec![q, r, 0.0, 0.0])?,
        ProbVector::point_mass(4, 0)?,
    ];
    let bob_cond = [
        ProbVector::point_mass(4, 0)?,
        ProbVector::point_mass(4, 1)?,
        ProbVector::point_mass(4, 2)?,
        ProbVector::point_mass(4, 3)?,
    ];

    let mut avg = [0.0; 4];
    for (w, row) in xi.iter().zip(&bob_cond) {
        for (acc, p) in avg.iter_mut().zip(row.entries()) {
            *acc += w * p;
        }
    }
    let bob_avg = ProbVector::new(avg.to_vec())?;

    Ok(QuartCaseTable {
        xi,
        eve_cond,
        bob_cond,
        bob_avg,
    })
}

/// Bob's averaged quart distribution in closed form.
pub fn bob_average_closed_form(pb: f64) -> [f64; 4] {
    let c = 1.0 - pb;
    [c * c, pb * c, pb * c, pb * pb]
}

/// Informations for a `2^n`-valued symbol carried by `n` attacked qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StringInfoPoint {
    pub n: u32,
    /// Symbol error rate `1 - (1 - pb)^n`.
    pub disturbance: f64,
    pub info_bob: f64,
    pub info_eve: f64,
}

pub fn string_information(n: u32, params: &ClonerParams) -> Result<StringInfoPoint> {
    if n == 0 {
        return Err(validation("symbol width n must be at least 1"));
    }
    let OutcomeProbabilities { pb, q, .. } = outcome_probabilities(params);
    let bits = f64::from(n);
    Ok(StringInfoPoint {
        n,
        disturbance: symbol_disturbance(n, pb),
        info_bob: bits * (1.0 - binary_entropy_unchecked(pb)),
        info_eve: bits * (1.0 - binary_entropy_unchecked(q) * (1.0 - pb)),
    })
}

/// Probability that at least one of `n` independent bits is flipped.
pub fn symbol_disturbance(n: u32, pb: f64) -> f64 {
    1.0 - (1.0 - pb).powi(n as i32)
}
