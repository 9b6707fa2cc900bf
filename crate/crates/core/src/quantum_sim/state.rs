//! Three-qubit state vectors for the cloning attack, plus the
//! intercept-resend baseline on a single qubit.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::qubit_attack::ClonerParams;

pub const NORM_TOL: f64 = 1e-12;

pub type Ket = [Complex64; 2];

/// The three mutually unbiased qubit bases of the six-state protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// `|0⟩, |1⟩`
    Computational,
    /// `(|0⟩ ± |1⟩)/√2`
    Diagonal,
    /// `(|0⟩ ± i|1⟩)/√2`
    Circular,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::Computational, Basis::Diagonal, Basis::Circular];

    /// Basis vector `|ψ_k⟩`, written in computational coordinates.
    pub fn ket(self, k: u8) -> Ket {
        let s = FRAC_1_SQRT_2;
        let sign = if k & 1 == 0 { 1.0 } else { -1.0 };
        match self {
            Basis::Computational if k & 1 == 0 => [Complex64::ONE, Complex64::ZERO],
            Basis::Computational => [Complex64::ZERO, Complex64::ONE],
            Basis::Diagonal => [Complex64::new(s, 0.0), Complex64::new(sign * s, 0.0)],
            Basis::Circular => [Complex64::new(s, 0.0), Complex64::new(0.0, sign * s)],
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::ALL[rng.random_range(0..3)]
    }
}

/// `⟨a|b⟩`
pub fn inner(a: &Ket, b: &Ket) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// `|⟨ψ_k|φ⟩|²` for the vectors of `basis`.
pub fn measure_probabilities(state: &Ket, basis: Basis) -> [f64; 2] {
    [
        inner(&basis.ket(0), state).norm_sqr(),
        inner(&basis.ket(1), state).norm_sqr(),
    ]
}

fn kron3(b: &Ket, e: &Ket, m: &Ket) -> [Complex64; 8] {
    let mut out = [Complex64::ZERO; 8];
    for (i, out) in out.iter_mut().enumerate() {
        *out = b[(i >> 2) & 1] * e[(i >> 1) & 1] * m[i & 1];
    }
    out
}

/// Joint state of Bob's qubit and Eve's ancillas E and M.
///
/// Amplitudes are stored in computational coordinates with index
/// `4·b + 2·e + m`; [`JointState::amplitudes`] re-expresses them in the
/// basis the state was prepared in.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    computational: [Complex64; 8],
    basis: Basis,
}

impl JointState {
    pub fn from_computational(amplitudes: [Complex64; 8], basis: Basis) -> Self {
        Self {
            computational: amplitudes,
            basis,
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn computational_amplitudes(&self) -> &[Complex64; 8] {
        &self.computational
    }

    /// Amplitudes `⟨ψ_b ψ_e ψ_m|Φ⟩` in the preparation basis.
    pub fn amplitudes(&self) -> [Complex64; 8] {
        self.amplitudes_in(self.basis)
    }

    pub fn amplitudes_in(&self, basis: Basis) -> [Complex64; 8] {
        let mut out = [Complex64::ZERO; 8];
        for (idx, out) in out.iter_mut().enumerate() {
            let bra = kron3(
                &basis.ket(((idx >> 2) & 1) as u8),
                &basis.ket(((idx >> 1) & 1) as u8),
                &basis.ket((idx & 1) as u8),
            );
            *out = bra
                .iter()
                .zip(&self.computational)
                .map(|(b, a)| b.conj() * a)
                .sum();
        }
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        self.computational.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Born probabilities of the eight `(b, e, m)` outcomes in the
    /// preparation basis.
    pub fn outcome_probabilities(&self) -> [f64; 8] {
        self.amplitudes().map(|a| a.norm_sqr())
    }
}

/// Applies the asymmetric cloner to `|ψ_k⟩` of `basis`, the cloner being
/// written in that same basis:
///
/// `|ψ_k⟩ → |ψ_k⟩[α/√2(|ψ_0ψ_0⟩ + |ψ_1ψ_1⟩) + β/√2|ψ_kψ_k⟩] + β/√2|ψ_{k+1}⟩|ψ_k⟩|ψ_{k+1}⟩`
pub fn clone_attack(k: u8, basis: Basis, params: &ClonerParams) -> Result<JointState> {
    if k > 1 {
        return Err(validation(format!("bit value {k} is not 0 or 1")));
    }
    let a = params.alpha() * FRAC_1_SQRT_2;
    let b = params.beta() * FRAC_1_SQRT_2;
    let keep = basis.ket(k);
    let flip = basis.ket(1 - k);
    let zero = basis.ket(0);
    let one = basis.ket(1);

    let terms = [
        (a, kron3(&keep, &zero, &zero)),
        (a, kron3(&keep, &one, &one)),
        (b, kron3(&keep, &keep, &keep)),
        (b, kron3(&flip, &keep, &flip)),
    ];
    let mut amplitudes = [Complex64::ZERO; 8];
    for (w, term) in &terms {
        for (acc, t) in amplitudes.iter_mut().zip(term) {
            *acc += t * *w;
        }
    }
    Ok(JointState::from_computational(amplitudes, basis))
}

/// Exact `(p0, pe, pb, p_both_wrong)` for a state prepared from bit `k`,
/// classified by whether Bob's and Eve's E outcomes equal `k`.
pub fn classified_probabilities(state: &JointState, k: u8) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (idx, p) in state.outcome_probabilities().iter().enumerate() {
        let bob_ok = ((idx >> 2) & 1) as u8 == k;
        let eve_ok = ((idx >> 1) & 1) as u8 == k;
        let slot = match (bob_ok, eve_ok) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        out[slot] += p;
    }
    out
}

/// Samples `(b, e, m)` outcomes from a fixed joint state.
#[derive(Debug, Clone)]
pub struct OutcomeSampler {
    cumulative: [f64; 8],
}

impl OutcomeSampler {
    pub fn new(state: &JointState) -> Result<Self> {
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(validation(format!("joint state has norm² {norm}, not 1")));
        }
        let mut cumulative = [0.0; 8];
        let mut acc = 0.0;
        for (c, p) in cumulative.iter_mut().zip(state.outcome_probabilities()) {
            acc += p;
            *c = acc;
        }
        Ok(Self { cumulative })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (u8, u8, u8) {
        let u = rng.random::<f64>() * self.cumulative[7];
        let idx = self.cumulative.iter().position(|&c| u < c).unwrap_or(7);
        (
            ((idx >> 2) & 1) as u8,
            ((idx >> 1) & 1) as u8,
            (idx & 1) as u8,
        )
    }
}

/// Measures Bob's qubit and both ancillas in the preparation basis.
pub fn measure_joint<R: Rng + ?Sized>(state: &JointState, rng: &mut R) -> Result<(u8, u8, u8)> {
    Ok(OutcomeSampler::new(state)?.sample(rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterceptResend {
    pub eve_basis: Basis,
    pub eve_bit: u8,
    /// Bob's outcome when measuring the resent qubit in Alice's basis.
    pub bob_bit: u8,
}

fn sample_bit<R: Rng + ?Sized>(probs: [f64; 2], rng: &mut R) -> u8 {
    u8::from(rng.random::<f64>() * (probs[0] + probs[1]) >= probs[0])
}

/// Eve measures Alice's qubit in a random basis and resends her outcome.
pub fn intercept_resend_round<R: Rng + ?Sized>(
    bit: u8,
    alice_basis: Basis,
    rng: &mut R,
) -> InterceptResend {
    let sent = alice_basis.ket(bit & 1);
    let eve_basis = Basis::random(rng);
    let eve_bit = sample_bit(measure_probabilities(&sent, eve_basis), rng);
    let resent = eve_basis.ket(eve_bit);
    let bob_bit = sample_bit(measure_probabilities(&resent, alice_basis), rng);
    InterceptResend {
        eve_basis,
        eve_bit,
        bob_bit,
    }
}
