//! Asymmetric cloning attack on `2^n`-level systems prepared in one of
//! `2^n + 1` mutually unbiased bases.
//!
//! Only the outcome-distribution level is modeled: the cloner is described by
//! `(α̃, β̃)` under `α̃² + 2^(1-n)·α̃β̃ + β̃² = 1`, which fixes Bob's and Eve's
//! disturbances and hence both informations.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::infotheory::xlog2y;
use crate::MAX_SYMBOL_BITS;

pub const CONSTRAINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuditClonerParams {
    n: u32,
    alpha_t: f64,
    beta_t: f64,
}

fn check_bits(n: u32) -> Result<()> {
    if n == 0 || n > MAX_SYMBOL_BITS {
        return Err(validation(format!(
            "symbol width n = {n} outside [1, {MAX_SYMBOL_BITS}]"
        )));
    }
    Ok(())
}

impl QuditClonerParams {
    pub fn new(n: u32, alpha_t: f64, beta_t: f64) -> Result<Self> {
        check_bits(n)?;
        if !(0.0..=1.0).contains(&alpha_t) || !(0.0..=1.0).contains(&beta_t) {
            return Err(validation(format!(
                "qudit cloner amplitudes ({alpha_t}, {beta_t}) must lie in [0, 1]"
            )));
        }
        let p = Self { n, alpha_t, beta_t };
        let residual = p.constraint_residual();
        if residual.abs() > CONSTRAINT_TOL {
            return Err(validation(format!(
                "qudit cloner amplitudes violate normalization by {residual:e}"
            )));
        }
        Ok(p)
    }

    /// Non-negative root `α̃` of the normalization at the given `β̃`.
    pub fn from_beta(n: u32, beta_t: f64) -> Result<Self> {
        check_bits(n)?;
        if !(0.0..=1.0).contains(&beta_t) {
            return Err(validation(format!("beta~ = {beta_t} outside [0, 1]")));
        }
        let c = cross_coefficient(n);
        let disc = c * c * beta_t * beta_t - 4.0 * (beta_t * beta_t - 1.0);
        let alpha_t = (0.5 * (disc.sqrt() - c * beta_t)).clamp(0.0, 1.0);
        Ok(Self { n, alpha_t, beta_t })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dimension(&self) -> u64 {
        1u64 << self.n
    }

    pub fn alpha_t(&self) -> f64 {
        self.alpha_t
    }

    pub fn beta_t(&self) -> f64 {
        self.beta_t
    }

    pub fn constraint_residual(&self) -> f64 {
        let (a, b) = (self.alpha_t, self.beta_t);
        a * a + cross_coefficient(self.n) * a * b + b * b - 1.0
    }
}

/// `2^(1-n)`, the coefficient of `α̃β̃` in the normalization.
fn cross_coefficient(n: u32) -> f64 {
    2f64.powi(1 - n as i32)
}

/// `1 - 2^-n`.
fn disturbance_scale(n: u32) -> f64 {
    1.0 - 2f64.powi(-(n as i32))
}

pub fn qudit_params_from_beta(n: u32, beta_t: f64) -> Result<QuditClonerParams> {
    QuditClonerParams::from_beta(n, beta_t)
}

/// Bob's disturbance `D`, Eve's disturbance `D_E` and `μ = D_E / (1 - D)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disturbances {
    pub bob: f64,
    pub eve: f64,
    pub mu: f64,
}

pub fn qudit_disturbances(params: &QuditClonerParams) -> Result<Disturbances> {
    let scale = disturbance_scale(params.n);
    let bob = scale * params.beta_t * params.beta_t;
    let eve = scale * params.alpha_t * params.alpha_t;
    // D <= 1 - 2^-n, so this only trips on corrupted parameters.
    if bob.is_nan() || bob >= 1.0 {
        return Err(Error::Domain(format!(
            "Bob disturbance {bob} leaves mu undefined"
        )));
    }
    Ok(Disturbances {
        bob,
        eve,
        mu: eve / (1.0 - bob),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuditAttackPoint {
    pub n: u32,
    #[serde(rename = "disturbance")]
    pub d_bob: f64,
    #[serde(rename = "eve_disturbance")]
    pub d_eve: f64,
    pub mu: f64,
    pub info_bob: f64,
    pub info_eve: f64,
}

pub fn qudit_information(params: &QuditClonerParams) -> Result<QuditAttackPoint> {
    let Disturbances { bob: d, eve, mu } = qudit_disturbances(params)?;
    let bits = f64::from(params.n);
    let wrong = (params.dimension() - 1) as f64;
    let info_bob = bits + xlog2y(1.0 - d, 1.0 - d) + xlog2y(d, d / wrong);
    let info_eve = bits + (1.0 - d) * (xlog2y(1.0 - mu, 1.0 - mu) + xlog2y(mu, mu / wrong));
    Ok(QuditAttackPoint {
        n: params.n,
        d_bob: d,
        d_eve: eve,
        mu,
        info_bob,
        info_eve,
    })
}

/// Bob's symbol distribution given the sent symbol, listed as the correct
/// symbol followed by the `2^n - 1` wrong ones.
pub fn bob_distribution(n: u32, disturbance: f64) -> Vec<f64> {
    let wrong = (1u64 << n) - 1;
    let mut p = Vec::with_capacity(wrong as usize + 1);
    p.push(1.0 - disturbance);
    p.extend(std::iter::repeat_n(
        disturbance / wrong as f64,
        wrong as usize,
    ));
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infotheory::shannon_entropy_of;
    use crate::qubit_attack::{params_from_beta, string_information};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn alpha_at_zero_beta() {
        let p = qudit_params_from_beta(2, 0.0).unwrap();
        assert_eq!(p.alpha_t(), 1.0);
    }

    #[test]
    fn single_level_matches_qubit_normalization() {
        for i in 0..=20 {
            let beta = f64::from(i) / 20.0;
            let qd = qudit_params_from_beta(1, beta).unwrap();
            let qb = params_from_beta(beta).unwrap();
            assert!(close(qd.alpha_t(), qb.alpha(), 1e-15));
        }
    }

    #[test]
    fn symmetric_quart_cloner() {
        let a = 0.4f64.sqrt();
        let p = qudit_params_from_beta(2, a).unwrap();
        assert!(close(p.alpha_t(), a, 1e-15));
        assert!(close(p.alpha_t(), 0.632_46, 1e-5));
        let d = qudit_disturbances(&p).unwrap();
        assert!(close(d.bob, 0.3, 1e-15));
        assert!(close(d.eve, 0.3, 1e-15));
        assert!(close(d.mu, 3.0 / 7.0, 1e-15));
        // mpmath: 0.64322035055296...
        let info = qudit_information(&p).unwrap();
        assert!(close(info.info_bob, 0.643_220_350_552_960_5, 1e-13));
    }

    #[test]
    fn unattacked_quart() {
        let p = qudit_params_from_beta(2, 0.0).unwrap();
        let d = qudit_disturbances(&p).unwrap();
        assert_eq!((d.bob, d.eve, d.mu), (0.0, 0.75, 0.75));
        let info = qudit_information(&p).unwrap();
        assert_eq!(info.info_bob, 2.0);
        assert!(info.info_eve.abs() < 1e-15);
    }

    #[test]
    fn full_flip_is_well_defined() {
        // D = 1 - 2^-n < 1 at beta~ = 1, so mu = 0 and Eve knows everything.
        let p = qudit_params_from_beta(2, 1.0).unwrap();
        let info = qudit_information(&p).unwrap();
        assert_eq!(info.mu, 0.0);
        assert!(close(info.info_eve, 2.0, 1e-15));
        assert!(info.info_bob.abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(qudit_params_from_beta(0, 0.5).is_err());
        assert!(qudit_params_from_beta(31, 0.5).is_err());
        assert!(qudit_params_from_beta(2, 1.5).is_err());
        assert!(QuditClonerParams::new(2, 0.7, 0.7).is_err());
        let bogus = QuditClonerParams {
            n: 2,
            alpha_t: 0.0,
            beta_t: 1.2,
        };
        assert!(matches!(qudit_disturbances(&bogus), Err(Error::Domain(_))));
    }

    #[test]
    fn reduces_to_qubit_model() {
        for i in 0..100 {
            let beta = f64::from(i) / 99.0;
            let qd = qudit_information(&qudit_params_from_beta(1, beta).unwrap()).unwrap();
            let qb_params = params_from_beta(beta).unwrap();
            let o = qb_params.outcome_probabilities();
            let qb = string_information(1, &qb_params).unwrap();
            assert!(close(qd.d_bob, o.pb, 1e-12));
            assert!(close(qd.mu, 1.0 - o.q, 1e-12));
            assert!(close(qd.info_bob, qb.info_bob, 1e-12));
            assert!(close(qd.info_eve, qb.info_eve, 1e-12));
        }
    }

    #[test]
    fn bob_entropy_consistency() {
        for n in 1..=6 {
            for i in 0..=10 {
                let p = qudit_params_from_beta(n, f64::from(i) / 10.0).unwrap();
                let info = qudit_information(&p).unwrap();
                let h = shannon_entropy_of(&bob_distribution(n, info.d_bob)).unwrap();
                assert!(close(h, f64::from(n) - info.info_bob, 1e-12), "n={n} i={i}");
            }
        }
    }

    #[test]
    fn constraint_residual_is_tiny() {
        for n in 1..=30 {
            for i in 0..=50 {
                let p = qudit_params_from_beta(n, f64::from(i) / 50.0).unwrap();
                assert!(p.constraint_residual().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn informations_are_monotone() {
        for n in [1, 2, 3, 8, 30] {
            let pts: Vec<_> = (1..1000)
                .map(|i| {
                    let p = qudit_params_from_beta(n, f64::from(i) / 1000.0).unwrap();
                    qudit_information(&p).unwrap()
                })
                .collect();
            for w in pts.windows(2) {
                assert!(w[1].info_bob < w[0].info_bob, "n={n}: {:?}", w);
                assert!(w[1].info_eve > w[0].info_eve, "n={n}: {:?}", w);
                let bits = f64::from(n);
                assert!((0.0..=bits).contains(&w[0].info_bob));
                assert!((0.0..=bits).contains(&w[0].info_eve));
            }
        }
    }
}
