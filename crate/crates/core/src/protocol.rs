//! Rate of the multi-slot train protocol.
//!
//! Every slot independently carries a photon with probability `p`, which is
//! worth `H(p)` bits per slot. Consecutive photons are paired (1st with 2nd,
//! 3rd with 4th, ...) and each pair carries one singlet/triplet symbol worth
//! `I_pair(η)` bits. A pair of slots holds `2p` photons on average, i.e. `p`
//! pairs, so the rate per pair of slots is `2·H(p) + p·I_pair(η)`.
//!
//! At `η = 1`, `I_pair = 1`. For `η < 1` the pair term is an extension of the
//! perfectly correlated case and is flagged as such in reports.

use serde::Serialize;

use crate::capacity::InputMode;
use crate::error::{Error, Result};
use crate::info::{binary_entropy, golden_section_max};
use crate::measurement::saturation_check;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrainProtocolConfig {
    pub p_photon: f64,
    pub eta: f64,
}

impl TrainProtocolConfig {
    pub fn new(p_photon: f64, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_photon) {
            return Err(Error::Contract(format!("p = {p_photon} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Contract(format!("eta = {eta} outside [0, 1]")));
        }
        Ok(Self { p_photon, eta })
    }

    /// True when the rate relies on the `η < 1` generalization of the pair term.
    pub fn is_eta_extension(&self) -> bool {
        self.eta < 1.0
    }
}

/// Best singlet/triplet mutual information for inputs `c ∈ {−1, 1/3}`.
pub fn pair_information(eta: f64) -> Result<f64> {
    Ok(saturation_check(InputMode::Entangled, eta)?.mi_max)
}

/// Bits per pair of slots.
pub fn extended_rate(cfg: &TrainProtocolConfig) -> Result<f64> {
    let p = cfg.p_photon;
    Ok(2.0 * binary_entropy(p) + p * pair_information(cfg.eta)?)
}

/// `(p*, rate*)` maximizing [`extended_rate`] over the photon probability.
pub fn optimize_photon_probability(eta: f64) -> Result<(f64, f64)> {
    let pair = pair_information(eta)?;
    TrainProtocolConfig::new(0.5, eta)?;
    let (p, rate) = golden_section_max(|p| 2.0 * binary_entropy(p) + p * pair, 0.0, 1.0, 1e-12);
    Ok((p, rate))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rate(p: f64, eta: f64) -> f64 {
        extended_rate(&TrainProtocolConfig::new(p, eta).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(rate(0.5, 1.0), 2.5);
        assert_eq!(rate(0.0, 0.3), 0.0);
        assert_eq!(rate(1.0, 1.0), 1.0);
        assert!(TrainProtocolConfig::new(1.2, 1.0).is_err());
    }

    #[test]
    fn optimum_is_feasible_improvement() {
        let (_, r) = optimize_photon_probability(1.0).unwrap();
        assert!(r >= 2.5);
        let (p, r) = optimize_photon_probability(0.0).unwrap();
        assert!((p - 0.5).abs() < 1e-6);
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rate_star_nondecreasing_in_eta() {
        let mut last = f64::NEG_INFINITY;
        for i in 0..=20 {
            let (_, r) = optimize_photon_probability(i as f64 / 20.0).unwrap();
            assert!(r >= last - 1e-12);
            last = r;
        }
    }

    #[test]
    fn pair_bit_accounting_at_perfect_correlation() {
        for i in 0..=50 {
            let p = i as f64 / 50.0;
            assert!((rate(p, 1.0) - 2.0 * binary_entropy(p) - p).abs() < 1e-15);
        }
    }
}
