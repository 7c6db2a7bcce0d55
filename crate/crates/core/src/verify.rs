//! Self-check suites: each compares a closed form with an independent route
//! (Monte Carlo, brute force, direct optimization) and reports the largest
//! deviation against a fixed tolerance.

use serde::Serialize;

use crate::capacity::{
    brute_force_chi2, capacity_breakdown, chi2_bound, f_of_c, CurveMode, InputMode,
};
use crate::channel::{lambda_full, shard_rng, ChannelMap, NoiseModel};
use crate::error::Result;
use crate::group::{mc_orthogonality, DElement, Spin};
use crate::measurement::saturation_check;
use crate::protocol::{extended_rate, TrainProtocolConfig};
use crate::qstate::{random_density, random_pure, von_neumann_entropy, werner_state, BasisTag};

pub const ORTHOGONALITY_TOL: f64 = 5e-3;
pub const ORACLE_TOL: f64 = 1e-6;
pub const TWIRL_TOL: f64 = 5e-3;
pub const ENTROPY_TOL: f64 = 1e-12;
pub const SATURATION_TOL: f64 = 1e-9;
pub const PRIOR_TOL: f64 = 1e-6;
pub const MONOTONE_SLACK: f64 = 1e-10;

pub const BRUTE_FORCE_GRID: usize = 41;
pub const TWIRL_INPUTS: usize = 20;
pub const TWIRL_Q: [f64; 3] = [0.0, 0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    EntropyWerner,
    Orthogonality,
    Lemma2Oracle,
    TwirlMc,
    Saturation,
    Monotonicity,
    Protocol,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::EntropyWerner,
        Suite::Orthogonality,
        Suite::Lemma2Oracle,
        Suite::TwirlMc,
        Suite::Saturation,
        Suite::Monotonicity,
        Suite::Protocol,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::EntropyWerner => "entropy-werner",
            Suite::Orthogonality => "orthogonality",
            Suite::Lemma2Oracle => "lemma2-oracle",
            Suite::TwirlMc => "twirl-mc",
            Suite::Saturation => "saturation",
            Suite::Monotonicity => "monotonicity",
            Suite::Protocol => "protocol",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub checks: usize,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

/// Knobs shared by the randomized suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    pub shards: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 0,
            shards: 1,
        }
    }
}

fn report(
    suite: Suite,
    max_deviation: f64,
    tolerance: f64,
    checks: usize,
    randomized: Option<&VerifyConfig>,
) -> SuiteReport {
    SuiteReport {
        name: suite.name(),
        passed: max_deviation.is_finite() && max_deviation < tolerance,
        max_deviation,
        tolerance,
        checks,
        samples: randomized.map(|c| c.samples),
        seed: randomized.map(|c| c.seed),
    }
}

fn eta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    match suite {
        Suite::EntropyWerner => {
            let mut dev = 0.0_f64;
            for i in 0..100 {
                let c = -1.0 + (4.0 / 3.0) * i as f64 / 99.0;
                let s = von_neumann_entropy(&werner_state(c)?)?;
                dev = dev.max((s - f_of_c(c)?).abs());
            }
            Ok(report(suite, dev, ENTROPY_TOL, 100, None))
        }
        Suite::Orthogonality => {
            let cases = [
                (
                    DElement::new(Spin::Half, 0, 0)?,
                    DElement::new(Spin::Half, 0, 0)?,
                    0.5,
                ),
                (
                    DElement::new(Spin::One, 1, 1)?,
                    DElement::new(Spin::Half, 0, 0)?,
                    0.0,
                ),
                (
                    DElement::new(Spin::One, 0, 0)?,
                    DElement::new(Spin::One, 1, 1)?,
                    0.0,
                ),
            ];
            let mut dev = 0.0_f64;
            for (i, (l, r, expected)) in cases.into_iter().enumerate() {
                let mut rng = shard_rng(cfg.seed, i as u64);
                let est = mc_orthogonality(l, r, cfg.samples, &mut rng)?;
                dev = dev.max((est.value() - crate::qstate::C64::new(expected, 0.0)).norm());
            }
            Ok(report(suite, dev, ORTHOGONALITY_TOL, 3, Some(cfg)))
        }
        Suite::Lemma2Oracle => {
            let mut dev = 0.0_f64;
            let mut n = 0;
            for mode in [InputMode::Entangled, InputMode::Separable] {
                for eta in eta_grid(11) {
                    let closed = chi2_bound(&mode.range(), eta)?.chi2;
                    let oracle = brute_force_chi2(&mode.range(), eta, BRUTE_FORCE_GRID)?;
                    dev = dev.max((closed - oracle).abs());
                    n += 1;
                }
            }
            Ok(report(suite, dev, ORACLE_TOL, n, None))
        }
        Suite::TwirlMc => {
            let mut rng = shard_rng(cfg.seed, 1 << 32);
            let mut inputs = Vec::with_capacity(TWIRL_INPUTS);
            for i in 0..TWIRL_INPUTS {
                // alternate pure and mixed inputs
                inputs.push(if i % 2 == 0 {
                    random_pure(&mut rng, 9, BasisTag::TwoSlot)?
                } else {
                    random_density(&mut rng, 9, BasisTag::TwoSlot)?
                });
            }
            let mut dev = 0.0_f64;
            for (qi, &q) in TWIRL_Q.iter().enumerate() {
                let noise = NoiseModel::mixture(q)?;
                let exact = ChannelMap::analytic(noise);
                for (i, rho) in inputs.iter().enumerate() {
                    let seed = cfg
                        .seed
                        .wrapping_add((qi * TWIRL_INPUTS + i) as u64)
                        .wrapping_mul(0x9E37_79B9_7F4A_7C15);
                    let mc =
                        ChannelMap::monte_carlo(noise, cfg.samples, seed).with_shards(cfg.shards);
                    let a = lambda_full(rho, &exact)?;
                    let b = lambda_full(rho, &mc)?;
                    dev = dev.max(a.matrix().max_abs_diff(b.matrix()));
                }
            }
            Ok(report(
                suite,
                dev,
                TWIRL_TOL,
                TWIRL_Q.len() * TWIRL_INPUTS,
                Some(cfg),
            ))
        }
        Suite::Saturation => {
            let mut dev = 0.0_f64;
            let mut prior_dev = 0.0_f64;
            let mut n = 0;
            for mode in [InputMode::Entangled, InputMode::Separable] {
                for eta in eta_grid(11) {
                    let r = saturation_check(mode, eta)?;
                    dev = dev.max((r.mi_max - r.chi2).abs());
                    if eta > 0.0 {
                        prior_dev = prior_dev.max((r.optimal_prior[0] - r.holevo_prior[0]).abs());
                    }
                    n += 1;
                }
            }
            let mut r = report(suite, dev, SATURATION_TOL, n, None);
            r.passed &= prior_dev < PRIOR_TOL;
            Ok(r)
        }
        Suite::Monotonicity => {
            let grid = eta_grid(101);
            let mut worst = 0.0_f64;
            let mut prev: Option<[f64; 3]> = None;
            for &eta in &grid {
                let t = [
                    capacity_breakdown(CurveMode::Entangled, eta)?.total,
                    capacity_breakdown(CurveMode::Separable, eta)?.total,
                    capacity_breakdown(CurveMode::Baseline, eta)?.total,
                ];
                worst = worst.max(t[1] - t[0]).max(t[2] - t[1]);
                if let Some(p) = prev {
                    for k in 0..3 {
                        worst = worst.max(p[k] - t[k]);
                    }
                }
                prev = Some(t);
            }
            // `worst` is the largest violation; anything ≤ slack passes
            Ok(report(
                suite,
                worst.max(0.0),
                MONOTONE_SLACK,
                grid.len(),
                None,
            ))
        }
        Suite::Protocol => {
            let rate = extended_rate(&TrainProtocolConfig::new(0.5, 1.0)?)?;
            let dev = (rate - 2.5).abs();
            let exceeds = rate > 5f64.log2();
            let dev = if exceeds { dev } else { f64::INFINITY };
            Ok(report(suite, dev, f64::MIN_POSITIVE, 1, None))
        }
    }
}

pub fn run_suites(suites: &[Suite], cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    suites.iter().map(|s| run_suite(*s, cfg)).collect()
}
