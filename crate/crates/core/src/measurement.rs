//! Singlet/triplet readout of the two-photon block and its statistics.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{chi2_bound, InputMode};
use crate::channel::{sample_noise_pair, shard_rng, shard_sizes, NoiseModel};
use crate::error::{Error, Result};
use crate::group::{wigner_d, GroupElementU2, Spin};
use crate::info::{golden_section_max, mutual_information as dmc_mutual_information};
use crate::qstate::{
    basis, ket, product_ket, BasisTag, ComplexMatrix, DensityOperator, SlotState, C64, C_MAX, C_MIN,
};

/// Projectors `O_S = |Ψ−⟩⟨Ψ−|` and `O_T = I − O_S` on the two-photon block.
#[derive(Debug, Clone, PartialEq)]
pub struct SingletTripletMeasurement {
    pub projector_s: ComplexMatrix,
    pub projector_t: ComplexMatrix,
}

impl Default for SingletTripletMeasurement {
    fn default() -> Self {
        Self::new()
    }
}

impl SingletTripletMeasurement {
    pub fn new() -> Self {
        let projector_s = ComplexMatrix::outer(&ket(4, 0));
        let projector_t = ComplexMatrix::identity(4).add(&projector_s.scale(C64::new(-1.0, 0.0)));
        Self {
            projector_s,
            projector_t,
        }
    }

    /// `(P(singlet), P(triplet))` for a two-photon block state, or for the
    /// two-photon part of a full two-slot state conditioned on two photons.
    pub fn probabilities(&self, rho: &DensityOperator) -> Result<(f64, f64)> {
        let block = match rho.basis() {
            BasisTag::TwoPhoton => rho.matrix().clone(),
            BasisTag::TwoSlot => {
                let b = rho.matrix().sub_block(basis::BLOCKS[2].clone());
                let w = b.trace().re;
                if w <= 0.0 {
                    return Err(Error::Contract("state has no two-photon component".into()));
                }
                b.scale(C64::new(1.0 / w, 0.0))
            }
            other => {
                return Err(Error::Contract(format!(
                    "singlet/triplet readout needs a two-photon state, got {other:?}"
                )))
            }
        };
        let ps = self.projector_s.matmul(&block).trace().re;
        let pt = self.projector_t.matmul(&block).trace().re;
        Ok((ps, pt))
    }
}

/// Row-stochastic 2×2 matrix `P(outcome | input)`; outcome 0 is singlet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryChannelStats {
    pub conditionals: [[f64; 2]; 2],
}

impl BinaryChannelStats {
    pub fn new(conditionals: [[f64; 2]; 2]) -> Result<Self> {
        for row in &conditionals {
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) || (row[0] + row[1] - 1.0).abs() > 1e-12
            {
                return Err(Error::Contract(format!(
                    "row {row:?} is not a distribution"
                )));
            }
        }
        Ok(Self { conditionals })
    }

    /// Channel whose inputs are the Werner parameters `c_low`, `c_high`.
    pub fn from_werner_pair(c_low: f64, c_high: f64, eta: f64) -> Result<Self> {
        let (s0, t0) = conditional_probs(c_low, eta)?;
        let (s1, t1) = conditional_probs(c_high, eta)?;
        Self::new([[s0, t0], [s1, t1]])
    }
}

/// `(P_singlet, P_triplet) = ((1 − 3ηc)/4, 3(1 + ηc)/4)` for input parameter `c`.
pub fn conditional_probs(c: f64, eta: f64) -> Result<(f64, f64)> {
    if !(C_MIN - 1e-12..=C_MAX + 1e-12).contains(&c) {
        return Err(Error::Contract(format!(
            "Werner parameter {c} outside [-1, 1/3]"
        )));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Contract(format!("eta = {eta} outside [0, 1]")));
    }
    let g = eta * c.clamp(C_MIN, C_MAX);
    let s = ((1.0 - 3.0 * g) / 4.0).clamp(0.0, 1.0);
    Ok((s, 1.0 - s))
}

/// Shannon mutual information of the binary channel, in bits.
pub fn mutual_information(prior: [f64; 2], stats: &BinaryChannelStats) -> f64 {
    dmc_mutual_information(&prior, &stats.conditionals)
}

pub const PRIOR_SEARCH_WIDTH: f64 = 1e-12;

/// Prior `(p, 1 − p)` maximizing the mutual information, and that maximum.
pub fn optimal_prior(stats: &BinaryChannelStats) -> ([f64; 2], f64) {
    let (p, mi) = golden_section_max(
        |p| mutual_information([p, 1.0 - p], stats),
        0.0,
        1.0,
        PRIOR_SEARCH_WIDTH,
    );
    ([p, 1.0 - p], mi)
}

pub const SATURATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaturationReport {
    pub mi_max: f64,
    pub chi2: f64,
    pub saturated: bool,
    pub optimal_prior: [f64; 2],
    pub holevo_prior: [f64; 2],
}

/// Compares the best singlet/triplet mutual information with the two-photon Holevo bound.
pub fn saturation_check(mode: InputMode, eta: f64) -> Result<SaturationReport> {
    let range = mode.range();
    let bound = chi2_bound(&range, eta)?;
    let stats = BinaryChannelStats::from_werner_pair(range.c_min, range.c_max, eta)?;
    let (prior, mi_max) = optimal_prior(&stats);
    Ok(SaturationReport {
        mi_max,
        chi2: bound.chi2,
        saturated: (mi_max - bound.chi2).abs() < SATURATION_TOL,
        optimal_prior: prior,
        holevo_prior: bound.output_probs,
    })
}

/// Which-slot detection of a single photon with prior `(p, 1 − p)`: noiseless, so `H(p)`.
pub fn slot_detection_mi(prior: [f64; 2]) -> f64 {
    dmc_mutual_information(&prior, &[[1.0, 0.0], [0.0, 1.0]])
}

/// One bit: uniform prior over the two slots.
pub fn one_photon_slot_detection() -> f64 {
    slot_detection_mi([0.5, 0.5])
}

pub const MIN_SHOTS: usize = 10_000;
pub const BOOTSTRAP_RESAMPLES: usize = 200;
const BOOTSTRAP_STREAM: u64 = u64::MAX;

/// Result of an end-to-end shot simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShotReport {
    pub mode: InputMode,
    pub q: f64,
    pub shots: usize,
    pub seed: u64,
    pub shards: usize,
    /// Joint counts `[input][outcome]`, outcome 0 = singlet.
    pub counts: [[u64; 2]; 2],
    pub prior: [f64; 2],
    pub empirical_mi: f64,
    pub std_error: f64,
    pub analytic_mi: f64,
}

impl ShotReport {
    pub fn abs_deviation(&self) -> f64 {
        (self.empirical_mi - self.analytic_mi).abs()
    }

    pub fn within_three_sigma(&self) -> bool {
        self.abs_deviation() <= 3.0 * self.std_error
    }
}

/// Plug-in mutual information of a joint count table.
pub fn plug_in_mi(counts: &[[u64; 2]; 2]) -> f64 {
    let n: u64 = counts.iter().flatten().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let row: Vec<f64> = counts.iter().map(|r| (r[0] + r[1]) as f64 / n).collect();
    let col: Vec<f64> = (0..2)
        .map(|y| (counts[0][y] + counts[1][y]) as f64 / n)
        .collect();
    let mut mi = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let p = counts[x][y] as f64 / n;
            if p > 0.0 {
                mi += p * (p / (row[x] * col[y])).log2();
            }
        }
    }
    mi.max(0.0)
}

// Two-photon input as product-basis amplitudes (↔↔, ↔↕, ↕↔, ↕↕).
fn pair_input_product(mode: InputMode, input: usize) -> [C64; 4] {
    let full = match (mode, input) {
        (InputMode::Entangled, 0) => ket(basis::DIM, basis::SINGLET),
        (InputMode::Separable, 0) => product_ket(SlotState::Vertical, SlotState::Horizontal),
        _ => ket(basis::DIM, basis::VV),
    };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (s, hh, pp, vv) = (
        full[basis::SINGLET],
        full[basis::HH],
        full[basis::PSI_PLUS],
        full[basis::VV],
    );
    [hh, (pp + s) * h, (pp - s) * h, vv]
}

// Born probability of the singlet outcome after U(Ω_A) ⊗ U(Ω_B).
fn singlet_probability(psi: &[C64; 4], a: &GroupElementU2, b: &GroupElementU2) -> f64 {
    let da = wigner_d(Spin::Half, a).matrix;
    let db = wigner_d(Spin::Half, b).matrix;
    let mut out = [C64::new(0.0, 0.0); 4];
    for (r, o) in out.iter_mut().enumerate() {
        let (ra, rb) = (r / 2, r % 2);
        for (c, amp) in psi.iter().enumerate() {
            *o += da[(ra, c / 2)] * db[(rb, c % 2)] * amp;
        }
    }
    // overall phases drop out of |⟨Ψ−|·⟩|²
    ((out[1] - out[2]) * std::f64::consts::FRAC_1_SQRT_2)
        .norm_sqr()
        .min(1.0)
}

/// Sends the optimal two-photon ensemble through sampled noise and reads it out.
///
/// Each shot draws an input from the Holevo-optimal pair prior at `η = q`,
/// one noise realization `(Ω_A, Ω'·Ω_A)`, and a Born-rule singlet/triplet
/// outcome. Shards use independent streams of `seed`; the result is fixed by
/// `(seed, shards)`.
pub fn simulate_shots(
    mode: InputMode,
    noise: &NoiseModel,
    shots: usize,
    seed: u64,
    shards: usize,
) -> Result<ShotReport> {
    let q = noise
        .mixture_q
        .ok_or_else(|| Error::Contract("shot simulation requires a mixture noise model".into()))?;
    if shots < MIN_SHOTS {
        return Err(Error::Contract(format!(
            "need at least {MIN_SHOTS} shots, got {shots}"
        )));
    }
    let shards = shards.max(1);
    let range = mode.range();
    let bound = chi2_bound(&range, q)?;
    let prior = bound.output_probs;
    let inputs = [pair_input_product(mode, 0), pair_input_product(mode, 1)];

    let partials: Vec<[[u64; 2]; 2]> = shard_sizes(shots, shards)
        .into_par_iter()
        .enumerate()
        .map(|(i, n)| {
            let mut rng = shard_rng(seed, i as u64);
            let mut counts = [[0u64; 2]; 2];
            for _ in 0..n {
                let x = usize::from(rng.gen::<f64>() >= prior[0]);
                let (a, b) = sample_noise_pair(q, &mut rng);
                let ps = singlet_probability(&inputs[x], &a, &b);
                let y = usize::from(rng.gen::<f64>() >= ps);
                counts[x][y] += 1;
            }
            counts
        })
        .collect();
    let mut counts = [[0u64; 2]; 2];
    for p in &partials {
        for x in 0..2 {
            for y in 0..2 {
                counts[x][y] += p[x][y];
            }
        }
    }
    let empirical_mi = plug_in_mi(&counts);
    let std_error = bootstrap_std_error(&counts, seed);
    let stats = BinaryChannelStats::from_werner_pair(range.c_min, range.c_max, q)?;
    Ok(ShotReport {
        mode,
        q,
        shots,
        seed,
        shards,
        counts,
        prior,
        empirical_mi,
        std_error,
        analytic_mi: mutual_information(prior, &stats),
    })
}

fn bootstrap_std_error(counts: &[[u64; 2]; 2], seed: u64) -> f64 {
    let cells: Vec<u64> = counts.iter().flatten().copied().collect();
    let n: u64 = cells.iter().sum();
    let mut rng = shard_rng(seed, BOOTSTRAP_STREAM);
    let mut values = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        // multinomial(n, cells/n) by sequential binomials
        let mut remaining_n = n;
        let mut remaining_p = 1.0;
        let mut draw = [0u64; 4];
        for (k, &cnt) in cells.iter().enumerate() {
            let p = cnt as f64 / n as f64;
            if k == cells.len() - 1 || remaining_n == 0 {
                draw[k] = remaining_n;
                remaining_n = 0;
                continue;
            }
            let cond = (p / remaining_p).clamp(0.0, 1.0);
            let x = Binomial::new(remaining_n, cond)
                .expect("probability in [0,1]")
                .sample(&mut rng);
            draw[k] = x;
            remaining_n -= x;
            remaining_p -= p;
        }
        values.push(plug_in_mi(&[[draw[0], draw[1]], [draw[2], draw[3]]]));
    }
    let m = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}
