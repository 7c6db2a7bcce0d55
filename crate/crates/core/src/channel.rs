//! The correlated polarization-noise channel `Λ = (1 ⊗ Λ_dep) ∘ Λ_perf`.
//!
//! `Λ_perf` applies the same Haar-random polarization transformation to both
//! slots; `Λ_dep` then adds relative noise on slot B. The analytic backend uses
//! the closed-form block rules, the Monte Carlo backend averages over sampled
//! noise realizations `U(Ω_A) ⊗ U(Ω'·Ω_A)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{compose, haar_sample, wigner_d, GroupElementU2, Spin};
use crate::qstate::{
    basis, product_to_fixed, BasisTag, ComplexMatrix, DensityOperator, QuantumChannel, C64,
};

/// Cross-block entries larger than this make a state "not block-diagonal".
pub const BLOCK_DIAGONAL_TOL: f64 = 1e-12;

/// Correlation parameters of the slot-B noise relative to slot A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    /// Shrink factor applied to the two-photon Werner parameter.
    pub eta: f64,
    /// Shrink factor applied to the one-photon inter-slot coherence `b`.
    pub eta_prime: f64,
    /// Probability that the relative transformation is the identity; otherwise
    /// it is Haar-random. Only this model can be sampled.
    pub mixture_q: Option<f64>,
}

impl NoiseModel {
    pub fn new(eta: f64, eta_prime: f64) -> Result<Self> {
        check_unit("eta", eta)?;
        check_unit("eta_prime", eta_prime)?;
        Ok(Self {
            eta,
            eta_prime,
            mixture_q: None,
        })
    }

    /// Identity-or-Haar mixture; gives `η = η′ = q` exactly.
    pub fn mixture(q: f64) -> Result<Self> {
        check_unit("q", q)?;
        Ok(Self {
            eta: q,
            eta_prime: q,
            mixture_q: Some(q),
        })
    }

    pub fn perfect() -> Self {
        Self {
            eta: 1.0,
            eta_prime: 1.0,
            mixture_q: Some(1.0),
        }
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Contract(format!("{name} = {x} outside [0, 1]")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Backend {
    Analytic,
    MonteCarlo {
        samples: usize,
        seed: u64,
        shards: usize,
    },
}

/// The channel together with how it is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelMap {
    pub backend: Backend,
    pub noise: NoiseModel,
}

impl ChannelMap {
    pub fn analytic(noise: NoiseModel) -> Self {
        Self {
            backend: Backend::Analytic,
            noise,
        }
    }

    pub fn monte_carlo(noise: NoiseModel, samples: usize, seed: u64) -> Self {
        Self {
            backend: Backend::MonteCarlo {
                samples,
                seed,
                shards: 1,
            },
            noise,
        }
    }

    pub fn with_shards(mut self, n: usize) -> Self {
        if let Backend::MonteCarlo { shards, .. } = &mut self.backend {
            *shards = n.max(1);
        }
        self
    }
}

impl QuantumChannel for ChannelMap {
    fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        lambda_full(rho, self)
    }

    fn input_dim(&self) -> Option<usize> {
        Some(basis::DIM)
    }
}

/// Parameters `(a, b)` of the twirled one-photon block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OnePhotonBlockSummary {
    /// Probability that the photon is in slot A.
    pub a: f64,
    /// Inter-slot coherence `Σ_pol ⟨pol_A 0_B|ρ|0_A pol_B⟩`.
    pub b: C64,
}

impl OnePhotonBlockSummary {
    /// `½ [[a,0,b,0],[0,a,0,b],[b*,0,1−a,0],[0,b*,0,1−a]]`
    pub fn to_matrix(&self) -> ComplexMatrix {
        one_photon_twirl_matrix(self.a, 1.0 - self.a, self.b)
    }

    /// Positivity of the twirled block: `|b|² ≤ a(1 − a)`.
    pub fn is_physical(&self) -> bool {
        self.b.norm_sqr() <= self.a * (1.0 - self.a) + 1e-12
    }
}

fn one_photon_twirl_matrix(a: f64, d: f64, b: C64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    for p in 0..2 {
        m[(p, p)] = C64::new(a / 2.0, 0.0);
        m[(2 + p, 2 + p)] = C64::new(d / 2.0, 0.0);
        m[(p, 2 + p)] = b / 2.0;
        m[(2 + p, p)] = b.conj() / 2.0;
    }
    m
}

// a and b of an (unnormalized) one-photon block.
fn one_photon_ab(m: &ComplexMatrix) -> (f64, C64) {
    let a = m[(0, 0)].re + m[(1, 1)].re;
    let b = m[(0, 2)] + m[(1, 3)];
    (a, b)
}

pub fn one_photon_summary(rho1: &DensityOperator) -> Result<OnePhotonBlockSummary> {
    if rho1.dim() != 4 || rho1.basis() == BasisTag::TwoPhoton || rho1.basis() == BasisTag::TwoSlot {
        return Err(Error::Contract(format!(
            "one-photon summary needs a one-photon block state, got {:?} of dimension {}",
            rho1.basis(),
            rho1.dim()
        )));
    }
    let (a, b) = one_photon_ab(rho1.matrix());
    Ok(OnePhotonBlockSummary {
        a: a.clamp(0.0, 1.0),
        b,
    })
}

fn require_two_slot(rho: &DensityOperator) -> Result<()> {
    if rho.dim() != basis::DIM {
        return Err(Error::Contract(format!(
            "expected a 9-dimensional two-slot state, got dimension {}",
            rho.dim()
        )));
    }
    Ok(())
}

/// Largest entry linking different photon-number blocks.
pub fn cross_block_magnitude(m: &ComplexMatrix) -> f64 {
    let mut x = 0.0_f64;
    for r in 0..basis::DIM {
        for c in 0..basis::DIM {
            if basis::photon_number(r) != basis::photon_number(c) {
                x = x.max(m[(r, c)].norm());
            }
        }
    }
    x
}

/// Perfectly correlated twirl `∫dΩ U(Ω)⊗U(Ω) ρ U(Ω)†⊗U(Ω)†`, in closed form.
pub fn lambda_perf_analytic(rho: &DensityOperator) -> Result<DensityOperator> {
    require_two_slot(rho)?;
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(basis::DIM);
    out[(0, 0)] = m[(0, 0)];

    let one = m.sub_block(basis::BLOCKS[1].clone());
    let w1 = one.trace().re;
    let (a, b) = one_photon_ab(&one);
    place_block(&mut out, 1, &one_photon_twirl_matrix(a, w1 - a, b));

    let singlet = m[(basis::SINGLET, basis::SINGLET)].re;
    let w2 = m.sub_block(basis::BLOCKS[2].clone()).trace().re;
    let t = (w2 - singlet) / 3.0;
    place_block(
        &mut out,
        2,
        &ComplexMatrix::from_real_diagonal(&[singlet, t, t, t]),
    );
    Ok(DensityOperator::from_trusted(out, BasisTag::TwoSlot))
}

fn place_block(out: &mut ComplexMatrix, k: usize, block: &ComplexMatrix) {
    let s = basis::BLOCKS[k].start;
    for r in 0..block.dim() {
        for c in 0..block.dim() {
            out[(s + r, s + c)] = block[(r, c)];
        }
    }
}

// Two-photon block coordinates (Ψ−, ↔↔, Ψ+, ↕↕) from product coordinates (↔↔, ↔↕, ↕↔, ↕↕).
fn two_photon_from_product() -> ComplexMatrix {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    ComplexMatrix::from_rows(vec![
        z, h, -h, z, //
        o, z, z, z, //
        z, h, h, z, //
        z, z, z, o,
    ])
    .expect("4x4")
}

/// Relative slot-B noise on a block-diagonal state.
///
/// Slot B's polarization is depolarized isotropically with Bloch shrink `η`
/// and the coherence between "photon in A" and "photon in B" is scaled by `η′`.
/// On twirled states this is exactly `b ↦ η′b` and `c ↦ ηc`.
pub fn lambda_dep_analytic(rho: &DensityOperator, noise: &NoiseModel) -> Result<DensityOperator> {
    require_two_slot(rho)?;
    let m = rho.matrix();
    let cross = cross_block_magnitude(m);
    if cross > BLOCK_DIAGONAL_TOL {
        return Err(Error::Contract(format!(
            "slot-B noise needs a block-diagonal input (cross-block entry {cross:e})"
        )));
    }
    let (eta, eta_p) = (noise.eta, noise.eta_prime);
    let mut out = ComplexMatrix::zeros(basis::DIM);
    out[(0, 0)] = m[(0, 0)];

    // one photon: [[ρ_AA, ρ_AB], [ρ_BA, ρ_BB]] with 2×2 polarization sub-blocks
    let one = m.sub_block(basis::BLOCKS[1].clone());
    let mut new_one = ComplexMatrix::zeros(4);
    let tr_bb = one[(2, 2)].re + one[(3, 3)].re;
    for r in 0..2 {
        for c in 0..2 {
            new_one[(r, c)] = one[(r, c)];
            new_one[(r, 2 + c)] = one[(r, 2 + c)] * eta_p;
            new_one[(2 + r, c)] = one[(2 + r, c)] * eta_p;
            let mixed = if r == c {
                (1.0 - eta) * tr_bb / 2.0
            } else {
                0.0
            };
            new_one[(2 + r, 2 + c)] = one[(2 + r, 2 + c)] * eta + mixed;
        }
    }
    place_block(&mut out, 1, &new_one);

    // two photons: η ρ + (1 − η) ρ_A ⊗ I/2, evaluated in product coordinates
    let t = two_photon_from_product();
    let prod = m
        .sub_block(basis::BLOCKS[2].clone())
        .conjugate_by(&t.adjoint());
    let mut reduced_a = [[C64::new(0.0, 0.0); 2]; 2];
    for (i, row) in reduced_a.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = prod[(2 * i, 2 * j)] + prod[(2 * i + 1, 2 * j + 1)];
        }
    }
    let depolarized = ComplexMatrix::from_fn(4, |r, c| {
        let (ia, ib) = (r / 2, r % 2);
        let (ja, jb) = (c / 2, c % 2);
        let mixed = if ib == jb {
            reduced_a[ia][ja] * 0.5
        } else {
            C64::new(0.0, 0.0)
        };
        prod[(r, c)] * eta + mixed * (1.0 - eta)
    });
    place_block(&mut out, 2, &depolarized.conjugate_by(&t));
    Ok(DensityOperator::from_trusted(out, BasisTag::TwoSlot))
}

/// Full channel output under the chosen backend.
pub fn lambda_full(rho: &DensityOperator, map: &ChannelMap) -> Result<DensityOperator> {
    require_two_slot(rho)?;
    match map.backend {
        Backend::Analytic => lambda_dep_analytic(&lambda_perf_analytic(rho)?, &map.noise),
        Backend::MonteCarlo {
            samples,
            seed,
            shards,
        } => {
            let q = map.noise.mixture_q.ok_or_else(|| {
                Error::Contract("Monte Carlo backend requires a mixture noise model".into())
            })?;
            if samples == 0 {
                return Err(Error::Contract(
                    "Monte Carlo backend needs samples > 0".into(),
                ));
            }
            lambda_monte_carlo(rho, q, samples, seed, shards.max(1))
        }
    }
}

/// Deterministic per-shard random stream for `(seed, shard)`.
pub fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Sizes of `shards` contiguous shards covering `total` items.
pub fn shard_sizes(total: usize, shards: usize) -> Vec<usize> {
    let base = total / shards;
    let extra = total % shards;
    (0..shards).map(|i| base + usize::from(i < extra)).collect()
}

/// Relative slot-B transformation `Ω'` of the mixture model.
pub fn sample_relative<R: Rng + ?Sized>(q: f64, rng: &mut R) -> GroupElementU2 {
    // draw both so the stream consumption does not depend on the branch
    let keep = rng.gen::<f64>() < q;
    let g = haar_sample(rng);
    if keep {
        GroupElementU2::identity()
    } else {
        g
    }
}

/// `U(Ω_A) ⊗ U(Ω_B)` in the fixed basis (block-diagonal in photon number).
pub fn independent_two_slot_unitary(a: &GroupElementU2, b: &GroupElementU2) -> ComplexMatrix {
    let pa = C64::from_polar(1.0, a.phase());
    let pb = C64::from_polar(1.0, b.phase());
    let da = wigner_d(Spin::Half, a).matrix;
    let db = wigner_d(Spin::Half, b).matrix;
    let mut u = ComplexMatrix::zeros(basis::DIM);
    u[(0, 0)] = C64::new(1.0, 0.0);
    for r in 0..2 {
        for c in 0..2 {
            u[(basis::H_A + r, basis::H_A + c)] = pa * da[(r, c)];
            u[(basis::H_B + r, basis::H_B + c)] = pb * db[(r, c)];
        }
    }
    let t = two_photon_from_product();
    let two = da.kron(&db).conjugate_by(&t).scale(pa * pb);
    place_block(&mut u, 2, &two);
    u
}

/// One sampled realization `(Ω_A, Ω'·Ω_A)` of the mixture model.
pub fn sample_noise_pair<R: Rng + ?Sized>(q: f64, rng: &mut R) -> (GroupElementU2, GroupElementU2) {
    let omega_a = haar_sample(rng);
    let rel = sample_relative(q, rng);
    (omega_a, compose(&rel, &omega_a))
}

type Slot3 = [[C64; 3]; 3];
type Pair9 = [[C64; 9]; 9];

// Single-slot operator on (vac, ↔, ↕).
fn slot_operator(g: &GroupElementU2) -> Slot3 {
    let p = C64::from_polar(1.0, g.phase());
    let d = g.su2();
    let z = C64::new(0.0, 0.0);
    [
        [C64::new(1.0, 0.0), z, z],
        [z, p * d[0][0], p * d[0][1]],
        [z, p * d[1][0], p * d[1][1]],
    ]
}

// (S_A ⊗ S_B) ρ (S_A ⊗ S_B)† in product coordinates, added into `acc`.
fn accumulate_conjugated(acc: &mut Pair9, rho: &Pair9, sa: &Slot3, sb: &Slot3) {
    let z = C64::new(0.0, 0.0);
    // left factor, one slot at a time
    let mut t = [[z; 9]; 9];
    for a in 0..3 {
        for b in 0..3 {
            for col in 0..9 {
                let mut x = z;
                for b2 in 0..3 {
                    x += sb[b][b2] * rho[3 * a + b2][col];
                }
                t[3 * a + b][col] = x;
            }
        }
    }
    let mut l = [[z; 9]; 9];
    for a in 0..3 {
        for b in 0..3 {
            for col in 0..9 {
                let mut x = z;
                for a2 in 0..3 {
                    x += sa[a][a2] * t[3 * a2 + b][col];
                }
                l[3 * a + b][col] = x;
            }
        }
    }
    // right factor: multiply by S† on the column index
    for row in 0..9 {
        let mut u = [z; 9];
        for a in 0..3 {
            for b in 0..3 {
                let mut x = z;
                for b2 in 0..3 {
                    x += l[row][3 * a + b2] * sb[b][b2].conj();
                }
                u[3 * a + b] = x;
            }
        }
        for a in 0..3 {
            for b in 0..3 {
                let mut x = z;
                for a2 in 0..3 {
                    x += u[3 * a2 + b] * sa[a][a2].conj();
                }
                acc[row][3 * a + b] += x;
            }
        }
    }
}

fn lambda_monte_carlo(
    rho: &DensityOperator,
    q: f64,
    samples: usize,
    seed: u64,
    shards: usize,
) -> Result<DensityOperator> {
    let b = product_to_fixed();
    let prod = rho.matrix().conjugate_by(&b.adjoint());
    let mut rho_p = [[C64::new(0.0, 0.0); 9]; 9];
    for (r, row) in rho_p.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            *x = prod[(r, c)];
        }
    }
    let partials: Vec<Pair9> = shard_sizes(samples, shards)
        .into_par_iter()
        .enumerate()
        .map(|(i, n)| {
            let mut rng = shard_rng(seed, i as u64);
            let mut acc = [[C64::new(0.0, 0.0); 9]; 9];
            for _ in 0..n {
                let (a, b) = sample_noise_pair(q, &mut rng);
                accumulate_conjugated(&mut acc, &rho_p, &slot_operator(&a), &slot_operator(&b));
            }
            acc
        })
        .collect();
    let mut total = ComplexMatrix::zeros(basis::DIM);
    for p in &partials {
        for (r, row) in p.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                total[(r, c)] += x;
            }
        }
    }
    let total = total.conjugate_by(&b);
    let tr = total.trace().re;
    let mut out = total.scale(C64::new(1.0 / tr, 0.0));
    // restore exact Hermiticity lost to rounding
    out = out.add(&out.adjoint()).scale(C64::new(0.5, 0.0));
    Ok(DensityOperator::from_trusted(out, BasisTag::TwoSlot))
}
