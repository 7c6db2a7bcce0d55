//! Holevo capacities of the photon-number blocks and their combination.
//!
//! Two-photon outputs are Werner states `W_{ηc}`, so the two-photon Holevo
//! quantity of an ensemble `{q_j; c_j}` is `f(Σ q_j η c_j) − Σ q_j f(η c_j)`
//! with `f(c) = S(W_c)`. Its maximum over ensembles with `c_j ∈ [c_min, c_max]`
//! is the largest gap between the concave `f` and its chord on
//! `[η c_min, η c_max]`, which [`chi2_bound`] evaluates in closed form.
//!
//! The block capacities are merged by [`combine_subspace_capacities`],
//! `χ = log2 Σ_k 2^{χ^(k)}` with block probabilities `p_k ∝ 2^{χ^(k)}`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::blahut_arimoto;
use crate::qstate::{
    basis, ket, product_ket, BasisTag, DensityOperator, SlotState, StateEnsemble, C64, C_MAX, C_MIN,
};

/// Which two-photon input states are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputMode {
    /// Any state, `c ∈ [−1, 1/3]`.
    Entangled,
    /// Separable states only, `c ∈ [−1/3, 1/3]`.
    Separable,
}

impl InputMode {
    pub fn range(self) -> CRange {
        match self {
            InputMode::Entangled => CRange {
                mode: self,
                c_min: C_MIN,
                c_max: C_MAX,
            },
            InputMode::Separable => CRange {
                mode: self,
                c_min: -1.0 / 3.0,
                c_max: C_MAX,
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InputMode::Entangled => "entangled",
            InputMode::Separable => "separable",
        }
    }
}

/// Capacity curve families, including the baseline that ignores polarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveMode {
    Entangled,
    Separable,
    Baseline,
}

impl CurveMode {
    pub const ALL: [CurveMode; 3] = [
        CurveMode::Entangled,
        CurveMode::Separable,
        CurveMode::Baseline,
    ];

    pub fn input_mode(self) -> Option<InputMode> {
        match self {
            CurveMode::Entangled => Some(InputMode::Entangled),
            CurveMode::Separable => Some(InputMode::Separable),
            CurveMode::Baseline => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CurveMode::Entangled => "entangled",
            CurveMode::Separable => "separable",
            CurveMode::Baseline => "baseline",
        }
    }
}

/// Allowed interval of input Werner parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CRange {
    pub mode: InputMode,
    pub c_min: f64,
    pub c_max: f64,
}

impl CRange {
    pub fn contains(&self, c: f64) -> bool {
        (self.c_min - 1e-12..=self.c_max + 1e-12).contains(&c)
    }
}

const F_DOMAIN_SLACK: f64 = 1e-12;

fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Entropy of the Werner state `W_c`:
/// `f(c) = 2 − ¾(1+c)log2(1+c) − ¼(1−3c)log2(1−3c)`.
pub fn f_of_c(c: f64) -> Result<f64> {
    if !(C_MIN - F_DOMAIN_SLACK..=C_MAX + F_DOMAIN_SLACK).contains(&c) {
        return Err(Error::Contract(format!("f(c) undefined for c = {c}")));
    }
    Ok(f_unchecked(c.clamp(C_MIN, C_MAX)))
}

fn f_unchecked(c: f64) -> f64 {
    2.0 - 0.75 * xlog2x(1.0 + c) - 0.25 * xlog2x(1.0 - 3.0 * c)
}

/// `f′(c) = ¾ log2((1−3c)/(1+c))`, defined on the open interval.
pub fn f_prime(c: f64) -> f64 {
    0.75 * ((1.0 - 3.0 * c) / (1.0 + c)).log2()
}

/// Closed-form maximum of the two-photon Holevo quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Chi2Bound {
    pub chi2: f64,
    /// Average output Werner parameter of the optimal ensemble.
    pub gamma_opt: f64,
    /// Chord slope `(f(β) − f(α))/(β − α)`, bits per unit `c`.
    pub mu: f64,
    /// Weights of the outputs `W_α` and `W_β` in the optimal ensemble.
    pub output_probs: [f64; 2],
}

pub fn chi2_bound(range: &CRange, eta: f64) -> Result<Chi2Bound> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Contract(format!("eta = {eta} outside [0, 1]")));
    }
    let alpha = eta * range.c_min;
    let beta = eta * range.c_max;
    let width = beta - alpha;
    if width <= 0.0 {
        return Ok(Chi2Bound {
            chi2: 0.0,
            gamma_opt: alpha,
            mu: 0.0,
            output_probs: [0.5, 0.5],
        });
    }
    let (fa, fb) = (f_unchecked(alpha), f_unchecked(beta));
    let mu = (fb - fa) / width;
    let t = (4.0 * mu / 3.0).exp2();
    let gamma = ((1.0 - t) / (3.0 + t)).clamp(alpha, beta);
    let w_alpha = (beta - gamma) / width;
    let w_beta = (gamma - alpha) / width;
    let chord = w_alpha * fa + w_beta * fb;
    Ok(Chi2Bound {
        chi2: (f_unchecked(gamma) - chord).max(0.0),
        gamma_opt: gamma,
        mu,
        output_probs: [w_alpha, w_beta],
    })
}

/// The two-photon bound exactly as typeset in the source derivation,
/// `log2(3 + 2^{4μ/3}) − f(η c_min) + μ(η c_min − 1/3) − 2`.
///
/// Kept only to document that it is off by a constant: at `η = 1` with
/// entangled inputs it gives −1, which no Holevo quantity can be.
pub fn chi2_printed_formula(range: &CRange, eta: f64) -> f64 {
    let alpha = eta * range.c_min;
    let beta = eta * range.c_max;
    let mu = (f_unchecked(beta) - f_unchecked(alpha)) / (beta - alpha);
    (3.0 + (4.0 * mu / 3.0).exp2()).log2() - f_unchecked(alpha) + mu * (alpha - 1.0 / 3.0) - 2.0
}

/// One-photon capacity: one bit, from which slot carries the photon.
///
/// The output entropy of any one-photon input lies in `[1, 2]`, so `χ^(1) ≤ 1`,
/// and the bound is reached by photons confined to slot A or slot B whatever
/// `η′` is.
pub fn chi1() -> f64 {
    1.0
}

/// Zero-photon capacity: a single state carries nothing.
pub fn chi0() -> f64 {
    0.0
}

/// Optimal mix of block capacities: `(log2 Σ 2^{χ_k}, p_k ∝ 2^{χ_k})`.
pub fn combine_subspace_capacities(chis: &[f64]) -> Result<(f64, Vec<f64>)> {
    if chis.is_empty() {
        return Err(Error::Contract("no block capacities".into()));
    }
    if let Some(bad) = chis.iter().find(|x| x.is_nan() || **x < 0.0) {
        return Err(Error::Contract(format!("block capacity {bad} is negative")));
    }
    let m = chis.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = chis.iter().map(|x| (x - m).exp2()).collect();
    let z: f64 = weights.iter().sum();
    let probs = weights.iter().map(|w| w / z).collect();
    Ok((m + z.log2(), probs))
}

/// Per-block Holevo quantities and their optimal combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityBreakdown {
    pub chi0: f64,
    pub chi1: f64,
    pub chi2: f64,
    pub block_probs: [f64; 3],
    pub total: f64,
    pub gamma_opt: f64,
    pub mu: f64,
}

pub fn capacity_breakdown(mode: CurveMode, eta: f64) -> Result<CapacityBreakdown> {
    let bound = match mode.input_mode() {
        Some(m) => chi2_bound(&m.range(), eta)?,
        None => {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::Contract(format!("eta = {eta} outside [0, 1]")));
            }
            Chi2Bound {
                chi2: 0.0,
                gamma_opt: 0.0,
                mu: 0.0,
                output_probs: [0.5, 0.5],
            }
        }
    };
    let chis = [chi0(), chi1(), bound.chi2];
    let (total, probs) = combine_subspace_capacities(&chis)?;
    Ok(CapacityBreakdown {
        chi0: chis[0],
        chi1: chis[1],
        chi2: chis[2],
        block_probs: [probs[0], probs[1], probs[2]],
        total,
        gamma_opt: bound.gamma_opt,
        mu: bound.mu,
    })
}

/// Input alphabet of two-photon states described by Werner parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WernerEnsemble {
    items: Vec<(f64, f64)>,
}

impl WernerEnsemble {
    pub fn new(items: Vec<(f64, f64)>, range: &CRange) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Contract("empty Werner ensemble".into()));
        }
        if items.iter().any(|(q, _)| q.is_nan() || *q < 0.0) {
            return Err(Error::Contract("negative ensemble probability".into()));
        }
        let total: f64 = items.iter().map(|(q, _)| q).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Contract(format!("probabilities sum to {total}")));
        }
        if let Some((_, c)) = items.iter().find(|(_, c)| !range.contains(*c)) {
            return Err(Error::Contract(format!(
                "Werner parameter {c} outside the {} range",
                range.mode.name()
            )));
        }
        Ok(Self { items })
    }

    pub fn items(&self) -> &[(f64, f64)] {
        &self.items
    }
}

/// `f(Σ q_j η c_j) − Σ q_j f(η c_j)`.
pub fn holevo_of_werner_ensemble(ens: &WernerEnsemble, eta: f64) -> Result<f64> {
    let mean: f64 = ens.items.iter().map(|(q, c)| q * eta * c).sum();
    let mut chi = f_of_c(mean)?;
    for (q, c) in &ens.items {
        chi -= q * f_of_c(eta * c)?;
    }
    Ok(chi.max(0.0))
}

pub const BRUTE_FORCE_TOL: f64 = 1e-10;
pub const BRUTE_FORCE_MAX_ITERATIONS: usize = 100_000;

/// Two-photon capacity by Blahut–Arimoto over a uniform grid of input `c`.
///
/// Werner outputs all commute, so the Holevo maximum equals the classical
/// capacity of the channel `c ↦ {singlet, triplet}` with probabilities
/// `((1 − 3ηc)/4, 3(1 + ηc)/4)`.
pub fn brute_force_chi2(range: &CRange, eta: f64, grid_points: usize) -> Result<f64> {
    if grid_points < 11 {
        return Err(Error::Contract(format!(
            "grid needs at least 11 points, got {grid_points}"
        )));
    }
    let rows: Vec<[f64; 2]> = (0..grid_points)
        .map(|i| {
            let c = range.c_min + (range.c_max - range.c_min) * i as f64 / (grid_points - 1) as f64;
            let g = eta * c;
            let s = ((1.0 - 3.0 * g) / 4.0).clamp(0.0, 1.0);
            [s, 1.0 - s]
        })
        .collect();
    Ok(blahut_arimoto(&rows, BRUTE_FORCE_TOL, BRUTE_FORCE_MAX_ITERATIONS)?.capacity)
}

/// A labelled member of the optimal input ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleMember {
    pub label: &'static str,
    pub photons: usize,
    pub probability: f64,
    pub within_block_probability: f64,
    /// Werner parameter for two-photon members.
    pub werner_parameter: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalEnsemble {
    pub mode: InputMode,
    pub eta: f64,
    pub members: Vec<EnsembleMember>,
    pub ensemble: StateEnsemble,
    pub breakdown: CapacityBreakdown,
    pub pair_probs: [f64; 2],
}

/// Vacuum, a vertical photon in slot A or B, and the two extreme two-photon states.
pub fn optimal_input_ensemble(mode: InputMode, eta: f64) -> Result<OptimalEnsemble> {
    let range = mode.range();
    let bound = chi2_bound(&range, eta)?;
    let breakdown = capacity_breakdown(
        match mode {
            InputMode::Entangled => CurveMode::Entangled,
            InputMode::Separable => CurveMode::Separable,
        },
        eta,
    )?;
    let [p0, p1, p2] = breakdown.block_probs;
    let [wa, wb] = bound.output_probs;

    let (low_label, low_state) = match mode {
        InputMode::Entangled => ("|Psi-⟩", ket(basis::DIM, basis::SINGLET)),
        InputMode::Separable => (
            "|V_A H_B⟩",
            product_ket(SlotState::Vertical, SlotState::Horizontal),
        ),
    };
    // (label, photons, within-block probability, state, Werner parameter)
    type Spec = (&'static str, usize, f64, Vec<C64>, Option<f64>);
    let specs: Vec<Spec> = vec![
        ("|0_A 0_B⟩", 0, 1.0, ket(basis::DIM, basis::VACUUM), None),
        ("|V_A 0_B⟩", 1, 0.5, ket(basis::DIM, basis::V_A), None),
        ("|0_A V_B⟩", 1, 0.5, ket(basis::DIM, basis::V_B), None),
        (low_label, 2, wa, low_state, Some(range.c_min)),
        (
            "|V_A V_B⟩",
            2,
            wb,
            ket(basis::DIM, basis::VV),
            Some(range.c_max),
        ),
    ];
    let block_p = [p0, p1, p2];
    let mut members = Vec::new();
    let mut items = Vec::new();
    for (label, photons, within, vec, c) in specs {
        let probability = block_p[photons] * within;
        members.push(EnsembleMember {
            label,
            photons,
            probability,
            within_block_probability: within,
            werner_parameter: c,
        });
        items.push((probability, DensityOperator::pure(&vec, BasisTag::TwoSlot)?));
    }
    // absorb rounding so the ensemble validates
    let total: f64 = items.iter().map(|(p, _)| p).sum();
    for (p, _) in items.iter_mut() {
        *p /= total;
    }
    Ok(OptimalEnsemble {
        mode,
        eta,
        members,
        ensemble: StateEnsemble::new(items)?,
        breakdown,
        pair_probs: [wa, wb],
    })
}

/// Total capacity for each `η` in the grid, in grid order.
pub fn capacity_curve(mode: CurveMode, eta_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    eta_grid
        .par_iter()
        .map(|&eta| Ok((eta, capacity_breakdown(mode, eta)?.total)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{von_neumann_entropy, werner_state};

    #[test]
    fn f_spot_values() {
        assert!((f_of_c(0.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(f_of_c(-1.0).unwrap().abs() < 1e-12);
        assert!((f_of_c(1.0 / 3.0).unwrap() - 3f64.log2()).abs() < 1e-12);
        assert!(f_of_c(0.4).is_err());
        assert!(f_of_c(-1.01).is_err());
    }

    #[test]
    fn f_is_werner_entropy() {
        for i in 0..100 {
            let c = -1.0 + (4.0 / 3.0) * i as f64 / 99.0;
            let s = von_neumann_entropy(&werner_state(c).unwrap()).unwrap();
            assert!((f_of_c(c).unwrap() - s).abs() < 1e-12, "c = {c}");
        }
    }

    #[test]
    fn f_strictly_concave() {
        let n = 200;
        let h = (4.0 / 3.0) / (n as f64 + 1.0);
        for i in 1..n {
            let c = -1.0 + h * i as f64;
            let d2 = f_of_c(c + h).unwrap() - 2.0 * f_of_c(c).unwrap() + f_of_c(c - h).unwrap();
            assert!(d2 < 0.0, "second difference {d2} at c = {c}");
        }
    }

    #[test]
    fn chi2_entangled_perfect_correlation() {
        let b = chi2_bound(&InputMode::Entangled.range(), 1.0).unwrap();
        assert!((b.chi2 - 1.0).abs() < 1e-12);
        assert!((b.gamma_opt + 1.0 / 3.0).abs() < 1e-12);
        assert!((b.output_probs[0] - 0.5).abs() < 1e-12);
        assert!((b.output_probs[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn chi2_separable_perfect_correlation() {
        let b = chi2_bound(&InputMode::Separable.range(), 1.0).unwrap();
        assert!((b.chi2 - 1.25f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn chi2_vanishes_without_correlation() {
        for mode in [InputMode::Entangled, InputMode::Separable] {
            let b = chi2_bound(&mode.range(), 0.0).unwrap();
            assert_eq!(b.chi2, 0.0);
            assert_eq!(b.output_probs, [0.5, 0.5]);
        }
        assert!(chi2_bound(&InputMode::Entangled.range(), 1.5).is_err());
    }

    #[test]
    fn printed_formula_is_off_by_two_bits() {
        let r = InputMode::Entangled.range();
        assert!((chi2_printed_formula(&r, 1.0) + 1.0).abs() < 1e-12);
        for i in 1..=10 {
            let eta = i as f64 / 10.0;
            for mode in [InputMode::Entangled, InputMode::Separable] {
                let r = mode.range();
                let diff = chi2_bound(&r, eta).unwrap().chi2 - chi2_printed_formula(&r, eta);
                assert!((diff - 2.0).abs() < 1e-9, "{mode:?} eta={eta}: {diff}");
            }
        }
    }

    #[test]
    fn gamma_opt_is_stationary() {
        for i in 1..=10 {
            let eta = i as f64 / 10.0;
            for mode in [InputMode::Entangled, InputMode::Separable] {
                let b = chi2_bound(&mode.range(), eta).unwrap();
                let h = 1e-6;
                let fd = (f_of_c(b.gamma_opt + h).unwrap() - f_of_c(b.gamma_opt - h).unwrap())
                    / (2.0 * h);
                assert!(
                    (fd - b.mu).abs() < 1e-9,
                    "{mode:?} eta={eta}: {fd} vs {}",
                    b.mu
                );
                assert!((f_prime(b.gamma_opt) - b.mu).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn combine_examples() {
        let (t, p) = combine_subspace_capacities(&[0.0, 1.0, 1.0]).unwrap();
        assert!((t - 5f64.log2()).abs() < 1e-12);
        for (a, b) in p.iter().zip([0.2, 0.4, 0.4]) {
            assert!((a - b).abs() < 1e-12);
        }
        let (t, p) = combine_subspace_capacities(&[0.0, 1.0, 0.0]).unwrap();
        assert!((t - 2.0).abs() < 1e-12);
        assert!((p[1] - 0.5).abs() < 1e-12);
        let (t, _) = combine_subspace_capacities(&[0.0]).unwrap();
        assert_eq!(t, 0.0);
        assert!(combine_subspace_capacities(&[-0.5]).is_err());
    }

    #[test]
    fn vacuum_state_increases_total() {
        let (with, _) = combine_subspace_capacities(&[chi0(), chi1(), 1.0]).unwrap();
        let (without, _) = combine_subspace_capacities(&[chi1(), 1.0]).unwrap();
        assert!(with > without);
    }

    #[test]
    fn werner_ensemble_examples() {
        let r = InputMode::Entangled.range();
        let single = WernerEnsemble::new(vec![(1.0, -0.7)], &r).unwrap();
        assert_eq!(holevo_of_werner_ensemble(&single, 1.0).unwrap(), 0.0);
        let pair = WernerEnsemble::new(vec![(0.5, -1.0), (0.5, 1.0 / 3.0)], &r).unwrap();
        assert!((holevo_of_werner_ensemble(&pair, 1.0).unwrap() - 1.0).abs() < 1e-12);
        let zero = WernerEnsemble::new(vec![(1.0, 0.0)], &r).unwrap();
        assert_eq!(holevo_of_werner_ensemble(&zero, 0.3).unwrap(), 0.0);
        assert!(WernerEnsemble::new(vec![(1.0, -0.9)], &InputMode::Separable.range()).is_err());
        assert!(WernerEnsemble::new(vec![(0.4, 0.0)], &r).is_err());
    }

    #[test]
    fn brute_force_endpoints() {
        let e = brute_force_chi2(&InputMode::Entangled.range(), 1.0, 41).unwrap();
        assert!((e - 1.0).abs() < 1e-6);
        let s = brute_force_chi2(&InputMode::Separable.range(), 1.0, 41).unwrap();
        assert!((s - 1.25f64.log2()).abs() < 1e-6);
        let z = brute_force_chi2(&InputMode::Entangled.range(), 0.0, 41).unwrap();
        assert!(z.abs() < 1e-10);
        assert!(brute_force_chi2(&InputMode::Entangled.range(), 1.0, 5).is_err());
    }

    #[test]
    fn optimal_ensemble_entangled() {
        let o = optimal_input_ensemble(InputMode::Entangled, 1.0).unwrap();
        assert!((o.pair_probs[0] - 0.5).abs() < 1e-12);
        assert_eq!(o.members[3].label, "|Psi-⟩");
        let total: f64 = o.ensemble.items().iter().map(|(p, _)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for (a, b) in o.breakdown.block_probs.iter().zip([0.2, 0.4, 0.4]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn optimal_ensemble_separable_uses_extreme_separable_states() {
        let o = optimal_input_ensemble(InputMode::Separable, 1.0).unwrap();
        assert_eq!(o.members[3].werner_parameter, Some(-1.0 / 3.0));
        assert_eq!(o.members[4].werner_parameter, Some(1.0 / 3.0));
    }

    #[test]
    fn curve_endpoints() {
        let e = capacity_curve(CurveMode::Entangled, &[0.0, 1.0]).unwrap();
        assert!((e[1].1 - 5f64.log2()).abs() < 1e-12);
        assert!((e[0].1 - 2.0).abs() < 1e-12);
        let s = capacity_curve(CurveMode::Separable, &[1.0]).unwrap();
        assert!((s[0].1 - 4.25f64.log2()).abs() < 1e-12);
        let b = capacity_curve(CurveMode::Baseline, &[0.5]).unwrap();
        assert_eq!(b[0].1, 2.0);
    }
}
