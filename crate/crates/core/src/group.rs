//! U(2) polarization transformations and their representation matrices.
//!
//! An element is stored as an SU(2) matrix `D^{1/2}` together with an overall
//! phase `α`, so the physical 2×2 transformation is `e^{iα}·D^{1/2}`. The
//! single-slot unitary acts on `{|0⟩, |↔⟩, |↕⟩}` and the two-slot unitary is
//! expressed in the fixed 9-dimensional basis of [`crate::qstate`].

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qstate::{basis, ComplexMatrix, C64};

/// Spin label of an irreducible SU(2) representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Spin {
    Zero,
    Half,
    One,
}

impl Spin {
    pub fn dim(self) -> usize {
        match self {
            Spin::Zero => 1,
            Spin::Half => 2,
            Spin::One => 3,
        }
    }

    /// Twice the spin, `2j`.
    pub fn twice(self) -> u32 {
        match self {
            Spin::Zero => 0,
            Spin::Half => 1,
            Spin::One => 2,
        }
    }

    /// Parses `2j` into a supported spin.
    pub fn from_twice(two_j: u32) -> Result<Self> {
        match two_j {
            0 => Ok(Spin::Zero),
            1 => Ok(Spin::Half),
            2 => Ok(Spin::One),
            _ => Err(Error::Contract(format!(
                "representation j = {two_j}/2 is not supported"
            ))),
        }
    }
}

/// U(2) element: SU(2) part plus an overall phase in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElementU2 {
    /// Row-major `[[a, b], [−b*, a*]]`.
    su2: [C64; 4],
    phase: f64,
}

fn wrap_phase(alpha: f64) -> f64 {
    let w = alpha.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

impl GroupElementU2 {
    pub fn identity() -> Self {
        Self::from_parts(C64::new(1.0, 0.0), C64::new(0.0, 0.0), 0.0)
    }

    /// Builds `[[a, b], [−b*, a*]]` with phase `alpha`; `|a|² + |b|²` is normalized to 1.
    pub fn from_parts(a: C64, b: C64, alpha: f64) -> Self {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / n, b / n);
        Self {
            su2: [a, b, -b.conj(), a.conj()],
            phase: wrap_phase(alpha),
        }
    }

    /// From a unit quaternion `(w, x, y, z)` and a phase.
    pub fn from_quaternion(q: [f64; 4], alpha: f64) -> Self {
        Self::from_parts(C64::new(q[0], q[3]), C64::new(q[2], q[1]), alpha)
    }

    pub fn su2(&self) -> [[C64; 2]; 2] {
        [[self.su2[0], self.su2[1]], [self.su2[2], self.su2[3]]]
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn det(&self) -> C64 {
        self.su2[0] * self.su2[3] - self.su2[1] * self.su2[2]
    }

    pub fn su2_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_rows(self.su2.to_vec()).expect("2x2")
    }
}

/// Haar-random element: normalized Gaussian quaternion and uniform phase.
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> GroupElementU2 {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let alpha = rng.gen::<f64>() * TAU;
    GroupElementU2::from_quaternion(q, alpha)
}

/// Group product `a · b`.
pub fn compose(a: &GroupElementU2, b: &GroupElementU2) -> GroupElementU2 {
    let [a0, a1, a2, a3] = a.su2;
    let [b0, b1, b2, b3] = b.su2;
    GroupElementU2 {
        su2: [
            a0 * b0 + a1 * b2,
            a0 * b1 + a1 * b3,
            a2 * b0 + a3 * b2,
            a2 * b1 + a3 * b3,
        ],
        phase: wrap_phase(a.phase + b.phase),
    }
}

pub fn inverse(a: &GroupElementU2) -> GroupElementU2 {
    let [a0, a1, a2, a3] = a.su2;
    GroupElementU2 {
        su2: [a0.conj(), a2.conj(), a1.conj(), a3.conj()],
        phase: wrap_phase(-a.phase),
    }
}

/// Representation matrix `D^j(Ω)` (overall phase excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct WignerD {
    pub spin: Spin,
    pub matrix: ComplexMatrix,
}

/// `D^0`, `D^{1/2}` or `D^1` of the SU(2) part of `omega`.
///
/// `D^1` acts on the triplet `(|↔↔⟩, |Ψ+⟩, |↕↕⟩)` and is written out as the
/// degree-2 polynomials of the `D^{1/2}` entries.
pub fn wigner_d(spin: Spin, omega: &GroupElementU2) -> WignerD {
    let matrix = match spin {
        Spin::Zero => ComplexMatrix::identity(1),
        Spin::Half => omega.su2_matrix(),
        Spin::One => {
            let [u00, u01, u10, u11] = omega.su2;
            let r2 = std::f64::consts::SQRT_2;
            ComplexMatrix::from_rows(vec![
                u00 * u00,
                r2 * u00 * u01,
                u01 * u01,
                r2 * u00 * u10,
                u00 * u11 + u01 * u10,
                r2 * u01 * u11,
                u10 * u10,
                r2 * u10 * u11,
                u11 * u11,
            ])
            .expect("3x3")
        }
    };
    WignerD { spin, matrix }
}

/// Single-slot unitary on `{|0⟩, |↔⟩, |↕⟩}`: `1 ⊕ e^{iα} D^{1/2}`.
pub fn slot_unitary(omega: &GroupElementU2) -> ComplexMatrix {
    let ph = C64::from_polar(1.0, omega.phase);
    let mut u = ComplexMatrix::zeros(3);
    u[(0, 0)] = C64::new(1.0, 0.0);
    for r in 0..2 {
        for c in 0..2 {
            u[(1 + r, 1 + c)] = ph * omega.su2[2 * r + c];
        }
    }
    u
}

/// `U(Ω) ⊗ U(Ω)` in the fixed basis:
/// `1 ⊕ e^{iα}(D^{1/2} ⊕ D^{1/2}) ⊕ e^{2iα}(D^0 ⊕ D^1)`.
pub fn two_slot_unitary(omega: &GroupElementU2) -> ComplexMatrix {
    let ph = C64::from_polar(1.0, omega.phase);
    let ph2 = C64::from_polar(1.0, 2.0 * omega.phase);
    let d1 = wigner_d(Spin::One, omega).matrix;
    let mut u = ComplexMatrix::zeros(basis::DIM);
    u[(basis::VACUUM, basis::VACUUM)] = C64::new(1.0, 0.0);
    for r in 0..2 {
        for c in 0..2 {
            let e = ph * omega.su2[2 * r + c];
            u[(basis::H_A + r, basis::H_A + c)] = e;
            u[(basis::H_B + r, basis::H_B + c)] = e;
        }
    }
    u[(basis::SINGLET, basis::SINGLET)] = ph2;
    for r in 0..3 {
        for c in 0..3 {
            u[(basis::HH + r, basis::HH + c)] = ph2 * d1[(r, c)];
        }
    }
    u
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub re: f64,
    pub im: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// One matrix element `D^j_{mn}` addressed by 0-based row/column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DElement {
    pub spin: Spin,
    pub row: usize,
    pub col: usize,
}

impl DElement {
    pub fn new(spin: Spin, row: usize, col: usize) -> Result<Self> {
        if row >= spin.dim() || col >= spin.dim() {
            return Err(Error::Contract(format!(
                "index ({row},{col}) out of range for j = {}/2",
                spin.twice()
            )));
        }
        Ok(Self { spin, row, col })
    }
}

pub const MIN_ORTHOGONALITY_SAMPLES: usize = 1_000;

/// Monte Carlo estimate of `∫ dΩ [D^j_{mn}(Ω)]* D^{j'}_{m'n'}(Ω)` over Haar measure.
pub fn mc_orthogonality<R: Rng + ?Sized>(
    left: DElement,
    right: DElement,
    samples: usize,
    rng: &mut R,
) -> Result<McEstimate> {
    if samples < MIN_ORTHOGONALITY_SAMPLES {
        return Err(Error::Contract(format!(
            "need at least {MIN_ORTHOGONALITY_SAMPLES} samples, got {samples}"
        )));
    }
    let mut sum = C64::new(0.0, 0.0);
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let g = haar_sample(rng);
        let l = element_of(left, &g);
        let r = element_of(right, &g);
        let x = l.conj() * r;
        sum += x;
        sum_sq += x.norm_sqr();
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq / n - mean.norm_sqr()) * n / (n - 1.0)).max(0.0);
    Ok(McEstimate {
        re: mean.re,
        im: mean.im,
        std_error: (var / n).sqrt(),
        samples,
    })
}

fn element_of(e: DElement, g: &GroupElementU2) -> C64 {
    match e.spin {
        Spin::Zero => C64::new(1.0, 0.0),
        Spin::Half => g.su2[2 * e.row + e.col],
        Spin::One => wigner_d(Spin::One, g).matrix[(e.row, e.col)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::product_to_fixed;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn close(a: &GroupElementU2, b: &GroupElementU2, tol: f64) -> bool {
        a.su2_matrix().max_abs_diff(&b.su2_matrix()) < tol && {
            let d = (a.phase - b.phase).abs();
            d.min(TAU - d) < tol
        }
    }

    #[test]
    fn samples_are_special_unitary() {
        let mut r = rng(1);
        for _ in 0..10_000 {
            let g = haar_sample(&mut r);
            assert!(g.su2_matrix().unitarity_deviation() < 1e-12);
            assert!((g.det() - C64::new(1.0, 0.0)).norm() < 1e-12);
            assert!((0.0..TAU).contains(&g.phase()));
            assert!(slot_unitary(&g).unitarity_deviation() < 1e-12);
            assert!(two_slot_unitary(&g).unitarity_deviation() < 1e-12);
        }
    }

    #[test]
    fn group_axioms() {
        let mut r = rng(2);
        let a = haar_sample(&mut r);
        let b = haar_sample(&mut r);
        assert!(close(&compose(&GroupElementU2::identity(), &a), &a, 1e-15));
        assert!(close(
            &compose(&a, &inverse(&a)),
            &GroupElementU2::identity(),
            1e-12
        ));
        let ab = compose(&a, &b);
        assert!((ab.phase() - (a.phase() + b.phase()).rem_euclid(TAU)).abs() < 1e-12);
    }

    #[test]
    fn representation_is_homomorphism() {
        let mut r = rng(3);
        for _ in 0..1_000 {
            let a = haar_sample(&mut r);
            let b = haar_sample(&mut r);
            let ab = compose(&a, &b);
            for spin in [Spin::Half, Spin::One] {
                let lhs = wigner_d(spin, &ab).matrix;
                let rhs = wigner_d(spin, &a).matrix.matmul(&wigner_d(spin, &b).matrix);
                assert!(lhs.max_abs_diff(&rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn trivial_representations() {
        let mut r = rng(4);
        let g = haar_sample(&mut r);
        assert_eq!(wigner_d(Spin::Zero, &g).matrix, ComplexMatrix::identity(1));
        let id = GroupElementU2::identity();
        assert!(
            wigner_d(Spin::One, &id)
                .matrix
                .max_abs_diff(&ComplexMatrix::identity(3))
                < 1e-15
        );
        assert!(Spin::from_twice(3).is_err());
    }

    // D^{1/2} ⊗ D^{1/2} conjugated into (singlet, triplet) coordinates must be D^0 ⊕ D^1.
    #[test]
    fn tensor_square_decomposes_into_singlet_and_triplet() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let hh = C64::new(h, 0.0);
        // rows: Ψ−, ↔↔, Ψ+, ↕↕ in product coordinates (↔↔, ↔↕, ↕↔, ↕↕)
        let t = ComplexMatrix::from_rows(vec![
            z, hh, -hh, z, //
            o, z, z, z, //
            z, hh, hh, z, //
            z, z, z, o,
        ])
        .unwrap();
        let mut r = rng(5);
        for _ in 0..100 {
            let g = haar_sample(&mut r);
            let half = g.su2_matrix();
            let rotated = half.kron(&half).conjugate_by(&t);
            let d1 = wigner_d(Spin::One, &g).matrix;
            let mut expected = ComplexMatrix::zeros(4);
            expected[(0, 0)] = o;
            for i in 0..3 {
                for j in 0..3 {
                    expected[(1 + i, 1 + j)] = d1[(i, j)];
                }
            }
            assert!(rotated.max_abs_diff(&expected) < 1e-12);
        }
    }

    #[test]
    fn slot_unitary_examples() {
        assert!(
            slot_unitary(&GroupElementU2::identity()).max_abs_diff(&ComplexMatrix::identity(3))
                < 1e-15
        );
        let g = GroupElementU2::from_parts(
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            std::f64::consts::PI,
        );
        let expected = ComplexMatrix::from_real_diagonal(&[1.0, -1.0, -1.0]);
        assert!(slot_unitary(&g).max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn two_slot_unitary_matches_tensor_product() {
        let b = product_to_fixed();
        let mut r = rng(6);
        assert!(
            two_slot_unitary(&GroupElementU2::identity()).max_abs_diff(&ComplexMatrix::identity(9))
                < 1e-15
        );
        for _ in 0..200 {
            let g = haar_sample(&mut r);
            let u = slot_unitary(&g);
            let oracle = u.kron(&u).conjugate_by(&b);
            let direct = two_slot_unitary(&g);
            assert!(direct.max_abs_diff(&oracle) < 1e-12);
            let singlet = crate::qstate::ket(9, basis::SINGLET);
            let image = direct.matvec(&singlet);
            let ph2 = C64::from_polar(1.0, 2.0 * g.phase());
            assert!(image
                .iter()
                .zip(&singlet)
                .all(|(x, s)| (x - ph2 * s).norm() < 1e-12));
        }
    }

    #[test]
    fn orthogonality_rejects_small_sample_and_bad_index() {
        let mut r = rng(7);
        let e = DElement::new(Spin::Half, 0, 0).unwrap();
        assert!(mc_orthogonality(e, e, 10, &mut r).is_err());
        assert!(DElement::new(Spin::Half, 2, 0).is_err());
    }

    #[test]
    fn haar_moments() {
        let mut r = rng(8);
        let n = 100_000;
        let mut mean = C64::new(0.0, 0.0);
        let mut sq = 0.0;
        for _ in 0..n {
            let g = haar_sample(&mut r);
            let d = g.su2()[0][0];
            mean += d;
            sq += d.norm_sqr();
        }
        assert!((mean / n as f64).norm() < 5e-3);
        assert!((sq / n as f64 - 0.5).abs() < 5e-3);
    }
}
