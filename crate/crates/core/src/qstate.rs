//! Dense complex linear algebra and density operators on the two-slot space.
//!
//! Each temporal slot holds the vacuum or a single photon with horizontal
//! (↔) or vertical (↕) polarization, so the joint space is 9-dimensional.
//! All code in this crate uses one fixed ordering of that space:
//!
//! | index | state        | photons |
//! |-------|--------------|---------|
//! | 0     | `|0_A 0_B⟩`  | 0       |
//! | 1     | `|↔_A 0_B⟩`  | 1       |
//! | 2     | `|↕_A 0_B⟩`  | 1       |
//! | 3     | `|0_A ↔_B⟩`  | 1       |
//! | 4     | `|0_A ↕_B⟩`  | 1       |
//! | 5     | `|Ψ−⟩`       | 2       |
//! | 6     | `|↔_A ↔_B⟩`  | 2       |
//! | 7     | `|Ψ+⟩`       | 2       |
//! | 8     | `|↕_A ↕_B⟩`  | 2       |
//!
//! with `|Ψ±⟩ = (|↔_A ↕_B⟩ ± |↕_A ↔_B⟩)/√2`. The photon-number blocks are the
//! index ranges `0..1`, `1..5` and `5..9`.

use std::ops::{Index, IndexMut, Range};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues above `-NEGATIVITY_TOL` are treated as rounding noise and clipped to zero.
pub const NEGATIVITY_TOL: f64 = 1e-10;

const JACOBI_OFFDIAG_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Indices into the fixed 9-dimensional basis.
pub mod basis {
    use std::ops::Range;

    pub const VACUUM: usize = 0;
    pub const H_A: usize = 1;
    pub const V_A: usize = 2;
    pub const H_B: usize = 3;
    pub const V_B: usize = 4;
    pub const SINGLET: usize = 5;
    pub const HH: usize = 6;
    pub const PSI_PLUS: usize = 7;
    pub const VV: usize = 8;

    pub const DIM: usize = 9;

    pub const BLOCKS: [Range<usize>; 3] = [0..1, 1..5, 5..9];

    /// Photon number of a basis index.
    pub fn photon_number(index: usize) -> usize {
        match index {
            0 => 0,
            1..=4 => 1,
            _ => 2,
        }
    }
}

/// Occupation of a single temporal slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotState {
    Vacuum,
    Horizontal,
    Vertical,
}

impl SlotState {
    /// Index into the 3-dimensional single-slot space `{|0⟩, |↔⟩, |↕⟩}`.
    pub fn index(self) -> usize {
        match self {
            SlotState::Vacuum => 0,
            SlotState::Horizontal => 1,
            SlotState::Vertical => 2,
        }
    }
}

/// Square, row-major, dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from row-major entries; fails unless `entries.len()` is a nonzero square.
    pub fn from_rows(entries: Vec<C64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != entries.len() {
            return Err(Error::Contract(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|v⟩⟨v|` for an (unnormalized) vector.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |r, c| v[r] * v[c].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: C64, other: &Self) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len());
        let n = self.dim;
        (0..n)
            .map(|r| (0..n).map(|c| self.data[r * n + c] * v[c]).sum())
            .collect()
    }

    /// `U · self · U†`
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |r, c| self[(r / m, c / m)] * other[(r % m, c % m)])
    }

    /// Square sub-matrix on the index range `range`.
    pub fn sub_block(&self, range: Range<usize>) -> Self {
        let start = range.start;
        Self::from_fn(range.len(), |r, c| self[(start + r, start + c)])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|A_rc − conj(A_cr)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev = 0.0_f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// Largest deviation of `U·U†` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        self.matmul(&self.adjoint())
            .max_abs_diff(&Self::identity(self.dim))
    }

    /// Eigenvalues of a Hermitian matrix in ascending order, by cyclic Jacobi rotations.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if self.hermitian_deviation() > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "matrix is not Hermitian (deviation {:e})",
                self.hermitian_deviation()
            )));
        }
        let n = self.dim;
        let mut a = self.clone();
        for i in 0..n {
            a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        }
        let mut converged = false;
        for _ in 0..JACOBI_MAX_SWEEPS {
            if a.max_offdiagonal() < JACOBI_OFFDIAG_TOL {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    a.jacobi_rotate(p, q);
                }
            }
        }
        if !converged && a.max_offdiagonal() >= JACOBI_OFFDIAG_TOL {
            return Err(Error::Numeric(format!(
                "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps"
            )));
        }
        let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        eig.sort_by(f64::total_cmp);
        Ok(eig)
    }

    fn max_offdiagonal(&self) -> f64 {
        let mut m = 0.0_f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                if r != c {
                    m = m.max(self[(r, c)].norm());
                }
            }
        }
        m
    }

    // Zeroes A[p][q] with J = diag-phase · real rotation, A ← J† A J.
    fn jacobi_rotate(&mut self, p: usize, q: usize) {
        let apq = self[(p, q)];
        let r = apq.norm();
        if r < 1e-300 {
            return;
        }
        let phase = apq / r; // e^{iφ}
        let app = self[(p, p)].re;
        let aqq = self[(q, q)].re;
        let theta = (aqq - app) / (2.0 * r);
        let t = if theta >= 0.0 {
            1.0 / (theta + (theta * theta + 1.0).sqrt())
        } else {
            -1.0 / (-theta + (theta * theta + 1.0).sqrt())
        };
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;
        let n = self.dim;
        // columns: A ← A J
        let jqp = -s * phase.conj();
        let jqq = c * phase.conj();
        for k in 0..n {
            let akp = self[(k, p)];
            let akq = self[(k, q)];
            self[(k, p)] = akp * c + akq * jqp;
            self[(k, q)] = akp * s + akq * jqq;
        }
        // rows: A ← J† A
        for k in 0..n {
            let apk = self[(p, k)];
            let aqk = self[(q, k)];
            self[(p, k)] = apk * c + aqk * jqp.conj();
            self[(q, k)] = apk * s + aqk * jqq.conj();
        }
        self[(p, q)] = C64::new(0.0, 0.0);
        self[(q, p)] = C64::new(0.0, 0.0);
        self[(p, p)] = C64::new(self[(p, p)].re, 0.0);
        self[(q, q)] = C64::new(self[(q, q)].re, 0.0);
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        assert!(r < self.dim && c < self.dim, "index ({r},{c}) out of range");
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        assert!(r < self.dim && c < self.dim, "index ({r},{c}) out of range");
        &mut self.data[r * self.dim + c]
    }
}

/// Which space a density operator lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisTag {
    /// The full 9-dimensional two-slot space in the fixed ordering.
    TwoSlot,
    /// Zero-photon block, `{|0_A 0_B⟩}`.
    ZeroPhoton,
    /// One-photon block, `{|↔_A 0_B⟩, |↕_A 0_B⟩, |0_A ↔_B⟩, |0_A ↕_B⟩}`.
    OnePhoton,
    /// Two-photon block, `{|Ψ−⟩, |↔↔⟩, |Ψ+⟩, |↕↕⟩}`.
    TwoPhoton,
    /// Any other space, e.g. an auxiliary qubit.
    Generic,
}

impl BasisTag {
    pub fn block(k: usize) -> Self {
        match k {
            0 => BasisTag::ZeroPhoton,
            1 => BasisTag::OnePhoton,
            2 => BasisTag::TwoPhoton,
            _ => panic!("no photon-number block {k}"),
        }
    }

    fn expected_dim(self) -> Option<usize> {
        match self {
            BasisTag::TwoSlot => Some(9),
            BasisTag::ZeroPhoton => Some(1),
            BasisTag::OnePhoton | BasisTag::TwoPhoton => Some(4),
            BasisTag::Generic => None,
        }
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    basis: BasisTag,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix, basis: BasisTag) -> Result<Self> {
        if let Some(d) = basis.expected_dim() {
            if d != matrix.dim() {
                return Err(Error::Contract(format!(
                    "{basis:?} requires dimension {d}, got {}",
                    matrix.dim()
                )));
            }
        }
        let dev = matrix.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian: max deviation {dev:e}"
            )));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let eig = matrix.hermitian_eigenvalues()?;
        if eig[0] < -NEGATIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:e}",
                eig[0]
            )));
        }
        Ok(Self { matrix, basis })
    }

    /// Projector onto a normalized copy of `v`.
    pub fn pure(v: &[C64], basis: BasisTag) -> Result<Self> {
        let norm2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let s = 1.0 / norm2.sqrt();
        let v: Vec<C64> = v.iter().map(|x| x * s).collect();
        Self::new(ComplexMatrix::outer(&v), basis)
    }

    /// `identity / dim`.
    pub fn maximally_mixed(dim: usize, basis: BasisTag) -> Result<Self> {
        Self::new(
            ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
            basis,
        )
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix, basis: BasisTag) -> Self {
        Self { matrix, basis }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Re-tags a state (e.g. treat a two-photon block as a generic two-qubit state).
    pub fn with_basis(self, basis: BasisTag) -> Result<Self> {
        match basis.expected_dim() {
            Some(d) if d != self.dim() => Err(Error::Contract(format!(
                "{basis:?} requires dimension {d}, got {}",
                self.dim()
            ))),
            _ => Ok(Self { basis, ..self }),
        }
    }

    /// `⟨v|ρ|v⟩` for a normalized vector.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        let rv = self.matrix.matvec(v);
        v.iter().zip(&rv).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }
}

/// Basis vector `e_index` in dimension `dim`.
pub fn ket(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[index] = C64::new(1.0, 0.0);
    v
}

/// Change of basis from the 3×3 slot product basis (index `3·s_A + s_B`) to the
/// fixed 9-dimensional basis: `ρ_fixed = B · ρ_product · B†`.
pub fn product_to_fixed() -> ComplexMatrix {
    use basis::*;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut b = ComplexMatrix::zeros(DIM);
    let mut set = |fixed: usize, a: SlotState, bb: SlotState, v: f64| {
        b[(fixed, 3 * a.index() + bb.index())] = C64::new(v, 0.0);
    };
    use SlotState::*;
    set(VACUUM, Vacuum, Vacuum, 1.0);
    set(H_A, Horizontal, Vacuum, 1.0);
    set(V_A, Vertical, Vacuum, 1.0);
    set(H_B, Vacuum, Horizontal, 1.0);
    set(V_B, Vacuum, Vertical, 1.0);
    set(HH, Horizontal, Horizontal, 1.0);
    set(VV, Vertical, Vertical, 1.0);
    // |↔↕⟩ = (Ψ+ + Ψ−)/√2, |↕↔⟩ = (Ψ+ − Ψ−)/√2
    set(SINGLET, Horizontal, Vertical, h);
    set(PSI_PLUS, Horizontal, Vertical, h);
    set(SINGLET, Vertical, Horizontal, -h);
    set(PSI_PLUS, Vertical, Horizontal, h);
    b
}

/// `|a_A b_B⟩` expressed in the fixed 9-dimensional basis.
pub fn product_ket(a: SlotState, b: SlotState) -> Vec<C64> {
    let change = product_to_fixed();
    change.matvec(&ket(basis::DIM, 3 * a.index() + b.index()))
}

/// Pads a block state with zeros into the full 9-dimensional space.
pub fn embed_block(block: &DensityOperator, k: usize) -> Result<DensityOperator> {
    let range = basis::BLOCKS
        .get(k)
        .cloned()
        .ok_or_else(|| Error::Contract(format!("no photon-number block {k}")))?;
    if block.dim() != range.len() {
        return Err(Error::Contract(format!(
            "block {k} has dimension {}, got {}",
            range.len(),
            block.dim()
        )));
    }
    let mut m = ComplexMatrix::zeros(basis::DIM);
    for r in 0..range.len() {
        for c in 0..range.len() {
            m[(range.start + r, range.start + c)] = block.matrix()[(r, c)];
        }
    }
    Ok(DensityOperator::from_trusted(m, BasisTag::TwoSlot))
}

/// Von Neumann entropy in bits, with `0·log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    let eig = rho.matrix().hermitian_eigenvalues()?;
    entropy_of_spectrum(&eig)
}

pub(crate) fn entropy_of_spectrum(eig: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eig {
        if l < -NEGATIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {l:e}")));
        }
        let l = l.clamp(0.0, 1.0);
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Photon-number decomposition of a two-slot state.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    pub weights: [f64; 3],
    /// Normalized diagonal blocks; `None` where the weight is negligible.
    pub blocks: [Option<DensityOperator>; 3],
}

const ABSENT_BLOCK_WEIGHT: f64 = 1e-14;

impl BlockDecomposition {
    /// Σ_k w_k ρ^(k) embedded back into the 9-dimensional space.
    pub fn reassemble(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(basis::DIM);
        for (k, block) in self.blocks.iter().enumerate() {
            if let Some(b) = block {
                let start = basis::BLOCKS[k].start;
                for r in 0..b.dim() {
                    for c in 0..b.dim() {
                        m[(start + r, start + c)] = b.matrix()[(r, c)] * self.weights[k];
                    }
                }
            }
        }
        m
    }
}

/// Truncates a two-slot state to its photon-number blocks and renormalizes each.
pub fn truncate_to_blocks(rho: &DensityOperator) -> Result<BlockDecomposition> {
    if rho.dim() != basis::DIM {
        return Err(Error::Contract(format!(
            "expected a 9-dimensional state, got {}",
            rho.dim()
        )));
    }
    let mut weights = [0.0; 3];
    let mut blocks: [Option<DensityOperator>; 3] = [None, None, None];
    for (k, range) in basis::BLOCKS.iter().enumerate() {
        let sub = rho.matrix().sub_block(range.clone());
        let w = sub.trace().re;
        weights[k] = w;
        if w >= ABSENT_BLOCK_WEIGHT {
            let normalized = sub.scale(C64::new(1.0 / w, 0.0));
            blocks[k] = Some(DensityOperator::from_trusted(
                normalized,
                BasisTag::block(k),
            ));
        }
    }
    Ok(BlockDecomposition { weights, blocks })
}

/// Weighted list of states on a common space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEnsemble {
    items: Vec<(f64, DensityOperator)>,
}

impl StateEnsemble {
    pub fn new(items: Vec<(f64, DensityOperator)>) -> Result<Self> {
        let Some((_, first)) = items.first() else {
            return Err(Error::Contract("empty ensemble".into()));
        };
        let dim = first.dim();
        if items.iter().any(|(_, r)| r.dim() != dim) {
            return Err(Error::Contract(
                "ensemble states differ in dimension".into(),
            ));
        }
        if items.iter().any(|(p, _)| p.is_nan() || *p < 0.0) {
            return Err(Error::Contract("negative ensemble probability".into()));
        }
        let total: f64 = items.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Contract(format!(
                "ensemble probabilities sum to {total}"
            )));
        }
        Ok(Self { items })
    }

    pub fn items(&self) -> &[(f64, DensityOperator)] {
        &self.items
    }

    pub fn dim(&self) -> usize {
        self.items[0].1.dim()
    }

    /// `Σ p_i ρ_i`
    pub fn average(&self) -> Result<DensityOperator> {
        average_state(self.items.iter().map(|(p, r)| (*p, r)))
    }
}

pub(crate) fn average_state<'a>(
    items: impl IntoIterator<Item = (f64, &'a DensityOperator)>,
) -> Result<DensityOperator> {
    let mut iter = items.into_iter().peekable();
    let Some((_, first)) = iter.peek() else {
        return Err(Error::Contract("empty ensemble".into()));
    };
    let basis = first.basis();
    let mut acc = ComplexMatrix::zeros(first.dim());
    for (p, r) in iter {
        acc.add_scaled(C64::new(p, 0.0), r.matrix());
    }
    DensityOperator::new(acc, basis)
}

/// A trace-preserving completely positive map on density operators.
pub trait QuantumChannel {
    fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator>;

    /// Dimension of the input space, when fixed.
    fn input_dim(&self) -> Option<usize> {
        None
    }
}

/// The identity channel on any space.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityChannel;

impl QuantumChannel for IdentityChannel {
    fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        Ok(rho.clone())
    }
}

/// Holevo quantity `S(Σ p_i Λ(ρ_i)) − Σ p_i S(Λ(ρ_i))` in bits.
pub fn holevo_quantity<C: QuantumChannel + ?Sized>(
    ensemble: &StateEnsemble,
    channel: &C,
) -> Result<f64> {
    if let Some(d) = channel.input_dim() {
        if d != ensemble.dim() {
            return Err(Error::Contract(format!(
                "channel expects dimension {d}, ensemble has {}",
                ensemble.dim()
            )));
        }
    }
    let outputs = ensemble
        .items()
        .iter()
        .map(|(p, r)| Ok((*p, channel.apply(r)?)))
        .collect::<Result<Vec<_>>>()?;
    let avg = average_state(outputs.iter().map(|(p, r)| (*p, r)))?;
    let mut chi = von_neumann_entropy(&avg)?;
    for (p, r) in &outputs {
        if *p > 0.0 {
            chi -= p * von_neumann_entropy(r)?;
        }
    }
    Ok(chi)
}

/// Random full-rank state `G G† / tr(G G†)` from a complex Ginibre matrix.
pub fn random_density<R: rand::Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    basis: BasisTag,
) -> Result<DensityOperator> {
    use rand_distr::StandardNormal;
    let g = ComplexMatrix::from_fn(dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    let mut m = m.scale(C64::new(1.0 / tr, 0.0));
    m = m.add(&m.adjoint()).scale(C64::new(0.5, 0.0));
    DensityOperator::new(m, basis)
}

/// Random pure state with Gaussian amplitudes.
pub fn random_pure<R: rand::Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    basis: BasisTag,
) -> Result<DensityOperator> {
    use rand_distr::StandardNormal;
    let v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    DensityOperator::pure(&v, basis)
}

pub const C_MIN: f64 = -1.0;
pub const C_MAX: f64 = 1.0 / 3.0;
const C_RANGE_SLACK: f64 = 1e-12;

/// Werner state `W_c = −c|Ψ−⟩⟨Ψ−| + (1+c)·I/4` on the two-photon block.
pub fn werner_state(c: f64) -> Result<DensityOperator> {
    if !(C_MIN - C_RANGE_SLACK..=C_MAX + C_RANGE_SLACK).contains(&c) {
        return Err(Error::InvalidState(format!(
            "Werner parameter {c} outside [-1, 1/3]"
        )));
    }
    let c = c.clamp(C_MIN, C_MAX);
    let t = (1.0 + c) / 4.0;
    Ok(DensityOperator::from_trusted(
        ComplexMatrix::from_real_diagonal(&[(1.0 - 3.0 * c) / 4.0, t, t, t]),
        BasisTag::TwoPhoton,
    ))
}

/// Werner parameter `1/3 − (4/3)⟨Ψ−|ρ|Ψ−⟩` of a two-photon block state.
pub fn werner_parameter(rho: &DensityOperator) -> Result<f64> {
    if rho.dim() != 4 || !matches!(rho.basis(), BasisTag::TwoPhoton | BasisTag::Generic) {
        return Err(Error::Contract(format!(
            "Werner parameter needs a two-photon block state, got {:?} of dimension {}",
            rho.basis(),
            rho.dim()
        )));
    }
    let overlap = rho.matrix()[(0, 0)].re;
    Ok((1.0 / 3.0 - 4.0 / 3.0 * overlap).clamp(C_MIN, C_MAX))
}

#[cfg(test)]
mod tests {
    use super::*;
    use basis::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn block2_ket(index: usize) -> DensityOperator {
        DensityOperator::pure(&ket(4, index), BasisTag::TwoPhoton).unwrap()
    }

    #[test]
    fn entropy_spot_values() {
        assert!(von_neumann_entropy(&block2_ket(0)).unwrap().abs() < 1e-12);
        let mixed = DensityOperator::maximally_mixed(4, BasisTag::TwoPhoton).unwrap();
        assert!((von_neumann_entropy(&mixed).unwrap() - 2.0).abs() < 1e-12);
        let w = werner_state(1.0 / 3.0).unwrap();
        assert!((von_neumann_entropy(&w).unwrap() - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn entropy_of_non_diagonal_pure_state_is_zero() {
        let v = [c(0.6), C64::new(0.0, 0.8), c(0.0)];
        let rho = DensityOperator::pure(&v, BasisTag::Generic).unwrap();
        assert!(von_neumann_entropy(&rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn invalid_states_are_rejected() {
        let mut m = ComplexMatrix::identity(2).scale(c(0.5));
        m[(0, 1)] = c(0.3);
        assert!(matches!(
            DensityOperator::new(m, BasisTag::Generic),
            Err(Error::InvalidState(_))
        ));
        let m = ComplexMatrix::identity(2);
        assert!(matches!(
            DensityOperator::new(m, BasisTag::Generic),
            Err(Error::InvalidState(_))
        ));
        let m = ComplexMatrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(matches!(
            DensityOperator::new(m, BasisTag::Generic),
            Err(Error::InvalidState(_))
        ));
        let m = ComplexMatrix::identity(3).scale(c(1.0 / 3.0));
        assert!(matches!(
            DensityOperator::new(m, BasisTag::TwoPhoton),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn entropy_rejects_non_hermitian_matrix() {
        let mut m = ComplexMatrix::identity(2).scale(c(0.5));
        m[(0, 1)] = c(0.1);
        let rho = DensityOperator::from_trusted(m, BasisTag::Generic);
        assert!(matches!(
            von_neumann_entropy(&rho),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn jacobi_matches_closed_form_2x2() {
        // eigenvalues of [[a, b],[b*, d]] = (a+d)/2 ± sqrt(((a−d)/2)² + |b|²)
        let b = C64::new(0.1, -0.2);
        let m = ComplexMatrix::from_rows(vec![c(0.7), b, b.conj(), c(0.3)]).unwrap();
        let eig = m.hermitian_eigenvalues().unwrap();
        let r = (0.2f64.powi(2) + b.norm_sqr()).sqrt();
        assert!((eig[0] - (0.5 - r)).abs() < 1e-14);
        assert!((eig[1] - (0.5 + r)).abs() < 1e-14);
    }

    #[test]
    fn truncate_vacuum_is_single_block() {
        let rho = DensityOperator::pure(&ket(DIM, VACUUM), BasisTag::TwoSlot).unwrap();
        let d = truncate_to_blocks(&rho).unwrap();
        assert_eq!(d.weights, [1.0, 0.0, 0.0]);
        assert!(d.blocks[0].is_some());
        assert!(d.blocks[1].is_none() && d.blocks[2].is_none());
    }

    #[test]
    fn truncate_vacuum_plus_vv_superposition() {
        let mut v = ket(DIM, VACUUM);
        v[VV] = c(1.0);
        let rho = DensityOperator::pure(&v, BasisTag::TwoSlot).unwrap();
        let d = truncate_to_blocks(&rho).unwrap();
        assert!((d.weights[0] - 0.5).abs() < 1e-15);
        assert!(d.weights[1].abs() < 1e-15);
        assert!((d.weights[2] - 0.5).abs() < 1e-15);
        for k in [0, 2] {
            let block = d.blocks[k].as_ref().unwrap();
            assert!(von_neumann_entropy(block).unwrap().abs() < 1e-12);
            assert!((block.matrix().trace().re - 1.0).abs() < 1e-15);
        }
        assert!((d.blocks[2].as_ref().unwrap().matrix()[(3, 3)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn werner_endpoints() {
        let s = werner_state(-1.0).unwrap();
        assert!(s.matrix().max_abs_diff(block2_ket(0).matrix()) < 1e-15);
        let z = werner_state(0.0).unwrap();
        assert!(
            z.matrix()
                .max_abs_diff(&ComplexMatrix::identity(4).scale(c(0.25)))
                < 1e-15
        );
        let t = werner_state(1.0 / 3.0).unwrap();
        assert!(t.matrix()[(0, 0)].norm() < 1e-15);
        assert!(matches!(werner_state(0.5), Err(Error::InvalidState(_))));
        assert!(matches!(werner_state(-1.1), Err(Error::InvalidState(_))));
    }

    #[test]
    fn werner_parameter_examples() {
        assert!((werner_parameter(&block2_ket(0)).unwrap() + 1.0).abs() < 1e-15);
        assert!((werner_parameter(&block2_ket(3)).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // |↕_A ↔_B⟩ in the two-photon block
        let full = product_ket(SlotState::Vertical, SlotState::Horizontal);
        let v: Vec<C64> = full[5..9].to_vec();
        let rho = DensityOperator::pure(&v, BasisTag::TwoPhoton).unwrap();
        assert!((werner_parameter(&rho).unwrap() + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn werner_round_trip_on_grid() {
        for i in 0..100 {
            let cc = -1.0 + (4.0 / 3.0) * i as f64 / 99.0;
            let back = werner_parameter(&werner_state(cc).unwrap()).unwrap();
            assert!((back - cc).abs() < 1e-12, "c = {cc}");
        }
    }

    #[test]
    fn holevo_examples() {
        let single = StateEnsemble::new(vec![(1.0, block2_ket(2))]).unwrap();
        assert!(holevo_quantity(&single, &IdentityChannel).unwrap().abs() < 1e-12);
        let pair = StateEnsemble::new(vec![(0.5, block2_ket(0)), (0.5, block2_ket(1))]).unwrap();
        assert!((holevo_quantity(&pair, &IdentityChannel).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ensemble_validation() {
        assert!(StateEnsemble::new(vec![(0.5, block2_ket(0))]).is_err());
        assert!(StateEnsemble::new(vec![]).is_err());
        let v = DensityOperator::pure(&ket(DIM, 0), BasisTag::TwoSlot).unwrap();
        assert!(StateEnsemble::new(vec![(0.5, block2_ket(0)), (0.5, v)]).is_err());
    }

    #[test]
    fn product_basis_change_is_unitary() {
        assert!(product_to_fixed().unitarity_deviation() < 1e-15);
        let hv = product_ket(SlotState::Horizontal, SlotState::Vertical);
        let vh = product_ket(SlotState::Vertical, SlotState::Horizontal);
        let singlet: Vec<C64> = hv
            .iter()
            .zip(&vh)
            .map(|(a, b)| (a - b) / 2f64.sqrt())
            .collect();
        assert!((singlet[SINGLET] - c(1.0)).norm() < 1e-15);
        assert!(singlet
            .iter()
            .enumerate()
            .all(|(i, x)| i == SINGLET || x.norm() < 1e-15));
    }
}
