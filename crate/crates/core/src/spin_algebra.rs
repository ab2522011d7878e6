//! Dense complex-matrix kernel for three spin-1/2 sites.
//!
//! Computational basis ordering is `|000⟩, |001⟩, …, |111⟩` with site 1 the
//! most significant bit. The single-site convention is `σ_z|i⟩ = (−1)^i |i⟩`,
//! so `|0⟩` is spin up and `σ_− = |1⟩⟨0|`.
//!
//! Superoperators act on column-stacked vectors: `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.
//! This is the only place that convention is fixed; everything else builds
//! superoperators through [`sandwich`].

use nalgebra::{DMatrix, DVector, Matrix2, SMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Matrix8 = SMatrix<C64, 8, 8>;
/// 64×64 matrix acting on vectorized 8×8 operators.
pub type SuperMatrix = DMatrix<C64>;

pub const DIM: usize = 8;
pub const SUPER_DIM: usize = DIM * DIM;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Computational,
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Raising,
    Lowering,
}

/// An 8×8 operator on the chain, tagged with the basis it is written in.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    entries: Matrix8,
    basis: Basis,
}

impl DenseOperator {
    pub fn new(entries: Matrix8, basis: Basis) -> Result<Self> {
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { entries, basis })
    }

    /// Wraps entries known to be finite (built from finite inputs).
    pub(crate) fn from_matrix(entries: Matrix8, basis: Basis) -> Self {
        debug_assert!(entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Self { entries, basis }
    }

    pub fn zeros(basis: Basis) -> Self {
        Self::from_matrix(Matrix8::zeros(), basis)
    }

    pub fn identity(basis: Basis) -> Self {
        Self::from_matrix(Matrix8::identity(), basis)
    }

    pub fn matrix(&self) -> &Matrix8 {
        &self.entries
    }

    pub fn into_matrix(self) -> Matrix8 {
        self.entries
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn adjoint(&self) -> Self {
        Self::from_matrix(self.entries.adjoint(), self.basis)
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_matrix(self.entries * factor, self.basis)
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        max_modulus(&self.entries)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.entries - self.entries.adjoint()).iter().all(|z| z.norm() <= tol)
    }

    fn check_basis(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch { left: self.basis, right: other.basis });
        }
        Ok(())
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_basis(other)?;
        Ok(Self::from_matrix(self.entries * other.entries, self.basis))
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_basis(other)?;
        Ok(Self::from_matrix(self.entries + other.entries, self.basis))
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_basis(other)?;
        Ok(Self::from_matrix(self.entries - other.entries, self.basis))
    }

    /// `Tr(self · other)`, the expectation of `self` in state `other`.
    pub fn trace_with(&self, other: &Self) -> Result<C64> {
        self.check_basis(other)?;
        Ok((self.entries * other.entries).trace())
    }

    /// Re-expresses the operator in the other basis. `eigvecs` has the energy
    /// eigenvectors as columns in the computational basis.
    pub fn to_basis(&self, target: Basis, eigvecs: &SMatrix<f64, 8, 8>) -> Self {
        let u = eigvecs.map(c);
        let entries = match (self.basis, target) {
            (Basis::Computational, Basis::Energy) => u.adjoint() * self.entries * u,
            (Basis::Energy, Basis::Computational) => u * self.entries * u.adjoint(),
            _ => self.entries,
        };
        Self::from_matrix(entries, target)
    }
}

pub(crate) fn max_modulus(m: &Matrix8) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn pauli(axis: Axis) -> Matrix2<C64> {
    let (o, l) = (c(0.0), c(1.0));
    match axis {
        Axis::X => Matrix2::new(o, l, l, o),
        Axis::Y => Matrix2::new(o, -I, I, o),
        Axis::Z => Matrix2::new(l, o, o, -l),
    }
}

/// `σ_± = (σ_x ± iσ_y)/2` on a single site.
pub fn ladder(kind: Ladder) -> Matrix2<C64> {
    let sign = match kind {
        Ladder::Raising => c(1.0),
        Ladder::Lowering => c(-1.0),
    };
    (pauli(Axis::X) + pauli(Axis::Y) * I * sign) * c(0.5)
}

/// `1 ⊗ … ⊗ op ⊗ … ⊗ 1` with `op` at `site` (1-based).
pub fn embed(op: &Matrix2<C64>, site: usize) -> Result<DenseOperator> {
    if !(1..=3).contains(&site) {
        return Err(Error::SiteOutOfRange(site));
    }
    let id = Matrix2::<C64>::identity();
    let factors: [&Matrix2<C64>; 3] = match site {
        1 => [op, &id, &id],
        2 => [&id, op, &id],
        _ => [&id, &id, op],
    };
    let m = factors[0].kronecker(factors[1]).kronecker(factors[2]);
    DenseOperator::new(Matrix8::from_iterator(m.iter().copied()), Basis::Computational)
}

pub(crate) fn site_op(op: &Matrix2<C64>, site: usize) -> Matrix8 {
    embed(op, site).expect("site in 1..=3").into_matrix()
}

pub fn sigma(axis: Axis, site: usize) -> Result<DenseOperator> {
    embed(&pauli(axis), site)
}

pub fn sigma_pm(site: usize, kind: Ladder) -> Result<DenseOperator> {
    embed(&ladder(kind), site)
}

pub(crate) fn sz(site: usize) -> Matrix8 {
    site_op(&pauli(Axis::Z), site)
}

pub(crate) fn sminus(site: usize) -> Matrix8 {
    site_op(&ladder(Ladder::Lowering), site)
}

pub(crate) fn splus(site: usize) -> Matrix8 {
    site_op(&ladder(Ladder::Raising), site)
}

/// Computational basis projector `|jkl⟩⟨jkl|` index from a bit string like `"011"`.
pub fn basis_index(bits: &str) -> Option<usize> {
    if bits.len() != 3 || !bits.chars().all(|ch| ch == '0' || ch == '1') {
        return None;
    }
    usize::from_str_radix(bits, 2).ok()
}

pub fn commutator(a: &DenseOperator, b: &DenseOperator) -> Result<DenseOperator> {
    a.check_basis(b)?;
    Ok(DenseOperator::from_matrix(a.entries * b.entries - b.entries * a.entries, a.basis))
}

pub fn anticommutator(a: &DenseOperator, b: &DenseOperator) -> Result<DenseOperator> {
    a.check_basis(b)?;
    Ok(DenseOperator::from_matrix(a.entries * b.entries + b.entries * a.entries, a.basis))
}

/// Column-stacked 64-component image of an operator.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorizedOperator {
    entries: DVector<C64>,
    basis: Basis,
}

impl VectorizedOperator {
    pub fn entries(&self) -> &DVector<C64> {
        &self.entries
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn from_entries(entries: DVector<C64>, basis: Basis) -> Result<Self> {
        if entries.len() != SUPER_DIM {
            return Err(Error::Numerical(format!("expected {SUPER_DIM} components, got {}", entries.len())));
        }
        Ok(Self { entries, basis })
    }
}

pub fn vectorize(a: &DenseOperator) -> VectorizedOperator {
    // nalgebra storage is column-major, so iteration order is column stacking.
    VectorizedOperator { entries: vec_matrix(&a.entries), basis: a.basis }
}

pub fn devectorize(v: &VectorizedOperator) -> Result<DenseOperator> {
    DenseOperator::new(unvec_matrix(&v.entries), v.basis)
}

pub(crate) fn vec_matrix(m: &Matrix8) -> DVector<C64> {
    DVector::from_iterator(SUPER_DIM, m.iter().copied())
}

pub(crate) fn unvec_matrix(v: &DVector<C64>) -> Matrix8 {
    Matrix8::from_iterator(v.iter().copied())
}

fn to_dynamic(m: &Matrix8) -> DMatrix<C64> {
    DMatrix::from_iterator(DIM, DIM, m.iter().copied())
}

/// Superoperator of `ρ ↦ A ρ B`.
pub fn sandwich(a: &Matrix8, b: &Matrix8) -> SuperMatrix {
    to_dynamic(&b.transpose()).kronecker(&to_dynamic(a))
}

pub(crate) fn left_mul(a: &Matrix8) -> SuperMatrix {
    sandwich(a, &Matrix8::identity())
}

pub(crate) fn right_mul(b: &Matrix8) -> SuperMatrix {
    sandwich(&Matrix8::identity(), b)
}

/// `ρ ↦ −i[H, ρ]`.
pub fn hamiltonian_superop(h: &Matrix8) -> SuperMatrix {
    (left_mul(h) - right_mul(h)) * (-I)
}

/// `ρ ↦ rate·(L ρ L† − ½{L†L, ρ})`.
pub fn gksl_superop(jump: &Matrix8, rate: f64) -> SuperMatrix {
    let ld = jump.adjoint();
    let ldl = ld * jump;
    (sandwich(jump, &ld) - (left_mul(&ldl) + right_mul(&ldl)) * c(0.5)) * c(rate)
}

/// Heisenberg-picture dual of [`gksl_superop`]: `O ↦ rate·(L† O L − ½{L†L, O})`.
pub(crate) fn dual_gksl_apply(jump: &Matrix8, rate: f64, obs: &Matrix8) -> Matrix8 {
    let ld = jump.adjoint();
    let ldl = ld * jump;
    (ld * obs * jump - (ldl * obs + obs * ldl) * c(0.5)) * c(rate)
}

pub(crate) fn apply_super(s: &SuperMatrix, m: &Matrix8) -> Matrix8 {
    unvec_matrix(&(s * vec_matrix(m)))
}
