//! Stationary states: the closed-form global kernel, the first-order local
//! expansion, and a numeric null-space oracle for either generator.

use std::f64::consts::PI;

use nalgebra::{DVector, Matrix2, SMatrix};

use crate::error::{Error, Result};
use crate::global_me::{transition_dissipator, Liouvillian};
use crate::linalg;
use crate::local_me::{hopping_generator, local_coupling, local_occupation, unperturbed_generator};
use crate::model::{eigenvector_matrix, spectrum, Bath, ModelParams, Transition};
use crate::spin_algebra::{
    apply_super, c, max_modulus, unvec_matrix, vec_matrix, Basis, DenseOperator, Matrix8, SuperMatrix, C64, DIM, I,
    SUPER_DIM,
};

/// Acceptance bounds applied when a matrix is checked as a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateTolerance {
    pub hermitian: f64,
    pub trace: f64,
    pub positivity: f64,
}

impl StateTolerance {
    pub const STRICT: Self = Self { hermitian: 1e-12, trace: 1e-12, positivity: 1e-10 };
    /// For states produced by long propagation.
    pub const PROPAGATED: Self = Self { hermitian: 1e-9, trace: 1e-10, positivity: 1e-8 };
}

/// A validated state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Matrix8,
    basis: Basis,
}

impl DensityMatrix {
    pub fn new(entries: Matrix8, basis: Basis) -> Result<Self> {
        Self::with_tolerance(entries, basis, StateTolerance::STRICT)
    }

    /// Checks the bounds, then stores the Hermitian part.
    pub fn with_tolerance(entries: Matrix8, basis: Basis, tol: StateTolerance) -> Result<Self> {
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let asym = max_modulus(&(entries - entries.adjoint()));
        if asym > tol.hermitian {
            return Err(Error::InvalidState(format!("not Hermitian (asymmetry {asym:.3e})")));
        }
        let entries = (entries + entries.adjoint()) * c(0.5);
        let tr = entries.trace();
        if (tr - c(1.0)).norm() > tol.trace {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = entries.symmetric_eigenvalues().min();
        if min < -tol.positivity {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { entries, basis })
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        self.entries.symmetric_eigenvalues().min()
    }

    pub fn matrix(&self) -> &Matrix8 {
        &self.entries
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn as_operator(&self) -> DenseOperator {
        DenseOperator::from_matrix(self.entries, self.basis)
    }

    pub fn to_basis(&self, target: Basis) -> Self {
        let op = self.as_operator().to_basis(target, &eigenvector_matrix());
        Self { entries: op.into_matrix(), basis: target }
    }

    /// `Tr(O ρ)`, real part; `O` must be in the same basis.
    pub fn expectation(&self, obs: &DenseOperator) -> Result<f64> {
        Ok(self.as_operator().trace_with(obs)?.re)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch { left: self.basis, right: other.basis });
        }
        Ok(max_modulus(&(self.entries - other.entries)))
    }
}

/// `τ(ωᵢ) = Σ h² n` and `s(ωᵢ) = Σ h² (n+1)` at the three Bohr frequencies,
/// plus the resulting energy-basis populations.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalKernelData {
    pub tau: [f64; 3],
    pub s: [f64; 3],
    pub mu: [f64; 8],
}

pub fn kernel_rates(p: &ModelParams) -> Result<([f64; 3], [f64; 3])> {
    p.check_global()?;
    let mut tau = [0.0; 3];
    let mut s = [0.0; 3];
    for t in Transition::ALL {
        let w = t.frequency(p);
        for bath in Bath::BOTH {
            let b = p.bath(bath);
            let h2 = b.h_at(t).powi(2);
            let n = crate::model::occupation(b, w)?;
            tau[t.index()] += h2 * n;
            s[t.index()] += h2 * (n + 1.0);
        }
    }
    Ok((tau, s))
}

fn populations(tau: &[f64; 3], s: &[f64; 3]) -> [f64; 8] {
    let [t0, t1, t2] = *tau;
    let [s0, s1, s2] = *s;
    let z = (s0 + t0) * (s1 + t1) * (s2 + t2);
    [t0 * t1 * t2, s0 * s1 * s2, s0 * t1 * t2, t0 * s1 * s2, t0 * t1 * s2, s0 * s1 * t2, s0 * t1 * s2, t0 * s1 * t2]
        .map(|x| x / z)
}

/// The population-transfer matrix in units of `τ`, `s`.
pub fn build_m_matrix(p: &ModelParams) -> Result<SMatrix<f64, 8, 8>> {
    let (tau, s) = kernel_rates(p)?;
    Ok(m_template(&tau, &s))
}

fn m_template(tau: &[f64; 3], s: &[f64; 3]) -> SMatrix<f64, 8, 8> {
    let [t0, t1, t2] = *tau;
    let [s0, s1, s2] = *s;
    let mut m = SMatrix::<f64, 8, 8>::zeros();
    let entries = [
        (0, 2, t0),
        (0, 4, t2 / 2.0),
        (0, 7, t1 / 2.0),
        (1, 3, s0),
        (1, 5, s2 / 2.0),
        (1, 6, s1 / 2.0),
        (2, 0, s0),
        (2, 5, t1 / 2.0),
        (2, 6, t2 / 2.0),
        (3, 1, t0),
        (3, 4, s1 / 2.0),
        (3, 7, s2 / 2.0),
        (4, 0, s2 / 2.0),
        (4, 3, t1 / 2.0),
        (4, 6, t0),
        (5, 1, t2 / 2.0),
        (5, 2, s1 / 2.0),
        (5, 7, s0),
        (6, 1, t1 / 2.0),
        (6, 2, s2 / 2.0),
        (6, 4, s0),
        (7, 0, s1 / 2.0),
        (7, 3, t2 / 2.0),
        (7, 5, t0),
    ];
    for (k, l, v) in entries {
        m[(k, l)] = v;
    }
    let diag = [
        -(s0 + (s1 + s2) / 2.0),
        -(t0 + (t1 + t2) / 2.0),
        -(t0 + (s1 + s2) / 2.0),
        -(s0 + (t1 + t2) / 2.0),
        -(s0 + (s1 + t2) / 2.0),
        -(t0 + (t1 + s2) / 2.0),
        -(t0 + (s1 + t2) / 2.0),
        -(s0 + (t1 + s2) / 2.0),
    ];
    for (k, d) in diag.into_iter().enumerate() {
        m[(k, k)] = d;
    }
    m
}

/// `Σ_{α,ω} Tr(𝒟_ω^{(α)}[P_ℓ] P_k)` from the assembled dissipators; equals
/// `π` times [`build_m_matrix`].
pub fn m_matrix_from_traces(p: &ModelParams) -> Result<SMatrix<f64, 8, 8>> {
    let spec = spectrum(p)?;
    let mut total = SuperMatrix::zeros(SUPER_DIM, SUPER_DIM);
    for bath in Bath::BOTH {
        for t in Transition::ALL {
            total += transition_dissipator(p, bath, t)?;
        }
    }
    let projectors: Vec<Matrix8> = (0..DIM).map(|k| spec.projector(k)).collect();
    let mut m = SMatrix::<f64, 8, 8>::zeros();
    for (l, pl) in projectors.iter().enumerate() {
        let image = apply_super(&total, pl);
        for (k, pk) in projectors.iter().enumerate() {
            m[(k, l)] = (image * pk).trace().re;
        }
    }
    Ok(m)
}

pub fn global_steady_analytic(p: &ModelParams) -> Result<(DensityMatrix, GlobalKernelData)> {
    let (tau, s) = kernel_rates(p)?;
    let mu = populations(&tau, &s);
    let m = m_template(&tau, &s);
    let residual = (m * SMatrix::<f64, 8, 1>::from_row_slice(&mu)).abs().max();
    let scale = s.iter().copied().fold(1.0, f64::max);
    if residual > 1e-12 * scale {
        return Err(Error::Numerical(format!("population vector leaves residual {residual:.3e}")));
    }
    let mut rho = Matrix8::zeros();
    for (k, &x) in mu.iter().enumerate() {
        rho[(k, k)] = c(x);
    }
    Ok((DensityMatrix::new(rho, Basis::Energy)?, GlobalKernelData { tau, s, mu }))
}

fn thermal_qubit(r: f64) -> Matrix2<C64> {
    Matrix2::new(c(r), c(0.0), c(0.0), c(1.0 - r))
}

fn kron3(a: &Matrix2<C64>, b: &Matrix2<C64>, d: &Matrix2<C64>) -> Matrix8 {
    Matrix8::from_fn(|row, col| {
        let bit = |x: usize, k: usize| (x >> (2 - k)) & 1;
        a[(bit(row, 0), bit(col, 0))] * b[(bit(row, 1), bit(col, 1))] * d[(bit(row, 2), bit(col, 2))]
    })
}

/// Antisymmetric imaginary matrix on the four hopping coherences
/// `(|001⟩,|010⟩)`, `(|010⟩,|100⟩)`, `(|011⟩,|101⟩)`, `(|101⟩,|110⟩)`.
pub fn hopping_pattern(coeffs: [f64; 4]) -> Matrix8 {
    let mut m = Matrix8::zeros();
    for ((k, l), v) in [(1, 2), (2, 4), (3, 5), (5, 6)].into_iter().zip(coeffs) {
        m[(k, l)] = I * v;
        m[(l, k)] = -I * v;
    }
    m
}

/// `r_α = n_α/(1+2n_α)`, the excited-state weight of a boundary spin.
pub fn boundary_weight(n: f64) -> f64 {
    n / (1.0 + 2.0 * n)
}

/// Middle-spin weight fixed by second-order solvability.
pub fn middle_weight(n_left: f64, n_right: f64) -> f64 {
    let (rl, rr) = (boundary_weight(n_left), boundary_weight(n_right));
    (rr * (1.0 + 2.0 * n_left) + rl * (1.0 + 2.0 * n_right)) / (2.0 * (1.0 + n_left + n_right))
}

/// Coefficients `(a, b, c, d)` of the hopping image of the product state.
pub fn hopping_image_coefficients(r_left: f64, r: f64, r_right: f64) -> [f64; 4] {
    [
        2.0 * r_left * (r - r_right),
        2.0 * r_right * (r_left - r),
        2.0 * (r_left - r) * (1.0 - r_right),
        2.0 * (r - r_right) * (1.0 - r_left),
    ]
}

/// Coefficients `(a′, b′, c′, d′)` of the first-order correction, before
/// the `−1/(2πλ²h²)` rate scale.
pub fn first_order_coefficients(n_left: f64, n_right: f64, r: f64) -> [f64; 4] {
    let (nl, nr) = (n_left, n_right);
    let (rl, rr) = (boundary_weight(nl), boundary_weight(nr));
    let den_l = 3.0 + 4.0 * nl + 2.0 * nr;
    let den_r = 3.0 + 2.0 * nl + 4.0 * nr;
    [
        4.0 * (rr - r) / (1.0 + 2.0 * nr) * (2.0 * nl + rl * (1.0 + 2.0 * nr)) / den_l,
        4.0 * (r - rl) / (1.0 + 2.0 * nl) * (2.0 * nr + rr * (1.0 + 2.0 * nl)) / den_r,
        4.0 * (r - rl) / (1.0 + 2.0 * nl) * (3.0 + 2.0 * nl + 2.0 * nr - rr * (1.0 + 2.0 * nl)) / den_r,
        4.0 * (rr - r) / (1.0 + 2.0 * nr) * (3.0 + 2.0 * nr + 2.0 * nl - rl * (1.0 + 2.0 * nr)) / den_l,
    ]
}

/// `ρ ≈ ρ⁽⁰⁾ + g ρ⁽¹⁾` for the local generator.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPerturbativeState {
    pub g: f64,
    pub n_left: f64,
    pub n_right: f64,
    pub r_left: f64,
    pub r_right: f64,
    pub r: f64,
    pub rho0: DensityMatrix,
    /// Traceless Hermitian first-order correction, computational basis.
    pub rho1: DenseOperator,
    pub coefficients: [f64; 4],
}

impl LocalPerturbativeState {
    /// The truncated expansion. Not validated as a state: near zero
    /// temperature it can carry `O(g²)` negative eigenvalues.
    pub fn state(&self) -> DenseOperator {
        DenseOperator::from_matrix(self.rho0.matrix() + self.rho1.matrix() * c(self.g), Basis::Computational)
    }
}

fn local_rate_scale(p: &ModelParams) -> Result<f64> {
    let h = local_coupling(p)?;
    let scale = 2.0 * PI * p.lambda * p.lambda * h * h;
    if scale == 0.0 {
        return Err(Error::InvalidParams("local expansion needs nonzero lambda and h".into()));
    }
    Ok(scale)
}

pub fn local_steady_perturbative(p: &ModelParams) -> Result<LocalPerturbativeState> {
    let scale = local_rate_scale(p)?;
    let n_left = local_occupation(p, Bath::Left)?;
    let n_right = local_occupation(p, Bath::Right)?;
    let (r_left, r_right) = (boundary_weight(n_left), boundary_weight(n_right));
    let r = middle_weight(n_left, n_right);
    let rho0 = kron3(&thermal_qubit(r_left), &thermal_qubit(r), &thermal_qubit(r_right));
    let coefficients = first_order_coefficients(n_left, n_right, r);
    let rho1 = hopping_pattern(coefficients) * c(-1.0 / scale);
    Ok(LocalPerturbativeState {
        g: p.g,
        n_left,
        n_right,
        r_left,
        r_right,
        r,
        rho0: DensityMatrix::new(rho0, Basis::Computational)?,
        rho1: DenseOperator::from_matrix(rho1, Basis::Computational),
        coefficients,
    })
}

/// Splitting `ℒ = ℒ₀ + g ℒ₁` of the local generator, with the projector onto
/// the kernel of `ℒ₀`.
#[derive(Debug, Clone)]
pub struct LocalExpansion {
    l0: SuperMatrix,
    l1: SuperMatrix,
    rho_left: Matrix2<C64>,
    rho_right: Matrix2<C64>,
}

impl LocalExpansion {
    pub fn new(p: &ModelParams) -> Result<Self> {
        local_rate_scale(p)?;
        let rl = boundary_weight(local_occupation(p, Bath::Left)?);
        let rr = boundary_weight(local_occupation(p, Bath::Right)?);
        Ok(Self {
            l0: unperturbed_generator(p)?,
            l1: hopping_generator(),
            rho_left: thermal_qubit(rl),
            rho_right: thermal_qubit(rr),
        })
    }

    pub fn unperturbed(&self) -> &SuperMatrix {
        &self.l0
    }

    pub fn perturbation(&self, x: &Matrix8) -> Matrix8 {
        apply_super(&self.l1, x)
    }

    /// Product state with middle-spin weight `r`.
    pub fn product_state(&self, r: f64) -> Matrix8 {
        kron3(&self.rho_left, &thermal_qubit(r), &self.rho_right)
    }

    /// `Γ± = Tr(X P±)`, the weights of `X` on the two middle-spin sectors.
    pub fn sector_weights(x: &Matrix8) -> (C64, C64) {
        let mut plus = c(0.0);
        let mut minus = c(0.0);
        for k in 0..DIM {
            if (k >> 1) & 1 == 0 {
                plus += x[(k, k)];
            } else {
                minus += x[(k, k)];
            }
        }
        (plus, minus)
    }

    /// `𝒢₀[X] = ρ_L ⊗ diag(Γ₊, Γ₋) ⊗ ρ_R`.
    pub fn kernel_projection(&self, x: &Matrix8) -> Matrix8 {
        let (plus, minus) = Self::sector_weights(x);
        let middle = Matrix2::new(plus, c(0.0), c(0.0), minus);
        kron3(&self.rho_left, &middle, &self.rho_right)
    }

    /// Solves `ℒ₀ X = Y` with `𝒢₀[X] = 0`.
    pub fn inverse_apply(&self, y: &Matrix8) -> Result<Matrix8> {
        let scale = y.norm().max(1.0);
        let (gp, gm) = Self::sector_weights(y);
        if gp.norm() > 1e-10 * scale || gm.norm() > 1e-10 * scale {
            return Err(Error::NotInRange { gamma_plus: gp.norm(), gamma_minus: gm.norm() });
        }
        let x0 = unvec_matrix(&linalg::pseudo_inverse_solve(&self.l0, &vec_matrix(y), 1e-12)?);
        let x = x0 - self.kernel_projection(&x0);
        let residual = (apply_super(&self.l0, &x) - y).norm();
        if residual > 1e-10 * scale {
            return Err(Error::NotInRange { gamma_plus: residual, gamma_minus: residual });
        }
        Ok(x)
    }

    /// First-order correction `−ℒ₀⁻¹ ℒ₁[ρ⁽⁰⁾(r)]`.
    pub fn first_order(&self, r: f64) -> Result<Matrix8> {
        Ok(-self.inverse_apply(&self.perturbation(&self.product_state(r)))?)
    }

    /// Second-order solvability residual `Γ₊(ℒ₁[ρ⁽¹⁾(r)])`.
    pub fn solvability_residual(&self, r: f64) -> Result<f64> {
        let y = self.perturbation(&self.first_order(r)?);
        Ok(Self::sector_weights(&y).0.re)
    }

    /// Root of the (affine) solvability residual in `r`.
    pub fn solve_middle_weight(&self) -> Result<f64> {
        let (a, b) = (0.25, 0.75);
        let (fa, fb) = (self.solvability_residual(a)?, self.solvability_residual(b)?);
        if fa == fb {
            return Err(Error::Numerical("solvability residual does not depend on r".into()));
        }
        Ok(a - fa * (b - a) / (fb - fa))
    }
}

/// Singular-value thresholds for the numeric kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelThresholds {
    pub zero: f64,
    pub gap: f64,
}

impl Default for KernelThresholds {
    fn default() -> Self {
        Self { zero: 1e-10, gap: 1e-6 }
    }
}

pub fn steady_numeric(l: &Liouvillian) -> Result<DensityMatrix> {
    steady_numeric_with(l, KernelThresholds::default())
}

pub fn steady_numeric_with(l: &Liouvillian, th: KernelThresholds) -> Result<DensityMatrix> {
    let svd = linalg::svd_ascending(l.matrix())?;
    if svd.values[1] < th.gap {
        return Err(Error::NonUniqueKernel { second: svd.values[1], threshold: th.gap });
    }
    if svd.values[0] > th.zero {
        return Err(Error::NoKernel { smallest: svd.values[0], threshold: th.zero });
    }
    let v: DVector<C64> = svd.right.column(0).into_owned();
    let raw = unvec_matrix(&v);
    let tr = raw.trace();
    if tr.norm() < 1e-8 {
        return Err(Error::Numerical("kernel vector is traceless".into()));
    }
    let x = raw / tr;
    let asym = max_modulus(&(x - x.adjoint()));
    if asym > 1e-9 {
        return Err(Error::Numerical(format!("kernel vector is not Hermitian (asymmetry {asym:.3e})")));
    }
    let herm = (x + x.adjoint()) * c(0.5);
    DensityMatrix::new(herm / herm.trace(), Basis::Computational)
}

/// Dimension of `{X : [X, O] = [X, O†] = 0 for all O}`.
pub fn commutant_dimension(ops: &[DenseOperator]) -> Result<usize> {
    if ops.is_empty() {
        return Err(Error::InvalidParams("commutant of an empty set".into()));
    }
    let blocks: Vec<SuperMatrix> = ops
        .iter()
        .flat_map(|o| [o.matrix().clone_owned(), o.matrix().adjoint()])
        .map(|o| crate::spin_algebra::right_mul(&o) - crate::spin_algebra::left_mul(&o))
        .collect();
    let mut stacked = SuperMatrix::zeros(blocks.len() * SUPER_DIM, SUPER_DIM);
    for (i, b) in blocks.iter().enumerate() {
        stacked.view_mut((i * SUPER_DIM, 0), (SUPER_DIM, SUPER_DIM)).copy_from(b);
    }
    let sv = stacked.singular_values();
    let tol = 1e-10 * sv.iter().copied().fold(1.0, f64::max);
    Ok(sv.iter().filter(|&&s| s < tol).count())
}
