//! Global-approach generator built on the Bohr-frequency jump operators.
//!
//! Rates `C`, `C̃` are stored without the system-bath coupling; the factor
//! `λ²` is applied once, when a dissipator is assembled into a
//! [`Liouvillian`] matrix. Transport formulas that carry an explicit `λ²` use
//! the unscaled per-transition dissipators from [`transition_dissipator`].

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{
    build_hamiltonian, jump_operators, occupation_at, Bath, JumpOperators, ModelParams, SignedTransition, Transition,
};
use crate::quadrature::principal_value;
use crate::spin_algebra::{
    apply_super, c, gksl_superop, hamiltonian_superop, unvec_matrix, vec_matrix, Basis, DenseOperator, Matrix8,
    SuperMatrix, C64, SUPER_DIM,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Approach {
    Global,
    Local,
}

impl Approach {
    pub fn label(self) -> &'static str {
        match self {
            Approach::Global => "global",
            Approach::Local => "local",
        }
    }
}

/// A dissipative channel `rate·(L ρ L† − ½{L†L, ρ})`, rate excluding `λ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpTerm {
    pub operator: DenseOperator,
    pub rate: f64,
}

/// A 64×64 generator acting on column-stacked density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    matrix: SuperMatrix,
    kind: Approach,
    params: ModelParams,
    hamiltonian: DenseOperator,
    kappa: Option<f64>,
}

impl Liouvillian {
    pub(crate) fn from_parts(
        matrix: SuperMatrix,
        kind: Approach,
        params: ModelParams,
        hamiltonian: DenseOperator,
        kappa: Option<f64>,
    ) -> Self {
        debug_assert_eq!(matrix.shape(), (SUPER_DIM, SUPER_DIM));
        Self { matrix, kind, params, hamiltonian, kappa }
    }

    pub fn matrix(&self) -> &SuperMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> Approach {
        self.kind
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Coherent part `H_eff`; zero for a dissipator-only contribution.
    pub fn hamiltonian(&self) -> &DenseOperator {
        &self.hamiltonian
    }

    /// Lamb-shift renormalization of the hopping in the continuity equation,
    /// present only when the Lamb shift was enabled.
    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }

    pub fn apply(&self, rho: &DenseOperator) -> Result<DenseOperator> {
        expect_computational(rho)?;
        Ok(DenseOperator::from_matrix(apply_super(&self.matrix, rho.matrix()), Basis::Computational))
    }

    /// Heisenberg-picture action: `Tr(O L[ρ]) = Tr(L̃[O] ρ)` for all `ρ`.
    pub fn dual_apply(&self, obs: &DenseOperator) -> Result<DenseOperator> {
        expect_computational(obs)?;
        let v = self.matrix.transpose() * vec_matrix(&obs.matrix().transpose());
        Ok(DenseOperator::from_matrix(unvec_matrix(&v).transpose(), Basis::Computational))
    }

    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        linalg::eigenvalues(&self.matrix)
    }

    pub(crate) fn add(&self, other: &SuperMatrix) -> Self {
        Self { matrix: &self.matrix + other, ..self.clone() }
    }
}

pub(crate) fn expect_computational(op: &DenseOperator) -> Result<()> {
    if op.basis() != Basis::Computational {
        return Err(Error::BasisMismatch { left: op.basis(), right: Basis::Computational });
    }
    Ok(())
}

/// `(C, C̃) = (2πh²(n+1), 2πh²n)`.
pub fn kossakowski_rates(h: f64, temperature: f64, omega: f64) -> Result<(f64, f64)> {
    let n = occupation_at(temperature, omega)?;
    let weight = 2.0 * PI * h * h;
    Ok((weight * (n + 1.0), weight * n))
}

pub fn global_rates(p: &ModelParams, bath: Bath, transition: Transition) -> Result<(f64, f64)> {
    let b = p.bath(bath);
    kossakowski_rates(b.h_at(transition), b.temperature, transition.frequency(p))
}

/// Emission and absorption channels of one bath at one transition.
pub fn jump_terms(p: &ModelParams, ops: &JumpOperators, bath: Bath, transition: Transition) -> Result<[JumpTerm; 2]> {
    let (rate, rate_tilde) = global_rates(p, bath, transition)?;
    let a = ops.get(bath, transition);
    Ok([JumpTerm { operator: a.clone(), rate }, JumpTerm { operator: a.adjoint(), rate: rate_tilde }])
}

fn terms_superop(terms: &[JumpTerm]) -> SuperMatrix {
    terms
        .iter()
        .fold(SuperMatrix::zeros(SUPER_DIM, SUPER_DIM), |acc, t| acc + gksl_superop(t.operator.matrix(), t.rate))
}

/// `𝒟_ω^{(α)}` without the `λ²` prefactor.
pub fn transition_dissipator(p: &ModelParams, bath: Bath, transition: Transition) -> Result<SuperMatrix> {
    let ops = jump_operators(p)?;
    Ok(terms_superop(&jump_terms(p, &ops, bath, transition)?))
}

/// `λ² Σ_ω 𝒟_ω^{(α)}` for a single bath.
pub fn bath_dissipator(p: &ModelParams, bath: Bath) -> Result<SuperMatrix> {
    let ops = jump_operators(p)?;
    bath_dissipator_with(p, &ops, bath)
}

fn bath_dissipator_with(p: &ModelParams, ops: &JumpOperators, bath: Bath) -> Result<SuperMatrix> {
    let mut terms = Vec::with_capacity(6);
    for t in Transition::ALL {
        terms.extend(jump_terms(p, ops, bath, t)?);
    }
    Ok(terms_superop(&terms) * c(p.lambda * p.lambda))
}

pub fn build_global_dissipator(p: &ModelParams) -> Result<Liouvillian> {
    let ops = jump_operators(p)?;
    let matrix = bath_dissipator_with(p, &ops, Bath::Left)? + bath_dissipator_with(p, &ops, Bath::Right)?;
    Ok(Liouvillian::from_parts(matrix, Approach::Global, p.clone(), DenseOperator::zeros(Basis::Computational), None))
}

/// Spectral-density model for the principal-value integrals: `h²` on
/// `[lower_cutoff, cutoff]` and zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambShiftSpec {
    #[serde(default)]
    pub enabled: bool,
    /// Upper cutoff `Λ`; defaults to `50Δ`.
    #[serde(default)]
    pub cutoff: Option<f64>,
    /// Lower cutoff; defaults to `Δ/1000`. Needed because `n(ν) ~ T/ν` makes
    /// the integrals log-divergent at `ν → 0` for a flat spectral density.
    #[serde(default)]
    pub lower_cutoff: Option<f64>,
    #[serde(default = "default_quadrature_points")]
    pub quadrature_points: usize,
}

fn default_quadrature_points() -> usize {
    4000
}

impl Default for LambShiftSpec {
    fn default() -> Self {
        Self { enabled: false, cutoff: None, lower_cutoff: None, quadrature_points: default_quadrature_points() }
    }
}

impl LambShiftSpec {
    pub fn enabled() -> Self {
        Self { enabled: true, ..Self::default() }
    }

    pub fn cutoff_for(&self, p: &ModelParams) -> f64 {
        self.cutoff.unwrap_or(50.0 * p.delta)
    }

    pub fn lower_cutoff_for(&self, p: &ModelParams) -> f64 {
        self.lower_cutoff.unwrap_or(1e-3 * p.delta)
    }

    pub fn validate(&self, p: &ModelParams) -> Result<()> {
        let (lo, hi) = (self.lower_cutoff_for(p), self.cutoff_for(p));
        let w_max = Transition::Omega1.frequency(p).max(3.0 * p.delta);
        if !(hi.is_finite() && hi > w_max) {
            return Err(Error::InvalidParams(format!("lamb shift cutoff {hi} must exceed {w_max}")));
        }
        if !(lo > 0.0 && lo < Transition::Omega2.frequency(p)) {
            return Err(Error::InvalidParams(format!("lamb shift lower cutoff {lo} must lie in (0, omega_2)")));
        }
        if self.quadrature_points < 200 {
            return Err(Error::InvalidParams("lamb shift needs at least 200 quadrature points".into()));
        }
        Ok(())
    }
}

/// `S_ω^{(α)}` and `S̃_ω^{(α)}` for both baths and all six signed frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct LambShiftCoefficients {
    entries: Vec<(Bath, SignedTransition, f64, f64)>,
}

impl LambShiftCoefficients {
    pub fn get(&self, bath: Bath, st: SignedTransition) -> (f64, f64) {
        self.entries
            .iter()
            .find(|(b, s, _, _)| *b == bath && *s == st)
            .map(|&(_, _, s, st)| (s, st))
            .expect("all (bath, signed transition) pairs are populated")
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Bath, SignedTransition, f64, f64)> {
        self.entries.iter()
    }
}

pub fn lamb_shift_coefficients(p: &ModelParams, ls: &LambShiftSpec) -> Result<LambShiftCoefficients> {
    p.check_global()?;
    ls.validate(p)?;
    let (lo, hi) = (ls.lower_cutoff_for(p), ls.cutoff_for(p));
    let mut entries = Vec::with_capacity(12);
    for bath in Bath::BOTH {
        let b = p.bath(bath);
        let (h2, temp) = (b.h * b.h, b.temperature);
        let n = move |nu: f64| if temp == 0.0 { 0.0 } else { 1.0 / (nu / temp).exp_m1() };
        for st in SignedTransition::all() {
            let w = st.frequency(p);
            let s = principal_value(&|nu| h2 * (1.0 + n(nu)), w, lo, hi, ls.quadrature_points)?;
            let s_tilde = -principal_value(&|nu| h2 * n(nu), w, lo, hi, ls.quadrature_points)?;
            entries.push((bath, st, s, s_tilde));
        }
    }
    Ok(LambShiftCoefficients { entries })
}

/// `H_LS = λ² Σ_{α,±ω} (S A†A + S̃ A A†)`.
pub fn lamb_shift_hamiltonian(p: &ModelParams, ls: &LambShiftSpec) -> Result<DenseOperator> {
    let coeffs = lamb_shift_coefficients(p, ls)?;
    let ops = jump_operators(p)?;
    Ok(lamb_shift_from_coefficients(p, &ops, &coeffs))
}

fn lamb_shift_from_coefficients(p: &ModelParams, ops: &JumpOperators, coeffs: &LambShiftCoefficients) -> DenseOperator {
    let mut h = Matrix8::zeros();
    for &(bath, st, s, s_tilde) in coeffs.iter() {
        let a = ops.signed(bath, st).into_matrix();
        let ad = a.adjoint();
        h += (ad * a) * c(s) + (a * ad) * c(s_tilde);
    }
    DenseOperator::from_matrix(h * c(p.lambda * p.lambda), Basis::Computational)
}

/// Coefficient `κ` with `i[H_LS, σ_z⁽²⁾] = κ (J⁽¹²⁾ − J⁽²³⁾)`.
///
/// Each `A†A` at `±ω₁` contributes `±1/(16√2)` of its coefficient, `±ω₂` the
/// opposite sign, and `A A†` terms enter with the reverse sign; `ω₀` drops out.
pub fn kappa(p: &ModelParams, coeffs: &LambShiftCoefficients) -> f64 {
    let mut sum = 0.0;
    for &(_, st, s, s_tilde) in coeffs.iter() {
        let sign = match (st.transition, st.positive) {
            (Transition::Omega0, _) => 0.0,
            (Transition::Omega1, true) | (Transition::Omega2, false) => 1.0,
            (Transition::Omega1, false) | (Transition::Omega2, true) => -1.0,
        };
        sum += sign * (s - s_tilde);
    }
    p.lambda * p.lambda * sum / (16.0 * SQRT_2)
}

/// `−i[H_eff, ·] + 𝒟` with `H_eff = H_S (+ H_LS)`.
pub fn build_global_liouvillian(p: &ModelParams, ls: &LambShiftSpec) -> Result<Liouvillian> {
    let dissipator = build_global_dissipator(p)?;
    let h_s = build_hamiltonian(p);
    let (h_eff, kap) = if ls.enabled {
        let coeffs = lamb_shift_coefficients(p, ls)?;
        let ops = jump_operators(p)?;
        let h_ls = lamb_shift_from_coefficients(p, &ops, &coeffs);
        (h_s.sum(&h_ls)?, Some(kappa(p, &coeffs)))
    } else {
        (h_s, None)
    };
    let mut l = dissipator.add(&hamiltonian_superop(h_eff.matrix()));
    l.hamiltonian = h_eff;
    l.kappa = kap;
    Ok(l)
}
