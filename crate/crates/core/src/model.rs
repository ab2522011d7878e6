//! Chain Hamiltonian, its closed-form spectrum, and the decomposition of the
//! boundary lowering operators into Bohr-frequency components.

use std::f64::consts::SQRT_2;

use nalgebra::SMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin_algebra::{c, sminus, sz, Axis, Basis, DenseOperator, Matrix8};
use crate::spin_algebra::{pauli, site_op};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bath {
    Left,
    Right,
}

impl Bath {
    pub const BOTH: [Bath; 2] = [Bath::Left, Bath::Right];

    /// Chain site the bath couples to.
    pub fn site(self) -> usize {
        match self {
            Bath::Left => 1,
            Bath::Right => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Bath::Left => "L",
            Bath::Right => "R",
        }
    }
}

/// The three positive Bohr frequencies `ω₀ = 2Δ`, `ω₁ = 2(Δ+√2g)`, `ω₂ = 2(Δ−√2g)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transition {
    Omega0,
    Omega1,
    Omega2,
}

impl Transition {
    pub const ALL: [Transition; 3] = [Transition::Omega0, Transition::Omega1, Transition::Omega2];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Frequency as integer coefficients of `(Δ, √2 g)`.
    fn coefficients(self) -> (i32, i32) {
        match self {
            Transition::Omega0 => (2, 0),
            Transition::Omega1 => (2, 2),
            Transition::Omega2 => (2, -2),
        }
    }

    pub fn frequency(self, p: &ModelParams) -> f64 {
        let (a, b) = self.coefficients();
        a as f64 * p.delta + b as f64 * SQRT_2 * p.g
    }
}

/// `+ω` or `−ω` for a [`Transition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedTransition {
    pub transition: Transition,
    pub positive: bool,
}

impl SignedTransition {
    pub fn all() -> impl Iterator<Item = SignedTransition> {
        [true, false].into_iter().flat_map(|positive| {
            Transition::ALL.into_iter().map(move |transition| SignedTransition { transition, positive })
        })
    }

    pub fn frequency(self, p: &ModelParams) -> f64 {
        let w = self.transition.frequency(p);
        if self.positive {
            w
        } else {
            -w
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    pub temperature: f64,
    /// Smearing amplitude, used at every contributing frequency.
    pub h: f64,
    /// Optional per-transition amplitudes `[h(ω₀), h(ω₁), h(ω₂)]` for the global rates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_by_transition: Option<[f64; 3]>,
}

impl BathParams {
    pub fn new(temperature: f64, h: f64) -> Self {
        Self { temperature, h, h_by_transition: None }
    }

    pub fn h_at(&self, transition: Transition) -> f64 {
        self.h_by_transition.map_or(self.h, |hs| hs[transition.index()])
    }

    fn validate(&self, name: &str) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !ok(self.temperature) {
            return Err(Error::InvalidParams(format!("{name}.temperature must be finite and >= 0")));
        }
        if !ok(self.h) || self.h_by_transition.is_some_and(|hs| !hs.iter().copied().all(ok)) {
            return Err(Error::InvalidParams(format!("{name}.h must be finite and >= 0")));
        }
        Ok(())
    }
}

/// Frequency at which the local boundary occupations are evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalFrequency {
    /// `2Δ`, the single-spin transition frequency; the local Gibbs limit holds.
    #[default]
    TwoDelta,
    /// Literal `Δ`; kept for sensitivity checks.
    Delta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub g: f64,
    pub delta: f64,
    pub lambda: f64,
    pub left: BathParams,
    pub right: BathParams,
    #[serde(default)]
    pub local_frequency: LocalFrequency,
}

impl ModelParams {
    pub fn new(g: f64, delta: f64, lambda: f64, left: BathParams, right: BathParams) -> Result<Self> {
        let p = Self { g, delta, lambda, left, right, local_frequency: LocalFrequency::default() };
        p.validate()?;
        Ok(p)
    }

    /// Equal smearing `h` on both baths.
    pub fn symmetric(g: f64, delta: f64, lambda: f64, h: f64, t_left: f64, t_right: f64) -> Result<Self> {
        Self::new(g, delta, lambda, BathParams::new(t_left, h), BathParams::new(t_right, h))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::InvalidParams("delta must be finite and > 0".into()));
        }
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(Error::InvalidParams("g must be finite and >= 0".into()));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidParams("lambda must be finite and >= 0".into()));
        }
        self.left.validate("left")?;
        self.right.validate("right")
    }

    /// Non-degeneracy guard `Δ > √2 g` required by every global-approach builder.
    pub fn check_global(&self) -> Result<()> {
        self.validate()?;
        // Relative slack so that g = Δ/√2 is caught despite rounding.
        if self.delta - SQRT_2 * self.g > 1e-12 * self.delta {
            Ok(())
        } else {
            Err(Error::DegenerateSpectrum { delta: self.delta, g: self.g })
        }
    }

    pub fn bath(&self, bath: Bath) -> &BathParams {
        match bath {
            Bath::Left => &self.left,
            Bath::Right => &self.right,
        }
    }

    pub fn with_g(&self, g: f64) -> Self {
        Self { g, ..self.clone() }
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..self.clone() }
    }

    pub fn with_temperatures(&self, t_left: f64, t_right: f64) -> Self {
        let mut p = self.clone();
        p.left.temperature = t_left;
        p.right.temperature = t_right;
        p
    }

    pub fn omegas(&self) -> [f64; 3] {
        Transition::ALL.map(|t| t.frequency(self))
    }
}

/// `g Σᵢ (σₓσₓ + σᵧσᵧ)` on bonds (1,2) and (2,3).
pub(crate) fn hopping_matrix() -> Matrix8 {
    let (x, y) = (pauli(Axis::X), pauli(Axis::Y));
    (1..=2)
        .map(|i| site_op(&x, i) * site_op(&x, i + 1) + site_op(&y, i) * site_op(&y, i + 1))
        .fold(Matrix8::zeros(), |acc, m| acc + m)
}

pub(crate) fn field_matrix() -> Matrix8 {
    sz(1) + sz(2) + sz(3)
}

pub(crate) fn hamiltonian_matrix(g: f64, delta: f64) -> Matrix8 {
    hopping_matrix() * c(g) + field_matrix() * c(delta)
}

pub fn build_hamiltonian(p: &ModelParams) -> DenseOperator {
    DenseOperator::from_matrix(hamiltonian_matrix(p.g, p.delta), Basis::Computational)
}

/// Energies as integer coefficients of `(Δ, √2 g)`, in level order `E₁..E₈`.
const LEVELS: [(i32, i32); 8] = [(3, 0), (-3, 0), (1, 0), (-1, 0), (1, 2), (-1, -2), (-1, 2), (1, -2)];

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub energies: [f64; 8],
    /// Column `k` is `|E_{k+1}⟩` in the computational basis.
    pub eigvecs: SMatrix<f64, 8, 8>,
    pub omegas: [f64; 3],
}

impl Spectrum {
    pub fn eigvec(&self, k: usize) -> nalgebra::SVector<f64, 8> {
        self.eigvecs.column(k).into_owned()
    }

    pub fn projector(&self, k: usize) -> Matrix8 {
        let v = self.eigvec(k).map(c);
        v * v.adjoint()
    }
}

/// Eigenvectors in the computational basis; independent of `g` and `Δ`.
pub fn eigenvector_matrix() -> SMatrix<f64, 8, 8> {
    let r = SQRT_2;
    let h = 0.5;
    // Rows: |000⟩..|111⟩; columns: E₁..E₈.
    #[rustfmt::skip]
    let u = SMatrix::<f64, 8, 8>::from_row_slice(&[
        1.0, 0.0,  0.0,     0.0,     0.0,   0.0,    0.0,   0.0,
        0.0, 0.0,  1.0 / r, 0.0,     h,     0.0,    0.0,   h,
        0.0, 0.0,  0.0,     0.0,     h * r, 0.0,    0.0,  -h * r,
        0.0, 0.0,  0.0,     1.0 / r, 0.0,   h,      h,     0.0,
        0.0, 0.0, -1.0 / r, 0.0,     h,     0.0,    0.0,   h,
        0.0, 0.0,  0.0,     0.0,     0.0,  -h * r,  h * r, 0.0,
        0.0, 0.0,  0.0,    -1.0 / r, 0.0,   h,      h,     0.0,
        0.0, 1.0,  0.0,     0.0,     0.0,   0.0,    0.0,   0.0,
    ]);
    u
}

/// Closed-form eigenpairs with the fixed `E₁..E₈` labelling.
pub fn spectrum(p: &ModelParams) -> Result<Spectrum> {
    p.check_global()?;
    Ok(spectrum_unchecked(p))
}

fn spectrum_unchecked(p: &ModelParams) -> Spectrum {
    let energies = LEVELS.map(|(a, b)| a as f64 * p.delta + b as f64 * SQRT_2 * p.g);
    Spectrum { energies, eigvecs: eigenvector_matrix(), omegas: p.omegas() }
}

/// Which transition a level pair `(k, ℓ)` with `E_ℓ − E_k` belongs to, decided
/// on the integer coefficients so the grouping stays fixed as `g → 0`.
fn classify(k: usize, l: usize) -> Option<Transition> {
    let diff = (LEVELS[l].0 - LEVELS[k].0, LEVELS[l].1 - LEVELS[k].1);
    Transition::ALL.into_iter().find(|t| t.coefficients() == diff)
}

/// `A_α(ω)` for both baths and all six signed frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpOperators {
    positive: [[DenseOperator; 3]; 2],
}

impl JumpOperators {
    fn from_fn(mut f: impl FnMut(Bath, Transition) -> DenseOperator) -> Self {
        let positive = Bath::BOTH.map(|b| Transition::ALL.map(|t| f(b, t)));
        Self { positive }
    }

    pub fn get(&self, bath: Bath, transition: Transition) -> &DenseOperator {
        &self.positive[bath as usize][transition.index()]
    }

    /// `A_α(−ω) = A_α(ω)†`.
    pub fn signed(&self, bath: Bath, st: SignedTransition) -> DenseOperator {
        let a = self.get(bath, st.transition);
        if st.positive {
            a.clone()
        } else {
            a.adjoint()
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Bath, Transition, &DenseOperator)> {
        Bath::BOTH.into_iter().flat_map(move |b| Transition::ALL.into_iter().map(move |t| (b, t, self.get(b, t))))
    }

    pub fn to_basis(&self, target: Basis) -> Self {
        let u = eigenvector_matrix();
        Self::from_fn(|b, t| self.get(b, t).to_basis(target, &u))
    }
}

/// Spectral decomposition `A_α(ω) = Σ_{E_ℓ−E_k=ω} P_k σ_−^{(α)} P_ℓ`.
pub fn jump_operators(p: &ModelParams) -> Result<JumpOperators> {
    let spec = spectrum(p)?;
    let projectors: Vec<Matrix8> = (0..8).map(|k| spec.projector(k)).collect();
    Ok(JumpOperators::from_fn(|bath, transition| {
        let lowering = sminus(bath.site());
        let mut acc = Matrix8::zeros();
        for k in 0..8 {
            for l in 0..8 {
                if classify(k, l) == Some(transition) {
                    acc += projectors[k] * lowering * projectors[l];
                }
            }
        }
        DenseOperator::from_matrix(acc, Basis::Computational)
    }))
}

/// Explicit Pauli-string forms of the six positive-frequency operators.
pub fn jump_operators_closed_form(p: &ModelParams) -> Result<JumpOperators> {
    p.check_global()?;
    let (z1, z2, z3) = (sz(1), sz(2), sz(3));
    let (m1, m2, m3) = (sminus(1), sminus(2), sminus(3));
    let r = c(SQRT_2);
    Ok(JumpOperators::from_fn(|bath, transition| {
        let m = match (bath, transition) {
            (Bath::Left, Transition::Omega0) => (m1 - z1 * z2 * m3) * c(0.5),
            (Bath::Left, Transition::Omega1) => (m1 - z1 * m2 * r + z1 * z2 * m3) * c(0.25),
            (Bath::Left, Transition::Omega2) => (m1 + z1 * m2 * r + z1 * z2 * m3) * c(0.25),
            (Bath::Right, Transition::Omega0) => (m3 - m1 * z2 * z3) * c(0.5),
            (Bath::Right, Transition::Omega1) => (m3 - m2 * z3 * r + m1 * z2 * z3) * c(0.25),
            (Bath::Right, Transition::Omega2) => (m3 + m2 * z3 * r + m1 * z2 * z3) * c(0.25),
        };
        DenseOperator::from_matrix(m, Basis::Computational)
    }))
}

pub fn jump_operators_energy_basis(p: &ModelParams) -> Result<JumpOperators> {
    Ok(jump_operators(p)?.to_basis(Basis::Energy))
}

/// Bose occupation `1/(e^{ω/T} − 1)`; exactly zero at `T = 0`.
pub fn occupation(bath: &BathParams, omega: f64) -> Result<f64> {
    occupation_at(bath.temperature, omega)
}

pub(crate) fn occupation_at(temperature: f64, omega: f64) -> Result<f64> {
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::NonPositiveFrequency(omega));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_algebra::{basis_index, C64};

    fn params(g: f64, delta: f64) -> ModelParams {
        ModelParams::symmetric(g, delta, 1.0, 1.0, 10.0, 20.0).unwrap()
    }

    #[test]
    fn field_only_hamiltonian_is_diagonal() {
        let h = build_hamiltonian(&params(0.0, 1.0));
        let expected = [3.0, 1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -3.0];
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j { expected[i] } else { 0.0 };
                assert_eq!(h.matrix()[(i, j)], c(want));
            }
        }
    }

    #[test]
    fn all_up_is_top_level_for_any_g() {
        for g in [0.0, 0.7, 3.0] {
            let h = build_hamiltonian(&params(g, 5.0));
            let col = h.matrix().column(0).into_owned();
            let mut want = nalgebra::SVector::<C64, 8>::zeros();
            want[0] = c(15.0);
            assert_eq!(col, want);
        }
    }

    #[test]
    fn spectrum_values_at_reference_point() {
        let s = spectrum(&params(1.0, 15.0)).unwrap();
        let r = 2.0 * SQRT_2;
        let want = [45.0, -45.0, 15.0, -15.0, 15.0 + r, -(15.0 + r), -15.0 + r, 15.0 - r];
        for (e, w) in s.energies.iter().zip(want) {
            assert!((e - w).abs() < 1e-12);
        }
        let u = s.eigvecs;
        assert!((u.transpose() * u - SMatrix::<f64, 8, 8>::identity()).abs().max() < 1e-12);
        let e3 = s.eigvec(2);
        assert!((e3[basis_index("001").unwrap()] - 1.0 / SQRT_2).abs() < 1e-15);
        assert!((e3[basis_index("100").unwrap()] + 1.0 / SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn guard_rejects_degenerate_coupling() {
        let p = params(15.0 / SQRT_2, 15.0);
        assert!(matches!(spectrum(&p), Err(Error::DegenerateSpectrum { .. })));
        assert!(matches!(jump_operators(&p), Err(Error::DegenerateSpectrum { .. })));
        assert!(spectrum(&params(15.0 / SQRT_2 - 1e-9, 15.0)).is_ok());
    }

    #[test]
    fn zero_coupling_levels_collide() {
        let s = spectrum(&params(0.0, 2.0)).unwrap();
        assert_eq!(s.energies[4], 2.0);
        assert_eq!(s.energies[6], -2.0);
        assert_eq!(s.energies[4], s.energies[2]);
    }

    #[test]
    fn omegas_positive_and_distinct() {
        let p = params(1.0, 15.0);
        let [w0, w1, w2] = spectrum(&p).unwrap().omegas;
        assert_eq!(w0, 30.0);
        assert!((w1 - 2.0 * (15.0 + SQRT_2)).abs() < 1e-12);
        assert!((w2 - 2.0 * (15.0 - SQRT_2)).abs() < 1e-12);
        assert!(w2 > 0.0 && w0 != w1 && w1 != w2 && w0 != w2);
    }

    #[test]
    fn occupation_limits() {
        assert_eq!(occupation_at(0.0, 3.0).unwrap(), 0.0);
        assert!((occupation_at(1.0, 2f64.ln()).unwrap() - 1.0).abs() < 1e-14);
        let beta_omega = 1e-8;
        let n = occupation_at(1.0, beta_omega).unwrap();
        assert!((n * beta_omega - 1.0).abs() < 1e-6);
        assert_eq!(occupation_at(1.0, 0.0), Err(Error::NonPositiveFrequency(0.0)));
        assert_eq!(occupation_at(1.0, -1.0), Err(Error::NonPositiveFrequency(-1.0)));
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ModelParams::symmetric(1.0, 0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::symmetric(-1.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::symmetric(1.0, 1.0, -0.1, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::symmetric(1.0, 1.0, 1.0, 1.0, -1.0, 1.0).is_err());
        assert!(ModelParams::symmetric(1.0, 1.0, 1.0, f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn negative_frequency_is_adjoint() {
        let ops = jump_operators(&params(1.0, 15.0)).unwrap();
        for st in SignedTransition::all() {
            for bath in Bath::BOTH {
                let a = ops.signed(bath, st);
                let pos = ops.get(bath, st.transition);
                let want = if st.positive { pos.clone() } else { pos.adjoint() };
                assert_eq!(a, want);
            }
        }
    }
}
