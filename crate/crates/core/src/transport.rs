//! Spin currents, bath-induced sink/source terms and heat currents.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::global_me::{bath_dissipator, jump_terms, Approach, Liouvillian};
use crate::local_me::build_local_dissipator;
use crate::model::{build_hamiltonian, jump_operators, occupation, occupation_at, Bath, ModelParams, Transition};
use crate::spin_algebra::{
    apply_super, c, dual_gksl_apply, sminus, splus, sz, unvec_matrix, vec_matrix, Basis, DenseOperator, Matrix8, I,
};
use crate::steady_state::{kernel_rates, DensityMatrix};

/// Expectation values of the transport observables in one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportReport {
    pub j12: f64,
    pub j23: f64,
    /// Sink/source terms; identically zero for the local generator.
    pub q_left: f64,
    pub q_right: f64,
    /// `d⟨σ_z⁽²⁾⟩/dt = Tr(σ_z⁽²⁾ ℒ[ρ])`.
    pub sigma_z2_rate: f64,
    /// Heat currents, available for the global generator only.
    pub heat_left: Option<f64>,
    pub heat_right: Option<f64>,
}

fn current_matrix(site: usize) -> Matrix8 {
    (splus(site) * sminus(site + 1) - sminus(site) * splus(site + 1)) * (I * 4.0)
}

fn exchange_matrix(site: usize) -> Matrix8 {
    sminus(site) * splus(site + 1) + splus(site) * sminus(site + 1)
}

/// `J⁽¹²⁾`, `J⁽²³⁾` oriented so that `i[H_S, σ_z⁽²⁾] = g (J⁽¹²⁾ − J⁽²³⁾)`.
pub fn current_operators() -> (DenseOperator, DenseOperator) {
    let op = |s| DenseOperator::from_matrix(current_matrix(s), Basis::Computational);
    (op(1), op(2))
}

/// `Q⁽¹²⁾ + Q⁽²³⁾`, the symmetric exchange operators.
pub fn exchange_operator() -> DenseOperator {
    DenseOperator::from_matrix(exchange_matrix(1) + exchange_matrix(2), Basis::Computational)
}

/// `𝒬_α = λ² Σ_ω 𝒟̃_ω^{(α)}[σ_z⁽²⁾]` built from the dual dissipator.
pub fn sink_source_operators(p: &ModelParams) -> Result<(DenseOperator, DenseOperator)> {
    let ops = jump_operators(p)?;
    let lam2 = p.lambda * p.lambda;
    let one = |bath| -> Result<DenseOperator> {
        let mut acc = Matrix8::zeros();
        for t in Transition::ALL {
            for term in jump_terms(p, &ops, bath, t)? {
                acc += dual_gksl_apply(term.operator.matrix(), term.rate, &sz(2));
            }
        }
        Ok(DenseOperator::from_matrix(acc * c(lam2), Basis::Computational))
    };
    Ok((one(Bath::Left)?, one(Bath::Right)?))
}

/// Closed form of `𝒟̃_ω^{(α)}[σ_z⁽²⁾]` at `ω₁` (`+`) or `ω₂` (`−`); zero at `ω₀`.
pub fn dual_sigma_z2_closed_form(p: &ModelParams, bath: Bath, transition: Transition) -> Result<DenseOperator> {
    let sign = match transition {
        Transition::Omega0 => return Ok(DenseOperator::zeros(Basis::Computational)),
        Transition::Omega1 => 1.0,
        Transition::Omega2 => -1.0,
    };
    p.check_global()?;
    let b = p.bath(bath);
    let n = occupation(b, transition.frequency(p))?;
    let h2 = b.h_at(transition).powi(2);
    let inner = sz(2) + exchange_operator().into_matrix() * c(sign / SQRT_2);
    let m = (Matrix8::identity() + inner * c(1.0 + 2.0 * n)) * c(-PI * h2 / 4.0);
    Ok(DenseOperator::from_matrix(m, Basis::Computational))
}

/// `Tr(𝒬_L ρ∞)` in the global steady state from the kernel rates `τ`, `s`.
pub fn source_closed_form(p: &ModelParams) -> Result<f64> {
    let (tau, s) = kernel_rates(p)?;
    let mut sum = 0.0;
    for t in [Transition::Omega1, Transition::Omega2] {
        let i = t.index();
        let n = occupation(&p.left, t.frequency(p))?;
        sum += p.left.h_at(t).powi(2) * (n * (s[i] - tau[i]) - tau[i]) / (s[i] + tau[i]);
    }
    Ok(p.lambda * p.lambda * PI / 2.0 * sum)
}

fn common_h(p: &ModelParams) -> Result<f64> {
    let h = p.left.h;
    let all_equal = Transition::ALL.iter().all(|&t| p.left.h_at(t) == h && p.right.h_at(t) == h);
    if !all_equal {
        return Err(Error::InvalidParams("closed form needs one smearing amplitude for both baths".into()));
    }
    Ok(h)
}

fn source_term(n_left: f64, n_right: f64) -> f64 {
    (n_left - n_right) / (n_left + n_right + 1.0)
}

/// Equal-amplitude source value `(λ²h²π/4) Σ_{ω₁,ω₂} (n_L − n_R)/(n_L + n_R + 1)`.
pub fn source_equal_h(p: &ModelParams) -> Result<f64> {
    p.check_global()?;
    let h = common_h(p)?;
    let mut sum = 0.0;
    for t in [Transition::Omega1, Transition::Omega2] {
        let w = t.frequency(p);
        sum += source_term(occupation(&p.left, w)?, occupation(&p.right, w)?);
    }
    Ok(p.lambda * p.lambda * h * h * PI / 4.0 * sum)
}

/// The `T_L → ∞, T_R = 0` plateau `λ²πh²/2` and the `g → 0` source value.
pub fn source_limit_values(p: &ModelParams) -> Result<(f64, f64)> {
    let h = common_h(p)?;
    let scale = p.lambda * p.lambda * h * h * PI / 4.0;
    let w = 2.0 * p.delta;
    let n_left = occupation_at(p.left.temperature, w)?;
    let n_right = occupation_at(p.right.temperature, w)?;
    Ok((2.0 * scale, 2.0 * scale * source_term(n_left, n_right)))
}

/// `J_Q^{(α)} = −λ² Tr(H_S Σ_ω 𝒟_ω^{(α)}[ρ])` under the global dissipator.
pub fn heat_current(p: &ModelParams, rho: &DensityMatrix, bath: Bath) -> Result<f64> {
    let rho = rho.to_basis(Basis::Computational);
    let d = bath_dissipator(p, bath)?;
    let image = apply_super(&d, rho.matrix());
    Ok(-(build_hamiltonian(p).matrix() * image).trace().re)
}

/// Same trace with the local boundary dissipator, for any operator.
pub fn local_heat_current(p: &ModelParams, rho: &DenseOperator, bath: Bath) -> Result<f64> {
    let d = build_local_dissipator(p, bath)?;
    let image = apply_super(&d, rho.matrix());
    Ok(-(build_hamiltonian(p).matrix() * image).trace().re)
}

/// Equal-amplitude closed form of the left heat current in the global steady state.
pub fn heat_flow_closed_form(p: &ModelParams) -> Result<f64> {
    p.check_global()?;
    let h = common_h(p)?;
    let mut sum = 0.0;
    for t in Transition::ALL {
        let w = t.frequency(p);
        let (nl, nr) = (occupation(&p.left, w)?, occupation(&p.right, w)?);
        let weight = if t == Transition::Omega0 { 2.0 } else { 1.0 };
        sum += weight * w * (nr - nl) / (2.0 * nl + 1.0 + 2.0 * nr + 1.0);
    }
    Ok(p.lambda * p.lambda * h * h * PI / 2.0 * sum)
}

fn expect(op: &Matrix8, rho: &Matrix8) -> Result<f64> {
    let z = (op * rho).trace();
    if z.im.abs() > 1e-10 * z.re.abs().max(1.0) {
        return Err(Error::Numerical(format!("expectation has imaginary part {:.3e}", z.im)));
    }
    Ok(z.re)
}

/// Observables of a [`TransportReport`] precomputed for one generator, so
/// that evaluating a state costs a handful of 8×8 traces.
#[derive(Debug, Clone)]
pub struct TransportProbe {
    hopping: f64,
    j12: Matrix8,
    j23: Matrix8,
    /// `ℒ̃[σ_z⁽²⁾]`
    rate: Matrix8,
    sources: Option<(Matrix8, Matrix8)>,
    /// `−λ² 𝒟̃_α[H_S]`
    heat: Option<(Matrix8, Matrix8)>,
    scale: f64,
}

impl TransportProbe {
    pub fn new(l: &Liouvillian) -> Result<Self> {
        let p = l.params();
        let sz2 = DenseOperator::from_matrix(sz(2), Basis::Computational);
        let rate = l.dual_apply(&sz2)?.into_matrix();
        let (sources, heat, hopping) = match l.kind() {
            Approach::Global => {
                let (ql, qr) = sink_source_operators(p)?;
                let h = build_hamiltonian(p);
                let heat_obs = |bath| -> Result<Matrix8> {
                    let d = bath_dissipator(p, bath)?;
                    Ok(-dual_superop_apply(&d, h.matrix()))
                };
                let heat = (heat_obs(Bath::Left)?, heat_obs(Bath::Right)?);
                (Some((ql.into_matrix(), qr.into_matrix())), Some(heat), p.g + l.kappa().unwrap_or(0.0))
            }
            Approach::Local => (None, None, p.g),
        };
        Ok(Self {
            hopping,
            j12: current_matrix(1),
            j23: current_matrix(2),
            rate,
            sources,
            heat,
            scale: p.g.abs().max(1.0),
        })
    }

    pub fn report(&self, rho: &DenseOperator) -> Result<TransportReport> {
        if rho.basis() != Basis::Computational {
            return Err(Error::BasisMismatch { left: rho.basis(), right: Basis::Computational });
        }
        let m = rho.matrix();
        let j12 = expect(&self.j12, m)?;
        let j23 = expect(&self.j23, m)?;
        let sigma_z2_rate = expect(&self.rate, m)?;
        let (q_left, q_right) = match &self.sources {
            Some((ql, qr)) => (expect(ql, m)?, expect(qr, m)?),
            None => (0.0, 0.0),
        };
        let (heat_left, heat_right) = match &self.heat {
            Some((hl, hr)) => (Some(expect(hl, m)?), Some(expect(hr, m)?)),
            None => (None, None),
        };
        let predicted = self.hopping * (j12 - j23) + q_left + q_right;
        let scale = [j12, j23, q_left, q_right, sigma_z2_rate].iter().fold(self.scale, |a, x| a.max(x.abs()));
        let mismatch = (sigma_z2_rate - predicted).abs();
        if mismatch > 1e-10 * scale {
            return Err(Error::Numerical(format!("continuity decomposition off by {mismatch:.3e}")));
        }
        Ok(TransportReport { j12, j23, q_left, q_right, sigma_z2_rate, heat_left, heat_right })
    }
}

fn dual_superop_apply(s: &crate::spin_algebra::SuperMatrix, obs: &Matrix8) -> Matrix8 {
    unvec_matrix(&(s.transpose() * vec_matrix(&obs.transpose()))).transpose()
}

/// Transport report for a normalized state under `l`.
pub fn continuity_rate(l: &Liouvillian, rho: &DensityMatrix) -> Result<TransportReport> {
    continuity_rate_operator(l, &rho.to_basis(Basis::Computational).as_operator())
}

/// As [`continuity_rate`] for an arbitrary Hermitian operator, such as a
/// truncated perturbative state.
pub fn continuity_rate_operator(l: &Liouvillian, rho: &DenseOperator) -> Result<TransportReport> {
    TransportProbe::new(l)?.report(rho)
}

/// First-order local steady-state current `⟨J⁽¹²⁾⟩ = ⟨J⁽²³⁾⟩`.
pub fn local_current_first_order(p: &ModelParams) -> Result<f64> {
    let state = crate::steady_state::local_steady_perturbative(p)?;
    let [_, b, c_, _] = state.coefficients;
    let scale = 2.0 * PI * p.lambda * p.lambda * p.left.h * p.left.h;
    Ok(-8.0 * p.g * (b + c_) / scale)
}
