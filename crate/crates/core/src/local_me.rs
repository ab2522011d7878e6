//! Local-approach generator: boundary spins each coupled to their own bath,
//! the full chain Hamiltonian kept in the commutator.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::global_me::{Approach, Liouvillian};
use crate::model::{build_hamiltonian, field_matrix, hopping_matrix, occupation_at, Bath, LocalFrequency, ModelParams};
use crate::spin_algebra::{
    c, gksl_superop, hamiltonian_superop, sminus, splus, vec_matrix, Basis, DenseOperator, Matrix8, SuperMatrix, DIM, I,
};

/// Boundary occupation, at `2Δ` or `Δ` depending on the configured reading.
pub fn local_occupation(p: &ModelParams, bath: Bath) -> Result<f64> {
    let omega = match p.local_frequency {
        LocalFrequency::TwoDelta => 2.0 * p.delta,
        LocalFrequency::Delta => p.delta,
    };
    occupation_at(p.bath(bath).temperature, omega)
}

/// Shared boundary coupling; the local path requires `h_L = h_R`.
pub fn local_coupling(p: &ModelParams) -> Result<f64> {
    p.validate()?;
    if p.left.h != p.right.h {
        return Err(Error::InvalidParams(format!(
            "local approach needs equal bath couplings, got h_L = {} and h_R = {}",
            p.left.h, p.right.h
        )));
    }
    Ok(p.left.h)
}

/// `𝒟_α` with `σ₋` at rate `2πλ²h²(1+n)` and `σ₊` at `2πλ²h²n` on the boundary site.
pub fn build_local_dissipator(p: &ModelParams, bath: Bath) -> Result<SuperMatrix> {
    p.validate()?;
    let n = local_occupation(p, bath)?;
    let h = p.bath(bath).h;
    let weight = 2.0 * PI * p.lambda * p.lambda * h * h;
    let site = bath.site();
    Ok(gksl_superop(&sminus(site), weight * (1.0 + n)) + gksl_superop(&splus(site), weight * n))
}

fn dissipators(p: &ModelParams) -> Result<SuperMatrix> {
    Ok(build_local_dissipator(p, Bath::Left)? + build_local_dissipator(p, Bath::Right)?)
}

pub fn build_local_liouvillian(p: &ModelParams) -> Result<Liouvillian> {
    local_coupling(p)?;
    let h = build_hamiltonian(p);
    let matrix = hamiltonian_superop(h.matrix()) + dissipators(p)?;
    Ok(Liouvillian::from_parts(matrix, Approach::Local, p.clone(), h, None))
}

/// Unperturbed part: field commutator plus both boundary dissipators.
pub fn unperturbed_generator(p: &ModelParams) -> Result<SuperMatrix> {
    local_coupling(p)?;
    Ok(hamiltonian_superop(&(field_matrix() * c(p.delta))) + dissipators(p)?)
}

/// Perturbation per unit coupling: `−i[Σ(σxσx + σyσy), ·]`.
pub fn hopping_generator() -> SuperMatrix {
    hamiltonian_superop(&hopping_matrix())
}

fn ket_bra(k: usize, l: usize) -> Matrix8 {
    let mut m = Matrix8::zeros();
    m[(k, l)] = c(1.0);
    m
}

fn flip(m: &Matrix8, site: usize) -> Matrix8 {
    let x = splus(site) + sminus(site);
    x * m * x
}

fn current_like(k: usize, l: usize) -> Matrix8 {
    (ket_bra(k, l) - ket_bra(l, k)) * I
}

/// The 14 operators left invariant by the local generator: the eight
/// computational projectors, the two real coherences `|001⟩⟨100|` and
/// `|011⟩⟨110|`, and the four imaginary nearest-neighbour hopping coherences.
pub fn invariant_span() -> Vec<Matrix8> {
    let mut basis: Vec<Matrix8> = (0..DIM).map(|k| ket_bra(k, k)).collect();
    let outer = ket_bra(1, 4) + ket_bra(4, 1);
    basis.extend([
        outer,
        flip(&outer, 2),
        current_like(1, 2),
        current_like(2, 4),
        current_like(3, 5),
        current_like(5, 6),
    ]);
    basis
}

/// Norm of the component of `L[X]` outside the invariant span, maximized
/// over the span's generators.
pub fn invariant_span_leakage(l: &Liouvillian) -> Result<f64> {
    let span = invariant_span();
    let cols: Vec<_> = span.iter().map(vec_matrix).collect();
    let q = SuperMatrix::from_columns(&cols).qr().q();
    let mut worst = 0.0f64;
    for x in &span {
        let lx = l.apply(&DenseOperator::from_matrix(*x, Basis::Computational))?;
        let v = vec_matrix(lx.matrix());
        let residual = &v - &q * (q.adjoint() * &v);
        worst = worst.max(residual.norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_algebra::sz;

    fn fig3() -> ModelParams {
        ModelParams::symmetric(1.0, 15.0, 1.0, 1.0, 10.0, 20.0).unwrap()
    }

    #[test]
    fn decomposition_reassembles_generator() {
        let p = fig3();
        let l = build_local_liouvillian(&p).unwrap();
        let split = unperturbed_generator(&p).unwrap() + hopping_generator() * c(p.g);
        assert!((l.matrix() - split).norm() < 1e-12);
    }

    #[test]
    fn left_dissipator_ignores_middle_spin() {
        let d = build_local_dissipator(&fig3(), Bath::Left).unwrap();
        let lifted = d.transpose() * vec_matrix(&sz(2).transpose());
        assert!(lifted.norm() < 1e-14);
    }

    #[test]
    fn zero_temperature_fixes_lowered_spin() {
        let p = fig3().with_temperatures(0.0, 20.0);
        let d = build_local_dissipator(&p, Bath::Left).unwrap();
        // |1⟩⟨1| on site 1, maximally mixed elsewhere
        let mut rho = Matrix8::zeros();
        for k in 4..8 {
            rho[(k, k)] = c(0.25);
        }
        assert!((&d * vec_matrix(&rho)).norm() < 1e-14);
    }

    #[test]
    fn unequal_couplings_rejected() {
        let mut p = fig3();
        p.right.h = 2.0;
        assert!(matches!(build_local_liouvillian(&p), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn span_is_invariant() {
        for p in [fig3(), fig3().with_g(0.3).with_temperatures(1.0, 40.0)] {
            let l = build_local_liouvillian(&p).unwrap();
            assert!(invariant_span_leakage(&l).unwrap() < 1e-12);
        }
    }

    #[test]
    fn occupation_reading_switch() {
        let mut p = fig3();
        let two = local_occupation(&p, Bath::Left).unwrap();
        p.local_frequency = LocalFrequency::Delta;
        let one = local_occupation(&p, Bath::Left).unwrap();
        assert!((two - 1.0 / (3.0f64).exp_m1()).abs() < 1e-14);
        assert!((one - 1.0 / (1.5f64).exp_m1()).abs() < 1e-14);
    }
}
