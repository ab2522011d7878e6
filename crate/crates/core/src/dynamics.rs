//! Time evolution `ρ(t) = e^{tℒ}[ρ₀]` by spectral decomposition of the
//! generator, with a dense matrix-exponential fallback.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::global_me::{build_global_liouvillian, Approach, LambShiftSpec, Liouvillian};
use crate::linalg;
use crate::local_me::build_local_liouvillian;
use crate::model::{eigenvector_matrix, ModelParams};
use crate::spin_algebra::{basis_index, c, unvec_matrix, vec_matrix, Basis, Matrix8, SuperMatrix, C64};
use crate::steady_state::{DensityMatrix, StateTolerance};
use crate::transport::{TransportProbe, TransportReport};

/// Eigenvector matrices with a larger condition number switch to `expm`.
pub const CONDITION_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub reports: Vec<TransportReport>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Initial states accepted by trajectory runs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum InitialState {
    /// `|111⟩⟨111|`, all spins down.
    #[default]
    Ground,
    /// A computational basis projector such as `"010"`.
    Basis(String),
    /// `|E_k⟩⟨E_k|` with `k` in `1..=8`.
    Eigenstate(usize),
    MaximallyMixed,
}

impl InitialState {
    pub fn density(&self) -> Result<DensityMatrix> {
        let mut m = Matrix8::zeros();
        match self {
            InitialState::Ground => m[(7, 7)] = c(1.0),
            InitialState::Basis(bits) => {
                let k = basis_index(bits)
                    .ok_or_else(|| Error::InvalidParams(format!("'{bits}' is not a three-bit basis label")))?;
                m[(k, k)] = c(1.0);
            }
            InitialState::Eigenstate(k) => {
                if !(1..=8).contains(k) {
                    return Err(Error::InvalidParams(format!("eigenstate index {k} outside 1..=8")));
                }
                let v = eigenvector_matrix().column(k - 1).map(c);
                m = v * v.adjoint();
            }
            InitialState::MaximallyMixed => m = Matrix8::identity() * c(0.125),
        }
        DensityMatrix::new(m, Basis::Computational)
    }
}

enum Propagator {
    Spectral { values: Vec<C64>, vectors: SuperMatrix, coeffs: DVector<C64> },
    Dense { generator: SuperMatrix, initial: DVector<C64> },
}

impl Propagator {
    fn new(l: &Liouvillian, rho0: &DensityMatrix) -> Result<Self> {
        let initial = vec_matrix(rho0.to_basis(Basis::Computational).matrix());
        let eig = linalg::eigen_decompose(l.matrix())?;
        if linalg::condition_number(&eig.vectors) <= CONDITION_LIMIT {
            if let Some(coeffs) = eig.vectors.clone().lu().solve(&initial) {
                return Ok(Propagator::Spectral { values: eig.values, vectors: eig.vectors, coeffs });
            }
        }
        Ok(Propagator::Dense { generator: l.matrix().clone(), initial })
    }

    fn at(&self, t: f64) -> DVector<C64> {
        match self {
            Propagator::Spectral { values, vectors, coeffs } => {
                let weighted =
                    DVector::from_iterator(coeffs.len(), coeffs.iter().zip(values).map(|(a, lam)| a * (lam * t).exp()));
                vectors * weighted
            }
            Propagator::Dense { generator, initial } => linalg::expm(&(generator * c(t))) * initial,
        }
    }
}

fn to_state(v: &DVector<C64>) -> Result<DensityMatrix> {
    DensityMatrix::with_tolerance(unvec_matrix(v), Basis::Computational, StateTolerance::PROPAGATED)
}

/// States and transport reports at the requested times.
pub fn propagate(l: &Liouvillian, rho0: &DensityMatrix, times: &[f64]) -> Result<Trajectory> {
    if times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidParams("times must start at t >= 0".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParams("times must be finite and strictly increasing".into()));
    }
    let probe = TransportProbe::new(l)?;
    let prop = Propagator::new(l, rho0)?;
    let mut states = Vec::with_capacity(times.len());
    let mut reports = Vec::with_capacity(times.len());
    for &t in times {
        let state = if t == 0.0 {
            rho0.to_basis(Basis::Computational)
        } else {
            match to_state(&prop.at(t)) {
                Ok(s) => s,
                Err(_) if matches!(prop, Propagator::Spectral { .. }) => {
                    // Spectral rounding too large at this time; redo with the dense path.
                    let dense = Propagator::Dense {
                        generator: l.matrix().clone(),
                        initial: vec_matrix(rho0.to_basis(Basis::Computational).matrix()),
                    };
                    to_state(&dense.at(t)).map_err(|e| Error::IllConditioned(e.to_string()))?
                }
                Err(e) => return Err(Error::IllConditioned(e.to_string())),
            }
        };
        reports.push(probe.report(&state.as_operator())?);
        states.push(state);
    }
    Ok(Trajectory { times: times.to_vec(), states, reports })
}

pub fn uniform_times(t_max: f64, n_points: usize) -> Result<Vec<f64>> {
    if n_points < 2 || !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidParams("need n_points >= 2 and t_max > 0".into()));
    }
    Ok((0..n_points).map(|i| t_max * i as f64 / (n_points - 1) as f64).collect())
}

/// Uniform-grid trajectory for one approach, Lamb shift disabled.
pub fn current_trajectory(
    p: &ModelParams,
    approach: Approach,
    rho0: &DensityMatrix,
    t_max: f64,
    n_points: usize,
) -> Result<Trajectory> {
    let l = match approach {
        Approach::Global => build_global_liouvillian(p, &LambShiftSpec::default())?,
        Approach::Local => build_local_liouvillian(p)?,
    };
    propagate(&l, rho0, &uniform_times(t_max, n_points)?)
}

/// Slowest nonzero decay rate `min |Re λ|` over the nonzero spectrum.
pub fn spectral_gap(l: &Liouvillian) -> Result<f64> {
    let mut re: Vec<f64> = l.eigenvalues()?.iter().map(|z| -z.re).collect();
    re.sort_by(f64::total_cmp);
    re.get(1).copied().ok_or_else(|| Error::Numerical("spectrum too small".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_state_selectors() {
        assert_eq!(InitialState::Ground.density().unwrap().matrix()[(7, 7)], c(1.0));
        let e5 = InitialState::Eigenstate(5).density().unwrap();
        assert!((e5.matrix().trace() - c(1.0)).norm() < 1e-15);
        assert!(InitialState::Basis("01".into()).density().is_err());
        assert!(InitialState::Eigenstate(9).density().is_err());
    }

    #[test]
    fn time_grid_checks() {
        assert_eq!(uniform_times(2.0, 3).unwrap(), vec![0.0, 1.0, 2.0]);
        assert!(uniform_times(2.0, 1).is_err());
    }
}
