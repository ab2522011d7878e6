//! Invariant suite run at the configured parameters.

use std::fmt;

use super::commands::liouvillian;
use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::global_me::Approach;
use crate::local_me::invariant_span_leakage;
use crate::model::{
    build_hamiltonian, jump_operators, jump_operators_closed_form, jump_operators_energy_basis, spectrum, Bath,
    ModelParams, Transition,
};
use crate::spin_algebra::{
    devectorize, sandwich, sigma, sigma_pm, vectorize, Axis, Basis, DenseOperator, Ladder, VectorizedOperator,
};
use crate::steady_state::{
    commutant_dimension, global_steady_analytic, local_steady_perturbative, middle_weight, steady_numeric,
    LocalExpansion,
};
use crate::transport::{heat_flow_closed_form, TransportProbe};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub outcome: Outcome,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skip => "SKIP",
        };
        write!(f, "CHECK {} {tag} {}", self.name, self.detail)
    }
}

/// Measured value and its tolerance.
type Measured = Result<(f64, f64)>;

fn judge(name: &'static str, measured: Measured) -> CheckResult {
    match measured {
        Ok((value, tol)) if value <= tol => {
            CheckResult { name, outcome: Outcome::Pass, detail: format!("{value:.3e} <= {tol:.0e}") }
        }
        Ok((value, tol)) => CheckResult { name, outcome: Outcome::Fail, detail: format!("{value:.3e} > {tol:.0e}") },
        Err(e) => CheckResult { name, outcome: Outcome::Fail, detail: format!("{}: {e}", error_name(&e)) },
    }
}

fn skip(name: &'static str, reason: String) -> CheckResult {
    CheckResult { name, outcome: Outcome::Skip, detail: reason }
}

fn error_name(e: &Error) -> &'static str {
    match e {
        Error::BasisMismatch { .. } => "BasisMismatch",
        Error::SiteOutOfRange(_) => "SiteOutOfRange",
        Error::NonFinite => "NonFinite",
        Error::InvalidParams(_) => "InvalidParams",
        Error::DegenerateSpectrum { .. } => "DegenerateSpectrum",
        Error::NonPositiveFrequency(_) => "NonPositiveFrequency",
        Error::QuadratureFailure(_) => "QuadratureFailure",
        Error::NotInRange { .. } => "NotInRange",
        Error::NonUniqueKernel { .. } => "NonUniqueKernel",
        Error::NoKernel { .. } => "NoKernel",
        Error::IllConditioned(_) => "IllConditioned",
        Error::InvalidState(_) => "InvalidState",
        Error::WrongApproach { .. } => "WrongApproach",
        Error::Numerical(_) => "Numerical",
    }
}

fn vectorization() -> Measured {
    let a = sigma(Axis::X, 1)?.product(&sigma_pm(2, Ladder::Raising)?)?;
    let b = sigma(Axis::Y, 3)?.sum(&sigma(Axis::Z, 2)?)?;
    let x = sigma(Axis::Y, 2)?.product(&sigma_pm(1, Ladder::Lowering)?)?.sum(&sigma(Axis::Z, 3)?)?;
    let direct = vectorize(&a.product(&x)?.product(&b)?);
    let lifted = sandwich(a.matrix(), b.matrix()) * vectorize(&x).entries();
    let image = VectorizedOperator::from_entries(lifted, Basis::Computational)?;
    let diff = (image.entries() - direct.entries()).norm();
    let round_trip = devectorize(&direct)?.difference(&a.product(&x)?.product(&b)?)?.max_abs();
    Ok((diff.max(round_trip), 1e-14))
}

fn spectrum_residual(p: &ModelParams) -> Measured {
    let spec = spectrum(p)?;
    let h = build_hamiltonian(p);
    let mut worst = 0.0f64;
    for k in 0..8 {
        let v = spec.eigvec(k).map(crate::spin_algebra::c);
        worst = worst.max((h.matrix() * v - v * crate::spin_algebra::c(spec.energies[k])).norm());
    }
    Ok((worst, 1e-12))
}

fn jump_equivalence(p: &ModelParams) -> Measured {
    let numeric = jump_operators(p)?;
    let closed = jump_operators_closed_form(p)?;
    let energy = jump_operators_energy_basis(p)?.to_basis(Basis::Computational);
    let mut worst = 0.0f64;
    for bath in Bath::BOTH {
        for t in Transition::ALL {
            let a = numeric.get(bath, t);
            worst = worst.max(a.difference(closed.get(bath, t))?.max_abs());
            worst = worst.max(a.difference(energy.get(bath, t))?.max_abs());
        }
    }
    Ok((worst, 1e-12))
}

fn trace_preservation(cfg: &RunConfig, p: &ModelParams, approach: Approach) -> Measured {
    let l = liouvillian(p, approach, &cfg.lamb_shift)?;
    let dual_identity = l.dual_apply(&DenseOperator::identity(Basis::Computational))?.max_abs();
    let mut hermiticity = 0.0f64;
    for k in 0..8 {
        for j in k..8 {
            let mut m = crate::spin_algebra::Matrix8::zeros();
            m[(k, j)] = crate::spin_algebra::c(1.0);
            m[(j, k)] = crate::spin_algebra::c(1.0);
            let image = l.apply(&DenseOperator::new(m, Basis::Computational)?)?;
            hermiticity = hermiticity.max(image.difference(&image.adjoint())?.max_abs());
        }
    }
    let scale = l.matrix().norm().max(1.0);
    Ok((dual_identity.max(hermiticity) / scale, 1e-14))
}

fn global_analytic(cfg: &RunConfig, p: &ModelParams) -> Measured {
    let (rho, _) = global_steady_analytic(p)?;
    let l = liouvillian(p, Approach::Global, &cfg.lamb_shift)?;
    Ok((l.apply(&rho.to_basis(Basis::Computational).as_operator())?.max_abs(), 1e-10))
}

fn global_relaxation(cfg: &RunConfig, p: &ModelParams) -> Measured {
    let l = liouvillian(p, Approach::Global, &cfg.lamb_shift)?;
    let numeric = steady_numeric(&l)?;
    let (rho, _) = global_steady_analytic(p)?;
    Ok((rho.to_basis(Basis::Computational).max_abs_diff(&numeric)?, 1e-9))
}

fn global_bookkeeping(cfg: &RunConfig, p: &ModelParams) -> Measured {
    let l = liouvillian(p, Approach::Global, &cfg.lamb_shift)?;
    let (rho, _) = global_steady_analytic(p)?;
    let r = TransportProbe::new(&l)?.report(&rho.to_basis(Basis::Computational).as_operator())?;
    let (hl, hr) = (r.heat_left.unwrap_or(0.0), r.heat_right.unwrap_or(0.0));
    let mut worst = (r.q_left + r.q_right).abs().max((hl + hr).abs()).max(r.sigma_z2_rate.abs());
    if p.left.h_by_transition.is_none() && p.right.h_by_transition.is_none() && p.left.h == p.right.h {
        worst = worst.max((hl - heat_flow_closed_form(p)?).abs());
    }
    Ok((worst, 1e-10))
}

fn global_clausius(cfg: &RunConfig, p: &ModelParams) -> Measured {
    let l = liouvillian(p, Approach::Global, &cfg.lamb_shift)?;
    let (rho, _) = global_steady_analytic(p)?;
    let r = TransportProbe::new(&l)?.report(&rho.to_basis(Basis::Computational).as_operator())?;
    let heat = r.heat_left.unwrap_or(0.0);
    // Positive part of the heat flowing against the temperature difference.
    let wrong_way = match p.left.temperature.total_cmp(&p.right.temperature) {
        std::cmp::Ordering::Greater => heat.max(0.0),
        std::cmp::Ordering::Less => (-heat).max(0.0),
        std::cmp::Ordering::Equal => heat.abs(),
    };
    Ok((wrong_way, 1e-12))
}

fn global_commutant(p: &ModelParams) -> Measured {
    let ops: Vec<_> = jump_operators(p)?.iter().map(|(_, _, a)| a.clone()).collect();
    Ok(((commutant_dimension(&ops)? as f64 - 1.0).abs(), 0.0))
}

fn local_span(p: &ModelParams) -> Measured {
    let l = liouvillian(p, Approach::Local, &Default::default())?;
    Ok((invariant_span_leakage(&l)?, 1e-12))
}

fn local_relaxation(p: &ModelParams) -> Measured {
    let l = liouvillian(p, Approach::Local, &Default::default())?;
    let rho = steady_numeric(&l)?;
    Ok((l.apply(&rho.as_operator())?.max_abs(), 1e-10))
}

fn local_continuity(p: &ModelParams) -> Measured {
    let l = liouvillian(p, Approach::Local, &Default::default())?;
    let rho = steady_numeric(&l)?;
    let r = TransportProbe::new(&l)?.report(&rho.as_operator())?;
    Ok(((r.j12 - r.j23).abs().max(r.sigma_z2_rate.abs()), 1e-10))
}

fn local_perturbative(p: &ModelParams) -> Measured {
    let pert = local_steady_perturbative(p)?;
    let solved = LocalExpansion::new(p)?.solve_middle_weight()?;
    let [a, b, c, d] = pert.coefficients;
    let r_diff = (solved - middle_weight(pert.n_left, pert.n_right)).abs();
    Ok((r_diff.max((a + d - b - c).abs()), 1e-12))
}

fn local_commutant(p: &ModelParams) -> Measured {
    let mut ops: Vec<_> = [1, 3]
        .into_iter()
        .flat_map(|s| [Ladder::Raising, Ladder::Lowering].map(|k| sigma_pm(s, k)))
        .collect::<Result<_>>()?;
    ops.push(build_hamiltonian(p));
    let expected = if p.g == 0.0 { 2.0 } else { 1.0 };
    Ok(((commutant_dimension(&ops)? as f64 - expected).abs(), 0.0))
}

pub fn run_checks(cfg: &RunConfig) -> Vec<CheckResult> {
    let p = match cfg.params() {
        Ok(p) => p,
        Err(e) => return vec![judge("config", Err(e))],
    };
    let mut out = vec![judge("algebra.vectorization", vectorization())];
    let approaches = cfg.approach.approaches();
    if approaches.contains(&Approach::Global) {
        let names = [
            "global.spectrum",
            "global.jump_operators",
            "global.trace_hermiticity",
            "global.steady_analytic",
            "global.relaxation",
            "global.bookkeeping",
            "global.clausius",
            "global.commutant",
        ];
        match p.check_global() {
            Err(e) => out.extend(names.map(|n| skip(n, format!("{}: {e}", error_name(&e))))),
            Ok(()) => out.extend([
                judge(names[0], spectrum_residual(&p)),
                judge(names[1], jump_equivalence(&p)),
                judge(names[2], trace_preservation(cfg, &p, Approach::Global)),
                judge(names[3], global_analytic(cfg, &p)),
                judge(names[4], global_relaxation(cfg, &p)),
                judge(names[5], global_bookkeeping(cfg, &p)),
                judge(names[6], global_clausius(cfg, &p)),
                judge(names[7], global_commutant(&p)),
            ]),
        }
    }
    if approaches.contains(&Approach::Local) {
        let names = [
            "local.trace_hermiticity",
            "local.invariant_span",
            "local.relaxation",
            "local.continuity",
            "local.perturbative",
            "local.commutant",
        ];
        match crate::local_me::local_coupling(&p) {
            Err(e) => out.extend(names.map(|n| skip(n, format!("{}: {e}", error_name(&e))))),
            Ok(_) => {
                out.extend([
                    judge(names[0], trace_preservation(cfg, &p, Approach::Local)),
                    judge(names[1], local_span(&p)),
                    judge(names[2], local_relaxation(&p)),
                    judge(names[3], local_continuity(&p)),
                ]);
                if p.lambda == 0.0 || p.left.h == 0.0 {
                    out.push(skip(names[4], "expansion needs nonzero dissipation".into()));
                } else {
                    out.push(judge(names[4], local_perturbative(&p)));
                }
                out.push(judge(names[5], local_commutant(&p)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> Vec<CheckResult> {
        run_checks(&RunConfig::from_toml(text).unwrap())
    }

    #[test]
    fn default_config_passes() {
        for c in run("") {
            assert_eq!(c.outcome, Outcome::Pass, "{c}");
        }
    }

    #[test]
    fn guard_violation_skips_global_only() {
        for c in run("[model]\ng = 12.0\n") {
            let want = if c.name.starts_with("global.") { Outcome::Skip } else { Outcome::Pass };
            assert_eq!(c.outcome, want, "{c}");
        }
    }

    #[test]
    fn no_dissipation_fails_relaxation() {
        let results = run("[model]\nlambda = 0.0\n");
        for name in ["global.relaxation", "local.relaxation"] {
            let c = results.iter().find(|c| c.name == name).unwrap();
            assert_eq!(c.outcome, Outcome::Fail);
            assert!(c.detail.contains("NonUniqueKernel"), "{c}");
        }
    }
}
