//! Principal-value integrals `PV ∫ₐᵇ f(ν)/(ω − ν) dν` by symmetric excision.
//!
//! The window `[ω − δ, ω + δ]`, `δ` one grid step, is folded onto `[0, δ]` as
//! `∫ (f(ω−u) − f(ω+u))/u du`, which is regular. The remaining pieces use
//! composite Gauss-Legendre; the stretch below `ω/2` is integrated in `ln ν`
//! so integrands behaving like `1/ν` near the lower limit stay resolved, and
//! the flanks of the pole are integrated in the log of the distance to it.

use crate::error::{Error, Result};

const NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gauss_legendre(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let width = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + p as f64 * width;
            let (mid, half) = (lo + 0.5 * width, 0.5 * width);
            NODES.iter().zip(WEIGHTS).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
        })
        .sum()
}

/// `∫ₐᵇ f` with the substitution `ν = eˣ`.
fn gauss_legendre_log(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let g = |x: f64| {
        let nu = x.exp();
        f(nu) * nu
    };
    gauss_legendre(&g, a.ln(), b.ln(), panels)
}

fn panels_for(length: f64, total: f64, points: usize) -> usize {
    ((points as f64 * length / total / NODES.len() as f64).ceil() as usize).max(4)
}

/// `PV ∫ₐᵇ f(ν)/(pole − ν) dν` on `points` grid steps, `0 < a < b`.
pub fn principal_value(f: &dyn Fn(f64) -> f64, pole: f64, a: f64, b: f64, points: usize) -> Result<f64> {
    if !(a > 0.0 && b > a) || points == 0 {
        return Err(Error::QuadratureFailure(format!("bad interval [{a}, {b}] with {points} points")));
    }
    let step = (b - a) / points as f64;
    let total = b - a;
    let integrand = |nu: f64| f(nu) / (pole - nu);
    if pole < a || pole > b {
        // No singularity inside; split at the lower end for the log mapping.
        let split = (2.0 * a).min(b).max(a);
        let low = gauss_legendre_log(&integrand, a, split, points);
        let high = gauss_legendre(&integrand, split, b, panels_for(b - split, total, points));
        return Ok(low + high);
    }
    let delta = step;
    if pole - delta <= a || pole + delta >= b {
        return Err(Error::QuadratureFailure(format!(
            "excision window around {pole} does not fit inside [{a}, {b}] with step {step}"
        )));
    }
    let split = (0.5 * pole).max(a);
    let logpart = gauss_legendre_log(&integrand, a, split, points);
    // Flanks are integrated in the log of the distance to the pole.
    let below = gauss_legendre_log(&|u| f(pole - u) / u, delta, pole - split, points);
    let above = -gauss_legendre_log(&|u| f(pole + u) / u, delta, b - pole, points);
    let folded = |u: f64| (f(pole - u) - f(pole + u)) / u;
    let window = gauss_legendre(&folded, 0.0, delta, 4);
    Ok(logpart + below + window + above)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv_quadratic(w: f64, a: f64, b: f64) -> f64 {
        // ν²/(ω−ν) = −(ν+ω) + ω²/(ω−ν)
        -((b * b - a * a) / 2.0 + w * (b - a)) + w * w * ((w - a) / (b - w)).ln()
    }

    #[test]
    fn constant_numerator_matches_log() {
        let v = principal_value(&|_| 1.0, 1.0, 0.5, 3.0, 400).unwrap();
        assert!((v - (0.5f64 / 2.0).ln()).abs() < 1e-10, "{v}");
    }

    #[test]
    fn quadratic_numerator_matches_closed_form() {
        for (w, a, b) in [(30.0, 0.01, 750.0), (2.5, 0.1, 9.0), (80.0, 0.015, 750.0)] {
            let v = principal_value(&|x| x * x, w, a, b, 2000).unwrap();
            let want = pv_quadratic(w, a, b);
            assert!((v - want).abs() < 1e-8 * want.abs().max(1.0), "{w}: {v} vs {want}");
        }
    }

    #[test]
    fn pole_outside_interval_is_regular_integral() {
        // ∫ 1/(−1 − ν) over [1, 2] = −ln(3/2)
        let v = principal_value(&|_| 1.0, -1.0, 1.0, 2.0, 200).unwrap();
        assert!((v + 1.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn inverse_nu_near_lower_limit() {
        // 1/(ν(ω−ν)) = (1/ω)(1/ν + 1/(ω−ν))
        let (w, a, b): (f64, f64, f64) = (30.0, 0.01, 750.0);
        let want = (b * (w - a) / (a * (b - w))).ln() / w;
        let v = principal_value(&|x| 1.0 / x, w, a, b, 2000).unwrap();
        assert!((v - want).abs() < 1e-8, "{v} vs {want}");
    }

    #[test]
    fn window_must_fit() {
        let err = principal_value(&|_| 1.0, 2.99, 0.5, 3.0, 10).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure(_)));
    }
}
