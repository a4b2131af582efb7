//! Cross-checks between modules through independent formulas.

use std::f64::consts::PI;

use levy_localtime::localtime::{
    correlation_e, mean_fixed, mean_fixed_quadrature, onepoint_density_e, w_fixed, w_free,
    LocalTimeValue,
};
use levy_localtime::quad::{
    integrate, integrate_to_infinity, integrate_with_breaks, Budget, Tolerance,
};
use levy_localtime::resolvent::{
    perturbed_resolvent, resolvent, resolvent_diagonal, Energy, PeakPotential,
};
use levy_localtime::special::gamma;
use levy_localtime::stable::{recurrence_probability, stable_density, WalkModel};
use num_complex::Complex64;

fn model(l: f64) -> WalkModel {
    WalkModel::new(l, 1.0).unwrap()
}

fn lt(v: f64) -> LocalTimeValue {
    LocalTimeValue::new(v).unwrap()
}

/// Fixed-Talbot inversion of `f` at time `t` with `m` nodes.
fn talbot(f: impl Fn(Complex64) -> Complex64, t: f64, m: usize) -> f64 {
    let r = 2.0 * m as f64 / (5.0 * t);
    let mut acc = 0.5 * (f(Complex64::new(r, 0.0)) * (r * t).exp()).re;
    for k in 1..m {
        let th = k as f64 * PI / m as f64;
        let cot = th.cos() / th.sin();
        let s = Complex64::new(r * th * cot, r * th);
        let sigma = Complex64::new(1.0, th * (1.0 + cot * cot) - cot);
        acc += ((s * t).exp() * f(s) * sigma).re;
    }
    acc * r / m as f64
}

#[test]
fn talbot_reproduces_known_pair() {
    // L^{-1}[1/(s+1)] = e^{-t}
    let v = talbot(|s| 1.0 / (s + 1.0), 1.3, 32);
    assert!((v - (-1.3f64).exp()).abs() < 1e-9);
}

/// E-domain one-point distributions at the starting point, as in the
/// resolvent construction: `σ E^{-1/λ} e^{-Lσ E^{1-1/λ}}` (free endpoint)
/// and `e^{-Lσ E^{1-1/λ}}` (fixed endpoint, unnormalized).
fn e_domain(l: f64, lv: f64, free: bool) -> impl Fn(Complex64) -> Complex64 {
    let sigma = l * (PI / l).sin();
    let beta = 1.0 - 1.0 / l;
    move |s: Complex64| {
        let core = (-lv * sigma * s.powf(beta)).exp();
        if free {
            core * sigma * s.powf(-1.0 / l)
        } else {
            core
        }
    }
}

#[test]
fn w_free_matches_talbot_inversion() {
    let m = model(1.5);
    for lv in [0.2, 1.0, 2.0] {
        let direct = w_free(lt(lv), 1.0, &m).unwrap();
        let oracle = talbot(e_domain(1.5, lv, true), 1.0, 32);
        assert!(
            (direct - oracle).abs() < 1e-4,
            "L {lv}: {direct} vs {oracle}"
        );
    }
}

#[test]
fn w_fixed_matches_talbot_inversion() {
    let m = model(1.5);
    let p0 = recurrence_probability(1.0, &m).unwrap();
    for lv in [0.2, 1.0, 2.0] {
        let direct = w_fixed(lt(lv), 1.0, &m).unwrap();
        let oracle = talbot(e_domain(1.5, lv, false), 1.0, 32) / p0;
        assert!(
            (direct - oracle).abs() < 1e-4,
            "L {lv}: {direct} vs {oracle}"
        );
    }
}

/// `∫ ds/2π e^{-isL}/(1 - isR)` by half-period pieces of `sin(sL)` on
/// `s > 0` (the integrand's real part is even), with the alternating tail
/// summed by repeated averaging of partial sums.
fn fourier_exponential(r: f64, lv: f64) -> f64 {
    let b = Budget::default();
    let f = |s: f64| ((s * lv).cos() + s * r * (s * lv).sin()) / (1.0 + s * s * r * r);
    let step = PI / lv;
    let mut partial = Vec::with_capacity(80);
    let mut acc = 0.0;
    for k in 0..80 {
        let (lo, hi) = (k as f64 * step, (k + 1) as f64 * step);
        acc += integrate(f, lo, hi, Tolerance::new(1e-16, 1e-13), &b)
            .unwrap()
            .value;
        partial.push(acc);
    }
    for _ in 0..30 {
        partial = partial.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    partial[partial.len() - 1] / PI
}

#[test]
fn fourier_pair_exponential() {
    // = θ(L) e^{-L/R}/R
    for lv in [0.5f64, 1.0, 2.0] {
        let v = fourier_exponential(1.0, lv);
        assert!((v - (-lv).exp()).abs() < 1e-6, "L {lv}: {v}");
    }
    let v = fourier_exponential(0.7, 0.9);
    assert!((v - (-0.9f64 / 0.7).exp() / 0.7).abs() < 1e-6);
}

#[test]
fn fourier_pair_derivative_by_differencing() {
    // ∫ ds/2π e^{-isL} is/(1 - isR) = -∂_L of the first pair = θ(L) e^{-L/R}/R² - δ(L)/R
    let h = 1e-3;
    for lv in [0.5f64, 1.0, 2.0] {
        let d = -(fourier_exponential(1.0, lv + h) - fourier_exponential(1.0, lv - h)) / (2.0 * h);
        assert!((d - (-lv).exp()).abs() < 1e-5, "L {lv}: {d}");
    }
}

#[test]
fn fourier_pair_derivative_decomposition() {
    // is/(1 - isR) = -1/R + (1/R)/(1 - isR): the δ(L)/R term plus the first pair over R
    let r = 1.3;
    for s in [-4.0, -0.3, 0.0, 0.8, 11.0] {
        let i = Complex64::new(0.0, 1.0);
        let lhs = i * s / (1.0 - i * s * r);
        let rhs = -1.0 / r + (1.0 / r) / (1.0 - i * s * r);
        assert!((lhs - rhs).norm() < 1e-14);
    }
}

#[test]
fn onepoint_laplace_transform_is_peak_resolvent() {
    // ∫ e^{-uL} [atom δ(L) + density] dL = R_U(x_a, x_b) for U = u δ(· - x)
    for l in [1.5, 2.0] {
        let m = model(l);
        let en = Energy::new(0.8).unwrap();
        for (x, xa, xb) in [(0.4, -0.3, 1.1), (0.0, 0.0, 0.0), (1.5, 0.2, -0.6)] {
            let d = onepoint_density_e(x, xa, xb, en, &m).unwrap();
            for u in [0.3, 2.0] {
                let lt = d.atom + d.amplitude / (1.0 / d.decay + u);
                let p = PeakPotential::new(vec![(x, u)]).unwrap();
                let ru = perturbed_resolvent(xa, xb, en, &p, &m).unwrap();
                assert!((lt - ru).abs() < 1e-13, "lambda {l}: {lt} vs {ru}");
            }
        }
    }
}

#[test]
fn density_normalization() {
    let b = Budget::default();
    for l in [1.0, 1.25, 1.5, 1.75, 2.0] {
        let m = model(l);
        let f = |x: f64| stable_density(x, 1.0, &m).unwrap();
        let tol = Tolerance::new(1e-14, 1e-10);
        let v = 2.0
            * (integrate(f, 0.0, 10.0, tol, &b).unwrap().value
                + integrate_to_infinity(f, 10.0, tol, &b).unwrap().value);
        assert!((v - 1.0).abs() < 1e-6, "lambda {l}: {v}");
    }
}

#[test]
fn resolvent_is_laplace_transform_of_density() {
    let b = Budget::default();
    for l in [1.25, 1.5, 2.0] {
        let m = model(l);
        for x in [0.3, 1.0, 2.5] {
            let e = 0.9;
            let g = |t: f64| {
                if t <= 0.0 {
                    return 0.0;
                }
                (-e * t).exp() * stable_density(x, t, &m).unwrap()
            };
            let tol = Tolerance::new(0.0, 1e-9);
            let v = integrate(g, 0.0, 1.0, tol, &b).unwrap().value
                + integrate_to_infinity(g, 1.0, tol, &b).unwrap().value;
            let want = resolvent(x, Energy::new(e).unwrap(), &m).unwrap();
            assert!(
                ((v - want) / want).abs() < 1e-5,
                "lambda {l}, x {x}: {v} vs {want}"
            );
        }
    }
}

#[test]
fn onepoint_mass_identity() {
    for l in [1.3, 1.5, 2.0] {
        let m = model(l);
        let en = Energy::new(1.7).unwrap();
        for (x, xa, xb) in [(0.4, -0.3, 1.1), (2.0, 0.0, 0.0), (0.1, 0.1, 0.5)] {
            let d = onepoint_density_e(x, xa, xb, en, &m).unwrap();
            let b = Budget::default();
            let cont =
                integrate_to_infinity(|lv| d.density(lv), 0.0, Tolerance::new(1e-15, 1e-12), &b)
                    .unwrap()
                    .value;
            let rab = resolvent(xb - xa, en, &m).unwrap();
            assert!((d.atom + cont - rab).abs() < 1e-10);
        }
    }
}

#[test]
fn chapman_kolmogorov() {
    let m = model(1.5);
    let b = Budget::default();
    let (xa, xb, t, s) = (0.0, 0.7, 1.0, 0.35);
    let f = |x: f64| {
        stable_density(xb - x, t - s, &m).unwrap() * stable_density(x - xa, s, &m).unwrap()
    };
    let tol = Tolerance::new(1e-13, 1e-10);
    let mid = integrate_with_breaks(f, &[-5.0, xa, xb, 5.0], tol, &b)
        .unwrap()
        .value;
    let right = integrate_to_infinity(f, 5.0, tol, &b).unwrap().value;
    let left = integrate_to_infinity(|y| f(-y), 5.0, tol, &b)
        .unwrap()
        .value;
    let want = stable_density(xb - xa, t, &m).unwrap();
    assert!(((mid + left + right - want) / want).abs() < 1e-6);
}

#[test]
fn mean_laplace_consistency() {
    // ∫₀^∞ e^{-Et} μ(x; t) P(x_b - x_a, t) dt = ⟨L(x)⟩_E = R(x_a, x) R(x, x_b)
    let b = Budget::default();
    for l in [1.5, 2.0] {
        let m = model(l);
        for (x, xa, xb) in [(0.5, 0.0, 1.0), (-0.4, 0.0, 0.3)] {
            let e = 1.2;
            let g = |t: f64| {
                if t <= 0.0 {
                    return 0.0;
                }
                // the bridge propagator underflows long before the product matters
                let p = stable_density(xb - xa, t, &m).unwrap();
                if p < 1e-250 {
                    return 0.0;
                }
                (-e * t).exp() * mean_fixed_quadrature(x, xa, xb, t, &m).unwrap() * p
            };
            let tol = Tolerance::new(0.0, 1e-8);
            let v = integrate(g, 0.0, 1.0, tol, &b).unwrap().value
                + integrate_to_infinity(g, 1.0, tol, &b).unwrap().value;
            let want = correlation_e(&[x], xa, xb, Energy::new(e).unwrap(), &m).unwrap();
            assert!(
                ((v - want) / want).abs() < 1e-5,
                "lambda {l}: {v} vs {want}"
            );
        }
    }
}

#[test]
fn second_correlation_matches_time_domain_at_one_point() {
    // Gaussian, all points at 0: ⟨L(0)²⟩_E = 2 R(0)³ = 2/(4E)^{3/2}, whose
    // inverse is 2 t^{1/2}/(8 Γ(3/2)); dividing by P(0,t) gives the fixed-endpoint second moment 1.
    let m = model(2.0);
    let en = Energy::new(1.0).unwrap();
    let c2 = correlation_e(&[0.0, 0.0], 0.0, 0.0, en, &m).unwrap();
    assert!((c2 - 2.0 * resolvent_diagonal(en, &m).unwrap().powi(3)).abs() < 1e-15);
    let inverse = 2.0 / 8.0 / gamma(1.5).unwrap();
    let p0 = recurrence_probability(1.0, &m).unwrap();
    assert!((inverse / p0 - 1.0).abs() < 1e-14);
}

#[test]
fn mean_fixed_generic_between_closed_forms() {
    // μ at a fixed configuration is continuous in λ: λ = 1.999 is close to the Gaussian value
    let g = mean_fixed(0.5, 0.0, 1.0, 1.0, &model(2.0)).unwrap();
    let near = mean_fixed(0.5, 0.0, 1.0, 1.0, &model(1.999)).unwrap();
    assert!(((near - g) / g).abs() < 5e-3, "{near} vs {g}");
    // and the resolvent agrees to the same order
    let en = Energy::new(1.0).unwrap();
    let a = resolvent(0.5, en, &model(2.0)).unwrap();
    let b = resolvent(0.5, en, &model(1.999)).unwrap();
    assert!(((a - b) / a).abs() < 5e-3);
}
