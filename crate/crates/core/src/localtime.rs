//! Local time `L(x) = ∫ δ(x - x(τ)) dτ` of a Lévy walk started at `x_a`.
//!
//! In the E-domain (Laplace conjugate to the elapsed time) correlation
//! functions and one-point distributions are algebraic in the resolvent.
//! In the time domain:
//!
//! * one-point distributions at the starting point, `W_λ` (endpoint fixed at
//!   `x_a`) and `W_λ*` (endpoint free), by Laplace inversion along the real axis,
//! * Gaussian one-point distributions anywhere, with their `δ(L)` atoms,
//! * first moments `μ` and `μ*` for every λ, and Gaussian second moments.
//!
//! `w_fixed`/`w_free` are normalized probability densities in `L`;
//! [`onepoint_density_e`] is the raw E-domain object whose total mass is
//! `R(x_a, x_b, -E)`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Error, Result};
use crate::quad::{self, Budget, Tolerance};
use crate::resolvent::{resolvent, resolvent_diagonal, Energy};
use crate::special::{erf, erfc, gamma_unchecked};
use crate::stable::{check_time, density_with_budget, WalkModel};

/// Largest point count accepted by [`correlation_e`] (the sum has n! terms).
pub const MAX_CORRELATION_POINTS: usize = 8;

/// Where the path ends: pinned at `x_b`, or integrated over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndpointSpec {
    Fixed(f64),
    Free,
}

/// A value of the local time, `L ≥ 0` (units time/length).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LocalTimeValue(f64);

impl LocalTimeValue {
    pub fn new(l: f64) -> Result<Self> {
        if !(l >= 0.0) || !l.is_finite() {
            return Err(domain("L", l, "local time must be non-negative"));
        }
        Ok(Self(l))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// `atom · δ(L) + amplitude · e^{-L/decay} θ(L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicDensity {
    pub atom: f64,
    pub amplitude: f64,
    pub decay: f64,
}

impl AtomicDensity {
    /// Continuous part at `L`; zero for `L < 0`.
    pub fn density(&self, l: f64) -> f64 {
        if l < 0.0 {
            return 0.0;
        }
        self.amplitude * (-l / self.decay).exp()
    }

    pub fn continuous_mass(&self) -> f64 {
        self.amplitude * self.decay
    }

    pub fn total_mass(&self) -> f64 {
        self.atom + self.continuous_mass()
    }
}

/// A one-point distribution evaluated at a single `L`: the weight of the
/// `δ(L)` atom and the continuous density there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicValue {
    pub atom: f64,
    pub density: f64,
}

/// `⟨L(x_1) ⋯ L(x_n)⟩_E = Σ_σ R(x_a, x_σ1) R(x_σ1, x_σ2) ⋯ R(x_σn, x_b)`.
pub fn correlation_e(
    points: &[f64],
    x_a: f64,
    x_b: f64,
    energy: Energy,
    model: &WalkModel,
) -> Result<f64> {
    let n = points.len();
    if n == 0 {
        return Err(Error::Config("correlation needs at least one point".into()));
    }
    if n > MAX_CORRELATION_POINTS {
        return Err(Error::TooManyPoints(n));
    }
    let r = |from: f64, to: f64| resolvent(to - from, energy, model);
    let start = points
        .iter()
        .map(|&p| r(x_a, p))
        .collect::<Result<Vec<_>>>()?;
    let end = points
        .iter()
        .map(|&p| r(p, x_b))
        .collect::<Result<Vec<_>>>()?;
    let mut link = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                link[i][j] = r(points[i], points[j])?;
            }
        }
    }
    let chain = |perm: &[usize]| {
        let inner: f64 = perm.windows(2).map(|w| link[w[0]][w[1]]).product();
        start[perm[0]] * inner * end[perm[n - 1]]
    };
    // Heap's algorithm
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut total = chain(&perm);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            total += chain(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(total)
}

/// E-domain one-point distribution of `L(x)`:
///
/// ```text
/// atom = R(x_a,x_b) - R(x_a,x) R(x,x_b) / R(x,x)
/// density(L) = R(x_a,x) R(x,x_b) / R(x,x)² · e^{-L/R(x,x)}
/// ```
pub fn onepoint_density_e(
    x: f64,
    x_a: f64,
    x_b: f64,
    energy: Energy,
    model: &WalkModel,
) -> Result<AtomicDensity> {
    if model.is_cauchy() {
        return Err(Error::Divergence(
            "Cauchy resolvent is singular on the diagonal",
        ));
    }
    let r0 = resolvent_diagonal(energy, model)?;
    let rab = resolvent(x_b - x_a, energy, model)?;
    let rax = resolvent(x - x_a, energy, model)?;
    let rxb = resolvent(x_b - x, energy, model)?;
    // at x = x_a or x_b the ratio is exactly R(x_a, x_b); keep the atom exactly zero
    let through = if x == x_a {
        rxb
    } else if x == x_b {
        rax
    } else {
        rax * rxb / r0
    };
    Ok(AtomicDensity {
        atom: (rab - through).max(0.0),
        amplitude: through / r0,
        decay: r0,
    })
}

fn check_distribution_model(model: &WalkModel) -> Result<()> {
    if model.is_cauchy() {
        return Err(domain(
            "lambda",
            model.lambda(),
            "local-time distribution is not normalizable at lambda = 1",
        ));
    }
    Ok(())
}

/// `σ_λ = λ D^{1/λ} sin(π/λ)`.
fn sigma(model: &WalkModel) -> f64 {
    let l = model.lambda();
    l * model.diffusion().powf(1.0 / l) * (PI / l).sin()
}

fn check_positive(param: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(domain(param, v, "must be positive"));
    }
    Ok(())
}

/// `W_λ(L; x_a)`: distribution of the local time at the starting point of
/// paths returning to it after time `t`.
pub fn w_fixed(l: LocalTimeValue, t: f64, model: &WalkModel) -> Result<f64> {
    w_fixed_with_budget(l, t, model, &Budget::default())
}

/// [`w_fixed`] with a caller-supplied evaluation budget.
pub fn w_fixed_with_budget(
    l: LocalTimeValue,
    t: f64,
    model: &WalkModel,
    budget: &Budget,
) -> Result<f64> {
    check_distribution_model(model)?;
    check_time(t)?;
    let lv = l.value();
    let d = model.diffusion();
    if model.is_gaussian() {
        return Ok(2.0 * d * lv / t * (-d * lv * lv / t).exp());
    }
    if lv == 0.0 {
        return Ok(0.0);
    }
    let lam = model.lambda();
    let beta = 1.0 - 1.0 / lam;
    let pref = lam * (d * t).powf(1.0 / lam) / gamma_unchecked(1.0 / lam);
    let v = sine_transform(lv, t, model, Endpoint::Fixed, budget)?;
    Ok(pref / beta * v)
}

/// `W_λ*(L; x_a)`: distribution of the local time at the starting point
/// with the endpoint integrated over.
pub fn w_free(l: LocalTimeValue, t: f64, model: &WalkModel) -> Result<f64> {
    w_free_with_budget(l, t, model, &Budget::default())
}

/// [`w_free`] with a caller-supplied evaluation budget.
pub fn w_free_with_budget(
    l: LocalTimeValue,
    t: f64,
    model: &WalkModel,
    budget: &Budget,
) -> Result<f64> {
    check_distribution_model(model)?;
    check_time(t)?;
    let lv = l.value();
    let d = model.diffusion();
    if model.is_gaussian() {
        return Ok((4.0 * d / (PI * t)).sqrt() * (-d * lv * lv / t).exp());
    }
    let lam = model.lambda();
    let beta = 1.0 - 1.0 / lam;
    let s = sigma(model);
    if lv == 0.0 {
        return Ok(s / PI * (PI / lam).sin() * gamma_unchecked(beta) * t.powf(-beta));
    }
    let v = sine_transform(lv, t, model, Endpoint::Free, budget)?;
    Ok(s / (PI * beta) * v)
}

#[derive(Clone, Copy, PartialEq)]
enum Endpoint {
    Fixed,
    Free,
}

/// `∫₀^∞ g(w) e^{aLw} sin(bLw + φ) dw` after the substitution `w = E^{1-1/λ}`,
/// with `a + ib = σ e^{iπ/λ}`. For the free endpoint `g = e^{-t w^{1/β}}`
/// (the `E^{-1/λ}` singularity is absorbed by the Jacobian) and `φ = π/λ`;
/// for the fixed endpoint `g = w^{1/β-1} e^{-t w^{1/β}}` and `φ = 0`.
///
/// The integral runs over the intervals between consecutive zeros of the
/// sine, which are equally spaced in `w`, with epsilon acceleration.
fn sine_transform(
    l: f64,
    t: f64,
    model: &WalkModel,
    kind: Endpoint,
    budget: &Budget,
) -> Result<f64> {
    let lam = model.lambda();
    let beta = 1.0 - 1.0 / lam;
    let inv = 1.0 / beta;
    let s = sigma(model);
    let (sn, cs) = (PI / lam).sin_cos();
    let (a, b) = (s * cs, s * sn);
    let phase = if kind == Endpoint::Free {
        PI / lam
    } else {
        0.0
    };
    let envelope = move |w: f64| {
        let e = w.powf(inv);
        let g = (-t * e).exp();
        match kind {
            Endpoint::Free => g,
            Endpoint::Fixed => g * e / w,
        }
    };
    let integrand = |w: f64| {
        if w <= 0.0 {
            return if kind == Endpoint::Free {
                phase.sin()
            } else {
                0.0
            };
        }
        envelope(w) * (a * l * w).exp() * (b * l * w + phase).sin()
    };
    let mut cutoff = (60.0 / t).powf(beta);
    if a < 0.0 {
        cutoff = cutoff.min(60.0 / (-a * l));
    }
    // the envelope switches off around t w^{1/β} = 1 over a relative width ~β
    let edge = t.powf(-beta);
    let landmarks: Vec<f64> = [-3.0, -1.0, 0.0, 1.0, 3.0]
        .iter()
        .map(|j| edge * (1.0 + j * beta))
        .filter(|&w| w > 0.0)
        .collect();
    let scale = match kind {
        Endpoint::Free => gamma_unchecked(1.0 + beta) * t.powf(-beta),
        Endpoint::Fixed => beta / t,
    };
    let spacing = PI / (b * l);
    let zero = |k: usize| (k as f64 * PI - phase) / (b * l);
    let piece_tol = Tolerance::new(1e-17 * scale, 1e-13);
    let v = quad::oscillatory_sum(
        |k| {
            let lo = if k == 0 { 0.0 } else { zero(k) };
            if lo >= cutoff {
                return Ok(None);
            }
            let hi = zero(k + 1).min(cutoff);
            let mut pts = vec![lo];
            pts.extend(landmarks.iter().copied().filter(|&w| w > lo && w < hi));
            pts.push(hi);
            Ok(Some(
                quad::integrate_with_breaks(integrand, &pts, piece_tol, budget)?.value,
            ))
        },
        Tolerance::new(1e-15 * scale, 1e-11),
        (cutoff / spacing) as usize + 10,
    )?;
    Ok(v.value)
}

/// Brownian one-point distribution of `L(x)` for paths from `x_a` to `x_b`:
/// density `ξ_L/t · exp[-(ξ_L² - (x_b-x_a)²)/(4Dt)]` with
/// `ξ_L = |x_a-x| + |x-x_b| + 2DL`, and atom
/// `1 - exp[-(ξ_0² - (x_b-x_a)²)/(4Dt)]`.
pub fn w_gauss_fixed(
    l: LocalTimeValue,
    x: f64,
    x_a: f64,
    x_b: f64,
    t: f64,
    diffusion: f64,
) -> Result<AtomicValue> {
    check_time(t)?;
    check_positive("diffusion", diffusion)?;
    let four_dt = 4.0 * diffusion * t;
    let shift = (x_b - x_a) * (x_b - x_a);
    // between the endpoints ξ₀ = |x_b - x_a| exactly, so the atom vanishes
    let xi0 = if (x_a.min(x_b)..=x_a.max(x_b)).contains(&x) {
        (x_b - x_a).abs()
    } else {
        (x_a - x).abs() + (x - x_b).abs()
    };
    let xi = xi0 + 2.0 * diffusion * l.value();
    Ok(AtomicValue {
        atom: -(-(xi0 * xi0 - shift) / four_dt).exp_m1(),
        density: xi / t * (-(xi * xi - shift) / four_dt).exp(),
    })
}

/// Brownian one-point distribution of `L(x)` with free endpoint: density
/// `√(4D/(πt)) exp[-(|x_a-x| + 2DL)²/(4Dt)]`, atom `erf(|x_a-x|/√(4Dt))`.
pub fn w_gauss_free(
    l: LocalTimeValue,
    x: f64,
    x_a: f64,
    t: f64,
    diffusion: f64,
) -> Result<AtomicValue> {
    check_time(t)?;
    check_positive("diffusion", diffusion)?;
    let four_dt = 4.0 * diffusion * t;
    let y = (x_a - x).abs();
    let u = y + 2.0 * diffusion * l.value();
    Ok(AtomicValue {
        atom: erf(y / four_dt.sqrt()),
        density: (4.0 * diffusion / (PI * t)).sqrt() * (-u * u / four_dt).exp(),
    })
}

/// `μ(x) = ⟨L(x)⟩` for paths from `x_a` to `x_b` in time `t`.
///
/// Closed forms at `λ ∈ {1, 2}`; otherwise [`mean_fixed_quadrature`].
pub fn mean_fixed(x: f64, x_a: f64, x_b: f64, t: f64, model: &WalkModel) -> Result<f64> {
    check_time(t)?;
    let d = model.diffusion();
    if model.is_gaussian() {
        let four_dt = 4.0 * d * t;
        let xi = (x_a - x).abs() + (x - x_b).abs();
        let s = x_b - x_a;
        return Ok((PI * t / (4.0 * d)).sqrt()
            * (s * s / four_dt).exp()
            * erfc(xi / four_dt.sqrt()));
    }
    if model.is_cauchy() {
        let a = x - x_a;
        let b = x_b - x;
        if a == 0.0 || b == 0.0 {
            return Err(Error::Divergence(
                "Cauchy mean local time diverges at the endpoints",
            ));
        }
        let s = d * t;
        let (s2, a2, b2) = (s * s, a * a, b * b);
        let pre = -1.0 / (2.0 * PI * d * d * t * (s2 + (b - a) * (b - a)));
        let body = 2.0 * a * (s2 + a2 - b2) * (s / a).atan()
            + 2.0 * b * (s2 + b2 - a2) * (s / b).atan()
            + s * (s2 + a2 + b2) * (a2 * b2 / ((s2 + a2) * (s2 + b2))).ln();
        return Ok(pre * body);
    }
    mean_fixed_quadrature(x, x_a, x_b, t, model)
}

/// Exponent of the power substitution `t₁ = c s^m` that flattens the
/// `t₁^{-1/λ}` endpoint behaviour of `P(0, t₁)`.
fn flattening_exponent(model: &WalkModel) -> f64 {
    let l = model.lambda();
    if model.is_cauchy() {
        2.0
    } else {
        l / (l - 1.0)
    }
}

/// `μ(x) = ∫₀^t P(x_b-x, t-t₁) P(x-x_a, t₁) dt₁ / P(x_b-x_a, t)`, valid for
/// every λ. The interval is split at `t/2` and each half mapped by
/// `t₁ = (t/2) s^m`, `m = λ/(λ-1)`, from its endpoint.
pub fn mean_fixed_quadrature(x: f64, x_a: f64, x_b: f64, t: f64, model: &WalkModel) -> Result<f64> {
    check_time(t)?;
    if model.is_cauchy() && (x == x_a || x == x_b) {
        return Err(Error::Divergence(
            "Cauchy mean local time diverges at the endpoints",
        ));
    }
    let budget = Budget::default();
    let m = flattening_exponent(model);
    let half = 0.5 * t;
    let mut failure = None;
    let mut pair = |t1: f64| -> f64 {
        let v = density_with_budget(x_b - x, t - t1, model, &budget)
            .and_then(|p| Ok(p * density_with_budget(x - x_a, t1, model, &budget)?));
        match v {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let tol = Tolerance::new(0.0, 1e-11);
    let near_start = quad::integrate(
        |s| {
            let j = half * m * s.powf(m - 1.0);
            if j == 0.0 {
                return 0.0;
            }
            pair(half * s.powf(m)) * j
        },
        0.0,
        1.0,
        tol,
        &budget,
    )?
    .value;
    let near_end = quad::integrate(
        |s| {
            let j = half * m * s.powf(m - 1.0);
            if j == 0.0 {
                return 0.0;
            }
            pair(t - half * s.powf(m)) * j
        },
        0.0,
        1.0,
        tol,
        &budget,
    )?
    .value;
    if let Some(e) = failure {
        return Err(e);
    }
    let norm = density_with_budget(x_b - x_a, t, model, &budget)?;
    Ok((near_start + near_end) / norm)
}

/// `μ*(x) = ⟨L(x)⟩*`, endpoint free.
///
/// Closed forms at `λ ∈ {1, 2}`; otherwise [`mean_free_quadrature`].
pub fn mean_free(x: f64, x_a: f64, t: f64, model: &WalkModel) -> Result<f64> {
    check_time(t)?;
    let d = model.diffusion();
    let y = (x - x_a).abs();
    if model.is_gaussian() {
        let four_dt = 4.0 * d * t;
        return Ok((t / (PI * d)).sqrt() * (-y * y / four_dt).exp()
            - y / (2.0 * d) * erfc(y / four_dt.sqrt()));
    }
    if model.is_cauchy() {
        if y == 0.0 {
            return Err(Error::Divergence(
                "Cauchy mean local time diverges at the starting point",
            ));
        }
        let r = d * t / y;
        return Ok((r * r).ln_1p() / (2.0 * PI * d));
    }
    mean_free_quadrature(x, x_a, t, model)
}

/// `μ*(x) = ∫₀^t P(x-x_a, t₁) dt₁` with `t₁ = t s^m`.
pub fn mean_free_quadrature(x: f64, x_a: f64, t: f64, model: &WalkModel) -> Result<f64> {
    check_time(t)?;
    if model.is_cauchy() && x == x_a {
        return Err(Error::Divergence(
            "Cauchy mean local time diverges at the starting point",
        ));
    }
    let budget = Budget::default();
    let m = flattening_exponent(model);
    let mut failure = None;
    let v = quad::integrate(
        |s| {
            let j = t * m * s.powf(m - 1.0);
            if j == 0.0 {
                return 0.0;
            }
            match density_with_budget(x - x_a, t * s.powf(m), model, &budget) {
                Ok(p) => p * j,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        1.0,
        Tolerance::new(0.0, 1e-11),
        &budget,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(v.value)
}

/// Momentum-space route `μ*(x) = (1/π) ∫₀^∞ (1 - e^{-tDp^λ}) / (Dp^λ) cos(p (x-x_a)) dp`,
/// kept as an independent check of [`mean_free`]. Needs `λ > 1` at `x = x_a`.
pub fn mean_free_momentum(x: f64, x_a: f64, t: f64, model: &WalkModel) -> Result<f64> {
    check_time(t)?;
    let l = model.lambda();
    let scale = model.length_scale(t);
    let y = (x - x_a).abs() / scale;
    let budget = Budget::default();
    // in units q = p (Dt)^{1/λ}
    let g = move |q: f64| {
        let ql = q.powf(l);
        if ql < 1e-300 {
            1.0
        } else {
            -(-ql).exp_m1() / ql
        }
    };
    let integral = if y == 0.0 {
        if model.is_cauchy() {
            return Err(Error::Divergence(
                "Cauchy mean local time diverges at the starting point",
            ));
        }
        quad::integrate(g, 0.0, 1.0, Tolerance::relative(1e-12), &budget)?.value
            + quad::integrate_to_infinity(g, 1.0, Tolerance::relative(1e-12), &budget)?.value
    } else {
        let first_zero = FRAC_PI_2 / y;
        let half_period = PI / y;
        quad::oscillatory_sum(
            |k| {
                let a = if k == 0 {
                    0.0
                } else {
                    first_zero + (k - 1) as f64 * half_period
                };
                let b = first_zero + k as f64 * half_period;
                let v = quad::integrate(
                    |q| g(q) * (q * y).cos(),
                    a,
                    b,
                    Tolerance::relative(1e-14),
                    &budget,
                )?;
                Ok(Some(v.value))
            },
            Tolerance::relative(1e-11),
            5_000,
        )?
        .value
    };
    Ok(t / (PI * scale) * integral)
}

/// Brownian second moment `⟨L(x₁) L(x₂)⟩` (fixed endpoint) or `⟨L(x₁) L(x₂)⟩*`.
///
/// With `ξ₁₂ = |x_a-x₁| + |x₁-x₂| + |x₂-x_b|` (fixed) or `|x_a-x₁| + |x₁-x₂|`
/// (free) and its `1 ↔ 2` swap, each ordering contributes
///
/// ```text
/// fixed: t/(2D) [e^{-(ξ² - (x_b-x_a)²)/(4Dt)} - √π ξ/√(4Dt) erfc(ξ/√(4Dt)) e^{(x_b-x_a)²/(4Dt)}]
/// free:  1/(4D) [-√t ξ/√(πD) e^{-ξ²/(4Dt)} + (ξ²/(2D) + t) erfc(ξ/√(4Dt))]
/// ```
pub fn second_moment_gauss(
    x1: f64,
    x2: f64,
    x_a: f64,
    endpoint: EndpointSpec,
    t: f64,
    diffusion: f64,
) -> Result<f64> {
    check_time(t)?;
    check_positive("diffusion", diffusion)?;
    let d = diffusion;
    let four_dt = 4.0 * d * t;
    let root = four_dt.sqrt();
    let gap = (x1 - x2).abs();
    match endpoint {
        EndpointSpec::Fixed(x_b) => {
            let shift = (x_b - x_a) * (x_b - x_a);
            let term = |xi: f64| {
                t / (2.0 * d)
                    * ((-(xi * xi - shift) / four_dt).exp()
                        - PI.sqrt() * xi / root * erfc(xi / root) * (shift / four_dt).exp())
            };
            let x12 = (x_a - x1).abs() + gap + (x2 - x_b).abs();
            let x21 = (x_a - x2).abs() + gap + (x1 - x_b).abs();
            Ok(term(x12) + term(x21))
        }
        EndpointSpec::Free => {
            let term = |xi: f64| {
                (-(t.sqrt()) * xi / (PI * d).sqrt() * (-xi * xi / four_dt).exp()
                    + (xi * xi / (2.0 * d) + t) * erfc(xi / root))
                    / (4.0 * d)
            };
            Ok(term((x_a - x1).abs() + gap) + term((x_a - x2).abs() + gap))
        }
    }
}
