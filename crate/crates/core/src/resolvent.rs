//! Resolvent kernel `R_λ(x, -E) = ⟨x'|(Ĥ + E)^{-1}|x⟩` of the Lévy Hamiltonian
//! (the Linnik density up to the factor `E`), and its δ-peak perturbations.
//!
//! Three independent routes are provided:
//!
//! * closed forms at `λ = 2` (exponential) and `λ = 1` (sine/cosine integrals),
//! * the momentum-space cosine transform `(1/π) ∫₀^∞ cos(px) / (D p^λ + E) dp`
//!   ([`resolvent_momentum`]), summed over half periods with epsilon acceleration,
//! * the rotated representation `-(1/π) Im ∫₀^∞ e^{-v|x|} / (E + D v^λ e^{iπλ/2}) dv`
//!   ([`resolvent_imag_axis`]), which is smooth and non-oscillatory.
//!
//! [`resolvent`] picks the closed forms when available and the rotated integral
//! otherwise, with the diagonal `x = 0` given by [`resolvent_diagonal`].

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Error, Result};
use crate::quad::{self, Budget, Tolerance};
use crate::special::sici;
use crate::stable::{sum_asymptotic, WalkModel};

/// The (positive) energy `E` at which the resolvent is evaluated on `-E`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Energy(f64);

impl Energy {
    pub fn new(e: f64) -> Result<Self> {
        if !(e > 0.0) || !e.is_finite() {
            return Err(domain("energy", e, "energy must be positive"));
        }
        Ok(Self(e))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// `(E/D)^{1/λ}`, the inverse of the resolvent length scale.
fn wavenumber_scale(e: f64, model: &WalkModel) -> f64 {
    (e / model.diffusion()).powf(1.0 / model.lambda())
}

/// `R_λ(x, -E)`.
///
/// Errors with [`Error::Divergence`] for the Cauchy walk on the diagonal.
pub fn resolvent(x: f64, energy: Energy, model: &WalkModel) -> Result<f64> {
    let e = energy.0;
    let d = model.diffusion();
    if model.is_gaussian() {
        return Ok((-(e / d).sqrt() * x.abs()).exp() / (4.0 * d * e).sqrt());
    }
    if model.is_cauchy() {
        if x == 0.0 {
            return Err(Error::Divergence(
                "Cauchy resolvent is singular on the diagonal",
            ));
        }
        let z = e * x.abs() / d;
        let (s, c) = sici(z)?;
        return Ok(-(z.sin() * s + z.cos() * c) / (PI * d));
    }
    if x == 0.0 {
        return resolvent_diagonal(energy, model);
    }
    rotated_integral(x, e, model, &Budget::default())
}

/// `R_λ(0, -E) = E^{1/λ - 1} / (λ D^{1/λ} sin(π/λ))` for `λ > 1`.
pub fn resolvent_diagonal(energy: Energy, model: &WalkModel) -> Result<f64> {
    let l = model.lambda();
    if model.is_cauchy() {
        return Err(Error::Divergence(
            "Cauchy resolvent is singular on the diagonal",
        ));
    }
    let e = energy.0;
    Ok(e.powf(1.0 / l - 1.0) / (l * model.diffusion().powf(1.0 / l) * (PI / l).sin()))
}

/// Rotated-contour representation, valid for `x ≠ 0` and every `λ ∈ [1, 2]`.
///
/// At `λ = 2` the integrand collapses onto a δ-function at `v = √(E/D)` and
/// the residue is returned directly.
pub fn resolvent_imag_axis(x: f64, energy: Energy, model: &WalkModel) -> Result<f64> {
    if x == 0.0 {
        return Err(domain("x", x, "rotated representation needs x != 0"));
    }
    let e = energy.0;
    if model.is_gaussian() {
        let d = model.diffusion();
        let v0 = (e / d).sqrt();
        return Ok((-v0 * x.abs()).exp() / (2.0 * d * v0));
    }
    rotated_integral(x, e, model, &Budget::default())
}

/// `(κ/(πE)) ∫₀^∞ e^{-w x̄} s w^λ / (1 + 2c w^λ + w^{2λ}) dw` with
/// `c + i s = e^{iπλ/2}`, `κ = (E/D)^{1/λ}` and `x̄ = κ|x|`.
fn rotated_integral(x: f64, e: f64, model: &WalkModel, budget: &Budget) -> Result<f64> {
    let l = model.lambda();
    let kappa = wavenumber_scale(e, model);
    let xb = kappa * x.abs();
    let (s, c) = (FRAC_PI_2 * l).sin_cos();
    let integrand = |w: f64| {
        let wl = w.powf(l);
        (-w * xb).exp() * s * wl / (1.0 + 2.0 * c * wl + wl * wl)
    };
    let cutoff = 40.0 / xb;
    let mut breaks = vec![0.0];
    // near-resonance at w^λ = -c, sharp when λ → 2
    let mut anchor = 1.0;
    if c < 0.0 {
        let w0 = (-c).powf(1.0 / l);
        let delta = (5.0 * s / l).min(0.5) * w0;
        for p in [w0 - delta, w0, w0 + delta] {
            breaks.push(p);
        }
        anchor = 2.0 * w0;
    }
    let mut w = anchor.max(breaks[breaks.len() - 1] * 1.5);
    while w < cutoff {
        breaks.push(w);
        w *= 8.0;
    }
    breaks.retain(|&p| p < cutoff);
    breaks.push(cutoff);
    let v = quad::integrate_with_breaks(integrand, &breaks, Tolerance::new(0.0, 1e-12), budget)?;
    Ok(kappa / (PI * e) * v.value)
}

/// Direct momentum-space cosine transform `(1/π) ∫₀^∞ cos(px)/(D p^λ + E) dp`.
///
/// Kept as an independent verification route; at `x = 0` it converges only
/// for `λ > 1`.
pub fn resolvent_momentum(x: f64, energy: Energy, model: &WalkModel) -> Result<f64> {
    let e = energy.0;
    let l = model.lambda();
    let kappa = wavenumber_scale(e, model);
    let xb = kappa * x.abs();
    let budget = Budget::default();
    let g = move |q: f64| 1.0 / (1.0 + q.powf(l));
    let integral = if xb == 0.0 {
        if model.is_cauchy() {
            return Err(Error::Divergence(
                "Cauchy resolvent is singular on the diagonal",
            ));
        }
        quad::integrate(g, 0.0, 1.0, Tolerance::relative(1e-12), &budget)?.value
            + quad::integrate_to_infinity(g, 1.0, Tolerance::relative(1e-12), &budget)?.value
    } else {
        let first_zero = FRAC_PI_2 / xb;
        let half_period = PI / xb;
        quad::oscillatory_sum(
            |k| {
                let a = if k == 0 {
                    0.0
                } else {
                    first_zero + (k - 1) as f64 * half_period
                };
                let b = first_zero + k as f64 * half_period;
                let v = quad::integrate(
                    |q| g(q) * (q * xb).cos(),
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
    Ok(kappa / (PI * e) * integral)
}

/// Large-`|x|` expansion `R ~ (κ/E) Σ_k c_k k! x̄^{-kλ-1}` obtained by
/// Laplace-transforming the tail series of the stable density; summed to
/// its smallest term.
pub fn resolvent_asymptotic(x: f64, energy: Energy, model: &WalkModel) -> Result<f64> {
    if x == 0.0 {
        return Err(domain("x", x, "tail expansion needs x != 0"));
    }
    let e = energy.0;
    let l = model.lambda();
    let kappa = wavenumber_scale(e, model);
    let ln_x = (kappa * x.abs()).ln();
    let g = sum_asymptotic(l, |k, log_mag| {
        let kf = k as f64;
        log_mag + crate::special::ln_gamma_unchecked(kf + 1.0) - (kf * l + 1.0) * ln_x
    });
    Ok(kappa / e * g)
}

/// δ-peak potential `U(x) = Σ_j u_j δ(x - x_j)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PeakPotential {
    peaks: Vec<(f64, f64)>,
}

impl PeakPotential {
    /// Peaks as `(position, strength)`; positions must be pairwise distinct.
    pub fn new(peaks: Vec<(f64, f64)>) -> Result<Self> {
        for (i, a) in peaks.iter().enumerate() {
            if !a.0.is_finite() || !a.1.is_finite() {
                return Err(domain(
                    "peak",
                    a.0,
                    "peak positions and strengths must be finite",
                ));
            }
            if peaks[..i].iter().any(|b| b.0 == a.0) {
                return Err(domain(
                    "peak position",
                    a.0,
                    "peak positions must be distinct",
                ));
            }
        }
        Ok(Self { peaks })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn peaks(&self) -> &[(f64, f64)] {
        &self.peaks
    }

    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }
}

/// Resolvent of `Ĥ + U` between `x_a` and `x_b`:
///
/// ```text
/// R_U(x_a, x_b) = R(x_a, x_b) - Σ_{j,k} u_j R(x_a, x_j) (M⁻¹)_{jk} R(x_k, x_b),
/// M_{jk} = δ_{jk} + u_k R(x_j, x_k).
/// ```
///
/// `R(x, x') = R(x' - x)`. The diagonal resolvent enters `M`, so `λ > 1` is
/// required whenever peaks are present.
pub fn perturbed_resolvent(
    x_a: f64,
    x_b: f64,
    energy: Energy,
    potential: &PeakPotential,
    model: &WalkModel,
) -> Result<f64> {
    let free = resolvent(x_b - x_a, energy, model)?;
    let peaks = potential.peaks();
    if peaks.is_empty() {
        return Ok(free);
    }
    let n = peaks.len();
    let r = |from: f64, to: f64| resolvent(to - from, energy, model);
    let mut m = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in 0..n {
            let rjk = r(peaks[j].0, peaks[k].0)?;
            m[j][k] = if j == k { 1.0 } else { 0.0 } + peaks[k].1 * rjk;
        }
    }
    let mut rhs = Vec::with_capacity(n);
    let mut left = Vec::with_capacity(n);
    for &(xj, uj) in peaks {
        rhs.push(r(xj, x_b)?);
        left.push(uj * r(x_a, xj)?);
    }
    // y_j = R_U(x_j, x_b) = Σ_k (M⁻¹)_{jk} R(x_k, x_b)
    let y = solve_dense(m, rhs)?;
    Ok(free - left.iter().zip(&y).map(|(l, y)| l * y).sum::<f64>())
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    let norm = a
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    for col in 0..n {
        let (piv, pmax) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty");
        if pmax <= 1e-13 * norm {
            return Err(Error::SingularMatrix {
                column: col,
                pivot: pmax,
            });
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(l: f64) -> WalkModel {
        WalkModel::new(l, 1.0).unwrap()
    }

    fn e(v: f64) -> Energy {
        Energy::new(v).unwrap()
    }

    #[test]
    fn examples() {
        assert!((resolvent(0.0, e(1.0), &m(2.0)).unwrap() - 0.5).abs() < 1e-15);
        let r = resolvent(2.0, e(1.0), &m(2.0)).unwrap();
        assert!((r - (-2.0f64).exp() / 2.0).abs() < 1e-15);
        let r = resolvent(0.0, e(1.0), &m(1.5)).unwrap();
        assert!((r - 0.769_799_9).abs() < 1e-6);
        assert!((r - 0.769_800_358_919_50).abs() < 1e-13);
        assert!(matches!(
            resolvent(0.0, e(1.0), &m(1.0)),
            Err(Error::Divergence(_))
        ));
        assert!(Energy::new(0.0).is_err());
    }

    #[test]
    fn diagonal_examples() {
        let d = resolvent_diagonal(e(1.0), &m(1.1)).unwrap();
        assert!((d - 1.0 / (1.1 * (PI / 1.1).sin())).abs() < 1e-14);
        assert!((d - 3.226_789_6).abs() < 5e-6);
        assert!((d - 3.226_786_848_076_56).abs() < 1e-12);
        let g = WalkModel::new(2.0, 0.7).unwrap();
        assert!(
            (resolvent_diagonal(e(1.3), &g).unwrap() - 1.0 / (2.0 * (0.7f64 * 1.3).sqrt())).abs()
                < 1e-14
        );
        let seq: Vec<f64> = [2.0, 1.5, 1.1]
            .iter()
            .map(|&l| resolvent_diagonal(e(1.0), &m(l)).unwrap())
            .collect();
        assert!(seq[0] < seq[1] && seq[1] < seq[2]);
        assert!(resolvent_diagonal(e(1.0), &m(1.0)).is_err());
    }

    #[test]
    fn imag_axis_examples() {
        let r = resolvent_imag_axis(1.0, e(1.0), &m(2.0)).unwrap();
        assert!((r - (-1.0f64).exp() / 2.0).abs() < 1e-15);
        let a = resolvent_imag_axis(1.0, e(1.0), &m(1.5)).unwrap();
        let b = resolvent_momentum(1.0, e(1.0), &m(1.5)).unwrap();
        assert!(((a - b) / a).abs() < 1e-7, "{a} vs {b}");
        assert!(resolvent_imag_axis(50.0, e(1.0), &m(1.5)).unwrap() < 1e-4);
        assert!(resolvent_imag_axis(0.0, e(1.0), &m(1.5)).is_err());
    }

    #[test]
    fn cauchy_routes_agree() {
        for &x in &[0.25, 1.0, 4.0] {
            for &en in &[0.5, 2.0] {
                let c = resolvent(x, e(en), &m(1.0)).unwrap();
                let i = resolvent_imag_axis(x, e(en), &m(1.0)).unwrap();
                let p = resolvent_momentum(x, e(en), &m(1.0)).unwrap();
                assert!(((c - i) / c).abs() < 1e-8, "x {x} E {en}: {c} {i}");
                assert!(((c - p) / c).abs() < 1e-8, "x {x} E {en}: {c} {p}");
            }
        }
    }

    #[test]
    fn near_gaussian_peak_is_resolved() {
        let l = 1.98;
        for &x in &[0.3, 2.0] {
            let i = resolvent_imag_axis(x, e(1.0), &m(l)).unwrap();
            let p = resolvent_momentum(x, e(1.0), &m(l)).unwrap();
            assert!(((i - p) / p).abs() < 1e-7, "x {x}: {i} vs {p}");
        }
    }

    #[test]
    fn momentum_diagonal_matches_closed_form() {
        for &l in &[1.25, 1.5, 1.9] {
            let a = resolvent_momentum(0.0, e(0.7), &m(l)).unwrap();
            let b = resolvent_diagonal(e(0.7), &m(l)).unwrap();
            assert!(((a - b) / b).abs() < 1e-9);
        }
    }

    #[test]
    fn tail_expansion_matches_far_field() {
        for &l in &[1.25, 1.5, 1.75] {
            let a = resolvent_imag_axis(80.0, e(1.0), &m(l)).unwrap();
            let b = resolvent_asymptotic(80.0, e(1.0), &m(l)).unwrap();
            assert!(((a - b) / a).abs() < 1e-8, "lambda {l}: {a} vs {b}");
        }
    }

    #[test]
    fn scaling_collapse() {
        let l = 1.4;
        let m1 = WalkModel::new(l, 1.0).unwrap();
        let m2 = WalkModel::new(l, 2.5).unwrap();
        let (e1, e2) = (1.0f64, 0.3f64);
        for &xb in &[0.2, 1.0, 3.0] {
            let s1 = (1.0 / e1).powf(1.0 / l);
            let s2 = (2.5f64 / e2).powf(1.0 / l);
            let r1 = s1 * e1 * resolvent(xb * s1, e(e1), &m1).unwrap();
            let r2 = s2 * e2 * resolvent(xb * s2, e(e2), &m2).unwrap();
            assert!(((r1 - r2) / r1).abs() < 1e-9);
        }
    }

    #[test]
    fn single_peak_closed_form() {
        let p = PeakPotential::new(vec![(0.0, 1.0)]).unwrap();
        let v = perturbed_resolvent(0.0, 0.0, e(1.0), &p, &m(2.0)).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        let model = m(1.5);
        let (xa, xb, xp, u) = (-0.4, 0.9, 0.3, 0.8);
        let p = PeakPotential::new(vec![(xp, u)]).unwrap();
        let v = perturbed_resolvent(xa, xb, e(1.2), &p, &model).unwrap();
        let r = |x: f64| resolvent(x, e(1.2), &model).unwrap();
        let want = r(xb - xa) - u * r(xp - xa) * r(xb - xp) / (1.0 + u * r(0.0));
        assert!((v - want).abs() < 1e-14);
    }

    #[test]
    fn empty_and_zero_peaks_are_free() {
        let model = m(1.5);
        let free = resolvent(1.3, e(0.8), &model).unwrap();
        let v = perturbed_resolvent(0.2, 1.5, e(0.8), &PeakPotential::empty(), &model).unwrap();
        assert_eq!(v, free);
        let zeros = PeakPotential::new(vec![(0.0, 0.0), (0.7, 0.0), (-1.0, 0.0)]).unwrap();
        let v = perturbed_resolvent(0.2, 1.5, e(0.8), &zeros, &model).unwrap();
        assert_eq!(v, free);
    }

    #[test]
    fn two_peaks_match_cramer() {
        let model = m(1.5);
        let en = e(1.0);
        let peaks = [(0.0, 0.7), (1.0, -0.3)];
        let p = PeakPotential::new(peaks.to_vec()).unwrap();
        let (xa, xb) = (-0.5, 0.8);
        let got = perturbed_resolvent(xa, xb, en, &p, &model).unwrap();
        // R_U(x_j, x_b) from the 2x2 system by Cramer's rule
        let r = |a: f64, b: f64| resolvent(b - a, en, &model).unwrap();
        let (x1, u1) = peaks[0];
        let (x2, u2) = peaks[1];
        let a11 = 1.0 + u1 * r(x1, x1);
        let a12 = u2 * r(x1, x2);
        let a21 = u1 * r(x2, x1);
        let a22 = 1.0 + u2 * r(x2, x2);
        let (b1, b2) = (r(x1, xb), r(x2, xb));
        let det = a11 * a22 - a12 * a21;
        let y1 = (b1 * a22 - a12 * b2) / det;
        let y2 = (a11 * b2 - a21 * b1) / det;
        let want = r(xa, xb) - u1 * r(xa, x1) * y1 - u2 * r(xa, x2) * y2;
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn singular_peak_matrix() {
        // 1 + u R(0) = 0 puts E on a pole
        let model = m(2.0);
        let p = PeakPotential::new(vec![(0.0, -2.0)]).unwrap();
        let r = perturbed_resolvent(0.0, 1.0, e(1.0), &p, &model);
        assert!(matches!(r, Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn peaks_must_be_distinct() {
        assert!(PeakPotential::new(vec![(1.0, 0.1), (1.0, 0.2)]).is_err());
    }
}
