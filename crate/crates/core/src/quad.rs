//! Numerical integration machinery shared by the analytic modules.
//!
//! * adaptive 21-point Gauss–Kronrod on finite intervals (with optional breakpoints),
//! * semi-infinite intervals through the map `x = a + (1 - s)/s`,
//! * oscillatory integrals summed interval by interval between consecutive zeros
//!   of the oscillating factor, with Wynn's epsilon algorithm applied to the
//!   partial sums.
//!
//! Every routine draws from a shared [`Budget`] so that nested quadratures
//! (a density inside a moment inside a sum rule) can be capped as a whole.

use std::cell::Cell;

use crate::error::{Error, Result};

/// Absolute and relative tolerance; the target is `max(abs, rel * |I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub const fn relative(rel: f64) -> Self {
        Self { abs: 0.0, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Integral estimate with its error bound and the number of integrand calls spent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Evaluation budget shared by nested quadratures.
///
/// Interior mutability keeps the call sites free of `&mut` threading; a budget
/// belongs to a single computation and is not shared across threads.
#[derive(Debug)]
pub struct Budget {
    limit: usize,
    used: Cell<usize>,
}

impl Budget {
    /// Default cap for one top-level evaluation.
    pub const DEFAULT_LIMIT: usize = 200_000_000;

    pub fn new(limit: usize) -> Self {
        Self {
            limit,
            used: Cell::new(0),
        }
    }

    pub fn used(&self) -> usize {
        self.used.get()
    }

    pub fn remaining(&self) -> usize {
        self.limit.saturating_sub(self.used.get())
    }

    fn charge(&self, n: usize) -> Result<()> {
        let used = self.used.get() + n;
        self.used.set(used);
        if used > self.limit {
            Err(Error::BudgetExhausted { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::new(Self::DEFAULT_LIMIT)
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_041_749,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7, 9.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

fn gauss_kronrod_21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut abs_k = WGK[10] * fc.abs();
    let mut gauss = 0.0;
    let mut fv = [0.0f64; 21];
    fv[10] = fc;
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[20 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv[j] - mean).abs() + (fv[20 - j] - mean).abs());
    }
    let value = kronrod * half;
    let abs_value = abs_k * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_value > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_value);
    }
    Segment {
        a,
        b,
        value,
        error,
        abs_value,
    }
}

/// Adaptive Gauss–Kronrod over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    budget: &Budget,
) -> Result<Estimate> {
    integrate_with_breaks(f, &[a, b], tol, budget)
}

/// Adaptive Gauss–Kronrod over the union of `[p_i, p_{i+1}]`; interior points
/// mark known kinks or peaks of the integrand.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    tol: Tolerance,
    budget: &Budget,
) -> Result<Estimate> {
    assert!(points.len() >= 2, "need at least two breakpoints");
    let mut segments: Vec<Segment> = Vec::with_capacity(64);
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        budget.charge(21)?;
        evaluations += 21;
        segments.push(gauss_kronrod_21(&mut f, w[0], w[1]));
    }
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let abs_total: f64 = segments.iter().map(|s| s.abs_value).sum();
        let floor = 100.0 * f64::EPSILON * abs_total;
        if error <= tol.target(value).max(floor) || segments.is_empty() {
            return Ok(Estimate {
                value,
                error,
                evaluations,
            });
        }
        let (idx, worst) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, s)| (i, *s))
            .expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || segments.len() > 20_000 {
            // interval can no longer be split in floating point
            return Ok(Estimate {
                value,
                error,
                evaluations,
            });
        }
        if budget.charge(42).is_err() {
            return Err(Error::NoConvergence {
                estimate: value,
                error,
                evaluations,
            });
        }
        evaluations += 42;
        segments[idx] = gauss_kronrod_21(&mut f, worst.a, mid);
        segments.push(gauss_kronrod_21(&mut f, mid, worst.b));
    }
}

/// `∫_a^∞ f(x) dx` through `x = a + (1 - s)/s`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    tol: Tolerance,
    budget: &Budget,
) -> Result<Estimate> {
    let g = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let x = a + (1.0 - s) / s;
        let v = f(x) / (s * s);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, tol, budget)
}

/// Sum of interval integrals `Σ_k I_k`, accelerated with the epsilon algorithm.
///
/// `piece(k)` returns the integral over the k-th interval between consecutive
/// zeros of the oscillatory factor, or `None` once the interval starts beyond
/// the envelope cutoff (the plain partial sum is then final). Otherwise the
/// loop ends when the extrapolated sum is stable to the tolerance.
pub(crate) fn oscillatory_sum<P>(mut piece: P, tol: Tolerance, max_terms: usize) -> Result<Estimate>
where
    P: FnMut(usize) -> Result<Option<f64>>,
{
    let mut sums: Vec<f64> = Vec::with_capacity(64);
    let mut partial = 0.0;
    let mut history: Vec<f64> = Vec::with_capacity(64);
    let mut best_err = f64::INFINITY;
    let mut best = 0.0;
    for k in 0..max_terms {
        let term = match piece(k)? {
            Some(t) => t,
            None => {
                // envelope exhausted: the plain partial sum is exact to the cutoff
                return Ok(Estimate {
                    value: partial,
                    error: 0.0,
                    evaluations: k,
                });
            }
        };
        partial += term;
        sums.push(partial);
        let est = wynn_epsilon(&sums);
        history.push(est);
        let n = history.len();
        if n >= 3 {
            let err = (est - history[n - 2]).abs() + (est - history[n - 3]).abs();
            if err < best_err {
                best_err = err;
                best = est;
            }
            if n >= 6 && err <= tol.target(est) {
                return Ok(Estimate {
                    value: est,
                    error: err,
                    evaluations: k + 1,
                });
            }
        }
    }
    if best_err <= 100.0 * tol.target(best) {
        Ok(Estimate {
            value: best,
            error: best_err,
            evaluations: max_terms,
        })
    } else {
        Err(Error::NoConvergence {
            estimate: best,
            error: best_err,
            evaluations: max_terms,
        })
    }
}

/// Highest even-order epsilon-table entry built from (at most) the last 25 partial sums.
pub(crate) fn wynn_epsilon(sums: &[f64]) -> f64 {
    const WINDOW: usize = 25;
    let start = sums.len().saturating_sub(WINDOW);
    let s = &sums[start..];
    let n = s.len();
    if n < 3 {
        return s[n - 1];
    }
    // prev = column k-1, cur = column k
    let mut prev = vec![0.0f64; n + 1];
    let mut cur: Vec<f64> = s.to_vec();
    let mut best = s[n - 1];
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let diff = cur[j + 1] - cur[j];
            if diff == 0.0 || !diff.is_finite() {
                // converged column: the entry itself is the limit
                return if k % 2 == 0 { cur[j + 1] } else { best };
            }
            next.push(prev[j + 1] + 1.0 / diff);
        }
        k += 1;
        if k % 2 == 0 {
            let candidate = *next.last().expect("non-empty");
            if !candidate.is_finite() {
                return best;
            }
            best = candidate;
        }
        prev = cur;
        cur = next;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let b = Budget::default();
        let v = integrate(
            |x| x * x * x - 2.0 * x,
            0.0,
            2.0,
            Tolerance::relative(1e-14),
            &b,
        )
        .unwrap();
        assert!((v.value - 0.0).abs() < 1e-13);
        let v = integrate(|x| x.powi(6), -1.0, 1.0, Tolerance::relative(1e-14), &b).unwrap();
        assert!((v.value - 2.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn endpoint_singularity() {
        let b = Budget::default();
        let v = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, Tolerance::relative(1e-10), &b).unwrap();
        assert!((v.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn semi_infinite() {
        let b = Budget::default();
        let v = integrate_to_infinity(|x| (-x).exp(), 0.0, Tolerance::relative(1e-12), &b).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
        let v = integrate_to_infinity(|x| 1.0 / (1.0 + x * x), 0.0, Tolerance::relative(1e-12), &b)
            .unwrap();
        assert!((v.value - PI / 2.0).abs() < 1e-11);
    }

    #[test]
    fn epsilon_accelerates_alternating_harmonic() {
        let sums: Vec<f64> = (1..=20)
            .scan(0.0, |s, k| {
                *s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                Some(*s)
            })
            .collect();
        let est = wynn_epsilon(&sums);
        assert!((est - 2f64.ln()).abs() < 1e-12, "{est}");
    }

    #[test]
    fn oscillatory_dirichlet_integral() {
        // ∫₀^∞ sin x / x dx = π/2, pieces between multiples of π
        let b = Budget::default();
        let est = oscillatory_sum(
            |k| {
                let a = k as f64 * PI;
                let v = integrate(
                    |x| if x == 0.0 { 1.0 } else { x.sin() / x },
                    a,
                    a + PI,
                    Tolerance::relative(1e-14),
                    &b,
                )?;
                Ok(Some(v.value))
            },
            Tolerance::relative(1e-11),
            200,
        )
        .unwrap();
        assert!((est.value - PI / 2.0).abs() < 1e-10, "{}", est.value);
    }

    #[test]
    fn budget_interrupts() {
        let b = Budget::new(100);
        let r = integrate(
            |x| (1.0 / x).sin(),
            1e-6,
            1.0,
            Tolerance::relative(1e-14),
            &b,
        );
        assert!(r.is_err());
    }
}
