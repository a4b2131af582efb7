//! Increments of the symmetric stable walk and the per-path RNG streams.

use std::f64::consts::PI;

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{domain, Result};
use crate::stable::WalkModel;

/// Independent generator for path `index` of an ensemble seeded with `seed`:
/// ChaCha8 keyed by `seed`, stream number `index`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws increments `(D dt)^{1/λ} S` with `S` standard symmetric stable,
/// `E e^{ipS} = e^{-|p|^λ}`.
#[derive(Debug, Clone, Copy)]
pub struct IncrementSampler {
    lambda: f64,
    scale: f64,
    kind: Kind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Gaussian,
    Cauchy,
    Stable,
}

impl IncrementSampler {
    pub fn new(dt: f64, model: &WalkModel) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(domain("dt", dt, "time step must be positive"));
        }
        let lambda = model.lambda();
        let d = model.diffusion();
        let (kind, scale) = if model.is_gaussian() {
            (Kind::Gaussian, (2.0 * d * dt).sqrt())
        } else if model.is_cauchy() {
            (Kind::Cauchy, d * dt)
        } else {
            (Kind::Stable, (d * dt).powf(1.0 / lambda))
        };
        Ok(Self {
            lambda,
            scale,
            kind,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            Kind::Gaussian => self.scale * rng.sample::<f64, _>(StandardNormal),
            Kind::Cauchy => {
                let u: f64 = rng.sample(Open01);
                self.scale * (PI * (u - 0.5)).tan()
            }
            Kind::Stable => self.scale * chambers_mallows_stuck(self.lambda, rng),
        }
    }
}

/// Standard symmetric α-stable variate, `U ~ U(-π/2, π/2)`, `W ~ Exp(1)`:
/// `sin(αU)/cos(U)^{1/α} · (cos((1-α)U)/W)^{(1-α)/α}`.
fn chambers_mallows_stuck<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u = PI * (rng.sample::<f64, _>(Open01) - 0.5);
    let w: f64 = rng.sample(Exp1);
    (alpha * u).sin() / u.cos().powf(1.0 / alpha)
        * (((1.0 - alpha) * u).cos() / w).powf((1.0 - alpha) / alpha)
}

/// One increment of `P_λ(·, dt)`.
pub fn sample_increment<R: Rng + ?Sized>(dt: f64, model: &WalkModel, rng: &mut R) -> Result<f64> {
    Ok(IncrementSampler::new(dt, model)?.sample(rng))
}
