//! Complex Cauchy channel noise: density evaluation and deterministic
//! inverse-CDF sampling.
//!
//! The noise is defined componentwise: `z = z1 + i z2` with `z1`, `z2`
//! independent `Cauchy(0, gamma)`. The distribution has no finite mean or
//! variance, which is the whole point — rare, huge outliers dominate, and
//! any design argument built on second moments of the raw noise is invalid.

use crate::grid::ComplexSample;
use crate::scalar::{real_from_f64, Real};
use rand::distr::Open01;
use rand::Rng;

/// Cauchy scale parameter `gamma` (half-width at half maximum; the
/// per-component quartiles sit at exactly `±gamma`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel<T> {
    gamma: T,
}

impl<T: Real> NoiseModel<T> {
    pub fn new(gamma: T) -> crate::Result<Self> {
        // NaN fails the is_finite clause.
        if gamma <= T::zero() || !gamma.is_finite() {
            return Err(crate::Error::InvalidParameter(
                "cauchy scale gamma must be finite and > 0".into(),
            ));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Draws one complex sample: two independent components, each by the
    /// tangent transform `gamma * tan(pi * (u - 1/2))` of a uniform `u` on
    /// the open unit interval.
    ///
    /// One uniform per component, so a fixed rng state yields the same
    /// sample stream on every run. The transform is resampled in the
    /// (measure-zero) event that it produces a non-finite value.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexSample<T> {
        ComplexSample::new(self.sample_component(rng), self.sample_component(rng))
    }

    fn sample_component<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        loop {
            let u: f64 = rng.sample(Open01);
            let half = real_from_f64::<T>(0.5);
            let z = self.gamma * ((real_from_f64::<T>(u) - half) * T::PI()).tan();
            if z.is_finite() {
                return z;
            }
        }
    }
}

/// Channel transition density `gamma / (pi * (gamma^2 + |r - y|^2))`.
///
/// Strictly positive and strictly decreasing in `|r - y|`, so maximizing it
/// over a candidate grid is the same as picking the nearest point.
pub fn density<T: Real>(r: ComplexSample<T>, y: ComplexSample<T>, model: &NoiseModel<T>) -> T {
    let g = model.gamma();
    g / (T::PI() * (g * g + r.distance_sq(&y)))
}
