//! Closed-form mean-squared error of the decoded sum.
//!
//! Per axis, the superimposed constellation is an `N`-point line with
//! spacing `x` and the decoder rounds to the nearest point, clamped to the
//! grid. With the true point uniform on the grid and Cauchy(0, `gamma`)
//! noise on the axis, the mean squared index error has the exact closed
//! form
//!
//! ```text
//!     mu(x) = sum_{m=1}^{N-1} w_m * P(|z| >= (2m-1) x / 2),
//!     w_m   = (2m-1)(N-m)/N,
//!     P(|z| >= u) = (2/pi) * arctan(gamma / u),
//! ```
//!
//! i.e. a weighted sum of the Cauchy tail beyond each midpoint decision
//! boundary, with the weights counting how many grid positions can still
//! absorb an error of magnitude `m` before the clamp bites. The two axes
//! combine as `mse = mu(d1) + q^2 mu(d2)` because a quadrature index error
//! is worth `q` units of the decoded sum.
//!
//! A second, *nominal* series is kept alongside ([`mu_nominal`] with weights
//! [`MseCoefficients`]): it uses tails at full-spacing thresholds
//! `(2m-1) x` and weights `alpha_m = 2m-1 + (3m(1-m)-1)/N`. The two series
//! share their first weight (`1 - 1/N`) and the `x/gamma` scale covariance,
//! but the nominal one systematically underestimates the decoder's error
//! (by roughly a factor two at moderate `N`). It is retained because the
//! spacing-design equation solved in [`crate::optimizer`] is the large-`N`
//! stationarity system of this series, so the gap between the two is
//! directly measurable; all Monte-Carlo validation targets the exact form.

use crate::accum::NeumaierSum;
use crate::error::{Error, Result};
use crate::grid::ConstellationParams;
use crate::noise::NoiseModel;
use crate::scalar::{real_from_u64, Real};

fn check_axis_inputs<T: Real>(x: T, gamma: T, n: u64) -> Result<()> {
    // NaN fails the is_finite clause.
    if x <= T::zero() || !x.is_finite() {
        return Err(Error::InvalidParameter(
            "axis spacing x must be finite and > 0".into(),
        ));
    }
    if gamma <= T::zero() || !gamma.is_finite() {
        return Err(Error::InvalidParameter(
            "cauchy scale gamma must be finite and > 0".into(),
        ));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "axis point count N must be >= 2, got {n}"
        )));
    }
    Ok(())
}

/// Exact per-axis weights `(2m-1)(N-m)/N`, `m = 1..N-1`. All nonnegative.
pub(crate) fn exact_weights<T: Real>(n: u64) -> Vec<T> {
    let nf = real_from_u64::<T>(n);
    (1..n)
        .map(|m| real_from_u64::<T>(2 * m - 1) * real_from_u64::<T>(n - m) / nf)
        .collect()
}

/// Reusable exact per-axis MSE evaluator for a fixed `N`.
///
/// Construction is `O(N)` and evaluation is `O(N)`; callers that sweep many
/// spacings at the same `N` (the optimizer scan, the SNR sweep) build one of
/// these and reuse it. Immutable after construction, so shared references
/// can be evaluated concurrently.
#[derive(Clone, Debug)]
pub struct AxisMse<T> {
    n: u64,
    weights: Vec<T>,
}

impl<T: Real> AxisMse<T> {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "axis point count N must be >= 2, got {n}"
            )));
        }
        Ok(Self {
            n,
            weights: exact_weights(n),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Mean squared index error at spacing `x` and noise scale `gamma`.
    ///
    /// Panics if `x <= 0` or `gamma <= 0`; use [`mu`] for checked inputs.
    pub fn eval(&self, x: T, gamma: T) -> T {
        assert!(
            x > T::zero() && gamma > T::zero(),
            "eval needs x, gamma > 0"
        );
        let two_over_pi = real_from_u64::<T>(2) / T::PI();
        let two_gamma = gamma + gamma;
        let mut acc = NeumaierSum::new();
        for (i, &w) in self.weights.iter().enumerate() {
            let odd = real_from_u64::<T>(2 * (i as u64 + 1) - 1);
            acc.add(w * two_over_pi * (two_gamma / (odd * x)).atan());
        }
        acc.total()
    }

    /// Value of the `x -> 0+` limit: every tail probability saturates at 1,
    /// giving `sum w_m = (N-1)(2N-1)/6`.
    pub fn saturation(&self) -> T {
        let n = self.n;
        real_from_u64::<T>((n - 1) * (2 * n - 1)) / real_from_u64::<T>(6)
    }
}

/// Exact per-axis MSE of the clamped nearest-point decoder.
///
/// Strictly decreasing in `x`, tends to 0 as `x -> inf`, saturates at
/// `(N-1)(2N-1)/6` as `x -> 0+`, and depends on `(x, gamma)` only through
/// `x/gamma`.
pub fn mu<T: Real>(x: T, gamma: T, n: u64) -> Result<T> {
    check_axis_inputs(x, gamma, n)?;
    Ok(AxisMse::new(n)?.eval(x, gamma))
}

/// Signed weights `alpha_m = 2m-1 + (3m(1-m)-1)/N` of the nominal per-axis
/// error series, `m = 1..N-1`.
///
/// `alpha_1 = 1 - 1/N` coincides with the exact weight; for `m` beyond
/// roughly `2N/3` the values turn negative, which is why [`mu_nominal`]
/// accumulates with compensation.
#[derive(Clone, Debug)]
pub struct MseCoefficients<T> {
    n: u64,
    alpha: Vec<T>,
}

impl<T: Real> MseCoefficients<T> {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "axis point count N must be >= 2, got {n}"
            )));
        }
        let nf = real_from_u64::<T>(n);
        let three = real_from_u64::<T>(3);
        let one = T::one();
        let alpha = (1..n)
            .map(|m| {
                let mf = real_from_u64::<T>(m);
                real_from_u64::<T>(2 * m - 1) + (three * mf * (one - mf) - one) / nf
            })
            .collect();
        Ok(Self { n, alpha })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Weights in increasing `m`; `alpha()[0]` is `alpha_1`.
    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }
}

/// Nominal per-axis error series over full-spacing tails:
/// `(2/pi) sum alpha_m arctan(gamma / ((2m-1) x))`.
///
/// See the module docs for how this relates to the exact [`mu`].
pub fn mu_nominal<T: Real>(x: T, gamma: T, n: u64) -> Result<T> {
    check_axis_inputs(x, gamma, n)?;
    let coeffs = MseCoefficients::<T>::new(n)?;
    let two_over_pi = real_from_u64::<T>(2) / T::PI();
    let mut acc = NeumaierSum::new();
    for (i, &a) in coeffs.alpha().iter().enumerate() {
        let odd = real_from_u64::<T>(2 * (i as u64 + 1) - 1);
        acc.add(a * (gamma / (odd * x)).atan());
    }
    Ok(two_over_pi * acc.total())
}

/// Closed-form MSE of the decoded sum: `mu(d1) + q^2 mu(d2)` with
/// `N = K(q-1) + 1`.
pub fn closed_form_mse<T: Real>(params: &ConstellationParams<T>, model: &NoiseModel<T>) -> T {
    let axis = AxisMse::new(params.axis_points()).expect("params guarantee N >= 2");
    let q = real_from_u64::<T>(params.q());
    axis.eval(params.d1(), model.gamma()) + q * q * axis.eval(params.d2(), model.gamma())
}
