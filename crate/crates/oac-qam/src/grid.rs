//! Transmit-side encoder, superimposed-constellation geometry, and the
//! per-axis nearest-point decoder.
//!
//! A symbol `s` in `[0, Q-1]`, `Q = q^2`, is split into base-`q` digits and
//! placed on a one-sided rectangular grid:
//!
//! ```text
//!     encode(s) = (s mod q) * d1  +  floor(s/q) * d2 * i
//! ```
//!
//! Summing `K` such points on the channel lands on the superimposed grid
//! `{0..N-1} x {0..N-1}` (scaled by `d1`, `d2`) with `N = K(q-1)+1`. Because
//! the componentwise Cauchy density is strictly decreasing in `|r - y|`, the
//! maximum-likelihood decision over the superimposed grid is the nearest
//! grid point, which separates into independent per-axis rounding.

use crate::error::{Error, Result};
use crate::scalar::{real_from_u64, Real};

/// Geometry of the transmit constellation and the induced superimposed grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstellationParams<T> {
    q: u64,
    k: u64,
    d1: T,
    d2: T,
}

impl<T: Real> ConstellationParams<T> {
    /// Validates `q >= 2`, `k >= 1` and strictly positive, finite spacings.
    ///
    /// `q = 1` is rejected: the constellation would collapse to a single
    /// point and the superimposed grid to `N = 1`.
    pub fn new(q: u64, k: u64, d1: T, d2: T) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParameter(format!(
                "per-axis alphabet size q must be >= 2, got {q}"
            )));
        }
        if k < 1 {
            return Err(Error::InvalidParameter("node count k must be >= 1".into()));
        }
        for (name, d) in [("d1", d1), ("d2", d2)] {
            // NaN fails the is_finite clause.
            if d <= T::zero() || !d.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "spacing {name} must be finite and > 0"
                )));
            }
        }
        Ok(Self { q, k, d1, d2 })
    }

    /// Per-axis alphabet size `q`.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Number of transmitters `K`.
    pub fn k(&self) -> u64 {
        self.k
    }

    /// In-phase spacing `d1`.
    pub fn d1(&self) -> T {
        self.d1
    }

    /// Quadrature spacing `d2`.
    pub fn d2(&self) -> T {
        self.d2
    }

    /// Input alphabet size `Q = q^2`.
    pub fn alphabet_size(&self) -> u64 {
        self.q * self.q
    }

    /// Points per axis of the superimposed grid, `N = K(q-1) + 1`.
    pub fn axis_points(&self) -> u64 {
        self.k * (self.q - 1) + 1
    }

    /// Same geometry with different spacings.
    pub fn with_spacings(&self, d1: T, d2: T) -> Result<Self> {
        Self::new(self.q, self.k, d1, d2)
    }

    /// Largest value the sum `f = s_1 + ... + s_K` can take, `K(Q-1)`.
    pub fn max_sum(&self) -> u64 {
        self.k * (self.alphabet_size() - 1)
    }
}

/// One complex channel sample, as in-phase/quadrature amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexSample<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> ComplexSample<T> {
    pub fn new(re: T, im: T) -> Self {
        Self { re, im }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Squared Euclidean distance to `other`.
    pub fn distance_sq(&self, other: &Self) -> T {
        let dr = self.re - other.re;
        let di = self.im - other.im;
        dr * dr + di * di
    }
}

/// Index pair on the superimposed grid, `0 <= a, b <= N-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridPoint {
    pub a: u64,
    pub b: u64,
}

/// Maps `s` in `[0, Q-1]` to its constellation point.
pub fn encode<T: Real>(s: u64, params: &ConstellationParams<T>) -> Result<ComplexSample<T>> {
    let big_q = params.alphabet_size();
    if s >= big_q {
        return Err(Error::SymbolOutOfRange {
            symbol: s,
            max: big_q - 1,
        });
    }
    let lo = real_from_u64::<T>(s % params.q);
    let hi = real_from_u64::<T>(s / params.q);
    Ok(ComplexSample::new(lo * params.d1, hi * params.d2))
}

/// Nominal average symbol energy `(Q-1)(d1^2 + d2^2)/6`.
///
/// This is the standard square-QAM power accounting; the power budget and
/// the constraint radius `rho` are defined against it. Note that the raw
/// second moment of the one-sided grid actually transmitted is
/// `(q-1)(2q-1)(d1^2 + d2^2)/6`, which coincides with the nominal value only
/// at `q = 2`; the nominal convention is kept because the whole design
/// problem (and its constraint circle) is stated in terms of it.
pub fn average_power<T: Real>(params: &ConstellationParams<T>) -> T {
    let qm1 = real_from_u64::<T>(params.alphabet_size() - 1);
    let six = real_from_u64::<T>(6);
    qm1 * (params.d1 * params.d1 + params.d2 * params.d2) / six
}

/// Component-wise sum of the encoded symbols: the noiseless received point.
///
/// Requires exactly `K` symbols.
pub fn superimpose<T: Real>(
    symbols: &[u64],
    params: &ConstellationParams<T>,
) -> Result<ComplexSample<T>> {
    if symbols.len() != params.k as usize {
        return Err(Error::SymbolCountMismatch {
            expected: params.k as usize,
            actual: symbols.len(),
        });
    }
    // Digit sums stay exact in u64; the float products are formed once.
    let mut sum_lo = 0u64;
    let mut sum_hi = 0u64;
    for &s in symbols {
        let big_q = params.alphabet_size();
        if s >= big_q {
            return Err(Error::SymbolOutOfRange {
                symbol: s,
                max: big_q - 1,
            });
        }
        sum_lo += s % params.q;
        sum_hi += s / params.q;
    }
    Ok(ComplexSample::new(
        real_from_u64::<T>(sum_lo) * params.d1,
        real_from_u64::<T>(sum_hi) * params.d2,
    ))
}

/// Nearest-index decision along one axis with clamping to `[0, n-1]`.
///
/// Rounding is half-away-from-zero (`Float::round`), and the clamp handles
/// infinite `x` without casting hazards. Exposed to the simulator so the
/// hot path can skip the finiteness check of [`decode`].
pub(crate) fn decode_axis<T: Real>(x: T, d: T, n: u64) -> u64 {
    let idx = (x / d).round();
    if idx <= T::zero() {
        0
    } else if idx >= real_from_u64::<T>(n - 1) {
        n - 1
    } else {
        idx.to_u64().expect("rounded in-range index converts")
    }
}

/// Maximum-likelihood grid decision: per-axis nearest point, clamped to the
/// valid index range.
///
/// Clamping realizes the arg-max over the finite superimposed grid: the sum
/// of `K` symbols can never decode outside `[0, N-1]` per axis, so pulling
/// out-of-range excursions back to the boundary can only reduce the error.
pub fn decode<T: Real>(r: ComplexSample<T>, params: &ConstellationParams<T>) -> Result<GridPoint> {
    if !r.is_finite() {
        return Err(Error::NonFiniteSample);
    }
    let n = params.axis_points();
    Ok(GridPoint {
        a: decode_axis(r.re, params.d1, n),
        b: decode_axis(r.im, params.d2, n),
    })
}

/// Rebuilds the integer sum from a decoded grid point: `f_hat = a + q*b`.
///
/// This inverts the digit split of [`encode`]: each symbol contributes
/// `s = (s mod q) + q*floor(s/q)`, and both digit sums are preserved by the
/// channel superposition.
pub fn estimate_sum<T: Real>(p: GridPoint, params: &ConstellationParams<T>) -> u64 {
    p.a + params.q * p.b
}
