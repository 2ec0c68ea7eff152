use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::NumericError;

/// Parameters of the slicing ramps: the level `t`, the width `h` and the
/// mollification radius `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicingProfile {
    t: f64,
    h: f64,
    eps: f64,
}

impl SlicingProfile {
    /// Requires `h > 0` and `0 < eps < h/2`.
    pub fn new(t: f64, h: f64, eps: f64) -> Result<Self, NumericError> {
        if h <= 0.0 || !t.is_finite() || !h.is_finite() {
            return Err(NumericError::NonPositiveWidth(h));
        }
        if !(eps > 0.0 && eps < h / 2.0) {
            return Err(NumericError::EpsOutOfRange { eps, h });
        }
        Ok(SlicingProfile { t, h, eps })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Slope of the clamp being mollified; the Lipschitz constant of the
    /// smooth ramp whenever `eps <= h/4`.
    pub fn inner_slope(&self) -> f64 {
        1.0 / (self.h - 2.0 * self.eps)
    }

    pub fn gamma(&self, s: f64) -> f64 {
        gamma_h(s, self.t, self.h).expect("validated width")
    }

    pub fn ramp(&self, s: f64) -> f64 {
        smooth_ramp(s, self)
    }

    pub fn ramp_derivative(&self, s: f64) -> f64 {
        smooth_ramp_derivative(s, self)
    }
}

fn check_width(h: f64) -> Result<(), NumericError> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(NumericError::NonPositiveWidth(h))
    }
}

/// The ramp rising linearly from 0 at `t` to 1 at `t+h`, evaluated by
/// cases so that the flat branches are exact and monotonicity survives
/// rounding.
pub fn gamma_h(s: f64, t: f64, h: f64) -> Result<f64, NumericError> {
    check_width(h)?;
    Ok(if s <= t {
        0.0
    } else if s >= t + h {
        1.0
    } else {
        (s - t) / h
    })
}

/// `(|s - t| - |s - (t+h)| + h) / (2h)`. Equal to [`gamma_h`] in exact
/// arithmetic; in floating point the flat branches carry rounding error
/// unless `s`, `t` and `h` are dyadic with few bits.
pub fn gamma_h_closed_form(s: f64, t: f64, h: f64) -> Result<f64, NumericError> {
    check_width(h)?;
    Ok(((s - t).abs() - (s - (t + h)).abs() + h) / (2.0 * h))
}

// Biweight bump k(v) = 15/16 (1 - v²)² on [-1, 1], its primitive K1 (the
// smoothed step) and the primitive of v k(v) shifted so that
// R(v) = v K1(v) - M1(v) is the smoothed positive part.

fn step(v: f64) -> f64 {
    if v <= -1.0 {
        0.0
    } else if v >= 1.0 {
        1.0
    } else {
        let v2 = v * v;
        15.0 / 16.0 * v * (1.0 - 2.0 * v2 / 3.0 + v2 * v2 / 5.0) + 0.5
    }
}

fn positive_part(v: f64) -> f64 {
    if v <= -1.0 {
        0.0
    } else if v >= 1.0 {
        v
    } else {
        let v2 = v * v;
        let m1 = 15.0 / 16.0 * (v2 / 2.0 - v2 * v2 / 2.0 + v2 * v2 * v2 / 6.0 - 1.0 / 6.0);
        v * step(v) - m1
    }
}

/// The clamp rising linearly over `[t+eps, t+h-eps]`, convolved with a
/// biweight bump of radius `eps`. Identically 0 for `s <= t` and 1 for
/// `s >= t+h`; twice continuously differentiable.
pub fn smooth_ramp(s: f64, profile: &SlicingProfile) -> f64 {
    let SlicingProfile { t, h, eps } = *profile;
    if s <= t {
        return 0.0;
    }
    if s >= t + h {
        return 1.0;
    }
    let a = t + eps;
    let b = t + h - eps;
    let value = eps * (positive_part((s - a) / eps) - positive_part((s - b) / eps)) / (b - a);
    value.clamp(0.0, 1.0)
}

pub fn smooth_ramp_derivative(s: f64, profile: &SlicingProfile) -> f64 {
    let SlicingProfile { t, h, eps } = *profile;
    if s <= t || s >= t + h {
        return 0.0;
    }
    let a = t + eps;
    let b = t + h - eps;
    ((step((s - a) / eps) - step((s - b) / eps)) / (b - a)).max(0.0)
}

/// Largest difference quotient over consecutive points of a uniform grid of
/// `samples` points on `[lo, hi]`, and over `samples` random pairs of grid
/// points drawn from `seed`. A lower bound for the Lipschitz constant.
pub fn lipschitz_estimate(
    f: impl Fn(f64) -> f64,
    interval: (f64, f64),
    samples: usize,
    seed: u64,
) -> f64 {
    let (lo, hi) = interval;
    assert!(samples >= 2, "need at least two samples");
    assert!(hi > lo, "empty interval");
    let spacing = (hi - lo) / (samples - 1) as f64;
    let grid: Vec<f64> = (0..samples).map(|i| lo + spacing * i as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&s| f(s)).collect();
    let quotient = |i: usize, j: usize| (values[i] - values[j]).abs() / (grid[i] - grid[j]).abs();
    let mut best = (1..samples).map(|i| quotient(i, i - 1)).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let i = rng.gen_range(0..samples);
        let j = rng.gen_range(0..samples);
        if i != j {
            best = best.max(quotient(i, j));
        }
    }
    best
}
