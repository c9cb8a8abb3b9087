use core::fmt;
use core::ops::{Add, Mul};
use serde::{Deserialize, Serialize};

/// A real value with a certified absolute error radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Approx {
    pub value: f64,
    pub error_radius: f64,
}

impl Approx {
    pub const ZERO: Approx = Approx { value: 0.0, error_radius: 0.0 };

    pub fn new(value: f64, error_radius: f64) -> Self {
        Approx { value, error_radius: error_radius.abs() }
    }

    pub fn exact(value: f64) -> Self {
        Approx { value, error_radius: 0.0 }
    }

    pub fn lo(&self) -> f64 {
        self.value - self.error_radius
    }

    pub fn hi(&self) -> f64 {
        self.value + self.error_radius
    }

    /// True when `x` lies within the radius, widened by `slack`.
    pub fn contains(&self, x: f64, slack: f64) -> bool {
        (self.value - x).abs() <= self.error_radius + slack
    }

    pub fn scale(self, k: f64) -> Self {
        Approx::new(self.value * k, self.error_radius * k.abs() + ulp(self.value * k))
    }

    /// Quotient with an error radius that covers both operands' radii.
    pub fn div(self, other: Approx) -> Self {
        let q = self.value / other.value;
        let denom_lo = other.value.abs() - other.error_radius;
        if denom_lo <= 0.0 {
            return Approx::new(q, f64::INFINITY);
        }
        let r = (self.error_radius + q.abs() * other.error_radius) / denom_lo;
        Approx::new(q, r + ulp(q))
    }
}

impl Add for Approx {
    type Output = Approx;
    fn add(self, rhs: Approx) -> Approx {
        let v = self.value + rhs.value;
        Approx::new(v, self.error_radius + rhs.error_radius + ulp(v))
    }
}

impl Mul<f64> for Approx {
    type Output = Approx;
    fn mul(self, k: f64) -> Approx {
        self.scale(k)
    }
}

impl fmt::Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:e}", self.value, self.error_radius)
    }
}

/// One unit in the last place of `x` (an upper bound on one rounding error).
pub(crate) fn ulp(x: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() {
        return f64::MIN_POSITIVE;
    }
    a * f64::EPSILON
}
