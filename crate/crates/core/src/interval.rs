use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A closed interval (a, b) with a < b.
///
/// All operator math lives on the reference interval (-2, 2); a general
/// interval only enters through the affine map `theta(u) = (b-a)u/4 + (b+a)/2`
/// and its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    /// The reference interval (-2, 2) carrying the semicircular and arcsine measures.
    pub const REFERENCE: Interval = Interval { a: -2.0, b: 2.0 };

    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_nan() || b.is_nan() || !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::InvalidInterval(a, b));
        }
        Ok(Interval { a, b })
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Scale factor c = (b - a)/4 of the affine pullback.
    pub fn scale(&self) -> f64 {
        (self.b - self.a) / 4.0
    }

    /// Center d = (a + b)/2 of the affine pullback.
    pub fn center(&self) -> f64 {
        (self.a + self.b) / 2.0
    }

    /// theta: reference coordinate u in (-2, 2) -> physical x in (a, b).
    pub fn from_reference(&self, u: f64) -> f64 {
        self.scale() * u + self.center()
    }

    /// theta^{-1}: physical x -> reference coordinate u.
    pub fn to_reference(&self, x: f64) -> f64 {
        (x - self.center()) / self.scale()
    }

    pub fn is_reference(&self) -> bool {
        self.a == -2.0 && self.b == 2.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }
}

impl Default for Interval {
    fn default() -> Self {
        Interval::REFERENCE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_round_trip() {
        let iv = Interval::new(-1.0, 3.0).unwrap();
        assert_eq!(iv.scale(), 1.0);
        assert_eq!(iv.center(), 1.0);
        assert_eq!(iv.from_reference(-2.0), -1.0);
        assert_eq!(iv.from_reference(2.0), 3.0);
        assert!((iv.to_reference(iv.from_reference(0.7)) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, -2.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }
}
