//! Directed-rounded interval arithmetic.
//!
//! Rather than switching hardware rounding modes, every endpoint computation
//! is nudged outward with `next_down` / `next_up` after the nearest-rounded
//! operation. The nearest result is within half an ulp of the true value, so
//! one ulp of outward slack is always sound. Elementary functions from libm
//! are faithfully rounded on this platform; we give them a wider safety
//! margin anyway.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntervalError {
    #[error("interval endpoints out of order or NaN")]
    Malformed,
    #[error("division by an interval containing zero")]
    DivisionByZeroInterval,
    #[error("domain error: {0}")]
    Domain(&'static str),
}

/// Closed real interval with `f64` endpoints, `lo <= hi`, never NaN.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[inline]
fn rd(x: f64) -> f64 {
    x.next_down()
}

#[inline]
fn ru(x: f64) -> f64 {
    x.next_up()
}

/// Product of two endpoints rounded down, with the convention 0 * inf = 0
/// (correct for set products: every real in an unbounded interval is finite).
#[inline]
fn mul_rd(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        rd(a * b)
    }
}

#[inline]
fn mul_ru(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        ru(a * b)
    }
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Construct from ordered endpoints; panics on malformed input.
    /// Use [`Interval::try_new`] when the endpoints come from outside.
    #[inline]
    pub fn new(lo: f64, hi: f64) -> Interval {
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn try_new(lo: f64, hi: f64) -> Result<Interval, IntervalError> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            Err(IntervalError::Malformed)
        } else {
            Ok(Interval { lo, hi })
        }
    }

    /// Degenerate interval `[x, x]`.
    #[inline]
    pub fn point(x: f64) -> Interval {
        assert!(!x.is_nan());
        Interval { lo: x, hi: x }
    }

    /// Smallest interval containing `x` with one ulp of slack on both sides.
    #[inline]
    pub fn around(x: f64) -> Interval {
        Interval { lo: rd(x), hi: ru(x) }
    }

    /// `sqrt(2)` as a rigorous enclosure.
    pub fn sqrt2() -> Interval {
        Interval::point(2.0).sqrt().unwrap()
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn width(&self) -> f64 {
        ru(self.hi - self.lo)
    }

    /// Midpoint as a plain float (not rigorous; used for centering only).
    #[inline]
    pub fn mid(&self) -> f64 {
        let m = 0.5 * self.lo + 0.5 * self.hi;
        if m.is_finite() {
            m
        } else {
            0.0f64.clamp(self.lo, self.hi)
        }
    }

    /// Largest absolute value of any point in the interval.
    #[inline]
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value of any point in the interval.
    #[inline]
    pub fn mig(&self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Containment in the interior, for the a-priori enclosure escape argument.
    #[inline]
    pub fn contains_in_interior(&self, other: &Interval) -> bool {
        self.lo < other.lo && other.hi < self.hi
    }

    #[inline]
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }

    /// True iff every point of `self` is strictly below every point of `other`.
    #[inline]
    pub fn strictly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    /// Halves overlapping at the midpoint, so no real number is lost.
    pub fn bisect(&self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval::new(self.lo, m), Interval::new(m, self.hi))
    }

    /// Widen by `delta` on both sides.
    pub fn inflate(&self, delta: f64) -> Interval {
        debug_assert!(delta >= 0.0);
        Interval {
            lo: rd(self.lo - delta),
            hi: ru(self.hi + delta),
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    #[inline]
    pub fn recip(&self) -> Result<Interval, IntervalError> {
        Interval::ONE.div(self)
    }

    pub fn div(&self, rhs: &Interval) -> Result<Interval, IntervalError> {
        if rhs.contains(0.0) {
            return Err(IntervalError::DivisionByZeroInterval);
        }
        let c = [
            (self.lo, rhs.lo),
            (self.lo, rhs.hi),
            (self.hi, rhs.lo),
            (self.hi, rhs.hi),
        ];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in c {
            lo = lo.min(rd(a / b));
            hi = hi.max(ru(a / b));
        }
        Ok(Interval { lo, hi })
    }

    pub fn sqrt(&self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::Domain("sqrt of negative interval"));
        }
        // sqrt is correctly rounded; one ulp outward is enough.
        let lo = rd(self.lo.sqrt()).max(0.0);
        let hi = ru(self.hi.sqrt());
        Ok(Interval { lo, hi })
    }

    pub fn ln(&self) -> Result<Interval, IntervalError> {
        if self.lo <= 0.0 {
            return Err(IntervalError::Domain("ln of nonpositive interval"));
        }
        // libm ln is faithful; take three ulps of margin.
        let lo = rd(rd(rd(self.lo.ln())));
        let hi = ru(ru(ru(self.hi.ln())));
        Ok(Interval { lo, hi })
    }

    pub fn exp(&self) -> Interval {
        let lo = rd(rd(rd(self.lo.exp()))).max(0.0);
        let hi = ru(ru(ru(self.hi.exp())));
        Interval { lo, hi }
    }

    /// Tight power of a single endpoint by interval repeated squaring.
    fn powi_thin(x: f64, k: u32) -> Interval {
        let mut acc = Interval::ONE;
        let mut base = Interval::point(x);
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    /// `self^k` by monotonicity / parity case analysis (not mul-chains).
    pub fn pow_int(&self, k: i32) -> Result<Interval, IntervalError> {
        if k < 0 {
            return self.pow_int(-k)?.recip();
        }
        let k = k as u32;
        match k {
            0 => Ok(Interval::ONE),
            1 => Ok(*self),
            _ => {
                if k % 2 == 1 {
                    // odd power: monotone increasing
                    Ok(Interval {
                        lo: Self::powi_thin(self.lo, k).lo,
                        hi: Self::powi_thin(self.hi, k).hi,
                    })
                } else if self.lo >= 0.0 {
                    Ok(Interval {
                        lo: Self::powi_thin(self.lo, k).lo.max(0.0),
                        hi: Self::powi_thin(self.hi, k).hi,
                    })
                } else if self.hi <= 0.0 {
                    Ok(Interval {
                        lo: Self::powi_thin(self.hi, k).lo.max(0.0),
                        hi: Self::powi_thin(self.lo, k).hi,
                    })
                } else {
                    // straddles zero: range is [0, max(|lo|,|hi|)^k]
                    Ok(Interval {
                        lo: 0.0,
                        hi: Self::powi_thin(self.mag(), k).hi,
                    })
                }
            }
        }
    }

    /// Scale by a plain float (outward-rounded).
    pub fn scale(&self, c: f64) -> Interval {
        *self * Interval::point(c)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: rd(self.lo + rhs.lo),
            hi: ru(self.hi + rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: rd(self.lo - rhs.hi),
            hi: ru(self.hi - rhs.lo),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, rhs: Interval) -> Interval {
        let c = [
            (self.lo, rhs.lo),
            (self.lo, rhs.hi),
            (self.hi, rhs.lo),
            (self.hi, rhs.hi),
        ];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in c {
            lo = lo.min(mul_rd(a, b));
            hi = hi.max(mul_ru(a, b));
        }
        Interval { lo, hi }
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |a, b| a + b)
    }
}
