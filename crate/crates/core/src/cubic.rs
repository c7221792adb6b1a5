//! The model nonlinearity `f(y) = y^3 - y` and its derivatives, evaluated in
//! interval arithmetic.

use crate::interval::Interval;

/// `f(y) = y^3 - y`.
pub fn f(y: Interval) -> Interval {
    y.pow_int(3).unwrap() - y
}

/// `f'(y) = 3 y^2 - 1`.
pub fn f_prime(y: Interval) -> Interval {
    y.pow_int(2).unwrap().scale(3.0) - Interval::ONE
}

/// Potential `V(y) = y^4/4 - y^2/2`; `f = V'`.
pub fn potential(y: Interval) -> Interval {
    y.pow_int(4).unwrap().scale(0.25) - y.pow_int(2).unwrap().scale(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_integers() {
        assert!(f(Interval::point(2.0)).contains(6.0));
        assert!(f_prime(Interval::point(2.0)).contains(11.0));
        assert!(potential(Interval::point(1.0)).contains(-0.25));
        assert!(f(Interval::point(1.0)).contains(0.0));
    }
}
