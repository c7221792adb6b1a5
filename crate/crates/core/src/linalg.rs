//! Small dense interval vectors and matrices (dimension 2 or 4 in practice),
//! plus the two pieces of linear algebra the wrapping-control code needs:
//! a floating-point QR factor and a rigorous interval linear solve.

use crate::interval::{Interval, IntervalError};

pub type IVec = Vec<Interval>;

/// Square interval matrix in row-major order.
#[derive(Clone, Debug)]
pub struct IMat {
    pub n: usize,
    pub data: Vec<Interval>,
}

impl IMat {
    pub fn zeros(n: usize) -> IMat {
        IMat {
            n,
            data: vec![Interval::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> IMat {
        let mut m = IMat::zeros(n);
        for i in 0..n {
            *m.at_mut(i, i) = Interval::ONE;
        }
        m
    }

    pub fn from_point(n: usize, p: &[f64]) -> IMat {
        assert_eq!(p.len(), n * n);
        IMat {
            n,
            data: p.iter().map(|&x| Interval::point(x)).collect(),
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Interval {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Interval {
        &mut self.data[i * self.n + j]
    }

    pub fn mid(&self) -> Vec<f64> {
        self.data.iter().map(|iv| iv.mid()).collect()
    }

    pub fn mul_vec(&self, v: &[Interval]) -> IVec {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j) * v[j]).sum())
            .collect()
    }

    pub fn mul_mat(&self, other: &IMat) -> IMat {
        assert_eq!(self.n, other.n);
        let mut r = IMat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                *r.at_mut(i, j) = (0..self.n).map(|k| self.at(i, k) * other.at(k, j)).sum();
            }
        }
        r
    }

    /// Enclosure of `A^{-1} B` by interval Gaussian elimination with partial
    /// pivoting. `A` should be well conditioned (we only call this on
    /// near-orthonormal point matrices).
    pub fn solve(&self, rhs: &IMat) -> Result<IMat, IntervalError> {
        let n = self.n;
        assert_eq!(rhs.n, n);
        let mut a = self.clone();
        let mut b = rhs.clone();
        for col in 0..n {
            // pivot row: largest mignitude, so the pivot provably excludes 0
            let piv = (col..n)
                .max_by(|&r1, &r2| {
                    a.at(r1, col)
                        .mig()
                        .partial_cmp(&a.at(r2, col).mig())
                        .unwrap()
                })
                .unwrap();
            if a.at(piv, col).contains(0.0) {
                return Err(IntervalError::DivisionByZeroInterval);
            }
            if piv != col {
                for j in 0..n {
                    let tmp = a.at(col, j);
                    *a.at_mut(col, j) = a.at(piv, j);
                    *a.at_mut(piv, j) = tmp;
                    let tmp = b.at(col, j);
                    *b.at_mut(col, j) = b.at(piv, j);
                    *b.at_mut(piv, j) = tmp;
                }
            }
            let pivot = a.at(col, col);
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a.at(row, col).div(&pivot)?;
                for j in 0..n {
                    let v = a.at(row, j) - factor * a.at(col, j);
                    *a.at_mut(row, j) = v;
                    let v = b.at(row, j) - factor * b.at(col, j);
                    *b.at_mut(row, j) = v;
                }
                *a.at_mut(row, col) = Interval::ZERO;
            }
        }
        let mut x = IMat::zeros(n);
        for i in 0..n {
            let pivot = a.at(i, i);
            for j in 0..n {
                *x.at_mut(i, j) = b.at(i, j).div(&pivot)?;
            }
        }
        Ok(x)
    }
}

/// Hull width helpers for interval vectors.
pub fn max_width(v: &[Interval]) -> f64 {
    v.iter().map(|iv| iv.width()).fold(0.0, f64::max)
}

pub fn vec_add(a: &[Interval], b: &[Interval]) -> IVec {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

/// Modified Gram-Schmidt QR of a point matrix; returns the orthonormal factor.
/// Columns that degenerate are replaced by unit vectors to keep Q invertible.
/// This is a plain float computation: any invertible matrix is a valid change
/// of basis, rigor enters through the interval solve against it.
pub fn point_qr(n: usize, m: &[f64]) -> Vec<f64> {
    let mut q: Vec<f64> = m.to_vec();
    for j in 0..n {
        for k in 0..j {
            let dot: f64 = (0..n).map(|i| q[i * n + j] * q[i * n + k]).sum();
            for i in 0..n {
                q[i * n + j] -= dot * q[i * n + k];
            }
        }
        let norm: f64 = (0..n)
            .map(|i| q[i * n + j] * q[i * n + j])
            .sum::<f64>()
            .sqrt();
        if norm > 1e-300 {
            for i in 0..n {
                q[i * n + j] /= norm;
            }
        } else {
            for i in 0..n {
                q[i * n + j] = if i == j { 1.0 } else { 0.0 };
            }
            // re-orthogonalize the fallback column
            for k in 0..j {
                let dot: f64 = (0..n).map(|i| q[i * n + j] * q[i * n + k]).sum();
                for i in 0..n {
                    q[i * n + j] -= dot * q[i * n + k];
                }
            }
            let norm: f64 = (0..n)
                .map(|i| q[i * n + j] * q[i * n + j])
                .sum::<f64>()
                .sqrt();
            if norm > 1e-300 {
                for i in 0..n {
                    q[i * n + j] /= norm;
                }
            }
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve() {
        let a = IMat::identity(4);
        let b = IMat::from_point(4, &{
            let mut v = vec![0.0; 16];
            for (i, x) in v.iter_mut().enumerate() {
                *x = (i as f64) - 3.5;
            }
            v
        });
        let x = a.solve(&b).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!(x.at(i, j).contains(b.at(i, j).mid()));
            }
        }
    }

    #[test]
    fn solve_encloses_true_inverse_action() {
        // rotation by 30 degrees in the (0,1) plane
        let c = 0.866_025_403_784_438_6;
        let s = 0.5;
        let a = IMat::from_point(2, &[c, -s, s, c]);
        let x = a.solve(&IMat::identity(2)).unwrap();
        // inverse is the transpose
        assert!(x.at(0, 0).contains(c));
        assert!(x.at(0, 1).contains(s));
        assert!(x.at(1, 0).contains(-s));
        assert!(x.at(1, 1).contains(c));
    }

    #[test]
    fn qr_orthonormal() {
        let m = [1.0, 2.0, 0.5, -1.0, 0.3, 2.0, 0.0, 1.0, 4.0];
        let q = point_qr(3, &m);
        for j in 0..3 {
            for k in 0..3 {
                let dot: f64 = (0..3).map(|i| q[i * 3 + j] * q[i * 3 + k]).sum();
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = IMat::from_point(2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(a.solve(&IMat::identity(2)).is_err());
    }
}
