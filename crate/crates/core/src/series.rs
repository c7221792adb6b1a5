//! Interval Taylor-coefficient recurrences for the two ODE systems.
//!
//! States are expanded at a positive time `t`: writing the solution as
//! `x(t + h) = sum_k x_k h^k`, the coefficients follow from the first-order
//! form of the equation, with the singular `2/t` coefficient handled through
//! the series of `1/(t + h)`. All arithmetic is interval arithmetic, so when
//! the seed values (or the expansion time) are boxes, the coefficients
//! enclose the coefficients of every solution they contain.
//!
//! The variational series propagates the derivative of the flow with respect
//! to the initial state. For the 4-variable system the Jacobian of the vector
//! field is block lower triangular with equal diagonal blocks, so the flow
//! derivative keeps the shape `[[P, 0], [K, P]]` with 2x2 blocks; we exploit
//! that and only ever compute the two blocks.

use thiserror::Error;

use crate::interval::Interval;
use crate::linalg::{IMat, IVec};

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("expansion time must be strictly positive, got lower endpoint {0}")]
    SingularTime(f64),
}

/// Which ODE system is being integrated.
#[derive(Clone, Debug, PartialEq)]
pub enum System {
    /// `(y, v_y, delta, v_delta)` with `f(y) = y^3 - y`.
    Main,
    /// Rescaled `(w, v_w)` with parameter `beta`.
    Scaled { beta: Interval },
}

impl System {
    pub fn dim(&self) -> usize {
        match self {
            System::Main => 4,
            System::Scaled { .. } => 2,
        }
    }

    /// Half the dimension: the size of the variational blocks.
    pub fn block(&self) -> usize {
        self.dim() / 2
    }
}

#[inline]
fn conv(a: &[Interval], b: &[Interval], k: usize) -> Interval {
    let mut s = Interval::ZERO;
    for i in 0..=k {
        s = s + a[i] * b[k - i];
    }
    s
}

#[inline]
fn div_k(x: Interval, k: usize) -> Interval {
    x.div(&Interval::point(k as f64)).unwrap()
}

/// Taylor coefficients of the state, plus the shared auxiliary series the
/// variational recurrence needs.
pub struct StateSeries {
    pub sys: System,
    /// `coeffs[var][k]`
    pub coeffs: Vec<Vec<Interval>>,
    pub order: usize,
    /// series of `1/(t+h)`
    g: Vec<Interval>,
    /// `y^2` (main) or `w^2` (scaled)
    sq: Vec<Interval>,
    /// `y * delta` (main only)
    yd: Vec<Interval>,
}

impl StateSeries {
    /// Compute coefficients of orders `0..=order` for seed values `x0` at
    /// expansion time `t` (which may be an interval; so may the seed).
    pub fn compute(
        sys: &System,
        x0: &[Interval],
        t: &Interval,
        order: usize,
    ) -> Result<StateSeries, SeriesError> {
        if t.lo() <= 0.0 {
            return Err(SeriesError::SingularTime(t.lo()));
        }
        assert_eq!(x0.len(), sys.dim());
        assert!(order >= 2);
        let n = order + 1;
        let mut g = vec![Interval::ZERO; n];
        g[0] = t.recip().unwrap();
        for k in 1..n {
            g[k] = -(g[k - 1].div(t).unwrap());
        }
        match sys {
            System::Main => {
                let mut y = vec![Interval::ZERO; n];
                let mut vy = vec![Interval::ZERO; n];
                let mut d = vec![Interval::ZERO; n];
                let mut vd = vec![Interval::ZERO; n];
                let mut sq = vec![Interval::ZERO; n];
                let mut yd = vec![Interval::ZERO; n];
                y[0] = x0[0];
                vy[0] = x0[1];
                d[0] = x0[2];
                vd[0] = x0[3];
                for k in 0..order {
                    sq[k] = conv(&y, &y, k);
                    yd[k] = conv(&y, &d, k);
                    let cube_k = conv(&sq, &y, k);
                    let sqd_k = conv(&sq, &d, k);
                    let gvy = conv(&g, &vy, k);
                    let gvd = conv(&g, &vd, k);
                    y[k + 1] = div_k(vy[k], k + 1);
                    vy[k + 1] = div_k(-(gvy.scale(2.0)) - cube_k + y[k], k + 1);
                    d[k + 1] = div_k(vd[k], k + 1);
                    vd[k + 1] = div_k(-(gvd.scale(2.0)) - sqd_k.scale(3.0) + d[k], k + 1);
                }
                sq[order] = conv(&y, &y, order);
                yd[order] = conv(&y, &d, order);
                Ok(StateSeries {
                    sys: sys.clone(),
                    coeffs: vec![y, vy, d, vd],
                    order,
                    g,
                    sq,
                    yd,
                })
            }
            System::Scaled { beta } => {
                let beta2 = beta.pow_int(2).unwrap();
                let mut w = vec![Interval::ZERO; n];
                let mut vw = vec![Interval::ZERO; n];
                let mut sq = vec![Interval::ZERO; n];
                w[0] = x0[0];
                vw[0] = x0[1];
                for k in 0..order {
                    sq[k] = conv(&w, &w, k);
                    let cube_k = conv(&sq, &w, k);
                    let gvw = conv(&g, &vw, k);
                    w[k + 1] = div_k(vw[k], k + 1);
                    vw[k + 1] = div_k(-(gvw.scale(2.0)) - cube_k + beta2 * w[k], k + 1);
                }
                sq[order] = conv(&w, &w, order);
                Ok(StateSeries {
                    sys: sys.clone(),
                    coeffs: vec![w, vw],
                    order,
                    g,
                    sq,
                    yd: Vec::new(),
                })
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.sys.dim()
    }

    /// Coefficient vector of order `k`.
    pub fn coeff(&self, k: usize) -> IVec {
        self.coeffs.iter().map(|c| c[k]).collect()
    }

    /// Horner evaluation of orders `0..=upto` at step `h` (an interval).
    pub fn eval(&self, h: &Interval, upto: usize) -> IVec {
        self.coeffs
            .iter()
            .map(|c| {
                let mut acc = c[upto];
                for k in (0..upto).rev() {
                    acc = acc * *h + c[k];
                }
                acc
            })
            .collect()
    }

    /// Range of the polynomial part over the whole step `[0, h]`.
    pub fn eval_range(&self, h: f64, upto: usize) -> IVec {
        self.eval(&Interval::new(0.0, h), upto)
    }
}

/// Taylor coefficients of the flow derivative, in the block form
/// `[[P, 0], [K, P]]` (main) or a single block `P` (scaled), with `M(0) = I`.
pub struct VarSeries {
    /// `p[i][j][k]`: coefficient `k` of block-P entry `(i, j)`
    pub p: Vec<Vec<Vec<Interval>>>,
    pub k_block: Option<Vec<Vec<Vec<Interval>>>>,
    pub order: usize,
    dim: usize,
}

impl VarSeries {
    /// Compute variational coefficients of orders `0..=order` on top of a
    /// state series (which must extend at least as far).
    pub fn compute(st: &StateSeries, order: usize) -> VarSeries {
        assert!(st.order >= order);
        let n = order + 1;
        let g = &st.g;
        let sq = &st.sq;
        let zero_block = || vec![vec![vec![Interval::ZERO; n]; 2]; 2];
        // linear part of the restoring force: d/dy (-y^3 + y) = -3y^2 + 1
        // for the main system, d/dw (-w^3 + beta^2 w) = -3w^2 + beta^2 for
        // the rescaled one
        let lin = match st.sys {
            System::Main => Interval::ONE,
            System::Scaled { beta } => beta.pow_int(2).unwrap_or(Interval::ZERO),
        };
        // P: columns (a, b) with a' = b, b' = -(3 sq - lin) a - 2 g b
        let mut p = zero_block();
        p[0][0][0] = Interval::ONE;
        p[1][1][0] = Interval::ONE;
        for col in 0..2 {
            for k in 0..order {
                let a: Vec<Interval> = (0..n).map(|i| p[0][col][i]).collect();
                let b: Vec<Interval> = (0..n).map(|i| p[1][col][i]).collect();
                let sqa = conv(sq, &a, k);
                let gb = conv(g, &b, k);
                p[0][col][k + 1] = div_k(b[k], k + 1);
                p[1][col][k + 1] = div_k(-(sqa.scale(3.0)) + lin * a[k] - gb.scale(2.0), k + 1);
            }
        }
        let k_block = match st.sys {
            System::Main => {
                // K: columns (c, d) with c' = d,
                // d' = -6 (y delta) p_{0,col} - (3 sq - 1) c - 2 g d
                let yd = &st.yd;
                let mut kb = zero_block();
                for col in 0..2 {
                    for k in 0..order {
                        let c: Vec<Interval> = (0..n).map(|i| kb[0][col][i]).collect();
                        let d: Vec<Interval> = (0..n).map(|i| kb[1][col][i]).collect();
                        let p_top: Vec<Interval> = (0..n).map(|i| p[0][col][i]).collect();
                        let ydp = conv(yd, &p_top, k);
                        let sqc = conv(sq, &c, k);
                        let gd = conv(g, &d, k);
                        kb[0][col][k + 1] = div_k(d[k], k + 1);
                        kb[1][col][k + 1] = div_k(
                            -(ydp.scale(6.0)) - sqc.scale(3.0) + c[k] - gd.scale(2.0),
                            k + 1,
                        );
                    }
                }
                Some(kb)
            }
            System::Scaled { .. } => None,
        };
        VarSeries {
            p,
            k_block,
            order,
            dim: st.dim(),
        }
    }

    fn eval_block(block: &[Vec<Vec<Interval>>], h: &Interval, upto: usize) -> [[Interval; 2]; 2] {
        let mut out = [[Interval::ZERO; 2]; 2];
        for (i, row) in block.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                let mut acc = c[upto];
                for k in (0..upto).rev() {
                    acc = acc * *h + c[k];
                }
                out[i][j] = acc;
            }
        }
        out
    }

    fn coeff_block(block: &[Vec<Vec<Interval>>], k: usize) -> [[Interval; 2]; 2] {
        let mut out = [[Interval::ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = block[i][j][k];
            }
        }
        out
    }

    /// Assemble the full matrix `sum_{k<=upto} M_k h^k`.
    pub fn eval(&self, h: &Interval, upto: usize) -> IMat {
        let pb = Self::eval_block(&self.p, h, upto);
        let kb = self.k_block.as_ref().map(|b| Self::eval_block(b, h, upto));
        self.assemble(pb, kb)
    }

    /// Full matrix coefficient of order `k`.
    pub fn coeff(&self, k: usize) -> IMat {
        let pb = Self::coeff_block(&self.p, k);
        let kb = self.k_block.as_ref().map(|b| Self::coeff_block(b, k));
        self.assemble(pb, kb)
    }

    fn assemble(&self, pb: [[Interval; 2]; 2], kb: Option<[[Interval; 2]; 2]>) -> IMat {
        let mut m = IMat::zeros(self.dim);
        if self.dim == 2 {
            for i in 0..2 {
                for j in 0..2 {
                    *m.at_mut(i, j) = pb[i][j];
                }
            }
        } else {
            let kb = kb.expect("main system has a K block");
            for i in 0..2 {
                for j in 0..2 {
                    *m.at_mut(i, j) = pb[i][j];
                    *m.at_mut(2 + i, 2 + j) = pb[i][j];
                    *m.at_mut(2 + i, j) = kb[i][j];
                }
            }
        }
        m
    }
}

/// Per-variable Taylor coefficients at `t`, the `taylor_coeffs` operation.
pub fn taylor_coeffs(
    state: &[Interval],
    t: &Interval,
    order: usize,
    system: &System,
) -> Result<Vec<IVec>, SeriesError> {
    let s = StateSeries::compute(system, state, t, order)?;
    Ok((0..=order).map(|k| s.coeff(k)).collect())
}
