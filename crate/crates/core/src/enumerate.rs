//! Fincke-Pohst enumeration of integer points in ellipsoids.
//!
//! The decomposition and the search run in a generic scalar; floating types
//! widen every bound by their tolerance, so callers must re-check candidates
//! with integer arithmetic.

use std::ops::ControlFlow;

use crate::matrix::IMat;
use crate::scalar::{Rational, Scalar};

/// Quadratic-form decomposition `Q(x) = Σ q_ii (x_i + Σ_{j>i} q_ij x_j)²`.
#[derive(Debug, Clone)]
pub struct Ellipsoid<S: Scalar> {
    n: usize,
    q: Vec<Vec<S>>,
}

impl<S: Scalar> Ellipsoid<S> {
    /// Decomposes a positive definite integral Gram matrix; `None` when the
    /// matrix is not positive definite.
    pub fn new(a: &IMat) -> Option<Self> {
        let n = a.len();
        let mut q: Vec<Vec<S>> = vec![vec![S::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                q[i][j] = S::from_int(a[i][j]);
            }
        }
        for i in 0..n {
            for k in 0..i {
                let t = q[k][i].clone();
                for j in i..n {
                    let d = t.clone() * q[k][j].clone() / q[k][k].clone();
                    q[i][j] = q[i][j].clone() - d;
                }
            }
            if q[i][i] <= S::tolerance() {
                return None;
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                q[i][j] = q[i][j].clone() / q[i][i].clone();
            }
        }
        Some(Ellipsoid { n, q })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Visits every integer `y` with `(y - c)ᵀ A (y - c) ≤ r` (plus tolerance
    /// for inexact scalars). The visitor may stop the search early.
    pub fn search<B>(
        &self,
        center: &[Rational],
        bound: &Rational,
        mut visit: impl FnMut(&[i64]) -> ControlFlow<B>,
    ) -> Option<B> {
        let n = self.n;
        if n == 0 {
            return match visit(&[]) {
                ControlFlow::Break(b) => Some(b),
                ControlFlow::Continue(()) => None,
            };
        }
        let c: Vec<S> = center.iter().map(S::from_rational).collect();
        let r = S::from_rational(bound) + S::tolerance();
        if r < S::zero() {
            return None;
        }
        let mut y = vec![0i64; n];
        let mut hi = vec![0i64; n];
        let mut rem = vec![S::zero(); n + 1];
        let mut t = vec![S::zero(); n];
        rem[n] = r;
        let mut i = n - 1;
        // Set up level i from the already fixed coordinates above it.
        let setup = |i: usize, y: &[i64], rem: &[S], t: &mut [S]| -> Option<(i64, i64)> {
            let mut ti = c[i].clone();
            for j in i + 1..n {
                let d = S::from_int(y[j]) - c[j].clone();
                ti = ti - self.q[i][j].clone() * d;
            }
            t[i] = ti.clone();
            int_range(&ti, &rem[i + 1], &self.q[i][i])
        };
        match setup(i, &y, &rem, &mut t) {
            Some((l, h)) => {
                y[i] = l;
                hi[i] = h;
            }
            None => return None,
        }
        loop {
            if y[i] > hi[i] {
                if i == n - 1 {
                    return None;
                }
                i += 1;
                y[i] += 1;
                continue;
            }
            let d = S::from_int(y[i]) - t[i].clone();
            let used = self.q[i][i].clone() * d.clone() * d;
            rem[i] = rem[i + 1].clone() - used;
            if rem[i] < -S::tolerance() {
                y[i] += 1;
                continue;
            }
            if i == 0 {
                if let ControlFlow::Break(b) = visit(&y) {
                    return Some(b);
                }
                y[0] += 1;
                continue;
            }
            i -= 1;
            match setup(i, &y, &rem, &mut t) {
                Some((l, h)) => {
                    y[i] = l;
                    hi[i] = h;
                }
                None => {
                    i += 1;
                    y[i] += 1;
                }
            }
        }
    }

    /// Collects all points; convenient for small searches.
    pub fn points(&self, center: &[Rational], bound: &Rational) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        self.search::<()>(center, bound, |y| {
            out.push(y.to_vec());
            ControlFlow::Continue(())
        });
        out
    }
}

/// Integers `y` with `q (y - t)² ≤ rem`, as an inclusive range.
fn int_range<S: Scalar>(t: &S, rem: &S, q: &S) -> Option<(i64, i64)> {
    if *rem < -S::tolerance() {
        return None;
    }
    let tf = t.to_f64();
    let sf = (rem.to_f64().max(0.0) / q.to_f64()).sqrt();
    if S::EXACT {
        let fits = |y: i64| {
            let d = S::from_int(y) - t.clone();
            q.clone() * d.clone() * d <= *rem
        };
        let mut lo = (tf - sf).floor() as i64 - 1;
        let top = tf.floor() as i64 + 2;
        while lo <= top && !fits(lo) {
            lo += 1;
        }
        if lo > top {
            return None;
        }
        while fits(lo - 1) {
            lo -= 1;
        }
        let mut hi = (tf + sf).ceil() as i64 + 1;
        while hi > lo && !fits(hi) {
            hi -= 1;
        }
        while fits(hi + 1) {
            hi += 1;
        }
        Some((lo, hi))
    } else {
        let eps = S::tolerance().to_f64();
        let lo = (tf - sf - eps).ceil() as i64;
        let hi = (tf + sf + eps).floor() as i64;
        if lo > hi {
            None
        } else {
            Some((lo, hi))
        }
    }
}

/// Exact `(y - c)ᵀ A (y - c)` for verification.
pub fn exact_value(a: &IMat, center: &[Rational], y: &[i64]) -> Rational {
    let d: Vec<Rational> = y
        .iter()
        .zip(center)
        .map(|(v, c)| Rational::from_integer(*v as i128) - c)
        .collect();
    let mut s = Rational::from_integer(0);
    for i in 0..d.len() {
        for j in 0..d.len() {
            s += d[i] * d[j] * Rational::from_integer(a[i][j] as i128);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rint;

    #[test]
    fn roots_of_scaled_identity() {
        let a: IMat = (0..16)
            .map(|i| (0..16).map(|j| if i == j { 2 } else { 0 }).collect())
            .collect();
        let zero = vec![rint(0); 16];
        let e = Ellipsoid::<Rational>::new(&a).unwrap();
        let pts = e.points(&zero, &rint(2));
        assert_eq!(pts.iter().filter(|p| exact_value(&a, &zero, p) == rint(2)).count(), 32);
        let ef = Ellipsoid::<f64>::new(&a).unwrap();
        let pf = ef.points(&zero, &rint(2));
        assert_eq!(pf.len(), 33);
    }

    #[test]
    fn e8_roots() {
        let mut g = vec![vec![0i64; 8]; 8];
        for i in 0..8 {
            g[i][i] = 2;
        }
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)] {
            g[a][b] = -1;
            g[b][a] = -1;
        }
        let zero = vec![rint(0); 8];
        for count in [
            Ellipsoid::<Rational>::new(&g).unwrap().points(&zero, &rint(2)).len(),
            Ellipsoid::<f64>::new(&g).unwrap().points(&zero, &rint(2)).len(),
        ] {
            assert_eq!(count, 241);
        }
    }

    #[test]
    fn rejects_indefinite() {
        assert!(Ellipsoid::<f64>::new(&vec![vec![2, 3], vec![3, 2]]).is_none());
        assert!(Ellipsoid::<Rational>::new(&vec![vec![0]]).is_none());
    }
}
