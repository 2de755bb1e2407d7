//! Dense integer and field linear algebra on small matrices.
//!
//! Integer routines work in `i128` internally; every returned basis is exact.
//! Matrices are row-major `Vec<Vec<_>>` since ranks stay below thirty.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::scalar::{Rational, Scalar};

pub type IMat = Vec<Vec<i64>>;
pub type QMat = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

pub fn to_i128(a: &[Vec<i64>]) -> Vec<Vec<i128>> {
    a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()
}

pub fn to_i64(a: &[Vec<i128>]) -> IMat {
    a.iter()
        .map(|r| {
            r.iter()
                .map(|&x| i64::try_from(x).expect("matrix entry exceeds i64"))
                .collect()
        })
        .collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn mat_mul<T>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>>
where
    T: Clone + Zero + std::ops::Mul<Output = T>,
{
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = T::zero();
                    for k in 0..inner {
                        s = s + row[k].clone() * b[k][j].clone();
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mat<T>(x: &[T], a: &[Vec<T>]) -> Vec<T>
where
    T: Clone + Zero + std::ops::Mul<Output = T>,
{
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    (0..cols)
        .map(|j| {
            let mut s = T::zero();
            for (k, xk) in x.iter().enumerate() {
                s = s + xk.clone() * a[k][j].clone();
            }
            s
        })
        .collect()
}

pub fn dot<T>(x: &[T], y: &[T]) -> T
where
    T: Clone + Zero + std::ops::Mul<Output = T>,
{
    x.iter()
        .zip(y)
        .fold(T::zero(), |s, (a, b)| s + a.clone() * b.clone())
}

/// `x^T g y` for integer data.
pub fn bilinear(g: &[Vec<i64>], x: &[i64], y: &[i64]) -> i64 {
    let mut s: i128 = 0;
    for (i, xi) in x.iter().enumerate() {
        if *xi == 0 {
            continue;
        }
        let row = &g[i];
        let mut t: i128 = 0;
        for (j, yj) in y.iter().enumerate() {
            t += row[j] as i128 * *yj as i128;
        }
        s += *xi as i128 * t;
    }
    i64::try_from(s).expect("bilinear value exceeds i64")
}

/// Gram matrix of the rows of `b` under the form `g`.
pub fn gram_of(b: &[Vec<i64>], g: &[Vec<i64>]) -> IMat {
    let bg = mat_mul(&to_i128(b), &to_i128(g));
    let bt = transpose(&to_i128(b));
    to_i64(&mat_mul(&bg, &bt))
}

/// Row Hermite normal form with transform: `u * a = h`, `u` unimodular.
///
/// Returns `(h, u, rank)`. Rows `rank..` of `h` vanish and the matching rows
/// of `u` span the left kernel of `a`.
pub fn hnf_transform(a: &[Vec<i128>]) -> (Vec<Vec<i128>>, Vec<Vec<i128>>, usize) {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut h = a.to_vec();
    let mut u = identity(m);
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..m {
                if h[i][col] != 0 && best.is_none_or(|b| h[i][col].abs() < h[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap(r, b);
            u.swap(r, b);
            let mut done = true;
            for i in r + 1..m {
                if h[i][col] != 0 {
                    let q = Integer::div_floor(&h[i][col], &h[r][col]);
                    sub_row(&mut h, i, r, q);
                    sub_row(&mut u, i, r, q);
                    if h[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[r][col] == 0 {
            continue;
        }
        if h[r][col] < 0 {
            h[r].iter_mut().for_each(|x| *x = -*x);
            u[r].iter_mut().for_each(|x| *x = -*x);
        }
        for i in 0..r {
            let q = Integer::div_floor(&h[i][col], &h[r][col]);
            if q != 0 {
                sub_row(&mut h, i, r, q);
                sub_row(&mut u, i, r, q);
            }
        }
        r += 1;
    }
    (h, u, r)
}

fn sub_row(a: &mut [Vec<i128>], i: usize, j: usize, q: i128) {
    let (src, dst) = if i < j {
        let (lo, hi) = a.split_at_mut(j);
        (&hi[0], &mut lo[i])
    } else {
        let (lo, hi) = a.split_at_mut(i);
        (&lo[j], &mut hi[0])
    };
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        *d -= q * *s;
    }
}

/// Basis (nonzero HNF rows) of the Z-span of the rows of `a`.
pub fn row_basis(a: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let (h, _, r) = hnf_transform(a);
    h.into_iter().take(r).collect()
}

/// Basis of `{x : x a = 0}` over the integers, size reduced.
pub fn left_kernel(a: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let (_, u, r) = hnf_transform(a);
    let ker: Vec<Vec<i128>> = u.into_iter().skip(r).collect();
    if ker.is_empty() {
        return ker;
    }
    let n = ker[0].len();
    let id: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    lll_reduce(&ker, &id, 0.99)
}

/// Basis of `{x : a x = 0}` over the integers.
pub fn right_kernel(a: &[Vec<i128>]) -> Vec<Vec<i128>> {
    if a.is_empty() {
        return Vec::new();
    }
    left_kernel(&transpose(a))
}

/// Smith normal form: returns `(d, u, v)` with `u a v = diag(d)`.
///
/// Diagonal entries are nonnegative and each divides the next.
pub fn smith(a: &[Vec<i128>]) -> (Vec<i128>, Vec<Vec<i128>>, Vec<Vec<i128>>) {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut s = a.to_vec();
    let mut u = identity(m);
    let mut v = identity(n);
    let k = m.min(n);
    for t in 0..k {
        loop {
            let mut piv: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if s[i][j] != 0
                        && piv.is_none_or(|(pi, pj)| s[i][j].abs() < s[pi][pj].abs())
                    {
                        piv = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = piv else {
                return finish_smith(s, u, v, k);
            };
            s.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut s, t, pj);
            swap_cols(&mut v, t, pj);
            let p = s[t][t];
            let mut clean = true;
            for i in t + 1..m {
                let q = Integer::div_floor(&s[i][t], &p);
                if q != 0 {
                    sub_row(&mut s, i, t, q);
                    sub_row(&mut u, i, t, q);
                }
                if s[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = Integer::div_floor(&s[t][j], &p);
                if q != 0 {
                    sub_col(&mut s, j, t, q);
                    sub_col(&mut v, j, t, q);
                }
                if s[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let mut bad: Option<usize> = None;
            'outer: for i in t + 1..m {
                for j in t + 1..n {
                    if s[i][j] % p != 0 {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    sub_row(&mut s, t, i, -1);
                    sub_row(&mut u, t, i, -1);
                }
                None => break,
            }
        }
        if s[t][t] < 0 {
            s[t].iter_mut().for_each(|x| *x = -*x);
            u[t].iter_mut().for_each(|x| *x = -*x);
        }
    }
    finish_smith(s, u, v, k)
}

fn finish_smith(
    s: Vec<Vec<i128>>,
    u: Vec<Vec<i128>>,
    v: Vec<Vec<i128>>,
    k: usize,
) -> (Vec<i128>, Vec<Vec<i128>>, Vec<Vec<i128>>) {
    let d = (0..k).map(|i| s[i][i]).collect();
    (d, u, v)
}

fn swap_cols(a: &mut [Vec<i128>], i: usize, j: usize) {
    if i != j {
        for r in a.iter_mut() {
            r.swap(i, j);
        }
    }
}

fn sub_col(a: &mut [Vec<i128>], j: usize, t: usize, q: i128) {
    for r in a.iter_mut() {
        r[j] -= q * r[t];
    }
}

/// Determinant by fraction-free elimination.
pub fn det_int(a: &[Vec<i128>]) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m = a.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

pub fn det_i64(a: &[Vec<i64>]) -> i128 {
    det_int(&to_i128(a))
}

fn is_zero_s<S: Scalar>(x: &S) -> bool {
    if S::EXACT {
        x.is_zero()
    } else {
        x.abs() <= S::tolerance()
    }
}

/// Inverse over a field; `None` when singular.
pub fn inverse<S: Scalar>(a: &[Vec<S>]) -> Option<Vec<Vec<S>>> {
    let n = a.len();
    let mut m: Vec<Vec<S>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = pick_pivot(&m, c, c)?;
        m.swap(c, p);
        let inv = S::one() / m[c][c].clone();
        for x in m[c].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..2 * n {
                    let t = m[c][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn pick_pivot<S: Scalar>(m: &[Vec<S>], col: usize, from: usize) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in from..m.len() {
        if is_zero_s(&m[i][col]) {
            continue;
        }
        if S::EXACT {
            return Some(i);
        }
        if best.is_none_or(|b| m[i][col].abs() > m[b][col].abs()) {
            best = Some(i);
        }
    }
    best
}

/// Rank over a field.
pub fn rank<S: Scalar>(a: &[Vec<S>]) -> usize {
    if a.is_empty() {
        return 0;
    }
    let mut m = a.to_vec();
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(p) = pick_pivot(&m, c, r) else { continue };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if !m[i][c].is_zero() {
                let f = m[i][c].clone() / m[r][c].clone();
                for j in c..cols {
                    let t = m[r][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - t;
                }
            }
        }
        r += 1;
    }
    r
}

/// Signature `(positive, negative, zero)` of a symmetric matrix by
/// congruence diagonalization.
pub fn signature<S: Scalar>(g: &[Vec<S>]) -> (usize, usize, usize) {
    let mut a = g.to_vec();
    let mut active: Vec<usize> = (0..a.len()).collect();
    let (mut pos, mut neg) = (0, 0);
    loop {
        let diag = active.iter().copied().filter(|&i| !is_zero_s(&a[i][i])).fold(
            None,
            |best: Option<usize>, i| match best {
                None => Some(i),
                Some(b) if !S::EXACT && a[i][i].abs() > a[b][b].abs() => Some(i),
                keep => keep,
            },
        );
        if let Some(i) = diag {
            let p = a[i][i].clone();
            if p > S::zero() {
                pos += 1;
            } else {
                neg += 1;
            }
            active.retain(|&x| x != i);
            for &j in &active {
                let f = a[j][i].clone() / p.clone();
                if f.is_zero() {
                    continue;
                }
                for &k in &active {
                    let t = f.clone() * a[i][k].clone();
                    a[j][k] = a[j][k].clone() - t;
                }
            }
            continue;
        }
        let off = active.iter().find_map(|&i| {
            active
                .iter()
                .find(|&&j| j != i && !is_zero_s(&a[i][j]))
                .map(|&j| (i, j))
        });
        let Some((i, j)) = off else { break };
        let n = a.len();
        for k in 0..n {
            let t = a[j][k].clone();
            a[i][k] = a[i][k].clone() + t;
        }
        for k in 0..n {
            let t = a[k][j].clone();
            a[k][i] = a[k][i].clone() + t;
        }
    }
    (pos, neg, active.len())
}

pub fn to_rational(a: &[Vec<i64>]) -> QMat {
    a.iter()
        .map(|r| r.iter().map(|&x| Rational::from_integer(x as i128)).collect())
        .collect()
}

pub fn to_scalar<S: Scalar>(a: &[Vec<i64>]) -> Vec<Vec<S>> {
    a.iter()
        .map(|r| r.iter().map(|&x| S::from_int(x)).collect())
        .collect()
}

/// Solve `x a = b` for a row vector `x` over the rationals.
pub fn solve_left(a: &QMat, b: &[Rational]) -> Option<Vec<Rational>> {
    let at = transpose(a);
    let n = at.len();
    let m = if n == 0 { 0 } else { at[0].len() };
    let mut aug: QMat = at
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(*bi);
            row
        })
        .collect();
    let mut pivcols = Vec::new();
    let mut r = 0;
    for c in 0..m {
        let Some(p) = (r..n).find(|&i| !aug[i][c].is_zero()) else { continue };
        aug.swap(r, p);
        let inv = Rational::one() / aug[r][c];
        for x in aug[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..n {
            if i != r && !aug[i][c].is_zero() {
                let f = aug[i][c];
                for j in 0..=m {
                    let t = aug[r][j] * f;
                    aug[i][j] -= t;
                }
            }
        }
        pivcols.push(c);
        r += 1;
    }
    if aug[r..].iter().any(|row| !row[m].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); m];
    for (i, &c) in pivcols.iter().enumerate() {
        x[c] = aug[i][m];
    }
    Some(x)
}

/// LLL reduction of the rows of `basis` under the positive definite form `g`.
///
/// Gram-Schmidt data is kept in `f64`; all basis updates are integral.
pub fn lll_reduce(basis: &[Vec<i128>], g: &[Vec<i64>], delta: f64) -> Vec<Vec<i128>> {
    let k = basis.len();
    if k == 0 {
        return Vec::new();
    }
    let gi = to_i128(g);
    let mut b = basis.to_vec();
    let ip = |x: &[i128], y: &[i128]| -> f64 {
        let gy: Vec<i128> = gi.iter().map(|r| dot(r, y)).collect();
        dot(x, &gy) as f64
    };
    let gso = |b: &[Vec<i128>]| -> (Vec<Vec<f64>>, Vec<f64>) {
        let k = b.len();
        let mut mu = vec![vec![0.0; k]; k];
        let mut bb = vec![0.0; k];
        let mut gram = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..=i {
                gram[i][j] = ip(&b[i], &b[j]);
                gram[j][i] = gram[i][j];
            }
        }
        for i in 0..k {
            for j in 0..i {
                let mut s = gram[i][j];
                for l in 0..j {
                    s -= mu[j][l] * mu[i][l] * bb[l];
                }
                mu[i][j] = if bb[j] != 0.0 { s / bb[j] } else { 0.0 };
            }
            let mut s = gram[i][i];
            for l in 0..i {
                s -= mu[i][l] * mu[i][l] * bb[l];
            }
            bb[i] = s;
        }
        (mu, bb)
    };
    let mut i = 1;
    let mut guard = 0usize;
    while i < k {
        guard += 1;
        if guard > 100_000 {
            break;
        }
        let (mu, _) = gso(&b);
        for j in (0..i).rev() {
            let q = mu[i][j].round();
            if q != 0.0 {
                let q = q as i128;
                sub_row(&mut b, i, j, q);
            }
        }
        let (mu, bb) = gso(&b);
        if bb[i] < (delta - mu[i][i - 1] * mu[i][i - 1]) * bb[i - 1] {
            b.swap(i, i - 1);
            i = i.max(2) - 1;
        } else {
            i += 1;
        }
    }
    b
}

/// Extended gcd: `(g, x)` with `g = gcd(a)` and `sum x_i a_i = g`.
pub fn gcd_combination(a: &[i64]) -> (i64, Vec<i64>) {
    let mut g: i128 = 0;
    let mut coeffs = vec![0i128; a.len()];
    for (i, &ai) in a.iter().enumerate() {
        let e = (g).extended_gcd(&(ai as i128));
        let (ng, s, t) = (e.gcd, e.x, e.y);
        for c in coeffs.iter_mut().take(i) {
            *c *= s;
        }
        coeffs[i] = t;
        g = ng;
    }
    if g < 0 {
        g = -g;
        coeffs.iter_mut().for_each(|c| *c = -*c);
    }
    (g as i64, coeffs.into_iter().map(|c| c as i64).collect())
}

pub fn is_integral(v: &[Rational]) -> bool {
    v.iter().all(|x| x.is_integer())
}

pub fn rational_row(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_integer(x as i128)).collect()
}

pub fn int_row(v: &[Rational]) -> Option<Vec<i64>> {
    v.iter()
        .map(|x| {
            if x.is_integer() {
                i64::try_from(x.to_integer()).ok()
            } else {
                None
            }
        })
        .collect()
}
