//! Positive definite binary forms `[a, b, c]` with Gram matrix
//! `[[a, b], [b, c]]`, i.e. `ax² + 2bxy + cy²`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::discriminant::DiscriminantForm;
use crate::enumerate::Ellipsoid;
use crate::error::{Error, Result};
use crate::scalar::{rint, Rational};

pub type Mat2 = [[i64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

impl std::str::FromStr for BinaryForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<i64> = s
            .trim()
            .trim_start_matches('[')
            .trim_end_matches(']')
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Input(format!("bad form {s:?}: {e}")))?;
        match parts[..] {
            [a, b, c] => Ok(BinaryForm { a, b, c }),
            _ => Err(Error::Input(format!("bad form {s:?}"))),
        }
    }
}

fn mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut z = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            z[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    z
}

pub fn det2(m: &Mat2) -> i64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

impl BinaryForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        BinaryForm { a, b, c }
    }

    pub fn det(&self) -> i64 {
        self.a * self.c - self.b * self.b
    }

    pub fn is_even(&self) -> bool {
        self.a % 2 == 0 && self.c % 2 == 0
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && self.det() > 0
    }

    pub fn gram(&self) -> Vec<Vec<i64>> {
        vec![vec![self.a, self.b], vec![self.b, self.c]]
    }

    /// Form in the basis given by the rows of `m`: `m G mᵀ`.
    pub fn transform(&self, m: &Mat2) -> BinaryForm {
        let g = [[self.a, self.b], [self.b, self.c]];
        let mt = [[m[0][0], m[1][0]], [m[0][1], m[1][1]]];
        let r = mul(&mul(m, &g), &mt);
        BinaryForm::new(r[0][0], r[0][1], r[1][1])
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        (2 * b).abs() <= a && a <= c && (b >= 0 || (2 * b != -a && a != c))
    }

    /// Gauss reduction within the proper class; returns the reduced form
    /// and the transform `m` (det 1) with `m G mᵀ` reduced.
    pub fn reduce(&self) -> Result<(BinaryForm, Mat2)> {
        if !self.is_positive_definite() {
            return Err(Error::Input(format!("{self} is not positive definite")));
        }
        let mut f = *self;
        let mut m: Mat2 = [[1, 0], [0, 1]];
        loop {
            if f.c < f.a {
                let s: Mat2 = [[0, 1], [-1, 0]];
                f = f.transform(&s);
                m = mul(&s, &m);
                continue;
            }
            if (2 * f.b).abs() > f.a {
                // Nearest integer to -b/a, ties towards making b positive.
                let k = -Integer::div_floor(&(2 * f.b + f.a), &(2 * f.a));
                let t: Mat2 = [[1, 0], [k, 1]];
                f = f.transform(&t);
                m = mul(&t, &m);
                continue;
            }
            break;
        }
        if 2 * f.b == -f.a {
            let t: Mat2 = [[1, 0], [1, 1]];
            f = f.transform(&t);
            m = mul(&t, &m);
        }
        if f.a == f.c && f.b < 0 {
            let s: Mat2 = [[0, 1], [-1, 0]];
            f = f.transform(&s);
            m = mul(&s, &m);
        }
        debug_assert!(f.is_reduced());
        Ok((f, m))
    }

    pub fn reduced(&self) -> Result<BinaryForm> {
        Ok(self.reduce()?.0)
    }

    /// Representative of the class up to all of `GL₂(Z)`, with `b ≥ 0`.
    pub fn table_form(&self) -> Result<BinaryForm> {
        let r = self.reduced()?;
        Ok(BinaryForm::new(r.a, r.b.abs(), r.c))
    }

    pub fn properly_equivalent(&self, other: &BinaryForm) -> bool {
        matches!((self.reduced(), other.reduced()), (Ok(x), Ok(y)) if x == y)
    }

    /// Full integral orthogonal group: matrices `m` with `m G mᵀ = G`.
    pub fn automorphisms(&self) -> Result<Vec<Mat2>> {
        if !self.is_positive_definite() {
            return Err(Error::Input(format!("{self} is not positive definite")));
        }
        let e = Ellipsoid::<Rational>::new(&self.gram()).expect("positive definite");
        let zero = [rint(0), rint(0)];
        let q = |v: &[i64]| self.a * v[0] * v[0] + 2 * self.b * v[0] * v[1] + self.c * v[1] * v[1];
        let pts = e.points(&zero, &rint(self.a.max(self.c) as i128));
        let first: Vec<&Vec<i64>> = pts.iter().filter(|v| q(v) == self.a).collect();
        let second: Vec<&Vec<i64>> = pts.iter().filter(|v| q(v) == self.c).collect();
        let mut out = Vec::new();
        for x in &first {
            for y in &second {
                let m: Mat2 = [[x[0], x[1]], [y[0], y[1]]];
                if det2(&m).abs() == 1 && self.transform(&m) == *self {
                    out.push(m);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Rotations: automorphisms of determinant 1.
    pub fn rotations(&self) -> Result<Vec<Mat2>> {
        Ok(self.automorphisms()?.into_iter().filter(|m| det2(m) == 1).collect())
    }

    pub fn discriminant(&self) -> DiscriminantForm {
        DiscriminantForm::from_gram(&self.gram())
    }
}

/// All properly reduced even positive definite forms of determinant `det`.
pub fn even_forms(det: i64) -> Vec<BinaryForm> {
    let mut out = Vec::new();
    if det <= 0 {
        return out;
    }
    // Reduced forms satisfy 3a² ≤ 4 det.
    let mut a = 2;
    while 3 * a * a <= 4 * det {
        for b in -(a / 2)..=(a / 2) {
            let n = det + b * b;
            if n % a == 0 {
                let c = n / a;
                let f = BinaryForm::new(a, b, c);
                if c % 2 == 0 && f.is_reduced() {
                    out.push(f);
                }
            }
        }
        a += 2;
    }
    out.sort();
    out
}

/// Forms of `even_forms` collapsed under improper equivalence.
pub fn even_table_forms(det: i64) -> Vec<BinaryForm> {
    let mut v: Vec<BinaryForm> = even_forms(det)
        .into_iter()
        .map(|f| BinaryForm::new(f.a, f.b.abs(), f.c))
        .collect();
    v.sort();
    v.dedup();
    v
}

/// Table forms with discriminant form isomorphic to `target`.
pub fn forms_in_genus(target: &DiscriminantForm) -> Vec<BinaryForm> {
    even_table_forms(target.order() as i64)
        .into_iter()
        .filter(|f| f.discriminant().is_isomorphic(target))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_examples() {
        assert_eq!(BinaryForm::new(8, 4, 12).reduced().unwrap(), BinaryForm::new(8, 4, 12));
        assert_eq!(BinaryForm::new(12, -4, 8).table_form().unwrap(), BinaryForm::new(8, 4, 12));
        assert_eq!(BinaryForm::new(4, 0, 24).reduced().unwrap(), BinaryForm::new(4, 0, 24));
        let f = BinaryForm::new(10, 7, 5);
        let (r, m) = f.reduce().unwrap();
        assert_eq!(det2(&m), 1);
        assert_eq!(f.transform(&m), r);
        assert!(BinaryForm::new(2, 3, 2).reduce().is_err());
    }

    #[test]
    fn enumeration_examples() {
        assert!(even_table_forms(80).contains(&BinaryForm::new(8, 4, 12)));
        assert!(even_table_forms(96).contains(&BinaryForm::new(4, 0, 24)));
        assert_eq!(even_table_forms(4), vec![BinaryForm::new(2, 0, 2)]);
        // Brute-force oracle for small determinants.
        for det in 1..60 {
            let mut brute = Vec::new();
            for a in (2..=2 * det).step_by(2) {
                for b in -a..=a {
                    if (det + b * b) % a == 0 {
                        let c = (det + b * b) / a;
                        let f = BinaryForm::new(a, b, c);
                        if c % 2 == 0 && f.is_positive_definite() {
                            brute.push(f.reduced().unwrap());
                        }
                    }
                }
            }
            brute.sort();
            brute.dedup();
            assert_eq!(brute, even_forms(det), "det {det}");
        }
    }

    #[test]
    fn automorphism_orders() {
        assert_eq!(BinaryForm::new(2, 0, 4).automorphisms().unwrap().len(), 4);
        assert_eq!(BinaryForm::new(2, 0, 2).automorphisms().unwrap().len(), 8);
        assert_eq!(BinaryForm::new(2, 1, 2).automorphisms().unwrap().len(), 12);
        assert_eq!(BinaryForm::new(2, 1, 2).rotations().unwrap().len(), 6);
    }
}
