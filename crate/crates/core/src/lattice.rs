//! Even integral lattices given by Gram matrices, optionally polarized and
//! carrying a family of sixteen Kummer vectors.

use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::discriminant::DiscriminantForm;
use crate::error::{Error, Result};
use crate::matrix::{
    bilinear, det_int, gram_of, int_row, inverse, mat_mul, rational_row, right_kernel, row_basis,
    signature, to_i128, to_i64, to_rational, vec_mat, IMat, QMat,
};
use crate::scalar::{rint, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvenLattice {
    pub gram: IMat,
    /// Coordinates of the polarization in the lattice basis.
    pub h: Option<Vec<i64>>,
    /// Coordinates of the sixteen Kummer vectors.
    pub kummer: Option<Vec<Vec<i64>>>,
}

impl EvenLattice {
    pub fn new(gram: IMat) -> Result<Self> {
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return Err(Error::Input("Gram matrix is not square".into()));
        }
        for i in 0..n {
            if gram[i][i] % 2 != 0 {
                return Err(Error::Input(format!("odd diagonal entry at {i}")));
            }
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::Input(format!("asymmetric entry at ({i},{j})")));
                }
            }
        }
        if n > 0 && det_int(&to_i128(&gram)) == 0 {
            return Err(Error::Input("degenerate Gram matrix".into()));
        }
        Ok(EvenLattice {
            gram,
            h: None,
            kummer: None,
        })
    }

    pub fn with_polarization(mut self, h: Vec<i64>) -> Result<Self> {
        if h.len() != self.rank() {
            return Err(Error::Input("polarization has wrong length".into()));
        }
        self.h = Some(h);
        Ok(self)
    }

    pub fn with_kummer(mut self, k: Vec<Vec<i64>>) -> Result<Self> {
        if k.iter().any(|v| v.len() != self.rank()) {
            return Err(Error::Input("Kummer vector has wrong length".into()));
        }
        self.kummer = Some(k);
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn det(&self) -> i128 {
        det_int(&to_i128(&self.gram))
    }

    /// `(positive, negative)` inertia indices.
    pub fn signature(&self) -> (usize, usize) {
        let (p, n, _) = signature(&to_rational(&self.gram));
        (p, n)
    }

    pub fn dot(&self, x: &[i64], y: &[i64]) -> i64 {
        bilinear(&self.gram, x, y)
    }

    pub fn norm(&self, x: &[i64]) -> i64 {
        self.dot(x, x)
    }

    /// Rational pairing for rows in `L ⊗ Q`.
    pub fn dot_q(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let gx = vec_mat(x, &to_rational(&self.gram));
        gx.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    pub fn h(&self) -> Result<&[i64]> {
        self.h
            .as_deref()
            .ok_or_else(|| Error::Input("lattice has no polarization".into()))
    }

    pub fn kummer(&self) -> Result<&[Vec<i64>]> {
        self.kummer
            .as_deref()
            .ok_or_else(|| Error::Input("lattice has no Kummer vectors".into()))
    }

    /// Row `x ↦ x·G·h` giving the degree of every basis vector.
    pub fn degree_row(&self) -> Result<Vec<i64>> {
        let h = self.h()?;
        Ok((0..self.rank())
            .map(|i| {
                let mut e = vec![0; self.rank()];
                e[i] = 1;
                self.dot(&e, h)
            })
            .collect())
    }

    /// Gcd of all degrees `h·x`.
    pub fn depth(&self) -> Result<i64> {
        Ok(self.degree_row()?.iter().fold(0i64, |g, &x| g.gcd(&x)))
    }

    pub fn discriminant(&self) -> DiscriminantForm {
        DiscriminantForm::from_gram(&self.gram)
    }

    pub fn inverse_gram(&self) -> QMat {
        inverse(&to_rational(&self.gram)).expect("nondegenerate")
    }

    /// Basis (coordinates) of the orthogonal complement of `vs`.
    pub fn orthogonal_complement(&self, vs: &[Vec<i64>]) -> IMat {
        if vs.is_empty() {
            return (0..self.rank())
                .map(|i| (0..self.rank()).map(|j| i64::from(i == j)).collect())
                .collect();
        }
        let a = mat_mul(&to_i128(vs), &to_i128(&self.gram));
        to_i64(&right_kernel(&a))
    }

    /// Primitive closure of the span of `vs`, as coordinates.
    pub fn saturation(&self, vs: &[Vec<i64>]) -> IMat {
        let ker = right_kernel(&to_i128(vs));
        if ker.is_empty() {
            return (0..self.rank())
                .map(|i| (0..self.rank()).map(|j| i64::from(i == j)).collect())
                .collect();
        }
        to_i64(&right_kernel(&ker))
    }

    /// Lattice spanned by the rows `basis` (assumed independent).
    pub fn sublattice(&self, basis: &[Vec<i64>]) -> Result<EvenLattice> {
        EvenLattice::new(gram_of(basis, &self.gram))
    }

    /// Re-expresses the lattice in a new basis given by rational rows.
    ///
    /// `h` and Kummer coordinates are carried over; they must be integral in
    /// the new basis.
    pub fn change_basis(&self, basis: &QMat) -> Result<EvenLattice> {
        let gq = to_rational(&self.gram);
        let g = mat_mul(&mat_mul(basis, &gq), &crate::matrix::transpose(basis));
        let gram = g
            .iter()
            .map(|r| int_row(r).ok_or_else(|| Error::Invariant("non-integral Gram".into())))
            .collect::<Result<IMat>>()?;
        let mut out = EvenLattice::new(gram)?;
        let binv = inverse(basis).ok_or_else(|| Error::Input("singular basis".into()))?;
        let conv = |x: &[i64]| -> Result<Vec<i64>> {
            int_row(&vec_mat(&rational_row(x), &binv))
                .ok_or_else(|| Error::Invariant("vector not in new lattice".into()))
        };
        if let Some(h) = &self.h {
            out.h = Some(conv(h)?);
        }
        if let Some(k) = &self.kummer {
            out.kummer = Some(k.iter().map(|v| conv(v)).collect::<Result<_>>()?);
        }
        Ok(out)
    }

    /// Overlattice generated by `self` and the rational rows `glue`.
    ///
    /// Returns the new lattice and its basis in old coordinates.
    pub fn overlattice(&self, glue: &[Vec<Rational>]) -> Result<(EvenLattice, QMat)> {
        let n = self.rank();
        let mut den: i128 = 1;
        for v in glue {
            for x in v {
                den = den.lcm(x.denom());
            }
        }
        let mut rows: Vec<Vec<i128>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { den } else { 0 }).collect())
            .collect();
        for v in glue {
            rows.push(v.iter().map(|x| (x * rint(den)).to_integer()).collect());
        }
        let h = row_basis(&rows);
        let basis: QMat = h
            .iter()
            .map(|r| r.iter().map(|&x| Rational::new(x, den)).collect())
            .collect();
        let out = self.change_basis(&basis)?;
        Ok((out, basis))
    }

    /// Integer coordinates of a rational row, if it lies in the lattice.
    pub fn contains(&self, x: &[Rational]) -> Option<Vec<i64>> {
        int_row(x)
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }
}

/// Pairings of a vector with all basis vectors: `G x`.
pub fn pairing_row(gram: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    gram.iter()
        .map(|r| {
            let s: i128 = r.iter().zip(x).map(|(a, b)| *a as i128 * *b as i128).sum();
            s as i64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e8() -> IMat {
        let mut g = vec![vec![0i64; 8]; 8];
        for i in 0..8 {
            g[i][i] = 2;
        }
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)] {
            g[a][b] = -1;
            g[b][a] = -1;
        }
        g
    }

    #[test]
    fn e8_unimodular() {
        let l = EvenLattice::new(e8()).unwrap();
        assert_eq!(l.det(), 1);
        assert_eq!(l.signature(), (8, 0));
        assert_eq!(l.discriminant().order(), 1);
    }

    #[test]
    fn rejects_odd_and_degenerate() {
        assert!(EvenLattice::new(vec![vec![1]]).is_err());
        assert!(EvenLattice::new(vec![vec![2, 2], vec![2, 2]]).is_err());
        assert!(EvenLattice::new(vec![vec![2, 1], vec![0, 2]]).is_err());
    }

    #[test]
    fn a1_overlattice_of_2a1() {
        // (x + y) / 2 has norm -2
        let l = EvenLattice::new(vec![vec![-4, 0], vec![0, -4]]).unwrap();
        let glue = vec![vec![Rational::new(1, 2), Rational::new(1, 2)]];
        let (m, _) = l.overlattice(&glue).unwrap();
        assert_eq!(m.det().abs(), 4);
        assert_eq!(m.signature(), (0, 2));
    }

    #[test]
    fn complement_and_saturation() {
        let l = EvenLattice::new(e8()).unwrap();
        let c = l.orthogonal_complement(&[vec![1, 0, 0, 0, 0, 0, 0, 0]]);
        assert_eq!(c.len(), 7);
        let s = l.sublattice(&c).unwrap();
        assert_eq!(s.det().abs(), 2);
        let sat = l.saturation(&[vec![2, 0, 0, 0, 0, 0, 0, 0]]);
        assert_eq!(sat.len(), 1);
        assert_eq!(sat[0].iter().map(|x| x.abs()).sum::<i64>(), 1);
    }
}
