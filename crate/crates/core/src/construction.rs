//! Polarized Kummer lattices built from explicit generators.
//!
//! A frame is the list of generating vectors `e_0..e_15, h, u_1..u_k` with
//! their integral Gram matrix. A framed lattice stores its basis as rational
//! rows in frame coordinates, so supports and degrees of any vector can be
//! read off directly.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kummer::{mask_to_string, popcount, KummerStructure, Mask, FULL};
use crate::lattice::EvenLattice;
use crate::matrix::{
    int_row, inverse, mat_mul, rational_row, row_basis, to_rational, transpose, vec_mat, IMat,
    QMat,
};
use crate::scalar::{rat, rint, Rational};

/// Index of the polarization in every frame.
pub const H: usize = 16;
/// Number of Kummer vectors.
pub const KUMMER: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pattern {
    /// Degree `u·h`: 1 for lines, 2 for conics.
    pub degree: i64,
    /// Kummer vectors met once.
    pub supp1: Mask,
    /// Kummer vectors met twice.
    pub supp2: Mask,
}

impl Pattern {
    pub fn p(&self) -> usize {
        popcount(self.supp1)
    }

    pub fn q(&self) -> usize {
        popcount(self.supp2)
    }

    /// Short name such as `l6-0` or `c12-3`.
    pub fn kind(&self) -> String {
        let c = if self.degree == 1 { 'l' } else { 'c' };
        format!("{c}{}-{}", self.p(), self.q())
    }

    /// Pairing vector with the frame `e_0..e_15, h`.
    pub fn frame_products(&self) -> Vec<i64> {
        let mut v: Vec<i64> = (0..KUMMER)
            .map(|i| {
                if self.supp1 >> i & 1 == 1 {
                    1
                } else if self.supp2 >> i & 1 == 1 {
                    2
                } else {
                    0
                }
            })
            .collect();
        v.push(self.degree);
        v
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}|{}]",
            self.kind(),
            mask_to_string(self.supp1),
            mask_to_string(self.supp2)
        )
    }
}

/// Norm of the projection of a `(-2)`-vector with pattern `(p, q)` and degree
/// `eps` to `Q(δ, h)`: `-p/2 - 2q + (p + 2q + eps)^2 / 40`.
pub fn projected_norm(p: usize, q: usize, eps: i64) -> Rational {
    let (p, q) = (p as i128, q as i128);
    let s = p + 2 * q + eps as i128;
    rat(-p, 2) - rint(2 * q) + rat(s * s, 40)
}

/// Outcome of the hyperbolicity test for `Λ̃ + Zu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sylvester {
    /// Projection norm above `-2`: hyperbolic of rank 18.
    Allowed,
    /// Projection norm below `-2`: not hyperbolic.
    Excluded,
    /// Projection norm exactly `-2`: `u` lies in `Λ̃ ⊗ Q`.
    Corank0,
}

pub fn sylvester(p: usize, q: usize, eps: i64) -> Sylvester {
    let v = projected_norm(p, q, eps);
    let m2 = rint(-2);
    if v > m2 {
        Sylvester::Allowed
    } else if v == m2 {
        Sylvester::Corank0
    } else {
        Sylvester::Excluded
    }
}

#[derive(Debug, Clone)]
pub struct FramedLattice {
    /// Gram matrix of the frame vectors.
    pub frame: IMat,
    /// Basis rows in frame coordinates.
    pub basis: QMat,
    /// The lattice in its own basis, with polarization and Kummer vectors.
    pub lattice: EvenLattice,
    binv: QMat,
}

impl FramedLattice {
    /// Z-span of `gens` (frame coordinates), which must have full rank.
    pub fn from_generators(frame: IMat, gens: &QMat) -> Result<FramedLattice> {
        let f = frame.len();
        let mut den: i128 = 1;
        for g in gens {
            for x in g {
                den = den.lcm(x.denom());
            }
        }
        let rows: Vec<Vec<i128>> = gens
            .iter()
            .map(|g| g.iter().map(|x| (x * rint(den)).to_integer()).collect())
            .collect();
        let hb = row_basis(&rows);
        if hb.len() != f {
            return Err(Error::Input(format!(
                "generators span rank {} in a frame of size {f}",
                hb.len()
            )));
        }
        let basis: QMat = hb
            .iter()
            .map(|r| r.iter().map(|&x| Rational::new(x, den)).collect())
            .collect();
        Self::from_basis(frame, basis)
    }

    pub fn from_basis(frame: IMat, basis: QMat) -> Result<FramedLattice> {
        let fq = to_rational(&frame);
        let g = mat_mul(&mat_mul(&basis, &fq), &transpose(&basis));
        let gram = g
            .iter()
            .map(|r| int_row(r).ok_or_else(|| Error::Invariant("non-integral pairing".into())))
            .collect::<Result<IMat>>()?;
        let binv = inverse(&basis).ok_or_else(|| Error::Input("degenerate frame".into()))?;
        let mut lattice = EvenLattice::new(gram)?;
        let unit = |i: usize| -> Vec<Rational> {
            (0..frame.len())
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        };
        let coords = |i: usize| -> Result<Vec<i64>> {
            int_row(&vec_mat(&unit(i), &binv))
                .ok_or_else(|| Error::Invariant(format!("frame vector {i} not in lattice")))
        };
        lattice.h = Some(coords(H)?);
        lattice.kummer = Some((0..KUMMER).map(coords).collect::<Result<_>>()?);
        Ok(FramedLattice {
            frame,
            basis,
            lattice,
            binv,
        })
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    /// Frame coordinates of a lattice vector.
    pub fn to_frame(&self, x: &[i64]) -> Vec<Rational> {
        vec_mat(&rational_row(x), &self.basis)
    }

    /// Rational lattice coordinates of a frame-coordinate row.
    pub fn coords_of_frame(&self, y: &[Rational]) -> Vec<Rational> {
        vec_mat(y, &self.binv)
    }

    /// Lattice coordinates of a frame-coordinate row, if it lies in the lattice.
    pub fn from_frame(&self, y: &[Rational]) -> Option<Vec<i64>> {
        int_row(&vec_mat(y, &self.binv))
    }

    /// Pairings of a lattice vector with every frame vector.
    pub fn frame_products(&self, x: &[i64]) -> Vec<i64> {
        let y = self.to_frame(x);
        let p = vec_mat(&y, &to_rational(&self.frame));
        int_row(&p).expect("frame vectors lie in the lattice")
    }

    /// Pattern of a lattice vector relative to the Kummer vectors.
    pub fn pattern(&self, x: &[i64]) -> Pattern {
        let p = self.frame_products(x);
        let mut s1 = 0u16;
        let mut s2 = 0u16;
        for i in 0..KUMMER {
            match p[i] {
                1 => s1 |= 1 << i,
                2 => s2 |= 1 << i,
                _ => {}
            }
        }
        Pattern {
            degree: p[H],
            supp1: s1,
            supp2: s2,
        }
    }

    /// `self + Zw`, where `w² = norm` and `w` pairs with the frame as given.
    pub fn extend(&self, products: &[i64], norm: i64) -> Result<FramedLattice> {
        let f = self.frame.len();
        if products.len() != f {
            return Err(Error::Input("product vector has wrong length".into()));
        }
        let mut frame = self.frame.clone();
        for (row, &c) in frame.iter_mut().zip(products) {
            row.push(c);
        }
        let mut last = products.to_vec();
        last.push(norm);
        frame.push(last);
        let mut basis: QMat = self
            .basis
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.push(Rational::zero());
                r
            })
            .collect();
        basis.push((0..=f).map(|j| if j == f { Rational::one() } else { Rational::zero() }).collect());
        Self::from_basis(frame, basis)
    }

    /// Overlattice generated by extra rational rows in lattice coordinates.
    pub fn overlattice(&self, glue: &QMat) -> Result<FramedLattice> {
        let (_, nb) = self.lattice.overlattice(glue)?;
        let basis = mat_mul(&nb, &self.basis);
        Self::from_basis(self.frame.clone(), basis)
    }

    /// Lattice coordinates of the saturation of `Z⟨e_i, h⟩` in this lattice.
    pub fn kummer_hull(&self) -> IMat {
        let mut gens = self.lattice.kummer.clone().unwrap();
        gens.push(self.lattice.h.clone().unwrap());
        self.lattice.saturation(&gens)
    }

    /// Frame Gram restricted to the first `n` frame vectors, inverted.
    pub fn frame_inverse_prefix(&self, n: usize) -> QMat {
        let sub: IMat = self.frame[..n].iter().map(|r| r[..n].to_vec()).collect();
        inverse(&to_rational(&sub)).expect("nondegenerate prefix")
    }
}

/// Frame Gram matrix for `e_0..e_15, h`.
pub fn base_frame() -> IMat {
    let mut g = vec![vec![0i64; 17]; 17];
    for i in 0..KUMMER {
        g[i][i] = -2;
        g[i][H] = 2;
        g[H][i] = 2;
    }
    g[H][H] = 8;
    g
}

fn half_sum(m: Mask) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); 17];
    for (i, x) in v.iter_mut().enumerate().take(KUMMER) {
        if m >> i & 1 == 1 {
            *x = rat(1, 2);
        }
    }
    v
}

/// The Kummer lattice: `Zδ` extended by `½ω̄` for `ω ∈ o_star`, inside the
/// base frame (the polarization coordinate is zero).
pub fn kummer_generators(ks: &KummerStructure) -> QMat {
    let mut gens: QMat = (0..KUMMER)
        .map(|i| {
            let mut v = vec![Rational::zero(); 17];
            v[i] = Rational::one();
            v
        })
        .collect();
    gens.extend(ks.o_star.iter().map(|&o| half_sum(o)));
    gens
}

/// Generators of the minimal lattice: Kummer lattice, `h`, and
/// `½h − ½κ̄` for `κ ∈ k_star`.
pub fn lambda_generators(ks: &KummerStructure) -> QMat {
    let mut gens = kummer_generators(ks);
    let mut h = vec![Rational::zero(); 17];
    h[H] = Rational::one();
    gens.push(h);
    for &k in &ks.k_star {
        let mut v: Vec<Rational> = half_sum(k).into_iter().map(|x| -x).collect();
        v[H] = rat(1, 2);
        gens.push(v);
    }
    gens
}

/// The minimal polarized Kummer lattice of rank 17.
pub fn lambda_tilde(ks: &KummerStructure) -> Result<FramedLattice> {
    FramedLattice::from_generators(base_frame(), &lambda_generators(ks))
}

/// Kummer lattice of rank 16 with Gram matrix in its own basis.
pub fn kummer_lattice(ks: &KummerStructure) -> Result<EvenLattice> {
    let gens: QMat = kummer_generators(ks)
        .into_iter()
        .map(|mut r| {
            r.truncate(KUMMER);
            r
        })
        .collect();
    let frame: IMat = base_frame()[..KUMMER].iter().map(|r| r[..KUMMER].to_vec()).collect();
    let mut den: i128 = 2;
    for g in &gens {
        for x in g {
            den = den.lcm(x.denom());
        }
    }
    let rows: Vec<Vec<i128>> = gens
        .iter()
        .map(|g| g.iter().map(|x| (x * rint(den)).to_integer()).collect())
        .collect();
    let basis: QMat = row_basis(&rows)
        .iter()
        .map(|r| r.iter().map(|&x| Rational::new(x, den)).collect())
        .collect();
    let g = mat_mul(&mat_mul(&basis, &to_rational(&frame)), &transpose(&basis));
    let gram = g
        .iter()
        .map(|r| int_row(r).ok_or_else(|| Error::Invariant("non-integral pairing".into())))
        .collect::<Result<IMat>>()?;
    EvenLattice::new(gram)
}

/// The vector `δ̄ + h` in frame coordinates.
pub fn theta_frame(frame_len: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); frame_len];
    for x in v.iter_mut().take(KUMMER + 1) {
        *x = Rational::one();
    }
    v
}

/// The sixteen conics `½h + ½e_s − ½ Σ_{t ∈ κ∖s} e_t`, for `s ∈ κ ∈ K₄`.
pub fn bb_conics(ks: &KummerStructure) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    for k in ks.k4() {
        for s in crate::kummer::points(k) {
            let mut v = vec![Rational::zero(); 17];
            v[H] = rat(1, 2);
            for t in crate::kummer::points(k) {
                v[t] = if t == s { rat(1, 2) } else { rat(-1, 2) };
            }
            out.push(v);
        }
    }
    out
}

/// Class `{U ⊆ δ : 2|U| ≡ u² mod 8, ½(u + Ū) ∈ N}` for `u ∈ N` orthogonal to
/// the Kummer vectors.
pub fn kernel_class(n: &FramedLattice, u: &[i64]) -> Result<Vec<Mask>> {
    let f = n.frame.len();
    let prods = n.frame_products(u);
    if prods[..KUMMER].iter().any(|&x| x != 0) {
        return Err(Error::Input("vector is not orthogonal to the Kummer vectors".into()));
    }
    let u2 = n.lattice.norm(u);
    let uf = n.to_frame(u);
    let mut out = Vec::new();
    for m in 0..=FULL {
        if (2 * popcount(m) as i64 - u2).rem_euclid(8) != 0 {
            continue;
        }
        let v: Vec<Rational> = (0..f)
            .map(|j| {
                let e = if j < KUMMER && m >> j & 1 == 1 { Rational::one() } else { Rational::zero() };
                (uf[j] + e) / rint(2)
            })
            .collect();
        if n.from_frame(&v).is_some() {
            out.push(m);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_formula_examples() {
        assert_eq!(projected_norm(4, 0, 1), rat(-2 * 40 + 25, 40));
        assert_eq!(sylvester(12, 3, 2), Sylvester::Corank0);
        assert_eq!(sylvester(0, 0, 2), Sylvester::Allowed);
        assert_eq!(sylvester(2, 1, 1), Sylvester::Excluded);
    }

    #[test]
    fn lambda_invariants() {
        let ks = KummerStructure::new().unwrap();
        let l = lambda_tilde(&ks).unwrap();
        assert_eq!(l.rank(), 17);
        assert_eq!(l.lattice.det().abs(), 640);
        assert_eq!(l.lattice.signature(), (1, 16));
        let s = kummer_lattice(&ks).unwrap();
        assert_eq!(s.det().abs(), 64);
    }
}
