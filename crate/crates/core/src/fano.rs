//! Polarized hyperbolic lattices: vectors of prescribed degree and norm,
//! admissibility, and Fano graphs of lines and conics.
//!
//! Vectors of degree `n` form the coset `(n/d)·x₀ + h⊥`, where `d` is the
//! depth and `x₀·h = d`. Since `h⊥` is negative definite, the norm condition
//! cuts out an ellipsoid: with `A = −Gram(h⊥)` and `x = x₀ + yK`,
//! `x² = t` iff `(y − c)ᵀA(y − c) = n²/h² − t` for the centre `c = A⁻¹b`,
//! `b_i = x₀·k_i`.

use std::ops::ControlFlow;

use serde::Serialize;

use crate::enumerate::Ellipsoid;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::lattice::EvenLattice;
use crate::matrix::{
    det_int, gcd_combination, gram_of, inverse, lll_reduce, row_basis, to_i128, to_i64, to_rational,
    vec_mat, IMat, QMat,
};
use crate::scalar::{rat, round_rat, Rational, Scalar};

/// A hyperbolic lattice with polarization, prepared for degree/norm queries.
#[derive(Debug, Clone)]
pub struct Polarized<S: Scalar = f64> {
    pub lattice: EvenLattice,
    h: Vec<i64>,
    hh: i64,
    depth: i64,
    /// Vector of degree `depth`.
    unit: Vec<i64>,
    /// LLL-reduced basis of `h⊥` (lattice coordinates).
    kbasis: IMat,
    ainv: QMat,
    ellipsoid: Ellipsoid<S>,
}

/// First violated condition of admissibility, with a witness vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    DivisiblePolarization,
    ExceptionalDivisor(Vec<i64>),
    TwoIsotropic(Vec<i64>),
    MissingConic(Vec<i64>),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::DivisiblePolarization => write!(f, "polarization divisible by 2"),
            Violation::ExceptionalDivisor(r) => write!(f, "exceptional divisor {r:?}"),
            Violation::TwoIsotropic(r) => write!(f, "2-isotropic vector {r:?}"),
            Violation::MissingConic(r) => write!(f, "missing conic {r:?}"),
        }
    }
}

impl<S: Scalar> Polarized<S> {
    pub fn new(lattice: EvenLattice) -> Result<Self> {
        let h = lattice.h()?.to_vec();
        let hh = lattice.norm(&h);
        if hh <= 0 {
            return Err(Error::Input("polarization must have positive square".into()));
        }
        let degrees = lattice.degree_row()?;
        let (depth, coeffs) = gcd_combination(&degrees);
        let unit = coeffs;
        let k = lattice.orthogonal_complement(&[h.clone()]);
        let neg: IMat = lattice.gram.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        let kbasis = if k.is_empty() {
            k
        } else {
            to_i64(&lll_reduce(&to_i128(&k), &neg, 0.99))
        };
        let a = gram_of(&kbasis, &neg);
        let ellipsoid = Ellipsoid::new(&a)
            .ok_or_else(|| Error::Input("lattice is not hyperbolic".into()))?;
        let ainv = if a.is_empty() { Vec::new() } else { inverse(&to_rational(&a)).expect("definite") };
        Ok(Polarized {
            lattice,
            h,
            hh,
            depth,
            unit,
            kbasis,
            ainv,
            ellipsoid,
        })
    }

    pub fn h(&self) -> &[i64] {
        &self.h
    }

    pub fn depth(&self) -> i64 {
        self.depth
    }

    pub fn complement_basis(&self) -> &IMat {
        &self.kbasis
    }

    /// Visits every `x` with `x·h = degree` and `x² = norm`.
    pub fn search<B>(&self, degree: i64, norm: i64, mut visit: impl FnMut(&[i64]) -> ControlFlow<B>) -> Option<B> {
        if degree % self.depth != 0 {
            return None;
        }
        let r = self.lattice.rank();
        let m = degree / self.depth;
        let mut x0: Vec<i64> = self.unit.iter().map(|v| v * m).collect();
        let b: Vec<Rational> = self
            .kbasis
            .iter()
            .map(|k| Rational::from_integer(self.lattice.dot(&x0, k) as i128))
            .collect();
        let mut c = if b.is_empty() { Vec::new() } else { vec_mat(&b, &self.ainv) };
        for (i, ci) in c.iter_mut().enumerate() {
            let s = round_rat(ci);
            if s != 0 {
                *ci -= Rational::from_integer(s);
                for j in 0..r {
                    x0[j] += s as i64 * self.kbasis[i][j];
                }
            }
        }
        let bound = rat(degree as i128 * degree as i128, self.hh as i128) - Rational::from_integer(norm as i128);
        if bound < Rational::from_integer(0) {
            return None;
        }
        let mut x = vec![0i64; r];
        self.ellipsoid.search(&c, &bound, |y| {
            x.copy_from_slice(&x0);
            for (yi, k) in y.iter().zip(&self.kbasis) {
                if *yi != 0 {
                    for j in 0..r {
                        x[j] += yi * k[j];
                    }
                }
            }
            if self.lattice.norm(&x) == norm {
                visit(&x)
            } else {
                ControlFlow::Continue(())
            }
        })
    }

    /// All vectors of given degree and norm, sorted.
    pub fn vectors(&self, degree: i64, norm: i64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        self.search::<()>(degree, norm, |x| {
            out.push(x.to_vec());
            ControlFlow::Continue(())
        });
        out.sort();
        out
    }

    pub fn first(&self, degree: i64, norm: i64, pred: impl Fn(&[i64]) -> bool) -> Option<Vec<i64>> {
        self.search(degree, norm, |x| {
            if pred(x) {
                ControlFlow::Break(x.to_vec())
            } else {
                ControlFlow::Continue(())
            }
        })
    }

    pub fn admissibility(&self) -> std::result::Result<(), Violation> {
        if self.h.iter().all(|x| x % 2 == 0) {
            return Err(Violation::DivisiblePolarization);
        }
        if let Some(r) = self.first(0, -2, |_| true) {
            return Err(Violation::ExceptionalDivisor(r));
        }
        if let Some(r) = self.first(2, 0, |_| true) {
            return Err(Violation::TwoIsotropic(r));
        }
        if let Some(ks) = self.lattice.kummer.as_ref() {
            if let Some(r) = self.first(1, -2, |x| ks.iter().any(|e| self.lattice.dot(x, e) < 0)) {
                return Err(Violation::MissingConic(r));
            }
        }
        Ok(())
    }

    pub fn is_admissible(&self) -> bool {
        self.admissibility().is_ok()
    }

    /// A vector with `u² = 0` and `u·h = 3`, if any.
    pub fn three_isotropic(&self) -> Option<Vec<i64>> {
        self.first(3, 0, |_| true)
    }

    pub fn is_triquadric(&self) -> bool {
        self.three_isotropic().is_none()
    }

    /// Lines, irreducible conics and their intersection graph.
    pub fn fano_graph(&self) -> Result<FanoGraph> {
        let lines = self.vectors(1, -2);
        let all = self.vectors(2, -2);
        let (conics, reducible): (Vec<_>, Vec<_>) = all
            .into_iter()
            .partition(|c| lines.iter().all(|l| self.lattice.dot(c, l) >= 0));
        let kummer = match &self.lattice.kummer {
            Some(ks) => ks
                .iter()
                .map(|e| {
                    conics
                        .binary_search(e)
                        .map(|i| lines.len() + i)
                        .map_err(|_| Error::NotGeometric("Kummer vector is not an irreducible conic".into()))
                })
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let verts: Vec<&Vec<i64>> = lines.iter().chain(conics.iter()).collect();
        let n = verts.len();
        let mut adj = vec![vec![0u8; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let m = self.lattice.dot(verts[i], verts[j]);
                if !(0..=u8::MAX as i64).contains(&m) {
                    return Err(Error::Invariant(format!(
                        "curves {:?} and {:?} meet with multiplicity {m}",
                        verts[i], verts[j]
                    )));
                }
                adj[i][j] = m as u8;
                adj[j][i] = m as u8;
            }
        }
        let colors = (0..n).map(|i| if i < lines.len() { 1 } else { 2 }).collect();
        Ok(FanoGraph {
            lines,
            conics,
            reducible,
            kummer,
            graph: Graph::new(colors, adj),
        })
    }
}

/// Colored graph of lines (color 1) and irreducible conics (color 2).
#[derive(Debug, Clone, Serialize)]
pub struct FanoGraph {
    pub lines: Vec<Vec<i64>>,
    pub conics: Vec<Vec<i64>>,
    pub reducible: Vec<Vec<i64>>,
    /// Vertex indices of the Kummer conics.
    pub kummer: Vec<usize>,
    pub graph: Graph,
}

/// Vertex color offset marking the Kummer conics.
pub const KUMMER_MARK: u8 = 4;

#[derive(Serialize)]
struct VertexJson<'a> {
    coords: &'a [i64],
    color: &'static str,
}

#[derive(Serialize)]
struct GraphJson<'a> {
    vertices: Vec<VertexJson<'a>>,
    edges: Vec<(usize, usize, u8)>,
    kummer: &'a [usize],
}

impl FanoGraph {
    pub fn n_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn n_conics(&self) -> usize {
        self.conics.len()
    }

    pub fn n_reducible(&self) -> usize {
        self.reducible.len()
    }

    pub fn vertex(&self, i: usize) -> &[i64] {
        if i < self.lines.len() {
            &self.lines[i]
        } else {
            &self.conics[i - self.lines.len()]
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.lines.iter().chain(self.conics.iter())
    }

    /// Graph with the Kummer conics recolored.
    pub fn marked_graph(&self) -> Graph {
        self.graph.marked(&self.kummer, KUMMER_MARK)
    }

    /// Unordered pairs of lines meeting once; each sum is a reducible conic.
    pub fn line_pairs(&self) -> usize {
        let k = self.lines.len();
        (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .filter(|&(i, j)| self.graph.mult(i, j) == 1)
            .count()
    }

    /// Index of the sublattice spanned by `h` and the vertices, if finite.
    pub fn fano_index(&self, lattice: &EvenLattice) -> Result<Option<i128>> {
        let mut rows: Vec<Vec<i128>> = self.vertices().map(|v| v.iter().map(|&x| x as i128).collect()).collect();
        rows.push(lattice.h()?.iter().map(|&x| x as i128).collect());
        let b = row_basis(&rows);
        if b.len() < lattice.rank() {
            return Ok(None);
        }
        Ok(Some(det_int(&b).abs()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vertices = self
            .vertices()
            .enumerate()
            .map(|(i, v)| VertexJson {
                coords: v,
                color: if i < self.lines.len() { "line" } else { "conic" },
            })
            .collect();
        serde_json::to_value(GraphJson {
            vertices,
            edges: self.graph.edges(),
            kummer: &self.kummer,
        })
        .expect("serializable")
    }

    pub fn to_dot(&self) -> String {
        self.graph.to_dot("fano", &self.kummer)
    }
}

/// The lattice `(Zgraph + Zh)/ker` spanned by `h` and abstract vertices.
pub fn fano_lattice(graph: &Graph) -> Result<EvenLattice> {
    let n = graph.len();
    let mut g = vec![vec![0i64; n + 1]; n + 1];
    for i in 0..n {
        g[i][i] = -2;
        for j in 0..n {
            if i != j {
                g[i][j] = graph.mult(i, j) as i64;
            }
        }
        let d = (graph.color(i) % KUMMER_MARK) as i64;
        g[i][n] = d;
        g[n][i] = d;
    }
    g[n][n] = 8;
    // Quotient by the kernel: restrict to a basis of the row space.
    let ker = crate::matrix::left_kernel(&to_i128(&g));
    let rows: Vec<Vec<i128>> = if ker.is_empty() {
        crate::matrix::identity(n + 1)
    } else {
        crate::matrix::right_kernel(&ker)
    };
    let basis = to_i64(&rows);
    let gram = gram_of(&basis, &g);
    let mut l = EvenLattice::new(gram)?;
    let hcol: Vec<i64> = (0..=n).map(|i| i64::from(i == n)).collect();
    // h lies in the saturated span; express it in the chosen basis.
    let bq = to_rational(&basis);
    let coords = crate::matrix::solve_left(&bq, &crate::matrix::rational_row(&hcol));
    if let Some(c) = coords.and_then(|c| crate::matrix::int_row(&c)) {
        l.h = Some(c);
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polarization_only() {
        let l = EvenLattice::new(vec![vec![8]]).unwrap().with_polarization(vec![1]).unwrap();
        let p = Polarized::<f64>::new(l).unwrap();
        let g = p.fano_graph().unwrap();
        assert_eq!((g.n_lines(), g.n_conics()), (0, 0));
        assert!(p.is_triquadric());
    }

    #[test]
    fn three_isotropic_detected() {
        let l = EvenLattice::new(vec![vec![8, 3], vec![3, 0]])
            .unwrap()
            .with_polarization(vec![1, 0])
            .unwrap();
        let p = Polarized::<Rational>::new(l).unwrap();
        assert!(!p.is_triquadric());
    }

    #[test]
    fn rejects_definite() {
        let l = EvenLattice::new(vec![vec![8, 0], vec![0, 2]])
            .unwrap()
            .with_polarization(vec![1, 0])
            .unwrap();
        assert!(Polarized::<f64>::new(l).is_err());
    }
}
