//! Isometries of a polarized lattice induced by automorphisms of its Fano
//! graph (with the Kummer conics marked).
//!
//! The vertices and `h` span the lattice rationally, so a graph automorphism
//! extends to a rational isometry fixing `h`; it preserves the lattice iff
//! its matrix in lattice coordinates is integral. Lattices sharing a graph
//! are compared in coordinates of a vertex basis chosen from the canonical
//! labeling, minimized over the automorphism group.

use std::collections::{HashMap, HashSet};

use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fano::FanoGraph;
use crate::graph::{AutGroup, Perm};
use crate::lattice::EvenLattice;
use crate::matrix::{int_row, inverse, mat_mul, rank, rational_row, row_basis, IMat, QMat};
use crate::scalar::Rational;

/// `a` then `b`.
pub fn then(a: &[u32], b: &[u32]) -> Perm {
    a.iter().map(|&x| b[x as usize]).collect()
}

pub fn inverse_perm(a: &[u32]) -> Perm {
    let mut out = vec![0u32; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x as usize] = i as u32;
    }
    out
}

/// Canonical integral form of the lattice spanned by rational rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeKey {
    pub den: i128,
    pub rows: Vec<Vec<i128>>,
}

impl LatticeKey {
    pub fn of(rows: &QMat) -> LatticeKey {
        let mut den: i128 = 1;
        for r in rows {
            for x in r {
                den = den.lcm(x.denom());
            }
        }
        let ints: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| r.iter().map(|x| (x * Rational::from_integer(den)).to_integer()).collect())
            .collect();
        LatticeKey {
            den,
            rows: row_basis(&ints),
        }
    }

    pub fn to_rows(&self) -> QMat {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&x| Rational::new(x, self.den)).collect())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Symmetry {
    pub aut: AutGroup,
    pub certificate: Vec<u8>,
    /// Graph vertices forming, with `h`, a rational basis.
    pub basis_vertices: Vec<usize>,
    /// Lattice coordinates of `h` and the basis vertices.
    basis: QMat,
    binv: QMat,
    /// Size of the orbit of the lattice under the graph automorphisms.
    pub orbit_len: usize,
    /// Orbit minimum of the lattice in vertex-basis coordinates.
    pub key: LatticeKey,
    /// Generators of the subgroup preserving the lattice.
    pub stabilizer: Vec<Perm>,
}

impl Symmetry {
    /// Symmetry of the lattice relative to its Fano graph; with `marked`
    /// the Kummer conics must be preserved as a set.
    pub fn new(lattice: &EvenLattice, fano: &FanoGraph, marked: bool) -> Result<Symmetry> {
        let graph = if marked { fano.marked_graph() } else { fano.graph.clone() };
        let (labeling, certificate, aut) = graph.canonical();
        let n = graph.len();
        let mut by_pos = vec![0usize; n];
        for (v, &p) in labeling.iter().enumerate() {
            by_pos[p] = v;
        }
        let r = lattice.rank();
        let mut basis: QMat = vec![rational_row(lattice.h()?)];
        let mut basis_vertices = Vec::new();
        for &v in &by_pos {
            if basis.len() == r {
                break;
            }
            basis.push(rational_row(fano.vertex(v)));
            if rank(&basis) == basis.len() {
                basis_vertices.push(v);
            } else {
                basis.pop();
            }
        }
        if basis.len() != r {
            return Err(Error::NotGeometric("vertices do not span the lattice rationally".into()));
        }
        let binv = inverse(&basis).expect("independent rows");
        let mut sym = Symmetry {
            aut,
            certificate,
            basis_vertices,
            basis,
            binv,
            orbit_len: 0,
            key: LatticeKey { den: 1, rows: Vec::new() },
            stabilizer: Vec::new(),
        };
        sym.explore(fano);
        Ok(sym)
    }

    fn image_rows(&self, fano: &FanoGraph, perm: &[u32]) -> QMat {
        let mut rows = vec![self.basis[0].clone()];
        for &b in &self.basis_vertices {
            rows.push(rational_row(fano.vertex(perm[b] as usize)));
        }
        rows
    }

    /// Matrix of the automorphism acting on row vectors in lattice coordinates.
    pub fn matrix(&self, fano: &FanoGraph, perm: &[u32]) -> QMat {
        mat_mul(&self.binv, &self.image_rows(fano, perm))
    }

    pub fn integral_matrix(&self, fano: &FanoGraph, perm: &[u32]) -> Option<IMat> {
        self.matrix(fano, perm).iter().map(|r| int_row(r)).collect()
    }

    /// Matrix of the automorphism in vertex-basis coordinates.
    fn basis_matrix(&self, fano: &FanoGraph, perm: &[u32]) -> QMat {
        mat_mul(&self.image_rows(fano, perm), &self.binv)
    }

    fn explore(&mut self, fano: &FanoGraph) {
        let gens: Vec<(Perm, QMat)> = self
            .aut
            .generators
            .iter()
            .map(|g| (g.clone(), self.basis_matrix(fano, g)))
            .collect();
        let start = LatticeKey::of(&self.binv);
        let ident: Perm = (0..fano.graph.len() as u32).collect();
        let mut transversal: HashMap<LatticeKey, Perm> = HashMap::from([(start.clone(), ident)]);
        let mut queue = vec![start.clone()];
        let mut i = 0;
        let mut schreier: Vec<Perm> = Vec::new();
        let mut seen_gens: HashSet<Perm> = HashSet::new();
        while i < queue.len() {
            let x = queue[i].clone();
            i += 1;
            let rows = x.to_rows();
            let tx = transversal[&x].clone();
            for (g, m) in &gens {
                let y = LatticeKey::of(&mat_mul(&rows, m));
                let txg = then(&tx, g);
                match transversal.get(&y) {
                    Some(ty) => {
                        let s = then(&txg, &inverse_perm(ty));
                        if s.iter().enumerate().any(|(a, &b)| a as u32 != b) && seen_gens.len() < 4096 && seen_gens.insert(s.clone()) {
                            schreier.push(s);
                        }
                    }
                    None => {
                        transversal.insert(y.clone(), txg);
                        queue.push(y);
                    }
                }
            }
        }
        self.orbit_len = queue.len();
        self.key = queue.into_iter().min().expect("nonempty orbit");
        self.stabilizer = prune_generators(schreier, self.stabilizer_order());
    }

    /// Order of the group of isometries preserving `h`, the Kummer conics
    /// and the lattice, as seen on the graph.
    pub fn stabilizer_order(&self) -> u128 {
        self.aut.order / self.orbit_len as u128
    }

    /// Integral matrices of the stabilizer generators.
    pub fn stabilizer_matrices(&self, fano: &FanoGraph) -> Vec<IMat> {
        self.stabilizer
            .iter()
            .map(|g| self.integral_matrix(fano, g).expect("stabilizer preserves the lattice"))
            .collect()
    }

    /// All elements of the stabilizer as integral matrices, up to `limit`.
    pub fn stabilizer_elements(&self, fano: &FanoGraph, limit: usize) -> Option<Vec<IMat>> {
        let gens = self.stabilizer_matrices(fano);
        let r = self.basis.len();
        let id: IMat = (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect();
        closure_matrices(&gens, id, limit)
    }
}

/// Strong generators of the subgroup sampled by `schreier`, whose order is
/// known to be `order`.
fn prune_generators(schreier: Vec<Perm>, order: u128) -> Vec<Perm> {
    if order == 1 || schreier.is_empty() {
        return Vec::new();
    }
    let n = schreier[0].len();
    let mut chain = StabChain::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for s in &schreier {
        chain.insert(s.clone());
        if chain.order() == order {
            return chain.strong_generators();
        }
    }
    // Random products of the sampled generators fill in the chain.
    let mut pool: Vec<Perm> = schreier.clone();
    let mut acc: Perm = (0..n as u32).collect();
    for _ in 0..20_000 {
        let i = rng.gen_range(0..pool.len());
        let j = rng.gen_range(0..pool.len());
        if i != j {
            pool[i] = then(&pool[i], &pool[j]);
        }
        acc = then(&acc, &pool[i]);
        chain.insert(acc.clone());
        if chain.order() == order {
            return chain.strong_generators();
        }
    }
    log::warn!("stabilizer chain reached order {} of {order}", chain.order());
    chain.strong_generators()
}

/// Stabilizer chain of a permutation group, grown by sifting.
#[derive(Debug, Clone)]
pub struct StabChain {
    n: usize,
    levels: Vec<Level>,
}

#[derive(Debug, Clone)]
struct Level {
    base: u32,
    gens: Vec<Perm>,
    /// `u[x]` maps the base point to `x`.
    transversal: HashMap<u32, Perm>,
}

impl Level {
    fn rebuild(&mut self, n: usize) {
        let id: Perm = (0..n as u32).collect();
        self.transversal = HashMap::from([(self.base, id)]);
        let mut queue = vec![self.base];
        let mut i = 0;
        while i < queue.len() {
            let y = queue[i];
            i += 1;
            let uy = self.transversal[&y].clone();
            for s in &self.gens {
                let z = s[y as usize];
                if !self.transversal.contains_key(&z) {
                    self.transversal.insert(z, then(&uy, s));
                    queue.push(z);
                }
            }
        }
    }
}

impl StabChain {
    pub fn new(n: usize) -> StabChain {
        StabChain { n, levels: Vec::new() }
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.transversal.len() as u128).product()
    }

    /// Residue of `g` after sifting, with the level where it stopped.
    fn sift(&self, mut g: Perm) -> Option<(Perm, usize)> {
        for (i, l) in self.levels.iter().enumerate() {
            let x = g[l.base as usize];
            match l.transversal.get(&x) {
                Some(u) => g = then(&g, &inverse_perm(u)),
                None => return Some((g, i)),
            }
        }
        if g.iter().enumerate().all(|(a, &b)| a as u32 == b) {
            None
        } else {
            Some((g, self.levels.len()))
        }
    }

    pub fn contains(&self, g: &[u32]) -> bool {
        self.sift(g.to_vec()).is_none()
    }

    /// Adds the sifted residue of `g`. Basic orbits only grow, and their
    /// product never exceeds the order of the generated group.
    pub fn insert(&mut self, g: Perm) {
        let Some((r, j)) = self.sift(g) else { return };
        if j == self.levels.len() {
            let b = r
                .iter()
                .enumerate()
                .find(|(a, &b)| *a as u32 != b)
                .map(|(a, _)| a as u32)
                .expect("nontrivial residue");
            self.levels.push(Level {
                base: b,
                gens: Vec::new(),
                transversal: HashMap::new(),
            });
        }
        for l in &mut self.levels[..=j] {
            l.gens.push(r.clone());
            l.rebuild(self.n);
        }
    }

    pub fn strong_generators(&self) -> Vec<Perm> {
        self.levels.first().map(|l| l.gens.clone()).unwrap_or_default()
    }
}

/// Order of the group generated by `gens`, or `None` past `limit`.
pub fn closure_perms(gens: &[Perm], limit: usize) -> Option<usize> {
    let n = gens.first().map_or(0, |g| g.len());
    let id: Perm = (0..n as u32).collect();
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut stack = vec![id];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = then(&x, g);
            if seen.insert(y.clone()) {
                if seen.len() > limit {
                    return None;
                }
                stack.push(y);
            }
        }
    }
    Some(seen.len())
}

fn mul_int(a: &IMat, b: &IMat) -> IMat {
    let n = b[0].len();
    a.iter()
        .map(|r| {
            (0..n)
                .map(|j| r.iter().zip(b).map(|(x, row)| x * row[j]).sum())
                .collect()
        })
        .collect()
}

/// Group generated by integral matrices, or `None` past `limit` elements.
pub fn closure_matrices(gens: &[IMat], id: IMat, limit: usize) -> Option<Vec<IMat>> {
    let mut seen: HashSet<IMat> = HashSet::from([id.clone()]);
    let mut out = vec![id];
    let mut i = 0;
    while i < out.len() {
        let x = out[i].clone();
        i += 1;
        for g in gens {
            let y = mul_int(&x, g);
            if seen.insert(y.clone()) {
                if out.len() >= limit {
                    return None;
                }
                out.push(y);
            }
        }
    }
    Some(out)
}

/// Image of a rational row under an integral matrix.
pub fn act(x: &[Rational], m: &IMat) -> Vec<Rational> {
    (0..m[0].len())
        .map(|j| {
            x.iter()
                .zip(m)
                .fold(Rational::zero(), |s, (a, row)| s + a * Rational::from_integer(row[j] as i128))
        })
        .collect()
}

/// Whether `m` acts trivially on the discriminant group of `lattice`.
pub fn acts_trivially_on_discriminant(lattice: &EvenLattice, m: &IMat) -> bool {
    let d = lattice.discriminant();
    d.gens.iter().all(|g| {
        let y = act(g, m);
        let diff: Vec<Rational> = y.iter().zip(g).map(|(a, b)| a - b).collect();
        diff.iter().all(|x| x.is_integer())
    })
}

