//! Golay code, the Kummer structure on sixteen points and its symmetry group.
//!
//! Subsets of the sixteen Kummer points are `u16` masks with bit `i` standing
//! for point `i`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mask = u16;
pub type Perm = [u8; 16];

pub const FULL: Mask = 0xffff;

/// Generator polynomial of the cyclic binary Golay code of length 23.
const GOLAY_POLY: u32 = 0b1100_0111_0101;

pub fn popcount(m: Mask) -> usize {
    m.count_ones() as usize
}

/// Points of a mask in increasing order.
pub fn points(m: Mask) -> Vec<usize> {
    (0..16).filter(|&i| m >> i & 1 == 1).collect()
}

pub fn mask_of(pts: &[usize]) -> Mask {
    pts.iter().fold(0, |m, &i| m | 1 << i)
}

/// Sixteen-character binary string; the first character is point 0.
pub fn mask_to_string(m: Mask) -> String {
    (0..16).map(|i| if m >> i & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn mask_from_string(s: &str) -> Result<Mask> {
    if s.len() != 16 {
        return Err(Error::Input(format!("bitmask must have 16 characters: {s:?}")));
    }
    s.chars().enumerate().try_fold(0u16, |m, (i, c)| match c {
        '0' => Ok(m),
        '1' => Ok(m | 1 << i),
        _ => Err(Error::Input(format!("bad bitmask character {c:?}"))),
    })
}

/// Order on subsets: by sorted point tuple, lexicographically.
pub fn lex_key(m: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| m >> i & 1 == 1).collect()
}

/// The 4096 words of the extended binary Golay code as 24-bit masks.
pub fn golay_code() -> Vec<u32> {
    let mut words = Vec::with_capacity(4096);
    for msg in 0u32..4096 {
        let mut w = 0u32;
        for i in 0..12 {
            if msg >> i & 1 == 1 {
                w ^= GOLAY_POLY << i;
            }
        }
        let parity = w.count_ones() & 1;
        words.push(w | parity << 23);
    }
    words.sort_unstable();
    words
}

pub fn apply_perm(p: &Perm, m: Mask) -> Mask {
    let mut out = 0u16;
    let mut x = m;
    while x != 0 {
        let i = x.trailing_zeros() as usize;
        out |= 1 << p[i];
        x &= x - 1;
    }
    out
}

/// Apply `a` first, then `b`.
pub fn compose(a: &Perm, b: &Perm) -> Perm {
    let mut r = [0u8; 16];
    for i in 0..16 {
        r[i] = b[a[i] as usize];
    }
    r
}

pub fn invert(a: &Perm) -> Perm {
    let mut r = [0u8; 16];
    for i in 0..16 {
        r[a[i] as usize] = i as u8;
    }
    r
}

pub const IDENTITY: Perm = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(b: usize) -> Parity {
        if b % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// Restriction of the Golay code to a weight-16 word.
#[derive(Debug, Clone)]
pub struct KummerStructure {
    /// Support of the chosen weight-16 word in the 24 Golay coordinates.
    pub delta_support: Vec<usize>,
    /// Octads contained in the weight-16 word (30 of them).
    pub octads: Vec<Mask>,
    /// `{0} ∪ octads ∪ {full}`, closed under symmetric difference.
    pub o_star: Vec<Mask>,
    /// Traces of all codewords, sorted.
    pub c_star: Vec<Mask>,
    /// Chosen base set of size four.
    pub kappa: Mask,
    /// `kappa Δ o_star`.
    pub k_star: Vec<Mask>,
    c_set: HashSet<Mask>,
    o_set: HashSet<Mask>,
    k_set: HashSet<Mask>,
}

impl KummerStructure {
    /// Builds the structure from the extended Golay code.
    pub fn new() -> Result<Self> {
        Self::from_code(&golay_code())
    }

    pub fn from_code(code: &[u32]) -> Result<Self> {
        let delta = code
            .iter()
            .copied()
            .filter(|w| w.count_ones() == 16)
            .min_by_key(|&w| lex_key(w, 24))
            .ok_or_else(|| Error::Invariant("code has no word of weight 16".into()))?;
        let support: Vec<usize> = lex_key(delta, 24);
        let restrict = |w: u32| -> Mask {
            support
                .iter()
                .enumerate()
                .fold(0, |m, (k, &pos)| if w >> pos & 1 == 1 { m | 1 << k } else { m })
        };
        let mut octads: Vec<Mask> = code
            .iter()
            .copied()
            .filter(|&w| w.count_ones() == 8 && w & !delta == 0)
            .map(restrict)
            .collect();
        octads.sort_unstable();
        let mut o_star = vec![0, FULL];
        o_star.extend(&octads);
        o_star.sort_unstable();
        let mut c_star: Vec<Mask> = code.iter().map(|&w| restrict(w & delta)).collect();
        c_star.sort_unstable();
        c_star.dedup();
        let kappa = c_star
            .iter()
            .copied()
            .filter(|&m| popcount(m) == 4)
            .min_by_key(|&m| lex_key(m as u32, 16))
            .ok_or_else(|| Error::Invariant("no trace of size four".into()))?;
        let mut k_star: Vec<Mask> = o_star.iter().map(|&o| o ^ kappa).collect();
        k_star.sort_unstable();
        Ok(KummerStructure {
            delta_support: support,
            c_set: c_star.iter().copied().collect(),
            o_set: o_star.iter().copied().collect(),
            k_set: k_star.iter().copied().collect(),
            octads,
            o_star,
            c_star,
            kappa,
            k_star,
        })
    }

    pub fn in_c(&self, m: Mask) -> bool {
        self.c_set.contains(&m)
    }

    pub fn in_o(&self, m: Mask) -> bool {
        self.o_set.contains(&m)
    }

    pub fn in_k(&self, m: Mask) -> bool {
        self.k_set.contains(&m)
    }

    pub fn c_of_size(&self, n: usize) -> Vec<Mask> {
        self.c_star.iter().copied().filter(|&m| popcount(m) == n).collect()
    }

    /// Members of `k_star` of size four.
    pub fn k4(&self) -> Vec<Mask> {
        self.k_star.iter().copied().filter(|&m| popcount(m) == 4).collect()
    }

    /// Parity `|σ ∩ κ| mod 2`, defined for traces of codewords.
    pub fn parity(&self, sigma: Mask) -> Result<Parity> {
        if !self.in_c(sigma) {
            return Err(Error::Input(format!(
                "parity undefined for {}: not a codeword trace",
                mask_to_string(sigma)
            )));
        }
        Ok(Parity::from_bit(popcount(sigma & self.kappa)))
    }

    /// Class of `sigma` modulo `o_star`.
    pub fn cl(&self, sigma: Mask) -> Vec<Mask> {
        let mut v: Vec<Mask> = self.o_star.iter().map(|&o| o ^ sigma).collect();
        v.sort_unstable();
        v
    }

    /// Class of `sigma` modulo `o_star ∪ k_star`.
    pub fn cl_wide(&self, sigma: Mask) -> Vec<Mask> {
        let mut v: Vec<Mask> = self
            .o_star
            .iter()
            .chain(&self.k_star)
            .map(|&o| o ^ sigma)
            .collect();
        v.sort_unstable();
        v
    }

    /// Canonical representative (least mask) of the class modulo `o_star`.
    pub fn cl_rep(&self, sigma: Mask) -> Mask {
        self.o_star.iter().map(|&o| o ^ sigma).min().unwrap()
    }

    /// Classes stratified by cardinality.
    pub fn eq_classes(&self, sigma: Mask) -> (BTreeMap<usize, Vec<Mask>>, BTreeMap<usize, Vec<Mask>>) {
        let strat = |v: Vec<Mask>| {
            let mut m: BTreeMap<usize, Vec<Mask>> = BTreeMap::new();
            for x in v {
                m.entry(popcount(x)).or_default().push(x);
            }
            m
        };
        (strat(self.cl(sigma)), strat(self.cl_wide(sigma)))
    }

    /// Column of the orbit table that holds `sigma`.
    pub fn column(&self, sigma: Mask) -> Result<Column> {
        if self.in_o(sigma) {
            Ok(Column::Octad)
        } else if self.in_k(sigma) {
            Ok(Column::Kappa)
        } else {
            Ok(match self.parity(sigma)? {
                Parity::Even => Column::Even,
                Parity::Odd => Column::Odd,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Column {
    Even,
    Odd,
    /// Members of `o_star`.
    Octad,
    /// Members of `k_star`.
    Kappa,
}

/// Explicit permutation group on the sixteen points.
#[derive(Debug, Clone)]
pub struct PermGroup {
    pub elements: Vec<Perm>,
    pub generators: Vec<Perm>,
}

impl PermGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn from_generators(gens: &[Perm]) -> PermGroup {
        PermGroup {
            elements: closure(gens),
            generators: gens.to_vec(),
        }
    }

    /// Orbit of a mask.
    pub fn orbit(&self, m: Mask) -> Vec<Mask> {
        let mut seen = HashSet::from([m]);
        let mut stack = vec![m];
        while let Some(x) = stack.pop() {
            for g in &self.generators {
                let y = apply_perm(g, x);
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        let mut v: Vec<Mask> = seen.into_iter().collect();
        v.sort_unstable();
        v
    }

    /// Partition of `set` (assumed invariant) into orbits, each sorted.
    pub fn orbits_on(&self, set: &[Mask]) -> Vec<Vec<Mask>> {
        let mut left: HashSet<Mask> = set.iter().copied().collect();
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        let mut out = Vec::new();
        for m in sorted {
            if left.contains(&m) {
                let o = self.orbit(m);
                for x in &o {
                    left.remove(x);
                }
                out.push(o);
            }
        }
        out
    }

    pub fn stabilizer(&self, pred: impl Fn(&Perm) -> bool) -> PermGroup {
        let elements: Vec<Perm> = self.elements.iter().copied().filter(|g| pred(g)).collect();
        let generators = generating_subset(&elements);
        PermGroup {
            elements,
            generators,
        }
    }
}

pub fn closure(gens: &[Perm]) -> Vec<Perm> {
    let mut seen: HashSet<Perm> = HashSet::from([IDENTITY]);
    let mut out = vec![IDENTITY];
    let mut i = 0;
    while i < out.len() {
        let x = out[i];
        for g in gens {
            let y = compose(&x, g);
            if seen.insert(y) {
                out.push(y);
            }
        }
        i += 1;
    }
    out.sort_unstable();
    out
}

/// Small generating set of the group formed by `elements`.
pub fn generating_subset(elements: &[Perm]) -> Vec<Perm> {
    let mut gens: Vec<Perm> = Vec::new();
    let mut span: HashSet<Perm> = HashSet::from([IDENTITY]);
    for g in elements {
        if !span.contains(g) {
            gens.push(*g);
            span = closure(&gens).into_iter().collect();
            if span.len() == elements.len() {
                break;
            }
        }
    }
    gens
}

/// Setwise stabilizer of `k_star` in Sym(16); it also fixes `o_star`.
///
/// Backtracks over point images; a partial map survives when, for every
/// member `A` of the family, the image of the assigned part of `A` is the
/// assigned part of some member of the same size.
pub fn stabilizer_gamma(ks: &KummerStructure) -> PermGroup {
    let family: Vec<Mask> = ks.k_star.clone();
    let family_set: HashSet<Mask> = family.iter().copied().collect();
    let mut found = Vec::new();
    let mut perm = [0u8; 16];
    let mut used: Mask = 0;
    fn rec(
        depth: usize,
        perm: &mut Perm,
        used: &mut Mask,
        family: &[Mask],
        family_set: &HashSet<Mask>,
        found: &mut Vec<Perm>,
    ) {
        if depth == 16 {
            if family.iter().all(|&a| family_set.contains(&apply_perm(perm, a))) {
                found.push(*perm);
            }
            return;
        }
        let dom: Mask = if depth == 15 { FULL } else { (1u16 << (depth + 1)) - 1 };
        for img in 0..16u8 {
            if *used >> img & 1 == 1 {
                continue;
            }
            perm[depth] = img;
            *used |= 1 << img;
            let ok = family.iter().all(|&a| {
                let part = a & dom;
                let mut im = 0u16;
                for p in points(part) {
                    im |= 1 << perm[p];
                }
                let n = popcount(a);
                family
                    .iter()
                    .any(|&b| popcount(b) == n && b & *used == im)
            });
            if ok {
                rec(depth + 1, perm, used, family, family_set, found);
            }
            *used &= !(1 << img);
        }
    }
    rec(0, &mut perm, &mut used, &family, &family_set, &mut found);
    found.sort_unstable();
    let generators = generating_subset(&found);
    PermGroup {
        elements: found,
        generators,
    }
}

/// One cell of the orbit table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitCell {
    pub n: usize,
    pub column: Column,
    /// Number of classes modulo `o_star` meeting the cell.
    pub classes: usize,
    /// Sizes of the intersections of one class with the group orbits.
    pub split: Vec<usize>,
    /// Orbit sizes on sets, in the same order as `split`.
    pub orbit_sizes: Vec<usize>,
}

impl fmt::Display for OrbitCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.split.len() == 1 {
            write!(f, "{}x{}", self.classes, self.split[0])
        } else {
            let parts: Vec<String> = self.split.iter().map(|s| s.to_string()).collect();
            write!(f, "{}x({})", self.classes, parts.join("+"))
        }
    }
}

/// Decomposition of every `C_n` into orbits, cell by cell.
pub fn gamma_orbits(gamma: &PermGroup, ks: &KummerStructure) -> Vec<OrbitCell> {
    let mut cells: BTreeMap<(usize, Column), Vec<Mask>> = BTreeMap::new();
    for &m in &ks.c_star {
        let col = ks.column(m).expect("member of c_star");
        cells.entry((popcount(m), col)).or_default().push(m);
    }
    let mut out = Vec::new();
    for ((n, column), sets) in cells {
        let mut orbits = gamma.orbits_on(&sets);
        orbits.sort_by_key(|o| (o.len(), o[0]));
        let class_of: HashMap<Mask, Mask> = sets.iter().map(|&m| (m, ks.cl_rep(m))).collect();
        let mut reps: Vec<Mask> = class_of.values().copied().collect();
        reps.sort_unstable();
        reps.dedup();
        let first = reps[0];
        let split: Vec<usize> = orbits
            .iter()
            .map(|o| o.iter().filter(|m| class_of[m] == first).count())
            .collect();
        out.push(OrbitCell {
            n,
            column,
            classes: reps.len(),
            split,
            orbit_sizes: orbits.iter().map(|o| o.len()).collect(),
        });
    }
    out
}

/// Canonical image of a tuple of masks under a group given by its elements.
pub fn canonical_tuple(elements: &[Perm], tuple: &[Mask]) -> Vec<Mask> {
    elements
        .iter()
        .map(|g| tuple.iter().map(|&m| apply_perm(g, m)).collect::<Vec<_>>())
        .min()
        .unwrap_or_else(|| tuple.to_vec())
}

/// JSON export of the combinatorial data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KummerExport {
    pub delta_support: Vec<usize>,
    pub octads: Vec<String>,
    pub c_star: BTreeMap<usize, Vec<String>>,
    pub kappa: String,
    pub k_star: Vec<String>,
    pub gamma_order: usize,
    pub gamma_generators: Vec<Vec<u8>>,
}

impl KummerExport {
    pub fn new(ks: &KummerStructure, gamma: &PermGroup) -> Self {
        let mut c_star: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for &m in &ks.c_star {
            c_star.entry(popcount(m)).or_default().push(mask_to_string(m));
        }
        KummerExport {
            delta_support: ks.delta_support.clone(),
            octads: ks.octads.iter().map(|&m| mask_to_string(m)).collect(),
            c_star,
            kappa: mask_to_string(ks.kappa),
            k_star: ks.k_star.iter().map(|&m| mask_to_string(m)).collect(),
            gamma_order: gamma.order(),
            gamma_generators: gamma.generators.iter().map(|g| g.to_vec()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golay_weights() {
        let code = golay_code();
        assert_eq!(code.len(), 4096);
        let mut hist = [0usize; 25];
        for w in &code {
            hist[w.count_ones() as usize] += 1;
        }
        assert_eq!(hist[0], 1);
        assert_eq!(hist[8], 759);
        assert_eq!(hist[12], 2576);
        assert_eq!(hist[16], 759);
        assert_eq!(hist[24], 1);
        assert_eq!(hist.iter().sum::<usize>(), 4096);
    }

    #[test]
    fn structure_sizes() {
        let ks = KummerStructure::new().unwrap();
        assert_eq!(ks.octads.len(), 30);
        assert_eq!(ks.o_star.len(), 32);
        assert_eq!(ks.c_of_size(4).len(), 140);
        assert_eq!(ks.c_of_size(6).len(), 448);
        assert_eq!(ks.c_of_size(8).len(), 870);
        for &a in &ks.o_star {
            for &b in &ks.o_star {
                assert!(ks.in_o(a ^ b));
            }
        }
        assert_eq!(ks.k4().len(), 4);
    }

    #[test]
    fn mask_strings_round_trip() {
        for m in [0u16, 1, 0x8000, 0xabcd] {
            assert_eq!(mask_from_string(&mask_to_string(m)).unwrap(), m);
        }
        assert_eq!(mask_to_string(1), "1000000000000000");
        assert!(mask_from_string("10").is_err());
    }

    #[test]
    fn parity_independent_of_base() {
        let ks = KummerStructure::new().unwrap();
        for &s in &ks.c_star {
            let p: HashSet<usize> = ks.k_star.iter().map(|&k| popcount(s & k) % 2).collect();
            assert_eq!(p.len(), 1);
        }
        let odd4 = ks
            .c_of_size(4)
            .into_iter()
            .filter(|&m| ks.parity(m).unwrap() == Parity::Odd)
            .count();
        assert_eq!(odd4, 64);
        assert!(ks.parity(0b111).is_err());
    }

    #[test]
    fn gamma_and_orbit_table() {
        let ks = KummerStructure::new().unwrap();
        let gamma = stabilizer_gamma(&ks);
        assert_eq!(gamma.order(), 9216);
        assert_eq!(PermGroup::from_generators(&gamma.generators).order(), 9216);
        for g in &gamma.elements {
            for &s in &ks.c_star {
                let t = apply_perm(g, s);
                assert!(ks.in_c(t));
                assert_eq!(ks.parity(s).unwrap(), ks.parity(t).unwrap());
            }
        }
        assert_eq!(gamma.orbits_on(&ks.k4()).len(), 1);
        let table: Vec<String> = gamma_orbits(&gamma, &ks)
            .iter()
            .map(|c| format!("{} {:?} {}", c.n, c.column, c))
            .collect();
        let expected = [
            "0 Octad 1x1",
            "4 Even 18x4",
            "4 Odd 16x4",
            "4 Kappa 1x4",
            "6 Even 12x16",
            "6 Odd 16x16",
            "8 Even 18x(8+16)",
            "8 Odd 16x24",
            "8 Octad 1x(6+24)",
            "8 Kappa 1x24",
            "10 Even 12x16",
            "10 Odd 16x16",
            "12 Even 18x4",
            "12 Odd 16x4",
            "12 Kappa 1x4",
            "16 Octad 1x1",
        ];
        assert_eq!(table, expected);
    }
}
