//! Classification of geometric extensions of the minimal lattice by lines
//! and conics.
//!
//! Codimension one is a sweep over patterns up to the Kummer symmetry group.
//! Higher codimension extends each stratum of the previous level by one more
//! vertex. Every vertex of a geometric lattice spans, together with the
//! minimal lattice, a codimension-one geometric lattice in which it is still
//! a vertex, so its pattern lies in the symmetric closure of the vertex
//! patterns met in the sweep; products with existing vertices are bounded by
//! the intersection lemma. Candidates are reduced modulo the stabilizer of
//! the base lattice before any overlattice is built.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::binary::{forms_in_genus, BinaryForm};
use crate::construction::{
    lambda_tilde, projected_norm, sylvester, theta_frame, FramedLattice, Pattern, Sylvester, KUMMER,
};
use crate::discriminant::{DiscriminantForm, Element};
use crate::error::{Error, Result};
use crate::fano::{FanoGraph, Polarized, Violation};
use crate::kummer::{apply_perm, points, popcount, stabilizer_gamma, KummerStructure, Mask, Parity, PermGroup, FULL};
use crate::lattice::EvenLattice;
use crate::matrix::{gram_of, inverse, int_row, rank, rational_row, to_rational, vec_mat, IMat, QMat};
use crate::scalar::{rint, Rational};
use crate::symmetry::{LatticeKey, Symmetry};

/// Determinant of the minimal lattice.
pub const MINIMAL_DET: i128 = 640;

/// Why a candidate lattice is or is not geometric.
#[derive(Debug, Clone)]
pub enum Verdict {
    /// `N ∩ Q(δ, h)` is larger than the minimal lattice.
    Unsaturated,
    /// No primitive embedding into the K3 lattice.
    NoEmbedding,
    Inadmissible(Violation),
    /// Contains a vector `u` with `u² = 0`, `u·h = 3`.
    Special(Vec<i64>),
    /// Lines, conics and `h` do not span the lattice rationally.
    Sparse,
    Geometric(Box<FanoGraph>),
}

impl Verdict {
    pub fn is_geometric(&self) -> bool {
        matches!(self, Verdict::Geometric(_))
    }
}

/// A classified stratum: its lattice and Fano graph with derived data.
#[derive(Debug, Clone)]
pub struct Record {
    pub codim: usize,
    /// Lattice framed by the Kummer vectors, `h` and generating vertices.
    pub framed: FramedLattice,
    pub generators: Vec<Pattern>,
    pub graph: FanoGraph,
    /// Symmetry with the Kummer conics marked.
    pub relative: Symmetry,
    pub absolute: Symmetry,
    pub fano_index: i128,
    /// Cluster types, as indices into the codimension-one strata.
    pub clusters: Vec<usize>,
    /// Transcendental forms (rank 20 only): the classes in the genus.
    pub transcendental: Vec<BinaryForm>,
}

impl Record {
    pub fn lattice(&self) -> &EvenLattice {
        &self.framed.lattice
    }

    pub fn rank(&self) -> usize {
        self.framed.rank()
    }

    pub fn det(&self) -> i128 {
        self.lattice().det().abs()
    }

    pub fn lines(&self) -> usize {
        self.graph.n_lines()
    }

    pub fn conics(&self) -> usize {
        self.graph.n_conics()
    }

    pub fn reducible(&self) -> usize {
        self.graph.n_reducible()
    }

    /// Order of the automorphism group of the Fano graph.
    pub fn aut_order(&self) -> u128 {
        self.absolute.aut.order
    }

    /// Index of the stabilizer of the Kummer conics.
    pub fn i_delta(&self) -> u128 {
        self.absolute.aut.order / self.relative.aut.order
    }

    /// Order of the group of isometries of the lattice fixing `h`.
    pub fn oh_order(&self) -> u128 {
        self.absolute.stabilizer_order()
    }

    /// Index of that group in the graph automorphisms.
    pub fn oh_index(&self) -> usize {
        self.absolute.orbit_len
    }

    pub fn depth(&self) -> i64 {
        self.lattice().depth().unwrap_or(0)
    }

    /// Identifies the pair (lattice, Kummer conics) up to isometry fixing `h`.
    pub fn key(&self) -> (Vec<u8>, LatticeKey) {
        (self.relative.certificate.clone(), self.relative.key.clone())
    }

    pub fn summary(&self) -> RecordSummary {
        RecordSummary {
            codim: self.codim,
            generators: self.generators.iter().map(|p| p.kind()).collect(),
            clusters: self.clusters.clone(),
            lines: self.lines(),
            reducible: self.reducible(),
            conics: self.conics(),
            aut_order: self.aut_order(),
            oh_order: self.oh_order(),
            oh_index: self.oh_index(),
            i_delta: self.i_delta(),
            det: self.det(),
            fano_index: self.fano_index,
            transcendental: self.transcendental.iter().map(|f| f.to_string()).collect(),
        }
    }
}

/// Flat view of a record, for reports.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct RecordSummary {
    pub codim: usize,
    pub generators: Vec<String>,
    pub clusters: Vec<usize>,
    pub lines: usize,
    pub reducible: usize,
    pub conics: usize,
    pub aut_order: u128,
    pub oh_order: u128,
    pub oh_index: usize,
    pub i_delta: u128,
    pub det: i128,
    pub fano_index: i128,
    pub transcendental: Vec<String>,
}

/// Fate of a single pattern in the codimension-one sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PatternOutcome {
    /// No support of the required parity exists.
    Parity,
    Excluded,
    Corank0,
    /// Geometric overlattices exist; `vertex` records whether the generator
    /// stays a line or irreducible conic in at least one of them.
    Geometric { strata: Vec<usize>, vertex: bool },
    /// No geometric overlattice.
    Barren { reasons: Vec<String> },
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub pattern: Pattern,
    pub outcome: PatternOutcome,
}

/// Mark of a cell `(p, q)` in the hyperbolicity table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mark {
    /// Ruled out by hyperbolicity (or lying in the minimal lattice).
    Dot,
    /// No support of the required parity.
    Cross,
    /// Every extension is non-geometric or loses the generator.
    Circle,
    Bullet,
}

impl Mark {
    pub fn symbol(self) -> char {
        match self {
            Mark::Dot => '.',
            Mark::Cross => 'x',
            Mark::Circle => 'o',
            Mark::Bullet => '*',
        }
    }
}

#[derive(Debug, Clone)]
pub struct Codim1 {
    pub sweep: Vec<SweepEntry>,
    /// Strata ordered as lines first (by line count), then by conic count.
    pub strata: Vec<Record>,
    /// Vertex patterns of all geometric codimension-one lattices, closed
    /// under the Kummer symmetry group.
    pub patterns: Vec<Pattern>,
    /// For each stratum, the patterns of vertices generating it over the
    /// minimal lattice (closed under the symmetry group).
    pub generating: Vec<Vec<Pattern>>,
}

/// Counts from an extension step.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ExtensionStats {
    pub candidates: usize,
    pub orbits: usize,
    pub overlattices: usize,
    pub geometric: usize,
}

#[derive(Debug, Clone)]
pub struct Extension {
    pub records: Vec<Record>,
    pub stats: ExtensionStats,
}

impl Extension {
    /// Number of distinct abstract Fano graphs.
    pub fn abstract_graphs(&self) -> usize {
        self.records.iter().map(|r| &r.absolute.certificate).collect::<HashSet<_>>().len()
    }

    /// Number of distinct graphs with marked Kummer conics.
    pub fn marked_graphs(&self) -> usize {
        self.records.iter().map(|r| &r.relative.certificate).collect::<HashSet<_>>().len()
    }
}

/// Image of a generating vertex in the discriminant of the minimal lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterSignature {
    /// Order of the 2-primary component.
    pub order2: i64,
    /// Its square modulo 2.
    #[serde(serialize_with = "serialize_display")]
    pub square2: Rational,
    /// Coefficient of the 5-primary component on `θ/5`, up to sign (0..=2).
    pub coeff5: i64,
}

/// Orbits of generator pairs for codimension two.
#[derive(Debug, Clone, Serialize)]
pub struct PairCount {
    /// Classes of pairs (u, v, u·v) passing the hyperbolicity test.
    pub classes: usize,
    /// Those admitting a geometric overlattice.
    pub geometric: usize,
    /// Those whose only geometric overlattice is the lattice itself.
    pub trivial_only: usize,
}

/// Census results up to some codimension.
#[derive(Debug, Clone)]
pub struct CensusRun {
    pub codim1: Codim1,
    pub codim2: Option<Extension>,
    pub codim3: Option<Extension>,
}

impl CensusRun {
    /// Records of every codimension computed, in order.
    pub fn records(&self) -> impl Iterator<Item = &Record> {
        self.codim1
            .strata
            .iter()
            .chain(self.codim2.iter().flat_map(|e| e.records.iter()))
            .chain(self.codim3.iter().flat_map(|e| e.records.iter()))
    }

    pub fn level(&self, codim: usize) -> &[Record] {
        match codim {
            1 => &self.codim1.strata,
            2 => self.codim2.as_ref().map_or(&[], |e| &e.records),
            3 => self.codim3.as_ref().map_or(&[], |e| &e.records),
            _ => &[],
        }
    }
}

pub struct Census {
    pub ks: KummerStructure,
    pub gamma: PermGroup,
    pub lambda: FramedLattice,
    discr: DiscriminantForm,
    frame_inv: QMat,
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    (0..n).map(|j| if i == j { rint(1) } else { rint(0) }).collect()
}

fn subsets_of_size(m: Mask, k: usize) -> Vec<Mask> {
    let pts = points(m);
    let mut out = Vec::new();
    let n = pts.len();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().fold(0u16, |acc, &i| acc | 1 << pts[i]));
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 && idx[0] == n - k {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn permute_pattern(g: &crate::kummer::Perm, p: &Pattern) -> Pattern {
    Pattern {
        degree: p.degree,
        supp1: apply_perm(g, p.supp1),
        supp2: apply_perm(g, p.supp2),
    }
}

/// Allowed products of a new vertex (`new_line`) with an existing one.
fn allowed_product(new_line: bool, old_line: bool, x: i64) -> bool {
    match (new_line, old_line) {
        (_, true) => (0..=1).contains(&x),
        (true, false) => (-1..=2).contains(&x),
        (false, false) => (0..=2).contains(&x),
    }
}

impl Census {
    pub fn new() -> Result<Census> {
        let ks = KummerStructure::new()?;
        let gamma = stabilizer_gamma(&ks);
        let lambda = lambda_tilde(&ks)?;
        let discr = lambda.lattice.discriminant();
        let frame_inv = lambda.frame_inverse_prefix(KUMMER + 1);
        Ok(Census {
            ks,
            gamma,
            lambda,
            discr,
            frame_inv,
        })
    }

    /// Runs the census up to codimension `max_codim` (1 to 3).
    pub fn run(&self, max_codim: usize) -> Result<CensusRun> {
        let codim1 = self.codim1()?;
        log::info!("codimension 1: {} strata", codim1.strata.len());
        let mut run = CensusRun {
            codim1,
            codim2: None,
            codim3: None,
        };
        if max_codim >= 2 {
            let mut e = self.extend(&run.codim1.strata, &run.codim1.patterns)?;
            self.assign_clusters(&mut e.records, &run.codim1.strata)?;
            log::info!("codimension 2: {} strata", e.records.len());
            run.codim2 = Some(e);
        }
        if max_codim >= 3 {
            let base = &run.codim2.as_ref().expect("codimension 2 computed").records;
            let mut e = self.extend(base, &run.codim1.patterns)?;
            self.assign_clusters(&mut e.records, &run.codim1.strata)?;
            log::info!("codimension 3: {} strata", e.records.len());
            run.codim3 = Some(e);
        }
        Ok(run)
    }

    /// Geometricity test for an overlattice of the minimal lattice.
    pub fn classify(&self, n: &FramedLattice) -> Result<Verdict> {
        let hull = n.kummer_hull();
        let hull_det = n.lattice.sublattice(&hull)?.det().abs();
        if hull_det != MINIMAL_DET {
            return Ok(Verdict::Unsaturated);
        }
        let r = n.rank();
        if r > 20 || !n.lattice.discriminant().negated().genus_exists(2, 20 - r) {
            return Ok(Verdict::NoEmbedding);
        }
        let pol = Polarized::<f64>::new(n.lattice.clone())?;
        if let Err(v) = pol.admissibility() {
            return Ok(Verdict::Inadmissible(v));
        }
        if let Some(u) = pol.three_isotropic() {
            return Ok(Verdict::Special(u));
        }
        let graph = pol.fano_graph()?;
        if graph.fano_index(&n.lattice)?.is_none() {
            return Ok(Verdict::Sparse);
        }
        Ok(Verdict::Geometric(Box::new(graph)))
    }

    /// All overlattices of `m` (one per isotropic subgroup) with verdicts.
    pub fn overlattices(&self, m: &FramedLattice) -> Result<Vec<(FramedLattice, Verdict)>> {
        let d = m.lattice.discriminant();
        let mut out = Vec::new();
        for sub in d.isotropic_subgroups() {
            let glue: QMat = sub.iter().map(|a| d.lift(a)).collect();
            let n = if glue.is_empty() { m.clone() } else { m.overlattice(&glue)? };
            let v = self.classify(&n)?;
            out.push((n, v));
        }
        Ok(out)
    }

    /// Reframes `n` on generating vertices: lines first, then by pattern.
    pub fn reframe(&self, n: &FramedLattice, graph: &FanoGraph) -> Result<(FramedLattice, Vec<Pattern>)> {
        let r = n.rank();
        let lat = &n.lattice;
        let mut rows: QMat = lat.kummer()?.iter().map(|v| rational_row(v)).collect();
        rows.push(rational_row(lat.h()?));
        let mut cands: Vec<(Pattern, &Vec<i64>)> = graph.vertices().map(|v| (n.pattern(v), v)).collect();
        cands.sort_by(|a, b| (a.0.degree, a.0, a.1).cmp(&(b.0.degree, b.0, b.1)));
        let mut gens = Vec::new();
        let mut chosen: Vec<Vec<i64>> = Vec::new();
        for (p, v) in cands {
            if rows.len() == r {
                break;
            }
            rows.push(rational_row(v));
            if rank(&rows) == rows.len() {
                gens.push(p);
                chosen.push(v.clone());
            } else {
                rows.pop();
            }
        }
        if rows.len() != r {
            return Err(Error::NotGeometric("vertices do not span the lattice".into()));
        }
        let frame_vecs: IMat = rows.iter().map(|x| int_row(x).expect("lattice vectors")).collect();
        let frame = gram_of(&frame_vecs, &lat.gram);
        let basis = inverse(&rows).expect("independent frame");
        let framed = FramedLattice::from_basis(frame, basis)?;
        debug_assert_eq!(framed.lattice.gram, lat.gram);
        Ok((framed, gens))
    }

    pub fn record(&self, codim: usize, n: &FramedLattice, graph: FanoGraph) -> Result<Record> {
        let (framed, generators) = self.reframe(n, &graph)?;
        let relative = Symmetry::new(&framed.lattice, &graph, true)?;
        let absolute = Symmetry::new(&framed.lattice, &graph, false)?;
        let fano_index = graph
            .fano_index(&framed.lattice)?
            .ok_or_else(|| Error::NotGeometric("sparse graph".into()))?;
        let transcendental = if framed.rank() == 20 {
            forms_in_genus(&framed.lattice.discriminant().negated())
        } else {
            Vec::new()
        };
        Ok(Record {
            codim,
            framed,
            generators,
            graph,
            relative,
            absolute,
            fano_index,
            clusters: Vec::new(),
            transcendental,
        })
    }

    /// Patterns `(supp1, supp2)` of degree `eps` with `|supp1| = p`,
    /// `|supp2| = q`, up to the symmetry group.
    pub fn pattern_reps(&self, eps: i64, p: usize, q: usize) -> Vec<Pattern> {
        let want = if eps % 2 == 0 { Parity::Even } else { Parity::Odd };
        let c: Vec<Mask> = self
            .ks
            .c_of_size(p)
            .into_iter()
            .filter(|&m| self.ks.parity(m).map(|x| x == want).unwrap_or(false))
            .collect();
        let mut out = Vec::new();
        for orbit in self.gamma.orbits_on(&c) {
            let s1 = orbit[0];
            let stab = self.gamma.stabilizer(|g| apply_perm(g, s1) == s1);
            let subs = subsets_of_size(FULL & !s1, q);
            for o in stab.orbits_on(&subs) {
                out.push(Pattern {
                    degree: eps,
                    supp1: s1,
                    supp2: o[0],
                });
            }
        }
        out
    }

    /// Closure of a pattern set under the symmetry group.
    pub fn close_patterns(&self, pats: &BTreeSet<Pattern>) -> Vec<Pattern> {
        let mut out: BTreeSet<Pattern> = BTreeSet::new();
        for p in pats {
            if out.contains(p) {
                continue;
            }
            for g in &self.gamma.elements {
                out.insert(permute_pattern(g, p));
            }
        }
        out.into_iter().collect()
    }

    fn sweep_pattern(&self, pat: Pattern) -> Result<(PatternOutcome, Vec<(FramedLattice, FanoGraph)>)> {
        match sylvester(pat.p(), pat.q(), pat.degree) {
            Sylvester::Excluded => return Ok((PatternOutcome::Excluded, Vec::new())),
            Sylvester::Corank0 => return Ok((PatternOutcome::Corank0, Vec::new())),
            Sylvester::Allowed => {}
        }
        let m = self.lambda.extend(&pat.frame_products(), -2)?;
        let u = m.from_frame(&unit(KUMMER + 2, KUMMER + 1)).expect("generator lies in the extension");
        let mut found = Vec::new();
        let mut reasons = BTreeSet::new();
        for (n, v) in self.overlattices(&m)? {
            match v {
                Verdict::Geometric(g) => {
                    let u_n = n.from_frame(&m.to_frame(&u)).expect("overlattice contains the generator");
                    found.push((n, *g, u_n));
                }
                other => {
                    reasons.insert(verdict_name(&other));
                }
            }
        }
        if found.is_empty() {
            return Ok((
                PatternOutcome::Barren {
                    reasons: reasons.into_iter().collect(),
                },
                Vec::new(),
            ));
        }
        let vertex = found.iter().any(|(_, g, u)| g.vertices().any(|v| v == u));
        Ok((
            PatternOutcome::Geometric {
                strata: Vec::new(),
                vertex,
            },
            found.into_iter().map(|(n, g, _)| (n, g)).collect(),
        ))
    }

    /// The codimension-one sweep.
    pub fn codim1(&self) -> Result<Codim1> {
        let mut pats = Vec::new();
        let mut sweep_meta = Vec::new();
        for eps in [2i64, 1] {
            for p in (0..=16).step_by(2) {
                for q in 0..=16 - p {
                    let reps = self.pattern_reps(eps, p, q);
                    if reps.is_empty() {
                        if sylvester(p, q, eps) != Sylvester::Excluded {
                            sweep_meta.push((eps, p, q));
                        }
                        continue;
                    }
                    pats.extend(reps);
                }
            }
        }
        let results: Vec<Result<(PatternOutcome, Vec<(FramedLattice, FanoGraph)>)>> =
            pats.par_iter().map(|&p| self.sweep_pattern(p)).collect();
        let mut sweep = Vec::new();
        let mut lattices: Vec<(usize, FramedLattice, FanoGraph)> = Vec::new();
        for (i, r) in results.into_iter().enumerate() {
            let (outcome, found) = r?;
            for (n, g) in found {
                lattices.push((i, n, g));
            }
            sweep.push(SweepEntry {
                pattern: pats[i],
                outcome,
            });
        }
        for (eps, p, q) in sweep_meta {
            sweep.push(SweepEntry {
                pattern: Pattern {
                    degree: eps,
                    supp1: 0,
                    supp2: 0,
                }
                .with_sizes(p, q),
                outcome: PatternOutcome::Parity,
            });
        }
        // Vertex patterns of every geometric lattice met.
        let mut vpats: BTreeSet<Pattern> = BTreeSet::new();
        for (_, n, g) in &lattices {
            for v in g.vertices() {
                if self.outside_minimal(n, v) {
                    vpats.insert(n.pattern(v));
                }
            }
        }
        let patterns = self.close_patterns(&vpats);
        let (strata, index) = self.dedupe(1, lattices.iter().map(|(_, n, g)| (n.clone(), g.clone())).collect())?;
        let mut strata = strata;
        let order = codim1_order(&strata);
        let mut rank_of = vec![0usize; strata.len()];
        for (new, &old) in order.iter().enumerate() {
            rank_of[old] = new;
        }
        strata = order.iter().map(|&i| strata[i].clone()).collect();
        for (i, st) in strata.iter_mut().enumerate() {
            st.clusters = vec![i];
        }
        for (k, (i, _, _)) in lattices.iter().enumerate() {
            if let PatternOutcome::Geometric { strata: s, .. } = &mut sweep[*i].outcome {
                let id = rank_of[index[k]];
                if !s.contains(&id) {
                    s.push(id);
                    s.sort_unstable();
                }
            }
        }
        let generating = strata
            .iter()
            .map(|st| {
                let mut set = BTreeSet::new();
                for v in st.graph.vertices() {
                    if self.outside_minimal(&st.framed, v) {
                        let p = st.framed.pattern(v);
                        if self.extension_det(&p) == st.det() {
                            set.insert(p);
                        }
                    }
                }
                self.close_patterns(&set)
            })
            .collect();
        Ok(Codim1 {
            sweep,
            strata,
            patterns,
            generating,
        })
    }

    /// `|det(Λ̃ + Zu)|` for a vertex with the given pattern.
    pub fn extension_det(&self, p: &Pattern) -> i128 {
        let v = (rint(2) + projected_norm(p.p(), p.q(), p.degree)) * rint(MINIMAL_DET);
        v.to_integer()
    }

    fn outside_minimal(&self, n: &FramedLattice, v: &[i64]) -> bool {
        n.to_frame(v)[KUMMER + 1..].iter().any(|x| !x.is_zero())
    }

    /// Deduplicates geometric lattices into records; also returns, for
    /// every input, the index of its record.
    pub fn dedupe(&self, codim: usize, found: Vec<(FramedLattice, FanoGraph)>) -> Result<(Vec<Record>, Vec<usize>)> {
        let recs: Vec<Result<Record>> = found
            .into_par_iter()
            .map(|(n, g)| self.record(codim, &n, g))
            .collect();
        let mut out: Vec<Record> = Vec::new();
        let mut by_key: HashMap<(Vec<u8>, LatticeKey), usize> = HashMap::new();
        let mut index = Vec::new();
        for r in recs {
            let r = r?;
            let k = r.key();
            let i = *by_key.entry(k).or_insert_with(|| {
                out.push(r);
                out.len() - 1
            });
            index.push(i);
        }
        Ok((out, index))
    }

    /// Extends every base record by one more vertex.
    pub fn extend(&self, bases: &[Record], patterns: &[Pattern]) -> Result<Extension> {
        let per_base: Vec<Result<(ExtensionStats, Vec<(FramedLattice, FanoGraph)>)>> =
            bases.par_iter().map(|b| self.extend_one(b, patterns)).collect();
        let mut stats = ExtensionStats::default();
        let mut found = Vec::new();
        for r in per_base {
            let (s, f) = r?;
            stats.candidates += s.candidates;
            stats.orbits += s.orbits;
            stats.overlattices += s.overlattices;
            stats.geometric += s.geometric;
            found.extend(f);
        }
        let codim = bases.first().map_or(1, |b| b.codim + 1);
        let (mut records, _) = self.dedupe(codim, found)?;
        records.sort_by_key(|r| {
            (
                std::cmp::Reverse(r.conics() + r.reducible()),
                std::cmp::Reverse(r.lines()),
                r.det(),
                std::cmp::Reverse(r.aut_order()),
            )
        });
        Ok(Extension { records, stats })
    }

    fn extend_one(&self, base: &Record, patterns: &[Pattern]) -> Result<(ExtensionStats, Vec<(FramedLattice, FanoGraph)>)> {
        let n = &base.framed;
        let r = n.rank();
        let k = n.frame.len() - (KUMMER + 1);
        let ginv = n.lattice.inverse_gram();
        let verts: Vec<(bool, Vec<i64>)> = base
            .graph
            .vertices()
            .enumerate()
            .map(|(i, v)| (i < base.graph.n_lines(), v.clone()))
            .collect();
        let gen_lines: Vec<bool> = base.generators.iter().map(|p| p.degree == 1).collect();
        let mut stats = ExtensionStats::default();
        let mats = base.relative.stabilizer_matrices(&base.graph);
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut reps: Vec<Vec<i64>> = Vec::new();
        let minus_two = rint(-2);
        for pat in patterns {
            let new_line = pat.degree == 1;
            let base_prods = pat.frame_products();
            let choices: Vec<Vec<i64>> = gen_lines
                .iter()
                .map(|&ol| (-1..=2).filter(|&x| allowed_product(new_line, ol, x)).collect())
                .collect();
            let mut xs = vec![0usize; k];
            loop {
                let mut f = base_prods.clone();
                f.extend(xs.iter().enumerate().map(|(j, &c)| choices[j][c]));
                stats.candidates += 1;
                if let Some(p) = self.products_in(n, &f) {
                    if !seen.contains(&p) {
                        let pq = rational_row(&p);
                        let proj: Rational = vec_mat(&pq, &ginv).iter().zip(&pq).map(|(a, b)| a * b).sum();
                        if proj > minus_two
                            && verts.iter().all(|(ol, c)| {
                                let x: i64 = c.iter().zip(&p).map(|(a, b)| a * b).sum();
                                allowed_product(new_line, *ol, x)
                            })
                        {
                            // Orbit under the stabilizer.
                            let mut stack = vec![p.clone()];
                            seen.insert(p.clone());
                            while let Some(y) = stack.pop() {
                                for m in &mats {
                                    let z: Vec<i64> = (0..r).map(|i| (0..r).map(|j| m[i][j] * y[j]).sum()).collect();
                                    if seen.insert(z.clone()) {
                                        stack.push(z);
                                    }
                                }
                            }
                            reps.push(f.clone());
                        }
                    }
                }
                // Next product vector.
                let mut j = 0;
                while j < k {
                    xs[j] += 1;
                    if xs[j] < choices[j].len() {
                        break;
                    }
                    xs[j] = 0;
                    j += 1;
                }
                if j == k {
                    break;
                }
            }
        }
        stats.orbits = reps.len();
        let mut found = Vec::new();
        for f in reps {
            let m = n.extend(&f, -2)?;
            for (ov, v) in self.overlattices(&m)? {
                stats.overlattices += 1;
                if let Verdict::Geometric(g) = v {
                    stats.geometric += 1;
                    found.push((ov, *g));
                }
            }
        }
        log::info!(
            "base {} lines {} conics {}: {} candidates, {} orbits, {} geometric",
            base.det(),
            base.lines(),
            base.conics(),
            stats.candidates,
            stats.orbits,
            stats.geometric
        );
        Ok((stats, found))
    }

    /// Products of a vector with the basis of `n`, given its products with
    /// the frame; `None` unless integral.
    fn products_in(&self, n: &FramedLattice, frame_products: &[i64]) -> Option<Vec<i64>> {
        let f = rational_row(frame_products);
        let p: Vec<Rational> = n
            .basis
            .iter()
            .map(|row| row.iter().zip(&f).map(|(a, b)| a * b).sum())
            .collect();
        int_row(&p)
    }

    /// Projection of a pattern vector to the minimal lattice, in frame coordinates.
    fn projection(&self, p: &Pattern) -> Vec<Rational> {
        vec_mat(&rational_row(&p.frame_products()), &self.frame_inv)
    }

    /// Class of a pattern vector in the discriminant of the minimal lattice.
    pub fn delta_image(&self, p: &Pattern) -> Element {
        let y = self.projection(p);
        let x = self.lambda.coords_of_frame(&y);
        self.discr.reduce(&x).expect("projection lies in the dual")
    }

    pub fn signature(&self, p: &Pattern) -> ClusterSignature {
        let a = self.delta_image(p);
        let d2 = self.discr.scale(25, &a);
        let d5 = self.discr.scale(16, &a);
        let order2 = self.discr.element_order(&d2);
        let square2 = crate::scalar::mod_rat(&self.discr.q(&d2), 2);
        let theta = self.lambda.coords_of_frame(&theta_frame(KUMMER + 1));
        let eta5: Vec<Rational> = theta.iter().map(|x| x / rint(5)).collect();
        let eta5 = self.discr.reduce(&eta5).expect("θ/5 is in the dual");
        let mut coeff5 = -1;
        for c in 0..5 {
            if self.discr.scale(c, &eta5) == d5 {
                coeff5 = c.min(5 - c);
                break;
            }
        }
        ClusterSignature {
            order2,
            square2,
            coeff5,
        }
    }

    /// Types of the clusters of a record: each cluster is matched with the
    /// codimension-one stratum its vertices span over the minimal lattice.
    pub fn cluster_types(&self, rec: &Record, strata: &[Record]) -> Result<Vec<usize>> {
        let n = &rec.framed;
        let lat = &n.lattice;
        let mut dirs: BTreeMap<Vec<i128>, Vec<i64>> = BTreeMap::new();
        for v in rec.graph.vertices() {
            let y = n.to_frame(v);
            let extra = &y[KUMMER + 1..];
            if extra.iter().all(|x| x.is_zero()) {
                continue;
            }
            dirs.entry(direction(extra)).or_insert_with(|| v.clone());
        }
        let certs: Vec<&Vec<u8>> = strata.iter().map(|s| &s.relative.certificate).collect();
        let mut out = Vec::new();
        for u in dirs.values() {
            let mut gens: Vec<Vec<i64>> = lat.kummer()?.to_vec();
            gens.push(lat.h()?.to_vec());
            gens.push(u.clone());
            let sat = lat.saturation(&gens);
            let sub = sub_lattice(lat, &sat)?;
            let pol = Polarized::<f64>::new(sub.clone())?;
            let g = pol.fano_graph()?;
            let sym = Symmetry::new(&sub, &g, true)?;
            let t = certs
                .iter()
                .position(|c| **c == sym.certificate)
                .ok_or_else(|| Error::Invariant("cluster of unknown type".into()))?;
            out.push(t);
        }
        out.sort_unstable();
        Ok(out)
    }

    pub fn assign_clusters(&self, recs: &mut [Record], strata: &[Record]) -> Result<()> {
        let types: Vec<Result<Vec<usize>>> = recs.par_iter().map(|r| self.cluster_types(r, strata)).collect();
        for (r, t) in recs.iter_mut().zip(types) {
            r.clusters = t?;
        }
        Ok(())
    }

    /// Classes of generator pairs `(u, v, u·v)` over the minimal lattice,
    /// where `u`, `v` generate codimension-one strata.
    ///
    /// A pair is determined up to isometry by the symmetry-group orbit of
    /// the discriminant images of `u`, `v` together with the Gram matrix of
    /// their projections to the complement of the minimal lattice.
    pub fn generator_pairs(&self, c1: &Codim1) -> Result<PairCount> {
        let gens: Vec<(usize, Pattern)> = c1
            .generating
            .iter()
            .enumerate()
            .flat_map(|(i, ps)| ps.iter().map(move |p| (i, *p)))
            .collect();
        let orbit_of = self.discriminant_orbits();
        let img: HashMap<Pattern, (u64, Vec<Rational>, Rational)> = gens
            .iter()
            .map(|(_, p)| {
                let a = self.discr.encode(&self.delta_image(p));
                let y = self.projection(p);
                let perp = rint(-2) - projected_norm(p.p(), p.q(), p.degree);
                (*p, (a, y, perp))
            })
            .collect();
        let pair_id = |a: u64, b: u64| orbit_of[&(a, b)];
        let neg = |a: u64| self.discr.encode(&self.discr.scale(-1, &self.discr.decode(a)));
        type Key = (u32, Rational, Rational, Rational);
        let mut classes: BTreeMap<Key, (Pattern, Pattern, i64)> = BTreeMap::new();
        let frame = self.lambda.frame.clone();
        let fq = to_rational(&frame);
        for (_, pu) in &gens {
            for (_, pv) in &gens {
                let (a, yu, uu) = &img[pu];
                let (b, yv, vv) = &img[pv];
                let us_vs: Rational = vec_mat(yu, &fq).iter().zip(yv).map(|(x, y)| x * y).sum();
                for x in 0..=2i64 {
                    if (pu.degree == 1 || pv.degree == 1) && x > 1 {
                        continue;
                    }
                    let xp = rint(x as i128) - us_vs;
                    if *uu * *vv - xp * xp <= Rational::zero() {
                        continue;
                    }
                    let mut best: Option<Key> = None;
                    for (s1, s2) in [(1i128, 1i128), (1, -1), (-1, 1), (-1, -1)] {
                        let aa = if s1 == 1 { *a } else { neg(*a) };
                        let bb = if s2 == 1 { *b } else { neg(*b) };
                        let xs = xp * rint(s1 * s2);
                        for k in [(pair_id(aa, bb), *uu, *vv), (pair_id(bb, aa), *vv, *uu)] {
                            let key = (k.0, xs, k.1, k.2);
                            if best.as_ref().is_none_or(|b| key < *b) {
                                best = Some(key);
                            }
                        }
                    }
                    classes.entry(best.unwrap()).or_insert((*pu, *pv, x));
                }
            }
        }
        let checks: Vec<Result<(bool, bool)>> = classes
            .values()
            .par_bridge()
            .map(|&(pu, pv, x)| {
                let m1 = self.lambda.extend(&pu.frame_products(), -2)?;
                let mut f = pv.frame_products();
                f.push(x);
                let m = m1.extend(&f, -2)?;
                let ovs = self.overlattices(&m)?;
                let geo: Vec<bool> = ovs
                    .iter()
                    .enumerate()
                    .filter(|(_, (_, v))| v.is_geometric())
                    .map(|(i, _)| i == 0)
                    .collect();
                Ok((!geo.is_empty(), !geo.is_empty() && geo.iter().all(|&t| t)))
            })
            .collect();
        let mut geometric = 0;
        let mut trivial_only = 0;
        for c in checks {
            let (g, t) = c?;
            geometric += g as usize;
            trivial_only += t as usize;
        }
        Ok(PairCount {
            classes: classes.len(),
            geometric,
            trivial_only,
        })
    }

    /// Orbit labels of ordered pairs of discriminant elements under the
    /// symmetry group acting through the Kummer vectors.
    fn discriminant_orbits(&self) -> HashMap<(u64, u64), u32> {
        let elems: Vec<Element> = self.discr.elements().collect();
        let codes: Vec<u64> = elems.iter().map(|e| self.discr.encode(e)).collect();
        let index: HashMap<u64, usize> = codes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let n = elems.len();
        // Frame coordinates of each element's lift.
        let frame_rows: Vec<Vec<Rational>> = elems
            .iter()
            .map(|e| vec_mat(&self.discr.lift(e), &self.lambda.basis))
            .collect();
        let perms: Vec<Vec<usize>> = self
            .gamma
            .generators
            .iter()
            .map(|g| {
                frame_rows
                    .iter()
                    .map(|y| {
                        let mut z = y.clone();
                        for i in 0..KUMMER {
                            z[g[i] as usize] = y[i];
                        }
                        let x = self.lambda.coords_of_frame(&z);
                        index[&self.discr.encode(&self.discr.reduce(&x).expect("dual vector"))]
                    })
                    .collect()
            })
            .collect();
        let mut parent: Vec<u32> = (0..(n * n) as u32).collect();
        fn find(p: &mut [u32], x: u32) -> u32 {
            let mut r = x;
            while p[r as usize] != r {
                r = p[r as usize];
            }
            let mut y = x;
            while p[y as usize] != r {
                let nx = p[y as usize];
                p[y as usize] = r;
                y = nx;
            }
            r
        }
        for perm in &perms {
            for i in 0..n {
                for j in 0..n {
                    let a = find(&mut parent, (i * n + j) as u32);
                    let b = find(&mut parent, (perm[i] * n + perm[j]) as u32);
                    if a != b {
                        parent[a.max(b) as usize] = a.min(b);
                    }
                }
            }
        }
        let mut out = HashMap::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let r = find(&mut parent, (i * n + j) as u32);
                out.insert((codes[i], codes[j]), r);
            }
        }
        out
    }

    /// Supports `(p, q)` allowed for a vector with `u² = 0`, `u·h = 3` by
    /// the hyperbolicity bound, and whether any has a support of the
    /// required odd parity.
    pub fn three_isotropic_supports(&self) -> (Vec<(usize, usize)>, bool) {
        let mut out = Vec::new();
        // Members of C_* have even size.
        for p in (0..=16usize).step_by(2) {
            for q in 0..=16 - p {
                if projected_norm(p, q, 3) >= Rational::zero() {
                    out.push((p, q));
                }
            }
        }
        let any_odd = out.iter().any(|&(p, _)| {
            self.ks
                .c_of_size(p)
                .into_iter()
                .any(|m| self.ks.parity(m).map(|x| x == Parity::Odd).unwrap_or(false))
        });
        (out, any_odd)
    }

    /// Marks of the hyperbolicity table for degree `eps`, indexed by
    /// `(p, q)` with `p` even and `p + q ≤ 16`.
    pub fn sylvester_marks(&self, c1: &Codim1, eps: i64) -> BTreeMap<(usize, usize), Mark> {
        let mut out = BTreeMap::new();
        for p in (0..=16).step_by(2) {
            for q in 0..=16 - p {
                let mark = match sylvester(p, q, eps) {
                    Sylvester::Excluded | Sylvester::Corank0 => Mark::Dot,
                    Sylvester::Allowed => {
                        let entries: Vec<&SweepEntry> = c1
                            .sweep
                            .iter()
                            .filter(|e| e.pattern.degree == eps && e.pattern.p() == p && e.pattern.q() == q)
                            .collect();
                        if entries.iter().all(|e| e.outcome == PatternOutcome::Parity) {
                            Mark::Cross
                        } else if eps == 1
                            || entries
                                .iter()
                                .any(|e| matches!(e.outcome, PatternOutcome::Geometric { vertex: true, .. }))
                        {
                            Mark::Bullet
                        } else {
                            Mark::Circle
                        }
                    }
                };
                out.insert((p, q), mark);
            }
        }
        out
    }
}

/// Primitive integer direction of a rational vector, sign-normalized.
fn direction(v: &[Rational]) -> Vec<i128> {
    let mut den: i128 = 1;
    for x in v {
        den = num_integer::lcm(den, *x.denom());
    }
    let ints: Vec<i128> = v.iter().map(|x| (x * rint(den)).to_integer()).collect();
    let g = ints.iter().fold(0i128, |g, &x| num_integer::gcd(g, x));
    let mut out: Vec<i128> = ints.iter().map(|x| x / g).collect();
    if out.iter().find(|x| **x != 0).is_some_and(|x| x.is_negative()) {
        out.iter_mut().for_each(|x| *x = -*x);
    }
    out
}

/// Sublattice spanned by `basis`, carrying `h` and the Kummer vectors.
fn sub_lattice(lat: &EvenLattice, basis: &IMat) -> Result<EvenLattice> {
    let mut sub = lat.sublattice(basis)?;
    let b: QMat = basis.iter().map(|r| rational_row(r)).collect();
    let solve = |x: &[i64]| -> Result<Vec<i64>> {
        let c = crate::matrix::solve_left(&b, &rational_row(x))
            .ok_or_else(|| Error::Invariant("vector outside sublattice".into()))?;
        int_row(&c).ok_or_else(|| Error::Invariant("sublattice not saturated".into()))
    };
    sub.h = Some(solve(lat.h()?)?);
    sub.kummer = Some(lat.kummer()?.iter().map(|v| solve(v)).collect::<Result<_>>()?);
    Ok(sub)
}

fn serialize_display<T: std::fmt::Display, Z: serde::Serializer>(x: &T, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
    s.collect_str(x)
}

fn verdict_name(v: &Verdict) -> String {
    match v {
        Verdict::Unsaturated => "unsaturated".into(),
        Verdict::NoEmbedding => "no embedding".into(),
        Verdict::Inadmissible(Violation::DivisiblePolarization) => "divisible polarization".into(),
        Verdict::Inadmissible(Violation::ExceptionalDivisor(_)) => "exceptional divisor".into(),
        Verdict::Inadmissible(Violation::TwoIsotropic(_)) => "2-isotropic vector".into(),
        Verdict::Inadmissible(Violation::MissingConic(_)) => "missing conic".into(),
        Verdict::Special(_) => "3-isotropic vector".into(),
        Verdict::Sparse => "graph does not span".into(),
        Verdict::Geometric(_) => "geometric".into(),
    }
}

/// Order of codimension-one strata: with lines first (by line count), then
/// by conic count.
fn codim1_order(strata: &[Record]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..strata.len()).collect();
    idx.sort_by_key(|&i| {
        let s = &strata[i];
        (s.lines() == 0, s.lines(), s.conics(), s.det())
    });
    idx
}

impl Pattern {
    /// Placeholder pattern carrying only the sizes, for parity-only cells.
    fn with_sizes(self, p: usize, q: usize) -> Pattern {
        let s1 = if p == 16 { FULL } else { ((1u32 << p) - 1) as Mask };
        let s2 = (((1u32 << q) - 1) << p) as Mask;
        debug_assert_eq!(popcount(s1), p);
        Pattern {
            degree: self.degree,
            supp1: s1,
            supp2: s2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumeration() {
        assert_eq!(subsets_of_size(0b1111, 2).len(), 6);
        assert_eq!(subsets_of_size(0b1111, 0), vec![0]);
        assert_eq!(subsets_of_size(0b1111, 4), vec![0b1111]);
        assert!(subsets_of_size(0b11, 3).is_empty());
        assert_eq!(subsets_of_size(FULL, 3).len(), 560);
    }

    #[test]
    fn directions_are_primitive() {
        let v = vec![Rational::new(-2, 3), Rational::new(4, 3)];
        assert_eq!(direction(&v), vec![1, -2]);
    }
}
