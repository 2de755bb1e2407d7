//! One PASS/FAIL line per acceptance item. The census is computed once and
//! shared. Items listed in `KNOWN_UNATTAINED` may fail without failing the
//! target; any other failure, or an unexpected pass of a listed item, does.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::*;
use conics_core::binary::BinaryForm;
use conics_core::census::{Census, Extension, Record};
use conics_core::construction::{bb_conics, theta_frame};
use conics_core::discriminant::DiscriminantForm;
use conics_core::kummer::gamma_orbits;
use conics_core::real::{has_u2_summand_genus, real_structures};
use conics_core::scalar::rat;
use conics_core::{ExactPolarized, FloatPolarized};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Items whose reference value is not reproduced; see the project notes.
const KNOWN_UNATTAINED: &[&str] = &["6.triples"];

const SEED: u64 = 0x5eed_0c71c5;

struct Report {
    items: Vec<(String, bool)>,
}

impl Report {
    fn check(&mut self, id: &str, ok: bool, detail: impl std::fmt::Display) {
        println!("{} {id:<16} {detail}", if ok { "PASS" } else { "FAIL" });
        self.items.push((id.to_string(), ok));
    }

    fn within(&mut self, id: &str, elapsed: Duration, limit: Duration) {
        self.check(id, elapsed <= limit, format!("{:.1} s (limit {} s)", elapsed.as_secs_f64(), limit.as_secs()));
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn total_conics(r: &Record) -> usize {
    r.conics() + r.reducible()
}

fn forms(r: &Record) -> Vec<String> {
    r.transcendental.iter().map(BinaryForm::to_string).collect()
}

fn combinatorics(rep: &mut Report, census: &Census, elapsed: Duration) {
    let ks = &census.ks;
    rep.check("1.o8", ks.octads.len() == 30, format!("|O8| = {}", ks.octads.len()));
    rep.check("1.o_star", ks.o_star.len() == 32, format!("|O*| = {}", ks.o_star.len()));
    rep.check("1.gamma", census.gamma.order() == 9216, format!("|Gamma| = {}", census.gamma.order()));
    let table: Vec<String> = gamma_orbits(&census.gamma, ks)
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
    let mismatched = table.iter().zip(expected).filter(|(a, b)| a != b).count() + table.len().abs_diff(expected.len());
    rep.check("1.orbit_table", mismatched == 0, format!("{} cells, {mismatched} differ", table.len()));
    rep.within("1.runtime", elapsed, secs(10));
}

fn minimal_lattice(rep: &mut Report, census: &Census) {
    let t = Instant::now();
    let lt = &census.lambda;
    let l = &lt.lattice;
    let even = l.gram.iter().enumerate().all(|(i, r)| r[i] % 2 == 0);
    rep.check("2.even", even, format!("rank {}", l.rank()));
    let sig = l.signature();
    rep.check("2.signature", sig == (1, l.rank() - 1), format!("({}, {})", sig.0, sig.1));
    rep.check("2.det", l.det().abs() == 640, format!("|det| = {}", l.det().abs()));
    let u = [[rat(0, 1), rat(1, 2)], [rat(1, 2), rat(0, 1)]];
    let mut vals = vec![vec![rat(0, 1); 6]; 6];
    for blk in [0, 2] {
        for i in 0..2 {
            for j in 0..2 {
                vals[blk + i][blk + j] = u[i][j];
            }
        }
    }
    vals[4][4] = rat(5, 8);
    vals[5][5] = rat(8, 5);
    let expected = DiscriminantForm::from_values(vec![2, 2, 2, 2, 8, 5], &vals);
    rep.check("2.discriminant", l.discriminant().is_isomorphic(&expected), "u+u+[5/8] and [8/5]");
    let theta = lt.from_frame(&theta_frame(l.rank())).expect("theta lies in the lattice");
    rep.check("2.theta", l.norm(&theta) == 40, format!("theta^2 = {}", l.norm(&theta)));
    rep.within("2.runtime", t.elapsed(), secs(1));
}

fn generic_stratum(rep: &mut Report, census: &Census) {
    let t = Instant::now();
    let lt = &census.lambda;
    let g = ExactPolarized::new(lt.lattice.clone())
        .and_then(|p| p.fano_graph())
        .expect("minimal lattice is polarized");
    rep.check(
        "3.counts",
        g.n_lines() == 0 && g.n_reducible() == 0 && g.n_conics() == 32,
        format!("{} lines, {}+{} conics", g.n_lines(), g.n_reducible(), g.n_conics()),
    );
    let others: Vec<usize> = (0..g.n_conics()).filter(|i| !g.kummer.contains(i)).collect();
    let disjoint = [&g.kummer, &others]
        .iter()
        .all(|set| set.iter().all(|&i| set.iter().all(|&j| g.graph.mult(i, j) == 0)));
    let patterned = bb_conics(&census.ks).iter().all(|c| {
        lt.from_frame(c)
            .map(|v| g.conics.contains(&v) && lt.pattern(&v).kind() == "c12-3")
            .unwrap_or(false)
    });
    rep.check(
        "3.conics",
        g.kummer.len() == 16 && others.len() == 16 && disjoint && patterned,
        format!("{} Kummer + {} of pattern c12-3, disjoint families: {disjoint}", g.kummer.len(), others.len()),
    );
    let index = g.fano_index(&lt.lattice).ok().flatten();
    rep.check("3.fano_index", index == Some(4), format!("index {index:?}"));
    rep.within("3.runtime", t.elapsed(), secs(60));
}

fn codim1(rep: &mut Report, run: &[Record], elapsed: Duration) {
    let got: BTreeSet<(usize, usize, usize, i128, u128)> = run
        .iter()
        .map(|r| (r.lines(), r.reducible(), r.conics(), r.det(), r.i_delta()))
        .collect();
    let want: BTreeSet<_> = [(4, 0, 32, 400, 2), (20, 16, 20, 144, 1), (0, 0, 40, 576, 2), (0, 0, 64, 384, 4), (0, 0, 80, 320, 2)]
        .into_iter()
        .collect();
    rep.check("4.strata", run.len() == 5 && got == want, format!("{} strata {got:?}", run.len()));
    rep.within("4.runtime", elapsed, secs(600));
}

fn triquadric(rep: &mut Report, census: &Census, all: &[&Record]) {
    let bad = all
        .iter()
        .filter(|r| !FloatPolarized::new(r.lattice().clone()).map(|p| p.is_triquadric()).unwrap_or(false))
        .count();
    rep.check("5.triquadric", bad == 0, format!("{} records, {bad} with a 3-isotropic vector", all.len()));
    let (supports, any_odd) = census.three_isotropic_supports();
    let sizes: BTreeSet<usize> = supports.iter().map(|s| s.0).collect();
    rep.check(
        "5.supports",
        sizes == BTreeSet::from([0, 14, 16]) && !any_odd,
        format!("support sizes {sizes:?}, odd support present: {any_odd}"),
    );
}

fn codim2(rep: &mut Report, census: &Census, run: &conics_core::census::CensusRun, elapsed: Duration) {
    let e: &Extension = run.codim2.as_ref().expect("codimension 2 computed");
    rep.check("6.strata", e.abstract_graphs() == 15, format!("{} abstract graphs", e.abstract_graphs()));
    rep.check("6.marked", e.marked_graphs() == 16, format!("{} graphs with Kummer conics marked", e.marked_graphs()));
    let pairs = census.generator_pairs(&run.codim1).expect("pair classes");
    rep.check("6.triples", pairs.classes == 30, format!("{} classes of generator pairs (reference 30)", pairs.classes));
    rep.check("6.geometric", pairs.geometric == 20, format!("{} classes with a geometric overlattice", pairs.geometric));
    let best = e.records.iter().max_by_key(|r| total_conics(r));
    let (n, det) = best.map_or((0, 0), |r| (total_conics(r), r.det()));
    rep.check("6.max_conics", n == 128 && det == 160, format!("{n} conics, |det| = {det}"));
    rep.within("6.runtime", elapsed, secs(1800));
}

fn find(rs: &[Record], conics: usize) -> Option<&Record> {
    rs.iter().find(|r| r.reducible() == 0 && r.conics() == conics)
}

fn codim3(rep: &mut Report, e: &Extension, elapsed: Duration) {
    let rs = &e.records;
    rep.check("7.abstract", e.abstract_graphs() == 36, format!("{} abstract graphs", e.abstract_graphs()));
    rep.check("7.marked", e.marked_graphs() == 41, format!("{} (graph, Kummer set) pairs", e.marked_graphs()));
    for (id, conics, aut, i_delta, t) in [("7.x176", 176, 15360, 10, "[8,4,12]"), ("7.x160", 160, 3072, 12, "[4,0,24]")] {
        let r = find(rs, conics);
        let ok = r.is_some_and(|r| r.lines() == 0 && r.aut_order() == aut && r.i_delta() == i_delta && forms(r) == [t]);
        let detail = r.map_or("absent".to_string(), |r| {
            format!("{} conics, |G| = {}, i = {}, T = {:?}", r.conics(), r.aut_order(), r.i_delta(), forms(r))
        });
        rep.check(id, ok, detail);
    }
    let max_lines = rs.iter().map(Record::lines).max().unwrap_or(0);
    let max_red = rs.iter().map(Record::reducible).max().unwrap_or(0);
    rep.check("7.max_lines", max_lines == 28, format!("{max_lines} lines"));
    rep.check("7.max_reducible", max_red == 48, format!("{max_red} reducible conics"));
    rep.within("7.runtime", elapsed, secs(7200));
}

fn conditionals(rep: &mut Report, all: &[&Record]) {
    let many: Vec<_> = all.iter().filter(|r| total_conics(r) > 128).collect();
    let ok = many.iter().all(|r| r.rank() == 20 && r.lines() == 0);
    rep.check("8.over_128", ok, format!("{} records with more than 128 conics", many.len()));
    let irr: Vec<_> = all.iter().filter(|r| r.conics() > 104).collect();
    let ok = irr.iter().all(|r| r.lines() == 0);
    rep.check("8.over_104", ok, format!("{} records with more than 104 irreducible conics", irr.len()));
}

fn real(rep: &mut Report, run: &conics_core::census::CensusRun) {
    let t = Instant::now();
    let mut best = (0, 0);
    let mut failed = 0;
    for r in run.level(3) {
        match real_structures(r) {
            Ok(reps) => {
                for x in reps {
                    best = best.max((x.max_real_conics, r.conics()));
                }
            }
            Err(_) => failed += 1,
        }
    }
    rep.check(
        "9.max_real",
        best == (56, 176) && failed == 0,
        format!("{} real conics on the {}-conic octic, {failed} records skipped", best.0, best.1),
    );
    rep.within("9.runtime", t.elapsed(), secs(600));
    let top = run.level(2).iter().max_by_key(|r| total_conics(r));
    let ok = top.is_some_and(|r| has_u2_summand_genus(r, 40));
    rep.check("9.u2_plus_40", ok, "transcendental genus of the 128-conic stratum contains U(2)+[40]");
}

fn properties(rep: &mut Report, all: &[&Record]) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let t = Instant::now();
    let mut bad = 0;
    for i in 0..100 {
        let g = random_definite(&mut rng, 1 + i % 6);
        bad += usize::from(check_enumeration(&g, 12).is_err());
    }
    rep.check("10.enumeration", bad == 0, format!("100 definite lattices, {bad} disagree with box search"));

    let mut bad = 0;
    for i in 0..100 {
        let g = random_even(&mut rng, 1 + i % 3, 1 + (i % 4) as i64);
        bad += usize::from(check_overlattice_round_trip(&g, 32).is_err());
    }
    rep.check("10.overlattice", bad == 0, format!("100 lattices, {bad} failed round trips"));

    let mut bad = 0;
    let mut n = 0;
    for i in 0..100 {
        n += 1;
        bad += usize::from(check_milgram(&random_even(&mut rng, 1 + i % 5, 1 + (i % 3) as i64)).is_err());
    }
    for r in all {
        n += 1;
        bad += usize::from(check_milgram(&r.lattice().gram).is_err());
    }
    rep.check("10.milgram", bad == 0, format!("{n} lattices, {bad} violations"));

    let mut bad = 0;
    for _ in 0..1000 {
        let f = random_form(&mut rng);
        let m = random_sl2(&mut rng);
        bad += usize::from(check_gauss(&f, &m).is_err());
    }
    rep.check("10.gauss", bad == 0, format!("1000 forms, {bad} failures"));

    let mut bad = 0;
    for r in all {
        let g = &r.graph.graph;
        for _ in 0..100 {
            let p = random_perm(&mut rng, g.len());
            bad += usize::from(check_certificate(g, &p).is_err());
        }
    }
    rep.check("10.certificate", bad == 0, format!("{} graphs x 100 relabelings, {bad} failures", all.len()));
    println!("     properties took {:.1} s", t.elapsed().as_secs_f64());
}

fn main() {
    let mut rep = Report { items: Vec::new() };

    let t = Instant::now();
    let census = Census::new().expect("census setup");
    combinatorics(&mut rep, &census, t.elapsed());
    minimal_lattice(&mut rep, &census);
    generic_stratum(&mut rep, &census);

    let t = Instant::now();
    let c1 = census.codim1().expect("codimension 1");
    let t1 = t.elapsed();
    let t = Instant::now();
    let mut e2 = census.extend(&c1.strata, &c1.patterns).expect("codimension 2");
    census.assign_clusters(&mut e2.records, &c1.strata).expect("clusters");
    let t2 = t.elapsed();
    let t = Instant::now();
    let mut e3 = census.extend(&e2.records, &c1.patterns).expect("codimension 3");
    census.assign_clusters(&mut e3.records, &c1.strata).expect("clusters");
    let t3 = t.elapsed();
    let run = conics_core::census::CensusRun {
        codim1: c1,
        codim2: Some(e2),
        codim3: Some(e3),
    };
    let all: Vec<&Record> = run.records().collect();

    codim1(&mut rep, run.level(1), t1);
    triquadric(&mut rep, &census, &all);
    codim2(&mut rep, &census, &run, t1 + t2);
    codim3(&mut rep, run.codim3.as_ref().unwrap(), t1 + t2 + t3);
    conditionals(&mut rep, &all);
    real(&mut rep, &run);
    properties(&mut rep, &all);

    let failed: BTreeSet<&str> = rep.items.iter().filter(|i| !i.1).map(|i| i.0.as_str()).collect();
    let known: BTreeSet<&str> = KNOWN_UNATTAINED.iter().copied().collect();
    println!("{} items, {} failed, known unattained: {known:?}", rep.items.len(), failed.len());
    assert_eq!(failed, known, "failures differ from the known unattained items");
}
