use std::collections::BTreeSet;

use conics_core::census::Census;
use conics_core::scalar::rat;

#[test]
fn codim1_strata_marks_and_clusters() {
    let c = Census::new().unwrap();
    let c1 = c.codim1().unwrap();

    let rows: Vec<(usize, usize, usize)> = c1.strata.iter().map(|r| (r.lines(), r.reducible(), r.conics())).collect();
    assert_eq!(rows, [(4, 0, 32), (20, 16, 20), (0, 0, 40), (0, 0, 64), (0, 0, 80)]);

    let kinds: Vec<BTreeSet<String>> = c1.generating.iter().map(|g| g.iter().map(|p| p.kind()).collect()).collect();
    let expected: [&[&str]; 5] = [&["l4-0"], &["l12-0", "l6-0"], &["c12-0", "c4-0"], &["c10-0", "c6-0"], &["c8-0"]];
    for (k, e) in kinds.iter().zip(expected) {
        assert_eq!(k, &e.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>());
    }

    let sigs: Vec<_> = c1
        .generating
        .iter()
        .map(|g| {
            let s = c.signature(&g[0]);
            (s.order2, s.square2, s.coeff5)
        })
        .collect();
    assert_eq!(
        sigs,
        [(8, rat(5, 8), 0), (8, rat(5, 8), 1), (4, rat(1, 2), 2), (2, rat(1, 1), 1), (4, rat(1, 2), 0)]
    );

    let conics = [
        "oo...............",
        "x..............",
        "*............",
        "*..........",
        "*........",
        "*......",
        "*oo.o",
        "xxx",
        "o",
    ];
    let lines = [
        "xx...............",
        "x..............",
        "*............",
        "*..........",
        "*........",
        "*......",
        "*....",
        "xxx",
        "x",
    ];
    for (eps, want) in [(2, conics), (1, lines)] {
        let m = c.sylvester_marks(&c1, eps);
        for (i, p) in (0..=16).step_by(2).enumerate() {
            let row: String = (0..=16 - p).map(|q| m[&(p, q)].symbol()).collect();
            assert_eq!(row, want[i], "degree {eps}, support size {p}");
        }
    }
}

#[test]
fn three_isotropic_supports_all_fail_parity() {
    let c = Census::new().unwrap();
    let (supports, any_odd) = c.three_isotropic_supports();
    let sizes: BTreeSet<usize> = supports.iter().map(|s| s.0).collect();
    assert_eq!(sizes, BTreeSet::from([0, 14, 16]));
    assert!(!any_odd);
}
