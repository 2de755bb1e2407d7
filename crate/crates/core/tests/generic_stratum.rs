use conics_core::construction::{bb_conics, lambda_tilde, theta_frame};
use conics_core::discriminant::DiscriminantForm;
use conics_core::fano::Polarized;
use conics_core::kummer::KummerStructure;
use conics_core::scalar::rat;
use conics_core::Rational;

#[test]
fn minimal_lattice_discriminant() {
    let ks = KummerStructure::new().unwrap();
    let lt = lambda_tilde(&ks).unwrap();
    let d = lt.lattice.discriminant();
    assert_eq!(d.order(), 640);
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
    assert!(d.is_isomorphic(&expected));
    let th = theta_frame(17);
    let x = lt.from_frame(&th).unwrap();
    assert_eq!(lt.lattice.norm(&x), 40);
}

#[test]
fn minimal_lattice_fano_graph() {
    let ks = KummerStructure::new().unwrap();
    let lt = lambda_tilde(&ks).unwrap();
    for exact in [false, true] {
        let g = if exact {
            Polarized::<Rational>::new(lt.lattice.clone()).unwrap().fano_graph().unwrap()
        } else {
            Polarized::<f64>::new(lt.lattice.clone()).unwrap().fano_graph().unwrap()
        };
        assert_eq!(g.n_lines(), 0);
        assert_eq!(g.n_conics(), 32);
        assert_eq!(g.n_reducible(), 0);
        assert_eq!(g.kummer.len(), 16);
        let bb: Vec<usize> = (0..32).filter(|i| !g.kummer.contains(i)).collect();
        assert_eq!(bb.len(), 16);
        for set in [&g.kummer, &bb] {
            for &i in set.iter() {
                for &j in set.iter() {
                    assert_eq!(g.graph.mult(i, j), 0);
                }
            }
        }
        for c in bb_conics(&ks) {
            let v = lt.from_frame(&c).unwrap();
            assert!(g.conics.contains(&v));
            assert_eq!(lt.pattern(&v).kind(), "c12-3");
        }
        assert_eq!(g.fano_index(&lt.lattice).unwrap(), Some(4));
    }
    let p = Polarized::<f64>::new(lt.lattice.clone()).unwrap();
    assert!(p.is_admissible());
    assert!(p.is_triquadric());
    let g = p.fano_graph().unwrap();
    let aut = g.graph.automorphisms();
    assert_eq!(aut.order, 18432 * 864);
    let rel = g.marked_graph().automorphisms();
    assert_eq!(rel.order, 18432 * 864 / 2);
}

#[test]
fn minimal_lattice_symmetry() {
    use conics_core::kummer::stabilizer_gamma;
    use conics_core::symmetry::{closure_perms, Symmetry};
    let ks = KummerStructure::new().unwrap();
    let lt = lambda_tilde(&ks).unwrap();
    let g = Polarized::<f64>::new(lt.lattice.clone()).unwrap().fano_graph().unwrap();
    let sym = Symmetry::new(&lt.lattice, &g, true).unwrap();
    assert_eq!(sym.aut.order, 18432 * 432);
    let gamma = stabilizer_gamma(&ks);
    println!("orbit {} stabilizer {} gamma {}", sym.orbit_len, sym.stabilizer_order(), gamma.order());
    assert_eq!(closure_perms(&sym.stabilizer, 1 << 20).unwrap() as u128, sym.stabilizer_order());
    for m in sym.stabilizer_matrices(&g) {
        let gm = conics_core::matrix::gram_of(&m, &lt.lattice.gram);
        assert_eq!(gm, lt.lattice.gram);
    }
}
