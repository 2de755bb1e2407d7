#![allow(dead_code)]

use conics_core::binary::BinaryForm;
use conics_core::discriminant::generated_order;
use conics_core::graph::Graph;
use conics_core::lattice::EvenLattice;
use conics_core::matrix::{det_i64, inverse, to_scalar, IMat};
use conics_core::scalar::rint;
use conics_core::{FloatEllipsoid, Rational};
use rand::seq::SliceRandom;
use rand::Rng;

/// `B Bᵀ` for a random nonsingular `B` with small entries.
pub fn random_definite<R: Rng>(rng: &mut R, rank: usize) -> IMat {
    loop {
        let b: IMat = (0..rank).map(|_| (0..rank).map(|_| rng.gen_range(-2..=2)).collect()).collect();
        if det_i64(&b) == 0 {
            continue;
        }
        return (0..rank)
            .map(|i| (0..rank).map(|j| (0..rank).map(|k| b[i][k] * b[j][k]).sum()).collect())
            .collect();
    }
}

/// Nondegenerate even symmetric matrix, possibly indefinite.
pub fn random_even<R: Rng>(rng: &mut R, rank: usize, scale: i64) -> IMat {
    loop {
        let mut g = vec![vec![0i64; rank]; rank];
        for i in 0..rank {
            g[i][i] = 2 * rng.gen_range(-3..=3);
            for j in 0..i {
                let x = rng.gen_range(-2..=2);
                g[i][j] = x;
                g[j][i] = x;
            }
        }
        let d = det_i64(&g);
        if d != 0 && d.abs() <= 64 {
            return g.iter().map(|r| r.iter().map(|x| x * scale).collect()).collect();
        }
    }
}

/// Enumeration of `xᵀ G x ≤ bound` against a box search.
pub fn check_enumeration(g: &IMat, bound: i64) -> Result<(), String> {
    let n = g.len();
    let e = FloatEllipsoid::new(g).ok_or("not positive definite")?;
    let zero = vec![rint(0); n];
    let mut got = e.points(&zero, &rint(bound as i128));
    got.sort();
    let inv = inverse(&to_scalar::<f64>(g)).ok_or("singular")?;
    let radius: Vec<i64> = (0..n).map(|i| ((bound as f64) * inv[i][i]).sqrt().floor() as i64 + 1).collect();
    let mut want = Vec::new();
    let mut x: Vec<i64> = radius.iter().map(|r| -r).collect();
    loop {
        let q: i64 = (0..n).map(|i| (0..n).map(|j| x[i] * g[i][j] * x[j]).sum::<i64>()).sum();
        if q <= bound {
            want.push(x.clone());
        }
        let mut i = 0;
        while i < n {
            x[i] += 1;
            if x[i] <= radius[i] {
                break;
            }
            x[i] = -radius[i];
            i += 1;
        }
        if i == n {
            break;
        }
    }
    want.sort();
    if got == want {
        Ok(())
    } else {
        Err(format!("{} points enumerated, {} by box search, gram {g:?}", got.len(), want.len()))
    }
}

/// Overlattices built from isotropic subgroups recover their subgroup.
pub fn check_overlattice_round_trip(g: &IMat, limit: usize) -> Result<(), String> {
    let l = EvenLattice::new(g.clone()).map_err(|e| e.to_string())?;
    let d = l.discriminant();
    for sub in d.isotropic_subgroups().into_iter().take(limit) {
        let order = generated_order(&d, &sub) as i128;
        let glue: Vec<Vec<Rational>> = sub.iter().map(|a| d.lift(a)).collect();
        let (n, basis) = l.overlattice(&glue).map_err(|e| e.to_string())?;
        if n.det().abs() * order * order != l.det().abs() {
            return Err(format!("index mismatch for subgroup {sub:?}"));
        }
        let image: Vec<_> = basis
            .iter()
            .map(|row| d.reduce(row).ok_or("overlattice leaves the dual"))
            .collect::<Result<_, _>>()?;
        if generated_order(&d, &image) as i128 != order {
            return Err(format!("glue group of order {} for subgroup of order {order}", generated_order(&d, &image)));
        }
        let mut both = image.clone();
        both.extend(sub.iter().cloned());
        if generated_order(&d, &both) as i128 != order {
            return Err("glue group differs from the subgroup".into());
        }
    }
    Ok(())
}

/// Milgram: the Gauss sum of the discriminant determines the signature mod 8.
pub fn check_milgram(g: &IMat) -> Result<(), String> {
    let l = EvenLattice::new(g.clone()).map_err(|e| e.to_string())?;
    let (p, n) = l.signature();
    let s = l.discriminant().signature_mod8();
    if s == (p as i64 - n as i64).rem_euclid(8) {
        Ok(())
    } else {
        Err(format!("signature ({p},{n}) but Gauss sum gives {s}"))
    }
}

pub fn random_form<R: Rng>(rng: &mut R) -> BinaryForm {
    loop {
        let f = BinaryForm::new(rng.gen_range(1..60), rng.gen_range(-40..40), rng.gen_range(1..60));
        if f.is_positive_definite() {
            return f;
        }
    }
}

pub fn random_sl2<R: Rng>(rng: &mut R) -> [[i64; 2]; 2] {
    let mut m = [[1, 0], [0, 1]];
    for _ in 0..rng.gen_range(1..6) {
        let k = rng.gen_range(-3..=3);
        let t = if rng.gen_bool(0.5) { [[1, k], [0, 1]] } else { [[1, 0], [k, 1]] };
        m = [
            [m[0][0] * t[0][0] + m[0][1] * t[1][0], m[0][0] * t[0][1] + m[0][1] * t[1][1]],
            [m[1][0] * t[0][0] + m[1][1] * t[1][0], m[1][0] * t[0][1] + m[1][1] * t[1][1]],
        ];
    }
    m
}

/// Reduction is idempotent and constant on proper classes.
pub fn check_gauss(f: &BinaryForm, m: &[[i64; 2]; 2]) -> Result<(), String> {
    let r = f.reduced().map_err(|e| e.to_string())?;
    if !r.is_reduced() || r.reduced().map_err(|e| e.to_string())? != r {
        return Err(format!("{f} reduces to {r}, which is not stable"));
    }
    let g = f.transform(m);
    let rg = g.reduced().map_err(|e| e.to_string())?;
    if rg != r {
        return Err(format!("{f} ~ {g} but reductions {r} and {rg} differ"));
    }
    Ok(())
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize) -> Graph {
    let colors: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
    let mut adj = vec![vec![0u8; n]; n];
    for i in 0..n {
        for j in 0..i {
            let x = rng.gen_range(0..3);
            adj[i][j] = x;
            adj[j][i] = x;
        }
    }
    Graph::new(colors, adj)
}

pub fn random_perm<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Canonical certificates do not depend on the labeling.
pub fn check_certificate(g: &Graph, perm: &[usize]) -> Result<(), String> {
    if g.certificate() == g.relabeled(perm).certificate() {
        Ok(())
    } else {
        Err(format!("certificate changed under relabeling {perm:?}"))
    }
}
