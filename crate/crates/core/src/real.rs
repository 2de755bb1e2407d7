//! Real structures on singular octics and the rank-19 real criterion.
//!
//! A real structure acts on the Néron-Severi lattice as `-c` for an
//! involution `c` of the Fano graph extending to the lattice; it is realized
//! when some involution `c_T` of the transcendental lattice, of determinant
//! `-1`, makes `c ⊕ c_T` extend to the K3 lattice, i.e. the two actions agree
//! on the discriminant through the gluing anti-isometry. Real lines and
//! conics are the vertices fixed by `c`.

use serde::Serialize;

use crate::binary::{det2, BinaryForm, Mat2};
use crate::census::Record;
use crate::discriminant::{DiscriminantForm, Element};
use crate::error::{Error, Result};
use crate::matrix::IMat;

/// Largest stabilizer expanded into explicit matrices.
const ELEMENT_LIMIT: usize = 200_000;

#[derive(Debug, Clone, Serialize)]
pub struct RealReport {
    pub det: i128,
    pub conics: usize,
    pub transcendental: String,
    /// Involutions of the lattice stabilizer (identity included).
    pub involutions: usize,
    /// Those realized by a real structure.
    pub realized: usize,
    pub max_real_conics: usize,
    pub max_real_lines: usize,
    /// Cycle type `(fixed, swapped pairs)` of a maximizer on the vertices.
    pub witness: Option<(usize, usize)>,
}

/// Generator images of `m` acting on row vectors of a binary form.
fn induced_binary(d: &DiscriminantForm, m: &Mat2) -> Vec<Element> {
    let mi: IMat = vec![m[0].to_vec(), m[1].to_vec()];
    d.induced(&mi)
}

fn compose(d_src: &DiscriminantForm, d_dst: &DiscriminantForm, images: &[Element], x: &[i64]) -> Element {
    d_src.apply_map(images, d_dst, x)
}

/// Orientation-reversing involutions of `t`, with their discriminant action.
fn reversing_involutions(t: &BinaryForm, dt: &DiscriminantForm) -> Result<Vec<Vec<Element>>> {
    let mut out = Vec::new();
    for m in t.automorphisms()? {
        let sq = [
            [m[0][0] * m[0][0] + m[0][1] * m[1][0], m[0][0] * m[0][1] + m[0][1] * m[1][1]],
            [m[1][0] * m[0][0] + m[1][1] * m[1][0], m[1][0] * m[0][1] + m[1][1] * m[1][1]],
        ];
        if det2(&m) == -1 && sq == [[1, 0], [0, 1]] {
            let act = induced_binary(dt, &m);
            if !out.contains(&act) {
                out.push(act);
            }
        }
    }
    Ok(out)
}

fn is_identity(m: &IMat) -> bool {
    m.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &x)| x == i64::from(i == j)))
}

fn square(m: &IMat) -> IMat {
    let n = m.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| m[i][k] * m[k][j]).sum()).collect())
        .collect()
}

fn fixes(v: &[i64], m: &IMat) -> bool {
    (0..m.len()).all(|j| v.iter().zip(m).map(|(a, row)| a * row[j]).sum::<i64>() == v[j])
}

/// Real structures of a rank-20 record, for each transcendental form in
/// the genus; the maximum is taken over all of them.
pub fn real_structures(rec: &Record) -> Result<Vec<RealReport>> {
    if rec.rank() != 20 {
        return Err(Error::Input("real structures are enumerated for rank 20 only".into()));
    }
    let lat = rec.lattice();
    let dn = lat.discriminant();
    let dn_neg = dn.negated();
    let elems = rec
        .absolute
        .stabilizer_elements(&rec.graph, ELEMENT_LIMIT)
        .ok_or_else(|| Error::Invariant("stabilizer too large to expand".into()))?;
    let involutions: Vec<&IMat> = elems.iter().filter(|m| is_identity(&square(m))).collect();
    let actions: Vec<Vec<Element>> = involutions.iter().map(|m| dn.induced(m)).collect();
    let gens: Vec<Element> = (0..dn.orders.len())
        .map(|i| {
            let mut e = dn.zero();
            e[i] = 1;
            e
        })
        .collect();
    let n_lines = rec.graph.n_lines();
    let mut reports = Vec::new();
    for t in &rec.transcendental {
        let dt = t.discriminant();
        let anti = dn_neg.isometries(&dt, usize::MAX);
        if anti.is_empty() {
            return Err(Error::Invariant(format!("{t} is not in the transcendental genus")));
        }
        let cts = reversing_involutions(t, &dt)?;
        let mut report = RealReport {
            det: rec.det(),
            conics: rec.conics(),
            transcendental: t.to_string(),
            involutions: involutions.len(),
            realized: 0,
            max_real_conics: 0,
            max_real_lines: 0,
            witness: None,
        };
        for (m, g) in involutions.iter().zip(&actions) {
            let ok = anti.iter().any(|phi| {
                cts.iter().any(|ct| {
                    gens.iter().zip(g).all(|(e, ge)| {
                        let lhs = compose(&dn_neg, &dt, phi, ge);
                        let rhs = compose(&dt, &dt, ct, &compose(&dn_neg, &dt, phi, e));
                        lhs == rhs
                    })
                })
            });
            if !ok {
                continue;
            }
            report.realized += 1;
            let fixed: Vec<bool> = rec.graph.vertices().map(|v| fixes(v, m)).collect();
            let lines = fixed[..n_lines].iter().filter(|&&f| f).count();
            let conics = fixed[n_lines..].iter().filter(|&&f| f).count();
            if (conics, lines) > (report.max_real_conics, report.max_real_lines) {
                report.max_real_conics = conics;
                report.max_real_lines = lines;
                let nf = fixed.iter().filter(|&&f| f).count();
                report.witness = Some((nf, (fixed.len() - nf) / 2));
            }
        }
        reports.push(report);
    }
    Ok(reports)
}

/// Gram matrix of `U(2) ⊕ [n]`.
pub fn u2_plus(n: i64) -> IMat {
    vec![vec![0, 2, 0], vec![2, 0, 0], vec![0, 0, n]]
}

/// Whether `U(2) ⊕ [n]` lies in the transcendental genus of `rec`, i.e. its
/// discriminant is anti-isometric to that of the Néron-Severi lattice.
pub fn has_u2_summand_genus(rec: &Record, n: i64) -> bool {
    let t = DiscriminantForm::from_gram(&u2_plus(n));
    rec.lattice().discriminant().negated().is_isomorphic(&t) && rec.rank() == 19
}
