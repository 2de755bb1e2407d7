//! Finite quadratic forms `L*/L` of even lattices.
//!
//! Elements are coefficient tuples on Smith generators. Values are kept as
//! integer numerators over a common denominator `den`: `q` modulo `2 den`,
//! `b` modulo `den`.

use std::collections::{BTreeSet, HashSet};
use std::f64::consts::PI;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::matrix::{det_int, inverse, smith, to_i128, vec_mat};
use crate::scalar::{rat, rint, Rational};

#[derive(Debug, Clone)]
pub struct DiscriminantForm {
    /// Orders of the generators, each dividing the next.
    pub orders: Vec<i64>,
    /// Generators as rational coordinate rows in the lattice basis.
    pub gens: Vec<Vec<Rational>>,
    /// Common denominator of all values.
    pub den: i64,
    /// `b(g_i, g_j) * den` modulo `den`, with `q(g_i) * den` modulo `2 den` on
    /// the diagonal.
    pub bnum: Vec<Vec<i64>>,
    /// Maps rows to Smith coefficients: `a = x * reduce`; integral iff the
    /// row lies in `L*`.
    reduce: Vec<Vec<Rational>>,
    /// Smith indices carrying the generators.
    kept: Vec<usize>,
}

pub type Element = Vec<i64>;

impl DiscriminantForm {
    /// Discriminant form of the even lattice with Gram matrix `gram`.
    pub fn from_gram(gram: &[Vec<i64>]) -> DiscriminantForm {
        let n = gram.len();
        let (d, u, _) = smith(&to_i128(gram));
        assert!(d.iter().all(|&x| x != 0), "degenerate lattice");
        let uq: Vec<Vec<Rational>> = u
            .iter()
            .map(|r| r.iter().map(|&x| rint(x)).collect())
            .collect();
        let uinv = inverse(&uq).expect("unimodular");
        let mut orders = Vec::new();
        let mut gens = Vec::new();
        let mut cols = Vec::new();
        for i in 0..n {
            if d[i] > 1 {
                orders.push(d[i] as i64);
                gens.push(uq[i].iter().map(|x| x / rint(d[i])).collect::<Vec<_>>());
                cols.push(i);
            }
        }
        let reduce: Vec<Vec<Rational>> = (0..n)
            .map(|r| (0..n).map(|i| uinv[r][i] * rint(d[i])).collect())
            .collect();
        let gq: Vec<Vec<Rational>> = gram
            .iter()
            .map(|r| r.iter().map(|&x| rint(x as i128)).collect())
            .collect();
        let m = gens.len();
        let mut vals = vec![vec![Rational::zero(); m]; m];
        let mut den: i128 = 1;
        for i in 0..m {
            let gi = vec_mat(&gens[i], &gq);
            for j in 0..m {
                let v: Rational = gi.iter().zip(&gens[j]).map(|(a, b)| a * b).sum();
                den = den.lcm(v.denom());
                vals[i][j] = v;
            }
        }
        let bnum = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let v = vals[i][j] * rint(den);
                        let x = v.to_integer();
                        if i == j {
                            x.rem_euclid(2 * den) as i64
                        } else {
                            x.rem_euclid(den) as i64
                        }
                    })
                    .collect()
            })
            .collect();
        DiscriminantForm {
            orders,
            gens,
            den: den as i64,
            bnum,
            reduce,
            kept: cols,
        }
    }

    /// Abstract form given by generator orders and a value matrix.
    pub fn from_values(orders: Vec<i64>, values: &[Vec<Rational>]) -> DiscriminantForm {
        let m = orders.len();
        let mut den: i128 = 1;
        for r in values {
            for v in r {
                den = den.lcm(v.denom());
            }
        }
        let bnum = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let x = (values[i][j] * rint(den)).to_integer();
                        if i == j {
                            x.rem_euclid(2 * den) as i64
                        } else {
                            x.rem_euclid(den) as i64
                        }
                    })
                    .collect()
            })
            .collect();
        DiscriminantForm {
            orders,
            gens: Vec::new(),
            den: den as i64,
            bnum,
            reduce: Vec::new(),
            kept: Vec::new(),
        }
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().map(|&d| d as u64).product()
    }

    /// Minimal number of generators.
    pub fn length(&self) -> usize {
        self.orders.len()
    }

    pub fn zero(&self) -> Element {
        vec![0; self.orders.len()]
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Element {
        a.iter()
            .zip(b)
            .zip(&self.orders)
            .map(|((x, y), d)| (x + y).rem_euclid(*d))
            .collect()
    }

    pub fn scale(&self, k: i64, a: &[i64]) -> Element {
        a.iter()
            .zip(&self.orders)
            .map(|(x, d)| ((k as i128 * *x as i128).rem_euclid(*d as i128)) as i64)
            .collect()
    }

    /// `q(a) * den` modulo `2 den`.
    pub fn qnum(&self, a: &[i64]) -> i64 {
        let m2 = 2 * self.den as i128;
        let mut s: i128 = 0;
        for i in 0..a.len() {
            if a[i] == 0 {
                continue;
            }
            let ai = a[i] as i128;
            s += ai * ai % m2 * self.bnum[i][i] as i128;
            for j in i + 1..a.len() {
                s += 2 * ai * a[j] as i128 % m2 * self.bnum[i][j] as i128;
            }
            s %= m2;
        }
        s.rem_euclid(m2) as i64
    }

    /// `b(a, c) * den` modulo `den`.
    pub fn bnum_of(&self, a: &[i64], c: &[i64]) -> i64 {
        let m = self.den as i128;
        let mut s: i128 = 0;
        for i in 0..a.len() {
            if a[i] == 0 {
                continue;
            }
            for j in 0..c.len() {
                s += a[i] as i128 * c[j] as i128 % m * self.bnum[i][j] as i128;
            }
            s %= m;
        }
        s.rem_euclid(m) as i64
    }

    pub fn q(&self, a: &[i64]) -> Rational {
        rat(self.qnum(a) as i128, self.den as i128)
    }

    pub fn b(&self, a: &[i64], c: &[i64]) -> Rational {
        rat(self.bnum_of(a, c) as i128, self.den as i128)
    }

    pub fn element_order(&self, a: &[i64]) -> i64 {
        a.iter()
            .zip(&self.orders)
            .map(|(x, d)| d / x.gcd(d))
            .fold(1, |acc, o| acc.lcm(&o))
    }

    /// Coefficients of a dual-lattice row, or `None` if it is not in `L*`.
    pub fn reduce(&self, x: &[Rational]) -> Option<Element> {
        let a = vec_mat(x, &self.reduce);
        if !a.iter().all(|v| v.is_integer()) {
            return None;
        }
        Some(
            self.kept
                .iter()
                .zip(&self.orders)
                .map(|(&i, d)| a[i].to_integer().rem_euclid(*d as i128) as i64)
                .collect(),
        )
    }

    /// Rational row representing `a`.
    pub fn lift(&self, a: &[i64]) -> Vec<Rational> {
        let n = self.gens.first().map_or(0, |g| g.len());
        let mut v = vec![Rational::zero(); n];
        for (k, g) in a.iter().zip(&self.gens) {
            if *k != 0 {
                for (vi, gi) in v.iter_mut().zip(g) {
                    *vi += gi * rint(*k as i128);
                }
            }
        }
        v
    }

    pub fn encode(&self, a: &[i64]) -> u64 {
        a.iter()
            .zip(&self.orders)
            .rev()
            .fold(0u64, |acc, (x, d)| acc * *d as u64 + *x as u64)
    }

    pub fn decode(&self, mut code: u64) -> Element {
        self.orders
            .iter()
            .map(|&d| {
                let x = (code % d as u64) as i64;
                code /= d as u64;
                x
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order()).map(move |c| self.decode(c))
    }

    /// Form with all values negated.
    pub fn negated(&self) -> DiscriminantForm {
        let mut out = self.clone();
        for i in 0..out.bnum.len() {
            for j in 0..out.bnum.len() {
                let m = if i == j { 2 * out.den } else { out.den };
                out.bnum[i][j] = (-out.bnum[i][j]).rem_euclid(m);
            }
        }
        out
    }

    /// The `p`-primary part as a form on its own generators.
    pub fn p_part(&self, p: i64) -> DiscriminantForm {
        let mut orders = Vec::new();
        let mut idx = Vec::new();
        let mut mult = Vec::new();
        for (i, &d) in self.orders.iter().enumerate() {
            let mut pk = 1;
            let mut t = d;
            while t % p == 0 {
                t /= p;
                pk *= p;
            }
            if pk > 1 {
                orders.push(pk);
                idx.push(i);
                mult.push(d / pk);
            }
        }
        let m = orders.len();
        let vecs: Vec<Element> = (0..m)
            .map(|k| {
                let mut a = self.zero();
                a[idx[k]] = mult[k];
                a
            })
            .collect();
        let values: Vec<Vec<Rational>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if i == j {
                            self.q(&vecs[i])
                        } else {
                            self.b(&vecs[i], &vecs[j])
                        }
                    })
                    .collect()
            })
            .collect();
        let mut out = DiscriminantForm::from_values(orders, &values);
        if !self.gens.is_empty() {
            out.gens = vecs.iter().map(|a| self.lift(a)).collect();
        }
        out
    }

    pub fn primes(&self) -> Vec<i64> {
        let mut ps = BTreeSet::new();
        for &d in &self.orders {
            let mut t = d;
            let mut p = 2;
            while p * p <= t {
                while t % p == 0 {
                    ps.insert(p);
                    t /= p;
                }
                p += 1;
            }
            if t > 1 {
                ps.insert(t);
            }
        }
        ps.into_iter().collect()
    }

    /// Signature modulo 8 from the Gauss sum, per primary part.
    pub fn signature_mod8(&self) -> i64 {
        let mut total = 0;
        for p in self.primes() {
            let part = self.p_part(p);
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for a in part.elements() {
                let t = PI * part.qnum(&a) as f64 / part.den as f64;
                re += t.cos();
                im += t.sin();
            }
            let arg = im.atan2(re);
            let k = (arg / (PI / 4.0)).round() as i64;
            total += k;
        }
        total.rem_euclid(8)
    }

    /// Whether the 2-part splits off a cyclic summand of order 2 with
    /// `2 q` odd.
    fn has_odd_order_two(&self) -> bool {
        let two = self.p_part(2);
        let halves: Vec<Element> = (0..two.orders.len())
            .map(|i| {
                let mut a = two.zero();
                a[i] = two.orders[i] / 2;
                a
            })
            .collect();
        let m = halves.len();
        for mask in 1u64..(1u64 << m) {
            let mut a = two.zero();
            for (i, h) in halves.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    a = two.add(&a, h);
                }
            }
            // 2 q(a) odd  <=>  q(a) * den * 2 / den is odd
            let qn = two.qnum(&a) as i128;
            let v = rat(2 * qn, two.den as i128);
            if v.is_integer() && v.to_integer().rem_euclid(2) == 1 {
                return true;
            }
        }
        false
    }

    /// Gram determinant of a `p`-adic lattice of rank `length(A_p)` whose
    /// discriminant form is the `p`-part.
    ///
    /// The lattice is the inverse of any lift of the value matrix; the lift
    /// is `p`-integral because `b` is nondegenerate.
    fn local_determinant(&self, p: i64) -> Rational {
        let part = self.p_part(p);
        let m = part.orders.len();
        let lifted: Vec<Vec<Rational>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| rat(part.bnum[i][j] as i128, part.den as i128))
                    .collect()
            })
            .collect();
        if cfg!(debug_assertions) {
            let c = inverse(&lifted).expect("nondegenerate primary part");
            debug_assert!(c.iter().flatten().all(|v| v.denom() % p as i128 != 0));
        }
        Rational::one() / det_rational(&lifted)
    }

    /// Existence of an even lattice with signature `(t_plus, t_minus)` and
    /// this discriminant form.
    pub fn genus_exists(&self, t_plus: usize, t_minus: usize) -> bool {
        self.genus_report(t_plus, t_minus).is_ok()
    }

    /// As [`genus_exists`](Self::genus_exists), naming the failed condition.
    pub fn genus_report(&self, t_plus: usize, t_minus: usize) -> Result<(), String> {
        let sig = (t_plus as i64 - t_minus as i64).rem_euclid(8);
        if sig != self.signature_mod8() {
            return Err(format!(
                "signature {} != {} mod 8",
                sig,
                self.signature_mod8()
            ));
        }
        let rank = t_plus + t_minus;
        if self.length() > rank {
            return Err(format!("length {} exceeds rank {}", self.length(), rank));
        }
        let order = self.order() as i128;
        for p in self.primes() {
            let part = self.p_part(p);
            if part.length() != rank {
                continue;
            }
            let dk = self.local_determinant(p);
            let (vk, uk) = padic_split(&dk, p);
            let target = if p == 2 { order } else { order * if t_minus % 2 == 1 { -1 } else { 1 } };
            let (vt, ut) = padic_split(&rint(target), p);
            if vk != vt {
                return Err(format!("{p}-adic valuation mismatch"));
            }
            if p == 2 {
                if self.has_odd_order_two() {
                    continue;
                }
                let r = (uk * ut).rem_euclid(8);
                if r != 1 && r != 7 {
                    return Err("2-adic determinant condition fails".into());
                }
            } else if legendre((uk * ut).rem_euclid(p as i128), p as i128) != 1 {
                return Err(format!("{p}-adic determinant condition fails"));
            }
        }
        Ok(())
    }

    /// Images of the generators of `self` under an isometry onto `other`.
    pub fn find_isometry(&self, other: &DiscriminantForm) -> Option<Vec<Element>> {
        self.isometries(other, 1).pop()
    }

    /// Up to `limit` isometries onto `other`, each as generator images.
    pub fn isometries(&self, other: &DiscriminantForm, limit: usize) -> Vec<Vec<Element>> {
        let mut out = Vec::new();
        if self.order() != other.order() || limit == 0 {
            return out;
        }
        let all: Vec<Element> = other.elements().collect();
        let m = self.orders.len();
        let unit = |i: usize| {
            let mut a = self.zero();
            a[i] = 1;
            a
        };
        let cands: Vec<Vec<&Element>> = (0..m)
            .map(|i| {
                let qi = self.q(&unit(i));
                all.iter()
                    .filter(|y| other.element_order(y) == self.orders[i] && other.q(y) == qi)
                    .collect()
            })
            .collect();
        struct Search<'a> {
            me: &'a DiscriminantForm,
            other: &'a DiscriminantForm,
            cands: Vec<Vec<&'a Element>>,
            limit: usize,
        }
        fn rec(s: &Search, chosen: &mut Vec<Element>, out: &mut Vec<Vec<Element>>) {
            let i = chosen.len();
            if i == s.cands.len() {
                if generated_order(s.other, chosen) == s.other.order() {
                    out.push(chosen.clone());
                }
                return;
            }
            let mut gi = s.me.zero();
            gi[i] = 1;
            for y in &s.cands[i] {
                let ok = (0..i).all(|j| {
                    let mut gj = s.me.zero();
                    gj[j] = 1;
                    s.me.b(&gi, &gj) == s.other.b(y, &chosen[j])
                });
                if ok {
                    chosen.push((*y).clone());
                    rec(s, chosen, out);
                    chosen.pop();
                    if out.len() >= s.limit {
                        return;
                    }
                }
            }
        }
        let s = Search {
            me: self,
            other,
            cands,
            limit,
        };
        rec(&s, &mut Vec::with_capacity(m), &mut out);
        out
    }

    /// Generator images of the automorphism induced by an integral matrix
    /// acting on row vectors of the lattice.
    pub fn induced(&self, m: &[Vec<i64>]) -> Vec<Element> {
        self.gens
            .iter()
            .map(|g| {
                let y: Vec<Rational> = (0..m[0].len())
                    .map(|j| g.iter().zip(m).map(|(a, row)| a * rint(row[j] as i128)).sum())
                    .collect();
                self.reduce(&y).expect("isometries preserve the dual")
            })
            .collect()
    }

    pub fn is_isomorphic(&self, other: &DiscriminantForm) -> bool {
        self.find_isometry(other).is_some()
    }

    /// Image of an element under the generator assignment `images`.
    pub fn apply_map(&self, images: &[Element], target: &DiscriminantForm, a: &[i64]) -> Element {
        let mut out = target.zero();
        for (k, img) in a.iter().zip(images) {
            if *k != 0 {
                out = target.add(&out, &target.scale(*k, img));
            }
        }
        out
    }

    /// All isotropic subgroups, each given by a generating set; the trivial
    /// subgroup comes first.
    pub fn isotropic_subgroups(&self) -> Vec<Vec<Element>> {
        let iso: Vec<Element> = self
            .elements()
            .filter(|a| a.iter().any(|&x| x != 0) && self.qnum(a) == 0)
            .collect();
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let mut out: Vec<(Vec<Element>, Vec<u64>)> = Vec::new();
        let trivial = vec![self.encode(&self.zero())];
        seen.insert(trivial.clone());
        out.push((Vec::new(), trivial));
        let mut i = 0;
        while i < out.len() {
            let (gens, members) = out[i].clone();
            let member_set: HashSet<u64> = members.iter().copied().collect();
            let elems: Vec<Element> = members.iter().map(|&c| self.decode(c)).collect();
            for x in &iso {
                if member_set.contains(&self.encode(x)) {
                    continue;
                }
                if elems.iter().any(|h| self.bnum_of(x, h) != 0) {
                    continue;
                }
                let grown = self.grow(&elems, x);
                if seen.insert(grown.clone()) {
                    let mut g = gens.clone();
                    g.push(x.clone());
                    out.push((g, grown));
                }
            }
            i += 1;
        }
        out.into_iter().map(|(g, _)| g).collect()
    }

    /// Sorted codes of the subgroup generated by `elems` (a subgroup) and `x`.
    fn grow(&self, elems: &[Element], x: &[i64]) -> Vec<u64> {
        let mut codes: BTreeSet<u64> = BTreeSet::new();
        let ord = self.element_order(x);
        let mut mult = self.zero();
        for _ in 0..ord {
            for h in elems {
                codes.insert(self.encode(&self.add(h, &mult)));
            }
            mult = self.add(&mult, x);
        }
        codes.into_iter().collect()
    }
}

pub fn generated_order(f: &DiscriminantForm, gens: &[Element]) -> u64 {
    let mut elems = vec![f.zero()];
    for g in gens {
        let set: HashSet<u64> = elems.iter().map(|e| f.encode(e)).collect();
        if set.contains(&f.encode(g)) {
            continue;
        }
        let codes = f.grow(&elems, g);
        elems = codes.into_iter().map(|c| f.decode(c)).collect();
    }
    elems.len() as u64
}

fn det_rational(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            if !f.is_zero() {
                for j in c..n {
                    let t = m[c][j] * f;
                    m[i][j] -= t;
                }
            }
        }
    }
    det
}

/// Valuation and unit part (as residue modulo `p`, or modulo 8 when `p = 2`).
pub fn padic_split(x: &Rational, p: i64) -> (i64, i128) {
    let p = p as i128;
    let mut num = *x.numer();
    let mut den = *x.denom();
    let mut v = 0i64;
    while num % p == 0 {
        num /= p;
        v += 1;
    }
    while den % p == 0 {
        den /= p;
        v -= 1;
    }
    let m = if p == 2 { 8 } else { p };
    let inv = mod_inverse(den.rem_euclid(m), m);
    (v, (num.rem_euclid(m) * inv).rem_euclid(m))
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    let e = a.extended_gcd(&m);
    assert_eq!(e.gcd, 1, "not invertible");
    e.x.rem_euclid(m)
}

/// Legendre symbol for an odd prime `p`.
pub fn legendre(a: i128, p: i128) -> i32 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut result: i128 = 1;
    let mut base = a;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if result == 1 {
        1
    } else {
        -1
    }
}

/// `|A| = |det|` for the form of `gram`.
pub fn check_order(gram: &[Vec<i64>], f: &DiscriminantForm) -> bool {
    det_int(&to_i128(gram)).unsigned_abs() as u64 == f.order()
}
