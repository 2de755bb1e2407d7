//! Vertex-colored multigraphs with edge multiplicities: partition refinement,
//! automorphism groups and canonical certificates.
//!
//! Search nodes are ordered partitions made equitable by refinement. The
//! automorphism group is built along the leftmost path of the search tree:
//! at every level each point of the target cell is tested for membership in
//! the orbit of the base point by looking for a leaf equivalent to the first
//! leaf. The product of the orbit lengths is the group order.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    colors: Vec<u8>,
    /// Row-major multiplicities.
    adj: Vec<u8>,
}

pub type Perm = Vec<u32>;

#[derive(Debug, Clone)]
pub struct AutGroup {
    pub generators: Vec<Perm>,
    pub order: u128,
    /// Base points along the leftmost path.
    pub base: Vec<usize>,
}

type Partition = Vec<Vec<u32>>;

impl Graph {
    pub fn new(colors: Vec<u8>, adj: Vec<Vec<u8>>) -> Graph {
        let n = colors.len();
        assert!(adj.len() == n && adj.iter().all(|r| r.len() == n));
        let mut flat = Vec::with_capacity(n * n);
        for (i, r) in adj.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                assert_eq!(x, adj[j][i], "asymmetric adjacency");
                flat.push(if i == j { 0 } else { x });
            }
        }
        Graph { n, colors, adj: flat }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn color(&self, v: usize) -> u8 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    pub fn mult(&self, u: usize, v: usize) -> u8 {
        self.adj[u * self.n + v]
    }

    /// Edges `(i, j, multiplicity)` with `i < j` and positive multiplicity.
    pub fn edges(&self) -> Vec<(usize, usize, u8)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let m = self.mult(i, j);
                if m > 0 {
                    out.push((i, j, m));
                }
            }
        }
        out
    }

    /// Same graph with the listed vertices recolored by adding `shift`.
    pub fn marked(&self, vertices: &[usize], shift: u8) -> Graph {
        let mut g = self.clone();
        for &v in vertices {
            g.colors[v] += shift;
        }
        g
    }

    /// Image under the relabeling `v ↦ perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Graph {
        let n = self.n;
        let mut colors = vec![0; n];
        let mut adj = vec![0; n * n];
        for u in 0..n {
            colors[perm[u]] = self.colors[u];
            for v in 0..n {
                adj[perm[u] * n + perm[v]] = self.adj[u * n + v];
            }
        }
        Graph { n, colors, adj }
    }

    pub fn is_automorphism(&self, p: &[u32]) -> bool {
        let n = self.n;
        for u in 0..n {
            let pu = p[u] as usize;
            if self.colors[u] != self.colors[pu] {
                return false;
            }
            for v in u + 1..n {
                if self.adj[u * n + v] != self.adj[pu * n + p[v] as usize] {
                    return false;
                }
            }
        }
        true
    }

    fn initial_partition(&self) -> Partition {
        let mut by: std::collections::BTreeMap<u8, Vec<u32>> = Default::default();
        for v in 0..self.n {
            by.entry(self.colors[v]).or_default().push(v as u32);
        }
        by.into_values().collect()
    }

    /// Coarsest equitable refinement, splitting cells in an
    /// isomorphism-invariant order.
    fn refine(&self, mut cells: Partition) -> Partition {
        let n = self.n;
        let mut cell_of = vec![0u32; n];
        loop {
            for (ci, c) in cells.iter().enumerate() {
                for &v in c {
                    cell_of[v as usize] = ci as u32;
                }
            }
            let mut out: Partition = Vec::with_capacity(cells.len());
            let mut split = false;
            for c in &cells {
                if c.len() == 1 {
                    out.push(c.clone());
                    continue;
                }
                let mut sigs: Vec<(Vec<(u32, u8)>, u32)> = c
                    .iter()
                    .map(|&v| {
                        let row = &self.adj[v as usize * n..(v as usize + 1) * n];
                        let mut s: Vec<(u32, u8)> = row
                            .iter()
                            .enumerate()
                            .filter(|(_, &m)| m > 0)
                            .map(|(w, &m)| (cell_of[w], m))
                            .collect();
                        s.sort_unstable();
                        (s, v)
                    })
                    .collect();
                sigs.sort_unstable();
                let mut start = 0;
                for k in 1..=sigs.len() {
                    if k == sigs.len() || sigs[k].0 != sigs[start].0 {
                        out.push(sigs[start..k].iter().map(|x| x.1).collect());
                        start = k;
                    }
                }
                if !out.is_empty() && !sigs.is_empty() && out.last().unwrap().len() != c.len() {
                    split = true;
                }
            }
            cells = out;
            if !split {
                return cells;
            }
        }
    }

    fn individualize(&self, p: &Partition, v: u32) -> Partition {
        let mut out = Vec::with_capacity(p.len() + 1);
        for c in p {
            if c.contains(&v) {
                out.push(vec![v]);
                out.push(c.iter().copied().filter(|&x| x != v).collect());
            } else {
                out.push(c.clone());
            }
        }
        self.refine(out)
    }

    fn target_cell(p: &Partition) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, c) in p.iter().enumerate() {
            if c.len() > 1 && best.is_none_or(|b| c.len() < p[b].len()) {
                best = Some(i);
            }
        }
        best
    }

    /// Invariant of a node: cell sizes and quotient multiplicities.
    fn node_invariant(&self, p: &Partition) -> u64 {
        let n = self.n;
        let mut cell_of = vec![0u32; n];
        for (ci, c) in p.iter().enumerate() {
            for &v in c {
                cell_of[v as usize] = ci as u32;
            }
        }
        let mut hs = DefaultHasher::new();
        for c in p {
            c.len().hash(&mut hs);
            let v = c[0] as usize;
            self.colors[v].hash(&mut hs);
            let mut counts: Vec<(u32, u8)> = self.adj[v * n..(v + 1) * n]
                .iter()
                .enumerate()
                .filter(|(_, &m)| m > 0)
                .map(|(w, &m)| (cell_of[w], m))
                .collect();
            counts.sort_unstable();
            counts.hash(&mut hs);
        }
        hs.finish()
    }

    fn leaf_map(from: &Partition, to: &Partition) -> Perm {
        let mut p = vec![0u32; from.len()];
        for (a, b) in from.iter().zip(to) {
            p[a[0] as usize] = b[0];
        }
        p
    }

    /// Searches the subtree at `node` for a leaf `L'` with `leaf -> L'` an
    /// automorphism; `path_inv[d]` are node invariants along the leaf's path.
    fn find_equivalent(&self, node: Partition, depth: usize, leaf: &Partition, path_inv: &[u64]) -> Option<Perm> {
        if self.node_invariant(&node) != path_inv[depth] {
            return None;
        }
        match Self::target_cell(&node) {
            None => {
                let p = Self::leaf_map(leaf, &node);
                if self.is_automorphism(&p) {
                    Some(p)
                } else {
                    None
                }
            }
            Some(t) => {
                for &w in &node[t] {
                    let child = self.individualize(&node, w);
                    if let Some(p) = self.find_equivalent(child, depth + 1, leaf, path_inv) {
                        return Some(p);
                    }
                }
                None
            }
        }
    }

    /// Automorphism group: generators, order and base.
    pub fn automorphisms(&self) -> AutGroup {
        let root = self.refine(self.initial_partition());
        let mut path = vec![root];
        let mut base = Vec::new();
        while let Some(t) = Self::target_cell(path.last().unwrap()) {
            let b = path.last().unwrap()[t][0];
            base.push(b as usize);
            let next = self.individualize(path.last().unwrap(), b);
            path.push(next);
        }
        let leaf = path.last().unwrap().clone();
        let path_inv: Vec<u64> = path.iter().map(|p| self.node_invariant(p)).collect();
        let mut gens: Vec<Perm> = Vec::new();
        let mut order: u128 = 1;
        for level in (0..base.len()).rev() {
            let node = &path[level];
            let t = Self::target_cell(node).unwrap();
            let cell = &node[t];
            let fixes = |g: &Perm| base[..level].iter().all(|&x| g[x] as usize == x);
            let mut orbit = orbit_of(base[level] as u32, gens.iter().filter(|g| fixes(g)));
            for &w in cell {
                if orbit.contains(&w) {
                    continue;
                }
                let child = self.individualize(node, w);
                if let Some(g) = self.find_equivalent(child, level + 1, &leaf, &path_inv) {
                    gens.push(g);
                    orbit = orbit_of(base[level] as u32, gens.iter().filter(|g| fixes(g)));
                }
            }
            order *= orbit.len() as u128;
        }
        AutGroup {
            generators: gens,
            order,
            base,
        }
    }

    /// Canonical relabeling and certificate. Two graphs are isomorphic iff
    /// their certificates are equal.
    pub fn canonical_form(&self) -> (Vec<usize>, Vec<u8>) {
        let (lab, cert, _) = self.canonical();
        (lab, cert)
    }

    /// Canonical labeling, certificate and automorphism group together.
    pub fn canonical(&self) -> (Vec<usize>, Vec<u8>, AutGroup) {
        let aut = self.automorphisms();
        let root = self.refine(self.initial_partition());
        let mut best: Option<(Vec<u8>, Partition)> = None;
        let mut gens = aut.generators.clone();
        let mut prefix = Vec::new();
        self.canon_search(root, &mut prefix, &mut gens, &mut best);
        let (cert, leaf) = best.expect("at least one leaf");
        let mut lab = vec![0usize; self.n];
        for (pos, c) in leaf.iter().enumerate() {
            lab[c[0] as usize] = pos;
        }
        (lab, cert, aut)
    }

    pub fn certificate(&self) -> Vec<u8> {
        self.canonical_form().1
    }

    fn leaf_certificate(&self, leaf: &Partition) -> Vec<u8> {
        let n = self.n;
        let order: Vec<usize> = leaf.iter().map(|c| c[0] as usize).collect();
        let mut cert = Vec::with_capacity(n + n * (n - 1) / 2 + 4);
        cert.extend_from_slice(&(n as u32).to_le_bytes());
        for &v in &order {
            cert.push(self.colors[v]);
        }
        for i in 0..n {
            for j in i + 1..n {
                cert.push(self.adj[order[i] * n + order[j]]);
            }
        }
        cert
    }

    fn canon_search(
        &self,
        node: Partition,
        prefix: &mut Vec<u32>,
        gens: &mut Vec<Perm>,
        best: &mut Option<(Vec<u8>, Partition)>,
    ) {
        let Some(t) = Self::target_cell(&node) else {
            let cert = self.leaf_certificate(&node);
            match best {
                None => *best = Some((cert, node)),
                Some((bc, bl)) => {
                    if cert < *bc {
                        *best = Some((cert, node));
                    } else if cert == *bc {
                        let p = Self::leaf_map(bl, &node);
                        if self.is_automorphism(&p) && !gens.contains(&p) {
                            gens.push(p);
                        }
                    }
                }
            }
            return;
        };
        let cell = node[t].clone();
        let mut done: Vec<u32> = Vec::new();
        for &w in &cell {
            let stab: Vec<Perm> = gens
                .iter()
                .filter(|g| prefix.iter().all(|&x| g[x as usize] == x))
                .cloned()
                .collect();
            if !done.is_empty() {
                let orb = orbit_of_set(&done, stab.iter());
                if orb.contains(&w) {
                    continue;
                }
            }
            done.push(w);
            let child = self.individualize(&node, w);
            prefix.push(w);
            self.canon_search(child, prefix, gens, best);
            prefix.pop();
        }
    }

    /// Orbit of a vertex set under a group given by generators.
    pub fn set_orbit_len(gens: &[Perm], set: &[usize]) -> usize {
        let mut start: Vec<u32> = set.iter().map(|&x| x as u32).collect();
        start.sort_unstable();
        let mut seen: HashMap<Vec<u32>, ()> = HashMap::from([(start.clone(), ())]);
        let mut stack = vec![start];
        while let Some(s) = stack.pop() {
            for g in gens {
                let mut t: Vec<u32> = s.iter().map(|&x| g[x as usize]).collect();
                t.sort_unstable();
                if !seen.contains_key(&t) {
                    seen.insert(t.clone(), ());
                    stack.push(t);
                }
            }
        }
        seen.len()
    }

    /// Graphviz rendering; lines are drawn as boxes, conics as ellipses.
    pub fn to_dot(&self, name: &str, marked: &[usize]) -> String {
        let mut s = format!("graph {name} {{\n");
        for v in 0..self.n {
            let shape = if self.colors[v] % 4 == 1 { "box" } else { "ellipse" };
            let style = if marked.contains(&v) { ",style=filled" } else { "" };
            s.push_str(&format!("  v{v} [shape={shape}{style}];\n"));
        }
        for (i, j, m) in self.edges() {
            let style = if m > 1 { format!(" [label={m},penwidth={m}]") } else { String::new() };
            s.push_str(&format!("  v{i} -- v{j}{style};\n"));
        }
        s.push_str("}\n");
        s
    }
}

fn orbit_of<'a>(x: u32, gens: impl Iterator<Item = &'a Perm> + Clone) -> Vec<u32> {
    orbit_of_set(&[x], gens)
}

fn orbit_of_set<'a>(xs: &[u32], gens: impl Iterator<Item = &'a Perm> + Clone) -> Vec<u32> {
    let mut seen: Vec<u32> = xs.to_vec();
    let mut i = 0;
    while i < seen.len() {
        let y = seen[i];
        for g in gens.clone() {
            let z = g[y as usize];
            if !seen.contains(&z) {
                seen.push(z);
            }
        }
        i += 1;
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let mut adj = vec![vec![0u8; n]; n];
        for i in 0..n {
            adj[i][(i + 1) % n] = 1;
            adj[(i + 1) % n][i] = 1;
        }
        Graph::new(vec![0; n], adj)
    }

    fn petersen() -> Graph {
        let mut adj = vec![vec![0u8; 10]; 10];
        let mut e = |a: usize, b: usize| {
            adj[a][b] = 1;
            adj[b][a] = 1;
        };
        for i in 0..5 {
            e(i, (i + 1) % 5);
            e(5 + i, 5 + (i + 2) % 5);
            e(i, 5 + i);
        }
        Graph::new(vec![0; 10], adj)
    }

    #[test]
    fn group_orders() {
        assert_eq!(cycle(7).automorphisms().order, 14);
        assert_eq!(petersen().automorphisms().order, 120);
        let k = Graph::new(vec![0; 5], vec![vec![1; 5]; 5]);
        assert_eq!(k.automorphisms().order, 120);
        let empty = Graph::new(vec![0, 0, 1], vec![vec![0; 3]; 3]);
        assert_eq!(empty.automorphisms().order, 2);
    }

    #[test]
    fn certificates_invariant() {
        let g = petersen();
        let c = g.certificate();
        let perm: Vec<usize> = vec![3, 7, 1, 9, 0, 2, 8, 4, 6, 5];
        assert_eq!(g.relabeled(&perm).certificate(), c);
        assert_ne!(cycle(10).certificate(), c);
    }
}
