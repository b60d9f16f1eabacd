//! Simple undirected graphs on at most 16 ordered vertices.
//!
//! Vertices are 0-based internally; text formats and displays are 1-based.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_VERTICES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adj: Vec<u32>,
}

/// `j` separates `i` from `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeparatorTriple {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl fmt::Display for SeparatorTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.i + 1, self.j + 1, self.k + 1)
    }
}

/// One reduction of the Petz recursion: on the vertex set `subset`,
/// `v1` plays A, `v2` plays C and the rest is B.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PetzStep {
    pub subset: Vec<usize>,
    pub v1: usize,
    pub v2: usize,
}

fn mask_of(vs: &[usize]) -> u32 {
    vs.iter().fold(0u32, |m, &v| m | (1 << v))
}

fn members(mask: u32) -> Vec<usize> {
    (0..32).filter(|&v| mask & (1 << v) != 0).collect()
}

impl Graph {
    /// Builds a graph from 0-based edges.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::InvalidGraph(format!(
                "vertex count {n} outside 1..={MAX_VERTICES}"
            )));
        }
        let mut set = BTreeSet::new();
        let mut adj = vec![0u32; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {} {} refers to a vertex beyond {n}",
                    u + 1,
                    v + 1
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at vertex {}", u + 1)));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidGraph(format!(
                    "repeated edge {} {}",
                    u.min(v) + 1,
                    u.max(v) + 1
                )));
            }
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        Ok(Graph { n, edges: set, adj })
    }

    pub fn from_one_based(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let zero: Vec<_> = edges
            .iter()
            .map(|&(u, v)| {
                if u == 0 || v == 0 {
                    Err(Error::InvalidGraph("vertex 0 in 1-based edge list".into()))
                } else {
                    Ok((u - 1, v - 1))
                }
            })
            .collect::<Result<_>>()?;
        Self::new(n, &zero)
    }

    /// Parses the edge-list format: `n=<N>` then one `u v` pair per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("line {}: {what}: {raw:?}", lineno + 1));
            if n.is_none() {
                let rest = line
                    .strip_prefix("n=")
                    .or_else(|| line.strip_prefix("n ="))
                    .ok_or_else(|| bad("expected header n=<N>"))?;
                n = Some(rest.trim().parse::<usize>().map_err(|_| bad("bad vertex count"))?);
                continue;
            }
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| bad("bad vertex index")))
                .collect::<Result<_>>()?;
            if nums.len() != 2 {
                return Err(bad("expected two vertices"));
            }
            edges.push((nums[0], nums[1]));
        }
        let n = n.ok_or_else(|| Error::Parse("missing header n=<N>".into()))?;
        Self::from_one_based(n, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("n={}\n", self.n);
        for &(u, v) in &self.edges {
            s.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        s
    }

    /// Named graphs: `chain3`, `chain4`, `claw` (centre 4), `fig1`.
    pub fn builtin(name: &str) -> Option<Self> {
        let (n, edges): (usize, &[(usize, usize)]) = match name {
            "chain3" => (3, &[(1, 2), (2, 3)]),
            "chain4" => (4, &[(1, 2), (2, 3), (3, 4)]),
            "claw" => (4, &[(1, 4), (2, 4), (3, 4)]),
            "fig1" => (4, &[(1, 2), (1, 3), (2, 3), (2, 4)]),
            _ => return None,
        };
        Self::from_one_based(n, edges).ok()
    }

    pub const BUILTIN_NAMES: [&'static str; 4] = ["chain3", "chain4", "claw", "fig1"];

    /// A built-in name or a path to an edge-list file.
    pub fn load(spec: &str) -> Result<Self> {
        if let Some(g) = Self::builtin(spec) {
            return Ok(g);
        }
        let path = Path::new(spec);
        if !path.exists() {
            // `chain3.edges` names the built-in graph when no such file is present
            if let Some(g) = spec.strip_suffix(".edges").and_then(Self::builtin) {
                return Ok(g);
            }
            return Err(Error::InvalidGraph(format!(
                "{spec:?} is neither a built-in graph ({}) nor a file",
                Self::BUILTIN_NAMES.join(", ")
            )));
        }
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u] & (1 << v) != 0
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        members(self.adj[v])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    fn all_mask(&self) -> u32 {
        if self.n == 32 {
            u32::MAX
        } else {
            (1u32 << self.n) - 1
        }
    }

    /// Vertices reachable from `start` using only vertices in `allowed`.
    fn reach(&self, start: usize, allowed: u32) -> u32 {
        let mut seen = 1u32 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0u32;
            for v in members(frontier) {
                next |= self.adj[v] & allowed;
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen
    }

    fn induced_edge_count(&self, mask: u32) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| mask & (1 << u) != 0 && mask & (1 << v) != 0)
            .count()
    }

    fn is_tree_on(&self, mask: u32) -> bool {
        let size = mask.count_ones() as usize;
        if size == 0 {
            return false;
        }
        let first = mask.trailing_zeros() as usize;
        self.reach(first, mask) == mask && self.induced_edge_count(mask) == size - 1
    }

    pub fn is_connected(&self) -> bool {
        self.reach(0, self.all_mask()) == self.all_mask()
    }

    pub fn is_tree(&self) -> bool {
        self.is_tree_on(self.all_mask())
    }

    /// True iff every path from `i` to `k` passes through `j`.
    pub fn separates(&self, i: usize, j: usize, k: usize) -> bool {
        if i == j || j == k || i == k {
            return false;
        }
        let allowed = self.all_mask() & !(1 << j);
        self.reach(i, allowed) & (1 << k) == 0
    }

    /// Maximal cliques, each sorted, listed lexicographically.
    pub fn cliques(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.bron_kerbosch(0, self.all_mask(), 0, &mut out);
        let mut cl: Vec<Vec<usize>> = out.into_iter().map(members).collect();
        cl.sort();
        cl
    }

    fn bron_kerbosch(&self, r: u32, p: u32, x: u32, out: &mut Vec<u32>) {
        if p == 0 && x == 0 {
            out.push(r);
            return;
        }
        // pivot with the most neighbours in P
        let pivot = members(p | x)
            .into_iter()
            .max_by_key(|&u| (self.adj[u] & p).count_ones())
            .unwrap_or(0);
        let (mut p, mut x) = (p, x);
        for v in members(p & !self.adj[pivot]) {
            let bit = 1u32 << v;
            self.bron_kerbosch(r | bit, p & self.adj[v], x & self.adj[v], out);
            p &= !bit;
            x |= bit;
        }
    }

    /// All `(i, j, k)` with `i < k` and `j` separating them; the graph must be a tree.
    pub fn separator_triples(&self) -> Result<Vec<SeparatorTriple>> {
        if !self.is_tree() {
            return Err(Error::NotATree);
        }
        let mut out = Vec::new();
        for i in 0..self.n {
            for k in i + 1..self.n {
                for j in 0..self.n {
                    if self.separates(i, j, k) {
                        out.push(SeparatorTriple { i, j, k });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Leaves of the subtree induced on `subset`, ascending.
    pub fn leaves_within(&self, subset: &[usize]) -> Vec<usize> {
        let mask = mask_of(subset);
        let mut l: Vec<usize> = subset
            .iter()
            .copied()
            .filter(|&v| (self.adj[v] & mask).count_ones() <= 1)
            .collect();
        l.sort_unstable();
        l
    }

    /// Reduction steps of the Petz recursion, depth first. Each step names the
    /// two smallest leaves of the current subtree; subtrees of three vertices
    /// are base cases and produce no step.
    pub fn petz_order(&self) -> Result<Vec<PetzStep>> {
        if !self.is_tree() {
            return Err(Error::NotATree);
        }
        if self.n < 3 {
            return Err(Error::InvalidGraph(format!(
                "Petz recursion needs at least 3 vertices, got {}",
                self.n
            )));
        }
        let mut steps = Vec::new();
        let mut seen = BTreeSet::new();
        self.petz_visit(self.all_mask(), &mut seen, &mut steps);
        Ok(steps)
    }

    fn petz_visit(&self, mask: u32, seen: &mut BTreeSet<u32>, steps: &mut Vec<PetzStep>) {
        if mask.count_ones() <= 3 || !seen.insert(mask) {
            return;
        }
        let subset = members(mask);
        let leaves = self.leaves_within(&subset);
        let (v1, v2) = (leaves[0], leaves[1]);
        steps.push(PetzStep { subset, v1, v2 });
        self.petz_visit(mask & !(1 << v2), seen, steps);
        self.petz_visit(mask & !(1 << v1), seen, steps);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(name: &str) -> Graph {
        Graph::builtin(name).unwrap()
    }

    #[test]
    fn parse_format() {
        let text = "# a comment\nn=3\n\n1 2  # edge\n2 3\n";
        let p = Graph::parse(text).unwrap();
        assert_eq!(p, g("chain3"));
        assert_eq!(Graph::parse(&p.to_edge_list()).unwrap(), p);
        assert!(Graph::parse("1 2\n").is_err());
        assert!(Graph::parse("n=2\n1 1\n").is_err());
        assert!(Graph::parse("n=2\n1 2\n2 1\n").is_err());
        assert!(Graph::parse("n=2\n1 3\n").is_err());
        assert!(Graph::parse("n=2\n1 2 3\n").is_err());
    }

    #[test]
    fn cliques_of_examples() {
        assert_eq!(g("chain3").cliques(), vec![vec![0, 1], vec![1, 2]]);
        let k3 = Graph::new(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(k3.cliques(), vec![vec![0, 1, 2]]);
        assert_eq!(g("fig1").cliques(), vec![vec![0, 1, 2], vec![1, 3]]);
        let isolated = Graph::new(2, &[]).unwrap();
        assert_eq!(isolated.cliques(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn separator_triples_of_examples() {
        let t = g("chain3").separator_triples().unwrap();
        assert_eq!(t, vec![SeparatorTriple { i: 0, j: 1, k: 2 }]);
        let t = g("claw").separator_triples().unwrap();
        let shown: Vec<String> = t.iter().map(ToString::to_string).collect();
        assert_eq!(shown, vec!["(1, 4, 2)", "(1, 4, 3)", "(2, 4, 3)"]);
        let edge = Graph::new(2, &[(0, 1)]).unwrap();
        assert!(edge.separator_triples().unwrap().is_empty());
        assert!(matches!(g("fig1").separator_triples(), Err(Error::NotATree)));
    }

    #[test]
    fn petz_orders() {
        assert!(g("chain3").petz_order().unwrap().is_empty());
        let c4 = g("chain4").petz_order().unwrap();
        assert_eq!(c4.len(), 1);
        assert_eq!((c4[0].v1, c4[0].v2), (0, 3));
        let claw = g("claw").petz_order().unwrap();
        assert_eq!(claw.len(), 1);
        assert_eq!((claw[0].v1, claw[0].v2), (0, 1));
        assert!(g("fig1").petz_order().is_err());
        assert!(Graph::new(2, &[(0, 1)]).unwrap().petz_order().is_err());
    }

    #[test]
    fn tree_checks() {
        assert!(g("chain4").is_tree());
        assert!(g("claw").is_tree());
        assert!(!g("fig1").is_tree());
        assert!(!Graph::new(3, &[(0, 1)]).unwrap().is_tree());
        assert!(g("fig1").is_connected());
    }
}
