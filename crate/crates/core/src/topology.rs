//! Combinatorial types of Steiner trees on labeled terminals: validation,
//! enumeration, canonical codes and full-component decomposition.
//!
//! Vertex indices are 0-based internally: terminals are `0..n`, Steiner
//! points follow. The JSON format in [`crate::format`] shifts them to 1-based
//! ids.
//!
//! A type is either *unoriented* (an abstract labeled tree; the embedding is
//! fixed later by the geometry of a realization) or *oriented* (each
//! adjacency list is the counterclockwise cyclic order of that vertex).
//! Enumeration produces unoriented types: for a fixed configuration a tree
//! has at most one realization, and that realization selects the embedding.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};

/// Default cap on the number of terminals accepted by enumeration.
pub const DEFAULT_TYPE_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CombinatorialType {
    n: usize,
    adj: Vec<Vec<usize>>,
    oriented: bool,
}

impl CombinatorialType {
    /// Builds and validates a type from adjacency lists (terminals first).
    pub fn new(n: usize, adj: Vec<Vec<usize>>, oriented: bool) -> Result<Self> {
        let t = CombinatorialType { n, adj, oriented };
        t.validate()?;
        Ok(t)
    }

    /// Builds an unoriented type from an edge list.
    pub fn from_edges(n: usize, steiner: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let v = n + steiner;
        let mut adj = vec![Vec::new(); v];
        for &(a, b) in edges {
            if a >= v || b >= v {
                return Err(Error::InvalidType(format!("edge ({a}, {b}) out of range")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        Self::new(n, adj, false)
    }

    /// The tripod on terminals 0, 1, 2 (counterclockwise order 0, 1, 2 when oriented).
    pub fn tripod() -> Self {
        CombinatorialType { n: 3, adj: vec![vec![3], vec![3], vec![3], vec![0, 1, 2]], oriented: false }
    }

    /// The path visiting the given terminal order, e.g. `[0, 2, 1]`.
    pub fn path(order: &[usize]) -> Result<Self> {
        let edges: Vec<_> = order.windows(2).map(|w| (w[0], w[1])).collect();
        Self::from_edges(order.len(), 0, &edges)
    }

    pub fn n_terminals(&self) -> usize {
        self.n
    }

    pub fn n_steiner(&self) -> usize {
        self.adj.len() - self.n
    }

    pub fn n_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        v < self.n
    }

    pub fn is_oriented(&self) -> bool {
        self.oriented
    }

    /// Neighbors of `v`; counterclockwise when the type is oriented.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Every terminal is a leaf and there are n − 2 Steiner points.
    pub fn is_full(&self) -> bool {
        (0..self.n).all(|t| self.adj[t].len() == 1) && self.n_steiner() + 2 == self.n
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self
            .adj
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect();
        e.sort_unstable();
        e
    }

    /// The same tree with the cyclic order dropped.
    pub fn unoriented(&self) -> Self {
        let mut adj = self.adj.clone();
        for l in &mut adj {
            l.sort_unstable();
        }
        CombinatorialType { n: self.n, adj, oriented: false }
    }

    /// The same tree with the given counterclockwise orders attached.
    pub fn with_orientation(&self, adj: Vec<Vec<usize>>) -> Result<Self> {
        if adj.len() != self.adj.len() {
            return Err(Error::InvalidType("orientation has the wrong vertex count".into()));
        }
        for (a, b) in adj.iter().zip(&self.adj) {
            let (mut a, mut b) = (a.clone(), b.clone());
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return Err(Error::InvalidType("orientation changes the tree".into()));
            }
        }
        Self::new(self.n, adj, true)
    }

    /// Reverses every cyclic order. The result is oriented.
    pub fn mirror(&self) -> Self {
        let adj = self.adj.iter().map(|l| l.iter().rev().copied().collect()).collect();
        CombinatorialType { n: self.n, adj, oriented: true }
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        let v = self.adj.len();
        if n < 2 {
            return Err(Error::InvalidType(format!("need at least 2 terminals, got {n}")));
        }
        if v < n {
            return Err(Error::InvalidType("fewer vertices than terminals".into()));
        }
        if v - n + 2 > n {
            return Err(Error::InvalidType(format!(
                "{} Steiner points exceed n - 2 = {}",
                v - n,
                n - 2
            )));
        }
        let mut edge_ends = 0usize;
        for (a, ns) in self.adj.iter().enumerate() {
            let mut seen = HashSet::new();
            for &b in ns {
                if b >= v || b == a {
                    return Err(Error::InvalidType(format!("bad neighbor {b} of {a}")));
                }
                if !seen.insert(b) {
                    return Err(Error::InvalidType(format!("repeated edge ({a}, {b})")));
                }
                if !self.adj[b].contains(&a) {
                    return Err(Error::InvalidType(format!("asymmetric edge ({a}, {b})")));
                }
            }
            edge_ends += ns.len();
            let d = ns.len();
            if a < n && !(1..=3).contains(&d) {
                return Err(Error::InvalidType(format!("terminal {a} has degree {d}")));
            }
            if a >= n && d != 3 {
                return Err(Error::InvalidType(format!("Steiner point {a} has degree {d}")));
            }
        }
        if edge_ends != 2 * (v - 1) {
            return Err(Error::InvalidType("edge count is not |V| - 1".into()));
        }
        let mut seen = vec![false; v];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &y in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidType("not connected".into()));
        }
        Ok(())
    }

    /// Isomorphism invariant: equal codes iff the types are isomorphic by a
    /// map fixing terminal labels (and, for oriented types, preserving every
    /// cyclic order).
    pub fn canonical_code(&self) -> Vec<u8> {
        let mut out = format!("{}{}:", if self.oriented { 'O' } else { 'U' }, self.n);
        if self.oriented {
            let d = self.adj[0].len();
            let best = (0..d)
                .map(|r| {
                    let kids: Vec<_> = (0..d).map(|i| self.adj[0][(r + i) % d]).collect();
                    self.encode_children(0, &kids)
                })
                .min()
                .expect("terminal has a neighbor");
            out.push_str(&best);
        } else {
            out.push_str(&self.encode_children(0, &self.adj[0].clone()));
        }
        out.into_bytes()
    }

    /// Code of the underlying unoriented tree.
    pub fn topology_code(&self) -> Vec<u8> {
        if self.oriented {
            self.unoriented().canonical_code()
        } else {
            self.canonical_code()
        }
    }

    fn encode(&self, v: usize, parent: usize) -> String {
        let ns = &self.adj[v];
        let kids: Vec<usize> = if self.oriented {
            let p = ns.iter().position(|&x| x == parent).expect("parent is adjacent");
            (1..ns.len()).map(|i| ns[(p + i) % ns.len()]).collect()
        } else {
            ns.iter().copied().filter(|&x| x != parent).collect()
        };
        self.encode_children(v, &kids)
    }

    fn encode_children(&self, v: usize, kids: &[usize]) -> String {
        let mut codes: Vec<String> = kids.iter().map(|&k| self.encode(k, v)).collect();
        if !self.oriented {
            codes.sort();
        }
        let label = if self.is_terminal(v) { format!("t{v}") } else { "s".to_string() };
        format!("{label}({})", codes.join(","))
    }

    /// Human-readable code, e.g. `t0(s(t1(),t2()))` shifted to 1-based labels.
    pub fn code_string(&self) -> String {
        String::from_utf8(self.canonical_code()).expect("codes are ASCII")
    }
}

/// Working representation used by the insertion recursions.
#[derive(Clone)]
struct Skeleton {
    n: usize,
    steiner: usize,
    edges: Vec<(usize, usize)>,
}

impl Skeleton {
    /// Makes room for terminal id `n` by shifting Steiner ids up by one.
    fn with_new_terminal(&self) -> Skeleton {
        let n = self.n;
        let shift = |x: usize| if x >= n { x + 1 } else { x };
        Skeleton {
            n: n + 1,
            steiner: self.steiner,
            edges: self.edges.iter().map(|&(a, b)| (shift(a), shift(b))).collect(),
        }
    }

    fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    fn into_type(self) -> CombinatorialType {
        CombinatorialType::from_edges(self.n, self.steiner, &self.edges)
            .expect("insertion preserves the type invariants")
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::LimitExceeded { n, cap })
    } else {
        Ok(())
    }
}

/// All full types on `n ≥ 3` terminals, with the default cap.
pub fn enumerate_full_types(n: usize) -> Result<Vec<CombinatorialType>> {
    enumerate_full_types_with_cap(n, DEFAULT_TYPE_CAP)
}

/// Full types by edge splitting: terminal k + 1 is attached to a new Steiner
/// point subdividing each of the 2k − 3 edges of every full type on k terminals.
pub fn enumerate_full_types_with_cap(n: usize, cap: usize) -> Result<Vec<CombinatorialType>> {
    if n < 3 {
        return Err(Error::Precondition(format!("full types need n >= 3, got {n}")));
    }
    check_cap(n, cap)?;
    let mut level = vec![Skeleton { n: 3, steiner: 1, edges: vec![(0, 3), (1, 3), (2, 3)] }];
    for _ in 3..n {
        let mut next = Vec::with_capacity(level.len() * (2 * level[0].n - 1));
        for sk in &level {
            let base = sk.with_new_terminal();
            let t = base.n - 1;
            let s = base.n + base.steiner;
            for i in 0..base.edges.len() {
                let mut e = base.clone();
                let (a, b) = e.edges.swap_remove(i);
                e.edges.extend([(a, s), (s, b), (s, t)]);
                e.steiner += 1;
                next.push(e);
            }
        }
        level = next;
    }
    Ok(level.into_iter().map(Skeleton::into_type).collect())
}

/// All types (full and degenerate) on `n ≥ 2` terminals, with the default cap.
pub fn enumerate_types(n: usize) -> Result<Vec<CombinatorialType>> {
    enumerate_types_with_cap(n, DEFAULT_TYPE_CAP)
}

/// All types on `n` terminals, built by inserting terminals one at a time.
///
/// Deleting the last terminal from a type and cleaning up always gives a type
/// on one fewer terminal, so inserting a terminal in every possible way
/// reaches every type: as a leaf on a new Steiner point splitting an edge, as
/// a degree-2 vertex subdividing an edge, as a leaf hung on a terminal of
/// degree < 3, or in place of a Steiner point. Duplicates are removed by
/// canonical code; the output is sorted by code.
pub fn enumerate_types_with_cap(n: usize, cap: usize) -> Result<Vec<CombinatorialType>> {
    if n < 2 {
        return Err(Error::Precondition(format!("types need n >= 2, got {n}")));
    }
    check_cap(n, cap)?;
    let mut level = vec![Skeleton { n: 2, steiner: 0, edges: vec![(0, 1)] }];
    for _ in 2..n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        let mut push = |sk: Skeleton, next: &mut Vec<Skeleton>| {
            let code = sk.clone().into_type().canonical_code();
            if seen.insert(code) {
                next.push(sk);
            }
        };
        for sk in &level {
            let base = sk.with_new_terminal();
            let t = base.n - 1;
            let s = base.n + base.steiner;
            for i in 0..base.edges.len() {
                let (a, b) = base.edges[i];
                let mut split = base.clone();
                split.edges.swap_remove(i);
                split.edges.extend([(a, s), (s, b), (s, t)]);
                split.steiner += 1;
                push(split, &mut next);

                let mut sub = base.clone();
                sub.edges.swap_remove(i);
                sub.edges.extend([(a, t), (t, b)]);
                push(sub, &mut next);
            }
            for u in 0..t {
                if base.degree(u) < 3 {
                    let mut leaf = base.clone();
                    leaf.edges.push((u, t));
                    push(leaf, &mut next);
                }
            }
            for old in base.n..base.n + base.steiner {
                let last = base.n + base.steiner - 1;
                // terminal t takes the place of Steiner `old`; the last Steiner id fills the gap
                let relabel = |x: usize| {
                    if x == old {
                        t
                    } else if x == last {
                        old
                    } else {
                        x
                    }
                };
                let edges = base.edges.iter().map(|&(a, b)| (relabel(a), relabel(b))).collect();
                push(Skeleton { n: base.n, steiner: base.steiner - 1, edges }, &mut next);
            }
        }
        level = next;
    }
    let mut types: Vec<_> = level.into_iter().map(Skeleton::into_type).collect();
    types.sort_by_cached_key(CombinatorialType::canonical_code);
    Ok(types)
}

/// One maximal full subtree of a type, relabeled locally.
#[derive(Debug, Clone, PartialEq)]
pub struct FullComponent {
    /// Global terminal ids; local terminal `i` is `terminals[i]`.
    pub terminals: Vec<usize>,
    /// Global Steiner ids; local Steiner `k + j` is `steiner[j]`.
    pub steiner: Vec<usize>,
    /// The component as a full type on `terminals.len()` local terminals.
    pub ty: CombinatorialType,
}

impl FullComponent {
    /// Global id of a local vertex.
    pub fn global(&self, local: usize) -> usize {
        let k = self.terminals.len();
        if local < k {
            self.terminals[local]
        } else {
            self.steiner[local - k]
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullComponentDecomposition {
    pub n_terminals: usize,
    pub components: Vec<FullComponent>,
    /// Terminals of degree ≥ 2 mapped to the components meeting there,
    /// listed counterclockwise when the parent type is oriented.
    pub shared_terminals: BTreeMap<usize, Vec<usize>>,
}

/// Splits `t` at every terminal of degree ≥ 2 into maximal full subtypes.
pub fn full_components(t: &CombinatorialType) -> FullComponentDecomposition {
    let n = t.n_terminals();
    let edges = t.edges();
    // components of edges, where two edges meeting at a Steiner point belong together
    let mut comp_of_edge = vec![usize::MAX; edges.len()];
    let edge_index = |a: usize, b: usize| {
        let key = (a.min(b), a.max(b));
        edges.binary_search(&key).expect("edge exists")
    };
    let mut n_comp = 0;
    for start in 0..edges.len() {
        if comp_of_edge[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp_of_edge[start] = n_comp;
        while let Some(e) = stack.pop() {
            let (a, b) = edges[e];
            for v in [a, b] {
                if t.is_terminal(v) {
                    continue;
                }
                for &w in t.neighbors(v) {
                    let f = edge_index(v, w);
                    if comp_of_edge[f] == usize::MAX {
                        comp_of_edge[f] = n_comp;
                        stack.push(f);
                    }
                }
            }
        }
        n_comp += 1;
    }

    let mut components = Vec::with_capacity(n_comp);
    for c in 0..n_comp {
        let mine: Vec<_> = (0..edges.len()).filter(|&e| comp_of_edge[e] == c).map(|e| edges[e]).collect();
        let mut terminals: Vec<usize> =
            mine.iter().flat_map(|&(a, b)| [a, b]).filter(|&v| t.is_terminal(v)).collect();
        terminals.sort_unstable();
        terminals.dedup();
        let mut steiner: Vec<usize> =
            mine.iter().flat_map(|&(a, b)| [a, b]).filter(|&v| !t.is_terminal(v)).collect();
        steiner.sort_unstable();
        steiner.dedup();
        let k = terminals.len();
        let local = |g: usize| {
            if t.is_terminal(g) {
                terminals.binary_search(&g).expect("terminal in component")
            } else {
                k + steiner.binary_search(&g).expect("Steiner in component")
            }
        };
        let mut adj = vec![Vec::new(); k + steiner.len()];
        for &term in &terminals {
            // the unique neighbor of this terminal inside the component
            let inside = t
                .neighbors(term)
                .iter()
                .copied()
                .find(|&w| comp_of_edge[edge_index(term, w)] == c)
                .expect("terminal touches its component");
            adj[local(term)].push(local(inside));
        }
        for &s in &steiner {
            adj[local(s)] = t.neighbors(s).iter().map(|&w| local(w)).collect();
        }
        let ty = CombinatorialType::new(k, adj, t.is_oriented())
            .expect("a full component is a valid full type");
        components.push(FullComponent { terminals, steiner, ty });
    }

    let mut shared_terminals = BTreeMap::new();
    for term in 0..n {
        if t.degree(term) >= 2 {
            let comps = t.neighbors(term).iter().map(|&w| comp_of_edge[edge_index(term, w)]).collect();
            shared_terminals.insert(term, comps);
        }
    }
    FullComponentDecomposition { n_terminals: n, components, shared_terminals }
}

impl FullComponentDecomposition {
    /// Glues the components back into a type on the original vertex ids.
    pub fn glue(&self) -> Result<CombinatorialType> {
        let n = self.n_terminals;
        let n_steiner: usize = self.components.iter().map(|c| c.steiner.len()).sum();
        let mut adj = vec![Vec::new(); n + n_steiner];
        let oriented = self.components.first().is_some_and(|c| c.ty.is_oriented());
        for c in &self.components {
            let k = c.terminals.len();
            for local in 0..c.ty.n_vertices() {
                let g = c.global(local);
                if g >= adj.len() {
                    return Err(Error::InvalidType(format!("vertex {g} out of range")));
                }
                let ns: Vec<usize> = c.ty.neighbors(local).iter().map(|&w| c.global(w)).collect();
                if local < k {
                    adj[g].extend(ns);
                } else {
                    adj[g] = ns;
                }
            }
        }
        // restore the recorded order at shared terminals
        for (&term, comps) in &self.shared_terminals {
            let mut ordered = Vec::with_capacity(comps.len());
            for &ci in comps {
                let c = &self.components[ci];
                let local = c.terminals.binary_search(&term).map_err(|_| {
                    Error::InvalidType(format!("terminal {term} not in component {ci}"))
                })?;
                ordered.push(c.global(c.ty.neighbors(local)[0]));
            }
            adj[term] = ordered;
        }
        if !oriented {
            for l in &mut adj {
                l.sort_unstable();
            }
        }
        CombinatorialType::new(n, adj, oriented)
    }
}

/// (2k − 1)!! = 1 · 3 · 5 ⋯ (2k − 1), the number of full types on k + 2 terminals.
pub fn double_factorial_odd(m: usize) -> u64 {
    (1..=m as u64).step_by(2).product()
}
