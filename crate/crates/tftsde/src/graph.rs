//! Closed, regularly edge-coloured bipartite graphs.
//!
//! A graph of rank `D` with `2k` vertices is stored as `D` permutations of
//! `0..k`; `colors[c][w]` is the black vertex joined to white vertex `w` by
//! the edge of colour `c`. Colours and vertices are 0-based here and 1-based
//! in JSON and on the command line.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Perm = Vec<usize>;

/// Largest automorphism group that [`ColoredGraph::automorphisms`] will list.
pub const MAX_GROUP_ORDER: usize = 1 << 20;

const NONE: usize = usize::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("expected {expected} colour permutations, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("colour {color} is not a bijection on 1..{k}")]
    NotBijective { color: usize, k: usize },
    #[error("colour {color} has {got} entries, expected {k}")]
    InconsistentSize { color: usize, k: usize, got: usize },
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("colour {color} out of range for rank {rank}")]
    ColorOutOfRange { color: usize, rank: usize },
    #[error("black vertex {index} out of range (k = {k})")]
    VertexOutOfRange { index: usize, k: usize },
    #[error("edge swap needs two distinct black vertices")]
    SameVertex,
    #[error("graph is not connected")]
    Disconnected,
    #[error("genus is only defined for rank 3 (got rank {0})")]
    NotRankThree(usize),
    #[error("automorphism group has order {0}, above the search bound")]
    GroupTooLarge(usize),
    #[error("ranks differ: {0} vs {1}")]
    RankDiffers(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredGraph {
    rank: usize,
    k: usize,
    colors: Vec<Perm>,
}

/// Isomorphism-class key: rank, number of components, then the sorted
/// component codes (`k` followed by the relabelled permutations).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalCode(pub Vec<u32>);

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// A colour-preserving automorphism: `black[colors[c][w]] == colors[c][white[w]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AutElement {
    pub white: Perm,
    pub black: Perm,
}

impl AutElement {
    pub fn identity(k: usize) -> Self {
        AutElement { white: (0..k).collect(), black: (0..k).collect() }
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &AutElement) -> AutElement {
        AutElement {
            white: other.white.iter().map(|&w| self.white[w]).collect(),
            black: other.black.iter().map(|&b| self.black[b]).collect(),
        }
    }

    pub fn inverse(&self) -> AutElement {
        AutElement { white: invert(&self.white), black: invert(&self.black) }
    }
}

/// A connected component together with the original labels of its vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub graph: ColoredGraph,
    /// `whites[i]` is the original index of the component's white vertex `i`.
    pub whites: Vec<usize>,
    pub blacks: Vec<usize>,
}

/// Relabelling that puts a connected graph in canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub graph: ColoredGraph,
    /// Old white index to canonical white index.
    pub white: Perm,
    pub black: Perm,
}

pub fn invert(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &j in p {
        if j >= p.len() || seen[j] {
            return false;
        }
        seen[j] = true;
    }
    true
}

impl ColoredGraph {
    /// Builds a graph from `rank` colour permutations (0-based images).
    /// An empty list gives the empty graph.
    pub fn new(rank: usize, perms: Vec<Perm>) -> Result<Self, GraphError> {
        if rank == 0 {
            return Err(GraphError::ZeroRank);
        }
        if perms.is_empty() {
            return Ok(Self::empty(rank));
        }
        if perms.len() != rank {
            return Err(GraphError::RankMismatch { expected: rank, got: perms.len() });
        }
        let k = perms[0].len();
        for (c, p) in perms.iter().enumerate() {
            if p.len() != k {
                return Err(GraphError::InconsistentSize { color: c + 1, k, got: p.len() });
            }
            if !is_permutation(p) {
                return Err(GraphError::NotBijective { color: c + 1, k });
            }
        }
        Ok(ColoredGraph { rank, k, colors: perms })
    }

    /// Same as [`ColoredGraph::new`] with 1-based images.
    pub fn from_one_based(rank: usize, perms: &[Vec<usize>]) -> Result<Self, GraphError> {
        let mut zero = Vec::with_capacity(perms.len());
        for (c, p) in perms.iter().enumerate() {
            let mut q = Vec::with_capacity(p.len());
            for &v in p {
                if v == 0 || v > p.len() {
                    return Err(GraphError::NotBijective { color: c + 1, k: p.len() });
                }
                q.push(v - 1);
            }
            zero.push(q);
        }
        Self::new(rank, zero)
    }

    pub fn empty(rank: usize) -> Self {
        ColoredGraph { rank, k: 0, colors: vec![Vec::new(); rank] }
    }

    /// The two-vertex graph with all colours parallel.
    pub fn melon(rank: usize) -> Self {
        ColoredGraph { rank, k: 1, colors: vec![vec![0]; rank] }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Half the number of vertices.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn colors(&self) -> &[Perm] {
        &self.colors
    }

    pub fn black_of(&self, c: usize, w: usize) -> usize {
        self.colors[c][w]
    }

    pub fn white_of(&self, c: usize, b: usize) -> usize {
        self.colors[c].iter().position(|&x| x == b).expect("black index in range")
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.colors.iter().map(|p| p.iter().map(|v| v + 1).collect()).collect()
    }

    /// Applies a relabelling: white `w` becomes `white[w]`, black `b` becomes `black[b]`.
    pub fn relabel(&self, white: &[usize], black: &[usize]) -> ColoredGraph {
        let mut colors = vec![vec![0; self.k]; self.rank];
        for c in 0..self.rank {
            for w in 0..self.k {
                colors[c][white[w]] = black[self.colors[c][w]];
            }
        }
        ColoredGraph { rank: self.rank, k: self.k, colors }
    }

    /// Places `other` after `self`, shifting its labels by `self.k()`.
    pub fn disjoint_union(&self, other: &ColoredGraph) -> Result<ColoredGraph, GraphError> {
        if self.rank != other.rank {
            return Err(GraphError::RankDiffers(self.rank, other.rank));
        }
        let colors = (0..self.rank)
            .map(|c| {
                let mut p = self.colors[c].clone();
                p.extend(other.colors[c].iter().map(|b| b + self.k));
                p
            })
            .collect();
        Ok(ColoredGraph { rank: self.rank, k: self.k + other.k, colors })
    }

    fn inverses(&self) -> Vec<Perm> {
        self.colors.iter().map(|p| invert(p)).collect()
    }

    /// Component index of every white and black vertex.
    fn component_labels(&self) -> (Vec<usize>, Vec<usize>, usize) {
        let inv = self.inverses();
        let mut wc = vec![NONE; self.k];
        let mut bc = vec![NONE; self.k];
        let mut n = 0;
        for start in 0..self.k {
            if wc[start] != NONE {
                continue;
            }
            wc[start] = n;
            let mut queue = VecDeque::from([start]);
            while let Some(w) = queue.pop_front() {
                for c in 0..self.rank {
                    let b = self.colors[c][w];
                    if bc[b] == NONE {
                        bc[b] = n;
                        for ic in &inv {
                            let w2 = ic[b];
                            if wc[w2] == NONE {
                                wc[w2] = n;
                                queue.push_back(w2);
                            }
                        }
                    }
                }
            }
            n += 1;
        }
        (wc, bc, n)
    }

    /// The empty graph counts as connected (with no components).
    pub fn is_connected(&self) -> bool {
        self.component_labels().2 <= 1
    }

    pub fn component_count(&self) -> usize {
        self.component_labels().2
    }

    /// Connected components ordered by their smallest white index.
    pub fn components(&self) -> Vec<Component> {
        let (wc, bc, n) = self.component_labels();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let whites: Vec<usize> = (0..self.k).filter(|&w| wc[w] == i).collect();
            let blacks: Vec<usize> = (0..self.k).filter(|&b| bc[b] == i).collect();
            let mut bpos = vec![NONE; self.k];
            for (j, &b) in blacks.iter().enumerate() {
                bpos[b] = j;
            }
            let colors = self
                .colors
                .iter()
                .map(|p| whites.iter().map(|&w| bpos[p[w]]).collect())
                .collect();
            out.push(Component {
                graph: ColoredGraph { rank: self.rank, k: whites.len(), colors },
                whites,
                blacks,
            });
        }
        out
    }

    /// Breadth-first relabelling of a connected graph rooted at white `root`.
    fn traversal_labels(&self, root: usize, inv: &[Perm]) -> (Perm, Perm) {
        let mut wl = vec![NONE; self.k];
        let mut bl = vec![NONE; self.k];
        let mut order = Vec::with_capacity(self.k);
        wl[root] = 0;
        order.push(root);
        let mut nb = 0;
        let mut i = 0;
        while i < order.len() {
            let w = order[i];
            i += 1;
            for c in 0..self.rank {
                let b = self.colors[c][w];
                if bl[b] != NONE {
                    continue;
                }
                bl[b] = nb;
                nb += 1;
                for ic in inv {
                    let w2 = ic[b];
                    if wl[w2] == NONE {
                        wl[w2] = order.len();
                        order.push(w2);
                    }
                }
            }
        }
        (wl, bl)
    }

    fn connected_candidates(&self) -> Vec<(Vec<u32>, Perm, Perm)> {
        let inv = self.inverses();
        (0..self.k)
            .map(|r| {
                let (wl, bl) = self.traversal_labels(r, &inv);
                let g = self.relabel(&wl, &bl);
                let mut code = Vec::with_capacity(1 + self.rank * self.k);
                code.push(self.k as u32);
                for p in &g.colors {
                    code.extend(p.iter().map(|&v| v as u32));
                }
                (code, wl, bl)
            })
            .collect()
    }

    /// Canonical relabelling of a connected, non-empty graph.
    pub fn canonical_form(&self) -> Result<Canonical, GraphError> {
        if !self.is_connected() || self.k == 0 {
            return Err(GraphError::Disconnected);
        }
        let (_, wl, bl) = self
            .connected_candidates()
            .into_iter()
            .min_by(|a, b| a.0.cmp(&b.0))
            .expect("non-empty graph");
        Ok(Canonical { graph: self.relabel(&wl, &bl), white: wl, black: bl })
    }

    fn connected_code(&self) -> Vec<u32> {
        self.connected_candidates()
            .into_iter()
            .map(|c| c.0)
            .min()
            .expect("non-empty graph")
    }

    pub fn canonical_code(&self) -> CanonicalCode {
        let mut codes: Vec<Vec<u32>> =
            self.components().iter().map(|c| c.graph.connected_code()).collect();
        codes.sort();
        let mut out = vec![self.rank as u32, codes.len() as u32];
        for c in codes {
            out.extend(c);
        }
        CanonicalCode(out)
    }

    pub fn is_isomorphic(&self, other: &ColoredGraph) -> bool {
        self.canonical_code() == other.canonical_code()
    }

    fn connected_automorphisms(&self) -> Vec<AutElement> {
        let cands = self.connected_candidates();
        let best = cands.iter().map(|c| &c.0).min().expect("non-empty").clone();
        let (_, w0, b0) = cands.iter().find(|c| c.0 == best).expect("minimum present");
        let mut out: Vec<AutElement> = cands
            .iter()
            .filter(|c| c.0 == best)
            .map(|(_, wl, bl)| {
                // wl⁻¹ ∘ w0 maps the root of w0 onto the root of wl
                let wi = invert(wl);
                let bi = invert(bl);
                AutElement {
                    white: w0.iter().map(|&x| wi[x]).collect(),
                    black: b0.iter().map(|&x| bi[x]).collect(),
                }
            })
            .collect();
        out.sort();
        out
    }

    /// |Aut_c(g)| from the component structure, without listing the group.
    pub fn automorphism_count(&self) -> u128 {
        let comps = self.components();
        let mut classes: Vec<(CanonicalCode, usize, u128)> = Vec::new();
        for c in &comps {
            let code = c.graph.canonical_code();
            match classes.iter_mut().find(|e| e.0 == code) {
                Some(e) => e.1 += 1,
                None => {
                    let n = c.graph.connected_automorphisms().len() as u128;
                    classes.push((code, 1, n));
                }
            }
        }
        classes
            .iter()
            .map(|&(_, alpha, n)| n.pow(alpha as u32) * factorial(alpha))
            .product()
    }

    /// The full colour-preserving automorphism group, sorted.
    pub fn automorphisms(&self) -> Result<Vec<AutElement>, GraphError> {
        let order = self.automorphism_count();
        if order > MAX_GROUP_ORDER as u128 {
            return Err(GraphError::GroupTooLarge(order as usize));
        }
        if self.k == 0 {
            return Ok(vec![AutElement::identity(0)]);
        }
        let comps = self.components();
        // Canonical relabelling and automorphisms (in canonical labels) per component.
        let canon: Vec<Canonical> =
            comps.iter().map(|c| c.graph.canonical_form().expect("connected")).collect();
        let mut classes: Vec<(CanonicalCode, Vec<usize>)> = Vec::new();
        for (i, c) in canon.iter().enumerate() {
            let code = c.graph.canonical_code();
            match classes.iter_mut().find(|e| e.0 == code) {
                Some(e) => e.1.push(i),
                None => classes.push((code, vec![i])),
            }
        }
        let class_auts: Vec<Vec<AutElement>> = classes
            .iter()
            .map(|(_, members)| canon[members[0]].graph.connected_automorphisms())
            .collect();

        // For each class: every block permutation μ and every choice of
        // per-copy automorphism.
        let mut per_class: Vec<Vec<Vec<(usize, usize, usize)>>> = Vec::new();
        for (ci, (_, members)) in classes.iter().enumerate() {
            let n = members.len();
            let naut = class_auts[ci].len();
            let mut choices = Vec::new();
            for mu in permutations(n) {
                let mut idx = vec![0usize; n];
                loop {
                    choices.push(
                        (0..n).map(|a| (members[a], members[mu[a]], idx[a])).collect::<Vec<_>>(),
                    );
                    let mut pos = 0;
                    while pos < n {
                        idx[pos] += 1;
                        if idx[pos] < naut {
                            break;
                        }
                        idx[pos] = 0;
                        pos += 1;
                    }
                    if pos == n {
                        break;
                    }
                }
            }
            per_class.push(choices);
        }

        let mut out = Vec::with_capacity(order as usize);
        let mut sel = vec![0usize; per_class.len()];
        loop {
            let mut white = vec![0; self.k];
            let mut black = vec![0; self.k];
            for (ci, choices) in per_class.iter().enumerate() {
                for &(src, dst, ai) in &choices[sel[ci]] {
                    let sigma = &class_auts[ci][ai];
                    let (cs, cd) = (&canon[src], &canon[dst]);
                    let dwi = invert(&cd.white);
                    let dbi = invert(&cd.black);
                    for (lw, &ow) in comps[src].whites.iter().enumerate() {
                        let t = dwi[sigma.white[cs.white[lw]]];
                        white[ow] = comps[dst].whites[t];
                    }
                    for (lb, &ob) in comps[src].blacks.iter().enumerate() {
                        let t = dbi[sigma.black[cs.black[lb]]];
                        black[ob] = comps[dst].blacks[t];
                    }
                }
            }
            out.push(AutElement { white, black });
            let mut pos = 0;
            while pos < sel.len() {
                sel[pos] += 1;
                if sel[pos] < per_class[pos].len() {
                    break;
                }
                sel[pos] = 0;
                pos += 1;
            }
            if pos == sel.len() {
                break;
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn is_automorphism(&self, a: &AutElement) -> bool {
        a.white.len() == self.k
            && a.black.len() == self.k
            && is_permutation(&a.white)
            && is_permutation(&a.black)
            && (0..self.rank).all(|c| {
                (0..self.k).all(|w| a.black[self.colors[c][w]] == self.colors[c][a.white[w]])
            })
    }

    /// `π_c ← (β ρ)∘π_c`.
    pub fn edge_swap(&self, c: usize, beta: usize, rho: usize) -> Result<ColoredGraph, GraphError> {
        if c >= self.rank {
            return Err(GraphError::ColorOutOfRange { color: c + 1, rank: self.rank });
        }
        for &i in &[beta, rho] {
            if i >= self.k {
                return Err(GraphError::VertexOutOfRange { index: i + 1, k: self.k });
            }
        }
        if beta == rho {
            return Err(GraphError::SameVertex);
        }
        let mut g = self.clone();
        for b in g.colors[c].iter_mut() {
            if *b == beta {
                *b = rho;
            } else if *b == rho {
                *b = beta;
            }
        }
        Ok(g)
    }

    /// Br⁽²⁾(g, β, c): black vertices τ ≠ β whose colour-c swap with β disconnects g.
    pub fn bridge_pairs(&self, beta: usize, c: usize) -> Result<BTreeSet<usize>, GraphError> {
        if !self.is_connected() || self.k == 0 {
            return Err(GraphError::Disconnected);
        }
        if beta >= self.k {
            return Err(GraphError::VertexOutOfRange { index: beta + 1, k: self.k });
        }
        let mut out = BTreeSet::new();
        for tau in (0..self.k).filter(|&t| t != beta) {
            if !self.edge_swap(c, beta, tau)?.is_connected() {
                out.insert(tau);
            }
        }
        Ok(out)
    }

    /// `slots[α][c]` is the white vertex whose colour-c entry black vertex α receives.
    pub fn induced_map(&self) -> Vec<Vec<usize>> {
        let inv = self.inverses();
        (0..self.k).map(|a| (0..self.rank).map(|c| inv[c][a]).collect()).collect()
    }

    /// Number of bicoloured cycles using colours `i` and `j`.
    pub fn bicolored_cycles(&self, i: usize, j: usize) -> usize {
        let inv_j = invert(&self.colors[j]);
        let step: Perm = (0..self.k).map(|w| inv_j[self.colors[i][w]]).collect();
        cycle_count(&step)
    }

    pub fn genus_rank3(&self) -> Result<usize, GraphError> {
        if self.rank != 3 {
            return Err(GraphError::NotRankThree(self.rank));
        }
        if !self.is_connected() || self.k == 0 {
            return Err(GraphError::Disconnected);
        }
        let faces = self.bicolored_cycles(0, 1) + self.bicolored_cycles(0, 2) + self.bicolored_cycles(1, 2);
        // 2 - 2g = V - E + F with V = 2k, E = 3k
        let twice = 2 + self.k as i64 - faces as i64;
        assert!(twice >= 0 && twice % 2 == 0, "non-integer genus {twice}/2");
        Ok((twice / 2) as usize)
    }
}

pub fn cycle_count(p: &[usize]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut n = 0;
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        n += 1;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
        }
    }
    n
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut p: Perm = (0..n).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { break };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

impl fmt::Display for ColoredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = self
            .to_one_based()
            .iter()
            .map(|p| p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "<{}>", cols.join(","))
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    rank: usize,
    k: usize,
    colors: Vec<Vec<usize>>,
}

impl Serialize for ColoredGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphJson { rank: self.rank, k: self.k, colors: self.to_one_based() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ColoredGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = GraphJson::deserialize(d)?;
        let g = ColoredGraph::from_one_based(j.rank, &j.colors).map_err(serde::de::Error::custom)?;
        if g.k != j.k {
            return Err(serde::de::Error::custom(format!("k = {} but colours act on {}", j.k, g.k)));
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(perms: &[&[usize]]) -> ColoredGraph {
        ColoredGraph::from_one_based(perms.len(), &perms.iter().map(|p| p.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    fn v1() -> ColoredGraph {
        g(&[&[1, 2], &[2, 1], &[2, 1]])
    }

    fn k33() -> ColoredGraph {
        g(&[&[1, 2, 3], &[2, 3, 1], &[3, 1, 2]])
    }

    #[test]
    fn make_graph_checks() {
        assert_eq!(ColoredGraph::new(3, vec![]).unwrap().k(), 0);
        assert!(matches!(
            ColoredGraph::new(3, vec![vec![0]]),
            Err(GraphError::RankMismatch { .. })
        ));
        assert!(matches!(
            ColoredGraph::new(2, vec![vec![0, 0], vec![0, 1]]),
            Err(GraphError::NotBijective { .. })
        ));
        assert!(matches!(
            ColoredGraph::new(2, vec![vec![0, 1], vec![0]]),
            Err(GraphError::InconsistentSize { .. })
        ));
    }

    #[test]
    fn connectivity() {
        assert!(ColoredGraph::melon(3).is_connected());
        assert!(!g(&[&[2, 1], &[2, 1], &[2, 1]]).is_connected());
        assert!(k33().is_connected());
        assert!(ColoredGraph::empty(3).is_connected());
        assert!(ColoredGraph::empty(3).components().is_empty());
    }

    #[test]
    fn components_split_two_melons() {
        let two = g(&[&[2, 1], &[2, 1], &[2, 1]]);
        let comps = two.components();
        assert_eq!(comps.len(), 2);
        for c in &comps {
            assert_eq!(c.graph, ColoredGraph::melon(3));
        }
        assert_eq!(comps[0].whites, vec![0]);
        assert_eq!(comps[0].blacks, vec![1]);
    }

    #[test]
    fn codes() {
        let alt = g(&[&[2, 1], &[1, 2], &[1, 2]]);
        assert_eq!(v1().canonical_code(), alt.canonical_code());
        assert_ne!(v1().canonical_code(), ColoredGraph::melon(3).canonical_code());
        let v3 = g(&[&[1, 2], &[1, 2], &[2, 1]]);
        assert_ne!(v1().canonical_code(), v3.canonical_code());
    }

    #[test]
    fn automorphism_orders() {
        assert_eq!(ColoredGraph::melon(3).automorphisms().unwrap().len(), 1);
        assert_eq!(v1().automorphisms().unwrap().len(), 2);
        assert_eq!(k33().automorphisms().unwrap().len(), 3);
        let mm = ColoredGraph::melon(3).disjoint_union(&ColoredGraph::melon(3)).unwrap();
        assert_eq!(mm.automorphisms().unwrap().len(), 2);
        for a in mm.automorphisms().unwrap() {
            assert!(mm.is_automorphism(&a));
        }
    }

    #[test]
    fn swaps_and_bridges() {
        let s1 = v1().edge_swap(0, 0, 1).unwrap();
        assert_eq!(s1.component_count(), 2);
        let s2 = v1().edge_swap(1, 0, 1).unwrap();
        assert_eq!(s2, g(&[&[1, 2], &[1, 2], &[2, 1]]));
        assert_eq!(v1().bridge_pairs(0, 0).unwrap(), BTreeSet::from([1]));
        assert!(v1().bridge_pairs(0, 1).unwrap().is_empty());
        assert!(v1().bridge_pairs(0, 2).unwrap().is_empty());
        assert!(ColoredGraph::melon(3).bridge_pairs(0, 0).unwrap().is_empty());
        assert_eq!(v1().edge_swap(0, 0, 0), Err(GraphError::SameVertex));
    }

    #[test]
    fn induced_map_examples() {
        assert_eq!(ColoredGraph::melon(3).induced_map(), vec![vec![0, 0, 0]]);
        assert_eq!(v1().induced_map(), vec![vec![0, 1, 1], vec![1, 0, 0]]);
        for slots in k33().induced_map() {
            let set: BTreeSet<_> = slots.iter().collect();
            assert_eq!(set.len(), 3);
        }
    }

    #[test]
    fn genus() {
        assert_eq!(ColoredGraph::melon(3).genus_rank3().unwrap(), 0);
        assert_eq!(v1().genus_rank3().unwrap(), 0);
        assert_eq!(k33().genus_rank3().unwrap(), 1);
        assert_eq!(ColoredGraph::melon(4).genus_rank3(), Err(GraphError::NotRankThree(4)));
    }

    #[test]
    fn json_round_trip() {
        let s = serde_json::to_string(&k33()).unwrap();
        assert_eq!(s, r#"{"rank":3,"k":3,"colors":[[1,2,3],[2,3,1],[3,1,2]]}"#);
        let back: ColoredGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, k33());
        assert!(serde_json::from_str::<ColoredGraph>(r#"{"rank":1,"k":2,"colors":[[1]]}"#).is_err());
    }

    #[test]
    fn permutations_listed() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }
}
