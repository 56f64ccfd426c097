//! Schwinger-Dyson equations for disconnected boundary graphs of the quartic
//! melonic model, and the Y-term table used to expand their coefficients.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{position_classes, word_group, word_group_order, AlgebraError, GraphWord};
use crate::catalog::{Catalog, CatalogError};
use crate::expr::{
    correlator, equal_normalized, index_sum, int, neg, parse_text, product, scalar, sum, transport_args, vector, Atom, Block,
    Equation, Expr, ExprError, MomVec,
};
use crate::graph::{ColoredGraph, GraphError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SdeError {
    #[error("empty boundary word")]
    EmptyWord,
    #[error("component {0} out of range")]
    Component(usize),
    #[error("black vertex {0} out of range")]
    Beta(usize),
    #[error("too many white vertices for the frame names ({0})")]
    FrameTooLarge(usize),
    #[error("no Y-term entry for {0}")]
    MissingEntry(String),
    #[error("bad Y-term table: {0}")]
    Table(String),
    #[error("enumeration bound exceeded: {0} vertices (at most 8)")]
    Bound(usize),
    #[error("only rank 3 is supported here, got {0}")]
    Rank(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

const FRAME_NAMES: [&str; 12] = ["x", "y", "z", "w", "u", "v", "t", "r", "p", "n", "k", "h"];

/// Tadpole index name.
pub const TADPOLE: &str = "b";

/// Symbols for the white and black momenta of a word.
#[derive(Clone, Debug, Serialize)]
pub struct Frame {
    /// `whites[i]` is the vector of the `i`-th white vertex, word order.
    pub whites: Vec<MomVec>,
    /// `blacks[α]` is `y^α`, read through the induced map of each factor.
    pub blacks: Vec<MomVec>,
}

pub fn momentum_frame(word: &GraphWord) -> Result<Frame, SdeError> {
    let d = word.white_count();
    if d > FRAME_NAMES.len() {
        return Err(SdeError::FrameTooLarge(d));
    }
    let rank = word.rank();
    let whites: Vec<MomVec> = FRAME_NAMES[..d].iter().map(|n| vector(n, rank)).collect();
    let mut blacks = Vec::with_capacity(d);
    for (f, off) in word.factors().iter().zip(word.offsets()) {
        for alpha in 0..f.k() {
            blacks.push((0..rank).map(|c| whites[off + f.white_of(c, alpha)][c].clone()).collect());
        }
    }
    Ok(Frame { whites, blacks })
}

/// One representative `(component, β)` per orbit of black vertices under
/// the automorphisms of the whole word, smallest global index first.
pub fn inequivalent_beta_choices(word: &GraphWord) -> Result<Vec<(usize, usize)>, SdeError> {
    let g = word.to_graph();
    let auts = g.automorphisms()?;
    let offsets = word.offsets();
    let mut seen = vec![false; g.k()];
    let mut out = Vec::new();
    for b in 0..g.k() {
        if seen[b] {
            continue;
        }
        for a in &auts {
            seen[a.black[b]] = true;
        }
        let comp = offsets.iter().rposition(|&o| o <= b).expect("offset 0");
        out.push((comp, b - offsets[comp]));
    }
    Ok(out)
}

/// Correlator of a possibly disconnected graph whose white `i` carries `args[i]`.
pub fn graph_correlator(g: &ColoredGraph, args: &[MomVec]) -> Expr {
    correlator(
        g.components()
            .into_iter()
            .map(|c| Block { args: c.whites.iter().map(|&w| args[w].clone()).collect(), graph: c.graph })
            .collect(),
    )
}

fn word_blocks(factors: &[ColoredGraph], args: &[MomVec]) -> Vec<Block> {
    let mut out = Vec::with_capacity(factors.len());
    let mut at = 0;
    for f in factors {
        out.push(Block { graph: f.clone(), args: args[at..at + f.k()].to_vec() });
        at += f.k();
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Orbit,
    Swap,
    Tadpole,
    Bridge,
    Insertion,
}

/// How the sums over pairs `(C, B)` with `C ⊔ B ∼ Q` are organised.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factorizations {
    /// One pair per split of the isomorphism classes, summed over `Aut(Q)`.
    Classes,
    /// One pair per subset of positions of `Q`, summed over `Aut(C) × Aut(B)`.
    Positions,
}

/// The data fixed by a word and a distinguished black vertex.
#[derive(Clone, Debug)]
pub struct SdeContext {
    pub word: GraphWord,
    pub component: usize,
    pub beta: usize,
    pub frame: Frame,
    /// Positions of the remaining components `Q`, in word order.
    pub rest: Vec<usize>,
}

impl SdeContext {
    pub fn new(word: &GraphWord, component: usize, beta: usize) -> Result<Self, SdeError> {
        if word.is_unit() {
            return Err(SdeError::EmptyWord);
        }
        let r = word.factors().get(component).ok_or(SdeError::Component(component))?;
        if beta >= r.k() {
            return Err(SdeError::Beta(beta));
        }
        Ok(SdeContext {
            word: word.clone(),
            component,
            beta,
            frame: momentum_frame(word)?,
            rest: (0..word.degree()).filter(|&i| i != component).collect(),
        })
    }

    fn offset(&self, pos: usize) -> usize {
        self.word.offsets()[pos]
    }

    pub fn global_beta(&self) -> usize {
        self.offset(self.component) + self.beta
    }

    pub fn s(&self) -> &MomVec {
        &self.frame.blacks[self.global_beta()]
    }

    fn r(&self) -> &ColoredGraph {
        &self.word.factors()[self.component]
    }

    fn x0(&self) -> Vec<MomVec> {
        let o = self.offset(self.component);
        self.frame.whites[o..o + self.r().k()].to_vec()
    }

    fn q_word(&self) -> GraphWord {
        GraphWord::new(self.word.rank(), self.rest.iter().map(|&i| self.word.factors()[i].clone()).collect())
            .expect("connected factors")
    }

    fn q_args(&self) -> Vec<MomVec> {
        self.rest
            .iter()
            .flat_map(|&i| {
                let o = self.offset(i);
                self.frame.whites[o..o + self.word.factors()[i].k()].to_vec()
            })
            .collect()
    }

    pub fn lhs(&self) -> Expr {
        correlator(word_blocks(self.word.factors(), &self.frame.whites))
    }
}

/// `∂W/∂ς_c(𝒟; β, ρ)` at the frame momenta; `rho` is a global black index.
pub fn resolve_swap_correlator(ctx: &SdeContext, c: usize, rho: usize) -> Result<Expr, SdeError> {
    if rho == ctx.global_beta() || rho >= ctx.word.white_count() {
        return Err(SdeError::Beta(rho));
    }
    let g = ctx.word.to_graph().edge_swap(c, ctx.global_beta(), rho)?;
    Ok(graph_correlator(&g, &ctx.frame.whites))
}

/// Pairs `(C positions, B positions)` inside `Q`, with the group to sum over.
struct Split {
    c: Vec<usize>,
    b: Vec<usize>,
}

fn splits(q: &GraphWord, mode: Factorizations) -> Vec<Split> {
    let n = q.degree();
    match mode {
        Factorizations::Positions => (0..1u32 << n)
            .map(|mask| Split {
                c: (0..n).filter(|i| mask >> i & 1 == 1).collect(),
                b: (0..n).filter(|i| mask >> i & 1 == 0).collect(),
            })
            .collect(),
        Factorizations::Classes => {
            let mut out = vec![Split { c: vec![], b: vec![] }];
            for class in position_classes(q) {
                let mut next = Vec::new();
                for s in &out {
                    for gamma in 0..=class.len() {
                        let mut c = s.c.clone();
                        c.extend_from_slice(&class[..gamma]);
                        let mut b = s.b.clone();
                        b.extend_from_slice(&class[gamma..]);
                        next.push(Split { c, b });
                    }
                }
                out = next;
            }
            for s in &mut out {
                s.c.sort_unstable();
                s.b.sort_unstable();
            }
            out
        }
    }
}

fn sub_word(q: &GraphWord, pos: &[usize]) -> GraphWord {
    GraphWord::new(q.rank(), pos.iter().map(|&i| q.factors()[i].clone()).collect()).expect("connected")
}

/// Per-position argument blocks of `Q`.
fn q_blocks(q: &GraphWord, args: &[MomVec]) -> Vec<Vec<MomVec>> {
    word_blocks(q.factors(), args).into_iter().map(|b| b.args).collect()
}

/// Momentum assignments `(𝕏_C, 𝕏_B)` to sum over for one split.
fn split_assignments(q: &GraphWord, args: &[MomVec], split: &Split, mode: Factorizations) -> Vec<(Vec<MomVec>, Vec<MomVec>)> {
    let pick = |blocks: &[Vec<MomVec>], pos: &[usize]| pos.iter().flat_map(|&i| blocks[i].clone()).collect::<Vec<_>>();
    match mode {
        Factorizations::Classes => word_group(q)
            .iter()
            .map(|omega| {
                let moved = omega.star(q, args);
                let blocks = q_blocks(q, &moved);
                (pick(&blocks, &split.c), pick(&blocks, &split.b))
            })
            .collect(),
        Factorizations::Positions => {
            let blocks = q_blocks(q, args);
            let (cw, bw) = (sub_word(q, &split.c), sub_word(q, &split.b));
            let (xc, xb) = (pick(&blocks, &split.c), pick(&blocks, &split.b));
            let gc = word_group(&cw);
            let gb = word_group(&bw);
            let mut out = Vec::with_capacity(gc.len() * gb.len());
            for a in &gc {
                for b in &gb {
                    out.push((a.star(&cw, &xc), b.star(&bw, &xb)));
                }
            }
            out
        }
    }
}

/// The rhs terms of the equation, each tagged with its colour and family,
/// inside `(−2λ/E_s) Σ_c { … }`.
pub fn sde_terms(ctx: &SdeContext, mode: Factorizations) -> Result<Vec<(usize, Family, Expr)>, SdeError> {
    let rank = ctx.word.rank();
    let x = &ctx.frame.whites;
    let s = ctx.s().clone();
    let lhs = ctx.lhs();
    let q = ctx.q_word();
    let qx = ctx.q_args();
    let gb = ctx.global_beta();
    let mut out = Vec::new();
    for c in 0..rank {
        let sc = s[c].clone();

        for omega in word_group(&ctx.word) {
            let args = omega.star(&ctx.word, x);
            let f = Expr::FCoeff { color: c, blocks: word_blocks(ctx.word.factors(), &args), slot: sc.clone() };
            out.push((c, Family::Orbit, f));
        }

        for rho in 0..ctx.word.white_count() {
            if rho == gb {
                continue;
            }
            let yr = ctx.frame.blacks[rho][c].clone();
            let g = resolve_swap_correlator(ctx, c, rho)?;
            let diff = sum(vec![g.clone(), neg(g.substitute(&sc, &yr)?)]);
            out.push((c, Family::Swap, product(vec![Expr::PropDiffInv { a: yr, b: sc.clone() }, diff])));
        }

        let bc = Atom::new(TADPOLE, c);
        let diff = sum(vec![lhs.clone(), neg(lhs.substitute(&sc, &bc)?)]);
        out.push((
            c,
            Family::Tadpole,
            neg(index_sum(vec![bc.clone()], product(vec![Expr::PropDiffInv { a: sc.clone(), b: bc }, diff]))),
        ));

        let x0 = ctx.x0();
        let r = ctx.r();
        for tau in r.bridge_pairs(ctx.beta, c)? {
            let yt = ctx.frame.blacks[ctx.offset(ctx.component) + tau][c].clone();
            let parts = r.edge_swap(c, ctx.beta, tau)?.components();
            debug_assert_eq!(parts.len(), 2);
            let (r1, r2) = (&parts[0], &parts[1]);
            let a1: Vec<MomVec> = r1.whites.iter().map(|&w| x0[w].clone()).collect();
            let a2: Vec<MomVec> = r2.whites.iter().map(|&w| x0[w].clone()).collect();
            for split in splits(&q, mode) {
                for (xc, xb) in split_assignments(&q, &qx, &split, mode) {
                    let mut f1 = vec![r1.graph.clone()];
                    f1.extend(split.c.iter().map(|&i| q.factors()[i].clone()));
                    let mut f2 = vec![r2.graph.clone()];
                    f2.extend(split.b.iter().map(|&i| q.factors()[i].clone()));
                    let args1: Vec<MomVec> = a1.iter().cloned().chain(xc).collect();
                    let args2: Vec<MomVec> = a2.iter().cloned().chain(xb).collect();
                    let h = product(vec![
                        correlator(word_blocks(&f1, &args1)),
                        correlator(word_blocks(&f2, &args2)),
                    ]);
                    let diff = sum(vec![h.clone(), neg(h.substitute(&sc, &yt)?)]);
                    out.push((c, Family::Bridge, product(vec![Expr::PropDiffInv { a: yt.clone(), b: sc.clone() }, diff])));
                }
            }
        }

        for split in splits(&q, mode) {
            let weight = Rational64::new(1, word_group_order(&sub_word(&q, &split.b)) as i64);
            for (xc, xb) in split_assignments(&q, &qx, &split, mode) {
                let cf: Vec<ColoredGraph> = split.c.iter().map(|&i| q.factors()[i].clone()).collect();
                let f = Expr::FCoeff { color: c, blocks: word_blocks(&cf, &xc), slot: sc.clone() };
                let mut gf = vec![r.clone()];
                gf.extend(split.b.iter().map(|&i| q.factors()[i].clone()));
                let ga: Vec<MomVec> = x0.iter().cloned().chain(xb).collect();
                let g = correlator(word_blocks(&gf, &ga));
                out.push((c, Family::Insertion, product(vec![scalar(weight), f, g])));
            }
        }
    }
    Ok(out)
}

/// The equation for the distinguished black vertex `beta` of component
/// `component`, in the form `G_𝒟(X) = (−2λ/E_s) Σ_c {…}`.
pub fn generate_sde(word: &GraphWord, component: usize, beta: usize) -> Result<Equation, SdeError> {
    generate_sde_with(word, component, beta, Factorizations::Classes)
}

pub fn generate_sde_with(
    word: &GraphWord,
    component: usize,
    beta: usize,
    mode: Factorizations,
) -> Result<Equation, SdeError> {
    let ctx = SdeContext::new(word, component, beta)?;
    let terms = sde_terms(&ctx, mode)?.into_iter().map(|t| t.2).collect();
    Ok(Equation { lhs: ctx.lhs(), rhs: prefactor(&ctx, sum(terms)) })
}

fn prefactor(ctx: &SdeContext, body: Expr) -> Expr {
    product(vec![int(-2), Expr::Lambda { power: 1 }, Expr::PropInv { at: ctx.s().clone() }, body])
}

/// Every equation of a word, one per inequivalent distinguished vertex.
pub fn generate_all(word: &GraphWord) -> Result<Vec<((usize, usize), Equation)>, SdeError> {
    inequivalent_beta_choices(word)?
        .into_iter()
        .map(|(c, b)| Ok(((c, b), generate_sde(word, c, b)?)))
        .collect()
}

/// Equations for many words; runs in parallel with the `parallel` feature.
pub fn generate_batch(words: &[GraphWord]) -> Vec<Result<Vec<((usize, usize), Equation)>, SdeError>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        words.par_iter().map(generate_all).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        generate_batch_sequential(words)
    }
}

pub fn generate_batch_sequential(words: &[GraphWord]) -> Vec<Result<Vec<((usize, usize), Equation)>, SdeError>> {
    words.iter().map(generate_all).collect()
}

/// Checks that every vertex in the automorphism orbit of a representative
/// yields the representative's equation with the white momenta permuted.
/// Returns one line per disagreement.
pub fn orbit_invariance_defects(word: &GraphWord) -> Result<Vec<String>, SdeError> {
    let g = word.to_graph();
    let auts = g.automorphisms()?;
    let offsets = word.offsets();
    let d = word.white_count();
    if d > FRAME_NAMES.len() {
        return Err(SdeError::FrameTooLarge(d));
    }
    let locate = |b: usize| {
        let comp = offsets.iter().rposition(|&o| o <= b).expect("offset 0");
        (comp, b - offsets[comp])
    };
    let mut out = Vec::new();
    for (comp, local) in inequivalent_beta_choices(word)? {
        let r = offsets[comp] + local;
        let base = generate_sde(word, comp, local)?;
        let mut done = BTreeSet::new();
        for a in &auts {
            let b = a.black[r];
            if !done.insert(b) {
                continue;
            }
            let map: BTreeMap<String, String> =
                (0..d).map(|i| (FRAME_NAMES[i].to_string(), FRAME_NAMES[a.white[i]].to_string())).collect();
            let (bc, bl) = locate(b);
            let eq = generate_sde(word, bc, bl)?;
            let lhs_ok = equal_normalized(&eq.lhs, &base.lhs.rename_free(&map));
            let rhs_ok = equal_normalized(&eq.rhs, &base.rhs.rename_free(&map));
            if !(lhs_ok && rhs_ok) {
                out.push(format!("vertex {} of component {} against vertex {} of component {}", bl + 1, bc + 1, local + 1, comp + 1));
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Y-term table

/// Coefficient templates keyed by word shape: `0`, `m`, `Va`, `Vb`, `m|m`.
#[derive(Clone, Debug)]
pub struct YTermTable {
    entries: BTreeMap<String, String>,
}

pub const YTABLE_SOURCE: &str = include_str!("../data/ytable.txt");

impl YTermTable {
    pub fn builtin() -> Self {
        Self::parse(YTABLE_SOURCE).expect("bundled table parses")
    }

    pub fn parse(src: &str) -> Result<Self, SdeError> {
        let mut entries = BTreeMap::new();
        let mut key: Option<String> = None;
        let mut body = String::new();
        let mut flush = |key: &mut Option<String>, body: &mut String| {
            if let Some(k) = key.take() {
                entries.insert(k, body.trim().to_string());
            }
            body.clear();
        };
        for line in src.lines() {
            let t = line.trim();
            if t.starts_with('#') {
                continue;
            }
            if let Some(k) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                flush(&mut key, &mut body);
                key = Some(k.to_string());
            } else if !t.is_empty() {
                if key.is_none() {
                    return Err(SdeError::Table(format!("text before the first section: {t}")));
                }
                body.push_str(t);
                body.push(' ');
            }
        }
        flush(&mut key, &mut body);
        for k in ["0", "m", "Va", "Vb", "m|m"] {
            if !entries.contains_key(k) {
                return Err(SdeError::Table(format!("missing section [{k}]")));
            }
        }
        Ok(YTermTable { entries })
    }

    /// Template text with colours filled in (0-based colours in, 1-based out).
    fn instantiate(&self, key: &str, a: usize, b: usize, c: usize) -> String {
        self.entries[key]
            .replace("{a}", &(a + 1).to_string())
            .replace("{b}", &(b + 1).to_string())
            .replace("{c}", &(c + 1).to_string())
    }

    /// Expansion of one coefficient `f^(a)_{B; slot}(args)`.
    pub fn expand(&self, color: usize, blocks: &[Block], slot: &Atom, cat: &Catalog) -> Result<Expr, SdeError> {
        if cat.rank() != 3 {
            return Err(SdeError::Rank(cat.rank()));
        }
        let a = color;
        let others: Vec<usize> = (0..3).filter(|&o| o != a).collect();
        let names: Vec<String> = blocks.iter().map(|b| cat.graph_name(&b.graph)).collect();
        let mut args: Vec<MomVec> = Vec::new();
        let text = match names.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
            [] => self.instantiate("0", a, others[0], others[1]),
            ["m"] => {
                args.extend(blocks[0].args.iter().cloned());
                self.instantiate("m", a, others[0], others[1])
            }
            ["m", "m"] => {
                args.extend(blocks.iter().flat_map(|b| b.args.iter().cloned()));
                self.instantiate("m|m", a, others[0], others[1])
            }
            [v] if v.starts_with('V') => {
                let pc: usize = v[1..].parse::<usize>().map_err(|_| SdeError::MissingEntry(v.to_string()))? - 1;
                let entry = cat.get(v).expect("catalog name");
                args.extend(transport_args(&blocks[0], &entry.graph));
                if pc == a {
                    self.instantiate("Va", a, others[0], others[1])
                } else {
                    let third = 3 - a - pc;
                    self.instantiate("Vb", a, pc, third)
                }
            }
            _ => return Err(SdeError::MissingEntry(format!("f^({})_{{{}}}", a + 1, names.join("|")))),
        };
        let template = parse_text(&text, cat)?;
        let used: BTreeSet<String> =
            args.iter().flatten().map(|t| t.name.clone()).chain(std::iter::once(slot.name.clone())).collect();
        let mut template = template;
        for n in template.bound_names() {
            if used.contains(&n) {
                template = template.freshen(&n);
            }
        }
        let vars = ["x", "y"];
        let mut map: BTreeMap<Atom, Atom> = BTreeMap::new();
        for (i, v) in args.iter().enumerate() {
            for (cc, atom) in v.iter().enumerate() {
                map.insert(Atom::new(vars[i], cc), atom.clone());
            }
        }
        map.insert(Atom::new("s", a), slot.clone());
        Ok(substitute_many(&template, &map))
    }
}

/// Simultaneous substitution of free atoms.
fn substitute_many(e: &Expr, map: &BTreeMap<Atom, Atom>) -> Expr {
    let bound = e.bound_names();
    rewrite_atoms(e, &|a: &Atom| if bound.contains(&a.name) { a.clone() } else { map.get(a).cloned().unwrap_or_else(|| a.clone()) })
}

fn rewrite_atoms(e: &Expr, f: &dyn Fn(&Atom) -> Atom) -> Expr {
    let vecs = |v: &MomVec| v.iter().map(f).collect::<MomVec>();
    let blocks = |bs: &[Block]| {
        bs.iter().map(|b| Block { graph: b.graph.clone(), args: b.args.iter().map(vecs).collect() }).collect()
    };
    match e {
        Expr::Scalar { .. } | Expr::Lambda { .. } => e.clone(),
        Expr::Correlator { blocks: bs } => Expr::Correlator { blocks: blocks(bs) },
        Expr::FCoeff { color, blocks: bs, slot } => Expr::FCoeff { color: *color, blocks: blocks(bs), slot: f(slot) },
        Expr::PropInv { at } => Expr::PropInv { at: vecs(at) },
        Expr::PropDiffInv { a, b } => Expr::PropDiffInv { a: f(a), b: f(b) },
        Expr::IndexSum { bound, body } => index_sum(bound.clone(), rewrite_atoms(body, f)),
        Expr::Sum { terms } => sum(terms.iter().map(|t| rewrite_atoms(t, f)).collect()),
        Expr::Product { factors } => product(factors.iter().map(|t| rewrite_atoms(t, f)).collect()),
    }
}

/// Rewrites every coefficient leaf through `f`.
fn rewrite_coeffs(e: &Expr, f: &mut dyn FnMut(usize, &[Block], &Atom) -> Result<Option<Expr>, SdeError>) -> Result<Expr, SdeError> {
    Ok(match e {
        Expr::FCoeff { color, blocks, slot } => f(*color, blocks, slot)?.unwrap_or_else(|| e.clone()),
        Expr::IndexSum { bound, body } => index_sum(bound.clone(), rewrite_coeffs(body, f)?),
        Expr::Sum { terms } => sum(terms.iter().map(|t| rewrite_coeffs(t, f)).collect::<Result<_, _>>()?),
        Expr::Product { factors } => product(factors.iter().map(|t| rewrite_coeffs(t, f)).collect::<Result<_, _>>()?),
        other => other.clone(),
    })
}

/// Replaces every coefficient by its table expansion.
pub fn y_expand(e: &Expr, table: &YTermTable, cat: &Catalog) -> Result<Expr, SdeError> {
    rewrite_coeffs(e, &mut |c, bs, s| table.expand(c, bs, s, cat).map(Some))
}

/// Replaces only the pivotal coefficients `f^(c)_{∅, s_c}` by `Σ_q G₂(s_c, q)`.
pub fn expand_pivotal(e: &Expr, table: &YTermTable, cat: &Catalog) -> Result<Expr, SdeError> {
    rewrite_coeffs(e, &mut |c, bs, s| if bs.is_empty() { table.expand(c, bs, s, cat).map(Some) } else { Ok(None) })
}

// ---------------------------------------------------------------------------
// Boundary enumeration

/// Connected rank-3 classes with `k` white vertices, canonical representatives.
pub fn connected_classes(k: usize) -> Vec<ColoredGraph> {
    use crate::graph::permutations;
    let perms = permutations(k);
    let id: Vec<usize> = (0..k).collect();
    let per_first = |p1: &Vec<usize>| -> Vec<ColoredGraph> {
        perms
            .iter()
            .filter_map(|p2| {
                let g = ColoredGraph::new(3, vec![id.clone(), p1.clone(), p2.clone()]).expect("permutations");
                if g.is_connected() {
                    Some(g.canonical_form().expect("connected").graph)
                } else {
                    None
                }
            })
            .collect()
    };
    #[cfg(feature = "parallel")]
    let found: Vec<ColoredGraph> = {
        use rayon::prelude::*;
        perms.par_iter().flat_map_iter(|p| per_first(p)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let found: Vec<ColoredGraph> = perms.iter().flat_map(per_first).collect();
    let mut by_code: BTreeMap<_, ColoredGraph> = BTreeMap::new();
    for g in found {
        by_code.entry(g.canonical_code()).or_insert(g);
    }
    by_code.into_values().collect()
}

/// All non-empty rank-3 boundary words with at most `max_vertices` vertices,
/// one per isomorphism class; factors sorted by canonical code.
pub fn enumerate_boundaries(rank: usize, max_vertices: usize) -> Result<Vec<GraphWord>, SdeError> {
    if rank != 3 {
        return Err(SdeError::Rank(rank));
    }
    if max_vertices > 8 {
        return Err(SdeError::Bound(max_vertices));
    }
    let n = max_vertices / 2;
    let classes: Vec<ColoredGraph> = (1..=n).flat_map(connected_classes).collect();
    let mut words = Vec::new();
    // multisets as non-decreasing index sequences
    fn extend(
        classes: &[ColoredGraph],
        start: usize,
        budget: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if !current.is_empty() {
            out.push(current.clone());
        }
        for i in start..classes.len() {
            if classes[i].k() <= budget {
                current.push(i);
                extend(classes, i, budget - classes[i].k(), current, out);
                current.pop();
            }
        }
    }
    let mut picks = Vec::new();
    extend(&classes, 0, n, &mut Vec::new(), &mut picks);
    for p in picks {
        let w = GraphWord::new(3, p.iter().map(|&i| classes[i].clone()).collect())?;
        words.push(w.canonicalize().0);
    }
    words.sort_by_key(|w| (w.white_count(), w.degree(), w.code()));
    Ok(words)
}

// ---------------------------------------------------------------------------
// Hand-written equation files

/// An equation written out by hand, with the vertex it belongs to.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub word: GraphWord,
    /// 0-based component and black vertex.
    pub component: usize,
    pub beta: usize,
    pub equation: Equation,
}

/// Reads the fixture format:
///
/// ```text
/// word m|m
/// root 1 1
/// lhs G[m|m](x, y)
/// prefactor -2*lambda/E[x]
/// @each c
/// 1/E(y_{c},x_{c})*(G[V{c}](x, y) - G[V{c}](x/y_{c}, y))
/// @end
/// ```
///
/// Every other line is an rhs term; indented lines continue the previous
/// one. Inside `@each c … @end`, `{c}` runs over the colours, `{o1} < {o2}`
/// are the remaining colours and `{s}` is the colour-`c` entry of the `s` line.
pub fn parse_fixture(src: &str, cat: &Catalog) -> Result<Fixture, SdeError> {
    let bad = |m: String| SdeError::Table(m);
    let mut header: BTreeMap<String, String> = BTreeMap::new();
    let mut terms: Vec<String> = Vec::new();
    let mut each: Option<Vec<String>> = None;
    let push = |list: &mut Vec<String>, line: &str| {
        if line.starts_with(char::is_whitespace) && !list.is_empty() {
            let last = list.last_mut().expect("non-empty");
            last.push(' ');
            last.push_str(line.trim());
        } else {
            list.push(line.trim().to_string());
        }
    };
    for raw in src.lines() {
        // whole-line `#` comments, or trailing ones after ` # `
        let line = if raw.trim_start().starts_with('#') {
            ""
        } else {
            raw.find(" # ").map_or(raw, |i| &raw[..i])
        };
        if line.trim().is_empty() {
            continue;
        }
        let t = line.trim();
        if t == "@each c" {
            each = Some(Vec::new());
            continue;
        }
        if t == "@end" {
            let body = each.take().ok_or_else(|| bad("@end without @each".into()))?;
            for c in 0..cat.rank() {
                let others: Vec<usize> = (0..cat.rank()).filter(|&o| o != c).collect();
                for b in &body {
                    let mut l = b.replace("{c}", &(c + 1).to_string());
                    if let [o1, o2] = others.as_slice() {
                        l = l.replace("{o1}", &(o1 + 1).to_string()).replace("{o2}", &(o2 + 1).to_string());
                    }
                    if l.contains("{s}") {
                        let s = header.get("s").ok_or_else(|| bad("{s} needs an s line".into()))?;
                        let v = parse_text(&format!("G[m]({s})"), cat)?;
                        let atom = match v {
                            Expr::Correlator { blocks } => blocks[0].args[0][c].clone(),
                            _ => unreachable!("parsed a correlator"),
                        };
                        l = l.replace("{s}", &crate::expr::atom_text(&atom));
                    }
                    terms.push(l);
                }
            }
            continue;
        }
        if !line.starts_with(char::is_whitespace) {
            if let Some((k, v)) = t.split_once(' ') {
                if ["word", "root", "lhs", "prefactor", "s"].contains(&k) {
                    header.insert(k.to_string(), v.trim().to_string());
                    continue;
                }
            }
        }
        match each.as_mut() {
            Some(body) => push(body, line),
            None => push(&mut terms, line),
        }
    }
    let get = |k: &str| header.get(k).ok_or_else(|| bad(format!("missing `{k}` line")));
    let word = cat.parse_word(get("word")?)?;
    let root: Vec<usize> = get("root")?
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| bad("root needs two numbers".into())))
        .collect::<Result<_, _>>()?;
    let (component, beta) = match root.as_slice() {
        [c, b] if *c >= 1 && *b >= 1 => (c - 1, b - 1),
        _ => return Err(bad("root needs two 1-based numbers".into())),
    };
    let lhs = parse_text(get("lhs")?, cat)?;
    let pre = parse_text(get("prefactor")?, cat)?;
    let body = terms.iter().map(|t| parse_text(t, cat)).collect::<Result<Vec<_>, _>>()?;
    Ok(Fixture { word, component, beta, equation: Equation { lhs, rhs: product(vec![pre, sum(body)]) } })
}

/// Compares a generated equation with a hand-written one after expanding
/// pivotal coefficients on both sides; returns the unmatched monomials.
pub fn compare_equations(
    generated: &Equation,
    expected: &Equation,
    table: &YTermTable,
    cat: &Catalog,
) -> Result<Vec<String>, SdeError> {
    let prep = |e: &Expr| expand_pivotal(e, table, cat);
    let mut out = Vec::new();
    for (g, e, side) in [(&generated.lhs, &expected.lhs, "lhs"), (&generated.rhs, &expected.rhs, "rhs")] {
        for m in crate::expr::difference(&prep(g)?, &prep(e)?, cat) {
            out.push(format!("{side}: {m}"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{equal_normalized, normalize};

    fn cat() -> Catalog {
        Catalog::new(3)
    }

    fn word(s: &str) -> GraphWord {
        cat().parse_word(s).unwrap()
    }

    fn p(s: &str) -> Expr {
        parse_text(s, &cat()).unwrap()
    }

    #[test]
    fn frames() {
        let f = momentum_frame(&word("m|m")).unwrap();
        assert_eq!(f.blacks, f.whites);
        let f = momentum_frame(&word("V1|m")).unwrap();
        let s: Vec<String> = f.blacks[0].iter().map(crate::expr::atom_text).collect();
        assert_eq!(s, ["x_1", "y_2", "y_3"]);
        assert_eq!(f.blacks[2], vector("z", 3));
    }

    #[test]
    fn beta_choices() {
        assert_eq!(inequivalent_beta_choices(&word("m|V1")).unwrap().len(), 2);
        assert_eq!(inequivalent_beta_choices(&word("m|m")).unwrap().len(), 1);
        assert_eq!(inequivalent_beta_choices(&word("m|m|m")).unwrap().len(), 1);
        assert_eq!(inequivalent_beta_choices(&word("F1_23")).unwrap().len(), 3);
    }

    #[test]
    fn swap_resolution() {
        let ctx = SdeContext::new(&word("m|V1"), 0, 0).unwrap();
        assert!(equal_normalized(&resolve_swap_correlator(&ctx, 0, 1).unwrap(), &p("G[Q1](x, y, z)")));
        assert!(equal_normalized(&resolve_swap_correlator(&ctx, 1, 2).unwrap(), &p("G[F3_21](x, y, z)")));
        assert!(equal_normalized(&resolve_swap_correlator(&ctx, 1, 1).unwrap(), &p("G[F3_21](x, z, y)")));
        let ctx = SdeContext::new(&word("m|m"), 0, 0).unwrap();
        assert!(equal_normalized(&resolve_swap_correlator(&ctx, 0, 1).unwrap(), &p("G[V1](x, y)")));
        assert!(resolve_swap_correlator(&ctx, 0, 0).is_err());
    }

    #[test]
    fn melon_equation_shape() {
        let eq = generate_sde(&word("m"), 0, 0).unwrap();
        let expected = p("-2*lambda/E[x]*(f[1; m; x_1](x) + f[2; m; x_2](x) + f[3; m; x_3](x) \
            - sum[b_1](1/E(x_1,b_1)*(G[m](x) - G[m](x/b_1))) \
            - sum[b_2](1/E(x_2,b_2)*(G[m](x) - G[m](x/b_2))) \
            - sum[b_3](1/E(x_3,b_3)*(G[m](x) - G[m](x/b_3))) \
            + f[1;;x_1]()*G[m](x) + f[2;;x_2]()*G[m](x) + f[3;;x_3]()*G[m](x))");
        assert!(equal_normalized(&eq.rhs, &expected));
    }

    #[test]
    fn orbit_invariance_small() {
        for w in ["m|m", "V1|m", "m|m|m", "V2|V2"] {
            let d = orbit_invariance_defects(&word(w)).unwrap();
            assert!(d.is_empty(), "{w}: {d:?}");
        }
    }

    #[test]
    fn factorization_modes_agree() {
        for w in ["m|m|m", "V1|m|m", "m|V1", "V2|V2|m"] {
            let w = word(w);
            for (c, b) in inequivalent_beta_choices(&w).unwrap() {
                let a = generate_sde_with(&w, c, b, Factorizations::Classes).unwrap();
                let p = generate_sde_with(&w, c, b, Factorizations::Positions).unwrap();
                assert_eq!(normalize(&a.rhs), normalize(&p.rhs));
            }
        }
    }

    #[test]
    fn split_counts() {
        let q = word("m|m");
        assert_eq!(splits(&q, Factorizations::Positions).len(), 4);
        assert_eq!(splits(&q, Factorizations::Classes).len(), 3);
    }

    #[test]
    fn ytable_entries() {
        let t = YTermTable::builtin();
        let c = cat();
        let piv = t.expand(1, &[], &Atom::new("x", 1), &c).unwrap();
        assert!(equal_normalized(&piv, &p("sum[q_1,q_3](G[m]((q_1,x_2,q_3)))")));
        // rotating the arguments of Q_a and K33 is an automorphism
        let v1 = c.get("V1").unwrap().graph.clone();
        let blk = Block { graph: v1, args: vec![vector("x", 3), vector("y", 3)] };
        let e = t.expand(0, std::slice::from_ref(&blk), &Atom::new("z", 0), &c).unwrap();
        let direct = p("G[Q1]((z_1,x_2,x_3), x, y) + G[K33]((z_1,x_2,y_3), x, y) \
            + sum[q_2](G[F2_13](x, y, (z_1,q_2,y_3))) + sum[q_3](G[F3_12](x, y, (z_1,y_2,q_3))) \
            + 1/2*sum[q_2,q_3](G[m|V1]((z_1,q_2,q_3), x, y))");
        assert!(equal_normalized(&e, &direct));
        assert!(t.expand(0, &[blk.clone(), blk], &Atom::new("z", 0), &c).is_err());
    }

    #[test]
    fn ytable_avoids_capture() {
        let t = YTermTable::builtin();
        let c = cat();
        let e = t.expand(0, &[Block { graph: ColoredGraph::melon(3), args: vec![vector("q", 3)] }], &Atom::new("x", 0), &c).unwrap();
        let free = e.free_atoms();
        assert!(free.contains_key(&Atom::new("q", 1)));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(connected_classes(1).len(), 1);
        assert_eq!(connected_classes(2).len(), 3);
        assert_eq!(connected_classes(3).len(), 7);
        let words = enumerate_boundaries(3, 4).unwrap();
        // m, m|m, V1, V2, V3
        assert_eq!(words.len(), 5);
        assert!(enumerate_boundaries(3, 10).is_err());
    }
}
