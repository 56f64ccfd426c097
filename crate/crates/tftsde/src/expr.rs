//! Symbolic expressions for correlators, Y-term coefficients and propagator
//! factors, with a normal form for comparing generated and transcribed
//! equations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::act_block;
use crate::catalog::{split_top, Catalog};
use crate::graph::{invert, ColoredGraph};

pub const EXPR_SCHEMA: &str = "tftsde.expr/1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("cannot substitute bound symbol {0}")]
    BoundTarget(String),
    #[error("substitution changes colour: {0} -> {1}")]
    ColorMismatch(String, String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("bad json: {0}")]
    Json(String),
}

/// One colour component of a momentum, e.g. `x_2` or a bound `b_1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    pub name: String,
    /// 0-based colour.
    pub color: usize,
}

impl Atom {
    pub fn new(name: &str, color: usize) -> Self {
        Atom { name: name.to_string(), color }
    }
}

/// A `D`-vector of atoms; entry `c` always carries colour `c`.
pub type MomVec = Vec<Atom>;

pub fn vector(name: &str, rank: usize) -> MomVec {
    (0..rank).map(|c| Atom::new(name, c)).collect()
}

/// A connected boundary component with the momenta of its white vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block {
    pub graph: ColoredGraph,
    pub args: Vec<MomVec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Expr {
    Scalar { value: (i64, i64) },
    /// λ^power
    Lambda { power: u32 },
    /// G_{B₁|…|Bₙ}(X)
    Correlator { blocks: Vec<Block> },
    /// 𝔣⁽ᶜ⁾_{B, slot}(X); no blocks means the pivotal 𝔣⁽ᶜ⁾_{∅, slot}.
    FCoeff { color: usize, blocks: Vec<Block>, slot: Atom },
    /// 1/E_v
    PropInv { at: MomVec },
    /// 1/E(a_c, b_c)
    PropDiffInv { a: Atom, b: Atom },
    IndexSum { bound: Vec<Atom>, body: Box<Expr> },
    Sum { terms: Vec<Expr> },
    Product { factors: Vec<Expr> },
}

pub fn scalar(q: Rational64) -> Expr {
    Expr::Scalar { value: (*q.numer(), *q.denom()) }
}

pub fn int(n: i64) -> Expr {
    scalar(Rational64::from_integer(n))
}

pub fn sum(terms: Vec<Expr>) -> Expr {
    Expr::Sum { terms }
}

pub fn product(factors: Vec<Expr>) -> Expr {
    Expr::Product { factors }
}

pub fn neg(e: Expr) -> Expr {
    product(vec![int(-1), e])
}

pub fn correlator(blocks: Vec<Block>) -> Expr {
    Expr::Correlator { blocks }
}

pub fn index_sum(bound: Vec<Atom>, body: Expr) -> Expr {
    Expr::IndexSum { bound, body: Box::new(body) }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equation {
    pub lhs: Expr,
    pub rhs: Expr,
}

fn ratio(v: (i64, i64)) -> Rational64 {
    Rational64::new(v.0, v.1)
}

impl Expr {
    /// Applies `f` to every atom, outside-in; `f` sees the set of names bound above.
    fn map_atoms(&self, f: &mut dyn FnMut(&Atom, &BTreeSet<String>) -> Atom, bound: &mut BTreeSet<String>) -> Expr {
        let mv = |v: &MomVec, f: &mut dyn FnMut(&Atom, &BTreeSet<String>) -> Atom, bound: &BTreeSet<String>| {
            v.iter().map(|a| f(a, bound)).collect::<MomVec>()
        };
        let blocks = |bs: &[Block], f: &mut dyn FnMut(&Atom, &BTreeSet<String>) -> Atom, bound: &BTreeSet<String>| {
            bs.iter()
                .map(|b| Block { graph: b.graph.clone(), args: b.args.iter().map(|v| mv(v, f, bound)).collect() })
                .collect::<Vec<_>>()
        };
        match self {
            Expr::Scalar { .. } | Expr::Lambda { .. } => self.clone(),
            Expr::Correlator { blocks: bs } => Expr::Correlator { blocks: blocks(bs, f, bound) },
            Expr::FCoeff { color, blocks: bs, slot } => Expr::FCoeff {
                color: *color,
                blocks: blocks(bs, f, bound),
                slot: f(slot, bound),
            },
            Expr::PropInv { at } => Expr::PropInv { at: mv(at, f, bound) },
            Expr::PropDiffInv { a, b } => Expr::PropDiffInv { a: f(a, bound), b: f(b, bound) },
            Expr::IndexSum { bound: bs, body } => {
                let added: Vec<String> =
                    bs.iter().map(|a| a.name.clone()).filter(|n| !bound.contains(n)).collect();
                bound.extend(added.iter().cloned());
                let new_bound = bs.iter().map(|a| f(a, bound)).collect();
                let body = body.map_atoms(f, bound);
                for n in added {
                    bound.remove(&n);
                }
                Expr::IndexSum { bound: new_bound, body: Box::new(body) }
            }
            Expr::Sum { terms } => Expr::Sum { terms: terms.iter().map(|t| t.map_atoms(f, bound)).collect() },
            Expr::Product { factors } => {
                Expr::Product { factors: factors.iter().map(|t| t.map_atoms(f, bound)).collect() }
            }
        }
    }

    /// Names bound anywhere in the tree.
    pub fn bound_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::IndexSum { bound, .. } = e {
                out.extend(bound.iter().map(|a| a.name.clone()));
            }
        });
        out
    }

    fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::IndexSum { body, .. } => body.visit(f),
            Expr::Sum { terms } => terms.iter().for_each(|t| t.visit(f)),
            Expr::Product { factors } => factors.iter().for_each(|t| t.visit(f)),
            _ => {}
        }
    }

    /// Free atoms with multiplicity.
    pub fn free_atoms(&self) -> BTreeMap<Atom, usize> {
        let mut out = BTreeMap::new();
        self.map_atoms(
            &mut |a, bound| {
                if !bound.contains(&a.name) {
                    *out.entry(a.clone()).or_insert(0) += 1;
                }
                a.clone()
            },
            &mut BTreeSet::new(),
        );
        out
    }

    /// Replaces every free occurrence of `target` by `with`.
    pub fn substitute(&self, target: &Atom, with: &Atom) -> Result<Expr, ExprError> {
        if target.color != with.color {
            return Err(ExprError::ColorMismatch(atom_text(target), atom_text(with)));
        }
        let bound = self.bound_names();
        if bound.contains(&target.name) {
            return Err(ExprError::BoundTarget(atom_text(target)));
        }
        // keep the replacement from being captured
        let base = if bound.contains(&with.name) { self.freshen(&with.name) } else { self.clone() };
        Ok(base.map_atoms(
            &mut |a, bnd| if a == target && !bnd.contains(&a.name) { with.clone() } else { a.clone() },
            &mut BTreeSet::new(),
        ))
    }

    /// Renames bound occurrences of `name` to an unused name.
    pub fn freshen(&self, name: &str) -> Expr {
        let used: BTreeSet<String> = self
            .free_atoms()
            .keys()
            .map(|a| a.name.clone())
            .chain(self.bound_names())
            .collect();
        let fresh = (1..).map(|i| format!("{name}'{i}")).find(|n| !used.contains(n)).expect("fresh name");
        self.map_atoms(
            &mut |a, bnd| {
                if a.name == name && bnd.contains(name) {
                    Atom { name: fresh.clone(), color: a.color }
                } else {
                    a.clone()
                }
            },
            &mut BTreeSet::new(),
        )
    }

    /// Renames free atoms by name (every colour), e.g. to act with a vertex permutation.
    pub fn rename_free(&self, map: &BTreeMap<String, String>) -> Expr {
        self.map_atoms(
            &mut |a, bnd| match map.get(&a.name) {
                Some(n) if !bnd.contains(&a.name) => Atom { name: n.clone(), color: a.color },
                _ => a.clone(),
            },
            &mut BTreeSet::new(),
        )
    }

    /// Number of leaf nodes (scalar, λ, correlators, coefficients, propagators).
    pub fn leaf_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |e| {
            if !matches!(e, Expr::Sum { .. } | Expr::Product { .. } | Expr::IndexSum { .. }) {
                n += 1;
            }
        });
        n
    }
}

// ---------------------------------------------------------------------------
// Normal form

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Factor {
    Lambda(u32),
    PropInv(MomVec),
    PropDiffInv(Atom, Atom),
    Correlator(Vec<Block>),
    FCoeff(usize, Vec<Block>, Atom),
    Sum(Vec<Atom>, Vec<Factor>),
}

#[derive(Clone, Debug)]
struct Mono {
    coef: Rational64,
    factors: Vec<Factor>,
}

fn factor_mentions(f: &Factor, names: &BTreeSet<String>) -> bool {
    let hit = |a: &Atom| names.contains(&a.name);
    let blocks_hit = |bs: &[Block]| bs.iter().any(|b| b.args.iter().flatten().any(hit));
    match f {
        Factor::Lambda(_) => false,
        Factor::PropInv(v) => v.iter().any(hit),
        Factor::PropDiffInv(a, b) => hit(a) || hit(b),
        Factor::Correlator(bs) => blocks_hit(bs),
        Factor::FCoeff(_, bs, s) => blocks_hit(bs) || hit(s),
        Factor::Sum(_, body) => body.iter().any(|g| factor_mentions(g, names)),
    }
}

fn expand(e: &Expr) -> Vec<Mono> {
    match e {
        Expr::Scalar { value } => vec![Mono { coef: ratio(*value), factors: vec![] }],
        Expr::Lambda { power } => vec![Mono { coef: Rational64::one(), factors: vec![Factor::Lambda(*power)] }],
        Expr::Correlator { blocks } => {
            vec![Mono { coef: Rational64::one(), factors: vec![Factor::Correlator(blocks.clone())] }]
        }
        Expr::FCoeff { color, blocks, slot } => vec![Mono {
            coef: Rational64::one(),
            factors: vec![Factor::FCoeff(*color, blocks.clone(), slot.clone())],
        }],
        Expr::PropInv { at } => vec![Mono { coef: Rational64::one(), factors: vec![Factor::PropInv(at.clone())] }],
        Expr::PropDiffInv { a, b } => {
            vec![Mono { coef: Rational64::one(), factors: vec![Factor::PropDiffInv(a.clone(), b.clone())] }]
        }
        Expr::Sum { terms } => terms.iter().flat_map(expand).collect(),
        Expr::Product { factors } => {
            let mut acc = vec![Mono { coef: Rational64::one(), factors: vec![] }];
            for f in factors {
                let ex = expand(f);
                let mut next = Vec::with_capacity(acc.len() * ex.len());
                for a in &acc {
                    for b in &ex {
                        let mut fs = a.factors.clone();
                        fs.extend(b.factors.iter().cloned());
                        next.push(Mono { coef: a.coef * b.coef, factors: fs });
                    }
                }
                acc = next;
            }
            acc
        }
        Expr::IndexSum { bound, body } => {
            let names: BTreeSet<String> = bound.iter().map(|a| a.name.clone()).collect();
            expand(body)
                .into_iter()
                .map(|m| {
                    let (dep, indep): (Vec<Factor>, Vec<Factor>) =
                        m.factors.into_iter().partition(|f| factor_mentions(f, &names));
                    let mut factors = indep;
                    factors.push(Factor::Sum(bound.clone(), dep));
                    Mono { coef: m.coef, factors }
                })
                .collect()
        }
    }
}

/// Gives every bound atom a globally unique name before restructuring.
fn alpha_unique(e: &Expr, counter: &mut usize) -> Expr {
    match e {
        Expr::IndexSum { bound, body } => {
            let mut map = BTreeMap::new();
            for a in bound {
                map.entry(a.name.clone()).or_insert_with(|| {
                    *counter += 1;
                    format!("%{}", counter)
                });
            }
            let body = alpha_unique(body, counter);
            let body = body.map_atoms(
                &mut |a, bnd| match map.get(&a.name) {
                    Some(n) if !bnd.contains(&a.name) => Atom { name: n.clone(), color: a.color },
                    _ => a.clone(),
                },
                &mut BTreeSet::new(),
            );
            let bound = bound.iter().map(|a| Atom { name: map[&a.name].clone(), color: a.color }).collect();
            Expr::IndexSum { bound, body: Box::new(body) }
        }
        Expr::Sum { terms } => Expr::Sum { terms: terms.iter().map(|t| alpha_unique(t, counter)).collect() },
        Expr::Product { factors } => {
            Expr::Product { factors: factors.iter().map(|t| alpha_unique(t, counter)).collect() }
        }
        _ => e.clone(),
    }
}

fn rename_in_factor(f: &Factor, map: &BTreeMap<String, String>) -> Factor {
    let ra = |a: &Atom| match map.get(&a.name) {
        Some(n) => Atom { name: n.clone(), color: a.color },
        None => a.clone(),
    };
    let rb = |bs: &[Block]| {
        bs.iter()
            .map(|b| Block { graph: b.graph.clone(), args: b.args.iter().map(|v| v.iter().map(ra).collect()).collect() })
            .collect::<Vec<_>>()
    };
    match f {
        Factor::Lambda(p) => Factor::Lambda(*p),
        Factor::PropInv(v) => Factor::PropInv(v.iter().map(ra).collect()),
        Factor::PropDiffInv(a, b) => Factor::PropDiffInv(ra(a), ra(b)),
        Factor::Correlator(bs) => Factor::Correlator(rb(bs)),
        Factor::FCoeff(c, bs, s) => Factor::FCoeff(*c, rb(bs), ra(s)),
        Factor::Sum(bound, body) => {
            Factor::Sum(bound.iter().map(ra).collect(), body.iter().map(|g| rename_in_factor(g, map)).collect())
        }
    }
}

/// Renames bound atoms by final nesting depth: `#d`.
fn depth_rename(f: &Factor, depth: usize) -> Factor {
    match f {
        Factor::Sum(bound, body) => {
            let name = format!("#{}", depth + 1);
            let map: BTreeMap<String, String> = bound.iter().map(|a| (a.name.clone(), name.clone())).collect();
            let body: Vec<Factor> = body.iter().map(|g| depth_rename(&rename_in_factor(g, &map), depth + 1)).collect();
            Factor::Sum(bound.iter().map(|a| Atom { name: name.clone(), color: a.color }).collect(), body)
        }
        other => other.clone(),
    }
}

/// Puts each block in canonical labelling; for correlators also picks the
/// least argument list over the automorphism group, then sorts blocks.
fn canonical_blocks(blocks: &[Block], aut_invariant: bool) -> Vec<Block> {
    let mut out: Vec<Block> = blocks
        .iter()
        .map(|b| {
            let canon = b.graph.canonical_form().expect("connected block");
            let inv = invert(&canon.white);
            let mut args: Vec<MomVec> = inv.iter().map(|&w| b.args[w].clone()).collect();
            if aut_invariant {
                let base = args.clone();
                for a in canon.graph.automorphisms().expect("small group") {
                    let cand = act_block(&a, &base);
                    if cand < args {
                        args = cand;
                    }
                }
            }
            Block { graph: canon.graph, args }
        })
        .collect();
    if aut_invariant {
        out.sort_by(|a, b| (a.graph.canonical_code(), &a.args).cmp(&(b.graph.canonical_code(), &b.args)));
    } else {
        // isomorphic blocks of a coefficient keep their relative order
        out.sort_by_key(|b| b.graph.canonical_code());
    }
    out
}

/// Canonicalizes a factor; returns the sign picked up by orienting 1/E(a,b).
fn canonical_factor(f: &Factor) -> (bool, Factor) {
    match f {
        Factor::PropDiffInv(a, b) if a > b => (true, Factor::PropDiffInv(b.clone(), a.clone())),
        Factor::Correlator(bs) => (false, Factor::Correlator(canonical_blocks(bs, true))),
        Factor::FCoeff(c, bs, s) => (false, Factor::FCoeff(*c, canonical_blocks(bs, false), s.clone())),
        Factor::Sum(bound, body) => {
            let mut neg = false;
            let mut fs: Vec<Factor> = body
                .iter()
                .map(|g| {
                    let (n, h) = canonical_factor(g);
                    neg ^= n;
                    h
                })
                .collect();
            fs.sort();
            let mut bound = bound.clone();
            bound.sort();
            (neg, Factor::Sum(bound, fs))
        }
        other => (false, other.clone()),
    }
}

fn merge_lambda(fs: Vec<Factor>) -> Vec<Factor> {
    let mut power = 0;
    let mut out = Vec::with_capacity(fs.len());
    for f in fs {
        match f {
            Factor::Lambda(p) => power += p,
            other => out.push(other),
        }
    }
    if power > 0 {
        out.push(Factor::Lambda(power));
    }
    out
}

fn factor_to_expr(f: &Factor) -> Expr {
    match f {
        Factor::Lambda(p) => Expr::Lambda { power: *p },
        Factor::PropInv(v) => Expr::PropInv { at: v.clone() },
        Factor::PropDiffInv(a, b) => Expr::PropDiffInv { a: a.clone(), b: b.clone() },
        Factor::Correlator(bs) => Expr::Correlator { blocks: bs.clone() },
        Factor::FCoeff(c, bs, s) => Expr::FCoeff { color: *c, blocks: bs.clone(), slot: s.clone() },
        Factor::Sum(bound, body) => index_sum(bound.clone(), product(body.iter().map(factor_to_expr).collect())),
    }
}

fn normal_monomials(e: &Expr) -> Vec<(Vec<Factor>, Rational64)> {
    let e = alpha_unique(e, &mut 0);
    let mut merged: BTreeMap<Vec<Factor>, Rational64> = BTreeMap::new();
    for m in expand(&e) {
        let mut coef = m.coef;
        let mut fs: Vec<Factor> = m
            .factors
            .iter()
            .map(|f| {
                let (n, g) = canonical_factor(&depth_rename(f, 0));
                if n {
                    coef = -coef;
                }
                g
            })
            .collect();
        fs = merge_lambda(fs);
        fs.sort();
        *merged.entry(fs).or_insert_with(Rational64::zero) += coef;
    }
    merged.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Flattened, expanded sum of monomials with canonical bound names,
/// canonical block order and least correlator arguments.
pub fn normalize(e: &Expr) -> Expr {
    let terms = normal_monomials(e)
        .into_iter()
        .map(|(fs, c)| {
            let mut factors = vec![scalar(c)];
            factors.extend(fs.iter().map(factor_to_expr));
            product(factors)
        })
        .collect();
    sum(terms)
}

pub fn equal_normalized(a: &Expr, b: &Expr) -> bool {
    normalize(a) == normalize(b)
}

/// Monomials of `a - b` after normalization, rendered as text.
pub fn difference(a: &Expr, b: &Expr, cat: &Catalog) -> Vec<String> {
    match normalize(&sum(vec![a.clone(), neg(b.clone())])) {
        Expr::Sum { terms } => terms.iter().map(|t| render_text(t, cat)).collect(),
        other => vec![render_text(&other, cat)],
    }
}

// ---------------------------------------------------------------------------
// Rendering

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
    Json,
}

pub fn render(e: &Expr, format: Format, cat: &Catalog) -> String {
    match format {
        Format::Text => render_text(e, cat),
        Format::Latex => render_latex(e, cat),
        Format::Json => serde_json::to_string(&serde_json::json!({ "schema": EXPR_SCHEMA, "expr": e }))
            .expect("serializable"),
    }
}

pub fn from_json(s: &str) -> Result<Expr, ExprError> {
    let v: serde_json::Value = serde_json::from_str(s).map_err(|e| ExprError::Json(e.to_string()))?;
    if v.get("schema").and_then(|s| s.as_str()) != Some(EXPR_SCHEMA) {
        return Err(ExprError::Json(format!("expected schema {EXPR_SCHEMA}")));
    }
    serde_json::from_value(v["expr"].clone()).map_err(|e| ExprError::Json(e.to_string()))
}

pub fn atom_text(a: &Atom) -> String {
    format!("{}_{}", a.name, a.color + 1)
}

fn vec_text(v: &MomVec) -> String {
    if let Some(first) = v.first() {
        if v.iter().all(|a| a.name == first.name) {
            return first.name.clone();
        }
        // one entry replaced: `x/b_2`
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for a in v {
            *counts.entry(a.name.as_str()).or_default() += 1;
        }
        if v.len() > 2 {
            if let Some((&base, _)) = counts.iter().find(|(_, &n)| n == v.len() - 1) {
                let odd = v.iter().find(|a| a.name != base).expect("one differs");
                return format!("{base}/{}", atom_text(odd));
            }
        }
    }
    format!("({})", v.iter().map(atom_text).collect::<Vec<_>>().join(","))
}

/// Arguments of `b` rewritten for the isomorphic labelling `to`, via canonical forms.
pub fn transport_args(b: &Block, to: &ColoredGraph) -> Vec<MomVec> {
    let from = b.graph.canonical_form().expect("connected");
    let to = to.canonical_form().expect("connected");
    let to_inv = invert(&to.white);
    let mut args = vec![Vec::new(); b.args.len()];
    for (w, v) in b.args.iter().enumerate() {
        args[to_inv[from.white[w]]] = v.clone();
    }
    args
}

/// Names a block's graph and transports its arguments into the registered labelling.
fn named_block(b: &Block, cat: &Catalog) -> (String, Vec<MomVec>) {
    let code = b.graph.canonical_code();
    if let Some(entry) = cat.entries().iter().find(|e| e.code == code) {
        (entry.name.clone(), transport_args(b, &entry.graph))
    } else {
        (b.graph.to_string(), b.args.clone())
    }
}

fn blocks_text(bs: &[Block], cat: &Catalog) -> (String, String) {
    let named: Vec<(String, Vec<MomVec>)> = bs.iter().map(|b| named_block(b, cat)).collect();
    let word = named.iter().map(|n| n.0.clone()).collect::<Vec<_>>().join("|");
    let args = named
        .iter()
        .map(|n| n.1.iter().map(vec_text).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("; ");
    (word, args)
}

fn fmt_ratio(q: Rational64) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn render_text(e: &Expr, cat: &Catalog) -> String {
    match e {
        Expr::Scalar { value } => fmt_ratio(ratio(*value)),
        Expr::Lambda { power: 1 } => "lambda".into(),
        Expr::Lambda { power } => format!("lambda^{power}"),
        Expr::Correlator { blocks } => {
            let (w, a) = blocks_text(blocks, cat);
            format!("G[{w}]({a})")
        }
        Expr::FCoeff { color, blocks, slot } => {
            let (w, a) = blocks_text(blocks, cat);
            format!("f[{}; {}; {}]({})", color + 1, w, atom_text(slot), a)
        }
        Expr::PropInv { at } => format!("1/E[{}]", vec_text(at)),
        Expr::PropDiffInv { a, b } => format!("1/E({},{})", atom_text(a), atom_text(b)),
        Expr::IndexSum { bound, body } => format!(
            "sum[{}]({})",
            bound.iter().map(atom_text).collect::<Vec<_>>().join(","),
            render_text(body, cat)
        ),
        Expr::Sum { terms } => {
            if terms.is_empty() {
                return "0".into();
            }
            let mut s = String::from("(");
            for (i, t) in terms.iter().enumerate() {
                if i > 0 {
                    s.push_str(" + ");
                }
                s.push_str(&render_text(t, cat));
            }
            s.push(')');
            s
        }
        Expr::Product { factors } => {
            if factors.is_empty() {
                return "1".into();
            }
            let mut num = Vec::new();
            let mut den = Vec::new();
            for f in factors {
                match f {
                    Expr::PropInv { at } => den.push(format!("E[{}]", vec_text(at))),
                    Expr::PropDiffInv { a, b } => den.push(format!("E({},{})", atom_text(a), atom_text(b))),
                    other => num.push(render_text(other, cat)),
                }
            }
            if num.len() > 1 {
                num.retain(|n| n != "1");
            }
            let mut s = String::from("(");
            s.push_str(&if num.is_empty() { "1".to_string() } else { num.join("*") });
            for d in den {
                let _ = write!(s, "/{d}");
            }
            s.push(')');
            s
        }
    }
}

fn latex_atom(a: &Atom) -> String {
    let name = match a.name.strip_prefix('#') {
        Some(d) => format!("q^{{({d})}}"),
        None => a.name.clone(),
    };
    format!("{}_{{{}}}", name, a.color + 1)
}

fn latex_vec(v: &MomVec) -> String {
    if let Some(first) = v.first() {
        if v.iter().all(|a| a.name == first.name) && !first.name.starts_with('#') {
            return format!("\\mathbf{{{}}}", first.name);
        }
    }
    v.iter().map(latex_atom).collect::<Vec<_>>().join(",")
}

fn latex_word(w: &str) -> String {
    w.split('|')
        .map(|n| {
            if n == "m" {
                "\\mathrm{m}".to_string()
            } else if n == "K33" {
                "K_{3,3}".to_string()
            } else if let Some(rest) = n.strip_prefix('F') {
                let (a, bc) = rest.split_once('_').unwrap_or((rest, ""));
                format!("F_{{{a};{bc}}}")
            } else if n.len() >= 2 && n.chars().skip(1).all(|c| c.is_ascii_digit()) {
                format!("{}_{}", &n[..1], &n[1..])
            } else {
                format!("\\texttt{{{n}}}")
            }
        })
        .collect::<Vec<_>>()
        .join("|")
}

fn latex_blocks(bs: &[Block], cat: &Catalog) -> (String, String, usize) {
    let named: Vec<(String, Vec<MomVec>)> = bs.iter().map(|b| named_block(b, cat)).collect();
    let word = latex_word(&named.iter().map(|n| n.0.clone()).collect::<Vec<_>>().join("|"));
    let k: usize = named.iter().map(|n| n.1.len()).sum();
    let args = named
        .iter()
        .map(|n| n.1.iter().map(latex_vec).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";");
    (word, args, k)
}

pub fn render_latex(e: &Expr, cat: &Catalog) -> String {
    match e {
        Expr::Scalar { value } => {
            let q = ratio(*value);
            if q.is_integer() {
                q.numer().to_string()
            } else {
                format!("{}\\frac{{{}}}{{{}}}", if q.is_negative() { "-" } else { "" }, q.numer().abs(), q.denom())
            }
        }
        Expr::Lambda { power: 1 } => "\\lambda".into(),
        Expr::Lambda { power } => format!("\\lambda^{{{power}}}"),
        Expr::Correlator { blocks } => {
            let (w, a, k) = latex_blocks(blocks, cat);
            format!("G^{{({})}}_{{{}}}({})", 2 * k, w, a)
        }
        Expr::FCoeff { color, blocks, slot } => {
            let (w, a, _) = latex_blocks(blocks, cat);
            let w = if blocks.is_empty() { "\\varnothing".to_string() } else { w };
            format!("\\mathfrak{{f}}^{{({})}}_{{{};{}}}({})", color + 1, w, latex_atom(slot), a)
        }
        Expr::PropInv { at } => format!("\\frac{{1}}{{E_{{{}}}}}", latex_vec(at)),
        Expr::PropDiffInv { a, b } => format!("\\frac{{1}}{{E({},{})}}", latex_atom(a), latex_atom(b)),
        Expr::IndexSum { bound, body } => format!(
            "\\sum_{{{}}}{}",
            bound.iter().map(latex_atom).collect::<Vec<_>>().join(","),
            render_latex(body, cat)
        ),
        Expr::Sum { terms } => {
            if terms.is_empty() {
                return "0".into();
            }
            let parts: Vec<String> = terms.iter().map(|t| render_latex(t, cat)).collect();
            format!("\\Big({}\\Big)", parts.join(" + ").replace("+ -", "- "))
        }
        Expr::Product { factors } => {
            let mut parts: Vec<String> = factors.iter().map(|f| render_latex(f, cat)).collect();
            if parts.len() > 1 {
                parts.retain(|p| p != "1");
            }
            match parts.as_slice() {
                [] => "1".into(),
                [first, rest @ ..] if first == "-1" && !rest.is_empty() => format!("-{}", rest.join(" \\cdot ")),
                _ => parts.join(" \\cdot "),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing the text form

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    cat: &'a Catalog,
}

/// Parses the text syntax produced by [`render_text`].
pub fn parse_text(src: &str, cat: &Catalog) -> Result<Expr, ExprError> {
    let mut p = Parser { src, pos: 0, cat };
    let e = p.expr()?;
    p.ws();
    if p.pos != src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ExprError {
        let tail: String = self.src[self.pos..].chars().take(24).collect();
        ExprError::Parse { pos: self.pos, msg: format!("{msg} near `{tail}`") }
    }

    fn ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ExprError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{s}`")))
        }
    }

    fn ident(&mut self) -> Result<String, ExprError> {
        self.ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            let ok = c.is_ascii_alphabetic()
                || c == '#'
                || c == '\''
                || c == '%'
                || (self.pos > start && c.is_ascii_digit() && !self.src[start..self.pos].is_empty() && {
                    // digits belong to the name only after a non-letter marker
                    let prev = &self.src[start..self.pos];
                    prev.starts_with('#') || prev.starts_with('%') || prev.ends_with('\'')
                });
            if ok {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.err("expected a name"));
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn number(&mut self) -> Result<i64, ExprError> {
        self.ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.src[start..self.pos].parse().map_err(|_| self.err("expected a number"))
    }

    fn atom(&mut self) -> Result<Atom, ExprError> {
        let name = self.ident()?;
        if !self.eat("_") {
            return Err(self.err("expected `_colour`"));
        }
        let c = self.number()?;
        if c == 0 || c as usize > self.cat.rank() {
            return Err(self.err("colour out of range"));
        }
        Ok(Atom { name, color: c as usize - 1 })
    }

    fn mom_vec(&mut self) -> Result<MomVec, ExprError> {
        let d = self.cat.rank();
        if self.eat("(") {
            let mut slots: Vec<Option<Atom>> = vec![None; d];
            loop {
                let a = self.atom()?;
                let c = a.color;
                if slots[c].replace(a).is_some() {
                    return Err(self.err("colour repeated in vector"));
                }
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
            return slots.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| self.err("vector misses a colour"));
        }
        let name = self.ident()?;
        let mut v = vector(&name, d);
        while self.eat("/") {
            let a = self.atom()?;
            let c = a.color;
            v[c] = a;
        }
        Ok(v)
    }

    fn word_blocks(&mut self) -> Result<Vec<ColoredGraph>, ExprError> {
        self.ws();
        let start = self.pos;
        let mut depth = 0;
        while let Some(c) = self.peek() {
            match c {
                '<' => depth += 1,
                '>' => depth -= 1,
                ']' | ';' if depth == 0 => break,
                _ => {}
            }
            self.pos += c.len_utf8();
        }
        let text = self.src[start..self.pos].trim();
        if text.is_empty() || text == "0" {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for part in split_top(text, '|') {
            let g = self.cat.parse_graph(part).map_err(|e| self.err(&e.to_string()))?;
            if !g.is_connected() {
                return Err(self.err("blocks must be connected"));
            }
            out.push(g);
        }
        Ok(out)
    }

    fn args_into(&mut self, graphs: Vec<ColoredGraph>) -> Result<Vec<Block>, ExprError> {
        self.expect("(")?;
        let mut vecs = Vec::new();
        if !self.eat(")") {
            loop {
                vecs.push(self.mom_vec()?);
                if self.eat(")") {
                    break;
                }
                if !self.eat(",") {
                    self.expect(";")?;
                }
            }
        }
        let need: usize = graphs.iter().map(|g| g.k()).sum();
        if vecs.len() != need {
            return Err(self.err(&format!("expected {need} momenta, got {}", vecs.len())));
        }
        let mut it = vecs.into_iter();
        Ok(graphs
            .into_iter()
            .map(|g| {
                let args = (0..g.k()).map(|_| it.next().expect("counted")).collect();
                Block { graph: g, args }
            })
            .collect())
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat("+") {
                terms.push(self.term()?);
            } else if self.eat("-") {
                terms.push(neg(self.term()?));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().expect("one") } else { sum(terms) })
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut factors = vec![self.factor()?];
        loop {
            if self.eat("*") {
                factors.push(self.factor()?);
            } else if self.eat("/") {
                factors.push(self.denominator()?);
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 { factors.pop().expect("one") } else { product(factors) })
    }

    fn denominator(&mut self) -> Result<Expr, ExprError> {
        self.ws();
        if self.eat("E[") {
            let v = self.mom_vec()?;
            self.expect("]")?;
            return Ok(Expr::PropInv { at: v });
        }
        if self.eat("E(") {
            let a = self.atom()?;
            self.expect(",")?;
            let b = self.atom()?;
            self.expect(")")?;
            return Ok(Expr::PropDiffInv { a, b });
        }
        let n = self.number()?;
        if n == 0 {
            return Err(self.err("division by zero"));
        }
        Ok(scalar(Rational64::new(1, n)))
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        self.ws();
        if self.eat("-") {
            return Ok(neg(self.factor()?));
        }
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return Ok(int(self.number()?));
        }
        if self.eat("lambda") {
            let power = if self.eat("^") { self.number()? as u32 } else { 1 };
            return Ok(Expr::Lambda { power });
        }
        if self.eat("G[") {
            let graphs = self.word_blocks()?;
            self.expect("]")?;
            return Ok(Expr::Correlator { blocks: self.args_into(graphs)? });
        }
        if self.eat("f[") {
            let c = self.number()?;
            if c == 0 || c as usize > self.cat.rank() {
                return Err(self.err("colour out of range"));
            }
            self.expect(";")?;
            let graphs = self.word_blocks()?;
            self.expect(";")?;
            let slot = self.atom()?;
            self.expect("]")?;
            return Ok(Expr::FCoeff { color: c as usize - 1, blocks: self.args_into(graphs)?, slot });
        }
        if self.eat("sum[") {
            let mut bound = vec![self.atom()?];
            while self.eat(",") {
                bound.push(self.atom()?);
            }
            self.expect("]")?;
            self.expect("(")?;
            let body = self.expr()?;
            self.expect(")")?;
            return Ok(index_sum(bound, body));
        }
        Err(self.err("unexpected token"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> Catalog {
        Catalog::new(3)
    }

    fn p(s: &str) -> Expr {
        parse_text(s, &cat()).unwrap()
    }

    #[test]
    fn aut_orbit_arguments_agree() {
        assert!(equal_normalized(&p("G[m|V1](x; z, y)"), &p("G[m|V1](x; y, z)")));
        assert!(equal_normalized(&p("G[V1|m](y, z; x)"), &p("G[m|V1](x; y, z)")));
        // Y-term coefficients are not symmetrized
        assert!(!equal_normalized(&p("f[1; m|V1; x_1](x; z, y)"), &p("f[1; m|V1; x_1](x; y, z)")));
        assert!(equal_normalized(&p("f[1; V1|m; x_1](y, z; x)"), &p("f[1; m|V1; x_1](x; y, z)")));
        assert!(!equal_normalized(&p("f[1; m|m; x_1](y, z)"), &p("f[1; m|m; x_1](z, y)")));
        assert!(equal_normalized(&p("G[m|m](y, z)"), &p("G[m|m](z, y)")));
    }

    #[test]
    fn orbit_minimum_from_every_start() {
        let forms = ["G[Q1](x/z_1, y, z)", "G[Q1](y, z, x/z_1)", "G[Q1](z, x/z_1, y)"];
        let n: Vec<Expr> = forms.iter().map(|f| normalize(&p(f))).collect();
        assert!(n.iter().all(|e| *e == n[0]));
        assert_ne!(normalize(&p("G[Q1](y, x/z_1, z)")), n[0]);
    }

    #[test]
    fn sums_flatten_and_commute() {
        assert!(equal_normalized(&p("G[m](x) + (G[m](y) + G[m](z))"), &p("(G[m](z) + G[m](x)) + G[m](y)")));
        assert!(equal_normalized(&p("2*G[m](x) - G[m](x)"), &p("G[m](x)")));
        assert_eq!(normalize(&p("G[m](x) - G[m](x)")), sum(vec![]));
    }

    #[test]
    fn difference_orientation() {
        assert!(equal_normalized(&p("1/E(y_1,x_1)"), &p("-1/E(x_1,y_1)")));
    }

    #[test]
    fn bound_renaming() {
        let a = p("sum[b_1](1/E(x_1,b_1)*G[m](x/b_1))");
        let b = p("sum[c_1](1/E(x_1,c_1)*G[m](x/c_1))");
        assert!(equal_normalized(&a, &b));
        let c = p("sum[c_1](1/E(x_1,c_1)*G[m](x/c_1))*G[m](y)");
        let d = p("sum[c_1](1/E(x_1,c_1)*G[m](x/c_1)*G[m](y))");
        assert!(equal_normalized(&c, &d));
    }

    #[test]
    fn substitution() {
        let e = p("G[m|m](x, y)");
        let s = e.substitute(&Atom::new("x", 0), &Atom::new("b", 0)).unwrap();
        assert!(equal_normalized(&s, &p("G[m|m]((b_1,x_2,x_3), y)")));
        assert_eq!(e.substitute(&Atom::new("w", 0), &Atom::new("b", 0)).unwrap(), e);
        let t = p("G[m|m](x,y) - G[m|m](x/b_2, y)");
        assert!(t.substitute(&Atom::new("x", 1), &Atom::new("b", 1)).is_ok());
        let bound = p("sum[b_2](G[m](x/b_2))");
        assert!(matches!(bound.substitute(&Atom::new("b", 1), &Atom::new("y", 1)), Err(ExprError::BoundTarget(_))));
        // replacement named like a bound symbol is not captured
        let cap = p("sum[b_2](G[m|m](x/b_2, y))");
        let s2 = cap.substitute(&Atom::new("y", 1), &Atom::new("b", 1)).unwrap();
        assert_eq!(s2.free_atoms().get(&Atom::new("b", 1)), Some(&1));
    }

    #[test]
    fn render_forms() {
        let e = product(vec![int(-2), Expr::Lambda { power: 1 }, Expr::PropInv { at: vector("x", 3) }]);
        assert_eq!(render_text(&e, &cat()), "(-2*lambda/E[x])");
        let s = p("sum[b_1](1/E(x_1,b_1)*G[m](x/b_1))");
        assert_eq!(render_text(&s, &cat()), "sum[b_1]((G[m](x/b_1)/E(x_1,b_1)))");
        let back = from_json(&render(&s, Format::Json, &cat())).unwrap();
        assert_eq!(back, s);
        assert!(render_latex(&s, &cat()).contains("\\sum_{b_{1}}"));
    }

    #[test]
    fn text_round_trip_of_normal_form() {
        let e = p("2/3*G[K33](x, y, z)*f[2; V1; y_2](x, y) + sum[q_2,q_3](G[m]((x_1,q_2,q_3)))");
        let n = normalize(&e);
        let again = parse_text(&render_text(&n, &cat()), &cat()).unwrap();
        assert_eq!(normalize(&again), n);
    }

    #[test]
    fn normalize_idempotent() {
        let e = p("G[Q1](x,y,z) + 1/E(z_1,x_1)*(G[Q1](x,y,z) - G[Q1](x/z_1,y,z))");
        assert_eq!(normalize(&normalize(&e)), normalize(&e));
    }
}
