//! Multivariable graph calculus over table-backed coefficient functions.
//!
//! A coefficient for the word `c₁…cₙ` takes one `D`-vector per white vertex,
//! listed factor by factor. Values live in any [`Field`]; exact tests use
//! [`num_rational::Rational64`].

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::Rational64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::{invert, permutations, AutElement, CanonicalCode, ColoredGraph, GraphError, Perm};

/// One white-vertex momentum: a `D`-vector of integers.
pub type Mom = Vec<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("factor index {index} out of range for a word of degree {degree}")]
    IndexOutOfRange { index: usize, degree: usize },
    #[error("word factors must be connected and non-empty")]
    FactorNotConnected,
    #[error("words are not equal up to reordering")]
    NotReordering,
    #[error("expected {expected} momenta, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("momenta are not colour-wise distinct")]
    Diagonal,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_ratio(num: i64, den: i64) -> Self;
}

impl Field for Rational64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational64::new(num, den)
    }
}

impl Field for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

/// True when, for every colour, the momenta carry pairwise distinct entries.
pub fn off_diagonal(x: &[Mom]) -> bool {
    let d = x.first().map_or(0, |v| v.len());
    (0..d).all(|c| {
        let mut col: Vec<i64> = x.iter().map(|v| v[c]).collect();
        col.sort_unstable();
        col.windows(2).all(|w| w[0] != w[1])
    })
}

fn mix(mut h: u64) -> u64 {
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

#[derive(Clone)]
pub struct Coeff<T> {
    arity: usize,
    f: Arc<dyn Fn(&[Mom]) -> T + Send + Sync>,
}

impl<T: Debug> Debug for Coeff<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Coeff(arity {})", self.arity)
    }
}

impl<T: Field> Coeff<T> {
    pub fn new(arity: usize, f: impl Fn(&[Mom]) -> T + Send + Sync + 'static) -> Self {
        Coeff { arity, f: Arc::new(f) }
    }

    pub fn constant(arity: usize, v: T) -> Self {
        Coeff::new(arity, move |_| v.clone())
    }

    /// A pseudo-random table with integer values in `-range..=range`.
    pub fn random(arity: usize, seed: u64, range: i64) -> Self {
        Coeff::new(arity, move |x| {
            debug_assert!(off_diagonal(x), "table probed on a coloured diagonal");
            let mut h = mix(seed ^ 0x9e37_79b9_7f4a_7c15);
            for v in x {
                for &e in v {
                    h = mix(h ^ (e as u64).wrapping_add(0x632b_e59b_d9b4_e019));
                }
                h = mix(h ^ 0xff);
            }
            let span = (2 * range + 1) as u64;
            T::from_ratio((h % span) as i64 - range, 1)
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, x: &[Mom]) -> T {
        assert_eq!(x.len(), self.arity, "coefficient arity");
        (self.f)(x)
    }

    /// `new(x)[j] = self(x)` with `self`'s argument `i` taken from `x[src[i]]`.
    pub fn pull_back(&self, arity: usize, src: Perm) -> Self {
        let inner = self.clone();
        Coeff::new(arity, move |x| {
            let y: Vec<Mom> = src.iter().map(|&i| x[i].clone()).collect();
            inner.eval(&y)
        })
    }

    pub fn scale(&self, s: T) -> Self {
        let inner = self.clone();
        Coeff::new(self.arity, move |x| s.clone() * inner.eval(x))
    }

    pub fn plus(&self, other: &Coeff<T>) -> Self {
        assert_eq!(self.arity, other.arity);
        let (a, b) = (self.clone(), other.clone());
        Coeff::new(self.arity, move |x| a.eval(x) + b.eval(x))
    }

    /// Tensor product: the first `self.arity` momenta feed `self`.
    pub fn times(&self, other: &Coeff<T>) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let n = a.arity;
        Coeff::new(a.arity + b.arity, move |x| a.eval(&x[..n]) * b.eval(&x[n..]))
    }

    /// Fixes the momenta at positions `at` (ascending order of `at` is not required).
    pub fn insert(&self, at: Vec<usize>, fixed: Vec<Mom>) -> Self {
        let inner = self.clone();
        let n = self.arity;
        Coeff::new(n - at.len(), move |x| {
            let mut full: Vec<Option<Mom>> = vec![None; n];
            for (p, v) in at.iter().zip(&fixed) {
                full[*p] = Some(v.clone());
            }
            let mut rest = x.iter();
            let y: Vec<Mom> = full
                .into_iter()
                .map(|o| o.unwrap_or_else(|| rest.next().expect("arity").clone()))
                .collect();
            inner.eval(&y)
        })
    }
}

/// Element of the free monoid on connected graphs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphWord {
    rank: usize,
    factors: Vec<ColoredGraph>,
}

impl GraphWord {
    pub fn new(rank: usize, factors: Vec<ColoredGraph>) -> Result<Self, AlgebraError> {
        for f in &factors {
            if f.rank() != rank {
                return Err(GraphError::RankDiffers(rank, f.rank()).into());
            }
            if f.is_empty() || !f.is_connected() {
                return Err(AlgebraError::FactorNotConnected);
            }
        }
        Ok(GraphWord { rank, factors })
    }

    pub fn unit(rank: usize) -> Self {
        GraphWord { rank, factors: Vec::new() }
    }

    /// Factors in the order of [`ColoredGraph::components`].
    pub fn from_graph(g: &ColoredGraph) -> Self {
        GraphWord { rank: g.rank(), factors: g.components().into_iter().map(|c| c.graph).collect() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn factors(&self) -> &[ColoredGraph] {
        &self.factors
    }

    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    /// Total number of white vertices.
    pub fn white_count(&self) -> usize {
        self.factors.iter().map(|f| f.k()).sum()
    }

    /// Offset of each factor's first white vertex.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.factors
            .iter()
            .map(|f| {
                let o = acc;
                acc += f.k();
                o
            })
            .collect()
    }

    pub fn to_graph(&self) -> ColoredGraph {
        self.factors
            .iter()
            .try_fold(ColoredGraph::empty(self.rank), |acc, f| acc.disjoint_union(f))
            .expect("ranks agree")
    }

    pub fn code(&self) -> CanonicalCode {
        self.to_graph().canonical_code()
    }

    /// g/cᵢ (0-based `i`).
    pub fn delete(&self, i: usize) -> Result<GraphWord, AlgebraError> {
        if i >= self.factors.len() {
            return Err(AlgebraError::IndexOutOfRange { index: i + 1, degree: self.degree() });
        }
        let mut factors = self.factors.clone();
        factors.remove(i);
        Ok(GraphWord { rank: self.rank, factors })
    }

    pub fn concat(&self, other: &GraphWord) -> GraphWord {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        GraphWord { rank: self.rank, factors }
    }

    pub fn factor_codes(&self) -> Vec<CanonicalCode> {
        self.factors.iter().map(|f| f.canonical_code()).collect()
    }

    /// Equality in the free commutative monoid.
    pub fn commutes_with(&self, other: &GraphWord) -> bool {
        let mut a = self.factor_codes();
        let mut b = other.factor_codes();
        a.sort();
        b.sort();
        a == b
    }

    /// Factors sorted by canonical code, each in canonical labelling, and
    /// the momentum routing: argument `j` of the result is argument
    /// `route[j]` of `self`.
    pub fn canonicalize(&self) -> (GraphWord, Perm) {
        let canon: Vec<_> =
            self.factors.iter().map(|f| f.canonical_form().expect("connected factor")).collect();
        let codes = self.factor_codes();
        let mut order: Vec<usize> = (0..self.degree()).collect();
        order.sort_by(|&a, &b| codes[a].cmp(&codes[b]));
        let offsets = self.offsets();
        let mut route = Vec::with_capacity(self.white_count());
        let mut factors = Vec::with_capacity(self.degree());
        for &i in &order {
            let inv = invert(&canon[i].white);
            route.extend(inv.iter().map(|&w| offsets[i] + w));
            factors.push(canon[i].graph.clone());
        }
        (GraphWord { rank: self.rank, factors }, route)
    }
}

/// White-vertex bijection taking factor `from` onto the isomorphic factor `to`.
pub fn transport(from: &ColoredGraph, to: &ColoredGraph) -> Perm {
    let a = from.canonical_form().expect("connected");
    let b = to.canonical_form().expect("connected");
    debug_assert_eq!(a.graph, b.graph);
    let bi = invert(&b.white);
    a.white.iter().map(|&c| bi[c]).collect()
}

/// An element of G(g) = ∏ G(hᵢ) ≀ 𝔖(αᵢ), stored per word position.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WordGroupElement {
    /// Automorphism σ_A of the factor at position A.
    pub sigma: Vec<AutElement>,
    /// Block permutation μ, mapping positions to positions of isomorphic factors.
    pub mu: Perm,
}

/// Momentum block action of an automorphism: `(σ·Y)_w = Y_{σ⁻¹(w)}`.
pub fn act_block<T: Clone>(sigma: &AutElement, y: &[T]) -> Vec<T> {
    let inv = invert(&sigma.white);
    inv.iter().map(|&v| y[v].clone()).collect()
}

impl WordGroupElement {
    pub fn identity(word: &GraphWord) -> Self {
        WordGroupElement {
            sigma: word.factors.iter().map(|f| AutElement::identity(f.k())).collect(),
            mu: (0..word.degree()).collect(),
        }
    }

    /// `route[j]` is the argument of `X` placed at slot `j` of `Ω⋆X`, where
    /// `(Ω⋆X)_A = σ_A·φ(X_{μ(A)})` and φ transports between isomorphic factors.
    pub fn routing(&self, word: &GraphWord) -> Perm {
        let offsets = word.offsets();
        let mut route = vec![0; word.white_count()];
        for a in 0..word.degree() {
            let src = self.mu[a];
            let phi = transport(&word.factors[src], &word.factors[a]);
            let phi_inv = invert(&phi);
            let sig_inv = invert(&self.sigma[a].white);
            for w in 0..word.factors[a].k() {
                route[offsets[a] + w] = offsets[src] + phi_inv[sig_inv[w]];
            }
        }
        route
    }

    pub fn star<T: Clone>(&self, word: &GraphWord, x: &[T]) -> Vec<T> {
        self.routing(word).iter().map(|&i| x[i].clone()).collect()
    }

    /// `(Ξ∘Ω) = (τ·ψ_ν(σ); μ∘ν)` for `Ξ = (τ; ν)` = `self`, `Ω = (σ; μ)` = `other`,
    /// so that `(Ξ∘Ω)⋆ = Ξ⋆Ω⋆`.
    pub fn compose(&self, other: &WordGroupElement, word: &GraphWord) -> WordGroupElement {
        let n = word.degree();
        let mut sigma = Vec::with_capacity(n);
        for a in 0..n {
            let na = self.mu[a];
            // conjugate σ_{ν(A)} into the labelling of position A
            let phi = transport(&word.factors[na], &word.factors[a]);
            let phi_inv = invert(&phi);
            let s = &other.sigma[na];
            let black_phi = black_transport(&word.factors[na], &word.factors[a]);
            let black_inv = invert(&black_phi);
            let conj = AutElement {
                white: (0..phi.len()).map(|w| phi[s.white[phi_inv[w]]]).collect(),
                black: (0..black_phi.len()).map(|b| black_phi[s.black[black_inv[b]]]).collect(),
            };
            sigma.push(self.sigma[a].compose(&conj));
        }
        let mu = (0..n).map(|a| other.mu[self.mu[a]]).collect();
        WordGroupElement { sigma, mu }
    }

    pub fn inverse(&self, word: &GraphWord) -> WordGroupElement {
        word_group(word)
            .into_iter()
            .find(|e| e.compose(self, word) == WordGroupElement::identity(word))
            .expect("group element has an inverse")
    }
}

fn black_transport(from: &ColoredGraph, to: &ColoredGraph) -> Perm {
    let a = from.canonical_form().expect("connected");
    let b = to.canonical_form().expect("connected");
    let bi = invert(&b.black);
    a.black.iter().map(|&c| bi[c]).collect()
}

/// Positions of the word grouped by isomorphism class, in order of first occurrence.
pub fn position_classes(word: &GraphWord) -> Vec<Vec<usize>> {
    let codes = word.factor_codes();
    let mut classes: Vec<(CanonicalCode, Vec<usize>)> = Vec::new();
    for (i, c) in codes.into_iter().enumerate() {
        match classes.iter_mut().find(|e| e.0 == c) {
            Some(e) => e.1.push(i),
            None => classes.push((c, vec![i])),
        }
    }
    classes.into_iter().map(|e| e.1).collect()
}

/// |G(g)| = ∏ |G(hᵢ)|^αᵢ · αᵢ!.
pub fn word_group_order(word: &GraphWord) -> u128 {
    word.to_graph().automorphism_count()
}

/// Every element of G(g), each exactly once.
pub fn word_group(word: &GraphWord) -> Vec<WordGroupElement> {
    let n = word.degree();
    let auts: Vec<Vec<AutElement>> =
        word.factors.iter().map(|f| f.automorphisms().expect("small group")).collect();
    let mut mus: Vec<Perm> = vec![vec![0; n]];
    for class in position_classes(word) {
        let mut next = Vec::new();
        for partial in &mus {
            for p in permutations(class.len()) {
                let mut m = partial.clone();
                for (i, &pos) in class.iter().enumerate() {
                    m[pos] = class[p[i]];
                }
                next.push(m);
            }
        }
        mus = next;
    }
    let mut out = Vec::new();
    for mu in mus {
        let mut idx = vec![0usize; n];
        loop {
            out.push(WordGroupElement {
                sigma: (0..n).map(|a| auts[a][idx[a]].clone()).collect(),
                mu: mu.clone(),
            });
            let mut pos = 0;
            while pos < n {
                idx[pos] += 1;
                if idx[pos] < auts[pos].len() {
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
    out
}

/// `(Ω·f)(X) = f(Ω⁻¹⋆X)`.
pub fn act<T: Field>(omega: &WordGroupElement, word: &GraphWord, f: &Coeff<T>) -> Coeff<T> {
    f.pull_back(f.arity(), invert(&omega.routing(word)))
}

/// `(Ω⁻¹·f)(X) = f(Ω⋆X)`, the form written out factor by factor.
pub fn act_inverse<T: Field>(omega: &WordGroupElement, word: &GraphWord, f: &Coeff<T>) -> Coeff<T> {
    f.pull_back(f.arity(), omega.routing(word))
}

/// Σ_{Ω∈G(g)} Ω·f.
pub fn orbit_sum_coeff<T: Field>(word: &GraphWord, f: &Coeff<T>) -> Coeff<T> {
    let routes: Vec<Perm> = word_group(word).iter().map(|o| o.routing(word)).collect();
    let inner = f.clone();
    Coeff::new(f.arity(), move |x| {
        routes.iter().fold(T::zero(), |acc, r| {
            let y: Vec<Mom> = r.iter().map(|&i| x[i].clone()).collect();
            acc + inner.eval(&y)
        })
    })
}

/// Σ_{g∈group} f(act(g, x)) for an arbitrary finite group action.
pub fn orbit_sum<G, X, T>(group: &[G], act: impl Fn(&G, &X) -> X, f: impl Fn(&X) -> T, x: &X) -> T
where
    T: Zero + Add<Output = T>,
{
    group.iter().fold(T::zero(), |acc, g| acc + f(&act(g, x)))
}

/// ⟨v⟩_to: re-expresses `v` (a coefficient on `from`) on the reordered word `to`.
pub fn reorder_coeff<T: Field>(
    v: &Coeff<T>,
    from: &GraphWord,
    to: &GraphWord,
) -> Result<Coeff<T>, AlgebraError> {
    if !from.commutes_with(to) {
        return Err(AlgebraError::NotReordering);
    }
    let fc = from.factor_codes();
    let tc = to.factor_codes();
    let mut used = vec![false; from.degree()];
    // sigma[i]: position in `from` of the factor matched with to[i]
    let mut sigma = vec![0; to.degree()];
    for (i, c) in tc.iter().enumerate() {
        let j = (0..from.degree()).find(|&j| !used[j] && &fc[j] == c).expect("multisets agree");
        used[j] = true;
        sigma[i] = j;
    }
    let fo = from.offsets();
    let to_off = to.offsets();
    let mut src = vec![0; from.white_count()];
    for (i, &j) in sigma.iter().enumerate() {
        let phi = transport(&from.factors[j], &to.factors[i]);
        for (w, &pw) in phi.iter().enumerate() {
            src[fo[j] + w] = to_off[i] + pw;
        }
    }
    Ok(v.pull_back(to.white_count(), src))
}

#[derive(Clone, Debug)]
pub struct Term<T> {
    pub coeff: Coeff<T>,
    pub word: GraphWord,
}

/// Finite formal sum Σ u_g g, held modulo reordering.
#[derive(Clone, Debug)]
pub struct Functional<T> {
    rank: usize,
    terms: Vec<Term<T>>,
}

impl<T: Field> Functional<T> {
    pub fn zero(rank: usize) -> Self {
        Functional { rank, terms: Vec::new() }
    }

    pub fn from_terms(rank: usize, terms: Vec<(Coeff<T>, GraphWord)>) -> Self {
        let terms = terms
            .into_iter()
            .map(|(coeff, word)| {
                assert_eq!(coeff.arity(), word.white_count(), "coefficient arity");
                Term { coeff, word }
            })
            .collect();
        Functional { rank, terms }.normalized()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> &[Term<T>] {
        &self.terms
    }

    /// Canonical representative: words sorted and canonically labelled,
    /// equal words merged.
    pub fn normalized(&self) -> Self {
        let mut merged: BTreeMap<GraphWord, Coeff<T>> = BTreeMap::new();
        for t in &self.terms {
            let (w, route) = t.word.canonicalize();
            let c = t.coeff.pull_back(w.white_count(), invert(&route));
            merged
                .entry(w)
                .and_modify(|e| *e = e.plus(&c))
                .or_insert(c);
        }
        Functional {
            rank: self.rank,
            terms: merged.into_iter().map(|(word, coeff)| Term { coeff, word }).collect(),
        }
    }

    /// Coefficient of the class of `word`, expressed in `word`'s own order.
    pub fn coefficient(&self, word: &GraphWord) -> Option<Coeff<T>> {
        let (canon, _) = word.canonicalize();
        self.terms.iter().find(|t| t.word == canon).map(|t| {
            reorder_coeff(&t.coeff, &t.word, word).expect("same class")
        })
    }

    pub fn add(&self, other: &Functional<T>) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Functional { rank: self.rank, terms }.normalized()
    }

    /// Ordered convolution v_g = Σ_{g₁g₂ ᶜ∼ g} ⟨u_{g₁} t_{g₂}⟩_g.
    pub fn product(&self, other: &Functional<T>) -> Self {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                terms.push(Term { coeff: a.coeff.times(&b.coeff), word: a.word.concat(&b.word) });
            }
        }
        Functional { rank: self.rank, terms }.normalized()
    }

    /// δU/δh(X): Σ_g Σ_{r∈I(g,h)} Σ_{σ∈G(h)} ι^r_{σ(X)} u_g · g/h⁽ʳ⁾.
    pub fn functional_derivative(&self, h: &ColoredGraph, x: &[Mom]) -> Result<Self, AlgebraError> {
        if h.is_empty() || !h.is_connected() {
            return Err(AlgebraError::FactorNotConnected);
        }
        if x.len() != h.k() {
            return Err(AlgebraError::Shape { expected: h.k(), got: x.len() });
        }
        let code = h.canonical_code();
        let auts = h.automorphisms()?;
        let mut terms = Vec::new();
        for t in &self.terms {
            let offsets = t.word.offsets();
            for (r, f) in t.word.factors.iter().enumerate() {
                if f.canonical_code() != code {
                    continue;
                }
                let phi = transport(h, f);
                let at: Vec<usize> = (0..f.k()).map(|w| offsets[r] + w).collect();
                for s in &auts {
                    let sx = act_block(s, x);
                    let mut fixed = vec![Vec::new(); f.k()];
                    for (w, v) in sx.into_iter().enumerate() {
                        fixed[phi[w]] = v;
                    }
                    terms.push(Term {
                        coeff: t.coeff.insert(at.clone(), fixed),
                        word: t.word.delete(r)?,
                    });
                }
            }
        }
        Ok(Functional { rank: self.rank, terms }.normalized())
    }

    /// δU/δ∅ = u_∅.
    pub fn unit_coefficient(&self) -> T {
        self.terms
            .iter()
            .filter(|t| t.word.is_unit())
            .fold(T::zero(), |acc, t| acc + t.coeff.eval(&[]))
    }

    /// ∂U/∂h at `x` (momenta of `h`, factor by factor).
    pub fn graph_derivative(&self, h: &GraphWord, x: &[Mom]) -> Result<T, AlgebraError> {
        if x.len() != h.white_count() {
            return Err(AlgebraError::Shape { expected: h.white_count(), got: x.len() });
        }
        let offsets = h.offsets();
        let mut cur = self.clone();
        for (i, f) in h.factors.iter().enumerate() {
            cur = cur.functional_derivative(f, &x[offsets[i]..offsets[i] + f.k()])?;
        }
        Ok(cur.unit_coefficient())
    }

    /// Coloured Borel transform: u_g ↦ u_g / |G(g)|.
    pub fn borel(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let n = word_group_order(&t.word) as i64;
                Term { coeff: t.coeff.scale(T::from_ratio(1, n)), word: t.word.clone() }
            })
            .collect();
        Functional { rank: self.rank, terms }
    }

    /// Σ_{Ω∈G(g)} Σ_{jl ᶜ∼ g} Ω·⟨u_j t_l⟩_g at `x`.
    pub fn leibniz_rhs(&self, other: &Functional<T>, g: &GraphWord, x: &[Mom]) -> Result<T, AlgebraError> {
        let group = word_group(g);
        let mut acc = T::zero();
        for a in &self.terms {
            for b in &other.terms {
                let jl = a.word.concat(&b.word);
                if !jl.commutes_with(g) {
                    continue;
                }
                let prod = reorder_coeff(&a.coeff.times(&b.coeff), &jl, g)?;
                for omega in &group {
                    acc = acc + act(omega, g, &prod).eval(x);
                }
            }
        }
        Ok(acc)
    }
}
