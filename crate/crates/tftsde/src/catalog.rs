//! Named boundary graphs and the `m|V1|K33` word grammar.

use thiserror::Error;

use crate::algebra::{AlgebraError, GraphWord};
use crate::graph::{CanonicalCode, ColoredGraph, GraphError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown graph name `{0}`")]
    UnknownName(String),
    #[error("malformed graph literal `{0}`")]
    BadLiteral(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    /// Registered labelling; named correlators take their momenta in this order.
    pub graph: ColoredGraph,
    pub code: CanonicalCode,
    pub construction: String,
}

#[derive(Clone, Debug)]
pub struct Catalog {
    rank: usize,
    entries: Vec<CatalogEntry>,
}

/// Colour-`a` pillow: colour `a` parallel, every other colour crossing (0-based `a`).
pub fn pillow(rank: usize, a: usize) -> ColoredGraph {
    let perms = (0..rank).map(|c| if c == a { vec![0, 1] } else { vec![1, 0] }).collect();
    ColoredGraph::new(rank, perms).expect("valid pillow")
}

/// The coloured utility graph (rank 3).
pub fn k33() -> ColoredGraph {
    ColoredGraph::new(3, vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).expect("valid K33")
}

fn melon_pillow(a: usize) -> ColoredGraph {
    ColoredGraph::melon(3).disjoint_union(&pillow(3, a)).expect("same rank")
}

impl Catalog {
    pub fn new(rank: usize) -> Self {
        let mut cat = Catalog { rank, entries: Vec::new() };
        cat.register("m", ColoredGraph::melon(rank), "two vertices, all colours parallel");
        for a in 0..rank {
            cat.register(&format!("V{}", a + 1), pillow(rank, a), "colour a parallel, others crossing");
        }
        if rank == 3 {
            cat.register("K33", k33(), "[id, (123), (132)]");
            for a in 0..3 {
                let g = melon_pillow(a).edge_swap(a, 0, 1).expect("valid swap");
                cat.register(&format!("Q{}", a + 1), g, &format!("swap colour {} of m|V{} at blacks 1,2", a + 1, a + 1));
            }
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        if a == b || b == c || a == c {
                            continue;
                        }
                        let g = melon_pillow(c).edge_swap(b, 0, 2).expect("valid swap");
                        cat.register(
                            &format!("F{}_{}{}", a + 1, b + 1, c + 1),
                            g,
                            &format!("swap colour {} of m|V{} at blacks 1,3", b + 1, c + 1),
                        );
                    }
                }
            }
        }
        cat
    }

    fn register(&mut self, name: &str, graph: ColoredGraph, construction: &str) {
        let code = graph.canonical_code();
        self.entries.push(CatalogEntry {
            name: name.to_string(),
            graph,
            code,
            construction: construction.to_string(),
        });
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// First registered name of the class.
    pub fn name_of(&self, code: &CanonicalCode) -> Option<&str> {
        self.entries.iter().find(|e| &e.code == code).map(|e| e.name.as_str())
    }

    /// Name of a connected graph, or its literal `<…>` form.
    pub fn graph_name(&self, g: &ColoredGraph) -> String {
        self.name_of(&g.canonical_code()).map(str::to_string).unwrap_or_else(|| g.to_string())
    }

    pub fn word_name(&self, w: &GraphWord) -> String {
        if w.is_unit() {
            return "0".to_string();
        }
        w.factors().iter().map(|f| self.graph_name(f)).collect::<Vec<_>>().join("|")
    }

    /// One factor: a catalog name or a literal such as `<1 2,2 1,2 1>`.
    pub fn parse_graph(&self, s: &str) -> Result<ColoredGraph, CatalogError> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix('<').and_then(|r| r.strip_suffix('>')) {
            let perms: Result<Vec<Vec<usize>>, _> = body
                .split(',')
                .map(|p| p.split_whitespace().map(|t| t.parse::<usize>()).collect())
                .collect();
            let perms = perms.map_err(|_| CatalogError::BadLiteral(s.to_string()))?;
            return Ok(ColoredGraph::from_one_based(self.rank, &perms)?);
        }
        self.get(s).map(|e| e.graph.clone()).ok_or_else(|| CatalogError::UnknownName(s.to_string()))
    }

    /// `m|V1|K33`; `0` or an empty string is the empty word. A factor that
    /// is itself disconnected contributes its components in order.
    pub fn parse_word(&self, spec: &str) -> Result<GraphWord, CatalogError> {
        let spec = spec.trim();
        if spec.is_empty() || spec == "0" {
            return Ok(GraphWord::unit(self.rank));
        }
        let mut factors = Vec::new();
        for part in split_top(spec, '|') {
            let g = self.parse_graph(part)?;
            factors.extend(GraphWord::from_graph(&g).factors().iter().cloned());
        }
        Ok(GraphWord::new(self.rank, factors)?)
    }
}

/// Splits on `sep` outside `<…>` literals.
pub fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '<' => depth += 1,
            '>' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}
