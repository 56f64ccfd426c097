//! Command-line front end. `run` returns the process exit code:
//! 0 on success, 1 when a check fails, 2 on usage or input errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::algebra::GraphWord;
use crate::catalog::Catalog;
use crate::expr::{self, normalize, Format};
use crate::graph::ColoredGraph;
use crate::sde::{self, YTermTable};
use crate::tutte;

pub const SCHEMA_VERSION: &str = "1";

/// Hand-written equations shipped with the crate.
pub const FIXTURES: [(&str, &str); 4] = [
    ("mm", include_str!("../fixtures/mm.txt")),
    ("mmm", include_str!("../fixtures/mmm.txt")),
    ("m_v1", include_str!("../fixtures/m_v1.txt")),
    ("v1_m", include_str!("../fixtures/v1_m.txt")),
];

#[derive(Parser, Debug)]
#[command(name = "tftsde", version, about = "Coloured boundary graphs and their Schwinger-Dyson equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Text,
    Latex,
    Json,
}

#[derive(clap::Args, Debug)]
pub struct WordInput {
    /// Word such as `m|V1|K33`, or a literal `<1 2,2 1,2 1>`.
    pub word: Option<String>,
    /// Read the word from a JSON file instead.
    #[arg(long, conflicts_with = "word")]
    pub file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Canonical code, components, automorphism counts and genera.
    Inspect {
        #[command(flatten)]
        input: WordInput,
        #[arg(long, value_enum, default_value = "text")]
        format: OutFormat,
    },
    /// Swap the colour-c edges at two black vertices (1-based, whole word).
    Swap {
        #[command(flatten)]
        input: WordInput,
        #[arg(long)]
        color: usize,
        /// `β,ρ`
        #[arg(long)]
        at: String,
        #[arg(long, value_enum, default_value = "text")]
        format: OutFormat,
    },
    /// Black vertices whose swap with the given one disconnects the graph.
    Bridges {
        #[command(flatten)]
        input: WordInput,
        #[arg(long)]
        vertex: usize,
        /// Component of the word to use (1-based).
        #[arg(long, default_value_t = 1)]
        component: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: OutFormat,
    },
    /// Generate the equation for a distinguished black vertex.
    Sde {
        #[command(flatten)]
        input: WordInput,
        /// `component:vertex`, both 1-based.
        #[arg(long, default_value = "1:1")]
        beta: String,
        /// One equation per inequivalent vertex instead.
        #[arg(long, conflicts_with = "beta")]
        all: bool,
        /// Replace coefficients by their correlator expansions.
        #[arg(long)]
        expand_y: bool,
        /// Print the expanded normal form.
        #[arg(long)]
        normalize: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: OutFormat,
    },
    /// List boundary words up to a vertex count.
    Enumerate {
        #[arg(long)]
        max_vertices: usize,
        /// Only connected graphs.
        #[arg(long)]
        connected: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: OutFormat,
    },
    /// Coefficients of the map generating functions.
    Tutte {
        #[arg(long, default_value_t = 0)]
        genus: u32,
        #[arg(long, num_args = 1.., required = true)]
        perimeters: Vec<usize>,
        /// Number of internal faces kept.
        #[arg(long, default_value_t = 3)]
        order: usize,
        /// Largest internal polygon.
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Compare every coefficient with direct enumeration.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 12)]
        max_edges: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: OutFormat,
    },
    /// Check the shipped equations and the built-in property suites.
    Verify {
        /// Also check every `*.txt` fixture in this directory.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Skip the property suites.
        #[arg(long)]
        fixtures_only: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Check,
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Colours only when stdout is a terminal and `NO_COLOR` is unset.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use std::io::IsTerminal;
    let color = std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal();
    run_with(args, out, err, color)
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = if informational { write!(out, "{e}") } else { write!(err, "{e}") };
            return if informational { 0 } else { 2 };
        }
    };
    match dispatch(cli.command, out, color) {
        Ok(()) => 0,
        Err(Failure::Check) => 1,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
    }
}

fn read_word(input: &WordInput, cat: &Catalog) -> Result<GraphWord, Failure> {
    match (&input.word, &input.file) {
        (Some(w), _) => Ok(cat.parse_word(w)?),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            word_from_json(&text, cat).map_err(Failure::Usage)
        }
        (None, None) => Err(Failure::Usage("a word or --file is required".into())),
    }
}

/// `{"schema_version": "1", "rank": 3, "factors": [[[1,2],[2,1],[2,1]], …]}`
/// with one 1-based permutation per colour, or `{"word": "m|V1"}`.
pub fn word_from_json(text: &str, cat: &Catalog) -> Result<GraphWord, String> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if let Some(s) = v.get("word").and_then(|w| w.as_str()) {
        return cat.parse_word(s).map_err(|e| e.to_string());
    }
    let rank = v.get("rank").and_then(|r| r.as_u64()).map_or(cat.rank(), |r| r as usize);
    if rank != cat.rank() {
        return Err(format!("only rank {} words are supported", cat.rank()));
    }
    let factors: Vec<Vec<Vec<usize>>> = serde_json::from_value(v.get("factors").cloned().unwrap_or_default())
        .map_err(|e| format!("`factors`: {e}"))?;
    let mut graphs = Vec::new();
    for f in &factors {
        let g = ColoredGraph::from_one_based(rank, f).map_err(|e| e.to_string())?;
        graphs.extend(GraphWord::from_graph(&g).factors().iter().cloned());
    }
    GraphWord::new(rank, graphs).map_err(|e| e.to_string())
}

fn emit_json(out: &mut dyn Write, kind: &str, mut body: serde_json::Value) -> Result<(), Failure> {
    body["schema_version"] = json!(SCHEMA_VERSION);
    body["kind"] = json!(kind);
    writeln!(out, "{}", serde_json::to_string_pretty(&body)?)?;
    Ok(())
}

fn dispatch(cmd: Command, out: &mut dyn Write, color: bool) -> Result<(), Failure> {
    let cat = Catalog::new(3);
    match cmd {
        Command::Inspect { input, format } => inspect(&read_word(&input, &cat)?, &cat, format, out),
        Command::Swap { input, color: c, at, format } => {
            let word = read_word(&input, &cat)?;
            let pair: Vec<usize> = at
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| Failure::Usage("--at takes two 1-based black vertices `β,ρ`".into()))?;
            let [b, r] = pair[..] else {
                return Err(Failure::Usage("--at takes two 1-based black vertices `β,ρ`".into()));
            };
            if c == 0 || b == 0 || r == 0 {
                return Err(Failure::Usage("colours and vertices are 1-based".into()));
            }
            let swapped = word.to_graph().edge_swap(c - 1, b - 1, r - 1)?;
            let result = GraphWord::from_graph(&swapped);
            let name = cat.word_name(&result.canonicalize().0);
            match format {
                OutFormat::Json => emit_json(
                    out,
                    "swap",
                    json!({ "word": cat.word_name(&word), "color": c, "at": [b, r], "result": name,
                            "code": swapped.canonical_code().to_string(), "components": result.degree() }),
                ),
                _ => {
                    writeln!(out, "{name}")?;
                    writeln!(out, "code        {}", swapped.canonical_code())?;
                    writeln!(out, "components  {}", result.degree())?;
                    Ok(())
                }
            }
        }
        Command::Bridges { input, vertex, component, format } => {
            let word = read_word(&input, &cat)?;
            let g = word
                .factors()
                .get(component.wrapping_sub(1))
                .ok_or_else(|| Failure::Usage(format!("component {component} out of range")))?;
            if vertex == 0 {
                return Err(Failure::Usage("vertices are 1-based".into()));
            }
            let mut rows = Vec::new();
            for c in 0..g.rank() {
                let set: Vec<usize> = g.bridge_pairs(vertex - 1, c)?.into_iter().map(|t| t + 1).collect();
                rows.push(set);
            }
            match format {
                OutFormat::Json => emit_json(
                    out,
                    "bridges",
                    json!({ "graph": cat.graph_name(g), "vertex": vertex, "bridges": rows }),
                ),
                _ => {
                    for (c, set) in rows.iter().enumerate() {
                        let body = if set.is_empty() {
                            "∅".to_string()
                        } else {
                            format!("{{{}}}", set.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "))
                        };
                        writeln!(out, "colour {}: {body}", c + 1)?;
                    }
                    Ok(())
                }
            }
        }
        Command::Sde { input, beta, all, expand_y, normalize: norm, format } => {
            let word = read_word(&input, &cat)?;
            let roots = if all {
                sde::inequivalent_beta_choices(&word)?
            } else {
                let parts: Vec<usize> = beta
                    .split(':')
                    .map(|t| t.trim().parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| Failure::Usage("--beta takes `component:vertex`".into()))?;
                match parts[..] {
                    [c, v] if c >= 1 && v >= 1 => vec![(c - 1, v - 1)],
                    _ => return Err(Failure::Usage("--beta takes 1-based `component:vertex`".into())),
                }
            };
            let table = YTermTable::builtin();
            let mut eqs = Vec::new();
            for (c, v) in roots {
                let mut eq = sde::generate_sde(&word, c, v)?;
                if expand_y {
                    eq.rhs = sde::y_expand(&eq.rhs, &table, &cat)?;
                }
                if norm {
                    eq.rhs = normalize(&eq.rhs);
                }
                eqs.push(((c, v), eq));
            }
            match format {
                OutFormat::Json => {
                    let list: Vec<_> = eqs
                        .iter()
                        .map(|((c, v), eq)| json!({ "beta": [c + 1, v + 1], "lhs": eq.lhs, "rhs": eq.rhs }))
                        .collect();
                    emit_json(out, "sde", json!({ "word": cat.word_name(&word), "equations": list }))
                }
                f => {
                    let fmt = if f == OutFormat::Latex { Format::Latex } else { Format::Text };
                    for ((c, v), eq) in &eqs {
                        if eqs.len() > 1 {
                            writeln!(out, "# vertex {} of component {}", v + 1, c + 1)?;
                        }
                        writeln!(out, "{} = {}", expr::render(&eq.lhs, fmt, &cat), expr::render(&eq.rhs, fmt, &cat))?;
                    }
                    Ok(())
                }
            }
        }
        Command::Enumerate { max_vertices, connected, format } => {
            let words: Vec<GraphWord> = if connected {
                (1..=max_vertices / 2).flat_map(sde::connected_classes).map(|g| GraphWord::from_graph(&g)).collect()
            } else {
                sde::enumerate_boundaries(3, max_vertices)?
            };
            let rows: Vec<(String, usize, u128)> = words
                .iter()
                .map(|w| (cat.word_name(w), 2 * w.white_count(), w.to_graph().automorphism_count()))
                .collect();
            match format {
                OutFormat::Json => {
                    let list: Vec<_> =
                        rows.iter().map(|(n, v, a)| json!({ "word": n, "vertices": v, "automorphisms": a })).collect();
                    emit_json(out, "enumerate", json!({ "max_vertices": max_vertices, "count": rows.len(), "words": list }))
                }
                _ => {
                    for (n, v, a) in &rows {
                        writeln!(out, "{v:>3}  {a:>5}  {n}")?;
                    }
                    writeln!(out, "{} classes", rows.len())?;
                    Ok(())
                }
            }
        }
        Command::Tutte { genus, perimeters, order, degree, check, max_edges, format } => {
            let mut table = tutte::TutteTable::new(degree)?;
            let series = table.general(genus, &perimeters, order);
            let rows = tutte::coefficient_rows(genus, &perimeters, &series);
            match format {
                OutFormat::Json => emit_json(out, "tutte", json!({ "degree": degree, "order": order, "rows": rows }))?,
                _ => {
                    for r in &rows {
                        let lam: Vec<String> =
                            r.content.iter().enumerate().map(|(i, n)| format!("l{}^{n}", i + 3)).collect();
                        writeln!(out, "t^{} {}  {}", r.t_power, lam.join(" "), r.coefficient)?;
                    }
                }
            }
            if check {
                let report = tutte::check_against_enumeration(degree, &[perimeters], genus, max_edges)?;
                writeln!(out, "{} coefficients compared, {} mismatches", report.checked, report.mismatches.len())?;
                for m in &report.mismatches {
                    writeln!(out, "  {m}")?;
                }
                if !report.mismatches.is_empty() {
                    return Err(Failure::Check);
                }
            }
            Ok(())
        }
        Command::Verify { fixtures, fixtures_only } => verify(fixtures, fixtures_only, &cat, out, color),
    }
}

fn inspect(word: &GraphWord, cat: &Catalog, format: OutFormat, out: &mut dyn Write) -> Result<(), Failure> {
    let g = word.to_graph();
    let comps: Vec<_> = word
        .factors()
        .iter()
        .map(|f| {
            let genus = if f.rank() == 3 { f.genus_rank3().ok() } else { None };
            (cat.graph_name(f), f.k(), f.automorphism_count(), genus)
        })
        .collect();
    match format {
        OutFormat::Json => {
            let list: Vec<_> = comps
                .iter()
                .map(|(n, k, a, gn)| json!({ "graph": n, "vertices": 2 * k, "automorphisms": a, "genus": gn }))
                .collect();
            emit_json(
                out,
                "inspect",
                json!({ "word": cat.word_name(word), "code": g.canonical_code().to_string(),
                        "vertices": 2 * g.k(), "connected": g.is_connected(),
                        "automorphisms": g.automorphism_count(), "components": list }),
            )
        }
        _ => {
            writeln!(out, "word        {}", cat.word_name(word))?;
            writeln!(out, "code        {}", g.canonical_code())?;
            writeln!(out, "vertices    {}", 2 * g.k())?;
            writeln!(out, "connected   {}", g.is_connected())?;
            writeln!(out, "|Aut|       {}", g.automorphism_count())?;
            for (i, (n, k, a, gn)) in comps.iter().enumerate() {
                let genus = gn.map_or("-".to_string(), |v| v.to_string());
                writeln!(out, "component {}: {n}, {} vertices, |Aut| {a}, genus {genus}", i + 1, 2 * k)?;
            }
            Ok(())
        }
    }
}

/// Outcome of one named check.
pub type Outcome = (String, Result<(), String>);

/// Generated equations against the shipped fixtures (and any extra files).
pub fn fixture_outcomes(extra: &[(String, String)], cat: &Catalog) -> Vec<Outcome> {
    let table = YTermTable::builtin();
    let mut all: Vec<(String, String)> = FIXTURES.iter().map(|(n, s)| (n.to_string(), s.to_string())).collect();
    all.extend(extra.iter().cloned());
    all.into_iter()
        .map(|(name, src)| {
            let res = (|| {
                let fx = sde::parse_fixture(&src, cat).map_err(|e| e.to_string())?;
                let eq = sde::generate_sde(&fx.word, fx.component, fx.beta).map_err(|e| e.to_string())?;
                let diff = sde::compare_equations(&eq, &fx.equation, &table, cat).map_err(|e| e.to_string())?;
                if diff.is_empty() {
                    Ok(())
                } else {
                    Err(format!("{} unmatched monomials, first: {}", diff.len(), diff[0]))
                }
            })();
            (format!("fixture {name}"), res)
        })
        .collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Quick invariant checks over every word with at most four vertices.
pub fn property_outcomes(cat: &Catalog) -> Vec<Outcome> {
    let words = match sde::enumerate_boundaries(3, 4) {
        Ok(w) => w,
        Err(e) => return vec![("enumeration".into(), Err(e.to_string()))],
    };
    let mut out: Vec<Outcome> = Vec::new();

    let modes = || -> Result<(), String> {
        for w in &words {
            for (c, b) in sde::inequivalent_beta_choices(w).map_err(|e| e.to_string())? {
                let a = sde::generate_sde_with(w, c, b, sde::Factorizations::Classes).map_err(|e| e.to_string())?;
                let p = sde::generate_sde_with(w, c, b, sde::Factorizations::Positions).map_err(|e| e.to_string())?;
                ensure(expr::equal_normalized(&a.rhs, &p.rhs), || format!("{}", cat.word_name(w)))?;
            }
        }
        Ok(())
    };
    out.push(("factorization sums agree".into(), modes()));

    let orbits = || -> Result<(), String> {
        for w in &words {
            let d = sde::orbit_invariance_defects(w).map_err(|e| e.to_string())?;
            ensure(d.is_empty(), || format!("{}: {}", cat.word_name(w), d.join("; ")))?;
        }
        Ok(())
    };
    out.push(("vertex orbit invariance".into(), orbits()));

    let forms = || -> Result<(), String> {
        for w in &words {
            for (_, eq) in sde::generate_all(w).map_err(|e| e.to_string())? {
                let n = normalize(&eq.rhs);
                ensure(normalize(&n) == n, || format!("{}: normal form not idempotent", cat.word_name(w)))?;
                let text = expr::render_text(&n, cat);
                let back = expr::parse_text(&text, cat).map_err(|e| e.to_string())?;
                ensure(expr::equal_normalized(&back, &n), || format!("{}: text round trip", cat.word_name(w)))?;
                let js = expr::render(&n, Format::Json, cat);
                let back = expr::from_json(&js).map_err(|e| e.to_string())?;
                ensure(back == n, || format!("{}: JSON round trip", cat.word_name(w)))?;
            }
        }
        Ok(())
    };
    out.push(("normal form and round trips".into(), forms()));

    let auts = || -> Result<(), String> {
        for (w, n) in [("m", 1u128), ("V1", 2), ("K33", 3), ("m|m", 2), ("m|m|m", 6)] {
            let g = cat.parse_word(w).map_err(|e| e.to_string())?.to_graph();
            ensure(g.automorphism_count() == n, || format!("{w}: {} automorphisms", g.automorphism_count()))?;
        }
        Ok(())
    };
    out.push(("automorphism counts".into(), auts()));

    let maps = || -> Result<(), String> {
        let r = tutte::check_against_enumeration(4, &tutte::perimeter_configurations(3), 1, 8)
            .map_err(|e| e.to_string())?;
        ensure(r.mismatches.is_empty(), || r.mismatches.join("; "))
    };
    out.push(("map recursion against enumeration".into(), maps()));
    out
}

fn verify(dir: Option<PathBuf>, fixtures_only: bool, cat: &Catalog, out: &mut dyn Write, color: bool) -> Result<(), Failure> {
    let mut extra = Vec::new();
    if let Some(dir) = dir {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .collect();
        paths.sort();
        for p in paths {
            let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            extra.push((name, std::fs::read_to_string(&p)?));
        }
    }
    let mut outcomes = fixture_outcomes(&extra, cat);
    if !fixtures_only {
        outcomes.extend(property_outcomes(cat));
    }
    let paint = |ok: bool| match (ok, color) {
        (true, true) => "\x1b[32mPASS\x1b[0m",
        (false, true) => "\x1b[31mFAIL\x1b[0m",
        (true, false) => "PASS",
        (false, false) => "FAIL",
    };
    let mut failed = 0;
    for (name, res) in &outcomes {
        match res {
            Ok(()) => writeln!(out, "{} {name}", paint(true))?,
            Err(m) => {
                failed += 1;
                writeln!(out, "{} {name}: {m}", paint(false))?;
            }
        }
    }
    writeln!(out, "{} checks, {failed} failed", outcomes.len())?;
    if failed > 0 {
        Err(Failure::Check)
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["tftsde"];
        argv.extend(args);
        let code = run_with(argv, &mut out, &mut err, false);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn inspect_k33() {
        let (code, out, _) = call(&["inspect", "K33"]);
        assert_eq!(code, 0);
        assert!(out.contains("|Aut|       3"), "{out}");
        assert!(out.contains("connected   true"));
        assert!(out.contains("genus 1"));
    }

    #[test]
    fn bridges_of_pillow() {
        let (code, out, _) = call(&["bridges", "V1", "--vertex", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out, "colour 1: {2}\ncolour 2: ∅\ncolour 3: ∅\n");
    }

    #[test]
    fn swap_splits_pillow() {
        let (code, out, _) = call(&["swap", "V1", "--color", "1", "--at", "1,2"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("m|m\n"), "{out}");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["inspect", "V9"]).0, 2);
        assert_eq!(call(&["swap", "V1", "--color", "1", "--at", "1"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["sde", "m|m", "--beta", "3:1"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn json_outputs_carry_version() {
        let (code, out, _) = call(&["sde", "m|m", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["schema_version"], "1");
        assert_eq!(v["equations"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn word_files() {
        let cat = Catalog::new(3);
        let w = word_from_json(r#"{"factors": [[[1,2],[2,1],[2,1]], [[1],[1],[1]]]}"#, &cat).unwrap();
        assert_eq!(cat.word_name(&w), "V1|m");
        assert!(word_from_json(r#"{"rank": 4, "factors": []}"#, &cat).is_err());
    }

    #[test]
    fn output_is_deterministic() {
        let a = call(&["sde", "V1|m", "--all", "--format", "latex"]);
        let b = call(&["sde", "V1|m", "--all", "--format", "latex"]);
        assert_eq!(a, b);
        assert_eq!(a.0, 0);
    }

    #[test]
    fn tutte_check() {
        let (code, out, _) = call(&["tutte", "--perimeters", "2", "--order", "2", "--check", "--max-edges", "6"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("0 mismatches"));
    }
}
