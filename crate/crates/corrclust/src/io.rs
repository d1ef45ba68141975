//! Plain-text file formats. Ids are whitespace-separated decimals; `#`
//! starts a comment.
//!
//! ```text
//! cc-graph v1 <n> <m+>     then m+ lines `u v`
//! cc-stream v1 <n>         then lines `u v +|-`
//! cc-dyn v1 <n>            then lines `u v +|- ins|del`
//! cc-clust v1 <n>          then n lines `v cluster_id`
//! cc-decomp v1             then `sparse: v...` and one `K: v...` per clique
//! cc-bundle v1 <n> <t> <c> <seed>   sample-bundle dump
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use crate::access::{DynamicStream, InsertionStream, StreamUpdate, UpdateOp};
use crate::error::{ContractError, ParseError};
use crate::exact::Decomposition;
use crate::graph::{Clustering, Label, LabeledGraph, Vertex};
use crate::recovery::SampleBundle;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileKind {
    Graph,
    Stream,
    Dynamic,
    Clustering,
    Decomposition,
    Bundle,
}

/// Kind from the header line.
pub fn detect_kind(text: &str) -> Option<FileKind> {
    let (_, first) = lines(text).next()?;
    Some(match first.first()? {
        &"cc-graph" => FileKind::Graph,
        &"cc-stream" => FileKind::Stream,
        &"cc-dyn" => FileKind::Dynamic,
        &"cc-clust" => FileKind::Clustering,
        &"cc-decomp" => FileKind::Decomposition,
        &"cc-bundle" => FileKind::Bundle,
        _ => return None,
    })
}

/// Non-empty lines with comments stripped, as (1-based line number, tokens).
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = l.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

fn num<T: FromStr>(line: usize, tok: &str) -> Result<T, ParseError> {
    tok.parse().map_err(|_| syntax(line, format!("expected a number, got `{tok}`")))
}

fn header<'a>(
    it: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
    magic: &'static str,
    expected: &'static str,
    args: usize,
) -> Result<(usize, Vec<&'a str>), ParseError> {
    match it.next() {
        Some((ln, t)) if t.len() == 2 + args && t[0] == magic && t[1] == "v1" => Ok((ln, t[2..].to_vec())),
        _ => Err(ParseError::Header(expected)),
    }
}

fn check_vertex(line: usize, v: Vertex, n: usize) -> Result<Vertex, ParseError> {
    if (v as usize) < n {
        Ok(v)
    } else {
        Err(syntax(line, format!("vertex {v} out of range for n = {n}")))
    }
}

fn pair(line: usize, t: &[&str], n: usize) -> Result<(Vertex, Vertex), ParseError> {
    let u = check_vertex(line, num(line, t[0])?, n)?;
    let v = check_vertex(line, num(line, t[1])?, n)?;
    if u == v {
        return Err(syntax(line, format!("self-loop at {u}")));
    }
    Ok((u, v))
}

pub fn write_graph(g: &LabeledGraph) -> String {
    let mut s = format!("cc-graph v1 {} {}\n", g.n(), g.num_pos_edges());
    for (u, v) in g.pos_edges() {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

pub fn parse_graph(text: &str) -> Result<LabeledGraph, ParseError> {
    let mut it = lines(text);
    let (ln, h) = header(&mut it, "cc-graph", "cc-graph v1 <n> <m+>", 2)?;
    let n: usize = num(ln, h[0])?;
    let m: usize = num(ln, h[1])?;
    let mut edges = Vec::with_capacity(m);
    for (ln, t) in it {
        if t.len() != 2 {
            return Err(syntax(ln, "expected `u v`"));
        }
        edges.push(pair(ln, &t, n)?);
    }
    if edges.len() != m {
        return Err(syntax(ln, format!("header promises {m} edges, found {}", edges.len())));
    }
    let g = LabeledGraph::new(n, edges.iter().copied())?;
    if g.num_pos_edges() != m {
        return Err(syntax(ln, "duplicate edges"));
    }
    Ok(g)
}

pub fn write_stream(s: &InsertionStream) -> String {
    let mut out = format!("cc-stream v1 {}\n", s.n);
    for &(u, v, l) in &s.records {
        let _ = writeln!(out, "{u} {v} {}", l.symbol());
    }
    out
}

fn label(line: usize, tok: &str) -> Result<Label, ParseError> {
    match tok {
        "+" => Ok(Label::Pos),
        "-" => Ok(Label::Neg),
        _ => Err(syntax(line, format!("expected + or -, got `{tok}`"))),
    }
}

pub fn parse_stream(text: &str) -> Result<InsertionStream, ParseError> {
    let mut it = lines(text);
    let (ln, h) = header(&mut it, "cc-stream", "cc-stream v1 <n>", 1)?;
    let n: usize = num(ln, h[0])?;
    let mut records = Vec::new();
    for (ln, t) in it {
        if t.len() != 3 {
            return Err(syntax(ln, "expected `u v +|-`"));
        }
        let (u, v) = pair(ln, &t, n)?;
        records.push((u, v, label(ln, t[2])?));
    }
    Ok(InsertionStream::new(n, records))
}

pub fn write_dynamic(s: &DynamicStream) -> String {
    let mut out = format!("cc-dyn v1 {}\n", s.n);
    for up in &s.updates {
        let kind = if up.op.is_insert() { "ins" } else { "del" };
        let _ = writeln!(out, "{} {} {} {kind}", up.u, up.v, up.op.label().symbol());
    }
    out
}

pub fn parse_dynamic(text: &str) -> Result<DynamicStream, ParseError> {
    let mut it = lines(text);
    let (ln, h) = header(&mut it, "cc-dyn", "cc-dyn v1 <n>", 1)?;
    let n: usize = num(ln, h[0])?;
    let mut updates = Vec::new();
    for (ln, t) in it {
        if t.len() != 4 {
            return Err(syntax(ln, "expected `u v +|- ins|del`"));
        }
        let (u, v) = pair(ln, &t, n)?;
        let insert = match t[3] {
            "ins" => true,
            "del" => false,
            other => return Err(syntax(ln, format!("expected ins or del, got `{other}`"))),
        };
        updates.push(StreamUpdate::new(u, v, UpdateOp::new(label(ln, t[2])?, insert)));
    }
    Ok(DynamicStream::new(n, updates))
}

pub fn write_clustering(c: &Clustering) -> String {
    let mut s = format!("cc-clust v1 {}\n", c.n());
    for (v, id) in c.assignment().iter().enumerate() {
        let _ = writeln!(s, "{v} {id}");
    }
    s
}

pub fn parse_clustering(text: &str) -> Result<Clustering, ParseError> {
    let mut it = lines(text);
    let (ln, h) = header(&mut it, "cc-clust", "cc-clust v1 <n>", 1)?;
    let n: usize = num(ln, h[0])?;
    let mut ids: Vec<Option<u64>> = vec![None; n];
    for (ln, t) in it {
        if t.len() != 2 {
            return Err(syntax(ln, "expected `v cluster_id`"));
        }
        let v = check_vertex(ln, num(ln, t[0])?, n)?;
        if ids[v as usize].replace(num(ln, t[1])?).is_some() {
            return Err(syntax(ln, format!("vertex {v} assigned twice")));
        }
    }
    let assignment: Option<Vec<u64>> = ids.into_iter().collect();
    assignment.map(Clustering::new).ok_or_else(|| syntax(ln, "some vertex has no cluster"))
}

/// A decomposition as read from disk, before it is checked against a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawDecomposition {
    pub sparse: Vec<Vertex>,
    pub cliques: Vec<Vec<Vertex>>,
}

impl RawDecomposition {
    /// Validates the partition against `g` and computes clique max-degrees.
    pub fn resolve(self, g: &LabeledGraph) -> Result<Decomposition, ContractError> {
        Decomposition::new(g.n(), self.sparse, self.cliques, &g.degrees())
    }
}

pub fn write_decomposition(d: &Decomposition) -> String {
    let join = |vs: &[Vertex]| vs.iter().map(|v| format!(" {v}")).collect::<String>();
    let mut s = String::from("cc-decomp v1\n");
    let _ = writeln!(s, "sparse:{}", join(&d.sparse));
    for k in &d.cliques {
        let _ = writeln!(s, "K:{}", join(k));
    }
    s
}

pub fn parse_decomposition(text: &str) -> Result<RawDecomposition, ParseError> {
    let mut it = lines(text);
    header(&mut it, "cc-decomp", "cc-decomp v1", 0)?;
    let mut sparse = None;
    let mut cliques = Vec::new();
    for (ln, t) in it {
        let ids = t[1..].iter().map(|x| num(ln, x)).collect::<Result<Vec<Vertex>, _>>()?;
        match t[0] {
            "sparse:" => {
                if sparse.replace(ids).is_some() {
                    return Err(syntax(ln, "second `sparse:` line"));
                }
            }
            "K:" => cliques.push(ids),
            other => return Err(syntax(ln, format!("expected `sparse:` or `K:`, got `{other}`"))),
        }
    }
    Ok(RawDecomposition { sparse: sparse.unwrap_or_default(), cliques })
}

pub fn write_bundle(b: &SampleBundle) -> String {
    let mut s = format!("cc-bundle v1 {} {} {} {}\n", b.n, b.t, b.c, b.seed);
    s.push_str("deg");
    for d in &b.degrees {
        let _ = write!(s, " {d}");
    }
    s.push('\n');
    for (v, list) in b.ns.iter().enumerate() {
        if !list.is_empty() {
            let _ = write!(s, "ns {v}");
            for (u, k) in list {
                let _ = write!(s, " {u}:{k}");
            }
            s.push('\n');
        }
    }
    for (v, nb) in b.sampled.iter().enumerate() {
        if let Some(nb) = nb {
            let _ = write!(s, "sample {v}");
            for u in nb {
                let _ = write!(s, " {u}");
            }
            s.push('\n');
        }
    }
    s
}

pub fn parse_bundle(text: &str) -> Result<SampleBundle, ParseError> {
    let mut it = lines(text);
    let (ln, h) = header(&mut it, "cc-bundle", "cc-bundle v1 <n> <t> <c> <seed>", 4)?;
    let n: usize = num(ln, h[0])?;
    let mut b = SampleBundle {
        n,
        degrees: Vec::new(),
        t: num(ln, h[1])?,
        c: num(ln, h[2])?,
        seed: num(ln, h[3])?,
        ns: vec![Vec::new(); n],
        sampled: vec![None; n],
    };
    for (ln, t) in it {
        match t[0] {
            "deg" => b.degrees = t[1..].iter().map(|x| num(ln, x)).collect::<Result<_, _>>()?,
            "ns" | "sample" if t.len() >= 2 => {
                let v = check_vertex(ln, num(ln, t[1])?, n)? as usize;
                if t[0] == "ns" {
                    for tok in &t[2..] {
                        let (u, k) = tok.split_once(':').ok_or_else(|| syntax(ln, "expected `u:k`"))?;
                        b.ns[v].push((check_vertex(ln, num(ln, u)?, n)?, num(ln, k)?));
                    }
                } else {
                    let ids = t[2..].iter().map(|x| num(ln, x)).collect::<Result<Vec<Vertex>, _>>()?;
                    b.sampled[v] = Some(ids);
                }
            }
            other => return Err(syntax(ln, format!("unexpected `{other}`"))),
        }
    }
    b.validate().map_err(|m| syntax(ln, m))?;
    Ok(b)
}
