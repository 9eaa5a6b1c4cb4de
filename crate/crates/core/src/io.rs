//! Plain-text file formats. Writers are canonical, so reading a file and
//! writing it back reproduces it byte for byte.
//!
//! ```text
//! tournament 4          # header, then one `u v` line per present edge u -> v
//! 0 1
//!
//! domain 0: 3 1 0       # groundtruth, one line per domain in canonical order
//! cluster 0: 0 1 3      # partitioning, closed by a `remainder:` line
//! remainder: 2
//! order 0: 3 1 0        # per-cluster ranking in a model file
//! nonoutliers: 0 1 3
//! ```
//!
//! Lines starting with `#` are comments, except the directives written by
//! this module (`# gadget ...`, `# ranking: global`).

use crate::bitset::VertexSet;
use crate::clustering::Partitioning;
use crate::error::{Error, Result};
use crate::gadget::{Gadget, Verification};
use crate::graph::{Ordering, Tournament};
use crate::model::GroundTruth;
use crate::ranking::RankModel;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-empty lines with 1-based line numbers, comments dropped unless `keep`
/// accepts them.
fn content_lines<'a>(text: &'a str, keep: impl Fn(&str) -> bool + 'a) -> impl Iterator<Item = (usize, &'a str)> + 'a {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(move |(_, l)| !l.is_empty() && (!l.starts_with('#') || keep(l)))
}

fn parse_list(line: usize, s: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|tok| tok.parse().map_err(|_| parse_err(line, format!("bad vertex `{tok}`"))))
        .collect()
}

fn push_list(out: &mut String, label: &str, items: impl IntoIterator<Item = usize>) {
    out.push_str(label);
    out.push(':');
    for v in items {
        out.push(' ');
        out.push_str(&v.to_string());
    }
    out.push('\n');
}

/// `<keyword> <id>: list` with ids required to run 0, 1, 2, ...
fn parse_indexed(line: usize, rest: &str, expected: usize) -> Result<Vec<usize>> {
    let (id, list) = rest
        .split_once(':')
        .ok_or_else(|| parse_err(line, "missing `:`"))?;
    let id: usize = id.trim().parse().map_err(|_| parse_err(line, "bad id"))?;
    if id != expected {
        return Err(parse_err(line, format!("expected id {expected}, found {id}")));
    }
    parse_list(line, list)
}

pub fn write_tournament(t: &Tournament) -> String {
    let mut out = format!("tournament {}\n", t.n());
    for (u, v) in t.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn read_tournament(text: &str) -> Result<Tournament> {
    let mut lines = content_lines(text, |_| false);
    let (ln, header) = lines.next().ok_or_else(|| parse_err(0, "empty tournament file"))?;
    let n: usize = header
        .strip_prefix("tournament ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| parse_err(ln, "expected `tournament <n>`"))?;
    let mut edges = Vec::new();
    for (ln, l) in lines {
        let pair = parse_list(ln, l)?;
        match pair.as_slice() {
            &[u, v] => edges.push((u, v)),
            _ => return Err(parse_err(ln, "expected `u v`")),
        }
    }
    Tournament::from_edges(n, edges)
}

fn verification_tag(v: Verification) -> String {
    match v {
        Verification::Exhaustive => "exhaustive".into(),
        Verification::Sampled { trials } => format!("sampled:{trials}"),
        Verification::Unverified => "unverified".into(),
    }
}

pub fn write_gadget(g: &Gadget) -> String {
    format!(
        "# gadget k_u={} verified={}\n{}",
        g.k_u,
        verification_tag(g.verified),
        write_tournament(&g.tournament)
    )
}

pub fn read_gadget(text: &str) -> Result<Gadget> {
    let header = content_lines(text, |l| l.starts_with("# gadget")).find(|(_, l)| l.starts_with("# gadget"));
    let tournament = read_tournament(text)?;
    let Some((ln, header)) = header else {
        return Ok(Gadget::unverified(tournament));
    };
    let mut k_u = None;
    let mut verified = None;
    for field in header["# gadget".len()..].split_whitespace() {
        match field.split_once('=') {
            Some(("k_u", v)) => k_u = Some(v.parse().map_err(|_| parse_err(ln, "bad k_u"))?),
            Some(("verified", "exhaustive")) => verified = Some(Verification::Exhaustive),
            Some(("verified", "unverified")) => verified = Some(Verification::Unverified),
            Some(("verified", v)) => {
                let trials = v
                    .strip_prefix("sampled:")
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(ln, format!("bad verification `{v}`")))?;
                verified = Some(Verification::Sampled { trials });
            }
            _ => return Err(parse_err(ln, format!("unknown gadget field `{field}`"))),
        }
    }
    Ok(Gadget {
        tournament,
        k_u: k_u.ok_or_else(|| parse_err(ln, "missing k_u"))?,
        verified: verified.ok_or_else(|| parse_err(ln, "missing verified"))?,
    })
}

const GLOBAL_DIRECTIVE: &str = "# ranking: global";

pub fn write_groundtruth(g: &GroundTruth) -> String {
    let mut out = String::new();
    if g.is_global() {
        out.push_str(GLOBAL_DIRECTIVE);
        out.push('\n');
    }
    for (d, order) in g.orderings().iter().enumerate() {
        push_list(&mut out, &format!("domain {d}"), order.iter().copied());
    }
    out
}

pub fn read_groundtruth(text: &str) -> Result<GroundTruth> {
    let mut global = false;
    let mut orders = Vec::new();
    for (ln, l) in content_lines(text, |l| l == GLOBAL_DIRECTIVE) {
        if l == GLOBAL_DIRECTIVE {
            global = true;
        } else if let Some(rest) = l.strip_prefix("domain ") {
            orders.push(parse_indexed(ln, rest, orders.len())?);
        } else {
            return Err(parse_err(ln, "expected `domain <id>: ...`"));
        }
    }
    GroundTruth::from_orderings(orders, global)
}

fn write_clusters(out: &mut String, p: &Partitioning) {
    for (i, c) in p.clusters.iter().enumerate() {
        push_list(out, &format!("cluster {i}"), c.iter().copied());
    }
    push_list(out, "remainder", p.remainder.iter().copied());
}

pub fn write_partitioning(p: &Partitioning) -> String {
    let mut out = String::new();
    write_clusters(&mut out, p);
    out
}

#[derive(Default)]
struct Sections {
    clusters: Vec<Vec<usize>>,
    remainder: Option<Vec<usize>>,
    orders: Vec<Vec<usize>>,
    nonoutliers: Option<Vec<usize>>,
}

fn read_sections(text: &str) -> Result<Sections> {
    let mut s = Sections::default();
    for (ln, l) in content_lines(text, |_| false) {
        if let Some(rest) = l.strip_prefix("cluster ") {
            if s.remainder.is_some() {
                return Err(parse_err(ln, "cluster after remainder line"));
            }
            s.clusters.push(parse_indexed(ln, rest, s.clusters.len())?);
        } else if let Some(rest) = l.strip_prefix("remainder:") {
            s.remainder = Some(parse_list(ln, rest)?);
        } else if let Some(rest) = l.strip_prefix("order ") {
            s.orders.push(parse_indexed(ln, rest, s.orders.len())?);
        } else if let Some(rest) = l.strip_prefix("nonoutliers:") {
            s.nonoutliers = Some(parse_list(ln, rest)?);
        } else {
            return Err(parse_err(ln, format!("unrecognized line `{l}`")));
        }
    }
    Ok(s)
}

fn partitioning_of(clusters: Vec<Vec<usize>>, remainder: Option<Vec<usize>>) -> Result<Partitioning> {
    let remainder = remainder.ok_or_else(|| parse_err(0, "missing `remainder:` line"))?;
    let n = clusters.iter().map(Vec::len).sum::<usize>() + remainder.len();
    let p = Partitioning::new(n, clusters)?;
    if p.remainder != remainder {
        return Err(parse_err(0, "clusters and remainder do not partition 0..n"));
    }
    Ok(p)
}

pub fn read_partitioning(text: &str) -> Result<Partitioning> {
    let s = read_sections(text)?;
    if !s.orders.is_empty() || s.nonoutliers.is_some() {
        return Err(parse_err(0, "model lines in a partitioning file"));
    }
    partitioning_of(s.clusters, s.remainder)
}

pub fn write_nonoutliers(r: &VertexSet) -> String {
    let mut out = String::new();
    push_list(&mut out, "nonoutliers", r.iter());
    out
}

pub fn read_nonoutliers(text: &str, n: usize) -> Result<VertexSet> {
    let s = read_sections(text)?;
    let list = s.nonoutliers.ok_or_else(|| parse_err(0, "missing `nonoutliers:` line"))?;
    if let Some(&v) = list.iter().find(|&&v| v >= n) {
        return Err(parse_err(0, format!("vertex {v} out of range")));
    }
    Ok(VertexSet::from_iter(n, list))
}

pub fn write_model(m: &RankModel) -> String {
    let mut out = String::new();
    write_clusters(&mut out, &m.partitioning);
    for (i, o) in m.orderings.iter().enumerate() {
        push_list(&mut out, &format!("order {i}"), o.as_slice().iter().copied());
    }
    push_list(&mut out, "nonoutliers", m.nonoutliers.iter());
    out
}

pub fn read_model(text: &str) -> Result<RankModel> {
    let s = read_sections(text)?;
    let p = partitioning_of(s.clusters, s.remainder)?;
    let orderings = s.orders.into_iter().map(Ordering::new).collect::<Result<Vec<_>>>()?;
    let r = s.nonoutliers.ok_or_else(|| parse_err(0, "missing `nonoutliers:` line"))?;
    let r = VertexSet::from_iter(p.n, r.into_iter().filter(|&v| v < p.n));
    RankModel::new(p, orderings, r)
}
