//! Graph interchange files and tabular reports.
//!
//! Graphs are written as GEXF 1.2draft (for Gephi), GraphML, Graphviz DOT or
//! a plain `source,target,distance` edge CSV. Each format has a matching
//! reader so exports can be checked by parsing them back.
//!
//! Node labels are the passwords. Passwords that are not valid UTF-8, or that
//! contain control characters XML cannot carry, are written as `$HEX[...]`.
//! With `redact` set, labels are the node ids instead.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use serde::{Deserialize, Serialize};

use crate::attack::CrackingCurve;
use crate::corpus::CorpusStats;
use crate::error::{Error, Result};
use crate::mindict::{DominatingMethod, DominatingSetResult};
use crate::netstats::{degree_sequence, CommunityAssignment, PowerLawFit};
use crate::simjoin::{PasswordGraph, ThresholdView};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Gexf,
    Graphml,
    EdgeCsv,
    Dot,
}

impl std::str::FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gexf" => Ok(GraphFormat::Gexf),
            "graphml" => Ok(GraphFormat::Graphml),
            "edgecsv" => Ok(GraphFormat::EdgeCsv),
            "dot" => Ok(GraphFormat::Dot),
            other => Err(Error::arg(format!("unknown graph format `{other}`"))),
        }
    }
}

/// Printable label for a password.
pub fn password_label(password: &[u8]) -> String {
    match std::str::from_utf8(password) {
        Ok(s) if !s.chars().any(|c| c.is_control()) && !s.starts_with("$HEX[") => s.to_string(),
        _ => {
            let mut out = String::with_capacity(6 + 2 * password.len());
            out.push_str("$HEX[");
            for b in password {
                let _ = write!(out, "{b:02x}");
            }
            out.push(']');
            out
        }
    }
}

/// Inverse of [`password_label`].
pub fn parse_password_label(label: &str) -> Result<Vec<u8>> {
    let Some(hex) = label.strip_prefix("$HEX[").and_then(|r| r.strip_suffix(']')) else {
        return Ok(label.as_bytes().to_vec());
    };
    if hex.len() % 2 != 0 {
        return Err(Error::Format(format!("odd-length hex label `{label}`")));
    }
    (0..hex.len())
        .step_by(2)
        .map(|i| {
            u8::from_str_radix(&hex[i..i + 2], 16)
                .map_err(|_| Error::Format(format!("bad hex label `{label}`")))
        })
        .collect()
}

fn node_label(graph: &PasswordGraph, id: usize, redact: bool) -> String {
    if redact {
        id.to_string()
    } else {
        password_label(graph.password(id))
    }
}

/// Writes the view in `format`. Undirected edges appear once, lower id first.
pub fn export_graph<W: Write>(
    view: &ThresholdView<'_>,
    communities: Option<&CommunityAssignment>,
    format: GraphFormat,
    redact: bool,
    out: W,
) -> Result<()> {
    if let Some(c) = communities {
        if c.labels.len() != view.node_count() {
            return Err(Error::arg("community labels do not cover the graph"));
        }
    }
    let labels = communities.map(|c| c.labels.as_slice());
    match format {
        GraphFormat::Gexf => write_gexf(view, labels, redact, out),
        GraphFormat::Graphml => write_graphml(view, labels, redact, out),
        GraphFormat::EdgeCsv => write_edge_csv(view, redact, out),
        GraphFormat::Dot => write_dot(view, labels, redact, out),
    }
}

fn write_gexf<W: Write>(view: &ThresholdView<'_>, communities: Option<&[usize]>, redact: bool, mut out: W) -> Result<()> {
    let graph = view.graph();
    let degrees = degree_sequence(view);
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(out, r#"<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2">"#)?;
    writeln!(out, r#"  <graph mode="static" defaultedgetype="undirected">"#)?;
    writeln!(out, r#"    <attributes class="node">"#)?;
    writeln!(out, r#"      <attribute id="frequency" title="frequency" type="long"/>"#)?;
    writeln!(out, r#"      <attribute id="degree" title="degree" type="integer"/>"#)?;
    if communities.is_some() {
        writeln!(out, r#"      <attribute id="community" title="community" type="integer"/>"#)?;
    }
    writeln!(out, r#"    </attributes>"#)?;
    writeln!(out, r#"    <attributes class="edge">"#)?;
    writeln!(out, r#"      <attribute id="distance" title="distance" type="integer"/>"#)?;
    writeln!(out, r#"    </attributes>"#)?;
    writeln!(out, "    <nodes>")?;
    for v in 0..view.node_count() {
        let label = node_label(graph, v, redact);
        writeln!(out, r#"      <node id="{v}" label="{}">"#, escape(label.as_str()))?;
        writeln!(out, "        <attvalues>")?;
        writeln!(out, r#"          <attvalue for="frequency" value="{}"/>"#, graph.frequency(v))?;
        writeln!(out, r#"          <attvalue for="degree" value="{}"/>"#, degrees[v])?;
        if let Some(c) = communities {
            writeln!(out, r#"          <attvalue for="community" value="{}"/>"#, c[v])?;
        }
        writeln!(out, "        </attvalues>")?;
        writeln!(out, "      </node>")?;
    }
    writeln!(out, "    </nodes>")?;
    writeln!(out, "    <edges>")?;
    for (i, e) in view.edges().iter().enumerate() {
        writeln!(
            out,
            r#"      <edge id="{i}" source="{}" target="{}"><attvalues><attvalue for="distance" value="{}"/></attvalues></edge>"#,
            e.source, e.target, e.distance
        )?;
    }
    writeln!(out, "    </edges>")?;
    writeln!(out, "  </graph>")?;
    writeln!(out, "</gexf>")?;
    out.flush()?;
    Ok(())
}

fn write_graphml<W: Write>(view: &ThresholdView<'_>, communities: Option<&[usize]>, redact: bool, mut out: W) -> Result<()> {
    let graph = view.graph();
    let degrees = degree_sequence(view);
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(out, r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns">"#)?;
    writeln!(out, r#"  <key id="label" for="node" attr.name="label" attr.type="string"/>"#)?;
    writeln!(out, r#"  <key id="frequency" for="node" attr.name="frequency" attr.type="long"/>"#)?;
    writeln!(out, r#"  <key id="degree" for="node" attr.name="degree" attr.type="int"/>"#)?;
    if communities.is_some() {
        writeln!(out, r#"  <key id="community" for="node" attr.name="community" attr.type="int"/>"#)?;
    }
    writeln!(out, r#"  <key id="distance" for="edge" attr.name="distance" attr.type="int"/>"#)?;
    writeln!(out, r#"  <graph id="G" edgedefault="undirected">"#)?;
    for v in 0..view.node_count() {
        let label = node_label(graph, v, redact);
        writeln!(out, r#"    <node id="n{v}">"#)?;
        writeln!(out, r#"      <data key="label">{}</data>"#, escape(label.as_str()))?;
        writeln!(out, r#"      <data key="frequency">{}</data>"#, graph.frequency(v))?;
        writeln!(out, r#"      <data key="degree">{}</data>"#, degrees[v])?;
        if let Some(c) = communities {
            writeln!(out, r#"      <data key="community">{}</data>"#, c[v])?;
        }
        writeln!(out, "    </node>")?;
    }
    for e in view.edges() {
        writeln!(
            out,
            r#"    <edge source="n{}" target="n{}"><data key="distance">{}</data></edge>"#,
            e.source, e.target, e.distance
        )?;
    }
    writeln!(out, "  </graph>")?;
    writeln!(out, "</graphml>")?;
    out.flush()?;
    Ok(())
}

fn write_edge_csv<W: Write>(view: &ThresholdView<'_>, redact: bool, out: W) -> Result<()> {
    let graph = view.graph();
    let mut w = csv::Writer::from_writer(out);
    let map_csv = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["source", "target", "distance"]).map_err(map_csv)?;
    for e in view.edges() {
        w.write_record([
            node_label(graph, e.source as usize, redact),
            node_label(graph, e.target as usize, redact),
            e.distance.to_string(),
        ])
        .map_err(map_csv)?;
    }
    w.flush()?;
    Ok(())
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn write_dot<W: Write>(view: &ThresholdView<'_>, communities: Option<&[usize]>, redact: bool, mut out: W) -> Result<()> {
    let graph = view.graph();
    let degrees = degree_sequence(view);
    writeln!(out, "graph passwords {{")?;
    for v in 0..view.node_count() {
        let label = dot_quote(&node_label(graph, v, redact));
        write!(
            out,
            "  {v} [label={label}, frequency={}, degree={}",
            graph.frequency(v),
            degrees[v]
        )?;
        if let Some(c) = communities {
            write!(out, ", community={}", c[v])?;
        }
        writeln!(out, "];")?;
    }
    for e in view.edges() {
        writeln!(out, "  {} -- {} [distance={}];", e.source, e.target, e.distance)?;
    }
    writeln!(out, "}}")?;
    out.flush()?;
    Ok(())
}

// --- readers ---------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParsedNode {
    pub id: String,
    pub label: String,
    pub attributes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ParsedEdge {
    pub source: String,
    pub target: String,
    pub distance: u32,
}

/// Graph contents recovered from an exported file. Edge endpoints refer to
/// node ids, except for the edge CSV where they are node labels and no
/// node list exists.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParsedGraph {
    pub nodes: Vec<ParsedNode>,
    pub edges: Vec<ParsedEdge>,
}

pub fn parse_graph<R: BufRead>(format: GraphFormat, input: R) -> Result<ParsedGraph> {
    match format {
        GraphFormat::Gexf => parse_xml(input, XmlDialect::Gexf),
        GraphFormat::Graphml => parse_xml(input, XmlDialect::Graphml),
        GraphFormat::EdgeCsv => parse_edge_csv(input),
        GraphFormat::Dot => parse_dot(input),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum XmlDialect {
    Gexf,
    Graphml,
}

fn attr(e: &BytesStart<'_>, name: &str) -> Result<Option<String>> {
    for a in e.attributes() {
        let a = a.map_err(|err| Error::Format(err.to_string()))?;
        if a.key.as_ref() == name.as_bytes() {
            let v = a.unescape_value().map_err(|err| Error::Format(err.to_string()))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

fn required(e: &BytesStart<'_>, name: &str) -> Result<String> {
    attr(e, name)?.ok_or_else(|| {
        Error::Format(format!(
            "<{}> lacks `{name}`",
            String::from_utf8_lossy(e.name().as_ref())
        ))
    })
}

fn parse_distance(s: &str) -> Result<u32> {
    s.trim()
        .parse()
        .map_err(|_| Error::Format(format!("bad distance `{s}`")))
}

fn parse_xml<R: BufRead>(input: R, dialect: XmlDialect) -> Result<ParsedGraph> {
    let mut reader = Reader::from_reader(input);
    let mut buf = Vec::new();
    let mut graph = ParsedGraph::default();
    // element currently open: node or edge being filled
    let mut node: Option<ParsedNode> = None;
    let mut edge: Option<(String, String, Option<u32>)> = None;
    let mut data_key: Option<String> = None;
    let mut text = String::new();
    let mut saw_root = false;
    let xml_err = |e: quick_xml::Error| Error::Format(e.to_string());

    loop {
        let event = reader.read_event_into(&mut buf).map_err(xml_err)?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(event, Event::Empty(_));
                match (dialect, e.name().as_ref()) {
                    (XmlDialect::Gexf, b"gexf") | (XmlDialect::Graphml, b"graphml") => saw_root = true,
                    (_, b"node") => {
                        let n = ParsedNode {
                            id: required(e, "id")?,
                            label: attr(e, "label")?.unwrap_or_default(),
                            attributes: BTreeMap::new(),
                        };
                        if empty {
                            graph.nodes.push(n);
                        } else {
                            node = Some(n);
                        }
                    }
                    (_, b"edge") => {
                        let ed = (required(e, "source")?, required(e, "target")?, None);
                        if empty {
                            return Err(Error::Format("edge without distance".into()));
                        }
                        edge = Some(ed);
                    }
                    (XmlDialect::Gexf, b"attvalue") => {
                        let key = required(e, "for")?;
                        let value = required(e, "value")?;
                        if let Some(n) = node.as_mut() {
                            n.attributes.insert(key, value);
                        } else if let Some(ed) = edge.as_mut() {
                            if key == "distance" {
                                ed.2 = Some(parse_distance(&value)?);
                            }
                        }
                    }
                    (XmlDialect::Graphml, b"data") => {
                        data_key = Some(required(e, "key")?);
                        text.clear();
                    }
                    _ => {}
                }
            }
            Event::Text(t) => {
                if data_key.is_some() {
                    text.push_str(&t.unescape().map_err(xml_err)?);
                }
            }
            Event::End(ref e) => match e.name().as_ref() {
                b"node" => {
                    graph
                        .nodes
                        .push(node.take().ok_or_else(|| Error::Format("stray </node>".into()))?);
                }
                b"edge" => {
                    let (source, target, distance) =
                        edge.take().ok_or_else(|| Error::Format("stray </edge>".into()))?;
                    let distance =
                        distance.ok_or_else(|| Error::Format("edge without distance".into()))?;
                    graph.edges.push(ParsedEdge {
                        source,
                        target,
                        distance,
                    });
                }
                b"data" => {
                    let key = data_key.take().unwrap_or_default();
                    let value = std::mem::take(&mut text);
                    if let Some(n) = node.as_mut() {
                        if key == "label" {
                            n.label = value;
                        } else {
                            n.attributes.insert(key, value);
                        }
                    } else if let Some(ed) = edge.as_mut() {
                        if key == "distance" {
                            ed.2 = Some(parse_distance(&value)?);
                        }
                    }
                }
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if !saw_root {
        return Err(Error::Format("missing root element".into()));
    }
    Ok(graph)
}

fn parse_edge_csv<R: BufRead>(input: R) -> Result<ParsedGraph> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| Error::Format(e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["source", "target", "distance"] {
        return Err(Error::Format("edge CSV header must be source,target,distance".into()));
    }
    let mut graph = ParsedGraph::default();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
        graph.edges.push(ParsedEdge {
            source: rec[0].to_string(),
            target: rec[1].to_string(),
            distance: parse_distance(&rec[2])?,
        });
    }
    Ok(graph)
}

/// Splits `s` at the first unquoted occurrence of `pat`.
fn split_unquoted<'a>(s: &'a str, pat: &str) -> Option<(&'a str, &'a str)> {
    let mut in_quote = false;
    let mut escaped = false;
    for (i, c) in s.char_indices() {
        if in_quote {
            match (escaped, c) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_quote = false,
                _ => {}
            }
        } else if c == '"' {
            in_quote = true;
        } else if s[i..].starts_with(pat) {
            return Some((&s[..i], &s[i + pat.len()..]));
        }
    }
    None
}

fn unquote_dot(s: &str) -> String {
    let s = s.trim();
    let Some(inner) = s.strip_prefix('"').and_then(|r| r.strip_suffix('"')) else {
        return s.to_string();
    };
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            if let Some(next) = chars.next() {
                out.push(next);
            }
        } else {
            out.push(c);
        }
    }
    out
}

fn dot_attributes(body: &str) -> BTreeMap<String, String> {
    let mut attrs = BTreeMap::new();
    let mut rest = body;
    while !rest.trim().is_empty() {
        let (item, tail) = split_unquoted(rest, ",").unwrap_or((rest, ""));
        if let Some((k, v)) = split_unquoted(item, "=") {
            attrs.insert(k.trim().to_string(), unquote_dot(v));
        }
        rest = tail;
    }
    attrs
}

/// Reads the DOT dialect produced by [`export_graph`]: one statement per line.
fn parse_dot<R: BufRead>(input: R) -> Result<ParsedGraph> {
    let mut graph = ParsedGraph::default();
    let mut header = false;
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line == "}" {
            continue;
        }
        if line.starts_with("graph ") && line.ends_with('{') {
            header = true;
            continue;
        }
        let stmt = line.strip_suffix(';').unwrap_or(line);
        let (head, attrs) = match split_unquoted(stmt, "[") {
            Some((h, a)) => (h.trim(), dot_attributes(a.trim_end().strip_suffix(']').unwrap_or(a))),
            None => (stmt.trim(), BTreeMap::new()),
        };
        if let Some((a, b)) = head.split_once("--") {
            let distance = attrs
                .get("distance")
                .ok_or_else(|| Error::Format(format!("edge without distance: {line}")))?;
            graph.edges.push(ParsedEdge {
                source: a.trim().to_string(),
                target: b.trim().to_string(),
                distance: parse_distance(distance)?,
            });
        } else {
            let mut attributes = attrs;
            let label = attributes.remove("label").unwrap_or_default();
            graph.nodes.push(ParsedNode {
                id: head.to_string(),
                label,
                attributes,
            });
        }
    }
    if !header {
        return Err(Error::Format("missing `graph ... {` header".into()));
    }
    Ok(graph)
}

// --- reports ---------------------------------------------------------------

/// Rounds to six significant digits.
pub fn sig6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

fn ser_sig6<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(sig6(*x))
}

fn ser_sig6_opt<S: serde::Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&sig6(*v)),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::arg(format!("unknown report format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    #[serde(serialize_with = "ser_sig6")]
    pub exponent: f64,
    pub x_min: u64,
    pub sample_count: usize,
    #[serde(serialize_with = "ser_sig6")]
    pub log_likelihood: f64,
}

impl From<&PowerLawFit> for FitRecord {
    fn from(f: &PowerLawFit) -> Self {
        FitRecord {
            exponent: f.exponent,
            x_min: f.x_min,
            sample_count: f.sample_count,
            log_likelihood: f.log_likelihood,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub size: usize,
    pub gmax: u64,
    #[serde(serialize_with = "ser_sig6")]
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub dictionary: String,
    pub points: Vec<CurveRecord>,
}

impl From<&CrackingCurve> for CurveReport {
    fn from(c: &CrackingCurve) -> Self {
        CurveReport {
            dictionary: c.label.as_str().to_string(),
            points: c
                .points
                .iter()
                .map(|p| CurveRecord {
                    size: p.size,
                    gmax: p.gmax,
                    ratio: p.ratio,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominatingReport {
    pub method: String,
    pub size: usize,
    pub members: Vec<String>,
    pub covered_accounts: u64,
    pub total_accounts: u64,
    #[serde(serialize_with = "ser_sig6")]
    pub coverage_ratio: f64,
    #[serde(serialize_with = "ser_sig6_opt")]
    pub arnautov_bound: Option<f64>,
    pub is_dominating: bool,
}

impl DominatingReport {
    pub fn new(result: &DominatingSetResult, graph: &PasswordGraph, redact: bool) -> Self {
        let total = graph.total_accounts();
        DominatingReport {
            method: match result.method {
                DominatingMethod::Greedy => "greedy",
                DominatingMethod::Exact => "exact",
                DominatingMethod::Partial => "partial",
            }
            .to_string(),
            size: result.size,
            members: result
                .nodes
                .iter()
                .map(|&v| node_label(graph, v, redact))
                .collect(),
            covered_accounts: result.covered_accounts,
            total_accounts: total,
            coverage_ratio: result.covered_accounts as f64 / total as f64,
            arnautov_bound: result.arnautov_bound,
            is_dominating: result.is_dominating,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityRecord {
    pub node: usize,
    pub label: String,
    pub community: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityReport {
    pub community_count: usize,
    #[serde(serialize_with = "ser_sig6")]
    pub modularity: f64,
    pub nodes: Vec<CommunityRecord>,
}

impl CommunityReport {
    pub fn new(assignment: &CommunityAssignment, graph: &PasswordGraph, redact: bool) -> Self {
        CommunityReport {
            community_count: assignment.community_count,
            modularity: assignment.modularity,
            nodes: assignment
                .labels
                .iter()
                .enumerate()
                .map(|(node, &community)| CommunityRecord {
                    node,
                    label: node_label(graph, node, redact),
                    community,
                })
                .collect(),
        }
    }
}

/// Values that [`export_report`] can write.
#[derive(Debug, Clone, Copy)]
pub enum Report<'a> {
    Stats(&'a CorpusStats),
    Fit(&'a PowerLawFit),
    Curve(&'a CrackingCurve),
    DegreeRank(&'a [(usize, usize)]),
    Dominating(&'a DominatingReport),
    Communities(&'a CommunityReport),
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Writes a report. Field order is fixed; floats carry six significant digits.
pub fn export_report<W: Write>(report: Report<'_>, format: ReportFormat, mut out: W) -> Result<()> {
    match format {
        ReportFormat::Json => {
            match report {
                Report::Stats(s) => serde_json::to_writer_pretty(&mut out, s),
                Report::Fit(f) => serde_json::to_writer_pretty(&mut out, &FitRecord::from(f)),
                Report::Curve(c) => serde_json::to_writer_pretty(&mut out, &CurveReport::from(c)),
                Report::DegreeRank(r) => {
                    let rows: Vec<BTreeMap<&str, usize>> = r
                        .iter()
                        .map(|&(rank, degree)| BTreeMap::from([("rank", rank), ("degree", degree)]))
                        .collect();
                    serde_json::to_writer_pretty(&mut out, &rows)
                }
                Report::Dominating(d) => serde_json::to_writer_pretty(&mut out, d),
                Report::Communities(c) => serde_json::to_writer_pretty(&mut out, c),
            }
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            out.write_all(b"\n")?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            match report {
                Report::Stats(s) => {
                    w.write_record(["metric", "value"]).map_err(csv_err)?;
                    let c = &s.charclass_histogram;
                    let rows = [
                        ("unique_count", s.unique_count as u64),
                        ("total_accounts", s.total_accounts),
                        ("chars_lowercase", c.lowercase),
                        ("chars_uppercase", c.uppercase),
                        ("chars_digit", c.digit),
                        ("chars_other", c.other),
                    ];
                    for (k, v) in rows {
                        w.write_record([k.to_string(), v.to_string()]).map_err(csv_err)?;
                    }
                    for (len, count) in &s.length_histogram {
                        w.write_record([format!("length_{len}"), count.to_string()])
                            .map_err(csv_err)?;
                    }
                }
                Report::Fit(f) => {
                    w.serialize(FitRecord::from(f)).map_err(csv_err)?;
                }
                Report::Curve(c) => {
                    w.write_record(["size", "gmax", "ratio"]).map_err(csv_err)?;
                    for p in &c.points {
                        w.write_record([p.size.to_string(), p.gmax.to_string(), sig6(p.ratio).to_string()])
                            .map_err(csv_err)?;
                    }
                }
                Report::DegreeRank(r) => {
                    w.write_record(["rank", "degree"]).map_err(csv_err)?;
                    for (rank, degree) in r {
                        w.write_record([rank.to_string(), degree.to_string()]).map_err(csv_err)?;
                    }
                }
                Report::Dominating(d) => {
                    w.write_record(["order", "member"]).map_err(csv_err)?;
                    for (i, m) in d.members.iter().enumerate() {
                        w.write_record([(i + 1).to_string(), m.clone()]).map_err(csv_err)?;
                    }
                }
                Report::Communities(c) => {
                    w.write_record(["node", "label", "community"]).map_err(csv_err)?;
                    for r in &c.nodes {
                        w.serialize((r.node, &r.label, r.community)).map_err(csv_err)?;
                    }
                }
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Several curves over the same sizes as one table:
/// `size,gmax_<label>,ratio_<label>,...`. Curves must share their size column.
pub fn write_curves_side_by_side<W: Write>(curves: &[CrackingCurve], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["size".to_string()];
    for c in curves {
        header.push(format!("gmax_{}", c.label.as_str()));
        header.push(format!("ratio_{}", c.label.as_str()));
    }
    w.write_record(&header).map_err(csv_err)?;
    let rows = curves.first().map_or(0, |c| c.points.len());
    if curves.iter().any(|c| c.points.len() != rows) {
        return Err(Error::arg("curves differ in length"));
    }
    for i in 0..rows {
        let size = curves[0].points[i].size;
        let mut rec = vec![size.to_string()];
        for c in curves {
            let p = &c.points[i];
            if p.size != size {
                return Err(Error::arg("curves differ in their size schedule"));
            }
            rec.push(p.gmax.to_string());
            rec.push(sig6(p.ratio).to_string());
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
