//! Network serialization: canonical edge/node CSV (both directions), GEXF
//! (both directions), DOT and JSON, plus CSV writers for analytic reports.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, Event};
use quick_xml::{Reader, Writer};
use serde::Serialize;

use crate::category::Category;
use crate::centrality::CentralityReport;
use crate::metrics::degree_sequence;
use crate::network::{CollabNetwork, NetworkError};
use crate::InstitutionId;

pub const SCHEMA_VERSION: u32 = 1;
pub const EDGE_HEADER: [&str; 3] = ["institution_a", "institution_b", "weight"];
pub const NODE_HEADER: [&str; 3] = ["institution_id", "name", "category"];

const GEXF_NS: &str = "http://gexf.net/1.3";
const GEXF_VIZ_NS: &str = "http://gexf.net/1.3/viz";

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{file} line {line}: {reason}")]
    Malformed { file: &'static str, line: u64, reason: String },
    #[error("GEXF: {0}")]
    Gexf(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("refusing to write an empty network")]
    EmptyNetwork,
}

fn io_at(path: &Path) -> impl FnOnce(std::io::Error) -> ExportError + '_ {
    move |source| ExportError::Io { path: path.to_path_buf(), source }
}

fn create(path: &Path) -> Result<BufWriter<File>, ExportError> {
    File::create(path).map(BufWriter::new).map_err(io_at(path))
}

fn open(path: &Path) -> Result<BufReader<File>, ExportError> {
    File::open(path).map(BufReader::new).map_err(io_at(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Gexf,
    Dot,
    /// Edge CSV; the node CSV goes next to it.
    Csv,
    Json,
}

impl ExportFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()?.to_str()?.parse().ok()
    }
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gexf" => Ok(ExportFormat::Gexf),
            "dot" | "gv" => Ok(ExportFormat::Dot),
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!("unknown export format `{other}`")),
        }
    }
}

// ---------------------------------------------------------------- CSV

/// Sorted `institution_a,institution_b,weight` rows with `a < b`.
pub fn write_edge_csv<W: Write>(net: &CollabNetwork, writer: W) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(EDGE_HEADER)?;
    for (a, b, weight) in net.edges() {
        w.write_record([a.as_str(), b.as_str(), &weight.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// `institution_id,name,category` rows sorted by ID.
pub fn write_node_csv<W: Write>(net: &CollabNetwork, writer: W) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(NODE_HEADER)?;
    for (id, info) in net.nodes() {
        w.write_record([id.as_str(), info.name.as_str(), info.category.token()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn csv_rows<R: Read>(
    reader: R,
    file: &'static str,
    header: [&str; 3],
) -> Result<Vec<(u64, [String; 3])>, ExportError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(reader);
    let mut rows = Vec::new();
    let mut seen_header = false;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if !seen_header {
            if record.iter().map(str::trim).ne(header) {
                return Err(ExportError::Malformed {
                    file,
                    line,
                    reason: format!("expected header `{}`", header.join(",")),
                });
            }
            seen_header = true;
            continue;
        }
        if record.len() != 3 {
            return Err(ExportError::Malformed {
                file,
                line,
                reason: format!("expected 3 columns, found {}", record.len()),
            });
        }
        rows.push((line, [0, 1, 2].map(|i| record[i].trim().to_string())));
    }
    Ok(rows)
}

/// Loads a network from node and edge CSV streams. Every node-list entry
/// becomes a node, so isolates survive a round trip.
pub fn read_network_csv<E: Read, N: Read>(edges: E, nodes: N) -> Result<CollabNetwork, ExportError> {
    let mut net = CollabNetwork::new();
    for (line, [id, name, category]) in csv_rows(nodes, "nodes", NODE_HEADER)? {
        if id.is_empty() {
            return Err(ExportError::Malformed { file: "nodes", line, reason: "empty institution_id".into() });
        }
        let category: Category = category
            .parse()
            .map_err(|e: crate::category::UnknownCategory| ExportError::Malformed {
                file: "nodes",
                line,
                reason: e.to_string(),
            })?;
        net.add_node(id, name, category)?;
    }
    for (line, [a, b, weight]) in csv_rows(edges, "edges", EDGE_HEADER)? {
        let weight: u64 = weight.parse().map_err(|_| ExportError::Malformed {
            file: "edges",
            line,
            reason: format!("weight `{weight}` is not a positive integer"),
        })?;
        net.add_edge(&a, &b, weight)?;
    }
    Ok(net)
}

pub fn export_edge_csv(net: &CollabNetwork, path: impl AsRef<Path>) -> Result<(), ExportError> {
    let path = path.as_ref();
    write_edge_csv(net, create(path)?)
}

pub fn export_node_csv(net: &CollabNetwork, path: impl AsRef<Path>) -> Result<(), ExportError> {
    let path = path.as_ref();
    write_node_csv(net, create(path)?)
}

pub fn import_csv(edges: impl AsRef<Path>, nodes: impl AsRef<Path>) -> Result<CollabNetwork, ExportError> {
    read_network_csv(open(edges.as_ref())?, open(nodes.as_ref())?)
}

/// `edges.csv` -> `edges.nodes.csv`.
pub fn sibling_node_path(edges: &Path) -> PathBuf {
    let stem = edges.file_stem().and_then(|s| s.to_str()).unwrap_or("network");
    edges.with_file_name(format!("{stem}.nodes.csv"))
}

// ---------------------------------------------------------------- GEXF

fn xml_err<E: std::fmt::Display>(e: E) -> ExportError {
    ExportError::Gexf(e.to_string())
}

fn hex_color(c: Category) -> String {
    let (r, g, b) = c.color();
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// GEXF 1.3 undirected graph. Nodes carry `category` and `weighted_degree`
/// attributes, a `viz:size` equal to the weighted degree and the category
/// colour; edges carry their weight.
pub fn write_gexf<W: Write>(net: &CollabNetwork, writer: W) -> Result<(), ExportError> {
    let mut w = Writer::new_with_indent(writer, b' ', 2);
    let ev = |w: &mut Writer<W>, e: Event| w.write_event(e).map_err(xml_err);

    ev(&mut w, Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))?;
    ev(
        &mut w,
        Event::Start(BytesStart::new("gexf").with_attributes([
            ("xmlns", GEXF_NS),
            ("xmlns:viz", GEXF_VIZ_NS),
            ("version", "1.3"),
        ])),
    )?;
    ev(&mut w, Event::Start(BytesStart::new("meta")))?;
    ev(&mut w, Event::Start(BytesStart::new("creator")))?;
    ev(&mut w, Event::Text(quick_xml::events::BytesText::new("collabnet")))?;
    ev(&mut w, Event::End(BytesEnd::new("creator")))?;
    ev(&mut w, Event::End(BytesEnd::new("meta")))?;
    ev(
        &mut w,
        Event::Start(BytesStart::new("graph").with_attributes([("defaultedgetype", "undirected"), ("mode", "static")])),
    )?;

    ev(&mut w, Event::Start(BytesStart::new("attributes").with_attributes([("class", "node")])))?;
    for (id, title, ty) in [("0", "category", "string"), ("1", "weighted_degree", "long")] {
        ev(
            &mut w,
            Event::Empty(BytesStart::new("attribute").with_attributes([("id", id), ("title", title), ("type", ty)])),
        )?;
    }
    ev(&mut w, Event::End(BytesEnd::new("attributes")))?;

    ev(&mut w, Event::Start(BytesStart::new("nodes")))?;
    for (id, info) in net.nodes() {
        let wd = info.weighted_degree().to_string();
        let (r, g, b) = info.category.color();
        ev(
            &mut w,
            Event::Start(BytesStart::new("node").with_attributes([("id", id.as_str()), ("label", info.name.as_str())])),
        )?;
        ev(&mut w, Event::Start(BytesStart::new("attvalues")))?;
        ev(
            &mut w,
            Event::Empty(BytesStart::new("attvalue").with_attributes([("for", "0"), ("value", info.category.token())])),
        )?;
        ev(&mut w, Event::Empty(BytesStart::new("attvalue").with_attributes([("for", "1"), ("value", wd.as_str())])))?;
        ev(&mut w, Event::End(BytesEnd::new("attvalues")))?;
        let size = format!("{:.1}", info.weighted_degree() as f64);
        ev(&mut w, Event::Empty(BytesStart::new("viz:size").with_attributes([("value", size.as_str())])))?;
        let (r, g, b) = (r.to_string(), g.to_string(), b.to_string());
        ev(
            &mut w,
            Event::Empty(BytesStart::new("viz:color").with_attributes([
                ("r", r.as_str()),
                ("g", g.as_str()),
                ("b", b.as_str()),
            ])),
        )?;
        ev(&mut w, Event::End(BytesEnd::new("node")))?;
    }
    ev(&mut w, Event::End(BytesEnd::new("nodes")))?;

    ev(&mut w, Event::Start(BytesStart::new("edges")))?;
    for (i, (a, b, weight)) in net.edges().enumerate() {
        let (i, weight) = (i.to_string(), weight.to_string());
        ev(
            &mut w,
            Event::Empty(BytesStart::new("edge").with_attributes([
                ("id", i.as_str()),
                ("source", a.as_str()),
                ("target", b.as_str()),
                ("weight", weight.as_str()),
            ])),
        )?;
    }
    ev(&mut w, Event::End(BytesEnd::new("edges")))?;
    ev(&mut w, Event::End(BytesEnd::new("graph")))?;
    ev(&mut w, Event::End(BytesEnd::new("gexf")))?;
    w.into_inner().write_all(b"\n").map_err(xml_err)?;
    Ok(())
}

fn attrs(e: &BytesStart) -> Result<BTreeMap<String, String>, ExportError> {
    e.attributes()
        .map(|a| {
            let a = a.map_err(xml_err)?;
            let key = String::from_utf8_lossy(a.key.as_ref()).into_owned();
            let value = a.unescape_value().map_err(xml_err)?.into_owned();
            Ok((key, value))
        })
        .collect()
}

/// Reads a GEXF document written by [`write_gexf`] (or any GEXF whose nodes
/// carry a `category` attribute and whose edge weights are integers).
pub fn read_gexf(text: &str) -> Result<CollabNetwork, ExportError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);

    let mut category_attr: Option<String> = None;
    let mut in_node_attributes = false;
    // (id, label, category) of the node being read
    let mut current: Option<(String, String, Option<String>)> = None;
    let mut net = CollabNetwork::new();
    let mut pending_edges = Vec::new();

    loop {
        let event = reader.read_event().map_err(xml_err)?;
        let (start, is_empty) = match &event {
            Event::Start(e) => (Some(e.clone()), false),
            Event::Empty(e) => (Some(e.clone()), true),
            Event::End(e) => {
                match e.name().as_ref() {
                    b"attributes" => in_node_attributes = false,
                    b"node" => finish_node(&mut net, current.take())?,
                    _ => {}
                }
                continue;
            }
            Event::Eof => break,
            _ => continue,
        };
        let Some(e) = start else { continue };
        let a = attrs(&e)?;
        match e.name().as_ref() {
            b"attributes" => in_node_attributes = a.get("class").is_some_and(|c| c == "node"),
            b"attribute" if in_node_attributes => {
                if a.get("title").map(String::as_str) == Some("category") {
                    category_attr = a.get("id").cloned();
                }
            }
            b"node" => {
                let id = a.get("id").cloned().ok_or_else(|| ExportError::Gexf("node without id".into()))?;
                let label = a.get("label").cloned().unwrap_or_else(|| id.clone());
                current = Some((id, label, None));
                if is_empty {
                    finish_node(&mut net, current.take())?;
                }
            }
            b"attvalue" => {
                if let Some((_, _, cat)) = current.as_mut() {
                    if a.contains_key("for") && a.get("for") == category_attr.as_ref() {
                        *cat = a.get("value").cloned();
                    }
                }
            }
            b"edge" => {
                let get = |k: &str| {
                    a.get(k).cloned().ok_or_else(|| ExportError::Gexf(format!("edge without {k}")))
                };
                let weight_text = a.get("weight").cloned().unwrap_or_else(|| "1".into());
                let weight: f64 = weight_text.parse().map_err(xml_err)?;
                if weight.fract() != 0.0 || weight < 1.0 {
                    return Err(ExportError::Gexf(format!("non-integer weight `{weight_text}`")));
                }
                pending_edges.push((get("source")?, get("target")?, weight as u64));
            }
            _ => {}
        }
    }
    for (a, b, w) in pending_edges {
        net.add_edge(&a, &b, w)?;
    }
    Ok(net)
}

fn finish_node(net: &mut CollabNetwork, node: Option<(String, String, Option<String>)>) -> Result<(), ExportError> {
    let Some((id, label, category)) = node else { return Ok(()) };
    let token = category.ok_or_else(|| ExportError::Gexf(format!("node `{id}` has no category")))?;
    let category: Category = token.parse().map_err(xml_err)?;
    net.add_node(id, label, category)?;
    Ok(())
}

/// Writes a GEXF file; the network must have at least one node.
pub fn export_gexf(net: &CollabNetwork, path: impl AsRef<Path>) -> Result<(), ExportError> {
    if net.is_empty() {
        return Err(ExportError::EmptyNetwork);
    }
    let path = path.as_ref();
    write_gexf(net, create(path)?)
}

pub fn import_gexf(path: impl AsRef<Path>) -> Result<CollabNetwork, ExportError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(io_at(path))?;
    read_gexf(&text)
}

// ---------------------------------------------------------------- DOT / JSON

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn write_dot<W: Write>(net: &CollabNetwork, mut w: W) -> std::io::Result<()> {
    writeln!(w, "graph collaboration {{")?;
    writeln!(w, "  node [style=filled, fontcolor=white];")?;
    for (id, info) in net.nodes() {
        writeln!(
            w,
            "  {} [label={}, category={}, weighted_degree={}, fillcolor={}];",
            dot_quote(id.as_str()),
            dot_quote(&info.name),
            dot_quote(info.category.token()),
            info.weighted_degree(),
            dot_quote(&hex_color(info.category)),
        )?;
    }
    for (a, b, weight) in net.edges() {
        writeln!(w, "  {} -- {} [weight={weight}, penwidth={weight}];", dot_quote(a.as_str()), dot_quote(b.as_str()))?;
    }
    writeln!(w, "}}")
}

#[derive(Serialize)]
struct JsonNode<'a> {
    id: &'a str,
    name: &'a str,
    category: Category,
    weighted_degree: u64,
}

#[derive(Serialize)]
struct JsonEdge<'a> {
    source: &'a str,
    target: &'a str,
    weight: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    subjects: Option<BTreeMap<&'static str, u64>>,
}

#[derive(Serialize)]
struct JsonNetwork<'a> {
    schema_version: u32,
    nodes: Vec<JsonNode<'a>>,
    edges: Vec<JsonEdge<'a>>,
}

pub fn network_json(net: &CollabNetwork) -> serde_json::Value {
    let doc = JsonNetwork {
        schema_version: SCHEMA_VERSION,
        nodes: net
            .nodes()
            .map(|(id, n)| JsonNode {
                id: id.as_str(),
                name: &n.name,
                category: n.category,
                weighted_degree: n.weighted_degree(),
            })
            .collect(),
        edges: net
            .edges()
            .map(|(a, b, weight)| JsonEdge {
                source: a.as_str(),
                target: b.as_str(),
                weight,
                subjects: net
                    .edge_subjects(a, b)
                    .map(|per| per.iter().map(|(s, c)| (s.name(), *c)).collect()),
            })
            .collect(),
    };
    serde_json::to_value(doc).expect("network serializes")
}

/// Wraps any serializable payload as `{"schema_version": 1, "<key>": payload}`.
pub fn versioned_json<T: Serialize>(key: &str, payload: &T) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    map.insert("schema_version".into(), SCHEMA_VERSION.into());
    map.insert(key.into(), serde_json::to_value(payload).expect("payload serializes"));
    serde_json::Value::Object(map)
}

/// Writes the network in `format`. CSV writes the node list beside the edge list.
pub fn export_network(net: &CollabNetwork, format: ExportFormat, path: impl AsRef<Path>) -> Result<(), ExportError> {
    let path = path.as_ref();
    match format {
        ExportFormat::Gexf => export_gexf(net, path),
        ExportFormat::Dot => {
            let mut w = create(path)?;
            write_dot(net, &mut w).and_then(|_| w.flush()).map_err(io_at(path))
        }
        ExportFormat::Csv => {
            export_edge_csv(net, path)?;
            export_node_csv(net, sibling_node_path(path))
        }
        ExportFormat::Json => {
            let mut w = create(path)?;
            serde_json::to_writer_pretty(&mut w, &network_json(net))?;
            w.write_all(b"\n").and_then(|_| w.flush()).map_err(io_at(path))
        }
    }
}

// ---------------------------------------------------------------- reports

/// `institution,degree,weighted_degree`, ordered by degree descending.
pub fn write_degree_csv<W: Write>(net: &CollabNetwork, writer: W) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["institution", "degree", "weighted_degree"])?;
    for entry in degree_sequence(net, false) {
        let wd = net.weighted_degree(&entry.institution);
        w.write_record([entry.institution.as_str(), &entry.degree.to_string(), &wd.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// `rank,institution_id,name,category,score` for the first `k` entries.
pub fn write_centrality_csv<W: Write>(
    net: &CollabNetwork,
    report: &CentralityReport,
    k: usize,
    writer: W,
) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["rank", "institution_id", "name", "category", "score"])?;
    for (rank, entry) in report.top_k(k).iter().enumerate() {
        let category = net.node(&entry.institution).map_or("", |n| n.category.token());
        w.write_record([
            &(rank + 1).to_string(),
            entry.institution.as_str(),
            entry.name.as_str(),
            category,
            &entry.score.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Canonical text form used to compare networks: node CSV then edge CSV.
pub fn canonical_text(net: &CollabNetwork) -> String {
    let mut out = Vec::new();
    write_node_csv(net, &mut out).expect("in-memory write");
    write_edge_csv(net, &mut out).expect("in-memory write");
    String::from_utf8(out).expect("utf-8")
}

/// Resolves user-supplied institution keys (IDs or names).
pub fn resolve_all(net: &CollabNetwork, keys: &[&str]) -> Result<Vec<InstitutionId>, NetworkError> {
    keys.iter().map(|k| net.lookup(k)).collect()
}
