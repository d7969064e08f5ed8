//! Timestamped edge streams: parsing, node interning and canonical ordering.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of a node in the global node universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(u32::try_from(i).expect("node index exceeds u32"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A single contact `(src, dst, time)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemporalEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub time: f64,
}

impl TemporalEdge {
    pub fn new(src: impl Into<NodeId>, dst: impl Into<NodeId>, time: f64) -> Self {
        Self {
            src: src.into(),
            dst: dst.into(),
            time,
        }
    }
}

/// Bidirectional mapping between external node identifiers and dense indices.
///
/// Indices are assigned in order of first appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeTable {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl NodeTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Table whose external names are the decimal indices `0..n`.
    pub fn with_anonymous(n: usize) -> Self {
        let mut table = Self::new();
        for i in 0..n {
            table.intern(&i.to_string());
        }
        table
    }

    pub fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = NodeId::from(self.names.len());
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: NodeId) -> Option<&str> {
        self.names.get(id.index()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (NodeId::from(i), n.as_str()))
    }

    /// Writes the `index,node_id` table.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "node_id"])
            .and_then(|_| {
                self.iter()
                    .try_for_each(|(id, name)| w.write_record([id.to_string().as_str(), name]))
            })
            .map_err(|e| Error::Output(e.to_string()))?;
        w.flush().map_err(|e| Error::Output(e.to_string()))
    }
}

/// Column separator of an edge-list file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeListFormat {
    /// Comma if the line contains one, whitespace otherwise.
    #[default]
    Auto,
    Whitespace,
    Comma,
}

impl FromStr for EdgeListFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Self::Auto),
            "whitespace" | "space" | "tsv" => Ok(Self::Whitespace),
            "comma" | "csv" => Ok(Self::Comma),
            _ => Err(Error::Unknown {
                kind: "edge-list format",
                name: s.to_owned(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    pub format: EdgeListFormat,
    pub directed: bool,
    /// Skip malformed lines instead of failing on the first one.
    pub skip_malformed: bool,
}

/// A sequence of temporal edges over a fixed node universe.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeStream {
    pub edges: Vec<TemporalEdge>,
    pub nodes: NodeTable,
    pub directed: bool,
    /// Lines dropped under [`ParseOptions::skip_malformed`].
    pub skipped_lines: usize,
}

impl EdgeStream {
    /// Builds a stream over an anonymous universe of `num_nodes` nodes.
    pub fn from_edges(edges: Vec<TemporalEdge>, num_nodes: usize, directed: bool) -> Self {
        Self {
            edges,
            nodes: NodeTable::with_anonymous(num_nodes),
            directed,
            skipped_lines: 0,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.edges.is_sorted_by(|a, b| a.time <= b.time)
    }

    /// Stable sort by timestamp. Duplicates are kept and equal timestamps keep
    /// their input order.
    pub fn canonicalize(mut self) -> Self {
        self.edges.sort_by(|a, b| a.time.total_cmp(&b.time));
        self
    }
}

/// Parses an edge-list file. See [`parse_edge_list`].
pub fn parse_edge_stream(path: impl AsRef<Path>, opts: ParseOptions) -> Result<EdgeStream> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(file), opts).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Parses `src dst time [weight]` records, one per line. Lines starting with
/// `%` or `#` and blank lines are ignored. The weight column is ignored.
pub fn parse_edge_list<R: BufRead>(reader: R, opts: ParseOptions) -> Result<EdgeStream> {
    let mut nodes = NodeTable::new();
    let mut edges = Vec::new();
    let mut skipped = 0;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<reader>", e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') || trimmed.starts_with('#') {
            continue;
        }
        match parse_record(trimmed, opts.format) {
            Ok((src, dst, time)) => {
                let src = nodes.intern(src);
                let dst = nodes.intern(dst);
                edges.push(TemporalEdge { src, dst, time });
            }
            Err(reason) if opts.skip_malformed => {
                log::debug!("skipping line {}: {reason}", lineno + 1);
                skipped += 1;
            }
            Err(reason) => {
                return Err(Error::MalformedLine {
                    line: lineno + 1,
                    reason,
                })
            }
        }
    }
    Ok(EdgeStream {
        edges,
        nodes,
        directed: opts.directed,
        skipped_lines: skipped,
    })
}

fn parse_record(
    line: &str,
    format: EdgeListFormat,
) -> std::result::Result<(&str, &str, f64), String> {
    let comma = match format {
        EdgeListFormat::Comma => true,
        EdgeListFormat::Whitespace => false,
        EdgeListFormat::Auto => line.contains(','),
    };
    let fields: Vec<&str> = if comma {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    };
    if !(3..=4).contains(&fields.len()) {
        return Err(format!("expected 3 or 4 columns, found {}", fields.len()));
    }
    let (src, dst) = (fields[0], fields[1]);
    if src.is_empty() || dst.is_empty() {
        return Err("empty node identifier".into());
    }
    let time: f64 = fields[2]
        .parse()
        .map_err(|_| format!("non-numeric timestamp `{}`", fields[2]))?;
    if !time.is_finite() {
        return Err(format!("non-finite timestamp `{}`", fields[2]));
    }
    if time < 0.0 {
        return Err(format!("negative timestamp {time}"));
    }
    Ok((src, dst, time))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(s: &str) -> Result<EdgeStream> {
        parse_edge_list(s.as_bytes(), ParseOptions::default())
    }

    #[test]
    fn parses_simple_list() {
        let s = parse("a b 1\nb c 2").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.num_nodes(), 3);
        assert_eq!(s.edges[1], TemporalEdge::new(1usize, 2usize, 2.0));
        assert_eq!(s.nodes.name(NodeId(2)), Some("c"));
    }

    #[test]
    fn empty_input() {
        let s = parse("").unwrap();
        assert!(s.is_empty());
        assert_eq!(s.num_nodes(), 0);
    }

    #[test]
    fn negative_timestamp_is_rejected() {
        match parse("a b -5") {
            Err(Error::MalformedLine { line: 1, reason }) => assert!(reason.contains("negative")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_numeric_timestamp_reports_line() {
        let err = parse("a b 1\n# note\na c x").unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 3, .. }));
    }

    #[test]
    fn skip_policy_counts_bad_lines() {
        let opts = ParseOptions {
            skip_malformed: true,
            ..Default::default()
        };
        let s = parse_edge_list("a b 1\na b\nb c nan\nc d 4".as_bytes(), opts).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.skipped_lines, 2);
    }

    #[test]
    fn comments_commas_and_weight_column() {
        let s = parse("% header\n1,2,10,0.5\n  2 , 3 , 11\n# x\n3 1 12 7").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.edges[0].time, 10.0);
        assert_eq!(s.num_nodes(), 3);
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = parse_edge_stream("/nonexistent/edges.txt", ParseOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn canonicalize_sorts_stably_and_keeps_duplicates() {
        let s = parse("x y 3\na b 1\nb c 2").unwrap().canonicalize();
        let times: Vec<f64> = s.edges.iter().map(|e| e.time).collect();
        assert_eq!(times, vec![1.0, 2.0, 3.0]);

        let s = parse("a b 5\na b 5").unwrap().canonicalize();
        assert_eq!(s.len(), 2);

        let s = parse("a b 5\nc d 5").unwrap().canonicalize();
        assert_eq!(s.nodes.name(s.edges[0].src), Some("a"));
        assert_eq!(s.nodes.name(s.edges[1].src), Some("c"));
    }

    #[test]
    fn node_table_csv() {
        let s = parse("a b 1").unwrap();
        let mut buf = Vec::new();
        s.nodes.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "index,node_id\n0,a\n1,b\n");
    }

    proptest! {
        #[test]
        fn canonicalize_is_idempotent(times in prop::collection::vec(0u8..20, 0..60)) {
            let edges = times
                .iter()
                .enumerate()
                .map(|(i, &t)| TemporalEdge::new(i % 7, (i * 3) % 7, t as f64))
                .collect();
            let once = EdgeStream::from_edges(edges, 7, true).canonicalize();
            prop_assert!(once.is_canonical());
            prop_assert_eq!(once.len(), times.len());
            let twice = once.clone().canonicalize();
            prop_assert_eq!(once, twice);
        }
    }
}
