//! Simple undirected graphs, dataset containers, and the two text formats
//! (edge lists and the TU raw-file convention).

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// A simple undirected graph over nodes `0..node_count`.
///
/// Immutable after construction: no self-loops, no duplicate edges, and
/// adjacency is symmetric by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    /// Deduplicated edges, stored as (u, v) with u < v, sorted.
    edges: Vec<(u32, u32)>,
    /// CSR neighbor lists: `targets[offsets[v]..offsets[v+1]]` is sorted.
    offsets: Vec<u32>,
    targets: Vec<u32>,
    /// Packed `u * node_count + v` keys (u < v) for O(1) membership tests.
    edge_keys: HashSet<u64>,
}

impl Graph {
    /// Builds a graph from unordered endpoint pairs.
    ///
    /// Duplicate edges collapse (set semantics). Self-loops and out-of-range
    /// endpoints are rejected.
    pub fn new<I>(node_count: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for (a, b) in pairs {
            if a == b {
                return Err(Error::SelfLoop { u: a as usize });
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if v as usize >= node_count {
                return Err(Error::EndpointRange {
                    index: v as usize,
                    node_count,
                });
            }
            edges.push((u, v));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self::from_clean_edges(node_count, edges))
    }

    /// `edges` must already be sorted, deduplicated, in-range, (u, v) with u < v.
    fn from_clean_edges(node_count: usize, edges: Vec<(u32, u32)>) -> Self {
        let mut degrees = vec![0u32; node_count];
        for &(u, v) in &edges {
            degrees[u as usize] += 1;
            degrees[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0u32);
        for v in 0..node_count {
            offsets.push(offsets[v] + degrees[v]);
        }
        let mut cursor: Vec<u32> = offsets[..node_count].to_vec();
        let mut targets = vec![0u32; 2 * edges.len()];
        for &(u, v) in &edges {
            targets[cursor[u as usize] as usize] = v;
            cursor[u as usize] += 1;
            targets[cursor[v as usize] as usize] = u;
            cursor[v as usize] += 1;
        }
        for v in 0..node_count {
            targets[offsets[v] as usize..offsets[v + 1] as usize].sort_unstable();
        }
        let n = node_count as u64;
        let edge_keys = edges
            .iter()
            .map(|&(u, v)| u as u64 * n + v as u64)
            .collect();
        Self {
            node_count,
            edges,
            offsets,
            targets,
            edge_keys,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as (u, v) pairs with u < v, sorted lexicographically.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        if a == b {
            return false;
        }
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.edge_keys
            .contains(&(u as u64 * self.node_count as u64 + v as u64))
    }

    /// Sorted neighbors of `v`.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        let lo = self.offsets[v as usize] as usize;
        let hi = self.offsets[v as usize + 1] as usize;
        &self.targets[lo..hi]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.neighbors(v).len()
    }

    /// Per-node degrees; their sum equals `2 * edge_count`.
    pub fn degree_sequence(&self) -> Vec<usize> {
        (0..self.node_count)
            .map(|v| self.degree(v as u32))
            .collect()
    }

    /// Row-major adjacency bitset, `words_per_row` u64 words per node.
    pub(crate) fn adjacency_bits(&self) -> AdjacencyBits {
        let words = self.node_count.div_ceil(64);
        let mut bits = vec![0u64; words * self.node_count];
        for &(u, v) in &self.edges {
            bits[u as usize * words + (v as usize >> 6)] |= 1 << (v & 63);
            bits[v as usize * words + (u as usize >> 6)] |= 1 << (u & 63);
        }
        AdjacencyBits {
            words_per_row: words,
            bits,
        }
    }

    /// Serializes to the edge-list text format: a `#` header carrying the
    /// node count, then sorted `u v` lines.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# nodes: {}", self.node_count);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

pub(crate) struct AdjacencyBits {
    pub words_per_row: usize,
    bits: Vec<u64>,
}

impl AdjacencyBits {
    pub fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words_per_row..(v + 1) * self.words_per_row]
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.row(u)[v >> 6] & (1 << (v & 63)) != 0
    }
}

/// Counts of malformed input constructs dropped during parsing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseDiagnostics {
    pub self_loops_dropped: usize,
    pub duplicate_edges_dropped: usize,
}

/// Parses the edge-list text format: one `u v` pair per line, `#` lines
/// ignored. `node_count` defaults to `1 + max index`. Self-loop lines are
/// dropped and counted in the diagnostics, as are duplicate edges.
pub fn parse_edge_list(text: &str, node_count: Option<usize>) -> Result<(Graph, ParseDiagnostics)> {
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut diag = ParseDiagnostics::default();
    let mut max_index: Option<usize> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let u = parse_index(tokens.next(), lineno + 1)?;
        let v = parse_index(tokens.next(), lineno + 1)?;
        if let Some(extra) = tokens.next() {
            return Err(Error::ParseToken {
                line: lineno + 1,
                token: extra.to_string(),
            });
        }
        if let Some(n) = node_count {
            for idx in [u, v] {
                if idx >= n {
                    return Err(Error::IndexRange {
                        line: lineno + 1,
                        index: idx,
                        node_count: n,
                    });
                }
            }
        }
        max_index = Some(max_index.map_or(u.max(v), |m: usize| m.max(u.max(v))));
        if u == v {
            diag.self_loops_dropped += 1;
            continue;
        }
        edges.push((u.min(v) as u32, u.max(v) as u32));
    }
    let n = node_count.unwrap_or_else(|| max_index.map_or(0, |m| m + 1));
    edges.sort_unstable();
    let before = edges.len();
    edges.dedup();
    diag.duplicate_edges_dropped = before - edges.len();
    Ok((Graph::from_clean_edges(n, edges), diag))
}

fn parse_index(token: Option<&str>, line: usize) -> Result<usize> {
    let token = token.ok_or_else(|| Error::ParseToken {
        line,
        token: "<missing>".to_string(),
    })?;
    token.parse::<usize>().map_err(|_| Error::ParseToken {
        line,
        token: token.to_string(),
    })
}

/// An ordered list of graphs with optional class labels in `1..=class_count`.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub graphs: Vec<Graph>,
    pub labels: Option<Vec<usize>>,
    pub class_count: usize,
}

impl LabeledDataset {
    pub fn new(graphs: Vec<Graph>, labels: Option<Vec<usize>>) -> Result<Self> {
        let class_count = match &labels {
            Some(ls) => {
                if ls.len() != graphs.len() {
                    return Err(Error::InvalidDataset(format!(
                        "{} labels for {} graphs",
                        ls.len(),
                        graphs.len()
                    )));
                }
                let max = ls.iter().copied().max().unwrap_or(0);
                if ls.iter().any(|&l| l == 0 || l > max) {
                    return Err(Error::InvalidDataset(
                        "class labels must lie in 1..=C".to_string(),
                    ));
                }
                max
            }
            None => 0,
        };
        Ok(Self {
            graphs,
            labels,
            class_count,
        })
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Indices of graphs carrying class label `c`.
    pub fn class_members(&self, c: usize) -> Vec<usize> {
        match &self.labels {
            Some(ls) => (0..self.graphs.len()).filter(|&i| ls[i] == c).collect(),
            None => Vec::new(),
        }
    }
}

/// Parses the TU raw-file convention from `dir`: `NAME_A.txt` (comma-separated
/// 1-based global edge pairs), `NAME_graph_indicator.txt` (1-based graph id per
/// node), `NAME_graph_labels.txt` (one label per graph).
///
/// Node indices are shifted to 0-based local indices per graph; labels are
/// remapped to contiguous `1..=C` in sorted order of the raw values.
pub fn parse_tu_dataset(dir: &Path, name: &str) -> Result<(LabeledDataset, ParseDiagnostics)> {
    let read = |suffix: &str| -> Result<String> {
        let path = dir.join(format!("{name}_{suffix}.txt"));
        if !path.is_file() {
            return Err(Error::MissingFile(path));
        }
        fs::read_to_string(&path).map_err(|source| Error::Io { path, source })
    };
    let a_text = read("A")?;
    let indicator_text = read("graph_indicator")?;
    let labels_text = read("graph_labels")?;

    // indicator[i] = graph id (1-based) of global node i+1
    let mut indicator: Vec<usize> = Vec::new();
    for (lineno, line) in indicator_text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let id: usize = line.parse().map_err(|_| Error::ParseToken {
            line: lineno + 1,
            token: line.to_string(),
        })?;
        if id == 0 {
            return Err(Error::InvalidDataset(
                "graph indicator ids are 1-based".to_string(),
            ));
        }
        indicator.push(id);
    }
    let graph_count = indicator.iter().copied().max().unwrap_or(0);
    if graph_count == 0 {
        return Err(Error::InvalidDataset("empty graph indicator".to_string()));
    }

    // Local node index = rank of the global node within its graph.
    let mut local_index = vec![0u32; indicator.len()];
    let mut node_counts = vec![0usize; graph_count];
    for (global, &gid) in indicator.iter().enumerate() {
        local_index[global] = node_counts[gid - 1] as u32;
        node_counts[gid - 1] += 1;
    }

    let mut per_graph_edges: Vec<Vec<(u32, u32)>> = vec![Vec::new(); graph_count];
    let mut diag = ParseDiagnostics::default();
    for (lineno, line) in a_text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let u = parse_tu_node(parts.next(), lineno + 1, indicator.len())?;
        let v = parse_tu_node(parts.next(), lineno + 1, indicator.len())?;
        if parts.next().is_some() {
            return Err(Error::ParseToken {
                line: lineno + 1,
                token: line.to_string(),
            });
        }
        let (gu, gv) = (indicator[u - 1], indicator[v - 1]);
        if gu != gv {
            return Err(Error::InvalidDataset(format!(
                "edge ({u}, {v}) crosses graphs {gu} and {gv}"
            )));
        }
        if u == v {
            diag.self_loops_dropped += 1;
            continue;
        }
        let (a, b) = (local_index[u - 1], local_index[v - 1]);
        per_graph_edges[gu - 1].push((a.min(b), a.max(b)));
    }

    let mut graphs = Vec::with_capacity(graph_count);
    for (gid, mut edges) in per_graph_edges.into_iter().enumerate() {
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        diag.duplicate_edges_dropped += before - edges.len();
        graphs.push(Graph::from_clean_edges(node_counts[gid], edges));
    }

    let mut raw_labels: Vec<i64> = Vec::new();
    for (lineno, line) in labels_text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let l: i64 = line.parse().map_err(|_| Error::ParseToken {
            line: lineno + 1,
            token: line.to_string(),
        })?;
        raw_labels.push(l);
    }
    if raw_labels.len() != graph_count {
        return Err(Error::InvalidDataset(format!(
            "{} labels for {} graphs",
            raw_labels.len(),
            graph_count
        )));
    }
    let mut distinct: Vec<i64> = raw_labels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let labels: Vec<usize> = raw_labels
        .iter()
        .map(|l| distinct.binary_search(l).unwrap() + 1)
        .collect();

    let dataset = LabeledDataset::new(graphs, Some(labels))?;
    Ok((dataset, diag))
}

fn parse_tu_node(token: Option<&str>, line: usize, node_total: usize) -> Result<usize> {
    let token = token
        .ok_or_else(|| Error::ParseToken {
            line,
            token: "<missing>".to_string(),
        })?
        .trim();
    let idx: usize = token.parse().map_err(|_| Error::ParseToken {
        line,
        token: token.to_string(),
    })?;
    if idx == 0 || idx > node_total {
        return Err(Error::IndexRange {
            line,
            index: idx,
            node_count: node_total,
        });
    }
    Ok(idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_parses() {
        let (g, diag) = parse_edge_list("0 1\n1 2\n2 0", None).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(diag, ParseDiagnostics::default());
    }

    #[test]
    fn duplicate_edge_collapses() {
        let (g, diag) = parse_edge_list("0 1\n1 0", None).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(diag.duplicate_edges_dropped, 1);
    }

    #[test]
    fn self_loop_dropped_with_warning() {
        let (g, diag) = parse_edge_list("0 0\n0 1", None).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(diag.self_loops_dropped, 1);
    }

    #[test]
    fn malformed_token_reports_line() {
        let err = parse_edge_list("0 1\n2 x", None).unwrap_err();
        match err {
            Error::ParseToken { line, token } => {
                assert_eq!(line, 2);
                assert_eq!(token, "x");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn out_of_range_rejected_with_supplied_count() {
        let err = parse_edge_list("0 5", Some(3)).unwrap_err();
        assert!(matches!(err, Error::IndexRange { index: 5, .. }));
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let (g, _) = parse_edge_list("# header\n\n0 1\n", None).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.node_count(), 2);
    }

    #[test]
    fn degree_sequences() {
        let (triangle, _) = parse_edge_list("0 1\n1 2\n2 0", None).unwrap();
        assert_eq!(triangle.degree_sequence(), vec![2, 2, 2]);

        let star = Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(star.degree_sequence(), vec![3, 1, 1, 1]);

        let c5 = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let degs = c5.degree_sequence();
        assert_eq!(degs, vec![2; 5]);
        assert_eq!(degs.iter().sum::<usize>(), 2 * c5.edge_count());
    }

    #[test]
    fn adjacency_is_symmetric() {
        let g = Graph::new(4, [(0, 2), (1, 3), (2, 3)]).unwrap();
        for u in 0..4 {
            for v in 0..4 {
                assert_eq!(g.has_edge(u, v), g.has_edge(v, u));
            }
        }
        assert!(!g.has_edge(1, 1));
    }

    #[test]
    fn constructor_rejects_self_loop_and_range() {
        assert!(matches!(
            Graph::new(3, [(1, 1)]),
            Err(Error::SelfLoop { u: 1 })
        ));
        assert!(matches!(
            Graph::new(3, [(0, 3)]),
            Err(Error::EndpointRange { index: 3, .. })
        ));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::new(6, [(0, 5), (2, 3), (1, 4), (0, 1)]).unwrap();
        let (parsed, _) = parse_edge_list(&g.to_edge_list(), Some(6)).unwrap();
        assert_eq!(parsed.edges(), g.edges());
    }

    fn write_tu_fixture(dir: &Path) {
        // graph 1: triangle on global nodes 1..3; graph 2: edge on 4..5
        fs::write(
            dir.join("FIX_A.txt"),
            "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n4, 5\n5, 4\n",
        )
        .unwrap();
        fs::write(dir.join("FIX_graph_indicator.txt"), "1\n1\n1\n2\n2\n").unwrap();
        fs::write(dir.join("FIX_graph_labels.txt"), "1\n2\n").unwrap();
    }

    #[test]
    fn tu_fixture_parses() {
        let tmp = tempfile::tempdir().unwrap();
        write_tu_fixture(tmp.path());
        let (ds, diag) = parse_tu_dataset(tmp.path(), "FIX").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.class_count, 2);
        assert_eq!(ds.graphs[0].node_count(), 3);
        assert_eq!(ds.graphs[0].edge_count(), 3);
        assert_eq!(ds.graphs[1].node_count(), 2);
        assert_eq!(ds.graphs[1].edge_count(), 1);
        assert_eq!(ds.labels.as_ref().unwrap(), &vec![1, 2]);
        // reverse directions in the A file collapse as duplicates
        assert_eq!(diag.duplicate_edges_dropped, 4);
    }

    #[test]
    fn tu_missing_file_errors() {
        let tmp = tempfile::tempdir().unwrap();
        assert!(matches!(
            parse_tu_dataset(tmp.path(), "NOPE"),
            Err(Error::MissingFile(_))
        ));
    }

    #[test]
    fn tu_cross_graph_edge_errors() {
        let tmp = tempfile::tempdir().unwrap();
        fs::write(tmp.path().join("BAD_A.txt"), "1, 3\n").unwrap();
        fs::write(tmp.path().join("BAD_graph_indicator.txt"), "1\n1\n2\n").unwrap();
        fs::write(tmp.path().join("BAD_graph_labels.txt"), "1\n1\n").unwrap();
        assert!(matches!(
            parse_tu_dataset(tmp.path(), "BAD"),
            Err(Error::InvalidDataset(_))
        ));
    }

    #[test]
    fn tu_ragged_labels_error() {
        let tmp = tempfile::tempdir().unwrap();
        fs::write(tmp.path().join("RAG_A.txt"), "1, 2\n").unwrap();
        fs::write(tmp.path().join("RAG_graph_indicator.txt"), "1\n1\n").unwrap();
        fs::write(tmp.path().join("RAG_graph_labels.txt"), "1\n2\n").unwrap();
        assert!(parse_tu_dataset(tmp.path(), "RAG").is_err());
    }

    #[test]
    fn tu_label_remap_is_contiguous() {
        let tmp = tempfile::tempdir().unwrap();
        fs::write(tmp.path().join("NEG_A.txt"), "1, 2\n3, 4\n").unwrap();
        fs::write(tmp.path().join("NEG_graph_indicator.txt"), "1\n1\n2\n2\n").unwrap();
        fs::write(tmp.path().join("NEG_graph_labels.txt"), "-1\n1\n").unwrap();
        let (ds, _) = parse_tu_dataset(tmp.path(), "NEG").unwrap();
        assert_eq!(ds.labels.as_ref().unwrap(), &vec![1, 2]);
        assert_eq!(ds.class_count, 2);
    }
}
