//! Readers for the REPETITA topology (`*.graph`) and demand (`*.demands`)
//! text formats.

use std::fs;
use std::path::{Path, PathBuf};

use greenroute::net::{TrafficMatrix, VertexId};
use greenroute::scalar::{parse_decimal, Rational};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: node {node} does not exist")]
    UnknownNode { line: usize, node: usize },
    #[error("unexpected end of input, expected {0}")]
    Truncated(&'static str),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// One edge line of a topology file.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub label: String,
    pub src: VertexId,
    pub dst: VertexId,
    pub weight: u64,
    pub bw: Rational,
}

/// Topology as written on disk: parallel edges are kept and merged during
/// preprocessing.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphPrecursor {
    pub labels: Vec<String>,
    pub edges: Vec<EdgeRecord>,
}

impl GraphPrecursor {
    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }
}

/// Non-blank lines with their 1-based line numbers.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
        }
    }

    fn next_line(&mut self, what: &'static str) -> Result<(usize, Vec<&'a str>), ParseError> {
        for (i, line) in self.inner.by_ref() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if !fields.is_empty() {
                return Ok((i + 1, fields));
            }
        }
        Err(ParseError::Truncated(what))
    }

    /// Reads `<keyword> <count>` followed by the column header line.
    fn section(&mut self, keyword: &'static str) -> Result<usize, ParseError> {
        let (line, fields) = self.next_line(keyword)?;
        let count = match fields.as_slice() {
            [k, n] if k.eq_ignore_ascii_case(keyword) => n
                .parse()
                .map_err(|_| syntax(line, format!("bad {keyword} count {n:?}")))?,
            _ => return Err(syntax(line, format!("expected \"{keyword} <count>\""))),
        };
        self.next_line("column header")?;
        Ok(count)
    }
}

fn field<T: std::str::FromStr>(
    line: usize,
    fields: &[&str],
    k: usize,
    name: &str,
) -> Result<T, ParseError> {
    let raw = fields
        .get(k)
        .ok_or_else(|| syntax(line, format!("missing {name}")))?;
    raw.parse()
        .map_err(|_| syntax(line, format!("bad {name} {raw:?}")))
}

fn amount(line: usize, fields: &[&str], k: usize) -> Result<Rational, ParseError> {
    let raw = fields
        .get(k)
        .ok_or_else(|| syntax(line, "missing bandwidth"))?;
    let v = parse_decimal(raw).ok_or_else(|| syntax(line, format!("bad bandwidth {raw:?}")))?;
    if v < Rational::zero() {
        return Err(syntax(line, "negative bandwidth"));
    }
    Ok(v)
}

fn node(line: usize, fields: &[&str], k: usize, n: usize) -> Result<VertexId, ParseError> {
    let v: usize = field(line, fields, k, "node index")?;
    if v >= n {
        return Err(ParseError::UnknownNode { line, node: v });
    }
    Ok(v)
}

pub fn parse_repetita_graph(text: &str) -> Result<GraphPrecursor, ParseError> {
    let mut lines = Lines::new(text);
    let n = lines.section("NODES")?;
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let (_, fields) = lines.next_line("node line")?;
        labels.push(fields[0].to_string());
    }
    let m = lines.section("EDGES")?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, fields) = lines.next_line("edge line")?;
        edges.push(EdgeRecord {
            label: fields[0].to_string(),
            src: node(line, &fields, 1, n)?,
            dst: node(line, &fields, 2, n)?,
            weight: field(line, &fields, 3, "weight")?,
            bw: amount(line, &fields, 4)?,
        });
    }
    Ok(GraphPrecursor { labels, edges })
}

/// Demands of one matrix, summed per ordered pair. Zero volumes and
/// self-demands carry no traffic and are dropped.
pub fn parse_repetita_demands(
    text: &str,
    num_vertices: usize,
) -> Result<TrafficMatrix, ParseError> {
    let mut lines = Lines::new(text);
    let k = lines.section("DEMANDS")?;
    let mut traffic = TrafficMatrix::new(num_vertices);
    for _ in 0..k {
        let (line, fields) = lines.next_line("demand line")?;
        let s = node(line, &fields, 1, num_vertices)?;
        let t = node(line, &fields, 2, num_vertices)?;
        let bw = amount(line, &fields, 3)?;
        if s == t || bw.is_zero() {
            continue;
        }
        traffic
            .add(s, t, bw)
            .map_err(|e| syntax(line, e.to_string()))?;
    }
    Ok(traffic)
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
}

/// A topology with its traffic matrices, before preprocessing.
#[derive(Debug, Clone)]
pub struct RepetitaInstance {
    pub id: String,
    pub graph_path: PathBuf,
    pub demand_paths: Vec<PathBuf>,
    pub graph: GraphPrecursor,
    /// Matrix ids, one per demand file.
    pub matrix_ids: Vec<String>,
    pub matrices: Vec<TrafficMatrix>,
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn stem(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

impl RepetitaInstance {
    /// Reads a topology and its demand files. The id defaults to the
    /// topology's file name without extension.
    pub fn load(id: Option<&str>, graph: &Path, demands: &[PathBuf]) -> Result<Self, LoadError> {
        let parsed = parse_repetita_graph(&read(graph)?).map_err(|source| LoadError::Parse {
            path: graph.to_path_buf(),
            source,
        })?;
        let mut matrices = Vec::with_capacity(demands.len());
        for path in demands {
            let t =
                parse_repetita_demands(&read(path)?, parsed.num_vertices()).map_err(|source| {
                    LoadError::Parse {
                        path: path.clone(),
                        source,
                    }
                })?;
            matrices.push(t);
        }
        let id = id.map(str::to_string).unwrap_or_else(|| {
            graph
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        });
        Ok(Self {
            id,
            graph_path: graph.to_path_buf(),
            demand_paths: demands.to_vec(),
            graph: parsed,
            matrix_ids: demands.iter().map(|p| stem(p)).collect(),
            matrices,
        })
    }

    pub fn from_parts(
        id: &str,
        graph: GraphPrecursor,
        matrices: Vec<(String, TrafficMatrix)>,
    ) -> Self {
        let (matrix_ids, matrices) = matrices.into_iter().unzip();
        Self {
            id: id.to_string(),
            graph_path: PathBuf::new(),
            demand_paths: Vec::new(),
            graph,
            matrix_ids,
            matrices,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use greenroute::scalar::int;

    const TWO_NODES: &str = "NODES 2\nlabel x y\na 0 0\nb 1 1\n\nEDGES 1\nlabel src dest weight bw delay\ne0 0 1 7 10 1\n";

    #[test]
    fn single_edge() {
        let g = parse_repetita_graph(TWO_NODES).unwrap();
        assert_eq!(g.labels, ["a", "b"]);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(
            (g.edges[0].src, g.edges[0].dst, g.edges[0].weight),
            (0, 1, 7)
        );
        assert_eq!(g.edges[0].bw, int(10));
    }

    #[test]
    fn parallel_edges_are_kept() {
        let text = "NODES 2\nh\na 0 0\nb 1 1\nEDGES 2\nh\ne0 0 1 1 3 1\ne1 0 1 2 7 1\n";
        let g = parse_repetita_graph(text).unwrap();
        assert_eq!(g.edges.len(), 2);
        assert_eq!(g.edges[1].bw, int(7));
    }

    #[test]
    fn malformed_count_line() {
        let err = parse_repetita_graph("NODES two\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }), "{err}");
        let err = parse_repetita_graph("VERTICES 2\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }), "{err}");
    }

    #[test]
    fn edge_errors_carry_line_numbers() {
        let text = "NODES 2\nh\na 0 0\nb 1 1\nEDGES 1\nh\ne0 0 5 1 3 1\n";
        assert_eq!(
            parse_repetita_graph(text).unwrap_err(),
            ParseError::UnknownNode { line: 7, node: 5 }
        );
        let text = "NODES 2\nh\na 0 0\nb 1 1\nEDGES 1\nh\ne0 0 1 x 3 1\n";
        assert!(matches!(
            parse_repetita_graph(text).unwrap_err(),
            ParseError::Syntax { line: 7, .. }
        ));
        let text = "NODES 2\nh\na 0 0\nb 1 1\nEDGES 2\nh\ne0 0 1 1 3 1\n";
        assert_eq!(
            parse_repetita_graph(text).unwrap_err(),
            ParseError::Truncated("edge line")
        );
    }

    #[test]
    fn demands() {
        let one = parse_repetita_demands("DEMANDS 1\nlabel src dest bw\nd0 0 1 4.5\n", 2).unwrap();
        assert_eq!(one.demand(0, 1), greenroute::scalar::ratio(9, 2));
        let two = parse_repetita_demands("DEMANDS 2\nh\nd0 1 0 3\nd1 1 0 2\n", 2).unwrap();
        assert_eq!(two.demand(1, 0), int(5));
        assert_eq!(two.len(), 1);
        assert_eq!(
            parse_repetita_demands("DEMANDS 1\nh\nd0 0 2 1\n", 2).unwrap_err(),
            ParseError::UnknownNode { line: 3, node: 2 }
        );
    }
}
