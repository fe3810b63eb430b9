//! Reading graphs and correlation matrices, writing results.
//!
//! Supported inputs are Matrix Market coordinate files, tab-separated edge
//! lists (`u TAB v [TAB weight]`, 0-based ids, `#` comments) and dense CSV
//! correlation matrices with an optional header row.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{build_graph, Graph, LoopPolicy, SparseMatrix};
use crate::katz::CentralityResult;
use crate::threshold::SufficiencyReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeFormat {
    Tsv,
    MatrixMarket,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReadOptions {
    pub loop_policy: LoopPolicy,
    pub weighted: bool,
    pub directed: bool,
}

impl Default for ReadOptions {
    fn default() -> Self {
        Self { loop_policy: LoopPolicy::Loopless, weighted: false, directed: false }
    }
}

pub fn read_edge_list(path: impl AsRef<Path>, format: EdgeFormat, opts: &ReadOptions) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text, format, opts)
}

pub fn parse_edge_list(text: &str, format: EdgeFormat, opts: &ReadOptions) -> Result<Graph> {
    match format {
        EdgeFormat::Tsv => parse_tsv(text, opts),
        EdgeFormat::MatrixMarket => parse_matrix_market(text, opts),
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_index(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| parse_err(line, format!("invalid node index {tok:?}")))
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    tok.parse().map_err(|_| parse_err(line, format!("invalid number {tok:?}")))
}

/// Collects edges, mirroring them for undirected graphs. A mirrored edge
/// may also be listed explicitly as long as the weights agree.
struct EdgeSet {
    directed: bool,
    edges: BTreeMap<(usize, usize), f64>,
}

impl EdgeSet {
    fn new(directed: bool) -> Self {
        Self { directed, edges: BTreeMap::new() }
    }

    fn insert_one(&mut self, i: usize, j: usize, w: f64, line: usize, explicit: bool) -> Result<()> {
        match self.edges.insert((i, j), w) {
            Some(old) if old != w => Err(parse_err(line, format!("conflicting weights for edge ({i}, {j})"))),
            Some(_) if explicit && self.directed => Err(parse_err(line, format!("duplicate edge ({i}, {j})"))),
            _ => Ok(()),
        }
    }

    fn insert(&mut self, i: usize, j: usize, w: f64, line: usize) -> Result<()> {
        self.insert_one(i, j, w, line, true)?;
        if !self.directed && i != j {
            self.insert_one(j, i, w, line, false)?;
        }
        Ok(())
    }

    fn into_graph(self, n: usize, opts: &ReadOptions, directed: bool) -> Result<Graph> {
        let edges: Vec<_> = self.edges.into_iter().map(|((i, j), w)| (i, j, w)).collect();
        build_graph(n, &edges, opts.loop_policy, directed, opts.weighted)
    }
}

/// Edge list: one `u TAB v [TAB weight]` record per line. Undirected graphs
/// take each record as an edge in both directions. The node count is one
/// more than the largest id.
fn parse_tsv(text: &str, opts: &ReadOptions) -> Result<Graph> {
    let mut set = EdgeSet::new(opts.directed);
    let mut n = 0usize;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split('\t').map(str::trim).collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_err(line, format!("expected 2 or 3 tab-separated fields, found {}", fields.len())));
        }
        let i = parse_index(fields[0], line)?;
        let j = parse_index(fields[1], line)?;
        let w = match fields.get(2) {
            Some(tok) if opts.weighted => parse_value(tok, line)?,
            Some(tok) => {
                parse_value(tok, line)?;
                1.0
            }
            None => 1.0,
        };
        n = n.max(i + 1).max(j + 1);
        set.insert(i, j, w, line)?;
    }
    if n == 0 {
        return Err(parse_err(1, "edge list is empty"));
    }
    set.into_graph(n, opts, opts.directed)
}

/// Matrix Market coordinate format with 1-based indices. `symmetric` files
/// are expanded to both directions; `general` files are taken as written,
/// and yield a directed graph unless the entries happen to be symmetric
/// and an undirected graph was requested.
fn parse_matrix_market(text: &str, opts: &ReadOptions) -> Result<Graph> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l).unwrap_or("");
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(parse_err(1, "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'"));
    }
    let pattern = match tokens[3].as_str() {
        "pattern" => true,
        "real" | "integer" => false,
        other => return Err(parse_err(1, format!("unsupported field {other:?}"))),
    };
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(1, format!("unsupported symmetry {other:?}"))),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut set = EdgeSet::new(!symmetric);
    let mut seen = 0usize;
    for (k, raw) in lines {
        let line = k + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let Some((n, _)) = size else {
            if fields.len() != 3 {
                return Err(parse_err(line, "expected size line 'rows cols entries'"));
            }
            let rows = parse_index(fields[0], line)?;
            let cols = parse_index(fields[1], line)?;
            let entries = parse_index(fields[2], line)?;
            if rows != cols {
                return Err(parse_err(line, format!("adjacency must be square, got {rows} x {cols}")));
            }
            if rows == 0 {
                return Err(parse_err(line, "matrix has no rows"));
            }
            size = Some((rows, entries));
            continue;
        };
        let want = if pattern { 2 } else { 3 };
        if fields.len() != want {
            return Err(parse_err(line, format!("expected {want} fields, found {}", fields.len())));
        }
        let i = parse_index(fields[0], line)?;
        let j = parse_index(fields[1], line)?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(parse_err(line, format!("index ({i}, {j}) outside 1..={n}")));
        }
        let w = if pattern || !opts.weighted {
            if !pattern {
                parse_value(fields[2], line)?;
            }
            1.0
        } else {
            parse_value(fields[2], line)?
        };
        set.insert(i - 1, j - 1, w, line)?;
        seen += 1;
    }
    let Some((n, entries)) = size else {
        return Err(parse_err(1, "missing size line"));
    };
    if seen != entries {
        return Err(parse_err(text.lines().count(), format!("header declares {entries} entries, found {seen}")));
    }
    let directed = if symmetric {
        opts.directed
    } else {
        opts.directed || set.edges.iter().any(|(&(i, j), &w)| set.edges.get(&(j, i)) != Some(&w))
    };
    set.into_graph(n, opts, directed)
}

/// Writes `m` as a `general` real coordinate Matrix Market file with
/// 17 significant digits.
pub fn write_matrix_market(m: &SparseMatrix, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, matrix_market_string(m))?;
    Ok(())
}

pub fn matrix_market_string(m: &SparseMatrix) -> String {
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz());
    for (i, j, v) in m.iter() {
        let _ = writeln!(out, "{} {} {:.16e}", i + 1, j + 1, v);
    }
    out
}

/// Dense symmetric matrix with unit diagonal and entries in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    n: usize,
    values: Vec<f64>,
}

impl CorrelationMatrix {
    pub const SYMMETRY_TOL: f64 = 1e-12;

    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || values.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: values.len() });
        }
        for i in 0..n {
            for j in 0..n {
                let c = values[i * n + j];
                if !c.is_finite() || !(-1.0..=1.0).contains(&c) {
                    return Err(Error::invalid(format!("correlation ({i}, {j}) = {c} outside [-1, 1]")));
                }
                if (c - values[j * n + i]).abs() > Self::SYMMETRY_TOL {
                    return Err(Error::invalid(format!("correlation matrix not symmetric at ({i}, {j})")));
                }
            }
            if (values[i * n + i] - 1.0).abs() > Self::SYMMETRY_TOL {
                return Err(Error::invalid(format!("correlation diagonal ({i}, {i}) is not 1")));
            }
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

pub fn read_correlation_csv(path: impl AsRef<Path>) -> Result<CorrelationMatrix> {
    let file = std::fs::File::open(path)?;
    parse_correlation_csv(file)
}

/// Dense CSV, one matrix row per record. A first record that does not
/// parse as numbers is taken as a header.
pub fn parse_correlation_csv<R: std::io::Read>(reader: R) -> Result<CorrelationMatrix> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(k + 1);
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if k == 0 => continue,
            Err(_) => return Err(parse_err(line, "non-numeric correlation entry")),
        }
    }
    let n = rows.len();
    if n == 0 {
        return Err(parse_err(1, "correlation matrix is empty"));
    }
    if let Some(k) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::invalid(format!("correlation row {k} has {} entries, expected {n}", rows[k].len())));
    }
    CorrelationMatrix::new(n, rows.concat())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMode {
    Unweighted,
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrelationOptions {
    pub loop_policy: LoopPolicy,
    /// `C_ij > eta` when set, `C_ij >= eta` otherwise.
    pub strict: bool,
    /// Compare `|C_ij|` instead of `C_ij`.
    pub absolute: bool,
}

impl Default for CorrelationOptions {
    fn default() -> Self {
        Self { loop_policy: LoopPolicy::Loopless, strict: true, absolute: false }
    }
}

/// Undirected graph with an edge wherever the correlation passes `eta`.
///
/// Weighted graphs carry the correlation (its absolute value in absolute
/// mode) as weight and only keep positive entries. Only the upper triangle
/// of `c` is read.
pub fn correlation_to_adjacency(
    c: &CorrelationMatrix,
    eta: f64,
    mode: CorrelationMode,
    opts: &CorrelationOptions,
) -> Result<Graph> {
    if !(eta > -1.0 && eta < 1.0) {
        return Err(Error::invalid(format!("eta must lie in (-1, 1), got {eta}")));
    }
    let n = c.n();
    let mut edges = Vec::new();
    for i in 0..n {
        let start = if opts.loop_policy == LoopPolicy::Loopless { i + 1 } else { i };
        for j in start..n {
            let raw = c.get(i, j);
            let value = if opts.absolute { raw.abs() } else { raw };
            let pass = if opts.strict { value > eta } else { value >= eta };
            if !pass || (mode == CorrelationMode::Weighted && !(value > 0.0)) {
                continue;
            }
            let w = match mode {
                CorrelationMode::Unweighted => 1.0,
                CorrelationMode::Weighted => value,
            };
            edges.push((i, j, w));
            if i != j {
                edges.push((j, i, w));
            }
        }
    }
    build_graph(n, &edges, opts.loop_policy, false, mode == CorrelationMode::Weighted)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Results that can be written as JSON or CSV.
pub trait ResultRecord {
    fn to_json(&self) -> Value;
    fn to_csv(&self) -> String;
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

impl ResultRecord for CentralityResult {
    /// `{n, t, route, scores, ranking, certificates}`.
    fn to_json(&self) -> Value {
        let certificates: serde_json::Map<String, Value> =
            self.certificates.iter().map(|(k, v)| (k.clone(), finite_or_null(*v))).collect();
        json!({
            "n": self.n(),
            "t": finite_or_null(self.t_used),
            "route": self.route.as_str(),
            "scores": self.v,
            "ranking": self.ranking,
            "certificates": certificates,
        })
    }

    /// `node,score,rank` rows in ranking order, ranks starting at 1.
    fn to_csv(&self) -> String {
        let mut out = String::from("node,score,rank\n");
        for (pos, &node) in self.ranking.iter().enumerate() {
            let _ = writeln!(out, "{},{:?},{}", node, self.v[node], pos + 1);
        }
        out
    }
}

impl ResultRecord for SufficiencyReport {
    fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap_or(Value::Null)
    }

    /// `field,value` rows; the defect vector is `;`-separated.
    fn to_csv(&self) -> String {
        let c = self.c.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(";");
        let verdict = match self.verdict {
            crate::threshold::Verdict::Certified => "certified",
            crate::threshold::Verdict::Uncertified => "uncertified",
        };
        let variant = match self.variant {
            crate::threshold::ThresholdVariant::WithLoops => "with_loops",
            crate::threshold::ThresholdVariant::Loopless => "loopless",
        };
        let rows: [(&str, String); 15] = [
            ("epsilon", format!("{:?}", self.epsilon)),
            ("t", format!("{:?}", self.t)),
            ("variant", variant.into()),
            ("x", format!("{:?}", self.x)),
            ("c", c),
            ("c_dot_w", format!("{:?}", self.c_dot_w)),
            ("e_dot_w", format!("{:?}", self.e_dot_w)),
            ("rho_a", format!("{:?}", self.rho_a)),
            ("rho_bound", format!("{:?}", self.rho_bound)),
            ("rho_bound_ok", self.rho_bound_ok.to_string()),
            ("rhs_c", format!("{:?}", self.rhs_c)),
            ("rhs_e", format!("{:?}", self.rhs_e)),
            ("cond_c_ok", self.cond_c_ok.to_string()),
            ("cond_e_ok", self.cond_e_ok.to_string()),
            ("verdict", verdict.into()),
        ];
        let mut out = String::from("field,value\n");
        for (k, v) in rows {
            let _ = writeln!(out, "{k},{v}");
        }
        out
    }
}

pub fn render_result<R: ResultRecord + ?Sized>(result: &R, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&result.to_json()).expect("JSON values serialize");
            s.push('\n');
            s
        }
        OutputFormat::Csv => result.to_csv(),
    }
}

pub fn write_result<R: ResultRecord + ?Sized>(result: &R, path: impl AsRef<Path>, format: OutputFormat) -> Result<()> {
    std::fs::write(path, render_result(result, format))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::katz::{katz_direct, KatzOptions};

    const P3_MTX: &str = "%%MatrixMarket matrix coordinate pattern symmetric\n% P3\n3 3 2\n2 1\n3 2\n";

    fn p3() -> Graph {
        build_graph(3, &[(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)], LoopPolicy::Loopless, false, false)
            .unwrap()
    }

    #[test]
    fn matrix_market_p3() {
        let g = parse_edge_list(P3_MTX, EdgeFormat::MatrixMarket, &ReadOptions::default()).unwrap();
        assert_eq!(g, p3());
        let general = "%%MatrixMarket matrix coordinate real general\n3 3 4\n1 2 1\n2 1 1\n2 3 1\n3 2 1\n";
        let g = parse_edge_list(general, EdgeFormat::MatrixMarket, &ReadOptions::default()).unwrap();
        assert_eq!(g, p3());
    }

    #[test]
    fn general_asymmetric_is_directed() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 0.5\n";
        let opts = ReadOptions { weighted: true, ..ReadOptions::default() };
        let g = parse_edge_list(text, EdgeFormat::MatrixMarket, &opts).unwrap();
        assert!(g.is_directed());
        assert_eq!(g.weight(0, 1), 0.5);
        assert_eq!(g.weight(1, 0), 0.0);
    }

    #[test]
    fn tsv_weighted_edge() {
        let opts = ReadOptions { weighted: true, directed: true, ..ReadOptions::default() };
        let g = parse_edge_list("0\t1\t0.5\n", EdgeFormat::Tsv, &opts).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight(0, 1), 0.5);
        let opts = ReadOptions { weighted: true, ..ReadOptions::default() };
        let g = parse_edge_list("# comment\n0\t1\t0.5\n", EdgeFormat::Tsv, &opts).unwrap();
        assert_eq!((g.weight(0, 1), g.weight(1, 0)), (0.5, 0.5));
    }

    #[test]
    fn parse_errors_name_lines() {
        let err = parse_edge_list("%%MatrixMarket array real\n", EdgeFormat::MatrixMarket, &ReadOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        assert!(err.to_string().contains("line 1"));
        let short = "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 3\n2 1\n3 2\n";
        assert!(parse_edge_list(short, EdgeFormat::MatrixMarket, &ReadOptions::default()).is_err());
        let err = parse_edge_list("0\t1\n1\tx\n", EdgeFormat::Tsv, &ReadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn matrix_market_round_trip() {
        let m = SparseMatrix::from_triplets(3, 3, vec![(0, 1, 0.1), (1, 0, 1.0 / 3.0), (2, 2, std::f64::consts::PI)])
            .unwrap();
        let text = matrix_market_string(&m);
        let opts = ReadOptions { weighted: true, directed: true, loop_policy: LoopPolicy::WithLoops };
        let g = parse_edge_list(&text, EdgeFormat::MatrixMarket, &opts).unwrap();
        assert_eq!(g.adjacency(), &m);
    }

    fn two_by_two(c: f64) -> CorrelationMatrix {
        CorrelationMatrix::new(2, vec![1.0, c, c, 1.0]).unwrap()
    }

    #[test]
    fn correlation_examples() {
        let opts = CorrelationOptions::default();
        let g = correlation_to_adjacency(&two_by_two(0.6), 0.5, CorrelationMode::Unweighted, &opts).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(!g.is_directed());
        let g = correlation_to_adjacency(&two_by_two(0.6), 0.7, CorrelationMode::Unweighted, &opts).unwrap();
        assert_eq!(g.edge_count(), 0);
        let g = correlation_to_adjacency(&two_by_two(0.6), 0.0, CorrelationMode::Weighted, &opts).unwrap();
        assert_eq!((g.weight(0, 1), g.weight(1, 0)), (0.6, 0.6));
        assert!(correlation_to_adjacency(&two_by_two(0.6), 1.0, CorrelationMode::Weighted, &opts).is_err());
        let abs = CorrelationOptions { absolute: true, ..opts };
        let g = correlation_to_adjacency(&two_by_two(-0.6), 0.5, CorrelationMode::Unweighted, &abs).unwrap();
        assert_eq!(g.edge_count(), 2);
        let loose = CorrelationOptions { strict: false, ..opts };
        let g = correlation_to_adjacency(&two_by_two(0.5), 0.5, CorrelationMode::Unweighted, &loose).unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn correlation_csv_with_and_without_header() {
        let c = parse_correlation_csv("a,b\n1,0.6\n0.6,1\n".as_bytes()).unwrap();
        assert_eq!(c.get(0, 1), 0.6);
        let c = parse_correlation_csv("1, 0.2\n0.2, 1\n".as_bytes()).unwrap();
        assert_eq!(c.n(), 2);
        assert!(parse_correlation_csv("1,0.2\n0.3,1\n".as_bytes()).is_err());
        assert!(parse_correlation_csv("1,2\n2,1\n".as_bytes()).is_err());
    }

    #[test]
    fn result_outputs() {
        let r = katz_direct(&p3(), 0.5, &KatzOptions::default()).unwrap();
        let csv = render_result(&r, OutputFormat::Csv);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("node,score,rank"));
        assert_eq!(lines.next(), Some("1,4.0,1"));
        let v = r.to_json();
        for key in ["n", "t", "route", "scores", "ranking", "certificates"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let empty = build_graph(3, &[], LoopPolicy::Loopless, false, false).unwrap();
        let r = katz_direct(&empty, 0.5, &KatzOptions::default()).unwrap();
        assert_eq!(r.to_json()["scores"], json!([1.0, 1.0, 1.0]));
        let dir = tempfile::tempdir().unwrap();
        assert!(write_result(&r, dir.path().join("missing").join("out.json"), OutputFormat::Json).is_err());
    }
}
