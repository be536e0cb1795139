//! The line-oriented scenario format.
//!
//! ```text
//! # comment
//! [geometry]
//! n = 1
//! rank = 1
//! hermitian = false
//! gamma[1][1][1] = "x2"
//! conn[2] = [["i*x1"]]
//! omega[1] = [[0, "x1"], ["-x1", 0]]
//! metric = [[1, 0], [0, 2]]
//!
//! [order]
//! K = 2
//!
//! [query star]
//! f = "x1"
//! g = "x2 + lam"
//! ```
//!
//! Values are JSON: integers, booleans, strings holding expressions, and
//! nested arrays of those. Indices are 1-based. A `gamma` entry also
//! fills those permutations of its indices that are not given
//! explicitly, so conflicting explicit entries fail validation.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::expr::{parse_poly, parse_series};
use crate::geometry::{GeometryInput, TwoForm};
use crate::poly::Poly;
use crate::scalar::ComplexRational;
use crate::weyl::{EndMatrix, Fiber, FiberVector, FormalEndo, FormalFunction, FormalSection};

/// One `[query <command>]` section.
#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub command: String,
    pub line: usize,
    pub args: Vec<Arg>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Arg {
    pub name: String,
    pub value: Value,
    pub line: usize,
    pub column: usize,
    /// The raw value text, for locating expression errors.
    pub raw: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub geometry: GeometryInput,
    pub order: usize,
    pub queries: Vec<Query>,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Position of `needle` (a JSON string body) within `raw`, as a 0-based
/// offset of its first character.
fn locate(raw: &str, needle: &str) -> usize {
    raw.find(&format!("\"{needle}\"")).map(|p| p + 1).unwrap_or(0)
}

impl Arg {
    /// An argument given directly rather than in a scenario file: `text`
    /// is JSON when `json` is set (matrices, sections), else a bare
    /// expression.
    pub fn inline(name: &str, text: &str, json: bool) -> Result<Arg> {
        let value = if json {
            serde_json::from_str(text).map_err(|e| err(1, e.column(), format!("argument {name}: {e}")))?
        } else {
            Value::String(text.to_string())
        };
        Ok(Arg {
            name: name.to_string(),
            value,
            line: 1,
            column: 1,
            raw: text.to_string(),
        })
    }

    fn expr_error(&self, text: &str, e: Error) -> Error {
        match e {
            Error::Parse { column, message, .. } => {
                err(self.line, self.column + locate(&self.raw, text) + column - 1, message)
            }
            other => other,
        }
    }

    fn string_like(&self, v: &Value) -> Result<String> {
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(err(self.line, self.column, format!("'{}': expected a string or number, got {v}", self.name))),
        }
    }

    fn poly_of(&self, v: &Value, nvars: usize) -> Result<Poly> {
        let s = self.string_like(v)?;
        parse_poly(&s, nvars).map_err(|e| self.expr_error(&s, e))
    }

    fn series_of(&self, v: &Value, nvars: usize) -> Result<Vec<Poly>> {
        let s = self.string_like(v)?;
        parse_series(&s, nvars).map_err(|e| self.expr_error(&s, e))
    }

    fn usize_value(&self) -> Result<usize> {
        self.value
            .as_u64()
            .map(|k| k as usize)
            .ok_or_else(|| err(self.line, self.column, format!("'{}' must be a nonnegative integer", self.name)))
    }

    fn bool_value(&self) -> Result<bool> {
        self.value
            .as_bool()
            .ok_or_else(|| err(self.line, self.column, format!("'{}' must be true or false", self.name)))
    }

    fn matrix<T>(&self, rows: usize, cols: usize, mut entry: impl FnMut(&Value) -> Result<T>) -> Result<Vec<T>> {
        let shape = || err(self.line, self.column, format!("'{}' must be a {rows}×{cols} array", self.name));
        let outer = self.value.as_array().filter(|a| a.len() == rows).ok_or_else(shape)?;
        let mut out = Vec::with_capacity(rows * cols);
        for row in outer {
            let row = row.as_array().filter(|r| r.len() == cols).ok_or_else(shape)?;
            for v in row {
                out.push(entry(v)?);
            }
        }
        Ok(out)
    }

    fn vector<T>(&self, len: usize, mut entry: impl FnMut(&Value) -> Result<T>) -> Result<Vec<T>> {
        let arr = self
            .value
            .as_array()
            .filter(|a| a.len() == len)
            .ok_or_else(|| err(self.line, self.column, format!("'{}' must be an array of length {len}", self.name)))?;
        arr.iter().map(&mut entry).collect()
    }

    /// A function: an expression in `x1..x{2n}` and `lam`.
    pub fn function(&self, n: usize, order: usize) -> Result<FormalFunction> {
        let d = 2 * n;
        let mut coeffs = self.series_of(&self.value, d)?;
        check_order(coeffs.len() - 1, order).map_err(|e| self.order_error(e))?;
        coeffs.resize(order + 1, Poly::zero(d));
        Ok(FormalFunction::from_polys(n, coeffs))
    }

    /// An endomorphism: a `rank × rank` array of expressions.
    pub fn endo(&self, n: usize, rank: usize, order: usize) -> Result<FormalEndo> {
        let d = 2 * n;
        let entries = self.matrix(rank, rank, |v| self.series_of(v, d))?;
        let top = entries.iter().map(Vec::len).max().unwrap_or(1);
        check_order(top - 1, order).map_err(|e| self.order_error(e))?;
        let coeffs = (0..=order)
            .map(|k| {
                EndMatrix::from_entries(rank, entries.iter().map(|e| e.get(k).cloned().unwrap_or_else(|| Poly::zero(d))).collect())
            })
            .collect();
        Ok(FormalEndo::from_coeffs(n, rank, coeffs))
    }

    /// A section: an array of `rank` expressions.
    pub fn section(&self, n: usize, rank: usize, order: usize) -> Result<FormalSection> {
        let d = 2 * n;
        let entries = self.vector(rank, |v| self.series_of(v, d))?;
        let top = entries.iter().map(Vec::len).max().unwrap_or(1);
        check_order(top - 1, order).map_err(|e| self.order_error(e))?;
        let coeffs = (0..=order)
            .map(|k| FiberVector::new(entries.iter().map(|e| e.get(k).cloned().unwrap_or_else(|| Poly::zero(d))).collect()))
            .collect();
        Ok(FormalSection::from_coeffs(n, rank, coeffs))
    }

    fn order_error(&self, e: Error) -> Error {
        match e {
            Error::OrderExceeded { requested, available } => err(
                self.line,
                self.column,
                format!("'{}' has λ-order {requested}, above the scenario order K = {available}", self.name),
            ),
            other => other,
        }
    }
}

fn check_order(top: usize, order: usize) -> Result<()> {
    if top > order {
        return Err(Error::OrderExceeded {
            requested: top,
            available: order,
        });
    }
    Ok(())
}

enum Section {
    None,
    Geometry,
    Order,
    Query,
}

/// Split `key = value` and parse the value as JSON.
fn key_value(line: &str, lineno: usize) -> Result<(String, Value, usize, String)> {
    let eq = line
        .find('=')
        .ok_or_else(|| err(lineno, 1, format!("expected 'key = value', got '{}'", line.trim())))?;
    let key = line[..eq].trim().to_string();
    if key.is_empty() {
        return Err(err(lineno, 1, "missing key"));
    }
    let rest = &line[eq + 1..];
    let lead = rest.len() - rest.trim_start().len();
    let raw = rest.trim();
    let column = eq + 2 + lead;
    if raw.is_empty() {
        return Err(err(lineno, column, format!("missing value for '{key}'")));
    }
    let value: Value = serde_json::from_str(raw).map_err(|e| err(lineno, column + e.column().saturating_sub(1), format!("bad value: {e}")))?;
    Ok((key, value, column, raw.to_string()))
}

/// `name[a][b]…` into the name and 1-based indices.
fn indexed_key(key: &str, line: usize) -> Result<(String, Vec<usize>)> {
    let (name, mut rest) = match key.find('[') {
        Some(p) => (&key[..p], &key[p..]),
        None => return Ok((key.to_string(), vec![])),
    };
    let mut idx = vec![];
    while !rest.is_empty() {
        let close = rest
            .find(']')
            .filter(|_| rest.starts_with('['))
            .ok_or_else(|| err(line, 1, format!("malformed index in '{key}'")))?;
        let k: usize = rest[1..close]
            .trim()
            .parse()
            .map_err(|_| err(line, 1, format!("bad index in '{key}'")))?;
        idx.push(k);
        rest = &rest[close + 1..];
    }
    Ok((name.trim().to_string(), idx))
}

fn check_index(k: usize, bound: usize, arg: &Arg) -> Result<usize> {
    if k == 0 || k > bound {
        return Err(err(arg.line, 1, format!("index {k} in '{}' outside 1..{bound}", arg.name)));
    }
    Ok(k - 1)
}

/// Parse and validate a scenario. Syntax problems give `Error::Parse`,
/// violated hypotheses `Error::Geometry`.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut section = Section::None;
    let mut geometry_lines: Vec<Arg> = vec![];
    let mut order: Option<usize> = None;
    let mut queries: Vec<Query> = vec![];

    for (i, raw_line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let mut words = inner.split_whitespace();
            section = match (words.next(), words.next(), words.next()) {
                (Some("geometry"), None, _) => Section::Geometry,
                (Some("order"), None, _) => Section::Order,
                (Some("query"), Some(cmd), None) => {
                    queries.push(Query {
                        command: cmd.to_string(),
                        line: lineno,
                        args: vec![],
                    });
                    Section::Query
                }
                _ => return Err(err(lineno, 1, format!("unknown section '[{inner}]'"))),
            };
            continue;
        }
        let (name, value, column, raw) = key_value(raw_line, lineno)?;
        let arg = Arg {
            name,
            value,
            line: lineno,
            column,
            raw,
        };
        match section {
            Section::None => return Err(err(lineno, 1, "entry outside of any section")),
            Section::Geometry => geometry_lines.push(arg),
            Section::Order => {
                if arg.name != "K" {
                    return Err(err(lineno, 1, format!("unknown key '{}' in [order]", arg.name)));
                }
                order = Some(arg.usize_value()?);
            }
            Section::Query => queries.last_mut().expect("query section").args.push(arg),
        }
    }

    let geometry = build_geometry(&geometry_lines)?;
    let report = geometry.validate();
    if !report.is_ok() {
        return Err(Error::Geometry(report.to_string()));
    }
    Ok(Scenario {
        geometry,
        order: order.unwrap_or(2),
        queries,
    })
}

fn build_geometry(lines: &[Arg]) -> Result<GeometryInput> {
    let find = |key: &str| lines.iter().find(|a| a.name == key);
    let missing = |key: &str| err(lines.first().map_or(1, |a| a.line), 1, format!("[geometry] needs '{key}'"));
    let n = find("n").ok_or_else(|| missing("n"))?.usize_value()?;
    let rank = match find("rank") {
        Some(a) => a.usize_value()?,
        None => 1,
    };
    if n == 0 || rank == 0 {
        return Err(err(1, 1, "n and rank must be positive"));
    }
    let d = 2 * n;
    let mut g = GeometryInput::flat(n, rank);
    let mut explicit_gamma = std::collections::BTreeSet::new();
    for arg in lines {
        let (name, idx) = indexed_key(&arg.name, arg.line)?;
        match (name.as_str(), idx.as_slice()) {
            ("n" | "rank", []) => {}
            ("hermitian", []) => g.hermitian = arg.bool_value()?,
            ("gamma", [i, j, k]) => {
                let (i, j, k) = (check_index(*i, d, arg)?, check_index(*j, d, arg)?, check_index(*k, d, arg)?);
                let p = arg.poly_of(&arg.value, d)?;
                explicit_gamma.insert((i, j, k));
                for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                    if (a, b, c) == (i, j, k) || !explicit_gamma.contains(&(a, b, c)) {
                        g.set_gamma(a, b, c, p.clone());
                    }
                }
            }
            ("conn", [i]) => {
                let i = check_index(*i, d, arg)?;
                let entries = arg.matrix(rank, rank, |v| arg.poly_of(v, d))?;
                g.set_conn(i, EndMatrix::from_entries(rank, entries));
            }
            ("omega", [m]) => {
                if *m == 0 {
                    return Err(err(arg.line, 1, "omega is indexed from 1 (the λ-power)"));
                }
                let entries = arg.matrix(d, d, |v| arg.poly_of(v, d))?;
                g.set_omega(*m, TwoForm::from_matrix(d, entries));
            }
            ("metric", []) => {
                let entries = arg.matrix(rank, rank, |v| {
                    let p = arg.poly_of(v, 0)?;
                    Ok::<ComplexRational, Error>(p.constant_term())
                })?;
                g.fiber_metric = Some(entries);
            }
            _ => return Err(err(arg.line, 1, format!("unknown geometry key '{}'", arg.name))),
        }
    }
    Ok(g)
}

/// Serialize a geometry back into the scenario format.
pub fn geometry_to_text(g: &GeometryInput) -> String {
    let d = g.dim();
    let mut s = format!("[geometry]\nn = {}\nrank = {}\nhermitian = {}\n", g.n, g.rank, g.hermitian);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let p = g.gamma(i, j, k);
                if !p.is_zero() {
                    s.push_str(&format!("gamma[{}][{}][{}] = \"{p}\"\n", i + 1, j + 1, k + 1));
                }
            }
        }
    }
    let quote = |p: &Poly| format!("\"{p}\"");
    for (i, a) in g.conn.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let rows: Vec<String> = (0..g.rank)
            .map(|r| format!("[{}]", (0..g.rank).map(|c| quote(a.get(r, c))).collect::<Vec<_>>().join(", ")))
            .collect();
        s.push_str(&format!("conn[{}] = [{}]\n", i + 1, rows.join(", ")));
    }
    for (m, w) in g.omega_series.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let rows: Vec<String> = (0..d)
            .map(|r| format!("[{}]", (0..d).map(|c| quote(w.get(r, c))).collect::<Vec<_>>().join(", ")))
            .collect();
        s.push_str(&format!("omega[{}] = [{}]\n", m + 1, rows.join(", ")));
    }
    if let Some(h) = &g.fiber_metric {
        let rows: Vec<String> = (0..g.rank)
            .map(|r| {
                let row: Vec<String> = (0..g.rank).map(|c| format!("\"{}\"", h[r * g.rank + c])).collect();
                format!("[{}]", row.join(", "))
            })
            .collect();
        s.push_str(&format!("metric = [{}]\n", rows.join(", ")));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_flat_scenario() {
        let sc = parse_scenario("[geometry]\nn = 1\nrank = 1\n").unwrap();
        assert_eq!(sc.geometry, GeometryInput::flat(1, 1));
        assert_eq!(sc.order, 2);
        assert!(sc.queries.is_empty());
    }

    #[test]
    fn full_scenario_round_trips() {
        let text = "# curved\n[geometry]\nn = 1\nrank = 2\nhermitian = true\n\
                    gamma[1][1][2] = \"x1\"\n\
                    conn[2] = [[\"i*x1\", \"x2\"], [\"-2*x2\", 0]]\n\
                    omega[1] = [[0, \"x1\"], [\"-x1\", 0]]\n\
                    metric = [[2, 0], [0, 1]]\n\
                    [order]\nK = 3\n\
                    [query star]\nf = \"x1 + lam\"\ng = \"x2\"\n";
        let sc = parse_scenario(text).unwrap();
        assert_eq!(sc.order, 3);
        assert_eq!(sc.queries.len(), 1);
        assert_eq!(sc.queries[0].args[0].function(1, 3).unwrap().poly(1), &Poly::one(2));
        assert_eq!(sc.geometry.gamma(1, 0, 0), &Poly::var(2, 0));
        let again = parse_scenario(&geometry_to_text(&sc.geometry)).unwrap();
        assert_eq!(again.geometry, sc.geometry);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_scenario("[geometry]\nn = 1\ngamma[1][1][1] = \"x1 $ x2\"\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, column: 22, .. }), "{e:?}");
        let e = parse_scenario("[geometry]\nn = 1\nconn[1] = [[\"x1\"]\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        assert!(matches!(parse_scenario("[geom]\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_scenario("n = 1\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn hypothesis_violations_are_geometry_errors() {
        let e = parse_scenario("[geometry]\nn = 1\ngamma[1][1][2] = \"x1\"\ngamma[1][2][1] = \"x2\"\n").unwrap_err();
        assert!(matches!(e, Error::Geometry(_)));
        let e = parse_scenario("[geometry]\nn = 1\nhermitian = true\nconn[1] = [[\"x1\"]]\n").unwrap_err();
        assert!(matches!(e, Error::Geometry(_)));
    }

    #[test]
    fn query_beyond_order_is_rejected() {
        let sc = parse_scenario("[geometry]\nn = 1\n[order]\nK = 1\n[query taylor]\nf = \"lam^2\"\n").unwrap();
        assert!(sc.queries[0].args[0].function(1, 1).is_err());
    }
}
