//! Text formats: the line-oriented network format and dataset CSV.
//!
//! ```text
//! # comment
//! network sprinkler
//! var X 2
//! var Y 2
//! parents Y X
//! cpt X : 0.7 0.3
//! cpt Y | X=0 : 0.8 0.2
//! cpt Y | X=1 : 0.1 0.9
//! ```
//!
//! All `var` lines come before any `parents` or `cpt` line. Every parent
//! configuration needs exactly one `cpt` line; rows must sum to 1 ± 1e-6 and
//! are rescaled to sum to 1.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::network::{BayesNet, Dataset, Schema, Structure};

pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

// Rows closer than this to 1 are kept verbatim, which makes
// parse -> write -> parse a fixed point.
const RENORMALIZE_ABOVE: f64 = 1e-12;

/// A parsed network file.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkFile {
    pub name: String,
    pub net: BayesNet,
}

pub fn parse_network(text: &str) -> Result<BayesNet> {
    parse_network_file(text).map(|f| f.net)
}

struct PendingRow {
    line: usize,
    probs: Vec<f64>,
}

pub fn parse_network_file(text: &str) -> Result<NetworkFile> {
    let mut name: Option<String> = None;
    let mut vars: Vec<(String, usize)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut parents: Vec<Option<Vec<usize>>> = Vec::new();
    // (child, sorted (parent, value) pairs) -> row
    let mut rows: HashMap<(usize, Vec<(usize, usize)>), PendingRow> = HashMap::new();
    let mut body_started = false;

    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let keyword = words.next().unwrap_or_default();
        if name.is_none() && keyword != "network" {
            return Err(Error::syntax(line_no, "expected `network <name>` header"));
        }
        match keyword {
            "network" => {
                if name.is_some() {
                    return Err(Error::syntax(line_no, "duplicate `network` header"));
                }
                let n = words
                    .next()
                    .ok_or_else(|| Error::syntax(line_no, "missing network name"))?;
                if words.next().is_some() {
                    return Err(Error::syntax(line_no, "network name must be one word"));
                }
                name = Some(n.to_string());
            }
            "var" => {
                if body_started {
                    return Err(Error::syntax(
                        line_no,
                        "`var` lines must precede `parents` and `cpt` lines",
                    ));
                }
                let (v, card) = match (words.next(), words.next(), words.next()) {
                    (Some(v), Some(c), None) => (v, c),
                    _ => {
                        return Err(Error::syntax(
                            line_no,
                            "expected `var <name> <cardinality>`",
                        ))
                    }
                };
                let card: usize = card
                    .parse()
                    .map_err(|_| Error::syntax(line_no, format!("bad cardinality {card:?}")))?;
                if card < 2 {
                    return Err(Error::syntax(
                        line_no,
                        format!("cardinality of {v} must be >= 2"),
                    ));
                }
                if index.insert(v.to_string(), vars.len()).is_some() {
                    return Err(Error::syntax(
                        line_no,
                        format!("variable {v} declared twice"),
                    ));
                }
                vars.push((v.to_string(), card));
                parents.push(None);
            }
            "parents" => {
                body_started = true;
                let child = words.next().ok_or_else(|| {
                    Error::syntax(line_no, "expected `parents <child> <parent>...`")
                })?;
                let c = lookup(&index, child, line_no)?;
                if parents[c].is_some() {
                    return Err(Error::syntax(
                        line_no,
                        format!("parents of {child} given twice"),
                    ));
                }
                let ps = words
                    .map(|p| lookup(&index, p, line_no))
                    .collect::<Result<Vec<_>>>()?;
                parents[c] = Some(ps);
            }
            "cpt" => {
                body_started = true;
                let (key, probs) = parse_cpt_line(line, line_no, &index, &vars)?;
                if rows.contains_key(&key) {
                    return Err(Error::syntax(line_no, "duplicate CPT row"));
                }
                rows.insert(
                    key,
                    PendingRow {
                        line: line_no,
                        probs,
                    },
                );
            }
            other => {
                return Err(Error::syntax(line_no, format!("unknown keyword {other:?}")));
            }
        }
    }

    let name = name.ok_or_else(|| Error::syntax(1, "empty network file"))?;
    if vars.is_empty() {
        return Err(Error::input("network declares no variables"));
    }
    let schema = Arc::new(Schema::new(vars.clone())?);
    let parent_lists: Vec<Vec<usize>> =
        parents.into_iter().map(Option::unwrap_or_default).collect();
    let structure = Structure::new(schema.clone(), parent_lists).map_err(|e| match e {
        Error::Input(msg) if msg.contains("cycle") => {
            Error::input("cycle detected in parent declarations")
        }
        e => e,
    })?;

    let mut cpts = Vec::with_capacity(schema.len());
    for child in 0..schema.len() {
        let ps = structure.parents(child);
        let q = structure.parent_configs(child);
        let mut cpt = Vec::with_capacity(q * schema.cardinality(child));
        for cfg in 0..q {
            let assignment = decode_config(&schema, ps, cfg);
            let mut key_cfg: Vec<(usize, usize)> = ps.iter().copied().zip(assignment).collect();
            key_cfg.sort_unstable();
            let row = rows.remove(&(child, key_cfg.clone())).ok_or_else(|| {
                Error::input(format!(
                    "missing CPT row `{}`",
                    row_label(&schema, child, &key_cfg)
                ))
            })?;
            cpt.extend(normalize_row(&row, &schema, child, &key_cfg)?);
        }
        cpts.push(cpt);
    }
    if let Some(row) = rows.values().min_by_key(|r| r.line) {
        return Err(Error::syntax(
            row.line,
            "CPT row does not match the declared parents",
        ));
    }
    Ok(NetworkFile {
        name,
        net: BayesNet::new(structure, cpts)?,
    })
}

fn lookup(index: &HashMap<String, usize>, name: &str, line: usize) -> Result<usize> {
    index
        .get(name)
        .copied()
        .ok_or_else(|| Error::syntax(line, format!("unknown variable {name:?}")))
}

type RowKey = (usize, Vec<(usize, usize)>);

fn parse_cpt_line(
    line: &str,
    line_no: usize,
    index: &HashMap<String, usize>,
    vars: &[(String, usize)],
) -> Result<(RowKey, Vec<f64>)> {
    let (head, probs) = line
        .split_once(':')
        .ok_or_else(|| Error::syntax(line_no, "expected `:` before probabilities"))?;
    let head = head.trim_start_matches("cpt").trim();
    let (child, cfg) = match head.split_once('|') {
        Some((c, cfg)) => (c.trim(), cfg.trim()),
        None => (head, ""),
    };
    let c = lookup(index, child, line_no)?;
    let mut key_cfg = Vec::new();
    for part in cfg.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (p, v) = part.split_once('=').ok_or_else(|| {
            Error::syntax(line_no, format!("expected <parent>=<value>, got {part:?}"))
        })?;
        let pi = lookup(index, p.trim(), line_no)?;
        let v: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::syntax(line_no, format!("bad value index in {part:?}")))?;
        if v >= vars[pi].1 {
            return Err(Error::syntax(
                line_no,
                format!("value {v} out of range for {}", vars[pi].0),
            ));
        }
        key_cfg.push((pi, v));
    }
    key_cfg.sort_unstable();
    if key_cfg.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::syntax(line_no, "parent assigned twice"));
    }
    let probs = probs
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::syntax(line_no, format!("bad probability {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if probs.len() != vars[c].1 {
        return Err(Error::syntax(
            line_no,
            format!(
                "expected {} probabilities for {}, got {}",
                vars[c].1,
                vars[c].0,
                probs.len()
            ),
        ));
    }
    if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(Error::syntax(
            line_no,
            "probabilities must be finite and >= 0",
        ));
    }
    Ok(((c, key_cfg), probs))
}

fn normalize_row(
    row: &PendingRow,
    schema: &Schema,
    child: usize,
    cfg: &[(usize, usize)],
) -> Result<Vec<f64>> {
    let sum: f64 = row.probs.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
        return Err(Error::syntax(
            row.line,
            format!("CPT row `{}` sums to {sum}", row_label(schema, child, cfg)),
        ));
    }
    if (sum - 1.0).abs() <= RENORMALIZE_ABOVE {
        return Ok(row.probs.clone());
    }
    Ok(row.probs.iter().map(|p| p / sum).collect())
}

fn decode_config(schema: &Schema, parents: &[usize], mut cfg: usize) -> Vec<usize> {
    let mut out = vec![0; parents.len()];
    for (slot, &p) in out.iter_mut().zip(parents).rev() {
        let r = schema.cardinality(p);
        *slot = cfg % r;
        cfg /= r;
    }
    out
}

fn row_label(schema: &Schema, child: usize, cfg: &[(usize, usize)]) -> String {
    let mut s = format!("cpt {}", schema.name(child));
    if !cfg.is_empty() {
        let parts: Vec<String> = cfg
            .iter()
            .map(|&(p, v)| format!("{}={v}", schema.name(p)))
            .collect();
        let _ = write!(s, " | {}", parts.join(","));
    }
    s
}

/// Renders `net` in the network text format. Probabilities are written in
/// shortest round-trip form.
pub fn write_network(net: &BayesNet, name: &str) -> String {
    let schema = net.schema();
    let g = net.structure();
    let mut out = format!("network {name}\n");
    for v in schema.variables() {
        let _ = writeln!(out, "var {} {}", v.name, v.cardinality);
    }
    for i in 0..schema.len() {
        if !g.parents(i).is_empty() {
            let names: Vec<&str> = g.parents(i).iter().map(|&p| schema.name(p)).collect();
            let _ = writeln!(out, "parents {} {}", schema.name(i), names.join(" "));
        }
    }
    for i in 0..schema.len() {
        let ps = g.parents(i);
        for cfg in 0..g.parent_configs(i) {
            let pairs: Vec<(usize, usize)> = ps
                .iter()
                .copied()
                .zip(decode_config(schema, ps, cfg))
                .collect();
            let probs: Vec<String> = net.cpt_row(i, cfg).iter().map(|p| format!("{p}")).collect();
            let _ = writeln!(
                out,
                "{} : {}",
                row_label(schema, i, &pairs),
                probs.join(" ")
            );
        }
    }
    out
}

/// Parses dataset CSV. With a schema, header names must be a permutation of
/// its variables; without one, cardinalities are inferred as
/// max(2, largest value + 1).
pub fn parse_dataset(text: &str, schema: Option<&Arc<Schema>>) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::syntax(1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::syntax(1, "missing header row"));
    }
    let mut raw: Vec<Vec<usize>> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::syntax(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != header.len() {
            return Err(Error::syntax(
                line,
                format!("expected {} cells, got {}", header.len(), rec.len()),
            ));
        }
        let row = rec
            .iter()
            .map(|c| {
                c.parse::<usize>()
                    .map_err(|_| Error::syntax(line, format!("bad value index {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        raw.push(row);
    }

    let schema = match schema {
        Some(s) => s.clone(),
        None => {
            let cards =
                (0..header.len()).map(|j| raw.iter().map(|r| r[j] + 1).max().unwrap_or(2).max(2));
            Arc::new(Schema::new(header.iter().cloned().zip(cards))?)
        }
    };
    let mut columns = Vec::with_capacity(schema.len());
    for v in schema.variables() {
        let j = header
            .iter()
            .position(|h| *h == v.name)
            .ok_or_else(|| Error::syntax(1, format!("missing column {}", v.name)))?;
        columns.push(j);
    }
    if header.len() != schema.len() {
        return Err(Error::syntax(
            1,
            format!("{} columns for {} variables", header.len(), schema.len()),
        ));
    }
    for (k, r) in raw.iter().enumerate() {
        for (i, &j) in columns.iter().enumerate() {
            if r[j] >= schema.cardinality(i) {
                return Err(Error::syntax(
                    k + 2,
                    format!(
                        "value {} out of range for {} (cardinality {})",
                        r[j],
                        schema.name(i),
                        schema.cardinality(i)
                    ),
                ));
            }
        }
    }
    Dataset::new(
        schema,
        raw.into_iter()
            .map(|r| columns.iter().map(|&j| r[j]).collect()),
    )
}

pub fn write_dataset(data: &Dataset) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let names: Vec<&str> = data
        .schema()
        .variables()
        .iter()
        .map(|v| v.name.as_str())
        .collect();
    w.write_record(&names).expect("in-memory write");
    for row in data.rows() {
        w.write_record(row.iter().map(usize::to_string))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8")
}
