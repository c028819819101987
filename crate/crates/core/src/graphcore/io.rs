use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

use super::{AttributeSchema, Graph};

fn parse_id(tok: &str, line: usize, what: &str) -> Result<u64> {
    tok.trim()
        .parse()
        .map_err(|_| Error::Input(format!("{what} line {line}: bad integer {tok:?}")))
}

/// Reads a graph from a tab-separated edge list and a CSV attribute table.
///
/// Node ids are remapped to dense indices in attribute-file row order; the
/// original ids are kept in [`Graph::ids`]. Attribute columns not named in
/// the schema are ignored.
pub fn load_graph(
    edges: impl BufRead,
    attributes: impl BufRead,
    schema: &AttributeSchema,
) -> Result<Graph> {
    let mut lines = attributes.lines();
    let header = match lines.next() {
        Some(h) => h?,
        None => return Err(Error::Input("attribute file is empty".into())),
    };
    let columns: Vec<&str> = header.trim().split(',').map(str::trim).collect();
    if columns.first() != Some(&"node_id") {
        return Err(Error::Input(
            "attribute header must start with node_id".into(),
        ));
    }
    let mut picks = Vec::with_capacity(schema.attributes().len());
    for spec in schema.attributes() {
        match columns.iter().position(|c| *c == spec.name) {
            Some(p) => picks.push(p),
            None => {
                return Err(Error::Input(format!(
                    "attribute {} missing from header",
                    spec.name
                )))
            }
        }
    }

    let mut ids = Vec::new();
    let mut index = HashMap::new();
    let mut codes = vec![Vec::new(); picks.len()];
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(Error::Input(format!(
                "attribute line {}: expected {} fields, got {}",
                lineno + 2,
                columns.len(),
                fields.len()
            )));
        }
        let id = parse_id(fields[0], lineno + 2, "attribute")?;
        if index.insert(id, ids.len()).is_some() {
            return Err(Error::Input(format!("duplicate node id {id}")));
        }
        ids.push(id);
        for (col, &p) in codes.iter_mut().zip(&picks) {
            let v = parse_id(fields[p], lineno + 2, "attribute")?;
            let v = u32::try_from(v)
                .map_err(|_| Error::Input(format!("attribute code {v} out of range")))?;
            col.push(v);
        }
    }

    let mut pairs = Vec::new();
    for (lineno, line) in edges.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let (Some(a), Some(b), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(Error::Input(format!(
                "edge line {}: expected two node ids",
                lineno + 1
            )));
        };
        let lookup = |tok: &str| -> Result<usize> {
            let id = parse_id(tok, lineno + 1, "edge")?;
            index
                .get(&id)
                .copied()
                .ok_or_else(|| Error::Input(format!("edge line {}: unknown node {id}", lineno + 1)))
        };
        pairs.push((lookup(a)?, lookup(b)?));
    }
    Ok(Graph::new(ids.len(), pairs, schema, codes)?.with_ids(ids))
}

pub fn write_edges(g: &Graph, mut out: impl Write) -> Result<()> {
    let ids = g.ids();
    for &(u, v) in g.edges() {
        writeln!(out, "{}\t{}", ids[u], ids[v])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_attributes(g: &Graph, schema: &AttributeSchema, mut out: impl Write) -> Result<()> {
    write!(out, "node_id")?;
    for a in schema.attributes() {
        write!(out, ",{}", a.name)?;
    }
    writeln!(out)?;
    for (i, id) in g.ids().iter().enumerate() {
        write!(out, "{id}")?;
        for k in 0..schema.attributes().len() {
            write!(out, ",{}", g.codes(k)[i])?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}
