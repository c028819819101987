use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::numkit::DenseMatrix;

use super::TraceRow;

/// Header `z_0,…,z_{d-1}`, one row per node, 17 significant digits.
pub fn write_embeddings(z: &DenseMatrix, mut out: impl Write) -> Result<()> {
    let header: Vec<String> = (0..z.cols()).map(|j| format!("z_{j}")).collect();
    writeln!(out, "{}", header.join(","))?;
    for i in 0..z.rows() {
        let row: Vec<String> = z.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_embeddings(input: impl BufRead) -> Result<DenseMatrix> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Input("embedding file is empty".into()))??;
    let cols = header.split(',').count();
    if header.trim().is_empty() || !header.starts_with("z_") {
        return Err(Error::Input("embedding header must start with z_0".into()));
    }
    let mut data = Vec::new();
    let mut rows = 0;
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let before = data.len();
        for field in line.split(',') {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("line {}: bad number {field:?}", k + 2)))?;
            data.push(v);
        }
        if data.len() - before != cols {
            return Err(Error::Input(format!(
                "line {}: expected {cols} values, found {}",
                k + 2,
                data.len() - before
            )));
        }
        rows += 1;
    }
    DenseMatrix::new(rows, cols, data)
}

/// Loss trace as `iter,l_link,l_attr,l_att,l_dc,l_obf`.
pub fn write_trace(trace: &[TraceRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "iter,l_link,l_attr,l_att,l_dc,l_obf")?;
    for t in trace {
        writeln!(
            out,
            "{},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}",
            t.iter, t.l_link, t.l_attr, t.l_att, t.l_dc, t.l_obf
        )?;
    }
    out.flush()?;
    Ok(())
}
