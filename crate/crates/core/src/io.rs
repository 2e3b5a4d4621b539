//! Plain-text tables: a `# {json}` header line, a column line, then rows.
//! Floats are written with 17 significant digits so they read back exactly.

use std::io::{BufRead, Write};

use serde_json::Value;

use crate::construct::InvariantMeasure;
use crate::error::{Error, Result};

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a header, column names and rows of floats.
pub fn write_table<W: Write>(w: &mut W, header: &Value, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    writeln!(w, "# {header}").map_err(io_err)?;
    writeln!(w, "{}", columns.join(",")).map_err(io_err)?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
        writeln!(w, "{}", cells.join(",")).map_err(io_err)?;
    }
    Ok(())
}

/// Writes `k,nu_k` rows; the header carries every other field of the measure.
pub fn write_measure_csv<W: Write>(w: &mut W, nu: &InvariantMeasure) -> Result<()> {
    let mut header = serde_json::to_value(nu).map_err(|e| Error::Io(e.to_string()))?;
    if let Value::Object(map) = &mut header {
        map.remove("nu");
    }
    writeln!(w, "# {header}").map_err(io_err)?;
    writeln!(w, "k,nu_k").map_err(io_err)?;
    for (i, v) in nu.nu.iter().enumerate() {
        writeln!(w, "{},{}", nu.k_min + i, format_float(*v)).map_err(io_err)?;
    }
    Ok(())
}

/// A parsed table: optional JSON header, column names, rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Option<Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_table<R: BufRead>(r: R) -> Result<Table> {
    let mut header = None;
    let mut columns = None;
    let mut rows = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line.map_err(io_err)?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(json) = line.strip_prefix('#') {
            if header.is_none() && columns.is_none() {
                let v: Value = serde_json::from_str(json.trim())
                    .map_err(|e| Error::InvalidSpec(format!("line {}: bad header: {e}", n + 1)))?;
                header = Some(v);
            }
            continue;
        }
        if columns.is_none() {
            columns = Some(line.split(',').map(|c| c.trim().to_string()).collect::<Vec<_>>());
            continue;
        }
        let row = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidSpec(format!("line {}: {e}", n + 1)))?;
        rows.push(row);
    }
    let columns = columns.ok_or_else(|| Error::InvalidSpec("table has no column line".into()))?;
    if let Some(r) = rows.iter().position(|r| r.len() != columns.len()) {
        return Err(Error::InvalidSpec(format!("row {} has the wrong number of cells", r + 1)));
    }
    Ok(Table { header, columns, rows })
}

/// Inverse of [`write_measure_csv`]; `k` must run consecutively.
pub fn read_measure_csv<R: BufRead>(r: R) -> Result<InvariantMeasure> {
    let table = read_table(r)?;
    if table.columns != ["k", "nu_k"] {
        return Err(Error::InvalidSpec(format!("expected columns k,nu_k, got {}", table.columns.join(","))));
    }
    let Some(Value::Object(mut header)) = table.header else {
        return Err(Error::InvalidSpec("measure table needs a JSON object header".into()));
    };
    let k_min = table.rows.first().map(|r| r[0]).ok_or_else(|| Error::InvalidSpec("empty measure table".into()))?;
    for (i, row) in table.rows.iter().enumerate() {
        if row[0] != k_min + i as f64 {
            return Err(Error::InvalidSpec(format!("k = {} out of sequence", row[0])));
        }
    }
    let nu: Vec<Value> = table.rows.iter().map(|r| Value::from(r[1])).collect();
    header.insert("nu".into(), Value::Array(nu));
    let declared = header.get("k_min").and_then(Value::as_u64);
    if declared != Some(k_min as u64) {
        return Err(Error::InvalidSpec(format!("header k_min {declared:?} does not match first row {k_min}")));
    }
    serde_json::from_value(Value::Object(header)).map_err(|e| Error::InvalidSpec(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branching::OffspringDistribution;
    use crate::construct::{closed_form_measure, ClosedFormKind};

    #[test]
    fn measure_roundtrip_is_exact() {
        let d = OffspringDistribution::geometric(0.25).unwrap();
        let nu = closed_form_measure(&d, -0.5, ClosedFormKind::TruePower, 40).unwrap();
        let mut buf = Vec::new();
        write_measure_csv(&mut buf, &nu).unwrap();
        let back = read_measure_csv(buf.as_slice()).unwrap();
        assert_eq!(back, nu);
    }

    #[test]
    fn rejects_gaps_and_missing_header() {
        let text = "# {\"k_min\":1}\nk,nu_k\n1,0.5\n3,0.25\n";
        assert!(read_measure_csv(text.as_bytes()).is_err());
        assert!(read_measure_csv("k,nu_k\n1,0.5\n".as_bytes()).is_err());
    }

    #[test]
    fn generic_table() {
        let mut buf = Vec::new();
        write_table(&mut buf, &serde_json::json!({"n": 2}), &["a", "b"], &[vec![0.1, 1.0 / 3.0]]).unwrap();
        let t = read_table(buf.as_slice()).unwrap();
        assert_eq!(t.rows[0], vec![0.1, 1.0 / 3.0]);
        assert_eq!(t.header.unwrap()["n"], 2);
    }
}
