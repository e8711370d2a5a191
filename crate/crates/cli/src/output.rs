//! Tabular output: RFC-4180 CSV (header row, CRLF records, 17-significant-
//! digit floats) and a JSON array mirroring the same records.

use std::collections::BTreeMap;

/// One table cell. Blank cells render as empty CSV fields / JSON null.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Blank,
}

impl Cell {
    pub fn opt_num(v: Option<f64>) -> Cell {
        match v {
            Some(x) => Cell::Num(x),
            None => Cell::Blank,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// CSV per RFC 4180: header row, CRLF line endings. All fields are
    /// numeric, so no quoting is ever required.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push_str("\r\n");
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(render_csv_cell).collect();
            out.push_str(&fields.join(","));
            out.push_str("\r\n");
        }
        out
    }

    /// JSON array of records keyed by the header names (keys sorted, which
    /// keeps the bytes deterministic).
    pub fn to_json(&self) -> String {
        let records: Vec<BTreeMap<&str, serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| {
                self.header
                    .iter()
                    .map(String::as_str)
                    .zip(row.iter().map(json_value))
                    .collect()
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&records).expect("record serialization");
        s.push('\n');
        s
    }
}

fn render_csv_cell(c: &Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Num(x) => format_num(*x),
        Cell::Blank => String::new(),
    }
}

fn json_value(c: &Cell) -> serde_json::Value {
    match c {
        Cell::Int(i) => serde_json::Value::from(*i),
        Cell::Num(x) if x.is_finite() => serde_json::Value::from(*x),
        Cell::Num(_) | Cell::Blank => serde_json::Value::Null,
    }
}

/// 17 significant digits, scientific: enough to reproduce any f64 exactly.
pub fn format_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape_and_precision() {
        let mut t = Table::new(&["a", "n", "E"]);
        t.push(vec![Cell::Num(0.5), Cell::Int(2), Cell::Blank]);
        let csv = t.to_csv();
        assert_eq!(csv, "a,n,E\r\n5.0000000000000000e-1,2,\r\n");
    }

    #[test]
    fn float_formatting_round_trips() {
        let x = 3.752_317_474_967_829_f64;
        let s = format_num(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn json_mirrors_rows() {
        let mut t = Table::new(&["a", "E"]);
        t.push(vec![Cell::Num(1.0), Cell::Blank]);
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v[0]["a"], 1.0);
        assert!(v[0]["E"].is_null());
    }
}
