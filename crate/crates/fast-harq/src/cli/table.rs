//! Rectangular result tables with CSV and JSON rendering.
//!
//! Column names carry their units (cu, npcu, dB, probabilities are
//! dimensionless in [0,1]). Floats render with Rust's shortest round-trip
//! formatting, so identical runs produce byte-identical files; missing
//! values (e.g. infeasible rows) render as empty CSV cells / JSON nulls.

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        if v.is_nan() {
            Cell::Empty
        } else {
            Cell::Float(v)
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        match v {
            Some(x) => Cell::from(x),
            None => Cell::Empty,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Float(v) => format!("{v}"),
                    Cell::Int(v) => format!("{v}"),
                    Cell::Text(s) => {
                        if s.contains(',') || s.contains('"') {
                            format!("\"{}\"", s.replace('"', "\"\""))
                        } else {
                            s.clone()
                        }
                    }
                    Cell::Empty => String::new(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row.iter())
                    .map(|(name, cell)| {
                        let v = match cell {
                            Cell::Float(v) => serde_json::Number::from_f64(*v)
                                .map(serde_json::Value::Number)
                                .unwrap_or(serde_json::Value::Null),
                            Cell::Int(v) => serde_json::Value::from(*v),
                            Cell::Text(s) => serde_json::Value::from(s.as_str()),
                            Cell::Empty => serde_json::Value::Null,
                        };
                        (name.clone(), v)
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "table": self.name,
            "rows": rows,
        }))
        .expect("tables serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rendering() {
        let mut t = Table::new("demo", &["a", "b_cu", "note"]);
        t.push_row(vec![Cell::Float(0.5), Cell::Int(3), Cell::from("ok")]);
        t.push_row(vec![Cell::Empty, Cell::Int(4), Cell::from("x,y")]);
        let csv = t.to_csv();
        assert_eq!(csv, "a,b_cu,note\n0.5,3,ok\n,4,\"x,y\"\n");
    }

    #[test]
    fn json_handles_nan_as_null() {
        let mut t = Table::new("demo", &["v"]);
        t.push_row(vec![Cell::from(f64::NAN)]);
        let json = t.to_json();
        assert!(json.contains("null"));
    }
}
