use std::io::Write;

use serde_json::{json, Map, Value};

/// One output cell. Floats print in their shortest round-trip form.
#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(v.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }

    fn to_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Artifact {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub residuals: Vec<(String, f64)>,
}

impl Artifact {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            ..Self::default()
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn residual(&mut self, name: impl Into<String>, value: f64) {
        self.residuals.push((name.into(), value));
    }

    pub fn write_json(&self, config: Value, out: &mut dyn Write) -> std::io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.to_string(), v.to_json()))
                    .collect();
                Value::Object(m)
            })
            .collect();
        let residuals: Map<String, Value> = self
            .residuals
            .iter()
            .map(|(k, v)| (k.clone(), Cell::Float(*v).to_json()))
            .collect();
        let doc = json!({ "config_echo": config, "rows": rows, "residuals": residuals });
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)
    }

    /// Header plus rows; residuals follow as `# name = value` lines.
    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(&self.columns)?;
            for r in &self.rows {
                w.write_record(r.iter().map(Cell::to_field))?;
            }
            w.flush()?;
        }
        for (k, v) in &self.residuals {
            writeln!(out, "# {k} = {v:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Artifact {
        let mut a = Artifact::new(&["name", "value"]);
        a.row(vec!["a, b".into(), 0.1.into()]);
        a.residual("worst", 1e-17);
        a
    }

    #[test]
    fn csv_quotes_fields_and_appends_residuals() {
        let mut out = Vec::new();
        sample().write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "name,value\n\"a, b\",0.1\n# worst = 1e-17\n");
    }

    #[test]
    fn json_floats_round_trip() {
        let mut out = Vec::new();
        let mut a = sample();
        a.row(vec!["third".into(), (1.0f64 / 3.0).into()]);
        a.write_json(json!({}), &mut out).unwrap();
        let v: Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["rows"][1]["value"].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(v["residuals"]["worst"].as_f64().unwrap(), 1e-17);
    }
}
