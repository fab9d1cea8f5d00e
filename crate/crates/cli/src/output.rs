//! Sweep tables and their CSV/JSON renderings.
//!
//! Both formats go through the same significant-digit rounding, so their
//! numeric payloads are identical, and emitting a parsed table reproduces the
//! bytes (CSV cells never contain commas or quotes).

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Text(String),
    Null,
}

impl Value {
    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    fn render(&self, sig: usize) -> String {
        match self {
            Value::Num(x) => fmt_sig(*x, sig),
            Value::Int(i) => i.to_string(),
            Value::Text(s) => s.clone(),
            Value::Null => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Header row plus one comma-separated line per record, LF endings.
    pub fn to_csv(&self, sig: usize) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| v.render(sig)).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    /// JSON array of record objects keyed by column name.
    pub fn to_json(&self, sig: usize) -> String {
        let records: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (col, v) in self.columns.iter().zip(row) {
                    let jv = match v {
                        Value::Num(x) => serde_json::json!(round_sig(*x, sig)),
                        Value::Int(i) => serde_json::json!(i),
                        Value::Text(s) => serde_json::json!(s),
                        Value::Null => serde_json::Value::Null,
                    };
                    obj.insert(col.clone(), jv);
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::to_string_pretty(&records).expect("tables serialize")
    }

    /// Parses CSV produced by [`Table::to_csv`]. Cells that parse as f64
    /// come back as `Num`, empty cells as `Null`, anything else as `Text`.
    pub fn parse_csv(s: &str) -> Result<Table, String> {
        let mut lines = s.lines();
        let header = lines.next().ok_or("empty input")?;
        let columns: Vec<String> = header.split(',').map(|c| c.to_string()).collect();
        let mut rows = Vec::new();
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let row: Vec<Value> = line
                .split(',')
                .map(|cell| {
                    if cell.is_empty() {
                        Value::Null
                    } else if let Ok(x) = cell.parse::<f64>() {
                        Value::Num(x)
                    } else {
                        Value::text(cell)
                    }
                })
                .collect();
            if row.len() != columns.len() {
                return Err(format!("row has {} cells, expected {}", row.len(), columns.len()));
            }
            rows.push(row);
        }
        Ok(Table { columns, rows })
    }
}

/// Formats `x` to `sig` significant digits with a plain decimal expansion.
/// Redundant trailing zeros are dropped so emission is idempotent: parsing
/// the output and formatting it again reproduces the same bytes.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - magnitude).max(0) as usize;
    if decimals == 0 {
        // round at the significant position above the decimal point
        let scale = 10f64.powi(magnitude - sig as i32 + 1);
        return format!("{:.0}", (x / scale).round() * scale);
    }
    let full = format!("{x:.decimals$}");
    if full.contains('.') {
        full.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        full
    }
}

/// `fmt_sig` rounding applied to the value itself.
pub fn round_sig(x: f64, sig: usize) -> f64 {
    fmt_sig(x, sig).parse().unwrap_or(x)
}

/// Parses an inclusive sweep grid `start:stop:step`, snapping the final point
/// to `stop` when it lands within epsilon.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid '{spec}' must be start:stop:step"));
    }
    let parse = |s: &str| s.parse::<f64>().map_err(|_| format!("bad number '{s}' in grid"));
    let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    if step.is_nan() || step <= 0.0 {
        return Err(format!("grid step {step} must be positive"));
    }
    if stop < start {
        return Err(format!("grid stop {stop} below start {start}"));
    }
    let span = stop - start;
    let n_exact = span / step;
    let snap_tol = 1e-9 * stop.abs().max(start.abs()).max(1.0);
    let n = if (n_exact - n_exact.round()).abs() * step <= snap_tol {
        n_exact.round() as usize
    } else {
        n_exact.floor() as usize
    };
    let mut values: Vec<f64> = (0..=n).map(|i| start + i as f64 * step).collect();
    if let Some(last) = values.last_mut() {
        if (*last - stop).abs() <= snap_tol {
            *last = stop;
        }
    }
    Ok(values)
}
