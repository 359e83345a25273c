//! CSV and JSON rendering of experiment tables.

use serde_json::{json, Map, Value};
use skewcomp::experiment::{BoundsRow, CompensationRow, StatSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Ordered `key=value` pairs describing how a table was produced.
pub type Metadata = Vec<(&'static str, String)>;

pub const TABLE2_HEADER: [&str; 9] = [
    "method",
    "precision",
    "i",
    "dlb_min",
    "dlb_max",
    "dlb_avg",
    "dub_min",
    "dub_max",
    "dub_avg",
];

pub const TABLE3_HEADER: [&str; 12] = [
    "algorithm",
    "method",
    "precision",
    "i",
    "err_min",
    "err_max",
    "err_avg",
    "iter_min",
    "iter_max",
    "iter_avg",
    "violations",
    "samples",
];

/// Four significant decimals with a signed two-digit exponent, e.g. `-4.9663e-01`.
pub fn format_avg(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let s = format!("{v:.4e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

enum Cell {
    Text(String),
    Int(i64),
    Avg(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => csv_escape(s),
            Cell::Int(n) => n.to_string(),
            Cell::Avg(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Int(n) => Value::from(*n),
            Cell::Avg(s) => Value::from(s.parse::<f64>().expect("formatted average parses")),
            Cell::Missing => Value::Null,
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn stat_cells(s: &StatSummary) -> [Cell; 3] {
    [Cell::Int(s.min_i64()), Cell::Int(s.max_i64()), Cell::Avg(format_avg(s.avg_f64()))]
}

fn table2_cells(row: &BoundsRow) -> Vec<Cell> {
    let mut cells = vec![
        Cell::Text(row.method.to_string()),
        Cell::Text(row.precision.to_string()),
        Cell::Int(row.i as i64),
    ];
    cells.extend(stat_cells(&row.dlb));
    cells.extend(stat_cells(&row.dub));
    cells
}

fn table3_cells(row: &CompensationRow) -> Vec<Cell> {
    let mut cells = vec![
        Cell::Text(row.algorithm.to_string()),
        row.algorithm
            .method()
            .map_or(Cell::Text("naive".into()), |m| Cell::Text(m.to_string())),
        Cell::Text(row.algorithm.precision().to_string()),
        Cell::Int(row.i as i64),
    ];
    cells.extend(stat_cells(&row.err));
    match &row.iterations {
        Some(it) => cells.extend(stat_cells(it)),
        None => cells.extend([Cell::Missing, Cell::Missing, Cell::Missing]),
    }
    cells.push(Cell::Int(row.violations as i64));
    cells.push(Cell::Int(row.err.count as i64));
    cells
}

fn render(metadata: &Metadata, header: &[&str], rows: Vec<Vec<Cell>>, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::new();
            for (k, v) in metadata {
                out.push_str(&format!("# {k}={v}\n"));
            }
            out.push_str(&header.join(","));
            out.push('\n');
            for row in rows {
                let line: Vec<String> = row.iter().map(Cell::csv).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let meta: Map<String, Value> = metadata
                .iter()
                .map(|(k, v)| (k.to_string(), Value::from(v.as_str())))
                .collect();
            let rows: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = header
                        .iter()
                        .zip(row)
                        .map(|(k, c)| (k.to_string(), c.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&json!({ "metadata": meta, "rows": rows }))
                .expect("serializable");
            s.push('\n');
            s
        }
    }
}

pub fn render_table2(metadata: &Metadata, rows: &[BoundsRow], format: OutputFormat) -> String {
    render(metadata, &TABLE2_HEADER, rows.iter().map(table2_cells).collect(), format)
}

pub fn render_table3(metadata: &Metadata, rows: &[CompensationRow], format: OutputFormat) -> String {
    render(metadata, &TABLE3_HEADER, rows.iter().map(table3_cells).collect(), format)
}
