//! Tabular output as CSV or JSON records, plus gnuplot templates.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde_json::{Map, Value};

use crate::scenario::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

/// Shortest round-trip representation; exponent form outside `[1e-4, 1e15)`.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Table {
            command,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> anyhow::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::csv))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let records = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(row) {
                    m.insert((*c).to_string(), v.json());
                }
                Value::Object(m)
            })
            .collect();
        Value::Array(records)
    }
}

pub fn output_path(prefix: &str, command: &str, ext: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}_{command}.{ext}"))
}

fn create(path: &Path) -> anyhow::Result<fs::File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::File::create(path).with_context(|| format!("creating {}", path.display()))
}

/// Writes the table (and, for CSV, a gnuplot script next to it). Returns
/// the paths written.
pub fn emit(table: &Table, prefix: &str, format: Format) -> anyhow::Result<Vec<PathBuf>> {
    let data = output_path(prefix, table.command, format.extension());
    let file = create(&data)?;
    match format {
        Format::Csv => table.write_csv(file)?,
        Format::Json => {
            let mut file = file;
            serde_json::to_writer_pretty(&mut file, &table.to_json())?;
            writeln!(file)?;
        }
    }
    let mut written = vec![data.clone()];
    if format == Format::Csv {
        if let Some(script) = gnuplot_template(table.command, &data) {
            let gp = output_path(prefix, table.command, "gp");
            create(&gp)?.write_all(script.as_bytes())?;
            written.push(gp);
        }
    }
    Ok(written)
}

fn gnuplot_template(command: &str, data: &Path) -> Option<String> {
    let file = data.file_name()?.to_string_lossy();
    let header = format!(
        "# gnuplot script for {file}\nset datafile separator ','\nset key autotitle columnhead\nset logscale y\nset format y '10^{{%L}}'\nset grid\n"
    );
    let body = match command {
        "fig2" => format!(
            "set xlabel 'T'\nset ylabel 'relative error'\n\
             plot for [t in '-3 7'] '{file}' using (column('rho_t_db') == real(t) ? column('terms') : 1/0):'rel_err_truncation' with linespoints title 'truncation, rho_t = '.t.' dB', \\\n\
             \x20    for [t in '-3 7'] '{file}' using (column('rho_t_db') == real(t) ? column('terms') : 1/0):'rel_err_bound' with lines dashtype 2 title 'bound, rho_t = '.t.' dB'\n"
        ),
        "fig3" => format!(
            "set xlabel 'average transmit SNR (dB)'\nset ylabel 'P_o'\nset yrange [1e-4:1]\n\
             sel(t) = column('rho_t_db') == real(t) ? column('rho_bar_db') : 1/0\n\
             plot for [t in '2 15'] for [c in 'po_exact_b0 po_exact_b1'] '{file}' using (sel(t)):c with lines title c.', rho_t = '.t.' dB', \\\n\
             \x20    for [t in '2 15'] for [c in 'po_asym_b0 po_asym_b1'] '{file}' using (sel(t)):c with lines dashtype 2 title c.', rho_t = '.t.' dB', \\\n\
             \x20    for [t in '2 15'] for [c in 'po_mc_b0 po_mc_b1'] '{file}' using (sel(t)):c with points title c.', rho_t = '.t.' dB'\n"
        ),
        "fig4" => format!(
            "set xlabel 'd_tr (m)'\nset ylabel 'P_o'\n\
             plot for [s in '10 20'] '{file}' using (column('rho_bar_db') == real(s) ? column('d_tr') : 1/0):'po_b1' with lines title 'B=1, '.s.' dB', \\\n\
             \x20    for [s in '10 20'] '{file}' using (column('rho_bar_db') == real(s) ? column('d_tr') : 1/0):'po_b0' with lines dashtype 2 title 'B=0, '.s.' dB'\n"
        ),
        _ => return None,
    };
    Some(header + &body)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("fig2", &["terms", "value", "flag", "mc"]);
        t.push(vec![
            3usize.into(),
            1.5e-20.into(),
            false.into(),
            Cell::Empty,
        ]);
        t.push(vec![
            4usize.into(),
            0.25.into(),
            true.into(),
            Some(0.5).into(),
        ]);
        t
    }

    #[test]
    fn csv_has_header_and_shortest_floats() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "terms,value,flag,mc\n3,1.5e-20,false,\n4,0.25,true,0.5\n"
        );
    }

    #[test]
    fn json_records_use_null_for_missing() {
        let v = sample().to_json();
        assert_eq!(v[0]["mc"], Value::Null);
        assert_eq!(v[1]["value"], 0.25);
        assert_eq!(v.as_array().unwrap().len(), 2);
    }

    #[test]
    fn float_format_round_trips() {
        for &x in &[0.0, 1e-300, 0.1, 123456.789, 1e20, -2.5e-7] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }
}
