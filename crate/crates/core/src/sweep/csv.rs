use std::fs;
use std::path::{Path, PathBuf};

use super::SweepResult;
use crate::error::{Error, Result};

/// One CSV cell. Numbers are rendered with nine significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Empty,
    Flag(bool),
    Num(f64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Flag(b) => if *b { "1" } else { "0" }.to_string(),
            Cell::Num(x) => format!("{x:.8e}"),
        }
    }

    fn parse(s: &str) -> Option<Cell> {
        match s {
            "" => Some(Cell::Empty),
            "0" => Some(Cell::Flag(false)),
            "1" => Some(Cell::Flag(true)),
            other => other.parse::<f64>().ok().map(Cell::Num),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn from_result(result: &SweepResult) -> Self {
        let spec = result.spec();
        let mut header: Vec<String> = spec.axes.iter().map(|a| a.param.column()).collect();
        header.push("stable".into());
        header.push("spectral_abscissa_wd".into());
        header.extend(spec.measures.iter().map(|m| m.id().to_string()));

        let rows = result
            .rows
            .iter()
            .map(|r| {
                let mut cells: Vec<Cell> = r.coords.iter().map(|&c| Cell::Num(c)).collect();
                cells.push(r.stable.map_or(Cell::Empty, Cell::Flag));
                cells.push(r.spectral_abscissa.map_or(Cell::Empty, Cell::Num));
                cells.extend(r.values.iter().map(|v| v.map_or(Cell::Empty, Cell::Num)));
                cells
            })
            .collect();
        CsvTable { header, rows }
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

pub fn parse_csv(text: &str) -> Result<CsvTable> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::config("csv", "empty file"))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let cells = line
            .split(',')
            .map(|s| {
                Cell::parse(s).ok_or_else(|| Error::config(format!("csv line {}", k + 2), format!("bad cell `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if cells.len() != header.len() {
            return Err(Error::config(
                format!("csv line {}", k + 2),
                format!("{} cells, header has {}", cells.len(), header.len()),
            ));
        }
        rows.push(cells);
    }
    Ok(CsvTable { header, rows })
}

/// Sidecar path next to a CSV file: `name.csv` → `name.meta.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

/// Writes the CSV table and its provenance sidecar.
pub fn emit_csv(result: &SweepResult, destination: &Path) -> Result<()> {
    fs::write(destination, CsvTable::from_result(result).render())?;
    let meta = serde_json::to_string_pretty(&result.metadata).map_err(|e| Error::config("metadata", e.to_string()))?;
    fs::write(sidecar_path(destination), meta + "\n")?;
    Ok(())
}
