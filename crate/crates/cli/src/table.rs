use edgewalk_core::sum::CompensatedSum;

use crate::config::{Command, Config, METADATA_PREFIX};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(i) => Some(i as f64),
            Cell::Real(x) => Some(x),
            Cell::Text(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResultTable {
    pub command: Command,
    pub config: Config,
    /// Derived quantities written as `# result key=value`.
    pub results: Vec<(String, String)>,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Column plotted by `--svg`, if any.
    pub plot_column: Option<&'static str>,
}

impl ResultTable {
    pub fn new(command: Command, config: &Config, headers: Vec<&'static str>) -> Self {
        ResultTable {
            command,
            config: config.clone(),
            results: Vec::new(),
            headers,
            rows: Vec::new(),
            plot_column: None,
        }
    }

    pub fn result(&mut self, key: &str, value: impl ToString) {
        self.results.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.headers.iter().position(|h| *h == name)?;
        self.rows.iter().map(|r| r[idx].as_f64()).collect()
    }

    /// Checks that a probability column sums to one before it is written.
    pub fn check_distribution(&self, name: &'static str) -> Result<(), CliError> {
        let col = self.column(name).expect("column exists");
        let total = col.iter().copied().collect::<CompensatedSum>().value();
        if (total - 1.0).abs() > 1e-9 || col.iter().any(|p| *p < 0.0) {
            return Err(CliError::Numeric {
                invariant: "distribution sums to 1 within 1e-9",
                detail: format!("column '{name}' sums to {total:.17}"),
            });
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut out = Vec::new();
        out.extend_from_slice(format!("# edgewalk {}\n", env!("CARGO_PKG_VERSION")).as_bytes());
        out.extend_from_slice(format!("# command {}\n", self.command.name()).as_bytes());
        for (k, v) in self.config.to_pairs() {
            out.extend_from_slice(format!("{METADATA_PREFIX}{k}={v}\n").as_bytes());
        }
        for (k, v) in &self.results {
            out.extend_from_slice(format!("# result {k}={v}\n").as_bytes());
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}
