//! CSV tables with a `#` metadata header, written atomically.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use super::spec::{Experiment, ExperimentSpec};
use crate::interference::WeightMode;

/// One cell of an output row.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Flag(bool),
    /// Column not computed for this row (for example, Monte Carlo disabled).
    Empty,
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::Int(v) => write!(out, "{v}").unwrap(),
            // Shortest string that parses back to the same f64, switching to
            // exponent notation for very small or large magnitudes.
            Cell::Real(v) => write!(out, "{v:?}").unwrap(),
            Cell::Flag(v) => out.push(if *v { '1' } else { '0' }),
            Cell::Empty => {}
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(v) => Some(v as f64),
            Cell::Real(v) => Some(v),
            Cell::Flag(v) => Some(if v { 1.0 } else { 0.0 }),
            Cell::Empty => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Column header line followed by the rows.
    pub fn data_section(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.render(&mut out);
            }
            out.push('\n');
        }
        out
    }
}

/// The full file: metadata header, then the data section.
pub fn render_csv(experiment: Experiment, spec: &ExperimentSpec, table: &Table) -> String {
    let mut out = format!(
        "# d2dcache {}\n# command: {experiment}\n# seed: {}\n# spec:\n",
        crate::VERSION,
        spec.run.seed
    );
    for line in spec.to_toml().lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out.push_str(&table.data_section());
    out
}

/// Extracts the spec TOML from a rendered header.
pub fn header_spec(csv: &str) -> String {
    csv.lines()
        .take_while(|l| l.starts_with('#'))
        .skip_while(|l| *l != "# spec:")
        .skip(1)
        .map(|l| l.strip_prefix("# ").unwrap_or(l.trim_start_matches('#')))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Lines after the `#` header.
pub fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory; nothing is left behind if any step fails.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::Builder::new()
        .prefix(".d2dcache-")
        .suffix(".partial")
        .tempfile_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// `results.csv` → `results.gp`.
pub fn plot_script_path(csv: &Path) -> PathBuf {
    csv.with_extension("gp")
}

/// A gnuplot script that plots `csv`.
pub fn plot_script(experiment: Experiment, spec: &ExperimentSpec, csv: &Path) -> String {
    let file = csv
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut s = String::from("set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\nset grid\n");
    let _ = writeln!(s, "set title '{} ({})'", spec.scenario.name, experiment);
    match experiment {
        Experiment::Coverage => {
            let (pc, bound) = match spec.run.weight_mode {
                WeightMode::Paper => (3, 5),
                WeightMode::Exact => (4, 6),
            };
            s.push_str("set xlabel 'SIR threshold (dB)'\nset ylabel 'coverage probability'\nset logscale y\n");
            let plots: Vec<String> = spec
                .run
                .ranks
                .iter()
                .map(|k| {
                    format!(
                        "'{file}' using 1:($2=={k} ? ${pc} : 1/0) with lines title 'k={k} analytic', \
                         '{file}' using 1:($2=={k} ? $7 : 1/0) with points title 'k={k} simulation', \
                         '{file}' using 1:($2=={k} ? ${bound} : 1/0) with lines dashtype 2 title 'k={k} bound'"
                    )
                })
                .collect();
            let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
        }
        Experiment::HitCurve => {
            s.push_str("set xlabel 'b1'\nset ylabel 'total hit probability'\n");
            let plots: Vec<String> = spec
                .run
                .n_active_values
                .iter()
                .map(|n| {
                    format!("'{file}' using 2:($1=={n} ? $4 : 1/0) with lines title 'N_a={n}'")
                })
                .collect();
            let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
        }
        Experiment::MaxHit => {
            s.push_str("set xlabel 'active devices'\nset ylabel 'maximum hit probability'\n");
            let _ = writeln!(s, "plot '{file}' using 1:2 with linespoints title 'P*_hit'");
        }
        Experiment::Throughput => {
            s.push_str("set xlabel 'active devices'\nset ylabel 'throughput'\n");
            let _ = writeln!(s, "plot '{file}' using 1:3 with linespoints title 'T*'");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_cells() {
        let mut t = Table::new(["a", "b", "c", "d"]);
        t.push(vec![
            Cell::Int(3),
            Cell::Real(0.1),
            Cell::Flag(true),
            Cell::Empty,
        ]);
        t.push(vec![
            Cell::Int(4),
            Cell::Real(1e-20),
            Cell::Flag(false),
            Cell::Real(1.0),
        ]);
        assert_eq!(t.data_section(), "a,b,c,d\n3,0.1,1,\n4,1e-20,0,1.0\n");
    }

    #[test]
    fn header_reproduces_spec() {
        let spec = ExperimentSpec::defaults(Experiment::Coverage);
        let csv = render_csv(Experiment::Coverage, &spec, &Table::new(["x"]));
        assert!(csv.starts_with("# d2dcache "));
        let text = header_spec(&csv);
        let back: ExperimentSpec = toml::from_str(&text).unwrap();
        assert_eq!(back, spec);
        assert_eq!(data_lines(&csv), vec!["x"]);
    }

    #[test]
    fn atomic_write_replaces_target() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
