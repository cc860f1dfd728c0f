//! Plain-text plot data: `#`-prefixed header naming the figure, then
//! whitespace-separated columns, one point per line. Loads directly into
//! gnuplot or pgfplots without preprocessing.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;

pub fn emit_plot_data(
    path: &Path,
    figure: &str,
    columns: &[&str],
    rows: &[Vec<f64>],
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# figure: {figure}")?;
    writeln!(w, "# columns: {}", columns.join(" "))?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_then_columns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("decay.dat");
        emit_plot_data(
            &path,
            "error-decay",
            &["x", "abs_eps"],
            &[vec![27.0, 0.004089], vec![28.0, 0.003944]],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# figure: error-decay"));
        assert_eq!(lines.next(), Some("# columns: x abs_eps"));
        let first: Vec<f64> = lines
            .next()
            .unwrap()
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        assert_eq!(first, vec![27.0, 0.004089]);
    }
}
