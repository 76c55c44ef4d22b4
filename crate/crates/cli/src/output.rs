//! Locale-independent table and image writers.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use pcx_core::scan::SpacetimeGrid;

use crate::error::CliError;

/// Fixed scientific format with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Accumulates CSV lines and `#` footer lines.
#[derive(Default)]
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut t = Table::default();
        t.line(header.iter().copied());
        t
    }

    pub fn line<S: AsRef<str>>(&mut self, fields: impl IntoIterator<Item = S>) {
        let fields: Vec<String> = fields.into_iter().map(|f| f.as_ref().to_string()).collect();
        writeln!(self.text, "{}", fields.join(",")).expect("writing to a String");
    }

    pub fn comment(&mut self, text: impl AsRef<str>) {
        writeln!(self.text, "# {}", text.as_ref()).expect("writing to a String");
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(CliError::io(path))
}

/// Write `table` to `dir/name`, or to stdout when there is no directory.
pub fn emit(dir: Option<&Path>, name: &str, table: &Table) -> Result<Option<PathBuf>, CliError> {
    match dir {
        Some(dir) => {
            ensure_dir(dir)?;
            let path = dir.join(name);
            write_file(&path, table.as_str().as_bytes())?;
            Ok(Some(path))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(table.as_str().as_bytes()).map_err(CliError::io("<stdout>"))?;
            Ok(None)
        }
    }
}

/// Binary PGM (P5, maxval 255): time runs left to right, site 1 is the top
/// row, gray level `round(255·v)` on a fixed 0..1 bit scale.
pub fn pgm(grid: &SpacetimeGrid) -> Vec<u8> {
    let width = grid.times.len();
    let mut bytes = format!("P5\n{} {}\n255\n", width, grid.sites).into_bytes();
    bytes.extend(grid.values().iter().map(|v| (255.0 * v.clamp(0.0, 1.0)).round() as u8));
    bytes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_has_17_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(0.0), "0.0000000000000000e0");
        assert_eq!(num(-2.5), "-2.5000000000000000e0");
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.line(["1", "2"]);
        t.comment("done");
        assert_eq!(t.as_str(), "a,b\n1,2\n# done\n");
    }
}
