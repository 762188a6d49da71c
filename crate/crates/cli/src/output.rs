use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

/// `x` at 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes artifacts into the run directory, each opened by a
/// `# config_hash=<sha256>` line.
pub struct Output {
    dir: PathBuf,
    hash: String,
}

impl Output {
    pub fn create(dir: &Path, hash: String) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::validation(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            hash,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn header(&self) -> String {
        format!("# config_hash={}", self.hash)
    }

    pub fn write(&self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        let mut text = self.header();
        text.push('\n');
        text.push_str(body);
        fs::write(&path, text).map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    /// CSV with a column row; every row is formatted by the caller.
    pub fn csv<I>(&self, name: &str, columns: &[&str], rows: I) -> Result<PathBuf, CliError>
    where
        I: IntoIterator<Item = String>,
    {
        let mut body = columns.join(",");
        body.push('\n');
        for row in rows {
            body.push_str(&row);
            body.push('\n');
        }
        self.write(name, &body)
    }
}

/// Comma-joined formatted numbers.
pub fn row(values: &[f64]) -> String {
    let mut s = String::new();
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        let _ = write!(s, "{}", num(*v));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_file_starts_with_hash() {
        let dir = tempfile::tempdir().unwrap();
        let out = Output::create(dir.path(), "abc".into()).unwrap();
        let p = out.csv("t.csv", &["a", "b"], [row(&[1.0, 0.1])]).unwrap();
        let text = fs::read_to_string(p).unwrap();
        assert_eq!(text, "# config_hash=abc\na,b\n1.0000000000000000e0,1.0000000000000001e-1\n");
    }
}
