//! Dataset files: `#` metadata lines, one header row, comma-separated data.
//!
//! Metadata lines are either `# key = value` (a config setting, so the file
//! can be regenerated from its own header) or `# key: value` (informational).

use std::io::{self, Write};

/// Metadata block written at the top of every dataset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    pub settings: Vec<(String, String)>,
    pub info: Vec<(String, String)>,
}

impl Metadata {
    pub fn setting(&mut self, key: &str, value: impl ToString) {
        self.settings.push((key.to_string(), value.to_string()));
    }

    pub fn info(&mut self, key: &str, value: impl ToString) {
        self.info.push((key.to_string(), value.to_string()));
    }

    fn write<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for (k, v) in &self.info {
            debug_assert!(!v.contains(" = "), "info value would read back as a setting");
            writeln!(w, "# {k}: {v}")?;
        }
        for (k, v) in &self.settings {
            writeln!(w, "# {k} = {v}")?;
        }
        Ok(())
    }
}

/// Formats a float the way every data column is written.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.12e}")
}

/// Writes a table whose columns all have the same length.
pub fn write_table<W: Write>(
    w: &mut W,
    meta: &Metadata,
    header: &[&str],
    columns: &[&[f64]],
) -> io::Result<()> {
    assert_eq!(header.len(), columns.len(), "one header per column");
    let rows = columns.first().map_or(0, |c| c.len());
    assert!(columns.iter().all(|c| c.len() == rows), "ragged columns");
    meta.write(w)?;
    writeln!(w, "{}", header.join(","))?;
    let mut line = String::new();
    for r in 0..rows {
        line.clear();
        for (j, c) in columns.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&fmt_float(c[r]));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// A dataset file read back.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Metadata,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReadError {
    #[error("missing header row")]
    MissingHeader,
    #[error("line {line}: expected {expected} fields, got {got}")]
    Ragged {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: `{text}` is not a number")]
    Number { line: usize, text: String },
    #[error("no column named `{0}`")]
    NoColumn(String),
}

impl Table {
    pub fn parse(text: &str) -> Result<Self, ReadError> {
        let mut meta = Metadata::default();
        let mut header = None;
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some((k, v)) = rest.split_once(" = ") {
                    meta.settings.push((k.trim().to_string(), v.trim().to_string()));
                } else if let Some((k, v)) = rest.split_once(": ") {
                    meta.info.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            match &header {
                None => header = Some(fields.iter().map(|s| s.trim().to_string()).collect()),
                Some(h) => {
                    let h: &Vec<String> = h;
                    if fields.len() != h.len() {
                        return Err(ReadError::Ragged {
                            line: n + 1,
                            expected: h.len(),
                            got: fields.len(),
                        });
                    }
                    let row = fields
                        .iter()
                        .map(|f| {
                            f.trim().parse::<f64>().map_err(|_| ReadError::Number {
                                line: n + 1,
                                text: f.to_string(),
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    rows.push(row);
                }
            }
        }
        Ok(Self {
            meta,
            header: header.ok_or(ReadError::MissingHeader)?,
            rows,
        })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, ReadError> {
        let j = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| ReadError::NoColumn(name.to_string()))?;
        Ok(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn setting(&self, key: &str) -> Option<&str> {
        self.meta
            .settings
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn info(&self, key: &str) -> Option<&str> {
        self.meta
            .info
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn write_then_read() {
        let mut meta = Metadata::default();
        meta.info("tool", "nsse 0.1.0");
        meta.setting("v", "1,inf");
        let x = [-1.5, 0.0, 2.25e-300];
        let y = [1.0, f64::MIN_POSITIVE, 123456.789];
        let mut buf = Vec::new();
        write_table(&mut buf, &meta, &["x", "y"], &[&x, &y]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# tool: nsse 0.1.0\n# v = 1,inf\nx,y\n"));
        assert!(text.contains("-1.500000000000e0,1.000000000000e0\n"));
        let t = Table::parse(&text).unwrap();
        assert_eq!(t.meta, meta);
        assert_eq!(t.header, vec!["x", "y"]);
        assert_eq!(t.column("x").unwrap(), x.to_vec());
        let y_back = t.column("y").unwrap();
        for (a, b) in y.iter().zip(&y_back) {
            assert!((a - b).abs() <= 1e-12 * a.abs());
        }
        assert_eq!(t.setting("v"), Some("1,inf"));
        assert_eq!(t.info("tool"), Some("nsse 0.1.0"));
        assert_eq!(t.column("z").unwrap_err(), ReadError::NoColumn("z".into()));
    }

    #[test]
    fn rejects_malformed_tables() {
        assert_eq!(Table::parse("# a: b\n").unwrap_err(), ReadError::MissingHeader);
        assert!(matches!(
            Table::parse("a,b\n1,2\n3\n").unwrap_err(),
            ReadError::Ragged { line: 3, .. }
        ));
        assert!(matches!(
            Table::parse("a\nx\n").unwrap_err(),
            ReadError::Number { line: 2, .. }
        ));
    }
}
