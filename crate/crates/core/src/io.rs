//! Reading count tables and raw sample files.
//!
//! Count files hold one cell per line, `symbol,count` or `x,y[,z],count`.
//! Sample files hold one observation per line, a symbol or a comma-separated
//! tuple. In both, a first line whose last field is not a nonnegative integer
//! is taken as a header, blank lines are skipped, and symbols are arbitrary
//! strings.

use std::collections::HashMap;
use std::path::Path;

use crate::counts::JointHistogram;
use crate::error::{Error, Result};

fn split(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn is_header(fields: &[&str]) -> bool {
    fields.last().is_none_or(|f| f.parse::<u64>().is_err())
}

/// Assigns dense ids per axis in first-seen order.
struct Interner {
    axes: Vec<HashMap<String, u32>>,
}

impl Interner {
    fn new(arity: usize) -> Self {
        Self { axes: vec![HashMap::new(); arity] }
    }

    fn key(&mut self, symbols: &[&str]) -> Vec<u32> {
        symbols
            .iter()
            .zip(self.axes.iter_mut())
            .map(|(s, ids)| {
                let next = ids.len() as u32;
                *ids.entry((*s).to_string()).or_insert(next)
            })
            .collect()
    }
}

/// Parses a count table. `arity` pins the expected number of symbol columns.
pub fn parse_counts(text: &str, arity: Option<usize>) -> Result<JointHistogram> {
    let mut cells = Vec::new();
    let mut found: Option<usize> = arity;
    let mut interner: Option<Interner> = None;
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields = split(line);
        if std::mem::take(&mut first) && is_header(&fields) {
            continue;
        }
        if fields.len() < 2 {
            return Err(Error::Parse { line: line_no, msg: format!("expected 'symbol,count', got '{line}'") });
        }
        let width = fields.len() - 1;
        match found {
            None => found = Some(width),
            Some(a) if a != width => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected {a} symbol column(s), got {width}"),
                })
            }
            _ => {}
        }
        if !(1..=3).contains(&width) {
            return Err(Error::Parse { line: line_no, msg: format!("{width} symbol columns; at most 3 supported") });
        }
        let count: u64 = fields[width].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("count '{}' is not a nonnegative integer", fields[width]),
        })?;
        if fields[..width].iter().any(|s| s.is_empty()) {
            return Err(Error::Parse { line: line_no, msg: "empty symbol".into() });
        }
        let key = interner.get_or_insert_with(|| Interner::new(width)).key(&fields[..width]);
        cells.push((key, count));
    }
    let width = found.ok_or(Error::EmptySample)?;
    JointHistogram::from_cells(width, cells)
}

/// Parses a raw sample file into a histogram.
pub fn parse_samples(text: &str, arity: Option<usize>) -> Result<JointHistogram> {
    let mut cells: HashMap<Vec<u32>, u64> = HashMap::new();
    let mut order: Vec<Vec<u32>> = Vec::new();
    let mut found = arity;
    let mut interner: Option<Interner> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields = split(line);
        let width = fields.len();
        match found {
            None => found = Some(width),
            Some(a) if a != width => {
                return Err(Error::Parse { line: line_no, msg: format!("expected {a} field(s), got {width}") })
            }
            _ => {}
        }
        if width > 3 {
            return Err(Error::Parse { line: line_no, msg: format!("{width} fields; at most 3 supported") });
        }
        if fields.iter().any(|s| s.is_empty()) {
            return Err(Error::Parse { line: line_no, msg: "empty symbol".into() });
        }
        let key = interner.get_or_insert_with(|| Interner::new(width)).key(&fields);
        let slot = cells.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            0
        });
        *slot += 1;
    }
    let width = found.ok_or(Error::EmptySample)?;
    JointHistogram::from_cells(width, order.into_iter().map(|k| {
        let c = cells[&k];
        (k, c)
    }))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn read_counts(path: &Path, arity: Option<usize>) -> Result<JointHistogram> {
    parse_counts(&read(path)?, arity)
}

pub fn read_samples(path: &Path, arity: Option<usize>) -> Result<JointHistogram> {
    parse_samples(&read(path)?, arity)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_with_and_without_header() {
        let a = parse_counts("symbol,count\na,1\nb,1\nc,1\nd,1\n", None).unwrap();
        let b = parse_counts("a,1\nb,1\n\nc,1\nd,1", Some(1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total(), 4);
        assert_eq!(a.arity(), 1);
    }

    #[test]
    fn joint_counts() {
        let h = parse_counts("x,y,count\n0,0,3\n0,1,3\n1,0,3\n1,1,3\n", None).unwrap();
        assert_eq!(h.arity(), 2);
        assert_eq!(h.occupied(), 4);
        assert_eq!(h.total(), 12);
    }

    #[test]
    fn malformed_lines_report_their_number() {
        let e = parse_counts("a,1\nb,x\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_counts("a,1\nb,c,2\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_counts("x,y,count\n0,0,1\n", Some(3)).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
    }

    #[test]
    fn empty_input() {
        assert!(matches!(parse_counts("", None), Err(Error::EmptySample)));
        assert!(matches!(parse_counts("a,0\n", None), Err(Error::EmptySample)));
        assert!(matches!(parse_samples("\n\n", None), Err(Error::EmptySample)));
    }

    #[test]
    fn samples_tally() {
        let h = parse_samples("a\nb\na\nc\n", None).unwrap();
        assert_eq!(h.to_counts().counts(), &[2, 1, 1]);
        let j = parse_samples("1,2\n1,3\n1,2\n", None).unwrap();
        assert_eq!(j.arity(), 2);
        assert_eq!(j.total(), 3);
        let e = parse_samples("1,2\n1\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }
}
