//! Text formats: the matrix file and the line-delimited session log.
//!
//! A matrix file holds `n` rows of `n` whitespace-separated tokens. Each
//! token is a positive number, a fraction `p/q` of positive numbers, or `*`
//! for a missing entry. Diagonal tokens must be 1, missing entries must be
//! missing on both sides of the diagonal, and present mirrored entries must
//! be reciprocal within 1e-6. Lines starting with `#` are comments.
//!
//! A session log starts with a JSON header line naming the format version,
//! the order and the threshold, followed by one JSON [`StepRecord`] per line.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::PcMatrix;
use crate::monitor::{MonitorSession, StepRecord};

pub const RECIPROCITY_TOL: f64 = 1e-6;
pub const LOG_FORMAT: &str = "pcm-session-log";
pub const LOG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{at}: {kind}")]
pub struct ParseError {
    pub at: Location,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("no matrix rows found")]
    Empty,
    #[error("matrix order {0} is below the minimum of 2")]
    OrderTooSmall(usize),
    #[error("row has {found} tokens, expected {expected}")]
    RowLength { expected: usize, found: usize },
    #[error("found {found} rows, expected {expected}")]
    RowCount { expected: usize, found: usize },
    #[error("invalid token {0:?}")]
    BadToken(String),
    #[error("value {0} is not positive and finite")]
    NonPositive(f64),
    #[error("diagonal entry must be 1, found {0:?}")]
    Diagonal(String),
    #[error("entries ({i},{j}) and ({j},{i}) are not reciprocal: {a} * {b} = {}", a * b)]
    Reciprocity { i: usize, j: usize, a: f64, b: f64 },
    #[error("entry ({i},{j}) is missing but ({j},{i}) is given")]
    AsymmetricMissing { i: usize, j: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Cell {
    Missing,
    Value(f64),
}

/// Parses a single value token: a positive number or a fraction `p/q`.
pub fn parse_value(token: &str) -> Result<f64, ParseErrorKind> {
    let number = |s: &str| -> Result<f64, ParseErrorKind> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| ParseErrorKind::BadToken(token.to_string()))
    };
    let v = match token.split_once('/') {
        Some((p, q)) => number(p)? / number(q)?,
        None => number(token)?,
    };
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ParseErrorKind::NonPositive(v))
    }
}

fn parse_cell(token: &str) -> Result<Cell, ParseErrorKind> {
    if token == "*" {
        Ok(Cell::Missing)
    } else {
        parse_value(token).map(Cell::Value)
    }
}

struct Token<'a> {
    text: &'a str,
    at: Location,
}

fn tokenize(line: &str, line_no: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (idx, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(idx),
            (true, Some(s)) => {
                out.push(Token {
                    text: &line[s..idx],
                    at: Location {
                        line: line_no,
                        column: line[..s].chars().count() + 1,
                    },
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<PcMatrix, ParseError> {
    let rows: Vec<Vec<Token>> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(idx, l)| tokenize(l, idx + 1))
        .collect();

    let err = |at: &Location, kind| ParseError { at: at.clone(), kind };
    let Some(first) = rows.first() else {
        return Err(err(&Location { line: 1, column: 1 }, ParseErrorKind::Empty));
    };
    let n = first.len();
    if n < 2 {
        return Err(err(&first[0].at, ParseErrorKind::OrderTooSmall(n)));
    }
    for row in &rows {
        if row.len() != n {
            let at = row.get(n).or(row.last()).map(|t| &t.at).expect("non-empty row");
            return Err(err(at, ParseErrorKind::RowLength { expected: n, found: row.len() }));
        }
    }
    if rows.len() != n {
        let at = rows.get(n).unwrap_or(rows.last().expect("non-empty"))[0].at.clone();
        return Err(err(&at, ParseErrorKind::RowCount { expected: n, found: rows.len() }));
    }

    let mut cells = vec![vec![Cell::Missing; n]; n];
    for (r, row) in rows.iter().enumerate() {
        for (c, tok) in row.iter().enumerate() {
            let cell = parse_cell(tok.text).map_err(|k| err(&tok.at, k))?;
            if r == c && cell != Cell::Value(1.0) {
                return Err(err(&tok.at, ParseErrorKind::Diagonal(tok.text.to_string())));
            }
            cells[r][c] = cell;
        }
    }

    let mut m = PcMatrix::empty(n).expect("order checked");
    for i in 0..n {
        for j in i + 1..n {
            let (i1, j1) = (i + 1, j + 1);
            match (cells[i][j], cells[j][i]) {
                (Cell::Missing, Cell::Missing) => {}
                (Cell::Value(a), Cell::Value(b)) => {
                    if (a * b - 1.0).abs() > RECIPROCITY_TOL {
                        return Err(err(&rows[j][i].at, ParseErrorKind::Reciprocity { i: j1, j: i1, a: b, b: a }));
                    }
                    m.insert(i1, j1, a).expect("validated positive");
                }
                (Cell::Missing, Cell::Value(_)) => {
                    return Err(err(&rows[i][j].at, ParseErrorKind::AsymmetricMissing { i: i1, j: j1 }));
                }
                (Cell::Value(_), Cell::Missing) => {
                    return Err(err(&rows[j][i].at, ParseErrorKind::AsymmetricMissing { i: j1, j: i1 }));
                }
            }
        }
    }
    Ok(m)
}

/// Rounds to a relative error of at most `10^-precision` and prints the
/// shortest decimal that reads back as the rounded value.
fn format_sig(v: f64, precision: usize) -> String {
    let digits = (precision + 1).clamp(1, 17);
    let rounded: f64 = format!("{:.*e}", digits - 1, v).parse().expect("float formatting");
    format!("{rounded}")
}

/// Writes the full grid, each value within `10^-precision` relative of the
/// stored one. Lower-triangle cells are written as `1/x` of their
/// mirror so reciprocity survives the round trip exactly.
pub fn emit_matrix(m: &PcMatrix, precision: usize) -> String {
    let n = m.order();
    let mut out = String::new();
    for i in 1..=n {
        let row: Vec<String> = (1..=n)
            .map(|j| {
                if i == j {
                    "1".to_string()
                } else if i < j {
                    m.get(i, j).map_or("*".into(), |v| format_sig(v, precision))
                } else {
                    m.get(j, i).map_or("*".into(), |v| format!("1/{}", format_sig(v, precision)))
                }
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub threshold: f64,
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error("session log is empty")]
    Empty,
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("unsupported log format {0:?} version {1}")]
    Format(String, u32),
    #[error("line {line}: replay failed: {source}")]
    Replay { line: usize, source: crate::Error },
    #[error("step {step}: replayed CM* {replayed} differs from logged {logged}")]
    Diverged { step: usize, logged: f64, replayed: f64 },
}

pub fn emit_log_header(s: &MonitorSession) -> String {
    let header = LogHeader {
        format: LOG_FORMAT.into(),
        version: LOG_VERSION,
        n: s.matrix().order(),
        threshold: s.threshold(),
    };
    serde_json::to_string(&header).expect("header serializes")
}

pub fn emit_record(r: &StepRecord) -> String {
    serde_json::to_string(r).expect("record serializes")
}

pub fn emit_session_log(s: &MonitorSession) -> String {
    let mut out = emit_log_header(s);
    out.push('\n');
    for r in s.history() {
        out.push_str(&emit_record(r));
        out.push('\n');
    }
    out
}

pub fn parse_session_log(text: &str) -> Result<(LogHeader, Vec<StepRecord>), LogError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or(LogError::Empty)?;
    let header: LogHeader =
        serde_json::from_str(first).map_err(|source| LogError::Json { line: 1, source })?;
    if header.format != LOG_FORMAT || header.version != LOG_VERSION {
        return Err(LogError::Format(header.format, header.version));
    }
    let records = lines
        .map(|(idx, l)| serde_json::from_str(l).map_err(|source| LogError::Json { line: idx + 1, source }))
        .collect::<Result<_, _>>()?;
    Ok((header, records))
}

/// Rebuilds a session by re-applying every logged action, checking that each
/// re-solved `CM*` matches the log within 1e-9.
pub fn replay_session_log(text: &str) -> Result<MonitorSession, LogError> {
    let (header, records) = parse_session_log(text)?;
    let mut s = MonitorSession::new(header.n, header.threshold)
        .map_err(|source| LogError::Replay { line: 1, source })?;
    for (idx, logged) in records.iter().enumerate() {
        let replayed = s
            .apply(&logged.action)
            .map_err(|source| LogError::Replay { line: idx + 2, source })?
            .cm_star;
        if (replayed - logged.cm_star).abs() > 1e-9 {
            return Err(LogError::Diverged { step: logged.step, logged: logged.cm_star, replayed });
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MATRIX_A: &str = "\
# matrix A
1     *     3.5   5
*     1     3     2.5
1/3.5 1/3   1     *
1/5   1/2.5 *     1
";

    #[test]
    fn parses_matrix_a() {
        let m = parse_matrix(MATRIX_A).unwrap();
        assert_eq!(m.given_pairs(), vec![(1, 3), (1, 4), (2, 3), (2, 4)]);
        assert!((m.get(3, 1).unwrap() - 1.0 / 3.5).abs() < 1e-15);
    }

    #[test]
    fn fraction_tokens() {
        assert!((parse_value("1/3.5").unwrap() - 0.2857142857142857).abs() < 1e-15);
        assert_eq!(parse_value("3/2").unwrap(), 1.5);
        assert!(parse_value("0").is_err());
        assert!(parse_value("-2").is_err());
        assert!(parse_value("1/0").is_err());
        assert!(parse_value("x").is_err());
    }

    fn kind(text: &str) -> (ParseErrorKind, Location) {
        let e = parse_matrix(text).unwrap_err();
        (e.kind, e.at)
    }

    #[test]
    fn rejects_bad_inputs_with_locations() {
        assert_eq!(kind("1\n").0, ParseErrorKind::OrderTooSmall(1));
        assert_eq!(kind("").0, ParseErrorKind::Empty);
        let (k, at) = kind("1 2\n1/2 1 3\n");
        assert_eq!(k, ParseErrorKind::RowLength { expected: 2, found: 3 });
        assert_eq!(at, Location { line: 2, column: 7 });
        assert!(matches!(kind("1 2\n1/2 1\n1 1\n").0, ParseErrorKind::RowCount { .. }));
        let (k, at) = kind("2 2\n1/2 1\n");
        assert!(matches!(k, ParseErrorKind::Diagonal(_)));
        assert_eq!(at, Location { line: 1, column: 1 });
        let (k, at) = kind("1 2\n0.4 1\n");
        assert!(matches!(k, ParseErrorKind::Reciprocity { .. }));
        assert_eq!(at, Location { line: 2, column: 1 });
        let (k, at) = kind("1 *\n0.5 1\n");
        assert_eq!(k, ParseErrorKind::AsymmetricMissing { i: 1, j: 2 });
        assert_eq!(at, Location { line: 1, column: 3 });
        assert!(matches!(kind("1 -2\n-1/2 1\n").0, ParseErrorKind::NonPositive(_)));
        assert!(matches!(kind("1 abc\n1 1\n").0, ParseErrorKind::BadToken(_)));
    }

    #[test]
    fn crlf_accepted() {
        let m = parse_matrix("1 2\r\n1/2 1\r\n").unwrap();
        assert_eq!(m.get(1, 2), Some(2.0));
    }

    #[test]
    fn emit_empty_order_three() {
        let m = PcMatrix::empty(3).unwrap();
        assert_eq!(emit_matrix(&m, 12), "1 * *\n* 1 *\n* * 1\n");
    }

    #[test]
    fn emit_matrix_a() {
        let m = parse_matrix(MATRIX_A).unwrap();
        assert_eq!(
            emit_matrix(&m, 12),
            "1 * 3.5 5\n* 1 3 2.5\n1/3.5 1/3 1 *\n1/5 1/2.5 * 1\n"
        );
    }

    #[test]
    fn session_log_round_trip() {
        let mut s = MonitorSession::new(3, 0.05).unwrap();
        s.add_entry(1, 2, 3.0).unwrap();
        s.add_entry(1, 3, 5.0).unwrap();
        s.add_entry(2, 3, 1.5).unwrap();
        s.retract_entry(1, 3).unwrap();
        s.undo().unwrap();
        let log = emit_session_log(&s);
        assert_eq!(log.lines().count(), 6);
        let (header, records) = parse_session_log(&log).unwrap();
        assert_eq!(header.n, 3);
        assert_eq!(records, s.history());
        let replayed = replay_session_log(&log).unwrap();
        assert_eq!(replayed.history(), s.history());
        assert!(matches!(parse_session_log("{}"), Err(LogError::Json { .. })));
        assert!(matches!(parse_session_log(""), Err(LogError::Empty)));
    }
}
