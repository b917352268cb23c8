//! Complex and real list literals as they appear inside one CSV cell.
//!
//! Accepted complex element spellings:
//! - `(re,im)`: parenthesized pair, the canonical output form
//! - `re+imj`: Python style, optionally wrapped in parentheses
//! - `[re, im]`: two-element list
//!
//! A cell holds a list of elements, optionally wrapped in one pair of
//! square brackets, separated by commas and/or whitespace.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::signal::ComplexSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComplexFormat {
    ParenPair,
    APlusBj,
    JsonList,
}

impl std::str::FromStr for ComplexFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paren-pair" | "paren_pair" => Ok(Self::ParenPair),
            "a-plus-bj" | "a_plus_bj" => Ok(Self::APlusBj),
            "json-list" | "json_list" => Ok(Self::JsonList),
            other => Err(format!("unknown complex format {other:?}")),
        }
    }
}

/// Format `v` with 17 significant digits; parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// `[(re,im),(re,im),...]`
pub fn format_complex_list(values: &[ComplexSample]) -> String {
    let mut s = String::with_capacity(values.len() * 52 + 2);
    s.push('[');
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "({:.16e},{:.16e})", v.re, v.im);
    }
    s.push(']');
    s
}

/// `[v,v,...]`
pub fn format_real_list(values: &[f64]) -> String {
    let mut s = String::with_capacity(values.len() * 25 + 2);
    s.push('[');
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{v:.16e}");
    }
    s.push(']');
    s
}

fn strip_outer_brackets(cell: &str) -> &str {
    let t = cell.trim();
    if t.len() >= 2 && t.starts_with('[') && t.ends_with(']') {
        t[1..t.len() - 1].trim()
    } else {
        t
    }
}

/// Guess the element spelling from the first element of a cell.
pub fn detect_format(cell: &str) -> Option<ComplexFormat> {
    let body = strip_outer_brackets(cell);
    let first = body.chars().next()?;
    match first {
        '[' => Some(ComplexFormat::JsonList),
        '(' => {
            let close = body.find(')')?;
            if body[..close].contains(',') {
                Some(ComplexFormat::ParenPair)
            } else {
                Some(ComplexFormat::APlusBj)
            }
        }
        _ => Some(ComplexFormat::APlusBj),
    }
}

fn parse_num(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok()
}

/// Groups delimited by `open`/`close`, with only separators between them.
fn delimited_groups(body: &str, open: char, close: char) -> Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let mut rest = body;
    loop {
        rest = rest.trim_start_matches(|c: char| c == ',' || c.is_whitespace());
        if rest.is_empty() {
            return Ok(out);
        }
        if !rest.starts_with(open) {
            return Err(rest.chars().take(32).collect());
        }
        let end = rest.find(close).ok_or_else(|| rest.chars().take(32).collect::<String>())?;
        out.push(&rest[1..end]);
        rest = &rest[end + 1..];
    }
}

fn parse_pair(inner: &str) -> Option<ComplexSample> {
    let mut it = inner.split(',');
    let re = parse_num(it.next()?)?;
    let im = parse_num(it.next()?)?;
    if it.next().is_some() {
        return None;
    }
    Some(ComplexSample::new(re, im))
}

/// `a+bj`, `a-bj`, `bj`, `a`, with optional surrounding parentheses.
pub fn parse_python_complex(token: &str) -> Option<ComplexSample> {
    let t = token.trim();
    let t = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(t).trim();
    if t.is_empty() {
        return None;
    }
    let Some(body) = t.strip_suffix(['j', 'J', 'i']) else {
        return parse_num(t).map(|re| ComplexSample::new(re, 0.0));
    };
    // split at the last sign that is not an exponent sign and not leading
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    match split {
        Some(i) => {
            let re = parse_num(&body[..i])?;
            let im_txt = &body[i..];
            let im = match im_txt {
                "+" => 1.0,
                "-" => -1.0,
                _ => parse_num(im_txt.strip_prefix('+').unwrap_or(im_txt))?,
            };
            Some(ComplexSample::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                _ => parse_num(body)?,
            };
            Some(ComplexSample::new(0.0, im))
        }
    }
}

/// Parse a cell of complex literals. On failure returns the offending literal.
pub fn parse_complex_list(cell: &str, format: ComplexFormat) -> Result<Vec<ComplexSample>, String> {
    let body = strip_outer_brackets(cell);
    match format {
        ComplexFormat::ParenPair => delimited_groups(body, '(', ')')?
            .into_iter()
            .map(|g| parse_pair(g).ok_or_else(|| format!("({g})")))
            .collect(),
        ComplexFormat::JsonList => delimited_groups(body, '[', ']')?
            .into_iter()
            .map(|g| parse_pair(g).ok_or_else(|| format!("[{g}]")))
            .collect(),
        ComplexFormat::APlusBj => body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| parse_python_complex(t).ok_or_else(|| t.to_string()))
            .collect(),
    }
}

/// Parse a cell of real numbers separated by commas and/or whitespace.
pub fn parse_real_list(cell: &str) -> Result<Vec<f64>, String> {
    strip_outer_brackets(cell)
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| parse_num(t).ok_or_else(|| t.to_string()))
        .collect()
}
