//! ASCII-safe escaping for token pieces.
//!
//! Printable ASCII other than `\` passes through. `\\`, `\s` (space), `\n`,
//! `\t` and `\r` are short escapes; every other scalar is written `\u{HEX}`.
//! Escaped pieces never contain whitespace, so they can be space-separated.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("bad escape in {input:?} at byte {offset}")]
pub struct UnescapeError {
    pub input: String,
    pub offset: usize,
}

pub fn escape_piece(piece: &str) -> String {
    let mut out = String::with_capacity(piece.len());
    for c in piece.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            ' ' => out.push_str("\\s"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '!'..='~' => out.push(c),
            _ => {
                out.push_str(&format!("\\u{{{:X}}}", c as u32));
            }
        }
    }
    out
}

pub fn unescape_piece(escaped: &str) -> Result<String, UnescapeError> {
    let err = |offset| UnescapeError {
        input: escaped.to_owned(),
        offset,
    };
    let mut out = String::with_capacity(escaped.len());
    let mut chars = escaped.char_indices();
    while let Some((offset, c)) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some((_, '\\')) => out.push('\\'),
            Some((_, 's')) => out.push(' '),
            Some((_, 'n')) => out.push('\n'),
            Some((_, 't')) => out.push('\t'),
            Some((_, 'r')) => out.push('\r'),
            Some((_, 'u')) => {
                if chars.next().map(|(_, c)| c) != Some('{') {
                    return Err(err(offset));
                }
                let mut hex = String::new();
                loop {
                    match chars.next() {
                        Some((_, '}')) => break,
                        Some((_, h)) if h.is_ascii_hexdigit() && hex.len() < 6 => hex.push(h),
                        _ => return Err(err(offset)),
                    }
                }
                let scalar = u32::from_str_radix(&hex, 16)
                    .ok()
                    .and_then(char::from_u32)
                    .ok_or_else(|| err(offset))?;
                out.push(scalar);
            }
            _ => return Err(err(offset)),
        }
    }
    Ok(out)
}
