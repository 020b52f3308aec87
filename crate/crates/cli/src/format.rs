//! Text forms of an encoding, one line each, and their parsers.

use lbpe_core::io::{escape_piece, unescape_piece};
use lbpe_core::{Encoding, TokenId, Vocabulary};
use serde::{Deserialize, Serialize};

use crate::args::TokenFormat;

#[derive(Serialize, Deserialize)]
struct JsonToken {
    id: TokenId,
    piece: String,
}

/// Renders `encoding` as one line, without the trailing newline.
pub fn render(encoding: &Encoding, vocab: &Vocabulary, format: TokenFormat) -> String {
    match format {
        TokenFormat::Ids => encoding
            .iter()
            .map(|(id, piece)| {
                if id == vocab.unknown_id() {
                    format!("{id}:{}", escape_piece(piece))
                } else {
                    id.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" "),
        TokenFormat::Pieces => encoding
            .pieces
            .iter()
            .map(|p| escape_piece(p))
            .collect::<Vec<_>>()
            .join(" "),
        TokenFormat::Json => {
            let tokens: Vec<JsonToken> = encoding
                .iter()
                .map(|(id, piece)| JsonToken {
                    id,
                    piece: piece.to_owned(),
                })
                .collect();
            serde_json::to_string(&tokens).expect("token list serializes")
        }
    }
}

fn piece_of(vocab: &Vocabulary, id: TokenId) -> Result<&str, String> {
    vocab.piece(id).ok_or_else(|| {
        format!(
            "token id {id} is outside the vocabulary (size {})",
            vocab.len()
        )
    })
}

/// Parses one rendered line back into text.
pub fn decode_line(line: &str, vocab: &Vocabulary, format: TokenFormat) -> Result<String, String> {
    let mut out = String::new();
    match format {
        TokenFormat::Ids => {
            for field in line.split_ascii_whitespace() {
                match field.split_once(':') {
                    Some((id, escaped)) => {
                        let id: TokenId = id.parse().map_err(|_| format!("bad token {field:?}"))?;
                        if id != vocab.unknown_id() {
                            return Err(format!(
                                "{field:?} carries text but {id} is not the unknown id {}",
                                vocab.unknown_id()
                            ));
                        }
                        out.push_str(&unescape_piece(escaped).map_err(|e| e.to_string())?);
                    }
                    None => {
                        let id: TokenId =
                            field.parse().map_err(|_| format!("bad token {field:?}"))?;
                        out.push_str(piece_of(vocab, id)?);
                    }
                }
            }
        }
        TokenFormat::Pieces => {
            for field in line.split_ascii_whitespace() {
                out.push_str(&unescape_piece(field).map_err(|e| e.to_string())?);
            }
        }
        TokenFormat::Json => {
            if line.trim().is_empty() {
                return Ok(out);
            }
            let tokens: Vec<JsonToken> = serde_json::from_str(line).map_err(|e| e.to_string())?;
            for t in tokens {
                if t.id == vocab.unknown_id() {
                    out.push_str(&t.piece);
                } else {
                    out.push_str(piece_of(vocab, t.id)?);
                }
            }
        }
    }
    Ok(out)
}
