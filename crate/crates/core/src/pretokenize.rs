//! Pre-tokenization: split raw text at character-class boundaries so that
//! merges never join characters of different classes.
//!
//! Rules, applied to maximal runs of one class:
//!
//! * a boundary falls at every class change;
//! * with `split_digits`, every digit is its own pretoken;
//! * with `attach_leading_space`, a single U+0020 directly before a letter
//!   run moves into that run (`" Capitals"` stays one pretoken). A space before
//!   a digit or other run never fuses, and newlines never fuse.

use std::ops::Range;

use icu_properties::props::{GeneralCategory, GeneralCategoryGroup, WhiteSpace};
use icu_properties::{CodePointMapData, CodePointSetData};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CharClass {
    Letter,
    Digit,
    Whitespace,
    Other,
}

impl CharClass {
    /// Letter = general category L*, Digit = Nd, Whitespace = White_Space,
    /// Other = everything else.
    pub fn of(c: char) -> Self {
        let gc = CodePointMapData::<GeneralCategory>::new().get(c);
        if GeneralCategoryGroup::Letter.contains(gc) {
            CharClass::Letter
        } else if gc == GeneralCategory::DecimalNumber {
            CharClass::Digit
        } else if CodePointSetData::new::<WhiteSpace>().contains(c) {
            CharClass::Whitespace
        } else {
            CharClass::Other
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PreTokenizerConfig {
    pub split_digits: bool,
    pub attach_leading_space: bool,
}

impl Default for PreTokenizerConfig {
    fn default() -> Self {
        Self {
            split_digits: true,
            attach_leading_space: true,
        }
    }
}

/// A slice of the source that merges may not cross.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreToken<'a> {
    pub text: &'a str,
    /// Offsets in scalar units.
    pub char_span: Range<usize>,
}

struct Run {
    class: CharClass,
    bytes: Range<usize>,
    chars: Range<usize>,
}

fn class_runs(text: &str, split_digits: bool) -> Vec<Run> {
    let mut runs: Vec<Run> = Vec::new();
    for (char_pos, (byte_pos, c)) in text.char_indices().enumerate() {
        let class = CharClass::of(c);
        let byte_end = byte_pos + c.len_utf8();
        match runs.last_mut() {
            Some(run) if run.class == class && !(split_digits && class == CharClass::Digit) => {
                run.bytes.end = byte_end;
                run.chars.end = char_pos + 1;
            }
            _ => runs.push(Run {
                class,
                bytes: byte_pos..byte_end,
                chars: char_pos..char_pos + 1,
            }),
        }
    }
    runs
}

pub fn pretokenize<'a>(text: &'a str, config: &PreTokenizerConfig) -> Vec<PreToken<'a>> {
    let runs = class_runs(text, config.split_digits);
    let mut out: Vec<PreToken<'a>> = Vec::with_capacity(runs.len());
    // Byte and char offset where the next pretoken starts.
    let mut carry: Option<(usize, usize)> = None;

    for (i, run) in runs.iter().enumerate() {
        let (byte_start, char_start) = carry.take().unwrap_or((run.bytes.start, run.chars.start));
        let mut byte_end = run.bytes.end;
        let mut char_end = run.chars.end;

        if config.attach_leading_space
            && run.class == CharClass::Whitespace
            && text[run.bytes.clone()].ends_with(' ')
            && runs
                .get(i + 1)
                .is_some_and(|next| next.class == CharClass::Letter)
        {
            // Hand the trailing space to the letter run.
            byte_end -= 1;
            char_end -= 1;
            carry = Some((byte_end, char_end));
            if byte_end == byte_start {
                continue;
            }
        }

        out.push(PreToken {
            text: &text[byte_start..byte_end],
            char_span: char_start..char_end,
        });
    }
    out
}
