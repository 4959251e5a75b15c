//! Whitespace-preserving pre-tokenization.
//!
//! Space runs become `<space*4>`, `<space*2>` and `<space*1>` segments (as
//! many fours as fit, then at most one two and at most one one), each tab and
//! each newline is its own segment, and every maximal run of other characters
//! is a plain segment. The rule applies everywhere, not only to indentation.

use super::vocab::Special;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    Plain,
    Whitespace(Special),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub kind: SegmentKind,
    /// Byte range in the input.
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn text<'a>(&self, input: &'a str) -> &'a str {
        &input[self.start..self.end]
    }
}

fn is_layout(c: u8) -> bool {
    matches!(c, b' ' | b'\t' | b'\n')
}

pub fn pretokenize(text: &str) -> Vec<Segment> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\t' => {
                out.push(ws(Special::Tab, i, i + 1));
                i += 1;
            }
            b'\n' => {
                out.push(ws(Special::Newline, i, i + 1));
                i += 1;
            }
            b' ' => {
                let mut run = 0;
                while i + run < bytes.len() && bytes[i + run] == b' ' {
                    run += 1;
                }
                let mut pos = i;
                for _ in 0..run / 4 {
                    out.push(ws(Special::Space4, pos, pos + 4));
                    pos += 4;
                }
                if run % 4 >= 2 {
                    out.push(ws(Special::Space2, pos, pos + 2));
                    pos += 2;
                }
                if run % 2 == 1 {
                    out.push(ws(Special::Space1, pos, pos + 1));
                }
                i += run;
            }
            _ => {
                let start = i;
                // Layout bytes are ASCII, so they never split a UTF-8 sequence.
                while i < bytes.len() && !is_layout(bytes[i]) {
                    i += 1;
                }
                out.push(Segment {
                    kind: SegmentKind::Plain,
                    start,
                    end: i,
                });
            }
        }
    }
    out
}

fn ws(special: Special, start: usize, end: usize) -> Segment {
    Segment {
        kind: SegmentKind::Whitespace(special),
        start,
        end,
    }
}
