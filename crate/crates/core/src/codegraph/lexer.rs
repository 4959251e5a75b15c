//! Python-subset lexer with INDENT/DEDENT layout tokens.
//!
//! Follows the Python rules that matter for the supported subset: comments
//! and blank lines produce no tokens, newlines inside brackets and after a
//! backslash are joined, tabs advance the column to the next multiple of 8,
//! and indentation changes emit INDENT or DEDENT. A lenient mode never fails
//! and is used to tokenize arbitrary model output for the metrics.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Name,
    Number,
    String,
    Op,
    Newline,
    Indent,
    Dedent,
    EndMarker,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Byte offsets into the source.
    pub start: usize,
    pub end: usize,
    /// 1-based line and column (in characters).
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

const OPERATORS: &[&str] = &[
    "**=", "//=", ">>=", "<<=", "...", "->", "**", "//", ">>", "<<", "<=", ">=", "==", "!=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", ":=", "+", "-", "*", "/", "%", "@",
    "&", "|", "^", "~", "<", ">", "(", ")", "[", "]", "{", "}", ",", ":", ".", ";", "=",
];

pub const KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class",
    "continue", "def", "del", "elif", "else", "except", "finally", "for", "from", "global", "if",
    "import", "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try",
    "while", "with", "yield",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    line_start: usize,
    depth: usize,
    indents: Vec<usize>,
    tokens: Vec<Token>,
    lenient: bool,
}

/// Tokenizes `src` strictly.
pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    Lexer::new(src, false).run()
}

/// Tokenizes without ever failing: unknown characters become single-character
/// operator tokens, unterminated strings end at the end of their line and
/// inconsistent dedents are accepted.
pub fn tokenize_lenient(src: &str) -> Vec<Token> {
    Lexer::new(src, true)
        .run()
        .expect("lenient lexing does not fail")
}

/// Texts of the significant tokens of `src` (no layout tokens, no comments).
pub fn code_tokens(src: &str) -> Vec<String> {
    tokenize_lenient(src)
        .into_iter()
        .filter(|t| matches!(t.kind, TokenKind::Name | TokenKind::Number | TokenKind::String | TokenKind::Op))
        .map(|t| t.text)
        .collect()
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, lenient: bool) -> Self {
        Self {
            src,
            pos: 0,
            line: 1,
            line_start: 0,
            depth: 0,
            indents: vec![0],
            tokens: Vec::new(),
            lenient,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(offset)
    }

    fn col_of(&self, byte: usize) -> usize {
        self.src[self.line_start..byte].chars().count() + 1
    }

    fn error(&self, at: usize, message: impl Into<String>) -> LexError {
        LexError {
            line: self.line,
            col: self.col_of(at),
            message: message.into(),
        }
    }

    fn push(&mut self, kind: TokenKind, start: usize, end: usize) {
        self.tokens.push(Token {
            kind,
            text: self.src[start..end].to_string(),
            start,
            end,
            line: self.line,
            col: self.col_of(start),
        });
    }

    fn newline(&mut self) {
        self.line += 1;
        self.line_start = self.pos;
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        let mut at_line_start = true;
        while self.pos < self.src.len() {
            if at_line_start && self.depth == 0 {
                if self.indentation()? {
                    continue;
                }
                at_line_start = false;
            }
            let c = self.peek().expect("pos < len");
            let start = self.pos;
            match c {
                '\n' => {
                    self.pos += 1;
                    if self.depth == 0 {
                        self.push(TokenKind::Newline, start, start + 1);
                        at_line_start = true;
                    }
                    self.newline();
                }
                ' ' | '\t' | '\x0c' | '\r' => self.pos += 1,
                '#' => self.skip_comment(),
                '\\' if matches!(self.peek_at(1), Some('\n')) => {
                    self.pos += 2;
                    self.newline();
                }
                '\\' if self.peek_at(1) == Some('\r') && self.peek_at(2) == Some('\n') => {
                    self.pos += 3;
                    self.newline();
                }
                c if c.is_alphabetic() || c == '_' => {
                    let word_end = self.scan_word();
                    if self.is_string_prefix(start, word_end) {
                        self.pos = word_end;
                        self.string(start)?;
                    } else {
                        self.pos = word_end;
                        self.push(TokenKind::Name, start, word_end);
                    }
                }
                '"' | '\'' => self.string(start)?,
                c if c.is_ascii_digit() => self.number(start),
                '.' if self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => self.number(start),
                _ => self.operator(start)?,
            }
        }
        let end = self.src.len();
        if !matches!(
            self.tokens.last().map(|t| t.kind),
            None | Some(TokenKind::Newline) | Some(TokenKind::Dedent)
        ) {
            self.tokens.push(Token {
                kind: TokenKind::Newline,
                text: String::new(),
                start: end,
                end,
                line: self.line,
                col: self.col_of(end),
            });
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(TokenKind::Dedent, end, end);
        }
        self.push(TokenKind::EndMarker, end, end);
        Ok(self.tokens)
    }

    /// Measures leading whitespace at a line start and emits layout tokens.
    /// Returns true if the line was blank or a comment (consumed entirely).
    fn indentation(&mut self) -> Result<bool, LexError> {
        let mut width = 0;
        let mut p = self.pos;
        let bytes = self.src.as_bytes();
        while p < bytes.len() {
            match bytes[p] {
                b' ' => width += 1,
                b'\t' => width = (width / 8 + 1) * 8,
                b'\x0c' | b'\r' => {}
                _ => break,
            }
            p += 1;
        }
        if p >= bytes.len() {
            self.pos = p;
            return Ok(true);
        }
        if matches!(bytes[p], b'\n' | b'#') {
            self.pos = p;
            if bytes[p] == b'#' {
                self.skip_comment();
            }
            if self.pos < bytes.len() {
                self.pos += 1;
                self.newline();
            }
            return Ok(true);
        }
        if bytes[p] == b'\\' {
            // A continuation line at the start keeps the current indentation.
            self.pos = p;
            return Ok(false);
        }
        self.pos = p;
        let current = *self.indents.last().expect("stack never empty");
        if width > current {
            self.indents.push(width);
            self.push(TokenKind::Indent, p, p);
        } else {
            while width < *self.indents.last().expect("stack never empty") {
                self.indents.pop();
                self.push(TokenKind::Dedent, p, p);
            }
            if width != *self.indents.last().expect("stack never empty") {
                if !self.lenient {
                    return Err(self.error(p, "unindent does not match any outer level"));
                }
                self.indents.push(width);
            }
        }
        Ok(false)
    }

    fn skip_comment(&mut self) {
        while let Some(c) = self.peek() {
            if c == '\n' {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn scan_word(&self) -> usize {
        let mut end = self.pos;
        for c in self.src[self.pos..].chars() {
            if c.is_alphanumeric() || c == '_' {
                end += c.len_utf8();
            } else {
                break;
            }
        }
        end
    }

    fn is_string_prefix(&self, start: usize, end: usize) -> bool {
        let word = self.src[start..end].to_ascii_lowercase();
        matches!(
            word.as_str(),
            "r" | "u" | "b" | "f" | "br" | "rb" | "fr" | "rf"
        ) && matches!(self.src[end..].chars().next(), Some('"' | '\''))
    }

    /// Scans a string literal whose optional prefix starts at `start`;
    /// `self.pos` is at the opening quote.
    fn string(&mut self, start: usize) -> Result<(), LexError> {
        let quote = self.peek().expect("at quote");
        let triple = self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote);
        let start_line = self.line;
        let start_line_start = self.line_start;
        self.pos += if triple { 3 } else { 1 };
        loop {
            // Escaped newlines may have moved the line, so report the opening.
            let unterminated = || LexError {
                line: start_line,
                col: self.src[start_line_start..start].chars().count() + 1,
                message: "unterminated string literal".into(),
            };
            let Some(c) = self.peek() else {
                if self.lenient {
                    break;
                }
                return Err(unterminated());
            };
            match c {
                '\\' => {
                    self.pos += 1;
                    if let Some(n) = self.peek() {
                        self.pos += n.len_utf8();
                        if n == '\n' {
                            self.newline();
                        }
                    }
                }
                '\n' if !triple => {
                    if self.lenient {
                        break;
                    }
                    return Err(unterminated());
                }
                '\n' => {
                    self.pos += 1;
                    self.newline();
                }
                c if c == quote => {
                    if !triple {
                        self.pos += 1;
                        break;
                    }
                    if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) {
                        self.pos += 3;
                        break;
                    }
                    self.pos += 1;
                }
                c => self.pos += c.len_utf8(),
            }
        }
        let end = self.pos;
        self.tokens.push(Token {
            kind: TokenKind::String,
            text: self.src[start..end].to_string(),
            start,
            end,
            line: start_line,
            col: self.src[start_line_start..start].chars().count() + 1,
        });
        Ok(())
    }

    fn number(&mut self, start: usize) {
        let rest = &self.src[start..];
        let bytes = rest.as_bytes();
        let mut i = 0;
        let radix_prefix = bytes.len() > 1
            && bytes[0] == b'0'
            && matches!(bytes[1], b'x' | b'X' | b'o' | b'O' | b'b' | b'B');
        if radix_prefix {
            i = 2;
            while i < bytes.len() && (bytes[i].is_ascii_hexdigit() || bytes[i] == b'_') {
                i += 1;
            }
        } else {
            let digits = |i: &mut usize| {
                while *i < bytes.len() && (bytes[*i].is_ascii_digit() || bytes[*i] == b'_') {
                    *i += 1;
                }
            };
            digits(&mut i);
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                digits(&mut i);
            }
            if i < bytes.len() && matches!(bytes[i], b'e' | b'E') {
                let mut j = i + 1;
                if j < bytes.len() && matches!(bytes[j], b'+' | b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    digits(&mut i);
                }
            }
            if i < bytes.len() && matches!(bytes[i], b'j' | b'J') {
                i += 1;
            }
        }
        self.pos = start + i;
        self.push(TokenKind::Number, start, start + i);
    }

    fn operator(&mut self, start: usize) -> Result<(), LexError> {
        let rest = &self.src[start..];
        if let Some(op) = OPERATORS.iter().find(|op| rest.starts_with(**op)) {
            match *op {
                "(" | "[" | "{" => self.depth += 1,
                ")" | "]" | "}" => self.depth = self.depth.saturating_sub(1),
                _ => {}
            }
            self.pos += op.len();
            self.push(TokenKind::Op, start, self.pos);
            return Ok(());
        }
        let c = self.peek().expect("pos < len");
        if self.lenient {
            self.pos += c.len_utf8();
            self.push(TokenKind::Op, start, self.pos);
            return Ok(());
        }
        Err(self.error(start, format!("unexpected character {c:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src)
            .unwrap()
            .into_iter()
            .map(|t| (t.kind, t.text))
            .collect()
    }

    #[test]
    fn indentation_layout() {
        use TokenKind::*;
        let toks: Vec<TokenKind> = kinds("def f(a):\n    return a\nx = 1\n")
            .into_iter()
            .map(|(k, _)| k)
            .collect();
        assert_eq!(
            toks,
            vec![
                Name, Name, Op, Name, Op, Op, Newline, Indent, Name, Name, Newline, Dedent, Name, Op,
                Number, Newline, EndMarker
            ]
        );
    }

    #[test]
    fn brackets_join_lines_and_comments_vanish() {
        let toks = kinds("x = (1,\n     2)  # two\n\n# only comment\ny = 3");
        let newlines = toks.iter().filter(|(k, _)| *k == TokenKind::Newline).count();
        assert_eq!(newlines, 2);
        assert!(!toks.iter().any(|(_, t)| t.contains('#')));
    }

    #[test]
    fn strings_and_numbers() {
        let toks = kinds("s = rb'a\\'b' + \"\"\"x\ny\"\"\" + f\"{z}\"\nn = 0x1F + 1.5e-3 + 2j + .5");
        let strings: Vec<&str> = toks
            .iter()
            .filter(|(k, _)| *k == TokenKind::String)
            .map(|(_, t)| t.as_str())
            .collect();
        assert_eq!(strings, vec!["rb'a\\'b'", "\"\"\"x\ny\"\"\"", "f\"{z}\""]);
        let numbers: Vec<&str> = toks
            .iter()
            .filter(|(k, _)| *k == TokenKind::Number)
            .map(|(_, t)| t.as_str())
            .collect();
        assert_eq!(numbers, vec!["0x1F", "1.5e-3", "2j", ".5"]);
    }

    #[test]
    fn errors_carry_positions() {
        let err = tokenize("x = 'abc\n").unwrap_err();
        assert_eq!((err.line, err.col), (1, 5));
        let err = tokenize("if x:\n        a\n    b\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(tokenize("x = $").is_err());
    }

    #[test]
    fn lenient_never_fails() {
        let toks = code_tokens("x = $ 'abc\nif y:\n        a\n    b");
        assert_eq!(toks, vec!["x", "=", "$", "'abc", "if", "y", ":", "a", "b"]);
    }

    #[test]
    fn backslash_continuation() {
        let toks = kinds("x = 1 + \\\n    2\n");
        assert_eq!(toks.iter().filter(|(k, _)| *k == TokenKind::Newline).count(), 1);
        assert!(!toks.iter().any(|(k, _)| *k == TokenKind::Indent));
    }

    #[test]
    fn unterminated_after_escaped_newline() {
        let err = tokenize("\"\\\n\n").unwrap_err();
        assert_eq!((err.line, err.col), (1, 1));
    }
}
