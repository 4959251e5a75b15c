//! Reserved words and common builtins per programming language, used to
//! weight n-grams in the keyword-weighted n-gram match.

use std::collections::{BTreeMap, BTreeSet};

use super::MetricError;

pub const DEFAULT_KEYWORD_WEIGHT: f64 = 5.0;

const PYTHON: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class",
    "continue", "def", "del", "elif", "else", "except", "finally", "for", "from", "global", "if",
    "import", "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try",
    "while", "with", "yield", "abs", "all", "any", "bool", "dict", "enumerate", "filter", "float",
    "format", "getattr", "hasattr", "input", "int", "isinstance", "len", "list", "map", "max",
    "min", "object", "open", "print", "range", "reversed", "round", "self", "set", "setattr",
    "sorted", "str", "sum", "super", "tuple", "type", "zip",
];

const GO: &[&str] = &[
    "break", "case", "chan", "const", "continue", "default", "defer", "else", "fallthrough",
    "for", "func", "go", "goto", "if", "import", "interface", "map", "package", "range", "return",
    "select", "struct", "switch", "type", "var", "append", "bool", "byte", "cap", "close",
    "complex", "copy", "delete", "error", "false", "float32", "float64", "int", "int32", "int64",
    "iota", "len", "make", "new", "nil", "panic", "print", "println", "recover", "rune", "string",
    "true", "uint", "uint8",
];

const JAVA: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try",
    "void", "volatile", "while", "true", "false", "null", "String", "Object", "Integer", "System",
];

const JAVASCRIPT: &[&str] = &[
    "async", "await", "break", "case", "catch", "class", "const", "continue", "debugger",
    "default", "delete", "do", "else", "export", "extends", "false", "finally", "for", "function",
    "if", "import", "in", "instanceof", "let", "new", "null", "return", "super", "switch", "this",
    "throw", "true", "try", "typeof", "undefined", "var", "void", "while", "with", "yield",
    "Array", "JSON", "Math", "Object", "Promise", "String", "console", "document", "window",
];

const PHP: &[&str] = &[
    "abstract", "and", "array", "as", "break", "callable", "case", "catch", "class", "clone",
    "const", "continue", "declare", "default", "do", "echo", "else", "elseif", "empty", "extends",
    "final", "finally", "fn", "for", "foreach", "function", "global", "if", "implements",
    "include", "instanceof", "interface", "isset", "list", "namespace", "new", "or", "print",
    "private", "protected", "public", "require", "return", "static", "switch", "throw", "trait",
    "try", "unset", "use", "var", "while", "xor", "yield", "true", "false", "null", "this",
];

const RUBY: &[&str] = &[
    "BEGIN", "END", "alias", "and", "begin", "break", "case", "class", "def", "defined?", "do",
    "else", "elsif", "end", "ensure", "false", "for", "if", "in", "module", "next", "nil", "not",
    "or", "redo", "rescue", "retry", "return", "self", "super", "then", "true", "undef", "unless",
    "until", "when", "while", "yield", "attr_accessor", "attr_reader", "puts", "require",
];

/// Keyword sets per language plus the weight given to n-grams that contain
/// one of them.
#[derive(Debug, Clone, PartialEq)]
pub struct KeywordTable {
    pub languages: BTreeMap<String, BTreeSet<String>>,
    pub weight: f64,
}

impl Default for KeywordTable {
    fn default() -> Self {
        Self::with_weight(DEFAULT_KEYWORD_WEIGHT)
    }
}

impl KeywordTable {
    pub fn with_weight(weight: f64) -> Self {
        let languages = [
            ("go", GO),
            ("java", JAVA),
            ("javascript", JAVASCRIPT),
            ("php", PHP),
            ("python", PYTHON),
            ("ruby", RUBY),
        ]
        .into_iter()
        .map(|(l, words)| (l.to_string(), words.iter().map(|w| w.to_string()).collect()))
        .collect();
        KeywordTable { languages, weight }
    }

    pub fn keywords(&self, lang: &str) -> Result<&BTreeSet<String>, MetricError> {
        self.languages
            .get(&lang.to_ascii_lowercase())
            .ok_or_else(|| MetricError::UnknownLanguage(lang.to_string()))
    }
}
