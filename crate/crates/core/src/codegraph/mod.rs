//! Python-subset parsing and structure extraction for code-aware metrics.

mod dataflow;
mod lexer;
mod parser;
mod pretty;
mod tree;

pub use dataflow::{extract_dataflow, DataflowEdge, DataflowGraph, Relation, EXTERNAL};
pub use lexer::{code_tokens, is_keyword, tokenize, tokenize_lenient, LexError, Token, TokenKind, KEYWORDS};
pub use parser::{parse, ParseError, ParseOutcome, MAX_DEPTH};
pub use pretty::pretty_print;
pub use tree::{subtree_multiset, Node, SyntaxTree};

/// Default minimum subtree height for AST matching.
pub const DEFAULT_MIN_HEIGHT: usize = 2;

/// A language front end for the structure metrics. Grammars for further
/// languages plug in here.
pub trait CodeGrammar: Send + Sync {
    fn name(&self) -> &str;
    fn parse(&self, code: &str) -> ParseOutcome;
    fn dataflow(&self, tree: &SyntaxTree) -> DataflowGraph;
    fn tokens(&self, code: &str) -> Vec<String>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PythonSubset;

impl CodeGrammar for PythonSubset {
    fn name(&self) -> &str {
        "python"
    }

    fn parse(&self, code: &str) -> ParseOutcome {
        parse(code)
    }

    fn dataflow(&self, tree: &SyntaxTree) -> DataflowGraph {
        extract_dataflow(tree)
    }

    fn tokens(&self, code: &str) -> Vec<String> {
        code_tokens(code)
    }
}
