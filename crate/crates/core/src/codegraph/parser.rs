//! Recursive-descent parser for the supported Python subset.
//!
//! Statements: function definitions (positional, default, annotated, `*args`
//! and `**kwargs` parameters, optional return annotation), assignment
//! (chained and tuple targets), augmented assignment, expression statements,
//! `return`, `pass`, `break`, `continue`, `if`/`elif`/`else`, `for` and
//! `while` (each with optional `else`), `import` and `from ... import`.
//! Expressions cover conditional expressions, boolean operators, chained
//! comparisons, all binary and unary operators with Python precedence, calls
//! with keyword and star arguments, attributes, subscripts and slices, and
//! string, number, list, tuple, dict and set literals.
//!
//! Everything else (classes, `try`, `with`, lambdas, comprehensions,
//! decorators, `async`) is a parse error.

use std::fmt;

use super::lexer::{is_keyword, tokenize, Token, TokenKind};
use super::tree::{Node, SyntaxTree};

/// Maximum nesting of blocks and expressions.
pub const MAX_DEPTH: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

/// Result of parsing; failure is a value, never a panic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseOutcome {
    pub tree: Option<SyntaxTree>,
    pub error: Option<ParseError>,
}

impl ParseOutcome {
    pub fn ok(&self) -> bool {
        self.tree.is_some()
    }

    pub fn error_position(&self) -> Option<(usize, usize)> {
        self.error.as_ref().map(|e| (e.line, e.col))
    }
}

pub fn parse(code: &str) -> ParseOutcome {
    let result = tokenize(code)
        .map_err(|e| ParseError {
            line: e.line,
            col: e.col,
            message: e.message,
        })
        .and_then(|tokens| Parser::new(tokens).module());
    match result {
        Ok(tree) => ParseOutcome {
            tree: Some(tree),
            error: None,
        },
        Err(e) => ParseOutcome {
            tree: None,
            error: Some(e),
        },
    }
}

type PResult<T> = Result<T, ParseError>;

const AUGMENTED: &[&str] = &[
    "+=", "-=", "*=", "/=", "//=", "%=", "**=", ">>=", "<<=", "&=", "|=", "^=", "@=",
];

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    nodes: Vec<Node>,
    depth: usize,
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Self {
        Self {
            tokens,
            pos: 0,
            nodes: Vec::new(),
            depth: 0,
        }
    }

    // ---- token helpers ----

    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, n: usize) -> &Token {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at_op(&self, op: &str) -> bool {
        let t = self.peek();
        t.kind == TokenKind::Op && t.text == op
    }

    fn at_kw(&self, kw: &str) -> bool {
        let t = self.peek();
        t.kind == TokenKind::Name && t.text == kw
    }

    fn at_kind(&self, kind: TokenKind) -> bool {
        self.peek().kind == kind
    }

    fn error_at(&self, t: &Token, message: impl Into<String>) -> ParseError {
        ParseError {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.peek(), message)
    }

    fn expect_op(&mut self, op: &str) -> PResult<Token> {
        if self.at_op(op) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&format!("expected '{op}'")))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Token> {
        if self.at_kw(kw) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&format!("expected '{kw}'")))
        }
    }

    fn unexpected(&self, context: &str) -> ParseError {
        let t = self.peek();
        let found = match t.kind {
            TokenKind::Newline => "newline".to_string(),
            TokenKind::Indent => "indent".to_string(),
            TokenKind::Dedent => "dedent".to_string(),
            TokenKind::EndMarker => "end of input".to_string(),
            _ => format!("{:?}", t.text),
        };
        self.error(format!("{context}, found {found}"))
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error("nesting too deep"));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    // ---- node construction ----

    fn leaf(&mut self, kind: &str, t: &Token) -> usize {
        self.nodes.push(Node {
            kind: kind.to_string(),
            children: Vec::new(),
            span: (t.start, t.end),
            text: Some(t.text.clone()),
        });
        self.nodes.len() - 1
    }

    /// Operator leaf spanning one or more tokens, e.g. `not in`.
    fn op_leaf(&mut self, text: &str, start: usize, end: usize) -> usize {
        self.nodes.push(Node {
            kind: text.to_string(),
            children: Vec::new(),
            span: (start, end),
            text: Some(text.to_string()),
        });
        self.nodes.len() - 1
    }

    fn inner(&mut self, kind: &str, children: Vec<usize>) -> usize {
        let start = children.first().map(|c| self.nodes[*c].span.0).unwrap_or(0);
        let end = children.last().map(|c| self.nodes[*c].span.1).unwrap_or(0);
        self.inner_spanning(kind, children, start, end)
    }

    fn inner_spanning(&mut self, kind: &str, children: Vec<usize>, start: usize, end: usize) -> usize {
        self.nodes.push(Node {
            kind: kind.to_string(),
            children,
            span: (start, end),
            text: None,
        });
        self.nodes.len() - 1
    }

    fn identifier(&mut self) -> PResult<usize> {
        let t = self.peek().clone();
        if t.kind != TokenKind::Name || is_keyword(&t.text) {
            return Err(self.unexpected("expected a name"));
        }
        self.bump();
        Ok(self.leaf("identifier", &t))
    }

    // ---- statements ----

    fn module(mut self) -> PResult<SyntaxTree> {
        let mut stmts = Vec::new();
        loop {
            if self.at_kind(TokenKind::EndMarker) {
                break;
            }
            if self.at_kind(TokenKind::Newline) {
                self.bump();
                continue;
            }
            if self.at_kind(TokenKind::Indent) {
                return Err(self.error("unexpected indent"));
            }
            self.statement(&mut stmts)?;
        }
        let end = self.peek().end;
        let root = self.inner_spanning("module", stmts, 0, end);
        Ok(SyntaxTree {
            nodes: self.nodes,
            root,
        })
    }

    fn statement(&mut self, out: &mut Vec<usize>) -> PResult<()> {
        let t = self.peek().clone();
        if t.kind == TokenKind::Name {
            match t.text.as_str() {
                "def" => return self.with_depth(|p| p.function_def()).map(|n| out.push(n)),
                "if" => return self.with_depth(|p| p.if_statement()).map(|n| out.push(n)),
                "for" => return self.with_depth(|p| p.for_statement()).map(|n| out.push(n)),
                "while" => return self.with_depth(|p| p.while_statement()).map(|n| out.push(n)),
                _ => {}
            }
        }
        if t.kind == TokenKind::Op && t.text == "@" {
            return Err(self.error("decorators are not supported"));
        }
        self.simple_statements(out)
    }

    fn with_depth<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.enter()?;
        let r = f(self);
        self.leave();
        r
    }

    fn simple_statements(&mut self, out: &mut Vec<usize>) -> PResult<()> {
        loop {
            out.push(self.simple_statement()?);
            if self.at_op(";") {
                self.bump();
                if self.at_kind(TokenKind::Newline) {
                    break;
                }
                continue;
            }
            break;
        }
        if !self.at_kind(TokenKind::Newline) {
            return Err(self.unexpected("expected end of statement"));
        }
        self.bump();
        Ok(())
    }

    fn simple_statement(&mut self) -> PResult<usize> {
        let t = self.peek().clone();
        if t.kind == TokenKind::Name {
            match t.text.as_str() {
                "pass" => {
                    self.bump();
                    return Ok(self.leaf("pass_statement", &t));
                }
                "break" => {
                    self.bump();
                    return Ok(self.leaf("break_statement", &t));
                }
                "continue" => {
                    self.bump();
                    return Ok(self.leaf("continue_statement", &t));
                }
                "return" => {
                    self.bump();
                    let mut children = Vec::new();
                    if !self.at_kind(TokenKind::Newline) && !self.at_op(";") {
                        children.push(self.expression_list()?);
                    }
                    let end = children
                        .last()
                        .map(|c| self.nodes[*c].span.1)
                        .unwrap_or(t.end);
                    return Ok(self.inner_spanning("return_statement", children, t.start, end));
                }
                "import" => return self.import_statement(),
                "from" => return self.import_from_statement(),
                _ => {}
            }
        }
        self.expression_statement()
    }

    fn expression_statement(&mut self) -> PResult<usize> {
        let first = self.expression_list()?;
        if self.at_op("=") {
            let mut parts = vec![first];
            while self.at_op("=") {
                self.bump();
                parts.push(self.expression_list()?);
            }
            for target in &parts[..parts.len() - 1] {
                self.check_target(*target)?;
            }
            return Ok(self.inner("assignment", parts));
        }
        let t = self.peek().clone();
        if t.kind == TokenKind::Op && AUGMENTED.contains(&t.text.as_str()) {
            self.check_simple_target(first)?;
            self.bump();
            let op = self.op_leaf(&t.text, t.start, t.end);
            let value = self.expression_list()?;
            return Ok(self.inner("augmented_assignment", vec![first, op, value]));
        }
        Ok(self.inner("expression_statement", vec![first]))
    }

    fn target_error(&self, node: usize) -> ParseError {
        let (line, col) = self.position_of(self.nodes[node].span.0);
        ParseError {
            line,
            col,
            message: format!("cannot assign to {}", self.nodes[node].kind),
        }
    }

    fn position_of(&self, byte: usize) -> (usize, usize) {
        self.tokens
            .iter()
            .find(|t| t.start == byte)
            .map(|t| (t.line, t.col))
            .unwrap_or((self.peek().line, self.peek().col))
    }

    fn check_simple_target(&self, node: usize) -> PResult<()> {
        match self.nodes[node].kind.as_str() {
            "identifier" | "attribute" | "subscript" => Ok(()),
            _ => Err(self.target_error(node)),
        }
    }

    fn check_target(&self, node: usize) -> PResult<()> {
        match self.nodes[node].kind.as_str() {
            "identifier" | "attribute" | "subscript" => Ok(()),
            "tuple" | "list" | "expression_list" | "parenthesized_expression" => {
                for c in &self.nodes[node].children {
                    self.check_target(*c)?;
                }
                Ok(())
            }
            "list_splat" => self.check_target(self.nodes[node].children[0]),
            _ => Err(self.target_error(node)),
        }
    }

    fn block(&mut self) -> PResult<usize> {
        let colon = self.expect_op(":")?;
        let mut stmts = Vec::new();
        if !self.at_kind(TokenKind::Newline) {
            self.simple_statements(&mut stmts)?;
            return Ok(self.inner("block", stmts));
        }
        self.bump();
        if !self.at_kind(TokenKind::Indent) {
            return Err(self.unexpected("expected an indented block"));
        }
        self.bump();
        while !self.at_kind(TokenKind::Dedent) && !self.at_kind(TokenKind::EndMarker) {
            if self.at_kind(TokenKind::Newline) {
                self.bump();
                continue;
            }
            self.statement(&mut stmts)?;
        }
        if self.at_kind(TokenKind::Dedent) {
            self.bump();
        }
        let _ = colon;
        Ok(self.inner("block", stmts))
    }

    fn function_def(&mut self) -> PResult<usize> {
        let def = self.expect_kw("def")?;
        let name = self.identifier()?;
        let open = self.expect_op("(")?;
        let mut params = Vec::new();
        while !self.at_op(")") {
            params.push(self.parameter()?);
            if !self.at_op(",") {
                break;
            }
            self.bump();
        }
        let close = self.expect_op(")")?;
        let params = self.inner_spanning("parameters", params, open.start, close.end);
        let mut children = vec![name, params];
        if self.at_op("->") {
            self.bump();
            let ty = self.expression()?;
            children.push(self.inner("type", vec![ty]));
        }
        children.push(self.block()?);
        let end = self.nodes[*children.last().expect("block")].span.1;
        Ok(self.inner_spanning("function_definition", children, def.start, end))
    }

    fn parameter(&mut self) -> PResult<usize> {
        if self.at_op("*") || self.at_op("**") {
            let star = self.bump();
            let name = self.identifier()?;
            let kind = if star.text == "*" {
                "list_splat_pattern"
            } else {
                "dictionary_splat_pattern"
            };
            let end = self.nodes[name].span.1;
            return Ok(self.inner_spanning(kind, vec![name], star.start, end));
        }
        let name = self.identifier()?;
        let mut ty = None;
        if self.at_op(":") {
            self.bump();
            let e = self.expression()?;
            ty = Some(self.inner("type", vec![e]));
        }
        if self.at_op("=") {
            self.bump();
            let value = self.expression()?;
            return Ok(match ty {
                Some(ty) => self.inner("typed_default_parameter", vec![name, ty, value]),
                None => self.inner("default_parameter", vec![name, value]),
            });
        }
        Ok(match ty {
            Some(ty) => self.inner("typed_parameter", vec![name, ty]),
            None => name,
        })
    }

    fn if_statement(&mut self) -> PResult<usize> {
        let kw = self.expect_kw("if")?;
        let cond = self.expression()?;
        let body = self.block()?;
        let mut children = vec![cond, body];
        while self.at_kw("elif") {
            let t = self.bump();
            let c = self.expression()?;
            let b = self.block()?;
            let end = self.nodes[b].span.1;
            children.push(self.inner_spanning("elif_clause", vec![c, b], t.start, end));
        }
        if let Some(e) = self.else_clause()? {
            children.push(e);
        }
        let end = self.nodes[*children.last().expect("body")].span.1;
        Ok(self.inner_spanning("if_statement", children, kw.start, end))
    }

    fn else_clause(&mut self) -> PResult<Option<usize>> {
        if !self.at_kw("else") {
            return Ok(None);
        }
        let t = self.bump();
        let b = self.block()?;
        let end = self.nodes[b].span.1;
        Ok(Some(self.inner_spanning("else_clause", vec![b], t.start, end)))
    }

    fn for_statement(&mut self) -> PResult<usize> {
        let kw = self.expect_kw("for")?;
        let target = self.target_list()?;
        self.check_target(target)?;
        self.expect_kw("in")?;
        let iter = self.expression_list()?;
        let body = self.block()?;
        let mut children = vec![target, iter, body];
        if let Some(e) = self.else_clause()? {
            children.push(e);
        }
        let end = self.nodes[*children.last().expect("body")].span.1;
        Ok(self.inner_spanning("for_statement", children, kw.start, end))
    }

    /// Loop targets stop below comparisons so that `in` is not consumed.
    fn target_list(&mut self) -> PResult<usize> {
        let first = self.bitor()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.at_op(",") {
            self.bump();
            if self.at_kw("in") {
                break;
            }
            items.push(self.bitor()?);
        }
        Ok(self.inner("expression_list", items))
    }

    fn while_statement(&mut self) -> PResult<usize> {
        let kw = self.expect_kw("while")?;
        let cond = self.expression()?;
        let body = self.block()?;
        let mut children = vec![cond, body];
        if let Some(e) = self.else_clause()? {
            children.push(e);
        }
        let end = self.nodes[*children.last().expect("body")].span.1;
        Ok(self.inner_spanning("while_statement", children, kw.start, end))
    }

    fn dotted_name(&mut self) -> PResult<usize> {
        let mut parts = vec![self.identifier()?];
        while self.at_op(".") {
            self.bump();
            parts.push(self.identifier()?);
        }
        Ok(self.inner("dotted_name", parts))
    }

    fn import_statement(&mut self) -> PResult<usize> {
        let kw = self.expect_kw("import")?;
        let mut names = Vec::new();
        loop {
            let name = self.dotted_name()?;
            names.push(self.maybe_alias(name)?);
            if !self.at_op(",") {
                break;
            }
            self.bump();
        }
        let end = self.nodes[*names.last().expect("one name")].span.1;
        Ok(self.inner_spanning("import_statement", names, kw.start, end))
    }

    fn maybe_alias(&mut self, name: usize) -> PResult<usize> {
        if !self.at_kw("as") {
            return Ok(name);
        }
        self.bump();
        let alias = self.identifier()?;
        Ok(self.inner("aliased_import", vec![name, alias]))
    }

    fn import_from_statement(&mut self) -> PResult<usize> {
        let kw = self.expect_kw("from")?;
        let module = if self.at_op(".") || self.at_op("...") {
            let start = self.peek().start;
            let mut dots = String::new();
            let mut end = start;
            while self.at_op(".") || self.at_op("...") {
                let t = self.bump();
                dots.push_str(&t.text);
                end = t.end;
            }
            let prefix = self.op_leaf(&dots, start, end);
            let mut children = vec![prefix];
            if !self.at_kw("import") {
                children.push(self.dotted_name()?);
            }
            self.inner("relative_import", children)
        } else {
            self.dotted_name()?
        };
        self.expect_kw("import")?;
        let mut children = vec![module];
        if self.at_op("*") {
            let t = self.bump();
            children.push(self.leaf("wildcard_import", &t));
        } else {
            let paren = self.at_op("(");
            if paren {
                self.bump();
            }
            loop {
                let name = self.identifier()?;
                let name = self.inner("dotted_name", vec![name]);
                children.push(self.maybe_alias(name)?);
                if !self.at_op(",") {
                    break;
                }
                self.bump();
                if paren && self.at_op(")") {
                    break;
                }
            }
            if paren {
                self.expect_op(")")?;
            }
        }
        let end = self.tokens[self.pos.saturating_sub(1)].end;
        Ok(self.inner_spanning("import_from_statement", children, kw.start, end))
    }

    // ---- expressions ----

    fn starts_expression(&self) -> bool {
        let t = self.peek();
        match t.kind {
            TokenKind::Name => {
                !is_keyword(&t.text)
                    || matches!(t.text.as_str(), "not" | "True" | "False" | "None" | "lambda")
            }
            TokenKind::Number | TokenKind::String => true,
            TokenKind::Op => matches!(
                t.text.as_str(),
                "(" | "[" | "{" | "-" | "+" | "~" | "*" | "..."
            ),
            _ => false,
        }
    }

    /// Comma-separated expressions; a single expression without a trailing
    /// comma is returned as is.
    fn expression_list(&mut self) -> PResult<usize> {
        let first = self.star_or_expression()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.at_op(",") {
            self.bump();
            if !self.starts_expression() {
                break;
            }
            items.push(self.star_or_expression()?);
        }
        Ok(self.inner("expression_list", items))
    }

    fn star_or_expression(&mut self) -> PResult<usize> {
        if self.at_op("*") {
            let t = self.bump();
            let e = self.bitor()?;
            let end = self.nodes[e].span.1;
            return Ok(self.inner_spanning("list_splat", vec![e], t.start, end));
        }
        self.expression()
    }

    fn expression(&mut self) -> PResult<usize> {
        self.enter()?;
        let r = self.conditional();
        self.leave();
        r
    }

    fn conditional(&mut self) -> PResult<usize> {
        if self.at_kw("lambda") {
            return Err(self.error("lambda expressions are not supported"));
        }
        let body = self.disjunction()?;
        if !self.at_kw("if") {
            return Ok(body);
        }
        self.bump();
        let cond = self.disjunction()?;
        self.expect_kw("else")?;
        let other = self.expression()?;
        Ok(self.inner("conditional_expression", vec![body, cond, other]))
    }

    fn disjunction(&mut self) -> PResult<usize> {
        let mut left = self.conjunction()?;
        while self.at_kw("or") {
            let t = self.bump();
            let op = self.op_leaf("or", t.start, t.end);
            let right = self.conjunction()?;
            left = self.inner("boolean_operator", vec![left, op, right]);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> PResult<usize> {
        let mut left = self.inversion()?;
        while self.at_kw("and") {
            let t = self.bump();
            let op = self.op_leaf("and", t.start, t.end);
            let right = self.inversion()?;
            left = self.inner("boolean_operator", vec![left, op, right]);
        }
        Ok(left)
    }

    fn inversion(&mut self) -> PResult<usize> {
        if !self.at_kw("not") {
            return self.comparison();
        }
        self.enter()?;
        let t = self.bump();
        let op = self.op_leaf("not", t.start, t.end);
        let operand = self.inversion();
        self.leave();
        let operand = operand?;
        Ok(self.inner("not_operator", vec![op, operand]))
    }

    fn comparison_op(&mut self) -> Option<usize> {
        let t = self.peek().clone();
        let single = |text: &str| matches!(text, "<" | ">" | "==" | ">=" | "<=" | "!=");
        if t.kind == TokenKind::Op && single(&t.text) {
            self.bump();
            return Some(self.op_leaf(&t.text, t.start, t.end));
        }
        if t.kind != TokenKind::Name {
            return None;
        }
        match t.text.as_str() {
            "in" => {
                self.bump();
                Some(self.op_leaf("in", t.start, t.end))
            }
            "not" if self.peek_at(1).kind == TokenKind::Name && self.peek_at(1).text == "in" => {
                self.bump();
                let t2 = self.bump();
                Some(self.op_leaf("not in", t.start, t2.end))
            }
            "is" => {
                self.bump();
                if self.at_kw("not") {
                    let t2 = self.bump();
                    Some(self.op_leaf("is not", t.start, t2.end))
                } else {
                    Some(self.op_leaf("is", t.start, t.end))
                }
            }
            _ => None,
        }
    }

    fn comparison(&mut self) -> PResult<usize> {
        let first = self.bitor()?;
        let mut children = vec![first];
        while let Some(op) = self.comparison_op() {
            children.push(op);
            children.push(self.bitor()?);
        }
        if children.len() == 1 {
            return Ok(first);
        }
        Ok(self.inner("comparison_operator", children))
    }

    fn binary_level(
        &mut self,
        ops: &[&str],
        next: fn(&mut Self) -> PResult<usize>,
    ) -> PResult<usize> {
        let mut left = next(self)?;
        loop {
            let t = self.peek().clone();
            if t.kind != TokenKind::Op || !ops.contains(&t.text.as_str()) {
                return Ok(left);
            }
            self.bump();
            let op = self.op_leaf(&t.text, t.start, t.end);
            let right = next(self)?;
            left = self.inner("binary_operator", vec![left, op, right]);
        }
    }

    fn bitor(&mut self) -> PResult<usize> {
        self.binary_level(&["|"], Self::bitxor)
    }

    fn bitxor(&mut self) -> PResult<usize> {
        self.binary_level(&["^"], Self::bitand)
    }

    fn bitand(&mut self) -> PResult<usize> {
        self.binary_level(&["&"], Self::shift)
    }

    fn shift(&mut self) -> PResult<usize> {
        self.binary_level(&["<<", ">>"], Self::sum)
    }

    fn sum(&mut self) -> PResult<usize> {
        self.binary_level(&["+", "-"], Self::term)
    }

    fn term(&mut self) -> PResult<usize> {
        self.binary_level(&["*", "/", "//", "%", "@"], Self::factor)
    }

    fn factor(&mut self) -> PResult<usize> {
        let t = self.peek().clone();
        if t.kind == TokenKind::Op && matches!(t.text.as_str(), "+" | "-" | "~") {
            self.enter()?;
            self.bump();
            let op = self.op_leaf(&t.text, t.start, t.end);
            let operand = self.factor();
            self.leave();
            let operand = operand?;
            return Ok(self.inner("unary_operator", vec![op, operand]));
        }
        self.power()
    }

    fn power(&mut self) -> PResult<usize> {
        let base = self.primary()?;
        if !self.at_op("**") {
            return Ok(base);
        }
        let t = self.bump();
        let op = self.op_leaf("**", t.start, t.end);
        let exp = self.factor()?;
        Ok(self.inner("binary_operator", vec![base, op, exp]))
    }

    fn primary(&mut self) -> PResult<usize> {
        let mut node = self.atom()?;
        loop {
            if self.at_op(".") {
                self.bump();
                let name = self.identifier()?;
                node = self.inner("attribute", vec![node, name]);
            } else if self.at_op("(") {
                let args = self.arguments()?;
                node = self.inner("call", vec![node, args]);
            } else if self.at_op("[") {
                self.bump();
                let mut children = vec![node];
                loop {
                    children.push(self.slice_or_expression()?);
                    if !self.at_op(",") {
                        break;
                    }
                    self.bump();
                    if self.at_op("]") {
                        break;
                    }
                }
                let close = self.expect_op("]")?;
                let start = self.nodes[node].span.0;
                node = self.inner_spanning("subscript", children, start, close.end);
            } else {
                return Ok(node);
            }
        }
    }

    fn slice_or_expression(&mut self) -> PResult<usize> {
        let mut parts = Vec::new();
        if !self.at_op(":") {
            let e = self.expression()?;
            if !self.at_op(":") {
                return Ok(e);
            }
            parts.push(e);
        }
        for _ in 0..2 {
            if !self.at_op(":") {
                break;
            }
            let t = self.bump();
            parts.push(self.op_leaf(":", t.start, t.end));
            if !self.at_op(":") && !self.at_op("]") && !self.at_op(",") {
                parts.push(self.expression()?);
            }
        }
        Ok(self.inner("slice", parts))
    }

    fn arguments(&mut self) -> PResult<usize> {
        let open = self.expect_op("(")?;
        let mut args = Vec::new();
        while !self.at_op(")") {
            let arg = if self.at_op("*") || self.at_op("**") {
                let t = self.bump();
                let e = self.expression()?;
                let kind = if t.text == "*" { "list_splat" } else { "dictionary_splat" };
                let end = self.nodes[e].span.1;
                self.inner_spanning(kind, vec![e], t.start, end)
            } else if self.peek().kind == TokenKind::Name
                && !is_keyword(&self.peek().text)
                && self.peek_at(1).kind == TokenKind::Op
                && self.peek_at(1).text == "="
            {
                let name = self.identifier()?;
                self.bump();
                let value = self.expression()?;
                self.inner("keyword_argument", vec![name, value])
            } else {
                let e = self.expression()?;
                if self.at_kw("for") {
                    return Err(self.error("comprehensions are not supported"));
                }
                e
            };
            args.push(arg);
            if !self.at_op(",") {
                break;
            }
            self.bump();
        }
        let close = self.expect_op(")")?;
        Ok(self.inner_spanning("argument_list", args, open.start, close.end))
    }

    fn atom(&mut self) -> PResult<usize> {
        let t = self.peek().clone();
        match t.kind {
            TokenKind::Name => {
                let kind = match t.text.as_str() {
                    "True" => "true",
                    "False" => "false",
                    "None" => "none",
                    _ => return self.identifier(),
                };
                self.bump();
                Ok(self.leaf(kind, &t))
            }
            TokenKind::Number => {
                self.bump();
                let lower = t.text.to_ascii_lowercase();
                let is_float = !lower.starts_with("0x")
                    && (lower.contains('.') || lower.contains('e') || lower.ends_with('j'));
                Ok(self.leaf(if is_float { "float" } else { "integer" }, &t))
            }
            TokenKind::String => {
                let mut parts = Vec::new();
                while self.at_kind(TokenKind::String) {
                    let s = self.bump();
                    parts.push(self.leaf("string", &s));
                }
                if parts.len() == 1 {
                    Ok(parts[0])
                } else {
                    Ok(self.inner("concatenated_string", parts))
                }
            }
            TokenKind::Op => match t.text.as_str() {
                "(" => self.paren(),
                "[" => {
                    let (items, start, end) = self.sequence("[", "]")?;
                    Ok(self.inner_spanning("list", items, start, end))
                }
                "{" => self.brace(),
                "..." => {
                    self.bump();
                    Ok(self.leaf("ellipsis", &t))
                }
                _ => Err(self.unexpected("expected an expression")),
            },
            _ => Err(self.unexpected("expected an expression")),
        }
    }

    fn paren(&mut self) -> PResult<usize> {
        let open = self.expect_op("(")?;
        if self.at_op(")") {
            let close = self.bump();
            return Ok(self.inner_spanning("tuple", Vec::new(), open.start, close.end));
        }
        let first = self.star_or_expression()?;
        if self.at_kw("for") {
            return Err(self.error("generator expressions are not supported"));
        }
        if self.at_op(")") {
            let close = self.bump();
            return Ok(self.inner_spanning(
                "parenthesized_expression",
                vec![first],
                open.start,
                close.end,
            ));
        }
        let mut items = vec![first];
        while self.at_op(",") {
            self.bump();
            if self.at_op(")") {
                break;
            }
            items.push(self.star_or_expression()?);
        }
        let close = self.expect_op(")")?;
        Ok(self.inner_spanning("tuple", items, open.start, close.end))
    }

    fn sequence(&mut self, open: &str, close: &str) -> PResult<(Vec<usize>, usize, usize)> {
        let o = self.expect_op(open)?;
        let mut items = Vec::new();
        while !self.at_op(close) {
            items.push(self.star_or_expression()?);
            if self.at_kw("for") {
                return Err(self.error("comprehensions are not supported"));
            }
            if !self.at_op(",") {
                break;
            }
            self.bump();
        }
        let c = self.expect_op(close)?;
        Ok((items, o.start, c.end))
    }

    fn brace(&mut self) -> PResult<usize> {
        let open = self.expect_op("{")?;
        if self.at_op("}") {
            let close = self.bump();
            return Ok(self.inner_spanning("dictionary", Vec::new(), open.start, close.end));
        }
        let mut items = Vec::new();
        let mut is_dict = None;
        loop {
            if self.at_op("**") {
                let t = self.bump();
                let e = self.bitor()?;
                let end = self.nodes[e].span.1;
                items.push(self.inner_spanning("dictionary_splat", vec![e], t.start, end));
                if is_dict == Some(false) {
                    return Err(self.error("mixed set and dict display"));
                }
                is_dict = Some(true);
            } else {
                let k = self.star_or_expression()?;
                if self.at_op(":") {
                    if is_dict == Some(false) {
                        return Err(self.error("mixed set and dict display"));
                    }
                    is_dict = Some(true);
                    self.bump();
                    let v = self.expression()?;
                    items.push(self.inner("pair", vec![k, v]));
                } else {
                    if is_dict == Some(true) {
                        return Err(self.unexpected("expected ':'"));
                    }
                    is_dict = Some(false);
                    items.push(k);
                }
            }
            if self.at_kw("for") {
                return Err(self.error("comprehensions are not supported"));
            }
            if !self.at_op(",") {
                break;
            }
            self.bump();
            if self.at_op("}") {
                break;
            }
        }
        let close = self.expect_op("}")?;
        let kind = if is_dict == Some(true) { "dictionary" } else { "set" };
        Ok(self.inner_spanning(kind, items, open.start, close.end))
    }
}
