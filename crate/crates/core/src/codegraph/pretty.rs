//! Renders a syntax tree back to source text.
//!
//! The output uses four-space indentation and one statement per line. Since
//! parentheses are kept as explicit nodes, printing without adding any
//! reproduces the same tree when parsed again.

use super::tree::SyntaxTree;

pub fn pretty_print(tree: &SyntaxTree) -> String {
    let mut out = String::new();
    for &stmt in tree.children(tree.root) {
        statement(tree, stmt, 0, &mut out);
    }
    out
}

fn line(out: &mut String, indent: usize, text: &str) {
    for _ in 0..indent {
        out.push_str("    ");
    }
    out.push_str(text);
    out.push('\n');
}

fn block(tree: &SyntaxTree, id: usize, indent: usize, out: &mut String) {
    let stmts = tree.children(id);
    if stmts.is_empty() {
        line(out, indent, "pass");
    }
    for &s in stmts {
        statement(tree, s, indent, out);
    }
}

fn statement(tree: &SyntaxTree, id: usize, indent: usize, out: &mut String) {
    let ch = tree.children(id);
    match tree.kind(id) {
        "function_definition" => {
            let name = expr(tree, ch[0]);
            let params = join(tree, tree.children(ch[1]), ", ");
            let ret = if ch.len() == 4 {
                format!(" -> {}", expr(tree, ch[2]))
            } else {
                String::new()
            };
            line(out, indent, &format!("def {name}({params}){ret}:"));
            block(tree, ch[ch.len() - 1], indent + 1, out);
        }
        "if_statement" => {
            line(out, indent, &format!("if {}:", expr(tree, ch[0])));
            block(tree, ch[1], indent + 1, out);
            for &clause in &ch[2..] {
                clause_stmt(tree, clause, indent, out);
            }
        }
        "for_statement" => {
            line(
                out,
                indent,
                &format!("for {} in {}:", expr(tree, ch[0]), expr(tree, ch[1])),
            );
            block(tree, ch[2], indent + 1, out);
            if ch.len() == 4 {
                clause_stmt(tree, ch[3], indent, out);
            }
        }
        "while_statement" => {
            line(out, indent, &format!("while {}:", expr(tree, ch[0])));
            block(tree, ch[1], indent + 1, out);
            if ch.len() == 3 {
                clause_stmt(tree, ch[2], indent, out);
            }
        }
        _ => line(out, indent, &simple(tree, id)),
    }
}

fn clause_stmt(tree: &SyntaxTree, id: usize, indent: usize, out: &mut String) {
    let ch = tree.children(id);
    if tree.kind(id) == "elif_clause" {
        line(out, indent, &format!("elif {}:", expr(tree, ch[0])));
        block(tree, ch[1], indent + 1, out);
    } else {
        line(out, indent, "else:");
        block(tree, ch[0], indent + 1, out);
    }
}

fn simple(tree: &SyntaxTree, id: usize) -> String {
    let ch = tree.children(id);
    match tree.kind(id) {
        "pass_statement" => "pass".into(),
        "break_statement" => "break".into(),
        "continue_statement" => "continue".into(),
        "return_statement" => match ch.first() {
            Some(&e) => format!("return {}", expr(tree, e)),
            None => "return".into(),
        },
        "assignment" => join(tree, ch, " = "),
        "augmented_assignment" => join(tree, ch, " "),
        "expression_statement" => expr(tree, ch[0]),
        "import_statement" => format!("import {}", join(tree, ch, ", ")),
        "import_from_statement" => format!(
            "from {} import {}",
            expr(tree, ch[0]),
            join(tree, &ch[1..], ", ")
        ),
        other => unreachable!("not a statement: {other}"),
    }
}

fn join(tree: &SyntaxTree, ids: &[usize], sep: &str) -> String {
    ids.iter()
        .map(|&c| expr(tree, c))
        .collect::<Vec<_>>()
        .join(sep)
}

fn expr(tree: &SyntaxTree, id: usize) -> String {
    let node = tree.node(id);
    let ch = &node.children;
    if node.is_leaf() {
        if let Some(text) = &node.text {
            return text.clone();
        }
    }
    match node.kind.as_str() {
        "binary_operator" | "boolean_operator" | "comparison_operator" => join(tree, ch, " "),
        "unary_operator" => format!("{}{}", expr(tree, ch[0]), expr(tree, ch[1])),
        "not_operator" => format!("not {}", expr(tree, ch[1])),
        "conditional_expression" => format!(
            "{} if {} else {}",
            expr(tree, ch[0]),
            expr(tree, ch[1]),
            expr(tree, ch[2])
        ),
        "parenthesized_expression" => format!("({})", expr(tree, ch[0])),
        "tuple" => {
            let inner = join(tree, ch, ", ");
            if ch.len() == 1 {
                format!("({inner},)")
            } else {
                format!("({inner})")
            }
        }
        "expression_list" => {
            let inner = join(tree, ch, ", ");
            if ch.len() == 1 {
                format!("{inner},")
            } else {
                inner
            }
        }
        "list" => format!("[{}]", join(tree, ch, ", ")),
        "set" => format!("{{{}}}", join(tree, ch, ", ")),
        "dictionary" => format!("{{{}}}", join(tree, ch, ", ")),
        "pair" => format!("{}: {}", expr(tree, ch[0]), expr(tree, ch[1])),
        "list_splat" | "list_splat_pattern" => format!("*{}", expr(tree, ch[0])),
        "dictionary_splat" | "dictionary_splat_pattern" => format!("**{}", expr(tree, ch[0])),
        "concatenated_string" => join(tree, ch, " "),
        "call" => format!("{}{}", expr(tree, ch[0]), expr(tree, ch[1])),
        "argument_list" => format!("({})", join(tree, ch, ", ")),
        "keyword_argument" | "default_parameter" => {
            format!("{}={}", expr(tree, ch[0]), expr(tree, ch[1]))
        }
        "typed_parameter" => format!("{}: {}", expr(tree, ch[0]), expr(tree, ch[1])),
        "typed_default_parameter" => format!(
            "{}: {} = {}",
            expr(tree, ch[0]),
            expr(tree, ch[1]),
            expr(tree, ch[2])
        ),
        "type" => expr(tree, ch[0]),
        "attribute" => format!("{}.{}", expr(tree, ch[0]), expr(tree, ch[1])),
        "subscript" => format!("{}[{}]", expr(tree, ch[0]), join(tree, &ch[1..], ", ")),
        "slice" => join(tree, ch, ""),
        "dotted_name" => join(tree, ch, "."),
        "aliased_import" => format!("{} as {}", expr(tree, ch[0]), expr(tree, ch[1])),
        "relative_import" => join(tree, ch, ""),
        other => unreachable!("not an expression: {other}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codegraph::parse;

    #[test]
    fn reparse_is_isomorphic() {
        for code in [
            "x = 1",
            "def f(a, b=2, *c, d: int = 4, **e) -> int:\n    return (a + b) * -c ** 2\n",
            "for i, (j, k) in zip(a, b):\n    if i in j and not k:\n        x[i:j, ::2] = {1: 2}\n    elif i is not None: pass\n    else:\n        continue\nelse:\n    y = ()\n",
            "from ..pkg.mod import (a as b, c)\nimport os.path as p, sys\n",
            "while True:\n    x += f(*a, k=v, **kw)[0].attr\n",
            "s = 'a' \"b\"\nt = x, \nu = {1, 2}\nv = [*a, b]\nw = a if b else c\n",
        ] {
            let tree = parse(code).tree.expect(code);
            let printed = pretty_print(&tree);
            let again = parse(&printed).tree.unwrap_or_else(|| panic!("{printed}"));
            assert!(tree.isomorphic(&again), "{code}\n---\n{printed}");
        }
    }
}
