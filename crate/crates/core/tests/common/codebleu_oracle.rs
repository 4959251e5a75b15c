//! Brute-force structure oracles and hand-traced CodeBLEU fixtures.

use std::collections::BTreeMap;

use nlpl_core::codegraph::{extract_dataflow, parse, tokenize_lenient, SyntaxTree, TokenKind};
use nlpl_core::rng::CounterRng;

/// Height of every node, computed recursively.
pub fn height(t: &SyntaxTree, id: usize) -> usize {
    1 + t.children(id).iter().map(|&c| height(t, c)).max().unwrap_or(0)
}

/// Structural equality with leaves compared by kind only.
pub fn same_shape(a: &SyntaxTree, x: usize, b: &SyntaxTree, y: usize) -> bool {
    a.kind(x) == b.kind(y)
        && a.children(x).len() == b.children(y).len()
        && a.children(x)
            .iter()
            .zip(b.children(y))
            .all(|(&c, &d)| same_shape(a, c, b, d))
}

/// AST match by enumerating every subtree and pairing them greedily.
pub fn brute_ast(hyp: &str, reference: &str) -> Option<f64> {
    let r = parse(reference).tree?;
    let rsubs: Vec<usize> = (0..r.nodes.len()).filter(|&i| height(&r, i) >= 2).collect();
    let Some(h) = parse(hyp).tree else {
        return Some(0.0);
    };
    let mut free: Vec<usize> = (0..h.nodes.len()).filter(|&i| height(&h, i) >= 2).collect();
    let mut matched = 0;
    for &x in &rsubs {
        if let Some(pos) = free.iter().position(|&y| same_shape(&r, x, &h, y)) {
            free.remove(pos);
            matched += 1;
        }
    }
    Some(matched as f64 / rsubs.len() as f64)
}

/// Dataflow match by pairing edge triples greedily.
pub fn brute_dataflow(hyp: &str, reference: &str) -> Option<f64> {
    let triples = |t: &SyntaxTree| -> Vec<(String, String, String)> {
        extract_dataflow(t)
            .edges
            .into_iter()
            .map(|e| (e.var, e.relation.as_str().to_string(), e.source))
            .collect()
    };
    let r = triples(&parse(reference).tree?);
    if r.is_empty() {
        return None;
    }
    let mut free = parse(hyp).tree.map(|t| triples(&t)).unwrap_or_default();
    let mut matched = 0;
    for e in &r {
        if let Some(pos) = free.iter().position(|f| f == e) {
            free.remove(pos);
            matched += 1;
        }
    }
    Some(matched as f64 / r.len() as f64)
}

/// (hyp, ref, ast, dataflow), traced by hand from the printed trees and edges.
pub const TRACED: &[(&str, &str, Option<f64>, Option<f64>)] = &[
    ("x = 1\ny = 2", "x = 1", Some(0.5), None),
    ("y = x + 1\nx = 1", "x = 1\ny = x + 1", Some(0.75), Some(0.0)),
    ("def f(a, b):\n    return a - b", "def f(a, b):\n    return a + b", Some(1.0 / 6.0), Some(1.0)),
    (
        "acc = 0\nfor v in items:\n    acc += v",
        "total = 0\nfor i in items:\n    total += i",
        Some(1.0),
        Some(1.0),
    ),
    ("b = 1\nc = b", "if a:\n    b = 1\nelse:\n    b = 2\nc = b", Some(0.25), Some(0.0)),
    ("x = f(y)\nz = y.attr", "x = f(y)\nz = x.attr", Some(1.0), Some(4.0 / 6.0)),
    ("while n > 0:\n    n -= 1", "while n > 0:\n    n = n - 1", Some(1.0 / 6.0), Some(1.0)),
    ("a = b\nb = a", "a, b = b, a", Some(0.0), Some(0.5)),
    ("import os\np = d + 'x'", "import os\np = os.path.join(d, 'x')", Some(0.25), Some(0.5)),
    ("def g(x)\n    return x", "def g(x):\n    y = x * 2\n    return y", Some(0.0), Some(0.0)),
];

/// Renames every non-keyword name consistently.
pub fn rename(code: &str, map: &BTreeMap<String, String>) -> String {
    let mut out = String::new();
    let mut last = 0;
    for t in tokenize_lenient(code) {
        if t.kind == TokenKind::Name {
            if let Some(new) = map.get(&t.text) {
                out.push_str(&code[last..t.start]);
                out.push_str(new);
                last = t.end;
            }
        }
    }
    out.push_str(&code[last..]);
    out
}

pub fn random_renaming(pair: (&str, &str), rng: &mut CounterRng) -> BTreeMap<String, String> {
    let mut names: Vec<String> = tokenize_lenient(pair.0)
        .into_iter()
        .chain(tokenize_lenient(pair.1))
        .filter(|t| t.kind == TokenKind::Name && !nlpl_core::codegraph::is_keyword(&t.text))
        .map(|t| t.text)
        .collect();
    names.sort();
    names.dedup();
    let mut fresh: Vec<usize> = (0..names.len()).collect();
    rng.shuffle(&mut fresh);
    names
        .into_iter()
        .zip(fresh)
        .map(|(n, k)| (n, format!("v{k}_{}", rng.below(1000))))
        .collect()
}
