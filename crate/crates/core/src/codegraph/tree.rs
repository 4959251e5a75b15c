use std::collections::BTreeMap;
use std::fmt::Write;

/// One syntax tree node. Leaves carry the source text of their token;
/// operator leaves use the operator itself as their kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub kind: String,
    pub children: Vec<usize>,
    /// Byte range in the source.
    pub span: (usize, usize),
    pub text: Option<String>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxTree {
    pub nodes: Vec<Node>,
    pub root: usize,
}

impl SyntaxTree {
    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn kind(&self, id: usize) -> &str {
        &self.nodes[id].kind
    }

    pub fn children(&self, id: usize) -> &[usize] {
        &self.nodes[id].children
    }

    /// Node ids in pre-order from the root.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            out.push(id);
            stack.extend(self.nodes[id].children.iter().rev());
        }
        out
    }

    /// Height of every node, leaves being 1.
    pub fn heights(&self) -> Vec<usize> {
        let mut heights = vec![0; self.nodes.len()];
        for &id in self.preorder().iter().rev() {
            heights[id] = 1 + self.nodes[id]
                .children
                .iter()
                .map(|c| heights[*c])
                .max()
                .unwrap_or(0);
        }
        heights
    }

    /// Canonical form of every subtree: `(kind child ...)`, leaves reduced to
    /// their kind, so identifiers and literals are anonymous.
    pub fn canonical_forms(&self) -> Vec<String> {
        let mut forms = vec![String::new(); self.nodes.len()];
        for &id in self.preorder().iter().rev() {
            let node = &self.nodes[id];
            if node.is_leaf() {
                forms[id] = node.kind.clone();
            } else {
                let mut s = format!("({}", node.kind);
                for c in &node.children {
                    s.push(' ');
                    s.push_str(&forms[*c]);
                }
                s.push(')');
                forms[id] = s;
            }
        }
        forms
    }

    /// S-expression dump with leaf texts, one node per line.
    pub fn to_sexpr(&self) -> String {
        let mut out = String::new();
        self.write_sexpr(self.root, 0, &mut out);
        out
    }

    fn write_sexpr(&self, id: usize, indent: usize, out: &mut String) {
        let node = &self.nodes[id];
        let pad = "  ".repeat(indent);
        match &node.text {
            Some(text) if node.is_leaf() => {
                let _ = writeln!(out, "{pad}({} {:?})", node.kind, text);
            }
            _ if node.is_leaf() => {
                let _ = writeln!(out, "{pad}({})", node.kind);
            }
            _ => {
                let _ = writeln!(out, "{pad}({}", node.kind);
                for c in &node.children {
                    self.write_sexpr(*c, indent + 1, out);
                }
                out.pop();
                out.push_str(")\n");
            }
        }
    }

    /// Structural equality ignoring spans and node numbering.
    pub fn isomorphic(&self, other: &SyntaxTree) -> bool {
        let mut stack = vec![(self.root, other.root)];
        while let Some((a, b)) = stack.pop() {
            let (na, nb) = (&self.nodes[a], &other.nodes[b]);
            if na.kind != nb.kind || na.children.len() != nb.children.len() {
                return false;
            }
            if na.is_leaf() && na.text != nb.text {
                return false;
            }
            stack.extend(na.children.iter().copied().zip(nb.children.iter().copied()));
        }
        true
    }
}

/// Multiset of canonical subtree strings over subtrees of height at least
/// `min_height`.
pub fn subtree_multiset(tree: &SyntaxTree, min_height: usize) -> BTreeMap<String, usize> {
    let heights = tree.heights();
    let forms = tree.canonical_forms();
    let mut out = BTreeMap::new();
    for id in tree.preorder() {
        if heights[id] >= min_height {
            *out.entry(forms[id].clone()).or_insert(0) += 1;
        }
    }
    out
}
