//! Def-use extraction over Python-subset syntax trees.
//!
//! A single forward pass tracks, for each variable, the set of definitions
//! that may reach the current point. Every read of a variable yields a
//! `comesFrom` edge to each reaching definition, or to an external source
//! when none reaches. Each assignment target yields a `computedFrom` edge to
//! every distinct variable read on its right-hand side. Both arms of an `if`
//! reach the code after it; loop bodies are walked once and merged with the
//! state before the loop. Function bodies see the enclosing state plus their
//! parameters and do not affect it.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::tree::SyntaxTree;

/// Source label for reads with no reaching definition.
pub const EXTERNAL: &str = "external";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Relation {
    #[serde(rename = "comesFrom")]
    ComesFrom,
    #[serde(rename = "computedFrom")]
    ComputedFrom,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::ComesFrom => "comesFrom",
            Relation::ComputedFrom => "computedFrom",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DataflowEdge {
    /// Normalized name (`var_0`, `var_1`, ... by first occurrence).
    pub var: String,
    /// Name as written.
    pub name: String,
    pub relation: Relation,
    /// Normalized name of the source variable, or `"external"`.
    pub source: String,
    /// Node of the source occurrence; `None` for external sources.
    pub def_site: Option<usize>,
    pub use_site: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DataflowGraph {
    pub edges: Vec<DataflowEdge>,
}

impl DataflowGraph {
    /// Edges as `(var, relation, source)` triples with their multiplicity.
    pub fn normalized(&self) -> BTreeMap<(String, Relation, String), usize> {
        let mut out = BTreeMap::new();
        for e in &self.edges {
            *out.entry((e.var.clone(), e.relation, e.source.clone()))
                .or_insert(0) += 1;
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }
}

type Env = BTreeMap<String, BTreeSet<usize>>;

struct RawEdge {
    name: String,
    relation: Relation,
    source_name: Option<String>,
    def_site: Option<usize>,
    use_site: usize,
}

struct Walker<'a> {
    tree: &'a SyntaxTree,
    edges: Vec<RawEdge>,
    /// Every variable occurrence (node id, name).
    occurrences: Vec<(usize, String)>,
}

pub fn extract_dataflow(tree: &SyntaxTree) -> DataflowGraph {
    let mut w = Walker {
        tree,
        edges: Vec::new(),
        occurrences: Vec::new(),
    };
    let mut env = Env::new();
    w.statements(tree.children(tree.root), &mut env);

    let mut occ = w.occurrences.clone();
    occ.sort_by_key(|(id, _)| tree.node(*id).span.0);
    let mut numbering: HashMap<String, String> = HashMap::new();
    for (_, name) in &occ {
        let next = numbering.len();
        numbering
            .entry(name.clone())
            .or_insert_with(|| format!("var_{next}"));
    }
    let edges = w
        .edges
        .into_iter()
        .map(|e| DataflowEdge {
            var: numbering[&e.name].clone(),
            source: e
                .source_name
                .map(|s| numbering[&s].clone())
                .unwrap_or_else(|| EXTERNAL.to_string()),
            name: e.name,
            relation: e.relation,
            def_site: e.def_site,
            use_site: e.use_site,
        })
        .collect();
    DataflowGraph { edges }
}

fn merge(envs: Vec<Env>) -> Env {
    let mut out = Env::new();
    for env in envs {
        for (name, defs) in env {
            out.entry(name).or_default().extend(defs);
        }
    }
    out
}

impl Walker<'_> {
    fn text(&self, id: usize) -> String {
        self.tree.node(id).text.clone().unwrap_or_default()
    }

    fn statements(&mut self, ids: &[usize], env: &mut Env) {
        for &id in ids {
            self.statement(id, env);
        }
    }

    fn statement(&mut self, id: usize, env: &mut Env) {
        let tree = self.tree;
        let ch = tree.children(id);
        match tree.kind(id) {
            "expression_statement" | "return_statement" => {
                for &c in ch {
                    self.uses(c, env);
                }
            }
            "assignment" => {
                let (value, targets) = ch.split_last().expect("assignment has a value");
                self.uses(*value, env);
                let rhs = self.reads(*value);
                for &t in targets {
                    self.assign(t, &rhs, env);
                }
            }
            "augmented_assignment" => {
                let (target, value) = (ch[0], ch[2]);
                self.uses(value, env);
                if tree.kind(target) == "identifier" {
                    self.uses(target, env);
                    let mut rhs = vec![(target, self.text(target))];
                    for r in self.reads(value) {
                        if !rhs.iter().any(|(_, n)| *n == r.1) {
                            rhs.push(r);
                        }
                    }
                    self.assign(target, &rhs, env);
                } else {
                    self.uses(target, env);
                }
            }
            "function_definition" => {
                let (name, params) = (ch[0], ch[1]);
                for &p in tree.children(params) {
                    // Defaults and annotations are evaluated in the enclosing scope.
                    for &c in tree.children(p).iter().skip(1) {
                        self.uses(c, env);
                    }
                }
                if ch.len() == 4 {
                    self.uses(ch[2], env);
                }
                self.define(name, env);
                let mut inner = env.clone();
                for &p in tree.children(params) {
                    let ident = if tree.kind(p) == "identifier" {
                        p
                    } else {
                        tree.children(p)[0]
                    };
                    self.define(ident, &mut inner);
                }
                self.statements(tree.children(ch[ch.len() - 1]), &mut inner);
            }
            "if_statement" => {
                self.uses(ch[0], env);
                let mut arms = Vec::new();
                let mut then = env.clone();
                self.statements(tree.children(ch[1]), &mut then);
                arms.push(then);
                let mut has_else = false;
                for &clause in &ch[2..] {
                    let cc = tree.children(clause);
                    let mut arm = env.clone();
                    if tree.kind(clause) == "elif_clause" {
                        self.uses(cc[0], env);
                        self.statements(tree.children(cc[1]), &mut arm);
                    } else {
                        has_else = true;
                        self.statements(tree.children(cc[0]), &mut arm);
                    }
                    arms.push(arm);
                }
                if !has_else {
                    arms.push(env.clone());
                }
                *env = merge(arms);
            }
            "for_statement" => {
                let (target, iter, body) = (ch[0], ch[1], ch[2]);
                self.uses(iter, env);
                let rhs = self.reads(iter);
                let mut looped = env.clone();
                self.assign(target, &rhs, &mut looped);
                self.statements(tree.children(body), &mut looped);
                *env = merge(vec![env.clone(), looped]);
                if let Some(&clause) = ch.get(3) {
                    self.statements(tree.children(tree.children(clause)[0]), env);
                }
            }
            "while_statement" => {
                self.uses(ch[0], env);
                let mut looped = env.clone();
                self.statements(tree.children(ch[1]), &mut looped);
                *env = merge(vec![env.clone(), looped]);
                if let Some(&clause) = ch.get(2) {
                    self.statements(tree.children(tree.children(clause)[0]), env);
                }
            }
            "import_statement" => {
                for &item in ch {
                    let bound = if tree.kind(item) == "aliased_import" {
                        tree.children(item)[1]
                    } else {
                        tree.children(item)[0]
                    };
                    self.define(bound, env);
                }
            }
            "import_from_statement" => {
                for &item in &ch[1..] {
                    match tree.kind(item) {
                        "aliased_import" => self.define(tree.children(item)[1], env),
                        "dotted_name" => self.define(tree.children(item)[0], env),
                        _ => {}
                    }
                }
            }
            _ => {}
        }
    }

    fn define(&mut self, id: usize, env: &mut Env) {
        let name = self.text(id);
        self.occurrences.push((id, name.clone()));
        env.insert(name, BTreeSet::from([id]));
    }

    /// Binds an assignment target; `rhs` lists the variables read by the
    /// assigned value.
    fn assign(&mut self, target: usize, rhs: &[(usize, String)], env: &mut Env) {
        let tree = self.tree;
        match tree.kind(target) {
            "identifier" => {
                let name = self.text(target);
                for (site, source) in rhs {
                    self.edges.push(RawEdge {
                        name: name.clone(),
                        relation: Relation::ComputedFrom,
                        source_name: Some(source.clone()),
                        def_site: Some(*site),
                        use_site: target,
                    });
                }
                self.define(target, env);
            }
            "tuple" | "list" | "expression_list" | "parenthesized_expression" | "list_splat" => {
                for &c in tree.children(target) {
                    self.assign(c, rhs, env);
                }
            }
            _ => self.uses(target, env),
        }
    }

    /// Variable reads inside an expression, in source order.
    fn read_sites(&self, id: usize, out: &mut Vec<usize>) {
        let tree = self.tree;
        let ch = tree.children(id);
        match tree.kind(id) {
            "identifier" => out.push(id),
            "attribute" => self.read_sites(ch[0], out),
            "keyword_argument" => self.read_sites(ch[1], out),
            _ => {
                for &c in ch {
                    self.read_sites(c, out);
                }
            }
        }
    }

    /// Distinct variables read by an expression with their first read site.
    fn reads(&self, id: usize) -> Vec<(usize, String)> {
        let mut sites = Vec::new();
        self.read_sites(id, &mut sites);
        let mut out: Vec<(usize, String)> = Vec::new();
        for s in sites {
            let name = self.text(s);
            if !out.iter().any(|(_, n)| *n == name) {
                out.push((s, name));
            }
        }
        out
    }

    fn uses(&mut self, id: usize, env: &Env) {
        let mut sites = Vec::new();
        self.read_sites(id, &mut sites);
        for site in sites {
            let name = self.text(site);
            self.occurrences.push((site, name.clone()));
            match env.get(&name) {
                Some(defs) if !defs.is_empty() => {
                    for &d in defs {
                        self.edges.push(RawEdge {
                            name: name.clone(),
                            relation: Relation::ComesFrom,
                            source_name: Some(name.clone()),
                            def_site: Some(d),
                            use_site: site,
                        });
                    }
                }
                _ => self.edges.push(RawEdge {
                    name: name.clone(),
                    relation: Relation::ComesFrom,
                    source_name: None,
                    def_site: None,
                    use_site: site,
                }),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codegraph::parse;

    fn triples(code: &str) -> Vec<(String, &'static str, String)> {
        let tree = parse(code).tree.unwrap();
        extract_dataflow(&tree)
            .edges
            .into_iter()
            .map(|e| (e.var, e.relation.as_str(), e.source))
            .collect()
    }

    fn t(var: &str, rel: &'static str, src: &str) -> (String, &'static str, String) {
        (var.into(), rel, src.into())
    }

    #[test]
    fn def_then_use() {
        assert_eq!(
            triples("x = 1\ny = x"),
            vec![t("var_0", "comesFrom", "var_0"), t("var_1", "computedFrom", "var_0")]
        );
    }

    #[test]
    fn constant_assignment_has_no_edges() {
        assert!(triples("x = 1").is_empty());
    }

    #[test]
    fn undefined_read_is_external() {
        assert_eq!(
            triples("a = b"),
            vec![t("var_1", "comesFrom", "external"), t("var_0", "computedFrom", "var_1")]
        );
    }

    #[test]
    fn both_branches_reach() {
        let tree = parse("if c:\n    x = 1\nelse:\n    x = 2\ny = x").tree.unwrap();
        let g = extract_dataflow(&tree);
        let from_x: Vec<_> = g
            .edges
            .iter()
            .filter(|e| e.name == "x" && e.relation == Relation::ComesFrom)
            .collect();
        assert_eq!(from_x.len(), 2);
        assert_ne!(from_x[0].def_site, from_x[1].def_site);
        for e in &from_x {
            assert!(e.def_site.unwrap() < e.use_site || tree.node(e.def_site.unwrap()).span.0 < tree.node(e.use_site).span.0);
        }
    }

    #[test]
    fn loop_reaches_after_and_single_pass() {
        // The read of s in the body sees only the definition before the loop.
        let tr = triples("s = 0\nfor i in r:\n    s = s + i\nprint(s)");
        let s_reads: Vec<_> = tr
            .iter()
            .filter(|(v, r, _)| v == "var_0" && *r == "comesFrom")
            .collect();
        assert_eq!(s_reads.len(), 3);
    }

    #[test]
    fn functions_see_params() {
        let tr = triples("def f(a, b=c):\n    return a + b\n");
        assert!(tr.contains(&t("var_3", "comesFrom", "external")));
        let tree = parse("def f(a):\n    return a\n").tree.unwrap();
        let g = extract_dataflow(&tree);
        assert_eq!(g.edges.len(), 1);
        assert!(g.edges[0].def_site.is_some());
    }

    #[test]
    fn augmented_reads_itself() {
        assert_eq!(
            triples("x = 1\nx += y"),
            vec![
                t("var_1", "comesFrom", "external"),
                t("var_0", "comesFrom", "var_0"),
                t("var_0", "computedFrom", "var_0"),
                t("var_0", "computedFrom", "var_1"),
            ]
        );
    }

    #[test]
    fn attributes_are_not_variables() {
        let tr = triples("import os\np = os.path.join(a, sep=b)");
        let vars: BTreeSet<String> = tr.iter().map(|e| e.0.clone()).collect();
        // os, p, a, b
        assert_eq!(vars.len(), 4);
    }
}
