//! Grammars, parse-tree programs and their interpreter.
//!
//! A grammar has nonterminals, terminals (constants and input variables),
//! black-box builtin functions, and two kinds of rules:
//!
//! * leaf rules `s := t` deriving a terminal directly, and
//! * productions `s := f(s1, .., sk)` over nonterminal arguments.
//!
//! Programs are plain parse trees naming terminals and builtins; the
//! grammar resolves names when evaluating or checking them.

mod program;
pub mod strings;
pub mod toy;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{EvalError, GrammarError};
use crate::value::{Env, Value};

pub use program::{quote, Program};
pub use strings::{default_tokens, string_grammar, StringDsl, Token};
pub use toy::toy_grammar;

/// Evaluator of a builtin; `None` when the function is undefined on its
/// arguments.
pub type BuiltinFn = Arc<dyn Fn(&[&Value]) -> Option<Value> + Send + Sync>;

/// Computes the character length of a builtin's string result from the
/// lengths of its string arguments, letting automaton construction reject
/// an over-long result before building it.
pub type LengthFn = Arc<dyn Fn(&[usize]) -> usize + Send + Sync>;

macro_rules! id_type {
    ($name:ident) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(NtId);
id_type!(TermId);
id_type!(FuncId);

/// Kind of a grammar symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Terminal,
    NonTerminal,
}

/// How a terminal obtains its value from the input environment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TerminalEval {
    Const(Value),
    Var(String),
}

#[derive(Debug, Clone)]
pub struct Terminal {
    pub name: String,
    pub eval: TerminalEval,
}

impl Terminal {
    pub fn eval(&self, env: &Env) -> Result<Value, EvalError> {
        match &self.eval {
            TerminalEval::Const(v) => Ok(v.clone()),
            TerminalEval::Var(x) => env.get(x).cloned(),
        }
    }
}

#[derive(Clone)]
pub struct Builtin {
    pub name: String,
    pub arity: usize,
    eval: BuiltinFn,
    length: Option<LengthFn>,
}

impl Builtin {
    pub fn apply(&self, args: &[&Value]) -> Option<Value> {
        (self.eval)(args)
    }

    pub fn result_length(&self, arg_lengths: &[usize]) -> Option<usize> {
        self.length.as_ref().map(|f| f(arg_lengths))
    }
}

impl fmt::Debug for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Builtin")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .finish_non_exhaustive()
    }
}

/// `lhs := terminal`
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeafRule {
    pub lhs: NtId,
    pub terminal: TermId,
}

/// `lhs := func(args..)`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    pub lhs: NtId,
    pub func: FuncId,
    pub args: Vec<NtId>,
}

/// A DSL grammar `(T, N, P, s0)` together with its builtin table.
#[derive(Debug)]
pub struct Grammar {
    name: String,
    nonterminals: Vec<String>,
    terminals: Vec<Terminal>,
    builtins: Vec<Builtin>,
    leaves: Vec<LeafRule>,
    productions: Vec<Production>,
    start: NtId,
    symbols: HashMap<String, (SymbolKind, u32)>,
    funcs: HashMap<String, FuncId>,
    // strongly connected component of each nonterminal
    component: Vec<usize>,
    // components in dependency order: arguments before users
    component_order: Vec<Vec<NtId>>,
    recursive: Vec<bool>,
}

impl Grammar {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn start(&self) -> NtId {
        self.start
    }

    pub fn nonterminal_name(&self, nt: NtId) -> &str {
        &self.nonterminals[nt.index()]
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = (NtId, &str)> {
        self.nonterminals
            .iter()
            .enumerate()
            .map(|(i, n)| (NtId(i as u32), n.as_str()))
    }

    pub fn terminal(&self, t: TermId) -> &Terminal {
        &self.terminals[t.index()]
    }

    pub fn terminals(&self) -> &[Terminal] {
        &self.terminals
    }

    pub fn builtin(&self, f: FuncId) -> &Builtin {
        &self.builtins[f.index()]
    }

    pub fn builtins(&self) -> &[Builtin] {
        &self.builtins
    }

    pub fn leaves(&self) -> &[LeafRule] {
        &self.leaves
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn lookup_nonterminal(&self, name: &str) -> Option<NtId> {
        match self.symbols.get(name) {
            Some((SymbolKind::NonTerminal, i)) => Some(NtId(*i)),
            _ => None,
        }
    }

    pub fn lookup_terminal(&self, name: &str) -> Option<TermId> {
        match self.symbols.get(name) {
            Some((SymbolKind::Terminal, i)) => Some(TermId(*i)),
            _ => None,
        }
    }

    pub fn lookup_builtin(&self, name: &str) -> Option<FuncId> {
        self.funcs.get(name).copied()
    }

    /// Whether production `index` recurses into its own component; only
    /// these productions count towards the scope height.
    pub fn is_recursive(&self, index: usize) -> bool {
        self.recursive[index]
    }

    pub fn same_component(&self, a: NtId, b: NtId) -> bool {
        self.component[a.index()] == self.component[b.index()]
    }

    /// Nonterminal components, each listed after every component it uses.
    pub fn component_order(&self) -> &[Vec<NtId>] {
        &self.component_order
    }

    /// Runs `p` on `env`. `Ok(None)` means some builtin was undefined on
    /// its arguments.
    pub fn eval(&self, p: &Program, env: &Env) -> Result<Option<Value>, EvalError> {
        match p {
            Program::Leaf(name) => {
                let t = self
                    .lookup_terminal(name)
                    .ok_or_else(|| EvalError::UnknownSymbol(name.clone()))?;
                self.terminal(t).eval(env).map(Some)
            }
            Program::Node(name, children) => {
                let f = self
                    .lookup_builtin(name)
                    .ok_or_else(|| EvalError::UnknownSymbol(name.clone()))?;
                let builtin = self.builtin(f);
                if builtin.arity != children.len() {
                    return Err(EvalError::Arity {
                        name: name.clone(),
                        expected: builtin.arity,
                        found: children.len(),
                    });
                }
                let mut args = Vec::with_capacity(children.len());
                for c in children {
                    match self.eval(c, env)? {
                        Some(v) => args.push(v),
                        None => return Ok(None),
                    }
                }
                let refs: Vec<&Value> = args.iter().collect();
                Ok(builtin.apply(&refs))
            }
        }
    }

    /// Whether `p` derives from the start symbol.
    pub fn conforms(&self, p: &Program) -> bool {
        self.derives(p, self.start)
    }

    pub fn derives(&self, p: &Program, nt: NtId) -> bool {
        self.scope_heights(p, nt).is_some()
    }

    /// Scope height of `p` derived from the start symbol: the longest chain
    /// of nested recursive productions, counting the chain's base as 1.
    /// `None` when `p` does not conform.
    pub fn scope_height(&self, p: &Program) -> Option<usize> {
        self.scope_heights(p, self.start).map(|(_, max)| max)
    }

    // (height of the root node, max height over all nodes), minimised over
    // derivations
    fn scope_heights(&self, p: &Program, nt: NtId) -> Option<(usize, usize)> {
        match p {
            Program::Leaf(name) => {
                let t = self.lookup_terminal(name)?;
                self.leaves
                    .iter()
                    .any(|r| r.lhs == nt && r.terminal == t)
                    .then_some((1, 1))
            }
            Program::Node(name, children) => {
                let f = self.lookup_builtin(name)?;
                let mut best: Option<(usize, usize)> = None;
                for (i, prod) in self.productions.iter().enumerate() {
                    if prod.lhs != nt || prod.func != f || prod.args.len() != children.len() {
                        continue;
                    }
                    let mut root = 1;
                    let mut max = 1;
                    let mut ok = true;
                    for (child, &arg) in children.iter().zip(&prod.args) {
                        match self.scope_heights(child, arg) {
                            Some((h, m)) => {
                                if self.recursive[i] && self.same_component(arg, nt) {
                                    root = root.max(h + 1);
                                }
                                max = max.max(m);
                            }
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        let cand = (root, max.max(root));
                        if best.is_none_or(|b| (cand.1, cand.0) < (b.1, b.0)) {
                            best = Some(cand);
                        }
                    }
                }
                best
            }
        }
    }
}

/// Incremental construction of a [`Grammar`].
#[derive(Default)]
pub struct GrammarBuilder {
    name: String,
    nonterminals: Vec<String>,
    terminals: Vec<Terminal>,
    builtins: Vec<Builtin>,
    leaves: Vec<(String, String)>,
    productions: Vec<(String, String, Vec<String>)>,
    start: Option<String>,
}

impl GrammarBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        GrammarBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn nonterminal(&mut self, name: &str) -> &mut Self {
        self.nonterminals.push(name.to_string());
        self
    }

    pub fn constant(&mut self, name: &str, value: Value) -> &mut Self {
        self.terminals.push(Terminal {
            name: name.to_string(),
            eval: TerminalEval::Const(value),
        });
        self
    }

    pub fn variable(&mut self, name: &str) -> &mut Self {
        self.terminals.push(Terminal {
            name: name.to_string(),
            eval: TerminalEval::Var(name.to_string()),
        });
        self
    }

    pub fn builtin<F>(&mut self, name: &str, arity: usize, f: F) -> &mut Self
    where
        F: Fn(&[&Value]) -> Option<Value> + Send + Sync + 'static,
    {
        self.builtins.push(Builtin {
            name: name.to_string(),
            arity,
            eval: Arc::new(f),
            length: None,
        });
        self
    }

    /// Attaches a result-length function to the most recently added builtin.
    pub fn with_length<L>(&mut self, f: L) -> &mut Self
    where
        L: Fn(&[usize]) -> usize + Send + Sync + 'static,
    {
        if let Some(b) = self.builtins.last_mut() {
            b.length = Some(Arc::new(f));
        }
        self
    }

    pub fn leaf(&mut self, lhs: &str, terminal: &str) -> &mut Self {
        self.leaves.push((lhs.to_string(), terminal.to_string()));
        self
    }

    pub fn production(&mut self, lhs: &str, func: &str, args: &[&str]) -> &mut Self {
        self.productions.push((
            lhs.to_string(),
            func.to_string(),
            args.iter().map(|s| s.to_string()).collect(),
        ));
        self
    }

    pub fn start(&mut self, name: &str) -> &mut Self {
        self.start = Some(name.to_string());
        self
    }

    pub fn build(&mut self) -> Result<Grammar, GrammarError> {
        let mut symbols = HashMap::new();
        for (i, n) in self.nonterminals.iter().enumerate() {
            if symbols
                .insert(n.clone(), (SymbolKind::NonTerminal, i as u32))
                .is_some()
            {
                return Err(GrammarError::DuplicateSymbol(n.clone()));
            }
        }
        for (i, t) in self.terminals.iter().enumerate() {
            if symbols
                .insert(t.name.clone(), (SymbolKind::Terminal, i as u32))
                .is_some()
            {
                return Err(GrammarError::DuplicateSymbol(t.name.clone()));
            }
        }
        let mut funcs = HashMap::new();
        for (i, b) in self.builtins.iter().enumerate() {
            if funcs.insert(b.name.clone(), FuncId(i as u32)).is_some() {
                return Err(GrammarError::DuplicateSymbol(b.name.clone()));
            }
        }
        let nt = |name: &str| match symbols.get(name) {
            Some((SymbolKind::NonTerminal, i)) => Ok(NtId(*i)),
            _ => Err(GrammarError::UnknownNonTerminal(name.to_string())),
        };
        let mut leaves = Vec::new();
        let mut seen = HashSet::new();
        for (lhs, t) in &self.leaves {
            let terminal = match symbols.get(t.as_str()) {
                Some((SymbolKind::Terminal, i)) => TermId(*i),
                _ => return Err(GrammarError::UnknownTerminal(t.clone())),
            };
            let rule = LeafRule {
                lhs: nt(lhs)?,
                terminal,
            };
            if seen.insert((rule.lhs, rule.terminal)) {
                leaves.push(rule);
            }
        }
        let mut productions = Vec::new();
        for (lhs, f, args) in &self.productions {
            let func = *funcs
                .get(f)
                .ok_or_else(|| GrammarError::UnknownBuiltin(f.clone()))?;
            let arity = self.builtins[func.index()].arity;
            if arity != args.len() {
                return Err(GrammarError::ArityMismatch {
                    name: f.clone(),
                    arity,
                    args: args.len(),
                });
            }
            productions.push(Production {
                lhs: nt(lhs)?,
                func,
                args: args.iter().map(|a| nt(a)).collect::<Result<_, _>>()?,
            });
        }
        let start = nt(self.start.as_deref().ok_or(GrammarError::NoStart)?)?;

        let (component, component_order) = components(self.nonterminals.len(), &productions);
        let recursive = productions
            .iter()
            .map(|p| {
                p.args
                    .iter()
                    .any(|a| component[a.index()] == component[p.lhs.index()])
            })
            .collect();

        Ok(Grammar {
            name: self.name.clone(),
            nonterminals: self.nonterminals.clone(),
            terminals: self.terminals.clone(),
            builtins: self.builtins.clone(),
            leaves,
            productions,
            start,
            symbols,
            funcs,
            component,
            component_order,
            recursive,
        })
    }
}

/// Strongly connected components of the "lhs uses arg" graph, returned with
/// a dependency-first ordering.
fn components(n: usize, productions: &[Production]) -> (Vec<usize>, Vec<Vec<NtId>>) {
    // reach[a][b]: b is reachable from a through one or more productions
    let mut reach = vec![vec![false; n]; n];
    for p in productions {
        for a in &p.args {
            reach[p.lhs.index()][a.index()] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                let via = reach[k].clone();
                for (r, v) in reach[i].iter_mut().zip(via) {
                    *r |= v;
                }
            }
        }
    }
    let mut component = vec![usize::MAX; n];
    let mut groups: Vec<Vec<NtId>> = Vec::new();
    for i in 0..n {
        if component[i] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let mut members = vec![NtId(i as u32)];
        component[i] = id;
        for j in i + 1..n {
            if reach[i][j] && reach[j][i] {
                component[j] = id;
                members.push(NtId(j as u32));
            }
        }
        groups.push(members);
    }
    // a component that reaches fewer others comes first
    let mut order: Vec<usize> = (0..groups.len()).collect();
    let reach_count = |g: usize| {
        let rep = groups[g][0].index();
        (0..n)
            .filter(|&j| reach[rep][j] && component[j] != g)
            .count()
    };
    order.sort_by_key(|&g| (reach_count(g), g));
    let ordered = order.iter().map(|&g| groups[g].clone()).collect();
    (component, ordered)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_names_across_kinds() {
        let err = GrammarBuilder::new("bad")
            .nonterminal("x")
            .variable("x")
            .start("x")
            .build()
            .unwrap_err();
        assert_eq!(err, GrammarError::DuplicateSymbol("x".into()));
    }

    #[test]
    fn rejects_arity_mismatch_in_production() {
        let err = GrammarBuilder::new("bad")
            .nonterminal("n")
            .builtin("f", 2, |_| None)
            .production("n", "f", &["n"])
            .start("n")
            .build()
            .unwrap_err();
        assert!(matches!(err, GrammarError::ArityMismatch { .. }));
    }

    #[test]
    fn dependency_order_puts_arguments_first() {
        let g = toy_grammar();
        let order: Vec<&str> = g
            .component_order()
            .iter()
            .map(|c| g.nonterminal_name(c[0]))
            .collect();
        assert_eq!(order, ["t", "n"]);
        assert!(g.productions().iter().enumerate().all(|(i, _)| g.is_recursive(i)));
    }
}
