//! Concrete finite tree automata.
//!
//! A state pairs a nonterminal with the vector of values every program
//! reaching it computes, one entry per example the automaton ranges over.
//! Values are interned per example column so a state key is a nonterminal
//! plus a vector of small integers.
//!
//! Construction applies the term/production rules bottom up, one grammar
//! component at a time in dependency order. Inside a recursive component
//! states are produced level by level: a production whose arguments come
//! from the same component yields a state one level above its highest such
//! argument, and nothing above the height bound is created. Terminal-only
//! and non-recursive productions sit at level 1.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use crate::dsl::{Grammar, NtId, Program};
use crate::error::AutomatonError;
use crate::value::{Env, Value};

/// Index of a state inside one automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(pub u32);

impl State {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The public key of a state: its symbol and value vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId {
    pub symbol: NtId,
    pub values: Vec<Value>,
}

/// What a transition applies: a leaf rule or a production, by index into
/// the grammar's rule lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Leaf(u32),
    Prod(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub label: Label,
    pub args: Box<[State]>,
    pub target: State,
}

/// Interned values of one example column.
#[derive(Debug, Clone, Default)]
pub(crate) struct Column {
    pub(crate) values: Vec<Value>,
    index: HashMap<Value, u32>,
    // character length of string values, 0 otherwise
    lens: Vec<u32>,
}

impl Column {
    fn intern(&mut self, v: Value) -> u32 {
        if let Some(&id) = self.index.get(&v) {
            return id;
        }
        let id = self.values.len() as u32;
        self.lens.push(v.char_len().unwrap_or(0) as u32);
        self.values.push(v.clone());
        self.index.insert(v, id);
        id
    }

    fn lookup(&self, v: &Value) -> Option<u32> {
        self.index.get(v).copied()
    }
}

type Key = (NtId, Box<[u32]>);
type TransitionIndex = HashMap<(Label, Box<[State]>), State>;

/// Knobs of automaton construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Bounded scope height, at least 1.
    pub height: usize,
    /// A start-symbol string state is only created when every entry is at
    /// most `len(output) + slack` characters; `None` disables the check.
    pub len_slack: Option<usize>,
    pub deadline: Option<Instant>,
}

impl BuildOptions {
    pub fn new(height: usize) -> Self {
        BuildOptions {
            height,
            len_slack: Some(1),
            deadline: None,
        }
    }

    pub fn with_len_slack(mut self, slack: Option<usize>) -> Self {
        self.len_slack = slack;
        self
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }
}

/// A concrete finite tree automaton `(Q, F, Q_f, Δ)`.
#[derive(Debug, Clone)]
pub struct Cfta {
    grammar: Arc<Grammar>,
    pub(crate) columns: Vec<Column>,
    keys: Vec<Key>,
    index: HashMap<Key, State>,
    heights: Vec<u32>,
    transitions: Vec<Transition>,
    accepting: BTreeSet<State>,
    height_bound: usize,
    lookup: OnceLock<TransitionIndex>,
}

impl Cfta {
    fn empty(grammar: Arc<Grammar>, width: usize, height_bound: usize) -> Self {
        Cfta {
            grammar,
            columns: vec![Column::default(); width],
            keys: Vec::new(),
            index: HashMap::new(),
            heights: Vec::new(),
            transitions: Vec::new(),
            accepting: BTreeSet::new(),
            height_bound,
            lookup: OnceLock::new(),
        }
    }

    pub fn grammar(&self) -> &Arc<Grammar> {
        &self.grammar
    }

    /// Number of examples each state's value vector covers.
    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn height_bound(&self) -> usize {
        self.height_bound
    }

    pub fn state_count(&self) -> usize {
        self.keys.len()
    }

    pub fn states(&self) -> impl Iterator<Item = State> {
        (0..self.keys.len() as u32).map(State)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn accepting(&self) -> &BTreeSet<State> {
        &self.accepting
    }

    pub fn is_accepting(&self, q: State) -> bool {
        self.accepting.contains(&q)
    }

    pub fn symbol(&self, q: State) -> NtId {
        self.keys[q.index()].0
    }

    /// Minimal scope height at which `q` was derived.
    pub fn height(&self, q: State) -> usize {
        self.heights[q.index()] as usize
    }

    pub fn value(&self, q: State, example: usize) -> &Value {
        &self.columns[example].values[self.keys[q.index()].1[example] as usize]
    }

    pub fn values(&self, q: State) -> Vec<Value> {
        (0..self.width()).map(|i| self.value(q, i).clone()).collect()
    }

    pub fn state_id(&self, q: State) -> StateId {
        StateId {
            symbol: self.symbol(q),
            values: self.values(q),
        }
    }

    /// Finds the state with the given key.
    pub fn find(&self, id: &StateId) -> Option<State> {
        if id.values.len() != self.width() {
            return None;
        }
        let ids = id
            .values
            .iter()
            .zip(&self.columns)
            .map(|(v, c)| c.lookup(v))
            .collect::<Option<Box<[u32]>>>()?;
        self.index.get(&(id.symbol, ids)).copied()
    }

    pub(crate) fn value_ids(&self, q: State) -> &[u32] {
        &self.keys[q.index()].1
    }

    pub(crate) fn set_accepting(&mut self, accepting: BTreeSet<State>) {
        self.accepting = accepting;
    }

    /// The name of the terminal or builtin a transition applies.
    pub fn label_name(&self, label: Label) -> &str {
        match label {
            Label::Leaf(i) => {
                let rule = self.grammar.leaves()[i as usize];
                &self.grammar.terminal(rule.terminal).name
            }
            Label::Prod(i) => {
                let prod = &self.grammar.productions()[i as usize];
                &self.grammar.builtin(prod.func).name
            }
        }
    }

    fn add_state(&mut self, key: Key, height: u32) -> State {
        if let Some(&q) = self.index.get(&key) {
            return q;
        }
        let q = State(self.keys.len() as u32);
        self.keys.push(key.clone());
        self.index.insert(key, q);
        self.heights.push(height);
        q
    }

    fn transition_index(&self) -> &TransitionIndex {
        self.lookup.get_or_init(|| {
            self.transitions
                .iter()
                .map(|t| ((t.label, t.args.clone()), t.target))
                .collect()
        })
    }

    /// States `p` can be rewritten to, bottom up.
    pub fn run(&self, p: &Program) -> BTreeSet<State> {
        let g = &*self.grammar;
        let index = self.transition_index();
        match p {
            Program::Leaf(name) => {
                let Some(t) = g.lookup_terminal(name) else {
                    return BTreeSet::new();
                };
                g.leaves()
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| r.terminal == t)
                    .filter_map(|(i, _)| index.get(&(Label::Leaf(i as u32), Box::from([]))))
                    .copied()
                    .collect()
            }
            Program::Node(name, children) => {
                let Some(f) = g.lookup_builtin(name) else {
                    return BTreeSet::new();
                };
                let reached: Vec<Vec<State>> = children
                    .iter()
                    .map(|c| self.run(c).into_iter().collect())
                    .collect();
                let mut out = BTreeSet::new();
                for (i, prod) in g.productions().iter().enumerate() {
                    if prod.func != f || prod.args.len() != children.len() {
                        continue;
                    }
                    let candidates: Vec<Vec<State>> = reached
                        .iter()
                        .zip(&prod.args)
                        .map(|(qs, &nt)| qs.iter().copied().filter(|&q| self.symbol(q) == nt).collect())
                        .collect();
                    for_each_combination(&candidates, |args| {
                        if let Some(&q) = index.get(&(Label::Prod(i as u32), Box::from(args))) {
                            out.insert(q);
                        }
                        true
                    });
                }
                out
            }
        }
    }

    /// Whether `p` rewrites to an accepting state.
    pub fn accepts(&self, p: &Program) -> bool {
        self.run(p).iter().any(|q| self.is_accepting(*q))
    }

    /// The automaton with the same states and transitions accepting only
    /// the given states.
    pub fn with_accepting(&self, accepting: BTreeSet<State>) -> Cfta {
        let mut a = self.clone();
        a.accepting = accepting;
        a
    }

    /// Accepted programs of at most `max_size` nodes, ordered by size then
    /// text, truncated to `max_count`.
    pub fn enumerate_accepted(&self, max_size: usize, max_count: usize) -> Vec<Program> {
        let n = self.state_count();
        // by_size[s][q]: programs of exactly s nodes reaching q
        let mut by_size: Vec<Vec<Vec<Program>>> = vec![vec![Vec::new(); n]; max_size + 1];
        for size in 1..=max_size {
            for t in &self.transitions {
                let name = self.label_name(t.label).to_string();
                if t.args.is_empty() {
                    if size == 1 {
                        by_size[1][t.target.index()].push(Program::Leaf(name));
                    }
                    continue;
                }
                if size < 1 + t.args.len() {
                    continue;
                }
                let mut made = Vec::new();
                for split in compositions(size - 1, t.args.len()) {
                    let parts: Vec<&Vec<Program>> = t
                        .args
                        .iter()
                        .zip(&split)
                        .map(|(q, &s)| &by_size[s][q.index()])
                        .collect();
                    if parts.iter().any(|p| p.is_empty()) {
                        continue;
                    }
                    let mut idx = vec![0; parts.len()];
                    loop {
                        let children = parts.iter().zip(&idx).map(|(p, &i)| p[i].clone()).collect();
                        made.push(Program::Node(name.clone(), children));
                        if !advance(&mut idx, |j| parts[j].len()) {
                            break;
                        }
                    }
                }
                by_size[size][t.target.index()].extend(made);
            }
        }
        let mut out: Vec<(usize, String, Program)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (size, level) in by_size.iter().enumerate() {
            for q in &self.accepting {
                for p in &level[q.index()] {
                    if seen.insert(p.clone()) {
                        out.push((size, p.to_string(), p.clone()));
                    }
                }
            }
        }
        out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        out.into_iter().take(max_count).map(|(_, _, p)| p).collect()
    }

    /// One line per transition, `f(q1, .., qk) -> q`, states written as
    /// `symbol:[v1, ..]`, followed by the accepting states.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for t in &self.transitions {
            let args: Vec<String> = t.args.iter().map(|q| self.render_state(*q)).collect();
            let _ = writeln!(
                out,
                "{}({}) -> {}",
                self.label_name(t.label),
                args.join(", "),
                self.render_state(t.target)
            );
        }
        for q in &self.accepting {
            let _ = writeln!(out, "accept {}", self.render_state(*q));
        }
        out
    }

    pub fn render_state(&self, q: State) -> String {
        let vals: Vec<String> = (0..self.width()).map(|i| self.value(q, i).to_string()).collect();
        format!(
            "{}:[{}]",
            self.grammar.nonterminal_name(self.symbol(q)),
            vals.join(", ")
        )
    }

    /// Product automaton of `a` and `b`: states pair a state of each with
    /// equal symbols and concatenated value vectors. Pairs are derived level
    /// by level like a direct construction, so only pairs reachable within
    /// the smaller height bound exist. A pair is accepting when both halves
    /// are.
    pub fn intersect(a: &Cfta, b: &Cfta) -> Result<Cfta, AutomatonError> {
        Self::intersect_with(a, b, |_, _| true).map(|(c, _)| c)
    }

    /// As [`Cfta::intersect`], also returning the component states of each
    /// product state. `accept` further filters accepting pairs.
    pub(crate) fn intersect_with(
        a: &Cfta,
        b: &Cfta,
        accept: impl Fn(State, State) -> bool,
    ) -> Result<(Cfta, Vec<(State, State)>), AutomatonError> {
        if !Arc::ptr_eq(&a.grammar, &b.grammar) {
            return Err(AutomatonError::GrammarMismatch);
        }
        let g = &*a.grammar;
        let bound = a.height_bound.min(b.height_bound) as u32;
        let mut out = Cfta::empty(a.grammar.clone(), 0, bound as usize);
        out.columns = a.columns.iter().chain(&b.columns).cloned().collect();
        let mut pairs: Vec<(State, State)> = Vec::new();
        let mut pair_index: HashMap<(State, State), State> = HashMap::new();
        // (b state, product state) pairs for each state of a
        let mut partners: Vec<Vec<(State, State)>> = vec![Vec::new(); a.state_count()];
        let b_index = b.transition_index();

        let mut by_lhs: HashMap<NtId, Vec<&Transition>> = HashMap::new();
        for t in &a.transitions {
            by_lhs.entry(a.symbol(t.target)).or_default().push(t);
        }

        for component in g.component_order() {
            let members = |nt: NtId| component.contains(&nt);
            let transitions: Vec<&Transition> = component
                .iter()
                .flat_map(|nt| by_lhs.get(nt).into_iter().flatten().copied())
                .collect();
            for level in 1..=bound {
                let before = out.state_count();
                for t in &transitions {
                    let recursive = match t.label {
                        Label::Leaf(_) => false,
                        Label::Prod(i) => g.is_recursive(i as usize),
                    };
                    if recursive == (level == 1) {
                        continue;
                    }
                    let arg_nts: Vec<NtId> = t.args.iter().map(|q| a.symbol(*q)).collect();
                    let candidates: Vec<Vec<(State, State)>> = t
                        .args
                        .iter()
                        .zip(&arg_nts)
                        .map(|(q, &nt)| {
                            let all = &partners[q.index()];
                            if recursive && members(nt) {
                                all.iter()
                                    .copied()
                                    .filter(|(_, pq)| out.heights[pq.index()] < level)
                                    .collect()
                            } else {
                                all.clone()
                            }
                        })
                        .collect();
                    let mut found = Vec::new();
                    for_each_combination(&candidates, |combo| {
                        if recursive {
                            let top = combo
                                .iter()
                                .zip(&arg_nts)
                                .filter(|(_, nt)| members(**nt))
                                .map(|(c, _)| out.heights[c.1.index()])
                                .max();
                            if top != Some(level - 1) {
                                return true;
                            }
                        }
                        let bargs: Box<[State]> = combo.iter().map(|c| c.0).collect();
                        if let Some(&bt) = b_index.get(&(t.label, bargs)) {
                            found.push((combo.iter().map(|c| c.1).collect::<Box<[State]>>(), bt));
                        }
                        true
                    });
                    for (args, bt) in found {
                        let target = match pair_index.get(&(t.target, bt)) {
                            Some(&q) => q,
                            None => {
                                let mut ids = a.value_ids(t.target).to_vec();
                                ids.extend_from_slice(b.value_ids(bt));
                                let q = out.add_state((a.symbol(t.target), ids.into()), level);
                                pair_index.insert((t.target, bt), q);
                                pairs.push((t.target, bt));
                                partners[t.target.index()].push((bt, q));
                                q
                            }
                        };
                        out.transitions.push(Transition {
                            label: t.label,
                            args,
                            target,
                        });
                    }
                }
                if level > 1 && out.state_count() == before {
                    break;
                }
            }
        }
        out.accepting = pairs
            .iter()
            .enumerate()
            .filter(|(_, (qa, qb))| a.is_accepting(*qa) && b.is_accepting(*qb) && accept(*qa, *qb))
            .map(|(i, _)| State(i as u32))
            .collect();
        Ok((out, pairs))
    }
}

impl fmt::Display for Cfta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

/// Builds the automaton of all programs mapping `env` to `output`.
pub fn build_cfta(
    grammar: &Arc<Grammar>,
    env: &Env,
    output: &Value,
    opts: BuildOptions,
) -> Result<Cfta, AutomatonError> {
    let mut a = construct(grammar, &[env], &[output], opts)?;
    let start = grammar.start();
    let accepting = match a.columns[0].lookup(output) {
        Some(id) => a.index.get(&(start, Box::from([id]))).copied().into_iter().collect(),
        None => BTreeSet::new(),
    };
    a.accepting = accepting;
    Ok(a)
}

/// Applies the term and production rules over all `inputs` at once. No
/// state is accepting yet; `outputs` only feed the length check.
pub(crate) fn construct(
    grammar: &Arc<Grammar>,
    inputs: &[&Env],
    outputs: &[&Value],
    opts: BuildOptions,
) -> Result<Cfta, AutomatonError> {
    if opts.height == 0 {
        return Err(AutomatonError::ZeroHeight);
    }
    Builder::new(grammar, inputs, outputs, opts).run()
}

struct Builder<'a> {
    g: &'a Grammar,
    inputs: &'a [&'a Env],
    // per-example length limit for start-symbol strings
    limits: Option<Vec<usize>>,
    opts: BuildOptions,
    a: Cfta,
    by_symbol: Vec<Vec<State>>,
    ticks: u64,
}

impl<'a> Builder<'a> {
    fn new(grammar: &'a Arc<Grammar>, inputs: &'a [&'a Env], outputs: &[&Value], opts: BuildOptions) -> Self {
        let limits = opts.len_slack.map(|slack| {
            outputs
                .iter()
                .map(|o| o.char_len().map_or(usize::MAX, |l| l + slack))
                .collect()
        });
        let nts = grammar.nonterminals().count();
        Builder {
            g: grammar,
            inputs,
            limits,
            opts,
            a: Cfta::empty(grammar.clone(), inputs.len(), opts.height),
            by_symbol: vec![Vec::new(); nts],
            ticks: 0,
        }
    }

    fn run(mut self) -> Result<Cfta, AutomatonError> {
        let g = self.g;
        for component in g.component_order() {
            let members = |nt: NtId| component.contains(&nt);

            for (i, rule) in g.leaves().iter().enumerate() {
                if !members(rule.lhs) {
                    continue;
                }
                let terminal = g.terminal(rule.terminal);
                let mut ids = Vec::with_capacity(self.inputs.len());
                for (col, env) in self.a.columns.iter_mut().zip(self.inputs) {
                    ids.push(col.intern(terminal.eval(env)?));
                }
                self.emit(Label::Leaf(i as u32), rule.lhs, Vec::new(), ids, 1);
            }

            for (i, prod) in g.productions().iter().enumerate() {
                if !members(prod.lhs) || g.is_recursive(i) {
                    continue;
                }
                let candidates: Vec<Vec<State>> =
                    prod.args.iter().map(|a| self.by_symbol[a.index()].clone()).collect();
                self.apply(i, &candidates, 1)?;
            }

            for level in 2..=self.opts.height as u32 {
                let before = self.a.state_count();
                let transitions_before = self.a.transitions.len();
                for (i, prod) in g.productions().iter().enumerate() {
                    if !members(prod.lhs) || !g.is_recursive(i) {
                        continue;
                    }
                    // semi-naive split: argument `fresh` takes states of
                    // height exactly level-1, earlier recursive arguments
                    // strictly lower, later ones up to level-1
                    for fresh in 0..prod.args.len() {
                        if !members(prod.args[fresh]) {
                            continue;
                        }
                        let candidates: Vec<Vec<State>> = prod
                            .args
                            .iter()
                            .enumerate()
                            .map(|(j, &nt)| {
                                let all = &self.by_symbol[nt.index()];
                                if !members(nt) {
                                    return all.clone();
                                }
                                all.iter()
                                    .copied()
                                    .filter(|&q| {
                                        let h = self.a.heights[q.index()];
                                        match j.cmp(&fresh) {
                                            std::cmp::Ordering::Less => h < level - 1,
                                            std::cmp::Ordering::Equal => h == level - 1,
                                            std::cmp::Ordering::Greater => h < level,
                                        }
                                    })
                                    .collect()
                            })
                            .collect();
                        self.apply(i, &candidates, level)?;
                    }
                }
                if self.a.state_count() == before && self.a.transitions.len() == transitions_before {
                    break;
                }
            }
        }
        Ok(self.a)
    }

    fn emit(&mut self, label: Label, lhs: NtId, args: Vec<State>, ids: Vec<u32>, level: u32) {
        let fresh = !self.a.index.contains_key(&(lhs, ids.as_slice().into()));
        let target = self.a.add_state((lhs, ids.into()), level);
        if fresh {
            self.by_symbol[lhs.index()].push(target);
        }
        self.a.transitions.push(Transition {
            label,
            args: args.into(),
            target,
        });
    }

    fn check_deadline(&self) -> Result<(), AutomatonError> {
        match self.opts.deadline {
            Some(deadline) if Instant::now() >= deadline => Err(AutomatonError::Timeout),
            _ => Ok(()),
        }
    }

    fn apply(&mut self, prod_index: usize, candidates: &[Vec<State>], level: u32) -> Result<(), AutomatonError> {
        if candidates.iter().any(|c| c.is_empty()) {
            return Ok(());
        }
        let g = self.g;
        let prod = &g.productions()[prod_index];
        let builtin = g.builtin(prod.func);
        self.check_deadline()?;
        let check_len = prod.lhs == g.start() && self.limits.is_some();
        let width = self.inputs.len();

        let mut idx = vec![0usize; candidates.len()];
        let mut arg_states = vec![State(0); candidates.len()];
        let mut lens = vec![0usize; candidates.len()];
        let mut ids = Vec::with_capacity(width);
        loop {
            self.ticks += 1;
            if self.ticks.is_multiple_of(4096) {
                self.check_deadline()?;
            }
            for (j, c) in candidates.iter().enumerate() {
                arg_states[j] = c[idx[j]];
            }

            ids.clear();
            let mut defined = true;
            for ex in 0..width {
                let col = &self.a.columns[ex];
                if check_len {
                    for (j, q) in arg_states.iter().enumerate() {
                        lens[j] = col.lens[self.a.keys[q.index()].1[ex] as usize] as usize;
                    }
                    if let Some(len) = builtin.result_length(&lens) {
                        if len > self.limits.as_ref().unwrap()[ex] {
                            defined = false;
                            break;
                        }
                    }
                }
                let args: Vec<&Value> = arg_states
                    .iter()
                    .map(|q| &col.values[self.a.keys[q.index()].1[ex] as usize])
                    .collect();
                let Some(v) = builtin.apply(&args) else {
                    defined = false;
                    break;
                };
                if check_len {
                    if let Some(l) = v.char_len() {
                        if l > self.limits.as_ref().unwrap()[ex] {
                            defined = false;
                            break;
                        }
                    }
                }
                ids.push(self.a.columns[ex].intern(v));
            }
            if defined {
                let args = arg_states.clone();
                self.emit(Label::Prod(prod_index as u32), prod.lhs, args, ids.clone(), level);
            }
            if !advance(&mut idx, |j| candidates[j].len()) {
                return Ok(());
            }
        }
    }
}

/// Odometer increment; false once every combination has been visited.
fn advance(idx: &mut [usize], len: impl Fn(usize) -> usize) -> bool {
    for j in (0..idx.len()).rev() {
        idx[j] += 1;
        if idx[j] < len(j) {
            return true;
        }
        idx[j] = 0;
    }
    false
}

/// Calls `f` on every element of the cartesian product; stops when `f`
/// returns false. The empty product has one (empty) element.
fn for_each_combination<T: Copy>(lists: &[Vec<T>], mut f: impl FnMut(&[T]) -> bool) {
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let mut idx = vec![0; lists.len()];
    let mut buf: Vec<T> = lists.iter().map(|l| l[0]).collect();
    loop {
        for (j, l) in lists.iter().enumerate() {
            buf[j] = l[idx[j]];
        }
        if !f(&buf) {
            return;
        }
        if !advance(&mut idx, |j| lists[j].len()) {
            return;
        }
    }
}

/// Ordered ways to write `total` as `parts` positive summands.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if parts == 1 {
        return if total >= 1 { vec![vec![total]] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
