//! State-weighted finite tree automata: every start-symbol state accepts
//! and carries the loss of its value vector.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::cfta::{self, BuildOptions, Cfta, State, StateId};
use crate::dsl::Grammar;
use crate::error::AutomatonError;
use crate::loss::{DataSet, PerExampleLoss};
use crate::value::{Env, Value, Weight};

#[derive(Debug, Clone)]
pub struct Sfta {
    pub base: Cfta,
    weights: BTreeMap<State, Weight>,
}

impl Sfta {
    /// Weight of an accepting state.
    pub fn weight(&self, q: State) -> Option<Weight> {
        self.weights.get(&q).copied()
    }

    pub fn weight_of(&self, id: &StateId) -> Option<Weight> {
        self.base.find(id).and_then(|q| self.weight(q))
    }

    pub fn weights(&self) -> &BTreeMap<State, Weight> {
        &self.weights
    }

    pub fn accepting(&self) -> &BTreeSet<State> {
        self.base.accepting()
    }

    pub fn state_count(&self) -> usize {
        self.base.state_count()
    }

    /// Number of accepting states per weight, ascending.
    pub fn weight_histogram(&self) -> Vec<(Weight, usize)> {
        let mut h: BTreeMap<Weight, usize> = BTreeMap::new();
        for w in self.weights.values() {
            *h.entry(*w).or_default() += 1;
        }
        h.into_iter().collect()
    }

    /// Sorted accepting weights.
    pub fn weight_multiset(&self) -> Vec<Weight> {
        let mut ws: Vec<Weight> = self.weights.values().copied().collect();
        ws.sort();
        ws
    }

    fn from_parts(mut base: Cfta, weights: BTreeMap<State, Weight>) -> Sfta {
        base.set_accepting(weights.keys().copied().collect());
        Sfta { base, weights }
    }
}

fn weigh_start_states(
    base: Cfta,
    outputs: &[&Value],
    loss: &PerExampleLoss,
) -> Result<Sfta, AutomatonError> {
    let start = base.grammar().start();
    // per column, loss of each interned value
    let mut memo: Vec<HashMap<u32, Weight>> = vec![HashMap::new(); outputs.len()];
    let mut weights = BTreeMap::new();
    for q in base.states().filter(|&q| base.symbol(q) == start) {
        let mut total = Weight::ZERO;
        for (col, &id) in base.value_ids(q).iter().enumerate() {
            let w = match memo[col].get(&id) {
                Some(w) => *w,
                None => {
                    let w = loss.eval(outputs[col], base.value(q, col))?;
                    memo[col].insert(id, w);
                    w
                }
            };
            total += w;
        }
        weights.insert(q, total);
    }
    Ok(Sfta::from_parts(base, weights))
}

/// The automaton of all bounded programs, each start state weighted by
/// `L(output, value)`.
pub fn build_sfta(
    grammar: &Arc<Grammar>,
    env: &Env,
    output: &Value,
    loss: &PerExampleLoss,
    opts: BuildOptions,
) -> Result<Sfta, AutomatonError> {
    let base = cfta::construct(grammar, &[env], &[output], opts)?;
    weigh_start_states(base, &[output], loss)
}

/// Builds the dataset automaton directly over value vectors, weighting each
/// start state by the dataset loss. Repeated examples are dropped first for
/// the 0/∞ loss.
pub fn build_sfta_dataset(
    grammar: &Arc<Grammar>,
    data: &DataSet,
    loss: &PerExampleLoss,
    opts: BuildOptions,
) -> Result<Sfta, AutomatonError> {
    if data.is_empty() {
        return Err(AutomatonError::EmptyDataset);
    }
    let data = effective_data(data, loss);
    let inputs: Vec<&Env> = data.iter().map(|e| &e.input).collect();
    let outputs: Vec<&Value> = data.outputs().collect();
    let base = cfta::construct(grammar, &inputs, &outputs, opts)?;
    weigh_start_states(base, &outputs, loss)
}

/// The examples an automaton for `loss` ranges over.
pub fn effective_data(data: &DataSet, loss: &PerExampleLoss) -> DataSet {
    if loss.is_zero_inf() {
        data.dedup()
    } else {
        data.clone()
    }
}

/// Product of two weighted automata, summing weights.
pub fn plus_intersect(a: &Sfta, b: &Sfta) -> Result<Sfta, AutomatonError> {
    let (base, pairs) = Cfta::intersect_with(&a.base, &b.base, |_, _| true)?;
    let weights = base
        .accepting()
        .iter()
        .map(|&q| {
            let (qa, qb) = pairs[q.index()];
            (q, a.weights[&qa] + b.weights[&qb])
        })
        .collect();
    Ok(Sfta::from_parts(base, weights))
}

/// Folds [`plus_intersect`] over per-example automata.
pub fn fold_examples(
    grammar: &Arc<Grammar>,
    data: &DataSet,
    loss: &PerExampleLoss,
    opts: BuildOptions,
) -> Result<Sfta, AutomatonError> {
    let data = effective_data(data, loss);
    let mut acc: Option<Sfta> = None;
    for e in &data {
        let s = build_sfta(grammar, &e.input, &e.output, loss, opts)?;
        acc = Some(match acc {
            None => s,
            Some(prev) => plus_intersect(&prev, &s)?,
        });
    }
    acc.ok_or(AutomatonError::EmptyDataset)
}

/// Restricts `a` to programs also accepted by `c`, keeping `a`'s weights.
pub fn slash_intersect(a: &Sfta, c: &Cfta) -> Result<Sfta, AutomatonError> {
    let (base, pairs) = Cfta::intersect_with(&a.base, c, |_, _| true)?;
    let weights = base
        .accepting()
        .iter()
        .map(|&q| (q, a.weights[&pairs[q.index()].0]))
        .collect();
    Ok(Sfta::from_parts(base, weights))
}

/// Drops accepting states weighing more than `w0`.
pub fn prune(a: &Sfta, w0: Weight) -> Sfta {
    let weights: BTreeMap<State, Weight> = a
        .weights
        .iter()
        .filter(|(_, w)| within(**w, w0))
        .map(|(q, w)| (*q, *w))
        .collect();
    Sfta::from_parts(a.base.clone(), weights)
}

/// `w ≤ bound`, tolerating rounding in summed weights.
pub fn within(w: Weight, bound: Weight) -> bool {
    w <= bound || w.approx_eq(bound)
}

/// The automaton accepting exactly the programs of `q`.
pub fn select(a: &Sfta, q: State) -> Result<Cfta, AutomatonError> {
    if !a.weights.contains_key(&q) {
        return Err(AutomatonError::NotAccepting);
    }
    Ok(a.base.with_accepting(BTreeSet::from([q])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{toy_grammar, Program};
    use crate::loss::Example;

    fn toy() -> Arc<Grammar> {
        Arc::new(toy_grammar())
    }

    fn x(v: i64) -> Env {
        Env::with("x", Value::Int(v))
    }

    fn worked_example(loss: &PerExampleLoss) -> Sfta {
        build_sfta(&toy(), &x(1), &Value::Int(9), loss, BuildOptions::new(3)).unwrap()
    }

    fn table(a: &Sfta) -> Vec<(i64, Weight)> {
        let mut t: Vec<(i64, Weight)> = a
            .weights()
            .iter()
            .map(|(q, w)| (a.base.value(*q, 0).as_int().unwrap(), *w))
            .collect();
        t.sort();
        t
    }

    fn w(x: f64) -> Weight {
        Weight::finite(x)
    }

    #[test]
    fn squared_loss_weights() {
        let expected: Vec<(i64, Weight)> = [(1, 64.), (2, 49.), (3, 36.), (4, 25.), (5, 16.), (6, 9.), (7, 4.), (8, 1.), (9, 0.), (12, 9.)]
            .into_iter()
            .map(|(v, l)| (v, w(l)))
            .collect();
        assert_eq!(table(&worked_example(&PerExampleLoss::squared())), expected);
    }

    #[test]
    fn zero_one_and_zero_inf_weights() {
        for (v, wt) in table(&worked_example(&PerExampleLoss::zero_one())) {
            assert_eq!(wt, if v == 9 { w(0.) } else { w(1.) });
        }
        for (v, wt) in table(&worked_example(&PerExampleLoss::zero_inf())) {
            assert_eq!(wt, if v == 9 { w(0.) } else { Weight::Infinity });
        }
    }

    #[test]
    fn prune_keeps_weights_at_most_bound() {
        let a = worked_example(&PerExampleLoss::squared());
        let kept: Vec<i64> = table(&prune(&a, w(9.))).into_iter().map(|(v, _)| v).collect();
        assert_eq!(kept, [6, 7, 8, 9, 12]);
        assert_eq!(prune(&a, Weight::Infinity).weights(), a.weights());
        assert_eq!(table(&prune(&a, Weight::ZERO)), [(9, w(0.))]);
        assert_eq!(prune(&a, w(9.)).state_count(), a.state_count());
    }

    #[test]
    fn selection() {
        let g = toy();
        let a = worked_example(&PerExampleLoss::squared());
        let q9 = a.base.find(&StateId { symbol: g.start(), values: vec![Value::Int(9)] }).unwrap();
        let sel = select(&a, q9).unwrap();
        let p = |s: &str| Program::parse(s, a.base.grammar()).unwrap();
        assert!(sel.accepts(&p("(× (+ x 2) 3)")));
        assert!(!sel.accepts(&p("(+ x 2)")));
        let t2 = a.base.states().find(|&q| a.base.symbol(q) != g.start()).unwrap();
        assert_eq!(select(&a, t2).unwrap_err(), AutomatonError::NotAccepting);
    }

    #[test]
    fn plus_intersection_sums() {
        let g = toy();
        let l = PerExampleLoss::squared();
        let a = build_sfta(&g, &x(1), &Value::Int(9), &l, BuildOptions::new(3)).unwrap();
        let b = build_sfta(&g, &x(1), &Value::Int(11), &l, BuildOptions::new(3)).unwrap();
        let c = plus_intersect(&a, &b).unwrap();
        let nine = StateId { symbol: g.start(), values: vec![Value::Int(9), Value::Int(9)] };
        assert_eq!(c.weight_of(&nine), Some(w(4.)));

        let z = PerExampleLoss::zero_inf();
        let a = build_sfta(&g, &x(1), &Value::Int(9), &z, BuildOptions::new(3)).unwrap();
        let c = plus_intersect(&a, &a).unwrap();
        let two = StateId { symbol: g.start(), values: vec![Value::Int(3), Value::Int(3)] };
        assert_eq!(c.weight_of(&two), Some(Weight::Infinity));
    }

    #[test]
    fn two_example_dataset() {
        let g = toy();
        let data: DataSet = [(1, 9), (2, 12)]
            .into_iter()
            .map(|(i, o)| Example::new(x(i), Value::Int(o)))
            .collect();
        let l = PerExampleLoss::zero_one();
        let a = build_sfta_dataset(&g, &data, &l, BuildOptions::new(3)).unwrap();
        let p = Program::parse("(× (+ x 2) 3)", &g).unwrap();
        let reached: Vec<State> = a.base.run(&p).into_iter().collect();
        assert_eq!(reached.len(), 1);
        assert_eq!(a.weight(reached[0]), Some(Weight::ZERO));
        assert_eq!(a.weight_multiset()[0], Weight::ZERO);

        let fold = fold_examples(&g, &data, &l, BuildOptions::new(3)).unwrap();
        assert_eq!(fold.weight_multiset(), a.weight_multiset());
        assert_eq!(fold.state_count(), a.state_count());
    }

    #[test]
    fn unsatisfiable_zero_inf_dataset() {
        let g = toy();
        // 2 on x=1 needs a shrinking operation, which the grammar lacks
        let data: DataSet = [(1, 9), (1, 2)]
            .into_iter()
            .map(|(i, o)| Example::new(x(i), Value::Int(o)))
            .collect();
        let a = build_sfta_dataset(&g, &data, &PerExampleLoss::zero_inf(), BuildOptions::new(3)).unwrap();
        assert!(a.weights().values().all(|w| *w == Weight::Infinity));
    }

    #[test]
    fn zero_inf_drops_duplicates() {
        let g = toy();
        let data: DataSet = [(1, 9), (1, 9)]
            .into_iter()
            .map(|(i, o)| Example::new(x(i), Value::Int(o)))
            .collect();
        let a = build_sfta_dataset(&g, &data, &PerExampleLoss::zero_inf(), BuildOptions::new(3)).unwrap();
        assert_eq!(a.base.width(), 1);
        let b = build_sfta_dataset(&g, &data, &PerExampleLoss::zero_one(), BuildOptions::new(3)).unwrap();
        assert_eq!(b.base.width(), 2);
        assert_eq!(
            build_sfta_dataset(&g, &DataSet::default(), &PerExampleLoss::zero_one(), BuildOptions::new(3))
                .unwrap_err(),
            AutomatonError::EmptyDataset
        );
    }

    #[test]
    fn slash_intersection_keeps_left_weights() {
        let g = toy();
        let l = PerExampleLoss::squared();
        let a = build_sfta(&g, &x(1), &Value::Int(9), &l, BuildOptions::new(3)).unwrap();
        // full language over the same input
        let full = a.base.with_accepting(a.accepting().clone());
        let s = slash_intersect(&a, &full).unwrap();
        assert_eq!(s.weight_multiset(), a.weight_multiset());
        let empty = build_cfta_for(&g, 100);
        assert!(slash_intersect(&a, &empty).unwrap().accepting().is_empty());
        // trusted example x=2 -> 12 leaves programs correct on it
        let trusted = build_cfta_for_input(&g, 2, 12);
        let s = slash_intersect(&a, &trusted).unwrap();
        for q in s.accepting() {
            assert_eq!(s.base.value(*q, 1), &Value::Int(12));
        }
        assert!(!s.accepting().is_empty());
    }

    fn build_cfta_for(g: &Arc<Grammar>, out: i64) -> Cfta {
        build_cfta_for_input(g, 1, out)
    }

    fn build_cfta_for_input(g: &Arc<Grammar>, input: i64, out: i64) -> Cfta {
        cfta::build_cfta(g, &x(input), &Value::Int(out), BuildOptions::new(3)).unwrap()
    }
}
