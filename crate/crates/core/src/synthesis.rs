//! Minimum-cost program extraction and objective-driven selection.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::sync::Arc;

use crate::cfta::{BuildOptions, Cfta, Label, State, StateId};
use crate::dsl::{Grammar, Program};
use crate::error::{CostError, SynthError};
use crate::loss::{DataSet, PerExampleLoss};
use crate::objective::{CostTable, Objective, ObjectiveValue};
use crate::sfta::{self, Sfta};
use crate::value::{Weight, WEIGHT_EPSILON};

/// A synthesis problem: grammar, examples, loss, complexity and bound.
#[derive(Debug, Clone, Copy)]
pub struct Task<'a> {
    pub grammar: &'a Arc<Grammar>,
    pub data: &'a DataSet,
    pub loss: &'a PerExampleLoss,
    pub costs: &'a CostTable,
    pub options: BuildOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub program: Program,
    pub loss: Weight,
    pub complexity: Weight,
    pub objective: ObjectiveValue,
    pub chosen_state: StateId,
    pub sfta_state_count: usize,
}

/// Cheapest derivation of every state: its cost and the transition
/// achieving it. Programs are rebuilt on demand.
#[derive(Debug, Clone)]
pub struct MinCost<'a> {
    automaton: &'a Cfta,
    best: Vec<Option<(f64, usize)>>,
}

impl<'a> MinCost<'a> {
    /// Knuth's generalisation of Dijkstra's algorithm to hypergraphs; a
    /// transition costs its label's cost plus its children's.
    pub fn compute(a: &'a Cfta, costs: &CostTable) -> Result<Self, CostError> {
        let n = a.state_count();
        let transitions = a.transitions();
        let mut label_cost: HashMap<Label, f64> = HashMap::new();
        for t in transitions {
            if let std::collections::hash_map::Entry::Vacant(e) = label_cost.entry(t.label) {
                e.insert(costs.symbol_cost(a.label_name(t.label))?);
            }
        }
        // transitions (with multiplicity) waiting on each state
        let mut users: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut pending: Vec<u8> = Vec::with_capacity(transitions.len());
        for (i, t) in transitions.iter().enumerate() {
            for q in t.args.iter() {
                users[q.index()].push(i as u32);
            }
            pending.push(t.args.len() as u8);
        }
        let mut best: Vec<Option<(f64, usize)>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap: BinaryHeap<Reverse<(Weight, State)>> = BinaryHeap::new();

        let offer = |best: &mut Vec<Option<(f64, usize)>>, heap: &mut BinaryHeap<_>, ti: usize, cost: f64| {
            let target = transitions[ti].target;
            let better = match best[target.index()] {
                None => true,
                Some((c, _)) => cost < c - WEIGHT_EPSILON * (1.0 + c.abs()),
            };
            if better {
                best[target.index()] = Some((cost, ti));
                heap.push(Reverse((Weight::finite(cost), target)));
            }
        };

        for (i, t) in transitions.iter().enumerate() {
            if t.args.is_empty() {
                offer(&mut best, &mut heap, i, label_cost[&t.label]);
            }
        }
        while let Some(Reverse((_, q))) = heap.pop() {
            if done[q.index()] {
                continue;
            }
            done[q.index()] = true;
            for &ti in &users[q.index()] {
                let ti = ti as usize;
                pending[ti] -= 1;
                if pending[ti] == 0 {
                    let t = &transitions[ti];
                    if done[t.target.index()] {
                        continue;
                    }
                    let cost = label_cost[&t.label]
                        + t.args.iter().map(|c| best[c.index()].unwrap().0).sum::<f64>();
                    offer(&mut best, &mut heap, ti, cost);
                }
            }
        }
        Ok(MinCost { automaton: a, best })
    }

    /// Cost of the cheapest program reaching `q`, if any reaches it.
    pub fn cost(&self, q: State) -> Option<Weight> {
        self.best[q.index()].map(|(c, _)| Weight::finite(c))
    }

    pub fn program(&self, q: State) -> Option<Program> {
        let (_, ti) = self.best[q.index()]?;
        let t = &self.automaton.transitions()[ti];
        let name = self.automaton.label_name(t.label).to_string();
        Some(if t.args.is_empty() {
            Program::Leaf(name)
        } else {
            let children = t.args.iter().map(|c| self.program(*c).expect("child reachable")).collect();
            Program::Node(name, children)
        })
    }
}

/// Cheapest program of every accepting state of `a`.
pub fn min_cost_per_state(a: &Cfta, costs: &CostTable) -> Result<BTreeMap<State, (Program, Weight)>, CostError> {
    let m = MinCost::compute(a, costs)?;
    Ok(a.accepting()
        .iter()
        .filter_map(|&q| Some((q, (m.program(q)?, m.cost(q)?))))
        .collect())
}

#[derive(Clone, Copy)]
struct Candidate {
    state: State,
    loss: Weight,
    complexity: Weight,
    objective: ObjectiveValue,
}

fn approx_cmp(a: Weight, b: Weight) -> Ordering {
    if a.approx_eq(b) {
        Ordering::Equal
    } else {
        a.cmp(&b)
    }
}

/// Minimum under `order`, remaining ties broken by program text. Programs
/// are only rebuilt for the tied states.
fn pick(
    a: &Sfta,
    costs: &CostTable,
    score: impl Fn(Weight, Weight) -> ObjectiveValue,
    order: impl Fn(&Candidate, &Candidate) -> Ordering,
) -> Result<Option<SynthesisResult>, SynthError> {
    let m = MinCost::compute(&a.base, costs)?;
    let candidates: Vec<Candidate> = a
        .weights()
        .iter()
        .filter_map(|(&q, &loss)| {
            let complexity = m.cost(q)?;
            Some(Candidate {
                state: q,
                loss,
                complexity,
                objective: score(loss, complexity),
            })
        })
        .collect();
    let Some(best) = candidates.iter().copied().reduce(|b, c| if order(&c, &b) == Ordering::Less { c } else { b }) else {
        return Ok(None);
    };
    let (c, program) = candidates
        .iter()
        .filter(|c| order(c, &best) == Ordering::Equal)
        .map(|c| (*c, m.program(c.state).expect("reachable")))
        .min_by_key(|(_, p)| p.to_string())
        .expect("best is among the candidates");
    Ok(Some(SynthesisResult {
        chosen_state: a.base.state_id(c.state),
        program,
        loss: c.loss,
        complexity: c.complexity,
        objective: c.objective,
        sfta_state_count: a.state_count(),
    }))
}

/// Picks the accepting state minimising `U(w(q), C(p_q))`; ties go to
/// smaller complexity, then the smaller program text.
pub fn select_best(a: &Sfta, costs: &CostTable, objective: &Objective) -> Result<SynthesisResult, SynthError> {
    if cfg!(debug_assertions) {
        if let Objective::Custom { .. } = objective {
            let losses: Vec<Weight> = a.weight_histogram().into_iter().map(|(w, _)| w).collect();
            objective.check_monotone(&losses)?;
        }
    }
    pick(
        a,
        costs,
        |l, c| objective.eval(l, c),
        |x, y| {
            x.objective
                .cmp_approx(&y.objective)
                .then_with(|| approx_cmp(x.complexity, y.complexity))
        },
    )?
    .ok_or(SynthError::NoProgram)
}

/// Builds the dataset automaton and returns the program optimising
/// `objective` over all programs within the height bound.
pub fn synthesize(task: &Task, objective: &Objective) -> Result<SynthesisResult, SynthError> {
    let a = dataset_sfta(task)?;
    select_best(&a, task.costs, objective)
}

fn dataset_sfta(task: &Task) -> Result<Sfta, SynthError> {
    if task.data.is_empty() {
        return Err(SynthError::EmptyDataset);
    }
    Ok(sfta::build_sfta_dataset(task.grammar, task.data, task.loss, task.options)?)
}

/// Least complex program with dataset loss at most `bound`. Ties go to the
/// smaller loss, then the smaller program text; the reported objective is
/// the complexity.
pub fn best_for_accuracy(task: &Task, bound: Weight) -> Result<SynthesisResult, SynthError> {
    let a = sfta::prune(&dataset_sfta(task)?, bound);
    pick(
        &a,
        task.costs,
        |_, c| ObjectiveValue::Scalar(c),
        |x, y| {
            approx_cmp(x.complexity, y.complexity)
                .then_with(|| approx_cmp(x.loss, y.loss))
        },
    )?
    .ok_or(SynthError::NoProgramWithinBound(bound))
}

/// Optimises `objective` over the full data among programs whose loss on
/// `trusted` is at most `bound`. Every trusted example must occur in the
/// data.
pub fn forced_accuracy(
    task: &Task,
    trusted: &DataSet,
    objective: &Objective,
    bound: Weight,
) -> Result<SynthesisResult, SynthError> {
    for (i, e) in trusted.iter().enumerate() {
        if !task.data.examples().contains(e) {
            return Err(SynthError::NotSubset(i));
        }
    }
    let full = dataset_sfta(task)?;
    if trusted.is_empty() {
        return select_best(&full, task.costs, objective);
    }
    let constraint = sfta::prune(
        &sfta::build_sfta_dataset(task.grammar, trusted, task.loss, task.options)?,
        bound,
    );
    let a = sfta::slash_intersect(&full, &constraint.base)?;
    match select_best(&a, task.costs, objective) {
        Err(SynthError::NoProgram) => Err(SynthError::NoProgramWithinBound(bound)),
        Ok(mut r) => {
            // report the state over the full data only
            r.chosen_state.values.truncate(full.base.width());
            Ok(r)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfta::build_cfta;
    use crate::dsl::toy_grammar;
    use crate::loss::{dataset_loss, Example};
    use crate::value::{Env, Value};

    fn toy() -> Arc<Grammar> {
        Arc::new(toy_grammar())
    }

    fn data(pairs: &[(i64, i64)]) -> DataSet {
        pairs
            .iter()
            .map(|&(i, o)| Example::new(Env::with("x", Value::Int(i)), Value::Int(o)))
            .collect()
    }

    fn w(x: f64) -> Weight {
        Weight::finite(x)
    }

    fn task<'a>(g: &'a Arc<Grammar>, d: &'a DataSet, l: &'a PerExampleLoss, c: &'a CostTable) -> Task<'a> {
        Task {
            grammar: g,
            data: d,
            loss: l,
            costs: c,
            options: BuildOptions::new(3),
        }
    }

    #[test]
    fn min_cost_on_worked_example() {
        let g = toy();
        let a = sfta::build_sfta(&g, &Env::with("x", Value::Int(1)), &Value::Int(9), &PerExampleLoss::squared(), BuildOptions::new(3)).unwrap();
        let m = min_cost_per_state(&a.base, &CostTable::unit()).unwrap();
        let by_value: BTreeMap<i64, (String, Weight)> = m
            .iter()
            .map(|(q, (p, c))| (a.base.value(*q, 0).as_int().unwrap(), (p.to_string(), *c)))
            .collect();
        assert_eq!(by_value[&1], ("x".to_string(), w(1.0)));
        assert_eq!(by_value[&9].1, w(5.0));
        assert_eq!(by_value.len(), 10);

        let empty = build_cfta(&g, &Env::with("x", Value::Int(1)), &Value::Int(100), BuildOptions::new(2)).unwrap();
        assert!(min_cost_per_state(&empty, &CostTable::unit()).unwrap().is_empty());
    }

    #[test]
    fn min_cost_respects_table() {
        let g = toy();
        let a = build_cfta(&g, &Env::with("x", Value::Int(1)), &Value::Int(9), BuildOptions::new(3)).unwrap();
        let mut t = CostTable::unit();
        t.set("+", 10.0).unwrap();
        let m = min_cost_per_state(&a, &t).unwrap();
        let (p, c) = m.values().next().unwrap();
        assert_eq!(p.to_string(), "(× (× x 3) 3)");
        assert_eq!(*c, w(5.0));
    }

    #[test]
    fn exact_synthesis() {
        let g = toy();
        let d = data(&[(1, 9)]);
        let c = CostTable::unit();
        for l in [PerExampleLoss::squared(), PerExampleLoss::zero_inf()] {
            let r = synthesize(&task(&g, &d, &l, &c), &Objective::Lexicographic).unwrap();
            assert_eq!(r.loss, w(0.0));
            assert_eq!(r.objective, ObjectiveValue::LexPair(w(0.0), w(5.0)));
            // both size-5 programs reach the same state
            assert_eq!(r.program.to_string(), "(× (+ x 2) 3)");
        }
    }

    #[test]
    fn nearest_value_when_unreachable() {
        let g = toy();
        let d = data(&[(1, 10)]);
        let l = PerExampleLoss::squared();
        let c = CostTable::unit();
        let r = synthesize(&task(&g, &d, &l, &c), &Objective::Lexicographic).unwrap();
        assert_eq!(r.loss, w(1.0));
        assert_eq!(r.chosen_state.values, [Value::Int(9)]);
    }

    #[test]
    fn no_program_under_zero_inf() {
        let g = toy();
        let d = data(&[(1, 9), (1, 2)]);
        let l = PerExampleLoss::zero_inf();
        let c = CostTable::unit();
        let r = synthesize(&task(&g, &d, &l, &c), &Objective::Lexicographic).unwrap();
        // every accepting state is infinite, the lexicographic order still ranks them
        assert_eq!(r.loss, Weight::Infinity);
        let r = best_for_accuracy(&task(&g, &d, &l, &c), w(0.0)).unwrap_err();
        assert_eq!(r, SynthError::NoProgramWithinBound(w(0.0)));
        assert_eq!(
            synthesize(&task(&g, &DataSet::default(), &l, &c), &Objective::Lexicographic).unwrap_err(),
            SynthError::EmptyDataset
        );
    }

    // hidden program (× (+ x 2) 3), outputs 3x+6; row 2 corrupted
    fn corrupted() -> DataSet {
        data(&[(1, 9), (2, 12), (3, 100), (4, 18)])
    }

    #[test]
    fn accuracy_bound_recovers_hidden_program() {
        let g = toy();
        let d = corrupted();
        let l = PerExampleLoss::zero_one();
        let c = CostTable::unit();
        let r = best_for_accuracy(&task(&g, &d, &l, &c), w(1.0)).unwrap();
        assert_eq!(r.program.to_string(), "(× (+ x 2) 3)");
        assert_eq!(r.loss, w(1.0));
        assert_eq!(r.objective, ObjectiveValue::Scalar(w(5.0)));

        let any = best_for_accuracy(&task(&g, &d, &l, &c), Weight::Infinity).unwrap();
        assert_eq!(any.program.to_string(), "x");

        let clean = data(&[(1, 9), (2, 12)]);
        let exact = best_for_accuracy(&task(&g, &clean, &l, &c), w(0.0)).unwrap();
        assert_eq!(exact.loss, w(0.0));
    }

    #[test]
    fn forced_accuracy_with_trusted_rows() {
        let g = toy();
        let d = corrupted();
        let trusted = d.select(&[0, 1, 3]).unwrap();
        let l = PerExampleLoss::zero_one();
        let c = CostTable::unit();
        let t = task(&g, &d, &l, &c);
        let r = forced_accuracy(&t, &trusted, &Objective::Lexicographic, w(0.0)).unwrap();
        assert_eq!(r.program.to_string(), "(× (+ x 2) 3)");
        assert_eq!(r.loss, w(1.0));
        assert_eq!(dataset_loss(&g, &r.program, &d, &l).unwrap(), w(1.0));

        let plain = synthesize(&t, &Objective::Lexicographic).unwrap();
        let unconstrained = forced_accuracy(&t, &trusted, &Objective::Lexicographic, Weight::Infinity).unwrap();
        assert_eq!(unconstrained, plain);

        let foreign = data(&[(7, 7)]);
        assert_eq!(
            forced_accuracy(&t, &foreign, &Objective::Lexicographic, w(0.0)).unwrap_err(),
            SynthError::NotSubset(0)
        );
    }

    #[test]
    fn forced_on_all_rows_matches_exact_synthesis() {
        let g = toy();
        let d = data(&[(1, 9), (2, 12)]);
        let c = CostTable::unit();
        let l = PerExampleLoss::zero_one();
        let forced = forced_accuracy(&task(&g, &d, &l, &c), &d, &Objective::Lexicographic, w(0.0)).unwrap();
        let z = PerExampleLoss::zero_inf();
        let exact = synthesize(&task(&g, &d, &z, &c), &Objective::Lexicographic).unwrap();
        assert_eq!(forced.program, exact.program);
        assert_eq!(forced.loss, exact.loss);
    }

    #[test]
    fn tradeoff_prefers_simpler_wrong_program() {
        let g = toy();
        let d = corrupted();
        let l = PerExampleLoss::zero_one();
        let c = CostTable::unit();
        let t = task(&g, &d, &l, &c);
        let lex = synthesize(&t, &Objective::Lexicographic).unwrap();
        assert_eq!(lex.loss, w(1.0));
        // at λ = 1 one extra mismatch is cheaper than four extra nodes
        let cheap = synthesize(&t, &Objective::Tradeoff(1.0)).unwrap();
        assert!(cheap.complexity < lex.complexity);
    }

    #[test]
    fn repeated_runs_are_identical() {
        let g = toy();
        let d = corrupted();
        let l = PerExampleLoss::squared();
        let c = CostTable::unit();
        let t = task(&g, &d, &l, &c);
        let a = synthesize(&t, &Objective::Tradeoff(0.1)).unwrap();
        let b = synthesize(&t, &Objective::Tradeoff(0.1)).unwrap();
        assert_eq!(a, b);
    }
}
