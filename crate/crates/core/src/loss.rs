//! Per-example losses and dataset loss.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::dsl::{Grammar, Program};
use crate::error::LossError;
use crate::value::{Env, Value, Weight};

/// One input/output example.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Example {
    pub input: Env,
    pub output: Value,
}

impl Example {
    pub fn new(input: Env, output: Value) -> Self {
        Example { input, output }
    }
}

/// An ordered list of examples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DataSet {
    examples: Vec<Example>,
}

impl DataSet {
    pub fn new(examples: Vec<Example>) -> Self {
        DataSet { examples }
    }

    pub fn push(&mut self, input: Env, output: Value) {
        self.examples.push(Example::new(input, output));
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Example> {
        self.examples.iter()
    }

    pub fn outputs(&self) -> impl Iterator<Item = &Value> {
        self.examples.iter().map(|e| &e.output)
    }

    /// Drops repeated examples, keeping the first occurrence of each.
    pub fn dedup(&self) -> DataSet {
        let mut seen = HashSet::new();
        DataSet::new(
            self.examples
                .iter()
                .filter(|e| seen.insert(*e))
                .cloned()
                .collect(),
        )
    }

    /// The examples at `indices`, in that order; `None` if one is out of range.
    pub fn select(&self, indices: &[usize]) -> Option<DataSet> {
        indices
            .iter()
            .map(|&i| self.examples.get(i).cloned())
            .collect::<Option<Vec<_>>>()
            .map(DataSet::new)
    }

    /// Same inputs with outputs replaced.
    pub fn with_outputs(&self, outputs: impl IntoIterator<Item = Value>) -> DataSet {
        DataSet::new(
            self.examples
                .iter()
                .zip(outputs)
                .map(|(e, o)| Example::new(e.input.clone(), o))
                .collect(),
        )
    }
}

impl FromIterator<Example> for DataSet {
    fn from_iter<I: IntoIterator<Item = Example>>(iter: I) -> Self {
        DataSet::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a DataSet {
    type Item = &'a Example;
    type IntoIter = std::slice::Iter<'a, Example>;

    fn into_iter(self) -> Self::IntoIter {
        self.examples.iter()
    }
}

/// Which shipped loss a [`PerExampleLoss`] is, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossKind {
    ZeroOne,
    ZeroInf,
    DamerauLevenshtein,
    OneDelete,
    NSubstitution,
    Squared,
    Custom,
}

type LossFn = Arc<dyn Fn(&Value, &Value) -> Result<Weight, LossError> + Send + Sync>;

/// `L(expected, produced)`, a named deterministic loss.
#[derive(Clone)]
pub struct PerExampleLoss {
    name: String,
    kind: LossKind,
    f: LossFn,
}

impl fmt::Debug for PerExampleLoss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PerExampleLoss")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .finish()
    }
}

fn text<'a>(loss: &str, v: &'a Value) -> Result<&'a str, LossError> {
    v.as_str().ok_or_else(|| LossError::Type {
        loss: loss.to_string(),
        expected: "string",
        found: v.to_string(),
    })
}

impl PerExampleLoss {
    /// Names accepted by [`PerExampleLoss::from_name`].
    pub const NAMES: [&'static str; 6] = ["01", "0inf", "dl", "1del", "nsub", "sq"];

    pub fn custom<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Value, &Value) -> Result<Weight, LossError> + Send + Sync + 'static,
    {
        PerExampleLoss {
            name: name.into(),
            kind: LossKind::Custom,
            f: Arc::new(f),
        }
    }

    fn shipped<F>(name: &str, kind: LossKind, f: F) -> Self
    where
        F: Fn(&Value, &Value) -> Result<Weight, LossError> + Send + Sync + 'static,
    {
        PerExampleLoss {
            name: name.to_string(),
            kind,
            f: Arc::new(f),
        }
    }

    pub fn zero_one() -> Self {
        Self::shipped("01", LossKind::ZeroOne, |o, c| Ok(zero_one(o, c)))
    }

    pub fn zero_inf() -> Self {
        Self::shipped("0inf", LossKind::ZeroInf, |o, c| Ok(zero_inf(o, c)))
    }

    pub fn dl() -> Self {
        Self::shipped("dl", LossKind::DamerauLevenshtein, |o, c| {
            Ok(dl(text("dl", o)?, text("dl", c)?))
        })
    }

    /// Deleting one character of the program output gives the expected one.
    pub fn one_delete() -> Self {
        Self::shipped("1del", LossKind::OneDelete, |o, c| {
            Ok(one_delete(text("1del", c)?, text("1del", o)?))
        })
    }

    pub fn n_substitution() -> Self {
        Self::shipped("nsub", LossKind::NSubstitution, |o, c| {
            Ok(n_substitution(text("nsub", c)?, text("nsub", o)?))
        })
    }

    /// `(c - o)^2` over integers.
    pub fn squared() -> Self {
        Self::shipped("sq", LossKind::Squared, |o, c| match (o, c) {
            (Value::Int(o), Value::Int(c)) => Ok(squared(*o, *c)),
            _ => Err(LossError::Type {
                loss: "sq".into(),
                expected: "integer",
                found: format!("{o}, {c}"),
            }),
        })
    }

    pub fn from_name(name: &str) -> Result<Self, LossError> {
        Ok(match name {
            "01" => Self::zero_one(),
            "0inf" => Self::zero_inf(),
            "dl" => Self::dl(),
            "1del" => Self::one_delete(),
            "nsub" => Self::n_substitution(),
            "sq" => Self::squared(),
            other => return Err(LossError::Unknown(other.to_string())),
        })
    }

    /// Loss from a likelihood model: `-ln P(expected | produced)`.
    pub fn likelihood<F>(name: impl Into<String>, prob: F) -> Self
    where
        F: Fn(&Value, &Value) -> f64 + Send + Sync + 'static,
    {
        Self::custom(name, move |o, c| Ok(neg_log(prob(o, c))))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn is_zero_inf(&self) -> bool {
        self.kind == LossKind::ZeroInf
    }

    pub fn eval(&self, expected: &Value, produced: &Value) -> Result<Weight, LossError> {
        (self.f)(expected, produced)
    }

    /// As [`PerExampleLoss::eval`], an absent output costing infinity.
    pub fn eval_opt(&self, expected: &Value, produced: Option<&Value>) -> Result<Weight, LossError> {
        match produced {
            Some(c) => self.eval(expected, c),
            None => Ok(Weight::Infinity),
        }
    }
}

/// `-ln p`, infinite at zero. Probabilities above one are clamped.
pub fn neg_log(p: f64) -> Weight {
    if p.is_nan() || p <= 0.0 {
        Weight::Infinity
    } else {
        Weight::finite((-p.min(1.0).ln()).max(0.0))
    }
}

pub fn zero_one(o: &Value, c: &Value) -> Weight {
    if o == c {
        Weight::ZERO
    } else {
        Weight::finite(1.0)
    }
}

pub fn zero_inf(o: &Value, c: &Value) -> Weight {
    if o == c {
        Weight::ZERO
    } else {
        Weight::Infinity
    }
}

pub fn squared(o: i64, c: i64) -> Weight {
    let d = c as f64 - o as f64;
    Weight::finite(d * d)
}

/// Optimal string alignment distance over characters.
pub fn dl(a: &str, b: &str) -> Weight {
    Weight::finite(osa(a, b) as f64)
}

pub fn osa(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (n, m) = (a.len(), b.len());
    let mut d = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = usize::from(a[i - 1] != b[j - 1]);
            let mut best = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + sub);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                best = best.min(d[i - 2][j - 2] + 1);
            }
            d[i][j] = best;
        }
    }
    d[n][m]
}

/// 0 when equal, 1 when deleting one character of `produced` yields
/// `expected`, infinite otherwise.
pub fn one_delete(produced: &str, expected: &str) -> Weight {
    if produced == expected {
        return Weight::ZERO;
    }
    let p: Vec<char> = produced.chars().collect();
    let e: Vec<char> = expected.chars().collect();
    if p.len() != e.len() + 1 {
        return Weight::Infinity;
    }
    let prefix = p.iter().zip(&e).take_while(|(x, y)| x == y).count();
    if p[prefix + 1..] == e[prefix..] {
        Weight::finite(1.0)
    } else {
        Weight::Infinity
    }
}

/// Hamming distance, infinite on a length mismatch.
pub fn n_substitution(produced: &str, expected: &str) -> Weight {
    let p: Vec<char> = produced.chars().collect();
    let e: Vec<char> = expected.chars().collect();
    if p.len() != e.len() {
        return Weight::Infinity;
    }
    Weight::finite(p.iter().zip(&e).filter(|(x, y)| x != y).count() as f64)
}

/// `Σ L(o_i, p(σ_i))`; an undefined output contributes infinity.
pub fn dataset_loss(
    grammar: &Grammar,
    p: &Program,
    data: &DataSet,
    loss: &PerExampleLoss,
) -> Result<Weight, LossError> {
    let mut total = Weight::ZERO;
    for e in data {
        let out = grammar.eval(p, &e.input)?;
        total += loss.eval_opt(&e.output, out.as_ref())?;
    }
    Ok(total)
}

/// Per-example losses of `p`, alongside its outputs.
pub fn example_losses(
    grammar: &Grammar,
    p: &Program,
    data: &DataSet,
    loss: &PerExampleLoss,
) -> Result<Vec<(Option<Value>, Weight)>, LossError> {
    data.iter()
        .map(|e| {
            let out = grammar.eval(p, &e.input)?;
            let w = loss.eval_opt(&e.output, out.as_ref())?;
            Ok((out, w))
        })
        .collect()
}
