//! Complexity measures and objective functions over (loss, complexity).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::dsl::Program;
use crate::error::{CostError, SynthError};
use crate::value::{Weight, WEIGHT_EPSILON};

/// Per-symbol costs of terminals and builtins, looked up by name.
#[derive(Debug, Clone, PartialEq)]
pub struct CostTable {
    entries: BTreeMap<String, f64>,
    default: Option<f64>,
}

impl Default for CostTable {
    fn default() -> Self {
        Self::unit()
    }
}

impl CostTable {
    /// Every symbol costs 1, making [`CostTable::cost`] the program size.
    pub fn unit() -> Self {
        CostTable {
            entries: BTreeMap::new(),
            default: Some(1.0),
        }
    }

    /// No entries and no default; every symbol must be set.
    pub fn empty() -> Self {
        CostTable {
            entries: BTreeMap::new(),
            default: None,
        }
    }

    pub fn set(&mut self, name: impl Into<String>, cost: f64) -> Result<&mut Self, CostError> {
        let name = name.into();
        if !(cost.is_finite() && cost >= 0.0) {
            return Err(CostError::Invalid(name));
        }
        self.entries.insert(name, cost);
        Ok(self)
    }

    pub fn set_default(&mut self, cost: Option<f64>) -> Result<&mut Self, CostError> {
        if let Some(c) = cost {
            if !(c.is_finite() && c >= 0.0) {
                return Err(CostError::Invalid("*".into()));
            }
        }
        self.default = cost;
        Ok(self)
    }

    /// Costs as negative log prior probabilities.
    pub fn from_probabilities<'a>(
        probs: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<Self, CostError> {
        let mut t = Self::empty();
        for (name, p) in probs {
            if !(p > 0.0 && p <= 1.0) {
                return Err(CostError::Invalid(name.to_string()));
            }
            t.set(name, -p.ln())?;
        }
        Ok(t)
    }

    /// Reads `name cost` lines; `#` starts a comment and `*` sets the
    /// default for unlisted symbols.
    pub fn parse(text: &str) -> Result<Self, CostError> {
        let mut t = Self::empty();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, cost) = line
                .rsplit_once(char::is_whitespace)
                .ok_or_else(|| CostError::Invalid(line.to_string()))?;
            let name = name.trim();
            let cost: f64 = cost
                .parse()
                .map_err(|_| CostError::Invalid(name.to_string()))?;
            if name == "*" {
                t.set_default(Some(cost))?;
            } else {
                t.set(name, cost)?;
            }
        }
        Ok(t)
    }

    pub fn symbol_cost(&self, name: &str) -> Result<f64, CostError> {
        self.entries
            .get(name)
            .copied()
            .or(self.default)
            .ok_or_else(|| CostError::Missing(name.to_string()))
    }

    /// `cost(f) + Σ cost(children)`, leaves costing their terminal.
    pub fn cost(&self, p: &Program) -> Result<Weight, CostError> {
        Ok(Weight::finite(self.cost_f64(p)?))
    }

    fn cost_f64(&self, p: &Program) -> Result<f64, CostError> {
        match p {
            Program::Leaf(name) => self.symbol_cost(name),
            Program::Node(name, children) => {
                let mut c = self.symbol_cost(name)?;
                for child in children {
                    c += self.cost_f64(child)?;
                }
                Ok(c)
            }
        }
    }
}

/// A point of the objective's totally ordered codomain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveValue {
    Scalar(Weight),
    LexPair(Weight, Weight),
}

impl ObjectiveValue {
    /// Order treating weights within rounding distance as equal.
    pub fn cmp_approx(&self, other: &ObjectiveValue) -> Ordering {
        fn w(a: Weight, b: Weight) -> Ordering {
            if a.approx_eq(b) {
                Ordering::Equal
            } else {
                a.cmp(&b)
            }
        }
        match (self, other) {
            (ObjectiveValue::Scalar(a), ObjectiveValue::Scalar(b)) => w(*a, *b),
            (ObjectiveValue::LexPair(l1, c1), ObjectiveValue::LexPair(l2, c2)) => {
                w(*l1, *l2).then_with(|| w(*c1, *c2))
            }
            (ObjectiveValue::Scalar(_), ObjectiveValue::LexPair(..)) => Ordering::Less,
            (ObjectiveValue::LexPair(..), ObjectiveValue::Scalar(_)) => Ordering::Greater,
        }
    }

    pub fn approx_eq(&self, other: &ObjectiveValue) -> bool {
        self.cmp_approx(other) == Ordering::Equal
    }
}

impl Eq for ObjectiveValue {}

impl PartialOrd for ObjectiveValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ObjectiveValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ObjectiveValue::Scalar(a), ObjectiveValue::Scalar(b)) => a.cmp(b),
            (ObjectiveValue::LexPair(l1, c1), ObjectiveValue::LexPair(l2, c2)) => {
                l1.cmp(l2).then_with(|| c1.cmp(c2))
            }
            (ObjectiveValue::Scalar(_), ObjectiveValue::LexPair(..)) => Ordering::Less,
            (ObjectiveValue::LexPair(..), ObjectiveValue::Scalar(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Display for ObjectiveValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveValue::Scalar(w) => write!(f, "{w}"),
            ObjectiveValue::LexPair(l, c) => write!(f, "({l}, {c})"),
        }
    }
}

type ObjectiveFn = Arc<dyn Fn(Weight, Weight) -> ObjectiveValue + Send + Sync>;

/// `U(loss, complexity)`, nondecreasing in complexity at fixed loss.
#[derive(Clone)]
pub enum Objective {
    /// Loss first, then complexity.
    Lexicographic,
    /// `loss + λ · complexity`.
    Tradeoff(f64),
    Custom { name: String, f: ObjectiveFn },
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Objective({self})")
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Lexicographic => f.write_str("lex"),
            Objective::Tradeoff(l) => write!(f, "tradeoff:{l}"),
            Objective::Custom { name, .. } => f.write_str(name),
        }
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "lex" {
            return Ok(Objective::Lexicographic);
        }
        let lambda = s
            .strip_prefix("tradeoff:")
            .ok_or_else(|| format!("unknown objective `{s}`"))?;
        let lambda: f64 = lambda
            .parse()
            .map_err(|_| format!("invalid tradeoff weight `{lambda}`"))?;
        Objective::tradeoff(lambda).map_err(|e| e.to_string())
    }
}

impl Objective {
    pub fn tradeoff(lambda: f64) -> Result<Self, SynthError> {
        if lambda.is_finite() && lambda > 0.0 {
            Ok(Objective::Tradeoff(lambda))
        } else {
            Err(SynthError::Lambda(lambda))
        }
    }

    /// A user-supplied objective; [`Objective::check_monotone`] probes it.
    pub fn custom<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(Weight, Weight) -> ObjectiveValue + Send + Sync + 'static,
    {
        Objective::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, loss: Weight, complexity: Weight) -> ObjectiveValue {
        match self {
            Objective::Lexicographic => ObjectiveValue::LexPair(loss, complexity),
            Objective::Tradeoff(lambda) => ObjectiveValue::Scalar(loss + complexity.scale(*lambda)),
            Objective::Custom { f, .. } => f(loss, complexity),
        }
    }

    /// Probes nondecreasing behaviour in complexity on the given losses and
    /// a fixed ladder of complexities.
    pub fn check_monotone(&self, losses: &[Weight]) -> Result<(), SynthError> {
        const LADDER: [f64; 8] = [0.0, 0.5, 1.0, 2.0, 3.0, 10.0, 100.0, 1e6];
        for &l in losses {
            let mut prev: Option<ObjectiveValue> = None;
            for c in LADDER {
                let v = self.eval(l, Weight::finite(c));
                if let Some(p) = prev {
                    if v.cmp_approx(&p) == Ordering::Less {
                        return Err(SynthError::NonMonotoneObjective { loss: l.to_string() });
                    }
                }
                prev = Some(v);
            }
        }
        Ok(())
    }
}

/// Whether two scalar objective values tie up to rounding.
pub fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= WEIGHT_EPSILON * (1.0 + a.abs().max(b.abs()))
}
