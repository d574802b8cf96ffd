//! Run-time values, loss weights and input environments.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign};

use crate::dsl::Token;
use crate::error::EvalError;

/// Direction argument of a token-relative position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Start,
    End,
}

/// A concrete value flowing through programs and automaton states.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Str(String),
    Int(i64),
    Dir(Dir),
    Tok(Token),
}

impl Value {
    pub fn str(s: impl Into<String>) -> Self {
        Value::Str(s.into())
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    /// Length in characters for strings, `None` for every other kind.
    pub fn char_len(&self) -> Option<usize> {
        self.as_str().map(|s| s.chars().count())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Str(s) => write!(f, "{s:?}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Dir(Dir::Start) => f.write_str("Start"),
            Value::Dir(Dir::End) => f.write_str("End"),
            Value::Tok(t) => write!(f, "{t}"),
        }
    }
}

/// Absolute tolerance used when two finite weights are compared for equality
/// outside of the total order (objective ties, dedup of real-valued losses).
pub const WEIGHT_EPSILON: f64 = 1e-9;

/// A nonnegative extended real: losses, costs and objective values.
#[derive(Debug, Clone, Copy)]
pub enum Weight {
    Finite(f64),
    Infinity,
}

impl Weight {
    pub const ZERO: Weight = Weight::Finite(0.0);

    /// Panics when `x` is negative or NaN.
    pub fn finite(x: f64) -> Self {
        Self::try_finite(x).unwrap_or_else(|| panic!("invalid weight {x}"))
    }

    pub fn try_finite(x: f64) -> Option<Self> {
        if x.is_nan() || x < 0.0 {
            None
        } else if x.is_infinite() {
            Some(Weight::Infinity)
        } else {
            Some(Weight::Finite(x))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Weight::Finite(_))
    }

    pub fn value(self) -> f64 {
        match self {
            Weight::Finite(x) => x,
            Weight::Infinity => f64::INFINITY,
        }
    }

    /// Scales by a nonnegative factor; `Infinity * 0` stays `Infinity`.
    pub fn scale(self, factor: f64) -> Self {
        assert!(factor >= 0.0, "negative scale factor {factor}");
        match self {
            Weight::Finite(x) => Weight::finite(x * factor),
            Weight::Infinity => Weight::Infinity,
        }
    }

    /// Equality with absolute tolerance [`WEIGHT_EPSILON`] on finite values.
    pub fn approx_eq(self, other: Weight) -> bool {
        match (self, other) {
            (Weight::Finite(a), Weight::Finite(b)) => (a - b).abs() <= WEIGHT_EPSILON,
            (Weight::Infinity, Weight::Infinity) => true,
            _ => false,
        }
    }
}

impl Default for Weight {
    fn default() -> Self {
        Weight::ZERO
    }
}

impl Add for Weight {
    type Output = Weight;

    fn add(self, rhs: Weight) -> Weight {
        match (self, rhs) {
            (Weight::Finite(a), Weight::Finite(b)) => Weight::Finite(a + b),
            _ => Weight::Infinity,
        }
    }
}

impl AddAssign for Weight {
    fn add_assign(&mut self, rhs: Weight) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::ZERO, Add::add)
    }
}

impl PartialEq for Weight {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Weight {}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Weight::Finite(a), Weight::Finite(b)) => a.total_cmp(b),
            (Weight::Finite(_), Weight::Infinity) => Ordering::Less,
            (Weight::Infinity, Weight::Finite(_)) => Ordering::Greater,
            (Weight::Infinity, Weight::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(x) => write!(f, "{x}"),
            Weight::Infinity => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Weight {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "Infinity" | "infinity" | "∞" => Ok(Weight::Infinity),
            t => t
                .parse::<f64>()
                .ok()
                .and_then(Weight::try_finite)
                .ok_or_else(|| format!("invalid weight `{s}`")),
        }
    }
}

/// Variable bindings a program runs in.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Env {
    bindings: BTreeMap<String, Value>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    /// Single-variable environment, the common case for string tasks.
    pub fn with(name: impl Into<String>, value: Value) -> Self {
        let mut env = Self::new();
        env.bind(name, value);
        env
    }

    pub fn bind(&mut self, name: impl Into<String>, value: Value) {
        self.bindings.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Result<&Value, EvalError> {
        self.bindings
            .get(name)
            .ok_or_else(|| EvalError::UnboundVariable(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }
}

impl FromIterator<(String, Value)> for Env {
    fn from_iter<I: IntoIterator<Item = (String, Value)>>(iter: I) -> Self {
        Env {
            bindings: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn weight_addition() {
        assert_eq!(Weight::finite(2.0) + Weight::finite(3.0), Weight::finite(5.0));
        assert_eq!(Weight::finite(7.0) + Weight::Infinity, Weight::Infinity);
        assert_eq!(Weight::ZERO + Weight::ZERO, Weight::ZERO);
    }

    #[test]
    fn weight_order_puts_infinity_last() {
        assert!(Weight::finite(1e300) < Weight::Infinity);
        assert!(Weight::finite(0.0) < Weight::finite(0.5));
        assert_eq!(Weight::Infinity.cmp(&Weight::Infinity), Ordering::Equal);
    }

    #[test]
    fn rejects_negative_weights() {
        assert!(Weight::try_finite(-1.0).is_none());
        assert!(Weight::try_finite(f64::NAN).is_none());
        assert_eq!("inf".parse::<Weight>().unwrap(), Weight::Infinity);
        assert_eq!("2.5".parse::<Weight>().unwrap(), Weight::finite(2.5));
        assert!("-2".parse::<Weight>().is_err());
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let env = Env::with("x", Value::Int(1));
        assert_eq!(env.get("x").unwrap(), &Value::Int(1));
        assert!(matches!(env.get("y"), Err(EvalError::UnboundVariable(v)) if v == "y"));
    }

    fn weight() -> impl Strategy<Value = Weight> {
        prop_oneof![
            4 => (0u32..1000).prop_map(|x| Weight::finite(x as f64)),
            1 => Just(Weight::Infinity),
        ]
    }

    proptest! {
        #[test]
        fn addition_is_a_commutative_monoid(a in weight(), b in weight(), c in weight()) {
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!(a + Weight::ZERO, a);
        }

        #[test]
        fn order_is_total(a in weight(), b in weight()) {
            let n = [a < b, a == b, a > b].iter().filter(|x| **x).count();
            prop_assert_eq!(n, 1);
        }
    }
}
