//! Output corruption for experiments.
//!
//! Random choices come from ChaCha8 seeded through `seed_from_u64`, so a
//! corrupted dataset is reproducible from its seed on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::NoiseError;
use crate::loss::DataSet;
use crate::value::Value;

/// A corruption process and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    CyclicDelete { preserve_last: usize },
    DigitReplace { b: f64, seed: u64 },
}

impl NoiseSpec {
    pub fn apply(&self, data: &DataSet) -> Result<DataSet, NoiseError> {
        match *self {
            NoiseSpec::CyclicDelete { preserve_last } => cyclic_delete(data, preserve_last),
            NoiseSpec::DigitReplace { b, seed } => digit_replace(data, b, seed),
        }
    }
}

fn text(data: &DataSet, row: usize) -> Result<&str, NoiseError> {
    data.examples()[row]
        .output
        .as_str()
        .ok_or(NoiseError::NonString(row))
}

/// Row `i` among the first `n - preserve_last` loses the character at
/// `i mod len`; the last `preserve_last` rows are kept.
pub fn cyclic_delete(data: &DataSet, preserve_last: usize) -> Result<DataSet, NoiseError> {
    let n = data.len();
    if preserve_last > n {
        return Err(NoiseError::Preserve {
            preserve: preserve_last,
            len: n,
        });
    }
    let mut outputs = Vec::with_capacity(n);
    for row in 0..n {
        if row >= n - preserve_last {
            outputs.push(data.examples()[row].output.clone());
            continue;
        }
        let chars: Vec<char> = text(data, row)?.chars().collect();
        if chars.is_empty() {
            return Err(NoiseError::EmptyOutput(row));
        }
        let cut = row % chars.len();
        let s: String = chars
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != cut)
            .map(|(_, c)| c)
            .collect();
        outputs.push(Value::Str(s));
    }
    Ok(data.with_outputs(outputs))
}

/// Each ASCII digit of each output is, with probability `b`, replaced by a
/// uniformly drawn digit (possibly itself).
pub fn digit_replace(data: &DataSet, b: f64, seed: u64) -> Result<DataSet, NoiseError> {
    if !(0.0..=1.0).contains(&b) {
        return Err(NoiseError::Probability(b.to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outputs = Vec::with_capacity(data.len());
    for row in 0..data.len() {
        let s: String = text(data, row)?
            .chars()
            .map(|c| {
                if c.is_ascii_digit() && rng.gen_bool(b) {
                    char::from(b'0' + rng.gen_range(0..10u8))
                } else {
                    c
                }
            })
            .collect();
        outputs.push(Value::Str(s));
    }
    Ok(data.with_outputs(outputs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::Example;
    use crate::value::Env;
    use proptest::prelude::*;

    fn strings(outs: &[&str]) -> DataSet {
        outs.iter()
            .enumerate()
            .map(|(i, o)| Example::new(Env::with("x", Value::Int(i as i64)), Value::str(*o)))
            .collect()
    }

    fn outs(d: &DataSet) -> Vec<&str> {
        d.outputs().map(|v| v.as_str().unwrap()).collect()
    }

    #[test]
    fn cyclic_positions_wrap() {
        let d = strings(&["abc", "abc", "abc", "abc"]);
        assert_eq!(outs(&cyclic_delete(&d, 0).unwrap()), ["bc", "ac", "ab", "bc"]);
        assert_eq!(cyclic_delete(&d, 4).unwrap(), d);
        assert_eq!(outs(&cyclic_delete(&d, 1).unwrap()), ["bc", "ac", "ab", "abc"]);
        assert_eq!(outs(&cyclic_delete(&strings(&["x"]), 0).unwrap()), [""]);
    }

    #[test]
    fn cyclic_errors() {
        assert_eq!(
            cyclic_delete(&strings(&["a", ""]), 0).unwrap_err(),
            NoiseError::EmptyOutput(1)
        );
        assert!(matches!(
            cyclic_delete(&strings(&["a"]), 2),
            Err(NoiseError::Preserve { .. })
        ));
    }

    #[test]
    fn digit_replace_identity_and_reproducibility() {
        let d = strings(&["425-555-1234", "no digits", "(206) 555-0000"]);
        assert_eq!(digit_replace(&d, 0.0, 7).unwrap(), d);
        assert_eq!(digit_replace(&d, 0.7, 7).unwrap(), digit_replace(&d, 0.7, 7).unwrap());
        let full = digit_replace(&d, 1.0, 7).unwrap();
        assert_eq!(outs(&full)[1], "no digits");
        assert!(digit_replace(&d, 1.5, 7).is_err());
    }

    #[test]
    fn changed_digit_rate() {
        let row = "0123456789".repeat(100);
        let d = strings(&vec![row.as_str(); 20]);
        for b in [0.2, 0.4, 1.0] {
            let c = digit_replace(&d, b, 42).unwrap();
            let changed: usize = d
                .outputs()
                .zip(c.outputs())
                .map(|(x, y)| {
                    x.as_str().unwrap().chars().zip(y.as_str().unwrap().chars()).filter(|(a, b)| a != b).count()
                })
                .sum();
            let rate = changed as f64 / 20_000.0;
            assert!((rate - 0.9 * b).abs() <= 0.03, "b={b} rate={rate}");
        }
    }

    #[test]
    fn spec_serialises_with_kind() {
        let s = NoiseSpec::DigitReplace { b: 0.2, seed: 3 };
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"kind":"digit_replace","b":0.2,"seed":3}"#);
        assert_eq!(serde_json::from_str::<NoiseSpec>(&json).unwrap(), s);
    }

    proptest! {
        #[test]
        fn cyclic_lengths(rows in prop::collection::vec("[a-z0-9]{1,8}", 1..8), keep in 0usize..8) {
            let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
            let d = strings(&refs);
            let keep = keep.min(d.len());
            let c = cyclic_delete(&d, keep).unwrap();
            for (i, (a, b)) in d.outputs().zip(c.outputs()).enumerate() {
                let (a, b) = (a.as_str().unwrap(), b.as_str().unwrap());
                if i < d.len() - keep {
                    prop_assert_eq!(b.chars().count() + 1, a.chars().count());
                } else {
                    prop_assert_eq!(a, b);
                }
            }
        }
    }
}
