//! Brute-force oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use nsyn::dsl::{toy_grammar, Grammar, Program, StringDsl};
use nsyn::{DataSet, Env, Example, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn toy() -> Arc<Grammar> {
    Arc::new(toy_grammar())
}

pub fn x(v: i64) -> Env {
    Env::with("x", Value::Int(v))
}

pub fn int_data(pairs: &[(i64, i64)]) -> DataSet {
    pairs.iter().map(|&(i, o)| Example::new(x(i), Value::Int(o))).collect()
}

/// Every toy program whose operator chain has at most `height - 1` links,
/// written out by hand rather than through the grammar.
pub fn toy_programs(height: usize) -> Vec<Program> {
    let mut layer = vec![Program::leaf("x")];
    let mut all = layer.clone();
    for _ in 1..height {
        let mut next = Vec::new();
        for p in &layer {
            for op in ["+", "×"] {
                for t in ["2", "3"] {
                    next.push(Program::node(op, vec![p.clone(), Program::leaf(t)]));
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// Direct evaluation of a toy program, independent of the grammar.
pub fn toy_eval(p: &Program, x: i64) -> Option<i64> {
    match p {
        Program::Leaf(n) if n == "x" => Some(x),
        Program::Leaf(n) => n.parse().ok(),
        Program::Node(op, cs) => {
            let a = toy_eval(&cs[0], x)?;
            let b = toy_eval(&cs[1], x)?;
            match op.as_str() {
                "+" => a.checked_add(b),
                "×" => a.checked_mul(b),
                _ => None,
            }
        }
    }
}

/// Loss oracle over integers: `None` is infinity.
pub fn int_loss(name: &str, expected: i64, produced: Option<i64>) -> Option<f64> {
    let c = produced?;
    match name {
        "01" => Some(if c == expected { 0.0 } else { 1.0 }),
        "0inf" => (c == expected).then_some(0.0),
        "sq" => Some(((c - expected) as f64).powi(2)),
        _ => panic!("no oracle for {name}"),
    }
}

pub fn toy_dataset_loss(name: &str, p: &Program, data: &[(i64, i64)]) -> Option<f64> {
    data.iter()
        .map(|&(i, o)| int_loss(name, o, toy_eval(p, i)))
        .try_fold(0.0, |acc, l| l.map(|l| acc + l))
}

/// A small random toy instance: inputs in 0..=5, outputs produced by a
/// random program or drawn at random.
pub struct ToyInstance {
    pub pairs: Vec<(i64, i64)>,
    pub height: usize,
}

pub fn random_toy_instance(rng: &mut ChaCha8Rng) -> ToyInstance {
    let height = rng.gen_range(1..=3);
    let n = rng.gen_range(1..=3);
    let programs = toy_programs(height);
    let hidden = &programs[rng.gen_range(0..programs.len())];
    let pairs = (0..n)
        .map(|_| {
            let i = rng.gen_range(0..=5);
            let o = if rng.gen_bool(0.6) {
                toy_eval(hidden, i).unwrap()
            } else {
                rng.gen_range(0..=40)
            };
            (i, o)
        })
        .collect();
    ToyInstance { pairs, height }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Phone numbers written as `(ddd) ddd-dddd`.
pub fn phone_inputs(n: usize, seed: u64) -> Vec<String> {
    let mut r = rng(seed);
    let mut digits = |k: usize| -> String { (0..k).map(|_| char::from(b'0' + r.gen_range(0..10u8))).collect() };
    (0..n)
        .map(|_| format!("({}) {}-{}", digits(3), digits(3), digits(4)))
        .collect()
}

pub fn phone_grammar() -> Arc<Grammar> {
    Arc::new(StringDsl::new(["-"]).grammar().unwrap())
}

/// `(425) 555-1234` to `425-555-1234`.
pub const PHONE_PROGRAM: &str =
    r#"(Concat (SubStr x (Pos x Digits 1 Start) (Pos x Digits 1 End)) (Concat (ConstStr "-") (Str (SubStr x (Pos x Digits 2 Start) (ConstPos -1)))))"#;

pub const NAMES: [&str; 5] = [
    "Nancy FreeHafer",
    "Andrew Cencici",
    "Jan Kotas",
    "Mariya Sergienko",
    "Steven Thorpe",
];

pub fn name_grammar() -> Arc<Grammar> {
    Arc::new(StringDsl::new([", "]).grammar().unwrap())
}

/// `Nancy FreeHafer` to `FreeHafer, Nancy`.
pub const NAME_PROGRAM: &str = r#"(Concat (SubStr x (Pos x Whitespace 1 End) (ConstPos -1)) (Concat (ConstStr ", ") (Str (SubStr x (ConstPos 0) (Pos x Whitespace 1 Start)))))"#;

/// Dataset produced by running `program` on string inputs.
pub fn run_on(g: &Grammar, program: &str, inputs: &[impl AsRef<str>]) -> DataSet {
    let p = Program::parse(program, g).unwrap();
    inputs
        .iter()
        .map(|i| {
            let env = Env::with("x", Value::str(i.as_ref()));
            let out = g.eval(&p, &env).unwrap().expect("hidden program defined on input");
            Example::new(env, out)
        })
        .collect()
}

/// Path of a bundled problem file.
pub fn problem_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(name)
}
