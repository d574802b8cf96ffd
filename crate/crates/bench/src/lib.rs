//! Fixed workloads shared by the benchmarks.

use std::sync::Arc;

use nsyn::dsl::{toy_grammar, StringDsl};
use nsyn::{DataSet, Env, Example, Grammar, Program, Value};

pub const NAMES: [&str; 5] = [
    "Nancy FreeHafer",
    "Andrew Cencici",
    "Jan Kotas",
    "Mariya Sergienko",
    "Steven Thorpe",
];

pub const PHONES: [&str; 8] = [
    "(425) 555-1234",
    "(206) 867-5309",
    "(312) 404-7781",
    "(617) 253-1000",
    "(808) 961-2290",
    "(503) 220-4417",
    "(919) 732-0365",
    "(702) 118-9054",
];

pub const NAME_PROGRAM: &str = r#"(Concat (SubStr x (Pos x Whitespace 1 End) (ConstPos -1)) (Concat (ConstStr ", ") (Str (SubStr x (ConstPos 0) (Pos x Whitespace 1 Start)))))"#;

pub const PHONE_PROGRAM: &str = r#"(Concat (SubStr x (Pos x Digits 1 Start) (Pos x Digits 1 End)) (Concat (ConstStr "-") (Str (SubStr x (Pos x Digits 2 Start) (ConstPos -1)))))"#;

pub fn toy() -> Arc<Grammar> {
    Arc::new(toy_grammar())
}

/// `(x + 2) * 3` on inputs 0..n.
pub fn toy_data(n: i64) -> DataSet {
    (0..n)
        .map(|i| Example::new(Env::with("x", Value::Int(i)), Value::Int((i + 2) * 3)))
        .collect()
}

pub fn string_grammar(constant: &str) -> Arc<Grammar> {
    Arc::new(StringDsl::new([constant]).grammar().expect("string grammar builds"))
}

/// Examples produced by running `program` on `inputs`.
pub fn string_data(g: &Grammar, program: &str, inputs: &[&str]) -> DataSet {
    let p = Program::parse(program, g).expect("program parses");
    inputs
        .iter()
        .map(|i| {
            let env = Env::with("x", Value::str(*i));
            let out = g.eval(&p, &env).expect("evaluates").expect("defined");
            Example::new(env, out)
        })
        .collect()
}
