//! Arithmetic over one input:
//!
//! ```text
//! n := x | n + t | n × t
//! t := 2 | 3
//! ```

use super::{Grammar, GrammarBuilder};
use crate::value::Value;

fn int_op(f: fn(i64, i64) -> Option<i64>) -> impl Fn(&[&Value]) -> Option<Value> {
    move |args| match args {
        [Value::Int(a), Value::Int(b)] => f(*a, *b).map(Value::Int),
        _ => None,
    }
}

pub fn toy_grammar() -> Grammar {
    GrammarBuilder::new("toy")
        .nonterminal("n")
        .nonterminal("t")
        .variable("x")
        .constant("2", Value::Int(2))
        .constant("3", Value::Int(3))
        .builtin("+", 2, int_op(i64::checked_add))
        .builtin("×", 2, int_op(i64::checked_mul))
        .leaf("n", "x")
        .production("n", "+", &["n", "t"])
        .production("n", "×", &["n", "t"])
        .leaf("t", "2")
        .leaf("t", "3")
        .start("n")
        .build()
        .expect("toy grammar is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::Program;
    use crate::value::Env;

    fn run(text: &str) -> Option<Value> {
        let g = toy_grammar();
        let p = Program::parse(text, &g).unwrap();
        g.eval(&p, &Env::with("x", Value::Int(1))).unwrap()
    }

    #[test]
    fn shape() {
        let g = toy_grammar();
        assert_eq!(g.productions().len(), 2);
        assert_eq!(g.leaves().len(), 3);
        assert_eq!(g.nonterminal_name(g.start()), "n");
    }

    #[test]
    fn evaluates() {
        assert_eq!(run("x"), Some(Value::Int(1)));
        assert_eq!(run("(+ x 2)"), Some(Value::Int(3)));
        assert_eq!(run("(× (+ x 2) 3)"), Some(Value::Int(9)));
    }

    #[test]
    fn missing_input_is_an_error() {
        let g = toy_grammar();
        let p = Program::parse("(+ x 2)", &g).unwrap();
        assert!(g.eval(&p, &Env::new()).is_err());
    }

    #[test]
    fn scope_height_counts_operator_nesting() {
        let g = toy_grammar();
        let h = |s: &str| g.scope_height(&Program::parse(s, &g).unwrap());
        assert_eq!(h("x"), Some(1));
        assert_eq!(h("(+ x 2)"), Some(2));
        assert_eq!(h("(× (+ x 2) 3)"), Some(3));
        // `2` alone is a t, not an n
        assert_eq!(h("2"), None);
    }
}
