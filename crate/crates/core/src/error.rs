use thiserror::Error;

/// Failure to run a program. An undefined builtin result is not an error;
/// it is reported as an absent value.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{name}` expects {expected} arguments, got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected end of input")]
    UnexpectedEof,
    #[error("unexpected `{found}` at offset {offset}")]
    Unexpected { found: String, offset: usize },
    #[error("unterminated quoted atom at offset {0}")]
    Unterminated(usize),
    #[error("trailing input at offset {0}")]
    Trailing(usize),
    #[error(transparent)]
    Symbol(#[from] EvalError),
    #[error("program does not conform to the grammar")]
    NonConforming,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("unknown nonterminal `{0}`")]
    UnknownNonTerminal(String),
    #[error("unknown terminal `{0}`")]
    UnknownTerminal(String),
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error("builtin `{name}` has arity {arity} but the production lists {args} arguments")]
    ArityMismatch {
        name: String,
        arity: usize,
        args: usize,
    },
    #[error("no start symbol")]
    NoStart,
    #[error("empty {0} list")]
    Empty(&'static str),
    #[error("unknown token class `{0}`")]
    UnknownToken(String),
    #[error("ConstPos/Pos index must be nonzero for Pos, got {0}")]
    ZeroIndex(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("automata were built over different grammars")]
    GrammarMismatch,
    #[error("state is not accepting")]
    NotAccepting,
    #[error("height bound must be at least 1")]
    ZeroHeight,
    #[error("empty dataset")]
    EmptyDataset,
    #[error("construction exceeded its deadline")]
    Timeout,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Loss(#[from] LossError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LossError {
    #[error("loss `{loss}` needs {expected} values, got {found}")]
    Type {
        loss: String,
        expected: &'static str,
        found: String,
    },
    #[error("unknown loss `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NoiseError {
    #[error("row {0}: output is empty")]
    EmptyOutput(usize),
    #[error("row {0}: output is not a string")]
    NonString(usize),
    #[error("probability {0} outside [0, 1]")]
    Probability(String),
    #[error("cannot preserve {preserve} rows of a {len}-row dataset")]
    Preserve { preserve: usize, len: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CostError {
    #[error("no cost entry for `{0}`")]
    Missing(String),
    #[error("negative or invalid cost for `{0}`")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("empty dataset")]
    EmptyDataset,
    #[error("no program within the height bound")]
    NoProgram,
    #[error("no program within loss bound {0}")]
    NoProgramWithinBound(crate::Weight),
    #[error("trusted example {0} is not part of the dataset")]
    NotSubset(usize),
    #[error("tradeoff weight must be positive, got {0}")]
    Lambda(f64),
    #[error("objective is not monotone in complexity at loss {loss}")]
    NonMonotoneObjective { loss: String },
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Loss(#[from] LossError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl SynthError {
    pub fn is_timeout(&self) -> bool {
        matches!(self, SynthError::Automaton(AutomatonError::Timeout))
    }

    pub fn is_no_program(&self) -> bool {
        matches!(
            self,
            SynthError::NoProgram | SynthError::NoProgramWithinBound(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("cannot read dataset: {0}")]
    Io(String),
    #[error("malformed dataset JSON: {0}")]
    Json(String),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("empty dataset")]
    Empty,
}
