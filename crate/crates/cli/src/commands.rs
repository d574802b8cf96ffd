//! The subcommands. Each returns a report value; printing and exit codes
//! are left to the binary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::ValueEnum;
use nsyn::dataset::{load_dataset, write_dataset};
use nsyn::loss::example_losses;
use nsyn::sfta::effective_data;
use nsyn::synthesis::{best_for_accuracy, forced_accuracy, synthesize};
use nsyn::{DataSet, Env, Example, NoiseSpec, Program, SynthError, SynthesisResult, Task, Value, ValueKind, Weight};
use serde_json::{json, Value as Json};

use crate::config::{Problem, ProblemConfig};
use crate::{show_weight, weight_json, Failure};

/// Bench timeout when neither the command line nor the config sets one.
pub const DEFAULT_BENCH_TIMEOUT: Duration = Duration::from_secs(600);

fn value_json(v: &Value) -> Json {
    match v {
        Value::Int(i) => json!(i),
        Value::Str(s) => json!(s),
        other => json!(other.to_string()),
    }
}

fn env_json(env: &Env) -> Json {
    Json::Object(env.iter().map(|(k, v)| (k.to_string(), value_json(v))).collect())
}

fn show_env(env: &Env) -> String {
    env.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

fn show_output(v: &Option<Value>) -> String {
    v.as_ref().map_or_else(|| "undefined".to_string(), Value::to_string)
}

/// Runs the synthesis variant the problem asks for: plain optimisation,
/// best program within an accuracy bound, or optimisation subject to a
/// bound on trusted rows. A best program of infinite loss fits nothing
/// and is reported as no program.
pub fn run(problem: &Problem, deadline: Option<Instant>) -> Result<SynthesisResult, SynthError> {
    let task = Task {
        grammar: &problem.grammar,
        data: &problem.data,
        loss: &problem.loss,
        costs: &problem.costs,
        options: problem.options.with_deadline(deadline),
    };
    let result = match (&problem.trusted, problem.bound) {
        (Some(rows), bound) => {
            let trusted = problem.data.select(rows).expect("trusted rows checked on resolution");
            forced_accuracy(&task, &trusted, &problem.objective, bound.unwrap_or(Weight::ZERO))
        }
        (None, Some(bound)) => best_for_accuracy(&task, bound),
        (None, None) => synthesize(&task, &problem.objective),
    }?;
    if result.loss.is_finite() {
        Ok(result)
    } else {
        Err(SynthError::NoProgram)
    }
}

#[derive(Debug, Clone)]
pub struct SynthReport {
    pub result: SynthesisResult,
    pub examples: usize,
    /// Examples left after duplicate removal, which only 0/inf applies.
    pub distinct_examples: usize,
    pub seconds: f64,
}

impl SynthReport {
    /// Everything but the timing, which is the only nondeterministic field.
    pub fn stable_json(&self) -> Json {
        json!({
            "program": self.result.program.to_string(),
            "loss": weight_json(self.result.loss),
            "complexity": weight_json(self.result.complexity),
            "objective": self.result.objective.to_string(),
            "states": self.result.sfta_state_count,
            "examples": self.examples,
            "distinct_examples": self.distinct_examples,
        })
    }

    pub fn json(&self) -> Json {
        let mut j = self.stable_json();
        j["seconds"] = json!(self.seconds);
        j
    }

    pub fn text(&self) -> String {
        let r = &self.result;
        let mut s = String::new();
        writeln!(s, "program     {}", r.program).unwrap();
        writeln!(s, "loss        {}", show_weight(r.loss)).unwrap();
        writeln!(s, "complexity  {}", show_weight(r.complexity)).unwrap();
        writeln!(s, "objective   {}", r.objective).unwrap();
        writeln!(s, "states      {}", r.sfta_state_count).unwrap();
        if self.distinct_examples == self.examples {
            writeln!(s, "examples    {}", self.examples).unwrap();
        } else {
            writeln!(s, "examples    {} ({} after removing duplicates)", self.examples, self.distinct_examples).unwrap();
        }
        writeln!(s, "seconds     {:.3}", self.seconds).unwrap();
        s
    }
}

pub fn synth(problem: &Problem) -> Result<SynthReport, Failure> {
    let start = Instant::now();
    let deadline = problem.timeout.map(|t| start + t);
    let result = run(problem, deadline)?;
    Ok(SynthReport {
        result,
        examples: problem.data.len(),
        distinct_examples: effective_data(&problem.data, &problem.loss).len(),
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub input: Env,
    pub expected: Value,
    pub produced: Option<Value>,
    pub loss: Weight,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub program: Program,
    pub rows: Vec<EvalRow>,
    pub total: Weight,
    pub complexity: Weight,
}

impl EvalReport {
    pub fn json(&self) -> Json {
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "input": env_json(&r.input),
                    "expected": value_json(&r.expected),
                    "produced": r.produced.as_ref().map(value_json),
                    "loss": weight_json(r.loss),
                })
            })
            .collect();
        json!({
            "program": self.program.to_string(),
            "rows": rows,
            "total_loss": weight_json(self.total),
            "complexity": weight_json(self.complexity),
        })
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "program     {}", self.program).unwrap();
        for (i, r) in self.rows.iter().enumerate() {
            writeln!(
                s,
                "{i:>4}  {}  expected {}  got {}  loss {}",
                show_env(&r.input),
                r.expected,
                show_output(&r.produced),
                show_weight(r.loss)
            )
            .unwrap();
        }
        writeln!(s, "total loss  {}", show_weight(self.total)).unwrap();
        writeln!(s, "complexity  {}", show_weight(self.complexity)).unwrap();
        s
    }
}

fn evaluate(problem: &Problem, program: &Program) -> Result<Vec<EvalRow>, Failure> {
    let results = example_losses(&problem.grammar, program, &problem.data, &problem.loss)
        .map_err(|e| Failure::usage(e.to_string()))?;
    Ok(problem
        .data
        .iter()
        .zip(results)
        .map(|(e, (produced, loss))| EvalRow {
            input: e.input.clone(),
            expected: e.output.clone(),
            produced,
            loss,
        })
        .collect())
}

pub fn eval(problem: &Problem, program_text: &str) -> Result<EvalReport, Failure> {
    let program = Program::parse(program_text, &problem.grammar).map_err(|e| Failure::usage(e.to_string()))?;
    let rows = evaluate(problem, &program)?;
    let complexity = problem.costs.cost(&program).map_err(|e| Failure::usage(e.to_string()))?;
    Ok(EvalReport {
        total: rows.iter().map(|r| r.loss).sum(),
        program,
        rows,
        complexity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CleanMode {
    /// Drop flagged rows.
    Filter,
    /// Replace flagged outputs with the synthesized program's output.
    Repair,
}

#[derive(Debug, Clone)]
pub struct CleanReport {
    pub synth: SynthReport,
    pub mode: CleanMode,
    /// Indices of rows with nonzero loss under the synthesized program.
    pub flagged: Vec<usize>,
    pub rows: Vec<EvalRow>,
    pub cleaned: DataSet,
}

impl CleanReport {
    pub fn json(&self) -> Json {
        let flagged: Vec<Json> = self
            .flagged
            .iter()
            .map(|&i| {
                let r = &self.rows[i];
                json!({
                    "row": i,
                    "expected": value_json(&r.expected),
                    "produced": r.produced.as_ref().map(value_json),
                    "loss": weight_json(r.loss),
                })
            })
            .collect();
        json!({
            "synthesis": self.synth.json(),
            "mode": format!("{:?}", self.mode).to_lowercase(),
            "flagged": flagged,
            "rows_out": self.cleaned.len(),
        })
    }

    pub fn text(&self) -> String {
        let mut s = self.synth.text();
        writeln!(s, "flagged     {} of {}", self.flagged.len(), self.rows.len()).unwrap();
        for &i in &self.flagged {
            let r = &self.rows[i];
            writeln!(
                s,
                "{i:>4}  expected {}  program gives {}  loss {}",
                r.expected,
                show_output(&r.produced),
                show_weight(r.loss)
            )
            .unwrap();
        }
        writeln!(s, "rows out    {}", self.cleaned.len()).unwrap();
        s
    }
}

/// Synthesizes a program, flags the rows it does not reproduce, and
/// filters or repairs them. A flagged row whose output the program leaves
/// undefined cannot be repaired and is dropped.
pub fn clean(problem: &Problem, mode: CleanMode) -> Result<CleanReport, Failure> {
    let synth = synth(problem)?;
    let rows = evaluate(problem, &synth.result.program)?;
    let flagged: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].loss != Weight::ZERO).collect();
    let cleaned = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| {
            if !flagged.contains(&i) {
                return Some(Example::new(r.input.clone(), r.expected.clone()));
            }
            match mode {
                CleanMode::Filter => None,
                CleanMode::Repair => r.produced.clone().map(|out| Example::new(r.input.clone(), out)),
            }
        })
        .collect();
    Ok(CleanReport { synth, mode, flagged, rows, cleaned })
}

/// Where `corrupt` records how a noisy dataset was made.
pub fn provenance_path(output: &Path) -> PathBuf {
    output.with_extension("provenance.json")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorruptReport {
    pub rows: usize,
    pub changed_rows: usize,
    pub provenance: Json,
}

/// Corrupts the outputs of a string dataset, writing the result and a
/// provenance sidecar next to it.
pub fn corrupt(input: &Path, noise: &NoiseSpec, output: &Path) -> Result<CorruptReport, Failure> {
    let data = load_dataset(input, ValueKind::Str).map_err(|e| Failure::io(e.to_string()))?;
    let noisy = noise.apply(&data).map_err(|e| Failure::usage(e.to_string()))?;
    let changed_rows = data.outputs().zip(noisy.outputs()).filter(|(a, b)| a != b).count();
    write_dataset(output, &noisy).map_err(|e| Failure::io(e.to_string()))?;
    let provenance = json!({
        "source": input.display().to_string(),
        "noise": serde_json::to_value(noise).expect("noise spec serialises"),
        "rows": data.len(),
        "changed_rows": changed_rows,
    });
    let sidecar = provenance_path(output);
    let text = serde_json::to_string_pretty(&provenance).expect("provenance serialises") + "\n";
    std::fs::write(&sidecar, text).map_err(|e| Failure::io(format!("{}: {e}", sidecar.display())))?;
    Ok(CorruptReport { rows: data.len(), changed_rows, provenance })
}

/// Writes a cleaned or generated dataset.
pub fn save(data: &DataSet, path: &Path) -> Result<(), Failure> {
    write_dataset(path, data).map_err(|e| Failure::io(e.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum BenchOutcome {
    Solved { seconds: f64, states: usize, loss: Weight, size: usize },
    /// Construction finished without a program: `X` in the table.
    NoProgram { seconds: f64 },
    /// Deadline hit: `-` in the table.
    Timeout { seconds: f64 },
    /// The problem could not be posed; reported as `X` with a message.
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub name: String,
    pub outcome: BenchOutcome,
}

/// Runs every `*.toml` problem in `dir`, in name order. `timeout`
/// overrides per-problem timeouts, which default to ten minutes.
pub fn bench(dir: &Path, timeout: Option<Duration>) -> Result<Vec<BenchRow>, Failure> {
    let entries = std::fs::read_dir(dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
    let mut configs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    configs.sort();
    Ok(configs.iter().map(|path| bench_one(path, timeout)).collect())
}

fn bench_one(path: &Path, timeout: Option<Duration>) -> BenchRow {
    let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
    let problem = match ProblemConfig::load(path).and_then(|c| c.resolve()) {
        Ok(p) => p,
        Err(e) => return BenchRow { name, outcome: BenchOutcome::Invalid(e.message) },
    };
    let limit = timeout.or(problem.timeout).unwrap_or(DEFAULT_BENCH_TIMEOUT);
    let start = Instant::now();
    let result = run(&problem, Some(start + limit));
    let seconds = start.elapsed().as_secs_f64();
    let outcome = match result {
        Ok(r) => BenchOutcome::Solved {
            seconds,
            states: r.sfta_state_count,
            loss: r.loss,
            size: r.program.size(),
        },
        Err(e) if e.is_timeout() => BenchOutcome::Timeout { seconds },
        Err(e) if e.is_no_program() => BenchOutcome::NoProgram { seconds },
        Err(e) => BenchOutcome::Invalid(e.to_string()),
    };
    BenchRow { name, outcome }
}

fn cells(o: &BenchOutcome) -> [String; 4] {
    match o {
        BenchOutcome::Solved { seconds, states, loss, size } => [
            format!("{seconds:.3}"),
            states.to_string(),
            show_weight(*loss),
            size.to_string(),
        ],
        BenchOutcome::Timeout { .. } => ["-", "-", "-", "-"].map(String::from),
        BenchOutcome::NoProgram { .. } | BenchOutcome::Invalid(_) => ["X", "X", "X", "X"].map(String::from),
    }
}

pub fn bench_table(rows: &[BenchRow]) -> String {
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max(7);
    let mut s = format!("{:<width$}  {:>9}  {:>9}  {:>8}  {:>5}\n", "problem", "time(s)", "states", "loss", "size");
    for r in rows {
        let [t, q, l, z] = cells(&r.outcome);
        writeln!(s, "{:<width$}  {t:>9}  {q:>9}  {l:>8}  {z:>5}", r.name).unwrap();
    }
    s
}

pub fn bench_json(rows: &[BenchRow]) -> Json {
    Json::Array(
        rows.iter()
            .map(|r| {
                let mut j = match &r.outcome {
                    BenchOutcome::Solved { seconds, states, loss, size } => json!({
                        "status": "solved", "seconds": seconds, "states": states,
                        "loss": weight_json(*loss), "size": size,
                    }),
                    BenchOutcome::NoProgram { seconds } => json!({ "status": "X", "seconds": seconds }),
                    BenchOutcome::Timeout { seconds } => json!({ "status": "-", "seconds": seconds }),
                    BenchOutcome::Invalid(m) => json!({ "status": "X", "error": m }),
                };
                j["problem"] = json!(r.name);
                j
            })
            .collect(),
    )
}
