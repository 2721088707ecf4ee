//! ASP-Core-2 emission of an instance, and parsing of external answer-set
//! output back into a solution set. Enables differential testing against any
//! external grounder/solver; this crate never invokes one itself.

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::instance::Instance;
use crate::solver::{SolutionSet, SolveStatus};
use std::fmt::Write;

/// Which rule block to emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmitMode {
    /// The rule block exactly as published, with no integrity constraint
    /// binding input `bidirected/3` facts to the solution.
    StrictListing,
    /// Additionally enforces input bidirected facts: no directed relation
    /// on the pair, and a causal connection must exist.
    Augmented,
}

/// The solution-space rules: a choice rule over edges, self-loop/absence/
/// acyclicity constraints, the projection fixpoints, and the integrity
/// constraints tying inputs to the candidate graph.
const RULES: &str = "{edge(X,Y)} :- node(X), node(Y).

:- edge(X,Y), X = Y.
:- edge(X,Y), nedge(X,Y,T), varin(T,X), varin(T,Y).
:- edge(X,Y), path(Y,X).

path(Y,X) :- edge(Y,X).
path(Y,X) :- edge(Y,Z), path(Z,X).

directed(X,Y,T) :- edge(X,Y), varin(T,Y).
directed(X,Y,T) :- edge(X,Z), directed(Z,Y,T), not varin(T,Z).

causalconn(X,Y,T) :- directed(X,Y,T).
causalconn(X,Y,T) :- directed(Z,X,T), directed(Z,Y,T), not varin(T,Z).
bidirected(X,Y,T) :- causalconn(X,Y,T), not directed(X,Y,T).

:- nedge(X,Y,T), causalconn(X,Y,T), varin(T,X), varin(T,Y).
:- edge(X,Y,T), not directed(X,Y,T), varin(T,X), varin(T,Y).

#show edge/2.
";

const AUGMENTED_RULES: &str = ":- bidirected(X,Y,T), directed(X,Y,T).
:- bidirected(X,Y,T), not causalconn(X,Y,T).
";

/// Render the instance as a complete ASP program: constants and facts
/// followed by the rule block. Facts are sorted by (tag, x, y) within each
/// predicate; `bidirected` and `nedge` facts are written in both argument
/// orders. Output is deterministic.
pub fn emit_program(inst: &Instance, mode: EmitMode) -> String {
    let mut out = String::new();
    writeln!(out, "#const n = {}.", inst.n() - 1).unwrap();
    writeln!(out, "node(0..n).").unwrap();

    for (t, input) in inst.inputs().iter().enumerate() {
        for v in input.vars().iter() {
            writeln!(out, "varin({t},{v}).").unwrap();
        }
    }
    for (t, input) in inst.inputs().iter().enumerate() {
        for (x, y) in input.directed_edges() {
            writeln!(out, "edge({x},{y},{t}).").unwrap();
        }
    }
    for (t, input) in inst.inputs().iter().enumerate() {
        let mut facts: Vec<(usize, usize)> = Vec::new();
        for (x, y) in input.bidirected_pairs() {
            facts.push((x, y));
            facts.push((y, x));
        }
        facts.sort_unstable();
        for (x, y) in facts {
            writeln!(out, "bidirected({x},{y},{t}).").unwrap();
        }
    }
    for (t, input) in inst.inputs().iter().enumerate() {
        let mut facts: Vec<(usize, usize)> = Vec::new();
        for (x, y) in input.absent_pairs() {
            facts.push((x, y));
            facts.push((y, x));
        }
        facts.sort_unstable();
        for (x, y) in facts {
            writeln!(out, "nedge({x},{y},{t}).").unwrap();
        }
    }

    out.push('\n');
    out.push_str(RULES);
    if mode == EmitMode::Augmented {
        out.push_str(AUGMENTED_RULES);
    }
    out
}

/// Parse conventional answer-set solver output: each `Answer: k` header is
/// followed by one line of space-separated `edge(i,j)` atoms (possibly
/// empty); an `UNSATISFIABLE` marker denotes an empty result.
pub fn parse_answer_sets(text: &str, n: usize) -> Result<SolutionSet> {
    let mut solutions: Vec<Dag> = Vec::new();
    let mut unsat = false;
    let mut lines = text.lines().enumerate().peekable();
    while let Some((_, line)) = lines.next() {
        let trimmed = line.trim();
        if trimmed == "UNSATISFIABLE" {
            unsat = true;
            continue;
        }
        if !trimmed.starts_with("Answer:") {
            continue;
        }
        let mut edges: Vec<(usize, usize)> = Vec::new();
        if let Some(&(atom_lineno, atom_line)) = lines.peek() {
            // The atom line always follows the header, even when empty.
            lines.next();
            for token in atom_line.split_whitespace() {
                edges.push(parse_edge_atom(token, n, atom_lineno + 1)?);
            }
        }
        solutions.push(Dag::new(n, &edges).map_err(|e| Error::AnswerParse {
            line: 0,
            msg: format!("answer set is not a DAG: {e}"),
        })?);
    }
    if unsat && !solutions.is_empty() {
        return Err(Error::AnswerParse {
            line: 0,
            msg: "output declares UNSATISFIABLE but contains answer sets".into(),
        });
    }
    solutions.sort_unstable();
    solutions.dedup();
    let status = if unsat || solutions.is_empty() {
        SolveStatus::Unsatisfiable
    } else {
        SolveStatus::Complete
    };
    Ok(SolutionSet {
        solutions,
        status,
        elapsed: std::time::Duration::ZERO,
        explored: 0,
    })
}

fn parse_edge_atom(token: &str, n: usize, line: usize) -> Result<(usize, usize)> {
    let bad = |msg: String| Error::AnswerParse { line, msg };
    let inner = token
        .strip_prefix("edge(")
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| bad(format!("unrecognized atom {token:?}")))?;
    let (a, b) = inner
        .split_once(',')
        .ok_or_else(|| bad(format!("malformed edge atom {token:?}")))?;
    let x: usize = a
        .trim()
        .parse()
        .map_err(|_| bad(format!("bad node index in {token:?}")))?;
    let y: usize = b
        .trim()
        .parse()
        .map_err(|_| bad(format!("bad node index in {token:?}")))?;
    if x >= n || y >= n {
        return Err(bad(format!(
            "atom {token:?} references a node >= {n}"
        )));
    }
    Ok((x, y))
}
