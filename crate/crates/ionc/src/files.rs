//! On-disk document formats. Instances and solution sets are stored as JSON
//! with variable names; node indices are an internal detail. Any co-measured
//! pair not listed in an input is implicitly absent.

use crate::error::{Error, Result};
use crate::graph::{Dag, Universe, VarSet};
use crate::instance::Instance;
use crate::projection::InputGraph;
use crate::solver::{SolutionSet, SolveStatus};
use serde::{Deserialize, Serialize};
use std::time::Duration;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputGraphDoc {
    pub vars: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub directed: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bidirected: Vec<(String, String)>,
}

/// An instance document: the variable universe and one entry per input
/// graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub variables: Vec<String>,
    pub inputs: Vec<InputGraphDoc>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        let u = inst.universe();
        let name = |v: usize| u.name(v).to_string();
        InstanceFile {
            variables: u.names().to_vec(),
            inputs: inst
                .inputs()
                .iter()
                .map(|g| InputGraphDoc {
                    vars: g.vars().iter().map(name).collect(),
                    directed: g.directed_edges().map(|(x, y)| (name(x), name(y))).collect(),
                    bidirected: g
                        .bidirected_pairs()
                        .map(|(x, y)| (name(x), name(y)))
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        let universe = Universe::new(self.variables.clone())?;
        let resolve = |name: &str| {
            universe
                .index_of(name)
                .ok_or_else(|| Error::Schema(format!("unknown variable {name:?}")))
        };
        let mut inputs = Vec::new();
        for doc in &self.inputs {
            let mut vars = VarSet::empty();
            for v in &doc.vars {
                vars.insert(resolve(v)?);
            }
            let mut directed = Vec::new();
            for (a, b) in &doc.directed {
                directed.push((resolve(a)?, resolve(b)?));
            }
            let mut bidirected = Vec::new();
            for (a, b) in &doc.bidirected {
                bidirected.push((resolve(a)?, resolve(b)?));
            }
            inputs.push(InputGraph::new(vars, &directed, &bidirected)?);
        }
        Instance::new(universe, inputs)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance documents always serialize")
    }
}

/// A solution-set document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionsFile {
    pub variables: Vec<String>,
    pub status: SolveStatus,
    pub elapsed_s: f64,
    pub solutions: Vec<Vec<(String, String)>>,
}

impl SolutionsFile {
    pub fn from_solution_set(universe: &Universe, set: &SolutionSet) -> Self {
        let name = |v: usize| universe.name(v).to_string();
        SolutionsFile {
            variables: universe.names().to_vec(),
            status: set.status,
            elapsed_s: set.elapsed.as_secs_f64(),
            solutions: set
                .solutions
                .iter()
                .map(|g| g.edges().into_iter().map(|(x, y)| (name(x), name(y))).collect())
                .collect(),
        }
    }

    pub fn to_solution_set(&self) -> Result<(Universe, SolutionSet)> {
        let universe = Universe::new(self.variables.clone())?;
        let resolve = |name: &str| {
            universe
                .index_of(name)
                .ok_or_else(|| Error::Schema(format!("unknown variable {name:?}")))
        };
        let mut solutions = Vec::new();
        for doc in &self.solutions {
            let mut edges = Vec::new();
            for (a, b) in doc {
                edges.push((resolve(a)?, resolve(b)?));
            }
            solutions.push(Dag::new(universe.len(), &edges)?);
        }
        solutions.sort_unstable();
        solutions.dedup();
        Ok((
            universe,
            SolutionSet {
                solutions,
                status: self.status,
                elapsed: Duration::from_secs_f64(self.elapsed_s),
                explored: 0,
            },
        ))
    }

    /// The single DAG in a one-solution document, as used for ground-truth
    /// files.
    pub fn to_single_dag(&self) -> Result<(Universe, Dag)> {
        let (universe, set) = self.to_solution_set()?;
        match <[Dag; 1]>::try_from(set.solutions) {
            Ok([dag]) => Ok((universe, dag)),
            Err(sols) => Err(Error::Schema(format!(
                "expected exactly one graph, found {}",
                sols.len()
            ))),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution documents always serialize")
    }
}
