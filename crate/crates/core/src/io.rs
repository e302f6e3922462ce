//! The JSON problem-file format: named agents and resources, hierarchy and
//! resource order given as levels or explicit matrices, a 0/1 request
//! matrix, the lifting key, and optional named allocations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::plausibility::LiftingKind;
use crate::problem::{binary_matrix, Allocation, Problem};
use crate::relations::TotalPreorder;

/// A preorder written either as ordered name levels (highest first) or as an
/// explicit 0/1 relation matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderSpec {
    Levels(Vec<Vec<String>>),
    Matrix(Vec<Vec<u8>>),
}

/// On-disk problem document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub agents: Vec<String>,
    pub hierarchy: OrderSpec,
    pub resources: Vec<String>,
    pub resource_order: OrderSpec,
    pub requests: Vec<Vec<u8>>,
    pub plausibility: LiftingKind,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub allocations: BTreeMap<String, Vec<Vec<u8>>>,
}

/// A problem with its name tables and validated named allocations.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledProblem {
    pub problem: Problem,
    pub agent_names: Vec<String>,
    pub resource_names: Vec<String>,
    pub allocations: BTreeMap<String, Allocation>,
}

impl CompiledProblem {
    pub fn agent_name(&self, i: usize) -> &str {
        &self.agent_names[i]
    }

    pub fn resource_name(&self, r: usize) -> &str {
        &self.resource_names[r]
    }

    pub fn allocation(&self, name: &str) -> Result<&Allocation, Error> {
        self.allocations
            .get(name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }
}

fn name_index(names: &[String]) -> Result<BTreeMap<&str, usize>, Error> {
    let mut index = BTreeMap::new();
    for (i, name) in names.iter().enumerate() {
        if index.insert(name.as_str(), i).is_some() {
            return Err(Error::DuplicateName(name.clone()));
        }
    }
    Ok(index)
}

fn compile_order(spec: &OrderSpec, names: &[String]) -> Result<TotalPreorder, Error> {
    match spec {
        OrderSpec::Matrix(rows) => {
            if rows.len() != names.len() {
                return Err(Error::ShapeMismatch {
                    expected_rows: names.len(),
                    expected_cols: names.len(),
                    rows: rows.len(),
                    cols: rows.first().map_or(0, Vec::len),
                });
            }
            TotalPreorder::from_matrix(&binary_matrix(rows)?)
        }
        OrderSpec::Levels(levels) => {
            let index = name_index(names)?;
            let mut level_indices = Vec::with_capacity(levels.len());
            for level in levels {
                let mut out = Vec::with_capacity(level.len());
                for name in level {
                    out.push(
                        *index
                            .get(name.as_str())
                            .ok_or_else(|| Error::UnknownName(name.clone()))?,
                    );
                }
                level_indices.push(out);
            }
            let total: usize = level_indices.iter().map(Vec::len).sum();
            if total != names.len() {
                return Err(Error::Parse(format!(
                    "levels mention {total} names but {} are declared",
                    names.len()
                )));
            }
            TotalPreorder::from_levels(&level_indices)
        }
    }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    /// Validates the document and resolves names to indices.
    pub fn compile(&self) -> Result<CompiledProblem, Error> {
        name_index(&self.agents)?;
        name_index(&self.resources)?;
        let hierarchy = compile_order(&self.hierarchy, &self.agents)?;
        let resource_order = compile_order(&self.resource_order, &self.resources)?;
        let requests = binary_matrix(&self.requests)?;
        let problem = Problem::new(hierarchy, resource_order, requests, self.plausibility)?;

        let mut allocations = BTreeMap::new();
        for (name, rows) in &self.allocations {
            let allocation = Allocation::from_matrix(rows)?;
            if allocation.agents() != problem.agents()
                || allocation.resources() != problem.resources()
            {
                return Err(Error::ShapeMismatch {
                    expected_rows: problem.agents(),
                    expected_cols: problem.resources(),
                    rows: allocation.agents(),
                    cols: allocation.resources(),
                });
            }
            allocations.insert(name.clone(), allocation);
        }
        Ok(CompiledProblem {
            problem,
            agent_names: self.agents.clone(),
            resource_names: self.resources.clone(),
            allocations,
        })
    }
}

/// Parses and compiles a problem document in one step.
pub fn load_problem(text: &str) -> Result<CompiledProblem, Error> {
    ProblemFile::parse(text)?.compile()
}
