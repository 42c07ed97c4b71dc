//! Measured-versus-bound records collected by every certified run.

use serde::{Deserialize, Serialize};

use crate::geometry::SLACK;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// `measured <= bound`, with numeric slack.
    #[serde(rename = "<=")]
    Le,
    /// `measured < bound`, exact.
    #[serde(rename = "<")]
    Lt,
    /// `measured >= bound`, with numeric slack.
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn holds(self, measured: f64, bound: f64) -> bool {
        match self {
            Relation::Le => measured <= bound + SLACK,
            Relation::Lt => measured < bound,
            Relation::Ge => measured >= bound - SLACK,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub bound: f64,
    pub holds: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, relation: Relation, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            relation,
            bound,
            holds: relation.holds(measured, bound),
        }
    }

    pub fn le(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(name, measured, Relation::Le, bound)
    }

    pub fn lt(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(name, measured, Relation::Lt, bound)
    }

    pub fn ge(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(name, measured, Relation::Ge, bound)
    }
}

pub fn all_hold(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.holds)
}

pub fn failing(checks: &[Check]) -> Vec<&str> {
    checks.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect()
}
