//! Certificate nodes: a rule name, its parameters, the arithmetic checks it
//! performed and the sub-claims it still depends on.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::json::{int_value, value_int};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
}

impl Op {
    pub fn eval(self, lhs: i128, rhs: i128) -> bool {
        match self {
            Op::Eq => lhs == rhs,
            Op::Ge => lhs >= rhs,
            Op::Gt => lhs > rhs,
            Op::Le => lhs <= rhs,
            Op::Lt => lhs < rhs,
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Op::Eq => "==",
            Op::Ge => ">=",
            Op::Gt => ">",
            Op::Le => "<=",
            Op::Lt => "<",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: Value,
    pub rhs: Value,
    pub op: Op,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, lhs: i128, op: Op, rhs: i128) -> Self {
        Check {
            name: name.into(),
            lhs: int_value(lhs),
            rhs: int_value(rhs),
            op,
            pass: op.eval(lhs, rhs),
        }
    }

    /// Re-evaluates the comparison; `None` if an operand is not an integer.
    pub fn replay(&self) -> Option<bool> {
        Some(self.op.eval(value_int(&self.lhs)?, value_int(&self.rhs)?))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} {} {}", self.name, self.lhs, self.op, self.rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Discharge {
    Arithmetic,
    AhAxiom,
    XuAxiom,
    HighdimTheorem,
    Oracle,
    Assumption,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub rule: String,
    pub params: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub subclaims: Vec<Node>,
    pub discharge: Discharge,
}

impl Node {
    pub fn new(rule: impl Into<String>, discharge: Discharge) -> Self {
        Node {
            rule: rule.into(),
            params: BTreeMap::new(),
            checks: Vec::new(),
            subclaims: Vec::new(),
            discharge,
        }
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), v.into());
        self
    }

    pub fn int(mut self, key: &str, v: impl Into<i128>) -> Self {
        self.params.insert(key.to_string(), int_value(v.into()));
        self
    }

    pub fn ints(mut self, key: &str, vs: impl IntoIterator<Item = i64>) -> Self {
        let list = vs.into_iter().map(|v| int_value(v as i128)).collect();
        self.params.insert(key.to_string(), Value::Array(list));
        self
    }

    /// Appends a check and returns whether it passed.
    pub fn check(&mut self, name: &str, lhs: impl Into<i128>, op: Op, rhs: impl Into<i128>) -> bool {
        let c = Check::new(name, lhs.into(), op, rhs.into());
        let pass = c.pass;
        self.checks.push(c);
        pass
    }

    pub fn sub(mut self, child: Node) -> Self {
        self.subclaims.push(child);
        self
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Depth-first walk including `self`.
    pub fn walk(&self) -> Vec<&Node> {
        let mut out = vec![self];
        for c in &self.subclaims {
            out.extend(c.walk());
        }
        out
    }

    /// Every recorded check replays to `pass == true` throughout the tree.
    pub fn replay_all(&self) -> Result<(), String> {
        for node in self.walk() {
            for c in &node.checks {
                match c.replay() {
                    Some(v) if v == c.pass && v => {}
                    Some(_) => return Err(format!("check '{}' in {} does not hold", c, node.rule)),
                    None => return Err(format!("check '{}' in {} has a non-integer operand", c.name, node.rule)),
                }
            }
        }
        Ok(())
    }
}
