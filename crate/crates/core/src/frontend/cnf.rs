//! DIMACS CNF input and its two polynomial translations.

use super::instance::{Family, Instance};
use super::FrontendError;
use crate::circuit::{Circuit, CircuitBuilder};
use crate::proof_cps::{boolean_ineqs, InequalitySystem, Provenance};
use crate::proof_ips::AxiomSystem;
use crate::ring::RingTag;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    /// Nonzero literals; `-v` is the negation of variable `v`.
    pub clauses: Vec<Vec<i64>>,
}

impl Cnf {
    pub fn satisfied_by(&self, a: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| a[l.unsigned_abs() as usize - 1] == (l > 0)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnfMode {
    Equations,
    Inequalities,
}

fn bad(line: usize) -> FrontendError {
    FrontendError::DimacsSyntax(line)
}

pub fn parse_dimacs(text: &str) -> Result<Cnf, FrontendError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line == "%" {
            continue;
        }
        if line.starts_with('p') {
            let w: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() || w.len() != 4 || w[1] != "cnf" {
                return Err(bad(n));
            }
            header = Some((w[2].parse().map_err(|_| bad(n))?, w[3].parse().map_err(|_| bad(n))?));
            continue;
        }
        let (vars, _) = header.ok_or_else(|| bad(n))?;
        for tok in line.split_whitespace() {
            let l: i64 = tok.parse().map_err(|_| bad(n))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if l.unsigned_abs() as usize > vars {
                return Err(bad(n));
            } else {
                current.push(l);
            }
        }
    }
    let (num_vars, _) = header.ok_or_else(|| bad(text.lines().count().max(1)))?;
    if !current.is_empty() {
        clauses.push(current);
    }
    Ok(Cnf { num_vars, clauses })
}

pub fn var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// `prod_{x in C} (1 - x) * prod_{not x in C} x`, left unexpanded.
pub fn clause_equation(names: &[String], clause: &[i64]) -> Circuit {
    let mut b = CircuitBuilder::with_vars(RingTag::IntegerRing, names);
    let one = b.one();
    let factors: Vec<_> = clause
        .iter()
        .map(|&l| {
            let x = b.var_at(l.unsigned_abs() as usize - 1);
            if l > 0 {
                b.sub(one, x)
            } else {
                x
            }
        })
        .collect();
    let p = b.product(&factors);
    b.finish_pruned(vec![p]).expect("valid circuit")
}

/// `sum_{x in C} x + sum_{not x in C} (1 - x) - 1`.
pub fn clause_inequality(names: &[String], clause: &[i64]) -> Circuit {
    let mut b = CircuitBuilder::with_vars(RingTag::IntegerRing, names);
    let one = b.one();
    let mut terms: Vec<_> = clause
        .iter()
        .map(|&l| {
            let x = b.var_at(l.unsigned_abs() as usize - 1);
            if l > 0 {
                x
            } else {
                b.sub(one, x)
            }
        })
        .collect();
    terms.push(b.minus_one());
    let s = b.sum(&terms);
    b.finish_pruned(vec![s]).expect("valid circuit")
}

pub fn cnf_instance(cnf: &Cnf, mode: CnfMode, name: &str) -> Result<Instance, FrontendError> {
    let names = var_names(cnf.num_vars);
    let family = Family::Cnf { file: name.to_string() };
    match mode {
        CnfMode::Equations => {
            let axioms = cnf.clauses.iter().map(|c| clause_equation(&names, c)).collect();
            let sys = AxiomSystem::new(RingTag::IntegerRing, names, axioms, true)?;
            Ok(Instance { name: name.to_string(), family, axioms: Some(sys), inequalities: None })
        }
        CnfMode::Inequalities => {
            let mut ineqs: Vec<Circuit> = cnf.clauses.iter().map(|c| clause_inequality(&names, c)).collect();
            let mut prov = vec![Provenance::UserIneq; ineqs.len()];
            for v in &names {
                for (c, t) in boolean_ineqs(&RingTag::IntegerRing, v)? {
                    ineqs.push(c);
                    prov.push(t);
                }
            }
            let sys = InequalitySystem::new(RingTag::IntegerRing, names, ineqs, prov)?;
            Ok(Instance { name: name.to_string(), family, axioms: None, inequalities: Some(sys) })
        }
    }
}

pub fn cnf_ingest(text: &str, mode: CnfMode, name: &str) -> Result<Instance, FrontendError> {
    cnf_instance(&parse_dimacs(text)?, mode, name)
}
