//! The line-based circuit text format.
//!
//! ```text
//! ring Q
//! input x1 x2
//! g1 = const -1
//! g2 = mul x1 g1
//! output g2
//! ```
//!
//! Gate kinds: `const <int|a/b|y>`, `ratconst [n0,n1,..]/[d0,d1,..]`,
//! `add`, `mul`, `divc`, `var <name>`. Operands may name inputs directly.

use super::{Circuit, CircuitError, Gate, GateId};
use crate::ring::{RatFunc, RingTag, Scalar, UniPoly};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::HashMap;
use std::fmt::Write as _;

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

fn parse_coeff_list(s: &str) -> Option<UniPoly> {
    let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?;
    if inner.trim().is_empty() {
        return Some(UniPoly::zero());
    }
    let coeffs = inner.split(',').map(parse_rational).collect::<Option<Vec<_>>>()?;
    Some(UniPoly::from_coeffs(coeffs))
}

pub fn parse_ratconst(s: &str) -> Option<RatFunc> {
    let idx = s.find("]/[")?;
    let num = parse_coeff_list(&s[..=idx])?;
    let den = parse_coeff_list(&s[idx + 2..])?;
    RatFunc::new(num, den)
}

pub fn format_ratconst(f: &RatFunc) -> String {
    format!("{}/{}", f.numerator(), f.denominator())
}

pub fn parse_ring(spec: &str) -> Option<RingTag> {
    let spec = spec.trim();
    match spec {
        "Z" => Some(RingTag::IntegerRing),
        "Q" => Some(RingTag::RationalField),
        "Q(y)" => Some(RingTag::RationalFunctionField),
        _ => {
            let p = spec.strip_prefix("GF")?.trim();
            RingTag::prime_field(p.parse().ok()?).ok()
        }
    }
}

pub fn parse(text: &str) -> Result<Circuit, CircuitError> {
    let syntax = |line: usize, message: &str| CircuitError::SyntaxError { line, message: message.to_string() };
    let mut ring: Option<RingTag> = None;
    let mut var_names: Vec<String> = Vec::new();
    let mut inputs: HashMap<String, usize> = HashMap::new();
    let mut gates: Vec<Gate> = Vec::new();
    let mut names: HashMap<String, GateId> = HashMap::new();
    let mut implicit_vars: HashMap<usize, GateId> = HashMap::new();
    let mut outputs: Option<Vec<GateId>> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if outputs.is_some() {
            return Err(syntax(line_no, "content after output line"));
        }
        let mut words = line.split_whitespace();
        let head = words.next().unwrap();
        if head == "ring" {
            if ring.is_some() {
                return Err(syntax(line_no, "duplicate ring line"));
            }
            let spec = line["ring".len()..].trim();
            ring = Some(parse_ring(spec).ok_or_else(|| syntax(line_no, "unknown ring"))?);
            continue;
        }
        let ring_ref = ring.as_ref().ok_or_else(|| syntax(line_no, "expected `ring` header"))?;
        let mut resolve = |name: &str, gates: &mut Vec<Gate>| -> Result<GateId, CircuitError> {
            if let Some(&id) = names.get(name) {
                return Ok(id);
            }
            if let Some(&vi) = inputs.get(name) {
                let id = *implicit_vars.entry(vi).or_insert_with(|| {
                    gates.push(Gate::Var(vi));
                    gates.len() - 1
                });
                return Ok(id);
            }
            Err(CircuitError::UnknownGateRef { line: line_no, name: name.to_string() })
        };
        match head {
            "input" => {
                for w in words {
                    if inputs.contains_key(w) || names.contains_key(w) {
                        return Err(syntax(line_no, &format!("duplicate name {w}")));
                    }
                    inputs.insert(w.to_string(), var_names.len());
                    var_names.push(w.to_string());
                }
            }
            "output" => {
                let outs = words.map(|w| resolve(w, &mut gates)).collect::<Result<Vec<_>, _>>()?;
                outputs = Some(outs);
            }
            name => {
                if words.next() != Some("=") {
                    return Err(syntax(line_no, "expected `<name> = <gate>`"));
                }
                if names.contains_key(name) || inputs.contains_key(name) {
                    return Err(syntax(line_no, &format!("duplicate name {name}")));
                }
                let kind = words.next().ok_or_else(|| syntax(line_no, "missing gate kind"))?;
                let args: Vec<&str> = words.collect();
                let gate = match (kind, args.as_slice()) {
                    ("const", [v]) => {
                        if *v == "y" {
                            Gate::Const(Scalar::y())
                        } else {
                            let r = parse_rational(v).ok_or_else(|| syntax(line_no, "bad constant"))?;
                            Gate::Const(Scalar::Rational(r))
                        }
                    }
                    ("ratconst", [v]) => {
                        let f = parse_ratconst(v).ok_or_else(|| syntax(line_no, "bad rational function"))?;
                        if !matches!(ring_ref, RingTag::RationalFunctionField) {
                            return Err(syntax(line_no, "ratconst requires ring Q(y)"));
                        }
                        Gate::Const(Scalar::Function(f))
                    }
                    ("var", [v]) => {
                        let vi = *inputs.get(*v).ok_or_else(|| syntax(line_no, &format!("undeclared input {v}")))?;
                        Gate::Var(vi)
                    }
                    ("add" | "mul" | "divc", [a, b]) => {
                        let a = resolve(a, &mut gates)?;
                        let b = resolve(b, &mut gates)?;
                        match kind {
                            "add" => Gate::Add(a, b),
                            "mul" => Gate::Mul(a, b),
                            _ => Gate::DivConst(a, b),
                        }
                    }
                    _ => return Err(syntax(line_no, &format!("malformed `{kind}` gate"))),
                };
                gates.push(gate);
                names.insert(name.to_string(), gates.len() - 1);
            }
        }
    }
    let ring = ring.ok_or_else(|| syntax(1, "missing `ring` header"))?;
    let outputs = outputs.ok_or_else(|| syntax(text.lines().count().max(1), "missing `output` line"))?;
    Circuit::build(ring, gates, outputs, var_names)
}

pub fn serialize(c: &Circuit) -> String {
    let mut s = String::new();
    writeln!(s, "ring {}", c.ring()).unwrap();
    if c.num_vars() > 0 {
        writeln!(s, "input {}", c.var_names().join(" ")).unwrap();
    }
    let name = |id: GateId| format!("g{}", id + 1);
    for (id, g) in c.gates().iter().enumerate() {
        let body = match g {
            Gate::Var(i) => format!("var {}", c.var_names()[*i]),
            Gate::Const(Scalar::Rational(r)) => format!("const {r}"),
            Gate::Const(Scalar::Function(f)) if f.is_y() => "const y".to_string(),
            Gate::Const(Scalar::Function(f)) => format!("ratconst {}", format_ratconst(f)),
            Gate::Add(a, b) => format!("add {} {}", name(*a), name(*b)),
            Gate::Mul(a, b) => format!("mul {} {}", name(*a), name(*b)),
            Gate::DivConst(a, b) => format!("divc {} {}", name(*a), name(*b)),
        };
        writeln!(s, "{} = {}", name(id), body).unwrap();
    }
    let outs: Vec<String> = c.outputs().iter().map(|&o| name(o)).collect();
    writeln!(s, "output {}", outs.join(" ")).unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{evaluate, Assignment};

    #[test]
    fn parse_minus_x() {
        let c = parse("ring Q\ninput x1\ng1 = const -1\ng2 = mul x1 g1\noutput g2").unwrap();
        assert_eq!(evaluate(&c, &Assignment::from_ints(&[5])).unwrap(), vec![Scalar::int(-5)]);
    }

    #[test]
    fn forward_reference_is_unknown() {
        let e = parse("ring Z\ng1 = add g2 g2\ng2 = const 1\noutput g1").unwrap_err();
        assert_eq!(e, CircuitError::UnknownGateRef { line: 2, name: "g2".into() });
    }

    #[test]
    fn round_trip_with_ratconst() {
        let text = "ring Q(y)\ninput x1\ng1 = const y\ng2 = ratconst [1]/[2,1]\ng3 = mul g1 g2\ng4 = add g3 x1\noutput g4 g3\n";
        let c = parse(text).unwrap();
        let back = parse(&serialize(&c)).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn syntax_error_carries_line() {
        let e = parse("ring Z\n\ng1 = frob\noutput g1").unwrap_err();
        assert!(matches!(e, CircuitError::SyntaxError { line: 3, .. }));
    }

    #[test]
    fn rings_parse() {
        assert_eq!(parse_ring("GF 7"), Some(RingTag::PrimeField(7.into())));
        assert_eq!(parse_ring("GF 8"), None);
        assert_eq!(parse_ring("Q(y)"), Some(RingTag::RationalFunctionField));
    }
}
