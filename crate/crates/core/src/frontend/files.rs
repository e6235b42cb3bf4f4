//! Line-based proof and system files.
//!
//! The first word names the kind (`system`, `ineqs`, `ips`, `ipslin`, `cps`,
//! `ps`, `ls`, `qycert`). Then come directive lines (`ring Q`, `vars x1 x2`,
//! ...) and circuit blocks opened by `begin <role> [args]` and closed by `end`.
//! `include <path>` splices the directives and blocks of another file, which
//! is how a proof refers to its system. `#` starts a comment outside blocks.

use super::FrontendError;
use crate::circuit::text::{parse, parse_ring, serialize};
use crate::circuit::Circuit;
use crate::pit::{parse_poly, Poly};
use crate::proof_cps::ls::{Justification, LsDerivation, PolySystem};
use crate::proof_cps::ps::{ConeTerm, PsRefutation, PsSystem};
use crate::proof_cps::{CpsProof, InequalitySystem, Provenance};
use crate::proof_ips::{AxiomSystem, IpsLinCert, IpsProof};
use crate::ratfunc_cert::{qy_system, QyCert};
use crate::ring::RingTag;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Directive {
    pub key: String,
    pub rest: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub role: String,
    pub args: Vec<String>,
    pub text: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Doc {
    pub kind: String,
    pub directives: Vec<Directive>,
    pub blocks: Vec<Block>,
}

fn syntax(line: usize, msg: impl Into<String>) -> FrontendError {
    FrontendError::Syntax { line, message: msg.into() }
}

impl Doc {
    /// Parses `text`; `include` paths resolve against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Doc, FrontendError> {
        let mut doc = Doc::default();
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        while let Some((n, raw)) = lines.next() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line.split_once(char::is_whitespace).map(|(k, r)| (k, r.trim())).unwrap_or((line, ""));
            if doc.kind.is_empty() {
                if !rest.is_empty() {
                    return Err(syntax(n, "expected the file kind on the first line"));
                }
                doc.kind = key.to_string();
                continue;
            }
            match key {
                "begin" => {
                    let mut words = rest.split_whitespace();
                    let role = words.next().ok_or_else(|| syntax(n, "`begin` needs a role"))?.to_string();
                    let args = words.map(String::from).collect();
                    let mut body = String::new();
                    let mut closed = false;
                    for (_, l) in lines.by_ref() {
                        if l.trim() == "end" {
                            closed = true;
                            break;
                        }
                        body.push_str(l);
                        body.push('\n');
                    }
                    if !closed {
                        return Err(syntax(n, "unterminated block"));
                    }
                    doc.blocks.push(Block { role, args, text: body, line: n });
                }
                "include" => {
                    let path = match base {
                        Some(b) => b.join(rest),
                        None => PathBuf::from(rest),
                    };
                    let inner = read_doc(&path)?;
                    doc.directives.extend(inner.directives);
                    doc.blocks.extend(inner.blocks);
                }
                _ => doc.directives.push(Directive { key: key.to_string(), rest: rest.to_string(), line: n }),
            }
        }
        if doc.kind.is_empty() {
            return Err(syntax(1, "empty file"));
        }
        Ok(doc)
    }

    pub fn expect_kind(&self, kinds: &[&str]) -> Result<(), FrontendError> {
        if kinds.contains(&self.kind.as_str()) {
            Ok(())
        } else {
            Err(FrontendError::WrongKind { expected: kinds.join("|"), found: self.kind.clone() })
        }
    }

    pub fn get(&self, key: &str) -> Option<&Directive> {
        self.directives.iter().find(|d| d.key == key)
    }

    pub fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a Directive> + 'a {
        self.directives.iter().filter(move |d| d.key == key)
    }

    pub fn blocks<'a>(&'a self, role: &'a str) -> impl Iterator<Item = &'a Block> + 'a {
        self.blocks.iter().filter(move |b| b.role == role)
    }

    fn ring(&self) -> Result<RingTag, FrontendError> {
        let d = self.get("ring").ok_or_else(|| FrontendError::Missing("`ring` directive".into()))?;
        parse_ring(&d.rest).ok_or_else(|| syntax(d.line, format!("unknown ring `{}`", d.rest)))
    }

    fn vars(&self) -> Vec<String> {
        self.get("vars").map(|d| d.rest.split_whitespace().map(String::from).collect()).unwrap_or_default()
    }

    fn flag(&self, key: &str) -> Result<bool, FrontendError> {
        match self.get(key) {
            None => Ok(false),
            Some(d) => match d.rest.as_str() {
                "yes" | "true" | "" => Ok(true),
                "no" | "false" => Ok(false),
                other => Err(syntax(d.line, format!("expected yes/no, got `{other}`"))),
            },
        }
    }

    fn circuit(b: &Block) -> Result<Circuit, FrontendError> {
        parse(&b.text).map_err(|e| FrontendError::Block { line: b.line, source: e })
    }

    fn one(&self, role: &str) -> Result<Circuit, FrontendError> {
        let b = self.blocks(role).next().ok_or_else(|| FrontendError::Missing(format!("`{role}` block")))?;
        Self::circuit(b)
    }
}

pub fn read_text(path: &Path) -> Result<String, FrontendError> {
    std::fs::read_to_string(path).map_err(|e| FrontendError::Io(format!("{}: {e}", path.display())))
}

pub fn read_doc(path: &Path) -> Result<Doc, FrontendError> {
    Doc::parse(&read_text(path)?, path.parent())
}

fn block(out: &mut String, role: &str, args: &str, c: &Circuit) {
    if args.is_empty() {
        writeln!(out, "begin {role}").unwrap();
    } else {
        writeln!(out, "begin {role} {args}").unwrap();
    }
    out.push_str(&serialize(c));
    if !out.ends_with('\n') {
        out.push('\n');
    }
    out.push_str("end\n");
}

// ---- axiom systems and IPS proofs ----

pub fn system_from(doc: &Doc) -> Result<AxiomSystem, FrontendError> {
    let axioms = doc.blocks("axiom").map(Doc::circuit).collect::<Result<Vec<_>, _>>()?;
    Ok(AxiomSystem::new(doc.ring()?, doc.vars(), axioms, doc.flag("boolean")?)?)
}

fn write_system_body(out: &mut String, s: &AxiomSystem) {
    writeln!(out, "ring {}", s.ring()).unwrap();
    writeln!(out, "vars {}", s.var_names().join(" ")).unwrap();
    writeln!(out, "boolean {}", if s.include_boolean() { "yes" } else { "no" }).unwrap();
    for a in s.axioms() {
        block(out, "axiom", "", a);
    }
}

pub fn write_system(s: &AxiomSystem) -> String {
    let mut out = String::from("system\n");
    write_system_body(&mut out, s);
    out
}

pub fn ips_from(doc: &Doc) -> Result<IpsProof, FrontendError> {
    doc.expect_kind(&["ips"])?;
    Ok(IpsProof { system: system_from(doc)?, circuit: doc.one("proof")?, target: doc.one("target")? })
}

pub fn write_ips(p: &IpsProof) -> String {
    let mut out = String::from("ips\n");
    write_system_body(&mut out, &p.system);
    block(&mut out, "proof", "", &p.circuit);
    block(&mut out, "target", "", &p.target);
    out
}

pub fn ipslin_from(doc: &Doc) -> Result<(AxiomSystem, IpsLinCert), FrontendError> {
    doc.expect_kind(&["ipslin"])?;
    let cofactors = doc.blocks("cofactor").map(Doc::circuit).collect::<Result<Vec<_>, _>>()?;
    Ok((system_from(doc)?, IpsLinCert { cofactors }))
}

pub fn write_ipslin(s: &AxiomSystem, c: &IpsLinCert) -> String {
    let mut out = String::from("ipslin\n");
    write_system_body(&mut out, s);
    for h in &c.cofactors {
        block(&mut out, "cofactor", "", h);
    }
    out
}

pub fn qycert_from(doc: &Doc) -> Result<QyCert, FrontendError> {
    doc.expect_kind(&["qycert"])?;
    let d = doc.get("coeffs").ok_or_else(|| FrontendError::Missing("`coeffs` directive".into()))?;
    let coefficients = d
        .rest
        .split_whitespace()
        .map(|w| w.parse::<BigInt>().map_err(|_| syntax(d.line, format!("bad coefficient `{w}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let cofactors = doc.blocks("cofactor").map(Doc::circuit).collect::<Result<Vec<_>, _>>()?;
    Ok(QyCert { system: qy_system(&coefficients)?, coefficients, cofactors })
}

pub fn write_qycert(c: &QyCert) -> String {
    let mut out = String::from("qycert\n");
    let cs: Vec<String> = c.coefficients.iter().map(|a| a.to_string()).collect();
    writeln!(out, "coeffs {}", cs.join(" ")).unwrap();
    for h in &c.cofactors {
        block(&mut out, "cofactor", "", h);
    }
    out
}

// ---- inequality systems and CPS proofs ----

pub fn ineqs_from(doc: &Doc) -> Result<InequalitySystem, FrontendError> {
    let mut ineqs = Vec::new();
    let mut prov = Vec::new();
    for b in doc.blocks("ineq") {
        let tag = b.args.first().map(String::as_str).unwrap_or("ineq");
        prov.push(Provenance::from_tag(tag).ok_or_else(|| syntax(b.line, format!("unknown provenance `{tag}`")))?);
        ineqs.push(Doc::circuit(b)?);
    }
    Ok(InequalitySystem::new(doc.ring()?, doc.vars(), ineqs, prov)?)
}

fn write_ineqs_body(out: &mut String, s: &InequalitySystem) {
    writeln!(out, "ring {}", s.ring()).unwrap();
    writeln!(out, "vars {}", s.var_names().join(" ")).unwrap();
    for (h, p) in s.ineqs().iter().zip(s.provenance()) {
        block(out, "ineq", p.tag(), h);
    }
}

pub fn write_ineqs(s: &InequalitySystem) -> String {
    let mut out = String::from("ineqs\n");
    write_ineqs_body(&mut out, s);
    out
}

pub fn cps_from(doc: &Doc) -> Result<CpsProof, FrontendError> {
    doc.expect_kind(&["cps"])?;
    let real_mode = match doc.get("mode").map(|d| d.rest.as_str()) {
        Some("real") => true,
        Some("boolean") | None => false,
        Some(o) => return Err(syntax(doc.get("mode").unwrap().line, format!("unknown mode `{o}`"))),
    };
    Ok(CpsProof { system: ineqs_from(doc)?, circuit: doc.one("proof")?, target: doc.one("target")?, real_mode })
}

pub fn write_cps(p: &CpsProof) -> String {
    let mut out = String::from("cps\n");
    writeln!(out, "mode {}", if p.real_mode { "real" } else { "boolean" }).unwrap();
    write_ineqs_body(&mut out, &p.system);
    block(&mut out, "proof", "", &p.circuit);
    block(&mut out, "target", "", &p.target);
    out
}

// ---- PS and LS listings ----

fn poly(d: &Directive, s: &str, names: &[String]) -> Result<Poly, FrontendError> {
    parse_poly(s, names).map_err(|e| syntax(d.line, e))
}

fn index(d: &Directive, s: &str) -> Result<usize, FrontendError> {
    s.trim().parse().map_err(|_| syntax(d.line, format!("bad index `{s}`")))
}

/// `eq <poly>`, `ineq <poly>`, `cofactor <poly>` (one per equation, in
/// order), `sos yes|no` and one cone term per line:
/// `term <j,k,...|-> | <c> : <s> | <c> : <s> ...`.
pub fn ps_from(doc: &Doc) -> Result<(PsSystem, PsRefutation), FrontendError> {
    doc.expect_kind(&["ps"])?;
    let names = doc.vars();
    let mut sys = PsSystem { var_names: names.clone(), equations: vec![], inequalities: vec![] };
    let mut r = PsRefutation { ideal_cofactors: vec![], cone_terms: vec![], sos_restricted: doc.flag("sos")? };
    for d in &doc.directives {
        match d.key.as_str() {
            "eq" => sys.equations.push(poly(d, &d.rest, &names)?),
            "ineq" => sys.inequalities.push(poly(d, &d.rest, &names)?),
            "cofactor" => r.ideal_cofactors.push(poly(d, &d.rest, &names)?),
            "term" => {
                let mut parts = d.rest.split('|');
                let head = parts.next().unwrap_or("").trim();
                let subset = if head == "-" || head.is_empty() {
                    vec![]
                } else {
                    head.split(',').map(|s| index(d, s)).collect::<Result<Vec<_>, _>>()?
                };
                let mut squares = Vec::new();
                for p in parts {
                    let (c, s) = p.split_once(':').ok_or_else(|| syntax(d.line, "expected `<c> : <poly>`"))?;
                    let c = crate::circuit::text::parse_rational(c.trim()).ok_or_else(|| syntax(d.line, format!("bad weight `{}`", c.trim())))?;
                    squares.push((c, poly(d, s, &names)?));
                }
                r.cone_terms.push(ConeTerm { subset, squares });
            }
            "vars" | "sos" => {}
            k => return Err(syntax(d.line, format!("unknown directive `{k}`"))),
        }
    }
    Ok((sys, r))
}

pub fn write_ps(sys: &PsSystem, r: &PsRefutation) -> String {
    let n = &sys.var_names;
    let mut out = String::from("ps\n");
    writeln!(out, "vars {}", n.join(" ")).unwrap();
    writeln!(out, "sos {}", if r.sos_restricted { "yes" } else { "no" }).unwrap();
    for f in &sys.equations {
        writeln!(out, "eq {}", f.format(n)).unwrap();
    }
    for h in &sys.inequalities {
        writeln!(out, "ineq {}", h.format(n)).unwrap();
    }
    for p in &r.ideal_cofactors {
        writeln!(out, "cofactor {}", p.format(n)).unwrap();
    }
    for t in &r.cone_terms {
        let head = if t.subset.is_empty() {
            "-".to_string()
        } else {
            t.subset.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(",")
        };
        write!(out, "term {head}").unwrap();
        for (c, s) in &t.squares {
            write!(out, " | {c} : {}", s.format(n)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// `ineq <poly>`, `eq <poly>` (two inequalities), `boolean` (four per
/// variable), then `line <poly> | <rule>` with rules `axiom k`,
/// `square <poly>`, `sum i j`, `scale i a`, `product i j`.
pub fn ls_from(doc: &Doc) -> Result<(PolySystem, LsDerivation), FrontendError> {
    doc.expect_kind(&["ls"])?;
    let names = doc.vars();
    let mut sys = PolySystem::user(names.clone(), vec![]);
    let mut der = LsDerivation::default();
    for d in &doc.directives {
        match d.key.as_str() {
            "ineq" => {
                sys.polys.push(poly(d, &d.rest, &names)?);
                sys.provenance.push(Provenance::UserIneq);
            }
            "eq" => sys.push_equation(poly(d, &d.rest, &names)?),
            "boolean" => sys.push_boolean(),
            "line" => {
                let (p, rule) = d.rest.split_once('|').ok_or_else(|| syntax(d.line, "expected `<poly> | <rule>`"))?;
                let p = poly(d, p, &names)?;
                let rule = rule.trim();
                let (name, args) = rule.split_once(char::is_whitespace).unwrap_or((rule, ""));
                let w: Vec<&str> = args.split_whitespace().collect();
                let two = |w: &[&str]| -> Result<(usize, usize), FrontendError> {
                    match w {
                        [a, b] => Ok((index(d, a)?, index(d, b)?)),
                        _ => Err(syntax(d.line, "expected two line indices")),
                    }
                };
                let j = match name {
                    "axiom" => Justification::Axiom(index(d, args)?),
                    "square" => Justification::SquareAxiom(poly(d, args, &names)?),
                    "sum" => {
                        let (a, b) = two(&w)?;
                        Justification::Sum(a, b)
                    }
                    "product" => {
                        let (a, b) = two(&w)?;
                        Justification::Product(a, b)
                    }
                    "scale" => match w.as_slice() {
                        [i, a] => Justification::ScaleNonneg(index(d, i)?, a.parse().map_err(|_| syntax(d.line, format!("bad scalar `{a}`")))?),
                        _ => return Err(syntax(d.line, "expected `scale <line> <int>`")),
                    },
                    o => return Err(syntax(d.line, format!("unknown rule `{o}`"))),
                };
                der.push(p, j);
            }
            "vars" => {}
            k => return Err(syntax(d.line, format!("unknown directive `{k}`"))),
        }
    }
    Ok((sys, der))
}

pub fn write_ls(sys: &PolySystem, d: &LsDerivation) -> String {
    let n = &sys.var_names;
    let mut out = String::from("ls\n");
    writeln!(out, "vars {}", n.join(" ")).unwrap();
    let mut boolean = false;
    for (p, t) in sys.polys.iter().zip(&sys.provenance) {
        match t {
            Provenance::EqPos => writeln!(out, "eq {}", p.format(n)).unwrap(),
            Provenance::UserIneq => writeln!(out, "ineq {}", p.format(n)).unwrap(),
            Provenance::BoolX if !boolean => {
                boolean = true;
                writeln!(out, "boolean").unwrap();
            }
            _ => {}
        }
    }
    for l in &d.lines {
        let rule = match &l.rule {
            Justification::Axiom(k) => format!("axiom {k}"),
            Justification::SquareAxiom(h) => format!("square {}", h.format(n)),
            Justification::Sum(i, j) => format!("sum {i} {j}"),
            Justification::ScaleNonneg(i, a) => format!("scale {i} {a}"),
            Justification::Product(i, j) => format!("product {i} {j}"),
        };
        writeln!(out, "line {} | {rule}", l.poly.format(n)).unwrap();
    }
    out
}

/// Reads a plain circuit file or stdin text.
pub fn circuit_from_text(text: &str) -> Result<Circuit, FrontendError> {
    Ok(parse(text)?)
}

/// A rational written as `a` or `a/b`.
pub fn rational(s: &str) -> Option<BigRational> {
    crate::circuit::text::parse_rational(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof_cps::gen_bvp_cps;
    use crate::proof_cps::ps::bvp_sos;

    #[test]
    fn cps_round_trip() {
        let p = gen_bvp_cps(3, &BigInt::from(1)).unwrap();
        let text = write_cps(&p);
        let q = cps_from(&Doc::parse(&text, None).unwrap()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn ps_round_trip() {
        let (sys, r) = bvp_sos(4);
        let text = write_ps(&sys, &r);
        let (s2, r2) = ps_from(&Doc::parse(&text, None).unwrap()).unwrap();
        assert_eq!(sys, s2);
        assert_eq!(r, r2);
    }

    #[test]
    fn blocks_and_comments() {
        let d = Doc::parse("system # kind\nring Q\nvars x1\nbegin axiom\nring Q\ninput x1\noutput x1\nend\n", None).unwrap();
        let s = system_from(&d).unwrap();
        assert_eq!(s.axioms().len(), 1);
        assert_eq!(system_from(&Doc::parse(&write_system(&s), None).unwrap()).unwrap(), s);
        assert!(matches!(Doc::parse("system\nbegin axiom\n", None), Err(FrontendError::Syntax { .. })));
    }
}
