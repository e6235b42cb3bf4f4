//! The `algproof` command line.

use super::cnf::{cnf_ingest, CnfMode};
use super::files::{self, Doc};
use super::instance::{gen_instance, Family};
use super::report::Report;
use super::FrontendError;
use crate::bitblast::{build_bits, val_of_bits};
use crate::circuit::text::{parse, serialize};
use crate::circuit::{evaluate, Assignment, Circuit};
use crate::pit::{PitMode, PitPolicy, PitVerdict, DEFAULT_TERM_BUDGET};
use crate::proof_cps::ls::{ls_to_cps, verify_ls};
use crate::proof_cps::ps::{ps_to_cps, verify_ps};
use crate::proof_cps::{conic_check, gen_bvp_cps, ips_to_cps, verify_cps, CpsError, CpsProof};
use crate::proof_ips::{is_placeholder_name, ns_sweep, verify_ips, verify_ips_lin, NsOutcome};
use crate::ratfunc_cert::{denominator_root_census, gen_cert, verify_qy, DEFAULT_COEFF_BUDGET};
use crate::ring::RingTag;
use crate::transforms::{minus_normalize, q_to_z_lift, tau_gadget, SplitMode, TauKind};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "algproof", version, about = "Check and build algebraic and semi-algebraic refutations")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Identity testing: exact expansion, random evaluation, or exact within budget.
    #[arg(long, global = true, value_enum, default_value = "auto")]
    pub pit: PitArg,
    /// Random evaluation trials (default: enough for a 2^-64 bound).
    #[arg(long, global = true)]
    pub trials: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: FormatArg,
    /// Syntactic length budget for bit-blasting.
    #[arg(long, global = true, default_value_t = crate::bitblast::DEFAULT_LENGTH_BUDGET)]
    pub budget_bits: usize,
    /// Record wall-clock timings in the report.
    #[arg(long, global = true)]
    pub timings: bool,
    /// Write the produced artifact here instead of stdout.
    #[arg(short, long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PitArg {
    Exact,
    Random,
    Auto,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatArg {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitArg {
    Real,
    Boolean,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Equations,
    Inequalities,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyArg {
    Bvp,
    SymmetricSubsetSum,
    Cnf,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    VerifyIps { file: Option<PathBuf> },
    /// Accepts `ipslin` and `qycert` files.
    VerifyIpslin { file: Option<PathBuf> },
    VerifyCps { file: Option<PathBuf> },
    VerifyPs { file: Option<PathBuf> },
    VerifyLs { file: Option<PathBuf> },
    /// Checks a circuit file; placeholder-named inputs are protected by default.
    ConicCheck {
        file: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        protected: Option<Vec<String>>,
    },
    Compile {
        #[arg(value_parser = ["ips->cps", "ps->cps", "ls->cps"])]
        what: String,
        file: Option<PathBuf>,
    },
    Bitblast {
        file: Option<PathBuf>,
        /// Compare VAL(BITS(f)) with f on all of {0,1}^n.
        #[arg(long)]
        check_exhaustive: Option<usize>,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    Lift { file: Option<PathBuf> },
    Split {
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "real")]
        mode: SplitArg,
    },
    #[command(subcommand)]
    Gen(GenCmd),
    NsSearch {
        file: Option<PathBuf>,
        /// Largest cofactor degree tried.
        #[arg(long, default_value_t = 4)]
        degree: u32,
    },
    RootCensus {
        file: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        coeffs: Option<Vec<u64>>,
    },
}

#[derive(Subcommand, Debug)]
pub enum GenCmd {
    BvpCps {
        #[arg(short)]
        n: usize,
        #[arg(short = 'M', default_value = "1")]
        m: BigInt,
    },
    IpslinQy {
        #[arg(long, value_delimiter = ',', required = true)]
        coeffs: Vec<u64>,
    },
    Instance {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(short)]
        n: Option<usize>,
        #[arg(short = 'M', default_value = "1")]
        m: BigInt,
        #[arg(short)]
        r: Option<BigInt>,
        #[arg(long)]
        cnf: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "equations")]
        mode: ModeArg,
    },
    TauGadget {
        #[arg(long, conflicts_with_all = ["pow2", "pow"])]
        int: Option<BigInt>,
        #[arg(long)]
        pow2: Option<u64>,
        /// Base of `base^(2^k)`; needs `--k`.
        #[arg(long, requires = "k")]
        pow: Option<BigInt>,
        #[arg(long)]
        k: Option<u32>,
    },
}

struct Ctx<'a> {
    policy: PitPolicy,
    budget_bits: usize,
    stdin: &'a mut dyn Read,
}

impl Ctx<'_> {
    fn input(&mut self, file: &Option<PathBuf>) -> Result<(String, Option<PathBuf>), FrontendError> {
        match file {
            Some(p) if p.as_os_str() != "-" => Ok((files::read_text(p)?, p.parent().map(Path::to_path_buf))),
            _ => {
                let mut s = String::new();
                self.stdin.read_to_string(&mut s).map_err(|e| FrontendError::Io(format!("stdin: {e}")))?;
                Ok((s, None))
            }
        }
    }

    fn doc(&mut self, file: &Option<PathBuf>) -> Result<Doc, FrontendError> {
        let (text, base) = self.input(file)?;
        Doc::parse(&text, base.as_deref())
    }

    fn circuit(&mut self, file: &Option<PathBuf>) -> Result<Circuit, FrontendError> {
        Ok(parse(&self.input(file)?.0)?)
    }
}

fn policy(g: &Global) -> PitPolicy {
    match (g.pit, g.trials) {
        (PitArg::Exact, _) => PitPolicy::exact(),
        (PitArg::Random, Some(t)) => PitPolicy::randomized_trials(t, g.seed),
        (PitArg::Random, None) => PitPolicy::randomized(g.seed),
        (PitArg::Auto, _) => PitPolicy::Auto { budget: DEFAULT_TERM_BUDGET, seed: g.seed },
    }
}

fn pit_details(r: &mut Report, key: &str, v: &PitVerdict) {
    match &v.mode {
        PitMode::Exact => r.detail(&format!("{key}.pit"), "exact"),
        PitMode::Randomized { trials, field_size, error_bound } => r
            .detail(&format!("{key}.pit"), "randomized")
            .detail(&format!("{key}.trials"), *trials)
            .detail(&format!("{key}.field_size"), field_size.to_string())
            .detail(&format!("{key}.error_bound"), error_bound.to_string()),
    };
    if let Some(w) = &v.witness {
        let pt: Vec<String> = w.point.iter().map(|(n, x)| format!("{n}={x}")).collect();
        r.detail(&format!("{key}.witness"), format!("output {} mod {} at {}", w.output, w.modulus, pt.join(",")));
    }
}

fn cps_verdict(r: &mut Report, p: &CpsProof, policy: &PitPolicy) -> Result<(), FrontendError> {
    r.size("proof", p.size()).size("inequalities", p.system.len());
    r.detail("mode", if p.real_mode { "real" } else { "boolean" });
    match verify_cps(p, policy) {
        Ok(v) => {
            pit_details(r, "identity", &v);
            if v.equal {
                r.accept();
            } else {
                r.reject("the proof does not compute the target");
            }
        }
        Err(CpsError::ConicViolation(c)) => {
            r.detail("bad_path", json!(c.bad_path));
            r.reject(format!("not conic: {c}"));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

type Artifact = Option<String>;

fn execute(cli: &Cli, ctx: &mut Ctx, r: &mut Report) -> Result<Artifact, FrontendError> {
    let policy = ctx.policy.clone();
    match &cli.cmd {
        Cmd::VerifyIps { file } => {
            let p = files::ips_from(&ctx.doc(file)?)?;
            r.size("proof", p.size());
            let v = verify_ips(&p, &policy)?;
            pit_details(r, "vanishes", &v.vanishes);
            pit_details(r, "derives_target", &v.derives_target);
            if let Some(c) = &v.refutes_with {
                r.detail("refutes_with", c.to_string());
            }
            if !v.vanishes.equal {
                r.reject("C(x, 0, 0) is not zero");
            } else if !v.derives_target.equal {
                r.reject("C(x, F, x^2 - x) differs from the target");
            } else {
                r.accept();
            }
            Ok(None)
        }
        Cmd::VerifyIpslin { file } => {
            let doc = ctx.doc(file)?;
            let v = if doc.kind == "qycert" {
                let c = files::qycert_from(&doc)?;
                r.size("cofactors", c.size());
                verify_qy(&c)?
            } else {
                let (sys, cert) = files::ipslin_from(&doc)?;
                r.size("cofactors", cert.size());
                verify_ips_lin(&cert, &sys, &policy)?
            };
            pit_details(r, "identity", &v);
            if v.equal {
                r.accept();
            } else {
                r.reject("sum F_i H_i is not 1");
            }
            Ok(None)
        }
        Cmd::VerifyCps { file } => {
            let p = files::cps_from(&ctx.doc(file)?)?;
            cps_verdict(r, &p, &policy)?;
            Ok(None)
        }
        Cmd::VerifyPs { file } => {
            let (sys, p) = files::ps_from(&ctx.doc(file)?)?;
            r.size("monomials", p.monomial_size());
            if verify_ps(&p, &sys)? {
                r.accept();
            } else {
                r.reject("the refutation does not sum to -1");
            }
            Ok(None)
        }
        Cmd::VerifyLs { file } => {
            let (sys, d) = files::ls_from(&ctx.doc(file)?)?;
            r.size("lines", d.lines.len()).size("monomials", d.monomial_size());
            match verify_ls(&d, &sys) {
                Ok(()) => r.accept(),
                Err(e) => r.reject(e.to_string()),
            }
            Ok(None)
        }
        Cmd::ConicCheck { file, protected } => {
            let c = ctx.circuit(file)?;
            let prot: Vec<String> = match protected {
                Some(p) => p.clone(),
                None => c.var_names().iter().filter(|n| is_placeholder_name(n)).cloned().collect(),
            };
            r.size("circuit", c.size()).detail("protected", json!(prot));
            let v = conic_check(&c, &prot);
            if v.conic {
                r.accept();
            } else {
                r.detail("bad_path", json!(v.bad_path));
                r.reject(v.to_string());
            }
            Ok(None)
        }
        Cmd::Compile { what, file } => {
            let doc = ctx.doc(file)?;
            let p = match what.as_str() {
                "ips->cps" => {
                    let ips = if doc.kind == "ipslin" {
                        let (sys, cert) = files::ipslin_from(&doc)?;
                        cert.to_proof(&sys)?
                    } else {
                        files::ips_from(&doc)?
                    };
                    r.size("input", ips.size());
                    ips_to_cps(&ips, &policy)?
                }
                "ps->cps" => {
                    let (sys, ps) = files::ps_from(&doc)?;
                    r.size("input", ps.monomial_size());
                    ps_to_cps(&ps, &sys)?
                }
                _ => {
                    let (sys, d) = files::ls_from(&doc)?;
                    r.size("input", d.monomial_size());
                    ls_to_cps(&d, &sys)?
                }
            };
            cps_verdict(r, &p, &policy)?;
            Ok(Some(files::write_cps(&p)))
        }
        Cmd::Bitblast { file, check_exhaustive, emit } => {
            let f = ctx.circuit(file)?;
            let bb = build_bits(&f, ctx.budget_bits)?;
            let t = bb.max_length();
            r.size("input", f.size()).size("bits", bb.circuit.size()).size("max_length", t);
            r.detail("widths", json!(bb.widths));
            r.detail("size_ratio", bb.circuit.size() as f64 / ((t * t).max(1) * f.size().max(1)) as f64);
            r.accept();
            if let Some(n) = *check_exhaustive {
                if n != f.num_vars() || n > 20 {
                    return Err(FrontendError::BadParams(format!("--check-exhaustive {n} needs n = {} and n <= 20", f.num_vars())));
                }
                let val = val_of_bits(&bb);
                for mask in 0..(1u64 << n) {
                    let pt = Assignment::from_mask(mask, n);
                    if evaluate(&val, &pt)? != evaluate(&f, &pt)? {
                        r.reject(format!("VAL(BITS(f)) differs from f at mask {mask:#x}"));
                        break;
                    }
                }
                r.detail("checked_points", 1u64 << n);
            }
            if let Some(path) = emit {
                std::fs::write(path, serialize(&bb.circuit)).map_err(|e| FrontendError::Io(format!("{}: {e}", path.display())))?;
            }
            Ok(None)
        }
        Cmd::Lift { file } => {
            let c = ctx.circuit(file)?;
            let l = q_to_z_lift(&c)?;
            r.size("input", c.size()).size("lifted", l.lifted.size()).size("combined", l.combined_size);
            r.detail("m", l.m.to_string());
            r.detail("ratio", l.combined_size as f64 / c.size().max(1) as f64);
            r.accept();
            Ok(Some(serialize(&l.lifted)))
        }
        Cmd::Split { file, mode } => {
            let c = ctx.circuit(file)?;
            let m = match mode {
                SplitArg::Real => SplitMode::Real,
                SplitArg::Boolean => SplitMode::Boolean,
            };
            let s = minus_normalize(&c, m)?;
            r.size("input", c.size()).size("pos", s.pos.size()).size("neg", s.neg.size()).size("combined", s.combined.size());
            r.accept();
            Ok(Some(serialize(&s.combined)))
        }
        Cmd::Gen(g) => gen(g, r),
        Cmd::NsSearch { file, degree } => {
            let sys = files::system_from(&ctx.doc(file)?)?;
            r.detail("max_degree", *degree);
            match ns_sweep(&sys, *degree)? {
                NsOutcome::Found { degree, cert } => {
                    let sys = if sys.ring() == &RingTag::IntegerRing { sys.with_ring(RingTag::RationalField)? } else { sys };
                    let v = verify_ips_lin(&cert, &sys, &PitPolicy::exact())?;
                    r.detail("degree", degree).size("cofactors", cert.size());
                    if v.equal {
                        r.accept();
                    } else {
                        r.reject("found certificate failed re-verification");
                    }
                    Ok(Some(files::write_ipslin(&sys, &cert)))
                }
                NsOutcome::NoneAtDegree(d) => {
                    r.reject(format!("no certificate with cofactors of degree <= {d}"));
                    Ok(None)
                }
            }
        }
        Cmd::RootCensus { file, coeffs } => {
            let cert = match coeffs {
                Some(a) => gen_cert(a, DEFAULT_COEFF_BUDGET)?,
                None => files::qycert_from(&ctx.doc(file)?)?,
            };
            match denominator_root_census(&cert) {
                Ok(c) => {
                    r.detail("degree", c.degree).size("q", c.q.size());
                    r.detail("roots", json!(c.roots.iter().map(|k| k.to_string()).collect::<Vec<_>>()));
                    let max_p = c.decomposition_sizes.iter().map(|s| s.0).max().unwrap_or(0);
                    let max_q = c.decomposition_sizes.iter().map(|s| s.1).max().unwrap_or(0);
                    r.size("max_p", max_p).size("max_q", max_q);
                    r.accept();
                }
                Err(e @ crate::ratfunc_cert::QyError::MissingRoot(_)) => r.reject(e.to_string()),
                Err(e) => return Err(e.into()),
            }
            Ok(None)
        }
    }
}

fn gen(g: &GenCmd, r: &mut Report) -> Result<Artifact, FrontendError> {
    match g {
        GenCmd::BvpCps { n, m } => {
            if *n == 0 || m < &BigInt::from(1) {
                return Err(FrontendError::BadParams(format!("need n >= 1 and M >= 1, got n = {n}, M = {m}")));
            }
            let p = gen_bvp_cps(*n, m)?;
            r.size("proof", p.size());
            Ok(Some(files::write_cps(&p)))
        }
        GenCmd::IpslinQy { coeffs } => {
            let c = gen_cert(coeffs, DEFAULT_COEFF_BUDGET)?;
            r.size("cofactors", c.size());
            Ok(Some(files::write_qycert(&c)))
        }
        GenCmd::Instance { family, n, m, r: rr, cnf, mode } => {
            let need_n = || n.ok_or_else(|| FrontendError::BadParams("missing -n".into()));
            let inst = match family {
                FamilyArg::Bvp => gen_instance(&Family::Bvp { n: need_n()?, m: m.clone() })?,
                FamilyArg::SymmetricSubsetSum => {
                    let n = need_n()?;
                    let rr = rr.clone().unwrap_or_else(|| BigInt::from(n + 1));
                    gen_instance(&Family::SymmetricSubsetSum { n, r: rr })?
                }
                FamilyArg::Cnf => {
                    let path = cnf.as_ref().ok_or_else(|| FrontendError::BadParams("missing --cnf".into()))?;
                    let m = match mode {
                        ModeArg::Equations => CnfMode::Equations,
                        ModeArg::Inequalities => CnfMode::Inequalities,
                    };
                    cnf_ingest(&files::read_text(path)?, m, &path.display().to_string())?
                }
            };
            r.detail("instance", inst.name.clone());
            let text = match (mode, &inst.axioms, &inst.inequalities) {
                (ModeArg::Equations, Some(a), _) => files::write_system(a),
                (_, _, Some(i)) => files::write_ineqs(i),
                (_, Some(a), None) => files::write_system(a),
                (_, None, None) => unreachable!("instances carry a system"),
            };
            Ok(Some(text))
        }
        GenCmd::TauGadget { int, pow2, pow, k } => {
            let kind = match (int, pow2, pow) {
                (Some(m), None, None) => TauKind::Int(m.clone()),
                (None, Some(n), None) => TauKind::Pow2(*n),
                (None, None, Some(b)) => TauKind::Pow { base: b.clone(), k: k.unwrap_or(0) },
                _ => return Err(FrontendError::BadParams("give exactly one of --int, --pow2, --pow".into())),
            };
            let c = tau_gadget(&kind);
            r.size("circuit", c.size());
            Ok(Some(serialize(&c)))
        }
    }
}

/// Runs one invocation and returns the exit code: 0 accept, 1 reject, 2 usage or input error.
pub fn run(args: &[String], stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    let mut report = Report::new(args.iter().skip(1).cloned().collect(), cli.global.seed);
    let mut ctx = Ctx { policy: policy(&cli.global), budget_bits: cli.global.budget_bits, stdin };
    let start = Instant::now();
    let artifact = match execute(&cli, &mut ctx, &mut report) {
        Ok(a) => a,
        Err(e) if e.is_input_error() => {
            report.error(e.to_string());
            None
        }
        Err(e) => {
            report.reject(e.to_string());
            None
        }
    };
    if cli.global.timings {
        report.timing("total", start.elapsed().as_secs_f64() * 1e3);
    }
    let text = match cli.global.format {
        FormatArg::Json => report.to_json(),
        FormatArg::Text => report.to_text(),
    };
    let mut report_to_stdout = true;
    if let Some(a) = artifact {
        match &cli.global.out {
            Some(p) => {
                if let Err(e) = std::fs::write(p, a) {
                    let _ = writeln!(stderr, "{}: {e}", p.display());
                    return 2;
                }
            }
            None => {
                let _ = stdout.write_all(a.as_bytes());
                report_to_stdout = false;
            }
        }
    }
    let sink: &mut dyn Write = if report_to_stdout { stdout } else { stderr };
    let _ = sink.write_all(text.as_bytes());
    report.verdict.exit_code()
}
