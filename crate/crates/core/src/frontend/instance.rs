//! Generated instance families.

use super::FrontendError;
use crate::circuit::CircuitBuilder;
use crate::proof_cps::InequalitySystem;
use crate::proof_ips::AxiomSystem;
use crate::ring::{RingTag, Scalar};
use num_bigint::BigInt;
use num_traits::{One, Signed};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// `sum 2^(i-1) x_i + M = 0`.
    Bvp { n: usize, m: BigInt },
    /// `x_1 + ... + x_n - r = 0`.
    SymmetricSubsetSum { n: usize, r: BigInt },
    Cnf { file: String },
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub family: Family,
    pub axioms: Option<AxiomSystem>,
    pub inequalities: Option<InequalitySystem>,
}

fn linear(names: &[String], coeffs: &[BigInt], constant: &BigInt) -> crate::circuit::Circuit {
    let mut b = CircuitBuilder::with_vars(RingTag::IntegerRing, names);
    let mut terms = Vec::new();
    for (i, a) in coeffs.iter().enumerate() {
        let x = b.var_at(i);
        let k = b.constant(Scalar::from_bigint(a.clone()));
        terms.push(b.mul(k, x));
    }
    terms.push(b.constant(Scalar::from_bigint(constant.clone())));
    let s = b.sum(&terms);
    b.finish_pruned(vec![s]).expect("valid circuit")
}

pub fn gen_instance(family: &Family) -> Result<Instance, FrontendError> {
    let (n, coeffs, constant, name) = match family {
        Family::Bvp { n, m } => {
            if *n == 0 || !m.is_positive() {
                return Err(FrontendError::BadParams(format!("bvp needs n >= 1 and M >= 1, got n = {n}, M = {m}")));
            }
            let c: Vec<BigInt> = (0..*n).map(|i| BigInt::one() << i).collect();
            (*n, c, m.clone(), format!("bvp-{n}-{m}"))
        }
        Family::SymmetricSubsetSum { n, r } => {
            if *n == 0 {
                return Err(FrontendError::BadParams("symmetric-subset-sum needs n >= 1".into()));
            }
            (*n, vec![BigInt::one(); *n], -r.clone(), format!("symmetric-subset-sum-{n}-{r}"))
        }
        _ => return Err(FrontendError::BadParams("family is not generated".into())),
    };
    let names = crate::frontend::cnf::var_names(n);
    let f = linear(&names, &coeffs, &constant);
    let axioms = AxiomSystem::new(RingTag::IntegerRing, names.clone(), vec![f.clone()], true)?;
    let inequalities = InequalitySystem::from_equations(RingTag::IntegerRing, names, &[f], true)?;
    Ok(Instance { name, family: family.clone(), axioms: Some(axioms), inequalities: Some(inequalities) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pit::{expand_rational, DEFAULT_TERM_BUDGET};
    use crate::pit::parse_poly;

    #[test]
    fn bvp3() {
        let i = gen_instance(&Family::Bvp { n: 3, m: 1.into() }).unwrap();
        let s = i.axioms.unwrap();
        let p = expand_rational(&s.axioms()[0], DEFAULT_TERM_BUDGET).unwrap().remove(0);
        assert_eq!(p, parse_poly("x1 + 2*x2 + 4*x3 + 1", s.var_names()).unwrap());
    }

    #[test]
    fn subset_sum() {
        let i = gen_instance(&Family::SymmetricSubsetSum { n: 4, r: 5.into() }).unwrap();
        let s = i.axioms.unwrap();
        let p = expand_rational(&s.axioms()[0], DEFAULT_TERM_BUDGET).unwrap().remove(0);
        assert_eq!(p, parse_poly("x1 + x2 + x3 + x4 + -5", s.var_names()).unwrap());
    }

    #[test]
    fn bad_params() {
        assert!(matches!(gen_instance(&Family::Bvp { n: 0, m: 1.into() }), Err(FrontendError::BadParams(_))));
    }
}
