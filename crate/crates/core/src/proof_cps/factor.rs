//! Writing a circuit as `sum_i y_i * C_i` over placeholder variables.

use super::CpsError;
use crate::circuit::{Circuit, CircuitBuilder, Gate, GateId};
use crate::pit::{is_zero, PitPolicy};

/// `c = sum_i y_i * quotients[i] + residual`, where `residual` is `c` with all
/// the placeholders set to zero. Every part keeps the variables of `c`.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub quotients: Vec<Circuit>,
    pub residual: Circuit,
    /// All parts as outputs of one circuit, quotients first.
    pub combined: Circuit,
}

/// Peels placeholders off one at a time. For each gate the pair
/// `(g|_{y=0}, q)` with `g = g|_{y=0} + y*q` is propagated by the sum and
/// product rules; unknown placeholder names get a zero quotient.
pub fn factor_out(c: &Circuit, placeholders: &[&str]) -> Result<Factorization, CpsError> {
    if c.outputs().len() != 1 {
        return Err(CpsError::OutputCount(c.outputs().len()));
    }
    let mut b = CircuitBuilder::with_vars(c.ring().clone(), c.var_names());
    let mut base: Vec<GateId> = b.graft(c, &[]);
    let mut quotient_ids = Vec::with_capacity(placeholders.len());
    for name in placeholders {
        let Some(v) = c.var_index(name) else {
            quotient_ids.push(b.zero());
            continue;
        };
        let zero = b.zero();
        let one = b.one();
        let mut at_zero: Vec<GateId> = Vec::with_capacity(c.size());
        let mut quot: Vec<GateId> = Vec::with_capacity(c.size());
        for (id, g) in c.gates().iter().enumerate() {
            let (z, q) = match g {
                Gate::Var(i) if *i == v => (zero, one),
                Gate::Var(_) | Gate::Const(_) => (base[id], zero),
                Gate::Add(x, y) => (b.add(at_zero[*x], at_zero[*y]), b.add(quot[*x], quot[*y])),
                Gate::Mul(x, y) => {
                    let z = b.mul(at_zero[*x], at_zero[*y]);
                    let l = b.mul(quot[*x], base[*y]);
                    let r = b.mul(at_zero[*x], quot[*y]);
                    (z, b.add(l, r))
                }
                Gate::DivConst(x, d) => (b.div_const(at_zero[*x], base[*d]), b.div_const(quot[*x], base[*d])),
            };
            at_zero.push(z);
            quot.push(q);
        }
        quotient_ids.push(quot[c.output()]);
        base = at_zero;
    }
    let mut outs = quotient_ids.clone();
    outs.push(base[c.output()]);
    let combined = b.finish(outs)?.pruned();
    let k = placeholders.len();
    let quotients = (0..k).map(|i| combined.restrict_outputs(&[combined.outputs()[i]])).collect();
    let residual = combined.restrict_outputs(&[combined.outputs()[k]]);
    Ok(Factorization { quotients, residual, combined })
}

/// [`factor_out`], requiring the residual to be the zero polynomial.
pub fn factor_placeholders(c: &Circuit, placeholders: &[&str], policy: &PitPolicy) -> Result<Factorization, CpsError> {
    let f = factor_out(c, placeholders)?;
    if !is_zero(&f.residual, policy)?.equal {
        return Err(CpsError::NotInPlaceholderIdeal);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::text::parse;
    use crate::circuit::CircuitBuilder;
    use crate::pit::pit_equal;

    fn reassemble(c: &Circuit, names: &[&str], f: &Factorization) -> Circuit {
        let mut b = CircuitBuilder::with_vars(c.ring().clone(), c.var_names());
        let mut terms = Vec::new();
        for (n, q) in names.iter().zip(&f.quotients) {
            let y = b.var(n);
            let qo = b.import(q)[0];
            terms.push(b.mul(y, qo));
        }
        let s = b.sum(&terms);
        b.finish(vec![s]).unwrap()
    }

    #[test]
    fn linear_in_placeholders() {
        let c = parse("ring Z\ninput x y1 y2\np = mul y1 x\ns = add p y2\noutput s").unwrap();
        let f = factor_placeholders(&c, &["y1", "y2"], &PitPolicy::exact()).unwrap();
        let x = parse("ring Z\ninput x\noutput x").unwrap();
        assert!(pit_equal(&f.quotients[0], &x, &PitPolicy::exact()).unwrap().equal);
        let one = parse("ring Z\no = const 1\noutput o").unwrap();
        assert!(pit_equal(&f.quotients[1], &one, &PitPolicy::exact()).unwrap().equal);
    }

    #[test]
    fn product_of_placeholders() {
        let c = parse("ring Z\ninput y1 y2\np = mul y1 y2\noutput p").unwrap();
        let f = factor_placeholders(&c, &["y1", "y2"], &PitPolicy::exact()).unwrap();
        let back = reassemble(&c, &["y1", "y2"], &f);
        assert!(pit_equal(&back, &c, &PitPolicy::exact()).unwrap().equal);
    }

    #[test]
    fn constant_term_rejected() {
        let c = parse("ring Z\ninput y1\no = const 1\ns = add y1 o\noutput s").unwrap();
        assert!(matches!(
            factor_placeholders(&c, &["y1"], &PitPolicy::exact()),
            Err(CpsError::NotInPlaceholderIdeal)
        ));
    }

    #[test]
    fn squares_and_division() {
        let c = parse("ring Q\ninput x y1 y2\na = add x y1\nb = mul a y2\nq = mul b b\nt = const 3\nd = divc q t\noutput d").unwrap();
        let f = factor_placeholders(&c, &["y1", "y2"], &PitPolicy::exact()).unwrap();
        let back = reassemble(&c, &["y1", "y2"], &f);
        assert!(pit_equal(&back, &c, &PitPolicy::exact()).unwrap().equal);
        assert!(f.combined.size() <= 8 * c.size() * 2);
    }
}
