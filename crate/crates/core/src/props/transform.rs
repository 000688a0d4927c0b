//! Combinators on properties: pointwise min/max, running-aggregate rewriting
//! and the inf-property family of a liminf-property.

use std::sync::Arc;

use crate::domains::{Value, ValueDomain};
use crate::error::{Error, Result};
use crate::props::{Derived, Machine, Property, ValueFunction};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineMode {
    Min,
    Max,
}

impl CombineMode {
    fn apply<F: Scalar>(self, d: &ValueDomain, a: &Value<F>, b: &Value<F>) -> Value<F> {
        match self {
            CombineMode::Min => d.meet(a, b),
            CombineMode::Max => d.join(a, b),
        }
    }

    fn name(self) -> &'static str {
        match self {
            CombineMode::Min => "min",
            CombineMode::Max => "max",
        }
    }
}

fn check_compatible<F: Scalar>(p1: &Property<F>, p2: &Property<F>) -> Result<()> {
    if p1.alphabet() != p2.alphabet() {
        return Err(Error::AlphabetMismatch(format!("{} vs {}", p1.alphabet(), p2.alphabet())));
    }
    if p1.domain() != p2.domain() {
        return Err(Error::DomainMismatch {
            value: p2.domain().to_string(),
            domain: p1.domain().to_string(),
        });
    }
    Ok(())
}

fn product_machine<F: Scalar>(
    m1: &Machine<F>,
    m2: &Machine<F>,
    out: impl Fn(&Value<F>, &Value<F>) -> Value<F>,
) -> Machine<F> {
    Machine::explore(
        m1.num_symbols(),
        (m1.initial(), m2.initial()),
        |&(a, b), s| (m1.next(a, s), m2.next(b, s)),
        |&(a, b)| out(m1.output(a), m2.output(b)),
        |&(a, b)| format!("{}|{}", m1.name(a), m2.name(b)),
    )
}

/// Pointwise min or max of two properties. Machine-backed when both inputs
/// are machines whose value function commutes with the mode, Derived otherwise.
pub fn combine<F: Scalar>(p1: &Property<F>, p2: &Property<F>, mode: CombineMode) -> Result<Property<F>> {
    check_compatible(p1, p2)?;
    let d = p1.domain().clone();
    let name = format!("{}({}, {})", mode.name(), p1.name(), p2.name());
    let vf = p1.value_function();
    let commutes = vf == p2.value_function()
        && matches!(
            (vf, mode),
            (ValueFunction::Inf | ValueFunction::Liminf, CombineMode::Min)
                | (ValueFunction::Sup | ValueFunction::Limsup, CombineMode::Max)
        );
    if let (Some(m1), Some(m2), true) = (p1.machine(), p2.machine(), commutes) {
        let m = product_machine(m1, m2, |a, b| mode.apply(&d, a, b));
        return Property::from_machine(name, p1.alphabet().clone(), d, vf, m);
    }
    let (q1, q2, dl) = (p1.clone(), p2.clone(), d.clone());
    let lasso = move |l: &crate::traces::Lasso| Ok(mode.apply(&dl, &q1.eval_lasso(l)?, &q2.eval_lasso(l)?));
    let (q1, q2, df) = (p1.clone(), p2.clone(), d.clone());
    let finitary = move |s: &[usize]| match (q1.eval_finitary(s), q2.eval_finitary(s)) {
        (Ok(a), Ok(b)) => mode.apply(&df, &a, &b),
        _ => df.bottom(),
    };
    let has_finitary = p1.eval_finitary(&[]).is_ok() && p2.eval_finitary(&[]).is_ok();
    let derived = Derived {
        rule: format!("pointwise_{}", mode.name()),
        lasso: Arc::new(lasso),
        finitary: has_finitary.then(|| Arc::new(finitary) as Arc<crate::props::WordFn<F>>),
        hints: None,
    };
    Ok(Property::from_derived(name, p1.alphabet().clone(), d, vf, derived))
}

fn require_machine<'a, F: Scalar>(p: &'a Property<F>, what: &str) -> Result<&'a Machine<F>> {
    p.machine()
        .ok_or_else(|| Error::UnsupportedBackend(format!("{what} needs a machine-backed property, got {}", p.name())))
}

/// Machine whose output is the running meet (`inf`) or join (`sup`) of the
/// outputs so far.
fn running_machine<F: Scalar>(m: &Machine<F>, d: &ValueDomain, vf: ValueFunction) -> Machine<F> {
    let agg = |a: &Value<F>, b: &Value<F>| match vf {
        ValueFunction::Sup => d.join(a, b),
        _ => d.meet(a, b),
    };
    Machine::explore(
        m.num_symbols(),
        (m.initial(), m.output(m.initial()).clone()),
        |(q, v), a| {
            let t = m.next(*q, a);
            (t, agg(v, m.output(t)))
        },
        |(_, v)| v.clone(),
        |(q, v)| format!("{}/{}", m.name(*q), d.format(v)),
    )
}

/// Rewrites an inf- or sup-property into an equivalent property with a
/// monotone finitary part, returned under `liminf` (equally valid under `limsup`).
pub fn monotone_rewrite<F: Scalar>(p: &Property<F>) -> Result<Property<F>> {
    let m = require_machine(p, "monotone_rewrite")?;
    let vf = p.value_function();
    if !vf.is_prefix_aggregate() {
        return Err(Error::UnsupportedBackend(format!(
            "monotone_rewrite needs an inf- or sup-property, {} uses {vf}",
            p.name()
        )));
    }
    let rm = running_machine(m, p.domain(), vf);
    Property::from_machine(
        format!("monotone({})", p.name()),
        p.alphabet().clone(),
        p.domain().clone(),
        ValueFunction::Liminf,
        rm,
    )
}

/// The `i`-th inf-property of a liminf-property: `⊤` on traces shorter than
/// `i`, the original finitary value afterwards.
pub fn liminf_as_sup_family<F: Scalar>(p: &Property<F>, i: usize) -> Result<Property<F>> {
    let m = require_machine(p, "liminf_as_sup_family")?;
    if p.value_function() != ValueFunction::Liminf {
        return Err(Error::UnsupportedBackend(format!("{} is not a liminf-property", p.name())));
    }
    let top = p.top();
    let fm = Machine::explore(
        m.num_symbols(),
        (0usize, m.initial()),
        |&(k, q), a| ((k + 1).min(i), m.next(q, a)),
        |&(k, q)| if k < i { top.clone() } else { m.output(q).clone() },
        |&(k, q)| format!("{k}:{}", m.name(q)),
    );
    Property::from_machine(
        format!("family({}, {i})", p.name()),
        p.alphabet().clone(),
        p.domain().clone(),
        ValueFunction::Inf,
        fm,
    )
}

/// The liminf-property with finitary part `max_{i ≤ |s|} π_i(s)` over a finite
/// family of inf-properties. Each member is first made monotone by a running meet.
pub fn liminf_upper_bound_combine<F: Scalar>(family: &[Property<F>]) -> Result<Property<F>> {
    let first = family.first().ok_or(Error::EmptyFamily)?;
    for p in family {
        check_compatible(first, p)?;
        require_machine(p, "liminf_upper_bound_combine")?;
        if p.value_function() != ValueFunction::Inf {
            return Err(Error::UnsupportedBackend(format!("{} is not an inf-property", p.name())));
        }
    }
    let d = first.domain().clone();
    let parts: Vec<Machine<F>> = family
        .iter()
        .map(|p| running_machine(p.machine().expect("checked"), &d, ValueFunction::Inf))
        .collect();
    let n = parts.len();
    let init: (usize, Vec<usize>) = (0, parts.iter().map(|m| m.initial()).collect());
    let m = Machine::explore(
        first.alphabet().len(),
        init,
        |(k, qs), a| ((k + 1).min(n - 1), qs.iter().zip(&parts).map(|(&q, m)| m.next(q, a)).collect()),
        |(k, qs)| d.join_all(qs.iter().zip(&parts).take(k + 1).map(|(&q, m)| m.output(q))),
        |(k, qs)| format!("{k}:{qs:?}"),
    );
    let names: Vec<&str> = family.iter().map(|p| p.name()).collect();
    Property::from_machine(
        format!("upper_bound[{}]", names.join(", ")),
        first.alphabet().clone(),
        d,
        ValueFunction::Liminf,
        m,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::ExtNat;
    use crate::props::builtins::{min_response, response_alphabet};
    use crate::traces::Lasso;

    fn lasso(s: &str) -> Lasso {
        Lasso::parse(s, &response_alphabet()).unwrap()
    }

    #[test]
    fn min_with_constant() {
        let p = min_response::<f64>(4).unwrap();
        let c = Property::constant(response_alphabet(), p.domain().clone(), Value::Nat(ExtNat::Fin(2))).unwrap();
        let q = combine(&p, &c, CombineMode::Min).unwrap();
        assert!(q.machine().is_some());
        assert_eq!(q.eval_lasso(&lasso("; rq gr")).unwrap(), Value::Nat(ExtNat::Fin(0)));
        assert_eq!(q.eval_lasso(&lasso("; oo")).unwrap(), Value::Nat(ExtNat::Fin(2)));
    }

    #[test]
    fn incompatible_modes_are_derived() {
        let p = min_response::<f64>(4).unwrap();
        let q = combine(&p, &p, CombineMode::Max).unwrap();
        assert!(q.derived().is_some());
        assert_eq!(q.eval_lasso(&lasso("; rq tk gr")).unwrap(), Value::Nat(ExtNat::Fin(1)));
    }

    #[test]
    fn constant_is_fixed_by_rewrites() {
        let c = Property::constant(response_alphabet(), ValueDomain::capped_nat(4), Value::<f64>::Nat(ExtNat::Fin(3)))
            .unwrap();
        let r = monotone_rewrite(&c).unwrap();
        assert_eq!(r.machine().unwrap().num_states(), 1);
        let c = c.with_value_function(ValueFunction::Inf);
        let u = liminf_upper_bound_combine(&[c]).unwrap();
        assert_eq!(u.eval_lasso(&lasso("rq ; tk")).unwrap(), Value::Nat(ExtNat::Fin(3)));
    }

    #[test]
    fn empty_family() {
        assert_eq!(liminf_upper_bound_combine::<f64>(&[]).unwrap_err(), Error::EmptyFamily);
    }

    #[test]
    fn mismatched_alphabets() {
        let p = min_response::<f64>(4).unwrap();
        let q = crate::props::builtins::gf_a::<f64>();
        assert!(matches!(combine(&p, &q, CombineMode::Min), Err(Error::AlphabetMismatch(_))));
    }
}
