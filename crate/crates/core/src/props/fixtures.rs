//! Small properties that separate related notions of safety and liveness.

use std::sync::Arc;

use crate::domains::{ExtNat, Value, ValueDomain};
use crate::error::{Error, Result};
use crate::props::oracle::Members;
use crate::props::{Machine, Oracle, PredictionSet, Property, ValueFunction};
use crate::scalar::Scalar;
use crate::traces::{Alphabet, Lasso};

#[cfg(test)]
const A: usize = 0;
const B: usize = 1;

pub const NAMES: [&str; 3] = ["vsafe_not_safe", "multilive_not_live", "live_not_verdictlive"];

pub fn fixture<F: Scalar>(name: &str) -> Result<Property<F>> {
    match name {
        "vsafe_not_safe" => Ok(vsafe_not_safe()),
        "multilive_not_live" => Ok(multilive_not_live()),
        "live_not_verdictlive" => Ok(live_not_verdictlive()),
        _ => Err(Error::UnknownFixture(name.to_string())),
    }
}

fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).expect("static alphabet")
}

/// Positions (1-based) of the first `b`s on a lasso, at most `k` of them.
fn b_positions(l: &Lasso, k: usize) -> Vec<usize> {
    let horizon = l.stem().len() + k * l.cycle().len();
    (0..horizon).filter(|&i| l.at(i) == B).map(|i| i + 1).take(k).collect()
}

fn first_b(s: &[usize]) -> Option<usize> {
    s.iter().position(|&x| x == B).map(|i| i + 1)
}

/// Length of the shortest prefix containing `b`, or 0 on `a^ω`.
struct FirstB;

impl<F: Scalar> Oracle<F> for FirstB {
    fn eval(&self, s: &[usize]) -> Value<F> {
        Value::Nat(ExtNat::Fin(first_b(s).unwrap_or(0) as u64))
    }

    fn eval_lasso(&self, l: &Lasso) -> Option<Value<F>> {
        let v = b_positions(l, 1).first().copied().unwrap_or(0);
        Some(Value::Nat(ExtNat::Fin(v as u64)))
    }

    fn sup_ext(&self, s: &[usize]) -> Option<Value<F>> {
        Some(match first_b(s) {
            Some(j) => Value::Nat(ExtNat::Fin(j as u64)),
            None => Value::Nat(ExtNat::Inf),
        })
    }

    fn inf_ext(&self, s: &[usize]) -> Option<Value<F>> {
        Some(Value::Nat(ExtNat::Fin(first_b(s).unwrap_or(0) as u64)))
    }

    fn prediction_set(&self, s: &[usize]) -> Option<PredictionSet<F>> {
        let d = ValueDomain::extended_nat();
        if let Some(j) = first_b(s) {
            return Some(PredictionSet::finite(&d, vec![Value::Nat(ExtNat::Fin(j as u64))]));
        }
        let k = s.len() as u64;
        let member = move |v: &Value<F>| match v {
            Value::Nat(ExtNat::Fin(n)) => *n == 0 || *n > k,
            _ => false,
        };
        Some(PredictionSet {
            sup: Value::Nat(ExtNat::Inf),
            inf: Value::Nat(ExtNat::Fin(0)),
            members: Members::Rule(Arc::new(member)),
            notable: vec![
                Value::Nat(ExtNat::Fin(0)),
                Value::Nat(ExtNat::Fin(k + 1)),
                Value::Nat(ExtNat::Inf),
            ],
        })
    }
}

/// `0` on `a^ω`, else the length of the shortest prefix containing `b`.
/// Every wrong value is eventually dismissed, yet the supremum of the
/// remaining values stays `∞` along `a^ω`.
pub fn vsafe_not_safe<F: Scalar>() -> Property<F> {
    Property::from_oracle(
        "vsafe_not_safe",
        ab(),
        ValueDomain::extended_nat(),
        ValueFunction::Sup,
        Arc::new(FirstB),
    )
}

/// `0` if only `a` is ever seen, `1` once `c` is seen, `2` if `b` but never `c` is seen.
pub fn multilive_not_live<F: Scalar>() -> Property<F> {
    let alphabet = Alphabet::new(["a", "b", "c"]).expect("static alphabet");
    let levels = ValueDomain::finite_order(["0", "1", "2"]).expect("static domain");
    // states: only-a, b-seen-no-c, c-seen
    let machine = Machine::new(
        3,
        vec![Value::Level(0), Value::Level(2), Value::Level(1)],
        vec!["only_a".into(), "b_no_c".into(), "c_seen".into()],
        0,
        vec![0, 1, 2, 1, 1, 2, 2, 2, 2],
    )
    .expect("static machine");
    Property::from_machine("multilive_not_live", alphabet, levels, ValueFunction::Liminf, machine)
        .expect("static property")
}

fn pow2<F: Scalar>(m: usize) -> F {
    F::from_f64_lossy(2f64.powi(-(m.min(1000) as i32)))
}

struct OneB;

impl OneB {
    fn value<F: Scalar>(bs: &[usize]) -> F {
        match bs {
            [] => F::zero(),
            [j] => pow2(*j),
            _ => F::one(),
        }
    }

    fn bs(s: &[usize]) -> Vec<usize> {
        s.iter().enumerate().filter(|(_, &x)| x == B).map(|(i, _)| i + 1).take(2).collect()
    }
}

impl<F: Scalar> Oracle<F> for OneB {
    fn eval(&self, s: &[usize]) -> Value<F> {
        Value::Real(Self::value(&Self::bs(s)))
    }

    fn eval_lasso(&self, l: &Lasso) -> Option<Value<F>> {
        Some(Value::Real(Self::value(&b_positions(l, 2))))
    }

    fn sup_ext(&self, _s: &[usize]) -> Option<Value<F>> {
        Some(Value::Real(F::one()))
    }

    fn inf_ext(&self, s: &[usize]) -> Option<Value<F>> {
        Some(Value::Real(Self::value(&Self::bs(s))))
    }

    fn prediction_set(&self, s: &[usize]) -> Option<PredictionSet<F>> {
        let d = ValueDomain::UnitInterval;
        let bs = Self::bs(s);
        match bs.as_slice() {
            [] => {
                let k = s.len();
                let member = move |v: &Value<F>| {
                    let Value::Real(x) = v else { return false };
                    if x.approx_eq(F::zero()) || x.approx_eq(F::one()) {
                        return true;
                    }
                    (k + 1..k + 64).any(|m| x.approx_eq(pow2(m)))
                };
                let mut notable = vec![Value::Real(F::zero()), Value::Real(F::one())];
                notable.extend((1..=k + 2).map(|m| Value::Real(pow2(m))));
                Some(PredictionSet {
                    sup: Value::Real(F::one()),
                    inf: Value::Real(F::zero()),
                    members: Members::Rule(Arc::new(member)),
                    notable,
                })
            }
            [j] => Some(PredictionSet::finite(&d, vec![Value::Real(pow2(*j)), Value::Real(F::one())])),
            _ => Some(PredictionSet::finite(&d, vec![Value::Real(F::one())])),
        }
    }
}

/// `0` without `b`, `1` with at least two `b`s, and `2^-|s|` with exactly one
/// `b`, where `s` is the shortest prefix containing it.
pub fn live_not_verdictlive<F: Scalar>() -> Property<F> {
    Property::from_oracle(
        "live_not_verdictlive",
        ab(),
        ValueDomain::UnitInterval,
        ValueFunction::Sup,
        Arc::new(OneB),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lasso(stem: &[usize], cycle: &[usize]) -> Lasso {
        Lasso::new(stem.to_vec(), cycle.to_vec()).unwrap()
    }

    #[test]
    fn multilive_values() {
        let p = multilive_not_live::<f64>();
        assert_eq!(p.eval_lasso(&lasso(&[], &[2])).unwrap(), Value::Level(1));
        assert_eq!(p.eval_lasso(&lasso(&[], &[0])).unwrap(), Value::Level(0));
        assert_eq!(p.eval_lasso(&lasso(&[0, 1], &[0])).unwrap(), Value::Level(2));
        assert_eq!(p.eval_lasso(&lasso(&[1], &[2])).unwrap(), Value::Level(1));
    }

    #[test]
    fn first_b_values() {
        let p = vsafe_not_safe::<f64>();
        assert_eq!(p.eval_lasso(&lasso(&[], &[A])).unwrap(), Value::Nat(ExtNat::Fin(0)));
        assert_eq!(p.eval_lasso(&lasso(&[A, A], &[B])).unwrap(), Value::Nat(ExtNat::Fin(3)));
        assert_eq!(p.sup_ext(&[A, A, A]), Some(Value::Nat(ExtNat::Inf)));
        let ps = p.oracle().unwrap().prediction_set(&[A]).unwrap();
        let d = ValueDomain::extended_nat();
        assert!(ps.contains(&d, &Value::Nat(ExtNat::Fin(0))));
        assert!(!ps.contains(&d, &Value::Nat(ExtNat::Fin(1))));
        assert!(ps.contains(&d, &Value::Nat(ExtNat::Fin(2))));
        assert!(!ps.sup_realized(&d));
    }

    #[test]
    fn one_b_values() {
        let p = live_not_verdictlive::<f64>();
        assert_eq!(p.eval_lasso(&lasso(&[A, A, B], &[A])).unwrap(), Value::Real(0.125));
        assert_eq!(p.eval_lasso(&lasso(&[], &[A, B])).unwrap(), Value::Real(1.0));
        assert_eq!(p.eval_lasso(&lasso(&[], &[A])).unwrap(), Value::Real(0.0));
        let ps = p.oracle().unwrap().prediction_set(&[A]).unwrap();
        let d = ValueDomain::UnitInterval;
        assert!(!ps.contains(&d, &Value::Real(0.5)));
        assert!(ps.contains(&d, &Value::Real(0.25)));
    }

    #[test]
    fn unknown_fixture() {
        assert_eq!(fixture::<f64>("nope").unwrap_err(), Error::UnknownFixture("nope".into()));
    }
}
