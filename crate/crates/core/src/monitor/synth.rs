use std::collections::VecDeque;

use crate::closure::ConfigGraph;
use crate::domains::{Value, ValueDomain};
use crate::error::{Error, Result};
use crate::props::{Machine, Property, ValueFunction};
use crate::scalar::{gap, Scalar};
use crate::traces::{Alphabet, Lasso};

pub const DEFAULT_MAX_DEPTH: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct MonitorClass<F: Scalar> {
    pub id: usize,
    pub representative: Vec<usize>,
    /// Frozen classes absorb every extension.
    pub frozen: bool,
    pub gamma: Value<F>,
}

/// A finite-state monitor: a right-monotonic partition of finite traces
/// into classes, each with an output value.
#[derive(Clone, Debug, PartialEq)]
pub struct AbstractMonitor<F: Scalar> {
    pub delta: F,
    pub alphabet: Alphabet,
    pub domain: ValueDomain,
    pub value_function: ValueFunction,
    pub initial: usize,
    pub classes: Vec<MonitorClass<F>>,
    /// `next[c * |Σ| + a]`.
    pub next: Vec<usize>,
}

impl<F: Scalar> AbstractMonitor<F> {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn step(&self, c: usize, a: usize) -> usize {
        self.next[c * self.alphabet.len() + a]
    }

    pub fn class_of(&self, word: &[usize]) -> usize {
        word.iter().fold(self.initial, |c, &a| self.step(c, a))
    }

    pub fn gamma(&self, c: usize) -> &Value<F> {
        &self.classes[c].gamma
    }

    /// The monitor as a machine with class outputs.
    pub fn machine(&self) -> Machine<F> {
        Machine::new(
            self.alphabet.len(),
            self.classes.iter().map(|c| c.gamma.clone()).collect(),
            self.classes.iter().map(|c| self.alphabet.render(&c.representative)).collect(),
            self.initial,
            self.next.clone(),
        )
        .expect("monitor transitions are total")
    }
}

/// Values for which the prediction width is measured.
struct Bounds<'a, F: Scalar> {
    p: &'a Property<F>,
    graph: Option<ConfigGraph<F>>,
}

impl<'a, F: Scalar> Bounds<'a, F> {
    fn new(p: &'a Property<F>) -> Result<Self> {
        if !p.domain().is_numeric() {
            return Err(Error::DomainNotNumeric(p.domain().to_string()));
        }
        if p.machine().is_some() {
            return Ok(Bounds { p, graph: Some(ConfigGraph::build(p)?) });
        }
        if p.sup_ext(&[]).is_none() || p.inf_ext(&[]).is_none() {
            return Err(Error::UnsupportedBackend(format!("{} has no extension bounds", p.name())));
        }
        Ok(Bounds { p, graph: None })
    }

    fn width(&self, s: &[usize]) -> F {
        let d = self.p.domain();
        let (hi, lo) = match &self.graph {
            Some(g) => {
                let v = g.node_of(s);
                (g.finite_join(v).clone(), g.finite_meet(v).clone())
            }
            None => (self.p.sup_ext(s).expect("checked"), self.p.inf_ext(s).expect("checked")),
        };
        gap(d.to_real(&hi).expect("numeric"), d.to_real(&lo).expect("numeric"))
    }
}

/// `sup π(s·r) − inf π(s·r)` over finite continuations `r`.
pub fn width<F: Scalar>(p: &Property<F>, s: &[usize]) -> Result<F> {
    Ok(Bounds::new(p)?.width(s))
}

/// Finite traces whose prediction width is at least `delta`, shortest first.
pub fn s_delta<F: Scalar>(p: &Property<F>, delta: F, max_depth: usize) -> Result<Vec<Vec<usize>>> {
    let m = synthesize(p, delta, max_depth)?;
    Ok(m.classes.into_iter().filter(|c| !c.frozen).map(|c| c.representative).collect())
}

/// Unfolds the trie of traces with width at least `delta`; each child that
/// falls below `delta` becomes a frozen class valued at its own `π`.
pub fn synthesize<F: Scalar>(p: &Property<F>, delta: F, max_depth: usize) -> Result<AbstractMonitor<F>> {
    if delta.is_nan() || delta <= F::zero() {
        return Err(Error::BadParams(format!("delta must be positive, got {delta}")));
    }
    let b = Bounds::new(p)?;
    let k = p.alphabet().len();
    let mut classes = Vec::new();
    let mut next = Vec::new();
    let live = |s: &[usize]| b.width(s) >= delta - F::tolerance();
    let new_class = |classes: &mut Vec<MonitorClass<F>>, next: &mut Vec<usize>, s: Vec<usize>, frozen: bool| -> Result<usize> {
        let id = classes.len();
        let gamma = p.eval_finitary(&s)?;
        classes.push(MonitorClass { id, representative: s, frozen, gamma });
        next.extend(std::iter::repeat_n(id, k));
        Ok(id)
    };
    if !live(&[]) {
        new_class(&mut classes, &mut next, Vec::new(), true)?;
    } else {
        if reaches_depth(k, max_depth, &live) {
            return Err(Error::DepthExceeded(max_depth));
        }
        let root = new_class(&mut classes, &mut next, Vec::new(), false)?;
        let mut queue = VecDeque::from([root]);
        while let Some(c) = queue.pop_front() {
            for a in 0..k {
                let mut s = classes[c].representative.clone();
                s.push(a);
                let member = live(&s);
                if member && s.len() >= max_depth {
                    return Err(Error::DepthExceeded(max_depth));
                }
                let child = new_class(&mut classes, &mut next, s, !member)?;
                next[c * k + a] = child;
                if member {
                    queue.push_back(child);
                }
            }
        }
    }
    Ok(AbstractMonitor {
        delta,
        alphabet: p.alphabet().clone(),
        domain: p.domain().clone(),
        value_function: p.value_function(),
        initial: 0,
        classes,
        next,
    })
}

/// Whether some member of the (prefix-closed) set `live` has length `depth`.
/// Depth-first, so a deep member is found without expanding whole levels.
fn reaches_depth(k: usize, depth: usize, live: &impl Fn(&[usize]) -> bool) -> bool {
    let mut s: Vec<usize> = Vec::new();
    let mut next_sym: Vec<usize> = vec![0];
    loop {
        if s.len() >= depth {
            return true;
        }
        let a = next_sym.last_mut().expect("stack");
        if *a >= k {
            next_sym.pop();
            if s.pop().is_none() {
                return false;
            }
            continue;
        }
        s.push(*a);
        *a += 1;
        if live(&s) {
            next_sym.push(0);
        } else {
            s.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunOutput<F: Scalar> {
    /// Class outputs on every prefix, the empty prefix first.
    Finite(Vec<Value<F>>),
    /// The value function applied to the class outputs along the lasso.
    Limit(Value<F>),
}

pub fn monitor_run<F: Scalar>(m: &AbstractMonitor<F>, w: &crate::traces::Trace) -> Result<RunOutput<F>> {
    use crate::traces::Trace;
    let k = m.alphabet.len();
    let check = |s: &[usize]| -> Result<()> {
        match s.iter().find(|&&a| a >= k) {
            Some(a) => Err(Error::AlphabetMismatch(format!("symbol index {a} outside an alphabet of {k}"))),
            None => Ok(()),
        }
    };
    match w {
        Trace::Finite(t) => {
            check(t.symbols())?;
            let mut c = m.initial;
            let mut out = vec![m.gamma(c).clone()];
            for &a in t.symbols() {
                c = m.step(c, a);
                out.push(m.gamma(c).clone());
            }
            Ok(RunOutput::Finite(out))
        }
        Trace::Lasso(l) => {
            check(l.stem())?;
            check(l.cycle())?;
            Ok(RunOutput::Limit(limit(m, l)))
        }
    }
}

pub(crate) fn limit<F: Scalar>(m: &AbstractMonitor<F>, l: &Lasso) -> Value<F> {
    m.machine().eval_lasso(l, m.value_function, &m.domain)
}

impl<F: Scalar> AbstractMonitor<F> {
    pub fn run_lasso(&self, l: &Lasso) -> Value<F> {
        limit(self, l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::props::builtins::{discounted_never, max_response};
    use crate::traces::{FiniteTrace, Trace};

    fn never_b() -> Property<f64> {
        discounted_never(Alphabet::new(["a", "b"]).unwrap(), "b").unwrap()
    }

    #[test]
    fn quarter_gives_five_classes() {
        let p = never_b();
        let m = synthesize(&p, 0.25, DEFAULT_MAX_DEPTH).unwrap();
        let summary: Vec<(Vec<usize>, bool, Value<f64>)> =
            m.classes.iter().map(|c| (c.representative.clone(), c.frozen, c.gamma.clone())).collect();
        assert_eq!(
            summary,
            vec![
                (vec![], false, Value::Real(1.0)),
                (vec![0], false, Value::Real(1.0)),
                (vec![1], true, Value::Real(0.5)),
                (vec![0, 0], true, Value::Real(1.0)),
                (vec![0, 1], true, Value::Real(0.75)),
            ]
        );
        let l = Lasso::new(vec![0, 0, 1], vec![0]).unwrap();
        assert_eq!(m.run_lasso(&l), Value::Real(1.0));
        assert_eq!(p.eval_lasso(&l).unwrap(), Value::Real(0.875));
        assert_eq!(m.run_lasso(&Lasso::new(vec![], vec![0]).unwrap()), Value::Real(1.0));
    }

    #[test]
    fn wide_delta_gives_single_frozen_class() {
        let p = never_b();
        let m = synthesize(&p, 1.0, DEFAULT_MAX_DEPTH).unwrap();
        assert_eq!(m.len(), 1);
        assert!(m.classes[0].frozen);
        assert_eq!(m.classes[0].gamma, Value::Real(1.0));
        let t = Trace::Finite(FiniteTrace::new(vec![1, 0, 1]));
        assert_eq!(monitor_run(&m, &t).unwrap(), RunOutput::Finite(vec![Value::Real(1.0); 4]));
    }

    #[test]
    fn unbounded_gap_exceeds_depth() {
        let p = max_response::<f64>(8).unwrap();
        assert_eq!(synthesize(&p, 1.0, 12).unwrap_err(), Error::DepthExceeded(12));
    }

    #[test]
    fn s_delta_matches_live_prefixes() {
        let p = never_b();
        for k in 1..=6 {
            let s = s_delta(&p, 2f64.powi(-k), DEFAULT_MAX_DEPTH).unwrap();
            let expected: Vec<Vec<usize>> = (0..k as usize).map(|n| vec![0; n]).collect();
            assert_eq!(s, expected, "k = {k}");
        }
    }
}
