//! Oracle-backed finitary properties with analytic hooks.

use std::fmt;
use std::sync::Arc;

use crate::domains::{Value, ValueDomain};
use crate::props::ValueFunction;
use crate::scalar::Scalar;
use crate::traces::Lasso;

pub type MemberFn<F> = dyn Fn(&Value<F>) -> bool + Send + Sync;

#[derive(Clone)]
pub enum Members<F> {
    Finite(Vec<Value<F>>),
    Rule(Arc<MemberFn<F>>),
}

/// The set of values a property can still take after some prefix. Infinite
/// sets are described by a membership rule plus their bounds.
#[derive(Clone)]
pub struct PredictionSet<F> {
    pub sup: Value<F>,
    pub inf: Value<F>,
    pub members: Members<F>,
    /// Values worth probing when the set is infinite (e.g. those around a gap).
    pub notable: Vec<Value<F>>,
}

impl<F: Scalar> PredictionSet<F> {
    pub fn finite(domain: &ValueDomain, values: Vec<Value<F>>) -> Self {
        let mut vs: Vec<Value<F>> = Vec::new();
        for v in values {
            if !vs.iter().any(|w| domain.eq_values(w, &v)) {
                vs.push(v);
            }
        }
        PredictionSet {
            sup: domain.join_all(&vs),
            inf: domain.meet_all(&vs),
            notable: vs.clone(),
            members: Members::Finite(vs),
        }
    }

    pub fn contains(&self, domain: &ValueDomain, v: &Value<F>) -> bool {
        match &self.members {
            Members::Finite(vs) => vs.iter().any(|w| domain.eq_values(w, v)),
            Members::Rule(f) => f(v),
        }
    }

    pub fn sup_realized(&self, domain: &ValueDomain) -> bool {
        self.contains(domain, &self.sup)
    }

    /// Finite member list, if the set is finite.
    pub fn values(&self) -> Option<&[Value<F>]> {
        match &self.members {
            Members::Finite(vs) => Some(vs),
            Members::Rule(_) => None,
        }
    }

    /// Same set seen from the dual order.
    pub fn dual(&self) -> Self {
        PredictionSet {
            sup: self.inf.clone(),
            inf: self.sup.clone(),
            members: self.members.clone(),
            notable: self.notable.clone(),
        }
    }
}

impl<F: fmt::Debug> fmt::Debug for PredictionSet<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("PredictionSet");
        d.field("sup", &self.sup).field("inf", &self.inf);
        match &self.members {
            Members::Finite(vs) => d.field("members", vs),
            Members::Rule(_) => d.field("members", &"<rule>"),
        };
        d.finish()
    }
}

/// Incremental evaluation over a growing prefix.
pub trait PrefixTracker<F>: Send {
    fn push(&mut self, sym: usize);
    fn value(&self) -> Value<F>;
    fn sup_ext(&self) -> Option<Value<F>>;
    fn inf_ext(&self) -> Option<Value<F>>;
}

/// A finitary property given by functions on finite traces. Every hook is
/// stated in the order of the domain the property is declared over.
pub trait Oracle<F: Scalar>: Send + Sync {
    fn eval(&self, s: &[usize]) -> Value<F>;

    /// Exact value on a lasso.
    fn eval_lasso(&self, _l: &Lasso) -> Option<Value<F>> {
        None
    }

    /// Join of `Φ(s·w)` over all continuations `w`.
    fn sup_ext(&self, _s: &[usize]) -> Option<Value<F>> {
        None
    }

    /// Meet of `Φ(s·w)` over all continuations `w`.
    fn inf_ext(&self, _s: &[usize]) -> Option<Value<F>> {
        None
    }

    /// Values of `Φ(s·f)` over infinite continuations `f`.
    fn prediction_set(&self, _s: &[usize]) -> Option<PredictionSet<F>> {
        None
    }

    /// Incremental evaluator, when cheaper than re-evaluating whole prefixes.
    fn tracker(&self) -> Option<Box<dyn PrefixTracker<F>>> {
        None
    }

    /// Further value functions that, paired with some finitary property,
    /// define the same infinite-trace values.
    fn alternate_forms(&self) -> Vec<ValueFunction> {
        Vec::new()
    }
}

/// Tracker that keeps the whole prefix and asks the oracle each time.
pub struct BufferTracker<F: Scalar> {
    oracle: Arc<dyn Oracle<F>>,
    prefix: Vec<usize>,
}

impl<F: Scalar> BufferTracker<F> {
    pub fn new(oracle: Arc<dyn Oracle<F>>) -> Self {
        BufferTracker { oracle, prefix: Vec::new() }
    }
}

impl<F: Scalar> PrefixTracker<F> for BufferTracker<F> {
    fn push(&mut self, sym: usize) {
        self.prefix.push(sym);
    }

    fn value(&self) -> Value<F> {
        self.oracle.eval(&self.prefix)
    }

    fn sup_ext(&self) -> Option<Value<F>> {
        self.oracle.sup_ext(&self.prefix)
    }

    fn inf_ext(&self) -> Option<Value<F>> {
        self.oracle.inf_ext(&self.prefix)
    }
}

/// The same oracle read in the dual order.
struct Complemented<F: Scalar>(Arc<dyn Oracle<F>>);

struct ComplementedTracker<F>(Box<dyn PrefixTracker<F>>);

impl<F> PrefixTracker<F> for ComplementedTracker<F> {
    fn push(&mut self, sym: usize) {
        self.0.push(sym)
    }

    fn value(&self) -> Value<F> {
        self.0.value()
    }

    fn sup_ext(&self) -> Option<Value<F>> {
        self.0.inf_ext()
    }

    fn inf_ext(&self) -> Option<Value<F>> {
        self.0.sup_ext()
    }
}

impl<F: Scalar> Oracle<F> for Complemented<F> {
    fn eval(&self, s: &[usize]) -> Value<F> {
        self.0.eval(s)
    }

    fn eval_lasso(&self, l: &Lasso) -> Option<Value<F>> {
        self.0.eval_lasso(l)
    }

    fn sup_ext(&self, s: &[usize]) -> Option<Value<F>> {
        self.0.inf_ext(s)
    }

    fn inf_ext(&self, s: &[usize]) -> Option<Value<F>> {
        self.0.sup_ext(s)
    }

    fn prediction_set(&self, s: &[usize]) -> Option<PredictionSet<F>> {
        self.0.prediction_set(s).map(|p| p.dual())
    }

    fn tracker(&self) -> Option<Box<dyn PrefixTracker<F>>> {
        self.0
            .tracker()
            .map(|t| Box::new(ComplementedTracker(t)) as Box<dyn PrefixTracker<F>>)
    }

    fn alternate_forms(&self) -> Vec<ValueFunction> {
        self.0.alternate_forms().into_iter().map(ValueFunction::dual).collect()
    }
}

pub(crate) fn complement<F: Scalar>(o: Arc<dyn Oracle<F>>) -> Arc<dyn Oracle<F>> {
    Arc::new(Complemented(o))
}
