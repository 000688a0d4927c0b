//! Limit properties: a finitary property paired with a value function.

use std::fmt;
use std::sync::Arc;

use crate::domains::{Value, ValueDomain};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::traces::{Alphabet, Lasso};

pub mod builtins;
pub mod fixtures;
mod machine;
mod oracle;
pub mod transform;

pub use machine::Machine;
pub use oracle::{BufferTracker, Members, Oracle, PredictionSet, PrefixTracker};

/// How the sequence of prefix values is condensed into one value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValueFunction {
    Inf,
    Sup,
    Liminf,
    Limsup,
}

impl ValueFunction {
    /// The value function that computes the same thing in the dual order.
    pub fn dual(self) -> ValueFunction {
        match self {
            ValueFunction::Inf => ValueFunction::Sup,
            ValueFunction::Sup => ValueFunction::Inf,
            ValueFunction::Liminf => ValueFunction::Limsup,
            ValueFunction::Limsup => ValueFunction::Liminf,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ValueFunction::Inf => "inf",
            ValueFunction::Sup => "sup",
            ValueFunction::Liminf => "liminf",
            ValueFunction::Limsup => "limsup",
        }
    }

    pub fn parse(s: &str) -> Result<ValueFunction> {
        match s {
            "inf" => Ok(ValueFunction::Inf),
            "sup" => Ok(ValueFunction::Sup),
            "liminf" => Ok(ValueFunction::Liminf),
            "limsup" => Ok(ValueFunction::Limsup),
            _ => Err(Error::Parse(format!("unknown value function {s:?}"))),
        }
    }

    /// Whether prefix values can be aggregated as a running meet or join.
    pub fn is_prefix_aggregate(self) -> bool {
        matches!(self, ValueFunction::Inf | ValueFunction::Sup)
    }
}

impl fmt::Display for ValueFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type LassoFn<F> = dyn Fn(&Lasso) -> Result<Value<F>> + Send + Sync;
pub type WordFn<F> = dyn Fn(&[usize]) -> Value<F> + Send + Sync;
pub type HintFn = dyn Fn(&[usize]) -> Vec<Lasso> + Send + Sync;

/// A property given only by its values on lassos, built by composing other
/// properties.
pub struct Derived<F> {
    pub rule: String,
    pub lasso: Arc<LassoFn<F>>,
    pub finitary: Option<Arc<WordFn<F>>>,
    /// Candidate continuations that are likely to raise the value after a
    /// given prefix. Used as extra evidence by bounded checks.
    pub hints: Option<Arc<HintFn>>,
}

impl<F> Clone for Derived<F> {
    fn clone(&self) -> Self {
        Derived {
            rule: self.rule.clone(),
            lasso: self.lasso.clone(),
            finitary: self.finitary.clone(),
            hints: self.hints.clone(),
        }
    }
}

#[derive(Clone)]
pub enum Backend<F> {
    Machine(Arc<Machine<F>>),
    Oracle(Arc<dyn Oracle<F>>),
    Derived(Arc<Derived<F>>),
}

impl<F> Backend<F> {
    pub fn kind(&self) -> &'static str {
        match self {
            Backend::Machine(_) => "machine",
            Backend::Oracle(_) => "oracle",
            Backend::Derived(_) => "derived",
        }
    }
}

/// A quantitative property `Φ = (π, ℓ)` over an alphabet and a value domain.
#[derive(Clone)]
pub struct Property<F> {
    name: String,
    alphabet: Alphabet,
    domain: ValueDomain,
    value_function: ValueFunction,
    backend: Backend<F>,
}

impl<F> fmt::Debug for Property<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Property")
            .field("name", &self.name)
            .field("alphabet", &self.alphabet)
            .field("domain", &self.domain)
            .field("value_function", &self.value_function)
            .field("backend", &self.backend.kind())
            .finish()
    }
}

impl<F: Scalar> Property<F> {
    pub fn from_machine(
        name: impl Into<String>,
        alphabet: Alphabet,
        domain: ValueDomain,
        value_function: ValueFunction,
        machine: Machine<F>,
    ) -> Result<Self> {
        domain.validate()?;
        if machine.num_symbols() != alphabet.len() {
            return Err(Error::AlphabetMismatch(format!(
                "machine reads {} symbols, alphabet has {}",
                machine.num_symbols(),
                alphabet.len()
            )));
        }
        for q in 0..machine.num_states() {
            if !domain.contains(machine.output(q)) {
                return Err(Error::DomainMismatch {
                    value: format!("{:?}", machine.output(q)),
                    domain: domain.to_string(),
                });
            }
        }
        let machine = machine.map_outputs(|v| domain.normalize(v.clone()));
        Ok(Property {
            name: name.into(),
            alphabet,
            domain,
            value_function,
            backend: Backend::Machine(Arc::new(machine)),
        })
    }

    pub fn from_oracle(
        name: impl Into<String>,
        alphabet: Alphabet,
        domain: ValueDomain,
        value_function: ValueFunction,
        oracle: Arc<dyn Oracle<F>>,
    ) -> Self {
        Property { name: name.into(), alphabet, domain, value_function, backend: Backend::Oracle(oracle) }
    }

    pub fn from_derived(
        name: impl Into<String>,
        alphabet: Alphabet,
        domain: ValueDomain,
        value_function: ValueFunction,
        derived: Derived<F>,
    ) -> Self {
        Property {
            name: name.into(),
            alphabet,
            domain,
            value_function,
            backend: Backend::Derived(Arc::new(derived)),
        }
    }

    /// The property with constant value `value` on every trace.
    pub fn constant(alphabet: Alphabet, domain: ValueDomain, value: Value<F>) -> Result<Self> {
        let name = format!("constant({})", domain.format(&value));
        let m = Machine::constant(alphabet.len(), value);
        Property::from_machine(name, alphabet, domain, ValueFunction::Inf, m)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Same finitary part under another value function.
    pub fn with_value_function(&self, vf: ValueFunction) -> Self {
        Property { value_function: vf, ..self.clone() }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn domain(&self) -> &ValueDomain {
        &self.domain
    }

    pub fn value_function(&self) -> ValueFunction {
        self.value_function
    }

    pub fn backend(&self) -> &Backend<F> {
        &self.backend
    }

    pub fn machine(&self) -> Option<&Machine<F>> {
        match &self.backend {
            Backend::Machine(m) => Some(m),
            _ => None,
        }
    }

    pub fn oracle(&self) -> Option<&Arc<dyn Oracle<F>>> {
        match &self.backend {
            Backend::Oracle(o) => Some(o),
            _ => None,
        }
    }

    pub fn derived(&self) -> Option<&Derived<F>> {
        match &self.backend {
            Backend::Derived(d) => Some(d),
            _ => None,
        }
    }

    pub fn top(&self) -> Value<F> {
        self.domain.top()
    }

    pub fn bottom(&self) -> Value<F> {
        self.domain.bottom()
    }

    fn check_word(&self, s: &[usize]) -> Result<()> {
        match s.iter().find(|&&a| a >= self.alphabet.len()) {
            Some(a) => Err(Error::AlphabetMismatch(format!(
                "symbol index {a} outside alphabet {}",
                self.alphabet
            ))),
            None => Ok(()),
        }
    }

    fn check_lasso(&self, l: &Lasso) -> Result<()> {
        self.check_word(l.stem())?;
        self.check_word(l.cycle())
    }

    /// `π(s)`.
    pub fn eval_finitary(&self, s: &[usize]) -> Result<Value<F>> {
        self.check_word(s)?;
        match &self.backend {
            Backend::Machine(m) => Ok(m.output(m.run(s)).clone()),
            Backend::Oracle(o) => Ok(o.eval(s)),
            Backend::Derived(d) => match &d.finitary {
                Some(f) => Ok(f(s)),
                None => Err(Error::UnsupportedBackend(format!(
                    "{} has no finitary evaluator",
                    self.name
                ))),
            },
        }
    }

    /// `Φ(u·v^ω)`.
    pub fn eval_lasso(&self, l: &Lasso) -> Result<Value<F>> {
        self.check_lasso(l)?;
        match &self.backend {
            Backend::Machine(m) => Ok(m.eval_lasso(l, self.value_function, &self.domain)),
            Backend::Oracle(o) => o.eval_lasso(l).ok_or_else(|| {
                Error::UnsupportedBackend(format!("{} cannot be evaluated on lassos", self.name))
            }),
            Backend::Derived(d) => (d.lasso)(l),
        }
    }

    /// Upper bound of `Φ(s·g)` over all continuations, where available without search.
    pub fn sup_ext(&self, s: &[usize]) -> Option<Value<F>> {
        match &self.backend {
            Backend::Oracle(o) => o.sup_ext(s),
            _ => None,
        }
    }

    pub fn inf_ext(&self, s: &[usize]) -> Option<Value<F>> {
        match &self.backend {
            Backend::Oracle(o) => o.inf_ext(s),
            _ => None,
        }
    }

    /// Value functions under which this property is known to be a limit property.
    pub fn known_forms(&self) -> Vec<ValueFunction> {
        if let Backend::Derived(_) = &self.backend {
            return Vec::new();
        }
        let mut forms = vec![self.value_function];
        if let Backend::Oracle(o) = &self.backend {
            for f in o.alternate_forms() {
                if !forms.contains(&f) {
                    forms.push(f);
                }
            }
        }
        forms
    }

    /// The complement: same values, dual domain, dual value function.
    pub fn complement(&self) -> Property<F> {
        let backend = match &self.backend {
            Backend::Machine(m) => Backend::Machine(m.clone()),
            Backend::Oracle(o) => Backend::Oracle(oracle::complement(o.clone())),
            Backend::Derived(d) => Backend::Derived(d.clone()),
        };
        let name = match self.name.strip_prefix("complement(").and_then(|n| n.strip_suffix(')')) {
            Some(inner) => inner.to_string(),
            None => format!("complement({})", self.name),
        };
        Property {
            name,
            alphabet: self.alphabet.clone(),
            domain: self.domain.dual(),
            value_function: self.value_function.dual(),
            backend,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::ExtNat;

    #[test]
    fn constant_property_everywhere() {
        let a = Alphabet::new(["a", "b"]).unwrap();
        let d = ValueDomain::extended_nat();
        let c = Value::<f64>::Nat(ExtNat::Fin(5));
        let p = Property::constant(a, d, c.clone()).unwrap();
        for vf in [ValueFunction::Inf, ValueFunction::Sup, ValueFunction::Liminf, ValueFunction::Limsup] {
            let m = p.machine().unwrap();
            let l = Lasso::new(vec![0, 1], vec![1, 0, 0]).unwrap();
            assert_eq!(m.eval_lasso(&l, vf, p.domain()), c);
        }
        assert_eq!(p.eval_finitary(&[]).unwrap(), c);
        assert!(p.eval_finitary(&[2]).is_err());
    }

    #[test]
    fn complement_is_involutive() {
        let a = Alphabet::new(["a"]).unwrap();
        let p = Property::constant(a, ValueDomain::Boolean, Value::<f64>::Bool(true)).unwrap();
        let c = p.complement();
        assert_eq!(c.domain(), &ValueDomain::Boolean.dual());
        assert_eq!(c.value_function(), ValueFunction::Sup);
        let cc = c.complement();
        assert_eq!(cc.domain(), p.domain());
        assert_eq!(cc.value_function(), p.value_function());
        assert_eq!(cc.name(), p.name());
    }
}
