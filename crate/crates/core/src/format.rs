//! Property spec files (JSON, `"version": 1`, unknown fields rejected).
//!
//! Three forms:
//!
//! ```json
//! {"version": 1, "builtin": "min_response", "params": {"cap": 8}}
//! {"version": 1, "fixture": "vsafe_not_safe"}
//! {"version": 1, "alphabet": ["a", "b"], "domain": {"kind": "boolean"},
//!  "states": [{"id": "q0", "output": "0"}, {"id": "q1", "output": "1"}],
//!  "initial": "q0",
//!  "transitions": [{"from": "q0", "symbol": "a", "to": "q1"}, ...],
//!  "value_function": "limsup"}
//! ```

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::domains::{Value, ValueDomain};
use crate::error::{Error, Result};
use crate::props::builtins::{self, SafetyDfa};
use crate::props::{fixtures, Machine, Property, ValueFunction};
use crate::scalar::Scalar;
use crate::traces::Alphabet;

pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Boolean,
    ExtendedNat {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cap: Option<u64>,
        #[serde(default, skip_serializing_if = "is_false")]
        cap_is_top: bool,
    },
    ExtendedReal,
    NonnegReal,
    UnitInterval,
    FiniteOrder {
        levels: Vec<String>,
    },
    Product {
        left: Box<DomainSpec>,
        right: Box<DomainSpec>,
    },
    Dual {
        of: Box<DomainSpec>,
    },
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl DomainSpec {
    pub fn of(d: &ValueDomain) -> DomainSpec {
        match d {
            ValueDomain::Boolean => DomainSpec::Boolean,
            ValueDomain::ExtendedNat { cap, cap_is_top } => DomainSpec::ExtendedNat { cap: *cap, cap_is_top: *cap_is_top },
            ValueDomain::ExtendedReal => DomainSpec::ExtendedReal,
            ValueDomain::NonNegReal => DomainSpec::NonnegReal,
            ValueDomain::UnitInterval => DomainSpec::UnitInterval,
            ValueDomain::FiniteOrder { levels } => DomainSpec::FiniteOrder { levels: levels.clone() },
            ValueDomain::Product(a, b) => {
                DomainSpec::Product { left: Box::new(DomainSpec::of(a)), right: Box::new(DomainSpec::of(b)) }
            }
            ValueDomain::Dual(x) => DomainSpec::Dual { of: Box::new(DomainSpec::of(x)) },
        }
    }

    pub fn build(&self) -> Result<ValueDomain> {
        let d = match self {
            DomainSpec::Boolean => ValueDomain::Boolean,
            DomainSpec::ExtendedNat { cap, cap_is_top } => {
                if *cap_is_top && cap.is_none() {
                    return Err(Error::Parse("cap_is_top needs a cap".into()));
                }
                ValueDomain::ExtendedNat { cap: *cap, cap_is_top: *cap_is_top }
            }
            DomainSpec::ExtendedReal => ValueDomain::ExtendedReal,
            DomainSpec::NonnegReal => ValueDomain::NonNegReal,
            DomainSpec::UnitInterval => ValueDomain::UnitInterval,
            DomainSpec::FiniteOrder { levels } => ValueDomain::finite_order(levels.clone())?,
            DomainSpec::Product { left, right } => ValueDomain::product(left.build()?, right.build()?),
            DomainSpec::Dual { of } => of.build()?.dual(),
        };
        d.validate()?;
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub id: String,
    /// A string in the domain's notation, or a JSON number or boolean.
    pub output: Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSpec {
    pub from: String,
    pub symbol: String,
    pub to: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertySpec {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Map<String, Json>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<StateSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transitions: Option<Vec<TransitionSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_function: Option<String>,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {} column {}: {e}", e.line(), e.column()))
}

pub fn parse_spec(text: &str) -> Result<PropertySpec> {
    let spec: PropertySpec = serde_json::from_str(text).map_err(parse_err)?;
    if spec.version != VERSION {
        return Err(Error::Parse(format!("unsupported version {} (expected {VERSION})", spec.version)));
    }
    Ok(spec)
}

pub fn parse_property<F: Scalar>(text: &str) -> Result<Property<F>> {
    parse_spec(text)?.build()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CapParams {
    cap: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SkipParams {
    #[serde(alias = "i")]
    skip: u64,
    cap: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundParams {
    n: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DfaParams {
    alphabet: Vec<String>,
    #[serde(default)]
    never: Option<String>,
    #[serde(default)]
    initial: Option<usize>,
    #[serde(default)]
    transitions: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    bad: Option<Vec<bool>>,
}

fn params<T: for<'de> Deserialize<'de>>(name: &str, p: &Option<serde_json::Map<String, Json>>) -> Result<T> {
    let obj = Json::Object(p.clone().unwrap_or_default());
    serde_json::from_value(obj).map_err(|e| Error::BadParams(format!("{name}: {e}")))
}

pub const BUILTINS: [&str; 9] = [
    "min_response",
    "max_response",
    "tail_min_response",
    "skip_min_response",
    "avg_response",
    "bounded_avg",
    "gf_a",
    "fg_b",
    "discounted_safety",
];

pub fn builtin<F: Scalar>(name: &str, p: &Option<serde_json::Map<String, Json>>) -> Result<Property<F>> {
    match name {
        "min_response" => builtins::min_response(params::<CapParams>(name, p)?.cap),
        "max_response" => builtins::max_response(params::<CapParams>(name, p)?.cap),
        "tail_min_response" => builtins::tail_min_response(params::<CapParams>(name, p)?.cap),
        "skip_min_response" => {
            let q: SkipParams = params(name, p)?;
            builtins::skip_min_response(q.skip, q.cap)
        }
        "avg_response" => params::<NoParams>(name, p).map(|_| builtins::avg_response()),
        "bounded_avg" => builtins::bounded_avg(params::<BoundParams>(name, p)?.n),
        "gf_a" => params::<NoParams>(name, p).map(|_| builtins::gf_a()),
        "fg_b" => params::<NoParams>(name, p).map(|_| builtins::fg_b()),
        "discounted_safety" => {
            let q: DfaParams = params(name, p)?;
            let alphabet = Alphabet::new(q.alphabet)?;
            match (q.never, q.initial, q.transitions, q.bad) {
                (Some(sym), None, None, None) => builtins::discounted_never(alphabet, &sym),
                (None, Some(initial), Some(delta), Some(bad)) => {
                    Ok(builtins::discounted_safety(SafetyDfa::new(alphabet, initial, delta, bad)?))
                }
                _ => Err(Error::BadParams(
                    "discounted_safety: give either \"never\" or \"initial\", \"transitions\" and \"bad\"".into(),
                )),
            }
        }
        _ => Err(Error::BadParams(format!("unknown builtin {name:?}"))),
    }
}

fn output_text(v: &Json) -> Result<String> {
    match v {
        Json::String(s) => Ok(s.clone()),
        Json::Number(n) => Ok(n.to_string()),
        Json::Bool(b) => Ok(b.to_string()),
        _ => Err(Error::Parse(format!("state output {v} is not a string, number or boolean"))),
    }
}

impl PropertySpec {
    fn form(&self) -> Result<&'static str> {
        let machine_fields = self.alphabet.is_some()
            || self.domain.is_some()
            || self.states.is_some()
            || self.initial.is_some()
            || self.transitions.is_some()
            || self.value_function.is_some();
        match (self.builtin.is_some(), self.fixture.is_some(), machine_fields) {
            (true, false, false) => Ok("builtin"),
            (false, true, false) if self.params.is_none() => Ok("fixture"),
            (false, false, true) if self.params.is_none() => Ok("machine"),
            (false, false, false) => Err(Error::Parse("expected \"builtin\", \"fixture\" or a machine".into())),
            _ => Err(Error::Parse("mixes fields of different property forms".into())),
        }
    }

    pub fn build<F: Scalar>(&self) -> Result<Property<F>> {
        let p = match self.form()? {
            "builtin" => builtin(self.builtin.as_deref().expect("form"), &self.params)?,
            "fixture" => fixtures::fixture(self.fixture.as_deref().expect("form"))?,
            _ => self.build_machine()?,
        };
        Ok(match &self.name {
            Some(n) => p.with_name(n.clone()),
            None => p,
        })
    }

    fn build_machine<F: Scalar>(&self) -> Result<Property<F>> {
        let missing = |f: &str| Error::Parse(format!("machine property is missing {f:?}"));
        let alphabet = Alphabet::new(self.alphabet.clone().ok_or_else(|| missing("alphabet"))?)?;
        let domain = self.domain.as_ref().ok_or_else(|| missing("domain"))?.build()?;
        let states = self.states.as_ref().ok_or_else(|| missing("states"))?;
        let transitions = self.transitions.as_ref().ok_or_else(|| missing("transitions"))?;
        let vf = ValueFunction::parse(self.value_function.as_deref().ok_or_else(|| missing("value_function"))?)?;
        if states.is_empty() {
            return Err(Error::Parse("machine has no states".into()));
        }
        let mut index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.id.as_str(), i).is_some() {
                return Err(Error::Parse(format!("duplicate state id {:?}", s.id)));
            }
        }
        let state = |id: &str| index.get(id).copied().ok_or_else(|| Error::Parse(format!("unknown state {id:?}")));
        let initial = match &self.initial {
            Some(id) => state(id)?,
            None => 0,
        };
        let outputs = states
            .iter()
            .map(|s| domain.parse_value::<F>(&output_text(&s.output)?))
            .collect::<Result<Vec<Value<F>>>>()?;
        let k = alphabet.len();
        let mut delta = vec![usize::MAX; states.len() * k];
        for (i, t) in transitions.iter().enumerate() {
            let q = state(&t.from)?;
            let a = alphabet.lookup(&t.symbol, i)?;
            let slot = &mut delta[q * k + a];
            if *slot != usize::MAX {
                return Err(Error::Parse(format!("two transitions from {:?} on {:?}", t.from, t.symbol)));
            }
            *slot = state(&t.to)?;
        }
        if let Some(i) = delta.iter().position(|&t| t == usize::MAX) {
            return Err(Error::Parse(format!(
                "no transition from {:?} on {:?}",
                states[i / k].id,
                alphabet.label(i % k)
            )));
        }
        let names = states.iter().map(|s| s.id.clone()).collect();
        let m = Machine::new(k, outputs, names, initial, delta)?;
        let name = self.name.clone().unwrap_or_else(|| "machine".into());
        Property::from_machine(name, alphabet, domain, vf, m)
    }
}

/// The full-machine spec of a machine-backed property.
pub fn machine_spec<F: Scalar>(p: &Property<F>) -> Result<PropertySpec> {
    let m = p
        .machine()
        .ok_or_else(|| Error::UnsupportedBackend(format!("{} is not machine-backed", p.name())))?;
    let d = p.domain();
    let a = p.alphabet();
    // state names may repeat after transformations; keep ids unique
    let mut seen = HashMap::new();
    let ids: Vec<String> = (0..m.num_states())
        .map(|q| {
            let base = m.name(q).to_string();
            let n = seen.entry(base.clone()).or_insert(0usize);
            *n += 1;
            if *n == 1 { base } else { format!("{base}#{n}") }
        })
        .collect();
    let states = (0..m.num_states())
        .map(|q| StateSpec { id: ids[q].clone(), output: Json::String(d.format(m.output(q))) })
        .collect();
    let transitions = (0..m.num_states())
        .flat_map(|q| {
            (0..a.len()).map(move |s| (q, s))
        })
        .map(|(q, s)| TransitionSpec {
            from: ids[q].clone(),
            symbol: a.label(s).to_string(),
            to: ids[m.next(q, s)].clone(),
        })
        .collect();
    Ok(PropertySpec {
        version: VERSION,
        name: Some(p.name().to_string()),
        alphabet: Some(a.symbols().to_vec()),
        domain: Some(DomainSpec::of(d)),
        states: Some(states),
        initial: Some(ids[m.initial()].clone()),
        transitions: Some(transitions),
        value_function: Some(p.value_function().name().to_string()),
        ..PropertySpec::default()
    })
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}
