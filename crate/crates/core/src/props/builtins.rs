//! Response-time properties, simple ω-regular examples and discounted safety.
//!
//! Response properties read the alphabet `{rq, gr, tk, oo}`: a request, a
//! grant, a clock tick and any other observation. A request is pending from
//! the moment it arrives while nothing is pending until the next grant.

use std::sync::Arc;

use crate::domains::{ExtNat, Value, ValueDomain};
use crate::error::{Error, Result};
use crate::props::{Machine, Oracle, PredictionSet, PrefixTracker, Property, ValueFunction};
use crate::props::oracle::Members;
use crate::scalar::Scalar;
use crate::traces::{Alphabet, Lasso};

pub const RQ: usize = 0;
pub const GR: usize = 1;
pub const TK: usize = 2;
pub const OO: usize = 3;

pub fn response_alphabet() -> Alphabet {
    Alphabet::new(["rq", "gr", "tk", "oo"]).expect("static alphabet")
}

fn check_cap(cap: u64) -> Result<()> {
    if cap == 0 {
        Err(Error::BadParams("cap must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// State of the last-response-time machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Last {
    Idle(Option<u64>),
    Pending(u64),
}

impl Last {
    fn step(self, a: usize, cap: u64) -> Last {
        match (self, a) {
            (Last::Idle(_), RQ) => Last::Pending(0),
            (Last::Pending(k), TK) => Last::Pending((k + 1).min(cap)),
            (Last::Pending(k), GR) => Last::Idle(Some(k)),
            (s, _) => s,
        }
    }

    fn output<F: Scalar>(self, d: &ValueDomain) -> Value<F> {
        match self {
            Last::Idle(Some(k)) => d.nat(k),
            _ => Value::Nat(ExtNat::Inf),
        }
    }

    fn label(self) -> String {
        match self {
            Last::Idle(None) => "idle".into(),
            Last::Idle(Some(k)) => format!("idle/{k}"),
            Last::Pending(k) => format!("pending/{k}"),
        }
    }
}

fn last_machine<F: Scalar>(cap: u64, d: &ValueDomain) -> Machine<F> {
    Machine::explore(4, Last::Idle(None), |s, a| s.step(a, cap), |s| s.output(d), |s| s.label())
}

/// Minimal response time: the last completed response time, aggregated with `inf`.
pub fn min_response<F: Scalar>(cap: u64) -> Result<Property<F>> {
    check_cap(cap)?;
    let d = ValueDomain::capped_nat(cap);
    let m = last_machine(cap, &d);
    Property::from_machine(format!("min_response(cap={cap})"), response_alphabet(), d, ValueFunction::Inf, m)
}

/// Tail-minimal response time: the last response time under `liminf`.
pub fn tail_min_response<F: Scalar>(cap: u64) -> Result<Property<F>> {
    check_cap(cap)?;
    let d = ValueDomain::capped_nat(cap);
    let m = last_machine(cap, &d);
    Property::from_machine(
        format!("tail_min_response(cap={cap})"),
        response_alphabet(),
        d,
        ValueFunction::Liminf,
        m,
    )
}

/// Minimal response time ignoring the first `skip` observations.
pub fn skip_min_response<F: Scalar>(skip: u64, cap: u64) -> Result<Property<F>> {
    check_cap(cap)?;
    let d = ValueDomain::capped_nat(cap);
    let m = Machine::explore(
        4,
        (0u64, Last::Idle(None)),
        |&(seen, s), a| if seen < skip { (seen + 1, s) } else { (seen, s.step(a, cap)) },
        |&(_, s)| s.output(&d),
        |&(seen, s)| if seen < skip { format!("skip{seen}") } else { s.label() },
    );
    Property::from_machine(
        format!("skip_min_response(i={skip}, cap={cap})"),
        response_alphabet(),
        d,
        ValueFunction::Inf,
        m,
    )
}

/// Maximal response time: the current response time aggregated with `sup`.
/// The saturated count `≥cap` is the top element.
pub fn max_response<F: Scalar>(cap: u64) -> Result<Property<F>> {
    check_cap(cap)?;
    let d = ValueDomain::saturating_nat(cap);
    let m = Machine::explore(
        4,
        None::<u64>,
        |s, a| match (*s, a) {
            (None, RQ) => Some(0),
            (Some(k), TK) => Some((k + 1).min(cap)),
            (Some(_), GR) => None,
            (s, _) => s,
        },
        |s| d.nat(s.unwrap_or(0)),
        |s| match s {
            None => "idle".into(),
            Some(k) => format!("pending/{k}"),
        },
    );
    Property::from_machine(format!("max_response(cap={cap})"), response_alphabet(), d, ValueFunction::Sup, m)
}

fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).expect("static alphabet")
}

fn ends_in<F: Scalar>(sym: usize) -> Machine<F> {
    Machine::new(
        2,
        vec![Value::Bool(false), Value::Bool(true)],
        vec!["other".into(), "last".into()],
        0,
        if sym == 0 { vec![1, 0, 1, 0] } else { vec![0, 1, 0, 1] },
    )
    .expect("static machine")
}

/// Infinitely many `a`: ends-in-`a` under `limsup`.
pub fn gf_a<F: Scalar>() -> Property<F> {
    Property::from_machine("gf_a", ab(), ValueDomain::Boolean, ValueFunction::Limsup, ends_in(0))
        .expect("static property")
}

/// Eventually only `b`: ends-in-`b` under `liminf`.
pub fn fg_b<F: Scalar>() -> Property<F> {
    Property::from_machine("fg_b", ab(), ValueDomain::Boolean, ValueFunction::Liminf, ends_in(1))
        .expect("static property")
}

/// Running statistics of a response trace, uncapped.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct RespStats {
    pending: bool,
    current: u64,
    time: u64,
    valid: u64,
    max: u64,
}

impl RespStats {
    fn step(&mut self, a: usize) {
        match a {
            RQ if !self.pending => {
                self.pending = true;
                self.current = 0;
                self.valid += 1;
            }
            TK if self.pending => {
                self.current += 1;
                self.time += 1;
                self.max = self.max.max(self.current);
            }
            GR if self.pending => {
                self.pending = false;
                self.current = 0;
            }
            _ => {}
        }
    }

    fn of(s: &[usize]) -> RespStats {
        let mut st = RespStats::default();
        for &a in s {
            st.step(a);
        }
        st
    }

    fn avg<F: Scalar>(&self) -> F {
        if self.valid == 0 {
            F::infinity()
        } else {
            F::from_u64(self.time).unwrap() / F::from_u64(self.valid).unwrap()
        }
    }
}

/// Long-run behavior of the response statistics on a lasso.
struct RespLimit {
    avg: f64,
    /// Supremum of the current response time, `None` when unbounded.
    max: Option<u64>,
}

fn resp_limit(l: &Lasso) -> RespLimit {
    let mut st = RespStats::default();
    for &a in l.stem() {
        st.step(a);
    }
    let run_cycle = |st: &mut RespStats| {
        for &a in l.cycle() {
            st.step(a);
        }
    };
    // the pending status at cycle boundaries is eventually periodic with period at most 2
    let p0 = st.pending;
    let mut probe = st;
    run_cycle(&mut probe);
    let p1 = probe.pending;
    run_cycle(&mut probe);
    let p2 = probe.pending;
    let alternating = p1 != p0 && p2 != p1;
    if p1 != p0 && !alternating {
        run_cycle(&mut st);
    }
    let period = if alternating { 2 } else { 1 };
    let start = st;
    let mut unit = st;
    for _ in 0..period {
        run_cycle(&mut unit);
    }
    let (dt, dv) = (unit.time - start.time, unit.valid - start.valid);
    let avg = if dv > 0 {
        dt as f64 / dv as f64
    } else if dt > 0 || start.valid == 0 {
        f64::INFINITY
    } else {
        start.time as f64 / start.valid as f64
    };
    // a request pending through a whole unit with ticks stays pending forever
    let mut probe = start;
    let mut granted = false;
    let mut ticked = false;
    for _ in 0..period {
        for &a in l.cycle() {
            probe.step(a);
            granted |= start.pending && !probe.pending;
            ticked |= a == TK;
        }
    }
    let max = if start.pending && !granted && ticked {
        None
    } else {
        let mut probe = start;
        for _ in 0..3 * period {
            run_cycle(&mut probe);
        }
        Some(probe.max)
    };
    RespLimit { avg, max }
}

struct AvgResponse;

struct AvgTracker(RespStats);

impl<F: Scalar> PrefixTracker<F> for AvgTracker {
    fn push(&mut self, sym: usize) {
        self.0.step(sym);
    }

    fn value(&self) -> Value<F> {
        Value::Real(self.0.avg())
    }

    fn sup_ext(&self) -> Option<Value<F>> {
        Some(Value::Real(F::infinity()))
    }

    fn inf_ext(&self) -> Option<Value<F>> {
        Some(Value::Real(F::zero()))
    }
}

impl<F: Scalar> Oracle<F> for AvgResponse {
    fn eval(&self, s: &[usize]) -> Value<F> {
        Value::Real(RespStats::of(s).avg())
    }

    fn eval_lasso(&self, l: &Lasso) -> Option<Value<F>> {
        Some(Value::Real(F::from_f64_lossy(resp_limit(l).avg)))
    }

    fn sup_ext(&self, _s: &[usize]) -> Option<Value<F>> {
        Some(Value::Real(F::infinity()))
    }

    fn inf_ext(&self, _s: &[usize]) -> Option<Value<F>> {
        Some(Value::Real(F::zero()))
    }

    fn prediction_set(&self, _s: &[usize]) -> Option<PredictionSet<F>> {
        Some(PredictionSet {
            sup: Value::Real(F::infinity()),
            inf: Value::Real(F::zero()),
            members: Members::Rule(Arc::new(|v| matches!(v, Value::Real(x) if *x >= F::zero()))),
            notable: vec![Value::Real(F::zero()), Value::Real(F::one()), Value::Real(F::infinity())],
        })
    }

    fn tracker(&self) -> Option<Box<dyn PrefixTracker<F>>> {
        Some(Box::new(AvgTracker(RespStats::default())))
    }
}

/// Average response time: ticks while a request is pending divided by the
/// number of valid requests, under `liminf`, over `[0, ∞]`.
pub fn avg_response<F: Scalar>() -> Property<F> {
    Property::from_oracle(
        "avg_response",
        response_alphabet(),
        ValueDomain::NonNegReal,
        ValueFunction::Liminf,
        Arc::new(AvgResponse),
    )
}

/// Average response time as long as no response takes more than `n` ticks, else 0.
struct BoundedAvg {
    n: u64,
}

impl BoundedAvg {
    fn value<F: Scalar>(&self, st: &RespStats) -> F {
        if st.max > self.n {
            F::zero()
        } else {
            st.avg()
        }
    }
}

impl<F: Scalar> Oracle<F> for BoundedAvg {
    fn eval(&self, s: &[usize]) -> Value<F> {
        Value::Real(self.value(&RespStats::of(s)))
    }

    fn eval_lasso(&self, l: &Lasso) -> Option<Value<F>> {
        let lim = resp_limit(l);
        let v = match lim.max {
            Some(m) if m <= self.n => F::from_f64_lossy(lim.avg),
            _ => F::zero(),
        };
        Some(Value::Real(v))
    }

    fn sup_ext(&self, s: &[usize]) -> Option<Value<F>> {
        let st = RespStats::of(s);
        let v = if st.max > self.n {
            F::zero()
        } else if st.valid == 0 {
            F::infinity()
        } else {
            F::from_u64(self.n).unwrap()
        };
        Some(Value::Real(v))
    }

    fn inf_ext(&self, _s: &[usize]) -> Option<Value<F>> {
        Some(Value::Real(F::zero()))
    }
}

/// Average response time guarded by a bound `n` on the maximal response time.
pub fn bounded_avg<F: Scalar>(n: u64) -> Result<Property<F>> {
    if n == 0 {
        return Err(Error::BadParams("n must be positive".into()));
    }
    Ok(Property::from_oracle(
        format!("bounded_avg(n={n})"),
        response_alphabet(),
        ValueDomain::NonNegReal,
        ValueFunction::Liminf,
        Arc::new(BoundedAvg { n }),
    ))
}

/// A deterministic automaton describing a boolean safety property: the
/// infinite words whose run never enters a bad state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafetyDfa {
    pub alphabet: Alphabet,
    pub initial: usize,
    /// `delta[q][a]`.
    pub delta: Vec<Vec<usize>>,
    pub bad: Vec<bool>,
}

impl SafetyDfa {
    pub fn new(alphabet: Alphabet, initial: usize, delta: Vec<Vec<usize>>, bad: Vec<bool>) -> Result<Self> {
        let n = delta.len();
        if n == 0 || initial >= n || bad.len() != n {
            return Err(Error::BadParams("malformed safety automaton".into()));
        }
        if delta.iter().any(|row| row.len() != alphabet.len() || row.iter().any(|&t| t >= n)) {
            return Err(Error::BadParams("safety automaton transitions are not complete".into()));
        }
        Ok(SafetyDfa { alphabet, initial, delta, bad })
    }

    /// The property "never `sym`".
    pub fn never(alphabet: Alphabet, sym: &str) -> Result<Self> {
        let b = alphabet
            .index(sym)
            .ok_or_else(|| Error::BadParams(format!("symbol {sym:?} not in alphabet")))?;
        let delta = vec![(0..alphabet.len()).map(|a| usize::from(a == b)).collect(), vec![1; alphabet.len()]];
        SafetyDfa::new(alphabet, 0, delta, vec![false, true])
    }

    /// States from which some infinite run avoids bad states.
    fn live_states(&self) -> Vec<bool> {
        let mut live: Vec<bool> = self.bad.iter().map(|b| !b).collect();
        loop {
            let mut changed = false;
            for q in 0..live.len() {
                if live[q] && !self.delta[q].iter().any(|&t| live[t]) {
                    live[q] = false;
                    changed = true;
                }
            }
            if !changed {
                return live;
            }
        }
    }
}

struct DiscountedSafety {
    dfa: SafetyDfa,
    live: Vec<bool>,
    /// Shortest number of steps from a live state to a non-live one.
    escape: Vec<Option<u64>>,
}

/// Where a prefix stands with respect to the safety automaton.
#[derive(Clone, Copy, Debug)]
enum Standing {
    Live { state: usize, len: u64 },
    Dead { at: u64 },
}

impl DiscountedSafety {
    fn new(dfa: SafetyDfa) -> Self {
        let live = dfa.live_states();
        let n = live.len();
        let mut escape: Vec<Option<u64>> = (0..n).map(|q| (!live[q]).then_some(0)).collect();
        loop {
            let mut changed = false;
            for q in 0..n {
                if !live[q] {
                    continue;
                }
                let best = dfa.delta[q].iter().filter_map(|&t| escape[t]).min().map(|d| d + 1);
                if best.is_some() && (escape[q].is_none() || best < escape[q]) {
                    escape[q] = best;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        DiscountedSafety { dfa, live, escape }
    }

    fn step(&self, st: Standing, a: usize) -> Standing {
        match st {
            Standing::Live { state, len } => {
                let t = self.dfa.delta[state][a];
                if self.live[t] {
                    Standing::Live { state: t, len: len + 1 }
                } else {
                    Standing::Dead { at: len + 1 }
                }
            }
            dead => dead,
        }
    }

    fn start(&self) -> Standing {
        if self.live[self.dfa.initial] {
            Standing::Live { state: self.dfa.initial, len: 0 }
        } else {
            Standing::Dead { at: 0 }
        }
    }

    fn standing(&self, s: &[usize]) -> Standing {
        s.iter().fold(self.start(), |st, &a| self.step(st, a))
    }

    fn discount<F: Scalar>(k: u64) -> F {
        F::one() - F::from_f64_lossy(2f64.powi(-(k.min(i32::MAX as u64) as i32)))
    }

    fn value<F: Scalar>(st: Standing) -> F {
        match st {
            Standing::Live { .. } => F::one(),
            Standing::Dead { at } => Self::discount(at),
        }
    }

    fn lower<F: Scalar>(&self, st: Standing) -> F {
        match st {
            Standing::Live { state, len } => match self.escape[state] {
                Some(k) => Self::discount(len + k),
                None => F::one(),
            },
            Standing::Dead { at } => Self::discount(at),
        }
    }

    /// Whether a run from `q` can first leave the live states after exactly `k` steps.
    fn dies_after(&self, q: usize, k: usize) -> bool {
        if k == 0 {
            return false;
        }
        let n = self.live.len();
        let mut cur = vec![false; n];
        cur[q] = true;
        for _ in 0..k - 1 {
            let mut next = vec![false; n];
            for p in (0..n).filter(|&p| cur[p]) {
                for &t in &self.dfa.delta[p] {
                    if self.live[t] {
                        next[t] = true;
                    }
                }
            }
            cur = next;
        }
        (0..n).any(|p| cur[p] && self.dfa.delta[p].iter().any(|&t| !self.live[t]))
    }
}

impl<F: Scalar> Oracle<F> for DiscountedSafety {
    fn eval(&self, s: &[usize]) -> Value<F> {
        Value::Real(Self::value(self.standing(s)))
    }

    fn eval_lasso(&self, l: &Lasso) -> Option<Value<F>> {
        let mut st = self.standing(l.stem());
        // after live.len() cycle iterations the live run has entered its recurring part
        for _ in 0..=self.live.len() {
            for &a in l.cycle() {
                st = self.step(st, a);
            }
        }
        Some(Value::Real(Self::value(st)))
    }

    fn sup_ext(&self, s: &[usize]) -> Option<Value<F>> {
        Some(Value::Real(Self::value(self.standing(s))))
    }

    fn inf_ext(&self, s: &[usize]) -> Option<Value<F>> {
        Some(Value::Real(self.lower(self.standing(s))))
    }

    fn prediction_set(&self, s: &[usize]) -> Option<PredictionSet<F>> {
        let st = self.standing(s);
        let d = ValueDomain::UnitInterval;
        match st {
            Standing::Dead { .. } => Some(PredictionSet::finite(&d, vec![Value::Real(Self::value(st))])),
            Standing::Live { state, len } => {
                let me = DiscountedSafety::new(self.dfa.clone());
                let lower: F = self.lower(st);
                let member = move |v: &Value<F>| -> bool {
                    let Value::Real(x) = v else { return false };
                    if x.approx_eq(F::one()) {
                        return true;
                    }
                    let gap = (F::one() - *x).to_f64_lossy();
                    if gap.is_nan() || gap <= 0.0 {
                        return false;
                    }
                    let m = -gap.log2();
                    let k = m.round();
                    if (m - k).abs() > 1e-6 || k < (len + 1) as f64 || k > 2000.0 {
                        return false;
                    }
                    me.dies_after(state, k as usize - len as usize)
                };
                let mut notable = vec![Value::Real(F::one()), Value::Real(lower)];
                for k in 1..=4 {
                    notable.push(Value::Real(Self::discount(len + k)));
                }
                Some(PredictionSet {
                    sup: Value::Real(F::one()),
                    inf: Value::Real(lower),
                    members: Members::Rule(Arc::new(member)),
                    notable,
                })
            }
        }
    }

    fn alternate_forms(&self) -> Vec<ValueFunction> {
        // the same values arise from 1 - 2^-|s| on live prefixes under sup
        vec![ValueFunction::Sup]
    }
}

/// Discounted safety of a boolean safety property: 1 on traces in it, and
/// `1 - 2^-|r|` otherwise, where `r` is the shortest prefix that cannot be
/// extended into the property.
pub fn discounted_safety<F: Scalar>(dfa: SafetyDfa) -> Property<F> {
    let alphabet = dfa.alphabet.clone();
    Property::from_oracle(
        "discounted_safety",
        alphabet,
        ValueDomain::UnitInterval,
        ValueFunction::Inf,
        Arc::new(DiscountedSafety::new(dfa)),
    )
}

/// Discounted "never `sym`" over `{a, b}`-style alphabets.
pub fn discounted_never<F: Scalar>(alphabet: Alphabet, sym: &str) -> Result<Property<F>> {
    Ok(discounted_safety(SafetyDfa::never(alphabet, sym)?))
}
