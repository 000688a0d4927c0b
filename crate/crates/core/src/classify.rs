//! Safety, co-safety, liveness, co-liveness, multi-liveness, approximate
//! safety, sup-closedness and verdict-based notions.
//!
//! Machine-backed properties are decided exactly on their configuration graph:
//! every infinite run eventually stays inside one strongly connected component,
//! its value is determined by the nodes it visits infinitely often, and the
//! closure value is constant on the component. The pairs `(Φ, Φ*)` over all
//! infinite traces are therefore exactly the pairs (atom value, component top),
//! each realised by a lasso. Oracle-backed and derived properties are checked on
//! a bounded sample of lassos.

use std::fmt;

use crate::closure::{self, sort_values, ConfigGraph, CLOSURE_HORIZON};
use crate::domains::{Value, ValueDomain};
use crate::error::{Error, Result};
use crate::props::{Property, ValueFunction};
use crate::sample::{enumerate_lassos, lasso_sample, words_up_to};
use crate::scalar::{gap, Scalar};
use crate::traces::Lasso;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    Safe,
    Cosafe,
    Live,
    Colive,
    Multilive,
    SupClosed,
    VerdictSafe,
    VerdictLive,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::Safe,
        Check::Cosafe,
        Check::Live,
        Check::Colive,
        Check::Multilive,
        Check::SupClosed,
        Check::VerdictSafe,
        Check::VerdictLive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Safe => "safe",
            Check::Cosafe => "cosafe",
            Check::Live => "live",
            Check::Colive => "colive",
            Check::Multilive => "multilive",
            Check::SupClosed => "sup_closed",
            Check::VerdictSafe => "verdict_safe",
            Check::VerdictLive => "verdict_live",
        }
    }

    pub fn parse(s: &str) -> Result<Check> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown check {s:?}")))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    /// No violation among the sampled lassos or traces up to this size.
    NoViolationFoundUpTo(usize),
}

impl Verdict {
    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }

    pub fn is_no(self) -> bool {
        self == Verdict::No
    }

    /// Yes, or no violation found by a bounded check.
    pub fn holds_so_far(self) -> bool {
        !self.is_no()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Yes => f.write_str("Yes"),
            Verdict::No => f.write_str("No"),
            Verdict::NoViolationFoundUpTo(b) => write!(f, "NoViolationFoundUpTo({b})"),
        }
    }
}

/// A counterexample. Which fields are set depends on the check:
///
/// * safe / cosafe / live / colive / multilive: `lasso` with its `value` and
///   the closure value as `bound`; `prefix` is the shortest prefix of the
///   lasso at which the closure value is already reached.
/// * sup_closed: `prefix` is the finite trace and `bound` the unrealised supremum.
/// * verdict_safe: `lasso`, its `value`, and a value `bound` that is not below
///   it yet stays possible along the whole lasso.
/// * verdict_live: `lasso`, its `value`, a value `bound` not below it, and a
///   `prefix` after which `bound` is no longer possible.
#[derive(Clone, Debug)]
pub struct Witness<F> {
    pub lasso: Option<Lasso>,
    pub prefix: Option<Vec<usize>>,
    pub value: Option<Value<F>>,
    pub bound: Option<Value<F>>,
}

#[derive(Clone, Debug)]
pub struct Entry<F> {
    pub check: Check,
    pub verdict: Verdict,
    pub witness: Option<Witness<F>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    Bounded,
}

/// A real-valued bound, exact or estimated from samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<F> {
    pub value: F,
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct ClassificationReport<F> {
    pub property: String,
    pub method: Method,
    pub budget: usize,
    pub entries: Vec<Entry<F>>,
    /// Least `α` for which the property is `α`-safe.
    pub alpha_min: Option<Estimate<F>>,
    /// Least `β` for which the property is `β`-co-safe.
    pub beta_min: Option<Estimate<F>>,
}

impl<F> ClassificationReport<F> {
    pub fn entry(&self, c: Check) -> Option<&Entry<F>> {
        self.entries.iter().find(|e| e.check == c)
    }

    pub fn verdict(&self, c: Check) -> Option<Verdict> {
        self.entry(c).map(|e| e.verdict)
    }

    pub fn witness(&self, c: Check) -> Option<&Witness<F>> {
        self.entry(c).and_then(|e| e.witness.as_ref())
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    /// Bound on stem and cycle length of sampled lassos (and on the length
    /// of finite traces for prefix checks).
    pub budget: usize,
    /// Maximal number of sampled lassos for oracle-backed properties.
    pub samples: usize,
    /// Maximal number of sampled lassos for derived properties.
    pub derived_samples: usize,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options { budget: 6, samples: 4096, derived_samples: 256, seed: 0 }
    }
}

impl Options {
    pub fn with_budget(budget: usize) -> Self {
        Options { budget, ..Options::default() }
    }
}

pub fn classify<F: Scalar>(p: &Property<F>, budget: usize) -> Result<ClassificationReport<F>> {
    classify_with(p, &Options::with_budget(budget))
}

pub fn classify_with<F: Scalar>(p: &Property<F>, opts: &Options) -> Result<ClassificationReport<F>> {
    if p.machine().is_some() {
        let g = ConfigGraph::build(p)?;
        let entries = Check::ALL.iter().map(|&c| exact_check(&g, c)).collect();
        let numeric = p.domain().is_numeric();
        return Ok(ClassificationReport {
            property: p.name().to_string(),
            method: Method::Exact,
            budget: opts.budget,
            entries,
            alpha_min: numeric.then(|| exact_alpha(&g, false).0),
            beta_min: numeric.then(|| exact_alpha(&g, true).0),
        });
    }
    let s = Sampler::new(p, opts)?;
    let entries = Check::ALL.iter().filter_map(|&c| s.check(c)).collect();
    let numeric = p.domain().is_numeric();
    Ok(ClassificationReport {
        property: p.name().to_string(),
        method: Method::Bounded,
        budget: opts.budget,
        entries,
        alpha_min: if numeric { s.alpha(false).map(|a| a.0) } else { None },
        beta_min: if numeric { s.alpha(true).map(|a| a.0) } else { None },
    })
}

/// A single check.
pub fn check<F: Scalar>(p: &Property<F>, c: Check, opts: &Options) -> Result<Entry<F>> {
    if p.machine().is_some() {
        let g = ConfigGraph::build(p)?;
        return Ok(exact_check(&g, c));
    }
    Sampler::new(p, opts)?.check(c).ok_or_else(|| {
        Error::UnsupportedBackend(format!("{} cannot be checked for {c}", p.name()))
    })
}

pub fn check_sup_closed<F: Scalar>(p: &Property<F>, budget: usize) -> Result<Entry<F>> {
    check(p, Check::SupClosed, &Options::with_budget(budget))
}

pub fn check_verdict_safety<F: Scalar>(p: &Property<F>, budget: usize) -> Result<Entry<F>> {
    check(p, Check::VerdictSafe, &Options::with_budget(budget))
}

pub fn check_verdict_liveness<F: Scalar>(p: &Property<F>, budget: usize) -> Result<Entry<F>> {
    check(p, Check::VerdictLive, &Options::with_budget(budget))
}

#[derive(Clone, Debug)]
pub struct AlphaReport<F> {
    pub verdict: Verdict,
    pub witness: Option<Witness<F>>,
    pub min: Estimate<F>,
}

/// Whether `Φ* − Φ ≤ alpha` everywhere, with the least such bound.
pub fn check_alpha_safety<F: Scalar>(p: &Property<F>, alpha: F, opts: &Options) -> Result<AlphaReport<F>> {
    alpha_report(p, alpha, opts, false)
}

/// Whether `Φ − Φ_* ≤ beta` everywhere, with the least such bound.
pub fn check_beta_cosafety<F: Scalar>(p: &Property<F>, beta: F, opts: &Options) -> Result<AlphaReport<F>> {
    alpha_report(p, beta, opts, true)
}

fn alpha_report<F: Scalar>(p: &Property<F>, bound: F, opts: &Options, co: bool) -> Result<AlphaReport<F>> {
    if !p.domain().is_numeric() {
        return Err(Error::DomainNotNumeric(p.domain().to_string()));
    }
    let (min, witness, budget) = if p.machine().is_some() {
        let g = ConfigGraph::build(p)?;
        let (m, w) = exact_alpha(&g, co);
        (m, w, None)
    } else {
        let s = Sampler::new(p, opts)?;
        let (m, w) = s.alpha(co).ok_or_else(|| {
            Error::UnsupportedBackend(format!("{} has no closure to compare against", p.name()))
        })?;
        (m, w, Some(opts.budget))
    };
    let within = min.value <= bound + F::tolerance();
    let verdict = match (within, min.exact, budget) {
        (false, _, _) => Verdict::No,
        (true, true, _) | (true, _, None) => Verdict::Yes,
        (true, false, Some(b)) => Verdict::NoViolationFoundUpTo(b),
    };
    Ok(AlphaReport { verdict, witness: if within { None } else { witness }, min })
}

fn is_interior<F: Scalar>(d: &ValueDomain, v: &Value<F>) -> bool {
    !d.eq_values(v, &d.top()) && !d.eq_values(v, &d.bottom())
}

/// Picks the first witness whose value lies strictly between bottom and top,
/// or the first one overall.
fn prefer_interior<F: Scalar>(d: &ValueDomain, ws: Vec<Witness<F>>) -> Option<Witness<F>> {
    let i = ws
        .iter()
        .position(|w| w.value.as_ref().is_some_and(|v| is_interior(d, v)))
        .unwrap_or(0);
    ws.into_iter().nth(i)
}

fn entry<F>(check: Check, witness: Option<Witness<F>>, clean: Verdict) -> Entry<F> {
    match witness {
        Some(w) => Entry { check, verdict: Verdict::No, witness: Some(w) },
        None => Entry { check, verdict: clean, witness: None },
    }
}

// ---------------------------------------------------------------------------
// exact method

/// Shortest prefix of `l` whose configuration satisfies `stop`.
fn first_prefix<F: Scalar>(g: &ConfigGraph<F>, l: &Lasso, stop: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
    let n = l.stem().len() + (g.len() + 1) * l.cycle().len();
    let mut v = g.initial();
    let mut prefix = Vec::new();
    for i in 0..=n {
        if stop(v) {
            return Some(prefix);
        }
        if i < n {
            let a = l.at(i);
            prefix.push(a);
            v = g.step(v, a);
        }
    }
    None
}

fn verdict_live_candidates<F: Scalar>(g: &ConfigGraph<F>, x: &Value<F>) -> Vec<Value<F>> {
    let d = g.domain();
    let mut cands: Vec<Value<F>> = match d.elements() {
        Some(es) => es,
        None => {
            let mut cs: Vec<Value<F>> = g.components().iter().flat_map(|c| c.predictions.clone()).collect();
            cs.push(d.top());
            if let Some(xr) = d.to_real(x) {
                let above: Vec<F> = cs.iter().filter_map(|c| d.to_real(c)).filter(|&c| c > xr).collect();
                for c in above {
                    let mid = if c.is_finite() && xr.is_finite() {
                        (c + xr) / (F::one() + F::one())
                    } else if xr.is_finite() {
                        xr + F::one()
                    } else {
                        continue;
                    };
                    if let Some(v) = d.from_real(mid) {
                        cs.push(v);
                    }
                }
            }
            cs
        }
    };
    cands.retain(|v| d.not_leq(v, x));
    sort_values(d, &mut cands);
    cands
}

fn exact_check<F: Scalar>(g: &ConfigGraph<F>, c: Check) -> Entry<F> {
    let d = g.domain();
    let top = d.top();
    let bottom = d.bottom();
    let comps = g.components();
    let pair = |ci: usize, ai: usize| {
        let comp = &comps[ci];
        let atom = &comp.atoms[ai];
        (comp, atom, g.atom_lasso(atom))
    };
    let closure_witness = |l: Lasso, x: &Value<F>, bound: &Value<F>, upper: bool| {
        let prefix = first_prefix(g, &l, |v| {
            let b = if upper { g.top(v) } else { g.bottom(v) };
            d.eq_values(b, bound)
        });
        Witness { lasso: Some(l), prefix, value: Some(x.clone()), bound: Some(bound.clone()) }
    };
    let first = |bad: &dyn Fn(&Value<F>, &closure::Component<F>) -> bool, upper: bool| {
        g.value_pairs().into_iter().find_map(|(ci, ai)| {
            let comp = &comps[ci];
            let x = &comp.atoms[ai].value;
            if !bad(x, comp) {
                return None;
            }
            let (comp, atom, l) = pair(ci, ai);
            let bound = if upper { &comp.top } else { &comp.bottom };
            Some(closure_witness(l, &atom.value, bound, upper))
        })
    };
    match c {
        Check::Safe => entry(c, first(&|x, k| !d.eq_values(x, &k.top), true), Verdict::Yes),
        Check::Cosafe => entry(c, first(&|x, k| !d.eq_values(x, &k.bottom), false), Verdict::Yes),
        Check::Live => entry(
            c,
            first(&|x, k| !d.eq_values(x, &top) && d.eq_values(x, &k.top), true),
            Verdict::Yes,
        ),
        Check::Colive => entry(
            c,
            first(&|x, k| !d.eq_values(x, &bottom) && d.eq_values(x, &k.bottom), false),
            Verdict::Yes,
        ),
        Check::Multilive => entry(c, first(&|_, k| d.eq_values(&k.top, &bottom), true), Verdict::Yes),
        Check::SupClosed => {
            let mut order: Vec<usize> = (0..comps.len()).collect();
            order.sort_by_key(|&i| comps[i].nodes[0]);
            let w = order.into_iter().find_map(|i| {
                let comp = &comps[i];
                let sup = d.join_all(&comp.predictions);
                if comp.predictions.iter().any(|v| d.eq_values(v, &sup)) {
                    return None;
                }
                Some(Witness {
                    lasso: None,
                    prefix: Some(g.word_to(comp.nodes[0])),
                    value: None,
                    bound: Some(sup),
                })
            });
            entry(c, w, Verdict::Yes)
        }
        Check::VerdictSafe => {
            let w = g.value_pairs().into_iter().find_map(|(ci, ai)| {
                let (comp, atom, l) = pair(ci, ai);
                let sup = d.join_all(&comp.predictions);
                if d.eq_values(&atom.value, &sup) {
                    return None;
                }
                // a value not below Φ(l) that stays possible forever
                let v = comp
                    .predictions
                    .iter()
                    .find(|v| d.not_leq(v, &atom.value))
                    .cloned()
                    .unwrap_or(sup);
                Some(Witness { lasso: Some(l), prefix: None, value: Some(atom.value.clone()), bound: Some(v) })
            });
            entry(c, w, Verdict::Yes)
        }
        Check::VerdictLive => {
            let mut found = Vec::new();
            for (ci, ai) in g.value_pairs() {
                let (comp, atom, l) = pair(ci, ai);
                let x = &atom.value;
                for v in verdict_live_candidates(g, x) {
                    if comp.predictions.iter().any(|p| d.eq_values(p, &v)) {
                        continue;
                    }
                    let prefix = first_prefix(g, &l, |n| !g.prediction_set(n).iter().any(|p| d.eq_values(p, &v)));
                    found.push(Witness { lasso: Some(l.clone()), prefix, value: Some(x.clone()), bound: Some(v) });
                    break;
                }
            }
            entry(c, prefer_interior(d, found), Verdict::Yes)
        }
    }
}

fn exact_alpha<F: Scalar>(g: &ConfigGraph<F>, co: bool) -> (Estimate<F>, Option<Witness<F>>) {
    let d = g.domain();
    let mut best = F::zero();
    let mut witness = None;
    for (ci, ai) in g.value_pairs() {
        let comp = &g.components()[ci];
        let atom = &comp.atoms[ai];
        let (x, b) = match (d.to_real(&atom.value), d.to_real(if co { &comp.bottom } else { &comp.top })) {
            (Some(x), Some(b)) => (x, b),
            _ => continue,
        };
        let e = if co { gap(x, b) } else { gap(b, x) };
        if e > best || (witness.is_none() && e > F::zero()) {
            best = e;
            let bound = if co { comp.bottom.clone() } else { comp.top.clone() };
            witness = Some(Witness {
                lasso: Some(g.atom_lasso(atom)),
                prefix: None,
                value: Some(atom.value.clone()),
                bound: Some(bound),
            });
        }
    }
    (Estimate { value: best, exact: true }, witness)
}

// ---------------------------------------------------------------------------
// bounded method

struct Sampler<'a, F: Scalar> {
    p: &'a Property<F>,
    opts: &'a Options,
    lassos: Vec<Lasso>,
    values: Vec<Value<F>>,
    small: Vec<Lasso>,
}

impl<'a, F: Scalar> Sampler<'a, F> {
    fn new(p: &'a Property<F>, opts: &'a Options) -> Result<Self> {
        let k = p.alphabet().len();
        let cap = if p.derived().is_some() { opts.derived_samples } else { opts.samples };
        let lassos = lasso_sample(k, opts.budget, cap, opts.seed);
        let values = lassos.iter().map(|l| p.eval_lasso(l)).collect::<Result<Vec<_>>>()?;
        let small = enumerate_lassos(k, 1, 2);
        Ok(Sampler { p, opts, lassos, values, small })
    }

    fn domain(&self) -> &ValueDomain {
        self.p.domain()
    }

    fn bounded(&self) -> Verdict {
        Verdict::NoViolationFoundUpTo(self.opts.budget)
    }

    /// Closure value on `l` from the hook when available, otherwise the best
    /// value found among candidate continuations at each early prefix.
    fn closure(&self, l: &Lasso, upper: bool) -> Value<F> {
        estimate_closure(self.p, l, upper, &self.small)
    }

    fn check(&self, c: Check) -> Option<Entry<F>> {
        let d = self.domain();
        let forms = self.p.known_forms();
        let (top, bottom) = (d.top(), d.bottom());
        let closure_scan = |bad: &dyn Fn(&Value<F>, &Value<F>) -> bool, upper: bool| {
            self.lassos.iter().zip(&self.values).find_map(|(l, x)| {
                let b = self.closure(l, upper);
                bad(x, &b).then(|| Witness {
                    lasso: Some(l.clone()),
                    prefix: None,
                    value: Some(x.clone()),
                    bound: Some(b),
                })
            })
        };
        let e = match c {
            Check::Safe if forms.contains(&ValueFunction::Inf) => entry(c, None, Verdict::Yes),
            Check::Cosafe if forms.contains(&ValueFunction::Sup) => entry(c, None, Verdict::Yes),
            Check::Safe => entry(c, closure_scan(&|x, b| !d.eq_values(x, b), true), self.bounded()),
            Check::Cosafe => entry(c, closure_scan(&|x, b| !d.eq_values(x, b), false), self.bounded()),
            Check::Live => entry(
                c,
                closure_scan(&|x, b| !d.eq_values(x, &top) && d.eq_values(x, b), true),
                self.bounded(),
            ),
            Check::Colive => entry(
                c,
                closure_scan(&|x, b| !d.eq_values(x, &bottom) && d.eq_values(x, b), false),
                self.bounded(),
            ),
            Check::Multilive => entry(c, closure_scan(&|_, b| d.eq_values(b, &bottom), true), self.bounded()),
            Check::SupClosed => {
                let o = self.p.oracle()?;
                o.prediction_set(&[])?;
                let k = self.p.alphabet().len();
                let mut len = self.opts.budget;
                while len > 0 && (k as f64).powi(len as i32) > self.opts.samples as f64 {
                    len -= 1;
                }
                let w = words_up_to(k, len).into_iter().find_map(|s| {
                    let ps = o.prediction_set(&s)?;
                    (!ps.sup_realized(d)).then(|| Witness {
                        lasso: None,
                        prefix: Some(s),
                        value: None,
                        bound: Some(ps.sup.clone()),
                    })
                });
                entry(c, w, self.bounded())
            }
            Check::VerdictSafe => {
                self.p.oracle()?.prediction_set(&[])?;
                let w = self.lassos.iter().zip(&self.values).find_map(|(l, x)| {
                    let v = undismissed_value(self.p, l, x, self.opts.budget)?;
                    Some(Witness { lasso: Some(l.clone()), prefix: None, value: Some(x.clone()), bound: Some(v) })
                });
                entry(c, w, self.bounded())
            }
            Check::VerdictLive => {
                self.p.oracle()?.prediction_set(&[])?;
                let found: Vec<Witness<F>> = self
                    .lassos
                    .iter()
                    .zip(&self.values)
                    .filter_map(|(l, x)| {
                        let (v, s) = dismissed_value(self.p, l, x, self.opts.budget)?;
                        Some(Witness { lasso: Some(l.clone()), prefix: Some(s), value: Some(x.clone()), bound: Some(v) })
                    })
                    .collect();
                entry(c, prefer_interior(d, found), self.bounded())
            }
        };
        Some(e)
    }

    fn alpha(&self, co: bool) -> Option<(Estimate<F>, Option<Witness<F>>)> {
        let d = self.domain();
        let form = if co { ValueFunction::Sup } else { ValueFunction::Inf };
        if self.p.known_forms().contains(&form) {
            return Some((Estimate { value: F::zero(), exact: true }, None));
        }
        let mut best = F::zero();
        let mut witness = None;
        for (l, x) in self.lassos.iter().zip(&self.values) {
            let b = self.closure(l, !co);
            let (xr, br) = (d.to_real(x)?, d.to_real(&b)?);
            let e = if co { gap(xr, br) } else { gap(br, xr) };
            if e > best {
                best = e;
                witness = Some(Witness { lasso: Some(l.clone()), prefix: None, value: Some(x.clone()), bound: Some(b) });
            }
        }
        Some((Estimate { value: best, exact: false }, witness))
    }
}

/// Closure value on `l`: from the oracle hook when there is one, otherwise
/// the meet over early prefixes `s` of the best value `Φ(s·g)` over candidate
/// continuations `g` (the property's hints, `small` and the rest of `l`).
pub(crate) fn estimate_closure<F: Scalar>(p: &Property<F>, l: &Lasso, upper: bool, small: &[Lasso]) -> Value<F> {
    let d = p.domain();
    if let Some(o) = p.oracle() {
        let hook = |s: &[usize]| if upper { o.sup_ext(s) } else { o.inf_ext(s) };
        if hook(&[]).is_some() {
            return closure::settled_prefix_meet(d, l, hook, upper).expect("hook present");
        }
    }
    if p.machine().is_some() {
        let c = if upper { closure::safety_closure(p) } else { closure::cosafety_closure(p) };
        if let Ok(v) = c.and_then(|c| c.eval_lasso(l)) {
            return v;
        }
    }
    let hints = p.derived().and_then(|dv| dv.hints.clone());
    let horizon = l.stem().len() + 2 * l.cycle().len();
    let own = p.eval_lasso(l).unwrap_or_else(|_| if upper { d.bottom() } else { d.top() });
    let mut acc = if upper { d.top() } else { d.bottom() };
    for i in 0..=horizon {
        let s = l.unroll(i).0;
        // the rest of `l` itself is one candidate
        let mut best = own.clone();
        let mut cands: Vec<Lasso> = small.to_vec();
        if let Some(h) = &hints {
            cands.extend(h(&s));
        }
        for g in cands {
            if let Ok(v) = p.eval_lasso(&g.prepend(&s)) {
                best = if upper { d.join(&best, &v) } else { d.meet(&best, &v) };
            }
        }
        acc = if upper { d.meet(&acc, &best) } else { d.join(&acc, &best) };
    }
    acc
}

/// Prefix lengths used when intersecting prediction sets along `l`.
fn horizons(l: &Lasso, budget: usize) -> (usize, usize) {
    let h1 = l.stem().len() + 2 * l.cycle().len() + budget;
    (h1, 2 * h1 + l.stem().len() + l.cycle().len())
}

fn candidate_values<F: Scalar>(p: &Property<F>, l: &Lasso, upto: usize) -> Vec<Value<F>> {
    let d = p.domain();
    let o = p.oracle().expect("prediction sets come from oracles");
    let mut cands: Vec<Value<F>> = d.elements().unwrap_or_default();
    for i in 0..=upto {
        if let Some(ps) = o.prediction_set(&l.unroll(i).0) {
            for v in ps.notable.iter().chain([&ps.sup, &ps.inf]) {
                if !cands.iter().any(|w| d.eq_values(w, v)) {
                    cands.push(v.clone());
                }
            }
        }
    }
    sort_values(d, &mut cands);
    cands
}

fn possible_throughout<F: Scalar>(p: &Property<F>, l: &Lasso, v: &Value<F>, upto: usize) -> bool {
    let o = p.oracle().expect("prediction sets come from oracles");
    (0..=upto).all(|i| o.prediction_set(&l.unroll(i).0).is_some_and(|ps| ps.contains(p.domain(), v)))
}

/// A value not below `Φ(l)` that no prefix of `l` (within the horizon) rules out.
fn undismissed_value<F: Scalar>(p: &Property<F>, l: &Lasso, x: &Value<F>, budget: usize) -> Option<Value<F>> {
    let d = p.domain();
    let (h1, h2) = horizons(l, budget);
    candidate_values(p, l, h1)
        .into_iter()
        .filter(|v| d.not_leq(v, x))
        .find(|v| possible_throughout(p, l, v, h2) && possible_throughout(p, l, v, 2 * h2))
}

/// The least value not below `Φ(l)` ruled out by some prefix of `l`, with the
/// shortest such prefix.
fn dismissed_value<F: Scalar>(p: &Property<F>, l: &Lasso, x: &Value<F>, budget: usize) -> Option<(Value<F>, Vec<usize>)> {
    let d = p.domain();
    let o = p.oracle()?;
    let (h1, _) = horizons(l, budget);
    for v in candidate_values(p, l, h1).into_iter().filter(|v| d.not_leq(v, x)) {
        for i in 0..=h1 {
            let s = l.unroll(i).0;
            if o.prediction_set(&s).is_some_and(|ps| !ps.contains(d, &v)) {
                return Some((v, s));
            }
        }
    }
    None
}

/// Re-checks a witness against the definition of the check it refutes.
pub fn replay<F: Scalar>(p: &Property<F>, c: Check, w: &Witness<F>) -> Result<bool> {
    let d = p.domain();
    let small = enumerate_lassos(p.alphabet().len(), 1, 2);
    let missing = || Error::Parse(format!("witness for {c} is incomplete"));
    let lasso_value = || -> Result<(Lasso, Value<F>)> {
        let l = w.lasso.clone().ok_or_else(missing)?;
        let x = p.eval_lasso(&l)?;
        Ok((l, x))
    };
    let prediction = |s: &[usize]| closure::prediction_set(p, s);
    Ok(match c {
        Check::Safe | Check::Live | Check::Multilive => {
            let (l, x) = lasso_value()?;
            let up = estimate_closure(p, &l, true, &small);
            match c {
                Check::Safe => !d.eq_values(&x, &up),
                Check::Live => !d.eq_values(&x, &d.top()) && d.eq_values(&x, &up),
                _ => d.eq_values(&up, &d.bottom()),
            }
        }
        Check::Cosafe | Check::Colive => {
            let (l, x) = lasso_value()?;
            let low = estimate_closure(p, &l, false, &small);
            match c {
                Check::Cosafe => !d.eq_values(&x, &low),
                _ => !d.eq_values(&x, &d.bottom()) && d.eq_values(&x, &low),
            }
        }
        Check::SupClosed => {
            let s = w.prefix.as_ref().ok_or_else(missing)?;
            !prediction(s)?.sup_realized(d)
        }
        Check::VerdictSafe => {
            let (l, x) = lasso_value()?;
            let v = w.bound.as_ref().ok_or_else(missing)?;
            let n = l.stem().len() + (CLOSURE_HORIZON + 1) * l.cycle().len();
            d.not_leq(v, &x)
                && (0..=n).all(|i| prediction(&l.unroll(i).0).is_ok_and(|ps| ps.contains(d, v)))
        }
        Check::VerdictLive => {
            let (l, x) = lasso_value()?;
            let v = w.bound.as_ref().ok_or_else(missing)?;
            let s = w.prefix.as_ref().ok_or_else(missing)?;
            d.not_leq(v, &x) && l.unroll(s.len()).0 == *s && !prediction(s)?.contains(d, v)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::props::builtins::{discounted_never, max_response, min_response};
    use crate::props::fixtures::{live_not_verdictlive, multilive_not_live, vsafe_not_safe};
    use crate::traces::Alphabet;

    fn lasso(stem: &[usize], cycle: &[usize]) -> Lasso {
        Lasso::new(stem.to_vec(), cycle.to_vec()).unwrap()
    }

    #[test]
    fn min_response_is_safe_and_colive() {
        let r = classify(&min_response::<f64>(8).unwrap(), 6).unwrap();
        assert_eq!(r.verdict(Check::Safe), Some(Verdict::Yes));
        assert_eq!(r.verdict(Check::Colive), Some(Verdict::Yes));
        assert_eq!(r.verdict(Check::SupClosed), Some(Verdict::Yes));
        assert_eq!(r.verdict(Check::VerdictSafe), Some(Verdict::Yes));
        assert_eq!(r.alpha_min.unwrap().value, 0.0);
    }

    #[test]
    fn max_response_is_cosafe_and_live() {
        let p = max_response::<f64>(8).unwrap();
        let r = classify(&p, 6).unwrap();
        assert_eq!(r.verdict(Check::Cosafe), Some(Verdict::Yes));
        assert_eq!(r.verdict(Check::Live), Some(Verdict::Yes));
        assert_eq!(r.verdict(Check::Safe), Some(Verdict::No));
        let a = check_alpha_safety(&p, 1e6, &Options::default()).unwrap();
        assert_eq!(a.verdict, Verdict::No);
        let w = a.witness.unwrap();
        assert_eq!(w.lasso.unwrap(), lasso(&[], &[0, 1]));
        assert_eq!(w.bound.unwrap(), p.top());
        assert!(a.min.value.is_infinite());
    }

    #[test]
    fn multilive_but_not_live() {
        let p = multilive_not_live::<f64>();
        let r = classify(&p, 6).unwrap();
        assert_eq!(r.verdict(Check::Multilive), Some(Verdict::Yes));
        assert_eq!(r.verdict(Check::Live), Some(Verdict::No));
        let w = r.witness(Check::Live).unwrap();
        assert_eq!(w.lasso.clone().unwrap(), lasso(&[2], &[0]));
        assert_eq!(w.prefix.clone().unwrap(), vec![2]);
        assert!(replay(&p, Check::Live, w).unwrap());
    }

    #[test]
    fn verdict_safe_but_not_safe() {
        let p = vsafe_not_safe::<f64>();
        let r = classify(&p, 6).unwrap();
        assert_eq!(r.verdict(Check::Safe), Some(Verdict::No));
        assert!(r.verdict(Check::VerdictSafe).unwrap().holds_so_far());
        assert!(replay(&p, Check::Safe, r.witness(Check::Safe).unwrap()).unwrap());
        assert_eq!(r.verdict(Check::SupClosed), Some(Verdict::No));
        let w = r.witness(Check::SupClosed).unwrap();
        assert!(replay(&p, Check::SupClosed, w).unwrap());
        let at_a = Witness { lasso: None, prefix: Some(vec![0]), value: None, bound: None };
        assert!(replay(&p, Check::SupClosed, &at_a).unwrap());
    }

    #[test]
    fn live_but_not_verdict_live() {
        let p = live_not_verdictlive::<f64>();
        let r = classify(&p, 6).unwrap();
        assert!(r.verdict(Check::Live).unwrap().holds_so_far());
        assert_eq!(r.verdict(Check::VerdictLive), Some(Verdict::No));
        let w = r.witness(Check::VerdictLive).unwrap();
        assert_eq!(w.lasso.clone().unwrap(), lasso(&[0, 1], &[0]));
        assert_eq!(w.bound.clone().unwrap(), Value::Real(0.5));
        assert!(replay(&p, Check::VerdictLive, w).unwrap());
    }

    #[test]
    fn discounted_safety_is_safe_and_cosafe() {
        let p = discounted_never::<f64>(Alphabet::new(["a", "b"]).unwrap(), "b").unwrap();
        let r = classify(&p, 6).unwrap();
        assert_eq!(r.verdict(Check::Safe), Some(Verdict::Yes));
        assert_eq!(r.verdict(Check::Cosafe), Some(Verdict::Yes));
        assert_eq!(r.alpha_min.unwrap(), Estimate { value: 0.0, exact: true });
    }
}
