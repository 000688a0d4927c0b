//! Value domains: complete lattices with partial-order aware comparison.
//!
//! A [`Value`] carries no domain tag of its own; every operation takes the
//! [`ValueDomain`] it is interpreted in. The same raw value means the same
//! thing in `D` and in `Dual(D)`, only the order differs, which is exactly
//! what complementing a property needs.

use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An extended natural number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

#[derive(Clone, Debug)]
pub enum Value<F> {
    Bool(bool),
    Nat(ExtNat),
    Real(F),
    Level(usize),
    Pair(Box<Value<F>>, Box<Value<F>>),
}

impl<F: Scalar> PartialEq for Value<F> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Nat(a), Value::Nat(b)) => a == b,
            (Value::Real(a), Value::Real(b)) => a == b,
            (Value::Level(a), Value::Level(b)) => a == b,
            (Value::Pair(a1, a2), Value::Pair(b1, b2)) => a1 == b1 && a2 == b2,
            _ => false,
        }
    }
}

impl<F: Scalar> Eq for Value<F> {}

impl<F: Scalar> Hash for Value<F> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Value::Bool(b) => b.hash(state),
            Value::Nat(n) => n.hash(state),
            Value::Real(r) => {
                // -0.0 == 0.0, so both must hash alike
                let r = if *r == F::zero() { F::zero() } else { *r };
                r.integer_decode().hash(state)
            }
            Value::Level(i) => i.hash(state),
            Value::Pair(a, b) => {
                a.hash(state);
                b.hash(state);
            }
        }
    }
}

impl<F> Value<F> {
    pub fn pair(a: Value<F>, b: Value<F>) -> Self {
        Value::Pair(Box::new(a), Box::new(b))
    }
}

/// Order relation between two values of a poset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Less,
    Equal,
    Greater,
    Incomparable,
}

impl Relation {
    pub fn reverse(self) -> Relation {
        match self {
            Relation::Less => Relation::Greater,
            Relation::Greater => Relation::Less,
            r => r,
        }
    }

    fn from_ordering(o: std::cmp::Ordering) -> Relation {
        match o {
            std::cmp::Ordering::Less => Relation::Less,
            std::cmp::Ordering::Equal => Relation::Equal,
            std::cmp::Ordering::Greater => Relation::Greater,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Aggregate {
    Join,
    Meet,
}

/// A complete lattice of values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ValueDomain {
    /// `{0, 1}` with `0 < 1`.
    Boolean,
    /// `N ∪ {∞}`. With a cap, every counter value `≥ cap` collapses onto the
    /// single value `≥cap`. When `cap_is_top` is set, `≥cap` is the top
    /// element (an ∞-surrogate) and `∞` itself is not a member.
    ExtendedNat { cap: Option<u64>, cap_is_top: bool },
    /// `R ∪ {-∞, +∞}`.
    ExtendedReal,
    /// `[0, +∞]`.
    NonNegReal,
    /// `[0, 1]`.
    UnitInterval,
    /// A finite chain, least level first.
    FiniteOrder { levels: Vec<String> },
    Product(Box<ValueDomain>, Box<ValueDomain>),
    /// Same elements, reversed order.
    Dual(Box<ValueDomain>),
}

impl fmt::Display for ValueDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueDomain::Boolean => write!(f, "boolean"),
            ValueDomain::ExtendedNat { cap: None, .. } => write!(f, "extended_nat"),
            ValueDomain::ExtendedNat { cap: Some(c), cap_is_top: false } => {
                write!(f, "extended_nat(cap={c})")
            }
            ValueDomain::ExtendedNat { cap: Some(c), cap_is_top: true } => {
                write!(f, "extended_nat(cap={c}, cap_is_top)")
            }
            ValueDomain::ExtendedReal => write!(f, "extended_real"),
            ValueDomain::NonNegReal => write!(f, "nonneg_real"),
            ValueDomain::UnitInterval => write!(f, "unit_interval"),
            ValueDomain::FiniteOrder { levels } => write!(f, "finite_order[{}]", levels.join(",")),
            ValueDomain::Product(a, b) => write!(f, "product({a}, {b})"),
            ValueDomain::Dual(d) => write!(f, "dual({d})"),
        }
    }
}

impl ValueDomain {
    pub fn extended_nat() -> Self {
        ValueDomain::ExtendedNat { cap: None, cap_is_top: false }
    }

    pub fn capped_nat(cap: u64) -> Self {
        ValueDomain::ExtendedNat { cap: Some(cap), cap_is_top: false }
    }

    /// Capped naturals whose saturated value `≥cap` is the top element.
    pub fn saturating_nat(cap: u64) -> Self {
        ValueDomain::ExtendedNat { cap: Some(cap), cap_is_top: true }
    }

    pub fn finite_order<S: Into<String>>(levels: impl IntoIterator<Item = S>) -> Result<Self> {
        let d = ValueDomain::FiniteOrder { levels: levels.into_iter().map(Into::into).collect() };
        d.validate()?;
        Ok(d)
    }

    pub fn product(a: ValueDomain, b: ValueDomain) -> Self {
        ValueDomain::Product(Box::new(a), Box::new(b))
    }

    /// Checks that the lattice is nontrivial and well formed.
    pub fn validate(&self) -> Result<()> {
        match self {
            ValueDomain::ExtendedNat { cap: Some(0), .. } => {
                Err(Error::InvalidDomain("cap must be at least 1".into()))
            }
            ValueDomain::ExtendedNat { cap: None, cap_is_top: true } => {
                Err(Error::InvalidDomain("cap_is_top requires a cap".into()))
            }
            ValueDomain::FiniteOrder { levels } => {
                if levels.len() < 2 {
                    return Err(Error::InvalidDomain("a finite order needs at least two levels".into()));
                }
                for (i, l) in levels.iter().enumerate() {
                    if levels[..i].contains(l) {
                        return Err(Error::InvalidDomain(format!("duplicate level {l:?}")));
                    }
                }
                Ok(())
            }
            ValueDomain::Product(a, b) => {
                a.validate()?;
                b.validate()
            }
            ValueDomain::Dual(d) => d.validate(),
            _ => Ok(()),
        }
    }

    /// The order-reversed domain. Dualizing twice gives the original domain back.
    pub fn dual(&self) -> ValueDomain {
        match self {
            ValueDomain::Dual(inner) => (**inner).clone(),
            d => ValueDomain::Dual(Box::new(d.clone())),
        }
    }

    pub fn is_dual(&self) -> bool {
        matches!(self, ValueDomain::Dual(_))
    }

    /// Strips any `Dual` wrapper.
    pub fn base(&self) -> &ValueDomain {
        match self {
            ValueDomain::Dual(inner) => inner.base(),
            d => d,
        }
    }

    pub fn is_total(&self) -> bool {
        match self {
            ValueDomain::Product(..) => false,
            ValueDomain::Dual(d) => d.is_total(),
            _ => true,
        }
    }

    pub fn contains<F: Scalar>(&self, v: &Value<F>) -> bool {
        match (self, v) {
            (ValueDomain::Boolean, Value::Bool(_)) => true,
            (ValueDomain::ExtendedNat { cap, cap_is_top }, Value::Nat(n)) => match (cap, n) {
                (None, _) => true,
                (Some(c), ExtNat::Fin(k)) => k <= c,
                (Some(_), ExtNat::Inf) => !cap_is_top,
            },
            (ValueDomain::ExtendedReal, Value::Real(r)) => !r.is_nan(),
            (ValueDomain::NonNegReal, Value::Real(r)) => !r.is_nan() && *r >= F::zero(),
            (ValueDomain::UnitInterval, Value::Real(r)) => *r >= F::zero() && *r <= F::one(),
            (ValueDomain::FiniteOrder { levels }, Value::Level(i)) => *i < levels.len(),
            (ValueDomain::Product(a, b), Value::Pair(x, y)) => a.contains(x) && b.contains(y),
            (ValueDomain::Dual(d), v) => d.contains(v),
            _ => false,
        }
    }

    fn check<F: Scalar>(&self, v: &Value<F>) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::DomainMismatch { value: format!("{v:?}"), domain: self.to_string() })
        }
    }

    /// Brings a raw value into canonical form (saturation of capped counters).
    pub fn normalize<F: Scalar>(&self, v: Value<F>) -> Value<F> {
        match (self, v) {
            (ValueDomain::ExtendedNat { cap: Some(c), cap_is_top }, Value::Nat(n)) => match n {
                ExtNat::Fin(k) if k >= *c => Value::Nat(ExtNat::Fin(*c)),
                ExtNat::Inf if *cap_is_top => Value::Nat(ExtNat::Fin(*c)),
                n => Value::Nat(n),
            },
            (ValueDomain::Product(a, b), Value::Pair(x, y)) => {
                Value::pair(a.normalize(*x), b.normalize(*y))
            }
            (ValueDomain::Dual(d), v) => d.normalize(v),
            (_, v) => v,
        }
    }

    /// A counter value in this domain, saturated if the domain is capped.
    pub fn nat<F: Scalar>(&self, n: u64) -> Value<F> {
        self.normalize(Value::Nat(ExtNat::Fin(n)))
    }

    pub fn top<F: Scalar>(&self) -> Value<F> {
        match self {
            ValueDomain::Boolean => Value::Bool(true),
            ValueDomain::ExtendedNat { cap: Some(c), cap_is_top: true } => Value::Nat(ExtNat::Fin(*c)),
            ValueDomain::ExtendedNat { .. } => Value::Nat(ExtNat::Inf),
            ValueDomain::ExtendedReal | ValueDomain::NonNegReal => Value::Real(F::infinity()),
            ValueDomain::UnitInterval => Value::Real(F::one()),
            ValueDomain::FiniteOrder { levels } => Value::Level(levels.len().saturating_sub(1)),
            ValueDomain::Product(a, b) => Value::pair(a.top(), b.top()),
            ValueDomain::Dual(d) => d.bottom(),
        }
    }

    pub fn bottom<F: Scalar>(&self) -> Value<F> {
        match self {
            ValueDomain::Boolean => Value::Bool(false),
            ValueDomain::ExtendedNat { .. } => Value::Nat(ExtNat::Fin(0)),
            ValueDomain::ExtendedReal => Value::Real(F::neg_infinity()),
            ValueDomain::NonNegReal | ValueDomain::UnitInterval => Value::Real(F::zero()),
            ValueDomain::FiniteOrder { .. } => Value::Level(0),
            ValueDomain::Product(a, b) => Value::pair(a.bottom(), b.bottom()),
            ValueDomain::Dual(d) => d.top(),
        }
    }

    /// Order relation assuming both values are members of this domain.
    /// Values of the wrong shape are reported as incomparable.
    pub fn relation<F: Scalar>(&self, a: &Value<F>, b: &Value<F>) -> Relation {
        match (self, a, b) {
            (ValueDomain::Dual(d), a, b) => d.relation(a, b).reverse(),
            (ValueDomain::Product(da, db), Value::Pair(a1, a2), Value::Pair(b1, b2)) => {
                match (da.relation(a1, b1), db.relation(a2, b2)) {
                    (Relation::Equal, r) | (r, Relation::Equal) => r,
                    (r1, r2) if r1 == r2 => r1,
                    _ => Relation::Incomparable,
                }
            }
            (_, Value::Bool(x), Value::Bool(y)) => Relation::from_ordering(x.cmp(y)),
            (_, Value::Nat(x), Value::Nat(y)) => Relation::from_ordering(x.cmp(y)),
            (_, Value::Level(x), Value::Level(y)) => Relation::from_ordering(x.cmp(y)),
            (_, Value::Real(x), Value::Real(y)) => {
                if x.approx_eq(*y) {
                    Relation::Equal
                } else if x < y {
                    Relation::Less
                } else {
                    Relation::Greater
                }
            }
            _ => Relation::Incomparable,
        }
    }

    /// Checked comparison.
    pub fn compare<F: Scalar>(&self, a: &Value<F>, b: &Value<F>) -> Result<Relation> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.relation(a, b))
    }

    pub fn eq_values<F: Scalar>(&self, a: &Value<F>, b: &Value<F>) -> bool {
        self.relation(a, b) == Relation::Equal
    }

    pub fn leq<F: Scalar>(&self, a: &Value<F>, b: &Value<F>) -> bool {
        matches!(self.relation(a, b), Relation::Less | Relation::Equal)
    }

    pub fn geq<F: Scalar>(&self, a: &Value<F>, b: &Value<F>) -> bool {
        matches!(self.relation(a, b), Relation::Greater | Relation::Equal)
    }

    pub fn less<F: Scalar>(&self, a: &Value<F>, b: &Value<F>) -> bool {
        self.relation(a, b) == Relation::Less
    }

    /// `a ≱ b`, which on partial orders is weaker than `a < b`.
    pub fn not_geq<F: Scalar>(&self, a: &Value<F>, b: &Value<F>) -> bool {
        matches!(self.relation(a, b), Relation::Less | Relation::Incomparable)
    }

    /// `a ≰ b`.
    pub fn not_leq<F: Scalar>(&self, a: &Value<F>, b: &Value<F>) -> bool {
        matches!(self.relation(a, b), Relation::Greater | Relation::Incomparable)
    }

    pub fn join<F: Scalar>(&self, a: &Value<F>, b: &Value<F>) -> Value<F> {
        match (self, a, b) {
            (ValueDomain::Dual(d), a, b) => d.meet(a, b),
            (ValueDomain::Product(da, db), Value::Pair(a1, a2), Value::Pair(b1, b2)) => {
                Value::pair(da.join(a1, b1), db.join(a2, b2))
            }
            _ => {
                if self.geq(a, b) {
                    a.clone()
                } else {
                    b.clone()
                }
            }
        }
    }

    pub fn meet<F: Scalar>(&self, a: &Value<F>, b: &Value<F>) -> Value<F> {
        match (self, a, b) {
            (ValueDomain::Dual(d), a, b) => d.join(a, b),
            (ValueDomain::Product(da, db), Value::Pair(a1, a2), Value::Pair(b1, b2)) => {
                Value::pair(da.meet(a1, b1), db.meet(a2, b2))
            }
            _ => {
                if self.leq(a, b) {
                    a.clone()
                } else {
                    b.clone()
                }
            }
        }
    }

    /// Join of any number of values, `bottom` for none.
    pub fn join_all<'a, F: Scalar>(&self, vs: impl IntoIterator<Item = &'a Value<F>>) -> Value<F> {
        vs.into_iter().fold(self.bottom(), |acc, v| self.join(&acc, v))
    }

    /// Meet of any number of values, `top` for none.
    pub fn meet_all<'a, F: Scalar>(&self, vs: impl IntoIterator<Item = &'a Value<F>>) -> Value<F> {
        vs.into_iter().fold(self.top(), |acc, v| self.meet(&acc, v))
    }

    /// Least upper bound or greatest lower bound of a nonempty finite set.
    pub fn aggregate<F: Scalar>(&self, vs: &[Value<F>], mode: Aggregate) -> Result<Value<F>> {
        let (first, rest) = vs.split_first().ok_or(Error::EmptySet)?;
        self.check(first)?;
        let mut acc = first.clone();
        for v in rest {
            self.check(v)?;
            acc = match mode {
                Aggregate::Join => self.join(&acc, v),
                Aggregate::Meet => self.meet(&acc, v),
            };
        }
        Ok(acc)
    }

    /// Whether values embed order-preservingly into the extended reals.
    pub fn is_numeric(&self) -> bool {
        match self {
            ValueDomain::Product(..) => false,
            ValueDomain::Dual(d) => d.is_numeric(),
            _ => true,
        }
    }

    /// Order-preserving embedding into the extended reals. Dual domains are
    /// embedded negated so that the embedding stays monotone.
    pub fn to_real<F: Scalar>(&self, v: &Value<F>) -> Option<F> {
        match (self, v) {
            (ValueDomain::Dual(d), v) => d.to_real(v).map(|x| -x),
            (ValueDomain::Product(..), _) => None,
            (ValueDomain::ExtendedNat { cap: Some(c), cap_is_top: true }, Value::Nat(ExtNat::Fin(k)))
                if k >= c =>
            {
                Some(F::infinity())
            }
            (_, Value::Bool(b)) => Some(if *b { F::one() } else { F::zero() }),
            (_, Value::Nat(ExtNat::Fin(k))) => F::from_u64(*k),
            (_, Value::Nat(ExtNat::Inf)) => Some(F::infinity()),
            (_, Value::Real(r)) => Some(*r),
            (_, Value::Level(i)) => F::from_usize(*i),
            _ => None,
        }
    }

    /// Inverse of [`ValueDomain::to_real`] where it exists.
    pub fn from_real<F: Scalar>(&self, x: F) -> Option<Value<F>> {
        let v = match self {
            ValueDomain::Dual(d) => return d.from_real(-x),
            ValueDomain::Product(..) => return None,
            ValueDomain::Boolean => {
                if x == F::zero() {
                    Value::Bool(false)
                } else if x == F::one() {
                    Value::Bool(true)
                } else {
                    return None;
                }
            }
            ValueDomain::ExtendedNat { .. } => {
                if x == F::infinity() {
                    self.normalize(Value::Nat(ExtNat::Inf))
                } else if x >= F::zero() && x.fract() == F::zero() {
                    self.nat(x.to_u64()?)
                } else {
                    return None;
                }
            }
            ValueDomain::FiniteOrder { .. } => Value::Level(x.to_usize()?),
            _ => Value::Real(x),
        };
        self.contains(&v).then_some(v)
    }

    /// Every member, for finite domains.
    pub fn elements<F: Scalar>(&self) -> Option<Vec<Value<F>>> {
        match self {
            ValueDomain::Boolean => Some(vec![Value::Bool(false), Value::Bool(true)]),
            ValueDomain::ExtendedNat { cap: Some(c), cap_is_top } => {
                let mut out: Vec<Value<F>> = (0..=*c).map(|k| Value::Nat(ExtNat::Fin(k))).collect();
                if !cap_is_top {
                    out.push(Value::Nat(ExtNat::Inf));
                }
                Some(out)
            }
            ValueDomain::FiniteOrder { levels } => Some((0..levels.len()).map(Value::Level).collect()),
            ValueDomain::Product(a, b) => {
                let xs = a.elements()?;
                let ys = b.elements()?;
                Some(
                    xs.iter()
                        .flat_map(|x| ys.iter().map(move |y| Value::pair(x.clone(), y.clone())))
                        .collect(),
                )
            }
            ValueDomain::Dual(d) => d.elements(),
            _ => None,
        }
    }

    /// Human-readable rendering (`∞`, `≥8`, level labels, ...).
    pub fn format<F: Scalar>(&self, v: &Value<F>) -> String {
        match (self, v) {
            (ValueDomain::Dual(d), v) => d.format(v),
            (ValueDomain::Product(a, b), Value::Pair(x, y)) => {
                format!("({}, {})", a.format(x), b.format(y))
            }
            (ValueDomain::ExtendedNat { cap: Some(c), .. }, Value::Nat(ExtNat::Fin(k))) if k >= c => {
                format!("≥{c}")
            }
            (ValueDomain::FiniteOrder { levels }, Value::Level(i)) => {
                levels.get(*i).cloned().unwrap_or_else(|| format!("#{i}"))
            }
            (_, v) => format_raw(v),
        }
    }

    /// Parses a value written as [`ValueDomain::format`] prints it. Also accepts
    /// `inf`, `-inf`, `>=N`, `true`/`false`, and `(a, b)` for pairs.
    pub fn parse_value<F: Scalar>(&self, text: &str) -> Result<Value<F>> {
        let t = text.trim();
        let bad = || Error::Parse(format!("cannot read {t:?} as a value of {self}"));
        let v = match self {
            ValueDomain::Dual(d) => return d.parse_value(t),
            ValueDomain::Product(a, b) => {
                let inner = t
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(bad)?;
                let split = split_top_level_comma(inner).ok_or_else(bad)?;
                Value::pair(a.parse_value(&inner[..split])?, b.parse_value(&inner[split + 1..])?)
            }
            ValueDomain::Boolean => match t {
                "1" | "true" => Value::Bool(true),
                "0" | "false" => Value::Bool(false),
                _ => return Err(bad()),
            },
            ValueDomain::ExtendedNat { .. } => {
                if is_pos_inf(t) {
                    self.normalize(Value::Nat(ExtNat::Inf))
                } else {
                    let digits = t.trim_start_matches("≥").trim_start_matches(">=");
                    self.nat(digits.parse::<u64>().map_err(|_| bad())?)
                }
            }
            ValueDomain::FiniteOrder { levels } => {
                let i = levels.iter().position(|l| l == t).ok_or_else(bad)?;
                Value::Level(i)
            }
            _ => {
                if is_pos_inf(t) {
                    Value::Real(F::infinity())
                } else if matches!(t, "-inf" | "-∞" | "-infinity") {
                    Value::Real(F::neg_infinity())
                } else {
                    let x: f64 = t.parse().map_err(|_| bad())?;
                    Value::Real(F::from_f64_lossy(x))
                }
            }
        };
        self.check(&v).map_err(|_| bad())?;
        Ok(v)
    }
}

fn is_pos_inf(t: &str) -> bool {
    matches!(t, "inf" | "+inf" | "∞" | "+∞" | "infinity")
}

fn split_top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

fn format_raw<F: Scalar>(v: &Value<F>) -> String {
    match v {
        Value::Bool(b) => if *b { "1" } else { "0" }.to_string(),
        Value::Nat(ExtNat::Fin(k)) => k.to_string(),
        Value::Nat(ExtNat::Inf) => "∞".to_string(),
        Value::Real(r) if *r == F::infinity() => "∞".to_string(),
        Value::Real(r) if *r == F::neg_infinity() => "-∞".to_string(),
        Value::Real(r) => format!("{r}"),
        Value::Level(i) => format!("#{i}"),
        Value::Pair(a, b) => format!("({}, {})", format_raw(a), format_raw(b)),
    }
}
