//! Lasso enumeration and seeded random generation of lassos, words and machines.

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domains::{ExtNat, Value, ValueDomain};
use crate::props::{Machine, Property, ValueFunction};
use crate::scalar::Scalar;
use crate::traces::{Alphabet, Lasso};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All words of length `n` over `k` symbols, in lexicographic order.
pub fn words(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |a| {
                    let mut w = w.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    out
}

/// All words of length at most `n`, shortest first.
pub fn words_up_to(k: usize, n: usize) -> Vec<Vec<usize>> {
    (0..=n).flat_map(|i| words(k, i)).collect()
}

/// Distinct normalized lassos with stem length ≤ `max_stem` and cycle length
/// in `1..=max_cycle`, ordered by total size, then stem length, then symbols.
pub fn enumerate_lassos(k: usize, max_stem: usize, max_cycle: usize) -> Vec<Lasso> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for size in 1..=max_stem + max_cycle {
        for stem_len in 0..size.min(max_stem + 1) {
            let cycle_len = size - stem_len;
            if cycle_len == 0 || cycle_len > max_cycle {
                continue;
            }
            for stem in words(k, stem_len) {
                for cycle in words(k, cycle_len) {
                    let l = Lasso::new(stem.clone(), cycle).expect("nonempty cycle").normalize();
                    if seen.insert(l.clone()) {
                        out.push(l);
                    }
                }
            }
        }
    }
    out
}

/// Number of (not necessarily normalized) lassos within the bounds.
fn lasso_count(k: usize, max_stem: usize, max_cycle: usize) -> f64 {
    let words = |n: usize| -> f64 { (0..=n).map(|i| (k as f64).powi(i as i32)).sum() };
    words(max_stem) * (words(max_cycle) - 1.0)
}

pub fn random_word<R: Rng>(rng: &mut R, k: usize, len: usize) -> Vec<usize> {
    (0..len).map(|_| rng.gen_range(0..k)).collect()
}

pub fn random_lasso<R: Rng>(rng: &mut R, k: usize, max_stem: usize, max_cycle: usize) -> Lasso {
    let s = rng.gen_range(0..=max_stem);
    let c = rng.gen_range(1..=max_cycle.max(1));
    Lasso::new(random_word(rng, k, s), random_word(rng, k, c)).expect("nonempty cycle")
}

/// A deterministic sample of lassos: every lasso within the bounds when there
/// are at most `cap` of them, otherwise all lassos of the largest exhaustive
/// size class fitting in half of `cap`, topped up with random ones.
pub fn lasso_sample(k: usize, bound: usize, cap: usize, seed: u64) -> Vec<Lasso> {
    let bound = bound.max(1);
    if lasso_count(k, bound, bound) <= cap as f64 {
        return enumerate_lassos(k, bound, bound);
    }
    let mut e = 1;
    while e < bound && lasso_count(k, e + 1, e + 1) <= (cap / 2) as f64 {
        e += 1;
    }
    let mut out = enumerate_lassos(k, e, e);
    let mut seen: HashSet<Lasso> = out.iter().cloned().collect();
    let mut r = rng(seed);
    let mut attempts = 0;
    while out.len() < cap && attempts < cap * 20 {
        attempts += 1;
        let l = random_lasso(&mut r, k, bound, bound).normalize();
        if seen.insert(l.clone()) {
            out.push(l);
        }
    }
    out
}

/// Value domains used for random machines, with a pool of outputs.
fn output_pool<F: Scalar>(d: &ValueDomain) -> Vec<Value<F>> {
    match d {
        ValueDomain::Boolean => vec![Value::Bool(false), Value::Bool(true)],
        ValueDomain::ExtendedNat { .. } => {
            let mut v: Vec<Value<F>> = (0..=3).map(|n| d.nat(n)).collect();
            v.push(Value::Nat(ExtNat::Inf));
            v
        }
        ValueDomain::FiniteOrder { levels } => (0..levels.len()).map(Value::Level).collect(),
        ValueDomain::Product(a, b) => {
            let (pa, pb) = (output_pool::<F>(a), output_pool::<F>(b));
            pa.iter().flat_map(|x| pb.iter().map(move |y| Value::pair(x.clone(), y.clone()))).collect()
        }
        ValueDomain::Dual(inner) => output_pool(inner),
        _ => [0.0, 0.25, 0.5, 1.0].iter().map(|&x| Value::Real(F::from_f64_lossy(x))).collect(),
    }
}

/// A random complete machine with `1..=max_states` states over `k` symbols.
pub fn random_machine<F: Scalar, R: Rng>(rng: &mut R, k: usize, max_states: usize, d: &ValueDomain) -> Machine<F> {
    let n = rng.gen_range(1..=max_states);
    let pool = output_pool::<F>(d);
    let outputs = (0..n).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
    let names = (0..n).map(|q| format!("q{q}")).collect();
    let delta = (0..n * k).map(|_| rng.gen_range(0..n)).collect();
    Machine::new(k, outputs, names, 0, delta).expect("random machine is complete")
}

/// Alphabet `{a, b, c, …}` of size `k`.
pub fn letters(k: usize) -> Alphabet {
    Alphabet::new((0..k).map(|i| ((b'a' + i as u8) as char).to_string())).expect("letters")
}

/// A random machine-backed property: up to 5 states, up to 3 symbols, a
/// domain drawn from a small fixed list and any value function.
pub fn random_property<F: Scalar, R: Rng>(rng: &mut R, index: usize) -> Property<F> {
    let domains = [
        ValueDomain::capped_nat(3),
        ValueDomain::Boolean,
        ValueDomain::finite_order(["lo", "mid", "hi"]).expect("levels"),
        ValueDomain::product(ValueDomain::Boolean, ValueDomain::Boolean),
        ValueDomain::UnitInterval,
    ];
    let vfs = [ValueFunction::Inf, ValueFunction::Sup, ValueFunction::Liminf, ValueFunction::Limsup];
    let d = domains[rng.gen_range(0..domains.len())].clone();
    let vf = vfs[rng.gen_range(0..vfs.len())];
    let k = rng.gen_range(1..=3);
    let m = random_machine(rng, k, 5, &d);
    Property::from_machine(format!("random{index}"), letters(k), d, vf, m).expect("random property")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_is_normalized_and_ordered() {
        let ls = enumerate_lassos(2, 2, 2);
        assert!(ls.iter().all(|l| l.is_normalized()));
        assert_eq!(ls[0], Lasso::new(vec![], vec![0]).unwrap());
        assert_eq!(ls[1], Lasso::new(vec![], vec![1]).unwrap());
        let sizes: Vec<usize> = ls.iter().map(|l| l.stem().len() + l.cycle().len()).collect();
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
        let set: HashSet<_> = ls.iter().collect();
        assert_eq!(set.len(), ls.len());
    }

    #[test]
    fn sample_is_deterministic_and_capped() {
        let a = lasso_sample(4, 6, 500, 7);
        let b = lasso_sample(4, 6, 500, 7);
        assert_eq!(a, b);
        assert!(a.len() <= 500);
        assert_eq!(lasso_sample(2, 2, 4096, 0), enumerate_lassos(2, 2, 2));
    }

    #[test]
    fn random_properties_are_valid() {
        let mut r = rng(3);
        for i in 0..50 {
            let p: Property<f64> = random_property(&mut r, i);
            assert!(p.machine().unwrap().num_states() <= 5);
            assert!(p.alphabet().len() <= 3);
        }
    }
}
