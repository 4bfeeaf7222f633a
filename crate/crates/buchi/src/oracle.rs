//! Independent brute-force semantics over ℕ.
//!
//! Used as the test oracle for the compiler and the orders comparator; it
//! never touches the automata modules. Quantifiers are evaluated over the
//! finite range `[0, bound)`, which is exact for quantifier-free formulas
//! and a controlled approximation otherwise.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::syntax::{free_vars, AtomKind, CmpOp, Formula, Term};

pub type Assignment = HashMap<String, BigUint>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("unassigned variable `{0}`")]
    Unassigned(String),
}

/// `V_base` of a value: the largest power of the base dividing it, with
/// `V(0) = 0`. Computed by counting trailing zero digits.
pub fn valuation(value: &BigUint, base: u32) -> BigUint {
    if value.is_zero() {
        return BigUint::zero();
    }
    let big_base = BigUint::from(base);
    let mut power = BigUint::one();
    let mut rest = value.clone();
    loop {
        let (q, r) = rest.div_rem(&big_base);
        if !r.is_zero() {
            return power;
        }
        power *= &big_base;
        rest = q;
    }
}

pub fn eval_term(t: &Term, a: &Assignment, base: u32) -> Result<BigUint, OracleError> {
    match t {
        Term::Var(x) => a.get(x).cloned().ok_or_else(|| OracleError::Unassigned(x.clone())),
        Term::Const(c) => Ok(c.clone()),
        Term::Sum(l, r) => Ok(eval_term(l, a, base)? + eval_term(r, a, base)?),
        Term::Scale(k, t) => Ok(k * eval_term(t, a, base)?),
        Term::V(t) => Ok(valuation(&eval_term(t, a, base)?, base)),
    }
}

fn eval_atom(k: &AtomKind, a: &Assignment, base: u32) -> Result<bool, OracleError> {
    let get = |x: &String| a.get(x).cloned().ok_or_else(|| OracleError::Unassigned(x.clone()));
    Ok(match k {
        AtomKind::Eq(x, y) => get(x)? == get(y)?,
        AtomKind::EqConst(x, c) => get(x)? == *c,
        AtomKind::Add(x, y, z) => get(x)? + get(y)? == get(z)?,
        AtomKind::Lt(x, y) => get(x)? < get(y)?,
        AtomKind::Mod(x, c, m) => get(x)? % m == *c,
        AtomKind::VEq(x, y) => valuation(&get(x)?, base) == get(y)?,
    })
}

/// Bounded evaluation: every quantifier (including `EINF`, which has no
/// finite reading) ranges over `[0, bound)`.
pub fn eval_bounded(
    f: &Formula,
    a: &Assignment,
    bound: &BigUint,
    base: u32,
) -> Result<bool, OracleError> {
    match f {
        Formula::Cmp(l, op, r) => {
            let lv = eval_term(l, a, base)?;
            let rv = eval_term(r, a, base)?;
            Ok(match op {
                CmpOp::Eq => lv == rv,
                CmpOp::Ne => lv != rv,
                CmpOp::Lt => lv < rv,
                CmpOp::Le => lv <= rv,
                CmpOp::Gt => lv > rv,
                CmpOp::Ge => lv >= rv,
            })
        }
        Formula::ModEq(t, m, c) => {
            let tv = eval_term(t, a, base)?;
            Ok(if m.is_zero() { tv == *c } else { tv % m == c % m })
        }
        Formula::Atom(k) => eval_atom(k, a, base),
        Formula::Not(g) => Ok(!eval_bounded(g, a, bound, base)?),
        Formula::And(l, r) => {
            Ok(eval_bounded(l, a, bound, base)? && eval_bounded(r, a, bound, base)?)
        }
        Formula::Or(l, r) => {
            Ok(eval_bounded(l, a, bound, base)? || eval_bounded(r, a, bound, base)?)
        }
        Formula::Implies(l, r) => {
            Ok(!eval_bounded(l, a, bound, base)? || eval_bounded(r, a, bound, base)?)
        }
        Formula::Iff(l, r) => {
            Ok(eval_bounded(l, a, bound, base)? == eval_bounded(r, a, bound, base)?)
        }
        Formula::Exists(x, g) | Formula::ExistsInf(x, g) => {
            let mut inner = a.clone();
            let mut v = BigUint::zero();
            while &v < bound {
                inner.insert(x.clone(), v.clone());
                if eval_bounded(g, &inner, bound, base)? {
                    return Ok(true);
                }
                v += BigUint::one();
            }
            Ok(false)
        }
        Formula::Forall(x, g) => {
            let mut inner = a.clone();
            let mut v = BigUint::zero();
            while &v < bound {
                inner.insert(x.clone(), v.clone());
                if !eval_bounded(g, &inner, bound, base)? {
                    return Ok(false);
                }
                v += BigUint::one();
            }
            Ok(true)
        }
    }
}

/// All free-variable tuples (in `free_vars` order) with entries below
/// `bound` satisfying the bounded evaluation.
pub fn brute_solutions(f: &Formula, bound: &BigUint, base: u32) -> Vec<Vec<BigUint>> {
    let vars = free_vars(f);
    let mut out = Vec::new();
    let mut tuple = vec![BigUint::zero(); vars.len()];
    brute_rec(f, &vars, bound, base, 0, &mut tuple, &mut out);
    out
}

fn brute_rec(
    f: &Formula,
    vars: &[String],
    bound: &BigUint,
    base: u32,
    i: usize,
    tuple: &mut Vec<BigUint>,
    out: &mut Vec<Vec<BigUint>>,
) {
    if i == vars.len() {
        let a: Assignment =
            vars.iter().cloned().zip(tuple.iter().cloned()).collect();
        if eval_bounded(f, &a, bound, base).expect("all free variables assigned") {
            out.push(tuple.clone());
        }
        return;
    }
    let mut v = BigUint::zero();
    while &v < bound {
        tuple[i] = v.clone();
        brute_rec(f, vars, bound, base, i + 1, tuple, out);
        v += BigUint::one();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&n(12), 2), n(4));
        assert_eq!(valuation(&n(0), 2), n(0));
        assert_eq!(valuation(&n(5), 2), n(1));
        assert_eq!(valuation(&n(54), 3), n(27));
    }

    #[test]
    fn valuation_divides_and_quotient_coprime() {
        for x in 1u64..(1 << 12) {
            let v = valuation(&n(x), 2);
            assert!((n(x) % &v).is_zero());
            assert!(!((n(x) / &v) % n(2)).is_zero());
        }
    }

    #[test]
    fn bounded_eval_examples() {
        let a: Assignment =
            [("x", 1u64), ("y", 2), ("z", 3)].iter().map(|(k, v)| (k.to_string(), n(*v))).collect();
        assert!(eval_bounded(&parse("x + y = z").unwrap(), &a, &n(16), 2).unwrap());
        let b: Assignment = [("x".to_string(), n(2))].into_iter().collect();
        assert!(eval_bounded(&parse("E y. x + y = 5").unwrap(), &b, &n(16), 2).unwrap());
    }

    #[test]
    fn separating_sentence_has_no_small_counterexample() {
        let f = parse("A x. (V(x) = x -> A y. ((x < y & y < x + x) -> V(y) < y))").unwrap();
        assert!(eval_bounded(&f, &Assignment::new(), &n(1 << 10), 2).unwrap());
    }

    #[test]
    fn brute_solutions_examples() {
        let sols = brute_solutions(&parse("x + x = y").unwrap(), &n(6), 2);
        assert_eq!(sols, vec![vec![n(0), n(0)], vec![n(1), n(2)], vec![n(2), n(4)]]);
        let powers = brute_solutions(&parse("V(x) = x").unwrap(), &n(9), 2);
        assert_eq!(powers, vec![vec![n(0)], vec![n(1)], vec![n(2)], vec![n(4)], vec![n(8)]]);
        assert!(brute_solutions(&parse("x < x").unwrap(), &n(8), 2).is_empty());
    }

    #[test]
    fn brute_solutions_monotone_in_bound() {
        let f = parse("V(x) = x | x % 3 = 1").unwrap();
        let small = brute_solutions(&f, &n(16), 2);
        let large = brute_solutions(&f, &n(64), 2);
        for s in &small {
            assert!(large.contains(s));
        }
    }
}
