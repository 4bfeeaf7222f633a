//! Formula-to-automaton translation and the sentence decision procedure.
//!
//! Each normalized atom has a small hand-built automaton; `∧`/`∨` map to
//! products, `¬` to complement, `∃` to projection, `∀` to `¬∃¬` and `EINF`
//! to the infinitary projection. Minimization between steps (on by default)
//! keeps the subset constructions from compounding.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::automata::{AutomataError, BoolOp, Dfa, DEFAULT_STATE_CAP};
use crate::syntax::{free_vars, normalize, AtomKind, Formula};

#[derive(Clone, Debug)]
pub struct CompileConfig {
    /// Base `n` of the arithmetic; every formula is base-agnostic text.
    pub base: u32,
    pub state_cap: usize,
    pub minimize_each_step: bool,
}

impl Default for CompileConfig {
    fn default() -> Self {
        CompileConfig { base: 2, state_cap: DEFAULT_STATE_CAP, minimize_each_step: true }
    }
}

impl CompileConfig {
    pub fn with_base(base: u32) -> Self {
        CompileConfig { base, ..Default::default() }
    }
}

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error("formula has free variables {0:?}; a sentence is required")]
    NotASentence(Vec<String>),
    #[error("base {0} is not supported (must be >= 2)")]
    BadBase(u32),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Automaton of a single normalized atom. Repeated argument variables are
/// merged onto one track.
pub fn atom_automaton(kind: &AtomKind, cfg: &CompileConfig) -> Result<Dfa, CompileError> {
    if cfg.base < 2 {
        return Err(CompileError::BadBase(cfg.base));
    }
    let base = cfg.base;
    let dfa = match kind {
        AtomKind::Eq(x, y) => eq_automaton(base)?.contract_tracks(&[x, y])?,
        AtomKind::EqConst(x, c) => eq_const_automaton(base, c)?.rename_tracks(&[x])?,
        AtomKind::Add(x, y, z) => add_automaton(base)?.contract_tracks(&[x, y, z])?,
        AtomKind::Lt(x, y) => lt_automaton(base)?.contract_tracks(&[x, y])?,
        AtomKind::Mod(x, c, m) => mod_automaton(base, c, m)?.rename_tracks(&[x])?,
        AtomKind::VEq(x, y) => veq_automaton(base)?.contract_tracks(&[x, y])?,
    };
    Ok(dfa.minimize())
}

/// Digitwise equality of two tracks.
fn eq_automaton(base: u32) -> Result<Dfa, AutomataError> {
    let b = base as usize;
    // 0 = equal so far, 1 = dead.
    let mut transitions = Vec::with_capacity(2 * b * b);
    for dx in 0..b {
        for dy in 0..b {
            transitions.push(usize::from(dx != dy));
        }
    }
    transitions.extend(std::iter::repeat(1).take(b * b));
    Dfa::from_parts(base, vec!["#0".into(), "#1".into()], 0, vec![true, false], transitions)
}

/// `x = c`: consume the digits of `c`, then zeros only.
fn eq_const_automaton(base: u32, c: &BigUint) -> Result<Dfa, AutomataError> {
    let digits = if c.is_zero() { Vec::new() } else { c.to_radix_le(base) };
    let b = base as usize;
    let len = digits.len();
    // States 0..len walk the digits, len = all digits seen, len+1 = dead.
    let states = len + 2;
    let dead = len + 1;
    let mut transitions = Vec::with_capacity(states * b);
    for (i, &expected) in digits.iter().enumerate() {
        for d in 0..b {
            transitions.push(if d == expected as usize { i + 1 } else { dead });
        }
    }
    for d in 0..b {
        transitions.push(if d == 0 { len } else { dead });
    }
    transitions.extend(std::iter::repeat(dead).take(b));
    let mut accepting = vec![false; states];
    accepting[len] = true;
    Dfa::from_parts(base, vec!["#0".into()], 0, accepting, transitions)
}

/// `x + y = z` via the carry automaton: from carry `c`, a transition on
/// `(a, b, z)` with `a + b + c = z + base·c'` moves to carry `c'`.
fn add_automaton(base: u32) -> Result<Dfa, AutomataError> {
    let b = base as usize;
    // 0 = carry 0 (accepting), 1 = carry 1, 2 = dead.
    let mut transitions = Vec::with_capacity(3 * b * b * b);
    for carry in 0..2usize {
        for a in 0..b {
            for y in 0..b {
                for z in 0..b {
                    let sum = a + y + carry;
                    transitions.push(if sum % b == z { sum / b } else { 2 });
                }
            }
        }
    }
    transitions.extend(std::iter::repeat(2).take(b * b * b));
    Dfa::from_parts(
        base,
        vec!["#0".into(), "#1".into(), "#2".into()],
        0,
        vec![true, false, false],
        transitions,
    )
}

/// `x < y`, LSD-first: the most recently seen differing digit decides.
fn lt_automaton(base: u32) -> Result<Dfa, AutomataError> {
    let b = base as usize;
    // 0 = equal so far, 1 = less, 2 = greater.
    let mut transitions = Vec::with_capacity(3 * b * b);
    for state in 0..3usize {
        for dx in 0..b {
            for dy in 0..b {
                transitions.push(match dx.cmp(&dy) {
                    std::cmp::Ordering::Equal => state,
                    std::cmp::Ordering::Less => 1,
                    std::cmp::Ordering::Greater => 2,
                });
            }
        }
    }
    Dfa::from_parts(
        base,
        vec!["#0".into(), "#1".into()],
        0,
        vec![false, true, false],
        transitions,
    )
}

/// `x ≡ c (mod m)`: state is the pair (value so far mod m, base^k mod m).
fn mod_automaton(base: u32, c: &BigUint, m: &BigUint) -> Result<Dfa, AutomataError> {
    let m_u = m
        .to_usize()
        .ok_or_else(|| AutomataError::Malformed("modulus too large".into()))?;
    if m_u < 2 {
        return Err(AutomataError::Malformed("modulus must be >= 2".into()));
    }
    let c_u = (c % m).to_usize().expect("residue < modulus");
    let b = base as usize;
    let mut index = std::collections::HashMap::new();
    let mut states = vec![(0usize, 1 % m_u)];
    index.insert(states[0], 0usize);
    let mut transitions: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let (r, p) = states[i];
        for d in 0..b {
            let next = ((r + d * p) % m_u, (p * b) % m_u);
            let id = *index.entry(next).or_insert_with(|| {
                states.push(next);
                states.len() - 1
            });
            transitions.push(id);
        }
        i += 1;
    }
    let accepting = states.iter().map(|&(r, _)| r == c_u).collect();
    Dfa::from_parts(base, vec!["#0".into()], 0, accepting, transitions)
}

/// `V(x) = y`: pairs `(0,0)` until a position carries `y`-digit 1 with a
/// nonzero `x`-digit, then `y`-digits must be 0. The all-zero word is
/// accepted, realizing `V(0) = 0`.
fn veq_automaton(base: u32) -> Result<Dfa, AutomataError> {
    let b = base as usize;
    // 0 = leading zeros (accepting: x = y = 0), 1 = power seen (accepting),
    // 2 = dead.
    let mut transitions = Vec::with_capacity(3 * b * b);
    for dx in 0..b {
        for dy in 0..b {
            transitions.push(match (dx, dy) {
                (0, 0) => 0,
                (_, 1) if dx != 0 => 1,
                _ => 2,
            });
        }
    }
    for _dx in 0..b {
        for dy in 0..b {
            transitions.push(if dy == 0 { 1 } else { 2 });
        }
    }
    transitions.extend(std::iter::repeat(2).take(b * b));
    Dfa::from_parts(
        base,
        vec!["#0".into(), "#1".into()],
        0,
        vec![true, true, false],
        transitions,
    )
}

/// Compiles a formula; the result's tracks are `free_vars(f)` in
/// first-occurrence order. Accepts any surface formula (normalization is
/// applied internally); `EINF` is permitted.
pub fn compile(f: &Formula, cfg: &CompileConfig) -> Result<Dfa, CompileError> {
    if cfg.base < 2 {
        return Err(CompileError::BadBase(cfg.base));
    }
    let nf = normalize(f);
    let dfa = compile_rec(&nf, cfg)?;
    let fv = free_vars(f);
    for t in dfa.tracks() {
        if !fv.contains(t) {
            return Err(CompileError::Internal(format!("unbound track `{t}` after compilation")));
        }
    }
    Ok(dfa.align_to(&fv)?)
}

fn finish(dfa: Dfa, cfg: &CompileConfig) -> Dfa {
    if cfg.minimize_each_step {
        dfa.minimize()
    } else {
        dfa
    }
}

fn compile_rec(f: &Formula, cfg: &CompileConfig) -> Result<Dfa, CompileError> {
    let cap = cfg.state_cap;
    match f {
        Formula::Atom(kind) => atom_automaton(kind, cfg),
        Formula::Not(g) => Ok(finish(compile_rec(g, cfg)?.complement(), cfg)),
        Formula::And(a, b) => {
            let da = compile_rec(a, cfg)?;
            let db = compile_rec(b, cfg)?;
            Ok(finish(da.boolean_combine(&db, BoolOp::And, cap)?, cfg))
        }
        Formula::Or(a, b) => {
            let da = compile_rec(a, cfg)?;
            let db = compile_rec(b, cfg)?;
            Ok(finish(da.boolean_combine(&db, BoolOp::Or, cap)?, cfg))
        }
        Formula::Exists(x, g) => {
            let dg = compile_rec(g, cfg)?;
            if dg.tracks().iter().any(|t| t == x) {
                Ok(finish(dg.project(x, cap)?, cfg))
            } else {
                // x does not occur: ∃x φ ≡ φ.
                Ok(dg)
            }
        }
        Formula::Forall(x, g) => {
            let dg = compile_rec(g, cfg)?;
            if dg.tracks().iter().any(|t| t == x) {
                let neg = finish(dg.complement(), cfg);
                let some = finish(neg.project(x, cap)?, cfg);
                Ok(finish(some.complement(), cfg))
            } else {
                Ok(dg)
            }
        }
        Formula::ExistsInf(x, g) => {
            let dg = compile_rec(g, cfg)?;
            if dg.tracks().iter().any(|t| t == x) {
                Ok(finish(dg.exists_inf(x, cap)?, cfg))
            } else {
                // x does not occur: either all x witness φ or none do.
                Ok(dg)
            }
        }
        Formula::Cmp(..) | Formula::ModEq(..) | Formula::Implies(..) | Formula::Iff(..) => Err(
            CompileError::Internal("surface connective survived normalization".into()),
        ),
    }
}

/// Decides a sentence over the standard model. Realized as non-emptiness of
/// the compiled automaton conjoined with `d = d` on a dummy track, so the
/// zero-arity case needs no special automaton type.
pub fn decide(sentence: &Formula, cfg: &CompileConfig) -> Result<bool, CompileError> {
    let fv = free_vars(sentence);
    if !fv.is_empty() {
        return Err(CompileError::NotASentence(fv));
    }
    let compiled = compile(sentence, cfg)?;
    let dummy = Dfa::full(cfg.base, vec!["_d".into()])?;
    let conjoined = compiled.boolean_combine(&dummy, BoolOp::And, cfg.state_cap)?;
    Ok(!conjoined.is_empty())
}

/// First `limit` solutions of a formula with at least one free variable.
pub fn witness(
    f: &Formula,
    cfg: &CompileConfig,
    limit: usize,
) -> Result<Vec<Vec<BigUint>>, CompileError> {
    let fv = free_vars(f);
    if fv.is_empty() {
        return Err(CompileError::Internal("witness requires a free variable".into()));
    }
    Ok(compile(f, cfg)?.enumerate(limit))
}

/// Exact number of solutions with every coordinate below `bound`.
pub fn count_below(
    f: &Formula,
    cfg: &CompileConfig,
    bound: &BigUint,
) -> Result<BigUint, CompileError> {
    let fv = free_vars(f);
    if fv.is_empty() {
        return Err(CompileError::Internal("count requires a free variable".into()));
    }
    let mut bounded = f.clone();
    for v in &fv {
        bounded = Formula::and(
            bounded,
            Formula::Cmp(
                crate::syntax::Term::Var(v.clone()),
                crate::syntax::CmpOp::Lt,
                crate::syntax::Term::Const(bound.clone()),
            ),
        );
    }
    let dfa = compile(&bounded, cfg)?;
    dfa.count_tuples()
        .ok_or_else(|| CompileError::Internal("bounded language not finite".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn cfg() -> CompileConfig {
        CompileConfig::default()
    }

    #[test]
    fn add_atom_accepts_three_plus_five() {
        let dfa =
            atom_automaton(&AtomKind::Add("x".into(), "y".into(), "z".into()), &cfg()).unwrap();
        assert!(dfa.accepts(&[n(3), n(5), n(8)]).unwrap());
        assert!(!dfa.accepts(&[n(3), n(5), n(7)]).unwrap());
    }

    #[test]
    fn add_atom_minimized_has_three_states() {
        let dfa =
            atom_automaton(&AtomKind::Add("x".into(), "y".into(), "z".into()), &cfg()).unwrap();
        assert_eq!(dfa.state_count(), 3);
    }

    #[test]
    fn veq_examples() {
        let dfa = atom_automaton(&AtomKind::VEq("x".into(), "y".into()), &cfg()).unwrap();
        assert!(dfa.accepts(&[n(12), n(4)]).unwrap());
        assert!(!dfa.accepts(&[n(12), n(2)]).unwrap());
        assert!(dfa.accepts(&[n(0), n(0)]).unwrap());
        assert!(!dfa.accepts(&[n(5), n(4)]).unwrap());
        assert!(dfa.accepts(&[n(5), n(1)]).unwrap());
    }

    #[test]
    fn repeated_argument_atoms() {
        let eq = atom_automaton(&AtomKind::Eq("x".into(), "x".into()), &cfg()).unwrap();
        assert_eq!(eq.tracks(), ["x".to_string()]);
        assert!(eq.accepts(&[n(9)]).unwrap());
        let double = atom_automaton(&AtomKind::Add("x".into(), "x".into(), "y".into()), &cfg()).unwrap();
        assert!(double.accepts(&[n(6), n(12)]).unwrap());
        assert!(!double.accepts(&[n(6), n(13)]).unwrap());
    }

    #[test]
    fn compile_exists_bounded_sum() {
        let dfa = compile(&parse("E y. x + y = 5").unwrap(), &cfg()).unwrap();
        for x in 0..=5u64 {
            assert!(dfa.accepts(&[n(x)]).unwrap(), "x = {x}");
        }
        for x in 6..20u64 {
            assert!(!dfa.accepts(&[n(x)]).unwrap(), "x = {x}");
        }
    }

    #[test]
    fn compile_powers_of_two() {
        let dfa = compile(&parse("V(x) = x").unwrap(), &cfg()).unwrap();
        for x in 0u64..(1 << 10) {
            let expected = x == 0 || x.is_power_of_two();
            assert_eq!(dfa.accepts(&[n(x)]).unwrap(), expected, "x = {x}");
        }
    }

    #[test]
    fn decide_simple_sentences() {
        assert!(decide(&parse("A x. V(V(x)) = V(x)").unwrap(), &cfg()).unwrap());
        assert!(!decide(&parse("E x. V(x) = 3").unwrap(), &cfg()).unwrap());
        assert!(!decide(&parse("E x. x < 0").unwrap(), &cfg()).unwrap());
        assert!(decide(&parse("x = x").unwrap(), &cfg()).is_err());
    }

    #[test]
    fn witness_and_count() {
        let w = witness(&parse("V(x) = x & 4 < x").unwrap(), &cfg(), 2).unwrap();
        assert_eq!(w, vec![vec![n(8)], vec![n(16)]]);
        assert!(witness(&parse("x < 0").unwrap(), &cfg(), 1).unwrap().is_empty());
        let c = count_below(&parse("x % 3 = 1").unwrap(), &cfg(), &n(10)).unwrap();
        assert_eq!(c, n(3));
    }

    #[test]
    fn double_negation_equivalence() {
        let f = parse("E y. x + y = 5").unwrap();
        let a = compile(&f, &cfg()).unwrap();
        let b = compile(&Formula::not(Formula::not(f)), &cfg()).unwrap();
        assert!(a.equivalent(&b).unwrap());
    }
}
