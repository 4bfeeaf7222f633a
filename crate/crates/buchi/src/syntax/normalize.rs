//! Normalization into the atomic core.
//!
//! Every compound term is flattened through fresh existentially quantified
//! variables; `k * t` is expanded into additions by binary doubling, and the
//! sugared comparisons reduce to `=` and `<`. Introducing `∃` for the fresh
//! witnesses is polarity-safe: addition and `V` are total functions, so each
//! witness exists and is unique, making the `∃` and `∀` placements coincide.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{AtomKind, CmpOp, Formula, Term};

struct Normalizer {
    used: HashSet<String>,
    counter: usize,
}

impl Normalizer {
    fn fresh(&mut self) -> String {
        loop {
            let name = format!("_t{}", self.counter);
            self.counter += 1;
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

/// Result of flattening a term: a variable, or a literal constant that the
/// surrounding atom may absorb into an `EqConst`.
enum Flat {
    Var(String),
    Const(BigUint),
}

/// Rewrites a formula into the normalized core: only [`AtomKind`] atoms,
/// connectives `!`, `&`, `|` and quantifiers, with pairwise-distinct bound
/// variable names.
pub fn normalize(f: &Formula) -> Formula {
    let mut used = HashSet::new();
    collect_names(f, &mut used);
    let mut st = Normalizer { used, counter: 0 };
    go(f, &mut st)
}

fn collect_names(f: &Formula, out: &mut HashSet<String>) {
    match f {
        Formula::Cmp(a, _, b) => {
            term_names(a, out);
            term_names(b, out);
        }
        Formula::ModEq(t, _, _) => term_names(t, out),
        Formula::Atom(k) => {
            for v in k.vars() {
                out.insert(v.to_string());
            }
        }
        Formula::Not(g) => collect_names(g, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_names(a, out);
            collect_names(b, out);
        }
        Formula::Exists(x, g) | Formula::Forall(x, g) | Formula::ExistsInf(x, g) => {
            out.insert(x.clone());
            collect_names(g, out);
        }
    }
}

fn term_names(t: &Term, out: &mut HashSet<String>) {
    match t {
        Term::Var(x) => {
            out.insert(x.clone());
        }
        Term::Const(_) => {}
        Term::Sum(a, b) => {
            term_names(a, out);
            term_names(b, out);
        }
        Term::Scale(_, a) | Term::V(a) => term_names(a, out),
    }
}

fn go(f: &Formula, st: &mut Normalizer) -> Formula {
    match f {
        Formula::Atom(k) => Formula::Atom(k.clone()),
        Formula::Cmp(a, op, b) => match op {
            CmpOp::Eq => atom_eq(a, b, st),
            CmpOp::Ne => Formula::not(atom_eq(a, b, st)),
            CmpOp::Lt => atom_lt(a, b, st),
            CmpOp::Le => Formula::not(atom_lt(b, a, st)),
            CmpOp::Gt => atom_lt(b, a, st),
            CmpOp::Ge => Formula::not(atom_lt(a, b, st)),
        },
        Formula::ModEq(t, m, c) => atom_mod(t, m, c, st),
        Formula::Not(g) => Formula::not(go(g, st)),
        Formula::And(a, b) => Formula::and(go(a, st), go(b, st)),
        Formula::Or(a, b) => Formula::or(go(a, st), go(b, st)),
        Formula::Implies(a, b) => Formula::or(Formula::not(go(a, st)), go(b, st)),
        Formula::Iff(a, b) => {
            let (pa, pb) = (go(a, st), go(b, st));
            let (na, nb) = (go(a, st), go(b, st));
            Formula::or(Formula::and(pa, pb), Formula::and(Formula::not(na), Formula::not(nb)))
        }
        Formula::Exists(x, g) | Formula::Forall(x, g) | Formula::ExistsInf(x, g) => {
            // Bound names must be pairwise distinct after normalization; a
            // repeated binder is alpha-renamed to a fresh variable.
            let body = if st.used.insert(format!("_bound_{x}")) {
                go(g, st)
            } else {
                let fresh = st.fresh();
                let mut map = std::collections::HashMap::new();
                map.insert(x.clone(), fresh.clone());
                let renamed = super::rename_free(g, &map);
                let out = go(&renamed, st);
                return rebuild_quant(f, fresh, out);
            };
            rebuild_quant(f, x.clone(), body)
        }
    }
}

fn rebuild_quant(f: &Formula, x: String, body: Formula) -> Formula {
    match f {
        Formula::Exists(..) => Formula::exists(x, body),
        Formula::Forall(..) => Formula::forall(x, body),
        Formula::ExistsInf(..) => Formula::exists_inf(x, body),
        _ => unreachable!(),
    }
}

/// Closes `core ∧ constraints` under `∃` for all fresh witnesses.
fn close(core: AtomKind, constraints: Vec<AtomKind>, fresh: Vec<String>) -> Formula {
    let mut parts: Vec<Formula> = constraints.into_iter().map(Formula::Atom).collect();
    parts.push(Formula::Atom(core));
    let mut out = Formula::conj(parts);
    for v in fresh.into_iter().rev() {
        out = Formula::exists(v, out);
    }
    out
}

fn atom_eq(a: &Term, b: &Term, st: &mut Normalizer) -> Formula {
    let mut constraints = Vec::new();
    let mut fresh = Vec::new();
    let fa = flatten(a, st, &mut constraints, &mut fresh);
    let fb = flatten(b, st, &mut constraints, &mut fresh);
    let core = match (fa, fb) {
        (Flat::Var(x), Flat::Var(y)) => AtomKind::Eq(x, y),
        (Flat::Var(x), Flat::Const(c)) | (Flat::Const(c), Flat::Var(x)) => AtomKind::EqConst(x, c),
        (Flat::Const(c1), Flat::Const(c2)) => {
            let x = materialize(Flat::Const(c1), st, &mut constraints, &mut fresh);
            AtomKind::EqConst(x, c2)
        }
    };
    close(core, constraints, fresh)
}

fn atom_lt(a: &Term, b: &Term, st: &mut Normalizer) -> Formula {
    let mut constraints = Vec::new();
    let mut fresh = Vec::new();
    let fa = flatten(a, st, &mut constraints, &mut fresh);
    let fb = flatten(b, st, &mut constraints, &mut fresh);
    let x = materialize(fa, st, &mut constraints, &mut fresh);
    let y = materialize(fb, st, &mut constraints, &mut fresh);
    close(AtomKind::Lt(x, y), constraints, fresh)
}

fn atom_mod(t: &Term, m: &BigUint, c: &BigUint, st: &mut Normalizer) -> Formula {
    let mut constraints = Vec::new();
    let mut fresh = Vec::new();
    let ft = flatten(t, st, &mut constraints, &mut fresh);
    let x = materialize(ft, st, &mut constraints, &mut fresh);
    // Degenerate moduli keep normalization total: m = 1 is a tautology,
    // m = 0 means plain equality.
    let core = if m.is_zero() {
        AtomKind::EqConst(x, c.clone())
    } else if m.is_one() {
        AtomKind::Eq(x.clone(), x)
    } else {
        AtomKind::Mod(x, c % m, m.clone())
    };
    close(core, constraints, fresh)
}

fn materialize(
    flat: Flat,
    st: &mut Normalizer,
    constraints: &mut Vec<AtomKind>,
    fresh: &mut Vec<String>,
) -> String {
    match flat {
        Flat::Var(x) => x,
        Flat::Const(c) => {
            let u = st.fresh();
            constraints.push(AtomKind::EqConst(u.clone(), c));
            fresh.push(u.clone());
            u
        }
    }
}

fn flatten(
    t: &Term,
    st: &mut Normalizer,
    constraints: &mut Vec<AtomKind>,
    fresh: &mut Vec<String>,
) -> Flat {
    match t {
        Term::Var(x) => Flat::Var(x.clone()),
        Term::Const(c) => Flat::Const(c.clone()),
        Term::Sum(a, b) => {
            let fa = flatten(a, st, constraints, fresh);
            let fb = flatten(b, st, constraints, fresh);
            let x = materialize(fa, st, constraints, fresh);
            let y = materialize(fb, st, constraints, fresh);
            let z = st.fresh();
            constraints.push(AtomKind::Add(x, y, z.clone()));
            fresh.push(z.clone());
            Flat::Var(z)
        }
        Term::Scale(k, a) => {
            if k.is_zero() {
                return Flat::Const(BigUint::zero());
            }
            let fa = flatten(a, st, constraints, fresh);
            if k.is_one() {
                return fa;
            }
            let x = materialize(fa, st, constraints, fresh);
            // Binary doubling, most significant bit first.
            let bits = k.to_radix_be(2);
            let mut acc = x.clone();
            for &bit in &bits[1..] {
                let doubled = st.fresh();
                constraints.push(AtomKind::Add(acc.clone(), acc.clone(), doubled.clone()));
                fresh.push(doubled.clone());
                acc = doubled;
                if bit == 1 {
                    let bumped = st.fresh();
                    constraints.push(AtomKind::Add(acc.clone(), x.clone(), bumped.clone()));
                    fresh.push(bumped.clone());
                    acc = bumped;
                }
            }
            Flat::Var(acc)
        }
        Term::V(a) => {
            let fa = flatten(a, st, constraints, fresh);
            let x = materialize(fa, st, constraints, fresh);
            let u = st.fresh();
            constraints.push(AtomKind::VEq(x, u.clone()));
            fresh.push(u.clone());
            Flat::Var(u)
        }
    }
}
