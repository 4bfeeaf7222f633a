//! Abstract syntax of BA_n formulas, concrete grammar, and normalization.
//!
//! The base `n` is not part of the formula text; the same formula can be
//! read in any `BA_n` by choosing the base at compile time. Quantifiers are
//! written `E`, `A` and `EINF` (there exist infinitely many), and `V(t)`
//! denotes `V_n(t)`.

use std::collections::HashMap;

use num_bigint::BigUint;

mod normalize;
mod parse;

pub use normalize::normalize;
pub use parse::{parse, ParseError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Const(BigUint),
    Sum(Box<Term>, Box<Term>),
    /// `k * t` with `k >= 1`.
    Scale(BigUint, Box<Term>),
    /// `V(t)`, the largest power of the base dividing `t`.
    V(Box<Term>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

/// Normalized atomic core; all arguments are variable names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomKind {
    Eq(String, String),
    EqConst(String, BigUint),
    /// `x + y = z`.
    Add(String, String, String),
    Lt(String, String),
    /// `x ≡ c (mod m)`, `0 <= c < m`, `m >= 2`.
    Mod(String, BigUint, BigUint),
    /// `V(x) = y`.
    VEq(String, String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    /// Surface comparison between terms.
    Cmp(Term, CmpOp, Term),
    /// Surface `t % m = c`.
    ModEq(Term, BigUint, BigUint),
    /// Normalized atom; not produced by the parser.
    Atom(AtomKind),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    /// `EINF x. φ` — there exist infinitely many x.
    ExistsInf(String, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(x: impl Into<String>, f: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(f))
    }

    pub fn forall(x: impl Into<String>, f: Formula) -> Formula {
        Formula::Forall(x.into(), Box::new(f))
    }

    pub fn exists_inf(x: impl Into<String>, f: Formula) -> Formula {
        Formula::ExistsInf(x.into(), Box::new(f))
    }

    pub fn cmp(a: Term, op: CmpOp, b: Term) -> Formula {
        Formula::Cmp(a, op, b)
    }

    /// Conjunction of a nonempty list.
    pub fn conj(mut fs: Vec<Formula>) -> Formula {
        let mut acc = fs.pop().expect("conj of empty list");
        while let Some(f) = fs.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    /// Disjunction of a nonempty list.
    pub fn disj(mut fs: Vec<Formula>) -> Formula {
        let mut acc = fs.pop().expect("disj of empty list");
        while let Some(f) = fs.pop() {
            acc = Formula::or(f, acc);
        }
        acc
    }
}

pub fn var(name: impl Into<String>) -> Term {
    Term::Var(name.into())
}

pub fn nat(value: u64) -> Term {
    Term::Const(BigUint::from(value))
}

impl Term {
    pub fn sum(a: Term, b: Term) -> Term {
        Term::Sum(Box::new(a), Box::new(b))
    }

    pub fn v(t: Term) -> Term {
        Term::V(Box::new(t))
    }
}

impl AtomKind {
    pub fn vars(&self) -> Vec<&str> {
        match self {
            AtomKind::Eq(x, y) | AtomKind::Lt(x, y) | AtomKind::VEq(x, y) => vec![x, y],
            AtomKind::EqConst(x, _) | AtomKind::Mod(x, _, _) => vec![x],
            AtomKind::Add(x, y, z) => vec![x, y, z],
        }
    }
}

fn term_vars<'a>(t: &'a Term, out: &mut Vec<&'a str>) {
    match t {
        Term::Var(x) => out.push(x),
        Term::Const(_) => {}
        Term::Sum(a, b) => {
            term_vars(a, out);
            term_vars(b, out);
        }
        Term::Scale(_, a) | Term::V(a) => term_vars(a, out),
    }
}

/// Free variables in first-occurrence order; this order fixes the track
/// assignment of compiled automata.
pub fn free_vars(f: &Formula) -> Vec<String> {
    let mut out = Vec::new();
    let mut bound = Vec::new();
    collect_free(f, &mut bound, &mut out);
    out
}

fn collect_free(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
    let push = |names: Vec<&str>, bound: &Vec<String>, out: &mut Vec<String>| {
        for x in names {
            if !bound.iter().any(|b| b == x) && !out.iter().any(|o| o == x) {
                out.push(x.to_string());
            }
        }
    };
    match f {
        Formula::Cmp(a, _, b) => {
            let mut vs = Vec::new();
            term_vars(a, &mut vs);
            term_vars(b, &mut vs);
            push(vs, bound, out);
        }
        Formula::ModEq(t, _, _) => {
            let mut vs = Vec::new();
            term_vars(t, &mut vs);
            push(vs, bound, out);
        }
        Formula::Atom(k) => push(k.vars(), bound, out),
        Formula::Not(g) => collect_free(g, bound, out),
        Formula::And(a, b)
        | Formula::Or(a, b)
        | Formula::Implies(a, b)
        | Formula::Iff(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Formula::Exists(x, g) | Formula::Forall(x, g) | Formula::ExistsInf(x, g) => {
            bound.push(x.clone());
            collect_free(g, bound, out);
            bound.pop();
        }
    }
}

/// Renames free variables according to `map`, alpha-renaming binders when a
/// substitution target would otherwise be captured. Mapping distinct
/// variables to one name merges them.
pub fn rename_free(f: &Formula, map: &HashMap<String, String>) -> Formula {
    let lookup = |x: &str, map: &HashMap<String, String>| -> String {
        map.get(x).cloned().unwrap_or_else(|| x.to_string())
    };
    let term = |t: &Term, map: &HashMap<String, String>| rename_term(t, map);
    match f {
        Formula::Cmp(a, op, b) => Formula::Cmp(term(a, map), *op, term(b, map)),
        Formula::ModEq(t, m, c) => Formula::ModEq(term(t, map), m.clone(), c.clone()),
        Formula::Atom(k) => Formula::Atom(match k {
            AtomKind::Eq(x, y) => AtomKind::Eq(lookup(x, map), lookup(y, map)),
            AtomKind::EqConst(x, c) => AtomKind::EqConst(lookup(x, map), c.clone()),
            AtomKind::Add(x, y, z) => AtomKind::Add(lookup(x, map), lookup(y, map), lookup(z, map)),
            AtomKind::Lt(x, y) => AtomKind::Lt(lookup(x, map), lookup(y, map)),
            AtomKind::Mod(x, c, m) => AtomKind::Mod(lookup(x, map), c.clone(), m.clone()),
            AtomKind::VEq(x, y) => AtomKind::VEq(lookup(x, map), lookup(y, map)),
        }),
        Formula::Not(g) => Formula::not(rename_free(g, map)),
        Formula::And(a, b) => Formula::and(rename_free(a, map), rename_free(b, map)),
        Formula::Or(a, b) => Formula::or(rename_free(a, map), rename_free(b, map)),
        Formula::Implies(a, b) => Formula::implies(rename_free(a, map), rename_free(b, map)),
        Formula::Iff(a, b) => Formula::iff(rename_free(a, map), rename_free(b, map)),
        Formula::Exists(x, g) | Formula::Forall(x, g) | Formula::ExistsInf(x, g) => {
            let mut inner = map.clone();
            inner.remove(x);
            let body_free = free_vars(g);
            let captured = inner
                .iter()
                .any(|(from, to)| to == x && body_free.iter().any(|v| v == from));
            let (x2, body) = if captured {
                let mut fresh = format!("{x}_r");
                let mut n = 0usize;
                while inner.values().any(|v| v == &fresh) || body_free.iter().any(|v| v == &fresh) {
                    n += 1;
                    fresh = format!("{x}_r{n}");
                }
                let mut bump = HashMap::new();
                bump.insert(x.clone(), fresh.clone());
                (fresh, rename_free(g, &bump))
            } else {
                (x.clone(), g.as_ref().clone())
            };
            let body = rename_free(&body, &inner);
            match f {
                Formula::Exists(..) => Formula::exists(x2, body),
                Formula::Forall(..) => Formula::forall(x2, body),
                _ => Formula::exists_inf(x2, body),
            }
        }
    }
}

fn rename_term(t: &Term, map: &HashMap<String, String>) -> Term {
    match t {
        Term::Var(x) => Term::Var(map.get(x).cloned().unwrap_or_else(|| x.clone())),
        Term::Const(c) => Term::Const(c.clone()),
        Term::Sum(a, b) => Term::sum(rename_term(a, map), rename_term(b, map)),
        Term::Scale(k, a) => Term::Scale(k.clone(), Box::new(rename_term(a, map))),
        Term::V(a) => Term::v(rename_term(a, map)),
    }
}

/// True when the formula is in the normalized core: every atom is an
/// [`AtomKind`] and only `!`, `&`, `|` and quantifiers appear.
pub fn is_normal_core(f: &Formula) -> bool {
    match f {
        Formula::Atom(_) => true,
        Formula::Cmp(..) | Formula::ModEq(..) | Formula::Implies(..) | Formula::Iff(..) => false,
        Formula::Not(g) => is_normal_core(g),
        Formula::And(a, b) | Formula::Or(a, b) => is_normal_core(a) && is_normal_core(b),
        Formula::Exists(_, g) | Formula::Forall(_, g) | Formula::ExistsInf(_, g) => {
            is_normal_core(g)
        }
    }
}

/// Concrete syntax for a formula; output re-parses to an alpha-equivalent
/// formula whenever all identifiers are grammar-legal.
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    render_formula(f, 0, &mut out);
    out
}

// Precedence: quantifiers 0 (parenthesized whenever nested in an operator),
// <-> 1, -> 2, | 3, & 4, ! and atoms 5.
fn render_formula(f: &Formula, min_prec: u8, out: &mut String) {
    match f {
        Formula::Exists(x, g) | Formula::Forall(x, g) | Formula::ExistsInf(x, g) => {
            let needs = min_prec > 0;
            if needs {
                out.push('(');
            }
            out.push_str(match f {
                Formula::Exists(..) => "E ",
                Formula::Forall(..) => "A ",
                _ => "EINF ",
            });
            out.push_str(x);
            out.push_str(". ");
            render_formula(g, 0, out);
            if needs {
                out.push(')');
            }
        }
        Formula::Iff(a, b) => render_binop(a, "<->", b, 1, min_prec, out),
        Formula::Implies(a, b) => render_binop(a, "->", b, 2, min_prec, out),
        Formula::Or(a, b) => render_binop(a, "|", b, 3, min_prec, out),
        Formula::And(a, b) => render_binop(a, "&", b, 4, min_prec, out),
        Formula::Not(g) => {
            out.push('!');
            render_formula(g, 5, out);
        }
        Formula::Cmp(a, op, b) => {
            render_term(a, out);
            out.push_str(match op {
                CmpOp::Eq => " = ",
                CmpOp::Ne => " != ",
                CmpOp::Lt => " < ",
                CmpOp::Le => " <= ",
                CmpOp::Gt => " > ",
                CmpOp::Ge => " >= ",
            });
            render_term(b, out);
        }
        Formula::ModEq(t, m, c) => {
            render_term(t, out);
            out.push_str(&format!(" % {m} = {c}"));
        }
        Formula::Atom(k) => match k {
            AtomKind::Eq(x, y) => out.push_str(&format!("{x} = {y}")),
            AtomKind::EqConst(x, c) => out.push_str(&format!("{x} = {c}")),
            AtomKind::Add(x, y, z) => out.push_str(&format!("{x} + {y} = {z}")),
            AtomKind::Lt(x, y) => out.push_str(&format!("{x} < {y}")),
            AtomKind::Mod(x, c, m) => out.push_str(&format!("{x} % {m} = {c}")),
            AtomKind::VEq(x, y) => out.push_str(&format!("V({x}) = {y}")),
        },
    }
}

fn render_binop(a: &Formula, op: &str, b: &Formula, prec: u8, min_prec: u8, out: &mut String) {
    let needs = min_prec > prec;
    if needs {
        out.push('(');
    }
    // <-> and -> associate to the right; | and & to the left.
    let (lp, rp) = if prec <= 2 { (prec + 1, prec) } else { (prec, prec + 1) };
    render_formula(a, lp, out);
    out.push(' ');
    out.push_str(op);
    out.push(' ');
    render_formula(b, rp, out);
    if needs {
        out.push(')');
    }
}

fn render_term(t: &Term, out: &mut String) {
    match t {
        Term::Var(x) => out.push_str(x),
        Term::Const(c) => out.push_str(&c.to_string()),
        Term::Sum(a, b) => {
            render_term(a, out);
            out.push_str(" + ");
            render_term(b, out);
        }
        Term::Scale(k, a) => {
            out.push_str(&k.to_string());
            out.push_str(" * ");
            if matches!(a.as_ref(), Term::Sum(..)) {
                out.push('(');
                render_term(a, out);
                out.push(')');
            } else {
                render_term(a, out);
            }
        }
        Term::V(a) => {
            out.push_str("V(");
            render_term(a, out);
            out.push(')');
        }
    }
}
