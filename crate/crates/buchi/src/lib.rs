//! Executable Büchi arithmetic.
//!
//! Büchi arithmetic `BA_n` (n >= 2) is the first-order theory of
//! `(ℕ; =, +, V_n)` where `V_n(x)` is the largest power of `n` dividing `x`
//! (with `V_n(0) = 0`). Every definable relation is recognizable by a finite
//! automaton reading the base-n digits of its arguments synchronously,
//! least-significant digit first. This crate makes that effective:
//!
//! * [`syntax`] — formulas, parser, printer, and normalization into an
//!   atomic core the compiler accepts;
//! * [`automata`] — DFAs over tuples of base-n digits with the boolean,
//!   projection, minimization, and `∃^∞` operations;
//! * [`compiler`] — the formula-to-automaton translation and the sentence
//!   decision procedure;
//! * [`oracle`] — an independent brute-force semantics used for testing;
//! * [`orders`] — the `≤_k` order family, a direct comparator, and the
//!   condensation-rank engine for definable linear orders;
//! * [`countermodel`] — a structure on pairs `(p, q)` satisfying the
//!   Presburger axioms plus the inductive definition of `V_2` while
//!   refuting a true `BA_2` sentence.

pub mod automata;
pub mod compiler;
pub mod countermodel;
pub mod oracle;
pub mod orders;
pub mod syntax;
