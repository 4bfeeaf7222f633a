//! JSON import/export and DOT rendering.
//!
//! Schema: `base`, `tracks`, `stateCount`, `initial`, `accepting` (sorted
//! state ids), `transitions` as `[from, [d1, …, dm], to]` sorted by
//! `(from, digits)`. Deterministic so golden files are bit-exact.

use serde::{Deserialize, Serialize};

use super::{AutomataError, Dfa};

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct DfaJson {
    base: u32,
    tracks: Vec<String>,
    state_count: usize,
    initial: usize,
    accepting: Vec<usize>,
    transitions: Vec<(usize, Vec<u8>, usize)>,
}

impl Dfa {
    pub fn to_json(&self) -> String {
        let accepting: Vec<usize> =
            (0..self.state_count()).filter(|&s| self.accepting[s]).collect();
        let mut transitions = Vec::with_capacity(self.state_count() * self.alpha);
        for s in 0..self.state_count() {
            for sym in 0..self.alpha {
                transitions.push((s, self.symbol_digits(sym), self.step(s, sym)));
            }
        }
        let doc = DfaJson {
            base: self.base,
            tracks: self.tracks.clone(),
            state_count: self.state_count(),
            initial: self.initial,
            accepting,
            transitions,
        };
        serde_json::to_string_pretty(&doc).expect("automaton serialization")
    }

    pub fn from_json(text: &str) -> Result<Dfa, AutomataError> {
        let doc: DfaJson =
            serde_json::from_str(text).map_err(|e| AutomataError::Malformed(e.to_string()))?;
        let alpha = super::alphabet_size(doc.base, doc.tracks.len())?;
        let mut accepting = vec![false; doc.state_count];
        for s in doc.accepting {
            *accepting
                .get_mut(s)
                .ok_or_else(|| AutomataError::Malformed("accepting state out of range".into()))? =
                true;
        }
        let mut transitions = vec![usize::MAX; doc.state_count * alpha];
        for (from, digits, to) in doc.transitions {
            if from >= doc.state_count || digits.len() != doc.tracks.len() {
                return Err(AutomataError::Malformed("bad transition".into()));
            }
            for &d in &digits {
                if d as u32 >= doc.base {
                    return Err(AutomataError::InvalidDigit { digit: d, base: doc.base });
                }
            }
            let sym =
                digits.iter().fold(0usize, |acc, &d| acc * doc.base as usize + d as usize);
            let slot = &mut transitions[from * alpha + sym];
            if *slot != usize::MAX {
                return Err(AutomataError::Malformed("duplicate transition".into()));
            }
            *slot = to;
        }
        if transitions.iter().any(|&t| t == usize::MAX) {
            return Err(AutomataError::Malformed("transition function not total".into()));
        }
        Dfa::from_parts(doc.base, doc.tracks, doc.initial, accepting, transitions)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  node [shape=circle];\n");
        out.push_str("  init [shape=point];\n");
        for s in 0..self.state_count() {
            if self.accepting[s] {
                out.push_str(&format!("  s{s} [shape=doublecircle];\n"));
            }
        }
        out.push_str(&format!("  init -> s{};\n", self.initial));
        // Group parallel edges into one label.
        for s in 0..self.state_count() {
            let mut labels: std::collections::BTreeMap<usize, Vec<String>> =
                std::collections::BTreeMap::new();
            for sym in 0..self.alpha {
                let digits = self.symbol_digits(sym);
                let label = digits.iter().map(u8::to_string).collect::<Vec<_>>().join("");
                labels.entry(self.step(s, sym)).or_default().push(label);
            }
            for (t, syms) in labels {
                out.push_str(&format!("  s{s} -> s{t} [label=\"{}\"];\n", syms.join(",")));
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip() {
        let dfa = Dfa::from_parts(
            2,
            vec!["x".into(), "y".into()],
            0,
            vec![true, false],
            vec![0, 1, 1, 0, 1, 1, 1, 1],
        )
        .unwrap();
        let text = dfa.to_json();
        let back = Dfa::from_json(&text).unwrap();
        assert_eq!(dfa, back);
    }

    #[test]
    fn json_rejects_partial_transition_function() {
        let dfa = Dfa::full(2, vec!["x".into()]).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&dfa.to_json()).unwrap();
        doc["transitions"].as_array_mut().unwrap().pop();
        assert!(Dfa::from_json(&doc.to_string()).is_err());
    }
}
