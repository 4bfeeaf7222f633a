//! Bit-exact golden files for the six base-2 atom automata. Regenerate with
//! `UPDATE_GOLDEN=1 cargo test -p buchi --test golden` after an intentional
//! change; the diff is the review artifact.

use std::path::PathBuf;

use num_bigint::BigUint;

use buchi::compiler::{atom_automaton, CompileConfig};
use buchi::automata::Dfa;
use buchi::syntax::AtomKind;

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn atoms() -> Vec<(&'static str, AtomKind)> {
    vec![
        ("eq", AtomKind::Eq("x".into(), "y".into())),
        ("eq_const_5", AtomKind::EqConst("x".into(), BigUint::from(5u32))),
        ("add", AtomKind::Add("x".into(), "y".into(), "z".into())),
        ("lt", AtomKind::Lt("x".into(), "y".into())),
        ("mod_1_3", AtomKind::Mod("x".into(), BigUint::from(1u32), BigUint::from(3u32))),
        ("veq", AtomKind::VEq("x".into(), "y".into())),
    ]
}

#[test]
fn atom_automata_match_goldens() {
    let cfg = CompileConfig::default();
    let update = std::env::var("UPDATE_GOLDEN").is_ok();
    for (name, kind) in atoms() {
        let dfa = atom_automaton(&kind, &cfg).unwrap();
        let json = dfa.to_json();
        let path = golden_dir().join(format!("{name}.json"));
        if update {
            std::fs::write(&path, &json).unwrap();
            continue;
        }
        let stored = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("missing golden {name}: {e}"));
        assert_eq!(json, stored, "golden mismatch for {name}");
        // The stored artifact must also round-trip into the same automaton.
        let parsed = Dfa::from_json(&stored).unwrap();
        assert_eq!(parsed, dfa, "roundtrip mismatch for {name}");
    }
}

#[test]
fn golden_automata_spot_checks() {
    let cfg = CompileConfig::default();
    let veq = atom_automaton(&AtomKind::VEq("x".into(), "y".into()), &cfg).unwrap();
    assert!(veq.accepts(&[12u32.into(), 4u32.into()]).unwrap());
    assert!(!veq.accepts(&[12u32.into(), 2u32.into()]).unwrap());
    let add = atom_automaton(&AtomKind::Add("x".into(), "y".into(), "z".into()), &cfg)
        .unwrap()
        .minimize();
    assert_eq!(add.state_count(), 3);
    let eqc = atom_automaton(&AtomKind::EqConst("x".into(), BigUint::from(5u32)), &cfg).unwrap();
    assert!(eqc.accepts(&[5u32.into()]).unwrap());
    assert!(!eqc.accepts(&[4u32.into()]).unwrap());
}
