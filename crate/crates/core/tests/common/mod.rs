#![allow(dead_code)]

use khkit::{BraidWord, LinkDiagram};

/// Braid closures on at most 4 strands with at most 8 crossings.
pub const BRAIDS: &[&str] = &[
    "1:",
    "2: 1",
    "2: -1",
    "2: 1 1",
    "2: -1 -1",
    "2: 1 1 1",
    "2: -1 -1 -1",
    "2: 1 1 1 1",
    "2: 1 1 1 1 1",
    "2: -1 -1 -1 -1 -1",
    "2: 1 1 1 1 1 1",
    "2: 1 1 1 1 1 1 1",
    "2: 1 1 1 1 1 1 1 1",
    "3: 1 2",
    "3: 1 -2",
    "3: 1 1 2 2",
    "3: 1 -2 1 -2",
    "3: 1 1 1 2 -1 2",
    "3: 1 1 1 -2 1 -2",
    "3: 1 1 -2 1 -2 -2",
    "3: 1 2 1 2 1 2",
    "3: 1 -2 1 -2 1 -2",
    "3: 1 1 1 1 -2 1 -2 -2",
    "3: 1 2 1 2 1 2 1 2",
    "3: 1 1 1 -2 -1 -1 -1 -2",
    "4: 1 2 3",
    "4: 1 -2 3",
    "4: 1 1 2 -1 -3 2 -3",
    "4: 1 -2 3 -2 1 -2 3 -2",
    "4: 1 2 3 1 2 3",
];

pub fn braid(word: &str) -> BraidWord {
    word.parse().unwrap_or_else(|e| panic!("{word}: {e}"))
}

/// `(label, diagram)` for every braid closure plus the unlinks of 1..4 components.
pub fn corpus() -> Vec<(String, LinkDiagram)> {
    let mut out: Vec<(String, LinkDiagram)> = BRAIDS.iter().map(|w| (w.to_string(), braid(w).closure())).collect();
    for n in 1..=4 {
        out.push((format!("unlink {n}"), LinkDiagram::unlink(n).unwrap()));
    }
    out
}
