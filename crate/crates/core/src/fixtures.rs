//! Small categories shipped with the library.

use crate::category::FinCategory;
use crate::json::{category_from_json, parse, CategoryJson};

pub const PARALLEL_PAIR: &str = include_str!("../fixtures/parallel_pair.json");

/// Directed categories with at most three objects.
pub const DIRECTED: &[(&str, &str)] = &[
    ("terminal", include_str!("../fixtures/terminal.json")),
    ("two_chain", include_str!("../fixtures/two_chain.json")),
    ("wedge", include_str!("../fixtures/wedge.json")),
    ("equalized_pair", include_str!("../fixtures/equalized_pair.json")),
];

fn load(name: &str, text: &str) -> FinCategory {
    let j: CategoryJson = parse(text, name).expect("bundled fixture parses");
    category_from_json(&j).expect("bundled fixture is a category")
}

pub fn parallel_pair() -> FinCategory {
    load("parallel_pair", PARALLEL_PAIR)
}

pub fn directed() -> Vec<(&'static str, FinCategory)> {
    DIRECTED.iter().map(|&(n, t)| (n, load(n, t))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_verdicts() {
        let v = parallel_pair().is_directed();
        assert!(!v.directed);
        assert_eq!(v.witness.unwrap().axiom(), 3);
        for (name, c) in directed() {
            assert!(c.is_directed().directed, "{name}");
        }
    }
}
