// Describing a manifold in JSON: the 4_1 index given as a lattice formula.
//
//     cargo run --example custom_manifold_json

use std::sync::Arc;

use dehnscope::gluing::parse_manifold_str;
use dehnscope::{HalfExp, Manifold, SumOptions};

const FORMULA: &str = r#"{
  "name": "figure-eight (formula)",
  "K": 2,
  "formula": {
    "prefactor": {"m": -1, "e": 1, "evars": [-1]},
    "tet_args": [
      [{"evars": [-1]}, {"e": 1, "evars": [-1]}],
      [{"m": 2, "e": -1, "evars": [2]}, {"m": -1, "e": 1, "evars": [-1]}]
    ],
    "sum_vars": 1
  }
}"#;

const REDUCED: &str = r#"{
  "name": "figure-eight (reduced)",
  "K": 2,
  "reduced": {
    "A": [[1, 1], [-1, -1]],
    "B": [[0, 1], [1, -2]],
    "C": [0, 1],
    "D": [0, 2],
    "nu": [1, -1],
    "two_nu_last": 2
  }
}"#;

pub fn run_example() -> dehnscope::Result<()> {
    let order = HalfExp::from_int(5);
    let formula = Manifold::new(parse_manifold_str(FORMULA)?, Arc::default(), SumOptions::default())?;
    let reduced = Manifold::new(parse_manifold_str(REDUCED)?, Arc::default(), SumOptions::default())?;
    for (m, e) in [(0, 0), (1, 0), (1, 1), (-2, 1)] {
        let a = formula.indexer.index(m, e, order)?;
        let b = reduced.indexer.index(m, e, order)?;
        assert_eq!(a, b);
        println!("I({m},{e}) = {a:#}");
    }

    match parse_manifold_str(r#"{"name": "broken", "K": 0, "formula": {}}"#) {
        Err(err) => println!("rejected: {err}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

fn main() -> dehnscope::Result<()> {
    run_example()
}
