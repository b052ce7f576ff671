// Filled indices of 4_1 at a few slopes, with the support-line traces.
//
//     cargo run --example dehn_filling

use dehnscope::{filled_index, FillOptions, HalfExp, Manifold, Slope};

pub fn run_example() -> dehnscope::Result<()> {
    let manifold = Manifold::builtin("4_1")?;
    let order = HalfExp::from_int(6);
    for (p, q) in [(1, 0), (0, 1), (1, 2), (4, 1), (5, 1)] {
        let r = filled_index(&manifold.indexer, Slope::new(p, q)?, order, FillOptions::default())?;
        let value = r.series.as_ref().map_or("∞".to_string(), |s| format!("{s:#}"));
        println!("({p},{q}) [{}] {value}", r.status.as_str());
        println!(
            "    (r,s) = {:?}, {} terms, |t| <= {}",
            r.diagnostics.rs, r.diagnostics.contributing_terms, r.diagnostics.max_abs_t
        );
    }
    Ok(())
}

fn main() -> dehnscope::Result<()> {
    run_example()
}
