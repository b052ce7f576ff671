// (S^3 \ 4_1) filled at -5μ+λ and (S^3 \ 5_2) filled at 5μ+λ give the same index.
//
//     cargo run --release --example surgery_equivalence

use dehnscope::{filled_index, FillOptions, HalfExp, Manifold, Slope};

pub fn run_example() -> dehnscope::Result<()> {
    let order = HalfExp::from_int(9);
    let a = filled_index(&Manifold::builtin("4_1")?.indexer, Slope::new(-5, 1)?, order, FillOptions::default())?;
    let b = filled_index(&Manifold::builtin("5_2")?.indexer, Slope::new(5, 1)?, order, FillOptions::default())?;
    let (a, b) = (a.series.expect("converges"), b.series.expect("converges"));
    println!("4_1 at (-5,1): {a:#}");
    println!("5_2 at (5,1):  {b:#}");
    assert_eq!(a, b);
    Ok(())
}

fn main() -> dehnscope::Result<()> {
    run_example()
}
