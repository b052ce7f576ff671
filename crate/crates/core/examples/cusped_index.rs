// Cusped indices of the figure-eight knot complement and of 5_2.
//
//     cargo run --example cusped_index

use dehnscope::{HalfExp, Manifold};

pub fn run_example() -> dehnscope::Result<()> {
    let order = HalfExp::from_int(6);
    for name in ["4_1", "5_2"] {
        let manifold = Manifold::builtin(name)?;
        let table = manifold.indexer.table(&[(0, 0), (0, 1), (1, 0), (1, 1), (1, -1)], order)?;
        println!("{name}:");
        for (&(m, e), series) in &table.entries {
            println!("  I({m},{e}) = {series:#}");
        }
    }
    Ok(())
}

fn main() -> dehnscope::Result<()> {
    run_example()
}
