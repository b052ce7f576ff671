// The tetrahedron index I_Δ(m, e) and the shared cache.
//
//     cargo run --example tetrahedron_index

use dehnscope::{tet_index, HalfExp, TetIndexCache, TetIndexKey};

pub fn run_example() -> dehnscope::Result<()> {
    let order = HalfExp::from_int(6);
    for (m, e) in [(0, 0), (1, 0), (0, 1), (1, 1), (-2, 3)] {
        println!("I_tet({m},{e}) = {:#}", tet_index(m, e, order));
    }

    let cache = TetIndexCache::new();
    let deep = cache.get(TetIndexKey::new(3, -1, HalfExp::from_int(10)));
    // served from the deeper entry
    let shallow = cache.get(TetIndexKey::new(3, -1, HalfExp::from_int(4)));
    assert_eq!(shallow, deep.truncate(HalfExp::from_int(4)));
    println!("lowest exponent of I_tet(3,-1): {}", cache.min_degree(3, -1, order).lower_bound());
    Ok(())
}

fn main() -> dehnscope::Result<()> {
    run_example()
}
