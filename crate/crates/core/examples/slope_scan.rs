// Exceptional slopes of 4_1 and the m003 slope list.
//
//     cargo run --release --example slope_scan

use dehnscope::{scan, scan_slopes, FillOptions, HalfExp, Manifold, Slope};

pub fn run_example() -> dehnscope::Result<()> {
    let five = HalfExp::from_int(5);
    let figure_eight = Manifold::builtin("4_1")?;
    let report = scan(&figure_eight, 7, five, five, FillOptions::default())?;
    print!("{}", report.to_table());

    // m003 slopes are given in its (A, B) basis
    let m003 = Manifold::builtin("m003")?;
    let slopes = [(0, 1), (1, 0), (1, -1), (1, -2), (1, 1), (1, 2), (2, -1), (3, -2)]
        .into_iter()
        .map(|(p, q)| Slope::new(p, q))
        .collect::<dehnscope::Result<Vec<_>>>()?;
    let report = scan_slopes(&m003, &slopes, five, five, FillOptions::default())?;
    print!("{}", report.to_table());
    Ok(())
}

fn main() -> dehnscope::Result<()> {
    run_example()
}
