// Reducing raw gluing data and completing it to an Sp(4, Z) frame.
//
//     cargo run --example symplectic_frame

use dehnscope::gluing::{reduce, RawGluingData};
use dehnscope::symplectic::{complete, verify};

pub fn run_example() -> dehnscope::Result<()> {
    let raw = RawGluingData {
        k: 2,
        m: vec![1, 0],
        mp: vec![0, -1],
        mpp: vec![0, 0],
        l: vec![0, 0],
        lp: vec![0, -2],
        lpp: vec![0, 2],
        f: vec![vec![0, 1]],
        fp: vec![vec![1, 2]],
        fpp: vec![vec![2, 0]],
    };
    let data = reduce(&raw, "4_1")?;
    println!("A = {:?}\nB = {:?}\nC = {:?}\nD = {:?}", data.a, data.b, data.c, data.d);
    println!("nu = {:?}, 2nu_3 = {}", data.nu, data.two_nu_last);

    let frame = complete(&data)?;
    assert!(verify(&frame.g));
    println!("G:");
    for row in &frame.g {
        println!("  {row:?}");
    }
    println!("G^-1:");
    for row in frame.inverse() {
        println!("  {row:?}");
    }
    Ok(())
}

fn main() -> dehnscope::Result<()> {
    run_example()
}
