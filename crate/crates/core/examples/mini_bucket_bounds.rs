//! Exact value against MBE and MBE-MM bounds as the z-bound grows.

use costshift::elimination::{bucket_elimination, mbe_mm, mini_bucket_elim};
use costshift::generate::grid_model;
use costshift::ordering::min_fill_order;

fn main() -> costshift::Result<()> {
    let m = grid_model(5, 5, 3, 11);
    let o = min_fill_order(&m, 42);
    let exact = bucket_elimination(&m, &o)?;
    println!("width {}, exact {:.6}", o.width(), exact.value);
    println!("argmax {}", exact.assignment);
    println!("{:>3} {:>12} {:>12}", "z", "mbe", "mbe-mm");
    for z in 1..=o.width() {
        let a = mini_bucket_elim(&m, &o, z)?.bound;
        let b = mbe_mm(&m, &o, z)?.bound;
        println!("{z:>3} {a:>12.6} {b:>12.6}");
    }
    Ok(())
}
