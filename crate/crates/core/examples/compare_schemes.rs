//! Bound table over random grids, like the `compare` subcommand.

use costshift::elimination::{
    bucket_elimination, join_graph_structuring, mbe_mm, mini_bucket_elim,
};
use costshift::generate::grid_model;
use costshift::lp::{fglp, fglp_then_mbe, jglp, StopRule};
use costshift::ordering::min_fill_order;

fn main() -> costshift::Result<()> {
    let stop = StopRule::sweeps(500).with_eps(1e-8);
    println!("grid,seed,z,exact,mbe,mbe-mm,fglp,fglp+mbe,jglp");
    for seed in 0..4 {
        let m = grid_model(5, 5, 2, seed);
        let o = min_fill_order(&m, 42);
        let exact = bucket_elimination(&m, &o)?.value;
        let f = fglp(&m, &stop)?.bound();
        for z in [1, 2] {
            let row = [
                exact,
                mini_bucket_elim(&m, &o, z)?.bound,
                mbe_mm(&m, &o, z)?.bound,
                f,
                fglp_then_mbe(&m, &o, z, &stop)?.bound,
                jglp(join_graph_structuring(&m, &o, z)?, &stop)?.bound(),
            ];
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.4}")).collect();
            println!("5x5,{seed},{z},{}", cells.join(","));
        }
    }
    Ok(())
}
