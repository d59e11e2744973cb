//! AND/OR branch and bound on a grid under each heuristic scheme.

use costshift::elimination::bucket_elimination;
use costshift::generate::grid_model;
use costshift::lp::StopRule;
use costshift::ordering::min_fill_order;
use costshift::search::{aobb, build_heuristic, Scheme};

fn main() -> costshift::Result<()> {
    let m = grid_model(5, 5, 2, 21);
    let o = min_fill_order(&m, 42);
    let exact = bucket_elimination(&m, &o)?.value;
    println!("width {}, exact {exact:.6}", o.width());
    let stop = StopRule::sweeps(200).with_eps(1e-9);
    for z in [1, 2, 3] {
        for scheme in Scheme::ALL {
            let h = build_heuristic(&m, &o, z, scheme, &stop)?;
            let r = aobb(&m, &h, None)?;
            println!(
                "z={z} {scheme:<9} root bound {:>10.6}  value {:>10.6}  nodes {:>7}",
                h.root_bound(),
                r.value,
                r.stats.nodes
            );
        }
    }
    Ok(())
}
