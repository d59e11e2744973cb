//! The mini-bucket join graph of a grid and its JGLP tightening.

use costshift::elimination::{join_graph_structuring, mini_bucket_elim, EdgeKind};
use costshift::generate::grid_model;
use costshift::lp::{jglp, StopRule};
use costshift::ordering::min_fill_order;

fn main() -> costshift::Result<()> {
    let m = grid_model(4, 4, 2, 9);
    let o = min_fill_order(&m, 42);
    let z = 2;
    let jg = join_graph_structuring(&m, &o, z)?;
    println!("{} clusters, {} edges", jg.clusters.len(), jg.edges.len());
    for e in &jg.edges {
        let kind = match e.kind {
            EdgeKind::Parent => "parent",
            EdgeKind::Chain => "chain",
        };
        println!(
            "  {:?} -> {:?} on {:?} ({kind})",
            jg.clusters[e.a].scope, jg.clusters[e.b].scope, e.separator
        );
    }
    println!("running intersection: {}", jg.has_running_intersection());

    let mbe = mini_bucket_elim(&m, &o, z)?.bound;
    let before = jg.decomposition_bound();
    let r = jglp(jg, &StopRule::sweeps(1000).with_eps(1e-9))?;
    let (tree, _) = r.graph.tree_pass()?;
    println!("mbe {mbe:.6}, cluster maxima {before:.6}");
    println!(
        "jglp {:.6} after {} sweeps, tree pass {tree:.6}",
        r.bound(),
        r.run.sweeps
    );
    Ok(())
}
