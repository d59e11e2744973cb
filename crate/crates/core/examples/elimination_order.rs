//! Min-fill orders, induced width and the pseudo tree of a grid.

use costshift::generate::grid_model;
use costshift::ordering::{build_pseudo_tree, min_fill_order, min_fill_restarts, primal_graph};

fn main() {
    let m = grid_model(4, 4, 2, 3);
    println!("primal graph: {} edges", primal_graph(&m).num_edges());
    for seed in 0..3 {
        let o = min_fill_order(&m, seed);
        println!("seed {seed}: width {} order {o}", o.width());
    }
    let o = min_fill_restarts(&m, 0, 20);
    println!("best of 20 restarts: width {}", o.width());

    let pt = build_pseudo_tree(&m, &o);
    for &r in pt.roots() {
        print_subtree(&pt, r, 0);
    }
}

fn print_subtree(pt: &costshift::ordering::PseudoTree, v: usize, indent: usize) {
    println!("{:indent$}X{v}", "", indent = indent * 2);
    for &c in pt.children(v) {
        print_subtree(pt, c, indent + 1);
    }
}
