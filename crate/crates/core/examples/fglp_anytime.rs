//! FGLP on a grid, with the anytime bound trace written to stdout as CSV.

use std::time::Duration;

use costshift::elimination::bucket_elimination;
use costshift::generate::grid_model;
use costshift::lp::{fglp, StopRule};
use costshift::ordering::min_fill_order;
use costshift::uai::write_trace_csv;

fn main() -> costshift::Result<()> {
    let m = grid_model(6, 6, 2, 5);
    let exact = bucket_elimination(&m, &min_fill_order(&m, 42))?.value;
    let stop = StopRule::time(Duration::from_secs(2)).with_sweeps(200);
    let r = fglp(&m, &stop)?;
    eprintln!(
        "exact {exact:.6}, bound {:.6} after {} sweeps ({:?})",
        r.bound(),
        r.run.sweeps,
        r.run.reason
    );
    write_trace_csv(std::io::stdout().lock(), "bound_ln", r.run.trace.pairs())
}
