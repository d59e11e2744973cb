//! Log-space factor operations on the three-variable triangle.

use costshift::lp::pairwise_match;
use costshift::Factor;

fn main() -> costshift::Result<()> {
    let f12 = Factor::new(vec![0, 1], vec![2, 2], vec![0.0, 1.0, 2.0, 0.0])?;
    let f13 = Factor::new(vec![0, 2], vec![2, 2], vec![3.0, 0.0, 0.0, 2.0])?;

    let joint = f12.combine(&f13)?;
    println!("f12 + f13 over {:?}: {:?}", joint.scope(), joint.values());
    println!("max out X1: {:?}", joint.max_eliminate(0)?.values());
    println!(
        "max-marginal of f12 on X1: {:?}",
        f12.max_marginal(&[0])?.values()
    );

    let (a, b) = pairwise_match(&f12, &f13)?;
    println!(
        "after matching on X1: {:?} and {:?}",
        a.values(),
        b.values()
    );
    println!(
        "sum of maxima {} -> {}",
        f12.max_value() + f13.max_value(),
        a.max_value() + b.max_value()
    );
    Ok(())
}
