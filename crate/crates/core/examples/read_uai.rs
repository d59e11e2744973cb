//! Parses a UAI model (and optional evidence), prints a summary and writes
//! the model back out.
//!
//! `cargo run --example read_uai -- model.uai [model.uai.evid]`

use std::fs;

use costshift::uai::{condition, parse_evidence_for, parse_uai, write_uai};

const TRIANGLE: &str = "MARKOV
3
2 2 2
3
2 0 1
2 1 2
2 0 2

4
 1 2.718281828459045 7.38905609893065 1

4
 1 20.085536923187668 2.718281828459045 1

4
 20.085536923187668 1 1 7.38905609893065
";

fn main() -> costshift::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let text = match args.first() {
        Some(p) => fs::read_to_string(p)?,
        None => TRIANGLE.to_string(),
    };
    let mut m = parse_uai(&text)?;
    if let Some(p) = args.get(1) {
        let e = parse_evidence_for(&fs::read_to_string(p)?, &m)?;
        m = condition(&m, &e)?;
        eprintln!("conditioned on {} observed variables", e.len());
    }
    eprintln!(
        "{} variables, {} factors, max arity {}, max domain {}",
        m.num_vars(),
        m.factors().len(),
        m.max_arity(),
        m.max_card()
    );
    print!("{}", write_uai(&m));
    Ok(())
}
