//! Computes the order of a commutator image in a class-6 nilpotent
//! quotient. Run with `cargo run --example torsion_element`.

use comrel::lcs::{element_order, ElementOrder};
use comrel::nq::{nilpotent_quotient, parse_presentation, Budget};
use comrel::words::parse_word;

fn main() -> comrel::Result<()> {
    let p = parse_presentation("gens: a, t\nrel: [a,t,t]\nrel: [a,t,a,a,a]\n")?;
    let np = nilpotent_quotient(&p, 6, &Budget::default())?;
    let w = parse_word("[a,t,a,a,t,a]", p.alphabet())?;
    let order = element_order(&np, &w)?;
    assert_eq!(order, ElementOrder::Finite(2u32.into()));
    println!("order of {w} at class 6: {order}");
    Ok(())
}
