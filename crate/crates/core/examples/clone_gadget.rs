//! Polymorphisms of the rigid gadget are essentially unary.

use oligo::clones::{is_essentially_unary, polymorphisms, r_gadget, DEFAULT_POLY_CAP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (d, k) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)] {
        let polys = polymorphisms(&r_gadget(d), k, DEFAULT_POLY_CAP)?;
        let unary = polys.iter().filter(|f| is_essentially_unary(f).0).count();
        println!("domain {d}, arity {k}: {} polymorphisms, {unary} essentially unary", polys.len());
    }
    Ok(())
}
