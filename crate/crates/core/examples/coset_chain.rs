//! A chain of subgroups of Z_6 whose coset action recovers the central
//! subgroup as a stabiliser and the group as the limit of its quotients.

use oligo::groups::{
    build_chain, coset_action, cyclic, find_isomorphism, quotient_tower, stabilizer_of_union, truncated_limit,
    DEFAULT_ORDER_CAP,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = cyclic(6);
    let f = vec![0, 3];
    let chain = build_chain(&g, &f, &[vec![0]], &[0])?;
    let stabilizer = stabilizer_of_union(&coset_action(&g, &chain, 1), &chain, 1)?;
    let kernel = stabilizer_of_union(&coset_action(&g, &chain, 0), &chain, 0)?;
    let (system, _) = quotient_tower(&g, &chain)?;
    let limit = truncated_limit(&system, DEFAULT_ORDER_CAP)?;
    println!("levels: {}", chain.len());
    println!("stabilizer from level 1: {stabilizer:?} (F = {f:?})");
    println!("kernel from level 0: {kernel:?}");
    println!(
        "truncated limit of order {} isomorphic to G: {}",
        limit.group.order(),
        find_isomorphism(&g, &limit.group).is_some()
    );
    Ok(())
}
