//! Encodes a structure with a unary and two binary relations into the fixed
//! six-symbol language, lists its n-pairs, and decodes it back.

use oligo::encoding::{decode, encode, ep_define_check, find_npairs, GradedInnerSignature};
use oligo::structures::FinStructure;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inner = GradedInnerSignature::from_arities(&[1, 2, 2])?;
    let mut s = FinStructure::new(inner.signature(), 3);
    s.insert(0, vec![0])?;
    s.insert(1, vec![0, 1])?;
    s.insert(2, vec![2, 2])?;
    let e = encode(&s, &inner)?;
    println!("{} points encode into {} elements", s.size(), e.size());
    for pair in find_npairs(&e, &inner)? {
        println!("  {}-pair on cycle {:?} labels {:?}", pair.n, pair.cycle, pair.labels);
    }
    for sym in inner.symbols() {
        println!("  R_{} existential-positive definable: {}", sym.n, ep_define_check(&e, &inner, sym.n)?);
    }
    println!("round trip: {}", decode(&e, &inner)? == s);
    Ok(())
}
