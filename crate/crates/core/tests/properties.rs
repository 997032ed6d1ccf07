use std::sync::Arc;

use proptest::prelude::*;

use oligo::cli::battery::single_relation;
use oligo::cli::{Certificate, SuiteConfig, Task};
use oligo::clones::{is_essentially_unary, FinOperation};
use oligo::encoding::{decode, encode, ep_define_check, find_npairs, GradedInnerSignature};
use oligo::groups::{catalogue, direct_product, find_isomorphism};
use oligo::partition::{en_reduct, kernel_check, preserves_labels, PartitionOracle};
use oligo::structures::{free_amalgam, is_embedding, is_partial_iso, qf_type, FinStructure, PartialMap};

fn structure(sig: Arc<oligo::structures::Signature>, size: usize, bits: &[bool]) -> FinStructure {
    let mut s = FinStructure::new(sig.clone(), size);
    let mut i = 0;
    for k in 0..sig.len() {
        let arity = sig.arity(k);
        for code in 0..size.pow(arity as u32) {
            let t: Vec<usize> = (0..arity).map(|p| code / size.pow(p as u32) % size).collect();
            if bits.get(i).copied().unwrap_or(false) {
                s.insert(k, t).expect("in range");
            }
            i += 1;
        }
    }
    s
}

fn graph(size: usize, bits: &[bool]) -> FinStructure {
    structure(single_relation("E", 2), size, bits)
}

fn inner_structure() -> impl Strategy<Value = FinStructure> {
    (0usize..=3, proptest::collection::vec(any::<bool>(), 21)).prop_map(|(size, bits)| {
        let inner = GradedInnerSignature::from_arities(&[1, 2, 2]).expect("signature");
        structure(inner.signature(), size, &bits)
    })
}

fn partition_member() -> impl Strategy<Value = FinStructure> {
    (0usize..=4, proptest::collection::vec(1usize..=2, 12)).prop_map(|(size, labels)| {
        let p = PartitionOracle::new(2);
        let mut next = labels.into_iter();
        p.from_labels(size, |t| if t.len() == 1 { 1 } else { next.next().unwrap_or(1) })
            .expect("labels in range")
    })
}

/// A partial injection of `0..size` drawn from a permutation and a domain mask.
fn partial_injection(size: usize, perm_seed: &[usize], mask: u8) -> PartialMap {
    let mut pool: Vec<usize> = (0..size).collect();
    let mut pairs = Vec::new();
    for (x, seed) in perm_seed.iter().enumerate().take(size) {
        let y = pool.remove(seed % pool.len());
        if mask >> x & 1 == 1 {
            pairs.push((x, y));
        }
    }
    PartialMap::from_pairs(pairs).expect("injective")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn free_amalgam_contains_both_sides(
        nb in 1usize..=3, nc in 1usize..=3,
        bb in proptest::collection::vec(any::<bool>(), 9),
        bc in proptest::collection::vec(any::<bool>(), 9),
    ) {
        let b = graph(nb, &bb);
        let c = graph(nc, &bc);
        // A is the one-point structure on element 0 of B, embedded into C at 0
        // when the loops agree.
        let a = b.induced(&[0]);
        let f = PartialMap::from_images(&[0]).unwrap();
        let g = PartialMap::from_images(&[0]).unwrap();
        prop_assume!(is_embedding(&g, &a, &c));
        let am = free_amalgam(&a, &b, &f, &c, &g).unwrap();
        prop_assert_eq!(am.structure.size(), nb + nc - 1);
        prop_assert!(is_embedding(&am.left, &b, &am.structure));
        prop_assert!(is_embedding(&am.right, &c, &am.structure));
        prop_assert_eq!(am.structure.tuple_count() + a.tuple_count(), b.tuple_count() + c.tuple_count());
    }

    #[test]
    fn types_are_invariant_under_relabelling(
        size in 1usize..=4,
        bits in proptest::collection::vec(any::<bool>(), 16),
        seed in proptest::collection::vec(0usize..4, 4),
    ) {
        let s = graph(size, &bits);
        let perm = partial_injection(size, &seed, 0xff);
        let map: Vec<usize> = (0..size).map(|x| perm.get(x).unwrap()).collect();
        let t = s.relabel(&map, size);
        let tuple: Vec<usize> = (0..size).collect();
        let image: Vec<usize> = tuple.iter().map(|&x| map[x]).collect();
        prop_assert_eq!(qf_type(&s, &tuple).unwrap(), qf_type(&t, &image).unwrap());
    }

    #[test]
    fn encoding_round_trips(s in inner_structure()) {
        let inner = GradedInnerSignature::from_arities(&[1, 2, 2]).unwrap();
        let e = encode(&s, &inner).unwrap();
        prop_assert_eq!(&decode(&e, &inner).unwrap(), &s);
        prop_assert_eq!(find_npairs(&e, &inner).unwrap().len(), s.tuple_count());
        for n in 1..=3 {
            prop_assert!(ep_define_check(&e, &inner, n).unwrap());
        }
    }

    #[test]
    fn kernel_is_label_preservation(
        s in partition_member(),
        seed in proptest::collection::vec(0usize..4, 4),
        mask in any::<u8>(),
    ) {
        let p = PartitionOracle::new(2);
        let f = partial_injection(s.size(), &seed, mask);
        let reduct = en_reduct(&p, &s).unwrap();
        prop_assume!(is_partial_iso(&f, &reduct, &reduct));
        prop_assert_eq!(kernel_check(&p, &s, &f).unwrap(), preserves_labels(&s, &f));
    }

    #[test]
    fn direct_products_commute(i in 0usize..42, j in 0usize..42) {
        let groups = catalogue();
        let (g, h) = (&groups[i].group, &groups[j].group);
        prop_assume!(g.order() * h.order() <= 32);
        let gh = direct_product(g, h);
        let hg = direct_product(h, g);
        prop_assert_eq!(gh.order(), g.order() * h.order());
        prop_assert!(find_isomorphism(&gh, &hg).is_some());
    }

    #[test]
    fn projections_are_a_right_identity(d in 2usize..=3, arity in 1usize..=2, seed in proptest::collection::vec(0usize..3, 9)) {
        let size = d.pow(arity as u32);
        let table: Vec<usize> = seed[..size].iter().map(|&v| v % d).collect();
        let f = FinOperation::new(d, arity, table).unwrap();
        let projections: Vec<FinOperation> = (0..arity).map(|i| FinOperation::projection(d, arity, i)).collect();
        prop_assert_eq!(&f.compose(&projections).unwrap(), &f);
        let unary = FinOperation::unary(d, &seed[..d].iter().map(|&v| v % d).collect::<Vec<_>>()).unwrap();
        let lifted = unary.compose(&[FinOperation::projection(d, arity, arity - 1)]).unwrap();
        prop_assert!(is_essentially_unary(&lifted).0);
    }

    #[test]
    fn certificates_survive_serialisation(grade in 1usize..=3, max_size in 0usize..=2) {
        let task = Task::KernelCheck(oligo::cli::battery::KernelParams { grade, max_size });
        let cert = Certificate::issue("kernel", task, &SuiteConfig::default(), Default::default()).unwrap();
        let text = cert.to_json().unwrap();
        let back: Certificate = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &cert);
        prop_assert_eq!(back.to_json().unwrap(), text);
    }
}
