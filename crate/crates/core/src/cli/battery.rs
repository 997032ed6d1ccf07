//! Exhaustive checks over small instances. Each returns a witness and a
//! verdict; witnesses depend only on the parameters, never on scheduling.

use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CliError, Outcome};
use crate::clones::{
    check_clone_homomorphism, extend_monoid_iso, is_essentially_unary, polymorphisms, r_gadget, CloneHandle, FinOperation,
    FunctionMonoid, HomReport,
};
use crate::encoding::{
    class_membership, decode, encode, ep_define_check, free_amalgam_membership, AmalgamReport, GradedInnerSignature, PaddedClass,
};
use crate::fraisse::{
    age_types, canonical_form, check_ap, check_hp, check_jep, count_orbits, saturate, Axiom, AxiomReport, ClassOracle,
    FreeClass, LimitApprox, LinearOrders, NoIsolatedVertex, OrbitCount, RandomGraph, DEFAULT_ENUM_CAP,
};
use crate::groups::{
    build_chain, catalogue, coset_action, extra_groups, find_isomorphism, quotient_tower, stabilizer_of_union,
    truncated_limit, verify_splitting, FinGroup, GroupSpec, SplittingReport,
};
use crate::partition::{
    en_reduct, kernel_check, mixing_witness, preserves_labels, realize_class_permutation, ClassAction, EnReductOracle,
    MixingWitness, PartitionOracle, RealizeCertificate,
};
use crate::structures::{
    are_isomorphic, find_embeddings, is_injective, is_partial_iso, qf_type, FinStructure, PartialMap, Signature, Symbol,
};

fn outcome<W: Serialize>(witness: &W, verdict: bool) -> Result<Outcome, CliError> {
    Ok(Outcome {
        witness: serde_json::to_value(witness)?,
        verdict,
    })
}

fn digest<T: Serialize>(items: &T) -> Result<String, CliError> {
    Ok(hex::encode(Sha256::digest(serde_json::to_vec(items)?)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum ClassSpec {
    Partition { grade: usize },
    EnReduct { grade: usize },
    PaddedPartition { grade: usize },
    RandomGraph,
    LinearOrders,
    NoIsolatedVertex,
}

impl ClassSpec {
    pub fn build(&self) -> Result<Box<dyn ClassOracle>, CliError> {
        Ok(match *self {
            ClassSpec::Partition { grade } => Box::new(PartitionOracle::new(grade)),
            ClassSpec::EnReduct { grade } => Box::new(EnReductOracle::new(grade)),
            ClassSpec::PaddedPartition { grade } => Box::new(PaddedClass::new(PartitionOracle::new(grade))?),
            ClassSpec::RandomGraph => Box::new(RandomGraph::new()),
            ClassSpec::LinearOrders => Box::new(LinearOrders::new()),
            ClassSpec::NoIsolatedVertex => Box::new(NoIsolatedVertex::new()),
        })
    }

    pub fn parse(name: &str, grade: usize) -> Result<Self, CliError> {
        Ok(match name {
            "partition" => ClassSpec::Partition { grade },
            "en-reduct" => ClassSpec::EnReduct { grade },
            "padded-partition" => ClassSpec::PaddedPartition { grade },
            "random-graph" => ClassSpec::RandomGraph,
            "linear-orders" => ClassSpec::LinearOrders,
            "no-isolated-vertex" => ClassSpec::NoIsolatedVertex,
            other => return Err(CliError::Input(format!("unknown class {other}"))),
        })
    }
}

// ---------------------------------------------------------------- axioms

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomParams {
    pub class: ClassSpec,
    pub axiom: Axiom,
    pub bound: usize,
    /// Whether the axiom is expected to hold.
    pub expect: bool,
}

pub fn axiom(p: &AxiomParams) -> Result<Outcome, CliError> {
    let oracle = p.class.build()?;
    let report: AxiomReport = match p.axiom {
        Axiom::Hp => check_hp(oracle.as_ref(), p.bound)?,
        Axiom::Jep => check_jep(oracle.as_ref(), p.bound)?,
        Axiom::Ap => check_ap(oracle.as_ref(), p.bound)?,
    };
    let verdict = report.pass == p.expect && report.disagreements == 0;
    outcome(&report, verdict)
}

// ---------------------------------------------------------------- saturation and orbits

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturateParams {
    pub class: ClassSpec,
    pub k: usize,
    pub rounds: usize,
}

#[derive(Serialize)]
struct SaturateWitness {
    size: usize,
    replays: bool,
    approx: LimitApprox,
}

fn saturated(oracle: &dyn ClassOracle, k: usize, rounds: usize) -> Result<LimitApprox, CliError> {
    let mut approx = LimitApprox::new(oracle);
    saturate(oracle, &mut approx, k, rounds)?;
    Ok(approx)
}

pub fn saturate_task(p: &SaturateParams) -> Result<Outcome, CliError> {
    let oracle = p.class.build()?;
    let approx = saturated(oracle.as_ref(), p.k, p.rounds)?;
    let replays = approx.replays(oracle.as_ref())?;
    outcome(
        &SaturateWitness {
            size: approx.size(),
            replays,
            approx,
        },
        replays,
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitParams {
    pub class: ClassSpec,
    pub k: usize,
    pub rounds: usize,
    pub expect: Option<usize>,
}

#[derive(Serialize)]
struct OrbitWitness {
    /// Types found in the age directly, before any saturation.
    age_types: usize,
    approx_size: usize,
    orbits: OrbitCount,
}

pub fn orbits(p: &OrbitParams) -> Result<Outcome, CliError> {
    let oracle = p.class.build()?;
    let age = age_types(oracle.as_ref(), p.k, DEFAULT_ENUM_CAP)?.len();
    let approx = saturated(oracle.as_ref(), p.k.max(1), p.rounds)?;
    let orbits = count_orbits(oracle.as_ref(), &approx, p.k)?;
    let verdict = orbits.count == age && p.expect.is_none_or(|e| e == orbits.count);
    outcome(
        &OrbitWitness {
            age_types: age,
            approx_size: approx.size(),
            orbits,
        },
        verdict,
    )
}

// ---------------------------------------------------------------- partition class

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizeParams {
    pub grade: usize,
    pub sigma: ClassAction,
    pub depth: usize,
}

#[derive(Serialize)]
struct RealizeWitness {
    approx_size: usize,
    replay_verified: bool,
    certificate: RealizeCertificate,
}

pub fn realize(p: &RealizeParams) -> Result<Outcome, CliError> {
    let oracle = PartitionOracle::new(p.grade);
    let (approx, certificate) = realize_class_permutation(&oracle, &p.sigma, p.depth)?;
    let replay_verified = certificate.verify()?;
    let verdict = certificate.verdict && replay_verified;
    outcome(
        &RealizeWitness {
            approx_size: approx.size(),
            replay_verified,
            certificate,
        },
        verdict,
    )
}

/// Every partition member on `size` points: each injective tuple of length
/// `n <= grade` gets one of the labels `1..=n`.
pub fn labelled_members(oracle: &PartitionOracle, size: usize) -> Result<Vec<FinStructure>, CliError> {
    let tuples: Vec<Vec<usize>> = (2..=oracle.grade()).flat_map(|n| (0..size).permutations(n)).collect();
    let radices: Vec<usize> = tuples.iter().map(Vec::len).collect();
    let index: BTreeMap<&[usize], usize> = tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let mut digits = vec![0usize; tuples.len()];
    let mut out = Vec::new();
    loop {
        out.push(oracle.from_labels(size, |t| if t.len() == 1 { 1 } else { digits[index[t]] + 1 })?);
        let mut carry = true;
        for (d, &r) in digits.iter_mut().zip(&radices).rev() {
            *d += 1;
            if *d < r {
                carry = false;
                break;
            }
            *d = 0;
        }
        if carry {
            return Ok(out);
        }
    }
}

/// Every partial injection of `0..size` into itself.
pub fn partial_injections(size: usize) -> Vec<PartialMap> {
    let mut out = Vec::new();
    for domain in (0..size).powerset() {
        for image in (0..size).permutations(domain.len()) {
            out.push(PartialMap::from_pairs(domain.iter().copied().zip(image)).expect("injective"));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelParams {
    pub grade: usize,
    pub max_size: usize,
}

#[derive(Serialize)]
struct KernelCounterexample {
    structure: FinStructure,
    map: PartialMap,
    kernel: Option<bool>,
    preserves: bool,
}

#[derive(Serialize)]
struct KernelWitness {
    members: usize,
    /// Partial isomorphisms of the reducts checked.
    instances: usize,
    in_kernel: usize,
    agreements: usize,
    counterexample: Option<KernelCounterexample>,
}

pub fn kernel(p: &KernelParams) -> Result<Outcome, CliError> {
    let oracle = PartitionOracle::new(p.grade);
    let mut w = KernelWitness {
        members: 0,
        instances: 0,
        in_kernel: 0,
        agreements: 0,
        counterexample: None,
    };
    for size in 0..=p.max_size {
        let maps = partial_injections(size);
        for s in labelled_members(&oracle, size)? {
            w.members += 1;
            let reduct = en_reduct(&oracle, &s)?;
            for f in maps.iter().filter(|f| is_partial_iso(f, &reduct, &reduct)) {
                w.instances += 1;
                let k = kernel_check(&oracle, &s, f).ok();
                let preserves = preserves_labels(&s, f);
                w.in_kernel += usize::from(k == Some(true));
                if k == Some(preserves) {
                    w.agreements += 1;
                } else if w.counterexample.is_none() {
                    w.counterexample = Some(KernelCounterexample {
                        structure: s.clone(),
                        map: f.clone(),
                        kernel: k,
                        preserves,
                    });
                }
            }
        }
    }
    let verdict = w.agreements == w.instances;
    outcome(&w, verdict)
}

/// Triples `(y, a, b)` of `m`-tuples in `s` accepted by `mixing_witness`:
/// equal types, `(y, a)` injective, shared entries of `a` and `b` aligned.
pub fn compatible_triples(s: &FinStructure, m: usize) -> Result<Vec<[Vec<usize>; 3]>, CliError> {
    let mut by_type: BTreeMap<_, Vec<Vec<usize>>> = BTreeMap::new();
    for t in (0..s.size()).permutations(m) {
        by_type.entry(qf_type(s, &t)?).or_default().push(t);
    }
    let mut out = Vec::new();
    for class in by_type.values() {
        for y in class {
            for a in class.iter().filter(|a| is_injective(&[y.as_slice(), a].concat())) {
                for b in class {
                    let aligned = a.iter().enumerate().all(|(i, x)| b.iter().position(|e| e == x).is_none_or(|j| j == i));
                    if aligned {
                        out.push([y.clone(), a.clone(), b.clone()]);
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixingParams {
    pub grade: usize,
    /// Saturation rounds on pairs.
    pub depth: usize,
    pub max_len: usize,
}

#[derive(Serialize)]
struct MixingFailure {
    y: Vec<usize>,
    a: Vec<usize>,
    b: Vec<usize>,
    error: String,
}

#[derive(Serialize)]
struct MixingBatteryWitness {
    approx_size: usize,
    triples: usize,
    verified: usize,
    /// Digest of the list of witnesses, in enumeration order.
    witnesses_sha256: String,
    failure: Option<MixingFailure>,
}

fn check_triple(oracle: &PartitionOracle, approx: &LimitApprox, y: &[usize], a: &[usize], b: &[usize]) -> Result<MixingWitness, String> {
    let mut local = approx.clone();
    let w = mixing_witness(oracle, &mut local, y, a, b).map_err(|e| e.to_string())?;
    if !w.holds_in(&local.current) {
        return Err("type equalities fail in the extended approximation".into());
    }
    if !local.replays(oracle).map_err(|e| e.to_string())? {
        return Err("construction log does not replay".into());
    }
    Ok(w)
}

pub fn mixing_battery(p: &MixingParams) -> Result<Outcome, CliError> {
    let oracle = PartitionOracle::new(p.grade);
    let approx = saturated(&oracle, 2, p.depth)?;
    let mut triples = Vec::new();
    for m in 1..=p.max_len {
        triples.extend(compatible_triples(&approx.current, m)?);
    }
    let results: Vec<Result<MixingWitness, String>> =
        triples.par_iter().map(|[y, a, b]| check_triple(&oracle, &approx, y, a, b)).collect();
    let verified = results.iter().filter(|r| r.is_ok()).count();
    let failure = triples.iter().zip(&results).find_map(|([y, a, b], r)| {
        r.as_ref().err().map(|error| MixingFailure {
            y: y.clone(),
            a: a.clone(),
            b: b.clone(),
            error: error.clone(),
        })
    });
    let witnesses: Vec<&MixingWitness> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    let w = MixingBatteryWitness {
        approx_size: approx.size(),
        triples: triples.len(),
        verified,
        witnesses_sha256: digest(&witnesses)?,
        failure,
    };
    let verdict = w.verified == w.triples && w.triples > 0;
    outcome(&w, verdict)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixingInstanceParams {
    pub grade: usize,
    pub depth: usize,
    pub y: Vec<usize>,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

pub fn mixing_instance(p: &MixingInstanceParams) -> Result<Outcome, CliError> {
    let oracle = PartitionOracle::new(p.grade);
    let approx = saturated(&oracle, 2, p.depth)?;
    match check_triple(&oracle, &approx, &p.y, &p.a, &p.b) {
        Ok(w) => outcome(&w, true),
        Err(e) => Err(CliError::Input(e)),
    }
}

// ---------------------------------------------------------------- encoding

/// Every structure on `size` points over `signature` up to isomorphism, as
/// the least fact bitmask in its orbit under permutations of the points.
pub fn structures_up_to_iso(signature: &Arc<Signature>, size: usize) -> Vec<FinStructure> {
    let cells: Vec<(usize, Vec<usize>)> = (0..signature.len())
        .flat_map(|k| {
            (0..signature.arity(k))
                .map(|_| 0..size)
                .multi_cartesian_product()
                .map(move |t| (k, t))
        })
        .collect();
    assert!(cells.len() < 64, "too many cells for a bitmask");
    let position: BTreeMap<&(usize, Vec<usize>), usize> = cells.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let perms: Vec<Vec<usize>> = (0..size)
        .permutations(size)
        .filter(|p| p.iter().enumerate().any(|(i, &x)| i != x))
        .map(|p| {
            cells
                .iter()
                .map(|(k, t)| position[&(*k, t.iter().map(|&e| p[e]).collect::<Vec<_>>())])
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << cells.len()) {
        let least = perms.iter().all(|p| {
            let mut image = 0u64;
            let mut rest = mask;
            while rest != 0 {
                let bit = rest.trailing_zeros() as usize;
                image |= 1 << p[bit];
                rest &= rest - 1;
            }
            image >= mask
        });
        if least {
            let facts = cells.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, c)| c.clone());
            out.push(FinStructure::from_tuples(Arc::clone(signature), size, facts).expect("cells in range"));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTripParams {
    /// Raw arities, padded to indices `n` in order.
    pub arities: Vec<usize>,
    pub max_size: usize,
}

#[derive(Serialize)]
struct RoundTripFailure {
    structure: FinStructure,
    reason: String,
}

#[derive(Serialize)]
struct RoundTripWitness {
    inner: GradedInnerSignature,
    /// Structures per size, up to isomorphism.
    structures: Vec<usize>,
    round_trips: usize,
    members: usize,
    /// Passing `(structure, n)` definability checks.
    ep_checks: usize,
    largest_encoding: usize,
    failure: Option<RoundTripFailure>,
}

fn round_trip_one(s: &FinStructure, inner: &GradedInnerSignature, oracle: &dyn ClassOracle) -> Result<usize, String> {
    let e = encode(s, inner).map_err(|e| format!("encode: {e}"))?;
    let back = decode(&e, inner).map_err(|e| format!("decode: {e}"))?;
    if back != *s {
        return Err(format!("decoded to {}", back.to_json()));
    }
    let report = class_membership(&e, inner, oracle);
    if !report.pass {
        return Err(format!("membership: {report:?}"));
    }
    for sym in inner.symbols() {
        if !ep_define_check(&e, inner, sym.n).map_err(|e| format!("R_{}: {e}", sym.n))? {
            return Err(format!("R_{} differs from its definition", sym.n));
        }
    }
    Ok(e.size())
}

fn round_trips(
    structures: &[FinStructure],
    inner: &GradedInnerSignature,
    oracle: &dyn ClassOracle,
    w: &mut RoundTripWitness,
) {
    let results: Vec<Result<usize, String>> = structures.par_iter().map(|s| round_trip_one(s, inner, oracle)).collect();
    for (s, r) in structures.iter().zip(results) {
        match r {
            Ok(size) => {
                w.round_trips += 1;
                w.members += 1;
                w.ep_checks += inner.symbols().len();
                w.largest_encoding = w.largest_encoding.max(size);
            }
            Err(reason) if w.failure.is_none() => {
                w.failure = Some(RoundTripFailure {
                    structure: s.clone(),
                    reason,
                })
            }
            Err(_) => {}
        }
    }
}

pub fn round_trip(p: &RoundTripParams) -> Result<Outcome, CliError> {
    let inner = GradedInnerSignature::from_arities(&p.arities)?;
    let oracle = FreeClass::new(inner.signature());
    let mut w = RoundTripWitness {
        inner: inner.clone(),
        structures: Vec::new(),
        round_trips: 0,
        members: 0,
        ep_checks: 0,
        largest_encoding: 0,
        failure: None,
    };
    for size in 0..=p.max_size {
        let structures = structures_up_to_iso(&inner.signature(), size);
        w.structures.push(structures.len());
        round_trips(&structures, &inner, &oracle, &mut w);
    }
    let total: usize = w.structures.iter().sum();
    let verdict = w.failure.is_none() && w.round_trips == total;
    outcome(&w, verdict)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaddedRoundTripParams {
    pub grade: usize,
    pub max_size: usize,
}

pub fn padded_round_trip(p: &PaddedRoundTripParams) -> Result<Outcome, CliError> {
    let raw = PartitionOracle::new(p.grade);
    let padded = PaddedClass::new(raw.clone())?;
    let inner = padded.inner().clone();
    let mut w = RoundTripWitness {
        inner: inner.clone(),
        structures: Vec::new(),
        round_trips: 0,
        members: 0,
        ep_checks: 0,
        largest_encoding: 0,
        failure: None,
    };
    for size in 0..=p.max_size {
        let structures: Vec<FinStructure> = labelled_members(&raw, size)?
            .iter()
            .map(|s| inner.translate(s))
            .collect::<Result<_, _>>()?;
        w.structures.push(structures.len());
        round_trips(&structures, &inner, &padded, &mut w);
    }
    let total: usize = w.structures.iter().sum();
    let verdict = w.failure.is_none() && w.round_trips == total;
    outcome(&w, verdict)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamBatteryParams {
    pub arities: Vec<usize>,
    /// Largest encoded size.
    pub max_elems: usize,
}

/// Inner structures with at most one fact whose encodings have at most
/// `max_elems` elements, up to isomorphism.
pub fn one_fact_structures(inner: &GradedInnerSignature, max_elems: usize) -> Vec<FinStructure> {
    let sig = inner.signature();
    let mut out = Vec::new();
    for m in 0..=max_elems {
        out.push(FinStructure::new(Arc::clone(&sig), m));
        let mut seen = Vec::new();
        for (k, sym) in inner.symbols().iter().enumerate() {
            if m + sym.n > max_elems || m == 0 {
                continue;
            }
            for t in (0..sym.arity).map(|_| 0..m).multi_cartesian_product() {
                let s = FinStructure::from_tuples(Arc::clone(&sig), m, [(k, t)]).expect("in range");
                let c = canonical_form(&s);
                if !seen.contains(&c) {
                    seen.push(c);
                }
            }
        }
        out.extend(seen);
    }
    out
}

#[derive(Serialize)]
struct AmalgamFailure {
    a: FinStructure,
    b: FinStructure,
    c: FinStructure,
    f: PartialMap,
    g: PartialMap,
    reason: String,
}

#[derive(Serialize)]
struct AmalgamBatteryWitness {
    inner_structures: usize,
    /// Subsets of an encoding that are not class members.
    skipped_subsets: usize,
    /// Every instance: `A` an induced member of `enc(B)`, `g` any embedding.
    instances: usize,
    /// Instances whose base `A` is itself an encoding.
    encoded_base_instances: usize,
    encoded_base_passed: usize,
    completions: usize,
    /// Instances with an n-pair spanning the two sides.
    spanning: usize,
    /// Instances with a spanning n-pair labelling a tuple nothing else labels.
    spanning_new: usize,
    /// Instances whose amalgam is not a class member.
    non_members: usize,
    errors: usize,
    /// First instance with an encoded base that fails, if any.
    failure: Option<AmalgamFailure>,
    /// First instance with a spanning n-pair, if any.
    first_spanning: Option<AmalgamFailure>,
}

/// Free amalgams of encoded structures with at most one inner fact each.
///
/// `A` ranges over the induced class members of `enc(B)` and `g` over all
/// embeddings of `A` into `enc(C)`. The verdict asks that every instance
/// whose base is itself an encoding passes outright, and that across all
/// instances the amalgam is a member and no spanning n-pair labels a new
/// tuple.
pub fn amalgam_battery(p: &AmalgamBatteryParams) -> Result<Outcome, CliError> {
    let inner = GradedInnerSignature::from_arities(&p.arities)?;
    let oracle = FreeClass::new(inner.signature());
    let encoded: Vec<FinStructure> = one_fact_structures(&inner, p.max_elems)
        .iter()
        .map(|s| encode(s, &inner))
        .collect::<Result<_, _>>()?;
    let encoded: Vec<FinStructure> = encoded.into_iter().filter(|e| e.size() <= p.max_elems).collect();
    let mut instances = Vec::new();
    let mut skipped = 0;
    for eb in &encoded {
        for subset in (0..eb.size()).powerset() {
            let a = eb.induced(&subset);
            if !class_membership(&a, &inner, &oracle).pass {
                skipped += 1;
                continue;
            }
            let encoded_base = match decode(&a, &inner) {
                Ok(d) => are_isomorphic(&encode(&d, &inner)?, &a)?.is_some(),
                Err(_) => false,
            };
            let f = PartialMap::from_images(&subset)?;
            for ec in &encoded {
                for g in find_embeddings(&a, ec, None)? {
                    instances.push((a.clone(), eb, f.clone(), ec, g, encoded_base));
                }
            }
        }
    }
    let results: Vec<Result<AmalgamReport, String>> = instances
        .par_iter()
        .map(|(a, b, f, c, g, _)| free_amalgam_membership(a, b, f, c, g, &inner, &oracle).map_err(|e| e.to_string()))
        .collect();
    let mut w = AmalgamBatteryWitness {
        inner_structures: encoded.len(),
        skipped_subsets: skipped,
        instances: instances.len(),
        encoded_base_instances: 0,
        encoded_base_passed: 0,
        completions: 0,
        spanning: 0,
        spanning_new: 0,
        non_members: 0,
        errors: 0,
        failure: None,
        first_spanning: None,
    };
    for ((a, b, f, c, g, encoded_base), r) in instances.iter().zip(results) {
        let record = |reason: String| AmalgamFailure {
            a: a.clone(),
            b: (*b).clone(),
            c: (*c).clone(),
            f: f.clone(),
            g: g.clone(),
            reason,
        };
        w.encoded_base_instances += usize::from(*encoded_base);
        let r = match r {
            Ok(r) => r,
            Err(e) => {
                w.errors += 1;
                if w.failure.is_none() {
                    w.failure = Some(record(e));
                }
                continue;
            }
        };
        w.completions += usize::from(!r.completion.is_empty());
        w.spanning += usize::from(!r.spanning.is_empty());
        w.spanning_new += usize::from(!r.spanning_new.is_empty());
        w.non_members += usize::from(!r.membership.pass);
        let reason = || {
            format!(
                "member = {}, spanning n-pairs = {:?}",
                r.membership.pass,
                r.spanning.iter().map(|p| (p.n, &p.cycle, &p.labels)).collect::<Vec<_>>()
            )
        };
        if !r.spanning.is_empty() && w.first_spanning.is_none() {
            w.first_spanning = Some(record(reason()));
        }
        if *encoded_base {
            if r.pass {
                w.encoded_base_passed += 1;
            } else if w.failure.is_none() {
                w.failure = Some(record(reason()));
            }
        }
    }
    let verdict = w.encoded_base_instances > 0
        && w.encoded_base_passed == w.encoded_base_instances
        && w.errors == 0
        && w.non_members == 0
        && w.spanning_new == 0;
    outcome(&w, verdict)
}

// ---------------------------------------------------------------- groups

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitBatteryParams {
    pub max_order: usize,
    pub subgroup_cap: usize,
}

#[derive(Serialize)]
struct SplitRow {
    group: String,
    order: usize,
    central_subgroups: usize,
    split: usize,
    kappa_verified: usize,
    disagreements: usize,
}

#[derive(Serialize)]
struct Fixture {
    group: String,
    f: Vec<usize>,
    expect_split: bool,
    split: bool,
}

#[derive(Serialize)]
struct SplitBatteryWitness {
    groups: Vec<SplitRow>,
    fixtures: Vec<Fixture>,
}

fn split_row(name: &str, g: &FinGroup, cap: usize) -> Result<SplitRow, CliError> {
    let reports: Vec<SplittingReport> = g
        .central_subgroups(cap)?
        .par_iter()
        .map(|f| verify_splitting(g, f, cap))
        .collect::<Result<_, _>>()?;
    Ok(SplitRow {
        group: name.to_string(),
        order: g.order(),
        central_subgroups: reports.len(),
        split: reports.iter().filter(|r| r.split).count(),
        kappa_verified: reports.iter().filter(|r| r.isomorphism_verified == Some(true)).count(),
        disagreements: reports.iter().filter(|r| !r.agree).count(),
    })
}

pub fn split_battery(p: &SplitBatteryParams) -> Result<Outcome, CliError> {
    let groups: Vec<SplitRow> = catalogue()
        .iter()
        .filter(|e| e.group.order() <= p.max_order)
        .map(|e| split_row(e.name, &e.group, p.subgroup_cap))
        .collect::<Result<_, _>>()?;
    let mut fixtures = Vec::new();
    for (name, expect_split) in [("Z4", false), ("Q8", false), ("S3xZ2", true)] {
        let g = crate::groups::catalogue_group(name)?;
        let f = g
            .central_subgroups(p.subgroup_cap)?
            .into_iter()
            .find(|h| h.len() == 2)
            .ok_or_else(|| CliError::Input(format!("{name} has no central subgroup of order 2")))?;
        let report = verify_splitting(&g, &f, p.subgroup_cap)?;
        fixtures.push(Fixture {
            group: name.to_string(),
            f,
            expect_split,
            split: report.split && report.agree,
        });
    }
    let verdict = groups.iter().all(|r| r.disagreements == 0 && r.kappa_verified == r.split)
        && fixtures.iter().all(|f| f.split == f.expect_split);
    outcome(&SplitBatteryWitness { groups, fixtures }, verdict)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitParams {
    pub group: GroupSpec,
    /// A central subgroup, or every central subgroup when absent.
    pub center: Option<Vec<usize>>,
    pub subgroup_cap: usize,
}

pub fn split(p: &SplitParams) -> Result<Outcome, CliError> {
    let g = p.group.build(crate::groups::DEFAULT_ORDER_CAP)?;
    let fs = match &p.center {
        Some(f) => vec![f.clone()],
        None => g.central_subgroups(p.subgroup_cap)?,
    };
    let reports: Vec<SplittingReport> = fs.iter().map(|f| verify_splitting(&g, f, p.subgroup_cap)).collect::<Result<_, _>>()?;
    let verdict = reports.iter().all(|r| r.agree && r.isomorphism_verified != Some(false));
    outcome(&reports, verdict)
}

/// A chain request: `G`, a central `F`, `G_0`, and normal subgroups `H_i` of
/// the quotient `G/F` as returned by `FinGroup::quotient`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub group: GroupSpec,
    pub f: Vec<usize>,
    pub hs: Vec<Vec<usize>>,
    pub g0: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub levels: usize,
    pub stabilizer_from_1: Vec<usize>,
    pub kernel_from_0: Vec<usize>,
    pub limit_order: usize,
    pub limit_isomorphic: bool,
    pub pass: bool,
}

pub fn check_chain(g: &FinGroup, f: &[usize], hs: &[Vec<usize>], g0: &[usize], cap: usize) -> Result<ChainReport, CliError> {
    let chain = build_chain(g, f, hs, g0)?;
    let from1 = coset_action(g, &chain, 1);
    let stabilizer_from_1 = stabilizer_of_union(&from1, &chain, 1)?;
    let from0 = coset_action(g, &chain, 0);
    let kernel_from_0 = stabilizer_of_union(&from0, &chain, 0)?;
    let (system, _) = quotient_tower(g, &chain)?;
    let limit = truncated_limit(&system, cap)?;
    let limit_isomorphic = find_isomorphism(g, &limit.group).is_some();
    let pass = stabilizer_from_1 == f && kernel_from_0.len() == 1 && from0.kernel == kernel_from_0 && limit_isomorphic;
    Ok(ChainReport {
        levels: chain.len(),
        stabilizer_from_1,
        kernel_from_0,
        limit_order: limit.group.order(),
        limit_isomorphic,
        pass,
    })
}

pub fn chain_verify(spec: &ChainSpec) -> Result<Outcome, CliError> {
    let g = spec.group.build(crate::groups::DEFAULT_ORDER_CAP)?;
    let report = check_chain(&g, &spec.f, &spec.hs, &spec.g0, crate::groups::DEFAULT_ORDER_CAP)?;
    let verdict = report.pass;
    outcome(&report, verdict)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainBatteryParams {
    pub max_order: usize,
    pub subgroup_cap: usize,
}

#[derive(Serialize)]
struct ChainRow {
    group: String,
    order: usize,
    chains: usize,
    passed: usize,
}

#[derive(Serialize)]
struct ChainBatteryWitness {
    groups: Vec<ChainRow>,
    failure: Option<ChainSpec>,
}

/// `(F, [H_1, ...], G_0)` for one chain.
pub type ChainRequest = (Vec<usize>, Vec<Vec<usize>>, Vec<usize>);

/// Chain requests for one group: each central `F`; `G_0` trivial with the
/// `H_i` either the trivial subgroup alone or a pair of nontrivial normal
/// subgroups of `G/F` meeting trivially; and each nontrivial normal `G_0`
/// meeting `F` trivially with the trivial `H`.
pub fn chain_requests(g: &FinGroup, cap: usize) -> Result<Vec<ChainRequest>, CliError> {
    let trivial = vec![g.identity()];
    let normal = g.normal_subgroups(cap)?;
    let mut out = Vec::new();
    for f in g.central_subgroups(cap)? {
        let (q, _) = g.quotient(&f)?;
        let q_trivial = vec![q.identity()];
        out.push((f.clone(), vec![q_trivial.clone()], trivial.clone()));
        let qn: Vec<Vec<usize>> = q.normal_subgroups(cap)?.into_iter().filter(|h| h.len() > 1).collect();
        for (i, h1) in qn.iter().enumerate() {
            for h2 in &qn[i + 1..] {
                if q.intersection(h1, h2).len() == 1 {
                    out.push((f.clone(), vec![h1.clone(), h2.clone()], trivial.clone()));
                }
            }
        }
        for g0 in normal.iter().filter(|n| n.len() > 1 && g.intersection(n, &f).len() == 1) {
            out.push((f.clone(), vec![q_trivial.clone()], g0.clone()));
        }
    }
    Ok(out)
}

pub fn chain_battery(p: &ChainBatteryParams) -> Result<Outcome, CliError> {
    let entries: Vec<_> = catalogue()
        .into_iter()
        .chain(extra_groups())
        .filter(|e| e.group.order() <= p.max_order)
        .collect();
    let mut groups = Vec::new();
    let mut failure = None;
    for e in &entries {
        let g = &e.group;
        let requests = chain_requests(g, p.subgroup_cap)?;
        let results: Vec<bool> = requests
            .par_iter()
            .map(|(f, hs, g0)| check_chain(g, f, hs, g0, g.order().max(1) * 2).is_ok_and(|r| r.pass))
            .collect();
        if failure.is_none() {
            if let Some(((f, hs, g0), _)) = requests.iter().zip(&results).find(|(_, ok)| !**ok) {
                failure = Some(ChainSpec {
                    group: GroupSpec::Table { table: g.rows() },
                    f: f.clone(),
                    hs: hs.clone(),
                    g0: g0.clone(),
                });
            }
        }
        groups.push(ChainRow {
            group: e.name.to_string(),
            order: g.order(),
            chains: requests.len(),
            passed: results.iter().filter(|&&ok| ok).count(),
        });
    }
    let verdict = failure.is_none() && groups.iter().all(|r| r.chains == r.passed);
    outcome(&ChainBatteryWitness { groups, failure }, verdict)
}

// ---------------------------------------------------------------- clones

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetParams {
    /// `(d, k)`: domain size and arity.
    pub cases: Vec<(usize, usize)>,
    pub cap: u64,
}

#[derive(Serialize)]
struct GadgetRow {
    d: usize,
    arity: usize,
    candidates: String,
    polymorphisms: usize,
    essentially_unary: usize,
    tables_sha256: String,
}

pub fn gadget(p: &GadgetParams) -> Result<Outcome, CliError> {
    let rows: Vec<GadgetRow> = p
        .cases
        .iter()
        .map(|&(d, k)| {
            let polys = polymorphisms(&r_gadget(d), k, u128::from(p.cap))?;
            let tables: Vec<&[usize]> = polys.iter().map(FinOperation::table).collect();
            Ok(GadgetRow {
                d,
                arity: k,
                candidates: (d as u128).pow(d.pow(k as u32) as u32).to_string(),
                polymorphisms: polys.len(),
                essentially_unary: polys.iter().filter(|f| is_essentially_unary(f).0).count(),
                tables_sha256: digest(&tables)?,
            })
        })
        .collect::<Result<_, CliError>>()?;
    let verdict = rows.iter().all(|r| r.polymorphisms > 0 && r.polymorphisms == r.essentially_unary);
    outcome(&rows, verdict)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyParams {
    pub input: String,
    pub arity: usize,
    pub cap: u64,
}

#[derive(Serialize)]
struct PolyWitness {
    count: usize,
    essentially_unary: usize,
    operations: Vec<FinOperation>,
}

pub fn poly(s: &FinStructure, p: &PolyParams) -> Result<Outcome, CliError> {
    let operations = polymorphisms(s, p.arity, u128::from(p.cap))?;
    let w = PolyWitness {
        count: operations.len(),
        essentially_unary: operations.iter().filter(|f| is_essentially_unary(f).0).count(),
        operations,
    };
    let verdict = (0..p.arity).all(|i| s.size() == 0 || w.operations.contains(&FinOperation::projection(s.size(), p.arity, i)));
    outcome(&w, verdict)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloneIsoParams {
    pub max_arity: usize,
}

#[derive(Serialize)]
struct CloneIsoWitness {
    samples: usize,
    report: HomReport,
}

/// Conjugation by the flip on the full unary monoid of `{0, 1}`, extended to
/// the generated clone and checked on every member of arity `1..=max_arity`.
pub fn clone_iso(p: &CloneIsoParams) -> Result<Outcome, CliError> {
    let m = FunctionMonoid::full(2);
    let flip = FinOperation::unary(2, &[1, 0])?;
    let xi0 = m
        .elements()
        .iter()
        .map(|a| Ok((a.clone(), flip.compose(&[a.compose(std::slice::from_ref(&flip))?])?)))
        .collect::<Result<_, CliError>>()?;
    let xi = extend_monoid_iso(&m, &m, &xi0)?;
    let clone = CloneHandle::from_monoid(m);
    let samples: Vec<FinOperation> = (1..=p.max_arity).flat_map(|k| clone.members(k)).collect();
    let report = check_clone_homomorphism(&samples, &|f| xi.apply(f))?;
    let verdict = report.pass;
    outcome(
        &CloneIsoWitness {
            samples: samples.len(),
            report,
        },
        verdict,
    )
}

/// A single-symbol signature, for building test structures.
pub fn single_relation(name: &str, arity: usize) -> Arc<Signature> {
    Arc::new(Signature::new(vec![Symbol::new(name, arity)]).expect("one symbol"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventy_labelled_members_up_to_three_points() {
        let p = PartitionOracle::new(2);
        let counts: Vec<usize> = (0..=3).map(|n| labelled_members(&p, n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 4, 64]);
        assert!(labelled_members(&p, 3).unwrap().iter().all(|s| p.is_member(s)));
    }

    #[test]
    fn partial_injection_counts() {
        // sum over k of C(n,k)^2 k!
        let counts: Vec<usize> = (0..=3).map(|n| partial_injections(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 7, 34]);
    }

    #[test]
    fn graphs_up_to_isomorphism() {
        // loops allowed, directed: 1, 2, 10 structures on 0, 1, 2 points
        let sig = single_relation("E", 2);
        let counts: Vec<usize> = (0..=2).map(|n| structures_up_to_iso(&sig, n).len()).collect();
        assert_eq!(counts, vec![1, 2, 10]);
    }

    #[test]
    fn one_fact_structures_for_the_inner_signature() {
        let inner = GradedInnerSignature::from_arities(&[1, 2, 2]).unwrap();
        let list = one_fact_structures(&inner, 4);
        // empty on 0..=4; R_1 on 1..=3 points; R_2 loop or pair on 1..=2 points
        // (pair needs 2); R_3 loop on 1 point
        let n_facts: Vec<usize> = list.iter().map(FinStructure::tuple_count).collect();
        assert_eq!(n_facts.iter().filter(|&&c| c == 0).count(), 5);
        assert_eq!(list.len(), 5 + 3 + 3 + 1);
    }

    #[test]
    fn compatible_triples_respect_positions() {
        let s = crate::fraisse::RandomGraph::graph(3, &[]);
        let triples = compatible_triples(&s, 1).unwrap();
        // y, then a != y, then any b
        assert_eq!(triples.len(), 3 * 2 * 3);
        for [y, a, _] in &triples {
            assert_ne!(y, a);
        }
    }
}
