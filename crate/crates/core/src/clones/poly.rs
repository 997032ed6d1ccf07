use std::sync::Arc;

use crate::structures::{FinStructure, Signature, Symbol};

use super::{CloneError, FinOperation};

pub const DEFAULT_POLY_CAP: u128 = 1 << 20;

/// All `k`-ary operations on the domain of `s` preserving every relation,
/// in lexicographic order of their tables.
///
/// Fails when the number of candidate tables `d^(d^k)` exceeds `cap`.
pub fn polymorphisms(s: &FinStructure, k: usize, cap: u128) -> Result<Vec<FinOperation>, CloneError> {
    let d = s.size();
    let cells = d
        .checked_pow(k as u32)
        .ok_or(CloneError::TooMany { candidates: u128::MAX, cap })?;
    let candidates = (d as u128).checked_pow(cells as u32).unwrap_or(u128::MAX);
    if candidates > cap {
        return Err(CloneError::TooMany { candidates, cap });
    }
    if d == 0 {
        return Ok(Vec::new());
    }
    // each constraint says (f(row_1), ..., f(row_r)) lies in a relation; it is
    // checked once the largest row index has been assigned
    let mut due: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); cells];
    for (symbol, sym) in s.signature().symbols().iter().enumerate() {
        let tuples: Vec<&Vec<usize>> = s.relation(symbol).iter().collect();
        if sym.arity == 0 || tuples.is_empty() {
            continue;
        }
        let mut pick = vec![0usize; k];
        loop {
            let rows: Vec<usize> = (0..sym.arity)
                .map(|j| pick.iter().fold(0, |acc, &t| acc * d + tuples[t][j]))
                .collect();
            let last = *rows.iter().max().expect("positive arity");
            due[last].push((symbol, rows));
            if !advance(&mut pick, tuples.len()) {
                break;
            }
        }
    }
    let mut table = vec![0usize; cells];
    let mut out = Vec::new();
    search(s, d, &due, &mut table, 0, &mut out);
    Ok(out
        .into_iter()
        .map(|t| FinOperation::new(d, k, t).expect("values in range"))
        .collect())
}

fn advance(pick: &mut [usize], base: usize) -> bool {
    for slot in pick.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

fn search(
    s: &FinStructure,
    d: usize,
    due: &[Vec<(usize, Vec<usize>)>],
    table: &mut Vec<usize>,
    cell: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if cell == table.len() {
        out.push(table.clone());
        return;
    }
    for v in 0..d {
        table[cell] = v;
        let ok = due[cell].iter().all(|(symbol, rows)| {
            let image: Vec<usize> = rows.iter().map(|&r| table[r]).collect();
            s.holds(*symbol, &image)
        });
        if ok {
            search(s, d, due, table, cell + 1, out);
        }
    }
}

/// The structure on `{0..d}` with one 4-ary relation `R(x, y, a, b)` holding
/// when `x = y` or `a = b`.
pub fn r_gadget(d: usize) -> FinStructure {
    let sig = Arc::new(Signature::new(vec![Symbol::new("R", 4)]).expect("one symbol"));
    let mut s = FinStructure::new(sig, d);
    for x in 0..d {
        for y in 0..d {
            for a in 0..d {
                for b in 0..d {
                    if x == y || a == b {
                        s.insert(0, vec![x, y, a, b]).expect("in range");
                    }
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clones::is_essentially_unary;

    fn preserves_brute(s: &FinStructure, f: &FinOperation) -> bool {
        let k = f.arity();
        s.signature().symbols().iter().enumerate().all(|(symbol, sym)| {
            let tuples: Vec<&Vec<usize>> = s.relation(symbol).iter().collect();
            let mut pick = vec![0usize; k];
            if tuples.is_empty() {
                return true;
            }
            loop {
                let image: Vec<usize> = (0..sym.arity)
                    .map(|j| f.eval(&pick.iter().map(|&t| tuples[t][j]).collect::<Vec<_>>()))
                    .collect();
                if !s.holds(symbol, &image) {
                    return false;
                }
                if !advance(&mut pick, tuples.len()) {
                    return true;
                }
            }
        })
    }

    fn order2() -> FinStructure {
        let sig = Arc::new(Signature::new(vec![Symbol::new("le", 2)]).unwrap());
        FinStructure::from_tuples(sig, 2, [(0, vec![0, 0]), (0, vec![0, 1]), (0, vec![1, 1])]).unwrap()
    }

    #[test]
    fn gadget_size() {
        assert_eq!(r_gadget(2).tuple_count(), 12);
        assert_eq!(r_gadget(3).tuple_count(), 45);
    }

    #[test]
    fn monotone_unary_maps_on_two_points() {
        let polys = polymorphisms(&order2(), 1, DEFAULT_POLY_CAP).unwrap();
        let tables: Vec<&[usize]> = polys.iter().map(|f| f.table()).collect();
        assert_eq!(tables, vec![&[0, 0][..], &[0, 1], &[1, 1]]);
    }

    #[test]
    fn monotone_binary_maps_on_two_points() {
        // monotone Boolean functions of two variables
        assert_eq!(polymorphisms(&order2(), 2, DEFAULT_POLY_CAP).unwrap().len(), 6);
    }

    #[test]
    fn pruned_search_matches_brute_force() {
        let s = r_gadget(2);
        let fast = polymorphisms(&s, 2, DEFAULT_POLY_CAP).unwrap();
        let slow: Vec<FinOperation> = (0..16usize)
            .map(|code| FinOperation::from_fn(2, 2, |x| code >> (3 - (2 * x[0] + x[1])) & 1))
            .filter(|f| preserves_brute(&s, f))
            .collect();
        let mut slow = slow;
        slow.sort();
        assert_eq!(fast, slow);
    }

    #[test]
    fn gadget_polymorphisms_are_essentially_unary() {
        for (d, k) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)] {
            let polys = polymorphisms(&r_gadget(d), k, DEFAULT_POLY_CAP).unwrap();
            assert!(!polys.is_empty());
            assert!(polys.iter().all(|f| is_essentially_unary(f).0), "d = {d}, k = {k}");
        }
        assert_eq!(polymorphisms(&r_gadget(2), 1, DEFAULT_POLY_CAP).unwrap().len(), 4);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(polymorphisms(&r_gadget(3), 3, DEFAULT_POLY_CAP), Err(CloneError::TooMany { .. })));
    }
}
