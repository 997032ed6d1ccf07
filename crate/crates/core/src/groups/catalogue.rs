use super::{FinGroup, GroupError};

pub fn cyclic(n: usize) -> FinGroup {
    let table = (0..n).flat_map(|a| (0..n).map(move |b| (a + b) % n)).collect();
    FinGroup::from_flat(n, table, None).expect("cyclic group")
}

/// `Sym(n)` on `0..n`, permutations in lexicographic order.
pub fn symmetric(n: usize) -> FinGroup {
    let mut gens = Vec::new();
    if n >= 2 {
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        gens.push(swap);
        gens.push((0..n).map(|i| (i + 1) % n).collect());
    }
    FinGroup::from_permutations(n, &gens, usize::MAX).expect("symmetric group")
}

/// `G × H` with `(g, h)` at index `g·|H| + h`.
pub fn direct_product(g: &FinGroup, h: &FinGroup) -> FinGroup {
    let (m, k) = (g.order(), h.order());
    let n = m * k;
    let mut table = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            table[a * n + b] = g.mul(a / k, b / k) * k + h.mul(a % k, b % k);
        }
    }
    FinGroup::from_flat(n, table, None).expect("direct product")
}

/// `N ⋊ H` where `action(y)` lists the images of the elements of `N` under
/// the automorphism attached to `y`; `(x, y)` sits at index `x·|H| + y`.
pub fn semidirect(n: &FinGroup, h: &FinGroup, action: impl Fn(usize) -> Vec<usize>) -> Result<FinGroup, GroupError> {
    let acts: Vec<Vec<usize>> = h.elements().map(action).collect();
    let (m, k) = (n.order(), h.order());
    if acts.iter().any(|a| a.len() != m || a.iter().any(|&x| x >= m)) {
        return Err(GroupError::Precondition("action must map N into N".into()));
    }
    let size = m * k;
    let mut table = vec![0; size * size];
    for a in 0..size {
        for b in 0..size {
            let (x1, y1, x2, y2) = (a / k, a % k, b / k, b % k);
            table[a * size + b] = n.mul(x1, acts[y1][x2]) * k + h.mul(y1, y2);
        }
    }
    FinGroup::from_flat(size, table, None)
}

/// `Z_m ⋊ Z_n` with the generator of `Z_n` acting by `x ↦ r·x`.
fn cyclic_semidirect(m: usize, n: usize, r: usize) -> FinGroup {
    let acts = |y: usize| (0..m).map(|x| x * (0..y).fold(1, |p, _| p * r % m) % m).collect();
    semidirect(&cyclic(m), &cyclic(n), acts).expect("r^n = 1 mod m")
}

fn dihedral(m: usize) -> FinGroup {
    cyclic_semidirect(m, 2, m - 1)
}

/// The dicyclic group of order `4n`: `⟨a, x | a^{2n}, x² = a^n, x a x⁻¹ = a⁻¹⟩`.
pub fn dicyclic(n: usize) -> FinGroup {
    let m = 2 * n;
    let size = 2 * m;
    let mut table = vec![0; size * size];
    for a in 0..size {
        for b in 0..size {
            let (k1, j1, k2, j2) = (a / 2, a % 2, b / 2, b % 2);
            let (k, j) = match (j1, j2) {
                (0, _) => ((k1 + k2) % m, j2),
                (_, 0) => ((k1 + m - k2) % m, 1),
                _ => ((k1 + m - k2 + n) % m, 0),
            };
            table[a * size + b] = k * 2 + j;
        }
    }
    FinGroup::from_flat(size, table, None).expect("dicyclic group")
}

fn product_of(parts: &[FinGroup]) -> FinGroup {
    parts.iter().skip(1).fold(parts[0].clone(), |acc, g| direct_product(&acc, g))
}

/// `(Z4 × Z2) ⋊ Z2` with the involution acting on `a^i b^j` as given.
fn z4z2_by_z2(image: impl Fn(usize, usize) -> (usize, usize)) -> FinGroup {
    let n = direct_product(&cyclic(4), &cyclic(2));
    let flip: Vec<usize> = (0..8)
        .map(|x| {
            let (i, j) = image(x / 2, x % 2);
            i * 2 + j
        })
        .collect();
    semidirect(&n, &cyclic(2), |y| if y == 0 { (0..8).collect() } else { flip.clone() }).expect("involutive automorphism")
}

fn alternating4() -> FinGroup {
    FinGroup::from_permutations(4, &[vec![1, 2, 0, 3], vec![1, 0, 3, 2]], 12).expect("A4")
}

#[derive(Clone, Debug)]
pub struct CatalogueEntry {
    pub name: &'static str,
    pub group: FinGroup,
}

/// One representative of each isomorphism type of order at most 16.
pub fn catalogue() -> Vec<CatalogueEntry> {
    let z = cyclic;
    let entries: Vec<(&'static str, FinGroup)> = vec![
        ("Z1", FinGroup::trivial()),
        ("Z2", z(2)),
        ("Z3", z(3)),
        ("Z4", z(4)),
        ("Z2^2", product_of(&[z(2), z(2)])),
        ("Z5", z(5)),
        ("Z6", z(6)),
        ("S3", symmetric(3)),
        ("Z7", z(7)),
        ("Z8", z(8)),
        ("Z4xZ2", product_of(&[z(4), z(2)])),
        ("Z2^3", product_of(&[z(2), z(2), z(2)])),
        ("D4", dihedral(4)),
        ("Q8", dicyclic(2)),
        ("Z9", z(9)),
        ("Z3^2", product_of(&[z(3), z(3)])),
        ("Z10", z(10)),
        ("D5", dihedral(5)),
        ("Z11", z(11)),
        ("Z12", z(12)),
        ("Z6xZ2", product_of(&[z(6), z(2)])),
        ("A4", alternating4()),
        ("D6", dihedral(6)),
        ("Dic3", cyclic_semidirect(3, 4, 2)),
        ("Z13", z(13)),
        ("Z14", z(14)),
        ("D7", dihedral(7)),
        ("Z15", z(15)),
        ("Z16", z(16)),
        ("Z4^2", product_of(&[z(4), z(4)])),
        ("(Z4xZ2):Z2", z4z2_by_z2(|i, j| (i, (i + j) % 2))),
        ("Z4:Z4", cyclic_semidirect(4, 4, 3)),
        ("Z8xZ2", product_of(&[z(8), z(2)])),
        ("M16", cyclic_semidirect(8, 2, 5)),
        ("D8", dihedral(8)),
        ("SD16", cyclic_semidirect(8, 2, 3)),
        ("Q16", dicyclic(4)),
        ("Z4xZ2^2", product_of(&[z(4), z(2), z(2)])),
        ("D4xZ2", product_of(&[dihedral(4), z(2)])),
        ("Q8xZ2", product_of(&[dicyclic(2), z(2)])),
        ("Pauli", z4z2_by_z2(|i, j| ((i + 2 * j) % 4, j))),
        ("Z2^4", product_of(&[z(2), z(2), z(2), z(2)])),
    ];
    entries.into_iter().map(|(name, group)| CatalogueEntry { name, group }).collect()
}

/// Further groups of order at most 24.
pub fn extra_groups() -> Vec<CatalogueEntry> {
    let entries: Vec<(&'static str, FinGroup)> = vec![
        ("S3xZ2", direct_product(&symmetric(3), &cyclic(2))),
        ("Z3:Z8", cyclic_semidirect(3, 8, 2)),
        ("D12", dihedral(12)),
        ("Dic6", dicyclic(6)),
        ("Z24", cyclic(24)),
        ("Z2xA4", direct_product(&cyclic(2), &alternating4())),
        ("S4", symmetric(4)),
    ];
    entries.into_iter().map(|(name, group)| CatalogueEntry { name, group }).collect()
}

/// A group from the catalogue or the extras by name, or `Z<n>` / `S<n>`.
pub fn catalogue_group(name: &str) -> Result<FinGroup, GroupError> {
    if let Some(e) = catalogue().into_iter().find(|e| e.name == name) {
        return Ok(e.group);
    }
    if let Some(e) = extra_groups().into_iter().find(|e| e.name == name) {
        return Ok(e.group);
    }
    let number = |p: &str| name.strip_prefix(p).and_then(|s| s.parse::<usize>().ok());
    match (number("Z"), number("S")) {
        (Some(n), _) if (1..=4096).contains(&n) => Ok(cyclic(n)),
        (_, Some(n)) if (1..=6).contains(&n) => Ok(symmetric(n)),
        _ => Err(GroupError::UnknownGroup(name.to_string())),
    }
}
