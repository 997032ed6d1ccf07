//! Small reference classes used as baselines and counterexamples.

use std::sync::Arc;

use super::{ClassOracle, FraisseError};
use crate::structures::{Amalgam, FinStructure, PartialMap, Signature, Symbol};

fn binary_signature(name: &str) -> Arc<Signature> {
    Arc::new(Signature::new(vec![Symbol::new(name, 2)]).expect("valid signature"))
}

fn is_simple_graph(s: &FinStructure) -> bool {
    s.relation(0).iter().all(|t| t[0] != t[1] && s.holds(0, &[t[1], t[0]]))
}

/// All finite simple graphs; the limit is the random graph.
#[derive(Clone, Debug)]
pub struct RandomGraph {
    signature: Arc<Signature>,
}

impl RandomGraph {
    pub fn new() -> Self {
        RandomGraph {
            signature: binary_signature("E"),
        }
    }

    /// A simple graph given by undirected edges.
    pub fn graph(n: usize, edges: &[(usize, usize)]) -> FinStructure {
        let mut s = FinStructure::new(binary_signature("E"), n);
        for &(x, y) in edges {
            s.insert(0, vec![x, y]).expect("edge in range");
            s.insert(0, vec![y, x]).expect("edge in range");
        }
        s
    }
}

impl Default for RandomGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl ClassOracle for RandomGraph {
    fn name(&self) -> String {
        "random-graph".into()
    }

    fn signature(&self) -> Arc<Signature> {
        Arc::clone(&self.signature)
    }

    fn is_member(&self, s: &FinStructure) -> bool {
        is_simple_graph(s)
    }

    fn admissible(&self, _symbol: usize, tuple: &[usize]) -> bool {
        tuple[0] != tuple[1]
    }
}

/// Simple graphs without isolated vertices. Not hereditary.
#[derive(Clone, Debug)]
pub struct NoIsolatedVertex {
    signature: Arc<Signature>,
}

impl NoIsolatedVertex {
    pub fn new() -> Self {
        NoIsolatedVertex {
            signature: binary_signature("E"),
        }
    }
}

impl Default for NoIsolatedVertex {
    fn default() -> Self {
        Self::new()
    }
}

impl ClassOracle for NoIsolatedVertex {
    fn name(&self) -> String {
        "no-isolated-vertex".into()
    }

    fn signature(&self) -> Arc<Signature> {
        Arc::clone(&self.signature)
    }

    fn is_member(&self, s: &FinStructure) -> bool {
        let mut touched = vec![false; s.size()];
        for t in s.relation(0) {
            touched[t[0]] = true;
        }
        is_simple_graph(s) && touched.into_iter().all(|b| b)
    }

    fn admissible(&self, _symbol: usize, tuple: &[usize]) -> bool {
        tuple[0] != tuple[1]
    }
}

/// Strict linear orders under `<`.
#[derive(Clone, Debug)]
pub struct LinearOrders {
    signature: Arc<Signature>,
}

impl LinearOrders {
    pub fn new() -> Self {
        LinearOrders {
            signature: binary_signature("<"),
        }
    }

    /// The order `ranks[x] < ranks[y]` on `0..ranks.len()`.
    pub fn from_ranks(ranks: &[usize]) -> FinStructure {
        let n = ranks.len();
        let mut s = FinStructure::new(binary_signature("<"), n);
        for x in 0..n {
            for y in 0..n {
                if ranks[x] < ranks[y] {
                    s.insert(0, vec![x, y]).expect("in range");
                }
            }
        }
        s
    }

    fn ranks(s: &FinStructure) -> Vec<usize> {
        let mut below = vec![0; s.size()];
        for t in s.relation(0) {
            below[t[1]] += 1;
        }
        below
    }
}

impl Default for LinearOrders {
    fn default() -> Self {
        Self::new()
    }
}

impl ClassOracle for LinearOrders {
    fn name(&self) -> String {
        "linear-orders".into()
    }

    fn signature(&self) -> Arc<Signature> {
        Arc::clone(&self.signature)
    }

    /// A tournament is transitive exactly when its scores are pairwise distinct.
    fn is_member(&self, s: &FinStructure) -> bool {
        let n = s.size();
        for x in 0..n {
            for y in x + 1..n {
                if s.holds(0, &[x, y]) == s.holds(0, &[y, x]) {
                    return false;
                }
            }
            if s.holds(0, &[x, x]) {
                return false;
            }
        }
        let mut ranks = LinearOrders::ranks(s);
        ranks.sort_unstable();
        ranks.into_iter().eq(0..n)
    }

    fn admissible(&self, _symbol: usize, tuple: &[usize]) -> bool {
        tuple[0] != tuple[1]
    }

    /// New elements of `c` go directly above the `b`-elements sharing their gap
    /// between consecutive images of `a`.
    fn amalgamate(
        &self,
        a: &FinStructure,
        b: &FinStructure,
        f: &PartialMap,
        c: &FinStructure,
        g: &PartialMap,
    ) -> Result<Amalgam, FraisseError> {
        crate::structures::check_embedding(f, a, b)
            .map_err(|d| FraisseError::Precondition(format!("left map is not an embedding: {d:?}")))?;
        crate::structures::check_embedding(g, a, c)
            .map_err(|d| FraisseError::Precondition(format!("right map is not an embedding: {d:?}")))?;
        let b_rank = LinearOrders::ranks(b);
        let c_rank = LinearOrders::ranks(c);
        let gap = |ranks: &[usize], images: &[usize], x: usize| images.iter().filter(|&&e| ranks[e] < ranks[x]).count();
        let f_img = f.image();
        let g_img = g.image();
        let mut right = vec![usize::MAX; c.size()];
        for x in 0..a.size() {
            right[g.get(x).expect("total")] = f.get(x).expect("total");
        }
        let mut next = b.size();
        let mut keys: Vec<(usize, usize, usize)> = (0..b.size())
            .map(|x| {
                if f_img.contains(&x) {
                    (gap(&b_rank, &f_img, x), 2, 0)
                } else {
                    (gap(&b_rank, &f_img, x), 0, b_rank[x])
                }
            })
            .collect();
        for z in 0..c.size() {
            if right[z] == usize::MAX {
                right[z] = next;
                next += 1;
                keys.push((gap(&c_rank, &g_img, z), 1, c_rank[z]));
            }
        }
        let mut order: Vec<usize> = (0..keys.len()).collect();
        order.sort_by_key(|&x| keys[x]);
        let mut ranks = vec![0; keys.len()];
        for (r, &x) in order.iter().enumerate() {
            ranks[x] = r;
        }
        Ok(Amalgam {
            structure: LinearOrders::from_ranks(&ranks),
            left: PartialMap::identity(b.size()),
            right: PartialMap::from_images(&right)?,
        })
    }
}

/// Every structure over a fixed signature.
#[derive(Clone, Debug)]
pub struct FreeClass {
    signature: Arc<Signature>,
}

impl FreeClass {
    pub fn new(signature: Arc<Signature>) -> Self {
        FreeClass { signature }
    }
}

impl ClassOracle for FreeClass {
    fn name(&self) -> String {
        format!("free[{}]", self.signature)
    }

    fn signature(&self) -> Arc<Signature> {
        Arc::clone(&self.signature)
    }

    fn is_member(&self, _s: &FinStructure) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraisse::checked_amalgam;

    #[test]
    fn linear_order_membership() {
        let lo = LinearOrders::new();
        assert!(lo.is_member(&LinearOrders::from_ranks(&[2, 0, 1])));
        let mut cyc = FinStructure::new(lo.signature(), 3);
        for t in [[0, 1], [1, 2], [2, 0]] {
            cyc.insert(0, t.to_vec()).unwrap();
        }
        assert!(!lo.is_member(&cyc));
    }

    #[test]
    fn order_amalgam_interleaves_gaps() {
        let lo = LinearOrders::new();
        // a: one point; b: point with something below; c: point with something above and below
        let a = LinearOrders::from_ranks(&[0]);
        let b = LinearOrders::from_ranks(&[1, 0]);
        let c = LinearOrders::from_ranks(&[1, 2, 0]);
        let f = PartialMap::from_images(&[0]).unwrap();
        let g = PartialMap::from_images(&[0]).unwrap();
        let am = checked_amalgam(&lo, &a, &b, &f, &c, &g).unwrap();
        assert_eq!(am.structure.size(), 4);
        // b's lower point and c's lower point both below the shared point
        assert!(am.structure.holds(0, &[1, 0]));
        assert!(am.structure.holds(0, &[am.right.get(2).unwrap(), 0]));
        assert!(am.structure.holds(0, &[0, am.right.get(1).unwrap()]));
    }

    #[test]
    fn isolated_vertex_rule() {
        let c = NoIsolatedVertex::new();
        assert!(c.is_member(&RandomGraph::graph(2, &[(0, 1)])));
        assert!(!c.is_member(&RandomGraph::graph(1, &[])));
    }
}
