//! Bratteli diagrams of AF-algebras: construction from stationary matrices
//! and Jacobi-Perron expansions, telescoping, dimension vectors, bounded
//! common-block tail equivalence and DOT export.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::exactnum::IntMatrix;
use crate::jacobiperron::JPExpansion;

/// A finitely generated prefix of a Bratteli diagram, with an optional
/// declared periodic tail.
///
/// Level 0 is the canonical single-vertex root with unit edges into the
/// `root_arity` vertices of level 1; `levels[k]` is the incidence matrix
/// between the vertex levels k+1 and k+2 (rows index the earlier level).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BratteliDiagram {
    root_arity: usize,
    levels: Vec<IntMatrix>,
    labels: Vec<Option<String>>,
    /// (preperiod levels, period levels): from index `pre` on, the level
    /// sequence repeats with the given period. Lets equality checks extend
    /// soundly beyond the generated prefix.
    periodic_tail: Option<(usize, usize)>,
}

impl BratteliDiagram {
    pub fn new(levels: Vec<IntMatrix>, periodic_tail: Option<(usize, usize)>) -> Result<Self, Error> {
        if levels.is_empty() {
            return Err(Error::Usage("a diagram needs at least one incidence matrix".into()));
        }
        for (k, m) in levels.iter().enumerate() {
            for r in 0..m.rows() {
                if (0..m.cols()).all(|c| m.at(r, c).is_zero()) {
                    return Err(Error::Domain(format!(
                        "level {} has a disconnected vertex (zero row {})",
                        k, r
                    )));
                }
            }
            for c in 0..m.cols() {
                if (0..m.rows()).all(|r| m.at(r, c).is_zero()) {
                    return Err(Error::Domain(format!(
                        "level {} has a disconnected vertex (zero column {})",
                        k, c
                    )));
                }
            }
            if m.entries().iter().any(|e| e < &BigInt::zero()) {
                return Err(Error::Domain("incidence multiplicities are nonnegative".into()));
            }
            if k + 1 < levels.len() && m.cols() != levels[k + 1].rows() {
                return Err(Error::Dimension(format!(
                    "levels {} and {} are not composable",
                    k,
                    k + 1
                )));
            }
        }
        if let Some((pre, per)) = periodic_tail {
            if per == 0 || pre + per > levels.len() {
                return Err(Error::Range("declared tail exceeds the generated prefix".into()));
            }
            // The declared repetition must be composable with itself.
            let first = &levels[pre];
            let last = &levels[pre + per - 1];
            if last.cols() != first.rows() {
                return Err(Error::Dimension("declared tail does not compose with itself".into()));
            }
        }
        let root_arity = levels[0].rows();
        let n = levels.len();
        Ok(BratteliDiagram { root_arity, levels, labels: vec![None; n], periodic_tail })
    }

    pub fn root_arity(&self) -> usize {
        self.root_arity
    }

    pub fn levels(&self) -> &[IntMatrix] {
        &self.levels
    }

    pub fn periodic_tail(&self) -> Option<(usize, usize)> {
        self.periodic_tail
    }

    pub fn label(&self, k: usize) -> Option<&str> {
        self.labels.get(k).and_then(|l| l.as_deref())
    }

    pub fn set_label(&mut self, k: usize, label: String) {
        if k < self.labels.len() {
            self.labels[k] = Some(label);
        }
    }

    /// Incidence matrix at any index, unrolling a declared periodic tail.
    pub fn level_at(&self, i: usize) -> Option<&IntMatrix> {
        if i < self.levels.len() {
            return Some(&self.levels[i]);
        }
        let (pre, per) = self.periodic_tail?;
        Some(&self.levels[pre + (i - pre) % per])
    }
}

/// The minimal period of a stationary AF-algebra's diagram: a primitive
/// nonnegative incidence matrix, primitivity verified at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StationaryAF {
    matrix: IntMatrix,
}

impl StationaryAF {
    pub fn new(matrix: IntMatrix) -> Result<Self, Error> {
        if !matrix.is_square() {
            return Err(Error::Dimension("the incidence matrix must be square".into()));
        }
        if !matrix.is_primitive()? {
            return Err(Error::NotPrimitive(
                "a stationary AF-algebra needs a primitive incidence matrix".into(),
            ));
        }
        Ok(StationaryAF { matrix })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn diagram(&self, depth: usize) -> Result<BratteliDiagram, Error> {
        if depth == 0 {
            return Err(Error::Usage("depth must be at least 1".into()));
        }
        BratteliDiagram::new(vec![self.matrix.clone(); depth], Some((0, 1)))
    }
}

/// Stationary diagram: `depth` copies of a primitive incidence matrix.
pub fn stationary_diagram(a: &IntMatrix, depth: usize) -> Result<BratteliDiagram, Error> {
    StationaryAF::new(a.clone())?.diagram(depth)
}

/// Diagram of a Jacobi-Perron expansion: level k is the block (0 1; I b_k).
pub fn diagram_from_jp(e: &JPExpansion) -> Result<BratteliDiagram, Error> {
    diagram_from_jp_depth(e, e.digits.len())
}

/// Same, unrolled to `depth` levels through a detected period.
pub fn diagram_from_jp_depth(e: &JPExpansion, depth: usize) -> Result<BratteliDiagram, Error> {
    if e.digits.is_empty() || depth == 0 {
        return Err(Error::Usage("the expansion has no digits".into()));
    }
    let mut levels = Vec::with_capacity(depth);
    for i in 0..depth {
        let d = e
            .digit_at(i)
            .ok_or_else(|| Error::Range(format!("digit {} beyond available expansion", i)))?;
        levels.push(d.block());
    }
    let tail = e.periodic.filter(|&(pre, per)| pre + per <= depth);
    let mut diagram = BratteliDiagram::new(levels, tail)?;
    if e.terminated && depth == e.digits.len() {
        diagram.set_label(depth - 1, "terminating".to_string());
    }
    Ok(diagram)
}

/// Telescope between cut points: each new level is the product of the
/// consecutive incidence matrices up to the next cut. Cuts are 1-based
/// counts of consumed matrices and must be strictly increasing; levels past
/// the last cut are dropped.
pub fn telescope(d: &BratteliDiagram, cut_points: &[usize]) -> Result<BratteliDiagram, Error> {
    if cut_points.is_empty() {
        return Err(Error::Usage("telescoping needs at least one cut point".into()));
    }
    let mut prev = 0usize;
    let mut levels = vec![];
    for &c in cut_points {
        if c <= prev || c > d.levels.len() {
            return Err(Error::Range(format!(
                "cut {} out of range (previous {}, levels {})",
                c,
                prev,
                d.levels.len()
            )));
        }
        let mut prod = d.levels[prev].clone();
        for m in &d.levels[prev + 1..c] {
            prod = prod.mul(m)?;
        }
        levels.push(prod);
        prev = c;
    }
    BratteliDiagram::new(levels, None)
}

/// Dimension vector by path counting from the root: level 0 is the root
/// vector (1); level 1 carries all-ones (unit root edges); level k+1 is the
/// level-k vector pushed through incidence matrix k.
pub fn dimension_vector(d: &BratteliDiagram, level: usize) -> Result<Vec<BigInt>, Error> {
    if level == 0 {
        return Ok(vec![BigInt::one()]);
    }
    if level > d.levels.len() + 1 {
        return Err(Error::Range(format!(
            "level {} beyond the generated prefix ({} incidence matrices)",
            level,
            d.levels.len()
        )));
    }
    let mut v = vec![BigInt::one(); d.root_arity];
    for m in &d.levels[..level - 1] {
        v = m.vec_mul(&v)?;
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailVerdict {
    /// Dropping `prefix1` levels of the first diagram and `prefix2` of the
    /// second leaves literally equal level sequences.
    Witness { prefix1: usize, prefix2: usize },
    NoWitnessWithinDepth,
}

/// Bounded common-block check: search prefix drops (p1, p2) <= depth after
/// which the level sequences agree on every comparable index. Sound and
/// incomplete by design; declared periodic tails extend the comparison
/// soundly beyond the generated prefixes.
pub fn tail_equivalent_bounded(
    d1: &BratteliDiagram,
    d2: &BratteliDiagram,
    depth: usize,
    permutation_tolerant: bool,
) -> TailVerdict {
    for total in 0..=(2 * depth) {
        for p1 in 0..=total.min(depth) {
            let p2 = total - p1;
            if p2 > depth || p1 > d1.levels.len() || p2 > d2.levels.len() {
                continue;
            }
            let horizon = compare_horizon(d1, p1, d2, p2);
            if horizon == 0 {
                continue;
            }
            let ok = if permutation_tolerant {
                sequences_equal_upto_permutation(d1, p1, d2, p2, horizon)
            } else {
                (0..horizon).all(|i| match (d1.level_at(p1 + i), d2.level_at(p2 + i)) {
                    (Some(a), Some(b)) => a == b,
                    _ => false,
                })
            };
            if ok {
                return TailVerdict::Witness { prefix1: p1, prefix2: p2 };
            }
        }
    }
    TailVerdict::NoWitnessWithinDepth
}

fn lcm_usize(a: usize, b: usize) -> usize {
    let gcd = |mut a: usize, mut b: usize| {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    };
    a / gcd(a, b) * b
}

/// How many levels must agree for the witness to be meaningful: the full
/// overlap of the generated prefixes, extended past both prefixes by one
/// combined period when both diagrams declare tails.
fn compare_horizon(d1: &BratteliDiagram, p1: usize, d2: &BratteliDiagram, p2: usize) -> usize {
    match (d1.periodic_tail, d2.periodic_tail) {
        (Some((_, per1)), Some((_, per2))) => {
            let base = (d1.levels.len() - p1).max(d2.levels.len() - p2);
            base + lcm_usize(per1, per2)
        }
        _ => (d1.levels.len() - p1).min(d2.levels.len() - p2),
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur: Vec<usize> = (0..n).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            if k % 2 == 0 {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut cur, &mut out);
    out.sort();
    out
}

/// Equality of level sequences up to a consistent relabeling of vertices at
/// every compared level (the permutation-tolerant variant).
fn sequences_equal_upto_permutation(
    d1: &BratteliDiagram,
    p1: usize,
    d2: &BratteliDiagram,
    p2: usize,
    horizon: usize,
) -> bool {
    let Some(first1) = d1.level_at(p1) else { return false };
    let Some(first2) = d2.level_at(p2) else { return false };
    if first1.rows() != first2.rows() {
        return false;
    }
    // DFS over row permutations per level: sigma maps vertices of d1's
    // level to d2's. matches(i, sigma): levels i.. agree given the entry
    // relabeling sigma.
    fn matches(
        d1: &BratteliDiagram,
        p1: usize,
        d2: &BratteliDiagram,
        p2: usize,
        i: usize,
        horizon: usize,
        sigma: &[usize],
        failed: &mut std::collections::HashSet<(usize, Vec<usize>)>,
    ) -> bool {
        if i == horizon {
            return true;
        }
        let key = (i, sigma.to_vec());
        if failed.contains(&key) {
            return false;
        }
        let (Some(a), Some(b)) = (d1.level_at(p1 + i), d2.level_at(p2 + i)) else {
            return false;
        };
        if a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != sigma.len() {
            failed.insert(key);
            return false;
        }
        for tau in permutations(a.cols()) {
            let ok = (0..a.rows())
                .all(|r| (0..a.cols()).all(|c| a.at(r, c) == b.at(sigma[r], tau[c])));
            if ok
                && matches(d1, p1, d2, p2, i + 1, horizon, &tau, failed)
            {
                return true;
            }
        }
        failed.insert(key);
        false
    }
    let mut failed = std::collections::HashSet::new();
    permutations(first1.rows())
        .into_iter()
        .any(|sigma| matches(d1, p1, d2, p2, 0, horizon, &sigma, &mut failed))
}

/// Deterministic DOT rendering: vertices v{level}_{index}, parallel edges
/// collapsed into multiplicity labels, byte-stable ordering.
pub fn dot_export(d: &BratteliDiagram) -> String {
    let mut out = String::from("digraph bratteli {\n  rankdir=LR;\n");
    out.push_str("  v0_0;\n");
    let mut counts = vec![d.root_arity];
    for m in &d.levels {
        counts.push(m.cols());
    }
    for (lvl, &c) in counts.iter().enumerate() {
        for j in 0..c {
            out.push_str(&format!("  v{}_{};\n", lvl + 1, j));
        }
    }
    for j in 0..d.root_arity {
        out.push_str(&format!("  v0_0 -> v1_{} [label=\"1\"];\n", j));
    }
    for (k, m) in d.levels.iter().enumerate() {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let mult = m.at(r, c);
                if mult.is_zero() {
                    continue;
                }
                out.push_str(&format!(
                    "  v{}_{} -> v{}_{} [label=\"{}\"];\n",
                    k + 1,
                    r,
                    k + 2,
                    c,
                    mult
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}
