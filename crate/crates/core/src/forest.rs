//! A spanning forest of (k−1)-regular trees inside a ball, built by
//! deleting one matching edge per vertex, and the certification that the
//! result really is such a forest.
//!
//! Construction runs in two phases. Phase 1 gives every type-2 vertex
//! degree k−1 by cutting one of its two down-edges. Phase 2 walks the
//! levels outward from the identity; every vertex still of full degree
//! cuts the edge to one convenient neighbour one level up — a neighbour of
//! type ≤ 1 none of whose neighbours is of type 2, which guarantees the cut
//! edge is not needed by either phase elsewhere. Near the ball boundary
//! conveniency cannot be certified, so those vertices are left untouched
//! and flagged as deferred; every claim the verifier makes is restricted
//! to the certified region.

use std::collections::BTreeMap;

use crate::ball::{Ball, ABSENT};
use crate::words::{inverse, Letter};
use crate::{Error, Result};

/// Which construction phase removed an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Down-edge cut at a type-2 vertex.
    One,
    /// Edge cut from a full-degree vertex to its convenient neighbour.
    Two,
}

/// The set of removed edges, plus the vertices whose final degree the
/// ball is too small to certify.
#[derive(Debug, Clone)]
pub struct ForestMask {
    /// Removed edges keyed by their oriented representative from the
    /// smaller endpoint: `(min(u,v), letter from that endpoint)`.
    removed: BTreeMap<(u32, Letter), Phase>,
    /// Per vertex: true when the (k−1)-degree claim cannot be certified
    /// in-ball — the whole boundary sphere, plus interior vertices left at
    /// full degree because no convenient neighbour was certifiable.
    pub deferred: Vec<bool>,
}

impl ForestMask {
    /// Oriented representative of the in-ball edge `(v, s)`, from its
    /// smaller endpoint; `None` when the slot is empty.
    fn normalize(b: &Ball, v: u32, s: Letter) -> Option<(u32, Letter)> {
        let u = b.neighbors(v)[s as usize];
        if u == ABSENT {
            None
        } else if v < u {
            Some((v, s))
        } else {
            Some((u, inverse(s)))
        }
    }

    /// Whether the edge from `v` via letter `s` was removed. An absent
    /// slot is never removed.
    pub fn is_removed(&self, b: &Ball, v: u32, s: Letter) -> bool {
        Self::normalize(b, v, s)
            .is_some_and(|key| self.removed.contains_key(&key))
    }

    /// Phase that removed the edge, if it was removed.
    pub fn removal_phase(&self, b: &Ball, v: u32, s: Letter) -> Option<Phase> {
        self.removed.get(&Self::normalize(b, v, s)?).copied()
    }

    /// Removed edges in deterministic order.
    pub fn removed_edges(&self) -> impl Iterator<Item = (u32, Letter, Phase)> + '_ {
        self.removed.iter().map(|(&(v, s), &p)| (v, s, p))
    }

    /// Number of edges removed by each phase.
    pub fn counts(&self) -> (usize, usize) {
        let p1 = self
            .removed
            .values()
            .filter(|&&p| p == Phase::One)
            .count();
        (p1, self.removed.len() - p1)
    }

    /// Surviving in-ball degree of a vertex.
    pub fn masked_degree(&self, b: &Ball, v: u32) -> usize {
        b.neighbors(v)
            .iter()
            .enumerate()
            .filter(|&(s, &u)| u != ABSENT && !self.is_removed(b, v, s as Letter))
            .count()
    }

    /// Text dump: the ball's edge-list format with a trailing marker
    /// column `kept`, `removed-p1`, or `removed-p2`.
    pub fn dump_edges(&self, b: &Ball) -> String {
        let genus = b
            .genus()
            .map_or_else(|| "-".to_string(), |g| g.to_string());
        let mut out = format!(
            "vertices {} radius {} genus {}\n",
            b.num_vertices(),
            b.radius(),
            genus
        );
        for (u, v, s) in b.edges() {
            let marker = match self.removal_phase(b, u, s) {
                None => "kept",
                Some(Phase::One) => "removed-p1",
                Some(Phase::Two) => "removed-p2",
            };
            out.push_str(&format!("{u} {v} {s} {marker}\n"));
        }
        out
    }
}

/// Whether `y` may serve as a convenient neighbour: type ≤ 1, with every
/// in-ball neighbour of type ≤ 1. Callers must ensure `y`'s whole
/// neighbourhood is in-ball for the answer to be a certificate.
fn convenient(b: &Ball, y: u32) -> bool {
    b.type_of(y) <= 1
        && b
            .neighbors(y)
            .iter()
            .all(|&z| z != ABSENT && b.type_of(z) <= 1)
}

/// Run both construction phases on a ball.
///
/// Balls of any radius are accepted; at radius < 3 essentially everything
/// ends up deferred and the mask is only useful for the graceful paths of
/// the command-line verifier.
pub fn build_forest(b: &Ball) -> Result<ForestMask> {
    let k = b.degree();
    let n = b.num_vertices();
    let r = b.radius();
    let mut removed: BTreeMap<(u32, Letter), Phase> = BTreeMap::new();
    let mut degree: Vec<u32> = (0..n as u32).map(|v| b.in_ball_degree(v) as u32).collect();
    let mut touched_p1 = vec![false; n];

    let cut = |removed: &mut BTreeMap<(u32, Letter), Phase>,
                   degree: &mut Vec<u32>,
                   v: u32,
                   s: Letter,
                   phase: Phase| {
        let u = b.neighbors(v)[s as usize];
        let key = ForestMask::normalize(b, v, s).expect("cut edge must exist");
        let previous = removed.insert(key, phase);
        debug_assert!(previous.is_none(), "edge removed twice");
        degree[v as usize] -= 1;
        degree[u as usize] -= 1;
        u
    };

    // Phase 1: each type-2 vertex cuts the down-edge with the smaller
    // letter index.
    for v in 0..n as u32 {
        if b.type_of(v) != 2 {
            continue;
        }
        let lv = b.level_of(v);
        let s = b
            .neighbors(v)
            .iter()
            .enumerate()
            .find(|&(_, &u)| u != ABSENT && b.level_of(u) + 1 == lv)
            .map(|(s, _)| s as Letter)
            .ok_or_else(|| {
                Error::Internal(format!("type-2 vertex {v} has no down-edge"))
            })?;
        let u = cut(&mut removed, &mut degree, v, s, Phase::One);
        if touched_p1[v as usize] || touched_p1[u as usize] {
            return Err(Error::Internal(format!(
                "phase 1 touched a vertex twice at edge {v}–{u}"
            )));
        }
        touched_p1[v as usize] = true;
        touched_p1[u as usize] = true;
    }

    // Phase 2: in level order (which is id order), every vertex still of
    // full degree cuts the smallest-letter edge to a certifiably
    // convenient neighbour one level up. Certification needs the
    // neighbour's full neighbourhood, so only vertices at level ≤ R−2 can
    // be processed; fuller ones near the boundary are deferred.
    let mut deferred = vec![false; n];
    for v in 0..n as u32 {
        if degree[v as usize] != k as u32 {
            continue; // already reduced by an earlier cut
        }
        let lv = b.level_of(v);
        if lv + 2 > r {
            deferred[v as usize] = true;
            continue;
        }
        let choice = b
            .neighbors(v)
            .iter()
            .enumerate()
            .find(|&(_, &y)| {
                y != ABSENT && b.level_of(y) == lv + 1 && convenient(b, y)
            })
            .map(|(s, _)| s as Letter);
        match choice {
            Some(s) => {
                cut(&mut removed, &mut degree, v, s, Phase::Two);
            }
            None => {
                return Err(Error::Construction(format!(
                    "vertex {v} at level {lv} has no certifiable convenient \
                     neighbour"
                )));
            }
        }
    }
    // The whole boundary sphere stays uncertified: its up-edges are
    // invisible, so no in-ball degree claim is possible there.
    for v in b.level_range(r) {
        deferred[v as usize] = true;
    }

    Ok(ForestMask { removed, deferred })
}

/// Everything the forest verifier measures.
#[derive(Debug, Clone, Default)]
pub struct ForestCertificate {
    /// Non-deferred vertices whose masked degree is not k−1.
    pub degree_violations: Vec<(u32, usize)>,
    /// One surviving edge that closes a cycle, if any exists in-ball.
    pub cycle_witness: Option<(u32, u32)>,
    /// Vertices with no surviving in-ball edge.
    pub isolated: Vec<u32>,
    /// Vertices touched more than once by a single phase.
    pub phase_double_touch: Vec<u32>,
    /// Vertices touched by both phases together more than once — the
    /// removed set should form a matching.
    pub matching_violations: Vec<u32>,
    /// Vertices whose degree claim was certified.
    pub certified_vertices: u64,
    /// Vertices left deferred.
    pub deferred_vertices: u64,
}

impl ForestCertificate {
    pub fn passed(&self) -> bool {
        self.degree_violations.is_empty()
            && self.cycle_witness.is_none()
            && self.isolated.is_empty()
            && self.phase_double_touch.is_empty()
            && self.matching_violations.is_empty()
    }
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n as u32).collect())
    }
    fn find(&mut self, v: u32) -> u32 {
        let mut root = v;
        while self.0[root as usize] != root {
            root = self.0[root as usize];
        }
        let mut cur = v;
        while self.0[cur as usize] != root {
            let next = self.0[cur as usize];
            self.0[cur as usize] = root;
            cur = next;
        }
        root
    }
    /// Returns false when both endpoints already share a root.
    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[rb as usize] = ra;
        true
    }
}

/// Certify a mask against its ball: every non-deferred vertex has masked
/// degree exactly k−1; the surviving in-ball graph is acyclic; no vertex
/// is isolated; each phase touches a vertex at most once; and the two
/// phases together form a matching.
pub fn verify_forest(b: &Ball, mask: &ForestMask) -> ForestCertificate {
    let k = b.degree();
    let n = b.num_vertices();
    let mut cert = ForestCertificate::default();

    for v in 0..n as u32 {
        if mask.deferred[v as usize] {
            cert.deferred_vertices += 1;
            continue;
        }
        cert.certified_vertices += 1;
        let d = mask.masked_degree(b, v);
        if d != k - 1 {
            cert.degree_violations.push((v, d));
        }
    }

    let mut uf = UnionFind::new(n);
    let mut surviving = 0usize;
    for (u, v, s) in b.edges() {
        if mask.is_removed(b, u, s) {
            continue;
        }
        surviving += 1;
        if !uf.union(u, v) && cert.cycle_witness.is_none() {
            cert.cycle_witness = Some((u, v));
        }
    }
    let _ = surviving;

    let mut touches = vec![[0u32; 2]; n];
    for (v, s, phase) in mask.removed_edges() {
        let u = b.neighbors(v)[s as usize];
        let slot = (phase == Phase::Two) as usize;
        touches[v as usize][slot] += 1;
        touches[u as usize][slot] += 1;
    }
    for (v, t) in touches.iter().enumerate() {
        if t[0] > 1 || t[1] > 1 {
            cert.phase_double_touch.push(v as u32);
        }
        if t[0] + t[1] > 1 {
            cert.matching_violations.push(v as u32);
        }
    }

    for v in 0..n as u32 {
        if b.in_ball_degree(v) > 0 && mask.masked_degree(b, v) == 0 {
            cert.isolated.push(v);
        } else if b.in_ball_degree(v) == 0 && n > 1 {
            cert.isolated.push(v);
        }
    }

    cert
}

/// Number of connected components of the masked in-ball graph.
pub fn count_components(b: &Ball, mask: &ForestMask) -> usize {
    let n = b.num_vertices();
    let mut uf = UnionFind::new(n);
    let mut components = n;
    for (u, v, s) in b.edges() {
        if !mask.is_removed(b, u, s) && uf.union(u, v) {
            components -= 1;
        }
    }
    components
}
