//! Finite balls of the Cayley graph: breadth-first construction keyed by
//! canonical geodesic words, vertex levels and types, and the metric checks
//! behind the type-structure claims (no vertex of type ≥ 3, type-2 vertices
//! pairwise far apart, type-1 vertices with convenient neighbours).

use std::collections::{BTreeSet, HashMap};

use crate::words::{inverse, Letter, Presentation, Word};
use crate::{Error, Result};

/// Sentinel for an adjacency slot whose neighbour lies outside the ball.
pub const ABSENT: u32 = u32::MAX;

/// Default cap on the number of vertices a ball may contain.
pub const DEFAULT_VERTEX_CAP: usize = 10_000_000;

/// The ball of a given radius around the identity, with flat adjacency.
///
/// Vertex ids are assigned level by level, lexicographically by canonical
/// word within a level, so identical inputs rebuild identical balls.
/// Vertex 0 is always the identity.
#[derive(Debug, Clone)]
pub struct Ball {
    k: usize,
    genus: Option<u32>,
    radius: usize,
    words: Vec<Word>,
    /// `level_offsets[l]..level_offsets[l+1]` is the id range of level `l`;
    /// length `radius + 2`.
    level_offsets: Vec<usize>,
    /// Row-major `n × k`: `adj[v*k + s]` is the neighbour of `v` via letter
    /// `s`, or [`ABSENT`].
    adj: Vec<u32>,
    /// Down-degree of each vertex (number of neighbours one level closer
    /// to the identity).
    types: Vec<u8>,
}

impl Ball {
    /// Number of letters (graph degree).
    pub fn degree(&self) -> usize {
        self.k
    }

    /// Genus of the underlying presentation, when it is a surface group.
    pub fn genus(&self) -> Option<u32> {
        self.genus
    }

    /// Ball radius.
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Total number of vertices.
    pub fn num_vertices(&self) -> usize {
        self.words.len()
    }

    /// Canonical word of a vertex.
    pub fn word(&self, v: u32) -> &[Letter] {
        &self.words[v as usize]
    }

    /// Distance of a vertex from the identity.
    pub fn level_of(&self, v: u32) -> usize {
        self.words[v as usize].len()
    }

    /// Adjacency row of a vertex: one slot per letter, [`ABSENT`] when the
    /// neighbour lies outside the ball.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        let k = self.k;
        &self.adj[v as usize * k..(v as usize + 1) * k]
    }

    /// Whether all of a vertex's neighbours lie inside the ball.
    pub fn is_interior(&self, v: u32) -> bool {
        self.level_of(v) < self.radius
    }

    /// Number of in-ball neighbours.
    pub fn in_ball_degree(&self, v: u32) -> usize {
        self.neighbors(v).iter().filter(|&&u| u != ABSENT).count()
    }

    /// Vertex type: the number of neighbours one level closer to the
    /// identity. Always exact, since down-neighbours are always in-ball.
    pub fn type_of(&self, v: u32) -> u8 {
        self.types[v as usize]
    }

    /// Types of all vertices, indexed by id.
    pub fn types(&self) -> &[u8] {
        &self.types
    }

    /// Ids of one level, as a range.
    pub fn level_range(&self, level: usize) -> std::ops::Range<u32> {
        self.level_offsets[level] as u32..self.level_offsets[level + 1] as u32
    }

    /// Vertex counts per level, length `radius + 1`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        (0..=self.radius)
            .map(|l| self.level_offsets[l + 1] - self.level_offsets[l])
            .collect()
    }

    /// Iterate over the unique undirected in-ball edges as
    /// `(u, v, letter from u)` with `u < v`, ordered by `u`, then letter.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, Letter)> + '_ {
        (0..self.num_vertices() as u32).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .enumerate()
                .filter_map(move |(s, &v)| {
                    if v != ABSENT && u < v {
                        Some((u, v, s as Letter))
                    } else {
                        None
                    }
                })
        })
    }

    /// Text dump: a header line `vertices N radius R genus G`, then one
    /// line `u v letterIndex` per undirected edge.
    pub fn dump_edges(&self) -> String {
        let genus = self
            .genus
            .map_or_else(|| "-".to_string(), |g| g.to_string());
        let mut out = format!(
            "vertices {} radius {} genus {}\n",
            self.num_vertices(),
            self.radius,
            genus
        );
        for (u, v, s) in self.edges() {
            out.push_str(&format!("{u} {v} {s}\n"));
        }
        out
    }
}

/// Build the radius-`r` ball with the default vertex cap.
pub fn build_ball(p: &Presentation, r: usize) -> Result<Ball> {
    build_ball_capped(p, r, DEFAULT_VERTEX_CAP)
}

/// Build the radius-`r` ball, failing once more than `cap` vertices exist.
pub fn build_ball_capped(p: &Presentation, r: usize, cap: usize) -> Result<Ball> {
    let k = p.letter_count();
    let mut words: Vec<Word> = vec![Word::new()];
    let mut level_offsets: Vec<usize> = vec![0, 1];
    let mut index: HashMap<Word, u32> = HashMap::new();
    index.insert(Word::new(), 0);
    let mut adj: Vec<u32> = vec![ABSENT; k];

    for level in 0..=r {
        let row_range = level_offsets[level]..level_offsets[level + 1];
        let mut frontier: BTreeSet<Word> = BTreeSet::new();
        // First sweep of this level: discover the next sphere.
        if level < r {
            for v in row_range.clone() {
                let w = words[v].clone();
                for s in 0..k as Letter {
                    let c = p.canonical_geodesic(&{
                        let mut t = w.clone();
                        t.push(s);
                        t
                    });
                    if c.len() == level + 1 && !index.contains_key(&c) {
                        frontier.insert(c);
                    }
                }
            }
            if words.len() + frontier.len() > cap {
                return Err(Error::VertexCapExceeded { cap, radius: r });
            }
            for w in frontier {
                index.insert(w.clone(), words.len() as u32);
                words.push(w);
            }
            level_offsets.push(words.len());
            adj.resize(words.len() * k, ABSENT);
        }
        // Second sweep: fill adjacency rows of this level. Down and
        // same-level neighbour ids are already assigned; up-neighbours of
        // the previous level were assigned just above, so setting both
        // directions here completes every in-ball edge exactly once per
        // endpoint.
        for v in row_range {
            let w = words[v].clone();
            for s in 0..k as Letter {
                let c = p.canonical_geodesic(&{
                    let mut t = w.clone();
                    t.push(s);
                    t
                });
                if c.len() > level + 1 || (c.len() == level + 1 && level == r) {
                    continue; // outside the ball
                }
                let u = *index.get(&c).ok_or_else(|| {
                    Error::Internal(format!(
                        "word of length {} missing from level index",
                        c.len()
                    ))
                })?;
                adj[v * k + s as usize] = u;
                adj[u as usize * k + inverse(s) as usize] = v as u32;
            }
        }
    }

    // Down-degrees; these are exact because every neighbour closer to the
    // identity lies inside the ball.
    let mut types = vec![0u8; words.len()];
    for v in 0..words.len() {
        let lv = words[v].len();
        let mut t = 0u8;
        for s in 0..k {
            let u = adj[v * k + s];
            if u != ABSENT && words[u as usize].len() + 1 == lv {
                t += 1;
            }
        }
        types[v] = t;
    }

    let ball = Ball {
        k,
        genus: p.genus(),
        radius: r,
        words,
        level_offsets,
        adj,
        types,
    };
    validate_ball(p, &ball)?;
    Ok(ball)
}

/// Structural invariants every freshly built ball must satisfy: involutive
/// adjacency, levels differing by one across edges for bipartite
/// presentations (surface and free), and the type bound t ≤ 2 for surface
/// groups.
fn validate_ball(p: &Presentation, b: &Ball) -> Result<()> {
    let k = b.k;
    let bipartite_known = p.genus().is_some() || p.relators().is_empty();
    for v in 0..b.num_vertices() as u32 {
        for s in 0..k {
            let u = b.adj[v as usize * k + s];
            if u == ABSENT {
                continue;
            }
            if b.adj[u as usize * k + inverse(s as Letter) as usize] != v {
                return Err(Error::Internal(format!(
                    "adjacency not involutive at vertex {v} letter {s}"
                )));
            }
            if bipartite_known {
                let (lv, lu) = (b.level_of(v), b.level_of(u));
                if lv.abs_diff(lu) != 1 {
                    return Err(Error::Internal(format!(
                        "level-preserving edge {v}–{u} in a bipartite graph"
                    )));
                }
            }
        }
        if p.genus().is_some() && b.types[v as usize] > 2 {
            return Err(Error::Internal(format!(
                "vertex {v} has type {} > 2",
                b.types[v as usize]
            )));
        }
    }
    if b.types[0] != 0 {
        return Err(Error::Internal("identity must have type 0".into()));
    }
    Ok(())
}

/// Outcome of the vertex-type and metric checks on one ball.
#[derive(Debug, Clone)]
pub struct TypeReport {
    /// Vertex type per id.
    pub types: Vec<u8>,
    /// Vertices of type ≥ 3 (must stay empty for surface groups).
    pub violations: Vec<u32>,
    /// Pairs of type-2 vertices at mutual distance ≤ 2 — each is a genuine
    /// short path inside the ball, hence a genuine violation.
    pub type2_pairs: Vec<(u32, u32)>,
    /// Certifiable type-1 vertices with no convenient neighbour.
    pub convenient_misses: Vec<u32>,
    /// Type-2 pairs whose mutual distance could not be certified (both
    /// endpoints on the boundary sphere, where a connecting midpoint may
    /// lie outside the ball).
    pub skipped_pairs: u64,
    /// Type-1 vertices checked for a convenient neighbour.
    pub checked_type1: u64,
    /// Type-1 vertices too close to the boundary to certify.
    pub deferred_type1: u64,
    /// Least number of certified convenient neighbours over all checked
    /// type-1 vertices (an in-ball lower bound on the true count).
    pub min_convenient_count: Option<u32>,
}

impl TypeReport {
    /// True when every checked claim holds.
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
            && self.type2_pairs.is_empty()
            && self.convenient_misses.is_empty()
    }
}

/// Types only: the report with the metric checks left empty.
pub fn vertex_types(b: &Ball) -> TypeReport {
    let violations = (0..b.num_vertices() as u32)
        .filter(|&v| b.type_of(v) >= 3)
        .collect();
    TypeReport {
        types: b.types.clone(),
        violations,
        type2_pairs: Vec::new(),
        convenient_misses: Vec::new(),
        skipped_pairs: 0,
        checked_type1: 0,
        deferred_type1: 0,
        min_convenient_count: None,
    }
}

/// Whether `y` qualifies as a convenient neighbour: `y` of type 1 and
/// every in-ball neighbour of `y` of type ≤ 1. Only meaningful when `y`'s
/// whole neighbourhood lies inside the ball.
fn is_convenient(b: &Ball, y: u32) -> bool {
    if b.type_of(y) != 1 {
        return false;
    }
    b.neighbors(y)
        .iter()
        .all(|&z| z != ABSENT && b.type_of(z) <= 1)
}

/// Full metric check of the type structure:
///
/// * no vertex of type ≥ 3 anywhere;
/// * no two type-2 vertices at distance ≤ 2, over every pair whose
///   connecting paths are certifiably visible (pairs with both endpoints
///   on the boundary sphere are only counted as skipped);
/// * every type-1 vertex far enough from the boundary has a neighbour one
///   level up whose whole neighbourhood is type 1.
pub fn check_geometric_proposition(b: &Ball) -> Result<TypeReport> {
    if b.radius < 3 {
        return Err(Error::InsufficientRadius {
            radius: b.radius,
            needed: "the metric type checks need radius at least 3",
        });
    }
    let mut report = vertex_types(b);
    let r = b.radius;

    // Type-2 pairs at distance ≤ 2: sweep midpoints (distance 2) and edges
    // (distance 1). Any hit is a real short path. Only pairs with both
    // vertices at level R can hide behind an out-of-ball midpoint.
    let mut pairs: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut flagged_boundary_pairs: u64 = 0;
    for m in 0..b.num_vertices() as u32 {
        let t2: Vec<u32> = b
            .neighbors(m)
            .iter()
            .copied()
            .filter(|&y| y != ABSENT && b.type_of(y) == 2)
            .collect();
        if b.type_of(m) == 2 {
            for &y in &t2 {
                let p = (m.min(y), m.max(y));
                pairs.insert(p);
            }
        }
        for i in 0..t2.len() {
            for j in i + 1..t2.len() {
                let p = (t2[i].min(t2[j]), t2[i].max(t2[j]));
                if pairs.insert(p)
                    && b.level_of(p.0) == r
                    && b.level_of(p.1) == r
                {
                    flagged_boundary_pairs += 1;
                }
            }
        }
    }
    report.type2_pairs = pairs.into_iter().collect();
    let boundary_t2 = b
        .level_range(r)
        .filter(|&v| b.type_of(v) == 2)
        .count() as u64;
    report.skipped_pairs =
        boundary_t2 * boundary_t2.saturating_sub(1) / 2 - flagged_boundary_pairs;

    // Convenient neighbours for type-1 vertices. A candidate y sits one
    // level above x; certifying y needs y's full neighbourhood, so x must
    // be at level ≤ R − 2.
    let mut min_count: Option<u32> = None;
    for x in 0..b.num_vertices() as u32 {
        if b.type_of(x) != 1 {
            continue;
        }
        if b.level_of(x) > r - 2 {
            report.deferred_type1 += 1;
            continue;
        }
        report.checked_type1 += 1;
        let lx = b.level_of(x);
        let count = b
            .neighbors(x)
            .iter()
            .filter(|&&y| {
                y != ABSENT && b.level_of(y) == lx + 1 && is_convenient(b, y)
            })
            .count() as u32;
        if count == 0 {
            report.convenient_misses.push(x);
        }
        min_count = Some(min_count.map_or(count, |m| m.min(count)));
    }
    report.min_convenient_count = min_count;
    Ok(report)
}

/// Length of the shortest cycle through the identity that is visible
/// inside the ball, or `None` when the in-ball graph is a tree. Cycles of
/// length up to `2·radius` through the identity are always visible.
pub fn girth_through_identity(b: &Ball) -> Option<usize> {
    let n = b.num_vertices();
    let root_neighbors: Vec<u32> = b
        .neighbors(0)
        .iter()
        .copied()
        .filter(|&u| u != ABSENT)
        .collect();
    let mut best: Option<usize> = None;
    for (i, &start) in root_neighbors.iter().enumerate() {
        // BFS from one neighbour of the identity, with the identity
        // removed; reaching a later neighbour closes a cycle through it.
        let mut dist: Vec<u32> = vec![ABSENT; n];
        dist[start as usize] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in b.neighbors(v) {
                if u == ABSENT || u == 0 || dist[u as usize] != ABSENT {
                    continue;
                }
                dist[u as usize] = dist[v as usize] + 1;
                queue.push_back(u);
            }
        }
        for &other in &root_neighbors[i + 1..] {
            if dist[other as usize] != ABSENT {
                let cycle = dist[other as usize] as usize + 2;
                best = Some(best.map_or(cycle, |b| b.min(cycle)));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball2(r: usize) -> Ball {
        build_ball(&Presentation::surface(2).unwrap(), r).unwrap()
    }

    #[test]
    fn radius_one_ball_is_identity_plus_all_generators() {
        let b = ball2(1);
        assert_eq!(b.num_vertices(), 9);
        assert_eq!(b.sphere_sizes(), vec![1, 8]);
        assert_eq!(b.type_of(0), 0);
        for v in 1..9 {
            assert_eq!(b.type_of(v), 1);
            assert_eq!(b.level_of(v), 1);
        }
    }

    #[test]
    fn radius_zero_ball_is_a_point() {
        let b = ball2(0);
        assert_eq!(b.sphere_sizes(), vec![1]);
        assert_eq!(b.in_ball_degree(0), 0);
    }

    #[test]
    fn small_spheres_grow_like_the_free_group() {
        // No relation of length ≤ 6 exists (relator length 8), so levels
        // up to 3 match the 8-regular tree.
        let b = ball2(3);
        assert_eq!(b.sphere_sizes(), vec![1, 8, 56, 392]);
    }

    #[test]
    fn level_four_sphere_loses_one_vertex_per_octagon() {
        let b = ball2(4);
        // 8·7³ = 2744 tree words collapse to 2736 vertices: each of the 8
        // octagons through the identity identifies one antipodal pair.
        assert_eq!(b.sphere_sizes(), vec![1, 8, 56, 392, 2736]);
        let t2: Vec<u32> = b
            .level_range(4)
            .filter(|&v| b.type_of(v) == 2)
            .collect();
        assert_eq!(t2.len(), 8);
        // Everything below the identification level is type 1.
        for l in 1..4 {
            assert!(b.level_range(l).all(|v| b.type_of(v) == 1));
        }
    }

    #[test]
    fn genus_three_sphere_sizes_start_like_the_twelve_regular_tree() {
        let p = Presentation::surface(3).unwrap();
        let b = build_ball(&p, 2).unwrap();
        assert_eq!(b.sphere_sizes(), vec![1, 12, 132]);
    }

    #[test]
    fn adjacency_is_involutive_and_unit_level_steps() {
        let b = ball2(3);
        for v in 0..b.num_vertices() as u32 {
            for (s, &u) in b.neighbors(v).iter().enumerate() {
                if u == ABSENT {
                    continue;
                }
                assert_eq!(b.neighbors(u)[inverse(s as Letter) as usize], v);
                assert_eq!(b.level_of(v).abs_diff(b.level_of(u)), 1);
            }
        }
    }

    #[test]
    fn interior_vertices_have_full_degree() {
        let b = ball2(3);
        for v in 0..b.num_vertices() as u32 {
            if b.is_interior(v) {
                assert_eq!(b.in_ball_degree(v), 8);
            }
        }
    }

    #[test]
    fn level_equals_canonical_word_length() {
        let b = ball2(4);
        for l in 0..=4 {
            for v in b.level_range(l) {
                assert_eq!(b.word(v).len(), l);
            }
        }
    }

    #[test]
    fn vertex_cap_is_enforced() {
        let p = Presentation::surface(2).unwrap();
        match build_ball_capped(&p, 3, 100) {
            Err(Error::VertexCapExceeded { cap: 100, radius: 3 }) => {}
            other => panic!("expected vertex cap error, got {other:?}"),
        }
    }

    #[test]
    fn girth_through_identity_is_the_relator_length() {
        let b = ball2(4);
        assert_eq!(girth_through_identity(&b), Some(8));
        let free = build_ball(&Presentation::free(8).unwrap(), 4).unwrap();
        assert_eq!(girth_through_identity(&free), None);
        assert_eq!(free.sphere_sizes(), vec![1, 8, 56, 392, 2744]);
    }

    #[test]
    fn type_checks_are_clean_at_radius_five() {
        let b = ball2(5);
        let report = check_geometric_proposition(&b).unwrap();
        assert!(report.is_clean());
        assert!(report.checked_type1 > 0);
        assert!(report.min_convenient_count.unwrap() >= 1);
        // Every non-identity vertex is of type 1 or 2.
        for v in 1..b.num_vertices() as u32 {
            assert!(matches!(b.type_of(v), 1 | 2));
        }
    }

    #[test]
    fn metric_checks_refuse_tiny_balls() {
        let b = ball2(0);
        assert!(matches!(
            check_geometric_proposition(&b),
            Err(Error::InsufficientRadius { radius: 0, .. })
        ));
    }

    #[test]
    fn edge_dump_has_header_and_one_line_per_edge() {
        let b = ball2(1);
        let dump = b.dump_edges();
        let mut lines = dump.lines();
        assert_eq!(lines.next(), Some("vertices 9 radius 1 genus 2"));
        let rest: Vec<&str> = lines.collect();
        assert_eq!(rest.len(), 8);
        assert!(rest.iter().all(|l| l.starts_with("0 ")));
    }
}
