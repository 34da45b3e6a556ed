//! Empirical lower bounds on the walk spectral radius: exact closed-walk
//! counts at the identity, and the top eigenvalue of the ball-truncated
//! transition operator. Every certified upper bound has to clear these.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::ball::{Ball, ABSENT};
use crate::{Error, Result};

/// Maximum number of power-iteration steps before giving up.
pub const MAX_POWER_ITERATIONS: usize = 100_000;

/// Exact counts `W_{2n}` of closed walks of length `2n` at the identity,
/// for `n = 0..=nmax`.
///
/// Invariants (all asserted by tests, the first by construction): `W_0 =
/// 1`, `W_2 = k`, odd-length counts vanish (the graph is bipartite),
/// `W_{2(n+m)} ≥ W_{2n}·W_{2m}` (concatenation through the identity), and
/// `p_{2n}^{1/2n}` is nondecreasing in `n`.
#[derive(Debug, Clone)]
pub struct WalkTable {
    counts: Vec<BigUint>,
    k: usize,
}

/// Natural log of a nonzero big integer, exact mantissa up to 53 bits.
fn ln_biguint(w: &BigUint) -> f64 {
    debug_assert!(!w.is_zero());
    let bits = w.bits();
    if bits <= 53 {
        w.to_f64().expect("fits in f64").ln()
    } else {
        let shift = bits - 53;
        let top = w >> shift;
        top.to_f64().expect("53-bit value").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

impl WalkTable {
    /// Largest pair-step index stored.
    pub fn nmax(&self) -> usize {
        self.counts.len() - 1
    }

    /// Graph degree `k`.
    pub fn degree(&self) -> usize {
        self.k
    }

    /// Exact count `W_{2n}`.
    pub fn count(&self, n: usize) -> &BigUint {
        &self.counts[n]
    }

    /// Return probability `p_{2n} = W_{2n}/k^{2n}`.
    pub fn return_probability(&self, n: usize) -> f64 {
        if self.counts[n].is_zero() {
            return 0.0;
        }
        (ln_biguint(&self.counts[n]) - 2.0 * n as f64 * (self.k as f64).ln()).exp()
    }

    /// `p_{2n}^{1/2n} = W_{2n}^{1/2n}/k`, for `n ≥ 1`.
    pub fn root(&self, n: usize) -> f64 {
        assert!(n >= 1, "root index must be ≥ 1");
        if self.counts[n].is_zero() {
            return 0.0;
        }
        (ln_biguint(&self.counts[n]) / (2.0 * n as f64)).exp() / self.k as f64
    }

    /// Exact check of `W_{2(n+m)} ≥ W_{2n}·W_{2m}` for every admissible
    /// pair.
    pub fn is_supermultiplicative(&self) -> bool {
        let nmax = self.nmax();
        for n in 0..=nmax {
            for m in n..=nmax - n {
                if self.counts[n + m] < &self.counts[n] * &self.counts[m] {
                    return false;
                }
            }
        }
        true
    }

    /// Exact check that `W_{2n}^{1/2n}` is nondecreasing in `n`, done in
    /// integer arithmetic by comparing cross powers `W_{2n}^{n+1}` against
    /// `W_{2(n+1)}^{n}`.
    pub fn roots_nondecreasing(&self) -> bool {
        for n in 1..self.nmax() {
            let lhs = self.counts[n].pow(n as u32 + 1);
            let rhs = self.counts[n + 1].pow(n as u32);
            if lhs > rhs {
                return false;
            }
        }
        true
    }

    /// CSV export: columns `n`, `W_2n` (decimal), `p_2n`, `p_2n^(1/2n)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,W_2n,p_2n,p_2n^(1/2n)\n");
        for n in 0..=self.nmax() {
            let root = if n == 0 {
                "-".to_string()
            } else {
                format!("{:.12}", self.root(n))
            };
            out.push_str(&format!(
                "{},{},{:.12e},{}\n",
                n,
                self.counts[n],
                self.return_probability(n),
                root
            ));
        }
        out
    }
}

/// Count closed walks at the identity by exact dynamic programming over
/// the ball: `2·nmax` steps of neighbor sums in unbounded integers.
///
/// Requires `radius ≥ nmax`: a closed walk of length `2n` never leaves the
/// radius-`n` ball, so all counts come out exact — there is no silent
/// approximation at the boundary.
pub fn closed_walk_counts(b: &Ball, nmax: usize) -> Result<WalkTable> {
    if b.radius() < nmax {
        return Err(Error::InsufficientRadius {
            radius: b.radius(),
            needed: "closed-walk counting needs radius ≥ nmax for exactness",
        });
    }
    let n_vertices = b.num_vertices();
    let k = b.degree();
    let mut current: Vec<BigUint> = vec![BigUint::zero(); n_vertices];
    current[0] = BigUint::one();
    let mut counts = Vec::with_capacity(nmax + 1);
    counts.push(BigUint::one());
    let mut next: Vec<BigUint> = vec![BigUint::zero(); n_vertices];
    for step in 1..=2 * nmax {
        for v in 0..n_vertices {
            let mut acc = BigUint::zero();
            for &u in b.neighbors(v as u32) {
                if u != ABSENT {
                    acc += &current[u as usize];
                }
            }
            next[v] = acc;
        }
        std::mem::swap(&mut current, &mut next);
        if step % 2 == 0 {
            counts.push(current[0].clone());
        } else if !current[0].is_zero() {
            return Err(Error::Internal(format!(
                "bipartite parity violated: nonzero identity count after \
                 {step} steps"
            )));
        }
    }
    Ok(WalkTable { counts, k })
}

/// Best walk-count lower bound on the spectral radius: the largest
/// `p_{2n}^{1/2n}` in the table. By monotonicity this is the last entry;
/// both are computed and the maximum returned. Requires `nmax ≥ 1`.
pub fn return_prob_lower(t: &WalkTable) -> f64 {
    assert!(t.nmax() >= 1, "walk table must extend past n = 0");
    (1..=t.nmax())
        .map(|n| t.root(n))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Deterministic Rayleigh quotient of `x` with respect to the transition
/// operator `A/k` (fixed vertex and neighbor order).
fn rayleigh(b: &Ball, x: &[f64]) -> f64 {
    let k = b.degree() as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for v in 0..b.num_vertices() {
        let mut row = 0.0;
        for &u in b.neighbors(v as u32) {
            if u != ABSENT {
                row += x[u as usize];
            }
        }
        num += x[v] * row / k;
        den += x[v] * x[v];
    }
    num / den
}

/// Top eigenvalue of the ball-truncated transition operator `A/k`, by
/// power iteration started from the indicator of the identity.
///
/// The ball is bipartite, so the iteration actually runs on the shifted
/// operator `I + A/k` — same top eigenvector, but the spectrum becomes
/// nonnegative, which stops the parity oscillation that would otherwise
/// keep the iterate orthogonal to its own image. The reported value is the
/// Rayleigh quotient with respect to `A/k` itself, which is a valid lower
/// bound on the full operator norm at every iterate; iteration stops when
/// it changes by less than `tol ∈ (0, 1e−6]`.
pub fn dirichlet_top_eigenvalue(b: &Ball, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "must lie in (0, 1e-6]",
        });
    }
    let n = b.num_vertices();
    let k = b.degree() as f64;
    let mut x = vec![0.0f64; n];
    x[0] = 1.0;
    let mut prev = rayleigh(b, &x);
    for _ in 0..MAX_POWER_ITERATIONS {
        let mut y = vec![0.0f64; n];
        for v in 0..n {
            let mut row = 0.0;
            for &u in b.neighbors(v as u32) {
                if u != ABSENT {
                    row += x[u as usize];
                }
            }
            y[v] = x[v] + row / k;
        }
        let norm = y.iter().map(|t| t * t).sum::<f64>().sqrt();
        for t in &mut y {
            *t /= norm;
        }
        let r = rayleigh(b, &y);
        x = y;
        if (r - prev).abs() < tol {
            return Ok(r);
        }
        prev = r;
    }
    Err(Error::ConvergenceFailed {
        iterations: MAX_POWER_ITERATIONS,
        last: prev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::build_ball;
    use crate::bounds;
    use crate::words::Presentation;

    fn ball2(r: usize) -> Ball {
        build_ball(&Presentation::surface(2).unwrap(), r).unwrap()
    }

    /// Independent oracle: depth-first enumeration of every walk from the
    /// identity of length ≤ 2·nmax, pruned when the current level exceeds
    /// the remaining step budget, tallying arrivals at the identity.
    fn dfs_walk_counts(b: &Ball, max_len: usize) -> Vec<u64> {
        fn go(b: &Ball, v: u32, used: usize, max_len: usize, tally: &mut [u64]) {
            if v == 0 {
                tally[used] += 1;
            }
            if used == max_len {
                return;
            }
            let remaining = max_len - used;
            for &u in b.neighbors(v) {
                if u != ABSENT && b.level_of(u) <= remaining - 1 {
                    go(b, u, used + 1, max_len, tally);
                }
            }
        }
        let mut tally = vec![0u64; max_len + 1];
        go(b, 0, 0, max_len, &mut tally);
        tally
    }

    #[test]
    fn two_and_four_step_counts() {
        let b = ball2(2);
        let t = closed_walk_counts(&b, 2).unwrap();
        assert_eq!(t.count(0), &BigUint::from(1u32));
        assert_eq!(t.count(1), &BigUint::from(8u32));
        assert_eq!(t.count(2), &BigUint::from(120u32));
    }

    #[test]
    fn eight_step_count_exceeds_the_tree_by_the_relator_walks() {
        let surface = closed_walk_counts(&ball2(4), 4).unwrap();
        let free_ball = build_ball(&Presentation::free(8).unwrap(), 4).unwrap();
        let tree = closed_walk_counts(&free_ball, 4).unwrap();
        // Lengths 0..6 see no relator (girth 8): identical counts.
        for n in 0..=3 {
            assert_eq!(surface.count(n), tree.count(n));
        }
        // At length 8 the sixteen relator traversals (8 rotations × 2
        // directions) appear, each tracing an embedded octagon.
        assert!(surface.count(4) > tree.count(4));
        let excess = surface.count(4) - tree.count(4);
        assert_eq!(excess, BigUint::from(16u32));
    }

    #[test]
    fn dynamic_program_matches_depth_first_enumeration() {
        let b = ball2(4);
        let t = closed_walk_counts(&b, 4).unwrap();
        let oracle = dfs_walk_counts(&b, 8);
        for n in 0..=4 {
            assert_eq!(t.count(n), &BigUint::from(oracle[2 * n]));
        }
        for len in (1..=7).step_by(2) {
            assert_eq!(oracle[len], 0, "odd-length walk closed at length {len}");
        }
    }

    #[test]
    fn table_invariants_hold_exactly() {
        let t = closed_walk_counts(&ball2(5), 5).unwrap();
        assert!(t.is_supermultiplicative());
        assert!(t.roots_nondecreasing());
    }

    #[test]
    fn return_probability_lower_bounds() {
        let t1 = closed_walk_counts(&ball2(1), 1).unwrap();
        let expected = 1.0 / 8.0f64.sqrt();
        assert!((return_prob_lower(&t1) - expected).abs() < 1e-12);

        let t2 = closed_walk_counts(&ball2(2), 2).unwrap();
        let expected = 120.0f64.powf(0.25) / 8.0;
        assert!((return_prob_lower(&t2) - expected).abs() < 1e-12);
        // Monotonicity makes the last root the maximum.
        assert_eq!(return_prob_lower(&t2), t2.root(2));
    }

    #[test]
    fn insufficient_radius_is_refused() {
        let b = ball2(2);
        match closed_walk_counts(&b, 3) {
            Err(Error::InsufficientRadius { radius: 2, .. }) => {}
            other => panic!("expected insufficient radius, got {other:?}"),
        }
    }

    #[test]
    fn point_ball_has_zero_top_eigenvalue() {
        let b = ball2(0);
        let r = dirichlet_top_eigenvalue(&b, 1e-9).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn star_ball_matches_the_known_eigenvalue() {
        // K_{1,8} has spectral norm √8, so A/8 tops out at 1/√8.
        let b = ball2(1);
        let r = dirichlet_top_eigenvalue(&b, 1e-9).unwrap();
        assert!((r - 1.0 / 8.0f64.sqrt()).abs() < 1e-6, "r = {r}");
    }

    #[test]
    fn tolerance_domain_is_enforced()  {
        let b = ball2(1);
        assert!(matches!(
            dirichlet_top_eigenvalue(&b, 0.0),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            dirichlet_top_eigenvalue(&b, 1e-5),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn ordering_chain_on_a_small_ball() {
        let b = ball2(4);
        let t = closed_walk_counts(&b, 4).unwrap();
        let lower = return_prob_lower(&t);
        let dirichlet = dirichlet_top_eigenvalue(&b, 1e-9).unwrap();
        assert!(lower <= dirichlet + 1e-9);
        let (_, one_form) = bounds::one_form_bound(8).unwrap();
        let tree = bounds::tree_bound(8, 7).unwrap();
        assert!(dirichlet < one_form.min(tree));
    }

    #[test]
    fn csv_export_shape() {
        let t = closed_walk_counts(&ball2(2), 2).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,W_2n,p_2n,p_2n^(1/2n)");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,1,") && lines[1].ends_with(",-"));
        assert!(lines[2].starts_with("1,8,"));
        assert!(lines[3].starts_with("2,120,"));
    }
}
