//! Words over the generators of a surface (or free) group: free and Dehn
//! reduction, and canonical geodesic representatives.
//!
//! Letters are indexed `0..k`: letter `2m` is the m-th generator and
//! `2m + 1` its inverse, so inversion is `x ^ 1`. For genus `g` the
//! generators are ordered `a1, b1, a2, b2, …, ag, bg` and the single
//! relator is the product of commutators `[a1,b1]·[a2,b2]···[ag,bg]`,
//! a cyclic word of length `4g`.
//!
//! Dehn reduction repeatedly replaces the leftmost, shortest factor that
//! covers more than half of some relator cycle by the shorter complement.
//! A Dehn-reduced word is not always geodesic, though: swapping one half
//! of a relator cycle for the other half (a length-preserving move) can
//! expose a new over-half factor. [`Presentation::canonical_geodesic`]
//! therefore closes the word under half swaps, restarts from scratch
//! whenever any swap product Dehn-reduces to something shorter, and only
//! at a stable closure returns the lexicographically least word — a true
//! geodesic normal form.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::{Error, Result};

/// One generator or inverse generator, as an index below `k`.
pub type Letter = u16;

/// A word over the letters; not necessarily reduced.
pub type Word = Vec<Letter>;

/// The inverse letter: generators and their inverses sit in adjacent pairs.
#[inline]
pub fn inverse(x: Letter) -> Letter {
    x ^ 1
}

/// Inverse of a word: reverse the letters and invert each.
pub fn invert(w: &[Letter]) -> Word {
    w.iter().rev().map(|&x| inverse(x)).collect()
}

/// Free reduction: cancel adjacent `x x⁻¹` pairs until none remain.
pub fn free_reduce(w: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &x in w {
        if out.last() == Some(&inverse(x)) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Printable name of a letter: `a1, b1, a2, …` with capitals for inverses.
pub fn letter_name(x: Letter) -> String {
    let m = x / 2;
    let base = if m % 2 == 0 { 'a' } else { 'b' };
    let base = if x & 1 == 1 {
        base.to_ascii_uppercase()
    } else {
        base
    };
    format!("{}{}", base, m / 2 + 1)
}

/// Render a word as space-separated letter names; the empty word is `e`.
pub fn format_word(w: &[Letter]) -> String {
    if w.is_empty() {
        "e".to_string()
    } else {
        w.iter()
            .map(|&x| letter_name(x))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A finite presentation with paired letters and cyclically reduced
/// relators, preprocessed for Dehn scanning.
#[derive(Debug, Clone)]
pub struct Presentation {
    k: usize,
    genus: Option<u32>,
    relators: Vec<Word>,
    /// Factor (longer than half a relator cycle) → strictly shorter
    /// replacement equal to it in the group.
    over_half: HashMap<Word, Word>,
    /// Exactly-half factor → the equal-length complement representative.
    exact_half: HashMap<Word, Word>,
    /// Distinct half-lengths occurring among the relators, ascending.
    half_lens: Vec<usize>,
}

impl Presentation {
    /// General constructor: `k` letters (even, in inverse pairs) and a list
    /// of nonempty, cyclically reduced relator words.
    pub fn new(k: usize, relators: Vec<Word>) -> Result<Self> {
        if k < 2 || k % 2 != 0 {
            return Err(Error::InvalidPresentation(format!(
                "letter count {k} must be even and at least 2"
            )));
        }
        if k > u16::MAX as usize {
            return Err(Error::InvalidPresentation(format!(
                "letter count {k} exceeds the u16 letter index range"
            )));
        }
        for r in &relators {
            if r.is_empty() {
                return Err(Error::InvalidPresentation(
                    "empty relator".to_string(),
                ));
            }
            if let Some(&x) = r.iter().find(|&&x| (x as usize) >= k) {
                return Err(Error::InvalidPresentation(format!(
                    "relator letter {x} out of range for {k} letters"
                )));
            }
            if free_reduce(r) != *r {
                return Err(Error::InvalidPresentation(format!(
                    "relator {} is not freely reduced",
                    format_word(r)
                )));
            }
            if r.len() > 1 && r[0] == inverse(*r.last().unwrap()) {
                return Err(Error::InvalidPresentation(format!(
                    "relator {} is not cyclically reduced",
                    format_word(r)
                )));
            }
        }
        let mut p = Presentation {
            k,
            genus: None,
            relators,
            over_half: HashMap::new(),
            exact_half: HashMap::new(),
            half_lens: Vec::new(),
        };
        p.build_scan_tables()?;
        Ok(p)
    }

    /// The surface-group presentation of genus `g`: `4g` letters, one
    /// relator `[a1,b1]···[ag,bg]` of length `4g`.
    pub fn surface(g: u32) -> Result<Self> {
        if !(2..=10_000).contains(&g) {
            return Err(Error::InvalidGenus(g as u64));
        }
        let mut r: Word = Vec::with_capacity(4 * g as usize);
        for j in 0..g as u16 {
            // [a_{j+1}, b_{j+1}] = a b a⁻¹ b⁻¹ in letter indices.
            r.extend_from_slice(&[4 * j, 4 * j + 2, 4 * j + 1, 4 * j + 3]);
        }
        let mut p = Self::new(4 * g as usize, vec![r])?;
        p.genus = Some(g);
        Ok(p)
    }

    /// The free group on `k/2` generators: `k` letters, no relators.
    /// Words are canonical exactly when freely reduced.
    pub fn free(k: usize) -> Result<Self> {
        Self::new(k, Vec::new())
    }

    /// Number of letters (generators plus inverses).
    pub fn letter_count(&self) -> usize {
        self.k
    }

    /// Genus, when constructed via [`Presentation::surface`].
    pub fn genus(&self) -> Option<u32> {
        self.genus
    }

    /// The relators as given.
    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// All cyclic rotations of every relator and of every inverse relator.
    fn relator_cycles(&self) -> Vec<Word> {
        let mut cycles = Vec::new();
        for r in &self.relators {
            for base in [r.clone(), invert(r)] {
                for s in 0..base.len() {
                    let mut rot = base[s..].to_vec();
                    rot.extend_from_slice(&base[..s]);
                    cycles.push(rot);
                }
            }
        }
        cycles
    }

    /// Populate the over-half and exact-half factor tables from every
    /// rotation of every relator and inverse relator.
    fn build_scan_tables(&mut self) -> Result<()> {
        let mut half_lens = BTreeSet::new();
        for cycle in self.relator_cycles() {
            let n = cycle.len();
            let half = n / 2;
            // Over-half prefixes: strictly more than half the cycle. The
            // whole cycle itself maps to the empty word.
            for plen in (half + 1)..=n {
                let key = cycle[..plen].to_vec();
                let val = invert(&cycle[plen..]);
                if let Some(old) = self.over_half.get(&key) {
                    if *old != val {
                        return Err(Error::InvalidPresentation(format!(
                            "factor {} admits two distinct over-half replacements",
                            format_word(&key)
                        )));
                    }
                } else {
                    self.over_half.insert(key, val);
                }
            }
            // Exact halves of even cycles: the complement has equal length.
            if n % 2 == 0 {
                let key = cycle[..half].to_vec();
                let val = invert(&cycle[half..]);
                if key != val {
                    if let Some(old) = self.exact_half.get(&key) {
                        if *old != val {
                            return Err(Error::InvalidPresentation(format!(
                                "factor {} admits two distinct half swaps",
                                format_word(&key)
                            )));
                        }
                    } else {
                        self.exact_half.insert(key, val);
                    }
                    half_lens.insert(half);
                }
            }
        }
        self.half_lens = half_lens.into_iter().collect();
        Ok(())
    }

    /// Leftmost shortest over-half factor of `w`, as
    /// `(position, factor length)`.
    fn find_over_half(&self, w: &[Letter]) -> Option<(usize, usize)> {
        if self.over_half.is_empty() {
            return None;
        }
        let max_len = self.relators.iter().map(Word::len).max().unwrap_or(0);
        for i in 0..w.len() {
            for plen in 2..=max_len.min(w.len() - i) {
                if self.over_half.contains_key(&w[i..i + plen]) {
                    return Some((i, plen));
                }
            }
        }
        None
    }

    /// Dehn reduction: freely reduce, then repeatedly replace the leftmost
    /// shortest over-half relator factor by its shorter complement until
    /// none remains. The result represents the same group element and is
    /// empty if and only if the element is the identity.
    pub fn dehn_reduce(&self, w: &[Letter]) -> Word {
        let mut w = free_reduce(w);
        while let Some((i, plen)) = self.find_over_half(&w) {
            let rep = &self.over_half[&w[i..i + plen]];
            let mut next: Word = Vec::with_capacity(w.len() - plen + rep.len());
            next.extend_from_slice(&w[..i]);
            next.extend_from_slice(rep);
            next.extend_from_slice(&w[i + plen..]);
            w = free_reduce(&next);
        }
        w
    }

    /// Length of the Dehn reduction; an upper bound on the geodesic length
    /// that never underestimates it by construction.
    pub fn dehn_norm(&self, w: &[Letter]) -> usize {
        self.dehn_reduce(w).len()
    }

    /// Whether `w` represents the identity element.
    pub fn is_identity(&self, w: &[Letter]) -> bool {
        self.dehn_reduce(w).is_empty()
    }

    /// All words obtained from `u` by one half swap, Dehn-reduced.
    fn half_swap_neighbours(&self, u: &[Letter]) -> Vec<Word> {
        let mut out = Vec::new();
        for &half in &self.half_lens {
            if u.len() < half {
                continue;
            }
            for i in 0..=u.len() - half {
                if let Some(rep) = self.exact_half.get(&u[i..i + half]) {
                    let mut v: Word =
                        Vec::with_capacity(u.len() - half + rep.len());
                    v.extend_from_slice(&u[..i]);
                    v.extend_from_slice(rep);
                    v.extend_from_slice(&u[i + half..]);
                    out.push(self.dehn_reduce(&v));
                }
            }
        }
        out
    }

    /// Canonical geodesic representative of the element `w` represents.
    ///
    /// Dehn-reduces, then explores the closure under half swaps (every swap
    /// product Dehn-reduced again). If any product comes back shorter the
    /// whole closure restarts from it — a Dehn-reduced word of length at
    /// least the relator length need not be geodesic, because a length-
    /// preserving swap can expose a fresh over-half factor. Once the
    /// closure is stable, every member is geodesic and the
    /// lexicographically least one is returned. Two words canonicalize to
    /// the same result exactly when they represent the same element.
    pub fn canonical_geodesic(&self, w: &[Letter]) -> Word {
        let mut w = self.dehn_reduce(w);
        if self.exact_half.is_empty() {
            return w;
        }
        'restart: loop {
            let n = w.len();
            if n < self.half_lens[0] {
                return w;
            }
            let mut seen: BTreeSet<Word> = BTreeSet::new();
            seen.insert(w.clone());
            let mut queue: VecDeque<Word> = VecDeque::new();
            queue.push_back(w.clone());
            while let Some(u) = queue.pop_front() {
                for v in self.half_swap_neighbours(&u) {
                    if v.len() < n {
                        w = v;
                        continue 'restart;
                    }
                    if !seen.contains(&v) {
                        seen.insert(v.clone());
                        queue.push_back(v);
                    }
                }
            }
            return seen.into_iter().next().expect("closure contains w");
        }
    }

    /// Canonical representative of `w · x` for a single letter `x`.
    pub fn canonical_step(&self, w: &[Letter], x: Letter) -> Word {
        let mut wx = w.to_vec();
        wx.push(x);
        self.canonical_geodesic(&wx)
    }
}
