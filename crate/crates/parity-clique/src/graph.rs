//! Random sign graphs, planted cliques, and the graph predicates used by
//! clique recovery.
//!
//! A [`SignGraph`] stores a symmetric n×n matrix over {-1,+1} with a +1
//! diagonal, packed one bit per entry (bit set ⇔ sign +1). Vertices are
//! 0-based everywhere, including on disk.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// Symmetric ±1 edge-sign matrix with +1 diagonal.
///
/// Rows are bit-packed so that whole-row AND drives common-neighbor
/// queries. Immutable once constructed; all queries are pure.
#[derive(Clone, PartialEq, Eq)]
pub struct SignGraph {
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl std::fmt::Debug for SignGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SignGraph(n={})", self.n)
    }
}

impl SignGraph {
    /// All off-diagonal signs -1 (empty graph), diagonal +1.
    pub fn all_minus(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("vertex count must be positive"));
        }
        let words_per_row = n.div_ceil(WORD_BITS);
        let mut g = SignGraph {
            n,
            words_per_row,
            bits: vec![0u64; n * words_per_row],
        };
        for i in 0..n {
            g.set_bit(i, i);
        }
        Ok(g)
    }

    /// Complete graph: every sign +1.
    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::all_minus(n)?;
        for i in 0..n {
            for j in 0..i {
                g.set_edge(i, j);
            }
        }
        Ok(g)
    }

    /// Graph with the given edge set; absent pairs get sign -1.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::all_minus(n)?;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            g.set_edge(u, v);
        }
        Ok(g)
    }

    fn set_bit(&mut self, i: usize, j: usize) {
        self.bits[i * self.words_per_row + j / WORD_BITS] |= 1u64 << (j % WORD_BITS);
    }

    fn set_edge(&mut self, i: usize, j: usize) {
        self.set_bit(i, j);
        self.set_bit(j, i);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline(always)]
    pub(crate) fn bit(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.n && j < self.n);
        (self.bits[i * self.words_per_row + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    /// Sign as ±1 without bounds checking beyond debug assertions.
    #[inline(always)]
    pub(crate) fn sign_unchecked(&self, i: usize, j: usize) -> i64 {
        if self.bit(i, j) {
            1
        } else {
            -1
        }
    }

    #[inline(always)]
    pub(crate) fn sign_f64(&self, i: usize, j: usize) -> f64 {
        if self.bit(i, j) {
            1.0
        } else {
            -1.0
        }
    }

    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::invalid(format!("vertex {v} out of range for n={}", self.n)))
        } else {
            Ok(())
        }
    }

    fn check_set(&self, s: &[usize]) -> Result<()> {
        for &v in s {
            self.check_vertex(v)?;
        }
        Ok(())
    }

    /// Edge sign of the pair (i, j); the diagonal is +1 by convention.
    pub fn edge_sign(&self, i: usize, j: usize) -> Result<i64> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        Ok(self.sign_unchecked(i, j))
    }

    /// Vertices adjacent (sign +1) to every member of `q`.
    ///
    /// Because the diagonal is +1, each vertex counts as its own neighbor,
    /// so members of `q` adjacent to the rest of `q` are included. For an
    /// empty `q` this is all of `[0, n)`.
    pub fn common_neighbors(&self, q: &[usize]) -> Result<Vec<usize>> {
        self.check_set(q)?;
        let mask = self.common_neighbors_mask(q);
        Ok(mask_to_vertices(&mask))
    }

    /// Bitmask form of [`SignGraph::common_neighbors`]; callers must have
    /// validated `q`.
    pub(crate) fn common_neighbors_mask(&self, q: &[usize]) -> Vec<u64> {
        let mut acc = self.full_mask();
        for &v in q {
            let row = self.row_words(v);
            for (a, w) in acc.iter_mut().zip(row) {
                *a &= w;
            }
        }
        acc
    }

    /// All-ones mask over [0, n), zero-padded in the tail word.
    pub(crate) fn full_mask(&self) -> Vec<u64> {
        let mut mask = vec![u64::MAX; self.words_per_row];
        let tail = self.n % WORD_BITS;
        if tail != 0 {
            mask[self.words_per_row - 1] = (1u64 << tail) - 1;
        }
        mask
    }

    /// Number of +1-neighbors of `v` inside `s`, not counting `v` itself.
    pub fn degree_within(&self, v: usize, s: &[usize]) -> Result<usize> {
        self.check_vertex(v)?;
        self.check_set(s)?;
        let mut deg = 0usize;
        for &u in s {
            if u != v && self.bit(v, u) {
                deg += 1;
            }
        }
        Ok(deg)
    }

    /// Like [`SignGraph::degree_within`] but over a bitmask of vertices.
    pub(crate) fn degree_within_mask(&self, v: usize, mask: &[u64]) -> usize {
        let row = self.row_words(v);
        let mut deg: u32 = 0;
        for (r, m) in row.iter().zip(mask) {
            deg += (r & m).count_ones();
        }
        let mut deg = deg as usize;
        // the +1 diagonal makes v self-adjacent; drop it when v ∈ mask
        if (mask[v / WORD_BITS] >> (v % WORD_BITS)) & 1 == 1 {
            deg -= 1;
        }
        deg
    }

    /// True iff every pair of distinct vertices in `s` has sign +1.
    pub fn is_clique(&self, s: &[usize]) -> Result<bool> {
        self.check_set(s)?;
        for (a, &i) in s.iter().enumerate() {
            for &j in &s[a + 1..] {
                if i != j && !self.bit(i, j) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Count of +1 off-diagonal signs at `v`.
    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        let ones: u32 = self.row_words(v).iter().map(|w| w.count_ones()).sum();
        Ok(ones as usize - 1)
    }
}

pub(crate) fn mask_to_vertices(mask: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (wi, &w) in mask.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            let b = w.trailing_zeros() as usize;
            out.push(wi * WORD_BITS + b);
            w &= w - 1;
        }
    }
    out
}

pub(crate) fn vertices_to_mask(n: usize, vs: &[usize]) -> Vec<u64> {
    let mut mask = vec![0u64; n.div_ceil(WORD_BITS)];
    for &v in vs {
        mask[v / WORD_BITS] |= 1u64 << (v % WORD_BITS);
    }
    mask
}

pub(crate) fn popcount(mask: &[u64]) -> usize {
    mask.iter().map(|w| w.count_ones() as usize).sum()
}

/// Sample G(n, 1/2) as a sign graph: each off-diagonal sign is
/// independently ±1 with probability 1/2, deterministic in `(n, seed)`.
pub fn sample_gnp_half(n: usize, seed: u64) -> Result<SignGraph> {
    let mut g = SignGraph::all_minus(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // fixed pair order (i ascending, j < i) for reproducibility
    for i in 0..n {
        for j in 0..i {
            if rand::Rng::random::<bool>(&mut rng) {
                g.set_edge(i, j);
            }
        }
    }
    Ok(g)
}

/// A sign graph together with its hidden clique.
#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub graph: SignGraph,
    /// Sorted clique vertex set.
    pub clique: Vec<usize>,
}

impl PlantedInstance {
    pub fn p(&self) -> usize {
        self.clique.len()
    }
}

/// Plant a clique of size `p` on a uniformly random (seeded) vertex subset:
/// all intra-clique signs become +1, everything else is untouched.
pub fn plant_clique(g: SignGraph, p: usize, seed: u64) -> Result<PlantedInstance> {
    let n = g.n();
    if p == 0 || p > n {
        return Err(Error::invalid(format!("clique size {p} out of range 1..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clique: Vec<usize> = rand::seq::index::sample(&mut rng, n, p).into_vec();
    clique.sort_unstable();
    let mut g = g;
    for (a, &i) in clique.iter().enumerate() {
        for &j in &clique[..a] {
            g.set_edge(i, j);
        }
    }
    Ok(PlantedInstance { graph: g, clique })
}

/// Write a graph (and optional clique) in the plain-text instance format.
///
/// Line 1 is `n=<int>`; line k for k = 2..=n holds k-1 characters over
/// {0,1}, character j giving the bit of the pair (k-1, j-1); an optional
/// final line `P=<comma-separated sorted vertices>` records a clique.
pub fn write_instance(path: &Path, g: &SignGraph, clique: Option<&[usize]>) -> Result<()> {
    // writeln! always emits a bare LF, which is the format's line ending
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "n={}", g.n())?;
    for i in 1..g.n() {
        let mut line = String::with_capacity(i);
        for j in 0..i {
            line.push(if g.bit(i, j) { '1' } else { '0' });
        }
        writeln!(out, "{line}")?;
    }
    if let Some(p) = clique {
        let joined: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        writeln!(out, "P={}", joined.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Read an instance file back: the graph plus the clique when a `P=` line
/// is present.
pub fn read_instance(path: &Path) -> Result<(SignGraph, Option<Vec<usize>>)> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();

    let header = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty file, expected n=<int>"))?
        .map_err(Error::Io)?;
    let n: usize = header
        .strip_prefix("n=")
        .ok_or_else(|| Error::parse(1, "expected header n=<int>"))?
        .trim()
        .parse()
        .map_err(|_| Error::parse(1, format!("bad vertex count in {header:?}")))?;
    if n == 0 {
        return Err(Error::parse(1, "vertex count must be positive"));
    }

    let mut g = SignGraph::all_minus(n)?;
    let mut clique: Option<Vec<usize>> = None;
    let mut lineno = 1usize;
    let mut row = 1usize; // next expected row vertex

    for line in lines {
        let line = line.map_err(Error::Io)?;
        lineno += 1;
        if let Some(rest) = line.strip_prefix("P=") {
            if row < n {
                return Err(Error::parse(lineno, format!("P= line before row {} was read", row + 1)));
            }
            let mut p = Vec::new();
            for tok in rest.split(',') {
                let tok = tok.trim();
                if tok.is_empty() {
                    continue;
                }
                let v: usize = tok
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad clique vertex {tok:?}")))?;
                if v >= n {
                    return Err(Error::parse(lineno, format!("clique vertex {v} out of range for n={n}")));
                }
                p.push(v);
            }
            if p.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::parse(lineno, "clique vertices must be sorted and distinct"));
            }
            if !g.is_clique(&p)? {
                return Err(Error::parse(lineno, "P= vertices do not form a clique in the graph"));
            }
            clique = Some(p);
            continue;
        }
        if row >= n {
            return Err(Error::parse(lineno, "unexpected extra line after last row"));
        }
        if line.len() != row {
            return Err(Error::parse(
                lineno,
                format!("row for vertex {row} must have {row} characters, got {}", line.len()),
            ));
        }
        for (j, c) in line.chars().enumerate() {
            match c {
                '1' => g.set_edge(row, j),
                '0' => {}
                other => {
                    return Err(Error::parse(lineno, format!("unexpected character {other:?}, want 0 or 1")))
                }
            }
        }
        row += 1;
    }
    if row < n {
        return Err(Error::parse(lineno, format!("file ends after row {row}, expected {} rows", n - 1)));
    }
    Ok((g, clique))
}
