//! Cycle enumeration in Tanner graphs and minimum GF(2) cycle bases.
//!
//! A cycle of length `2k` is stored as its ordered sequence of entry-ids in
//! which consecutive entries (cyclically) share alternately a CN and a VN. The
//! stored orientation is canonical: the sequence starts at the smallest
//! entry-id, and of its two cycle neighbours the smaller one comes second.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::{self, EchelonBasis, Gf2Vector};
use crate::tanner::{Edge, TannerGraph};

/// Incidence vector of a cycle over an edge universe.
pub type CycleVector = Gf2Vector;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    entries: Vec<usize>,
}

impl Cycle {
    /// Validates `entries` as a simple cycle of `g` and stores it canonically.
    pub fn new(entries: Vec<usize>, g: &TannerGraph) -> Result<Self> {
        validate(&entries, g)?;
        Ok(Self {
            entries: canonical(entries),
        })
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// Number of edges, `2k`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn cns(&self, g: &TannerGraph) -> BTreeSet<usize> {
        self.edges(g).map(|e| e.cn).collect()
    }

    pub fn vns(&self, g: &TannerGraph) -> BTreeSet<usize> {
        self.edges(g).map(|e| e.vn).collect()
    }

    fn edges<'a>(&'a self, g: &'a TannerGraph) -> impl Iterator<Item = &'a Edge> + 'a {
        self.entries.iter().map(move |&id| {
            g.edge_by_entry(id)
                .expect("cycle validated against this graph")
        })
    }

    /// Incidence vector over `universe`, a sorted list of entry-ids.
    pub fn vector(&self, universe: &[usize]) -> Result<CycleVector> {
        let mut v = Gf2Vector::zeros(universe.len());
        for &id in &self.entries {
            let pos = universe
                .binary_search(&id)
                .map_err(|_| Error::Dimension(format!("entry {id} is not in the edge universe")))?;
            v.set(pos, true);
        }
        Ok(v)
    }
}

fn validate(entries: &[usize], g: &TannerGraph) -> Result<()> {
    let n = entries.len();
    if n < 4 || n % 2 == 1 {
        return Err(Error::InvalidCycle(format!(
            "length {n} is not an even number >= 4"
        )));
    }
    let edges = entries
        .iter()
        .map(|&id| {
            g.edge_by_entry(id)
                .copied()
                .ok_or_else(|| Error::InvalidCycle(format!("entry {id} not in graph")))
        })
        .collect::<Result<Vec<_>>>()?;
    // first pair decides the phase; the rest must alternate
    let first_shares_cn = edges[0].cn == edges[1].cn;
    let mut cns = BTreeSet::new();
    let mut vns = BTreeSet::new();
    for w in 0..n {
        let (a, b) = (edges[w], edges[(w + 1) % n]);
        let want_cn = (w % 2 == 0) == first_shares_cn;
        let ok = if want_cn {
            a.cn == b.cn && a.vn != b.vn && cns.insert(a.cn)
        } else {
            a.vn == b.vn && a.cn != b.cn && vns.insert(a.vn)
        };
        if !ok {
            return Err(Error::InvalidCycle(format!(
                "entries {} and {} break the CN/VN alternation",
                a.entry, b.entry
            )));
        }
    }
    Ok(())
}

fn canonical(mut entries: Vec<usize>) -> Vec<usize> {
    let n = entries.len();
    let start = (0..n).min_by_key(|&i| entries[i]).unwrap_or(0);
    entries.rotate_left(start);
    if n > 2 && entries[1] > entries[n - 1] {
        entries[1..].reverse();
    }
    entries
}

/// All simple cycles of length at most `max_len`, each exactly once, sorted by
/// length and then by canonical entry sequence.
pub fn enumerate_cycles(g: &TannerGraph, max_len: usize) -> Vec<Cycle> {
    if max_len < 4 {
        return Vec::new();
    }
    let mut out: Vec<Cycle> = g
        .edges()
        .par_iter()
        .flat_map_iter(|root| cycles_rooted_at(g, *root, max_len))
        .collect();
    out.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.entries.cmp(&b.entries))
    });
    out
}

// Cycles whose smallest entry is `root`, traversed VN -> CN along the root first.
fn cycles_rooted_at(g: &TannerGraph, root: Edge, max_len: usize) -> Vec<Cycle> {
    struct Search<'a> {
        g: &'a TannerGraph,
        root: Edge,
        max_len: usize,
        path: Vec<usize>,
        on_vn: Vec<bool>,
        on_cn: Vec<bool>,
        found: Vec<Cycle>,
    }

    impl Search<'_> {
        // `cn` was just entered; path holds the edges so far
        fn at_cn(&mut self, cn: usize) {
            let g = self.g;
            for e in g.cn_edges(cn) {
                if e.entry <= self.root.entry || self.on_vn[e.vn] {
                    if e.vn == self.root.vn && e.entry > self.root.entry && self.path.len() + 1 >= 4
                    {
                        let mut entries = self.path.clone();
                        entries.push(e.entry);
                        self.found.push(Cycle {
                            entries: canonical(entries),
                        });
                    }
                    continue;
                }
                // need at least two more edges to come back to the root VN
                if self.path.len() + 3 > self.max_len {
                    continue;
                }
                self.path.push(e.entry);
                self.on_vn[e.vn] = true;
                self.at_vn(e.vn);
                self.on_vn[e.vn] = false;
                self.path.pop();
            }
        }

        fn at_vn(&mut self, vn: usize) {
            let g = self.g;
            for e in g.vn_edges(vn) {
                if e.entry <= self.root.entry || self.on_cn[e.cn] {
                    continue;
                }
                self.path.push(e.entry);
                self.on_cn[e.cn] = true;
                self.at_cn(e.cn);
                self.on_cn[e.cn] = false;
                self.path.pop();
            }
        }
    }

    let mut s = Search {
        g,
        root,
        max_len,
        path: vec![root.entry],
        on_vn: vec![false; g.vn_bound()],
        on_cn: vec![false; g.cn_bound()],
        found: Vec::new(),
    };
    s.on_vn[root.vn] = true;
    s.on_cn[root.cn] = true;
    s.at_cn(root.cn);
    s.found
}

/// Componentwise GF(2) sum of two cycle vectors.
pub fn cycle_xor(u: &CycleVector, v: &CycleVector) -> Result<CycleVector> {
    if u.len() != v.len() {
        return Err(Error::Dimension(format!(
            "cycle vectors of lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    let mut out = u.clone();
    out.xor_assign(v);
    Ok(out)
}

/// GF(2) rank of a set of cycle vectors.
pub fn cycle_space_rank(vectors: &[CycleVector]) -> usize {
    gf2::rank(vectors)
}

/// A cycle basis of a subgraph whose CNs all have degree 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBasis {
    universe: Vec<usize>,
    cycles: Vec<Cycle>,
    vectors: Vec<CycleVector>,
}

impl CycleBasis {
    /// Sorted entry-ids the vectors are indexed by.
    pub fn universe(&self) -> &[usize] {
        &self.universe
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn vectors(&self) -> &[CycleVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Whether `v` lies in the span of the basis.
    pub fn spans(&self, v: &CycleVector) -> bool {
        let mut e = EchelonBasis::new();
        for b in &self.vectors {
            e.insert(b);
        }
        e.contains(v)
    }

    /// Every two consecutive basic cycles share at least one CN.
    pub fn consecutive_share(&self, g: &TannerGraph) -> bool {
        let sets: Vec<_> = self.cycles.iter().map(|c| c.cns(g)).collect();
        sets.windows(2).all(|w| !w[0].is_disjoint(&w[1]))
    }

    /// Every basic cycle has a CN not used by the cycles before it.
    pub fn fresh_cns(&self, g: &TannerGraph) -> bool {
        let mut seen = BTreeSet::new();
        self.cycles.iter().all(|c| {
            let cns = c.cns(g);
            let fresh = !cns.is_subset(&seen);
            seen.extend(cns);
            fresh
        })
    }

    /// Uses the given cycles, in the given order, as a basis of `g`.
    pub fn from_cycles(g: &TannerGraph, cycles: Vec<Cycle>) -> Result<Self> {
        let nf = check_basis_host(g)?;
        if cycles.len() != nf {
            return Err(Error::BasisMismatch(format!(
                "{} cycles given, cycle space has dimension {nf}",
                cycles.len()
            )));
        }
        let universe: Vec<usize> = g.edges().iter().map(|e| e.entry).collect();
        let mut vectors = Vec::with_capacity(cycles.len());
        let mut echelon = EchelonBasis::new();
        for c in &cycles {
            let c = Cycle::new(c.entries.clone(), g)?;
            let v = c.vector(&universe)?;
            if !echelon.insert(&v) {
                return Err(Error::BasisMismatch("cycles are linearly dependent".into()));
            }
            vectors.push(v);
        }
        Ok(Self {
            universe,
            cycles,
            vectors,
        })
    }
}

// Checks degree-2 CNs and connectivity; returns the cycle-space dimension.
fn check_basis_host(g: &TannerGraph) -> Result<usize> {
    if let Some(&c) = g.cns().iter().find(|&&c| g.cn_degree(c) != 2) {
        return Err(Error::InvalidConfig(format!(
            "CN {c} has degree {} in a cycle-basis subgraph",
            g.cn_degree(c)
        )));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok((g.cns().len() + 1).saturating_sub(g.vns().len()))
}

/// Minimum-length cycle basis of a connected subgraph with degree-2 CNs.
///
/// Cycles are taken greedily in (length, canonical sequence) order whenever
/// they are independent of those already chosen, then reordered so that
/// consecutive basic cycles share a CN where possible.
pub fn minimum_cycle_basis(g: &TannerGraph) -> Result<CycleBasis> {
    let nf = check_basis_host(g)?;
    let universe: Vec<usize> = g.edges().iter().map(|e| e.entry).collect();
    let mut echelon = EchelonBasis::new();
    let mut chosen = Vec::with_capacity(nf);
    if nf > 0 {
        for c in enumerate_cycles(g, 2 * g.vns().len()) {
            let v = c.vector(&universe)?;
            if echelon.insert(&v) {
                chosen.push((c, v));
                if chosen.len() == nf {
                    break;
                }
            }
        }
    }
    if chosen.len() != nf {
        return Err(Error::Internal(format!(
            "found {} independent cycles, expected {nf}",
            chosen.len()
        )));
    }
    let chosen = order_for_sharing(g, chosen);
    let (cycles, vectors) = chosen.into_iter().unzip();
    Ok(CycleBasis {
        universe,
        cycles,
        vectors,
    })
}

fn order_for_sharing(
    g: &TannerGraph,
    mut pool: Vec<(Cycle, CycleVector)>,
) -> Vec<(Cycle, CycleVector)> {
    let mut out: Vec<(Cycle, CycleVector)> = Vec::with_capacity(pool.len());
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    while !pool.is_empty() {
        let last = out.last().map(|(c, _)| c.cns(g));
        let score = |c: &Cycle| {
            let cns = c.cns(g);
            let shares_last = last.as_ref().is_none_or(|l| !l.is_disjoint(&cns));
            let fresh = !cns.is_subset(&seen);
            let shares_any = seen.is_empty() || !seen.is_disjoint(&cns);
            (shares_last && fresh, shares_last, shares_any)
        };
        // first (lowest-order) cycle with the best score
        let best = (0..pool.len())
            .max_by(|&i, &j| score(&pool[i].0).cmp(&score(&pool[j].0)).then(j.cmp(&i)))
            .expect("pool is nonempty");
        let item = pool.remove(best);
        seen.extend(item.0.cns(g));
        out.push(item);
    }
    out
}
