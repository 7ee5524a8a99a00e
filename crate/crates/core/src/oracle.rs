//! Brute-force verifiers: relocation-fraction measurement, MD object
//! profiles, MD-side recounts, Monte Carlo averages and a subset scan.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::absorbing::{classify_config, enumerate_uas, UasConfig, UasInstance};
use crate::cycles::{enumerate_cycles, CycleBasis};
use crate::error::{Error, Result};
use crate::relocation::{assemble_md, is_cycle_active, is_uas_active, split_matrices, Modulus};
use crate::tanner::{build_graph, BinaryMatrix, TannerGraph};
use crate::Rational;

/// Degree-2 CNs of `u` as `(vn_index_a, entry_a, vn_index_b, entry_b)`.
fn deg2_pairs(u: &UasInstance, g: &TannerGraph) -> Vec<(usize, usize, usize, usize)> {
    let mut by_cn: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for &e in u.deg2_edges() {
        let edge = g.edge_by_entry(e).expect("instance edge in graph");
        let idx = u.vns().binary_search(&edge.vn).expect("instance VN");
        by_cn.entry(edge.cn).or_default().push((idx, e));
    }
    by_cn
        .into_values()
        .map(|p| (p[0].0, p[0].1, p[1].0, p[1].1))
        .collect()
}

fn beta_min_pairs(
    pairs: &[(usize, usize, usize, usize)],
    a: usize,
    values: &[u32],
    m: u32,
) -> usize {
    let mut s = vec![0u32; a];
    let mut best = usize::MAX;
    loop {
        let missed = pairs
            .iter()
            .filter(|&&(x, ex, y, ey)| (values[ex] + s[x]) % m != (values[ey] + s[y]) % m)
            .count();
        best = best.min(missed);
        if best == 0 {
            return 0;
        }
        // odometer over s[1..], s[0] pinned to 0
        let mut i = 1;
        while i < a {
            s[i] += 1;
            if s[i] < m {
                break;
            }
            s[i] = 0;
            i += 1;
        }
        if i >= a {
            return best;
        }
    }
}

/// Minimum, over VN shift potentials with one VN pinned, of the number of
/// degree-2 CNs whose two edges land on different CN copies.
///
/// `values` holds a relocation value per host entry.
pub fn beta_min(u: &UasInstance, g: &TannerGraph, values: &[u32], m: Modulus) -> usize {
    beta_min_pairs(&deg2_pairs(u, g), u.a(), values, m.get())
}

/// Every cycle of the degree-2 subgraph, not just the basic ones, is active.
pub fn span_cycles_active(u: &UasInstance, g: &TannerGraph, values: &[u32], m: Modulus) -> bool {
    enumerate_cycles(&u.deg2_subgraph(g), 2 * u.a())
        .iter()
        .all(|c| is_cycle_active(c, values, m))
}

/// Measured fractions of relocation arrangements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalFractions {
    pub modulus: u32,
    pub n_f: usize,
    /// Number of equally weighted classes that were evaluated.
    pub classes: u64,
    /// Classes by `beta_min`.
    pub beta_histogram: BTreeMap<usize, u64>,
    /// Classes in which every basic cycle is inactive.
    pub basis_inactive: u64,
    /// Classes in which every cycle is inactive.
    pub all_cycles_inactive: u64,
}

impl EmpiricalFractions {
    fn ratio(&self, count: u64) -> Rational {
        Rational::new(BigInt::from(count), BigInt::from(self.classes))
    }

    fn beta_count(&self, keep: impl Fn(usize) -> bool) -> u64 {
        self.beta_histogram
            .iter()
            .filter(|(b, _)| keep(**b))
            .map(|(_, n)| n)
            .sum()
    }

    pub fn f_0(&self) -> Rational {
        self.ratio(self.beta_count(|b| b == 0))
    }

    pub fn f_1(&self) -> Rational {
        self.ratio(self.beta_count(|b| b == 1))
    }

    pub fn f_not(&self) -> Rational {
        self.ratio(self.beta_count(|b| b >= 2))
    }

    pub fn f_nou(&self) -> Rational {
        self.ratio(self.beta_count(|b| b > 0))
    }

    pub fn f_nof(&self) -> Rational {
        self.ratio(self.basis_inactive)
    }

    pub fn f_all_cycles_inactive(&self) -> Rational {
        self.ratio(self.all_cycles_inactive)
    }
}

struct Evaluator<'a> {
    u: &'a UasInstance,
    pairs: Vec<(usize, usize, usize, usize)>,
    basis: CycleBasis,
    all_cycles: Vec<crate::cycles::Cycle>,
    m: Modulus,
    host_entries: usize,
}

impl<'a> Evaluator<'a> {
    fn new(u: &'a UasInstance, g: &TannerGraph, m: Modulus) -> Result<Self> {
        Ok(Self {
            u,
            pairs: deg2_pairs(u, g),
            basis: u.cycle_basis(g)?,
            all_cycles: enumerate_cycles(&u.deg2_subgraph(g), 2 * u.a()),
            m,
            host_entries: g.edges().iter().map(|e| e.entry + 1).max().unwrap_or(0),
        })
    }

    /// `(beta_min, basis all inactive, all cycles inactive)`.
    fn eval(&self, values: &[u32]) -> (usize, bool, bool) {
        let beta = beta_min_pairs(&self.pairs, self.u.a(), values, self.m.get());
        let basis = self
            .basis
            .cycles()
            .iter()
            .all(|c| !is_cycle_active(c, values, self.m));
        let all = self
            .all_cycles
            .iter()
            .all(|c| !is_cycle_active(c, values, self.m));
        (beta, basis, all)
    }

    /// Evaluates `count` assignments where the `free` entries take the base-M
    /// digits of the class index; everything else stays 0.
    fn sweep(&self, free: &[usize], n_f: usize) -> EmpiricalFractions {
        let m = self.m.get() as u64;
        let count = m.pow(free.len() as u32);
        let (hist, basis_inactive, all_inactive) = (0..count)
            .into_par_iter()
            .map(|mut k| {
                let mut values = vec![0u32; self.host_entries];
                for &e in free {
                    values[e] = (k % m) as u32;
                    k /= m;
                }
                let (beta, b, a) = self.eval(&values);
                (BTreeMap::from([(beta, 1u64)]), b as u64, a as u64)
            })
            .reduce(
                || (BTreeMap::new(), 0, 0),
                |(mut h1, b1, a1), (h2, b2, a2)| {
                    for (k, v) in h2 {
                        *h1.entry(k).or_insert(0) += v;
                    }
                    (h1, b1 + b2, a1 + a2)
                },
            );
        EmpiricalFractions {
            modulus: self.m.get(),
            n_f,
            classes: count,
            beta_histogram: hist,
            basis_inactive,
            all_cycles_inactive: all_inactive,
        }
    }
}

/// Degree-2 edges outside a BFS spanning tree of the degree-2 subgraph.
///
/// Adding a constant to every edge at one node (VN or CN) changes no cycle
/// sum and no `beta_min`, so each class of assignments modulo those shifts has
/// exactly one representative that is zero on the tree. The classes all have
/// the same size.
fn cotree_edges(u: &UasInstance, g: &TannerGraph) -> Vec<usize> {
    let sub = u.deg2_subgraph(g);
    let mut seen_vn = BTreeSet::new();
    let mut seen_cn = BTreeSet::new();
    let mut tree = BTreeSet::new();
    let mut queue = std::collections::VecDeque::new();
    if let Some(&v0) = sub.vns().first() {
        seen_vn.insert(v0);
        queue.push_back((false, v0));
    }
    while let Some((is_cn, node)) = queue.pop_front() {
        let edges: Vec<_> = if is_cn {
            sub.cn_edges(node).collect()
        } else {
            sub.vn_edges(node).collect()
        };
        for e in edges {
            let fresh = if is_cn {
                seen_vn.insert(e.vn)
            } else {
                seen_cn.insert(e.cn)
            };
            if fresh {
                tree.insert(e.entry);
                queue.push_back((!is_cn, if is_cn { e.vn } else { e.cn }));
            }
        }
    }
    u.deg2_edges()
        .iter()
        .copied()
        .filter(|e| !tree.contains(e))
        .collect()
}

/// Exact fractions over all relocation assignments of the degree-2 edges of
/// `u`, computed on the `M^n_f` shift classes.
pub fn exhaustive_fractions(
    u: &UasInstance,
    g: &TannerGraph,
    m: Modulus,
) -> Result<EmpiricalFractions> {
    let ev = Evaluator::new(u, g, m)?;
    let free = cotree_edges(u, g);
    if free.len() != ev.basis.len() {
        return Err(Error::Internal(format!(
            "{} cotree edges for {} basic cycles",
            free.len(),
            ev.basis.len()
        )));
    }
    Ok(ev.sweep(&free, ev.basis.len()))
}

/// Same measurement over all `M^E` assignments of the degree-2 edges. Only
/// practical for tiny instances.
pub fn full_enumeration_fractions(
    u: &UasInstance,
    g: &TannerGraph,
    m: Modulus,
) -> Result<EmpiricalFractions> {
    let ev = Evaluator::new(u, g, m)?;
    let mut r = ev.sweep(u.deg2_edges(), ev.basis.len());
    // report in units of shift classes so the two sweeps compare directly
    let scale = (m.get() as u64).pow((u.deg2_edges().len() - ev.basis.len()) as u32);
    for n in r.beta_histogram.values_mut() {
        *n /= scale;
    }
    r.basis_inactive /= scale;
    r.all_cycles_inactive /= scale;
    r.classes /= scale;
    Ok(r)
}

/// Number of `c` instances found in the graph of an MD matrix.
pub fn enumerate_md_uas(h_md: &BinaryMatrix, c: &UasConfig) -> usize {
    enumerate_uas(&build_graph(h_md), c).len()
}

/// Shape of the MD subgraph induced by the `M` copies of an instance's VNs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdObjectProfile {
    pub vn_count: usize,
    pub odd_cn_count: usize,
    /// `(vn_count, odd_cn_count)` per connected component, sorted.
    pub components: Vec<(usize, usize)>,
    /// Degree of each VN copy, indexed `copy * a + vn_index`.
    pub vn_degrees: Vec<usize>,
}

impl MdObjectProfile {
    pub fn connected(&self) -> bool {
        self.components.len() == 1
    }
}

/// Builds the MD matrix of the instance's induced submatrix and profiles the
/// object formed by all VN copies.
pub fn md_object_profile(
    u: &UasInstance,
    g: &TannerGraph,
    values: &[u32],
    m: Modulus,
) -> Result<MdObjectProfile> {
    let cns: Vec<usize> = u
        .deg2_cns()
        .iter()
        .chain(u.deg1_cns())
        .copied()
        .sorted()
        .collect();
    let mut positions = Vec::new();
    for e in u.induced_edges() {
        let edge = g.edge_by_entry(e).expect("instance edge in graph");
        let r = cns.binary_search(&edge.cn).expect("instance CN");
        let c = u.vns().binary_search(&edge.vn).expect("instance VN");
        positions.push(((r, c), values[e]));
    }
    positions.sort_unstable();
    let sub = BinaryMatrix::new(
        cns.len(),
        u.a(),
        positions.iter().map(|p| p.0).collect::<Vec<_>>(),
    )?;
    let local_values: Vec<u32> = positions.iter().map(|p| p.1).collect();
    let md = assemble_md(&split_matrices(&sub, &local_values, m)?)?;
    let mg = build_graph(&md);

    let n_vn = md.n_cols();
    let mut parent: Vec<usize> = (0..n_vn).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut odd_cns = Vec::new();
    for cn in 0..md.n_rows() {
        let vns: Vec<usize> = mg.cn_edges(cn).map(|e| e.vn).collect();
        if vns.len() % 2 == 1 {
            odd_cns.push((cn, vns[0]));
        }
        for w in vns.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut comps: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for v in 0..n_vn {
        comps.entry(find(&mut parent, v)).or_default().0 += 1;
    }
    for &(_, v) in &odd_cns {
        comps.get_mut(&find(&mut parent, v)).expect("component").1 += 1;
    }
    Ok(MdObjectProfile {
        vn_count: n_vn,
        odd_cn_count: odd_cns.len(),
        components: comps.into_values().sorted().collect(),
        vn_degrees: (0..n_vn).map(|v| mg.vn_degree(v)).collect(),
    })
}

/// Sample mean of a count with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarlo {
    pub trials: u64,
    pub mean: f64,
    pub std_error: f64,
}

/// Mean number of `c` instances in the MD code under uniform i.i.d. entry
/// relocations. Trial `t` draws from its own ChaCha stream, so the result
/// does not depend on the thread count.
///
/// Requires a configuration classified as stand-alone and non-regenerable
/// whose host instances share no degree-2 edge.
pub fn monte_carlo_avg(
    h: &BinaryMatrix,
    c: &UasConfig,
    m: Modulus,
    trials: u64,
    seed: u64,
) -> Result<MonteCarlo> {
    let class = classify_config(c);
    if class.stand_alone != Some(true) || class.non_regenerable != Some(true) {
        return Err(Error::InvalidConfig(format!(
            "{c} is not certified stand-alone and non-regenerable"
        )));
    }
    let g = build_graph(h);
    let instances = enumerate_uas(&g, c);
    let mut used = BTreeSet::new();
    for u in &instances {
        for &e in u.deg2_edges() {
            if !used.insert(e) {
                return Err(Error::InvalidConfig(format!("{c} instances share cycles")));
            }
        }
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("at least one trial is needed".into()));
    }
    let counts: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let values: Vec<u32> = (0..h.nnz()).map(|_| rng.random_range(0..m.get())).collect();
            let md = assemble_md(&split_matrices(h, &values, m)?)?;
            Ok(enumerate_md_uas(&md, c))
        })
        .collect::<Result<_>>()?;
    let n = trials as f64;
    let mean = counts.iter().map(|&x| x as f64).sum::<f64>() / n;
    let var = if trials > 1 {
        counts
            .iter()
            .map(|&x| (x as f64 - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    Ok(MonteCarlo {
        trials,
        mean,
        std_error: (var / n).sqrt(),
    })
}

/// Every `a`-subset of columns satisfying the `(a, d1)` definition, checked
/// directly on the matrix. Sorted VN sets.
pub fn brute_force_uas(h: &BinaryMatrix, c: &UasConfig) -> Vec<Vec<usize>> {
    let cols = h.column_lists();
    (0..h.n_cols())
        .combinations(c.a)
        .par_bridge()
        .filter(|set| satisfies_definition(&cols, set, c.d1))
        .collect::<Vec<_>>()
        .into_iter()
        .sorted()
        .collect()
}

fn satisfies_definition(cols: &[Vec<usize>], set: &[usize], d1: usize) -> bool {
    let mut deg: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &v) in set.iter().enumerate() {
        for &r in &cols[v] {
            deg.entry(r).or_default().push(i);
        }
    }
    if deg.values().any(|vs| vs.len() > 2) {
        return false;
    }
    if deg.values().filter(|vs| vs.len() == 1).count() != d1 {
        return false;
    }
    let mut parent: Vec<usize> = (0..set.len()).collect();
    let root = |p: &Vec<usize>, mut x: usize| {
        while p[x] != x {
            x = p[x];
        }
        x
    };
    for &v in set {
        let two = cols[v].iter().filter(|r| deg[r].len() == 2).count();
        if 2 * two <= cols[v].len() {
            return false;
        }
    }
    for vs in deg.values().filter(|vs| vs.len() == 2) {
        let (a, b) = (root(&parent, vs[0]), root(&parent, vs[1]));
        parent[a] = b;
    }
    let r0 = root(&parent, 0);
    (0..set.len()).all(|i| root(&parent, i) == r0)
}

/// `beta_min == 0`, basis activity and all-cycle activity agree.
pub fn activity_agrees(
    u: &UasInstance,
    basis: &CycleBasis,
    g: &TannerGraph,
    values: &[u32],
    m: Modulus,
) -> Result<bool> {
    let by_basis = is_uas_active(u, basis, values, m)?;
    Ok(by_basis == (beta_min(u, g, values, m) == 0)
        && by_basis == span_cycles_active(u, g, values, m))
}
